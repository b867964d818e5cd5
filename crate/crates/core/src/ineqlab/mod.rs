//! Numerical checks of the Markov and Bernstein type inequalities on
//! subsets of the circle, their constants and their sharpness sequences.
//!
//! Every check produces an [`InequalityReport`] whose `ratio` is the
//! measured quantity over the theoretical factor. The bounds are asymptotic,
//! so suites compare ratios against `1 + slack(n)` with a frozen envelope.

mod algebraic;
mod bernstein;
mod corpus;
mod markov;
mod symmetrize;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composition::CompositionError;
use crate::equilibrium::EquilibriumError;
use crate::fastdecay::FastDecayError;
use crate::poly::IntervalSet;
use crate::tset::TSetError;

pub use algebraic::{algebraic_circle_check, split_on_circle, trig_to_algebraic, CircleMode};
pub use bernstein::{
    bernstein_interior_check, bernstein_interior_check_with, scale_separation, ScaleSeparation, INTERIOR_MARGIN,
};
pub use corpus::{corpus, CorpusEntry, CorpusOptions};
pub use markov::{
    calibrate_slack, markov_endpoint_check, markov_sharpness_scan, markov_upper_bound_suite, rough_markov_check, SuiteFixture,
    SuiteReport,
};
pub use symmetrize::{discrepancy_decreasing, symmetrization_experiment, SymmetrizationOptions, SymmetrizationReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IneqError {
    #[error("interval condition fails at a = {a} with rho = {rho}")]
    IntervalConditionViolated { a: f64, rho: f64 },
    #[error("t = {0} is not in the interior of the set (margin {1})")]
    NotInterior(f64, f64),
    #[error("zero polynomial has no meaningful ratio")]
    ZeroPolynomial,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error(transparent)]
    TSet(#[from] TSetError),
    #[error(transparent)]
    FastDecay(#[from] FastDecayError),
    #[error(transparent)]
    Composition(#[from] CompositionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    RoughMarkov,
    MarkovEndpoint,
    BernsteinInterior,
    AlgebraicMarkov,
    AlgebraicBernstein,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::RoughMarkov => "rough_markov",
            Self::MarkovEndpoint => "markov_endpoint",
            Self::BernsteinInterior => "bernstein_interior",
            Self::AlgebraicMarkov => "algebraic_markov",
            Self::AlgebraicBernstein => "algebraic_bernstein",
        }
    }
}

/// One measured-versus-theoretical comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub bound: BoundKind,
    pub set: IntervalSet,
    /// Point the bound refers to (endpoint or interior point).
    pub point: Option<f64>,
    /// Segment the measured sup was taken over.
    pub segment: Option<(f64, f64)>,
    pub degree: f64,
    pub order: usize,
    pub measured: f64,
    pub theoretical: f64,
    /// `measured / theoretical`.
    pub ratio: f64,
    /// Endpoint checks also record the value at the point itself.
    pub point_measured: Option<f64>,
    pub point_ratio: Option<f64>,
    pub source: String,
}

impl InequalityReport {
    pub const CSV_HEADER: [&'static str; 13] = [
        "bound",
        "set",
        "point",
        "segment_lo",
        "segment_hi",
        "degree",
        "order",
        "measured",
        "theoretical",
        "ratio",
        "point_measured",
        "point_ratio",
        "source",
    ];

    /// Ratio the suites compare against the envelope: the at-point value
    /// when there is one.
    pub fn headline_ratio(&self) -> f64 {
        self.point_ratio.unwrap_or(self.ratio)
    }

    fn csv_record(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        vec![
            self.bound.name().to_string(),
            set_string(&self.set),
            opt(self.point),
            opt(self.segment.map(|s| s.0)),
            opt(self.segment.map(|s| s.1)),
            fmt_f64(self.degree),
            self.order.to_string(),
            fmt_f64(self.measured),
            fmt_f64(self.theoretical),
            fmt_f64(self.ratio),
            opt(self.point_measured),
            opt(self.point_ratio),
            self.source.clone(),
        ]
    }
}

/// CSV table of reports with a header row.
pub fn reports_to_csv(reports: &[InequalityReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(InequalityReport::CSV_HEADER).expect("in-memory write");
    for r in reports {
        w.write_record(r.csv_record()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Absolute slack in the monotonicity flag; ratios that are exactly 1 in
/// exact arithmetic drift downwards by roundoff.
pub const MONOTONE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub l: usize,
    pub n: usize,
    pub ratio: f64,
}

/// Ratios of one bound along a degree sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub bound: BoundKind,
    pub set: IntervalSet,
    pub point: f64,
    pub order: usize,
    pub rows: Vec<ConvergenceRow>,
    /// Nondecreasing after the first two rows, up to [`MONOTONE_TOL`].
    pub monotone_after_second: bool,
}

impl ConvergenceTable {
    pub fn new(
        bound: BoundKind,
        set: IntervalSet,
        point: f64,
        order: usize,
        mut rows: Vec<ConvergenceRow>,
    ) -> Result<Self, IneqError> {
        rows.sort_by_key(|r| r.n);
        if rows.windows(2).any(|w| w[0].n == w[1].n) {
            return Err(IneqError::InvalidInput("repeated degree in convergence table".into()));
        }
        let monotone_after_second = rows
            .iter()
            .skip(2)
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[1].ratio >= w[0].ratio - MONOTONE_TOL);
        Ok(Self {
            bound,
            set,
            point,
            order,
            rows,
            monotone_after_second,
        })
    }

    pub fn final_ratio(&self) -> Option<f64> {
        self.rows.last().map(|r| r.ratio)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("bound,order,point,l,n,ratio\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                self.bound.name(),
                self.order,
                fmt_f64(self.point),
                r.l,
                r.n,
                fmt_f64(r.ratio)
            );
        }
        out
    }
}

/// Finite-degree envelope `slack(n) = c / sqrt(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slack {
    pub c: f64,
}

/// Envelope constant, calibrated on the extremal families (see
/// [`calibrate_slack`]) and frozen.
pub const FROZEN_SLACK_C: f64 = 0.5;

impl Default for Slack {
    fn default() -> Self {
        Self { c: FROZEN_SLACK_C }
    }
}

impl Slack {
    pub fn at(&self, n: f64) -> f64 {
        self.c / n.sqrt()
    }

    pub fn admits(&self, ratio: f64, n: f64) -> bool {
        ratio <= 1.0 + self.at(n)
    }
}

/// Order-preserving parallel map over scoped threads.
pub(crate) fn par_map<T: Sync, R: Send, F: Fn(&T) -> R + Sync>(items: &[T], f: F) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Shortest round-trip decimal form.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn set_string(e: &IntervalSet) -> String {
    e.intervals()
        .iter()
        .map(|(l, r)| format!("[{},{}]", fmt_f64(*l), fmt_f64(*r)))
        .collect::<Vec<_>>()
        .join(";")
}

pub(crate) fn make_report(
    bound: BoundKind,
    set: &IntervalSet,
    degree: f64,
    order: usize,
    measured: f64,
    theoretical: f64,
    source: &str,
) -> Result<InequalityReport, IneqError> {
    if !(theoretical > 0.0) || !theoretical.is_finite() {
        return Err(IneqError::ZeroPolynomial);
    }
    Ok(InequalityReport {
        bound,
        set: set.clone(),
        point: None,
        segment: None,
        degree,
        order,
        measured,
        theoretical,
        ratio: measured / theoretical,
        point_measured: None,
        point_ratio: None,
        source: source.to_string(),
    })
}
