//! Fast decreasing polynomials with prescribed zeros.
//!
//! Both constructions write the polynomial as `Q = S^2`, where `S` is an
//! antiderivative of a product of nonnegative factors, a two-bump window and a
//! free factor `R` whose roots (together with the window weight `lambda`) are
//! chosen so that `S` vanishes at every prescribed zero. The parameters come
//! from a Poincare-Miranda solve of the gap integrals.

mod alg;
mod gaps;
mod trig;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::miranda::MirandaError;
use crate::poly::{ChebSeries, PolyError, TrigPoly};

pub use alg::{build_fd_algebraic, construct_fd_algebraic, FastDecaySpecAlg};
pub use trig::{build_fd_trig, construct_fd_trig, extremal_peaking_factor, FastDecaySpecTrig};

/// Points of the uniform grid every property is checked on.
pub const CHECK_GRID: usize = 10_000;
/// Prescribed derivatives must vanish relative to [`ChebSeries::derivative_bound`]
/// (or the trigonometric analogue).
pub const ZERO_TOL: f64 = 1e-9;
pub const PEAK_TOL: f64 = 1e-12;
pub const NONNEG_TOL: f64 = 1e-13;
pub const SQUARING_TOL: f64 = 1e-11;
/// Relative evaluation error of `Q` against its coefficient sum, removed
/// before the weighted smallness ratio is formed.
pub const EVAL_ERR: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FastDecayError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("degree too small: {0}")]
    DegreeTooSmall(String),
    #[error(transparent)]
    Miranda(#[from] MirandaError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// `measured <= bound`
    AtMost,
    /// `measured > bound`
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub property: String,
    pub measured: f64,
    pub bound: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl PropertyCheck {
    pub fn at_most(property: &str, measured: f64, bound: f64) -> Self {
        Self {
            property: property.into(),
            measured,
            bound,
            comparison: Comparison::AtMost,
            pass: measured <= bound,
        }
    }

    pub fn above(property: &str, measured: f64, bound: f64) -> Self {
        Self {
            property: property.into(),
            measured,
            bound,
            comparison: Comparison::Above,
            pass: measured > bound,
        }
    }

    /// Positive when the check passes with room to spare.
    pub fn margin(&self) -> f64 {
        match self.comparison {
            Comparison::AtMost => self.bound - self.measured,
            Comparison::Above => self.measured - self.bound,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.property.as_str()).collect()
    }

    pub fn get(&self, property: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.property == property)
    }

    /// CSV rows `property,measured,bound,margin,pass` with a header.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["property", "measured", "bound", "margin", "pass"]).expect("in-memory write");
        for c in &self.checks {
            w.write_record([
                c.property.clone(),
                format!("{:e}", c.measured),
                format!("{:e}", c.bound),
                format!("{:e}", c.margin()),
                c.pass.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }

    fn push(&mut self, c: PropertyCheck) {
        self.checks.push(c);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FastDecayPoly {
    /// `q = s^2` on the frame, Chebyshev basis.
    Algebraic { q: ChebSeries, s: ChebSeries },
    Trigonometric { q: TrigPoly, s: TrigPoly },
}

impl FastDecayPoly {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Algebraic { q, .. } => q.eval(x),
            Self::Trigonometric { q, .. } => q.eval(x),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Self::Algebraic { q, .. } => q.degree(),
            Self::Trigonometric { q, .. } => q.degree(),
        }
    }

    pub fn as_trig(&self) -> Option<&TrigPoly> {
        match self {
            Self::Trigonometric { q, .. } => Some(q),
            _ => None,
        }
    }

    pub fn as_cheb(&self) -> Option<&ChebSeries> {
        match self {
            Self::Algebraic { q, .. } => Some(q),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FastDecayParams {
    pub tau: Vec<f64>,
    pub lambda: f64,
    pub mu: usize,
    pub c1: f64,
    /// Largest normalized gap-integral residual at the solution.
    pub residual: f64,
}

/// Off-window smallness of one build.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayMetrics {
    /// `max |Q - 1|` on the plateau.
    pub high_deviation: f64,
    /// `max Q / min(1, |Z|)` outside the buffer.
    pub low_ratio: f64,
    /// `-ln(max(high_deviation, low_ratio)) / m`.
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FastDecayResult {
    pub degree: usize,
    pub poly: FastDecayPoly,
    pub params: FastDecayParams,
    pub report: PropertyReport,
    pub decay: DecayMetrics,
}

impl FastDecayResult {
    fn require_pass(self) -> Result<Self, FastDecayError> {
        if self.report.all_pass() {
            Ok(self)
        } else {
            Err(FastDecayError::DegreeTooSmall(format!(
                "m = {}: failed {}",
                self.degree,
                self.report.failing().join(", ")
            )))
        }
    }
}

fn decay_metrics(high: f64, low: f64, m: usize) -> DecayMetrics {
    let e = high.max(low);
    DecayMetrics {
        high_deviation: high,
        low_ratio: low,
        rate: -e.ln() / m as f64,
    }
}

/// Least-squares fit of `ln(max(high, low))` against the degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub degrees: Vec<usize>,
    pub log_metric: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square fit residual over `|mean log metric|`.
    pub relative_residual: f64,
    pub monotone: bool,
    /// Smallest per-build rate: every build satisfies its bounds with
    /// `exp(-delta_hat m)`.
    pub delta_hat: f64,
}

/// Fit residual budget for a log-linear decay.
pub const FIT_RESIDUAL_TOL: f64 = 0.10;

impl DecayFit {
    pub fn from_results(results: &[FastDecayResult]) -> Self {
        let degrees: Vec<usize> = results.iter().map(|r| r.degree).collect();
        let log_metric: Vec<f64> = results
            .iter()
            .map(|r| r.decay.high_deviation.max(r.decay.low_ratio).ln())
            .collect();
        let n = degrees.len() as f64;
        let xm = degrees.iter().sum::<usize>() as f64 / n;
        let ym = log_metric.iter().sum::<f64>() / n;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (&x, &y) in degrees.iter().zip(&log_metric) {
            sxy += (x as f64 - xm) * (y - ym);
            sxx += (x as f64 - xm).powi(2);
        }
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let intercept = ym - slope * xm;
        let rss: f64 = degrees
            .iter()
            .zip(&log_metric)
            .map(|(&x, &y)| (y - intercept - slope * x as f64).powi(2))
            .sum();
        let relative_residual = (rss / n).sqrt() / ym.abs();
        let monotone = log_metric.windows(2).all(|w| w[1] < w[0]);
        let delta_hat = results.iter().map(|r| r.decay.rate).fold(f64::INFINITY, f64::min);
        Self {
            degrees,
            log_metric,
            slope,
            intercept,
            relative_residual,
            monotone,
            delta_hat,
        }
    }

    pub fn pass(&self) -> bool {
        self.degrees.len() >= 4
            && self.slope < 0.0
            && self.monotone
            && self.relative_residual < FIT_RESIDUAL_TOL
            && self.delta_hat > 0.0
    }
}

/// A spec that can be rebuilt at another target degree.
pub trait FastDecaySpec: Clone + Send + Sync {
    fn degree(&self) -> usize;
    fn with_degree(&self, m: usize) -> Self;
    fn build(&self) -> Result<FastDecayResult, FastDecayError>;
}

impl FastDecaySpec for FastDecaySpecAlg {
    fn degree(&self) -> usize {
        self.degree
    }
    fn with_degree(&self, m: usize) -> Self {
        Self { degree: m, ..self.clone() }
    }
    fn build(&self) -> Result<FastDecayResult, FastDecayError> {
        build_fd_algebraic(self)
    }
}

impl FastDecaySpec for FastDecaySpecTrig {
    fn degree(&self) -> usize {
        self.degree
    }
    fn with_degree(&self, m: usize) -> Self {
        Self { degree: m, ..self.clone() }
    }
    fn build(&self) -> Result<FastDecayResult, FastDecayError> {
        build_fd_trig(self)
    }
}

/// Builds `spec` at each degree of the ladder (in parallel) and fits the
/// decay rate.
pub fn decay_ladder<S: FastDecaySpec>(
    spec: &S,
    degrees: &[usize],
) -> Result<(Vec<FastDecayResult>, DecayFit), FastDecayError> {
    let results: Vec<Result<FastDecayResult, FastDecayError>> = std::thread::scope(|sc| {
        let handles: Vec<_> = degrees
            .iter()
            .map(|&m| {
                let s = spec.with_degree(m);
                sc.spawn(move || s.build())
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("build thread panicked")).collect()
    });
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let fit = DecayFit::from_results(&results);
    Ok((results, fit))
}

/// Even multiplicity at or above `k`.
fn even_up(k: u32) -> usize {
    (k + k % 2) as usize
}

/// Odd exponent at or above `k`.
fn odd_up(k: u32) -> usize {
    (k + 1 - k % 2) as usize
}

/// Uniform grid of `n` points on `[lo, hi]`.
fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}
