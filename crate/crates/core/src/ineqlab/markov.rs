use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::corpus::CorpusEntry;
use super::{make_report, par_map, BoundKind, ConvergenceRow, ConvergenceTable, IneqError, InequalityReport, Slack};
use crate::composition::double_factorial_odd;
use crate::equilibrium::{solve_tau, ArcSystem, EquilibriumMeasure};
use crate::poly::{sup_norm, sup_norm_with, sup_on_interval, IntervalSet, SupNormOptions, TrigPoly};
use crate::tset::TSetDescriptor;

/// `(8 pi^2 Omega^2 n^2)^k / (2k - 1)!!`.
pub(crate) fn markov_factor(n: f64, omega: f64, k: usize) -> f64 {
    (8.0 * PI * PI * omega * omega * n * n).powi(k as i32) / double_factorial_odd(k) as f64
}

fn derivative_sup(t: &TrigPoly, k: usize, e: &IntervalSet) -> f64 {
    sup_norm_with(|x| t.eval_derivative(x, k), t.degree().max(1), e, &SupNormOptions::default()).value
}

/// `||T^{(k)}||_I` against `n^{2k} ||T||_I`; the ratio estimates the
/// constant of the rough inequality.
pub fn rough_markov_check(t: &TrigPoly, i: &IntervalSet, k: usize) -> Result<InequalityReport, IneqError> {
    let n = t.frequency_degree();
    let norm = sup_norm(t, i).value;
    if norm == 0.0 {
        return Err(IneqError::ZeroPolynomial);
    }
    let measured = derivative_sup(t, k, i);
    make_report(BoundKind::RoughMarkov, i, n, k, measured, n.powi(2 * k as i32) * norm, "input")
}

/// `sup |T^{(k)}|` over `[a - rho, a]` against the sharp endpoint factor.
/// The value at `a` itself is recorded as the point ratio.
pub fn markov_endpoint_check(
    t: &TrigPoly,
    e: &IntervalSet,
    a: f64,
    rho: f64,
    k: usize,
    eq: &EquilibriumMeasure,
) -> Result<InequalityReport, IneqError> {
    if !e.satisfies_interval_condition(a, rho) {
        return Err(IneqError::IntervalConditionViolated { a, rho });
    }
    let omega = eq.omega_endpoint(a)?.omega_limit;
    let n = t.frequency_degree();
    let norm = sup_norm(t, e).value;
    if norm == 0.0 {
        return Err(IneqError::ZeroPolynomial);
    }
    let theoretical = markov_factor(n, omega, k) * norm;
    let f = |x: f64| t.eval_derivative(x, k);
    let seg = sup_on_interval(&f, t.degree().max(1), a - rho, a, &SupNormOptions::default()).value;
    let at = f(a).abs();
    let mut r = make_report(BoundKind::MarkovEndpoint, e, n, k, seg, theoretical, "input")?;
    r.point = Some(a);
    r.segment = Some((a - rho, a));
    r.point_measured = Some(at);
    r.point_ratio = Some(at / theoretical);
    Ok(r)
}

fn checked_rho(e: &IntervalSet, a: f64) -> Result<f64, IneqError> {
    e.max_interval_condition_rho(a)
        .filter(|&r| r > 0.0)
        .ok_or(IneqError::IntervalConditionViolated { a, rho: 0.0 })
}

/// Ratios of `|(T_l o U)^{(k)}(a)|` to the endpoint factor with `n = l N`.
/// `||T_l o U||` is exactly 1 on the T-set.
pub fn markov_sharpness_scan(d: &TSetDescriptor, a: f64, k: usize, l_list: &[usize]) -> Result<ConvergenceTable, IneqError> {
    checked_rho(&d.e_set, a)?;
    let eq = solve_tau(&ArcSystem::from_intervals(&d.e_set))?;
    let omega = eq.omega_endpoint(a)?.omega_limit;
    let big_n = d.degree();
    let rows = par_map(l_list, |&l| -> Result<ConvergenceRow, IneqError> {
        let n = l * big_n;
        let measured = d.extremal_derivative(l, a, k)?.abs();
        Ok(ConvergenceRow {
            l,
            n,
            ratio: measured / markov_factor(n as f64, omega, k),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    ConvergenceTable::new(BoundKind::MarkovEndpoint, d.e_set.clone(), a, k, rows)
}

/// Fixture of the upper-bound suite: a set and an endpoint satisfying the
/// interval condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteFixture {
    pub name: String,
    pub set: IntervalSet,
    pub endpoint: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub slack: Slack,
    pub reports: Vec<InequalityReport>,
    /// Indices into `reports` whose point ratio exceeds `1 + slack(n)`.
    pub violations: Vec<usize>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_excess(&self) -> f64 {
        self.reports
            .iter()
            .map(|r| r.headline_ratio() - 1.0 - self.slack.at(r.degree))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Endpoint checks of every corpus polynomial on every fixture and order,
/// with `rho` the largest value the interval condition admits.
pub fn markov_upper_bound_suite(
    fixtures: &[SuiteFixture],
    corpus: &[CorpusEntry],
    orders: &[usize],
    slack: Slack,
) -> Result<SuiteReport, IneqError> {
    let mut reports = Vec::new();
    for fx in fixtures {
        let rho = checked_rho(&fx.set, fx.endpoint)?;
        let eq = solve_tau(&ArcSystem::from_intervals(&fx.set))?;
        let batch = par_map(corpus, |c| -> Result<Vec<InequalityReport>, IneqError> {
            orders
                .iter()
                .map(|&k| {
                    let mut r = markov_endpoint_check(&c.poly, &fx.set, fx.endpoint, rho, k, &eq)?;
                    r.source = format!("{}:{}", fx.name, c.source);
                    Ok(r)
                })
                .collect()
        });
        for b in batch {
            reports.extend(b?);
        }
    }
    let violations = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| !slack.admits(r.headline_ratio(), r.degree))
        .map(|(i, _)| i)
        .collect();
    Ok(SuiteReport {
        slack,
        reports,
        violations,
    })
}

/// `max |ratio - 1| sqrt(n)` at the endpoint over the extremal families
/// `T_l o U` with `n_min <= l N <= n_max`: the finite-degree distance of the
/// sharp constant from its limit where that distance is known exactly.
pub fn calibrate_slack(
    families: &[(TSetDescriptor, f64)],
    orders: &[usize],
    n_min: usize,
    n_max: usize,
) -> Result<f64, IneqError> {
    let mut c = 0.0f64;
    for (d, a) in families {
        let ls: Vec<usize> = (1..)
            .take_while(|l| l * d.degree() <= n_max)
            .filter(|l| l * d.degree() >= n_min)
            .collect();
        for &k in orders {
            let table = markov_sharpness_scan(d, *a, k, &ls)?;
            for r in &table.rows {
                c = c.max((r.ratio - 1.0).abs() * (r.n as f64).sqrt());
            }
        }
    }
    Ok(c)
}
