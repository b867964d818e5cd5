use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{make_report, BoundKind, IneqError, InequalityReport};
use crate::equilibrium::EquilibriumMeasure;
use crate::poly::{sup_norm, sup_on_interval, IntervalSet, SupNormOptions, TrigPoly};
use crate::tset::TSetDescriptor;

/// Default distance an interior point keeps from the ends of its component.
pub const INTERIOR_MARGIN: f64 = 1e-2;

pub fn bernstein_interior_check(
    t: &TrigPoly,
    e: &IntervalSet,
    t0: f64,
    k: usize,
    eq: &EquilibriumMeasure,
) -> Result<InequalityReport, IneqError> {
    bernstein_interior_check_with(t, e, t0, k, eq, INTERIOR_MARGIN)
}

/// `|T^{(k)}(t0)|` against `(n 2 pi w(t0))^k ||T||_E`.
pub fn bernstein_interior_check_with(
    t: &TrigPoly,
    e: &IntervalSet,
    t0: f64,
    k: usize,
    eq: &EquilibriumMeasure,
    margin: f64,
) -> Result<InequalityReport, IneqError> {
    match e.component_of(t0) {
        Some((l, r)) if t0 - l >= margin && r - t0 >= margin => {}
        _ => return Err(IneqError::NotInterior(t0, margin)),
    }
    let density = 2.0 * PI * eq.density(t0)?;
    let n = t.frequency_degree();
    let norm = sup_norm(t, e).value;
    if norm == 0.0 {
        return Err(IneqError::ZeroPolynomial);
    }
    let measured = t.eval_derivative(t0, k).abs();
    let mut r = make_report(BoundKind::BernsteinInterior, e, n, k, measured, (n * density).powi(k as i32) * norm, "input")?;
    r.point = Some(t0);
    Ok(r)
}

/// Log-log growth of the extremal family's `k`-th derivative, in the
/// interior and at the endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSeparation {
    pub k: usize,
    pub degrees: Vec<usize>,
    /// `sup |(T_l o U)^{(k)}|` over the interior segment.
    pub interior: Vec<f64>,
    /// `|(T_l o U)^{(k)}(a)|`.
    pub endpoint: Vec<f64>,
    pub interior_slope: f64,
    pub endpoint_slope: f64,
}

/// Fits `log |T^{(k)}|` against `log n` along `T_l o U`, `n = l N`, on the
/// interior segment `e0` (sampled sup) and at the endpoint `a`.
pub fn scale_separation(
    d: &TSetDescriptor,
    a: f64,
    e0: (f64, f64),
    k: usize,
    l_list: &[usize],
) -> Result<ScaleSeparation, IneqError> {
    if !(d.e_set.contains(e0.0) && d.e_set.contains(e0.1) && e0.0 < e0.1) {
        return Err(IneqError::InvalidInput("interior segment outside the T-set".into()));
    }
    let mut degrees = Vec::new();
    let mut interior = Vec::new();
    let mut endpoint = Vec::new();
    for &l in l_list {
        let n = l * d.degree();
        let f = |t: f64| d.extremal_derivative(l, t, k).unwrap_or(f64::NAN);
        let sup = sup_on_interval(&f, n, e0.0, e0.1, &SupNormOptions::default()).value;
        degrees.push(n);
        interior.push(sup);
        endpoint.push(d.extremal_derivative(l, a, k)?.abs());
    }
    let x: Vec<f64> = degrees.iter().map(|&n| (n as f64).ln()).collect();
    let slope = |y: &[f64]| {
        let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
        least_squares_slope(&x, &ly)
    };
    Ok(ScaleSeparation {
        k,
        interior_slope: slope(&interior),
        endpoint_slope: slope(&endpoint),
        degrees,
        interior,
        endpoint,
    })
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (xm, ym) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - xm) * (b - ym)).sum();
    let sxx: f64 = x.iter().map(|a| (a - xm).powi(2)).sum();
    sxy / sxx
}
