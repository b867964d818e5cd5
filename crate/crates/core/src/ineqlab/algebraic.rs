use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{make_report, BoundKind, IneqError, InequalityReport, INTERIOR_MARGIN};
use crate::composition::double_factorial_odd;
use crate::equilibrium::EquilibriumMeasure;
use crate::poly::{sup_norm_with, sup_on_interval, ComplexPoly, IntervalSet, SupNormOptions, TrigPoly};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum CircleMode {
    Endpoint { a: f64, rho: f64, k: usize },
    Interior { t0: f64, k: usize },
}

/// Real and imaginary parts of `e^{-i t n/2} P(e^{it})` for even `n`
/// (odd degrees are padded by one), returned with that `n`.
pub fn split_on_circle(p: &ComplexPoly) -> (TrigPoly, TrigPoly, usize) {
    let n = p.degree() + p.degree() % 2;
    let h = n / 2;
    let c = |i: usize| p.coeffs().get(i).copied().unwrap_or_default();
    let (mut rc, mut rs, mut ic, mut is) = (vec![0.0; h + 1], vec![0.0; h + 1], vec![0.0; h + 1], vec![0.0; h + 1]);
    rc[0] = c(h).re;
    ic[0] = c(h).im;
    for m in 1..=h {
        let (up, dn) = (c(h + m), c(h - m));
        rc[m] = up.re + dn.re;
        rs[m] = dn.im - up.im;
        ic[m] = up.im + dn.im;
        is[m] = up.re - dn.re;
    }
    let re = TrigPoly::new(rc, rs, false).expect("finite coefficients");
    let im = TrigPoly::new(ic, is, false).expect("finite coefficients");
    (re, im, n)
}

/// `z^d T(t)` with `z = e^{it}` and `d = deg T`: an algebraic polynomial of
/// degree `2d` whose modulus on the circle is `|T|`.
pub fn trig_to_algebraic(t: &TrigPoly) -> Result<ComplexPoly, IneqError> {
    if t.half_shift() {
        return Err(IneqError::InvalidInput("half-integer polynomial has no algebraic lift".into()));
    }
    let d = t.degree();
    let mut c = vec![Complex64::default(); 2 * d + 1];
    c[d] = Complex64::new(t.cos_coeffs()[0], 0.0);
    for j in 1..=d {
        let (a, b) = (t.cos_coeffs()[j], t.sin_coeffs()[j]);
        c[d + j] = Complex64::new(a / 2.0, -b / 2.0);
        c[d - j] = Complex64::new(a / 2.0, b / 2.0);
    }
    ComplexPoly::new(c).map_err(|e| IneqError::InvalidInput(e.to_string()))
}

/// Markov (endpoint) or Bernstein (interior) check of an algebraic
/// polynomial on the arcs `{e^{it} : t in E}`.
pub fn algebraic_circle_check(
    p: &ComplexPoly,
    e: &IntervalSet,
    mode: CircleMode,
    eq: &EquilibriumMeasure,
) -> Result<InequalityReport, IneqError> {
    let (re, im, n) = split_on_circle(p);
    let nf = n as f64;
    let norm = sup_norm_with(|t| re.eval(t).hypot(im.eval(t)), n / 2 + 1, e, &SupNormOptions::default()).value;
    if norm == 0.0 {
        return Err(IneqError::ZeroPolynomial);
    }
    let on_circle = |k: usize| {
        let dp = p.nth_derivative(k);
        move |t: f64| dp.eval(Complex64::from_polar(1.0, t)).norm()
    };
    match mode {
        CircleMode::Endpoint { a, rho, k } => {
            if !e.satisfies_interval_condition(a, rho) {
                return Err(IneqError::IntervalConditionViolated { a, rho });
            }
            let omega = eq.omega_endpoint(a)?.omega_limit;
            let factor = (2.0 * PI * PI * omega * omega * nf * nf).powi(k as i32) / double_factorial_odd(k) as f64;
            let f = on_circle(k);
            let seg = sup_on_interval(&f, n.max(1), a - rho, a, &SupNormOptions::default()).value;
            let at = f(a);
            let mut r = make_report(BoundKind::AlgebraicMarkov, e, nf, k, seg, factor * norm, "input")?;
            r.point = Some(a);
            r.segment = Some((a - rho, a));
            r.point_measured = Some(at);
            r.point_ratio = Some(at / r.theoretical);
            Ok(r)
        }
        CircleMode::Interior { t0, k } => {
            match e.component_of(t0) {
                Some((l, r)) if t0 - l >= INTERIOR_MARGIN && r - t0 >= INTERIOR_MARGIN => {}
                _ => return Err(IneqError::NotInterior(t0, INTERIOR_MARGIN)),
            }
            let density = 2.0 * PI * eq.density(t0)?;
            let factor = (0.5 * nf * (1.0 + density)).powi(k as i32);
            let mut r = make_report(BoundKind::AlgebraicBernstein, e, nf, k, on_circle(k)(t0), factor * norm, "input")?;
            r.point = Some(t0);
            Ok(r)
        }
    }
}
