//! T-sets `{t : |U(t)| <= 1}` of admissible trigonometric polynomials,
//! their branch inverses, the extremal sequences `T_l(U)` and symmetrization.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composition::{compose_derivative_with, Chebyshev, CompositionError};
use crate::equilibrium::{EquilibriumError, EquilibriumMeasure};
use crate::poly::{ChebSeries, IntervalSet, TrigPoly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TSetError {
    #[error("not admissible: {0}")]
    NotAdmissible(String),
    #[error("{0} outside the branch structure")]
    OutOfRange(String),
    #[error(transparent)]
    Equilibrium(#[from] EquilibriumError),
    #[error(transparent)]
    Composition(#[from] CompositionError),
}

/// Tolerance for `|U| = 1` at a critical point.
const TOUCH_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TSetDescriptor {
    pub u: TrigPoly,
    /// `2N` closed intervals on each of which `U` is a bijection onto
    /// `[-1, 1]`, in increasing order.
    pub branch_intervals: Vec<(f64, f64)>,
    /// Points where `|U| = 1`, increasing.
    pub extremal_points: Vec<f64>,
    pub e_set: IntervalSet,
}

/// Sign-change roots of `g` on `[lo, hi]` from an `n`-point grid, refined by
/// bisection to `1e-13`.
fn sign_change_roots<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut roots = Vec::new();
    for i in 0..n {
        let (mut a, mut b, fa, fb) = (xs[i], xs[i + 1], vs[i], vs[i + 1]);
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        let sa = fa.signum();
        while b - a > 1e-13 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = g(m);
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if fm.signum() == sa {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

/// `(2 cos t - (1 + cos th)) / (1 - cos th)`, whose T-set is `[-th, th]`.
pub fn single_interval_u(theta0: f64) -> TrigPoly {
    let c = theta0.cos();
    let s = 1.0 / (1.0 - c);
    TrigPoly::new(vec![-(1.0 + c) * s, 2.0 * s], vec![0.0, 0.0], false).expect("finite")
}

/// `T_2((cos t - c) / h)`, whose T-set is `{c - h <= cos t <= c + h}`: two
/// intervals symmetric about 0 when `-1 < c - h` and `c + h < 1`.
pub fn two_interval_u(c: f64, h: f64) -> TrigPoly {
    let x = TrigPoly::new(vec![-c / h, 1.0 / h], vec![0.0, 0.0], false).expect("finite");
    &x.product(&x).scale(2.0) - &TrigPoly::constant(1.0)
}

pub fn analyze_admissible(u: &TrigPoly) -> Result<TSetDescriptor, TSetError> {
    let n = u.degree();
    if u.half_shift() || n == 0 {
        return Err(TSetError::NotAdmissible(
            "need an integer-frequency polynomial of degree at least 1".into(),
        ));
    }
    if u.eval(PI).abs() <= 1.0 {
        return Err(TSetError::NotAdmissible(
            "|U(pi)| <= 1: the set is not inside (-pi, pi) or its complement is empty".into(),
        ));
    }
    let grid = 64 * n;
    let du = u.derivative();
    let (lo, hi) = (-PI, PI);
    let crit = sign_change_roots(|t| du.eval(t), lo, hi, grid);
    let mut touches = Vec::new();
    for &c in &crit {
        let v = u.eval(c).abs();
        if (v - 1.0).abs() <= TOUCH_TOL {
            touches.push(c);
        } else if v < 1.0 {
            return Err(TSetError::NotAdmissible(format!(
                "critical point {c} with |U| = {v} < 1 inside the set"
            )));
        }
    }
    let mut crossings: Vec<f64> = sign_change_roots(|t| u.eval(t) - 1.0, lo, hi, grid)
        .into_iter()
        .chain(sign_change_roots(|t| u.eval(t) + 1.0, lo, hi, grid))
        .filter(|c| touches.iter().all(|t| (t - c).abs() > 1e-7))
        .collect();
    crossings.sort_by(f64::total_cmp);
    if !crossings.len().is_multiple_of(2) || crossings.is_empty() {
        return Err(TSetError::NotAdmissible("unpaired boundary crossings".into()));
    }
    let comps: Vec<(f64, f64)> = crossings.chunks(2).map(|c| (c[0], c[1])).collect();
    for w in comps.windows(2) {
        if u.eval(0.5 * (w[0].1 + w[1].0)).abs() <= 1.0 {
            return Err(TSetError::NotAdmissible("gap without |U| > 1".into()));
        }
    }
    for &(l, r) in &comps {
        if u.eval(0.5 * (l + r)).abs() > 1.0 + TOUCH_TOL && touches.iter().all(|&t| t <= l || t >= r) {
            return Err(TSetError::NotAdmissible("component with |U| > 1".into()));
        }
    }
    let mut extremal_points: Vec<f64> = crossings.iter().chain(&touches).copied().collect();
    extremal_points.sort_by(f64::total_cmp);
    let mut branches = Vec::new();
    for &(l, r) in &comps {
        let pts: Vec<f64> = extremal_points
            .iter()
            .copied()
            .filter(|&p| p >= l && p <= r)
            .collect();
        for w in pts.windows(2) {
            if u.eval(w[0]) * u.eval(w[1]) >= 0.0 {
                return Err(TSetError::NotAdmissible(format!(
                    "U does not alternate on [{}, {}]",
                    w[0], w[1]
                )));
            }
            branches.push((w[0], w[1]));
        }
    }
    if branches.len() != 2 * n {
        return Err(TSetError::NotAdmissible(format!(
            "{} branches, expected {}",
            branches.len(),
            2 * n
        )));
    }
    let e_set = IntervalSet::new(comps).map_err(|e| TSetError::NotAdmissible(e.to_string()))?;
    Ok(TSetDescriptor {
        u: u.clone(),
        branch_intervals: branches,
        extremal_points,
        e_set,
    })
}

/// Report of `|U'(a)|` against `8 pi^2 N^2 Omega^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndpointIdentity {
    pub endpoint: f64,
    pub u_prime_abs: f64,
    pub omega: f64,
    pub predicted: f64,
    pub relative_discrepancy: f64,
}

impl TSetDescriptor {
    /// Degree `N` of `U`.
    pub fn degree(&self) -> usize {
        self.u.degree()
    }

    pub fn branch_count(&self) -> usize {
        self.branch_intervals.len()
    }

    /// Index of a branch containing `t`.
    pub fn branch_of(&self, t: f64) -> Option<usize> {
        self.branch_intervals.iter().position(|&(l, r)| l <= t && t <= r)
    }

    /// Point of branch `j` with `U = y`, `y` in `[-1, 1]`.
    pub fn branch_point(&self, j: usize, y: f64) -> Result<f64, TSetError> {
        let &(l, r) = self
            .branch_intervals
            .get(j)
            .ok_or_else(|| TSetError::OutOfRange(format!("branch {j}")))?;
        if !(-1.0..=1.0).contains(&y) {
            return Err(TSetError::OutOfRange(format!("level {y}")));
        }
        let g = |t: f64| self.u.eval(t) - y;
        let (mut a, mut b) = (l, r);
        let (ga, gb) = (g(a), g(b));
        if ga == 0.0 {
            return Ok(a);
        }
        if gb == 0.0 {
            return Ok(b);
        }
        let sa = ga.signum();
        // level marginally outside the attained range by rounding
        if sa == gb.signum() {
            return Ok(if ga.abs() < gb.abs() { a } else { b });
        }
        while b - a > 1e-9 {
            let m = 0.5 * (a + b);
            if g(m).signum() == sa {
                a = m;
            } else {
                b = m;
            }
        }
        let du = self.u.derivative();
        let mut t = 0.5 * (a + b);
        for _ in 0..4 {
            let d = du.eval(t);
            if d == 0.0 {
                break;
            }
            let next = t - g(t) / d;
            if !(l..=r).contains(&next) {
                break;
            }
            t = next;
        }
        Ok(t)
    }

    /// The point `t_j` of branch `j` with `U(t_j) = U(t)`.
    pub fn branch_inverse(&self, j: usize, t: f64) -> Result<f64, TSetError> {
        if !self.e_set.contains(t) {
            return Err(TSetError::OutOfRange(format!("t = {t} not in the T-set")));
        }
        self.branch_point(j, self.u.eval(t).clamp(-1.0, 1.0))
    }

    /// Coefficients of `T_l(U)`. The coefficients grow geometrically off
    /// the T-set, so for large `l` prefer [`Self::extremal_derivative`].
    pub fn extremal_sequence(&self, l: usize) -> TrigPoly {
        let mut prev = TrigPoly::constant(1.0);
        if l == 0 {
            return prev;
        }
        let mut cur = self.u.clone();
        for _ in 1..l {
            let next = &self.u.product(&cur).scale(2.0) - &prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `d^k/dt^k T_l(U(t))` through the Chebyshev recurrence in the level
    /// variable; stable on the T-set for any `l`.
    pub fn extremal_derivative(&self, l: usize, t: f64, k: usize) -> Result<f64, TSetError> {
        Ok(compose_derivative_with(&Chebyshev(l), &self.u, t, k)?)
    }

    pub fn endpoint_derivative_identity(&self, eq: &EquilibriumMeasure, a: f64) -> Result<EndpointIdentity, TSetError> {
        let omega = eq.omega_endpoint(a)?.omega_limit;
        let n = self.degree() as f64;
        let u_prime_abs = self.u.eval_derivative(a, 1).abs();
        let predicted = 8.0 * PI * PI * n * n * omega * omega;
        Ok(EndpointIdentity {
            endpoint: a,
            u_prime_abs,
            omega,
            predicted,
            relative_discrepancy: ((u_prime_abs - predicted) / predicted).abs(),
        })
    }

    /// `T*(t) = sum_j V(t_j)` over all `2N` branch preimages of `U(t)`.
    pub fn symmetrize<'a>(&'a self, v: &'a TrigPoly) -> Symmetrized<'a> {
        Symmetrized { d: self, v }
    }

    /// `rho_0 = min` distance between distinct extremal points, divided by 4.
    pub fn extremal_separation(&self) -> f64 {
        let p = &self.extremal_points;
        let mut best = f64::INFINITY;
        for w in p.windows(2) {
            best = best.min(w[1] - w[0]);
        }
        if let (Some(first), Some(last)) = (p.first(), p.last()) {
            best = best.min(first + 2.0 * PI - last);
        }
        best / 4.0
    }
}

/// Evaluator of the symmetrized polynomial.
pub struct Symmetrized<'a> {
    d: &'a TSetDescriptor,
    v: &'a TrigPoly,
}

impl Symmetrized<'_> {
    /// `T*` at the level `y = U(t)`.
    pub fn at_level(&self, y: f64) -> Result<f64, TSetError> {
        (0..self.d.branch_count())
            .map(|j| self.d.branch_point(j, y).map(|t| self.v.eval(t)))
            .sum()
    }

    pub fn eval(&self, t: f64) -> Result<f64, TSetError> {
        if !self.d.e_set.contains(t) {
            return Err(TSetError::OutOfRange(format!("t = {t} not in the T-set")));
        }
        self.at_level(self.d.u.eval(t).clamp(-1.0, 1.0))
    }

    /// `T* = P(U)` with `P` of degree `degree` recovered by Chebyshev
    /// interpolation in the level variable. Exact once `degree >=
    /// deg V / N`.
    pub fn as_polynomial_of_u(&self, degree: usize) -> Result<ChebSeries, TSetError> {
        let err = std::cell::RefCell::new(None);
        let p = ChebSeries::interpolate(-1.0, 1.0, degree, |y| match self.at_level(y) {
            Ok(v) => v,
            Err(e) => {
                *err.borrow_mut() = Some(e);
                f64::NAN
            }
        });
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(p),
        }
    }
}
