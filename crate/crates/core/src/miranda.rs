//! Zeros of continuous maps on boxes satisfying the Poincare-Miranda sign
//! conditions: damped Newton with a fallback to sign-guided box bisection.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MirandaError {
    #[error("component {component} has no sign change across its faces (value {value:e} at {point:?})")]
    SignPatternViolated {
        component: usize,
        point: Vec<f64>,
        value: f64,
    },
    #[error("no convergence, best residual {residual:e} at {point:?}")]
    NoConvergence { point: Vec<f64>, residual: f64 },
    #[error("invalid box: {0}")]
    InvalidBox(String),
}

/// Axis-aligned box `[lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SearchBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, MirandaError> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(MirandaError::InvalidBox("dimension mismatch".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return Err(MirandaError::InvalidBox("empty side".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    fn width(&self, i: usize) -> f64 {
        self.hi[i] - self.lo[i]
    }

    /// Moves coordinates of `x` that left the box back inside, keeping the
    /// fraction `keep` of the distance from `from` to the face.
    fn pull_back(&self, x: &mut [f64], from: &[f64], keep: f64) {
        for i in 0..x.len() {
            if x[i] < self.lo[i] {
                x[i] = self.lo[i] + keep * (from[i] - self.lo[i]);
            } else if x[i] > self.hi[i] {
                x[i] = self.hi[i] - keep * (self.hi[i] - from[i]);
            }
        }
    }
}

/// `+1`: component `i` is nonpositive on the face `x_i = lo_i` and
/// nonnegative on `x_i = hi_i`; `-1`: the reverse.
pub type SignPattern = Vec<i8>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MirandaOptions {
    pub tol: f64,
    pub max_newton: usize,
    /// Lattice points per free coordinate when sampling a face.
    pub face_samples: usize,
    pub max_bisections: usize,
    /// Skip the initial face check (the caller certified it).
    pub skip_face_check: bool,
    /// A Newton step leaving the box is pulled back to this fraction of the
    /// remaining distance inside the violated face; 0 clamps onto the face.
    pub boundary_pullback: f64,
}

impl Default for MirandaOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_newton: 60,
            face_samples: 5,
            max_bisections: 200,
            skip_face_check: false,
            boundary_pullback: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MirandaSolution {
    pub point: Vec<f64>,
    pub residual: f64,
    pub newton_steps: usize,
    pub bisections: usize,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn numerical_jacobian<F>(f: &F, bx: &SearchBox, x: &[f64], fx: &[f64]) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let d = x.len();
    let mut jac = DMatrix::zeros(d, d);
    for j in 0..d {
        let h = 1e-7 * bx.width(j).max(1e-300);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] = (x[j] + h).min(bx.hi[j]);
        xm[j] = (x[j] - h).max(bx.lo[j]);
        let (fp, fm, dx) = if xp[j] - xm[j] > 0.0 {
            (f(&xp), f(&xm), xp[j] - xm[j])
        } else {
            (f(&xp), fx.to_vec(), xp[j] - x[j])
        };
        for i in 0..d {
            jac[(i, j)] = (fp[i] - fm[i]) / dx;
        }
    }
    jac
}

/// Damped Newton inside `bx`, starting at `x0`. Returns the best point.
fn newton<F, J>(f: &F, jac: &J, bx: &SearchBox, x0: Vec<f64>, opts: &MirandaOptions) -> (Vec<f64>, Vec<f64>, usize)
where
    F: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64], &[f64]) -> DMatrix<f64>,
{
    let mut x = x0;
    let mut fx = f(&x);
    let mut r = max_abs(&fx);
    let mut steps = 0;
    while steps < opts.max_newton && r >= opts.tol {
        steps += 1;
        let jm = jac(&x, &fx);
        let rhs = DVector::from_column_slice(&fx);
        let Some(dx) = jm.lu().solve(&rhs) else { break };
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let mut xn: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, b)| a - lambda * b).collect();
            bx.pull_back(&mut xn, &x, opts.boundary_pullback);
            let fn_ = f(&xn);
            let rn = max_abs(&fn_);
            if rn.is_finite() && rn < r {
                x = xn;
                fx = fn_;
                r = rn;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (x, fx, steps)
}

/// Face lattice for coordinate `i` at value `xi`.
fn face_points(bx: &SearchBox, i: usize, xi: f64, s: usize) -> Vec<Vec<f64>> {
    let d = bx.dim();
    let free: Vec<usize> = (0..d).filter(|&j| j != i).collect();
    let s = s.max(2);
    let total = s.pow(free.len() as u32);
    (0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; d];
            p[i] = xi;
            for &j in &free {
                let k = idx % s;
                idx /= s;
                p[j] = bx.lo[j] + bx.width(j) * k as f64 / (s - 1) as f64;
            }
            p
        })
        .collect()
}

/// Checks the sign condition for every component on both faces.
pub fn check_faces<F>(f: &F, bx: &SearchBox, pattern: &[i8], samples: usize) -> Result<(), MirandaError>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    for i in 0..bx.dim() {
        let s = pattern[i] as f64;
        for (xi, want) in [(bx.lo[i], -s), (bx.hi[i], s)] {
            for p in face_points(bx, i, xi, samples) {
                let v = f(&p)[i];
                if !(v * want >= 0.0) {
                    return Err(MirandaError::SignPatternViolated {
                        component: i,
                        point: p,
                        value: v,
                    });
                }
            }
        }
    }
    Ok(())
}

pub fn miranda_solve<F>(f: F, bx: &SearchBox, pattern: &[i8], opts: &MirandaOptions) -> Result<MirandaSolution, MirandaError>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let jac = |x: &[f64], fx: &[f64]| numerical_jacobian(&f, bx, x, fx);
    miranda_solve_with_jacobian(&f, jac, bx, pattern, opts)
}

/// As [`miranda_solve`] with a caller-supplied Jacobian `jac(x, f(x))`.
pub fn miranda_solve_with_jacobian<F, J>(
    f: F,
    jac: J,
    bx: &SearchBox,
    pattern: &[i8],
    opts: &MirandaOptions,
) -> Result<MirandaSolution, MirandaError>
where
    F: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64], &[f64]) -> DMatrix<f64>,
{
    if pattern.len() != bx.dim() || pattern.iter().any(|&s| s != 1 && s != -1) {
        return Err(MirandaError::InvalidBox("sign pattern must be +-1 per coordinate".into()));
    }
    if !opts.skip_face_check {
        check_faces(&f, bx, pattern, opts.face_samples)?;
    }
    let (x, fx, steps) = newton(&f, &jac, bx, bx.center(), opts);
    let mut best = (x, max_abs(&fx));
    if best.1 < opts.tol {
        return Ok(MirandaSolution {
            point: best.0,
            residual: best.1,
            newton_steps: steps,
            bisections: 0,
        });
    }
    let mut total_steps = steps;

    // Sign-guided bisection: split the widest side; keep the half whose new
    // face carries the required sign.
    let mut cur = bx.clone();
    for b in 1..=opts.max_bisections {
        let i = (0..cur.dim())
            .max_by(|&p, &q| (cur.width(p) / bx.width(p)).total_cmp(&(cur.width(q) / bx.width(q))))
            .unwrap();
        let mid = 0.5 * (cur.lo[i] + cur.hi[i]);
        let vals: Vec<f64> = face_points(&cur, i, mid, opts.face_samples.min(3))
            .iter()
            .map(|p| f(p)[i] * pattern[i] as f64)
            .collect();
        let take_lower = if vals.iter().all(|&v| v >= 0.0) {
            true
        } else if vals.iter().all(|&v| v <= 0.0) {
            false
        } else {
            // inconclusive: keep the half with the smaller center residual
            let mut lower = cur.clone();
            lower.hi[i] = mid;
            let mut upper = cur.clone();
            upper.lo[i] = mid;
            max_abs(&f(&lower.center())) <= max_abs(&f(&upper.center()))
        };
        if take_lower {
            cur.hi[i] = mid;
        } else {
            cur.lo[i] = mid;
        }
        if b % cur.dim().max(1) == 0 {
            let (x, fx, s) = newton(&f, &jac, bx, cur.center(), opts);
            total_steps += s;
            let r = max_abs(&fx);
            if r < best.1 {
                best = (x, r);
            }
            if best.1 < opts.tol {
                return Ok(MirandaSolution {
                    point: best.0,
                    residual: best.1,
                    newton_steps: total_steps,
                    bisections: b,
                });
            }
        }
        if (0..cur.dim()).all(|j| cur.width(j) < 1e-15 * (1.0 + cur.lo[j].abs())) {
            break;
        }
    }
    Err(MirandaError::NoConvergence {
        point: best.0,
        residual: best.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional() {
        let c = 0.37;
        let bx = SearchBox::new(vec![c - 1.0], vec![c + 1.0]).unwrap();
        let s = miranda_solve(|x| vec![x[0] - c], &bx, &[1], &MirandaOptions::default()).unwrap();
        assert!((s.point[0] - c).abs() < 1e-9);
    }

    #[test]
    fn linear_two_dimensional() {
        let bx = SearchBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let f = |p: &[f64]| vec![p[0] + p[1] - 1.0, p[0] - p[1]];
        let s = miranda_solve(f, &bx, &[1, -1], &MirandaOptions::default()).unwrap();
        assert!((s.point[0] - 0.5).abs() < 1e-9 && (s.point[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn violated_pattern() {
        let bx = SearchBox::new(vec![1.0], vec![2.0]).unwrap();
        let e = miranda_solve(|x| vec![x[0]], &bx, &[1], &MirandaOptions::default()).unwrap_err();
        assert!(matches!(e, MirandaError::SignPatternViolated { component: 0, .. }));
    }

    #[test]
    fn bisection_rescues_flat_newton() {
        // Newton from the center stalls on the flat cube; bisection finds it.
        let bx = SearchBox::new(vec![-1.0], vec![3.0]).unwrap();
        let f = |x: &[f64]| vec![(x[0] - 0.3).powi(3) + 1e-12 * (x[0] - 0.3)];
        let opts = MirandaOptions { max_newton: 2, tol: 1e-12, ..Default::default() };
        let s = miranda_solve(f, &bx, &[1], &opts).unwrap();
        assert!(s.residual < 1e-12);
        assert!((s.point[0] - 0.3).abs() < 1e-4);
    }
}
