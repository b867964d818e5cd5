//! The gap-integral system shared by both constructions.
//!
//! The integrand is `B(t; lambda) * prod_i r(t, tau_i)` where
//! `B = (1 - lambda) B_alpha + lambda B_beta` is tabulated once at the
//! quadrature nodes of every gap. One gap is governed by `lambda`, every other
//! gap carries one root `tau` of the factor `R`.

use nalgebra::DMatrix;

use crate::miranda::{miranda_solve_with_jacobian, MirandaError, MirandaOptions, SearchBox};
use crate::quadrature::gauss_legendre;

use super::FastDecayError;

#[derive(Clone, Copy, Debug)]
pub(crate) enum Kernel {
    /// `t - tau`
    Linear,
    /// `sin((t - tau) / 2)`
    HalfSine,
}

impl Kernel {
    fn value(self, t: f64, tau: f64) -> f64 {
        match self {
            Kernel::Linear => t - tau,
            Kernel::HalfSine => (0.5 * (t - tau)).sin(),
        }
    }

    fn d_tau(self, t: f64, tau: f64) -> f64 {
        match self {
            Kernel::Linear => -1.0,
            Kernel::HalfSine => -0.5 * (0.5 * (t - tau)).cos(),
        }
    }
}

struct Node {
    t: f64,
    w: f64,
    /// Window weights relative to the largest one in the gap.
    ba: f64,
    bb: f64,
}

/// Quadrature table of one gap. Window weights underflow easily for large
/// `mu`, so they are kept as `exp(log_a) * ba` with a per-gap scale.
struct GapTable {
    log_a: f64,
    log_b: f64,
    nodes: Vec<Node>,
}

pub(crate) struct GapSystem {
    gaps: Vec<(f64, f64)>,
    lambda_gap: usize,
    kernel: Kernel,
    tables: Vec<GapTable>,
}

pub(crate) struct GapSolution {
    pub lambda: f64,
    /// Roots of `R`, in gap order (the `lambda` gap skipped).
    pub tau: Vec<f64>,
    pub residual: f64,
}

impl GapSystem {
    /// `base(t)` returns `(W(t), ln P_alpha(t), ln P_beta(t))` with
    /// `B = W P`; `nodes` per gap.
    pub fn new<F>(gaps: Vec<(f64, f64)>, lambda_gap: usize, kernel: Kernel, nodes: usize, base: F) -> Self
    where
        F: Fn(f64) -> (f64, f64, f64),
    {
        let (x, w) = gauss_legendre(nodes);
        let tables = gaps
            .iter()
            .map(|&(lo, hi)| {
                let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                let raw: Vec<(f64, f64, f64, f64, f64)> = x
                    .iter()
                    .zip(&w)
                    .map(|(&xi, &wi)| {
                        let t = mid + half * xi;
                        let (wt, la, lb) = base(t);
                        (t, wi * half, wt, la, lb)
                    })
                    .collect();
                let log_a = raw.iter().map(|r| r.3).fold(f64::NEG_INFINITY, f64::max);
                let log_b = raw.iter().map(|r| r.4).fold(f64::NEG_INFINITY, f64::max);
                let nodes = raw
                    .into_iter()
                    .map(|(t, w, wt, la, lb)| Node {
                        t,
                        w,
                        ba: wt * (la - log_a).exp(),
                        bb: wt * (lb - log_b).exp(),
                    })
                    .collect();
                GapTable { log_a, log_b, nodes }
            })
            .collect();
        Self {
            gaps,
            lambda_gap,
            kernel,
            tables,
        }
    }

    fn split(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let tau = (0..x.len()).filter(|&g| g != self.lambda_gap).map(|g| x[g]).collect();
        (x[self.lambda_gap], tau)
    }

    /// Normalized residuals `f_g / int_g |integrand|` and optionally the
    /// matching (row-scaled) Jacobian.
    fn eval(&self, x: &[f64], want_jac: bool) -> (Vec<f64>, Option<DMatrix<f64>>) {
        let d = self.gaps.len();
        let (lambda, tau) = self.split(x);
        let cols: Vec<usize> = (0..d).filter(|&g| g != self.lambda_gap).collect();
        let mut f = vec![0.0; d];
        let mut jac = want_jac.then(|| DMatrix::zeros(d, d));
        let mut r = vec![0.0; tau.len()];
        for g in 0..d {
            let tab = &self.tables[g];
            // common scale of the two window terms at this lambda
            let s = ((1.0 - lambda).ln() + tab.log_a).max(lambda.ln() + tab.log_b);
            let (wa, wb) = (
                ((1.0 - lambda).ln() + tab.log_a - s).exp(),
                (lambda.ln() + tab.log_b - s).exp(),
            );
            // unweighted scales for the lambda derivative, capped below overflow
            let (ca, cb) = ((tab.log_a - s).min(700.0).exp(), (tab.log_b - s).min(700.0).exp());
            let mut norm = 0.0;
            let mut dl = 0.0;
            let mut dt = vec![0.0; tau.len()];
            for n in &tab.nodes {
                for (ri, &ti) in r.iter_mut().zip(&tau) {
                    *ri = self.kernel.value(n.t, ti);
                }
                let rr: f64 = r.iter().product();
                let p1 = wa * n.ba + wb * n.bb;
                let v = n.w * p1 * rr;
                f[g] += v;
                norm += v.abs();
                if want_jac {
                    dl += n.w * (cb * n.bb - ca * n.ba) * rr;
                    for i in 0..tau.len() {
                        let others: f64 = r.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).product();
                        dt[i] += n.w * p1 * others * self.kernel.d_tau(n.t, tau[i]);
                    }
                }
            }
            let norm = norm.max(f64::MIN_POSITIVE);
            f[g] /= norm;
            if let Some(j) = jac.as_mut() {
                j[(g, self.lambda_gap)] = dl / norm;
                for (i, &c) in cols.iter().enumerate() {
                    j[(g, c)] = dt[i] / norm;
                }
            }
        }
        (f, jac)
    }

    fn search_box(&self) -> SearchBox {
        let lo = (0..self.gaps.len())
            .map(|g| if g == self.lambda_gap { 0.0 } else { self.gaps[g].0 })
            .collect();
        let hi = (0..self.gaps.len())
            .map(|g| if g == self.lambda_gap { 1.0 } else { self.gaps[g].1 })
            .collect();
        SearchBox::new(lo, hi).expect("gaps are nondegenerate")
    }

    /// Sign pattern read off the face centers. Each component has to be
    /// strictly signed with opposite signs on its two faces.
    fn sign_pattern(&self, bx: &SearchBox) -> Result<Vec<i8>, FastDecayError> {
        let c = bx.center();
        let mut out = Vec::with_capacity(c.len());
        for i in 0..c.len() {
            let mut lo = c.clone();
            lo[i] = bx.lo[i];
            let mut hi = c.clone();
            hi[i] = bx.hi[i];
            let (fl, fh) = (self.eval(&lo, false).0[i], self.eval(&hi, false).0[i]);
            if fl < 0.0 && fh > 0.0 {
                out.push(1);
            } else if fl > 0.0 && fh < 0.0 {
                out.push(-1);
            } else {
                return Err(FastDecayError::DegreeTooSmall(format!(
                    "gap {i}: no sign change across the parameter faces ({fl:e}, {fh:e})"
                )));
            }
        }
        Ok(out)
    }

    pub fn solve(&self, opts: &MirandaOptions) -> Result<GapSolution, FastDecayError> {
        let bx = self.search_box();
        let pattern = self.sign_pattern(&bx)?;
        let sol = miranda_solve_with_jacobian(
            |x: &[f64]| self.eval(x, false).0,
            |x: &[f64], _: &[f64]| self.eval(x, true).1.expect("jacobian requested"),
            &bx,
            &pattern,
            opts,
        )
        .map_err(|e| match e {
            MirandaError::SignPatternViolated { component, point, value } => FastDecayError::DegreeTooSmall(format!(
                "gap {component}: face sign check failed at {point:?} (value {value:e})"
            )),
            other => FastDecayError::Miranda(other),
        })?;
        let (lambda, tau) = self.split(&sol.point);
        Ok(GapSolution {
            lambda,
            tau,
            residual: sol.residual,
        })
    }
}
