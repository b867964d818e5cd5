//! Equilibrium measures of finite unions of circular arcs.
//!
//! For arcs with endpoints `a_1 < ... < a_{2m}` the density with respect to
//! arc length is
//!
//! ```text
//! w(t) = (1/2pi) prod_j |sin((t - tau_j)/2)| / sqrt(prod_k |sin((t - a_k)/2)|)
//! ```
//!
//! with one `tau_j` in each gap. Along a gap the analytic continuation of
//! the density has constant phase, so each `tau_j` is fixed by the real
//! condition that the signed integrand integrates to zero over the gap.

mod oracle;

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::miranda::{miranda_solve_with_jacobian, MirandaError, MirandaOptions, SearchBox};
use crate::poly::IntervalSet;
use crate::quadrature::{integrate_sqrt_endpoints, QuadOptions};

pub use oracle::{equilibrium_oracle, OracleEstimate, OracleOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilibriumError {
    #[error("invalid arc system: {0}")]
    InvalidArcs(String),
    #[error("gap {index} has width {width:e}, below 1e-9")]
    DegenerateGap { index: usize, width: f64 },
    #[error("tau solve did not converge, residuals {residuals:?}")]
    NoConvergence { residuals: Vec<f64> },
    #[error("{0} is not strictly inside an arc")]
    OutsideInterior(f64),
    #[error("{0} is not an endpoint of the arc system")]
    NotAnEndpoint(f64),
}

/// Minimal gap width accepted by [`solve_tau`].
pub const MIN_GAP: f64 = 1e-9;

/// Arcs `{e^{it} : a_{2j-1} <= t <= a_{2j}}` with endpoints in `(-pi, pi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ArcSystemRepr", into = "ArcSystemRepr")]
pub struct ArcSystem {
    endpoints: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ArcSystemRepr {
    endpoints: Vec<f64>,
}

impl TryFrom<ArcSystemRepr> for ArcSystem {
    type Error = EquilibriumError;

    fn try_from(r: ArcSystemRepr) -> Result<Self, Self::Error> {
        ArcSystem::new(r.endpoints)
    }
}

impl From<ArcSystem> for ArcSystemRepr {
    fn from(a: ArcSystem) -> Self {
        ArcSystemRepr { endpoints: a.endpoints }
    }
}

impl ArcSystem {
    pub fn new(endpoints: Vec<f64>) -> Result<Self, EquilibriumError> {
        if endpoints.is_empty() || !endpoints.len().is_multiple_of(2) {
            return Err(EquilibriumError::InvalidArcs(
                "need an even, nonzero number of endpoints".into(),
            ));
        }
        if endpoints.iter().any(|a| !a.is_finite() || *a <= -PI || *a >= PI) {
            return Err(EquilibriumError::InvalidArcs("endpoints must lie in (-pi, pi)".into()));
        }
        if endpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(EquilibriumError::InvalidArcs(
                "endpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self { endpoints })
    }

    pub fn from_intervals(set: &IntervalSet) -> Self {
        Self {
            endpoints: set.endpoints(),
        }
    }

    pub fn to_intervals(&self) -> IntervalSet {
        IntervalSet::new(self.arcs().collect()).expect("arc system is a valid interval set")
    }

    pub fn endpoints(&self) -> &[f64] {
        &self.endpoints
    }

    /// Number of arcs `m`.
    pub fn len(&self) -> usize {
        self.endpoints.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.endpoints.is_empty()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.endpoints.chunks(2).map(|c| (c[0], c[1]))
    }

    /// Gaps `(a_{2j}, a_{2j+1})`, the last one wrapping to `a_1 + 2 pi`.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        let e = &self.endpoints;
        let m = self.len();
        (0..m)
            .map(|j| {
                let l = e[2 * j + 1];
                let r = if j + 1 < m { e[2 * j + 2] } else { e[0] + 2.0 * PI };
                (l, r)
            })
            .collect()
    }

    pub fn interior_contains(&self, t: f64) -> bool {
        self.arcs().any(|(l, r)| l < t && t < r)
    }

    fn endpoint_index(&self, a: f64) -> Option<usize> {
        self.endpoints.iter().position(|&e| (e - a).abs() <= 1e-12 * (1.0 + a.abs()))
    }

    /// Rotated copy, if it stays inside `(-pi, pi)`.
    pub fn rotated(&self, phi: f64) -> Result<Self, EquilibriumError> {
        Self::new(self.endpoints.iter().map(|a| a + phi).collect())
    }
}

/// Solved `tau` parameters of an arc system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumMeasure {
    pub arcs: ArcSystem,
    /// `tau_j` in gap `j`; the last lies in `(a_{2m}, a_1 + 2 pi)`.
    pub tau: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Endpoint constant `Omega` and the Markov factor `M = 4 pi^2 Omega^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndpointFactor {
    pub endpoint: f64,
    pub omega_limit: f64,
    pub markov_m: f64,
    /// Richardson-extrapolated limit of `sqrt(|e^{it} - e^{ia}|) w(t)`.
    pub omega_extrapolated: f64,
}

impl EndpointFactor {
    pub fn relative_discrepancy(&self) -> f64 {
        ((self.omega_extrapolated - self.omega_limit) / self.omega_limit).abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub residual_tol: f64,
    pub quad: QuadOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            quad: QuadOptions::default(),
        }
    }
}

fn half_sin(d: f64) -> f64 {
    (0.5 * d).sin()
}

/// Signed gap integrand and its `tau` gradient for gap `j`.
struct GapIntegrand<'a> {
    ends: &'a [f64],
    gap: usize,
}

impl GapIntegrand<'_> {
    /// `1 / sqrt|prod_k sin((t - a_k)/2)|` with the two gap ends taken from
    /// the exact offsets.
    fn weight(&self, t: f64, dl: f64, dr: f64) -> f64 {
        let m = self.ends.len() / 2;
        let (il, ir) = (2 * self.gap + 1, if self.gap + 1 < m { 2 * self.gap + 2 } else { 0 });
        let mut p = half_sin(dl) * half_sin(dr);
        for (k, &a) in self.ends.iter().enumerate() {
            if k != il && k != ir {
                p *= half_sin(t - a);
            }
        }
        1.0 / p.abs().sqrt()
    }
}

fn gap_values(arcs: &ArcSystem, tau: &[f64], quad: &QuadOptions) -> Vec<f64> {
    let gaps = arcs.gaps();
    gaps.iter()
        .enumerate()
        .map(|(j, &(l, r))| {
            let g = GapIntegrand { ends: arcs.endpoints(), gap: j };
            integrate_sqrt_endpoints(
                |t, dl, dr| {
                    let num: f64 = tau.iter().map(|&s| half_sin(t - s)).product();
                    num * g.weight(t, dl, dr)
                },
                l,
                r,
                quad,
            )
        })
        .collect()
}

fn gap_jacobian(arcs: &ArcSystem, tau: &[f64], quad: &QuadOptions) -> DMatrix<f64> {
    let m = tau.len();
    let gaps = arcs.gaps();
    let mut jac = DMatrix::zeros(m, m);
    for (j, &(l, r)) in gaps.iter().enumerate() {
        let g = GapIntegrand { ends: arcs.endpoints(), gap: j };
        for i in 0..m {
            jac[(j, i)] = integrate_sqrt_endpoints(
                |t, dl, dr| {
                    let mut num = -0.5 * (0.5 * (t - tau[i])).cos();
                    for (q, &s) in tau.iter().enumerate() {
                        if q != i {
                            num *= half_sin(t - s);
                        }
                    }
                    num * g.weight(t, dl, dr)
                },
                l,
                r,
                quad,
            );
        }
    }
    jac
}

pub fn solve_tau(arcs: &ArcSystem) -> Result<EquilibriumMeasure, EquilibriumError> {
    solve_tau_with(arcs, &SolveOptions::default())
}

pub fn solve_tau_with(arcs: &ArcSystem, opts: &SolveOptions) -> Result<EquilibriumMeasure, EquilibriumError> {
    let gaps = arcs.gaps();
    for (index, &(l, r)) in gaps.iter().enumerate() {
        if r - l < MIN_GAP {
            return Err(EquilibriumError::DegenerateGap { index, width: r - l });
        }
    }
    let bx = SearchBox::new(
        gaps.iter().map(|g| g.0).collect(),
        gaps.iter().map(|g| g.1).collect(),
    )
    .map_err(|e| EquilibriumError::InvalidArcs(e.to_string()))?;
    // With tau_j at the left end of its gap the integrand of gap j has the
    // sign of the remaining factors, and flips at the right end.
    let center = bx.center();
    let pattern: Vec<i8> = (0..gaps.len())
        .map(|j| {
            let mut x = center.clone();
            x[j] = gaps[j].0;
            let v = gap_values(arcs, &x, &opts.quad)[j];
            if v > 0.0 {
                -1
            } else {
                1
            }
        })
        .collect();
    let f = |x: &[f64]| gap_values(arcs, x, &opts.quad);
    let jac = |x: &[f64], _: &[f64]| gap_jacobian(arcs, x, &opts.quad);
    let mopts = MirandaOptions {
        tol: opts.residual_tol * 0.1,
        skip_face_check: true,
        max_bisections: 400,
        ..Default::default()
    };
    let point = match miranda_solve_with_jacobian(f, jac, &bx, &pattern, &mopts) {
        Ok(s) => s.point,
        Err(MirandaError::NoConvergence { point, .. }) => point,
        Err(e) => return Err(EquilibriumError::InvalidArcs(e.to_string())),
    };
    let residuals = gap_values(arcs, &point, &opts.quad);
    if residuals.iter().any(|r| !(r.abs() < opts.residual_tol)) {
        return Err(EquilibriumError::NoConvergence { residuals });
    }
    Ok(EquilibriumMeasure {
        arcs: arcs.clone(),
        tau: point,
        residuals,
    })
}

impl EquilibriumMeasure {
    /// Density at an interior point of an arc.
    pub fn density(&self, t: f64) -> Result<f64, EquilibriumError> {
        if !self.arcs.interior_contains(t) {
            return Err(EquilibriumError::OutsideInterior(t));
        }
        Ok(self.density_unchecked(t))
    }

    fn density_unchecked(&self, t: f64) -> f64 {
        let num: f64 = self.tau.iter().map(|&s| half_sin(t - s).abs()).product();
        let den: f64 = self.arcs.endpoints().iter().map(|&a| half_sin(t - a)).product();
        num / (2.0 * PI * den.abs().sqrt())
    }

    /// Density on arc `[l, r]` with exact offsets to its ends.
    fn density_offsets(&self, arc: usize, t: f64, dl: f64, dr: f64) -> f64 {
        let num: f64 = self.tau.iter().map(|&s| half_sin(t - s).abs()).product();
        let mut den = half_sin(dl) * half_sin(dr);
        for (k, &a) in self.arcs.endpoints().iter().enumerate() {
            if k != 2 * arc && k != 2 * arc + 1 {
                den *= half_sin(t - a);
            }
        }
        num / (2.0 * PI * den.abs().sqrt())
    }

    /// Mass of each arc.
    pub fn arc_masses(&self) -> Vec<f64> {
        let quad = QuadOptions::default();
        self.arcs
            .arcs()
            .enumerate()
            .map(|(i, (l, r))| integrate_sqrt_endpoints(|t, dl, dr| self.density_offsets(i, t, dl, dr), l, r, &quad))
            .collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.arc_masses().iter().sum()
    }

    /// Closed-form `Omega` at endpoint index `k`.
    fn omega_closed(&self, k: usize) -> f64 {
        let ends = self.arcs.endpoints();
        let a = ends[k];
        let num: f64 = self.tau.iter().map(|&s| 2.0 * half_sin(a - s).abs()).product();
        let den: f64 = ends
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, &b)| 2.0 * half_sin(a - b).abs())
            .product();
        num / (2.0 * PI * den.sqrt())
    }

    /// Limit of `sqrt(|e^{it} - e^{ia}|) w(t)` approaching endpoint `k` from
    /// inside its arc, by Neville extrapolation of samples at distances
    /// `h_i = 4^{-i} rho / 4`, `i = 1..8`.
    fn omega_richardson(&self, k: usize) -> f64 {
        let ends = self.arcs.endpoints();
        let a = ends[k];
        let arc = k / 2;
        let (l, r) = (ends[2 * arc], ends[2 * arc + 1]);
        let inward = if k % 2 == 1 { -1.0 } else { 1.0 };
        let gaps = self.arcs.gaps();
        let gap = if k % 2 == 1 {
            gaps[arc].1 - gaps[arc].0
        } else {
            let g = &gaps[(arc + gaps.len() - 1) % gaps.len()];
            g.1 - g.0
        };
        let rho = 0.5 * (r - l).min(gap);
        let hs: Vec<f64> = (1..=8).map(|i| 4f64.powi(-i) * rho / 4.0).collect();
        let vals: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let t = a + inward * h;
                let (dl, dr) = if k % 2 == 1 { ((r - l) - h, h) } else { (h, (r - l) - h) };
                (2.0 * half_sin(h)).sqrt() * self.density_offsets(arc, t, dl, dr)
            })
            .collect();
        neville_at_zero(&hs, &vals)
    }

    pub fn omega_endpoint(&self, a: f64) -> Result<EndpointFactor, EquilibriumError> {
        let k = self.arcs.endpoint_index(a).ok_or(EquilibriumError::NotAnEndpoint(a))?;
        let omega = self.omega_closed(k);
        Ok(EndpointFactor {
            endpoint: self.arcs.endpoints()[k],
            omega_limit: omega,
            markov_m: 4.0 * PI * PI * omega * omega,
            omega_extrapolated: self.omega_richardson(k),
        })
    }

    /// `(t, w(t))` rows on `per_arc` interior points of each arc.
    pub fn density_csv(&self, per_arc: usize) -> String {
        let mut out = String::from("t,density\n");
        for (l, r) in self.arcs.arcs() {
            for i in 1..=per_arc {
                let t = l + (r - l) * i as f64 / (per_arc + 1) as f64;
                let _ = writeln!(out, "{t:.17e},{:.17e}", self.density_unchecked(t));
            }
        }
        out
    }
}

/// Value at 0 of the interpolating polynomial through `(x_i, y_i)`.
pub(crate) fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (x[i], x[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn single_arc() {
        let th = FRAC_PI_2;
        let eq = solve_tau(&ArcSystem::new(vec![-th, th]).unwrap()).unwrap();
        assert!((eq.tau[0] - PI).abs() < 1e-10);
        let d = eq.density(0.0).unwrap();
        assert!((d - 2f64.sqrt() / (2.0 * PI)).abs() < 1e-14);
        assert!((eq.total_mass() - 1.0).abs() < 1e-12);
        let f = eq.omega_endpoint(th).unwrap();
        assert!((f.omega_limit - 1.0 / (2.0 * PI)).abs() < 1e-14);
        assert!((f.markov_m - 1.0).abs() < 1e-13);
        assert!(f.relative_discrepancy() < 1e-8);
        assert!(eq.density(th).is_err());
        assert!(eq.density(2.0).is_err());
    }

    #[test]
    fn neville_recovers_polynomial() {
        let x = [0.5, 0.25, 0.125, 0.0625];
        let y: Vec<f64> = x.iter().map(|t| 3.0 - t + 2.0 * t * t).collect();
        assert!((neville_at_zero(&x, &y) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn json_shape() {
        let a = ArcSystem::new(vec![-1.0, 1.0]).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"{"endpoints":[-1.0,1.0]}"#);
        assert!(serde_json::from_str::<ArcSystem>(r#"{"endpoints":[1.0,-1.0]}"#).is_err());
    }
}
