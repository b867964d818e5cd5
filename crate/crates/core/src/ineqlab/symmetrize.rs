use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::IneqError;
use crate::composition::compose_derivative_with;
use crate::fastdecay::{extremal_peaking_factor, DecayMetrics};
use crate::poly::{sup_norm, sup_norm_with, SupNormOptions, TrigPoly};
use crate::tset::TSetDescriptor;

/// Extra interpolation degrees of the recoveries used for the noise level.
const NOISE_DEGREES: [usize; 4] = [8, 16, 24, 32];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizationOptions {
    /// Zero order of the peaking factor at the other extremal points;
    /// `2 k^2` when absent.
    pub order: Option<u32>,
    /// The peaking factor gets degree `l_degree_factor * floor(sqrt(n))`.
    pub l_degree_factor: usize,
    /// Random levels for the level-set constancy check.
    pub level_samples: usize,
    pub seed: u64,
}

impl Default for SymmetrizationOptions {
    fn default() -> Self {
        Self {
            order: None,
            l_degree_factor: 16,
            level_samples: 100,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizationReport {
    pub n: usize,
    pub k: usize,
    pub endpoint: f64,
    pub order: u32,
    pub l_degree: usize,
    pub rho0: f64,
    pub l_decay: DecayMetrics,
    pub norm_t: f64,
    pub norm_tstar: f64,
    /// `||T*||_E / ||T||_E - 1`.
    pub inflation: f64,
    pub deriv_t: f64,
    pub deriv_tstar: f64,
    /// `|T*^{(k)}(a) - T^{(k)}(a)| / (n^{2k} ||T||_E)`.
    pub normalized_discrepancy: f64,
    /// Roundoff level of `normalized_discrepancy`: the largest spread between
    /// recoveries of `T*` as a polynomial of `U` at several degrees.
    pub discrepancy_noise: f64,
    /// Largest spread of `T*` over one level set, relative to `||T||_E`.
    pub level_set_deviation: f64,
    /// Largest gap between `T*` and its polynomial-in-`U` form on the sampled
    /// levels, relative to `||T||_E`.
    pub polynomial_residual: f64,
}

/// Multiplies `T` by a peaking factor at the extremal point `a`, symmetrizes
/// over all branches and compares `T*` with `T`.
pub fn symmetrization_experiment(
    d: &TSetDescriptor,
    t: &TrigPoly,
    a: f64,
    k: usize,
    opts: &SymmetrizationOptions,
) -> Result<SymmetrizationReport, IneqError> {
    let n = t.degree();
    let order = opts.order.unwrap_or(2 * (k * k) as u32);
    let l_degree = opts.l_degree_factor * (n as f64).sqrt().floor() as usize;
    let rho0 = d.extremal_separation();
    let peak = extremal_peaking_factor(d, a, rho0, order, l_degree)?;
    let l = peak.poly.as_trig().expect("trigonometric factor");
    let v = l.product(t);
    let sym = d.symmetrize(&v);
    let p_degree = v.degree().div_ceil(d.degree()) + 1;
    let p = sym.as_polynomial_of_u(p_degree)?;
    // further, equally exact, recoveries expose the roundoff in T*^{(k)}(a)
    let checks = NOISE_DEGREES
        .iter()
        .map(|&e| sym.as_polynomial_of_u(p_degree + e))
        .collect::<Result<Vec<_>, _>>()?;

    let norm_t = sup_norm(t, &d.e_set).value;
    if norm_t == 0.0 {
        return Err(IneqError::ZeroPolynomial);
    }
    let norm_tstar = sup_norm_with(|x| p.eval(d.u.eval(x)), v.degree(), &d.e_set, &SupNormOptions::default()).value;
    let deriv_t = t.eval_derivative(a, k);
    let deriv_tstar = compose_derivative_with(&p, &d.u, a, k)?;
    let mut spread_k = 0.0f64;
    for c in &checks {
        spread_k = spread_k.max((compose_derivative_with(c, &d.u, a, k)? - deriv_tstar).abs());
    }
    let scale = (n as f64).powi(2 * k as i32) * norm_t;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (mut spread, mut resid) = (0.0f64, 0.0f64);
    for _ in 0..opts.level_samples {
        let y: f64 = rng.random_range(-1.0..1.0);
        let base = sym.at_level(y)?;
        resid = resid.max((p.eval(y) - base).abs());
        for j in 0..d.branch_count() {
            let tj = d.branch_point(j, y)?;
            spread = spread.max((sym.eval(tj)? - base).abs());
        }
    }
    Ok(SymmetrizationReport {
        n,
        k,
        endpoint: a,
        order,
        l_degree,
        rho0,
        l_decay: peak.decay,
        norm_t,
        norm_tstar,
        inflation: norm_tstar / norm_t - 1.0,
        deriv_t,
        deriv_tstar,
        normalized_discrepancy: (deriv_tstar - deriv_t).abs() / scale,
        discrepancy_noise: spread_k / scale,
        level_set_deviation: spread / norm_t,
        polynomial_residual: resid / norm_t,
    })
}

/// Whether the normalized discrepancy decreases along a ladder sorted by
/// `n`. An entry at or below four times its roundoff level counts as
/// resolved to zero and passes.
pub fn discrepancy_decreasing(ladder: &[SymmetrizationReport]) -> bool {
    let floor = |r: &SymmetrizationReport| r.normalized_discrepancy <= 4.0 * r.discrepancy_noise;
    ladder
        .windows(2)
        .all(|w| w[0].n < w[1].n && (floor(&w[1]) || w[1].normalized_discrepancy < w[0].normalized_discrepancy))
}
