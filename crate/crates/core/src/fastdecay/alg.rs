use serde::{Deserialize, Serialize};

use super::gaps::{GapSystem, Kernel};
use super::{
    decay_metrics, even_up, grid, odd_up, FastDecayError, FastDecayParams, FastDecayPoly, FastDecayResult,
    PropertyCheck, PropertyReport, CHECK_GRID, EVAL_ERR, NONNEG_TOL, PEAK_TOL, SQUARING_TOL, ZERO_TOL,
};
use crate::miranda::MirandaOptions;
use crate::poly::ChebSeries;

/// Peak `x0` inside the plateau `[a, b]`, inside the buffer `[a', b']`, inside
/// the frame `[a_0, a_{l+1}]`; prescribed zeros in the frame but off the
/// buffer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FastDecaySpecAlg {
    pub frame: [f64; 2],
    pub zeros: Vec<f64>,
    pub multiplicities: Vec<u32>,
    pub peak: f64,
    /// Flatness `k_0` at the peak.
    #[serde(default = "one")]
    pub peak_order: u32,
    pub plateau: [f64; 2],
    pub buffer: [f64; 2],
    pub degree: usize,
}

fn one() -> u32 {
    1
}

impl FastDecaySpecAlg {
    pub fn validate(&self) -> Result<(), FastDecayError> {
        let bad = |m: &str| Err(FastDecayError::InvalidSpec(m.into()));
        let all = [self.frame[0], self.frame[1], self.peak, self.plateau[0], self.plateau[1], self.buffer[0], self.buffer[1]];
        if all.iter().chain(&self.zeros).any(|v| !v.is_finite()) {
            return bad("non-finite value");
        }
        if self.zeros.len() != self.multiplicities.len() {
            return bad("zeros and multiplicities differ in length");
        }
        if self.multiplicities.contains(&0) || self.peak_order == 0 {
            return bad("multiplicities must be positive");
        }
        let [f0, f1] = self.frame;
        let [a1, b1] = self.buffer;
        let [a, b] = self.plateau;
        if !(f0 < a1 && a1 < a && a < self.peak && self.peak < b && b < b1 && b1 < f1) {
            return bad("need frame start < a' < a < x0 < b < b' < frame end");
        }
        if self.zeros.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("zeros must be strictly increasing");
        }
        for &z in &self.zeros {
            if !(f0 < z && z < f1) {
                return bad("zero outside the open frame");
            }
            if a1 <= z && z <= b1 {
                return bad("zero inside the buffer");
            }
        }
        Ok(())
    }
}

/// Builds the polynomial and its report; fails only when the construction
/// itself is impossible.
pub fn construct_fd_algebraic(spec: &FastDecaySpecAlg) -> Result<FastDecayResult, FastDecayError> {
    spec.validate()?;
    let [f0, f1] = spec.frame;
    let c2 = f1 - f0;
    let x0 = spec.peak;
    let kp: Vec<usize> = spec.multiplicities.iter().map(|&k| even_up(k)).collect();
    let k0p = odd_up(spec.peak_order);
    let l = spec.zeros.len();
    let l0 = spec.zeros.iter().filter(|&&z| z < x0).count();

    // S vanishes at every anchor; a frame end joins the anchors when all
    // zeros lie on one side of the peak.
    let mut anchors = Vec::with_capacity(l + 2);
    if l0 == 0 {
        anchors.push(f0);
    }
    anchors.extend_from_slice(&spec.zeros);
    if l0 == l {
        anchors.push(f1);
    }
    let gaps: Vec<(f64, f64)> = anchors.windows(2).map(|w| (w[0], w[1])).collect();
    let lambda_gap = gaps.iter().position(|&(lo, hi)| lo < x0 && x0 < hi).expect("peak between anchors");
    let n_r = gaps.len() - 1;

    let sum_kp: usize = kp.iter().sum();
    let fixed = 2 * (sum_kp + n_r + k0p + 1);
    if spec.degree < fixed + 4 {
        return Err(FastDecayError::DegreeTooSmall(format!(
            "m = {} but the fixed factors alone need {}",
            spec.degree,
            fixed + 4
        )));
    }
    let mu = (spec.degree - fixed) / 4;
    let alpha = 0.5 * (spec.plateau[0] + spec.buffer[0]);
    let beta = 0.5 * (spec.plateau[1] + spec.buffer[1]);

    let fixed_part = |t: f64| -> f64 {
        let z: f64 = spec.zeros.iter().zip(&kp).map(|(&a, &k)| (t - a).powi(k as i32)).product();
        z * (t - x0).powi(k0p as i32)
    };
    let window = |d: f64, t: f64| (1.0 - ((t - d) / c2).powi(2)).powi(mu as i32);

    let deg_s1 = sum_kp + k0p + 2 * mu + n_r;
    let sys = GapSystem::new(gaps.clone(), lambda_gap, Kernel::Linear, deg_s1 / 2 + 2, |t| {
        let lw = |d: f64| mu as f64 * (1.0 - ((t - d) / c2).powi(2)).ln();
        (fixed_part(t), lw(alpha), lw(beta))
    });
    let opts = MirandaOptions {
        tol: 1e-12,
        ..Default::default()
    };
    let sol = sys.solve(&opts)?;

    let lin = |c: f64| ChebSeries::linear_root(f0, f1, c);
    let one = ChebSeries::constant(f0, f1, 1.0);
    let mut s1 = lin(x0).powi(k0p);
    for (&a, &k) in spec.zeros.iter().zip(&kp) {
        s1 = s1.product(&lin(a).powi(k));
    }
    for &t in &sol.tau {
        s1 = s1.product(&lin(t));
    }
    let p0 = |d: f64| one.add(&lin(d).scale(1.0 / c2).powi(2).scale(-1.0)).powi(mu);
    let p1 = p0(alpha).scale(1.0 - sol.lambda).add(&p0(beta).scale(sol.lambda));
    let s1 = s1.product(&p1);
    let s_raw = s1.antiderivative(anchors[0]);
    let c1 = 1.0 / s_raw.eval(x0);
    let s = s_raw.scale(c1);
    let q = s.product(&s);

    let s1_at = |t: f64| -> f64 {
        let r: f64 = sol.tau.iter().map(|&tau| t - tau).product();
        c1 * fixed_part(t) * ((1.0 - sol.lambda) * window(alpha, t) + sol.lambda * window(beta, t)) * r
    };
    let (report, high, low) = check(spec, &anchors, &q, &s, s1_at);
    Ok(FastDecayResult {
        degree: spec.degree,
        poly: FastDecayPoly::Algebraic { q, s },
        params: FastDecayParams {
            tau: sol.tau,
            lambda: sol.lambda,
            mu,
            c1,
            residual: sol.residual,
        },
        report,
        decay: decay_metrics(high, low, spec.degree),
    })
}

/// As [`construct_fd_algebraic`], but any failed property is reported as
/// [`FastDecayError::DegreeTooSmall`].
pub fn build_fd_algebraic(spec: &FastDecaySpecAlg) -> Result<FastDecayResult, FastDecayError> {
    construct_fd_algebraic(spec)?.require_pass()
}

fn check<F: Fn(f64) -> f64>(
    spec: &FastDecaySpecAlg,
    anchors: &[f64],
    q: &ChebSeries,
    s: &ChebSeries,
    s1: F,
) -> (PropertyReport, f64, f64) {
    let [f0, f1] = spec.frame;
    let [a1, b1] = spec.buffer;
    let [a, b] = spec.plateau;
    let x0 = spec.peak;
    let mut rep = PropertyReport::default();

    rep.push(PropertyCheck::at_most("atxnull", (q.eval(x0) - 1.0).abs(), PEAK_TOL));
    let dq: Vec<ChebSeries> = {
        let kmax = spec.multiplicities.iter().copied().max().unwrap_or(0).max(spec.peak_order) as usize;
        let mut v = vec![q.clone()];
        for _ in 0..kmax {
            let d = v.last().unwrap().derivative();
            v.push(d);
        }
        v
    };
    let rel = |k: usize, x: f64| dq[k].eval(x).abs() / q.derivative_bound(k);
    let datx = (1..=spec.peak_order as usize).map(|k| rel(k, x0)).fold(0.0, f64::max);
    rep.push(PropertyCheck::at_most("datxnull", datx, ZERO_TOL));

    let (mut peak_excess, mut min_q, mut high, mut low, mut square) = (f64::NEG_INFINITY, f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
    let mut dq_vals = Vec::new();
    // evaluation error of Q; near a high-order zero Z drops below it
    let q_err = EVAL_ERR * q.derivative_bound(0);
    for x in grid(f0, f1, CHECK_GRID) {
        let (qx, sx) = (q.eval(x), s.eval(x));
        square = square.max((qx - sx * sx).abs());
        min_q = min_q.min(qx);
        if x != x0 {
            peak_excess = peak_excess.max(qx.abs() - 1.0);
        }
        if a <= x && x <= b {
            high = high.max((qx - 1.0).abs());
        }
        if x <= a1 || x >= b1 {
            let z: f64 = spec
                .zeros
                .iter()
                .zip(&spec.multiplicities)
                .map(|(&aj, &k)| (x - aj).abs().powi(k as i32))
                .product();
            if z > 0.0 {
                low = low.max((qx - q_err).max(0.0) / z.min(1.0));
            }
        }
        if (a1..=a).contains(&x) {
            dq_vals.push(2.0 * sx * s1(x));
        } else if (b..=b1).contains(&x) {
            dq_vals.push(-2.0 * sx * s1(x));
        }
    }
    rep.push(PropertyCheck::at_most("peaking", peak_excess, PEAK_TOL));
    rep.push(PropertyCheck::at_most("high", high, 1.0));
    rep.push(PropertyCheck::at_most("low", low, 1.0));
    let scale = dq_vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let change = dq_vals.iter().fold(f64::INFINITY, |m, v| m.min(v / scale));
    rep.push(PropertyCheck::above("change", change, 0.0));
    let mut zeros = 0.0f64;
    for (&aj, &k) in spec.zeros.iter().zip(&spec.multiplicities) {
        for kk in 0..=k as usize {
            zeros = zeros.max(rel(kk, aj));
        }
    }
    rep.push(PropertyCheck::at_most("zeros", zeros, ZERO_TOL));
    let anchor = anchors.iter().map(|&t| s.eval(t).abs()).fold(0.0, f64::max);
    rep.push(PropertyCheck::at_most("anchors", anchor, ZERO_TOL));
    rep.push(PropertyCheck::above("nonneg", min_q, -NONNEG_TOL));
    rep.push(PropertyCheck::at_most("degree", q.degree() as f64, spec.degree as f64));
    rep.push(PropertyCheck::at_most("squaring", square, SQUARING_TOL));
    (rep, high, low)
}
