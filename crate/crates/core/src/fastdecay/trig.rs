use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::gaps::{GapSystem, Kernel};
use super::{
    decay_metrics, even_up, grid, odd_up, FastDecayError, FastDecayParams, FastDecayPoly, FastDecayResult,
    PropertyCheck, PropertyReport, CHECK_GRID, EVAL_ERR, NONNEG_TOL, PEAK_TOL, SQUARING_TOL, ZERO_TOL,
};
use crate::miranda::MirandaOptions;
use crate::poly::TrigPoly;
use crate::tset::TSetDescriptor;

/// Peak `t0`, plateau `[alpha, beta]` and buffer `[alpha', beta']` inside
/// `(-pi, pi)`; prescribed zeros off the buffer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FastDecaySpecTrig {
    pub peak: f64,
    /// Flatness at the peak; 1 gives `Q'(t0) = 0`.
    #[serde(default = "one")]
    pub peak_order: u32,
    pub plateau: [f64; 2],
    pub buffer: [f64; 2],
    pub zeros: Vec<f64>,
    pub multiplicities: Vec<u32>,
    pub degree: usize,
}

fn one() -> u32 {
    1
}

impl FastDecaySpecTrig {
    pub fn validate(&self) -> Result<(), FastDecayError> {
        let bad = |m: &str| Err(FastDecayError::InvalidSpec(m.into()));
        let [a1, b1] = self.buffer;
        let [a, b] = self.plateau;
        let all = [self.peak, a, b, a1, b1];
        if all.iter().chain(&self.zeros).any(|v| !v.is_finite()) {
            return bad("non-finite value");
        }
        if self.zeros.len() != self.multiplicities.len() {
            return bad("zeros and multiplicities differ in length");
        }
        if self.multiplicities.contains(&0) || self.peak_order == 0 {
            return bad("multiplicities must be positive");
        }
        if !(-PI < a1 && a1 < a && a < self.peak && self.peak < b && b < b1 && b1 < PI) {
            return bad("need -pi < alpha' < alpha < t0 < beta < beta' < pi");
        }
        for (i, &z) in self.zeros.iter().enumerate() {
            if !(-PI < z && z < PI) {
                return bad("zero outside (-pi, pi)");
            }
            if a1 <= z && z <= b1 {
                return bad("zero inside the buffer");
            }
            if self.zeros[..i].contains(&z) {
                return bad("coincident zeros");
            }
        }
        Ok(())
    }
}

pub fn construct_fd_trig(spec: &FastDecaySpecTrig) -> Result<FastDecayResult, FastDecayError> {
    spec.validate()?;
    let t0 = spec.peak;
    let [a1, b1] = spec.buffer;
    let k0p = odd_up(spec.peak_order);

    // Zeros below the buffer move up by a full period so that all of them
    // sit in (beta', alpha' + 2 pi), sorted.
    let mut shifted: Vec<(f64, usize)> = spec
        .zeros
        .iter()
        .zip(&spec.multiplicities)
        .map(|(&z, &k)| (if z < a1 { z + TAU } else { z }, even_up(k)))
        .collect();
    shifted.sort_by(|p, q| p.0.total_cmp(&q.0));
    let anchors: Vec<f64> = if shifted.is_empty() {
        vec![0.5 * (b1 + a1 + TAU)]
    } else {
        shifted.iter().map(|p| p.0).collect()
    };
    let (lo_anchor, hi_anchor) = (anchors[0], *anchors.last().unwrap());
    let mut gaps = vec![(hi_anchor - TAU, lo_anchor)];
    gaps.extend(anchors.windows(2).map(|w| (w[0], w[1])));
    let fix = anchors.len() % 2 == 1;

    let sum_kp: usize = shifted.iter().map(|p| p.1).sum();
    let fixed = sum_kp + anchors.len() - 1 + k0p + usize::from(fix);
    if spec.degree < fixed + 2 {
        return Err(FastDecayError::DegreeTooSmall(format!(
            "m = {} but the fixed factors alone need {}",
            spec.degree,
            fixed + 2
        )));
    }
    let mu = (spec.degree - fixed) / 2;
    let ca = 0.5 * (spec.plateau[0] + a1);
    let cb = 0.5 * (spec.plateau[1] + b1);
    let fix_at = hi_anchor - PI;

    let fixed_part = |t: f64| -> f64 {
        let z: f64 = shifted.iter().map(|&(a, k)| (0.5 * (t - a)).sin().powi(k as i32)).product();
        let f = if fix { (0.5 * (t - fix_at)).cos() } else { 1.0 };
        z * (0.5 * (t - t0)).sin().powi(k0p as i32) * f
    };
    let window = |c: f64, t: f64| (0.5 * (t - c)).cos().powi(2 * mu as i32);

    // Gauss-Legendre on a gap of length L integrates frequencies up to D
    // accurately once the node count is well above D L / 4.
    let freq = mu + fixed / 2;
    let longest = gaps.iter().map(|g| g.1 - g.0).fold(0.0, f64::max);
    let nodes = (freq as f64 * longest / 2.0).ceil() as usize + 32;
    let sys = GapSystem::new(gaps, 0, Kernel::HalfSine, nodes, |t| {
        let lw = |c: f64| 2.0 * mu as f64 * (0.5 * (t - c)).cos().abs().ln();
        (fixed_part(t), lw(ca), lw(cb))
    });
    let opts = MirandaOptions {
        tol: 1e-12,
        ..Default::default()
    };
    let sol = sys.solve(&opts)?;

    let mut s2 = TrigPoly::half_sine_at(t0).powi(k0p);
    for &(a, k) in &shifted {
        s2 = s2.product(&TrigPoly::half_sine_at(a).powi(k));
    }
    for &t in &sol.tau {
        s2 = s2.product(&TrigPoly::half_sine_at(t));
    }
    if fix {
        s2 = s2.product(&TrigPoly::half_cosine_at(fix_at));
    }
    let p0 = |c: f64| {
        let h = TrigPoly::half_cosine_at(c);
        h.product(&h).powi(mu)
    };
    let p1 = (&p0(ca).scale(1.0 - sol.lambda) + &p0(cb).scale(sol.lambda)).clone();
    let s2 = s2.product(&p1);
    let s_raw = s2.antiderivative(lo_anchor, 1e-9 * s2.coeff_l1())?;
    let c1 = 1.0 / s_raw.eval(t0);
    let s = s_raw.scale(c1);
    let q = s.product(&s);

    let s2_at = |t: f64| -> f64 {
        let r: f64 = sol.tau.iter().map(|&tau| (0.5 * (t - tau)).sin()).product();
        c1 * fixed_part(t) * ((1.0 - sol.lambda) * window(ca, t) + sol.lambda * window(cb, t)) * r
    };
    let (report, high, low) = check(spec, &anchors, &q, &s, s2_at);
    Ok(FastDecayResult {
        degree: spec.degree,
        poly: FastDecayPoly::Trigonometric { q, s },
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

/// As [`construct_fd_trig`], but any failed property is reported as
/// [`FastDecayError::DegreeTooSmall`].
pub fn build_fd_trig(spec: &FastDecaySpecTrig) -> Result<FastDecayResult, FastDecayError> {
    construct_fd_trig(spec)?.require_pass()
}

fn check<F: Fn(f64) -> f64>(
    spec: &FastDecaySpecTrig,
    anchors: &[f64],
    q: &TrigPoly,
    s: &TrigPoly,
    ds: F,
) -> (PropertyReport, f64, f64) {
    let t0 = spec.peak;
    let [a1, b1] = spec.buffer;
    let [a, b] = spec.plateau;
    let mut rep = PropertyReport::default();
    let rel = |k: usize, t: f64| q.eval_derivative(t, k).abs() / q.derivative_bound(k);

    rep.push(PropertyCheck::at_most("atxnull", (q.eval(t0) - 1.0).abs(), PEAK_TOL));
    let datx = (1..=spec.peak_order as usize).map(|k| rel(k, t0)).fold(0.0, f64::max);
    rep.push(PropertyCheck::at_most("datxnull", datx, ZERO_TOL));

    let (mut peak_excess, mut min_q, mut high, mut low, mut square) = (f64::NEG_INFINITY, f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
    let mut dq_vals = Vec::new();
    // evaluation error of Q; near a high-order zero Z drops below it
    let q_err = EVAL_ERR * q.derivative_bound(0);
    // the period [-pi, pi) without its right end
    for t in grid(-PI, PI, CHECK_GRID + 1).take(CHECK_GRID) {
        let (qt, st) = (q.eval(t), s.eval(t));
        square = square.max((qt - st * st).abs());
        min_q = min_q.min(qt);
        if t != t0 {
            peak_excess = peak_excess.max(qt - 1.0);
        }
        if a <= t && t <= b {
            high = high.max((qt - 1.0).abs());
        }
        if t <= a1 || t >= b1 {
            let z: f64 = spec
                .zeros
                .iter()
                .zip(&spec.multiplicities)
                .map(|(&aj, &k)| (0.5 * (t - aj)).sin().abs().powi(k as i32))
                .product();
            if z > 0.0 {
                low = low.max((qt - q_err).max(0.0) / z.min(1.0));
            }
        }
        if (a1..=a).contains(&t) {
            dq_vals.push(2.0 * st * ds(t));
        } else if (b..=b1).contains(&t) {
            dq_vals.push(-2.0 * st * ds(t));
        }
    }
    rep.push(PropertyCheck::above("nonneg", min_q, -NONNEG_TOL));
    rep.push(PropertyCheck::at_most("peaking", peak_excess, PEAK_TOL));
    let mut zeros = 0.0f64;
    for (&aj, &k) in spec.zeros.iter().zip(&spec.multiplicities) {
        for kk in 0..=k as usize {
            zeros = zeros.max(rel(kk, aj));
        }
    }
    rep.push(PropertyCheck::at_most("zeros", zeros, ZERO_TOL));
    let anchor = anchors.iter().map(|&t| s.eval(t).abs()).fold(0.0, f64::max);
    rep.push(PropertyCheck::at_most("anchors", anchor, ZERO_TOL));
    rep.push(PropertyCheck::at_most("low", low, 1.0));
    rep.push(PropertyCheck::at_most("high", high, 1.0));
    let scale = dq_vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let change = dq_vals.iter().fold(f64::INFINITY, |m, v| m.min(v / scale));
    rep.push(PropertyCheck::above("change", change, 0.0));
    rep.push(PropertyCheck::at_most("degree", q.degree() as f64, spec.degree as f64));
    rep.push(PropertyCheck::at_most("squaring", square, SQUARING_TOL));
    (rep, high, low)
}

/// Fast decreasing factor peaking at the extremal point `a` of a T-set and
/// vanishing to `order` at every other extremal point.
pub fn extremal_peaking_factor(
    d: &TSetDescriptor,
    a: f64,
    rho0: f64,
    order: u32,
    m: usize,
) -> Result<FastDecayResult, FastDecayError> {
    let tol = 1e-9;
    if !d.extremal_points.iter().any(|&p| (p - a).abs() < tol) {
        return Err(FastDecayError::InvalidSpec(format!("{a} is not an extremal point")));
    }
    if !(rho0 > 0.0) || a - 2.0 * rho0 <= -PI || a + 2.0 * rho0 >= PI {
        return Err(FastDecayError::InvalidSpec(format!(
            "buffer [a - 2 rho0, a + 2 rho0] leaves (-pi, pi) for rho0 = {rho0}"
        )));
    }
    let zeros: Vec<f64> = d.extremal_points.iter().copied().filter(|&p| (p - a).abs() >= tol).collect();
    let spec = FastDecaySpecTrig {
        peak: a,
        peak_order: 1,
        plateau: [a - rho0, a + rho0],
        buffer: [a - 2.0 * rho0, a + 2.0 * rho0],
        multiplicities: vec![order; zeros.len()],
        zeros,
        degree: m,
    };
    build_fd_trig(&spec)
}
