//! Sup norms over interval systems: Chebyshev-node sampling followed by
//! parabolic refinement around every promising sample.

use serde::{Deserialize, Serialize};

use super::{IntervalSet, TrigPoly};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupNorm {
    pub value: f64,
    pub argmax: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupNormOptions {
    pub min_samples: usize,
    pub samples_per_degree: usize,
    /// Bracket width at which refinement stops.
    pub xtol: f64,
    /// Local maxima whose sampled value is at least this fraction of the
    /// best sample are refined.
    pub candidate_ratio: f64,
}

impl Default for SupNormOptions {
    fn default() -> Self {
        Self {
            min_samples: 4096,
            samples_per_degree: 32,
            xtol: 1e-13,
            candidate_ratio: 0.9,
        }
    }
}

pub fn sup_norm(p: &TrigPoly, e: &IntervalSet) -> SupNorm {
    sup_norm_with(|t| p.eval(t), p.degree().max(1), e, &SupNormOptions::default())
}

/// Sup norm of `|f|` over `e` for a smooth `f` oscillating like a
/// polynomial of degree `degree_hint`.
pub fn sup_norm_with<F>(f: F, degree_hint: usize, e: &IntervalSet, opts: &SupNormOptions) -> SupNorm
where
    F: Fn(f64) -> f64,
{
    let mut best = SupNorm {
        value: f64::NEG_INFINITY,
        argmax: f64::NAN,
    };
    for &(l, r) in e.intervals() {
        let s = sup_on_interval(&f, degree_hint, l, r, opts);
        if s.value > best.value {
            best = s;
        }
    }
    best
}

pub(crate) fn sup_on_interval<F>(f: &F, degree_hint: usize, l: f64, r: f64, opts: &SupNormOptions) -> SupNorm
where
    F: Fn(f64) -> f64,
{
    let n = opts.min_samples.max(opts.samples_per_degree * degree_hint).max(3);
    let (mid, half) = ((l + r) / 2.0, (r - l) / 2.0);
    let xs: Vec<f64> = (0..n)
        .map(|i| {
            let th = std::f64::consts::PI * i as f64 / (n - 1) as f64;
            (mid - half * th.cos()).clamp(l, r)
        })
        .collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x).abs()).collect();
    let (mut best_i, mut best_v) = (0, vals[0]);
    for (i, &v) in vals.iter().enumerate() {
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let mut best = SupNorm {
        value: best_v,
        argmax: xs[best_i],
    };
    let threshold = best_v * opts.candidate_ratio;
    for i in 1..n - 1 {
        let v = vals[i];
        if v < threshold || v < vals[i - 1] || v < vals[i + 1] {
            continue;
        }
        let (x, fx) = maximize_in_bracket(|t| f(t).abs(), xs[i - 1], xs[i], xs[i + 1], opts.xtol);
        if fx > best.value {
            best = SupNorm { value: fx, argmax: x };
        }
    }
    best
}

/// Brent's parabolic/golden-section search for a maximum of `g` in `[a, c]`
/// starting from `b`.
pub(crate) fn maximize_in_bracket<G>(g: G, a: f64, b: f64, c: f64, xtol: f64) -> (f64, f64)
where
    G: Fn(f64) -> f64,
{
    const CGOLD: f64 = 0.381_966_011_250_105;
    let h = |x: f64| -g(x);
    let (mut lo, mut hi) = (a.min(c), a.max(c));
    let (mut x, mut w, mut v) = (b, b, b);
    let mut fx = h(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e): (f64, f64) = (0.0, 0.0);
    for _ in 0..200 {
        let xm = 0.5 * (lo + hi);
        let tol1 = xtol * 0.5 + 1e-16 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (hi - lo) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (lo - x) && p < q * (hi - x) {
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { lo - x } else { hi - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = h(u);
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, -fx)
}
