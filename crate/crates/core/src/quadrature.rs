//! Adaptive Gauss-Legendre quadrature, including integrands with inverse
//! square-root singularities at both ends of the interval.

use std::sync::OnceLock;

/// Nodes per panel.
pub const PANEL_NODES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadOptions {
    /// Absolute tolerance per panel, relative to `scale`.
    pub panel_tol: f64,
    /// Typical integrand magnitude used to scale `panel_tol`.
    pub scale: f64,
    pub max_depth: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            panel_tol: 1e-12,
            scale: 1.0,
            max_depth: 30,
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_NODES))
}

/// Fixed 64-node rule on `[a, b]`.
pub fn gauss_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (x, w) = panel_rule();
    let (m, h) = ((a + b) / 2.0, (b - a) / 2.0);
    h * x.iter().zip(w).map(|(&xi, &wi)| wi * f(m + h * xi)).sum::<f64>()
}

/// Adaptive bisection of 64-node panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> f64 {
    let whole = gauss_panel(&f, a, b);
    adapt(&f, a, b, whole, opts, 0)
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, opts: &QuadOptions, depth: usize) -> f64 {
    let m = 0.5 * (a + b);
    let left = gauss_panel(f, a, m);
    let right = gauss_panel(f, m, b);
    let split = left + right;
    if (split - whole).abs() <= opts.panel_tol * opts.scale.max(f64::MIN_POSITIVE) || depth >= opts.max_depth {
        return split;
    }
    adapt(f, a, m, left, opts, depth + 1) + adapt(f, m, b, right, opts, depth + 1)
}

/// Integral over `[a, b]` of an integrand with (at most) inverse square-root
/// singularities at both ends. The integrand receives `(t, t - a, b - t)`
/// with the two offsets computed exactly from the substitution
/// `t = a + u^2` (left half) and `t = b - u^2` (right half).
pub fn integrate_sqrt_endpoints<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> f64
where
    F: Fn(f64, f64, f64) -> f64,
{
    let half = 0.5 * (b - a);
    let r = half.sqrt();
    let left = |u: f64| {
        let d = u * u;
        2.0 * u * f(a + d, d, (b - a) - d)
    };
    let right = |u: f64| {
        let d = u * u;
        2.0 * u * f(b - d, (b - a) - d, d)
    };
    integrate(left, 0.0, r, opts) + integrate(right, 0.0, r, opts)
}
