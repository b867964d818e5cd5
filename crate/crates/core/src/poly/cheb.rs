//! Algebraic polynomials on a finite interval in the Chebyshev basis.
//!
//! High-degree products such as `(1 - ((x - d)/c)^2)^mu` have monomial
//! coefficients that cancel catastrophically; in the Chebyshev basis the
//! coefficients stay bounded by the sup norm on the interval.

use serde::{Deserialize, Serialize};

use super::{AlgPoly, PolyError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebSeries {
    /// Interval `[lo, hi]` mapped onto `[-1, 1]`.
    domain: [f64; 2],
    cheb: Vec<f64>,
}

impl ChebSeries {
    pub fn new(lo: f64, hi: f64, cheb: Vec<f64>) -> Result<Self, PolyError> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(PolyError::InvalidCoefficients(format!(
                "invalid Chebyshev domain [{lo}, {hi}]"
            )));
        }
        if cheb.iter().any(|c| !c.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        Ok(Self::raw(lo, hi, cheb))
    }

    fn raw(lo: f64, hi: f64, mut cheb: Vec<f64>) -> Self {
        if cheb.is_empty() {
            cheb.push(0.0);
        }
        while cheb.len() > 1 && *cheb.last().unwrap() == 0.0 {
            cheb.pop();
        }
        Self {
            domain: [lo, hi],
            cheb,
        }
    }

    pub fn constant(lo: f64, hi: f64, c: f64) -> Self {
        Self::raw(lo, hi, vec![c])
    }

    /// `x - c` on the domain.
    pub fn linear_root(lo: f64, hi: f64, c: f64) -> Self {
        let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        Self::raw(lo, hi, vec![mid - c, half])
    }

    /// Converts a monomial-basis polynomial (exact for low degrees).
    pub fn from_alg(lo: f64, hi: f64, p: &AlgPoly) -> Self {
        let x = Self::linear_root(lo, hi, 0.0);
        p.coeffs()
            .iter()
            .rev()
            .fold(Self::constant(lo, hi, 0.0), |acc, &c| {
                acc.product(&x).add(&Self::constant(lo, hi, c))
            })
    }

    /// Interpolant of degree `n` through the Chebyshev points of the first
    /// kind.
    pub fn interpolate<F: Fn(f64) -> f64>(lo: f64, hi: f64, n: usize, f: F) -> Self {
        let np = n + 1;
        let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        let th: Vec<f64> = (0..np)
            .map(|i| std::f64::consts::PI * (i as f64 + 0.5) / np as f64)
            .collect();
        let vals: Vec<f64> = th.iter().map(|t| f(mid + half * t.cos())).collect();
        let cheb = (0..np)
            .map(|k| {
                let s: f64 = vals.iter().zip(&th).map(|(v, t)| v * (k as f64 * t).cos()).sum();
                s * if k == 0 { 1.0 } else { 2.0 } / np as f64
            })
            .collect();
        Self::raw(lo, hi, cheb)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.domain[0], self.domain[1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.cheb
    }

    pub fn degree(&self) -> usize {
        self.cheb.len() - 1
    }

    fn to_unit(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        (2.0 * x - lo - hi) / (hi - lo)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let u = self.to_unit(x);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.cheb.iter().skip(1).rev() {
            let b0 = 2.0 * u * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + self.cheb[0]
    }

    pub fn derivative(&self) -> Self {
        let n = self.cheb.len() - 1;
        let (lo, hi) = self.domain();
        if n == 0 {
            return Self::constant(lo, hi, 0.0);
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..=n).rev() {
            let next = if k < n { d[k + 1] } else { 0.0 };
            d[k - 1] = next + 2.0 * k as f64 * self.cheb[k];
        }
        d[0] /= 2.0;
        d.truncate(n);
        let s = 2.0 / (hi - lo);
        Self::raw(lo, hi, d.into_iter().map(|c| c * s).collect())
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn eval_derivative(&self, x: f64, k: usize) -> f64 {
        self.nth_derivative(k).eval(x)
    }

    /// `sum_i |c_i| |T_i^{(k)}(1)|` in the variable `x`: a bound for
    /// `|p^{(k)}|` on the domain and the natural scale of rounding errors in
    /// evaluating it.
    pub fn derivative_bound(&self, k: usize) -> f64 {
        let (lo, hi) = self.domain();
        let s = (2.0 / (hi - lo)).powi(k as i32);
        self.cheb
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let n = (i * i) as f64;
                let t: f64 = (0..k).map(|j| (n - (j * j) as f64) / (2 * j + 1) as f64).product();
                c.abs() * t.abs()
            })
            .sum::<f64>()
            * s
    }

    /// Antiderivative vanishing at `base`.
    pub fn antiderivative(&self, base: f64) -> Self {
        let n = self.cheb.len() - 1;
        let (lo, hi) = self.domain();
        let c = |k: usize| -> f64 {
            if k <= n {
                self.cheb[k]
            } else {
                0.0
            }
        };
        let mut b = vec![0.0; n + 2];
        b[1] = c(0) - c(2) / 2.0;
        for k in 2..=n + 1 {
            b[k] = (c(k - 1) - c(k + 1)) / (2.0 * k as f64);
        }
        let s = (hi - lo) / 2.0;
        let mut out = Self::raw(lo, hi, b.into_iter().map(|v| v * s).collect());
        let v = out.eval(base);
        out.cheb[0] -= v;
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let (lo, hi) = self.domain();
        Self::raw(lo, hi, self.cheb.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.domain, other.domain);
        let (lo, hi) = self.domain();
        let n = self.cheb.len().max(other.cheb.len());
        let mut out = vec![0.0; n];
        for (j, c) in self.cheb.iter().enumerate() {
            out[j] += c;
        }
        for (j, c) in other.cheb.iter().enumerate() {
            out[j] += c;
        }
        Self::raw(lo, hi, out)
    }

    /// `T_i T_j = (T_{i+j} + T_{|i-j|}) / 2`.
    pub fn product(&self, other: &Self) -> Self {
        debug_assert_eq!(self.domain, other.domain);
        let (lo, hi) = self.domain();
        let mut out = vec![0.0; self.cheb.len() + other.cheb.len() - 1];
        for (i, &a) in self.cheb.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in other.cheb.iter().enumerate() {
                let h = 0.5 * a * b;
                out[i + j] += h;
                out[i.abs_diff(j)] += h;
            }
        }
        Self::raw(lo, hi, out)
    }

    pub fn powi(&self, k: usize) -> Self {
        let (lo, hi) = self.domain();
        let mut acc = Self::constant(lo, hi, 1.0);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.product(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.product(&base);
            }
        }
        acc
    }

    /// Monomial coefficients in `x`. Ill-conditioned for high degrees.
    pub fn to_alg(&self) -> AlgPoly {
        let (lo, hi) = self.domain();
        let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        let u = AlgPoly::new(vec![-mid / half, 1.0 / half]).expect("finite domain");
        let mut t_prev = AlgPoly::constant(1.0);
        let mut t_cur = u.clone();
        let mut acc = t_prev.scale(self.cheb[0]);
        for (k, &c) in self.cheb.iter().enumerate().skip(1) {
            if k > 1 {
                let next = &(&u * &t_cur).scale(2.0) - &t_prev;
                t_prev = t_cur;
                t_cur = next;
            }
            acc = &acc + &t_cur.scale(c);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_matches_monomial() {
        let p = AlgPoly::new(vec![0.5, -1.0, 2.0, 0.25]).unwrap();
        let c = ChebSeries::from_alg(-2.0, 3.0, &p);
        for x in [-2.0, -0.7, 0.0, 1.1, 3.0] {
            assert!((c.eval(x) - p.eval(x)).abs() < 1e-12);
        }
        let back = c.to_alg();
        for (a, b) in back.coeffs().iter().zip(p.coeffs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn calculus_matches_monomial() {
        let p = AlgPoly::new(vec![1.0, 2.0, -3.0, 0.5, 0.125]).unwrap();
        let c = ChebSeries::from_alg(-1.0, 2.0, &p);
        let dp = p.derivative();
        let dc = c.derivative();
        let ip = p.antiderivative(0.3);
        let ic = c.antiderivative(0.3);
        for x in [-1.0, -0.2, 0.9, 2.0] {
            assert!((dc.eval(x) - dp.eval(x)).abs() < 1e-11);
            assert!((ic.eval(x) - ip.eval(x)).abs() < 1e-11);
            assert!((c.eval_derivative(x, 3) - p.eval_derivative(x, 3)).abs() < 1e-10);
        }
    }

    #[test]
    fn interpolation_is_exact_for_polynomials() {
        let p = AlgPoly::new(vec![0.3, -1.0, 0.0, 2.0, 0.5]).unwrap();
        let c = ChebSeries::interpolate(-1.0, 2.0, 6, |x| p.eval(x));
        for x in [-1.0, -0.3, 0.4, 1.7, 2.0] {
            assert!((c.eval(x) - p.eval(x)).abs() < 1e-13);
        }
        assert!(c.coeffs()[5..].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn high_power_stays_accurate() {
        // (1 - x^2/4)^200 on [-1, 1]; monomial coefficients would be ~1e59.
        let q = ChebSeries::from_alg(-1.0, 1.0, &AlgPoly::new(vec![1.0, 0.0, -0.25]).unwrap());
        let p = q.powi(200);
        for x in [-1.0, -0.5, 0.0, 0.3, 1.0] {
            let exact = (1.0 - x * x / 4.0f64).powi(200);
            assert!((p.eval(x) - exact).abs() < 1e-14, "{x}");
        }
    }
}
