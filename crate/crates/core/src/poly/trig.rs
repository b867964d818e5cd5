//! Real trigonometric polynomials in coefficient form.
//!
//! A [`TrigPoly`] stores `cos[j]` and `sin[j]` as the coefficients of
//! `cos((j + s) t)` and `sin((j + s) t)` where `s` is `0` for ordinary
//! polynomials and `1/2` for half-integer ones. For integer frequencies the
//! `sin[0]` slot is always zero.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::PolyError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrigPolyRepr", into = "TrigPolyRepr")]
pub struct TrigPoly {
    half_shift: bool,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TrigPolyRepr {
    half_shift: bool,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TryFrom<TrigPolyRepr> for TrigPoly {
    type Error = PolyError;

    fn try_from(r: TrigPolyRepr) -> Result<Self, Self::Error> {
        TrigPoly::new(r.cos, r.sin, r.half_shift)
    }
}

impl From<TrigPoly> for TrigPolyRepr {
    fn from(p: TrigPoly) -> Self {
        TrigPolyRepr {
            half_shift: p.half_shift,
            cos: p.cos,
            sin: p.sin,
        }
    }
}

impl TrigPoly {
    /// Builds a polynomial from aligned coefficient vectors. The shorter
    /// vector is zero padded.
    pub fn new(mut cos: Vec<f64>, mut sin: Vec<f64>, half_shift: bool) -> Result<Self, PolyError> {
        if cos.iter().chain(sin.iter()).any(|c| !c.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        let len = cos.len().max(sin.len()).max(1);
        cos.resize(len, 0.0);
        sin.resize(len, 0.0);
        if !half_shift
            && sin[0] != 0.0 {
                return Err(PolyError::InvalidCoefficients(
                    "sin[0] must be zero for integer frequencies".into(),
                ));
            }
        Ok(Self { half_shift, cos, sin }.trimmed())
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            half_shift: false,
            cos: vec![c],
            sin: vec![0.0],
        }
    }

    /// `a cos(j t) + b sin(j t)`.
    pub fn harmonic(j: usize, a: f64, b: f64) -> Self {
        let mut cos = vec![0.0; j + 1];
        let mut sin = vec![0.0; j + 1];
        cos[j] = a;
        if j > 0 {
            sin[j] = b;
        }
        Self { half_shift: false, cos, sin }.trimmed()
    }

    /// `a cos((j + 1/2) t) + b sin((j + 1/2) t)`.
    pub fn half_harmonic(j: usize, a: f64, b: f64) -> Self {
        let mut cos = vec![0.0; j + 1];
        let mut sin = vec![0.0; j + 1];
        cos[j] = a;
        sin[j] = b;
        Self { half_shift: true, cos, sin }.trimmed()
    }

    /// `sin((t - c) / 2)` as a half-integer polynomial.
    pub fn half_sine_at(c: f64) -> Self {
        let (s, co) = (c / 2.0).sin_cos();
        Self::half_harmonic(0, -s, co)
    }

    /// `cos((t - c) / 2)` as a half-integer polynomial.
    pub fn half_cosine_at(c: f64) -> Self {
        let (s, co) = (c / 2.0).sin_cos();
        Self::half_harmonic(0, co, s)
    }

    pub fn half_shift(&self) -> bool {
        self.half_shift
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    /// Highest index with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.cos.len() - 1
    }

    /// Largest frequency present, `degree + 1/2` for half-integer polynomials.
    pub fn frequency_degree(&self) -> f64 {
        self.degree() as f64 + self.shift()
    }

    fn shift(&self) -> f64 {
        if self.half_shift {
            0.5
        } else {
            0.0
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cos.iter().chain(self.sin.iter()).all(|&c| c == 0.0)
    }

    /// `sum_j |(a_j, b_j)| f_j^k`, a bound for `|T^{(k)}|`.
    pub fn derivative_bound(&self, k: usize) -> f64 {
        let s = self.shift();
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(j, (a, b))| a.hypot(*b) * (j as f64 + s).powi(k as i32))
            .sum()
    }

    /// Sum of absolute values of all coefficients; bounds the sup norm.
    pub fn coeff_l1(&self) -> f64 {
        self.cos.iter().chain(self.sin.iter()).map(|c| c.abs()).sum()
    }

    fn trimmed(mut self) -> Self {
        while self.cos.len() > 1 {
            let last = self.cos.len() - 1;
            if self.cos[last] == 0.0 && self.sin[last] == 0.0 {
                self.cos.pop();
                self.sin.pop();
            } else {
                break;
            }
        }
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_derivative(t, 0)
    }

    /// Value of the `k`-th derivative at `t`, straight from the coefficients.
    pub fn eval_derivative(&self, t: f64, k: usize) -> f64 {
        let s = self.shift();
        let phase = k as f64 * FRAC_PI_2;
        let (sw, cw) = t.sin_cos();
        let mut acc = 0.0;
        let (mut zs, mut zc) = (0.0, 0.0);
        for j in 0..self.cos.len() {
            // Reseed the rotation recurrence periodically to bound drift.
            if j % 32 == 0 {
                let arg = (j as f64 + s) * t;
                let (a, b) = arg.sin_cos();
                zs = a;
                zc = b;
            } else {
                let ns = zs * cw + zc * sw;
                let nc = zc * cw - zs * sw;
                zs = ns;
                zc = nc;
            }
            let (a, b) = (self.cos[j], self.sin[j]);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            let f = j as f64 + s;
            let scale = if k == 0 { 1.0 } else { f.powi(k as i32) };
            if k == 0 {
                acc += a * zc + b * zs;
            } else {
                // d^k cos(ft) = f^k cos(ft + k pi/2), same for sin.
                let (ps, pc) = phase.sin_cos();
                let c_shift = zc * pc - zs * ps;
                let s_shift = zs * pc + zc * ps;
                acc += scale * (a * c_shift + b * s_shift);
            }
        }
        acc
    }

    /// Exact coefficient-level derivative.
    pub fn derivative(&self) -> Self {
        let s = self.shift();
        let mut cos = vec![0.0; self.cos.len()];
        let mut sin = vec![0.0; self.sin.len()];
        for j in 0..self.cos.len() {
            let f = j as f64 + s;
            cos[j] = f * self.sin[j];
            sin[j] = -f * self.cos[j];
        }
        if !self.half_shift {
            sin[0] = 0.0;
            cos[0] = 0.0;
        }
        Self {
            half_shift: self.half_shift,
            cos,
            sin,
        }
        .trimmed()
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    /// Periodic antiderivative `F` with `F' = self` and `F(base) = 0`.
    ///
    /// Only integer-frequency polynomials with `|A_0| <= mean_tol` qualify; the
    /// residual mean is dropped.
    pub fn antiderivative(&self, base: f64, mean_tol: f64) -> Result<Self, PolyError> {
        if self.half_shift {
            return Err(PolyError::MixedParity);
        }
        if self.cos[0].abs() > mean_tol {
            return Err(PolyError::NonzeroMean(self.cos[0]));
        }
        let mut cos = vec![0.0; self.cos.len()];
        let mut sin = vec![0.0; self.sin.len()];
        for j in 1..self.cos.len() {
            let f = j as f64;
            sin[j] = self.cos[j] / f;
            cos[j] = -self.sin[j] / f;
        }
        let mut out = Self {
            half_shift: false,
            cos,
            sin,
        };
        let c = out.eval(base);
        out.cos[0] = -c;
        Ok(out.trimmed())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            half_shift: self.half_shift,
            cos: self.cos.iter().map(|x| x * c).collect(),
            sin: self.sin.iter().map(|x| x * c).collect(),
        }
        .trimmed()
    }

    /// Sum of two polynomials of the same parity.
    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.half_shift != other.half_shift {
            return Err(PolyError::MixedParity);
        }
        let len = self.cos.len().max(other.cos.len());
        let mut cos = vec![0.0; len];
        let mut sin = vec![0.0; len];
        for (j, (c, s)) in self.cos.iter().zip(&self.sin).enumerate() {
            cos[j] += c;
            sin[j] += s;
        }
        for (j, (c, s)) in other.cos.iter().zip(&other.sin).enumerate() {
            cos[j] += c;
            sin[j] += s;
        }
        Ok(Self {
            half_shift: self.half_shift,
            cos,
            sin,
        }
        .trimmed())
    }

    /// Product via product-to-sum identities. Frequencies are tracked as
    /// doubled integers so half-integer parities combine exactly.
    pub fn product(&self, other: &Self) -> Self {
        let sp = usize::from(self.half_shift);
        let sq = usize::from(other.half_shift);
        let half = (sp + sq) % 2 == 1;
        let sr = usize::from(half);
        let len = self.cos.len() + other.cos.len();
        let mut cos = vec![0.0; len];
        let mut sin = vec![0.0; len];
        let idx = |f2: usize| (f2 - sr) / 2;
        for (i, (&ca, &sa)) in self.cos.iter().zip(&self.sin).enumerate() {
            if ca == 0.0 && sa == 0.0 {
                continue;
            }
            let f = 2 * i + sp;
            for (j, (&cb, &sb)) in other.cos.iter().zip(&other.sin).enumerate() {
                if cb == 0.0 && sb == 0.0 {
                    continue;
                }
                let g = 2 * j + sq;
                let sum = idx(f + g);
                // cos f cos g = (cos(f-g) + cos(f+g)) / 2
                // sin f sin g = (cos(f-g) - cos(f+g)) / 2
                // cos f sin g = (sin(f+g) - sin(f-g)) / 2
                // sin f cos g = (sin(f+g) + sin(f-g)) / 2
                let cc = 0.5 * ca * cb;
                let ss = 0.5 * sa * sb;
                let cs = 0.5 * ca * sb;
                let sc = 0.5 * sa * cb;
                cos[sum] += cc - ss;
                sin[sum] += cs + sc;
                let (diff, sign) = if f >= g { (f - g, 1.0) } else { (g - f, -1.0) };
                let d = idx(diff);
                cos[d] += cc + ss;
                sin[d] += sign * (sc - cs);
            }
        }
        if !half {
            sin[0] = 0.0;
        }
        Self {
            half_shift: half,
            cos,
            sin,
        }
        .trimmed()
    }

    pub fn powi(&self, k: usize) -> Self {
        let mut acc = Self::constant(1.0);
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

    /// Mean value over a period (the constant coefficient).
    pub fn mean(&self) -> f64 {
        if self.half_shift {
            0.0
        } else {
            self.cos[0]
        }
    }

    /// Rotates the argument: returns `t -> self(t - phi)`.
    pub fn shifted(&self, phi: f64) -> Self {
        let s = self.shift();
        let mut cos = self.cos.clone();
        let mut sin = self.sin.clone();
        for j in 0..self.cos.len() {
            let (sn, cs) = ((j as f64 + s) * phi).sin_cos();
            let (a, b) = (self.cos[j], self.sin[j]);
            // a cos(f(t-phi)) + b sin(f(t-phi))
            cos[j] = a * cs - b * sn;
            sin[j] = a * sn + b * cs;
        }
        if !self.half_shift {
            sin[0] = 0.0;
        }
        Self {
            half_shift: self.half_shift,
            cos,
            sin,
        }
        .trimmed()
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;

    /// Panics on mixed parity; use [`TrigPoly::try_add`] to handle it.
    fn add(self, rhs: Self) -> TrigPoly {
        self.try_add(rhs).expect("mixed-parity trigonometric sum")
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;

    fn sub(self, rhs: Self) -> TrigPoly {
        self.try_add(&rhs.scale(-1.0))
            .expect("mixed-parity trigonometric difference")
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;

    fn mul(self, rhs: Self) -> TrigPoly {
        self.product(rhs)
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;

    fn neg(self) -> TrigPoly {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| -PI + 2.0 * PI * (i as f64 + 0.37) / n as f64)
    }

    #[test]
    fn eval_basics() {
        let p = TrigPoly::harmonic(3, 1.0, 0.0);
        assert_eq!(p.eval(0.0), 1.0);
        let h = TrigPoly::half_harmonic(0, 1.0, 0.0);
        assert!(h.eval(PI).abs() < 1e-15);
        let q = TrigPoly::harmonic(1, 4.0, 3.0);
        assert!((q.eval(3f64.atan2(4.0)) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_examples() {
        let n = 7;
        let p = TrigPoly::harmonic(n, 1.0, 0.0);
        let d = p.derivative();
        assert_eq!(d, TrigPoly::harmonic(n, 0.0, -(n as f64)));
        let d2 = p.nth_derivative(2);
        assert_eq!(d2, TrigPoly::harmonic(n, -((n * n) as f64), 0.0));
        let h = TrigPoly::half_harmonic(0, 0.0, 1.0);
        assert_eq!(h.derivative(), TrigPoly::half_harmonic(0, 0.5, 0.0));
    }

    #[test]
    fn eval_derivative_matches_coefficient_derivative() {
        let p = TrigPoly::new(vec![0.3, -1.0, 0.5, 2.0], vec![0.0, 0.7, -0.2, 0.1], false).unwrap();
        for k in 0..5 {
            let d = p.nth_derivative(k);
            for t in grid(37) {
                assert!((d.eval(t) - p.eval_derivative(t, k)).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn product_examples() {
        let c1 = TrigPoly::harmonic(1, 1.0, 0.0);
        let sq = c1.product(&c1);
        assert_eq!(sq, TrigPoly::new(vec![0.5, 0.0, 0.5], vec![], false).unwrap());

        let sh = TrigPoly::half_harmonic(0, 0.0, 1.0);
        let sq = sh.product(&sh);
        assert!(!sq.half_shift());
        assert_eq!(sq, TrigPoly::new(vec![0.5, -0.5], vec![], false).unwrap());

        let s2 = TrigPoly::harmonic(2, 0.0, 1.0);
        let p = c1.product(&s2);
        for t in grid(1000) {
            let expect = 0.5 * (t.sin() + (3.0 * t).sin());
            assert!((p.eval(t) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn mixed_parity_products_and_sums() {
        let a = TrigPoly::half_sine_at(0.4);
        let b = TrigPoly::harmonic(2, 0.3, -1.1);
        let ab = a.product(&b);
        assert!(ab.half_shift());
        for t in grid(200) {
            assert!((ab.eval(t) - a.eval(t) * b.eval(t)).abs() < 1e-13);
        }
        assert!(matches!(a.try_add(&b), Err(PolyError::MixedParity)));
    }

    #[test]
    fn half_sine_and_cosine_factors() {
        let s = TrigPoly::half_sine_at(0.9);
        let c = TrigPoly::half_cosine_at(-1.3);
        for t in grid(50) {
            assert!((s.eval(t) - ((t - 0.9) / 2.0).sin()).abs() < 1e-14);
            assert!((c.eval(t) - ((t + 1.3) / 2.0).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn antiderivative_examples() {
        let c = TrigPoly::harmonic(1, 1.0, 0.0);
        let f = c.antiderivative(0.0, 1e-12).unwrap();
        assert_eq!(f, TrigPoly::harmonic(1, 0.0, 1.0));
        let s = TrigPoly::harmonic(1, 0.0, 1.0);
        let f = s.antiderivative(0.0, 1e-12).unwrap();
        assert_eq!(f, TrigPoly::new(vec![1.0, -1.0], vec![], false).unwrap());
        let one = TrigPoly::constant(1.0);
        assert!(matches!(one.antiderivative(0.0, 1e-12), Err(PolyError::NonzeroMean(_))));
    }

    #[test]
    fn shifted_rotates_argument() {
        let p = TrigPoly::new(vec![0.1, 0.4, -0.3], vec![0.0, 1.0, 0.25], false).unwrap();
        let q = p.shifted(0.8);
        for t in grid(40) {
            assert!((q.eval(t) - p.eval(t - 0.8)).abs() < 1e-14);
        }
    }

    #[test]
    fn json_shape() {
        let p = TrigPoly::harmonic(1, 4.0, 3.0);
        let js = serde_json::to_value(&p).unwrap();
        assert_eq!(js["half_shift"], false);
        assert_eq!(js["cos"], serde_json::json!([0.0, 4.0]));
        assert_eq!(js["sin"], serde_json::json!([0.0, 3.0]));
        let back: TrigPoly = serde_json::from_value(js).unwrap();
        assert_eq!(back, p);
        let bad = serde_json::json!({"half_shift": false, "cos": [1.0], "sin": [2.0]});
        assert!(serde_json::from_value::<TrigPoly>(bad).is_err());
    }
}
