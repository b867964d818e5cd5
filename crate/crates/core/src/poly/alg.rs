use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use super::PolyError;
use crate::poly::TrigPoly;

/// Real algebraic polynomial `c_0 + c_1 x + ... + c_d x^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlgPolyRepr", into = "AlgPolyRepr")]
pub struct AlgPoly {
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct AlgPolyRepr {
    coeffs: Vec<f64>,
}

impl TryFrom<AlgPolyRepr> for AlgPoly {
    type Error = PolyError;

    fn try_from(r: AlgPolyRepr) -> Result<Self, Self::Error> {
        AlgPoly::new(r.coeffs)
    }
}

impl From<AlgPoly> for AlgPolyRepr {
    fn from(p: AlgPoly) -> Self {
        AlgPolyRepr { coeffs: p.coeffs }
    }
}

impl AlgPoly {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, PolyError> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        Ok(Self::from_vec(coeffs))
    }

    fn from_vec(mut coeffs: Vec<f64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_vec(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::from_vec(vec![0.0, 1.0])
    }

    /// `x - c`.
    pub fn linear_root(c: f64) -> Self {
        Self::from_vec(vec![-c, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// `k`-th derivative at `x` without building intermediate polynomials.
    pub fn eval_derivative(&self, x: f64, k: usize) -> f64 {
        if k > self.degree() {
            return 0.0;
        }
        let mut acc = 0.0;
        for j in (k..self.coeffs.len()).rev() {
            let falling: f64 = ((j - k + 1)..=j).map(|v| v as f64).product();
            acc = acc * x + self.coeffs[j] * falling;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::constant(0.0);
        }
        Self::from_vec(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * j as f64)
                .collect(),
        )
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    /// Antiderivative vanishing at `base`.
    pub fn antiderivative(&self, base: f64) -> Self {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(0.0);
        c.extend(self.coeffs.iter().enumerate().map(|(j, a)| a / (j + 1) as f64));
        let mut out = Self::from_vec(c);
        let v = out.eval(base);
        out.coeffs[0] -= v;
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_vec(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn product(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_vec(out)
    }

    pub fn powi(&self, k: usize) -> Self {
        (0..k).fold(Self::constant(1.0), |acc, _| acc.product(self))
    }

    /// `self(inner(x))` by Horner's rule.
    pub fn compose(&self, inner: &AlgPoly) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::constant(0.0), |acc, &c| &acc.product(inner) + &Self::constant(c))
    }

    /// `self(u(t))` as a trigonometric polynomial. Horner in the monomial
    /// basis, so only suitable for moderate degrees.
    pub fn compose_trig(&self, u: &TrigPoly) -> TrigPoly {
        self.coeffs.iter().rev().fold(TrigPoly::zero(), |acc, &c| {
            &acc.product(u) + &TrigPoly::constant(c)
        })
    }
}

impl Add for &AlgPoly {
    type Output = AlgPoly;

    fn add(self, rhs: Self) -> AlgPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = vec![0.0; n];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[j] += c;
        }
        for (j, c) in rhs.coeffs.iter().enumerate() {
            out[j] += c;
        }
        AlgPoly::from_vec(out)
    }
}

impl Sub for &AlgPoly {
    type Output = AlgPoly;

    fn sub(self, rhs: Self) -> AlgPoly {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &AlgPoly {
    type Output = AlgPoly;

    fn mul(self, rhs: Self) -> AlgPoly {
        self.product(rhs)
    }
}
