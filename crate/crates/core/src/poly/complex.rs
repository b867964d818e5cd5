use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PolyError;

/// Algebraic polynomial `sum c_j z^j` with complex coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexPolyRepr", into = "ComplexPolyRepr")]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct ComplexPolyRepr {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TryFrom<ComplexPolyRepr> for ComplexPoly {
    type Error = PolyError;

    fn try_from(r: ComplexPolyRepr) -> Result<Self, Self::Error> {
        if r.re.len() != r.im.len() {
            return Err(PolyError::InvalidCoefficients("re and im differ in length".into()));
        }
        ComplexPoly::new(r.re.into_iter().zip(r.im).map(|(a, b)| Complex64::new(a, b)).collect())
    }
}

impl From<ComplexPoly> for ComplexPolyRepr {
    fn from(p: ComplexPoly) -> Self {
        ComplexPolyRepr {
            re: p.coeffs.iter().map(|c| c.re).collect(),
            im: p.coeffs.iter().map(|c| c.im).collect(),
        }
    }
}

impl ComplexPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self, PolyError> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Ok(Self { coeffs })
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::new(vec![Complex64::new(0.0, 0.0)]).expect("finite");
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(j, &c)| c * j as f64).collect();
        Self { coeffs }
    }

    pub fn nth_derivative(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }
}
