//! Higher derivatives of compositions and Chebyshev polynomial constants.

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::poly::{AlgPoly, TrigPoly};

/// Largest derivative order with exact partition coefficients.
pub const MAX_PARTITION_ORDER: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompositionError {
    #[error("derivative order {0} outside 1..={MAX_PARTITION_ORDER}")]
    OrderOutOfRange(usize),
    #[error("need {needed} derivatives, got {got}")]
    NotEnoughDerivatives { needed: usize, got: usize },
    #[error("integer overflow in exact arithmetic")]
    Overflow,
}

/// One term of the Faa di Bruno sum: multiplicities `m_1..m_k` with
/// `sum j m_j = k` and coefficient `k! / prod(m_j! (j!)^{m_j})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionTerm {
    pub multiplicities: Vec<u32>,
    pub coefficient: u128,
}

impl PartitionTerm {
    /// Order of the outer derivative, `m_1 + ... + m_k`.
    pub fn outer_order(&self) -> usize {
        self.multiplicities.iter().map(|&m| m as usize).sum()
    }
}

fn factorial(n: usize) -> Result<u128, CompositionError> {
    (1..=n as u128).try_fold(1u128, |acc, v| acc.checked_mul(v).ok_or(CompositionError::Overflow))
}

/// All partitions of `k` in multiplicity form.
pub fn enumerate_partitions(k: usize) -> Result<Vec<PartitionTerm>, CompositionError> {
    if k == 0 || k > MAX_PARTITION_ORDER {
        return Err(CompositionError::OrderOutOfRange(k));
    }
    let kf = factorial(k)?;
    let fact: Vec<u128> = (0..=k).map(factorial).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    let mut mult = vec![0u32; k];
    fn rec(
        part: usize,
        remaining: usize,
        mult: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if part == 0 {
            if remaining == 0 {
                out.push(mult.clone());
            }
            return;
        }
        for m in (0..=remaining / part).rev() {
            mult[part - 1] = m as u32;
            rec(part - 1, remaining - m * part, mult, out);
        }
        mult[part - 1] = 0;
    }
    let mut raw = Vec::new();
    rec(k, k, &mut mult, &mut raw);
    for m in raw {
        let mut denom: u128 = 1;
        for (j, &mj) in m.iter().enumerate() {
            let jf = fact[j + 1];
            denom = denom
                .checked_mul(fact[mj as usize])
                .ok_or(CompositionError::Overflow)?;
            for _ in 0..mj {
                denom = denom.checked_mul(jf).ok_or(CompositionError::Overflow)?;
            }
        }
        debug_assert_eq!(kf % denom, 0);
        out.push(PartitionTerm {
            multiplicities: m,
            coefficient: kf / denom,
        });
    }
    Ok(out)
}

/// `d^k/dx^k f(g(x))` from `outer[j-1] = f^{(j)}(g(x))` and
/// `inner[j-1] = g^{(j)}(x)`, `j = 1..k`.
pub fn faa_di_bruno(outer: &[f64], inner: &[f64], k: usize) -> Result<f64, CompositionError> {
    let terms = enumerate_partitions(k)?;
    faa_di_bruno_with(&terms, outer, inner, k)
}

/// Same as [`faa_di_bruno`] with a precomputed partition list.
pub fn faa_di_bruno_with(
    terms: &[PartitionTerm],
    outer: &[f64],
    inner: &[f64],
    k: usize,
) -> Result<f64, CompositionError> {
    for s in [outer, inner] {
        if s.len() < k {
            return Err(CompositionError::NotEnoughDerivatives {
                needed: k,
                got: s.len(),
            });
        }
    }
    let mut total = 0.0;
    for term in terms {
        let mut prod = term.coefficient as f64 * outer[term.outer_order() - 1];
        for (j, &mj) in term.multiplicities.iter().enumerate() {
            if mj > 0 {
                prod *= inner[j].powi(mj as i32);
            }
        }
        total += prod;
    }
    Ok(total)
}

/// Exact integer coefficients of the Chebyshev polynomial `T_l`.
pub fn chebyshev_exact(l: usize) -> Result<Vec<i128>, CompositionError> {
    let mut prev = vec![1i128];
    if l == 0 {
        return Ok(prev);
    }
    let mut cur = vec![0i128, 1];
    for _ in 1..l {
        let mut next = vec![0i128; cur.len() + 1];
        for (j, &c) in cur.iter().enumerate() {
            next[j + 1] = c
                .checked_mul(2)
                .and_then(|v| v.checked_add(next[j + 1]))
                .ok_or(CompositionError::Overflow)?;
        }
        for (j, &c) in prev.iter().enumerate() {
            next[j] = next[j].checked_sub(c).ok_or(CompositionError::Overflow)?;
        }
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `T_l` via the three-term recurrence.
pub fn chebyshev(l: usize) -> AlgPoly {
    let mut prev = AlgPoly::constant(1.0);
    if l == 0 {
        return prev;
    }
    let x = AlgPoly::x();
    let mut cur = x.clone();
    for _ in 1..l {
        let next = &(&x * &cur).scale(2.0) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(2k - 1)!!`, with `(-1)!! = 1`.
pub fn double_factorial_odd(k: usize) -> u128 {
    (1..=k as u128).map(|j| 2 * j - 1).product()
}

/// `C_{l,k} = l^2 (l^2 - 1) ... (l^2 - (k-1)^2) / (2k - 1)!!`, the modulus of
/// `T_l^{(k)}(+-1)`.
pub fn chebyshev_endpoint_derivative(l: usize, k: usize) -> Result<Ratio<i128>, CompositionError> {
    let l2 = (l as i128) * (l as i128);
    let mut num: i128 = 1;
    for j in 0..k as i128 {
        num = num
            .checked_mul(l2 - j * j)
            .ok_or(CompositionError::Overflow)?;
    }
    let den = i128::try_from(double_factorial_odd(k)).map_err(|_| CompositionError::Overflow)?;
    Ok(Ratio::new(num, den))
}

/// Exact `T_l^{(k)}(1)` by repeated differentiation of the integer
/// coefficients.
pub fn chebyshev_derivative_at_one_exact(l: usize, k: usize) -> Result<i128, CompositionError> {
    let mut c = chebyshev_exact(l)?;
    for _ in 0..k {
        if c.len() <= 1 {
            return Ok(0);
        }
        c = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &v)| v.checked_mul(j as i128).ok_or(CompositionError::Overflow))
            .collect::<Result<_, _>>()?;
    }
    c.iter()
        .try_fold(0i128, |acc, &v| acc.checked_add(v).ok_or(CompositionError::Overflow))
}

/// Values `T_l^{(j)}(x)` for `j = 0..=k` using the differentiated
/// recurrence `T_{n+1}^{(j)} = 2x T_n^{(j)} + 2j T_n^{(j-1)} - T_{n-1}^{(j)}`.
/// Stable on `[-1, 1]` for large `l`.
pub fn chebyshev_derivatives_at(l: usize, x: f64, k: usize) -> Vec<f64> {
    let mut prev = vec![0.0; k + 1];
    prev[0] = 1.0;
    if l == 0 {
        return prev;
    }
    let mut cur = vec![0.0; k + 1];
    cur[0] = x;
    if k >= 1 {
        cur[1] = 1.0;
    }
    for _ in 1..l {
        let mut next = vec![0.0; k + 1];
        for j in 0..=k {
            let lower = if j > 0 { 2.0 * j as f64 * cur[j - 1] } else { 0.0 };
            next[j] = 2.0 * x * cur[j] + lower - prev[j];
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Outer-function derivatives for [`compose_derivative_with`].
pub trait OuterDerivatives {
    /// `[f(y), f'(y), ..., f^{(k)}(y)]`.
    fn derivatives(&self, y: f64, k: usize) -> Vec<f64>;
}

impl OuterDerivatives for AlgPoly {
    fn derivatives(&self, y: f64, k: usize) -> Vec<f64> {
        (0..=k).map(|j| self.eval_derivative(y, j)).collect()
    }
}

/// The Chebyshev polynomial `T_l`, evaluated through its recurrence.
#[derive(Clone, Copy, Debug)]
pub struct Chebyshev(pub usize);

impl OuterDerivatives for Chebyshev {
    fn derivatives(&self, y: f64, k: usize) -> Vec<f64> {
        chebyshev_derivatives_at(self.0, y, k)
    }
}

impl OuterDerivatives for crate::poly::ChebSeries {
    fn derivatives(&self, y: f64, k: usize) -> Vec<f64> {
        let mut d = self.clone();
        let mut out = Vec::with_capacity(k + 1);
        out.push(d.eval(y));
        for _ in 0..k {
            d = d.derivative();
            out.push(d.eval(y));
        }
        out
    }
}

/// `d^k/dt^k P(U(t))` with exact inner derivatives from the coefficients.
pub fn compose_derivative(p: &AlgPoly, u: &TrigPoly, t: f64, k: usize) -> Result<f64, CompositionError> {
    compose_derivative_with(p, u, t, k)
}

pub fn compose_derivative_with<P: OuterDerivatives + ?Sized>(
    p: &P,
    u: &TrigPoly,
    t: f64,
    k: usize,
) -> Result<f64, CompositionError> {
    let y = u.eval(t);
    let outer = p.derivatives(y, k);
    if k == 0 {
        return Ok(outer[0]);
    }
    let inner: Vec<f64> = (1..=k).map(|j| u.eval_derivative(t, j)).collect();
    faa_di_bruno(&outer[1..], &inner, k)
}
