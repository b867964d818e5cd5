use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::PolyError;

/// Ordered, disjoint, closed intervals inside `(-pi, pi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "IntervalSetRepr", into = "IntervalSetRepr")]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct IntervalSetRepr {
    intervals: Vec<[f64; 2]>,
}

impl TryFrom<IntervalSetRepr> for IntervalSet {
    type Error = PolyError;

    fn try_from(r: IntervalSetRepr) -> Result<Self, Self::Error> {
        IntervalSet::new(r.intervals.into_iter().map(|[l, r]| (l, r)).collect())
    }
}

impl From<IntervalSet> for IntervalSetRepr {
    fn from(s: IntervalSet) -> Self {
        IntervalSetRepr {
            intervals: s.intervals.into_iter().map(|(l, r)| [l, r]).collect(),
        }
    }
}

impl IntervalSet {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self, PolyError> {
        if intervals.is_empty() {
            return Err(PolyError::InvalidSet("empty interval set".into()));
        }
        for (i, &(l, r)) in intervals.iter().enumerate() {
            if !(l.is_finite() && r.is_finite()) || !(l < r) {
                return Err(PolyError::InvalidSet(format!("degenerate interval [{l}, {r}]")));
            }
            if l <= -PI || r >= PI {
                return Err(PolyError::InvalidSet(format!(
                    "interval [{l}, {r}] leaves (-pi, pi)"
                )));
            }
            if i > 0 && intervals[i - 1].1 >= l {
                return Err(PolyError::InvalidSet(
                    "intervals must be disjoint and increasing".into(),
                ));
            }
        }
        Ok(Self { intervals })
    }

    pub fn single(l: f64, r: f64) -> Result<Self, PolyError> {
        Self::new(vec![(l, r)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.intervals.iter().any(|&(l, r)| l <= t && t <= r)
    }

    /// Component containing `t`, if any.
    pub fn component_of(&self, t: f64) -> Option<(f64, f64)> {
        self.intervals.iter().copied().find(|&(l, r)| l <= t && t <= r)
    }

    pub fn endpoints(&self) -> Vec<f64> {
        self.intervals.iter().flat_map(|&(l, r)| [l, r]).collect()
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(l, r)| r - l).sum()
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals
            .iter()
            .all(|&(l, r)| other.intervals.iter().any(|&(ol, or)| ol <= l && r <= or))
    }

    /// Distance from `a` to the next point of the set to its right, going
    /// around the circle once.
    fn gap_to_right(&self, a: f64) -> f64 {
        let next = self
            .intervals
            .iter()
            .map(|&(l, _)| l)
            .find(|&l| l > a)
            .unwrap_or(self.intervals[0].0 + 2.0 * PI);
        next - a
    }

    /// `[a - 2 rho, a]` lies in the set and `(a, a + 2 rho)` misses it (and
    /// its `2 pi` translate).
    pub fn satisfies_interval_condition(&self, a: f64, rho: f64) -> bool {
        if !(rho > 0.0) {
            return false;
        }
        match self.component_of(a) {
            Some((l, r)) => r == a && a - 2.0 * rho >= l && self.gap_to_right(a) >= 2.0 * rho,
            None => false,
        }
    }

    /// Largest `rho` for which the interval condition holds at `a`.
    pub fn max_interval_condition_rho(&self, a: f64) -> Option<f64> {
        let (l, r) = self.component_of(a)?;
        if r != a {
            return None;
        }
        Some(0.5 * (a - l).min(self.gap_to_right(a)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(IntervalSet::new(vec![]).is_err());
        assert!(IntervalSet::new(vec![(0.0, 0.0)]).is_err());
        assert!(IntervalSet::new(vec![(-4.0, 0.0)]).is_err());
        assert!(IntervalSet::new(vec![(0.0, 1.0), (0.5, 2.0)]).is_err());
        assert!(IntervalSet::new(vec![(-2.0, -1.0), (0.5, 2.0)]).is_ok());
    }

    #[test]
    fn interval_condition() {
        let e = IntervalSet::new(vec![(-2.0, -0.5), (0.3, 1.9)]).unwrap();
        assert!(e.satisfies_interval_condition(1.9, 0.5));
        assert!(!e.satisfies_interval_condition(1.9, 0.9));
        assert!(!e.satisfies_interval_condition(0.3, 0.1));
        // gap to the right of -0.5 is 0.8
        assert!(e.satisfies_interval_condition(-0.5, 0.4));
        assert!(!e.satisfies_interval_condition(-0.5, 0.41));
        let rho = e.max_interval_condition_rho(1.9).unwrap();
        // min(1.9 - 0.3, (2 pi - 2) - 1.9) / 2
        assert!((rho - 0.8).abs() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let e = IntervalSet::single(-1.0, 1.0).unwrap();
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"intervals":[[-1.0,1.0]]}"#);
    }
}
