//! Independent check of the equilibrium density: minimize the discrete
//! logarithmic energy of `n` points on the arcs.
//!
//! Arc endpoints are pinned. For fixed per-arc counts the energy is strictly
//! convex in the free angles, so full Newton with a Cholesky solve converges
//! quickly; counts are then balanced by exchanges between arcs guided by the mean
//! discrete potential on each arc.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{ArcSystem, EquilibriumError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub n_points: usize,
    pub bins_per_arc: usize,
    /// Stop once the predicted energy drop of a Newton step is below this.
    pub decrement_tol: f64,
    pub max_newton: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            n_points: 400,
            bins_per_arc: 20,
            decrement_tol: 1e-12,
            max_newton: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    /// Optimized points, sorted, per arc.
    pub points: Vec<Vec<f64>>,
    pub arc_masses: Vec<f64>,
    /// `(lo, hi, density)` histogram bins.
    pub histogram: Vec<(f64, f64, f64)>,
    /// `(midpoint, 1 / (n * spacing))` for consecutive points.
    pub spacing_density: Vec<(f64, f64)>,
    pub energy: f64,
}

fn pair_log(d: f64) -> f64 {
    -(2.0 * (0.5 * d).sin()).abs().ln()
}

fn energy(pts: &[f64]) -> f64 {
    let mut e = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            e += pair_log(pts[i] - pts[j]);
        }
    }
    e
}

/// Points for one arc: pinned ends plus `count - 2` Chebyshev-spaced
/// interior points.
fn seed_arc(l: f64, r: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let th = std::f64::consts::PI * i as f64 / (count - 1) as f64;
            0.5 * (l + r) - 0.5 * (r - l) * th.cos()
        })
        .collect()
}

struct Layout {
    /// All points, arc by arc.
    pts: Vec<f64>,
    /// Indices of free points.
    free: Vec<usize>,
    /// For each free point, the indices of its neighbours in its arc.
    bounds: Vec<(usize, usize)>,
}

fn layout(arcs: &ArcSystem, counts: &[usize], warm: Option<&[Vec<f64>]>) -> Layout {
    let mut pts = Vec::new();
    let mut free = Vec::new();
    let mut bounds = Vec::new();
    for (i, ((l, r), &c)) in arcs.arcs().zip(counts).enumerate() {
        let base = pts.len();
        match warm.map(|w| &w[i]) {
            Some(old) if old.len() == c => pts.extend_from_slice(old),
            Some(old) => pts.extend(resample(old, c)),
            None => pts.extend(seed_arc(l, r, c)),
        }
        for i in 1..c - 1 {
            free.push(base + i);
            bounds.push((base + i - 1, base + i + 1));
        }
    }
    Layout { pts, free, bounds }
}

/// Linear interpolation of the quantile curve of `old` at `c` points.
fn resample(old: &[f64], c: usize) -> Vec<f64> {
    let k = old.len() - 1;
    (0..c)
        .map(|j| {
            let s = j as f64 * k as f64 / (c - 1) as f64;
            let i = (s.floor() as usize).min(k - 1);
            let f = s - i as f64;
            old[i] + f * (old[i + 1] - old[i])
        })
        .collect()
}

fn split(pts: &[f64], counts: &[usize]) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(counts.len());
    let mut start = 0;
    for &c in counts {
        out.push(pts[start..start + c].to_vec());
        start += c;
    }
    out
}

/// Mean over the free points of each arc of the potential of all other
/// points; moving a point from arc `A` to arc `B` changes the energy by
/// roughly `U_B - U_A`.
fn arc_potentials(lay: &Layout, counts: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(counts.len());
    let mut start = 0;
    for &c in counts {
        let mut acc = 0.0;
        for p in start + 1..start + c - 1 {
            acc += (0..lay.pts.len())
                .filter(|&q| q != p)
                .map(|q| pair_log(lay.pts[p] - lay.pts[q]))
                .sum::<f64>();
        }
        out.push(acc / (c - 2) as f64);
        start += c;
    }
    out
}

fn optimize(lay: &mut Layout, opts: &OracleOptions) -> Result<f64, EquilibriumError> {
    let nf = lay.free.len();
    let n = lay.pts.len();
    let mut e = energy(&lay.pts);
    if nf == 0 {
        return Ok(e);
    }
    for _ in 0..opts.max_newton {
        let mut g = DVector::zeros(nf);
        let mut h = DMatrix::zeros(nf, nf);
        let mut pos = vec![usize::MAX; n];
        for (a, &p) in lay.free.iter().enumerate() {
            pos[p] = a;
        }
        for (a, &p) in lay.free.iter().enumerate() {
            for q in 0..n {
                if q == p {
                    continue;
                }
                let x = 0.5 * (lay.pts[p] - lay.pts[q]);
                let (s, c) = x.sin_cos();
                g[a] -= 0.5 * c / s;
                let csc2 = 0.25 / (s * s);
                h[(a, a)] += csc2;
                if pos[q] != usize::MAX {
                    h[(a, pos[q])] -= csc2;
                }
            }
        }
        let Some(chol) = h.cholesky() else {
            return Err(EquilibriumError::NoConvergence { residuals: vec![g.amax()] });
        };
        let d = chol.solve(&(-&g));
        // Newton decrement: predicted energy drop of the full step
        if -g.dot(&d) < opts.decrement_tol {
            return Ok(e);
        }
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let mut trial = lay.pts.clone();
            for (a, &p) in lay.free.iter().enumerate() {
                trial[p] += step * d[a];
            }
            let ordered = lay
                .free
                .iter()
                .zip(&lay.bounds)
                .all(|(&p, &(lo, hi))| trial[lo] < trial[p] && trial[p] < trial[hi]);
            if ordered {
                let et = energy(&trial);
                if et <= e {
                    lay.pts = trial;
                    e = et;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            // no descent possible at double precision
            return Ok(e);
        }
    }
    Ok(e)
}

/// Discrete energy minimizer on `arcs` with `opts.n_points` points.
pub fn equilibrium_oracle(arcs: &ArcSystem, opts: &OracleOptions) -> Result<OracleEstimate, EquilibriumError> {
    let m = arcs.len();
    let n = opts.n_points;
    if n < 2 * m + m {
        return Err(EquilibriumError::InvalidArcs("too few oracle points".into()));
    }
    let lens: Vec<f64> = arcs.arcs().map(|(l, r)| r - l).collect();
    let total: f64 = lens.iter().sum();
    let mut counts: Vec<usize> = lens
        .iter()
        .map(|l| ((l / total) * n as f64).round().max(3.0) as usize)
        .collect();
    let excess = counts.iter().sum::<usize>() as isize - n as isize;
    let big = (0..m).max_by_key(|&i| counts[i]).unwrap();
    counts[big] = (counts[big] as isize - excess) as usize;

    let mut lay = layout(arcs, &counts, None);
    let mut e = optimize(&mut lay, opts)?;
    // Move points from the arc of highest mean potential to the lowest,
    // sizing the move by a secant estimate of the potential gap per point.
    let mut slope: Option<f64> = None;
    for _ in 0..200 {
        if m < 2 {
            break;
        }
        let u = arc_potentials(&lay, &counts);
        let hi = (0..m).max_by(|&a, &b| u[a].total_cmp(&u[b])).unwrap();
        let lo = (0..m).min_by(|&a, &b| u[a].total_cmp(&u[b])).unwrap();
        let gap = u[hi] - u[lo];
        let guess = slope.map_or(1.0, |k| (gap / k).round());
        let s = (guess.max(1.0) as usize).min(counts[hi].saturating_sub(3));
        if s == 0 {
            break;
        }
        let mut trial_counts = counts.clone();
        trial_counts[hi] -= s;
        trial_counts[lo] += s;
        let warm = split(&lay.pts, &counts);
        let mut trial = layout(arcs, &trial_counts, Some(&warm));
        let et = optimize(&mut trial, opts)?;
        if et < e - 1e-13 * e.abs() {
            let u2 = arc_potentials(&trial, &trial_counts);
            let gap2 = u2[hi] - u2[lo];
            if gap2 != gap {
                let k = (gap - gap2) / s as f64;
                if k > 0.0 {
                    slope = Some(k);
                }
            }
            counts = trial_counts;
            lay = trial;
            e = et;
        } else if s > 1 {
            slope = Some(slope.unwrap_or(1.0) * 2.0);
        } else {
            break;
        }
    }
    let points = split(&lay.pts, &counts);
    let nf = n as f64;
    let arc_masses = counts.iter().map(|&c| c as f64 / nf).collect();
    let mut histogram = Vec::new();
    let mut spacing_density = Vec::new();
    for ((l, r), pts) in arcs.arcs().zip(&points) {
        let w = (r - l) / opts.bins_per_arc as f64;
        for b in 0..opts.bins_per_arc {
            let (lo, hi) = (l + w * b as f64, l + w * (b + 1) as f64);
            let last = b + 1 == opts.bins_per_arc;
            let cnt = pts.iter().filter(|&&p| p >= lo && (p < hi || (last && p <= hi))).count();
            histogram.push((lo, hi, cnt as f64 / (nf * w)));
        }
        for pair in pts.windows(2) {
            spacing_density.push((0.5 * (pair[0] + pair[1]), 1.0 / (nf * (pair[1] - pair[0]))));
        }
    }
    Ok(OracleEstimate {
        points,
        arc_masses,
        histogram,
        spacing_density,
        energy: e,
    })
}
