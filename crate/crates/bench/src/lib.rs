//! Fixtures shared by the benchmarks.

use arcmarkov::tset::{analyze_admissible, single_interval_u, two_interval_u};
use arcmarkov::{ArcSystem, FastDecaySpecTrig, TSetDescriptor};

/// Three arcs with unequal gaps.
pub fn three_arcs() -> ArcSystem {
    ArcSystem::new(vec![-2.8, -2.0, -1.2, 0.3, 0.9, 2.4]).expect("valid arcs")
}

/// The single-interval T-set `[-2, 2]` and its right endpoint.
pub fn single_tset() -> (TSetDescriptor, f64) {
    let d = analyze_admissible(&single_interval_u(2.0)).expect("admissible");
    let a = d.e_set.intervals()[0].1;
    (d, a)
}

/// The two-interval T-set `{-0.3 <= cos t <= 0.7}` and its outer right
/// endpoint.
pub fn two_tset() -> (TSetDescriptor, f64) {
    let d = analyze_admissible(&two_interval_u(0.2, 0.5)).expect("admissible");
    let a = d.e_set.intervals()[1].1;
    (d, a)
}

/// A trigonometric fast-decay spec with three prescribed zeros.
pub fn trig_spec(degree: usize) -> FastDecaySpecTrig {
    FastDecaySpecTrig {
        peak: 0.0,
        peak_order: 1,
        plateau: [-0.6, 0.6],
        buffer: [-1.6, 1.6],
        zeros: vec![2.2, -2.5, 3.0],
        multiplicities: vec![1, 2, 3],
        degree,
    }
}
