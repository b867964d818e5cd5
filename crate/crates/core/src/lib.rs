// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod composition;
pub mod equilibrium;
pub mod fastdecay;
pub mod ineqlab;
pub mod miranda;
pub mod poly;
pub mod quadrature;
pub mod tset;

pub use composition::{CompositionError, PartitionTerm};
pub use fastdecay::{FastDecayError, FastDecayResult, FastDecaySpecAlg, FastDecaySpecTrig};
pub use equilibrium::{ArcSystem, EndpointFactor, EquilibriumError, EquilibriumMeasure};
pub use poly::{AlgPoly, ChebSeries, IntervalSet, PolyError, SupNorm, TrigPoly};
pub use tset::{TSetDescriptor, TSetError};
