//! Abstract shifts with identity unitary part: ergodic means, projections,
//! norm bounds and maximal comparisons.

pub mod coeff;
pub mod maximal;

pub use coeff::{
    apply_shift, banach_witness, banach_witness_ratio, ergodic_mean, norm_bound_check,
    projection_norms, CoeffVector, NormBound, ProjectionNorms, Scalar, ShiftKind,
};
pub use maximal::{
    kronecker_limit, rm_rhs, weighted_maximal_pair, weighted_maximal_pair_table, MaximalPair, RmRhs, WeightFunction,
};
