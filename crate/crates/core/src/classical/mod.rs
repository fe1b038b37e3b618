//! The baker's transformation on dyadic points with the product Walsh system, and the
//! Laguerre shift on exact rational polynomials.

pub mod laguerre;
pub mod walsh;

pub use laguerre::{
    laguerre_mean_check, laguerre_mean_poly, laguerre_orbit_sums, laguerre_pointwise_rate, laguerre_poly, laguerre_shift,
    LaguerreCoeffs, LaguerreMeanCheck, LaguerrePoly, LAGUERRE_DEGREE_CAP,
};
pub use walsh::{
    baker_apply, baker_formula, baker_orbit_sums, baker_rate_series, rademacher, shift_expansion, walsh_eval,
    walsh_eval_rational, walsh_shift_check, walsh_shift_check_against, DyadicPoint, WalshExpansion, WalshIndexSet,
};
