//! Pointwise ergodic averages of toral endomorphisms, rate profiles, moduli of continuity
//! and orbit discrepancy of domains.

pub mod domain;
pub mod fourier;
pub mod mean;
pub mod modulus;
pub mod point;

pub use domain::{boundary_shell_measure, indicator_discrepancy, Discrepancy, DomainIndicator, ShellEstimate};
pub use fourier::{log_weight_sum, log_weight_sum_pow, CompiledFunction, Evaluation, FourierFunction};
pub use mean::{
    centered_norm, pointwise_mean, projection_norm_sum, rate_series, spectral_mean, MeanEstimate, ProjectionNormSum,
    ToralRate, FREQUENCY_BUDGET_BITS, MEAN_TOLERANCE,
};
pub use modulus::{dyadic_modulus_bound, modulus_of_continuity, modulus_profile, DisplacementSampler, DyadicBound, ModulusEstimate};
pub use point::{orbit_points, OrbitStepper, OrbitTrace, TorusPoint};
