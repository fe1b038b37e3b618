//! Speed of convergence of ergodic means for shift operators.
//!
//! * [`lattice`]: exact integer-lattice engine for toral endomorphisms.
//! * [`shift`]: abstract coefficient-space shifts, ergodic means and maximal comparisons.
//! * [`torus`]: pointwise averages on the torus, rate profiles and discrepancy.
//! * [`classical`]: the baker/Walsh and Laguerre shifts.
//! * [`battery`]: the fixed acceptance battery shared by the test suite and the CLI.

pub mod battery;
pub mod classical;
pub mod error;
pub mod io;
pub mod lattice;
pub mod prime;
pub mod rate;
pub mod shift;
pub mod torus;

pub use error::{Error, Result};
