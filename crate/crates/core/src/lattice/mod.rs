//! Exact integer-lattice engine for toral endomorphisms.
//!
//! Everything here is exact: big integers, rationals and elements of a real
//! quadratic field. Floating point appears only in the fitted constants reported
//! back to callers.

pub mod dirichlet;
pub mod matrix;
pub mod orbit;
pub mod quad;
pub mod reduction;
pub mod shell;
pub mod spectral;
pub mod svp;

pub use dirichlet::{dirichlet_bound, DirichletBound};
pub use matrix::IntMatrix;
pub use orbit::{orbit_representative, rep_growth, OrbitRep, OrbitWalker, RepGrowth};
pub use quad::QuadElem;
pub use reduction::{delta_growth, DeltaGrowth};
pub use shell::{shell_index, ShellLabel, ShellPartition};
pub use spectral::{classify, diagonalizer, Diagonalizer, SpectralClass, SpectralTag};
pub use svp::{verify_svp, SvpFit};
