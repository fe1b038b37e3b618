//! Shell partitions `F_k` of `Z^d \ {0}` induced by the adjoint action.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use super::orbit::OrbitWalker;
use super::spectral::{classify, SpectralTag};
use crate::error::{Error, Result};

/// Cap on shell depth; an ergodic expanding matrix reaches it only for vectors with
/// astronomically many bits.
pub const SHELL_DEPTH_CAP: u64 = 100_000;

/// Largest k with `ξ ∈ (A*)^k Z^d`, for `|det A| > 1`.
pub fn shell_index(a: &IntMatrix, xi: &[BigInt]) -> Result<u64> {
    ExpandingShells::new(a)?.index(xi)
}

/// Membership in `(A*)^k Z^d` by repeated adjugate multiplication.
#[derive(Debug, Clone)]
pub struct ExpandingShells {
    adj_star: IntMatrix,
    det: BigInt,
}

impl ExpandingShells {
    pub fn new(a: &IntMatrix) -> Result<Self> {
        let class = classify(a);
        match class.tag {
            SpectralTag::Singular => return Err(Error::SingularMatrix),
            SpectralTag::RootOfUnityPresent => return Err(Error::NonErgodicMatrix),
            SpectralTag::ErgodicBilateral => return Err(Error::UnimodularMatrix),
            SpectralTag::ErgodicUnilateral => {}
        }
        let star = a.transpose();
        Ok(Self { adj_star: star.adjugate(), det: class.det })
    }

    /// `(A*)^{-1} ξ` when it is integral.
    pub fn pull_back(&self, xi: &[BigInt]) -> Option<Vec<BigInt>> {
        let y = self.adj_star.mul_vec(xi);
        let mut out = Vec::with_capacity(y.len());
        for v in y {
            let (q, r) = v.div_rem(&self.det);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(out)
    }

    pub fn index(&self, xi: &[BigInt]) -> Result<u64> {
        if IntMatrix::is_zero_vec(xi) {
            return Err(Error::InvalidInput("shell index of the zero vector".into()));
        }
        let mut cur = xi.to_vec();
        let mut k = 0;
        while let Some(next) = self.pull_back(&cur) {
            cur = next;
            k += 1;
            if k > SHELL_DEPTH_CAP {
                return Err(Error::Internal("shell depth cap exceeded".into()));
            }
        }
        Ok(k)
    }
}

/// Shell label of a frequency: `ξ ∈ F_k`, with the orbit representative when `|det| = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellLabel {
    pub k: i64,
    pub representative: Option<Vec<BigInt>>,
}

/// The partition `F_k`: `(A*)^k Z^d \ (A*)^{k+1} Z^d` for `|det| > 1`,
/// `(A*)^k E` for `|det| = 1`.
#[derive(Debug, Clone)]
pub enum ShellPartition {
    Expanding { matrix: IntMatrix, shells: ExpandingShells },
    Unimodular { matrix: IntMatrix, walker: OrbitWalker },
}

impl ShellPartition {
    pub fn new(a: &IntMatrix) -> Result<Self> {
        match classify(a).tag {
            SpectralTag::Singular => Err(Error::SingularMatrix),
            SpectralTag::RootOfUnityPresent => Err(Error::NonErgodicMatrix),
            SpectralTag::ErgodicUnilateral => Ok(Self::Expanding {
                matrix: a.clone(),
                shells: ExpandingShells::new(a)?,
            }),
            SpectralTag::ErgodicBilateral => Ok(Self::Unimodular {
                matrix: a.clone(),
                walker: OrbitWalker::new(&a.transpose())?,
            }),
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        match self {
            Self::Expanding { matrix, .. } | Self::Unimodular { matrix, .. } => matrix,
        }
    }

    pub fn is_bilateral(&self) -> bool {
        matches!(self, Self::Unimodular { .. })
    }

    pub fn label(&self, xi: &[BigInt]) -> Result<ShellLabel> {
        match self {
            Self::Expanding { shells, .. } => Ok(ShellLabel {
                k: shells.index(xi)? as i64,
                representative: None,
            }),
            Self::Unimodular { walker, .. } => {
                let rep = walker.representative(xi)?;
                Ok(ShellLabel { k: rep.offset, representative: Some(rep.representative) })
            }
        }
    }
}

/// Independent membership oracle for `M Z^2`: solve `M y = ξ` over the rationals.
pub fn in_lattice_2d(m: &IntMatrix, xi: &[i64; 2]) -> bool {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let det = a * d - b * c;
    let x = BigInt::from(xi[0]);
    let y = BigInt::from(xi[1]);
    // Cramer's rule
    let y1 = d * &x - b * &y;
    let y2 = a * &y - c * &x;
    (y1 % &det).is_zero() && (y2 % &det).is_zero()
}

/// Brute force: all points of `M Z^2` with `|·|_∞ <= r`, by enumerating coefficient vectors.
pub fn enumerate_lattice_2d(m: &IntMatrix, r: i64) -> Vec<[i64; 2]> {
    use num_traits::ToPrimitive;
    // |y|_∞ <= |M^{-1}|_∞ r, and |M^{-1}|_∞ <= |adj M|_∞ / |det M|.
    let det = m.det().abs();
    let adj = m.adjugate().inf_norm();
    let bound = ((adj * BigInt::from(r)) / &det + BigInt::one()).to_i64().unwrap_or(i64::MAX);
    let mut out = Vec::new();
    for y1 in -bound..=bound {
        for y2 in -bound..=bound {
            let v = m.mul_vec(&[BigInt::from(y1), BigInt::from(y2)]);
            let (Some(a), Some(b)) = (v[0].to_i64(), v[1].to_i64()) else { continue };
            if a.abs() <= r && b.abs() <= r {
                out.push([a, b]);
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix::{ball2, int_vec};
    use std::collections::BTreeSet;

    #[test]
    fn scaled_identity_shells() {
        let a = IntMatrix::from_i64([[2, 0], [0, 2]]);
        assert_eq!(shell_index(&a, &int_vec(&[8, 0])).unwrap(), 3);
        assert_eq!(shell_index(&a, &int_vec(&[4, 6])).unwrap(), 1);
        assert_eq!(shell_index(&a, &int_vec(&[3, 5])).unwrap(), 0);
    }

    #[test]
    fn unimodular_rejected() {
        let a = IntMatrix::from_i64([[1, 1], [1, 0]]);
        assert_eq!(shell_index(&a, &int_vec(&[1, 0])), Err(Error::UnimodularMatrix));
    }

    #[test]
    fn complex_expanding_matches_enumeration() {
        let a = IntMatrix::from_i64([[0, -1], [2, 0]]);
        let star = a.transpose();
        let k = shell_index(&a, &int_vec(&[1, 0])).unwrap();
        assert_eq!(k, 0);
        // every point of the ball: index equals the deepest enumerated lattice containing it
        let r = 64;
        let levels: Vec<BTreeSet<[i64; 2]>> = (0..14)
            .map(|k| enumerate_lattice_2d(&star.pow(k), r).into_iter().collect())
            .collect();
        for v in ball2(r).step_by(7) {
            let idx = shell_index(&a, &int_vec(&v)).unwrap() as usize;
            assert!(levels[idx].contains(&v), "{v:?} not in level {idx}");
            assert!(!levels[idx + 1].contains(&v), "{v:?} in level {}", idx + 1);
        }
    }

    #[test]
    fn cramer_oracle_agrees_with_enumeration() {
        let m = IntMatrix::from_i64([[2, 1], [0, 3]]);
        let pts: BTreeSet<_> = enumerate_lattice_2d(&m, 10).into_iter().collect();
        for a in -10..=10 {
            for b in -10..=10 {
                assert_eq!(pts.contains(&[a, b]), in_lattice_2d(&m, &[a, b]));
            }
        }
    }
}
