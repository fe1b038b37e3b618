//! Exact Gauss–Lagrange reduction and the growth of `δ_k = min |A^k Z^2 \ {0}|`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::matrix::{norm_sq, IntMatrix};
use super::shell::in_lattice_2d;
use super::spectral::{classify, SpectralTag};
use crate::error::{Error, Result};

fn dot(u: &[BigInt; 2], v: &[BigInt; 2]) -> BigInt {
    &u[0] * &v[0] + &u[1] * &v[1]
}

/// Nearest integer to `n / d` (d > 0), ties toward +∞.
fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (n * &two + d).div_floor(&(d * two))
}

/// Reduced basis `(u, v)` with `|u| <= |v|` and `|u·v| <= |u|^2 / 2`;
/// `u` is a shortest nonzero lattice vector.
pub fn lagrange_reduce(mut u: [BigInt; 2], mut v: [BigInt; 2]) -> ([BigInt; 2], [BigInt; 2]) {
    if norm_sq(&u) > norm_sq(&v) {
        std::mem::swap(&mut u, &mut v);
    }
    loop {
        let uu = norm_sq(&u);
        if uu.is_zero() {
            return (u, v);
        }
        let m = round_div(&dot(&u, &v), &uu);
        let w = [&v[0] - &m * &u[0], &v[1] - &m * &u[1]];
        if norm_sq(&w) >= uu {
            return (u, w);
        }
        v = u;
        u = w;
    }
}

/// Exact squared shortest vector of `M Z^2` (M nonsingular).
pub fn shortest_sq(m: &IntMatrix) -> BigInt {
    let u = [m.get(0, 0).clone(), m.get(1, 0).clone()];
    let v = [m.get(0, 1).clone(), m.get(1, 1).clone()];
    let (u, _) = lagrange_reduce(u, v);
    norm_sq(&u)
}

#[derive(Debug, Clone)]
pub struct DeltaGrowth {
    /// `δ_k^2` for k = 0..=k_max, exact.
    pub delta_sq: Vec<BigInt>,
    /// `δ_k^2 |det A|^{-k}`, exact.
    pub normalized: Vec<BigRational>,
}

impl DeltaGrowth {
    pub fn min_normalized(&self) -> &BigRational {
        self.normalized.iter().min().expect("k_max >= 0")
    }
}

pub fn delta_growth(a: &IntMatrix, k_max: u32) -> Result<DeltaGrowth> {
    if a.dim() != 2 {
        return Err(Error::CaseNotApplicable("delta_growth requires d = 2".into()));
    }
    match classify(a).tag {
        SpectralTag::Singular => return Err(Error::SingularMatrix),
        SpectralTag::RootOfUnityPresent => return Err(Error::NonErgodicMatrix),
        SpectralTag::ErgodicBilateral => return Err(Error::UnimodularMatrix),
        SpectralTag::ErgodicUnilateral => {}
    }
    let det = a.det().abs();
    let mut power = IntMatrix::identity(2);
    let mut det_pow = BigInt::from(1);
    let mut delta_sq = Vec::new();
    let mut normalized = Vec::new();
    for _ in 0..=k_max {
        let s = shortest_sq(&power);
        normalized.push(BigRational::new(s.clone(), det_pow.clone()));
        delta_sq.push(s);
        power = power.mul(a);
        det_pow *= &det;
    }
    Ok(DeltaGrowth { delta_sq, normalized })
}

/// Brute-force shortest vector of `M Z^2` over `|y|_∞ <= bound`, or `None` if the
/// search box exceeds `budget` points.
pub fn brute_force_shortest_sq(m: &IntMatrix, bound: i64, budget: u64) -> Option<BigInt> {
    let side = (2 * bound + 1) as u64;
    if side.saturating_mul(side) > budget {
        return None;
    }
    let mut best: Option<BigInt> = None;
    for a in -bound..=bound {
        for b in -bound..=bound {
            if (a, b) == (0, 0) || !in_lattice_2d(m, &[a, b]) {
                continue;
            }
            let n = BigInt::from(a * a + b * b);
            if best.as_ref().is_none_or(|x| n < *x) {
                best = Some(n);
            }
        }
    }
    best
}

/// Search radius `4·δ` for the brute-force check of a given `δ^2`.
pub fn brute_force_bound(delta_sq: &BigInt) -> Option<i64> {
    let d: BigInt = delta_sq.sqrt() + 1;
    (d * 4u32).to_i64().filter(|b: &i64| *b > 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_identity() {
        let g = delta_growth(&IntMatrix::from_i64([[2, 0], [0, 2]]), 10).unwrap();
        for (k, d) in g.delta_sq.iter().enumerate() {
            assert_eq!(*d, BigInt::from(4u64.pow(k as u32)));
        }
    }

    #[test]
    fn complex_pair_growth() {
        let a = IntMatrix::from_i64([[0, -1], [2, 0]]);
        let g = delta_growth(&a, 6).unwrap();
        assert_eq!(g.delta_sq[0], BigInt::from(1));
        assert_eq!(g.delta_sq[2], BigInt::from(4));
        assert_eq!(g.delta_sq[4], BigInt::from(16));
        let bf = brute_force_shortest_sq(&a, 8, 1_000_000).unwrap();
        assert_eq!(g.delta_sq[1], bf);
        assert!(g.min_normalized() > &BigRational::zero());
    }

    #[test]
    fn reduction_matches_brute_force() {
        let a = IntMatrix::from_i64([[3, 1], [1, 2]]);
        let g = delta_growth(&a, 6).unwrap();
        let mut p = IntMatrix::identity(2);
        for d in &g.delta_sq {
            if let Some(b) = brute_force_bound(d) {
                if let Some(bf) = brute_force_shortest_sq(&p, b, 4_000_000) {
                    assert_eq!(*d, bf);
                }
            }
            p = p.mul(&a);
        }
    }

    #[test]
    fn rejects_unimodular() {
        assert!(delta_growth(&IntMatrix::from_i64([[1, 1], [1, 0]]), 3).is_err());
    }
}
