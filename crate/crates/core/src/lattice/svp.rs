//! Finite-sample check of the growth hypothesis `|A^k ξ| >= c q^{|k|}` on a set E.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::matrix::{norm_sq, IntMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct SvpFit {
    pub c: f64,
    pub q: f64,
    /// True iff a rate `q > 1` fits with `c > 0`.
    pub holds: bool,
    pub bilateral: bool,
    /// `min_{ξ∈E} |A^k ξ|^2` for `|k| = 0..=k_max` (minimum over both signs when bilateral).
    #[serde(serialize_with = "crate::io::ser_display_vec")]
    pub min_norm_sq: Vec<BigInt>,
}

/// Natural log of a positive big integer, accurate to f64 precision.
pub fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        use num_traits::ToPrimitive;
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    use num_traits::ToPrimitive;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Fits `(c, q)`: `q` from the growth of the per-|k| minima over the upper half of
/// the k-range, then `c` as the largest constant consistent with every sample.
pub fn verify_svp(a: &IntMatrix, e: &[Vec<BigInt>], k_max: u32) -> Result<SvpFit> {
    let det = a.det();
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    if e.is_empty() || e.iter().any(|v| v.len() != a.dim() || IntMatrix::is_zero_vec(v)) {
        return Err(Error::InvalidInput("E must be a non-empty set of nonzero vectors".into()));
    }
    let bilateral = det.abs().is_one();
    let inverse = if bilateral { Some(a.unimodular_inverse()?) } else { None };

    let mut min_norm_sq: Vec<BigInt> = Vec::with_capacity(k_max as usize + 1);
    let mut fwd: Vec<Vec<BigInt>> = e.to_vec();
    let mut bwd: Vec<Vec<BigInt>> = e.to_vec();
    for k in 0..=k_max {
        let mut m = fwd.iter().map(|v| norm_sq(v)).min().expect("non-empty");
        if k > 0 && inverse.is_some() {
            let mb = bwd.iter().map(|v| norm_sq(v)).min().expect("non-empty");
            m = m.min(mb);
        }
        min_norm_sq.push(m);
        fwd = fwd.iter().map(|v| a.mul_vec(v)).collect();
        if let Some(inv) = &inverse {
            bwd = bwd.iter().map(|v| inv.mul_vec(v)).collect();
        }
    }

    let log_norm: Vec<f64> = min_norm_sq.iter().map(|n| 0.5 * ln_big(n)).collect();
    let k_top = k_max as usize;
    let k_lo = k_top / 2;
    let q = if k_top > k_lo {
        ((log_norm[k_top] - log_norm[k_lo]) / (k_top - k_lo) as f64).exp()
    } else {
        1.0
    };
    let c = log_norm
        .iter()
        .enumerate()
        .map(|(k, l)| (l - k as f64 * q.ln()).exp())
        .fold(f64::INFINITY, f64::min);
    Ok(SvpFit { c, q, holds: q > 1.0 + 1e-9 && c > 0.0, bilateral, min_norm_sq })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix::int_vec;
    use crate::lattice::orbit::{representatives_in_ball, OrbitWalker};

    #[test]
    fn expansive_diagonal() {
        let a = IntMatrix::from_i64([[2, 0], [0, 3]]);
        let fit = verify_svp(&a, &[int_vec(&[1, 0]), int_vec(&[0, 1])], 10).unwrap();
        assert!(fit.holds);
        assert!(fit.q >= 2.0 - 1e-12, "{}", fit.q);
        assert!(!fit.bilateral);
    }

    #[test]
    fn fibonacci_representatives() {
        let a = IntMatrix::from_i64([[1, 1], [1, 0]]);
        let walker = OrbitWalker::new(&a).unwrap();
        let e: Vec<_> = representatives_in_ball(&walker, 10)
            .unwrap()
            .iter()
            .map(|v| int_vec(v))
            .collect();
        let fit = verify_svp(&a, &e, 12).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(fit.holds);
        assert!((fit.q - phi).abs() / phi < 0.01, "q = {}", fit.q);
    }

    #[test]
    fn root_of_unity_fails() {
        let rot = IntMatrix::from_i64([[0, -1], [1, 0]]);
        let fit = verify_svp(&rot, &[int_vec(&[1, 0]), int_vec(&[1, 1])], 8).unwrap();
        assert!(!fit.holds);
        let mixed = IntMatrix::from_i64([[1, 0], [0, 2]]);
        let fit = verify_svp(&mixed, &[int_vec(&[1, 0]), int_vec(&[0, 1])], 8).unwrap();
        assert!(!fit.holds);
    }
}
