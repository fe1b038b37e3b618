use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Square matrix with arbitrary-precision integer entries, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput("matrix has no rows".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::InvalidInput(format!(
                "matrix is not square: {} rows but a row of length {}",
                dim,
                bad.len()
            )));
        }
        Ok(Self {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64<const D: usize>(rows: [[i64; D]; D]) -> Self {
        Self {
            dim: D,
            entries: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, BigInt::one())
    }

    pub fn scalar(dim: usize, s: BigInt) -> Self {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = s.clone();
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Entries as `i64` when every entry fits.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        use num_traits::ToPrimitive;
        self.entries
            .chunks(self.dim)
            .map(|r| r.iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    /// The adjoint A* (transpose; entries are real).
    pub fn transpose(&self) -> Self {
        let d = self.dim;
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                entries.push(self.get(j, i).clone());
            }
        }
        Self { dim: d, entries }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let d = self.dim;
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut acc = BigInt::zero();
                for k in 0..d {
                    acc += self.get(i, k) * other.get(k, j);
                }
                entries.push(acc);
            }
        }
        Self { dim: d, entries }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.dim, v.len(), "dimension mismatch");
        self.entries
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let d = self.dim;
        let mut m = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..d {
            if m[k * d + k].is_zero() {
                let Some(p) = (k + 1..d).find(|&i| !m[i * d + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..d {
                    m.swap(k * d + j, p * d + j);
                }
                sign = -sign;
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let v = &m[i * d + j] * &m[k * d + k] - &m[i * d + k] * &m[k * d + j];
                    m[i * d + j] = v / &prev;
                }
            }
            prev = m[k * d + k].clone();
        }
        sign * &m[d * d - 1]
    }

    /// Classical adjugate, so that `A * adj(A) = det(A) * I`.
    pub fn adjugate(&self) -> Self {
        let d = self.dim;
        if d == 1 {
            return Self::identity(1);
        }
        let mut entries = vec![BigInt::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let minor = self.minor(i, j).det();
                let cof = if (i + j) % 2 == 0 { minor } else { -minor };
                // transpose of the cofactor matrix
                entries[j * d + i] = cof;
            }
        }
        Self { dim: d, entries }
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let d = self.dim;
        let mut entries = Vec::with_capacity((d - 1) * (d - 1));
        for i in (0..d).filter(|&i| i != row) {
            for j in (0..d).filter(|&j| j != col) {
                entries.push(self.get(i, j).clone());
            }
        }
        Self { dim: d - 1, entries }
    }

    /// Exact inverse when `|det| = 1`.
    pub fn unimodular_inverse(&self) -> Result<Self> {
        let det = self.det();
        if det.abs() != BigInt::one() {
            return Err(Error::CaseNotApplicable(format!(
                "inverse is not integral (det = {det})"
            )));
        }
        let adj = self.adjugate();
        Ok(Self {
            dim: self.dim,
            entries: adj.entries.into_iter().map(|x| x * &det).collect(),
        })
    }

    /// Characteristic polynomial det(xI - A), coefficients from x^0 upward.
    /// Faddeev–LeVerrier; every division is exact over the integers.
    pub fn char_poly(&self) -> Vec<BigInt> {
        let d = self.dim;
        let mut coeffs = vec![BigInt::zero(); d + 1];
        coeffs[d] = BigInt::one();
        let mut m = Self::scalar(d, BigInt::zero());
        for k in 1..=d {
            // M_k = A M_{k-1} + c_{d-k+1} I
            let mut next = self.mul(&m);
            for i in 0..d {
                next.entries[i * d + i] += &coeffs[d - k + 1];
            }
            m = next;
            let t = self.mul(&m).trace();
            let (q, r) = t.div_rem(&BigInt::from(k));
            debug_assert!(r.is_zero());
            coeffs[d - k] = -q;
        }
        coeffs
    }

    /// Row-sum norm, used as the error growth factor of fixed-point orbits.
    pub fn inf_norm(&self) -> BigInt {
        self.entries
            .chunks(self.dim)
            .map(|r| r.iter().map(|x| x.abs()).sum::<BigInt>())
            .max()
            .unwrap_or_default()
    }

    pub fn is_zero_vec(v: &[BigInt]) -> bool {
        v.iter().all(Zero::is_zero)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.dim).enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Squared Euclidean norm of an integer vector.
pub fn norm_sq(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x * x).sum()
}

pub fn inf_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_default()
}

pub fn int_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// All nonzero integer vectors of dimension 2 with `|v|_inf <= r`, lexicographic order.
pub fn ball2(r: i64) -> impl Iterator<Item = [i64; 2]> {
    (-r..=r).flat_map(move |a| (-r..=r).map(move |b| [a, b])).filter(|v| *v != [0, 0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows).unwrap()
    }

    #[test]
    fn det_trace_adjugate() {
        let a = m(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        assert_eq!(a.det(), BigInt::from(18));
        assert_eq!(a.trace(), BigInt::from(9));
        let prod = a.mul(&a.adjugate());
        assert_eq!(prod, IntMatrix::scalar(3, a.det()));
    }

    #[test]
    fn det_needs_pivoting() {
        let a = m(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.det(), BigInt::from(-1));
        let z = m(&[vec![0, 0], vec![1, 0]]);
        assert!(z.det().is_zero());
    }

    #[test]
    fn non_square_rejected() {
        assert!(IntMatrix::from_i64_rows(&[vec![1, 2], vec![3]]).is_err());
    }

    #[test]
    fn char_poly_matches_trace_det() {
        let a = m(&[vec![1, 1], vec![1, 0]]);
        let p = a.char_poly();
        // x^2 - x - 1
        assert_eq!(p, vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
        let b = m(&[vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 5]]);
        // (x-2)(x-3)(x-5) = x^3 - 10x^2 + 31x - 30
        assert_eq!(b.char_poly(), int_vec(&[-30, 31, -10, 1]));
    }

    #[test]
    fn pow_and_inverse() {
        let a = m(&[vec![2, 1], vec![1, 1]]);
        let inv = a.unimodular_inverse().unwrap();
        assert_eq!(a.mul(&inv), IntMatrix::identity(2));
        assert_eq!(a.pow(5), a.mul(&a).mul(&a).mul(&a).mul(&a));
        assert!(m(&[vec![2, 0], vec![0, 2]]).unimodular_inverse().is_err());
    }
}
