//! Spectral classification of integer matrices and exact 2x2 diagonalization.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::matrix::IntMatrix;
use super::quad::{square_free_decompose, QuadElem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SpectralTag {
    RootOfUnityPresent,
    ErgodicBilateral,
    ErgodicUnilateral,
    Singular,
}

impl SpectralTag {
    pub fn is_ergodic(self) -> bool {
        matches!(self, Self::ErgodicBilateral | Self::ErgodicUnilateral)
    }
}

/// Eigenvalues of a 2x2 integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eigen2 {
    /// Real eigenvalues ordered by absolute value, `|small| <= |large|`.
    Real { small: QuadElem, large: QuadElem },
    /// Conjugate pair `(trace ± sqrt(disc)) / 2` with `disc < 0`.
    Complex { trace: BigInt, disc: BigInt },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralClass {
    pub tag: SpectralTag,
    pub trace: BigInt,
    pub det: BigInt,
    /// Cyclotomic orders `n` with `Φ_n | charpoly(A)`.
    pub cyclotomic_orders: Vec<u64>,
    pub eigen: Option<Eigen2>,
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

fn poly_trim(p: &mut Vec<BigInt>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

/// Remainder of `p` modulo the monic polynomial `m` (coefficients low to high).
pub fn poly_rem_monic(p: &[BigInt], m: &[BigInt]) -> Vec<BigInt> {
    debug_assert!(m.last().is_some_and(One::is_one));
    let mut r = p.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = r.len() - dm;
        for (i, c) in m[..dm].iter().enumerate() {
            r[shift + i] -= &lead * c;
        }
    }
    poly_trim(&mut r);
    r
}

fn poly_div_monic(p: &[BigInt], m: &[BigInt]) -> Vec<BigInt> {
    let dm = m.len() - 1;
    let mut r = p.to_vec();
    let mut q = vec![BigInt::zero(); p.len().saturating_sub(dm).max(1)];
    while r.len() > dm {
        let lead = r.pop().unwrap();
        let shift = r.len() - dm;
        for (i, c) in m[..dm].iter().enumerate() {
            r[shift + i] -= &lead * c;
        }
        q[shift] = lead;
    }
    q
}

/// Cyclotomic polynomial Φ_n, by dividing x^n - 1 by Φ_d for proper divisors d.
pub fn cyclotomic(n: u64) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = BigInt::from(-1);
    p[n as usize] = BigInt::one();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        p = poly_div_monic(&p, &cyclotomic(d));
    }
    p
}

/// Orders `n` such that some primitive n-th root of unity is an eigenvalue.
pub fn cyclotomic_factors(a: &IntMatrix) -> Vec<u64> {
    let d = a.dim() as u64;
    let cp = a.char_poly();
    // φ(n) >= sqrt(n/2), so φ(n) <= d forces n <= 2 d^2
    (1..=2 * d * d + 2)
        .filter(|&n| totient(n) <= d)
        .filter(|&n| poly_rem_monic(&cp, &cyclotomic(n)).iter().all(Zero::is_zero))
        .collect()
}

fn eigen2(a: &IntMatrix) -> Result<Eigen2> {
    let tr = a.trace();
    let det = a.det();
    let disc = &tr * &tr - BigInt::from(4) * &det;
    if disc.is_negative() {
        return Ok(Eigen2::Complex { trace: tr, disc });
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let tr_q = BigRational::from_integer(tr.clone());
    let (lam1, lam2) = if disc.is_zero() {
        let l = QuadElem::rational(&tr_q * &half, &BigInt::one());
        (l.clone(), l)
    } else {
        let (s, d) = square_free_decompose(&disc);
        let s_half = BigRational::from_integer(s) * &half;
        let a_part = &tr_q * &half;
        (
            QuadElem::new(a_part.clone(), s_half.clone(), d.clone()),
            QuadElem::new(a_part, -s_half, d),
        )
    };
    let (small, large) = if lam1.abs() >= lam2.abs() { (lam2, lam1) } else { (lam1, lam2) };
    Ok(Eigen2::Real { small, large })
}

pub fn classify(a: &IntMatrix) -> SpectralClass {
    let det = a.det();
    let trace = a.trace();
    let eigen = if a.dim() == 2 { eigen2(a).ok() } else { None };
    if det.is_zero() {
        return SpectralClass {
            tag: SpectralTag::Singular,
            trace,
            det,
            cyclotomic_orders: Vec::new(),
            eigen,
        };
    }
    let orders = cyclotomic_factors(a);
    let tag = if !orders.is_empty() {
        SpectralTag::RootOfUnityPresent
    } else if det.abs().is_one() {
        SpectralTag::ErgodicBilateral
    } else {
        SpectralTag::ErgodicUnilateral
    };
    SpectralClass { tag, trace, det, cyclotomic_orders: orders, eigen }
}

/// Root-of-unity test for 2x2 matrices from trace and determinant alone.
/// Used as an independent cross-check of the cyclotomic route.
pub fn has_root_of_unity_2x2(trace: i64, det: i64) -> bool {
    match det {
        1 => trace.abs() <= 2,
        -1 => trace == 0,
        _ => 1 - trace + det == 0 || 1 + trace + det == 0,
    }
}

/// Exact diagonalization `S A = D S` with `D = diag(μ, λ)`, `|μ| < 1 < |λ|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagonalizer {
    /// Rows of S: left eigenvectors for μ and λ.
    pub s: [[QuadElem; 2]; 2],
    pub lambda: QuadElem,
    pub mu: QuadElem,
    pub radicand: BigInt,
}

impl Diagonalizer {
    /// `S ξ` for an integer vector.
    pub fn apply(&self, xi: &[BigInt]) -> [QuadElem; 2] {
        let row = |r: &[QuadElem; 2]| &r[0].scale_int(&xi[0]) + &r[1].scale_int(&xi[1]);
        [row(&self.s[0]), row(&self.s[1])]
    }

    /// `|S ξ|_∞`.
    pub fn s_norm(&self, xi: &[BigInt]) -> QuadElem {
        let [e1, e2] = self.apply(xi);
        e1.abs().max(e2.abs())
    }
}

fn left_eigenvector(a: &IntMatrix, mu: &QuadElem) -> [QuadElem; 2] {
    let d = mu.radicand().clone();
    let (a11, a12, a21, a22) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    if !a21.is_zero() {
        [QuadElem::from_int(a21, &d), mu - &QuadElem::from_int(a11, &d)]
    } else {
        [mu - &QuadElem::from_int(a22, &d), QuadElem::from_int(a12, &d)]
    }
}

pub fn diagonalizer(a: &IntMatrix) -> Result<Diagonalizer> {
    if a.dim() != 2 {
        return Err(Error::CaseNotApplicable("diagonalizer requires d = 2".into()));
    }
    let class = classify(a);
    if class.tag != SpectralTag::ErgodicBilateral {
        return Err(Error::CaseNotApplicable(format!(
            "diagonalizer requires an ergodic unimodular matrix, got {:?}",
            class.tag
        )));
    }
    match eigen2(a)? {
        Eigen2::Complex { .. } => Err(Error::CaseNotApplicable("complex eigenvalues".into())),
        Eigen2::Real { small, large } => {
            let radicand = large.radicand().clone();
            let s = [left_eigenvector(a, &small), left_eigenvector(a, &large)];
            Ok(Diagonalizer { s, lambda: large, mu: small, radicand })
        }
    }
}

/// `S A` and `D S` as QuadElem matrices (for exact verification).
pub fn check_diagonalization(a: &IntMatrix, diag: &Diagonalizer) -> bool {
    let d = &diag.radicand;
    let entry = |i: usize, j: usize| QuadElem::from_int(a.get(i, j), d);
    (0..2).all(|r| {
        let ev = if r == 0 { &diag.mu } else { &diag.lambda };
        (0..2).all(|c| {
            let sa = &(&diag.s[r][0] * &entry(0, c)) + &(&diag.s[r][1] * &entry(1, c));
            let ds = ev * &diag.s[r][c];
            sa == ds
        })
    })
}

/// The square-free radicand shared by the eigenvalues, if they are real irrational.
pub fn irrational_radicand(a: &IntMatrix) -> Result<BigInt> {
    match eigen2(a)? {
        Eigen2::Complex { .. } => Err(Error::CaseNotApplicable("complex eigenvalues".into())),
        Eigen2::Real { large, .. } => {
            if large.is_rational() {
                Err(Error::RationalEigenvalue)
            } else {
                Ok(large.radicand().clone())
            }
        }
    }
}

/// Eigenvalues of a 2x2 matrix.
pub fn eigenvalues2(a: &IntMatrix) -> Result<Eigen2> {
    if a.dim() != 2 {
        return Err(Error::CaseNotApplicable("eigenvalues2 requires d = 2".into()));
    }
    eigen2(a)
}
