//! Laguerre polynomials, the shift `Tf(x) = f(x) − ∫_0^x f` on `L^2(R_+, e^{-x} dx)` and its
//! ergodic means.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::ser_display;
use crate::rate::RateSeries;

/// Largest polynomial degree reached by the pointwise rate computation.
pub const LAGUERRE_DEGREE_CAP: usize = 1 << 14;

/// Polynomial with exact rational coefficients in the monomial basis (no trailing zeros).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaguerrePoly {
    coeffs: Vec<BigRational>,
}

/// Laguerre coefficients `n ↦ c_n` of `f = Σ c_n L_n`.
pub type LaguerreCoeffs = BTreeMap<usize, BigRational>;

impl LaguerrePoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::new(vec![BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Self, i: usize| p.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
        Self::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `⟨p, q⟩ = ∫_0^∞ p q e^{-x} dx = Σ p_i q_j (i+j)!`.
    pub fn inner(&self, other: &Self) -> BigRational {
        let n = self.coeffs.len() + other.coeffs.len();
        let mut fact = vec![BigInt::one(); n.max(1)];
        for k in 1..n {
            fact[k] = &fact[k - 1] * BigInt::from(k);
        }
        let mut s = BigRational::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                s += a * b * &fact[i + j];
            }
        }
        s
    }

    pub fn norm_sq(&self) -> BigRational {
        self.inner(self)
    }

    /// Polynomial of `Σ c_n L_n`.
    pub fn from_laguerre(coeffs: &LaguerreCoeffs) -> Self {
        coeffs
            .iter()
            .fold(Self::zero(), |acc, (&n, c)| acc.add(&laguerre_poly(n).scale(c)))
    }
}

/// `L_n(x) = Σ_k binom(n,k) (−1)^k / k! x^k`.
pub fn laguerre_poly(n: usize) -> LaguerrePoly {
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut binom = BigInt::one();
    let mut fact = BigInt::one();
    for k in 0..=n {
        if k > 0 {
            binom = binom * BigInt::from(n + 1 - k) / BigInt::from(k);
            fact *= BigInt::from(k);
        }
        let sign = if k % 2 == 0 { binom.clone() } else { -binom.clone() };
        coeffs.push(BigRational::new(sign, fact.clone()));
    }
    LaguerrePoly::new(coeffs)
}

/// `Tp(x) = p(x) − ∫_0^x p(y) dy`.
pub fn laguerre_shift(p: &LaguerrePoly) -> LaguerrePoly {
    let mut out = p.coeffs.clone();
    out.push(BigRational::zero());
    for (k, c) in p.coeffs.iter().enumerate() {
        out[k + 1] -= c / BigInt::from(k + 1);
    }
    LaguerrePoly::new(out)
}

/// `U_N p = N^{-1} Σ_{n<N} T^n p` by iterating the shift.
pub fn laguerre_mean_poly(p: &LaguerrePoly, n: u64) -> Result<LaguerrePoly> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be >= 1".into()));
    }
    let deg = p.degree().unwrap_or(0) as u64 + n - 1;
    if deg > LAGUERRE_DEGREE_CAP as u64 {
        return Err(Error::DegreeCap { degree: deg as usize, cap: LAGUERRE_DEGREE_CAP });
    }
    let mut acc = LaguerrePoly::zero();
    let mut cur = p.clone();
    for i in 0..n {
        acc = acc.add(&cur);
        if i + 1 < n {
            cur = laguerre_shift(&cur);
        }
    }
    Ok(acc.scale(&BigRational::new(BigInt::one(), BigInt::from(n))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaguerreMeanCheck {
    pub n: u64,
    /// `‖U_N f‖^2` by moment pairing.
    #[serde(serialize_with = "ser_display")]
    pub lhs_sq: BigRational,
    /// `(N^{-1/2} Σ_k |c_k|)^2`.
    #[serde(serialize_with = "ser_display")]
    pub rhs_sq: BigRational,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub equality: bool,
}

/// `‖U_N f‖ <= N^{-1/2} Σ_k ‖Π_k f‖` for `f = Σ c_k L_k`, decided on squares.
pub fn laguerre_mean_check(coeffs: &LaguerreCoeffs, n: u64) -> Result<LaguerreMeanCheck> {
    let f = LaguerrePoly::from_laguerre(coeffs);
    let lhs_sq = laguerre_mean_poly(&f, n)?.norm_sq();
    let l1 = coeffs.values().fold(BigRational::zero(), |s, c| s + c.abs());
    let rhs_sq = &l1 * &l1 / BigInt::from(n);
    let sq = |q: &BigRational| q.to_f64().unwrap_or(f64::NAN).sqrt();
    Ok(LaguerreMeanCheck {
        n,
        lhs: sq(&lhs_sq),
        rhs: sq(&rhs_sq),
        holds: lhs_sq <= rhs_sq,
        equality: lhs_sq == rhs_sq,
        lhs_sq,
        rhs_sq,
    })
}

/// Exact `Σ_{n<N} T^n f(x) = Σ_m c_m (S_{m+N} − S_m)` with `S_j = Σ_{i<j} L_i(x)`, at each checkpoint.
///
/// `L_i(p/q)` is carried as the integer `P_i = i! q^i L_i(p/q)` through
/// `P_{i+1} = ((2i+1)q − p) P_i − i^2 q^2 P_{i−1}`.
pub fn laguerre_orbit_sums(coeffs: &LaguerreCoeffs, x: &BigRational, grid: &[u64]) -> Result<Vec<(u64, BigRational)>> {
    if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("checkpoint grid must be positive and strictly increasing".into()));
    }
    if x.is_negative() {
        return Err(Error::InvalidInput("Laguerre points lie in [0, ∞)".into()));
    }
    let terms: Vec<(usize, &BigRational)> = coeffs.iter().filter(|(_, c)| !c.is_zero()).map(|(&m, c)| (m, c)).collect();
    if terms.is_empty() {
        return Ok(grid.iter().map(|&n| (n, BigRational::zero())).collect());
    }
    let deg = terms.last().expect("non-empty").0;
    let n_max = *grid.last().expect("non-empty") as usize;
    let top = deg + n_max;
    if top - 1 > LAGUERRE_DEGREE_CAP {
        return Err(Error::DegreeCap { degree: top - 1, cap: LAGUERRE_DEGREE_CAP });
    }
    let mut wanted: BTreeMap<usize, BigRational> = BTreeMap::new();
    for &(m, _) in &terms {
        wanted.insert(m, BigRational::zero());
        for &n in grid {
            wanted.insert(m + n as usize, BigRational::zero());
        }
    }
    let (p, q) = (x.numer().clone(), x.denom().clone());
    // S_j = acc / den with den = (j−1)! q^{j−1}
    let mut acc = BigInt::zero();
    let mut den = BigInt::one();
    let mut prev = BigInt::zero();
    let mut cur = BigInt::one();
    for j in 0..=top {
        if let Some(slot) = wanted.get_mut(&j) {
            *slot = BigRational::new(acc.clone(), den.clone());
        }
        if j == top {
            break;
        }
        // fold L_j into the running sum
        if j == 0 {
            acc = cur.clone();
        } else {
            let scale = BigInt::from(j) * &q;
            acc = acc * &scale + &cur;
            den *= scale;
        }
        let i = BigInt::from(j);
        let next = (BigInt::from(2 * j + 1) * &q - &p) * &cur - &i * &i * &q * &q * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(grid
        .iter()
        .map(|&n| {
            let s = terms.iter().fold(BigRational::zero(), |s, &(m, c)| {
                s + c * (&wanted[&(m + n as usize)] - &wanted[&m])
            });
            (n, s)
        })
        .collect())
}

/// `|N^{-1} Σ_{n<N} T^n f(x)|` weighted on the checkpoint grid.
pub fn laguerre_pointwise_rate(coeffs: &LaguerreCoeffs, x: &BigRational, eta: f64, grid: &[u64]) -> Result<RateSeries> {
    let sums = laguerre_orbit_sums(coeffs, x, grid)?;
    Ok(RateSeries::from_deviations(
        eta,
        sums.into_iter()
            .map(|(n, s)| (n, (s / BigInt::from(n)).abs().to_f64().unwrap_or(f64::NAN))),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::coeff::real;
    use crate::shift::{norm_bound_check, CoeffVector, ShiftKind};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn lc(pairs: &[(usize, BigRational)]) -> LaguerreCoeffs {
        pairs.iter().cloned().collect()
    }

    #[test]
    fn low_degree() {
        assert_eq!(laguerre_poly(0), LaguerrePoly::one());
        assert_eq!(laguerre_poly(1), LaguerrePoly::new(vec![q(1, 1), q(-1, 1)]));
        assert_eq!(laguerre_poly(2), LaguerrePoly::new(vec![q(1, 1), q(-2, 1), q(1, 2)]));
        for n in 0..20 {
            let l = laguerre_poly(n);
            assert_eq!(l.degree(), Some(n));
            assert_eq!(l.coeffs()[0], q(1, 1));
        }
    }

    #[test]
    fn orthonormal_by_moments() {
        let ls: Vec<LaguerrePoly> = (0..=15).map(laguerre_poly).collect();
        for (m, a) in ls.iter().enumerate() {
            for (n, b) in ls.iter().enumerate() {
                assert_eq!(a.inner(b), if m == n { q(1, 1) } else { q(0, 1) });
            }
        }
    }

    #[test]
    fn shift_identity() {
        assert_eq!(laguerre_shift(&LaguerrePoly::one()), laguerre_poly(1));
        assert!(laguerre_shift(&LaguerrePoly::zero()).is_zero());
        for n in 0..=30 {
            assert_eq!(laguerre_shift(&laguerre_poly(n)), laguerre_poly(n + 1), "n = {n}");
        }
    }

    #[test]
    fn shift_is_isometry_on_span() {
        let f = LaguerrePoly::new((0..=15).map(|k| q(k as i64 - 7, k as i64 + 2)).collect());
        let g = LaguerrePoly::from_laguerre(&lc(&[(3, q(2, 3)), (15, q(-1, 5))]));
        assert_eq!(laguerre_shift(&f).inner(&laguerre_shift(&g)), f.inner(&g));
        assert_eq!(laguerre_shift(&f).norm_sq(), f.norm_sq());
    }

    #[test]
    fn mean_check_examples() {
        let r = laguerre_mean_check(&lc(&[(0, q(1, 1))]), 4).unwrap();
        assert_eq!((r.lhs_sq.clone(), r.rhs_sq.clone()), (q(1, 4), q(1, 4)));
        assert!(r.holds && r.equality);
        let r = laguerre_mean_check(&lc(&[(0, q(1, 1)), (7, q(1, 1))]), 4).unwrap();
        assert_eq!((r.lhs_sq.clone(), r.rhs_sq.clone()), (q(1, 2), q(1, 1)));
        assert!(r.holds && !r.equality);
        let r = laguerre_mean_check(&LaguerreCoeffs::new(), 4).unwrap();
        assert!(r.holds && r.lhs_sq.is_zero() && r.rhs_sq.is_zero());
    }

    #[test]
    fn mean_check_agrees_with_coefficient_model() {
        let c = lc(&[(0, q(1, 2)), (1, q(-2, 3)), (4, q(3, 7)), (5, q(1, 1))]);
        let mut v = CoeffVector::new(ShiftKind::Unilateral);
        for (&m, a) in &c {
            v.set(0, m as i64, real(a.clone())).unwrap();
        }
        for n in [1, 2, 3, 5, 8] {
            let r = laguerre_mean_check(&c, n).unwrap();
            let b = norm_bound_check(&v, n).unwrap();
            assert_eq!(r.lhs_sq, b.lhs_sq);
            assert!(r.holds && b.holds);
        }
    }

    #[test]
    fn recurrence_matches_polynomial_iteration() {
        let c = lc(&[(0, q(1, 1)), (2, q(-1, 3))]);
        let x = q(7, 5);
        let grid: Vec<u64> = (1..=24).collect();
        let sums = laguerre_orbit_sums(&c, &x, &grid).unwrap();
        let f = LaguerrePoly::from_laguerre(&c);
        for (n, s) in sums {
            let direct = laguerre_mean_poly(&f, n).unwrap().eval(&x) * BigInt::from(n);
            assert_eq!(s, direct, "N = {n}");
        }
    }

    #[test]
    fn zero_function_rate() {
        let r = laguerre_pointwise_rate(&LaguerreCoeffs::new(), &q(1, 1), 0.5, &[2, 4, 8]).unwrap();
        assert!(r.points.iter().all(|p| p.deviation == 0.0));
    }

    #[test]
    fn l0_at_one_envelope() {
        let r = laguerre_pointwise_rate(&lc(&[(0, q(1, 1))]), &q(1, 1), 0.5, &crate::rate::default_grid(1 << 10)).unwrap();
        assert!(r.envelope_statistic() < 1.0, "{}", r.envelope_statistic());
    }

    #[test]
    fn linearity() {
        let x = q(3, 2);
        let grid = crate::rate::default_grid(256);
        let s0 = laguerre_orbit_sums(&lc(&[(0, q(1, 1))]), &x, &grid).unwrap();
        let s1 = laguerre_orbit_sums(&lc(&[(1, q(1, 1))]), &x, &grid).unwrap();
        let both = laguerre_orbit_sums(&lc(&[(0, q(1, 1)), (1, q(1, 2))]), &x, &grid).unwrap();
        for i in 0..grid.len() {
            assert_eq!(both[i].1, &s0[i].1 + &s1[i].1 / BigInt::from(2));
        }
    }

    #[test]
    fn degree_cap() {
        let err = laguerre_orbit_sums(&lc(&[(5, q(1, 1))]), &q(1, 1), &[LAGUERRE_DEGREE_CAP as u64]).unwrap_err();
        assert!(matches!(err, Error::DegreeCap { .. }));
    }

    proptest! {
        #[test]
        fn mean_bound_holds(cs in proptest::collection::btree_map(0usize..12, (-20i64..20, 1i64..9), 0..6), n in 1u64..12) {
            let c: LaguerreCoeffs = cs.into_iter().map(|(k, (a, b))| (k, q(a, b))).collect();
            let r = laguerre_mean_check(&c, n).unwrap();
            prop_assert!(r.holds);
            let single = c.values().filter(|v| !v.is_zero()).count() <= 1;
            prop_assert_eq!(r.equality, single);
        }
    }
}
