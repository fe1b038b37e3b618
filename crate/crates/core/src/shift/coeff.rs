//! Coefficient-space model of a shift with identity unitary part.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact complex scalar with rational parts.
pub type Scalar = Complex<BigRational>;

pub fn real(q: BigRational) -> Scalar {
    Complex::new(q, BigRational::zero())
}

pub fn abs_sq(z: &Scalar) -> BigRational {
    &z.re * &z.re + &z.im * &z.im
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftKind {
    Unilateral,
    Bilateral,
}

/// `f = Σ f̂(j,k) φ_{j,k} + fixed_part`, where `fixed_part` is the component on
/// which the operator acts as the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffVector {
    kind: ShiftKind,
    amps: BTreeMap<(u32, i64), Scalar>,
    fixed_part: Scalar,
}

impl CoeffVector {
    pub fn new(kind: ShiftKind) -> Self {
        Self { kind, amps: BTreeMap::new(), fixed_part: Scalar::zero() }
    }

    pub fn kind(&self) -> ShiftKind {
        self.kind
    }

    pub fn fixed_part(&self) -> &Scalar {
        &self.fixed_part
    }

    pub fn set_fixed_part(&mut self, c: Scalar) {
        self.fixed_part = c;
    }

    pub fn with_fixed_part(mut self, c: Scalar) -> Self {
        self.fixed_part = c;
        self
    }

    /// Nonzero amplitudes in `(j, k)` order.
    pub fn amps(&self) -> &BTreeMap<(u32, i64), Scalar> {
        &self.amps
    }

    pub fn get(&self, j: u32, k: i64) -> Scalar {
        self.amps.get(&(j, k)).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Sets the amplitude at `(j, k)`; a zero amplitude removes the entry.
    pub fn set(&mut self, j: u32, k: i64, amp: Scalar) -> Result<()> {
        if k < 0 && self.kind == ShiftKind::Unilateral {
            return Err(Error::InvalidInput(format!(
                "unilateral shift has no index k = {k}"
            )));
        }
        if amp.is_zero() {
            self.amps.remove(&(j, k));
        } else {
            self.amps.insert((j, k), amp);
        }
        Ok(())
    }

    pub fn with(mut self, j: u32, k: i64, amp: Scalar) -> Result<Self> {
        self.set(j, k, amp)?;
        Ok(self)
    }

    fn add_at(&mut self, j: u32, k: i64, amp: &Scalar) {
        let e = self.amps.entry((j, k)).or_insert_with(Scalar::zero);
        *e = &*e + amp;
        if e.is_zero() {
            self.amps.remove(&(j, k));
        }
    }

    pub fn norm_sq(&self) -> BigRational {
        self.amps.values().map(abs_sq).fold(abs_sq(&self.fixed_part), |s, x| s + x)
    }

    /// `⟨self, other⟩`, linear in the first argument.
    pub fn inner(&self, other: &Self) -> Scalar {
        let mut acc = &self.fixed_part * other.fixed_part.conj();
        for (key, a) in &self.amps {
            if let Some(b) = other.amps.get(key) {
                acc += a * b.conj();
            }
        }
        acc
    }

    /// Shell indices carrying a nonzero amplitude.
    pub fn support_shells(&self) -> Vec<i64> {
        let mut ks: Vec<i64> = self.amps.keys().map(|&(_, k)| k).collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    pub fn is_single_shell(&self) -> bool {
        self.support_shells().len() == 1
    }

    /// Same vector with the fixed part removed.
    pub fn moving_part(&self) -> Self {
        Self { kind: self.kind, amps: self.amps.clone(), fixed_part: Scalar::zero() }
    }
}

/// `T φ_{j,k} = φ_{j,k+1}`, identity on the fixed part.
pub fn apply_shift(v: &CoeffVector) -> CoeffVector {
    CoeffVector {
        kind: v.kind,
        amps: v.amps.iter().map(|(&(j, k), a)| ((j, k + 1), a.clone())).collect(),
        fixed_part: v.fixed_part.clone(),
    }
}

/// `U_N v = N^{-1} Σ_{n<N} T^n v`, exact.
pub fn ergodic_mean(v: &CoeffVector, n: u64) -> Result<CoeffVector> {
    if n == 0 {
        return Err(Error::InvalidInput("ergodic mean needs N >= 1".into()));
    }
    let inv = real(BigRational::new(BigInt::one(), BigInt::from(n)));
    let mut out = CoeffVector::new(v.kind).with_fixed_part(v.fixed_part.clone());
    for (&(j, k), a) in &v.amps {
        let scaled = a * &inv;
        for step in 0..n as i64 {
            out.add_at(j, k + step, &scaled);
        }
    }
    Ok(out)
}

/// Squared shell norms `‖Π_k v‖^2`, exact.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionNorms {
    pub sq: BTreeMap<i64, BigRational>,
}

impl ProjectionNorms {
    pub fn norm(&self, k: i64) -> f64 {
        self.sq.get(&k).and_then(|q| q.to_f64()).unwrap_or(0.0).sqrt()
    }

    pub fn total_sq(&self) -> BigRational {
        self.sq.values().fold(BigRational::zero(), |s, x| s + x)
    }

    /// `Σ_k ‖Π_k v‖` in floating point.
    pub fn sum(&self) -> f64 {
        self.sq.values().map(|q| q.to_f64().unwrap_or(f64::NAN).sqrt()).sum()
    }
}

pub fn projection_norms(v: &CoeffVector) -> ProjectionNorms {
    let mut sq = BTreeMap::new();
    for (&(_, k), a) in &v.amps {
        let e = sq.entry(k).or_insert_with(BigRational::zero);
        *e += abs_sq(a);
    }
    ProjectionNorms { sq }
}

/// Outcome of `‖U_N v − fixed‖ <= N^{-1/2} Σ_k ‖Π_k v‖`.
#[derive(Debug, Clone, Serialize)]
pub struct NormBound {
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs^2`, exact.
    #[serde(serialize_with = "crate::io::ser_display")]
    pub lhs_sq: BigRational,
    /// Decided exactly.
    pub holds: bool,
    /// Support lies in a single shell.
    pub sharp: bool,
    /// `lhs = rhs` exactly.
    pub equality: bool,
}

/// Amplitudes scaled to Gaussian integers by a common denominator.
struct IntegerForm {
    denom: BigInt,
    by_j: BTreeMap<u32, Vec<(i64, BigInt, BigInt)>>,
}

fn integer_form(v: &CoeffVector) -> IntegerForm {
    let denom = v
        .amps
        .values()
        .flat_map(|a| [a.re.denom(), a.im.denom()])
        .fold(BigInt::one(), |l, d| l.lcm(d));
    let mut by_j: BTreeMap<u32, Vec<_>> = BTreeMap::new();
    for (&(j, k), a) in &v.amps {
        let re = a.re.numer() * (&denom / a.re.denom());
        let im = a.im.numer() * (&denom / a.im.denom());
        by_j.entry(j).or_default().push((k, re, im));
    }
    IntegerForm { denom, by_j }
}

/// `G = Σ_j Σ_{k,k'} Re(a_{jk} conj(a_{jk'})) (N − |k − k'|)_+` on the integer form,
/// so that `‖U_N v − fixed‖^2 = G / (N D)^2`.
fn gram_sum(form: &IntegerForm, n: u64) -> BigInt {
    let n = n as i128;
    let mut g = BigInt::zero();
    for entries in form.by_j.values() {
        for (k1, r1, i1) in entries {
            for (k2, r2, i2) in entries {
                let overlap = n - (*k1 as i128 - *k2 as i128).abs();
                if overlap > 0 {
                    g += (r1 * r2 + i1 * i2) * BigInt::from(overlap);
                }
            }
        }
    }
    g
}

/// Decides `g <= (Σ_k √q_k)^2` exactly by refining integer square-root brackets.
fn le_sum_sqrt_sq(g: &BigInt, qs: &[BigInt]) -> Result<bool> {
    for bits in (16u64..=4096).step_by(48) {
        let scale = BigInt::one() << (2 * bits);
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for q in qs {
            let r = (q * &scale).sqrt();
            hi += &r + 1;
            lo += r;
        }
        // √q_k ∈ [r/2^bits, (r+1)/2^bits]
        let g_scaled = g * &scale;
        if g_scaled <= &lo * &lo {
            return Ok(true);
        }
        if g_scaled > &hi * &hi {
            return Ok(false);
        }
    }
    Err(Error::PrecisionExhausted("norm-bound comparison undecided at 4096 bits".into()))
}

pub fn norm_bound_check(v: &CoeffVector, n: u64) -> Result<NormBound> {
    if n == 0 {
        return Err(Error::InvalidInput("norm bound needs N >= 1".into()));
    }
    let form = integer_form(v);
    let g = gram_sum(&form, n);
    let mut shell_sq: BTreeMap<i64, BigInt> = BTreeMap::new();
    for entries in form.by_j.values() {
        for (k, re, im) in entries {
            *shell_sq.entry(*k).or_insert_with(BigInt::zero) += re * re + im * im;
        }
    }
    let qs: Vec<BigInt> = shell_sq.into_values().collect();
    let nn = BigInt::from(n);
    let d_sq = &form.denom * &form.denom;
    let lhs_sq = BigRational::new(g.clone(), &nn * &nn * &d_sq);
    let rhs_sq_terms: Vec<f64> = qs
        .iter()
        .map(|q| BigRational::new(q.clone(), d_sq.clone()).to_f64().unwrap_or(f64::NAN).sqrt())
        .collect();
    let rhs = rhs_sq_terms.iter().sum::<f64>() / (n as f64).sqrt();
    let lhs = lhs_sq.to_f64().unwrap_or(f64::NAN).sqrt();

    // lhs <= rhs  <=>  G <= N (Σ_k √Q_k)^2
    let (holds, equality) = match qs.len() {
        0 => (true, true),
        1 => {
            let bound = &nn * &qs[0];
            (g <= bound, g == bound)
        }
        _ => {
            let scaled: Vec<BigInt> = qs.iter().map(|q| q * &nn).collect();
            // g and N·Q are both integers, so N(Σ√Q_k)^2 = (Σ√(N Q_k))^2
            (le_sum_sqrt_sq(&g, &scaled)?, false)
        }
    };
    Ok(NormBound { n, lhs, rhs, lhs_sq, holds, sharp: qs.len() == 1, equality })
}

/// `‖U_N f_H‖^2 / ‖f_H‖^2` for `f_H = Σ_{k=0}^{H} φ_{0,k}`, exact.
pub fn banach_witness(h: u64, n: u64) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidInput("banach witness needs N >= 1".into()));
    }
    let len = h + 1;
    let span = n.min(len);
    // Σ_Δ (N − |Δ|)(H + 1 − |Δ|) over |Δ| < min(N, H + 1)
    let mut total = BigInt::from(n) * BigInt::from(len);
    for d in 1..span {
        total += BigInt::from(2u32) * BigInt::from(n - d) * BigInt::from(len - d);
    }
    let nn = BigInt::from(n);
    Ok(BigRational::new(total, &nn * &nn * BigInt::from(len)))
}

/// Witness ratio `‖U_N f_H‖ / ‖f_H‖` in floating point.
pub fn banach_witness_ratio(h: u64, n: u64) -> Result<f64> {
    Ok(banach_witness(h, n)?.to_f64().unwrap_or(f64::NAN).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn r(n: i64) -> Scalar {
        real(q(n, 1))
    }

    fn unit(k: i64) -> CoeffVector {
        CoeffVector::new(ShiftKind::Unilateral).with(0, k, r(1)).unwrap()
    }

    #[test]
    fn shift_moves_index() {
        let v = apply_shift(&unit(0));
        assert_eq!(v, unit(1));
        let c = CoeffVector::new(ShiftKind::Bilateral).with_fixed_part(r(3));
        assert_eq!(apply_shift(&c), c);
    }

    #[test]
    fn unilateral_rejects_negative_index() {
        assert!(CoeffVector::new(ShiftKind::Unilateral).with(0, -1, r(1)).is_err());
        assert!(CoeffVector::new(ShiftKind::Bilateral).with(0, -1, r(1)).is_ok());
    }

    #[test]
    fn mean_of_single_block() {
        let m = ergodic_mean(&unit(0), 4).unwrap();
        for k in 0..4 {
            assert_eq!(m.get(0, k), real(q(1, 4)));
        }
        assert_eq!(m.amps().len(), 4);
        assert_eq!(m.norm_sq(), q(1, 4));
    }

    #[test]
    fn mean_of_fixed_part_is_identity() {
        let c = CoeffVector::new(ShiftKind::Unilateral).with_fixed_part(r(7));
        assert_eq!(ergodic_mean(&c, 9).unwrap(), c);
    }

    #[test]
    fn disjoint_blocks() {
        let v = unit(0).with(0, 5, r(1)).unwrap();
        assert_eq!(ergodic_mean(&v, 4).unwrap().norm_sq(), q(1, 2));
        let b = norm_bound_check(&v, 4).unwrap();
        assert_eq!(b.lhs_sq, q(1, 2));
        assert!(b.holds && !b.sharp && !b.equality);
        assert!((b.rhs - 1.0).abs() < 1e-15);
    }

    #[test]
    fn projection_norm_examples() {
        let v = CoeffVector::new(ShiftKind::Unilateral)
            .with(0, 0, r(3))
            .unwrap()
            .with(1, 0, r(4))
            .unwrap();
        let p = projection_norms(&v);
        assert_eq!(p.sq.len(), 1);
        assert_eq!(p.sq[&0], q(25, 1));
        let w = unit(0).with(0, 5, r(1)).unwrap();
        let p = projection_norms(&w);
        assert_eq!((p.sq[&0].clone(), p.sq[&5].clone()), (q(1, 1), q(1, 1)));
    }

    #[test]
    fn single_shell_is_sharp() {
        for n in [1, 2, 3, 16, 100] {
            let b = norm_bound_check(&unit(0), n).unwrap();
            assert!(b.sharp && b.equality && b.holds);
            assert_eq!(b.lhs_sq, q(1, n as i64));
        }
        let zero = CoeffVector::new(ShiftKind::Bilateral).with_fixed_part(r(2));
        let b = norm_bound_check(&zero, 5).unwrap();
        assert!(b.holds && b.lhs == 0.0 && b.rhs == 0.0);
    }

    #[test]
    fn witness_examples() {
        assert_eq!(banach_witness(1, 2).unwrap(), q(3, 4));
        assert_eq!(banach_witness(17, 1).unwrap(), q(1, 1));
        let rs: Vec<_> = [4, 40, 400].iter().map(|&h| banach_witness(h, 4).unwrap()).collect();
        assert!(rs[0] < rs[1] && rs[1] < rs[2] && rs[2] < q(1, 1));
    }

    #[test]
    fn witness_deficit_closed_form() {
        // 1 − ratio^2 = (N^2 − 1) / (3 N (H + 1)) once H + 1 >= N
        for n in 1..8u64 {
            for h in (n - 1)..40 {
                let deficit = q(1, 1) - banach_witness(h, n).unwrap();
                let expect = BigRational::new(
                    BigInt::from(n * n - 1),
                    BigInt::from(3 * n * (h + 1)),
                );
                assert_eq!(deficit, expect, "n={n} h={h}");
            }
        }
        for n in [2u64, 4, 16] {
            let ratio = banach_witness_ratio(1_000_000 * n, n).unwrap();
            assert!(1.0 - ratio < 1e-6);
        }
    }

    #[test]
    fn witness_matches_materialized_mean() {
        for h in 0..6 {
            for n in 1..6 {
                let mut f = CoeffVector::new(ShiftKind::Unilateral);
                for k in 0..=h {
                    f.set(0, k, r(1)).unwrap();
                }
                let ratio = ergodic_mean(&f, n).unwrap().norm_sq() / f.norm_sq();
                assert_eq!(ratio, banach_witness(h as u64, n).unwrap());
            }
        }
    }

    fn arb_vector(kind: ShiftKind) -> impl Strategy<Value = CoeffVector> {
        let lo = if kind == ShiftKind::Unilateral { 0i64 } else { -6 };
        (
            prop::collection::vec((0u32..3, lo..12i64, -9i64..10, 1i64..7, -9i64..10, 1i64..7), 0..12),
            -5i64..6,
        )
            .prop_map(move |(entries, fixed)| {
                let mut v = CoeffVector::new(kind).with_fixed_part(r(fixed));
                for (j, k, a, b, c, d) in entries {
                    v.set(j, k, Complex::new(q(a, b), q(c, d))).unwrap();
                }
                v
            })
    }

    proptest! {
        #[test]
        fn isometry(v in arb_vector(ShiftKind::Bilateral)) {
            prop_assert_eq!(apply_shift(&v).norm_sq(), v.norm_sq());
        }

        #[test]
        fn mean_identity(v in arb_vector(ShiftKind::Unilateral)) {
            prop_assert_eq!(ergodic_mean(&v, 1).unwrap(), v);
        }

        #[test]
        fn parseval(v in arb_vector(ShiftKind::Bilateral)) {
            let p = projection_norms(&v);
            prop_assert_eq!(p.total_sq() + abs_sq(v.fixed_part()), v.norm_sq());
        }

        #[test]
        fn gram_matches_materialized(v in arb_vector(ShiftKind::Bilateral), n in 1u64..9) {
            let b = norm_bound_check(&v, n).unwrap();
            let direct = ergodic_mean(&v.moving_part(), n).unwrap().norm_sq();
            prop_assert_eq!(b.lhs_sq, direct);
        }

        #[test]
        fn norm_bound(v in arb_vector(ShiftKind::Unilateral), e in 0u32..8) {
            let b = norm_bound_check(&v, 1 << e).unwrap();
            prop_assert!(b.holds);
            prop_assert!(b.lhs <= b.rhs * (1.0 + 1e-12) + 1e-300);
            prop_assert_eq!(b.equality, v.support_shells().len() <= 1);
        }

        #[test]
        fn wandering_orthogonality(
            v in arb_vector(ShiftKind::Unilateral),
            w in arb_vector(ShiftKind::Unilateral),
            m in 0usize..5,
            n in 0usize..5,
        ) {
            prop_assume!(m != n);
            let shell0 = |x: &CoeffVector| {
                let mut out = CoeffVector::new(ShiftKind::Unilateral);
                for (&(j, k), a) in x.amps() {
                    if k == 0 {
                        out.set(j, 0, a.clone()).unwrap();
                    }
                }
                out
            };
            let mut tv = shell0(&v);
            let mut tw = shell0(&w);
            for _ in 0..m { tv = apply_shift(&tv); }
            for _ in 0..n { tw = apply_shift(&tw); }
            prop_assert!(tv.inner(&tw).is_zero());
        }
    }
}
