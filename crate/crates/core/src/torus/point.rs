//! Points of `T^d` and their orbits under `x ↦ A x mod 1`.

use std::collections::HashMap;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice::IntMatrix;
use crate::prime::random_prime;

/// Accumulated error budget for fixed-point orbits: `2^{-32}`.
pub const FIXED_POINT_ERROR_BITS: u64 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TorusPoint {
    /// `x = num / den`, with `0 <= num_i < den`.
    Rational { num: Vec<BigInt>, den: BigInt },
    /// `x = mant / 2^bits`, with `|x − true point| <= err / 2^bits` per coordinate.
    FixedPoint { bits: u64, mant: Vec<BigInt>, err: BigInt },
}

impl TorusPoint {
    pub fn rational(num: Vec<BigInt>, den: BigInt) -> Result<Self> {
        if !den.is_positive() {
            return Err(Error::InvalidInput("denominator must be positive".into()));
        }
        let num = num.into_iter().map(|p| p.mod_floor(&den)).collect();
        Ok(Self::Rational { num, den })
    }

    pub fn rational_i64(num: &[i64], den: i64) -> Result<Self> {
        Self::rational(num.iter().map(|&p| BigInt::from(p)).collect(), BigInt::from(den))
    }

    /// Fixed-point approximation of a real point with a one-unit initial error bound.
    pub fn fixed_from_f64(x: &[f64], bits: u64) -> Result<Self> {
        if bits > 1000 {
            return Err(Error::InvalidInput("fixed-point width above 1000 bits".into()));
        }
        let modulus = BigInt::one() << bits;
        let mut mant = Vec::with_capacity(x.len());
        for &v in x {
            if !v.is_finite() {
                return Err(Error::InvalidInput("non-finite coordinate".into()));
            }
            let frac = v - v.floor();
            // f64 has 53 significant bits; exact up to that, then zero-padded
            let scaled = (frac * 2f64.powi(53)).round() as u64;
            let m = if bits >= 53 {
                BigInt::from(scaled) << (bits - 53)
            } else {
                BigInt::from(scaled) >> (53 - bits)
            };
            mant.push(m.mod_floor(&modulus));
        }
        Ok(Self::FixedPoint { bits, mant, err: BigInt::one() })
    }

    /// Random point with a random `bits`-bit prime denominator.
    pub fn random_generic<R: Rng + ?Sized>(dim: usize, bits: u64, rng: &mut R) -> Self {
        let q = BigInt::from(random_prime(bits, rng));
        Self::random_with_denominator(dim, &q, rng)
    }

    /// Random point with the given denominator.
    pub fn random_with_denominator<R: Rng + ?Sized>(dim: usize, q: &BigInt, rng: &mut R) -> Self {
        use num_bigint::RandBigInt;
        let num = (0..dim).map(|_| rng.gen_bigint_range(&BigInt::zero(), q)).collect();
        Self::Rational { num, den: q.clone() }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Rational { num, .. } => num.len(),
            Self::FixedPoint { mant, .. } => mant.len(),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Self::Rational { .. })
    }

    /// `A x mod 1`.
    pub fn apply(&self, a: &IntMatrix) -> Result<Self> {
        if a.dim() != self.dim() {
            return Err(Error::InvalidInput("matrix and point dimensions differ".into()));
        }
        match self {
            Self::Rational { num, den } => Ok(Self::Rational {
                num: a.mul_vec(num).into_iter().map(|v| v.mod_floor(den)).collect(),
                den: den.clone(),
            }),
            Self::FixedPoint { bits, mant, err } => {
                let modulus = BigInt::one() << *bits;
                let err = err * a.inf_norm();
                if err.bits() + FIXED_POINT_ERROR_BITS > *bits {
                    return Err(Error::PrecisionExhausted(format!(
                        "fixed-point error exceeds 2^-{FIXED_POINT_ERROR_BITS} at {bits} bits"
                    )));
                }
                Ok(Self::FixedPoint {
                    bits: *bits,
                    mant: a.mul_vec(mant).into_iter().map(|v| v.mod_floor(&modulus)).collect(),
                    err,
                })
            }
        }
    }

    /// Coordinates rounded to f64.
    pub fn to_f64(&self) -> Vec<f64> {
        self.phases().iter().map(|&p| phase_to_f64(p)).collect()
    }

    /// Coordinates as 128-bit binary fractions, truncated toward zero.
    pub fn phases(&self) -> Vec<u128> {
        match self {
            Self::Rational { num, den } => num.iter().map(|p| frac128(p, den)).collect(),
            Self::FixedPoint { bits, mant, .. } => mant
                .iter()
                .map(|m| {
                    let v = if *bits >= 128 { m >> (*bits - 128) } else { m << (128 - *bits) };
                    low_u128(&v)
                })
                .collect(),
        }
    }

    /// Upper bound on `|x_i − true x_i|` of the stored coordinates.
    pub fn coordinate_error(&self) -> f64 {
        match self {
            Self::Rational { .. } => 0.0,
            Self::FixedPoint { bits, err, .. } => {
                err.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-(*bits as i32))
            }
        }
    }
}

fn low_u128(v: &BigInt) -> u128 {
    let (_, digits) = v.to_u64_digits();
    let lo = digits.first().copied().unwrap_or(0) as u128;
    let hi = digits.get(1).copied().unwrap_or(0) as u128;
    debug_assert!(v.sign() != Sign::Minus);
    lo | (hi << 64)
}

/// `floor(p · 2^128 / q)` for `0 <= p < q`.
pub fn frac128(p: &BigInt, q: &BigInt) -> u128 {
    low_u128(&((p << 128u32) / q))
}

/// A 128-bit binary fraction as f64 in `[0, 1)`.
pub fn phase_to_f64(p: u128) -> f64 {
    ((p >> 75) as f64) * 2f64.powi(-53)
}

/// `(ξ · x) mod 1` as a 128-bit fraction, for small integer frequencies.
pub fn dot_phase(xi: &[i64], phases: &[u128]) -> u128 {
    xi.iter()
        .zip(phases)
        .fold(0u128, |acc, (&k, &p)| acc.wrapping_add((k as i128 as u128).wrapping_mul(p)))
}

/// Result of iterating a point.
#[derive(Debug, Clone)]
pub struct OrbitTrace {
    pub points: Vec<TorusPoint>,
    /// Smallest `n >= 1` with `x_{m+n} = x_m` for some m, if one occurred among the
    /// computed points (rational mode only).
    pub period: Option<u64>,
}

/// Streams the orbit `x, Ax, A^2x, ...`, detecting revisits in rational mode.
pub struct OrbitStepper {
    a: IntMatrix,
    current: TorusPoint,
    index: u64,
    start: Option<TorusPoint>,
    bijective: bool,
    seen: Option<HashMap<TorusPoint, u64>>,
    period: Option<u64>,
}

impl OrbitStepper {
    pub fn new(a: &IntMatrix, x: &TorusPoint) -> Result<Self> {
        if a.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        if a.dim() != x.dim() {
            return Err(Error::InvalidInput("matrix and point dimensions differ".into()));
        }
        // A is a bijection mod q iff gcd(det A, q) = 1; then orbits are purely periodic
        let bijective = match x {
            TorusPoint::Rational { den, .. } => a.det().gcd(den).is_one(),
            TorusPoint::FixedPoint { .. } => true,
        };
        let seen = (x.is_rational() && !bijective).then(|| HashMap::from([(x.clone(), 0)]));
        Ok(Self {
            a: a.clone(),
            current: x.clone(),
            index: 0,
            start: x.is_rational().then(|| x.clone()),
            bijective,
            seen,
            period: None,
        })
    }

    pub fn current(&self) -> &TorusPoint {
        &self.current
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn period(&self) -> Option<u64> {
        self.period
    }

    /// Advances to the next orbit point.
    pub fn step(&mut self) -> Result<&TorusPoint> {
        self.current = self.current.apply(&self.a)?;
        self.index += 1;
        if self.period.is_none() {
            if self.bijective {
                if self.start.as_ref() == Some(&self.current) {
                    self.period = Some(self.index);
                }
            } else if let Some(seen) = &mut self.seen {
                if let Some(first) = seen.insert(self.current.clone(), self.index) {
                    self.period = Some(self.index - first);
                }
            }
        }
        Ok(&self.current)
    }
}

/// The first `n` orbit points `x_0 .. x_{n-1}`.
pub fn orbit_points(a: &IntMatrix, x: &TorusPoint, n: u64) -> Result<OrbitTrace> {
    let mut stepper = OrbitStepper::new(a, x)?;
    let mut points = Vec::with_capacity(n as usize);
    if n > 0 {
        points.push(x.clone());
    }
    for _ in 1..n {
        points.push(stepper.step()?.clone());
    }
    Ok(OrbitTrace { points, period: stepper.period() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn doubling_thirds() {
        let a = IntMatrix::from_i64([[2]]);
        let x = TorusPoint::rational_i64(&[1], 3).unwrap();
        let t = orbit_points(&a, &x, 5).unwrap();
        assert_eq!(t.period, Some(2));
        let nums: Vec<_> = t
            .points
            .iter()
            .map(|p| match p {
                TorusPoint::Rational { num, .. } => num[0].to_i64().unwrap(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(nums, vec![1, 2, 1, 2, 1]);
    }

    #[test]
    fn non_bijective_preperiod() {
        // 2x mod 1 on x = 1/12: 1/12, 1/6, 1/3, 2/3, 1/3, ...
        let a = IntMatrix::from_i64([[2]]);
        let x = TorusPoint::rational_i64(&[1], 12).unwrap();
        assert_eq!(orbit_points(&a, &x, 8).unwrap().period, Some(2));
        assert_eq!(orbit_points(&a, &x, 4).unwrap().period, None);
    }

    #[test]
    fn fixed_point_origin() {
        let a = IntMatrix::from_i64([[1, 1], [1, 0]]);
        let x = TorusPoint::rational_i64(&[0, 0], 1).unwrap();
        let t = orbit_points(&a, &x, 10).unwrap();
        assert!(t.points.iter().all(|p| *p == x));
        assert_eq!(t.period, Some(1));
    }

    #[test]
    fn rational_orbit_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = IntMatrix::from_i64([[2, 1], [1, 1]]);
        let x = TorusPoint::random_generic(2, 128, &mut rng);
        let t = orbit_points(&a, &x, 200).unwrap();
        assert_eq!(t.period, None);
        for w in t.points.windows(2) {
            let (TorusPoint::Rational { num: p, den }, TorusPoint::Rational { num: q, .. }) = (&w[0], &w[1])
            else {
                unreachable!()
            };
            let ap = a.mul_vec(p);
            for (u, v) in ap.iter().zip(q) {
                assert!(((u - v) % den).is_zero());
            }
        }
    }

    #[test]
    fn fixed_point_budget() {
        let a = IntMatrix::from_i64([[2, 1], [1, 1]]);
        let x = TorusPoint::fixed_from_f64(&[0.1, 0.7], 96).unwrap();
        // error grows by |A|_∞ = 3 per step: 96 − 32 = 64 bits last about 40 steps
        let t = orbit_points(&a, &x, 40);
        assert!(t.is_ok());
        let err = orbit_points(&a, &x, 60).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted(_)));
    }

    #[test]
    fn fixed_and_rational_agree() {
        let a = IntMatrix::from_i64([[1, 1], [1, 0]]);
        let x = TorusPoint::rational_i64(&[1, 3], 8).unwrap();
        let y = TorusPoint::fixed_from_f64(&[0.125, 0.375], 200).unwrap();
        let tx = orbit_points(&a, &x, 30).unwrap();
        let ty = orbit_points(&a, &y, 30).unwrap();
        for (p, q) in tx.points.iter().zip(&ty.points) {
            assert_eq!(p.phases(), q.phases());
        }
    }

    #[test]
    fn phase_arithmetic() {
        let half = 1u128 << 127;
        assert_eq!(phase_to_f64(half), 0.5);
        assert_eq!(dot_phase(&[2], &[half]), 0);
        assert_eq!(dot_phase(&[-1], &[half]), half);
        assert_eq!(frac128(&BigInt::from(1), &BigInt::from(4)), 1u128 << 126);
    }
}
