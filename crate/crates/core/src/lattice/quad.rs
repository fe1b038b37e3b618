//! Exact arithmetic in a real quadratic field Q(√D).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `a + b√d` with rational `a`, `b` and square-free radicand `d >= 1`.
///
/// `d = 1` encodes the rational field; in that case `b` is always folded into `a`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadElem {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

impl QuadElem {
    pub fn new(a: BigRational, b: BigRational, d: BigInt) -> Self {
        assert!(d.is_positive(), "radicand must be positive");
        if d.is_one() {
            return Self { a: a + b, b: BigRational::zero(), d };
        }
        Self { a, b, d }
    }

    pub fn rational(a: BigRational, d: &BigInt) -> Self {
        Self::new(a, BigRational::zero(), d.clone())
    }

    pub fn from_int(n: &BigInt, d: &BigInt) -> Self {
        Self::rational(BigRational::from_integer(n.clone()), d)
    }

    pub fn zero(d: &BigInt) -> Self {
        Self::rational(BigRational::zero(), d)
    }

    pub fn one(d: &BigInt) -> Self {
        Self::rational(BigRational::one(), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn radical_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        Self { a: self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    /// Field norm `a^2 - d b^2`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.clone())
    }

    pub fn inverse(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        let n = self.norm();
        Self { a: &self.a / &n, b: -&self.b / &n, d: self.d.clone() }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self { a: &self.a * s, b: &self.b * s, d: self.d.clone() }
    }

    pub fn scale_int(&self, s: &BigInt) -> Self {
        let s = BigRational::from_integer(s.clone());
        self.scale(&s)
    }

    /// Sign decided by integer comparisons only.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        match (sa, sb) {
            (_, Ordering::Equal) => sa,
            (Ordering::Equal, _) => sb,
            _ if sa == sb => sa,
            _ => {
                let a2 = &self.a * &self.a;
                let b2d = &self.b * &self.b * BigRational::from_integer(self.d.clone());
                // a^2 == b^2 d is impossible for square-free d > 1
                if a2 > b2d {
                    sa
                } else {
                    sb
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.d);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        a + b * d.sqrt()
    }

    fn check_field(&self, other: &Self) {
        assert!(
            self.d == other.d || self.b.is_zero() || other.b.is_zero(),
            "mixing Q(√{}) and Q(√{})",
            self.d,
            other.d
        );
    }

    fn field_of(&self, other: &Self) -> BigInt {
        if self.b.is_zero() {
            other.d.clone()
        } else {
            self.d.clone()
        }
    }
}

impl Ord for QuadElem {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl PartialOrd for QuadElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;
    fn add(self, rhs: &QuadElem) -> QuadElem {
        self.check_field(rhs);
        QuadElem::new(&self.a + &rhs.a, &self.b + &rhs.b, self.field_of(rhs))
    }
}

impl<'a> Sub<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;
    fn sub(self, rhs: &QuadElem) -> QuadElem {
        self.check_field(rhs);
        QuadElem::new(&self.a - &rhs.a, &self.b - &rhs.b, self.field_of(rhs))
    }
}

impl<'a> Mul<&'a QuadElem> for &'a QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: &QuadElem) -> QuadElem {
        self.check_field(rhs);
        let d = self.field_of(rhs);
        let dq = BigRational::from_integer(d.clone());
        let a = &self.a * &rhs.a + &self.b * &rhs.b * dq;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QuadElem::new(a, b, d)
    }
}

impl Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem { a: -self.a, b: -self.b, d: self.d }
    }
}

impl fmt::Debug for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

/// Writes `n = s^2 * d` with `d` square-free; returns `(s, d)`. `n` must be positive.
///
/// Trial division runs up to the cube root of `n`; whatever cofactor remains has at
/// most two prime factors and is square-free unless it is a perfect square.
pub fn square_free_decompose(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "square-free decomposition of non-positive value");
    let mut rest = n.clone();
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let limit = n.cbrt() + 1u32;
    let mut p = BigInt::from(2u32);
    while p <= limit && p.clone() * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            square *= &p;
        }
        if e % 2 == 1 {
            free *= &p;
        }
        p += if p == BigInt::from(2u32) { 1u32 } else { 2u32 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        square *= r;
    } else {
        free *= rest;
    }
    (square, free)
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn golden() -> QuadElem {
        QuadElem::new(q(1, 2), q(1, 2), 5.into())
    }

    #[test]
    fn golden_ratio_identities() {
        let phi = golden();
        // phi^2 = phi + 1
        assert_eq!(&phi * &phi, &phi + &QuadElem::one(&5.into()));
        let inv = phi.inverse();
        assert_eq!(&phi * &inv, QuadElem::one(&5.into()));
        assert!((phi.to_f64() - 1.618_033_988_749_895).abs() < 1e-15);
    }

    #[test]
    fn exact_sign() {
        // 3 - sqrt(5)*4/3 : 9 vs 80/9 -> positive
        let x = QuadElem::new(q(3, 1), q(-4, 3), 5.into());
        assert_eq!(x.signum(), Ordering::Greater);
        let y = QuadElem::new(q(3, 1), q(-3, 2), 5.into());
        assert_eq!(y.signum(), Ordering::Less);
        assert!(golden() > QuadElem::one(&5.into()));
    }

    #[test]
    fn square_free_parts() {
        let cases = [(20, 2, 5), (5, 1, 5), (72, 6, 2), (49, 7, 1), (1, 1, 1), (13 * 13 * 11, 13, 11)];
        for (n, s, d) in cases {
            assert_eq!(square_free_decompose(&BigInt::from(n)), (BigInt::from(s), BigInt::from(d)), "{n}");
        }
    }
}
