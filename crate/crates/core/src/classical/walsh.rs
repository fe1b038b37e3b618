//! Rademacher and Walsh functions on the unit square and the baker's transformation as a
//! two-sided bit shift.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rate::RateSeries;

/// `r_k(x) = sgn sin(2^k π x)` for rational `x`, `k >= 1`.
pub fn rademacher(k: u32, x: &BigRational) -> Result<i8> {
    if k == 0 {
        return Err(Error::InvalidInput("Rademacher index starts at 1".into()));
    }
    let t = x * BigRational::from_integer(BigInt::one() << k);
    if t.is_integer() {
        return Err(Error::NullSetPoint);
    }
    Ok(if t.floor().to_integer().is_even() { 1 } else { -1 })
}

/// A point of the unit square given by finite binary windows
/// `x = 0.x_1 x_2 ... x_W`, `y = 0.y_1 y_2 ... y_V` (exact dyadic rationals).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicPoint {
    x: VecDeque<bool>,
    y: VecDeque<bool>,
    /// Position of the last 1 bit in each window.
    x_last: Option<usize>,
    y_last: Option<usize>,
}

fn last_one(bits: &VecDeque<bool>) -> Option<usize> {
    bits.iter().rposition(|&b| b)
}

fn bits_to_rational(bits: &VecDeque<bool>) -> BigRational {
    let mut num = BigInt::zero();
    for &b in bits {
        num <<= 1;
        if b {
            num += 1;
        }
    }
    BigRational::new(num, BigInt::one() << bits.len())
}

impl DyadicPoint {
    pub fn from_bits(x: Vec<bool>, y: Vec<bool>) -> Self {
        let (x, y): (VecDeque<bool>, VecDeque<bool>) = (x.into(), y.into());
        Self { x_last: last_one(&x), y_last: last_one(&y), x, y }
    }

    /// Exact dyadic rationals in `[0, 1)`.
    pub fn from_rationals(x: &BigRational, y: &BigRational) -> Result<Self> {
        let bits = |v: &BigRational| -> Result<Vec<bool>> {
            if v.is_negative() || *v >= BigRational::one() {
                return Err(Error::InvalidInput("coordinates must lie in [0, 1)".into()));
            }
            let den = v.denom();
            if den.bits() == 0 || (den & (den - 1u32)) != BigInt::zero() {
                return Err(Error::InvalidInput("coordinates must be dyadic rationals".into()));
            }
            let w = den.bits() - 1;
            let num = v.numer();
            Ok((0..w).rev().map(|i| num.bit(i)).collect())
        };
        Ok(Self::from_bits(bits(x)?, bits(y)?))
    }

    /// Uniform random bits, with the final bit of each window set so that every
    /// Rademacher index inside the window is off the null set.
    pub fn random<R: Rng + ?Sized>(x_bits: usize, y_bits: usize, rng: &mut R) -> Self {
        let mut draw = |n: usize| -> Vec<bool> {
            let mut v: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            if let Some(last) = v.last_mut() {
                *last = true;
            }
            v
        };
        let x = draw(x_bits);
        let y = draw(y_bits);
        Self::from_bits(x, y)
    }

    pub fn x_len(&self) -> usize {
        self.x.len()
    }

    pub fn y_len(&self) -> usize {
        self.y.len()
    }

    pub fn to_rationals(&self) -> (BigRational, BigRational) {
        (bits_to_rational(&self.x), bits_to_rational(&self.y))
    }

    /// `r_k(x)` from the binary digits: `+1` iff `x_k = 0`; null when no 1 bit follows position `k`.
    pub fn rademacher_x(&self, k: usize) -> Result<i8> {
        digit_sign(&self.x, self.x_last, k)
    }

    pub fn rademacher_y(&self, k: usize) -> Result<i8> {
        digit_sign(&self.y, self.y_last, k)
    }

    /// One application of the baker's map: the first x-bit moves to the front of the y-bits.
    pub fn baker_step(&mut self) -> Result<()> {
        let b = self.x.pop_front().ok_or(Error::WindowExhausted)?;
        self.x_last = self.x_last.and_then(|i| i.checked_sub(1));
        self.y.push_front(b);
        self.y_last = match self.y_last {
            Some(i) => Some(i + 1),
            None if b => Some(0),
            None => None,
        };
        Ok(())
    }
}

fn digit_sign(bits: &VecDeque<bool>, last: Option<usize>, k: usize) -> Result<i8> {
    if k == 0 {
        return Err(Error::InvalidInput("Rademacher index starts at 1".into()));
    }
    // 2^k x is an integer iff no 1 bit lies beyond position k
    match last {
        Some(l) if l >= k => Ok(if bits[k - 1] { -1 } else { 1 }),
        _ => Err(Error::NullSetPoint),
    }
}

pub fn baker_apply(p: &DyadicPoint) -> Result<DyadicPoint> {
    let mut q = p.clone();
    q.baker_step()?;
    Ok(q)
}

/// The case formula `B(x,y) = (2x, y/2)` or `(2x − 1, y/2 + 1/2)` in exact rationals.
pub fn baker_formula(x: &BigRational, y: &BigRational) -> (BigRational, BigRational) {
    let two = BigRational::from_integer(2.into());
    let half = BigRational::new(1.into(), 2.into());
    if *x < half {
        (x * &two, y / &two)
    } else {
        (x * &two - BigRational::one(), y / &two + half)
    }
}

/// Strictly increasing nonzero signed indices: `s > 0` is `r_s(x)`, `s < 0` is `r_{|s|}(y)`.
/// The empty set is the constant function 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct WalshIndexSet(Vec<i64>);

impl TryFrom<Vec<i64>> for WalshIndexSet {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<WalshIndexSet> for Vec<i64> {
    fn from(w: WalshIndexSet) -> Self {
        w.0
    }
}

impl WalshIndexSet {
    pub fn new(indices: Vec<i64>) -> Result<Self> {
        if indices.contains(&0) || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("Walsh indices must be nonzero and strictly increasing".into()));
        }
        Ok(Self(indices))
    }

    pub fn constant() -> Self {
        Self(Vec::new())
    }

    /// From the product-system labels `R_k`, `k ∈ Z` (`k >= 0` is `r_{k+1}(x)`, `k <= −1` is `r_{|k|}(y)`).
    pub fn from_labels(labels: &[i64]) -> Result<Self> {
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("labels must be strictly increasing".into()));
        }
        Ok(Self(labels.iter().map(|&k| if k >= 0 { k + 1 } else { k }).collect()))
    }

    pub fn labels(&self) -> Vec<i64> {
        self.0.iter().map(|&s| if s > 0 { s - 1 } else { s }).collect()
    }

    pub fn indices(&self) -> &[i64] {
        &self.0
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    /// Labels advanced by one: the index set of `W ∘ B`.
    pub fn shifted(&self) -> Self {
        let labels: Vec<i64> = self.labels().into_iter().map(|k| k + 1).collect();
        Self::from_labels(&labels).expect("shift preserves order")
    }

    pub fn max_x(&self) -> usize {
        self.0.iter().filter(|&&s| s > 0).max().map_or(0, |&s| s as usize)
    }

    pub fn max_y(&self) -> usize {
        self.0.iter().filter(|&&s| s < 0).map(|&s| s.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Symmetric difference: `W_a W_b = W_{a △ b}`.
    pub fn product(&self, other: &Self) -> Self {
        let mut out: Vec<i64> = self.0.iter().filter(|s| !other.0.contains(s)).copied().collect();
        out.extend(other.0.iter().filter(|s| !self.0.contains(s)));
        out.sort_unstable();
        Self(out)
    }
}

pub fn walsh_eval(idx: &WalshIndexSet, p: &DyadicPoint) -> Result<i8> {
    idx.0.iter().try_fold(1i8, |acc, &s| {
        let r = if s > 0 { p.rademacher_x(s as usize)? } else { p.rademacher_y(s.unsigned_abs() as usize)? };
        Ok(acc * r)
    })
}

/// Walsh function at a rational point through [`rademacher`].
pub fn walsh_eval_rational(idx: &WalshIndexSet, x: &BigRational, y: &BigRational) -> Result<i8> {
    idx.0.iter().try_fold(1i8, |acc, &s| {
        let r = if s > 0 { rademacher(s as u32, x)? } else { rademacher(s.unsigned_abs() as u32, y)? };
        Ok(acc * r)
    })
}

/// Bits per coordinate of the random points used by the shift check.
pub const SHIFT_CHECK_BITS: usize = 64;

/// Tests `W_idx(B p) = W_target(p)` on random points; `false` on the first counterexample.
pub fn walsh_shift_check_against<R: Rng + ?Sized>(
    idx: &WalshIndexSet,
    target: &WalshIndexSet,
    samples: usize,
    rng: &mut R,
) -> bool {
    let bits = SHIFT_CHECK_BITS.max(idx.max_x().max(idx.max_y()).max(target.max_x()).max(target.max_y()) + 2);
    (0..samples).all(|_| {
        let p = DyadicPoint::random(bits, bits, rng);
        match (baker_apply(&p).and_then(|q| walsh_eval(idx, &q)), walsh_eval(target, &p)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    })
}

/// The shift identity `W_idx ∘ B = W_{idx+1}` on `samples` random dyadic points.
pub fn walsh_shift_check<R: Rng + ?Sized>(idx: &WalshIndexSet, samples: usize, rng: &mut R) -> bool {
    walsh_shift_check_against(idx, &idx.shifted(), samples, rng)
}

/// A finite Walsh expansion `f = Σ c_idx W_idx`.
pub type WalshExpansion = BTreeMap<WalshIndexSet, BigRational>;

/// `f ∘ B`, i.e. every index set shifted.
pub fn shift_expansion(f: &WalshExpansion) -> WalshExpansion {
    f.iter().map(|(k, v)| (k.shifted(), v.clone())).collect()
}

/// Exact orbit sums `Σ_{n<N} (f − ∫f)(B^n p)` at every checkpoint.
pub fn baker_orbit_sums(f: &WalshExpansion, p: &DyadicPoint, grid: &[u64]) -> Result<Vec<(u64, BigRational)>> {
    if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("checkpoint grid must be positive and strictly increasing".into()));
    }
    let terms: Vec<(&WalshIndexSet, &BigRational)> = f.iter().filter(|(k, c)| !k.is_constant() && !c.is_zero()).collect();
    let n_max = *grid.last().expect("non-empty");
    let need_x = terms.iter().map(|(k, _)| k.max_x()).max().unwrap_or(0);
    if terms.is_empty() {
        return Ok(grid.iter().map(|&n| (n, BigRational::zero())).collect());
    }
    if (p.x_len() as u64) < n_max - 1 + need_x as u64 {
        return Err(Error::WindowExhausted);
    }
    let mut counts = vec![0i64; terms.len()];
    let mut point = p.clone();
    let mut out = Vec::with_capacity(grid.len());
    let mut next = 0;
    for n in 1..=n_max {
        if n > 1 {
            point.baker_step()?;
        }
        for (c, (k, _)) in counts.iter_mut().zip(&terms) {
            *c += walsh_eval(k, &point)? as i64;
        }
        if grid[next] == n {
            let sum = terms
                .iter()
                .zip(&counts)
                .fold(BigRational::zero(), |s, ((_, coef), &c)| s + *coef * BigInt::from(c));
            out.push((n, sum));
            next += 1;
        }
    }
    Ok(out)
}

/// `|N^{-1} Σ_{n<N} f(B^n p) − ∫ f|` weighted on the checkpoint grid.
pub fn baker_rate_series(f: &WalshExpansion, p: &DyadicPoint, eta: f64, grid: &[u64]) -> Result<RateSeries> {
    let sums = baker_orbit_sums(f, p, grid)?;
    Ok(RateSeries::from_deviations(
        eta,
        sums.into_iter().map(|(n, s)| {
            let dev = (s / BigInt::from(n)).abs();
            (n, dev.to_f64().unwrap_or(f64::NAN))
        }),
    ))
}
