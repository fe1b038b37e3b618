//! Sparse trigonometric polynomials `f(x) = Σ f̂(ξ) e^{2πi ξ·x}` on `T^d`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::point::{dot_phase, frac128, phase_to_f64, TorusPoint};
use crate::error::{Error, Result};
use crate::lattice::svp::ln_big;

/// Unit roundoff of f64.
const U: f64 = f64::EPSILON / 2.0;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FourierFunction {
    dim: usize,
    coeffs: BTreeMap<Vec<BigInt>, Complex64>,
}

/// A value together with a bound on its absolute floating-point error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub error: f64,
}

impl FourierFunction {
    pub fn new(dim: usize) -> Self {
        Self { dim, coeffs: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut f = Self::new(dim);
        f.add(vec![BigInt::zero(); dim], c).expect("dimension matches");
        f
    }

    /// `e^{2πi ξ·x}`.
    pub fn character(xi: &[i64]) -> Self {
        Self::from_i64(xi.len(), [(xi.to_vec(), Complex64::new(1.0, 0.0))]).expect("dimension matches")
    }

    pub fn from_i64(dim: usize, terms: impl IntoIterator<Item = (Vec<i64>, Complex64)>) -> Result<Self> {
        let mut f = Self::new(dim);
        for (xi, c) in terms {
            f.add(xi.into_iter().map(BigInt::from).collect(), c)?;
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<BigInt>, Complex64> {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Adds `c` to `f̂(ξ)`; entries that cancel to zero are dropped.
    pub fn add(&mut self, xi: Vec<BigInt>, c: Complex64) -> Result<()> {
        if xi.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "frequency of length {} in a {}-dimensional function",
                xi.len(),
                self.dim
            )));
        }
        match self.coeffs.entry(xi) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
        Ok(())
    }

    pub fn coeff(&self, xi: &[BigInt]) -> Complex64 {
        self.coeffs.get(xi).copied().unwrap_or_default()
    }

    /// `f̂(0) = ∫ f`.
    pub fn mean(&self) -> Complex64 {
        self.coeff(&vec![BigInt::zero(); self.dim])
    }

    /// `f̂(−ξ) = conj f̂(ξ)` for every frequency.
    pub fn is_real_valued(&self) -> bool {
        self.coeffs.iter().all(|(xi, c)| {
            let neg: Vec<BigInt> = xi.iter().map(|v| -v).collect();
            self.coeff(&neg) == c.conj()
        })
    }

    /// `Σ |f̂(ξ)|`.
    pub fn abs_sum(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).sum()
    }

    /// `Σ |f̂(ξ)|^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// Largest bit length of any frequency entry.
    pub fn max_frequency_bits(&self) -> u64 {
        self.coeffs.keys().flatten().map(|v| v.bits()).max().unwrap_or(0)
    }

    /// Frequencies as `i64` vectors, if all fit.
    pub fn small_terms(&self) -> Option<Vec<(Vec<i64>, Complex64)>> {
        self.coeffs
            .iter()
            .map(|(xi, c)| Some((xi.iter().map(|v| v.to_i64()).collect::<Option<Vec<_>>>()?, *c)))
            .collect()
    }

    /// Evaluates at a torus point, with an error bound covering phase rounding,
    /// trigonometric evaluation, summation and the point's own coordinate error.
    pub fn evaluate(&self, x: &TorusPoint) -> Result<Evaluation> {
        if x.dim() != self.dim {
            return Err(Error::InvalidInput("point and function dimensions differ".into()));
        }
        let coord_err = x.coordinate_error();
        let mut acc = Complex64::zero();
        let mut freq_weight = 0.0;
        for (xi, c) in &self.coeffs {
            let phase = match x {
                TorusPoint::Rational { num, den } => {
                    let s = xi.iter().zip(num).fold(BigInt::zero(), |s, (k, p)| s + k * p);
                    frac128(&s.mod_floor(den), den)
                }
                TorusPoint::FixedPoint { bits, mant, .. } => {
                    let modulus = BigInt::one() << *bits;
                    let s = xi.iter().zip(mant).fold(BigInt::zero(), |s, (k, p)| s + k * p);
                    let s = s.mod_floor(&modulus);
                    let v = if *bits >= 128 { s >> (*bits - 128) } else { s << (128 - *bits) };
                    v.to_u128().unwrap_or(0)
                }
            };
            acc += c * unit(phase);
            if coord_err > 0.0 {
                let l1: f64 = xi.iter().map(|v| v.to_f64().unwrap_or(f64::INFINITY).abs()).sum();
                freq_weight += c.norm() * l1;
            }
        }
        let error = term_error_bound(self.abs_sum(), self.len()) + 2.0 * PI * coord_err * freq_weight;
        Ok(Evaluation { value: acc, error })
    }

    /// Fast evaluator for functions whose frequencies fit in `i64`.
    pub fn compile(&self) -> Result<CompiledFunction> {
        let terms = self.small_terms().ok_or(Error::FrequencyOverflow {
            bits: self.max_frequency_bits(),
        })?;
        let abs_sum = self.abs_sum();
        let l1_weight = terms
            .iter()
            .map(|(xi, c)| c.norm() * xi.iter().map(|v| v.unsigned_abs() as f64).sum::<f64>())
            .sum();
        let len = terms.len();
        Ok(CompiledFunction { dim: self.dim, terms, abs_sum, l1_weight, len })
    }

    /// Characteristic function of `[lo_1, hi_1) × [lo_2, hi_2)` truncated to `|ξ|_∞ <= trunc`.
    pub fn box_indicator(lo: [f64; 2], hi: [f64; 2], trunc: i64) -> Self {
        let factor = |m: i64, a: f64, b: f64| -> Complex64 {
            if m == 0 {
                Complex64::new(b - a, 0.0)
            } else {
                let w = 2.0 * PI * m as f64;
                (Complex64::from_polar(1.0, -w * a) - Complex64::from_polar(1.0, -w * b))
                    / Complex64::new(0.0, w)
            }
        };
        let mut f = Self::new(2);
        for m1 in -trunc..=trunc {
            let c1 = factor(m1, lo[0], hi[0]);
            for m2 in -trunc..=trunc {
                let c = c1 * factor(m2, lo[1], hi[1]);
                if c.norm() > 0.0 {
                    f.coeffs.insert(vec![m1.into(), m2.into()], c);
                }
            }
        }
        f
    }
}

/// `e^{2πi θ}` for a 128-bit binary fraction `θ`.
fn unit(phase: u128) -> Complex64 {
    let (s, c) = (2.0 * PI * phase_to_f64(phase)).sin_cos();
    Complex64::new(c, s)
}

/// Rounding bound for `Σ_ξ f̂(ξ) e^{2πiθ_ξ}` with `len` terms: phase truncation
/// (`2^{-53}` of a turn), sin/cos and the complex product (a few ulps), and naive summation.
fn term_error_bound(abs_sum: f64, len: usize) -> f64 {
    abs_sum * ((2.0 * PI + 8.0) * 2.0 * U + (len as f64 + 1.0) * 2.0 * U)
}

/// A trigonometric polynomial with `i64` frequencies prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledFunction {
    dim: usize,
    terms: Vec<(Vec<i64>, Complex64)>,
    abs_sum: f64,
    l1_weight: f64,
    len: usize,
}

impl CompiledFunction {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }

    /// Evaluates at a point given by 128-bit coordinate fractions.
    pub fn eval_phases(&self, phases: &[u128]) -> Complex64 {
        self.terms.iter().fold(Complex64::zero(), |acc, (xi, c)| acc + c * unit(dot_phase(xi, phases)))
    }

    /// Error bound of [`Self::eval_phases`] for coordinates known to within `coord_err`.
    pub fn error_bound(&self, coord_err: f64) -> f64 {
        // coordinates truncated to 128 bits add at most |ξ|_1 2^{-128} of a turn
        term_error_bound(self.abs_sum, self.len)
            + 2.0 * PI * (coord_err + 2f64.powi(-128)) * self.l1_weight
    }
}

/// `Σ_ξ (ln(1+|ξ|))^{p} |f̂(ξ)|^2` with `|ξ|` Euclidean.
pub fn log_weight_sum_pow(f: &FourierFunction, p: f64) -> f64 {
    f.coeffs
        .iter()
        .map(|(xi, c)| {
            let nsq: BigInt = xi.iter().map(|v| v * v).sum();
            if nsq.is_zero() {
                return 0.0;
            }
            let norm = match nsq.to_f64() {
                Some(v) if v.is_finite() && v < 1e300 => v.sqrt(),
                _ => (0.5 * ln_big(&nsq)).exp(),
            };
            let log = if norm.is_finite() { norm.ln_1p() } else { 0.5 * ln_big(&nsq) };
            log.powf(p) * c.norm_sqr()
        })
        .sum()
}

/// `Σ_ξ (ln(1+|ξ|))^{1+δ} |f̂(ξ)|^2`.
pub fn log_weight_sum(f: &FourierFunction, delta: f64) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidInput("log_weight_sum needs δ > 0".into()));
    }
    Ok(log_weight_sum_pow(f, 1.0 + delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_and_character() {
        let x = TorusPoint::rational_i64(&[3, 5], 7).unwrap();
        let f = FourierFunction::constant(2, c(2.5, 0.0));
        assert_eq!(f.evaluate(&x).unwrap().value, c(2.5, 0.0));
        let g = FourierFunction::character(&[1, 0]);
        let v = g.evaluate(&x).unwrap().value;
        let want = Complex64::from_polar(1.0, 2.0 * PI * 3.0 / 7.0);
        assert!((v - want).norm() < 1e-15);
    }

    #[test]
    fn cancellation_drops_entries() {
        let mut f = FourierFunction::character(&[2, 1]);
        f.add(vec![2.into(), 1.into()], c(-1.0, 0.0)).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn compiled_matches_exact_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = FourierFunction::from_i64(
            2,
            (0..10).map(|_| {
                (vec![rng.gen_range(-20..=20), rng.gen_range(-20..=20)], c(rng.gen(), rng.gen()))
            }),
        )
        .unwrap();
        let cf = f.compile().unwrap();
        for _ in 0..20 {
            let x = TorusPoint::random_generic(2, 256, &mut rng);
            let e = f.evaluate(&x).unwrap();
            let v = cf.eval_phases(&x.phases());
            assert!((e.value - v).norm() <= e.error + cf.error_bound(0.0));
        }
    }

    #[test]
    fn log_weights() {
        assert_eq!(log_weight_sum(&FourierFunction::constant(2, c(3.0, 0.0)), 1.0).unwrap(), 0.0);
        let f = FourierFunction::character(&[2, 0]);
        let want = 3f64.ln().powi(2);
        assert!((log_weight_sum(&f, 1.0).unwrap() - want).abs() < 1e-15);
        assert!(log_weight_sum(&f, 0.0).is_err());
    }

    #[test]
    fn log_weight_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let terms: Vec<(Vec<i64>, Complex64)> = (0..30)
            .map(|_| (vec![rng.gen_range(-50..=50), rng.gen_range(-50..=50)], c(rng.gen(), rng.gen())))
            .collect();
        let f = FourierFunction::from_i64(2, terms.clone()).unwrap();
        let mut merged: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (xi, a) in terms {
            *merged.entry(xi).or_default() += a;
        }
        let brute: f64 = merged
            .iter()
            .map(|(xi, a)| {
                let n = ((xi[0] * xi[0] + xi[1] * xi[1]) as f64).sqrt();
                (1.0 + n).ln().powf(2.5) * a.norm_sqr()
            })
            .sum();
        assert!((log_weight_sum(&f, 1.5).unwrap() - brute).abs() <= 1e-12 * brute);
    }

    #[test]
    fn box_coefficients() {
        let f = FourierFunction::box_indicator([0.0, 0.0], [0.5, 0.5], 8);
        assert!((f.mean().re - 0.25).abs() < 1e-15);
        assert!(f.coeffs().iter().all(|(xi, v)| {
            let neg: Vec<BigInt> = xi.iter().map(|k| -k).collect();
            (f.coeff(&neg) - v.conj()).norm() < 1e-15
        }));
        // even frequencies (other than 0) vanish on a half-period side
        assert!(f.coeff(&[2.into(), 0.into()]).norm() < 1e-15);
        // ĝ(1) = (1 − e^{−πi}) / (2πi) = 1/(πi)
        let want = c(0.0, -1.0 / PI) * 0.5;
        assert!((f.coeff(&[1.into(), 0.into()]) - want).norm() < 1e-15);
    }
}
