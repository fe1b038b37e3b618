//! Ergodic averages `N^{-1} Σ_{n<N} f(A^n x)` along orbits and in frequency space.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::fourier::{CompiledFunction, FourierFunction};
use super::point::{OrbitStepper, TorusPoint};
use crate::error::{Error, Result};
use crate::lattice::{IntMatrix, ShellPartition};
use crate::rate::RateSeries;

/// Required accuracy of pointwise means.
pub const MEAN_TOLERANCE: f64 = 1e-9;

/// Frequencies produced by [`spectral_mean`] may not exceed this many bits.
pub const FREQUENCY_BUDGET_BITS: u64 = 1 << 24;

/// Neumaier-compensated complex sum.
#[derive(Debug, Clone, Copy, Default)]
struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, x: Complex64) {
        self.sum = Complex64::new(
            neumaier(&mut self.comp.re, self.sum.re, x.re),
            neumaier(&mut self.comp.im, self.sum.im, x.im),
        );
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

fn neumaier(comp: &mut f64, sum: f64, x: f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    /// Bound on the absolute floating-point error of `value`.
    pub error: f64,
    /// Orbit period, when the orbit revisited a point within the first N steps.
    pub period: Option<u64>,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// Streams `f(A^n x)` and reports the running mean at every requested checkpoint.
fn orbit_means(
    f: &CompiledFunction,
    a: &IntMatrix,
    x: &TorusPoint,
    checkpoints: &[u64],
    mut on_checkpoint: impl FnMut(u64, Complex64, f64),
) -> Result<Option<u64>> {
    if f.dim() != x.dim() {
        return Err(Error::InvalidInput("point and function dimensions differ".into()));
    }
    let mut stepper = OrbitStepper::new(a, x)?;
    let mut acc = CompensatedSum::default();
    let mut worst = 0.0f64;
    let mut next = checkpoints.iter().peekable();
    let n_max = checkpoints.last().copied().unwrap_or(0);
    for n in 1..=n_max {
        if n > 1 {
            stepper.step()?;
        }
        let point = stepper.current();
        acc.add(f.eval_phases(&point.phases()));
        worst = worst.max(f.error_bound(point.coordinate_error()));
        while next.peek().is_some_and(|&&c| c == n) {
            next.next();
            let mean = acc.value() / n as f64;
            // per-point error plus compensated-summation error
            on_checkpoint(n, mean, worst + 4.0 * f64::EPSILON * f.abs_sum());
        }
    }
    Ok(stepper.period())
}

pub fn pointwise_mean(f: &FourierFunction, a: &IntMatrix, x: &TorusPoint, n: u64) -> Result<MeanEstimate> {
    if n == 0 {
        return Err(Error::InvalidInput("mean over N = 0 points".into()));
    }
    let compiled = f.compile()?;
    let mut out = (Complex64::zero(), 0.0);
    let period = orbit_means(&compiled, a, x, &[n], |_, m, e| out = (m, e))?;
    if out.1 > MEAN_TOLERANCE {
        return Err(Error::PrecisionExhausted(format!(
            "mean error bound {:e} exceeds {MEAN_TOLERANCE:e}",
            out.1
        )));
    }
    Ok(MeanEstimate { value: out.0, error: out.1, period })
}

/// `U_N f = N^{-1} Σ_{n<N} f∘A^n` as a trigonometric polynomial: `f̂(ξ)/N` at `(A*)^n ξ`.
pub fn spectral_mean(f: &FourierFunction, a: &IntMatrix, n: u64) -> Result<FourierFunction> {
    if n == 0 {
        return Err(Error::InvalidInput("mean over N = 0 points".into()));
    }
    if a.dim() != f.dim() {
        return Err(Error::InvalidInput("matrix and function dimensions differ".into()));
    }
    if a.det().is_zero() {
        return Err(Error::SingularMatrix);
    }
    let star = a.transpose();
    let scale = 1.0 / n as f64;
    let mut out = FourierFunction::new(f.dim());
    for (xi, c) in f.coeffs() {
        let mut cur = xi.clone();
        for step in 0..n {
            out.add(cur.clone(), c * scale)?;
            if step + 1 < n {
                cur = star.mul_vec(&cur);
                let bits = cur.iter().map(|v| v.bits()).max().unwrap_or(0);
                if bits > FREQUENCY_BUDGET_BITS {
                    return Err(Error::FrequencyOverflow { bits });
                }
            }
        }
    }
    Ok(out)
}

/// Rate profile of the pointwise mean along one orbit.
#[derive(Debug, Clone, Serialize)]
pub struct ToralRate {
    pub series: RateSeries,
    pub envelope: f64,
    pub half_statistic: f64,
    pub max_error: f64,
    pub period: Option<u64>,
}

pub fn rate_series(f: &FourierFunction, a: &IntMatrix, x: &TorusPoint, eta: f64, grid: &[u64]) -> Result<ToralRate> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] == 0 {
        return Err(Error::InvalidInput("checkpoint grid must be positive and strictly increasing".into()));
    }
    let compiled = f.compile()?;
    let mean = f.mean();
    let mut series = RateSeries::new(eta);
    let mut max_error = 0.0f64;
    let period = orbit_means(&compiled, a, x, grid, |n, m, e| {
        series.push(n, (m - mean).norm());
        max_error = max_error.max(e);
    })?;
    Ok(ToralRate {
        envelope: series.envelope_statistic(),
        half_statistic: series.half_statistic(),
        series,
        max_error,
        period,
    })
}

/// `Σ_k ‖Π_k f‖` with the exact squared shell norms.
#[derive(Debug, Clone)]
pub struct ProjectionNormSum {
    pub sum: f64,
    /// `Σ_{ξ ∈ F_k} |f̂(ξ)|^2`, exact on the binary values of the coefficients.
    pub shells: BTreeMap<i64, BigRational>,
}

impl ProjectionNormSum {
    pub fn total_sq(&self) -> BigRational {
        self.shells.values().fold(BigRational::zero(), |s, x| s + x)
    }
}

pub fn exact_abs_sq(c: Complex64) -> BigRational {
    let re = BigRational::from_float(c.re).expect("finite coefficient");
    let im = BigRational::from_float(c.im).expect("finite coefficient");
    &re * &re + &im * &im
}

pub fn projection_norm_sum(f: &FourierFunction, a: &IntMatrix) -> Result<ProjectionNormSum> {
    let partition = ShellPartition::new(a)?;
    let mut shells: BTreeMap<i64, BigRational> = BTreeMap::new();
    for (xi, c) in f.coeffs() {
        if xi.iter().all(|v| v.is_zero()) {
            continue;
        }
        let k = partition.label(xi)?.k;
        *shells.entry(k).or_insert_with(BigRational::zero) += exact_abs_sq(*c);
    }
    let sum = shells.values().map(|q| q.to_f64().unwrap_or(f64::NAN).sqrt()).sum();
    Ok(ProjectionNormSum { sum, shells })
}

/// `‖g − ĝ(0)‖_2` for a trigonometric polynomial.
pub fn centered_norm(g: &FourierFunction) -> f64 {
    g.coeffs()
        .iter()
        .filter(|(xi, _)| xi.iter().any(|v| !v.is_zero()))
        .map(|(_, c)| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// The zero frequency of dimension `d`.
pub fn zero_frequency(d: usize) -> Vec<BigInt> {
    vec![BigInt::zero(); d]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate::default_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fib() -> IntMatrix {
        IntMatrix::from_i64([[1, 1], [1, 0]])
    }

    fn random_f(rng: &mut ChaCha8Rng, terms: usize, range: i64) -> FourierFunction {
        FourierFunction::from_i64(
            2,
            (0..terms).map(|_| {
                (
                    vec![rng.gen_range(-range..=range), rng.gen_range(-range..=range)],
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                )
            }),
        )
        .unwrap()
    }

    #[test]
    fn constant_mean() {
        let f = FourierFunction::constant(2, Complex64::new(1.5, -2.0));
        let x = TorusPoint::rational_i64(&[1, 2], 7).unwrap();
        for n in [1, 5, 100] {
            let m = pointwise_mean(&f, &fib(), &x, n).unwrap();
            assert!((m.value - Complex64::new(1.5, -2.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn character_at_fixed_point() {
        let f = FourierFunction::character(&[3, -1]);
        let x = TorusPoint::rational_i64(&[0, 0], 1).unwrap();
        let m = pointwise_mean(&f, &fib(), &x, 50).unwrap();
        assert!((m.value - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(m.period, Some(1));
    }

    #[test]
    fn spectral_examples() {
        let f = FourierFunction::character(&[1, 2]);
        assert_eq!(spectral_mean(&f, &fib(), 1).unwrap(), f);
        let g = spectral_mean(&f, &IntMatrix::from_i64([[2, 0], [0, 2]]), 2).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.coeff(&[1.into(), 2.into()]), Complex64::new(0.5, 0.0));
        assert_eq!(g.coeff(&[2.into(), 4.into()]), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn oracle_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let f = random_f(&mut rng, 10, 6);
        let spectral = spectral_mean(&f, &fib(), 50).unwrap();
        for _ in 0..100 {
            let x = TorusPoint::random_generic(2, 192, &mut rng);
            let direct = pointwise_mean(&f, &fib(), &x, 50).unwrap();
            let via = spectral.evaluate(&x).unwrap();
            assert!((direct.value - via.value).norm() <= 1e-9);
        }
    }

    #[test]
    fn weighted_values_match_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_f(&mut rng, 6, 5);
        let x = TorusPoint::random_generic(2, 128, &mut rng);
        let r = rate_series(&f, &fib(), &x, 0.5, &default_grid(1 << 12)).unwrap();
        assert!(r.series.is_increasing_grid() && r.series.all_finite());
        for p in &r.series.points {
            let w = (p.n as f64).sqrt() * (1.0 + p.n as f64).ln().powf(-2.0);
            assert!((p.weighted - w * p.deviation).abs() <= 1e-15 * p.weighted.abs().max(1e-300));
            let direct = pointwise_mean(&f, &fib(), &x, p.n).unwrap();
            assert!(((direct.value - f.mean()).norm() - p.deviation).abs() < 1e-12);
        }
        let constant = FourierFunction::constant(2, Complex64::new(4.0, 0.0));
        let r = rate_series(&constant, &fib(), &x, 0.5, &default_grid(1 << 8)).unwrap();
        assert!(r.series.points.iter().all(|p| p.deviation < 1e-14));
    }

    #[test]
    fn parseval_and_norm_transfer() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for a in [fib(), IntMatrix::from_i64([[2, 1], [1, 1]]), IntMatrix::from_i64([[2, 0], [0, 2]]), IntMatrix::from_i64([[0, -1], [2, 0]])] {
            for _ in 0..10 {
                let f = random_f(&mut rng, 8, 9);
                let p = projection_norm_sum(&f, &a).unwrap();
                let direct: BigRational = f
                    .coeffs()
                    .iter()
                    .filter(|(xi, _)| xi.iter().any(|v| !v.is_zero()))
                    .map(|(_, c)| exact_abs_sq(*c))
                    .fold(BigRational::zero(), |s, x| s + x);
                assert_eq!(p.total_sq(), direct);
                for n in [1u64, 3, 10, 40] {
                    let g = spectral_mean(&f, &a, n).unwrap();
                    let lhs = centered_norm(&g);
                    assert!(lhs <= p.sum / (n as f64).sqrt() * (1.0 + 1e-12), "{a} n={n}");
                }
            }
        }
    }

    #[test]
    fn adjacent_shells_under_unimodular_map() {
        let a = fib();
        let xi = vec![BigInt::from(1), BigInt::from(0)];
        let star_xi = a.transpose().mul_vec(&xi);
        let amp = Complex64::new(0.5, 0.0);
        let mut f = FourierFunction::new(2);
        f.add(xi, amp).unwrap();
        f.add(star_xi, amp).unwrap();
        let p = projection_norm_sum(&f, &a).unwrap();
        // same orbit, offsets differ by one: two shells of norm a each
        assert_eq!(p.shells.len(), 2);
        let ks: Vec<_> = p.shells.keys().copied().collect();
        assert_eq!(ks[1] - ks[0], 1);
        assert!((p.sum - 1.0).abs() < 1e-15);
        let single = projection_norm_sum(&FourierFunction::character(&[4, 7]), &a).unwrap();
        assert_eq!(single.sum, 1.0);
    }
}
