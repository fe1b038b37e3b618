//! Sampled `L^2` modulus of continuity and the dyadic log-weight comparison.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::fourier::{log_weight_sum_pow, FourierFunction};
use crate::error::{Error, Result};

/// Number of magnitudes `t·2^{-i}`, `i = 0..AXIS_LEVELS`, sampled per direction.
pub const AXIS_LEVELS: u32 = 7;

/// The finite set of displacement directions used to approximate `sup_{|y| <= t}`:
/// the coordinate axes plus seeded random unit vectors.
#[derive(Debug, Clone)]
pub struct DisplacementSampler {
    directions: Vec<Vec<f64>>,
}

impl DisplacementSampler {
    pub fn new<R: Rng + ?Sized>(dim: usize, random_directions: usize, rng: &mut R) -> Self {
        let mut directions = Self::axes_only(dim).directions;
        while directions.len() < dim + random_directions {
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-3 && n <= 1.0 {
                directions.push(v.into_iter().map(|x| x / n).collect());
            }
        }
        Self { directions }
    }

    pub fn axes_only(dim: usize) -> Self {
        let directions = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { directions }
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }

    /// Displacements `t·2^{-i}·u` for every direction `u` and `i < AXIS_LEVELS`.
    pub fn displacements(&self, t: f64) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..AXIS_LEVELS).flat_map(move |i| {
            let r = t * 2f64.powi(-(i as i32));
            self.directions.iter().map(move |u| u.iter().map(|x| x * r).collect())
        })
    }
}

/// `‖f(·+y) − f‖_2^2 = Σ |e^{2πiξ·y} − 1|^2 |f̂(ξ)|^2`.
pub fn shift_difference_sq(terms: &[(Vec<f64>, f64)], y: &[f64]) -> f64 {
    terms
        .iter()
        .map(|(xi, w)| {
            let s = (PI * xi.iter().zip(y).map(|(a, b)| a * b).sum::<f64>()).sin();
            4.0 * s * s * w
        })
        .sum()
}

fn float_terms(f: &FourierFunction) -> Vec<(Vec<f64>, f64)> {
    f.coeffs()
        .iter()
        .map(|(xi, c)| {
            (
                xi.iter().map(|v| num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::INFINITY)).collect(),
                Complex64::norm_sqr(c),
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusEstimate {
    pub t: f64,
    /// Max over the sampled displacements: a lower bound for `ω(f, t)`.
    pub omega: f64,
    pub argmax: Vec<f64>,
    pub samples: usize,
    pub lower_bound: bool,
}

pub fn modulus_of_continuity(f: &FourierFunction, t: f64, sampler: &DisplacementSampler) -> Result<ModulusEstimate> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput("modulus of continuity needs t > 0".into()));
    }
    let terms = float_terms(f);
    Ok(sampled_modulus(&terms, t, sampler, f.dim()))
}

fn sampled_modulus(terms: &[(Vec<f64>, f64)], t: f64, sampler: &DisplacementSampler, dim: usize) -> ModulusEstimate {
    let mut best = (0.0f64, vec![0.0; dim]);
    let mut samples = 0;
    for y in sampler.displacements(t) {
        samples += 1;
        let v = shift_difference_sq(terms, &y);
        if v > best.0 {
            best = (v, y);
        }
    }
    ModulusEstimate { t, omega: best.0.sqrt(), argmax: best.1, samples, lower_bound: true }
}

/// Lower estimates of `ω(f, t)` on an increasing grid, made nondecreasing by carrying the
/// running maximum (every displacement admissible for `t` is admissible for larger `t`).
pub fn modulus_profile(f: &FourierFunction, ts: &[f64], sampler: &DisplacementSampler) -> Result<Vec<ModulusEstimate>> {
    if ts.windows(2).any(|w| w[0] > w[1]) || ts.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::InvalidInput("t grid must be positive and nondecreasing".into()));
    }
    let terms = float_terms(f);
    let mut out: Vec<ModulusEstimate> = Vec::with_capacity(ts.len());
    for &t in ts {
        let mut est = sampled_modulus(&terms, t, sampler, f.dim());
        if let Some(prev) = out.last() {
            if prev.omega > est.omega {
                est.omega = prev.omega;
                est.argmax = prev.argmax.clone();
            }
        }
        out.push(est);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct DyadicBound {
    pub alpha: f64,
    pub depth: u32,
    /// `Σ ln^α(1+|ξ|) |f̂(ξ)|^2`.
    pub lhs: f64,
    /// `Σ_{j=0}^{J} (1 + j^α) ω^2(f, 2^{-j})` with sampled ω.
    pub rhs: f64,
    /// `lhs / rhs` (0 when both vanish).
    pub ratio: f64,
    pub omegas: Vec<f64>,
}

pub fn dyadic_modulus_bound(f: &FourierFunction, alpha: f64, depth: u32, sampler: &DisplacementSampler) -> Result<DyadicBound> {
    if !(alpha >= 0.0) || depth < 1 {
        return Err(Error::InvalidInput("dyadic bound needs α >= 0 and J >= 1".into()));
    }
    let lhs = log_weight_sum_pow(f, alpha);
    let ts: Vec<f64> = (0..=depth).rev().map(|j| 2f64.powi(-(j as i32))).collect();
    let profile = modulus_profile(f, &ts, sampler)?;
    // profile runs from t = 2^{-J} up to t = 1
    let omegas: Vec<f64> = profile.iter().rev().map(|e| e.omega).collect();
    let rhs = omegas
        .iter()
        .enumerate()
        .map(|(j, w)| (1.0 + (j as f64).powf(alpha)) * w * w)
        .sum::<f64>();
    let ratio = if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(DyadicBound { alpha, depth, lhs, rhs, ratio, omegas })
}
