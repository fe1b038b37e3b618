//! Lower bound `|ξ|·dist(ξ, V_λ) >= C_A` for integer vectors against an irrational eigenline.

use num_bigint::BigInt;
use num_traits::Zero;

use super::matrix::{ball2, IntMatrix};
use super::quad::QuadElem;
use super::spectral::{eigenvalues2, irrational_radicand, Eigen2};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct DirichletRow {
    pub xi: [i64; 2],
    /// `|ξ|^2 · dist(ξ, V_λ)^2`, exact.
    pub product_sq: QuadElem,
}

impl DirichletRow {
    pub fn product(&self) -> f64 {
        self.product_sq.to_f64().max(0.0).sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct DirichletBound {
    pub rows: Vec<DirichletRow>,
    pub min_sq: QuadElem,
    pub argmin: [i64; 2],
}

impl DirichletBound {
    pub fn min(&self) -> f64 {
        self.min_sq.to_f64().max(0.0).sqrt()
    }
}

/// Right eigenvector of the dominant eigenvalue, entries in Q(√D).
fn eigenline(a: &IntMatrix) -> Result<[QuadElem; 2]> {
    let Eigen2::Real { large, .. } = eigenvalues2(a)? else {
        return Err(Error::CaseNotApplicable("complex eigenvalues".into()));
    };
    let d = large.radicand().clone();
    let (a11, a12, a21, a22) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    // (A - λ) v = 0
    Ok(if !a12.is_zero() {
        [QuadElem::from_int(a12, &d), &large - &QuadElem::from_int(a11, &d)]
    } else {
        [&large - &QuadElem::from_int(a22, &d), QuadElem::from_int(a21, &d)]
    })
}

/// Table of `|ξ|·dist(ξ, V_λ)` over `0 < |ξ|_∞ <= r`, `λ` the dominant eigenvalue.
pub fn dirichlet_bound(a: &IntMatrix, ball_radius: i64) -> Result<DirichletBound> {
    if a.dim() != 2 {
        return Err(Error::CaseNotApplicable("dirichlet_bound requires d = 2".into()));
    }
    let d = irrational_radicand(a)?;
    let v = eigenline(a)?;
    let vv = &(&v[0] * &v[0]) + &(&v[1] * &v[1]);
    let vv_inv = vv.inverse();
    let mut rows = Vec::new();
    for xi in ball2(ball_radius) {
        let x = [BigInt::from(xi[0]), BigInt::from(xi[1])];
        let dotp = &v[0].scale_int(&x[0]) + &v[1].scale_int(&x[1]);
        let xx = QuadElem::from_int(&(&x[0] * &x[0] + &x[1] * &x[1]), &d);
        // dist^2 = |ξ|^2 - (ξ·v)^2 / |v|^2
        let dist_sq = &xx - &(&(&dotp * &dotp) * &vv_inv);
        rows.push(DirichletRow { xi, product_sq: &xx * &dist_sq });
    }
    let best = rows
        .iter()
        .min_by(|p, q| p.product_sq.cmp(&q.product_sq))
        .ok_or_else(|| Error::InvalidInput("empty ball".into()))?;
    Ok(DirichletBound { min_sq: best.product_sq.clone(), argmin: best.xi, rows })
}
