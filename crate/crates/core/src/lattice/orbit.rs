//! Orbit representatives for unimodular ergodic 2x2 matrices and their growth.

use num_bigint::BigInt;
use serde::Serialize;

use super::matrix::{ball2, int_vec, norm_sq, IntMatrix};
use super::quad::QuadElem;
use super::spectral::{diagonalizer, Diagonalizer};
use crate::error::{Error, Result};

/// Hard cap on orbit-walk length in each direction.
pub const ORBIT_WALK_CAP: i64 = 10_000;

/// `ξ = A^offset · representative`; the representative minimizes `|S·|_∞` over its orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitRep {
    pub representative: Vec<BigInt>,
    pub offset: i64,
    pub s_norm: QuadElem,
}

/// Reusable context for repeated orbit queries against one matrix.
#[derive(Debug, Clone)]
pub struct OrbitWalker {
    forward: IntMatrix,
    backward: IntMatrix,
    diag: Diagonalizer,
}

impl OrbitWalker {
    pub fn new(a: &IntMatrix) -> Result<Self> {
        let diag = diagonalizer(a).map_err(|e| match e {
            Error::CaseNotApplicable(_) => Error::NonErgodicMatrix,
            other => other,
        })?;
        Ok(Self { forward: a.clone(), backward: a.unimodular_inverse()?, diag })
    }

    pub fn diagonalizer(&self) -> &Diagonalizer {
        &self.diag
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.forward
    }

    /// Walks `A^j ξ` for j > 0 (or j < 0) until the `|S·|_∞` norm has strictly
    /// increased twice in a row past the running minimum.
    fn walk(
        &self,
        xi: &[BigInt],
        step: &IntMatrix,
        dir: i64,
        best: &mut Vec<(QuadElem, Vec<BigInt>, i64)>,
    ) -> Result<()> {
        let mut cur = xi.to_vec();
        let mut prev = self.diag.s_norm(xi);
        let mut rises = 0;
        let mut j = 0i64;
        loop {
            j += dir;
            if j.abs() > ORBIT_WALK_CAP {
                return Err(Error::Internal(format!(
                    "orbit walk exceeded {ORBIT_WALK_CAP} steps"
                )));
            }
            cur = step.mul_vec(&cur);
            let val = self.diag.s_norm(&cur);
            let min = &best[0].0;
            match val.cmp(min) {
                std::cmp::Ordering::Less => {
                    best.clear();
                    best.push((val.clone(), cur.clone(), j));
                }
                std::cmp::Ordering::Equal => best.push((val.clone(), cur.clone(), j)),
                std::cmp::Ordering::Greater => {}
            }
            if val > prev && val > best[0].0 {
                rises += 1;
                if rises >= 2 {
                    return Ok(());
                }
            } else {
                rises = 0;
            }
            prev = val;
        }
    }

    pub fn representative(&self, xi: &[BigInt]) -> Result<OrbitRep> {
        if xi.len() != 2 || IntMatrix::is_zero_vec(xi) {
            return Err(Error::InvalidInput("orbit representative needs a nonzero 2-vector".into()));
        }
        let mut best = vec![(self.diag.s_norm(xi), xi.to_vec(), 0i64)];
        self.walk(xi, &self.forward, 1, &mut best)?;
        self.walk(xi, &self.backward, -1, &mut best)?;
        // ties: lexicographically smallest vector
        let (s_norm, representative, j) =
            best.into_iter().min_by(|a, b| a.1.cmp(&b.1)).expect("non-empty");
        Ok(OrbitRep { representative, offset: -j, s_norm })
    }

    /// `A^k ξ` for any integer k.
    pub fn power_apply(&self, xi: &[BigInt], k: i64) -> Vec<BigInt> {
        let step = if k >= 0 { &self.forward } else { &self.backward };
        (0..k.unsigned_abs()).fold(xi.to_vec(), |v, _| step.mul_vec(&v))
    }
}

pub fn orbit_representative(a: &IntMatrix, xi: &[BigInt]) -> Result<OrbitRep> {
    OrbitWalker::new(a)?.representative(xi)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub xi: [i64; 2],
    pub k: i64,
    /// `|A^k ξ|^2`, exact.
    #[serde(serialize_with = "crate::io::ser_display")]
    pub norm_sq: BigInt,
}

#[derive(Debug, Clone)]
pub struct RepGrowth {
    pub rows: Vec<GrowthRow>,
    pub representatives: Vec<[i64; 2]>,
    /// `c^2 = min |A^k ξ|^2 |λ|^{-2|k|}` over the table, exact in Q(√D).
    pub c_sq: QuadElem,
    pub lambda: QuadElem,
    /// Every representative satisfies `min(|η1|,|η2|)·|λ| >= |η|_∞` with `η = Sξ`.
    pub comparable: bool,
}

impl RepGrowth {
    pub fn c(&self) -> f64 {
        self.c_sq.to_f64().sqrt()
    }
}

/// Representatives `ξ ∈ E` with `|ξ|_∞ <= r`.
pub fn representatives_in_ball(walker: &OrbitWalker, r: i64) -> Result<Vec<[i64; 2]>> {
    let mut reps = Vec::new();
    for v in ball2(r) {
        let rep = walker.representative(&int_vec(&v))?;
        if rep.offset == 0 {
            reps.push(v);
        }
    }
    Ok(reps)
}

pub fn rep_growth(a: &IntMatrix, ball_radius: i64, k_max: u32) -> Result<RepGrowth> {
    let walker = OrbitWalker::new(a)?;
    let diag = walker.diagonalizer();
    let lambda_abs = diag.lambda.abs();
    let lambda_sq = &lambda_abs * &lambda_abs;
    let reps = representatives_in_ball(&walker, ball_radius)?;
    let d = &diag.radicand;

    let mut rows = Vec::new();
    let mut c_sq: Option<QuadElem> = None;
    let mut comparable = true;
    let lambda_pows: Vec<QuadElem> = (0..=k_max).map(|k| lambda_sq.pow(k).inverse()).collect();
    for rep in &reps {
        let xi = int_vec(rep);
        let [e1, e2] = diag.apply(&xi);
        let (a1, a2) = (e1.abs(), e2.abs());
        let inf = a1.clone().max(a2.clone());
        comparable &= &a1.min(a2) * &lambda_abs >= inf;

        let mut fwd = xi.clone();
        let mut bwd = xi.clone();
        for k in 0..=k_max as i64 {
            let scale = &lambda_pows[k as usize];
            let vecs: &[&Vec<BigInt>] = if k == 0 { &[&fwd] } else { &[&fwd, &bwd] };
            for (idx, v) in vecs.iter().enumerate() {
                let n2 = norm_sq(v);
                let ratio = &QuadElem::from_int(&n2, d) * scale;
                if c_sq.as_ref().is_none_or(|c| ratio < *c) {
                    c_sq = Some(ratio);
                }
                let signed_k = if idx == 0 { k } else { -k };
                rows.push(GrowthRow { xi: *rep, k: signed_k, norm_sq: n2 });
            }
            fwd = walker.power_apply(&fwd, 1);
            bwd = walker.power_apply(&bwd, -1);
        }
    }
    let c_sq = c_sq.ok_or_else(|| Error::InvalidInput("no representatives in ball".into()))?;
    rows.sort_by_key(|r| (r.xi, r.k));
    Ok(RepGrowth { rows, representatives: reps, c_sq, lambda: lambda_abs, comparable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    fn fib() -> IntMatrix {
        IntMatrix::from_i64([[1, 1], [1, 0]])
    }

    /// Brute-force oracle: scan offsets |j| <= 20 and pick the minimal S-norm.
    fn brute_rep(walker: &OrbitWalker, xi: &[BigInt]) -> (Vec<BigInt>, i64) {
        let mut best: Option<(QuadElem, Vec<BigInt>, i64)> = None;
        for j in -20..=20 {
            let v = walker.power_apply(xi, j);
            let s = walker.diagonalizer().s_norm(&v);
            let better = match &best {
                None => true,
                Some((bs, bv, _)) => match s.cmp(bs) {
                    Ordering::Less => true,
                    Ordering::Equal => v < *bv,
                    Ordering::Greater => false,
                },
            };
            if better {
                best = Some((s, v, j));
            }
        }
        let (_, v, j) = best.unwrap();
        (v, -j)
    }

    #[test]
    fn fibonacci_representative_matches_brute_force() {
        let walker = OrbitWalker::new(&fib()).unwrap();
        for v in ball2(6) {
            let xi = int_vec(&v);
            let rep = walker.representative(&xi).unwrap();
            let (bv, bk) = brute_rep(&walker, &xi);
            assert_eq!(rep.representative, bv, "{v:?}");
            assert_eq!(rep.offset, bk, "{v:?}");
            assert_eq!(walker.power_apply(&rep.representative, rep.offset), xi);
        }
        let rep = walker.representative(&int_vec(&[1, 0])).unwrap();
        let (bv, _) = brute_rep(&walker, &int_vec(&[1, 0]));
        assert_eq!(rep.representative, bv);
    }

    #[test]
    fn idempotent_and_equivariant() {
        let a = IntMatrix::from_i64([[2, 1], [1, 1]]);
        let walker = OrbitWalker::new(&a).unwrap();
        let xi = int_vec(&[5, 3]);
        let r = walker.representative(&xi).unwrap();
        let again = walker.representative(&r.representative).unwrap();
        assert_eq!(again.offset, 0);
        assert_eq!(again.representative, r.representative);
        let shifted = walker.representative(&a.mul_vec(&xi)).unwrap();
        assert_eq!(shifted.representative, r.representative);
        assert_eq!(shifted.offset, r.offset + 1);
    }

    #[test]
    fn minimality_over_window() {
        let walker = OrbitWalker::new(&fib()).unwrap();
        for v in ball2(4) {
            let r = walker.representative(&int_vec(&v)).unwrap();
            for k in -20..=20 {
                let w = walker.power_apply(&r.representative, k);
                assert!(walker.diagonalizer().s_norm(&w) >= r.s_norm);
            }
        }
    }

    #[test]
    fn non_ergodic_rejected() {
        let rot = IntMatrix::from_i64([[0, -1], [1, 0]]);
        assert_eq!(orbit_representative(&rot, &int_vec(&[1, 0])), Err(Error::NonErgodicMatrix));
    }

    #[test]
    fn fibonacci_rep_growth() {
        let g = rep_growth(&fib(), 10, 12).unwrap();
        assert!(g.c_sq.signum() == Ordering::Greater);
        assert!(g.comparable);
        let lam = g.lambda.to_f64();
        for row in &g.rows {
            let n = row.norm_sq.to_string().parse::<f64>().unwrap().sqrt();
            assert!(n >= g.c() * lam.powi(row.k.abs() as i32) * (1.0 - 1e-12));
        }
        // k = 0 rows: |ξ| >= c
        assert!(g.rows.iter().filter(|r| r.k == 0).all(|r| {
            QuadElem::from_int(&r.norm_sq, &5.into()) >= g.c_sq
        }));
    }
}
