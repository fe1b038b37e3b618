//! Weighted maximal functions, the Rademacher–Menshov right-hand side and Kronecker's lemma.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weight `ε(n)` evaluable at every `n >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFunction {
    /// `ε(n) = (n+1)^{-alpha} (ln(2+n))^{-beta-eta}`.
    PowerLog { alpha: f64, beta: f64, eta: f64 },
    Constant { value: f64 },
}

impl WeightFunction {
    pub fn power_log(alpha: f64, beta: f64, eta: f64) -> Self {
        Self::PowerLog { alpha, beta, eta }
    }

    /// The weight that makes the maximal theorem applicable on the torus.
    pub fn standard(eta: f64) -> Self {
        Self::power_log(0.5, 1.5, eta)
    }

    pub fn eval(&self, n: u64) -> f64 {
        match *self {
            Self::PowerLog { alpha, beta, eta } => {
                let n = n as f64;
                (n + 1.0).powf(-alpha) * (n + 2.0).ln().powf(-beta - eta)
            }
            Self::Constant { value } => value,
        }
    }

    pub fn table(&self, len: usize) -> Vec<f64> {
        (0..len as u64).map(|n| self.eval(n)).collect()
    }

    /// Positive and nonincreasing: exact for the parametric families.
    pub fn is_positive_decreasing(&self) -> bool {
        match *self {
            Self::PowerLog { alpha, beta, eta } => alpha >= 0.0 && beta + eta >= 0.0,
            Self::Constant { value } => value > 0.0,
        }
    }
}

/// `S = max_N ε(N)|Σ_{n<N} s_n|` and `S̃ = max_N |Σ_{n<N} ε(n) s_n|`, over `1 <= N <= len(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximalPair {
    pub s_value: f64,
    pub s_tilde_value: f64,
    pub argmax_s: usize,
    pub argmax_s_tilde: usize,
}

impl MaximalPair {
    pub fn holds(&self) -> bool {
        self.s_value <= 2.0 * self.s_tilde_value
    }

    /// `2S̃ − S`.
    pub fn slack(&self) -> f64 {
        2.0 * self.s_tilde_value - self.s_value
    }
}

pub fn weighted_maximal_pair(s: &[f64], eps: &WeightFunction) -> Result<MaximalPair> {
    let table = eps.table(s.len() + 1);
    weighted_maximal_pair_table(s, &table)
}

/// As [`weighted_maximal_pair`] with `ε(0..=len(s))` precomputed.
pub fn weighted_maximal_pair_table(s: &[f64], eps: &[f64]) -> Result<MaximalPair> {
    if s.is_empty() {
        return Err(Error::InvalidInput("maximal pair needs a nonempty sequence".into()));
    }
    if eps.len() <= s.len() {
        return Err(Error::InvalidInput("weight table shorter than len(s) + 1".into()));
    }
    let mut plain = 0.0;
    let mut weighted = 0.0;
    let mut out = MaximalPair { s_value: 0.0, s_tilde_value: 0.0, argmax_s: 1, argmax_s_tilde: 1 };
    for (i, &x) in s.iter().enumerate() {
        plain += x;
        weighted += eps[i] * x;
        let n = i + 1;
        let a = eps[n] * f64::abs(plain);
        if a > out.s_value {
            out.s_value = a;
            out.argmax_s = n;
        }
        let b = f64::abs(weighted);
        if b > out.s_tilde_value {
            out.s_tilde_value = b;
            out.argmax_s_tilde = n;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RmRhs {
    /// `(Σ_{n<=N_max} ε(n)^2 ln(n+2)^2)^{1/2}`.
    pub partial: f64,
    pub convergent: bool,
    /// Upper bound on the omitted tail of the squared sum, by integral comparison.
    pub tail_bound: Option<f64>,
}

pub fn rm_rhs(eps: &WeightFunction, n_max: u64) -> RmRhs {
    let mut acc = 0.0;
    for n in 0..=n_max {
        let l = (n as f64 + 2.0).ln();
        let e = eps.eval(n);
        acc += e * e * l * l;
    }
    let (convergent, tail_bound) = match *eps {
        WeightFunction::Constant { value } => (value == 0.0, None),
        WeightFunction::PowerLog { alpha, beta, eta } => {
            // summand ~ (n+1)^{-2α} ln(n+2)^{-γ}, γ = 2β + 2η − 2
            let gamma = 2.0 * (beta + eta) - 2.0;
            let x = n_max as f64 + 1.0;
            if 2.0 * alpha > 1.0 {
                let tail = (gamma >= 0.0)
                    .then(|| x.powf(1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0) * (x + 1.0).ln().powf(-gamma));
                (true, tail)
            } else if 2.0 * alpha == 1.0 && gamma > 1.0 {
                // ∫_{N_max}^∞ dt / ((t+1) ln(t+1)^γ) = ln(N_max+1)^{1−γ}/(γ−1)
                (true, Some(x.ln().powf(1.0 - gamma) / (gamma - 1.0)))
            } else {
                (false, None)
            }
        }
    };
    RmRhs { partial: acc.sqrt(), convergent, tail_bound }
}

/// `b_N^{-1} Σ_{n<N} b_n a_n`, exact; `b` must hold at least `N + 1` terms.
pub fn kronecker_limit(a: &[BigRational], b: &[BigRational], n: usize) -> Result<BigRational> {
    if n == 0 || a.len() < n || b.len() <= n {
        return Err(Error::InvalidInput(
            "kronecker_limit needs N >= 1, N terms of a and N + 1 terms of b".into(),
        ));
    }
    if b[..=n].iter().any(|x| !x.is_positive()) || b[..=n].windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("b must be positive and nondecreasing".into()));
    }
    let sum = a[..n]
        .iter()
        .zip(&b[..n])
        .fold(BigRational::zero(), |s, (x, y)| s + x * y);
    Ok(sum / &b[n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::One;
    use proptest::prelude::*;

    #[test]
    fn impulse() {
        let eps = WeightFunction::standard(0.1);
        let mut s = vec![0.0; 50];
        s[0] = 1.0;
        let p = weighted_maximal_pair(&s, &eps).unwrap();
        assert_eq!(p.s_value, eps.eval(1));
        assert_eq!(p.s_tilde_value, eps.eval(0));
        assert!(p.holds());
    }

    #[test]
    fn alternating_signs() {
        let eps = WeightFunction::standard(0.0);
        let s: Vec<f64> = (0..1000).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let p = weighted_maximal_pair(&s, &eps).unwrap();
        assert!(p.holds());
        assert!(p.slack() > 0.0);
    }

    #[test]
    fn rm_flags() {
        assert!(!rm_rhs(&WeightFunction::Constant { value: 1.0 }, 1000).convergent);
        let ok = rm_rhs(&WeightFunction::standard(0.1), 1000);
        assert!(ok.convergent);
        assert!(ok.tail_bound.unwrap().is_finite());
        assert!(!rm_rhs(&WeightFunction::standard(0.0), 1000).convergent);
        assert!(rm_rhs(&WeightFunction::power_log(0.6, 0.0, 0.0), 10).convergent);
    }

    #[test]
    fn rm_partial_sums_stabilize() {
        let eps = WeightFunction::standard(1.0);
        let a = rm_rhs(&eps, 1 << 12);
        let b = rm_rhs(&eps, 1 << 16);
        assert!(b.partial >= a.partial);
        assert!(b.partial * b.partial - a.partial * a.partial <= a.tail_bound.unwrap());
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn kronecker_alternating() {
        let n = 10_000;
        let b: Vec<_> = (0..=n).map(|i| q(i as i64 + 1)).collect();
        // Σ (−1)^n/(n+1) converges; Σ_{n<N} b_n a_n = Σ (−1)^n ∈ {0, 1}
        let a: Vec<_> = (0..n)
            .map(|i| BigRational::new(BigInt::from(if i % 2 == 0 { 1 } else { -1 }), BigInt::from(i + 1)))
            .collect();
        assert!(kronecker_limit(&a, &b, n).unwrap().is_zero());
        let odd = kronecker_limit(&a, &b, n - 1).unwrap();
        assert_eq!(odd, BigRational::new(BigInt::one(), BigInt::from(n)));
        // without convergence of Σ a_n the limit is not 0: here −N / (2(N+1))
        let signs: Vec<_> = (0..n).map(|i| q(if i % 2 == 0 { 1 } else { -1 })).collect();
        assert_eq!(
            kronecker_limit(&signs, &b, n).unwrap(),
            BigRational::new(BigInt::from(-(n as i64)), BigInt::from(2 * (n as i64 + 1)))
        );
        let zero = vec![BigRational::zero(); n];
        assert!(kronecker_limit(&zero, &b, n).unwrap().is_zero());
    }

    #[test]
    fn kronecker_geometric_decay() {
        let m = 200;
        let a: Vec<_> = (0..m).map(|i| BigRational::new(BigInt::one(), BigInt::one() << i)).collect();
        let b: Vec<_> = (0..=m).map(|i| q(i as i64 + 1)).collect();
        let vals: Vec<_> = (20..m).map(|n| kronecker_limit(&a, &b, n).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        // Σ (n+1) 2^{-n} = 4
        assert!(*vals.last().unwrap() < BigRational::new(4.into(), BigInt::from(m)));
    }

    #[test]
    fn kronecker_rejects_decreasing_b() {
        assert!(kronecker_limit(&[q(1), q(1)], &[q(2), q(3), q(1)], 2).is_err());
    }

    proptest! {
        #[test]
        fn abel_comparison(signs in prop::collection::vec(any::<bool>(), 1..400), eta in 0.0f64..2.0) {
            let s: Vec<f64> = signs.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
            let p = weighted_maximal_pair(&s, &WeightFunction::standard(eta)).unwrap();
            prop_assert!(p.holds(), "S = {} > 2 S~ = {}", p.s_value, 2.0 * p.s_tilde_value);
        }
    }
}
