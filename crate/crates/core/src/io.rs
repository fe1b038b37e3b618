//! Serialization helpers and file formats.
//!
//! * matrices: JSON array of integer rows, e.g. `[[1,1],[1,0]]`;
//! * coefficient vectors: `{"kind": "unilateral", "fixed_part": ["0","0"], "amps": [[j, k, "re", "im"], ...]}`;
//! * trigonometric polynomials: `{"dim": 2, "coeffs": [[[x1, x2], re, im], ...]}`;
//! * Walsh expansions: `[{"indices": [-2, 1], "value": "1/2"}, ...]`;
//! * Laguerre coefficients: `[{"n": 0, "numerator": "1", "denominator": "1"}, ...]`;
//! * lattice tables: CSV `xi1,xi2,k,value` with exact decimal strings.
//!
//! Integers and rationals are accepted either as JSON integers or as strings (`"p/q"`).

use std::fmt::Display;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize, Serializer};

use crate::classical::{LaguerreCoeffs, WalshExpansion, WalshIndexSet};
use crate::error::{Error, Result};
use crate::lattice::IntMatrix;
use crate::shift::{CoeffVector, ShiftKind};
use crate::torus::FourierFunction;

/// Serializes any `Display` value (big integers, rationals) as a decimal string.
pub fn ser_display<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn ser_display_vec<T: Display, S: Serializer>(v: &[T], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

/// A JSON integer or a decimal string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Int(i64),
    Text(String),
}

impl Number {
    pub fn to_bigint(&self) -> Result<BigInt> {
        match self {
            Self::Int(v) => Ok(BigInt::from(*v)),
            Self::Text(s) => BigInt::from_str(s.trim()).map_err(|_| bad(format!("not an integer: {s:?}"))),
        }
    }

    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            Self::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
            Self::Text(s) => parse_rational(s),
        }
    }
}

impl From<&BigInt> for Number {
    fn from(v: &BigInt) -> Self {
        i64::try_from(v).map_or_else(|_| Self::Text(v.to_string()), Self::Int)
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| bad(format!("malformed JSON: {e}")))
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let d = BigInt::from_str(d.trim()).map_err(|_| bad(format!("not a rational: {s:?}")))?;
        if d.is_zero() {
            return Err(bad(format!("zero denominator in {s:?}")));
        }
        let n = BigInt::from_str(n.trim()).map_err(|_| bad(format!("not a rational: {s:?}")))?;
        Ok(BigRational::new(n, d))
    } else {
        BigInt::from_str(s).map(BigRational::from_integer).map_err(|_| bad(format!("not a rational: {s:?}")))
    }
}

pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let rows: Vec<Vec<Number>> = json(text)?;
    matrix_from_numbers(&rows)
}

pub fn matrix_from_numbers(rows: &[Vec<Number>]) -> Result<IntMatrix> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(Number::to_bigint).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    IntMatrix::from_rows(rows)
}

pub fn matrix_to_json(a: &IntMatrix) -> String {
    let rows: Vec<Vec<Number>> = a.rows().iter().map(|r| r.iter().map(Number::from).collect()).collect();
    serde_json::to_string(&rows).expect("serializable")
}

#[derive(Serialize, Deserialize)]
struct CoeffVectorFile {
    kind: ShiftKind,
    #[serde(default)]
    fixed_part: Option<[Number; 2]>,
    amps: Vec<(u32, i64, Number, Number)>,
}

pub fn parse_coeff_vector(text: &str) -> Result<CoeffVector> {
    let file: CoeffVectorFile = json(text)?;
    let mut v = CoeffVector::new(file.kind);
    if let Some([re, im]) = &file.fixed_part {
        v.set_fixed_part(num_complex::Complex::new(re.to_rational()?, im.to_rational()?));
    }
    for (j, k, re, im) in &file.amps {
        v.set(*j, *k, num_complex::Complex::new(re.to_rational()?, im.to_rational()?))?;
    }
    Ok(v)
}

pub fn coeff_vector_to_json(v: &CoeffVector) -> String {
    let text = |q: &BigRational| Number::Text(q.to_string());
    let file = CoeffVectorFile {
        kind: v.kind(),
        fixed_part: Some([text(&v.fixed_part().re), text(&v.fixed_part().im)]),
        amps: v.amps().iter().map(|(&(j, k), a)| (j, k, text(&a.re), text(&a.im))).collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

#[derive(Serialize, Deserialize)]
struct FourierFile {
    dim: usize,
    coeffs: Vec<(Vec<Number>, f64, f64)>,
}

pub fn parse_fourier(text: &str) -> Result<FourierFunction> {
    let file: FourierFile = json(text)?;
    let mut f = FourierFunction::new(file.dim);
    for (xi, re, im) in &file.coeffs {
        let xi = xi.iter().map(Number::to_bigint).collect::<Result<Vec<_>>>()?;
        f.add(xi, Complex64::new(*re, *im))?;
    }
    Ok(f)
}

pub fn fourier_to_json(f: &FourierFunction) -> String {
    let file = FourierFile {
        dim: f.dim(),
        coeffs: f.coeffs().iter().map(|(xi, c)| (xi.iter().map(Number::from).collect(), c.re, c.im)).collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

#[derive(Serialize, Deserialize)]
struct WalshTerm {
    indices: Vec<i64>,
    value: Number,
}

pub fn parse_walsh(text: &str) -> Result<WalshExpansion> {
    let terms: Vec<WalshTerm> = json(text)?;
    let mut f = WalshExpansion::new();
    for t in terms {
        let idx = WalshIndexSet::new(t.indices)?;
        if f.insert(idx.clone(), t.value.to_rational()?).is_some() {
            return Err(bad(format!("repeated Walsh index set {:?}", idx.indices())));
        }
    }
    Ok(f)
}

pub fn walsh_to_json(f: &WalshExpansion) -> String {
    let terms: Vec<WalshTerm> = f
        .iter()
        .map(|(k, v)| WalshTerm { indices: k.indices().to_vec(), value: Number::Text(v.to_string()) })
        .collect();
    serde_json::to_string_pretty(&terms).expect("serializable")
}

#[derive(Serialize, Deserialize)]
struct LaguerreTerm {
    n: usize,
    numerator: Number,
    denominator: Number,
}

pub fn parse_laguerre(text: &str) -> Result<LaguerreCoeffs> {
    let terms: Vec<LaguerreTerm> = json(text)?;
    let mut c = LaguerreCoeffs::new();
    for t in terms {
        let d = t.denominator.to_bigint()?;
        if d.is_zero() {
            return Err(bad(format!("zero denominator for L_{}", t.n)));
        }
        if c.insert(t.n, BigRational::new(t.numerator.to_bigint()?, d)).is_some() {
            return Err(bad(format!("repeated Laguerre index {}", t.n)));
        }
    }
    Ok(c)
}

pub fn laguerre_to_json(c: &LaguerreCoeffs) -> String {
    let terms: Vec<LaguerreTerm> = c
        .iter()
        .map(|(&n, v)| LaguerreTerm { n, numerator: Number::from(v.numer()), denominator: Number::from(v.denom()) })
        .collect();
    serde_json::to_string_pretty(&terms).expect("serializable")
}

/// One row of a lattice table: a frequency, an integer label and an exact value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeRow {
    pub xi1: String,
    pub xi2: String,
    pub k: i64,
    pub value: String,
}

impl LatticeRow {
    pub fn new(xi: &[BigInt], k: i64, value: impl Display) -> Self {
        Self { xi1: xi[0].to_string(), xi2: xi[1].to_string(), k, value: value.to_string() }
    }
}

pub fn lattice_csv(rows: &[LatticeRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::matrix::int_vec;

    #[test]
    fn matrices() {
        let a = parse_matrix("[[1, 1], [1, 0]]").unwrap();
        assert_eq!(a, IntMatrix::from_i64([[1, 1], [1, 0]]));
        assert_eq!(parse_matrix(&matrix_to_json(&a)).unwrap(), a);
        let big = parse_matrix(r#"[["123456789012345678901234567890", 0], [0, 1]]"#).unwrap();
        assert_eq!(parse_matrix(&matrix_to_json(&big)).unwrap(), big);
        assert!(parse_matrix("[[1, 2, 3], [4, 5, 6]]").is_err());
        assert!(parse_matrix("[[1, 2], [3]]").is_err());
        assert!(parse_matrix("not json").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational(" -3/6 ").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("7").unwrap(), BigRational::from_integer(7.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn coeff_vector_round_trip() {
        let text = r#"{"kind": "bilateral", "fixed_part": ["1/2", 0], "amps": [[0, -3, "1/3", "-2"], [1, 4, 5, 0]]}"#;
        let v = parse_coeff_vector(text).unwrap();
        assert_eq!(v.amps().len(), 2);
        assert_eq!(parse_coeff_vector(&coeff_vector_to_json(&v)).unwrap(), v);
        assert!(parse_coeff_vector(r#"{"kind": "unilateral", "amps": [[0, -1, 1, 0]]}"#).is_err());
    }

    #[test]
    fn fourier_round_trip() {
        let text = r#"{"dim": 2, "coeffs": [[[1, 0], 0.5, 0.0], [["-99999999999999999999", 3], 0.0, 1.0]]}"#;
        let f = parse_fourier(text).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(parse_fourier(&fourier_to_json(&f)).unwrap(), f);
        assert!(parse_fourier(r#"{"dim": 2, "coeffs": [[[1], 1.0, 0.0]]}"#).is_err());
        assert_eq!(f.coeff(&int_vec(&[1, 0])), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn walsh_and_laguerre_round_trip() {
        let w = parse_walsh(r#"[{"indices": [-2, 1], "value": "1/2"}, {"indices": [], "value": 3}]"#).unwrap();
        assert_eq!(parse_walsh(&walsh_to_json(&w)).unwrap(), w);
        assert!(parse_walsh(r#"[{"indices": [1, 1], "value": 1}]"#).is_err());
        let l = parse_laguerre(r#"[{"n": 0, "numerator": 1, "denominator": 1}, {"n": 3, "numerator": "-2", "denominator": "6"}]"#)
            .unwrap();
        assert_eq!(l[&3], BigRational::new((-1).into(), 3.into()));
        assert_eq!(parse_laguerre(&laguerre_to_json(&l)).unwrap(), l);
        assert!(parse_laguerre(r#"[{"n": 0, "numerator": 1, "denominator": 0}]"#).is_err());
    }

    #[test]
    fn lattice_table() {
        let rows = vec![LatticeRow::new(&int_vec(&[1, -2]), 3, BigRational::new(5.into(), 2.into()))];
        assert_eq!(lattice_csv(&rows), "xi1,xi2,k,value\n1,-2,3,5/2\n");
    }
}
