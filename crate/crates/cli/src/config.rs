//! Experiment configuration: a TOML file (`kind = "..."`, optional `seed`, then the
//! parameters) overlaid with command-line flags.

use std::path::Path;

use ergoshift::io::{matrix_from_numbers, parse_matrix, parse_rational, Number};
use ergoshift::lattice::IntMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Parsed config file, split into its header and the parameter table.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    pub kind: Option<String>,
    pub seed: Option<u64>,
    pub params: toml::Table,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut params: toml::Table = text.parse().map_err(|e| CliError::Config(format!("malformed config: {e}")))?;
        let kind = match params.remove("kind") {
            None => None,
            Some(toml::Value::String(s)) => Some(s),
            Some(other) => return Err(CliError::Config(format!("`kind` must be a string, got {other}"))),
        };
        let seed = match params.remove("seed") {
            None => None,
            Some(toml::Value::Integer(s)) if s >= 0 => Some(s as u64),
            Some(other) => return Err(CliError::Config(format!("`seed` must be a non-negative integer, got {other}"))),
        };
        Ok(Self { kind, seed, params })
    }
}

/// Parameters from the file with every flag that was given on the command line laid on top.
pub fn merge<P: DeserializeOwned, A: Serialize>(file: &toml::Table, flags: &A) -> Result<P, CliError> {
    let mut table = file.clone();
    let overlay = toml::Value::try_from(flags).map_err(|e| CliError::Config(format!("bad flag value: {e}")))?;
    if let toml::Value::Table(t) = overlay {
        table.extend(t);
    }
    toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(format!("invalid parameters: {}", e.message())))
}

/// A matrix given as TOML/JSON rows or as a JSON string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Rows(Vec<Vec<Number>>),
    Json(String),
}

impl MatrixSpec {
    pub fn to_matrix(&self) -> Result<IntMatrix, CliError> {
        let m = match self {
            Self::Rows(rows) => matrix_from_numbers(rows),
            Self::Json(text) => parse_matrix(text),
        };
        m.map_err(|e| CliError::Config(format!("matrix: {e}")))
    }
}

pub fn require_matrix(m: &Option<MatrixSpec>) -> Result<IntMatrix, CliError> {
    m.as_ref()
        .ok_or_else(|| CliError::Config("`matrix` is required, e.g. --matrix '[[1,1],[1,0]]'".into()))?
        .to_matrix()
}

/// A list of numbers given as an array or as comma-separated text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberList {
    List(Vec<Number>),
    Text(String),
}

impl NumberList {
    fn items(&self) -> Vec<Number> {
        match self {
            Self::List(v) => v.clone(),
            Self::Text(s) if s.trim().is_empty() => Vec::new(),
            Self::Text(s) => s.split(',').map(|t| Number::Text(t.trim().to_string())).collect(),
        }
    }

    pub fn rationals(&self, what: &str) -> Result<Vec<BigRational>, CliError> {
        self.items()
            .iter()
            .map(|n| match n {
                Number::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
                Number::Text(s) => parse_rational(s),
            })
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(format!("{what}: {e}")))
    }

    pub fn integers(&self, what: &str) -> Result<Vec<i64>, CliError> {
        self.items()
            .iter()
            .map(|n| match n {
                Number::Int(v) => Ok(*v),
                Number::Text(s) => s.parse::<i64>().map_err(|_| format!("not an integer: {s:?}")),
            })
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(format!("{what}: {e}")))
    }

    pub fn pair(&self, what: &str) -> Result<[BigRational; 2], CliError> {
        let v = self.rationals(what)?;
        <[BigRational; 2]>::try_from(v).map_err(|_| CliError::Config(format!("{what}: expected two coordinates")))
    }
}

impl From<Vec<i64>> for NumberList {
    fn from(v: Vec<i64>) -> Self {
        Self::List(v.into_iter().map(Number::Int).collect())
    }
}

impl From<&str> for NumberList {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}
