//! One runner per experiment kind. Each runner takes its merged parameters and returns
//! checks, measured values and output files; `main` turns that into a report.

use std::collections::BTreeMap;

use ergoshift::battery::{shell_coverage_failures, Check, Relation};
use ergoshift::classical::{
    baker_rate_series, laguerre_mean_check, laguerre_pointwise_rate, walsh_shift_check, DyadicPoint, LaguerreCoeffs,
    WalshExpansion, WalshIndexSet,
};
use ergoshift::io::{lattice_csv, parse_coeff_vector, parse_fourier, parse_laguerre, parse_walsh, LatticeRow};
use ergoshift::lattice::matrix::{ball2, int_vec};
use ergoshift::lattice::reduction::{brute_force_bound, brute_force_shortest_sq};
use ergoshift::lattice::spectral::Eigen2;
use ergoshift::lattice::{classify, delta_growth, IntMatrix, ShellPartition};
use ergoshift::prime::random_prime;
use ergoshift::rate::{default_grid, RateSeries};
use ergoshift::shift::{banach_witness, norm_bound_check, rm_rhs, weighted_maximal_pair, WeightFunction};
use ergoshift::torus::{
    boundary_shell_measure, dyadic_modulus_bound, indicator_discrepancy, modulus_profile, rate_series,
    DisplacementSampler, DomainIndicator, FourierFunction, TorusPoint,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{require_matrix, MatrixSpec, NumberList};
use crate::CliError;

/// What an experiment produced.
pub struct Outcome {
    pub checks: Vec<Check>,
    pub measured: Value,
    pub files: Vec<(String, String)>,
}

/// Arithmetic the run uses, after `--exact`/`--float` have been reconciled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Exact,
    Float,
}

impl std::fmt::Display for Arithmetic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::Float => "float",
        })
    }
}

/// Randomness handed to experiments that need it; `None` when no seed was given.
pub struct Env {
    pub rng: Option<ChaCha8Rng>,
    pub arithmetic: Arithmetic,
    pub threads: usize,
}

impl Env {
    pub fn rng(&mut self, what: &str) -> Result<&mut ChaCha8Rng, CliError> {
        self.rng
            .as_mut()
            .ok_or_else(|| CliError::Config(format!("{what} needs a seed: pass --seed or set `seed` in the config")))
    }
}

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))
}

fn count(n: usize) -> f64 {
    n as f64
}

fn ratio_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn envelope_check(series: &RateSeries) -> Check {
    Check::new("envelope statistic", series.envelope_statistic(), Relation::Lt, 1.0)
}

// classify

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyParams {
    pub matrix: Option<MatrixSpec>,
}

pub fn classify_run(p: &ClassifyParams) -> Result<Outcome, CliError> {
    let a = require_matrix(&p.matrix)?;
    let c = classify(&a);
    let eigen = match &c.eigen {
        Some(Eigen2::Real { small, large }) => json!({"small": small.to_string(), "large": large.to_string()}),
        Some(Eigen2::Complex { trace, disc }) => {
            json!({"complex": format!("({trace} ± sqrt({disc})) / 2")})
        }
        None => Value::Null,
    };
    Ok(Outcome {
        checks: Vec::new(),
        measured: json!({
            "tag": c.tag,
            "ergodic": c.tag.is_ergodic(),
            "trace": c.trace.to_string(),
            "det": c.det.to_string(),
            "cyclotomic_orders": c.cyclotomic_orders,
            "eigenvalues": eigen,
        }),
        files: Vec::new(),
    })
}

// orbits

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitsParams {
    pub matrix: Option<MatrixSpec>,
    pub radius: i64,
}

impl Default for OrbitsParams {
    fn default() -> Self {
        Self { matrix: None, radius: 10 }
    }
}

pub fn orbits_run(p: &OrbitsParams) -> Result<Outcome, CliError> {
    let a = require_matrix(&p.matrix)?;
    if a.dim() != 2 || p.radius < 1 {
        return Err(CliError::Config("orbits needs a 2x2 matrix and radius >= 1".into()));
    }
    let partition = ShellPartition::new(&a)?;
    let mut rows = Vec::new();
    for xi in ball2(p.radius) {
        let v = int_vec(&xi);
        let label = partition.label(&v)?;
        let rep = label.representative.map_or_else(String::new, |r| format!("{} {}", r[0], r[1]));
        rows.push(LatticeRow::new(&v, label.k, rep));
    }
    let (failures, total) = shell_coverage_failures(&a, p.radius)?;
    Ok(Outcome {
        checks: vec![Check::new(
            format!("shell labels failing the independent oracle ({total} vectors)"),
            count(failures),
            Relation::Eq,
            0.0,
        )],
        measured: json!({"bilateral": partition.is_bilateral(), "vectors": total}),
        files: vec![("orbits.csv".into(), lattice_csv(&rows))],
    })
}

// delta

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeltaParams {
    pub matrix: Option<MatrixSpec>,
    pub k_max: u32,
    /// Work limit for the brute-force comparison at each level.
    pub brute_force_budget: u64,
}

impl Default for DeltaParams {
    fn default() -> Self {
        Self { matrix: None, k_max: 8, brute_force_budget: 1_000_000 }
    }
}

pub fn delta_run(p: &DeltaParams) -> Result<Outcome, CliError> {
    let a = require_matrix(&p.matrix)?;
    let growth = delta_growth(&a, p.k_max)?;
    let mut csv = String::from("k,delta_sq,normalized,brute_force\n");
    let mut power = IntMatrix::identity(a.dim());
    let (mut compared, mut mismatches) = (0, 0);
    for (k, (d, n)) in growth.delta_sq.iter().zip(&growth.normalized).enumerate() {
        let brute = brute_force_bound(d).and_then(|b| brute_force_shortest_sq(&power, b, p.brute_force_budget));
        if let Some(b) = &brute {
            compared += 1;
            mismatches += usize::from(b != d);
        }
        let b = brute.map_or_else(String::new, |b| b.to_string());
        csv.push_str(&format!("{k},{d},{n},{b}\n"));
        power = power.mul(&a);
    }
    Ok(Outcome {
        checks: vec![Check::new(
            format!("delta_k mismatches against brute force ({compared} levels compared)"),
            count(mismatches),
            Relation::Eq,
            0.0,
        )],
        measured: json!({
            "min_normalized": growth.min_normalized().to_string(),
            "min_normalized_f64": ratio_f64(growth.min_normalized()),
        }),
        files: vec![("delta.csv".into(), csv)],
    })
}

// rate

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Toral,
    Baker,
    Laguerre,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateParams {
    pub system: System,
    pub n_max: u64,
    pub eta: f64,
    /// Toral system.
    pub matrix: Option<MatrixSpec>,
    /// Fourier coefficient file; when absent the single character `xi` is used.
    pub fourier: Option<String>,
    pub xi: NumberList,
    /// Starting point; random when absent.
    pub point: Option<NumberList>,
    /// Bits of the random prime denominator in exact mode.
    pub point_bits: u64,
    /// Fixed-point width in float mode.
    pub fixed_bits: u64,
    /// Baker system: Walsh expansion file, or a single Walsh function given by `indices`.
    pub walsh: Option<String>,
    pub indices: NumberList,
    /// Laguerre system: coefficient file, or the single polynomial `L_degree`.
    pub laguerre: Option<String>,
    pub degree: usize,
    pub x: String,
}

impl Default for RateParams {
    fn default() -> Self {
        Self {
            system: System::Toral,
            n_max: 1 << 16,
            eta: 0.5,
            matrix: None,
            fourier: None,
            xi: vec![1, 0].into(),
            point: None,
            point_bits: 2048,
            fixed_bits: 256,
            walsh: None,
            indices: vec![1].into(),
            laguerre: None,
            degree: 0,
            x: "1".into(),
        }
    }
}

pub fn rate_run(p: &RateParams, env: &mut Env) -> Result<Outcome, CliError> {
    if p.n_max < 2 || !p.eta.is_finite() || p.eta <= 0.0 {
        return Err(CliError::Config("rate needs n_max >= 2 and eta > 0".into()));
    }
    let grid = default_grid(p.n_max);
    let (series, measured) = match p.system {
        System::Toral => {
            let a = require_matrix(&p.matrix)?;
            let f = fourier_function(p.fourier.as_deref(), &p.xi, a.dim())?;
            let x = torus_point(p.point.as_ref(), a.dim(), [p.point_bits, p.fixed_bits], env)?;
            let r = rate_series(&f, &a, &x, p.eta, &grid)?;
            let m = json!({"max_error": r.max_error, "period": r.period, "half_statistic": r.half_statistic});
            (r.series, m)
        }
        System::Baker => {
            let f = match &p.walsh {
                Some(path) => parse_walsh(&read(path)?)?,
                None => single_walsh(&p.indices)?,
            };
            let max_x = f.keys().map(WalshIndexSet::max_x).max().unwrap_or(0);
            let point = DyadicPoint::random(p.n_max as usize + 64 + max_x, 64, env.rng("a random dyadic point")?);
            let s = baker_rate_series(&f, &point, p.eta, &grid)?;
            (s, json!({"x_bits": point.x_len(), "y_bits": point.y_len()}))
        }
        System::Laguerre => {
            let c = laguerre_coeffs(p.laguerre.as_deref(), p.degree)?;
            let x = ergoshift::io::parse_rational(&p.x)?;
            if !x.is_positive() {
                return Err(CliError::Config("the Laguerre point x must be positive".into()));
            }
            (laguerre_pointwise_rate(&c, &x, p.eta, &grid)?, json!({}))
        }
    };
    let mut measured = measured;
    measured["envelope"] = json!(series.envelope_statistic());
    measured["half_statistic"] = json!(series.half_statistic());
    Ok(Outcome {
        checks: vec![envelope_check(&series)],
        measured,
        files: vec![("rate.csv".into(), series.to_csv_string())],
    })
}

fn fourier_function(path: Option<&str>, xi: &NumberList, dim: usize) -> Result<FourierFunction, CliError> {
    let f = match path {
        Some(path) => parse_fourier(&read(path)?)?,
        None => FourierFunction::character(&xi.integers("xi")?),
    };
    if f.dim() != dim {
        return Err(CliError::Config(format!("function lives on T^{} but the matrix is {dim}x{dim}", f.dim())));
    }
    Ok(f)
}

/// `bits` is `[prime bits, fixed-point bits]`.
fn torus_point(given: Option<&NumberList>, dim: usize, bits: [u64; 2], env: &mut Env) -> Result<TorusPoint, CliError> {
    let float = env.arithmetic == Arithmetic::Float;
    match given {
        Some(list) => {
            let coords = list.rationals("point")?;
            if coords.len() != dim {
                return Err(CliError::Config(format!("point needs {dim} coordinates")));
            }
            if float {
                let xs: Vec<f64> = coords.iter().map(ratio_f64).collect();
                return Ok(TorusPoint::fixed_from_f64(&xs, bits[1])?);
            }
            let den = coords.iter().fold(BigInt::from(1), |l, c| num_integer::Integer::lcm(&l, c.denom()));
            let num = coords.iter().map(|c| c.numer() * (&den / c.denom())).collect();
            Ok(TorusPoint::rational(num, den)?)
        }
        None if float => {
            let rng = env.rng("a random starting point")?;
            let xs: Vec<f64> = (0..dim).map(|_| rng.gen()).collect();
            Ok(TorusPoint::fixed_from_f64(&xs, bits[1])?)
        }
        None => {
            let rng = env.rng("a random starting point")?;
            let prime = BigInt::from(random_prime(bits[0], rng));
            Ok(TorusPoint::random_with_denominator(dim, &prime, rng))
        }
    }
}

fn single_walsh(indices: &NumberList) -> Result<WalshExpansion, CliError> {
    let idx = WalshIndexSet::new(indices.integers("indices")?)?;
    Ok(WalshExpansion::from([(idx, BigRational::from_integer(1.into()))]))
}

fn laguerre_coeffs(path: Option<&str>, degree: usize) -> Result<LaguerreCoeffs, CliError> {
    match path {
        Some(path) => Ok(parse_laguerre(&read(path)?)?),
        None => Ok(LaguerreCoeffs::from([(degree, BigRational::from_integer(1.into()))])),
    }
}

// walsh

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalshParams {
    pub indices: NumberList,
    pub samples: usize,
}

impl Default for WalshParams {
    fn default() -> Self {
        Self { indices: vec![1].into(), samples: 10_000 }
    }
}

pub fn walsh_run(p: &WalshParams, env: &mut Env) -> Result<Outcome, CliError> {
    let idx = WalshIndexSet::new(p.indices.integers("indices")?)?;
    let holds = walsh_shift_check(&idx, p.samples, env.rng("the Walsh shift check")?);
    Ok(Outcome {
        checks: vec![Check::decided(
            format!("w_S(B p) = w_(S+1)(p) on {} random points", p.samples),
            f64::from(u8::from(holds)),
            Relation::Eq,
            1.0,
            holds,
        )],
        measured: json!({"labels": idx.labels(), "shifted": idx.shifted().indices()}),
        files: Vec::new(),
    })
}

// laguerre

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaguerreParams {
    pub laguerre: Option<String>,
    pub degree: usize,
    pub n_max: u64,
}

impl Default for LaguerreParams {
    fn default() -> Self {
        Self { laguerre: None, degree: 3, n_max: 64 }
    }
}

pub fn laguerre_run(p: &LaguerreParams) -> Result<Outcome, CliError> {
    let c = laguerre_coeffs(p.laguerre.as_deref(), p.degree)?;
    let mut grid = vec![1];
    grid.extend(default_grid(p.n_max));
    let mut csv = String::from("N,lhs_sq,rhs_sq,lhs,rhs,equality\n");
    let mut violations = 0;
    for n in grid {
        let m = laguerre_mean_check(&c, n)?;
        violations += usize::from(!m.holds);
        csv.push_str(&format!("{n},{},{},{:e},{:e},{}\n", m.lhs_sq, m.rhs_sq, m.lhs, m.rhs, m.equality));
    }
    Ok(Outcome {
        checks: vec![Check::new("N with ||U_N f|| > N^(-1/2) sum |c_k| (exact)", count(violations), Relation::Eq, 0.0)],
        measured: json!({"terms": c.len()}),
        files: vec![("laguerre.csv".into(), csv)],
    })
}

// norm

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormParams {
    pub coeffs: Option<String>,
    pub n_max: u64,
}

impl Default for NormParams {
    fn default() -> Self {
        Self { coeffs: None, n_max: 1024 }
    }
}

pub fn norm_run(p: &NormParams) -> Result<Outcome, CliError> {
    let path = p.coeffs.as_deref().ok_or_else(|| CliError::Config("`coeffs` (a coefficient vector file) is required".into()))?;
    let v = parse_coeff_vector(&read(path)?)?;
    let mut grid = vec![1];
    grid.extend(default_grid(p.n_max));
    let mut csv = String::from("N,lhs,rhs,lhs_sq,holds,equality\n");
    let (mut violations, mut equalities) = (0, 0);
    for n in grid {
        let b = norm_bound_check(&v, n)?;
        violations += usize::from(!b.holds);
        equalities += usize::from(b.equality);
        csv.push_str(&format!("{n},{:e},{:e},{},{},{}\n", b.lhs, b.rhs, b.lhs_sq, b.holds, b.equality));
    }
    Ok(Outcome {
        checks: vec![Check::new("exact violations of ||U_N f|| <= N^(-1/2) sum_k ||P_k f||", count(violations), Relation::Eq, 0.0)],
        measured: json!({"single_shell": v.is_single_shell(), "equalities": equalities}),
        files: vec![("norm_bound.csv".into(), csv)],
    })
}

// modulus

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModulusParams {
    pub fourier: Option<String>,
    /// Used when no file is given: a box indicator when `lo`/`hi` are set, else the character `xi`.
    pub xi: NumberList,
    pub lo: Option<NumberList>,
    pub hi: Option<NumberList>,
    pub trunc: i64,
    pub alpha: f64,
    pub depths: NumberList,
    pub directions: usize,
}

impl Default for ModulusParams {
    fn default() -> Self {
        Self {
            fourier: None,
            xi: vec![1, 0].into(),
            lo: None,
            hi: None,
            trunc: 64,
            alpha: 1.0,
            depths: vec![8, 16].into(),
            directions: 8,
        }
    }
}

pub fn modulus_run(p: &ModulusParams, env: &mut Env) -> Result<Outcome, CliError> {
    let f = match (&p.fourier, &p.lo, &p.hi) {
        (Some(path), _, _) => parse_fourier(&read(path)?)?,
        (None, Some(lo), Some(hi)) => {
            let (lo, hi) = (lo.pair("lo")?, hi.pair("hi")?);
            let to = |v: &[BigRational; 2]| [ratio_f64(&v[0]), ratio_f64(&v[1])];
            FourierFunction::box_indicator(to(&lo), to(&hi), p.trunc)
        }
        (None, None, None) => FourierFunction::character(&p.xi.integers("xi")?),
        _ => return Err(CliError::Config("a box needs both `lo` and `hi`".into())),
    };
    let depths = p.depths.integers("depths")?;
    if depths.is_empty() || depths.iter().any(|&d| !(0..=40).contains(&d)) {
        return Err(CliError::Config("depths must be integers in 0..=40".into()));
    }
    let sampler = DisplacementSampler::new(f.dim(), p.directions, env.rng("the displacement sampler")?);
    let mut csv = String::from("J,lhs,rhs,ratio\n");
    let mut ratios = Vec::new();
    for &d in &depths {
        let b = dyadic_modulus_bound(&f, p.alpha, d as u32, &sampler)?;
        csv.push_str(&format!("{d},{:e},{:e},{:e}\n", b.lhs, b.rhs, b.ratio));
        ratios.push(b.ratio);
    }
    let deepest = *depths.iter().max().expect("non-empty") as i32;
    let ts: Vec<f64> = (0..=deepest).rev().map(|j| 2f64.powi(-j)).collect();
    let mut profile = String::from("t,omega,samples\n");
    for m in modulus_profile(&f, &ts, &sampler)? {
        profile.push_str(&format!("{:e},{:e},{}\n", m.t, m.omega, m.samples));
    }
    let mut checks = vec![Check::new("ratio lhs / rhs at the first depth", ratios[0], Relation::Lt, f64::INFINITY)];
    if let [first, .., last] = ratios[..] {
        checks.push(Check::new("relative change of the ratio across depths", (last - first).abs() / first, Relation::Lt, 0.1));
    }
    Ok(Outcome {
        checks,
        measured: json!({"ratios": ratios}),
        files: vec![("modulus.csv".into(), csv), ("modulus_profile.csv".into(), profile)],
    })
}

// discrepancy

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Full,
    Box,
    Disk,
    Polygon,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscrepancyParams {
    pub matrix: Option<MatrixSpec>,
    pub domain: DomainKind,
    pub lo: NumberList,
    pub hi: NumberList,
    pub center: NumberList,
    pub radius: String,
    /// Flattened `x1, y1, x2, y2, ...`, counter-clockwise.
    pub vertices: NumberList,
    pub point: Option<NumberList>,
    pub point_bits: u64,
    pub n_max: u64,
    pub eta: f64,
    /// Widths at which the boundary shell measure is estimated.
    pub shell_t: NumberList,
    pub shell_samples: usize,
}

impl Default for DiscrepancyParams {
    fn default() -> Self {
        Self {
            matrix: None,
            domain: DomainKind::Box,
            lo: "0,0".into(),
            hi: "1/2,1/2".into(),
            center: "1/2,1/2".into(),
            radius: "1/4".into(),
            vertices: "0,0,1/2,0,0,1/2".into(),
            point: None,
            point_bits: 2048,
            n_max: 1 << 16,
            eta: 0.5,
            shell_t: NumberList::Text(String::new()),
            shell_samples: 100_000,
        }
    }
}

fn domain(p: &DiscrepancyParams) -> Result<DomainIndicator, CliError> {
    Ok(match p.domain {
        DomainKind::Full => DomainIndicator::Full,
        DomainKind::Box => DomainIndicator::new_box(p.lo.pair("lo")?, p.hi.pair("hi")?)?,
        DomainKind::Disk => {
            DomainIndicator::new_disk(p.center.pair("center")?, ergoshift::io::parse_rational(&p.radius)?)?
        }
        DomainKind::Polygon => {
            let flat = p.vertices.rationals("vertices")?;
            if flat.len() % 2 != 0 {
                return Err(CliError::Config("vertices must be x, y pairs".into()));
            }
            DomainIndicator::new_polygon(flat.chunks(2).map(|c| [c[0].clone(), c[1].clone()]).collect())?
        }
    })
}

pub fn discrepancy_run(p: &DiscrepancyParams, env: &mut Env) -> Result<Outcome, CliError> {
    let a = require_matrix(&p.matrix)?;
    let omega = domain(p)?;
    if p.n_max < 2 {
        return Err(CliError::Config("discrepancy needs n_max >= 2".into()));
    }
    let x = torus_point(p.point.as_ref(), 2, [p.point_bits, 0], env)?;
    let d = indicator_discrepancy(&omega, &a, &x, &default_grid(p.n_max), p.eta)?;
    let mut files = vec![("discrepancy.csv".into(), d.series.to_csv_string())];
    let ts = p.shell_t.rationals("shell_t")?;
    let mut shells = Vec::new();
    if !ts.is_empty() {
        let rng = env.rng("the boundary shell estimate")?;
        let mut csv = String::from("t,estimate,std_error,samples\n");
        for t in &ts {
            let s = boundary_shell_measure(&omega, ratio_f64(t), p.shell_samples, rng)?;
            csv.push_str(&format!("{:e},{:e},{:e},{}\n", s.t, s.estimate, s.std_error, s.samples));
            shells.push(s);
        }
        files.push(("boundary_shell.csv".into(), csv));
    }
    Ok(Outcome {
        checks: vec![envelope_check(&d.series)],
        measured: json!({
            "measure": d.measure,
            "envelope": d.envelope,
            "half_statistic": d.series.half_statistic(),
            "period": d.period,
            "boundary_shell": shells,
        }),
        files,
    })
}

// maximal

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaximalParams {
    /// Explicit sequence; a random ±1 sequence of `length` terms when absent.
    pub sequence: Option<Vec<f64>>,
    pub length: usize,
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
}

impl Default for MaximalParams {
    fn default() -> Self {
        Self { sequence: None, length: 1000, alpha: 0.5, beta: 1.5, eta: 0.5 }
    }
}

pub fn maximal_run(p: &MaximalParams, env: &mut Env) -> Result<Outcome, CliError> {
    let s: Vec<f64> = match &p.sequence {
        Some(s) => s.clone(),
        None => {
            let rng = env.rng("a random sign sequence")?;
            (0..p.length).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect()
        }
    };
    let eps = WeightFunction::power_log(p.alpha, p.beta, p.eta);
    if !eps.is_positive_decreasing() {
        return Err(CliError::Config("the weight must be positive and decreasing".into()));
    }
    let pair = weighted_maximal_pair(&s, &eps)?;
    let rhs = rm_rhs(&eps, s.len() as u64);
    Ok(Outcome {
        checks: vec![Check::decided(
            "S <= 2 S~",
            pair.s_value,
            Relation::Le,
            2.0 * pair.s_tilde_value,
            pair.holds(),
        )],
        measured: json!({"pair": pair, "rademacher_menshov_rhs": rhs, "length": s.len()}),
        files: Vec::new(),
    })
}

// witness

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessParams {
    pub n: u64,
    pub h: NumberList,
}

impl Default for WitnessParams {
    fn default() -> Self {
        Self { n: 4, h: vec![10, 100, 1_000, 10_000, 100_000].into() }
    }
}

pub fn witness_run(p: &WitnessParams) -> Result<Outcome, CliError> {
    let hs = p.h.integers("h")?;
    if hs.is_empty() || hs.iter().any(|&h| h < 0) {
        return Err(CliError::Config("h must be a non-empty list of non-negative integers".into()));
    }
    let mut csv = String::from("H,ratio_sq,ratio\n");
    let mut ratios = BTreeMap::new();
    let mut above_one = 0;
    for &h in &hs {
        let r = banach_witness(h as u64, p.n)?;
        above_one += usize::from(r > BigRational::from_integer(1.into()));
        let f = ratio_f64(&r).sqrt();
        csv.push_str(&format!("{h},{r},{f:e}\n"));
        ratios.insert(h.to_string(), f);
    }
    Ok(Outcome {
        checks: vec![Check::new("witnesses with ||U_N f|| > ||f|| (exact)", count(above_one), Relation::Eq, 0.0)],
        measured: json!({"ratios": ratios}),
        files: vec![("banach_witness.csv".into(), csv)],
    })
}
