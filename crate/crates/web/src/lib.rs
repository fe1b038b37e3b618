//! Browser bindings: each export takes plain numbers and strings and returns JSON for
//! the page in `www/` to draw.

use ergoshift::classical::{laguerre_pointwise_rate, LaguerreCoeffs};
use ergoshift::io::{parse_matrix, parse_rational};
use ergoshift::lattice::matrix::{ball2, int_vec};
use ergoshift::lattice::{classify, ShellPartition};
use ergoshift::prime::random_prime;
use ergoshift::rate::{default_grid, RateSeries};
use ergoshift::torus::{rate_series, FourierFunction, TorusPoint};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest N the page may request; keeps a click under a few seconds.
pub const MAX_STEPS: u64 = 1 << 18;

#[derive(Serialize)]
struct RateView<'a> {
    envelope: f64,
    half_statistic: f64,
    series: &'a RateSeries,
}

fn rate_view(series: &RateSeries) -> String {
    let view = RateView { envelope: series.envelope_statistic(), half_statistic: series.half_statistic(), series };
    serde_json::to_string(&view).expect("serializable")
}

fn check_steps(n_max: u32, eta: f64) -> Result<(), String> {
    if !(2..=MAX_STEPS).contains(&u64::from(n_max)) {
        return Err(format!("N must be between 2 and {MAX_STEPS}"));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err("eta must be positive".into());
    }
    Ok(())
}

/// Rate profile of the character `e(ξ·x)` along the orbit of a random rational point
/// (512-bit prime denominator) under `matrix`.
pub fn toral_rate_json(matrix: &str, xi1: i32, xi2: i32, n_max: u32, eta: f64, seed: u32) -> Result<String, String> {
    check_steps(n_max, eta)?;
    let a = parse_matrix(matrix).map_err(|e| e.to_string())?;
    if a.dim() != 2 {
        return Err("the demo works on T^2".into());
    }
    if (xi1, xi2) == (0, 0) {
        return Err("choose a nonzero frequency".into());
    }
    let f = FourierFunction::character(&[i64::from(xi1), i64::from(xi2)]);
    let mut rng = ChaCha8Rng::seed_from_u64(u64::from(seed));
    let prime = BigInt::from(random_prime(512, &mut rng));
    let x = TorusPoint::random_with_denominator(2, &prime, &mut rng);
    let r = rate_series(&f, &a, &x, eta, &default_grid(u64::from(n_max))).map_err(|e| e.to_string())?;
    Ok(rate_view(&r.series))
}

#[derive(Serialize)]
struct ShellCell {
    xi: [i64; 2],
    k: i64,
}

#[derive(Serialize)]
struct ShellMap {
    tag: String,
    bilateral: bool,
    radius: i64,
    cells: Vec<ShellCell>,
}

/// Shell label of every nonzero frequency with `|ξ|_∞ <= radius`.
pub fn shell_map_json(matrix: &str, radius: i32) -> Result<String, String> {
    if !(1..=40).contains(&radius) {
        return Err("radius must be between 1 and 40".into());
    }
    let a = parse_matrix(matrix).map_err(|e| e.to_string())?;
    if a.dim() != 2 {
        return Err("the demo works on T^2".into());
    }
    let tag = format!("{:?}", classify(&a).tag);
    let partition = ShellPartition::new(&a).map_err(|e| e.to_string())?;
    let radius = i64::from(radius);
    let cells = ball2(radius)
        .map(|xi| partition.label(&int_vec(&xi)).map(|l| ShellCell { xi, k: l.k }))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let map = ShellMap { tag, bilateral: partition.is_bilateral(), radius, cells };
    Ok(serde_json::to_string(&map).expect("serializable"))
}

/// Rate profile of `L_degree` under the Laguerre shift at the point `x` (a rational string).
pub fn laguerre_rate_json(degree: u32, x: &str, n_max: u32, eta: f64) -> Result<String, String> {
    check_steps(n_max, eta)?;
    if n_max > 1 << 12 {
        return Err("the Laguerre demo stops at N = 4096".into());
    }
    let x = parse_rational(x).map_err(|e| e.to_string())?;
    if !x.is_positive() {
        return Err("x must be positive".into());
    }
    let coeffs = LaguerreCoeffs::from([(degree as usize, BigRational::from_integer(1.into()))]);
    let s = laguerre_pointwise_rate(&coeffs, &x, eta, &default_grid(u64::from(n_max))).map_err(|e| e.to_string())?;
    Ok(rate_view(&s))
}

#[wasm_bindgen]
pub fn toral_rate(matrix: &str, xi1: i32, xi2: i32, n_max: u32, eta: f64, seed: u32) -> Result<String, JsError> {
    toral_rate_json(matrix, xi1, xi2, n_max, eta, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn shell_map(matrix: &str, radius: i32) -> Result<String, JsError> {
    shell_map_json(matrix, radius).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn laguerre_rate(degree: u32, x: &str, n_max: u32, eta: f64) -> Result<String, JsError> {
    laguerre_rate_json(degree, x, n_max, eta).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn toral_profile() {
        let v = parse(&toral_rate_json("[[2,1],[1,1]]", 1, 0, 1 << 12, 0.5, 7).unwrap());
        assert_eq!(v["series"]["points"].as_array().unwrap().len(), 12);
        assert!(v["envelope"].as_f64().unwrap() < 1.0);
        assert_eq!(toral_rate_json("[[2,1],[1,1]]", 1, 0, 1 << 12, 0.5, 7).unwrap(), toral_rate_json("[[2,1],[1,1]]", 1, 0, 1 << 12, 0.5, 7).unwrap());
        assert!(toral_rate_json("[[2,1],[1,1]]", 0, 0, 64, 0.5, 7).is_err());
        assert!(toral_rate_json("[[1,2,3]]", 1, 0, 64, 0.5, 7).is_err());
        assert!(toral_rate_json("[[2,1],[1,1]]", 1, 0, 1, 0.5, 7).is_err());
    }

    #[test]
    fn shell_cells() {
        let v = parse(&shell_map_json("[[2,0],[0,2]]", 4).unwrap());
        let cells = v["cells"].as_array().unwrap();
        assert_eq!(cells.len(), 80);
        let k_of = |x: i64, y: i64| cells.iter().find(|c| c["xi"] == serde_json::json!([x, y])).unwrap()["k"].as_i64().unwrap();
        assert_eq!(k_of(1, 0), 0);
        assert_eq!(k_of(2, 2), 1);
        assert_eq!(k_of(4, 0), 2);
        assert_eq!(v["bilateral"], false);
        assert!(shell_map_json("[[1,0],[0,1]]", 4).is_err());
    }

    #[test]
    fn laguerre_profile() {
        let v = parse(&laguerre_rate_json(0, "1", 1024, 0.5).unwrap());
        let pts = v["series"]["points"].as_array().unwrap();
        assert_eq!(pts[0]["n"], 2);
        assert!((pts[0]["deviation"].as_f64().unwrap() - 0.5).abs() < 1e-15);
        assert!(laguerre_rate_json(0, "-1", 64, 0.5).is_err());
        assert!(laguerre_rate_json(0, "1/0", 64, 0.5).is_err());
    }
}
