//! Rate profiles `√N (ln(1+N))^{-3/2-η} · deviation` on a geometric checkpoint grid.

use serde::Serialize;

/// `√N (ln(1+N))^{-3/2-η}`.
pub fn rate_weight(n: u64, eta: f64) -> f64 {
    let n = n as f64;
    n.sqrt() * (1.0 + n).ln().powf(-1.5 - eta)
}

/// Checkpoints `n_min, 2 n_min, 4 n_min, ...` up to and including `n_max` when it is on the grid.
pub fn geometric_grid(n_min: u64, n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut n = n_min.max(1);
    while n <= n_max {
        out.push(n);
        match n.checked_mul(2) {
            Some(m) => n = m,
            None => break,
        }
    }
    out
}

/// Default grid: ratio 2 from 2 to `n_max`.
pub fn default_grid(n_max: u64) -> Vec<u64> {
    geometric_grid(2, n_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub n: u64,
    pub deviation: f64,
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSeries {
    pub eta: f64,
    pub points: Vec<RatePoint>,
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn ratio(last: f64, first: f64) -> f64 {
    if first > 0.0 {
        last / first
    } else if last > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

impl RateSeries {
    pub fn new(eta: f64) -> Self {
        Self { eta, points: Vec::new() }
    }

    /// Records a checkpoint; checkpoints must be pushed in increasing order.
    pub fn push(&mut self, n: u64, deviation: f64) {
        debug_assert!(self.points.last().is_none_or(|p| p.n < n));
        self.points.push(RatePoint { n, deviation, weighted: rate_weight(n, self.eta) * deviation });
    }

    pub fn from_deviations(eta: f64, pairs: impl IntoIterator<Item = (u64, f64)>) -> Self {
        let mut s = Self::new(eta);
        for (n, d) in pairs {
            s.push(n, d);
        }
        s
    }

    /// Same deviations re-weighted with another `η`.
    pub fn reweighted(&self, eta: f64) -> Self {
        Self::from_deviations(eta, self.points.iter().map(|p| (p.n, p.deviation)))
    }

    /// Max weighted value over the last geometric decade of checkpoints
    /// (`N > N_last / 10`) divided by the max over the first (`N < 10 N_first`).
    pub fn envelope_statistic(&self) -> f64 {
        let (Some(first), Some(last)) = (self.points.first(), self.points.last()) else {
            return 0.0;
        };
        let lo = max_of(self.points.iter().filter(|p| p.n < 10 * first.n).map(|p| p.weighted));
        let hi = max_of(self.points.iter().filter(|p| p.n * 10 > last.n).map(|p| p.weighted));
        ratio(hi, lo)
    }

    /// Max weighted value over the second half of the checkpoints divided by the first half.
    pub fn half_statistic(&self) -> f64 {
        let mid = self.points.len() / 2;
        let lo = max_of(self.points[..mid].iter().map(|p| p.weighted));
        let hi = max_of(self.points[mid..].iter().map(|p| p.weighted));
        ratio(hi, lo)
    }

    pub fn is_increasing_grid(&self) -> bool {
        self.points.windows(2).all(|w| w[0].n < w[1].n)
    }

    pub fn all_finite(&self) -> bool {
        self.points.iter().all(|p| p.weighted.is_finite())
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["N", "deviation", "weighted"])?;
        for p in &self.points {
            wr.write_record([p.n.to_string(), format!("{:e}", p.deviation), format!("{:e}", p.weighted)])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}
