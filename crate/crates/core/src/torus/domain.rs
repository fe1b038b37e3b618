//! Domains `Ω ⊆ T^2`: exact membership, boundary distance and orbit discrepancy.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;

use super::point::{OrbitStepper, TorusPoint};
use crate::error::{Error, Result};
use crate::lattice::IntMatrix;
use crate::rate::RateSeries;

type Rat2 = [BigRational; 2];

#[derive(Debug, Clone, PartialEq)]
pub enum DomainIndicator {
    Full,
    /// `[lo_1, hi_1) × [lo_2, hi_2)` with `0 <= lo < hi <= 1`.
    Box { lo: Rat2, hi: Rat2 },
    /// Euclidean disk on the torus, `0 < r < 1/2`.
    Disk { center: Rat2, radius: BigRational },
    /// Convex polygon, vertices counterclockwise inside the unit square.
    Polygon { vertices: Vec<Rat2> },
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn f(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn cross(o: &Rat2, a: &Rat2, b: &Rat2) -> BigRational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

impl DomainIndicator {
    pub fn new_box(lo: Rat2, hi: Rat2) -> Result<Self> {
        let ok = (0..2).all(|i| !lo[i].is_negative() && lo[i] < hi[i] && hi[i] <= BigRational::one());
        if !ok {
            return Err(Error::InvalidInput("box needs 0 <= lo < hi <= 1".into()));
        }
        Ok(Self::Box { lo, hi })
    }

    /// `[0, s) × [0, s)`.
    pub fn square(side: BigRational) -> Result<Self> {
        Self::new_box([BigRational::zero(), BigRational::zero()], [side.clone(), side])
    }

    pub fn new_disk(center: Rat2, radius: BigRational) -> Result<Self> {
        if !radius.is_positive() || radius >= rat(1, 2) {
            return Err(Error::InvalidInput("disk radius must lie in (0, 1/2)".into()));
        }
        Ok(Self::Disk { center, radius })
    }

    pub fn new_polygon(vertices: Vec<Rat2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidInput("polygon needs at least 3 vertices".into()));
        }
        let inside = vertices
            .iter()
            .flatten()
            .all(|c| !c.is_negative() && *c <= BigRational::one());
        let convex = (0..n).all(|i| cross(&vertices[i], &vertices[(i + 1) % n], &vertices[(i + 2) % n]).is_positive());
        if !inside || !convex {
            return Err(Error::InvalidInput(
                "polygon must be strictly convex, counterclockwise and inside the unit square".into(),
            ));
        }
        Ok(Self::Polygon { vertices })
    }

    /// Exact measure when it is rational.
    pub fn exact_measure(&self) -> Option<BigRational> {
        match self {
            Self::Full => Some(BigRational::one()),
            Self::Box { lo, hi } => Some((&hi[0] - &lo[0]) * (&hi[1] - &lo[1])),
            Self::Disk { .. } => None,
            Self::Polygon { vertices } => {
                let n = vertices.len();
                let twice = (0..n).fold(BigRational::zero(), |s, i| {
                    let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
                    s + &a[0] * &b[1] - &b[0] * &a[1]
                });
                Some(twice / BigInt::from(2))
            }
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            Self::Disk { radius, .. } => PI * f(radius) * f(radius),
            other => f(&other.exact_measure().expect("rational measure")),
        }
    }

    /// Exact membership of the rational point `num / den`.
    pub fn contains_rational(&self, num: &[BigInt], den: &BigInt) -> bool {
        match self {
            Self::Full => true,
            Self::Box { lo, hi } => (0..2).all(|i| {
                // lo <= p/q < hi, cross-multiplied with positive denominators
                let p = &num[i];
                lo[i].numer() * den <= p * lo[i].denom() && p * hi[i].denom() < hi[i].numer() * den
            }),
            Self::Disk { center, radius } => {
                // torus displacement d_i / (den·L) reduced to [-1/2, 1/2), L the common denominator of the center
                let l = center[0].denom().lcm(center[1].denom());
                let m = den * &l;
                let mut dist_sq = BigInt::zero();
                for (i, c) in center.iter().enumerate() {
                    let mut d = (&num[i] * &l - c.numer() * (&l / c.denom()) * den).mod_floor(&m);
                    if &d * 2 >= m {
                        d -= &m;
                    }
                    dist_sq += &d * &d;
                }
                dist_sq * radius.denom() * radius.denom() < radius.numer() * radius.numer() * &m * &m
            }
            Self::Polygon { vertices } => {
                // vertices scaled by their common denominator l, the point by l/den; signs survive the scaling
                let l = vertices.iter().flatten().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
                let v: Vec<[BigInt; 2]> =
                    vertices.iter().map(|p| [p[0].numer() * (&l / p[0].denom()), p[1].numer() * (&l / p[1].denom())]).collect();
                let x = [&num[0] * &l, &num[1] * &l];
                let n = v.len();
                (0..n).all(|i| {
                    let (a, b) = (&v[i], &v[(i + 1) % n]);
                    let s = (&b[0] - &a[0]) * (&x[1] - &a[1] * den) - (&b[1] - &a[1]) * (&x[0] - &a[0] * den);
                    !s.is_negative()
                })
            }
        }
    }

    pub fn contains(&self, x: &TorusPoint) -> Result<bool> {
        match x {
            TorusPoint::Rational { num, den } if num.len() == 2 => Ok(self.contains_rational(num, den)),
            TorusPoint::Rational { .. } => Err(Error::InvalidInput("domains live on T^2".into())),
            TorusPoint::FixedPoint { .. } => Err(Error::InvalidInput(
                "exact membership needs a rational point".into(),
            )),
        }
    }

    pub fn contains_f64(&self, x: [f64; 2]) -> bool {
        match self {
            Self::Full => true,
            Self::Box { lo, hi } => (0..2).all(|i| f(&lo[i]) <= x[i] && x[i] < f(&hi[i])),
            Self::Disk { center, radius } => torus_dist([f(&center[0]), f(&center[1])], x) < f(radius),
            Self::Polygon { vertices } => {
                let v: Vec<[f64; 2]> = vertices.iter().map(|p| [f(&p[0]), f(&p[1])]).collect();
                (0..v.len()).all(|i| {
                    let (a, b) = (v[i], v[(i + 1) % v.len()]);
                    (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]) >= 0.0
                })
            }
        }
    }

    /// Boundary segments in the unit square; box edges on a full period are not boundary.
    fn segments(&self) -> Vec<([f64; 2], [f64; 2])> {
        match self {
            Self::Full | Self::Disk { .. } => Vec::new(),
            Self::Box { lo, hi } => {
                let (x0, y0, x1, y1) = (f(&lo[0]), f(&lo[1]), f(&hi[0]), f(&hi[1]));
                let full_x = x1 - x0 >= 1.0;
                let full_y = y1 - y0 >= 1.0;
                let mut segs = Vec::new();
                if !full_x {
                    segs.push(([x0, y0], [x0, y1]));
                    segs.push(([x1, y0], [x1, y1]));
                }
                if !full_y {
                    segs.push(([x0, y0], [x1, y0]));
                    segs.push(([x0, y1], [x1, y1]));
                }
                segs
            }
            Self::Polygon { vertices } => {
                let v: Vec<[f64; 2]> = vertices.iter().map(|p| [f(&p[0]), f(&p[1])]).collect();
                (0..v.len()).map(|i| (v[i], v[(i + 1) % v.len()])).collect()
            }
        }
    }

    /// `dist(x, ∂Ω)` on the torus (∞ for the full torus).
    pub fn boundary_distance(&self, x: [f64; 2]) -> f64 {
        match self {
            Self::Full => f64::INFINITY,
            Self::Disk { center, radius } => {
                (torus_dist([f(&center[0]), f(&center[1])], x) - f(radius)).abs()
            }
            _ => {
                let mut best = f64::INFINITY;
                for (a, b) in self.segments() {
                    for dx in [-1.0, 0.0, 1.0] {
                        for dy in [-1.0, 0.0, 1.0] {
                            best = best.min(segment_dist([x[0] + dx, x[1] + dy], a, b));
                        }
                    }
                }
                best
            }
        }
    }
}

fn torus_dist(c: [f64; 2], x: [f64; 2]) -> f64 {
    let d = |a: f64, b: f64| {
        let t = (a - b).rem_euclid(1.0);
        t.min(1.0 - t)
    };
    d(c[0], x[0]).hypot(d(c[1], x[1]))
}

fn segment_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (vx, vy) = (b[0] - a[0], b[1] - a[1]);
    let (wx, wy) = (p[0] - a[0], p[1] - a[1]);
    let len2 = vx * vx + vy * vy;
    let t = if len2 > 0.0 { ((wx * vx + wy * vy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (wx - t * vx).hypot(wy - t * vy)
}

/// Empirical visiting frequency of `Ω` along the orbit versus `|Ω|`.
#[derive(Debug, Clone, Serialize)]
pub struct Discrepancy {
    pub series: RateSeries,
    pub envelope: f64,
    pub measure: f64,
    pub period: Option<u64>,
}

pub fn indicator_discrepancy(
    omega: &DomainIndicator,
    a: &IntMatrix,
    x: &TorusPoint,
    grid: &[u64],
    eta: f64,
) -> Result<Discrepancy> {
    if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("checkpoint grid must be positive and strictly increasing".into()));
    }
    if a.dim() != 2 {
        return Err(Error::InvalidInput("domains live on T^2".into()));
    }
    let measure = omega.measure();
    let exact = omega.exact_measure();
    let mut stepper = OrbitStepper::new(a, x)?;
    let mut series = RateSeries::new(eta);
    let mut hits: u64 = 0;
    let mut next = grid.iter().peekable();
    for n in 1..=*grid.last().expect("non-empty") {
        if n > 1 {
            stepper.step()?;
        }
        if omega.contains(stepper.current())? {
            hits += 1;
        }
        if next.peek().is_some_and(|&&c| c == n) {
            next.next();
            let dev = match &exact {
                // exact rational deviation, rounded once
                Some(m) => f(&(BigRational::new(hits.into(), n.into()) - m).abs()),
                None => (hits as f64 / n as f64 - measure).abs(),
            };
            series.push(n, dev);
        }
    }
    Ok(Discrepancy { envelope: series.envelope_statistic(), series, measure, period: stepper.period() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellEstimate {
    pub t: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Monte-Carlo estimate of `|{x : dist(x, ∂Ω) <= t}|`.
pub fn boundary_shell_measure<R: Rng + ?Sized>(
    omega: &DomainIndicator,
    t: f64,
    samples: usize,
    rng: &mut R,
) -> Result<ShellEstimate> {
    if !(t > 0.0 && t < 0.5) || samples < 2 {
        return Err(Error::InvalidInput("boundary shell needs 0 < t < 1/2 and >= 2 samples".into()));
    }
    let hits = (0..samples)
        .filter(|_| omega.boundary_distance([rng.gen(), rng.gen()]) <= t)
        .count();
    let p = hits as f64 / samples as f64;
    Ok(ShellEstimate { t, estimate: p, std_error: (p * (1.0 - p) / (samples - 1) as f64).sqrt(), samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn half() -> BigRational {
        rat(1, 2)
    }

    #[test]
    fn exact_membership() {
        let b = DomainIndicator::square(half()).unwrap();
        let q = BigInt::from(8);
        assert!(b.contains_rational(&[0.into(), 3.into()], &q));
        assert!(!b.contains_rational(&[4.into(), 3.into()], &q));
        let d = DomainIndicator::new_disk([rat(1, 10), rat(1, 10)], rat(1, 4)).unwrap();
        // (0.95, 0.1) is 0.15 from the center across the seam
        assert!(d.contains_rational(&[19.into(), 2.into()], &BigInt::from(20)));
        assert!(!d.contains_rational(&[10.into(), 2.into()], &BigInt::from(20)));
        let tri = DomainIndicator::new_polygon(vec![[rat(0, 1), rat(0, 1)], [half(), rat(0, 1)], [rat(0, 1), half()]]).unwrap();
        assert_eq!(tri.exact_measure(), Some(rat(1, 8)));
        assert!(tri.contains_rational(&[1.into(), 1.into()], &BigInt::from(10)));
        assert!(!tri.contains_rational(&[3.into(), 3.into()], &BigInt::from(10)));
    }

    #[test]
    fn rational_and_float_membership_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let shapes = [
            DomainIndicator::new_box([rat(1, 10), rat(1, 3)], [rat(7, 10), rat(3, 4)]).unwrap(),
            DomainIndicator::new_disk([rat(1, 2), rat(1, 5)], rat(1, 4)).unwrap(),
            DomainIndicator::new_polygon(vec![[rat(1, 10), rat(1, 10)], [rat(9, 10), rat(2, 10)], [rat(1, 2), rat(9, 10)]]).unwrap(),
        ];
        for s in &shapes {
            for _ in 0..2000 {
                let x = TorusPoint::random_with_denominator(2, &BigInt::from(1_000_003), &mut rng);
                let xf = x.to_f64();
                assert_eq!(s.contains(&x).unwrap(), s.contains_f64([xf[0], xf[1]]));
            }
        }
    }

    #[test]
    fn full_torus_has_zero_discrepancy() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = TorusPoint::random_generic(2, 128, &mut rng);
        let a = IntMatrix::from_i64([[1, 1], [1, 0]]);
        let d = indicator_discrepancy(&DomainIndicator::Full, &a, &x, &[2, 4, 8, 16], 0.5).unwrap();
        assert!(d.series.points.iter().all(|p| p.deviation == 0.0));
    }

    #[test]
    fn strip_shell_oracle() {
        // [0,1/2) × [0,1): two full-height edges, each with a band of width 2t
        let strip = DomainIndicator::new_box([rat(0, 1), rat(0, 1)], [half(), rat(1, 1)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let t = 0.01;
        let e = boundary_shell_measure(&strip, t, 200_000, &mut rng).unwrap();
        assert!((e.estimate - 4.0 * t).abs() <= 3.0 * e.std_error, "{e:?}");
    }

    #[test]
    fn square_and_disk_shell_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let t = 0.02;
        let sq = DomainIndicator::square(half()).unwrap();
        let e = boundary_shell_measure(&sq, t, 200_000, &mut rng).unwrap();
        // perimeter·2t plus corner terms: 2·P·t + (π − 4) t^2
        let want = 2.0 * 2.0 * t + (PI - 4.0) * t * t;
        assert!((e.estimate - want).abs() <= 3.0 * e.std_error, "{e:?} vs {want}");
        let r = 0.25;
        let disk = DomainIndicator::new_disk([half(), half()], rat(1, 4)).unwrap();
        let e = boundary_shell_measure(&disk, t, 200_000, &mut rng).unwrap();
        let want = 4.0 * PI * r * t;
        assert!((e.estimate - want).abs() <= 3.0 * e.std_error, "{e:?} vs {want}");
    }

    #[test]
    fn shell_shrinks_with_t() {
        let disk = DomainIndicator::new_disk([half(), half()], rat(1, 5)).unwrap();
        let ests: Vec<f64> = [0.1, 0.03, 0.01, 0.003]
            .iter()
            .map(|&t| boundary_shell_measure(&disk, t, 50_000, &mut ChaCha8Rng::seed_from_u64(3)).unwrap().estimate)
            .collect();
        assert!(ests.windows(2).all(|w| w[1] < w[0]));
    }

    /// Direct rational evaluation of the membership conditions.
    fn rational_oracle(s: &DomainIndicator, x: &Rat2) -> bool {
        match s {
            DomainIndicator::Disk { center, radius } => {
                let wrap = |d: BigRational| {
                    let d = &d - d.floor();
                    if d >= half() { d - BigRational::one() } else { d }
                };
                let d0 = wrap(&x[0] - &center[0]);
                let d1 = wrap(&x[1] - &center[1]);
                &d0 * &d0 + &d1 * &d1 < radius * radius
            }
            DomainIndicator::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| !cross(&vertices[i], &vertices[(i + 1) % n], x).is_negative())
            }
            _ => unreachable!(),
        }
    }

    proptest::proptest! {
        #[test]
        fn integer_membership_matches_rationals(
            c in proptest::array::uniform2(0i64..30), cd in 1i64..30, r in 1i64..15,
            p in proptest::array::uniform2(0i64..97), q in 1i64..97,
        ) {
            let disk = DomainIndicator::new_disk([rat(c[0] % cd, cd), rat(c[1] % cd, cd)], rat(r, 31)).unwrap();
            let tri = DomainIndicator::new_polygon(vec![[rat(1, 7), rat(1, 9)], [rat(5, 6), rat(2, 9)], [rat(1, 3), rat(4, 5)]]).unwrap();
            let x = [rat(p[0] % q, q), rat(p[1] % q, q)];
            let num = [BigInt::from(p[0] % q), BigInt::from(p[1] % q)];
            for s in [&disk, &tri] {
                proptest::prop_assert_eq!(s.contains_rational(&num, &BigInt::from(q)), rational_oracle(s, &x));
            }
        }
    }
}
