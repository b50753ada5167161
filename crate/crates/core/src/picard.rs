//! Picard iteration on continuous maps of `R^d`, with a-priori error bounds,
//! sampled contraction coefficients and a grid search for competing fixed
//! points.
//!
//! Everything here is `f64`. Comparisons use [`COMPARE_TOL`]; oracle sanity
//! checks use [`SANITY_TOL`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::trial_seed;

pub const COMPARE_TOL: f64 = 1e-9;
pub const SANITY_TOL: f64 = 1e-12;

/// Points closer than this count as coincident when sampling tuples.
const COINCIDENT: f64 = 1e-12;
const MAX_REDRAWS: usize = 1000;
const MAX_GRID_POINTS: usize = 10_000_000;

pub type Point = Vec<f64>;
pub type MapFn = Arc<dyn Fn(&[f64]) -> Point + Send + Sync>;
pub type DistanceFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// A map on `R^dimension` together with the metric it is measured in.
#[derive(Clone)]
pub struct MetricOracle {
    pub name: String,
    pub dimension: usize,
    pub params: BTreeMap<String, f64>,
    map: MapFn,
    distance: DistanceFn,
}

impl fmt::Debug for MetricOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricOracle")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl MetricOracle {
    /// Euclidean metric.
    pub fn new(name: impl Into<String>, dimension: usize, map: MapFn) -> Self {
        MetricOracle {
            name: name.into(),
            dimension,
            params: BTreeMap::new(),
            map,
            distance: Arc::new(euclidean),
        }
    }

    pub fn with_distance(mut self, distance: DistanceFn) -> Self {
        self.distance = distance;
        self
    }

    pub fn with_params(mut self, params: BTreeMap<String, f64>) -> Self {
        self.params = params;
        self
    }

    pub fn apply(&self, x: &[f64]) -> Point {
        (self.map)(x)
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        (self.distance)(a, b)
    }

    /// Closed-walk length `x_0 -> x_1 -> ... -> x_{m-1} -> x_0`.
    pub fn perimeter(&self, pts: &[Point]) -> f64 {
        let m = pts.len();
        (0..m).map(|i| self.distance(&pts[i], &pts[(i + 1) % m])).sum()
    }

    /// Checks identity and symmetry of the distance on the given points.
    pub fn sanity_check(&self, pts: &[Point]) -> Result<()> {
        for (i, a) in pts.iter().enumerate() {
            if self.distance(a, a).abs() > SANITY_TOL {
                return Err(Error::InvalidConfig(format!("{}: d(x, x) != 0 at sample {i}", self.name)));
            }
            for b in &pts[i + 1..] {
                let (ab, ba) = (self.distance(a, b), self.distance(b, a));
                if ab < 0.0 || (ab - ba).abs() > SANITY_TOL {
                    return Err(Error::InvalidConfig(format!("{}: distance not symmetric", self.name)));
                }
            }
        }
        Ok(())
    }
}

type Builder = Arc<dyn Fn(&BTreeMap<String, f64>) -> MapFn + Send + Sync>;

/// A named, parameterised family of maps.
#[derive(Clone)]
pub struct MapEntry {
    pub name: String,
    pub dimension: usize,
    pub description: String,
    /// Every accepted parameter with its default.
    pub defaults: BTreeMap<String, f64>,
    build: Builder,
}

impl MapEntry {
    pub fn new(
        name: impl Into<String>,
        dimension: usize,
        description: impl Into<String>,
        defaults: &[(&str, f64)],
        build: impl Fn(&BTreeMap<String, f64>) -> MapFn + Send + Sync + 'static,
    ) -> Self {
        MapEntry {
            name: name.into(),
            dimension,
            description: description.into(),
            defaults: defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            build: Arc::new(build),
        }
    }
}

impl fmt::Debug for MapEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapEntry")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("defaults", &self.defaults)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Default)]
pub struct MapRegistry {
    entries: BTreeMap<String, MapEntry>,
}

impl MapRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(MapEntry::new("linear", 1, "x -> a*x", &[("a", 0.5)], |p| {
            let a = p["a"];
            Arc::new(move |x| vec![a * x[0]])
        }));
        r.register(MapEntry::new(
            "affine",
            1,
            "x -> a*x + b",
            &[("a", 0.5), ("b", 1.0)],
            |p| {
                let (a, b) = (p["a"], p["b"]);
                Arc::new(move |x| vec![a * x[0] + b])
            },
        ));
        r.register(MapEntry::new("cubic", 1, "x -> x - x^3/3", &[], |_| {
            Arc::new(|x| vec![x[0] - x[0].powi(3) / 3.0])
        }));
        r.register(MapEntry::new(
            "rotation",
            2,
            "rotation by theta scaled by s",
            &[("s", 0.5), ("theta", 0.5)],
            |p| {
                let (s, theta) = (p["s"], p["theta"]);
                let (sin, cos) = theta.sin_cos();
                Arc::new(move |x| vec![s * (cos * x[0] - sin * x[1]), s * (sin * x[0] + cos * x[1])])
            },
        ));
        r.register(MapEntry::new("identity", 1, "x -> x", &[], |_| Arc::new(|x| x.to_vec())));
        r.register(MapEntry::new("constant", 1, "x -> c", &[("c", 0.0)], |p| {
            let c = p["c"];
            Arc::new(move |_| vec![c])
        }));
        r
    }

    /// Adds or replaces an entry.
    pub fn register(&mut self, entry: MapEntry) {
        self.entries.insert(entry.name.clone(), entry);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Option<&MapEntry> {
        self.entries.get(name)
    }

    /// Instantiates `name`, overriding defaults with `params`.
    pub fn oracle(&self, name: &str, params: &BTreeMap<String, f64>) -> Result<MetricOracle> {
        let entry = self.get(name).ok_or_else(|| Error::UnknownMap(name.to_string()))?;
        let mut merged = entry.defaults.clone();
        for (key, value) in params {
            if !merged.contains_key(key) {
                return Err(Error::InvalidConfig(format!("map {name:?} has no parameter {key:?}")));
            }
            if !value.is_finite() {
                return Err(Error::InvalidConfig(format!("parameter {key:?} must be finite")));
            }
            merged.insert(key.clone(), *value);
        }
        let map = (entry.build)(&merged);
        Ok(MetricOracle::new(name, entry.dimension, map).with_params(merged))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopRule {
    pub tolerance: f64,
    pub max_steps: usize,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule {
            tolerance: 1e-12,
            max_steps: 10_000,
        }
    }
}

/// Coefficients fed into the error bounds. Unset `lambda` is estimated
/// from the trajectory; unset `mu` disables the Kannan-type bounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct BoundCoefficients {
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSource {
    Supplied,
    /// Largest ratio `P(x_{n+1..n+k}) / P(x_{n..n+k-1})` over windows whose
    /// perimeter exceeds the stopping tolerance.
    ObservedPerimeterRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepBound {
    pub n: usize,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub map: String,
    pub params: BTreeMap<String, f64>,
    pub k: usize,
    pub stop: StopRule,
    pub points: Vec<Point>,
    /// `r_n = d(x_n, x_{n+1})`.
    pub step_distances: Vec<f64>,
    /// `d(x_n, limit)` for every recorded point.
    pub distances_to_limit: Vec<f64>,
    /// Perimeter of the first `k` iterates.
    pub r0_perimeter: f64,
    pub lambda_estimate: f64,
    pub lambda_source: LambdaSource,
    /// `lambda^n * r0 / (1 - lambda)` per point; empty unless `lambda < 1`.
    pub bounds: Vec<f64>,
    pub mu: Option<f64>,
    /// `(k - 2) * mu / (2 - mu)`.
    pub rho: Option<f64>,
    /// `max(r_1, ..., r_{k-1})`.
    pub kannan_r: Option<f64>,
    /// `rho^(n/(k-1) - 1) * R` for `n >= k`; empty unless `rho < 1`.
    pub kannan_bounds: Vec<StepBound>,
    pub converged: bool,
    pub limit: Point,
}

fn check_finite(step: usize, p: &[f64]) -> Result<()> {
    if p.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            step,
            detail: format!("{p:?}"),
        })
    }
}

/// Iterates `x_{n+1} = T x_n` until `r_n < tolerance` or `max_steps` map
/// applications. At least `k` points are always produced.
pub fn picard_iterate(
    oracle: &MetricOracle,
    x0: &[f64],
    k: usize,
    stop: StopRule,
    coefficients: BoundCoefficients,
) -> Result<IterationTrace> {
    if k < 3 {
        return Err(Error::InvalidK {
            what: "picard_iterate",
            k,
            min: 3,
            max: usize::MAX,
        });
    }
    if !(stop.tolerance > 0.0 && stop.tolerance.is_finite()) {
        return Err(Error::InvalidConfig("tolerance must be positive".into()));
    }
    if stop.max_steps < k {
        return Err(Error::InvalidConfig(format!("max_steps must be at least k = {k}")));
    }
    if x0.len() != oracle.dimension {
        return Err(Error::InvalidConfig(format!(
            "x0 has {} coordinates, map {:?} acts on dimension {}",
            x0.len(),
            oracle.name,
            oracle.dimension
        )));
    }
    for (name, v) in [("lambda", coefficients.lambda), ("mu", coefficients.mu)] {
        if v.is_some_and(|v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::InvalidConfig(format!("{name} must be finite and nonnegative")));
        }
    }
    check_finite(0, x0)?;

    let mut points = vec![x0.to_vec()];
    let mut step_distances = Vec::new();
    let mut converged = false;
    for step in 1..=stop.max_steps {
        let next = oracle.apply(points.last().expect("nonempty"));
        check_finite(step, &next)?;
        if next.len() != oracle.dimension {
            return Err(Error::NonFinite {
                step,
                detail: format!("image has {} coordinates", next.len()),
            });
        }
        let r = oracle.distance(points.last().expect("nonempty"), &next);
        if !r.is_finite() {
            return Err(Error::NonFinite {
                step,
                detail: "distance".into(),
            });
        }
        step_distances.push(r);
        points.push(next);
        converged = r < stop.tolerance;
        if converged && points.len() >= k {
            break;
        }
    }

    let r0_perimeter = oracle.perimeter(&points[..k]);
    let (lambda_estimate, lambda_source) = match coefficients.lambda {
        Some(l) => (l, LambdaSource::Supplied),
        None => {
            let mut best = 0.0f64;
            for n in 0..points.len().saturating_sub(k) {
                let before = oracle.perimeter(&points[n..n + k]);
                if before > stop.tolerance {
                    best = best.max(oracle.perimeter(&points[n + 1..n + k + 1]) / before);
                }
            }
            (best, LambdaSource::ObservedPerimeterRatio)
        }
    };
    let bounds = if lambda_estimate < 1.0 {
        let scale = r0_perimeter / (1.0 - lambda_estimate);
        (0..points.len()).map(|n| lambda_estimate.powi(n as i32) * scale).collect()
    } else {
        Vec::new()
    };

    let rho = coefficients.mu.map(|mu| (k as f64 - 2.0) * mu / (2.0 - mu));
    let kannan_r = coefficients
        .mu
        .map(|_| step_distances[1..k].iter().copied().fold(0.0, f64::max));
    let kannan_bounds = match (rho, kannan_r) {
        (Some(rho), Some(r)) if (0.0..1.0).contains(&rho) => (k..step_distances.len())
            .map(|n| StepBound {
                n,
                bound: rho.powf(n as f64 / (k as f64 - 1.0) - 1.0) * r,
            })
            .collect(),
        _ => Vec::new(),
    };

    let limit = points.last().expect("nonempty").clone();
    let distances_to_limit = points.iter().map(|p| oracle.distance(p, &limit)).collect();
    Ok(IterationTrace {
        map: oracle.name.clone(),
        params: oracle.params.clone(),
        k,
        stop,
        points,
        step_distances,
        distances_to_limit,
        r0_perimeter,
        lambda_estimate,
        lambda_source,
        bounds,
        mu: coefficients.mu,
        rho,
        kannan_r,
        kannan_bounds,
        converged,
        limit,
    })
}

impl IterationTrace {
    /// Indices `n` with `d(x_n, limit) > bound_n + 10 * tolerance`.
    pub fn bound_violations(&self) -> Vec<usize> {
        let slack = 10.0 * self.stop.tolerance;
        self.bounds
            .iter()
            .zip(&self.distances_to_limit)
            .enumerate()
            .filter_map(|(n, (b, d))| (*d > b + slack).then_some(n))
            .collect()
    }

    /// Indices `n >= k` with `r_n > kannan_bound_n + 10 * tolerance`.
    pub fn kannan_bound_violations(&self) -> Vec<usize> {
        let slack = 10.0 * self.stop.tolerance;
        self.kannan_bounds
            .iter()
            .filter(|b| self.step_distances[b.n] > b.bound + slack)
            .map(|b| b.n)
            .collect()
    }

    /// Columns `step, point, r_n, bound, kannan_bound`; multi-dimensional
    /// points are split into `point_1..point_d`.
    pub fn to_csv(&self) -> Result<String> {
        let dim = self.limit.len();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["step".to_string()];
        if dim == 1 {
            header.push("point".into());
        } else {
            header.extend((1..=dim).map(|i| format!("point_{i}")));
        }
        header.extend(["r_n", "bound", "kannan_bound"].map(String::from));
        let csv_err = |e: csv::Error| Error::InvalidConfig(format!("csv: {e}"));
        w.write_record(&header).map_err(csv_err)?;
        let kannan: BTreeMap<usize, f64> = self.kannan_bounds.iter().map(|b| (b.n, b.bound)).collect();
        let opt = |v: Option<&f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for (n, p) in self.points.iter().enumerate() {
            let mut row = vec![n.to_string()];
            row.extend(p.iter().map(f64::to_string));
            row.push(opt(self.step_distances.get(n)));
            row.push(opt(self.bounds.get(n)));
            row.push(opt(kannan.get(&n)));
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidConfig(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Region {
    pub lo: Point,
    pub hi: Point,
}

impl Region {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Region {
            lo: vec![lo],
            hi: vec![hi],
        }
    }

    pub fn cube(dimension: usize, lo: f64, hi: f64) -> Self {
        Region {
            lo: vec![lo; dimension],
            hi: vec![hi; dimension],
        }
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    fn validate(&self, dimension: usize) -> Result<()> {
        let ok = self.lo.len() == dimension
            && self.hi.len() == dimension
            && self
                .lo
                .iter()
                .zip(&self.hi)
                .all(|(l, h)| l.is_finite() && h.is_finite() && l < h);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "region must be a bounded box of dimension {dimension} with lo < hi"
            )))
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> Point {
        self.lo.iter().zip(&self.hi).map(|(l, h)| rng.random_range(*l..*h)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sampler {
    pub seed: u64,
    pub count: usize,
    pub region: Region,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", content = "k", rename_all = "snake_case")]
pub enum SampleClass {
    Banach,
    Perimetric(usize),
    KannanPerimetric(usize),
}

impl SampleClass {
    fn arity(&self) -> usize {
        match self {
            SampleClass::Banach => 2,
            SampleClass::Perimetric(k) | SampleClass::KannanPerimetric(k) => *k,
        }
    }
}

/// `(numerator, denominator)` of the class ratio on one tuple.
fn class_ratio(oracle: &MetricOracle, class: SampleClass, tuple: &[Point]) -> (f64, f64) {
    let images: Vec<Point> = tuple.iter().map(|p| oracle.apply(p)).collect();
    match class {
        SampleClass::Banach => (
            oracle.distance(&images[0], &images[1]),
            oracle.distance(&tuple[0], &tuple[1]),
        ),
        SampleClass::Perimetric(_) => (oracle.perimeter(&images), oracle.perimeter(tuple)),
        SampleClass::KannanPerimetric(_) => (
            oracle.perimeter(&images),
            tuple.iter().zip(&images).map(|(x, tx)| oracle.distance(x, tx)).sum(),
        ),
    }
}

fn draw_tuple(
    oracle: &MetricOracle,
    region: &Region,
    arity: usize,
    seed: u64,
) -> Result<(Vec<Point>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for redraws in 0..MAX_REDRAWS {
        let tuple: Vec<Point> = (0..arity).map(|_| region.sample(&mut rng)).collect();
        let distinct = (0..arity).all(|i| {
            ((i + 1)..arity).all(|j| oracle.distance(&tuple[i], &tuple[j]) >= COINCIDENT)
        });
        if distinct {
            return Ok((tuple, redraws));
        }
    }
    Err(Error::InvalidConfig("region too small to draw distinct points".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledCoefficient {
    pub class: SampleClass,
    /// Largest observed ratio; never exceeds the true supremum.
    pub estimate: f64,
    pub kind: &'static str,
    pub samples: usize,
    pub redrawn: usize,
    /// Samples with positive numerator and zero denominator (ratio is
    /// unbounded); excluded from `estimate`.
    pub unbounded_samples: usize,
    pub argmax: Vec<Point>,
    pub advisory_member: bool,
}

/// Estimates a contraction coefficient by the largest ratio over `count`
/// sampled tuples of distinct points.
///
/// Sample `i` depends only on `(seed, i)`, so a larger `count` with the same
/// seed never lowers the estimate.
pub fn sample_coefficient(
    oracle: &MetricOracle,
    class: SampleClass,
    sampler: &Sampler,
) -> Result<SampledCoefficient> {
    if sampler.count == 0 {
        return Err(Error::InvalidConfig("sample count must be at least 1".into()));
    }
    if class.arity() < 2 || (class.arity() < 3 && class != SampleClass::Banach) {
        return Err(Error::InvalidK {
            what: "sample_coefficient",
            k: class.arity(),
            min: 3,
            max: usize::MAX,
        });
    }
    sampler.region.validate(oracle.dimension)?;

    struct Acc {
        best: Option<(f64, usize)>,
        redrawn: usize,
        unbounded: usize,
    }
    let acc = (0..sampler.count)
        .into_par_iter()
        .map(|i| -> Result<Acc> {
            let (tuple, redrawn) = draw_tuple(oracle, &sampler.region, class.arity(), trial_seed(sampler.seed, i))?;
            let (num, den) = class_ratio(oracle, class, &tuple);
            let (best, unbounded) = if den > 0.0 {
                (Some((num / den, i)), 0)
            } else if num > 0.0 {
                (None, 1)
            } else {
                (None, 0)
            };
            Ok(Acc {
                best,
                redrawn,
                unbounded,
            })
        })
        .try_reduce(
            || Acc {
                best: None,
                redrawn: 0,
                unbounded: 0,
            },
            |a, b| {
                let best = match (a.best, b.best) {
                    (Some(x), Some(y)) => Some(if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x }),
                    (x, y) => x.or(y),
                };
                Ok(Acc {
                    best,
                    redrawn: a.redrawn + b.redrawn,
                    unbounded: a.unbounded + b.unbounded,
                })
            },
        )?;

    let (estimate, argmax) = match acc.best {
        Some((value, i)) => {
            let (tuple, _) = draw_tuple(oracle, &sampler.region, class.arity(), trial_seed(sampler.seed, i))?;
            (value, tuple)
        }
        None => (0.0, Vec::new()),
    };
    let threshold = match class {
        SampleClass::Banach | SampleClass::Perimetric(_) => 1.0,
        SampleClass::KannanPerimetric(k) => 2.0 / k as f64,
    };
    Ok(SampledCoefficient {
        class,
        estimate,
        kind: "lower_bound_of_supremum",
        samples: sampler.count,
        redrawn: acc.redrawn,
        unbounded_samples: acc.unbounded,
        argmax,
        advisory_member: acc.unbounded == 0 && estimate < threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BanachSpotCheck {
    pub lambda_hat: f64,
    pub pairs_checked: usize,
    /// Pairs with `d(Tx, Ty) > lambda_hat * d(x, y) + 1e-9`.
    pub violations: usize,
    /// Largest `d(Tx, Ty) - lambda_hat * d(x, y)` observed.
    pub max_slack: f64,
    /// `lambda_hat < 1`; advisory, since `lambda_hat` is itself sampled.
    pub advisory_member: bool,
    pub assumption: &'static str,
}

/// Tests the Banach inequality with a coefficient estimated from perimeters,
/// on pairs drawn fresh from `sampler`.
pub fn banach_from_perimetric_check(
    oracle: &MetricOracle,
    lambda_hat: f64,
    sampler: &Sampler,
) -> Result<BanachSpotCheck> {
    if !lambda_hat.is_finite() || lambda_hat < 0.0 {
        return Err(Error::InvalidConfig("lambda_hat must be finite and nonnegative".into()));
    }
    if sampler.count == 0 {
        return Err(Error::InvalidConfig("sample count must be at least 1".into()));
    }
    sampler.region.validate(oracle.dimension)?;
    let slacks: Vec<f64> = (0..sampler.count)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let (pair, _) = draw_tuple(oracle, &sampler.region, 2, trial_seed(sampler.seed, i))?;
            let (num, den) = class_ratio(oracle, SampleClass::Banach, &pair);
            Ok(num - lambda_hat * den)
        })
        .collect::<Result<_>>()?;
    Ok(BanachSpotCheck {
        lambda_hat,
        pairs_checked: slacks.len(),
        violations: slacks.iter().filter(|s| **s > COMPARE_TOL).count(),
        max_slack: slacks.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        advisory_member: lambda_hat < 1.0,
        assumption: ACCUMULATION_ASSUMPTION,
    })
}

const ACCUMULATION_ASSUMPTION: &str =
    "every point of the sampled region is treated as an accumulation point of the space";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    /// The trace converged without ever landing exactly on a fixed point.
    pub premise_holds: bool,
    pub premise_note: String,
    pub assumption: &'static str,
    pub region: Region,
    pub grid_points: usize,
    pub limit: Point,
    /// Distinct fixed points found in the region, sorted.
    pub fixed_points: Vec<Point>,
    /// Fixed points farther than `1e-6` from the limit.
    pub others: Vec<Point>,
    /// `None` when the premise fails and the search was skipped.
    pub unique: Option<bool>,
}

fn residual(oracle: &MetricOracle, z: &[f64]) -> f64 {
    oracle.distance(&oracle.apply(z), z)
}

/// Compass search on `|Tz - z|`, clamped to the region.
fn refine(oracle: &MetricOracle, region: &Region, mut z: Point, step0: f64) -> Point {
    let mut best = residual(oracle, &z);
    let mut step = step0;
    for _ in 0..2000 {
        if step < 1e-15 * (1.0 + z.iter().map(|v| v.abs()).fold(0.0, f64::max)) || best == 0.0 {
            break;
        }
        let mut improved = false;
        for axis in 0..z.len() {
            for dir in [-1.0, 1.0] {
                let mut c = z.clone();
                c[axis] = (c[axis] + dir * step).clamp(region.lo[axis], region.hi[axis]);
                let r = residual(oracle, &c);
                if r < best {
                    best = r;
                    z = c;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    z
}

/// Looks for fixed points other than the trace's limit on a grid of
/// `per_axis` points per coordinate, refining every grid-local minimum of
/// `|Tz - z|` and keeping those with residual below `tolerance`.
pub fn uniqueness_check(
    trace: &IterationTrace,
    oracle: &MetricOracle,
    region: &Region,
    per_axis: usize,
    tolerance: f64,
) -> Result<UniquenessReport> {
    region.validate(oracle.dimension)?;
    if per_axis < 2 {
        return Err(Error::InvalidConfig("grid needs at least 2 points per axis".into()));
    }
    let dim = oracle.dimension;
    let grid_points = (per_axis as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if grid_points > MAX_GRID_POINTS as u128 {
        return Err(Error::InvalidConfig(format!("grid of {grid_points} points is too large")));
    }
    let grid_points = grid_points as usize;

    let landed = trace.step_distances.iter().position(|&r| r == 0.0);
    let (premise_holds, premise_note) = match (trace.converged, landed) {
        (false, _) => (false, "trace did not converge".to_string()),
        (true, Some(n)) => (false, format!("x_{n} is already a fixed point, so the limit is an iterate")),
        (true, None) => (true, "limit differs from every iterate".to_string()),
    };
    let mut report = UniquenessReport {
        premise_holds,
        premise_note,
        assumption: ACCUMULATION_ASSUMPTION,
        region: region.clone(),
        grid_points,
        limit: trace.limit.clone(),
        fixed_points: Vec::new(),
        others: Vec::new(),
        unique: None,
    };
    if !premise_holds {
        return Ok(report);
    }

    let spacing: Vec<f64> = (0..dim)
        .map(|a| (region.hi[a] - region.lo[a]) / (per_axis - 1) as f64)
        .collect();
    let coords = |mut idx: usize| -> (Point, Vec<usize>) {
        let mut p = vec![0.0; dim];
        let mut ix = vec![0; dim];
        for a in 0..dim {
            ix[a] = idx % per_axis;
            idx /= per_axis;
            p[a] = region.lo[a] + ix[a] as f64 * spacing[a];
        }
        (p, ix)
    };
    let values: Vec<f64> = (0..grid_points)
        .into_par_iter()
        .map(|i| residual(oracle, &coords(i).0))
        .collect();
    let flat = |ix: &[usize]| ix.iter().rev().fold(0, |acc, &v| acc * per_axis + v);
    let minima: Vec<usize> = (0..grid_points)
        .filter(|&i| {
            let (_, ix) = coords(i);
            (0..dim).all(|a| {
                [-1isize, 1].iter().all(|&d| {
                    let v = ix[a] as isize + d;
                    if v < 0 || v >= per_axis as isize {
                        return true;
                    }
                    let mut nb = ix.clone();
                    nb[a] = v as usize;
                    values[i] <= values[flat(&nb)]
                })
            })
        })
        .collect();
    let step0 = spacing.iter().copied().fold(f64::INFINITY, f64::min);
    let mut found: Vec<Point> = Vec::new();
    for i in minima {
        let z = refine(oracle, region, coords(i).0, step0);
        if residual(oracle, &z) < tolerance && !found.iter().any(|f| oracle.distance(f, &z) < 1e-6) {
            found.push(z);
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    report.others = found
        .iter()
        .filter(|z| oracle.distance(z, &trace.limit) >= 1e-6)
        .cloned()
        .collect();
    report.unique = Some(report.others.is_empty());
    report.fixed_points = found;
    Ok(report)
}
