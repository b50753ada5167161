//! Seeded random instances and implication checking across the contraction
//! classes.
//!
//! Every implication is evaluated as "premise holds, conclusion fails" on the
//! exact classifier output. Trials are independent: trial `i` draws from its
//! own generator seeded with `splitmix64(seed + (i + 1) * GOLDEN)`, so serial
//! and parallel runs produce identical reports.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{
    banach_coefficient, kannan_coefficient, kannan_perimetric_coefficient, perimetric_coefficient,
    total_distance_coefficient, Coefficient,
};
use crate::dynamics::{fixed_points, least_periods, orbit};
use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceFile};
use crate::metric::{FiniteMetricSpace, SelfMap};
use crate::rational::Rational;

pub const SCHEMA: &str = "polyfix/1";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One round of the splitmix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `index` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    splitmix64(seed.wrapping_add((index as u64 + 1).wrapping_mul(GOLDEN)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum DistanceModel {
    /// Uniform integer weights in `1..=max_weight`, repaired by all-pairs
    /// shortest paths.
    Closure { max_weight: u32 },
    /// Distinct points of the grid `{0..side}^dim` with taxicab distance.
    Grid { dim: usize, side: u32 },
}

impl Default for DistanceModel {
    fn default() -> Self {
        DistanceModel::Closure { max_weight: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub trials: usize,
    /// Inclusive range of space sizes.
    pub n_points: (usize, usize),
    /// Inclusive range of polygon sizes; each draw is clipped to `n`.
    pub k: (usize, usize),
    pub distance_model: DistanceModel,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 0x5EED_2024,
            trials: 1000,
            n_points: (3, 8),
            k: (3, 5),
            distance_model: DistanceModel::default(),
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        let (nlo, nhi) = self.n_points;
        let (klo, khi) = self.k;
        if nlo > nhi || klo > khi {
            return bad("ranges must be nonempty");
        }
        if klo < 3 {
            return bad("k must be at least 3");
        }
        if nlo < klo {
            return bad("smallest space must hold the smallest polygon (n_min >= k_min)");
        }
        match self.distance_model {
            DistanceModel::Closure { max_weight: 0 } => bad("max_weight must be positive"),
            DistanceModel::Grid { dim, side } => {
                let cells = (side as u128 + 1).checked_pow(dim as u32).unwrap_or(u128::MAX);
                if dim == 0 || cells < nhi as u128 {
                    bad("grid too small for the requested number of points")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// A random metric space; the same seed always gives the same space.
pub fn random_space(seed: u64, n: usize, model: DistanceModel) -> Result<FiniteMetricSpace> {
    if n < 2 {
        return Err(Error::TooFewPoints("random_space"));
    }
    let mut rng = rng_for(seed);
    let d: Vec<Vec<u64>> = match model {
        DistanceModel::Closure { max_weight } => {
            if max_weight == 0 {
                return Err(Error::InvalidConfig("max_weight must be positive".into()));
            }
            let mut d = vec![vec![0u64; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let w = rng.random_range(1..=max_weight as u64);
                    d[i][j] = w;
                    d[j][i] = w;
                }
            }
            for via in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let through = d[i][via] + d[via][j];
                        if through < d[i][j] {
                            d[i][j] = through;
                        }
                    }
                }
            }
            d
        }
        DistanceModel::Grid { dim, side } => {
            let cells = (side as u128 + 1).checked_pow(dim as u32).unwrap_or(u128::MAX);
            if dim == 0 || cells < n as u128 {
                return Err(Error::InvalidConfig("grid too small".into()));
            }
            let mut pts: Vec<Vec<u32>> = Vec::with_capacity(n);
            while pts.len() < n {
                let p: Vec<u32> = (0..dim).map(|_| rng.random_range(0..=side)).collect();
                if !pts.contains(&p) {
                    pts.push(p);
                }
            }
            pts.iter()
                .map(|a| {
                    pts.iter()
                        .map(|b| a.iter().zip(b).map(|(x, y)| x.abs_diff(*y) as u64).sum())
                        .collect()
                })
                .collect()
        }
    };
    let dist = d
        .into_iter()
        .map(|row| row.into_iter().map(|v| Rational::from_integer(v as i64)).collect())
        .collect();
    FiniteMetricSpace::new(labels(n), dist)
}

/// A uniformly random total map on `n` points.
pub fn random_map(seed: u64, n: usize) -> Result<SelfMap> {
    if n == 0 {
        return Err(Error::InvalidConfig("map needs at least one point".into()));
    }
    let mut rng = rng_for(seed);
    SelfMap::new((0..n).map(|_| rng.random_range(0..n)).collect())
}

/// A random permutation of `0..n`, used by the property suites.
pub fn random_permutation(seed: u64, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(&mut rng_for(seed));
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Implication {
    /// Perimetric contraction on k-polygons contracts total pairwise
    /// distance on k points with no larger coefficient.
    PerimetricImpliesTotalPairwise,
    /// Contracting total pairwise distance on m points implies it on every
    /// larger point count, with no larger coefficient.
    TotalPairwiseMonotone,
    /// A perimetric contraction on k-polygons contracts total pairwise
    /// distance on every n' >= k points.
    PerimetricImpliesTotalPairwiseUpward,
    /// A Banach contraction is perimetric with the same coefficient and has
    /// no periodic points of prime period two or more.
    BanachChain,
    /// Perimetric membership caps fixed points at k-1; without prime periods
    /// 2..k-1 every orbit ends at a fixed point.
    PerimetricFixedPoint,
    /// Uniqueness of a fixed point that is the limit of a sequence avoiding
    /// it; vacuous on finite spaces.
    PerimetricUniqueness,
    /// Kannan coefficient below 1/k gives a Kannan-perimetric coefficient of
    /// at most twice that.
    KannanImpliesKannanPerimetric,
    /// Perimetric coefficient below 1/(k+1) gives a Kannan-perimetric
    /// coefficient of at most 2*lambda/(1-lambda).
    SmallPerimetricImpliesKannanPerimetric,
    /// Fixed-point statement for the Kannan-perimetric class.
    KannanPerimetricFixedPoint,
    /// Uniqueness for the Kannan-perimetric class; vacuous on finite spaces.
    KannanPerimetricUniqueness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strength {
    /// Any violation is an implementation defect.
    Proven,
    /// Checked and reported; violations are archived as findings.
    Finding,
    /// Premise cannot hold on a finite space.
    Vacuous,
}

impl Implication {
    pub const ALL: [Implication; 10] = [
        Implication::PerimetricImpliesTotalPairwise,
        Implication::TotalPairwiseMonotone,
        Implication::PerimetricImpliesTotalPairwiseUpward,
        Implication::BanachChain,
        Implication::PerimetricFixedPoint,
        Implication::PerimetricUniqueness,
        Implication::KannanImpliesKannanPerimetric,
        Implication::SmallPerimetricImpliesKannanPerimetric,
        Implication::KannanPerimetricFixedPoint,
        Implication::KannanPerimetricUniqueness,
    ];

    pub fn strength(&self) -> Strength {
        match self {
            Implication::PerimetricImpliesTotalPairwise
            | Implication::TotalPairwiseMonotone
            | Implication::PerimetricImpliesTotalPairwiseUpward
            | Implication::BanachChain
            | Implication::PerimetricFixedPoint => Strength::Proven,
            Implication::KannanImpliesKannanPerimetric
            | Implication::SmallPerimetricImpliesKannanPerimetric
            | Implication::KannanPerimetricFixedPoint => Strength::Finding,
            Implication::PerimetricUniqueness | Implication::KannanPerimetricUniqueness => {
                Strength::Vacuous
            }
        }
    }

    /// Minimum premise hits per 1000 trials, where a floor applies.
    pub fn coverage_floor_per_1000(&self) -> Option<usize> {
        match self {
            Implication::PerimetricImpliesTotalPairwise | Implication::TotalPairwiseMonotone => {
                Some(10)
            }
            _ => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Implication::PerimetricImpliesTotalPairwise => "perimetric_implies_total_pairwise",
            Implication::TotalPairwiseMonotone => "total_pairwise_monotone",
            Implication::PerimetricImpliesTotalPairwiseUpward => {
                "perimetric_implies_total_pairwise_upward"
            }
            Implication::BanachChain => "banach_chain",
            Implication::PerimetricFixedPoint => "perimetric_fixed_point",
            Implication::PerimetricUniqueness => "perimetric_uniqueness",
            Implication::KannanImpliesKannanPerimetric => "kannan_implies_kannan_perimetric",
            Implication::SmallPerimetricImpliesKannanPerimetric => {
                "small_perimetric_implies_kannan_perimetric"
            }
            Implication::KannanPerimetricFixedPoint => "kannan_perimetric_fixed_point",
            Implication::KannanPerimetricUniqueness => "kannan_perimetric_uniqueness",
        }
    }
}

impl fmt::Display for Implication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial_seed: Option<u64>,
    pub k: usize,
    pub details: String,
    pub instance: InstanceFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImplicationResult {
    pub implication: Implication,
    pub strength: Strength,
    pub instances_checked: usize,
    /// Instances on which the premise held, i.e. the check was not vacuous.
    pub premise_hits: usize,
    pub violations: Vec<Violation>,
}

impl ImplicationResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn below_one(c: &Coefficient) -> bool {
    c.below(&Rational::one())
}

struct Recorder<'a> {
    instance: &'a Instance,
    k: usize,
    results: Vec<ImplicationResult>,
}

impl Recorder<'_> {
    fn record(&mut self, implication: Implication, premise: bool, failures: Vec<String>) {
        let violations = failures
            .into_iter()
            .map(|details| Violation {
                trial: None,
                trial_seed: None,
                k: self.k,
                details,
                instance: self.instance.to_file(),
            })
            .collect();
        self.results.push(ImplicationResult {
            implication,
            strength: implication.strength(),
            instances_checked: 1,
            premise_hits: usize::from(premise),
            violations,
        });
    }
}

/// Orbit facts shared by the fixed-point and uniqueness checks.
struct OrbitFacts {
    fixed: Vec<usize>,
    /// Largest least period among points of period `2..k-1`, if any.
    short_period: Option<usize>,
    all_converge: bool,
    /// Starts whose limit is never hit by the sequence itself.
    limit_avoided: bool,
}

fn orbit_facts(map: &SelfMap, k: usize) -> OrbitFacts {
    let periods = least_periods(map);
    let short_period = periods.iter().flatten().copied().filter(|p| (2..k).contains(p)).max();
    let all_converge = periods.iter().flatten().all(|&p| p == 1);
    let limit_avoided = (0..map.len()).any(|s| {
        let o = orbit(map, s).expect("in range");
        // the limit is the fixed point the orbit lands on, which is itself
        // an iterate; a limit outside the sequence never occurs here
        o.limit().is_some_and(|w| !o.tail.contains(&w) && !o.cycle.contains(&w))
    });
    OrbitFacts {
        fixed: fixed_points(map),
        short_period,
        all_converge,
        limit_avoided,
    }
}

/// Evaluates every implication on one instance.
pub fn check_implications(instance: &Instance, k: usize) -> Result<Vec<ImplicationResult>> {
    let Instance { space, map } = instance;
    let n = space.len();
    if k < 3 || k > n {
        return Err(Error::InvalidK {
            what: "check_implications",
            k,
            min: 3,
            max: n,
        });
    }
    let mut rec = Recorder {
        instance,
        k,
        results: Vec::with_capacity(Implication::ALL.len()),
    };

    let banach = banach_coefficient(space, map)?.coefficient;
    let kannan = kannan_coefficient(space, map)?.coefficient;
    let perimetric = perimetric_coefficient(space, map, k)?.coefficient;
    let kannan_perimetric = kannan_perimetric_coefficient(space, map, k)?.coefficient;
    // index m holds the total-pairwise coefficient on m points, m in 2..=n
    let mut total: Vec<Option<Coefficient>> = vec![None; n + 1];
    for (m, slot) in total.iter_mut().enumerate().skip(2) {
        *slot = Some(total_distance_coefficient(space, map, m)?.coefficient);
    }
    let total_at = |m: usize| total[m].as_ref().expect("computed for m >= 2");
    let facts = orbit_facts(map, k);

    // exact inequality between the two coefficients, premise = membership
    {
        let mut fails = Vec::new();
        let s = total_at(k);
        if s.cmp_extended(&perimetric).is_gt() {
            fails.push(format!("total_pairwise({k}) = {s} exceeds perimetric({k}) = {perimetric}"));
        }
        if below_one(&perimetric) && !below_one(s) {
            fails.push(format!("perimetric member ({perimetric}) but total_pairwise({k}) = {s}"));
        }
        rec.record(Implication::PerimetricImpliesTotalPairwise, below_one(&perimetric), fails);
    }

    {
        let mut fails = Vec::new();
        let mut premise = false;
        for m in 2..n {
            premise |= below_one(total_at(m));
            for larger in (m + 1)..=n {
                if total_at(larger).cmp_extended(total_at(m)).is_gt() {
                    fails.push(format!(
                        "total_pairwise({larger}) = {} exceeds total_pairwise({m}) = {}",
                        total_at(larger),
                        total_at(m)
                    ));
                }
            }
        }
        rec.record(Implication::TotalPairwiseMonotone, premise, fails);
    }

    {
        let mut fails = Vec::new();
        let premise = below_one(&perimetric);
        if premise {
            for m in k..=n {
                if total_at(m).cmp_extended(&perimetric).is_gt() {
                    fails.push(format!(
                        "perimetric({k}) = {perimetric} but total_pairwise({m}) = {}",
                        total_at(m)
                    ));
                }
            }
        }
        rec.record(Implication::PerimetricImpliesTotalPairwiseUpward, premise, fails);
    }

    {
        let mut fails = Vec::new();
        if perimetric.cmp_extended(&banach).is_gt() {
            fails.push(format!("perimetric({k}) = {perimetric} exceeds banach = {banach}"));
        }
        let premise = below_one(&banach);
        if premise {
            if let Some(p) = least_periods(map).iter().flatten().find(|&&p| p >= 2) {
                fails.push(format!("banach member ({banach}) has a point of prime period {p}"));
            }
            if facts.fixed.len() != 1 {
                fails.push(format!("banach member has {} fixed points", facts.fixed.len()));
            }
        }
        rec.record(Implication::BanachChain, premise, fails);
    }

    let fixed_point_failures = |member: bool, fails: &mut Vec<String>| {
        if !member {
            return;
        }
        if facts.fixed.len() >= k {
            fails.push(format!("{} fixed points with k = {k}", facts.fixed.len()));
        }
        if facts.short_period.is_none() {
            if facts.fixed.is_empty() {
                fails.push("hypotheses hold but there is no fixed point".into());
            }
            if !facts.all_converge {
                fails.push("hypotheses hold but some orbit ends on a cycle of length >= k".into());
            }
        }
    };

    {
        let mut fails = Vec::new();
        let premise = below_one(&perimetric);
        fixed_point_failures(premise, &mut fails);
        rec.record(Implication::PerimetricFixedPoint, premise, fails);
    }

    rec.record(
        Implication::PerimetricUniqueness,
        below_one(&perimetric) && facts.limit_avoided,
        Vec::new(),
    );

    {
        let mut fails = Vec::new();
        let inv_k = Rational::new(1, k as i64);
        let premise = kannan.below(&inv_k);
        if let (true, Coefficient::Finite(gamma)) = (premise, &kannan) {
            let bound = Rational::from_integer(2) * gamma;
            if !kannan_perimetric.finite().is_some_and(|mu| mu <= &bound) {
                fails.push(format!(
                    "kannan = {gamma} < 1/{k} but kannan_perimetric({k}) = {kannan_perimetric} > {bound}"
                ));
            }
        }
        rec.record(Implication::KannanImpliesKannanPerimetric, premise, fails);
    }

    {
        let mut fails = Vec::new();
        let premise = perimetric.below(&Rational::new(1, k as i64 + 1));
        if let (true, Coefficient::Finite(lambda)) = (premise, &perimetric) {
            let two = Rational::from_integer(2);
            let bound = (&two * lambda) / (Rational::one() - lambda.clone());
            let ok = kannan_perimetric.finite().is_some_and(|mu| mu <= &bound)
                && kannan_perimetric.below(&Rational::new(2, k as i64));
            if !ok {
                fails.push(format!(
                    "perimetric({k}) = {lambda} < 1/{} but kannan_perimetric({k}) = {kannan_perimetric} > {bound}",
                    k + 1
                ));
            }
        }
        rec.record(Implication::SmallPerimetricImpliesKannanPerimetric, premise, fails);
    }

    {
        let mut fails = Vec::new();
        let premise = kannan_perimetric.below(&Rational::new(2, k as i64));
        fixed_point_failures(premise, &mut fails);
        rec.record(Implication::KannanPerimetricFixedPoint, premise, fails);
    }

    rec.record(
        Implication::KannanPerimetricUniqueness,
        kannan_perimetric.below(&Rational::new(2, k as i64)) && facts.limit_avoided,
        Vec::new(),
    );

    Ok(rec.results)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageCheck {
    pub implication: Implication,
    pub required: usize,
    pub hits: usize,
    pub met: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FuzzStatus {
    Pass,
    /// A proven implication was violated.
    Violation,
    /// No proven violation, but a premise-coverage floor was missed.
    CoverageUnmet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub schema: &'static str,
    pub config: FuzzConfig,
    pub implications: BTreeMap<Implication, ImplicationResult>,
    pub coverage: Vec<CoverageCheck>,
    /// Violations of implications that are reported rather than gated.
    pub findings: usize,
    pub status: FuzzStatus,
}

struct Trial {
    index: usize,
    seed: u64,
    k: usize,
    results: Vec<ImplicationResult>,
}

fn run_trial(config: &FuzzConfig, index: usize) -> Result<Trial> {
    let seed = trial_seed(config.seed, index);
    let mut rng = rng_for(seed);
    let n = rng.random_range(config.n_points.0..=config.n_points.1);
    let k = rng.random_range(config.k.0..=config.k.1.min(n));
    let space = random_space(splitmix64(seed ^ 1), n, config.distance_model)?;
    let map = random_map(splitmix64(seed ^ 2), n)?;
    let instance = Instance::new(space, map)?;
    Ok(Trial {
        index,
        seed,
        k,
        results: check_implications(&instance, k)?,
    })
}

/// Runs `config.trials` independent random instances through
/// [`check_implications`].
pub fn fuzz(config: &FuzzConfig) -> Result<FuzzReport> {
    config.validate()?;
    let trials: Vec<Trial> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect::<Result<_>>()?;

    let mut implications: BTreeMap<Implication, ImplicationResult> = Implication::ALL
        .iter()
        .map(|&imp| {
            (
                imp,
                ImplicationResult {
                    implication: imp,
                    strength: imp.strength(),
                    instances_checked: 0,
                    premise_hits: 0,
                    violations: Vec::new(),
                },
            )
        })
        .collect();
    for trial in trials {
        for r in trial.results {
            let agg = implications.get_mut(&r.implication).expect("all tags present");
            agg.instances_checked += r.instances_checked;
            agg.premise_hits += r.premise_hits;
            agg.violations.extend(r.violations.into_iter().map(|v| Violation {
                trial: Some(trial.index),
                trial_seed: Some(trial.seed),
                k: trial.k,
                ..v
            }));
        }
    }

    let coverage: Vec<CoverageCheck> = Implication::ALL
        .iter()
        .filter_map(|imp| {
            let per_1000 = imp.coverage_floor_per_1000()?;
            let required = per_1000 * config.trials / 1000;
            let hits = implications[imp].premise_hits;
            Some(CoverageCheck {
                implication: *imp,
                required,
                hits,
                met: hits >= required,
            })
        })
        .collect();

    let proven_violated = implications
        .values()
        .any(|r| r.strength == Strength::Proven && !r.violations.is_empty());
    let findings = implications
        .values()
        .filter(|r| r.strength != Strength::Proven)
        .map(|r| r.violations.len())
        .sum();
    let status = if proven_violated {
        FuzzStatus::Violation
    } else if coverage.iter().any(|c| !c.met) {
        FuzzStatus::CoverageUnmet
    } else {
        FuzzStatus::Pass
    };
    Ok(FuzzReport {
        schema: SCHEMA,
        config: config.clone(),
        implications,
        coverage,
        findings,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::validate_metric;

    #[test]
    fn random_spaces_are_metrics_and_deterministic() {
        for seed in 0..50u64 {
            for model in [
                DistanceModel::Closure { max_weight: 10 },
                DistanceModel::Grid { dim: 2, side: 4 },
            ] {
                let s = random_space(seed, 6, model).unwrap();
                assert!(validate_metric(s.matrix()).unwrap().is_valid());
                assert_eq!(s, random_space(seed, 6, model).unwrap());
            }
        }
        let two = random_space(7, 2, DistanceModel::default()).unwrap();
        assert_eq!(two.len(), 2);
        assert!(random_space(7, 1, DistanceModel::default()).is_err());
    }

    #[test]
    fn random_maps() {
        assert_eq!(random_map(3, 1).unwrap(), SelfMap::identity(1));
        assert_eq!(random_map(42, 9).unwrap(), random_map(42, 9).unwrap());
    }

    #[test]
    fn random_maps_cover_all_maps_on_five_points() {
        // 10^5 draws over 3125 maps: each map expected 32 times
        let mut counts = vec![0u32; 3125];
        for seed in 0..100_000u64 {
            let m = random_map(seed, 5).unwrap();
            let code = m.images().iter().fold(0usize, |acc, &v| acc * 5 + v);
            counts[code] += 1;
        }
        assert!(counts.iter().all(|&c| c > 0), "some map never drawn");
        let max = *counts.iter().max().unwrap();
        assert!(max < 80, "distribution too uneven: max {max}");
    }

    #[test]
    fn config_validation() {
        assert!(FuzzConfig::default().validate().is_ok());
        for bad in [
            FuzzConfig { trials: 0, ..Default::default() },
            FuzzConfig { n_points: (2, 8), ..Default::default() },
            FuzzConfig { k: (2, 5), n_points: (2, 8), ..Default::default() },
            FuzzConfig { distance_model: DistanceModel::Grid { dim: 1, side: 3 }, ..Default::default() },
            FuzzConfig { distance_model: DistanceModel::Closure { max_weight: 0 }, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn identity_has_no_violations() {
        let space = random_space(11, 5, DistanceModel::default()).unwrap();
        let inst = Instance::new(space, SelfMap::identity(5)).unwrap();
        for k in 3..=5 {
            let results = check_implications(&inst, k).unwrap();
            assert_eq!(results.len(), Implication::ALL.len());
            assert!(results.iter().all(ImplicationResult::passed));
        }
    }

    #[test]
    fn single_trial_is_deterministic() {
        let config = FuzzConfig {
            seed: 99,
            trials: 1,
            n_points: (4, 4),
            k: (3, 3),
            distance_model: DistanceModel::default(),
        };
        let a = serde_json::to_string(&fuzz(&config).unwrap()).unwrap();
        let b = serde_json::to_string(&fuzz(&config).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
