//! Minimal contraction coefficients on finite spaces.
//!
//! Every coefficient is the maximum, over the admissible tuples of its class,
//! of an exact ratio `lhs / rhs`. On a finite space that maximum is the least
//! constant for which the class inequality holds non-strictly; membership
//! additionally requires it to be strictly below the class threshold.
//!
//! Polygon classes range over all k-subsets and, within each subset, over all
//! canonical Hamiltonian cycles. The perimeter is invariant under rotation and
//! reflection of positions, and applying the map positionwise commutes with
//! both, so canonical cycles cover every ordering of every distinct k-tuple.
//!
//! Ties keep the earliest witness in enumeration order (pairs and subsets
//! lexicographic, cycles lexicographic within a subset). Subsets may be
//! scored in parallel; results are folded in subset order, so the output does
//! not depend on the evaluation strategy.

use std::cmp::Ordering;
use std::fmt;
use std::ops::AddAssign;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, SelfMap};
use crate::polygon::{for_each_cycle, k_subsets, CanonicalCycle};
use crate::rational::Rational;

/// Which orderings of each k-subset a polygon class is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum Semantics {
    /// Every cyclic order of every k-subset.
    #[default]
    #[serde(rename = "strict")]
    Strict,
    /// Only the order in which the points are listed (ascending index).
    #[serde(rename = "paper-ordering")]
    ListedOrder,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Semantics::Strict => f.write_str("strict"),
            Semantics::ListedOrder => f.write_str("paper-ordering"),
        }
    }
}

impl std::str::FromStr for Semantics {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Semantics::Strict),
            "paper-ordering" | "listed" => Ok(Semantics::ListedOrder),
            other => Err(Error::InvalidConfig(format!("unknown semantics {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Evaluation {
    Sequential,
    Parallel,
    /// Parallel once the cycle count is large enough to pay for it.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Options {
    pub semantics: Semantics,
    pub evaluation: Evaluation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "class", content = "k", rename_all = "snake_case")]
pub enum ContractionClass {
    Banach,
    Kannan,
    Perimetric(usize),
    TotalPairwise(usize),
    KannanPerimetric(usize),
}

impl ContractionClass {
    /// Strict upper bound a coefficient must stay below for membership.
    pub fn threshold(&self) -> Rational {
        match *self {
            ContractionClass::Banach
            | ContractionClass::Perimetric(_)
            | ContractionClass::TotalPairwise(_) => Rational::one(),
            ContractionClass::Kannan => Rational::new(1, 2),
            ContractionClass::KannanPerimetric(k) => Rational::new(2, k as i64),
        }
    }
}

impl fmt::Display for ContractionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContractionClass::Banach => f.write_str("banach"),
            ContractionClass::Kannan => f.write_str("kannan"),
            ContractionClass::Perimetric(k) => write!(f, "perimetric({k})"),
            ContractionClass::TotalPairwise(k) => write!(f, "total_pairwise({k})"),
            ContractionClass::KannanPerimetric(k) => write!(f, "kannan_perimetric({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coefficient {
    Finite(Rational),
    /// Some admissible tuple has a zero right-hand side but a positive left.
    Infeasible,
}

impl Coefficient {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Coefficient::Finite(r) => Some(r),
            Coefficient::Infeasible => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Coefficient::Infeasible)
    }

    /// True when finite and strictly below `bound`.
    pub fn below(&self, bound: &Rational) -> bool {
        self.finite().is_some_and(|c| c < bound)
    }

    /// Order with `Infeasible` above every finite value.
    pub fn cmp_extended(&self, other: &Coefficient) -> Ordering {
        match (self, other) {
            (Coefficient::Finite(a), Coefficient::Finite(b)) => a.cmp(b),
            (Coefficient::Finite(_), Coefficient::Infeasible) => Ordering::Less,
            (Coefficient::Infeasible, Coefficient::Finite(_)) => Ordering::Greater,
            (Coefficient::Infeasible, Coefficient::Infeasible) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Finite(r) => write!(f, "{r}"),
            Coefficient::Infeasible => f.write_str("INFEASIBLE"),
        }
    }
}

impl Serialize for Coefficient {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coefficient::Finite(r) => r.serialize(s),
            Coefficient::Infeasible => s.serialize_str("infeasible"),
        }
    }
}

/// The minimal coefficient of one class, with the tuple that attains it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoefficientResult {
    #[serde(flatten)]
    pub class: ContractionClass,
    pub coefficient: Coefficient,
    #[serde(skip)]
    pub witness: Vec<usize>,
    #[serde(rename = "witness")]
    pub witness_labels: Vec<String>,
    pub lhs: Rational,
    pub rhs: Rational,
    pub threshold: Rational,
    pub member: bool,
}

/// Integer weights used by the search: `i128` when the scaled distances are
/// small enough, `BigInt` otherwise.
trait Weight: Clone + Ord + Zero + Send + Sync + for<'a> AddAssign<&'a Self> {
    fn times(&self, other: &Self) -> Self;
    fn into_big(self) -> BigInt;
}

impl Weight for i128 {
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn into_big(self) -> BigInt {
        BigInt::from(self)
    }
}

impl Weight for BigInt {
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn into_big(self) -> BigInt {
        self
    }
}

#[derive(Debug, Clone)]
struct Best<W> {
    lhs: W,
    rhs: W,
    witness: Vec<usize>,
}

impl<W: Weight> Best<W> {
    fn is_infinite(&self) -> bool {
        self.rhs.is_zero()
    }

    /// Strictly better than `other`: larger ratio, with zero denominators
    /// (positive numerators) above everything.
    fn beats(&self, other: &Best<W>) -> bool {
        match (self.is_infinite(), other.is_infinite()) {
            (true, _) => !other.is_infinite(),
            (false, true) => false,
            (false, false) => self.lhs.times(&other.rhs) > other.lhs.times(&self.rhs),
        }
    }
}

/// Offers a candidate; `0/0` tuples carry no constraint and are skipped.
fn offer<W: Weight>(best: &mut Option<Best<W>>, lhs: W, rhs: W, witness: &[usize]) {
    if lhs.is_zero() && rhs.is_zero() {
        return;
    }
    let cand = Best {
        lhs,
        rhs,
        witness: Vec::new(),
    };
    let better = match best {
        None => true,
        Some(b) => cand.beats(b),
    };
    if better {
        *best = Some(Best {
            witness: witness.to_vec(),
            ..cand
        });
    }
}

fn merge<W: Weight>(acc: Option<Best<W>>, next: Option<Best<W>>) -> Option<Best<W>> {
    match (acc, next) {
        (None, n) => n,
        (a, None) => a,
        (Some(a), Some(n)) => {
            if n.beats(&a) {
                Some(n)
            } else {
                Some(a)
            }
        }
    }
}

struct Table<'a, W> {
    d: &'a [W],
    n: usize,
}

impl<W: Weight> Table<'_, W> {
    #[inline]
    fn at(&self, i: usize, j: usize) -> &W {
        &self.d[i * self.n + j]
    }

    fn perimeter(&self, t: &[usize]) -> W {
        let k = t.len();
        let mut acc = W::zero();
        for i in 0..k {
            acc += self.at(t[i], t[(i + 1) % k]);
        }
        acc
    }

    fn pairwise(&self, t: &[usize]) -> W {
        let mut acc = W::zero();
        for i in 0..t.len() {
            for j in (i + 1)..t.len() {
                acc += self.at(t[i], t[j]);
            }
        }
        acc
    }

    fn displacement(&self, map: &SelfMap, t: &[usize]) -> W {
        let mut acc = W::zero();
        for &x in t {
            acc += self.at(x, map.at(x));
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PolygonDenominator {
    Perimeter,
    Displacement,
}

fn pair_search<W: Weight>(
    table: &Table<'_, W>,
    map: &SelfMap,
    kannan: bool,
) -> Option<Best<W>> {
    let mut best = None;
    for i in 0..table.n {
        for j in (i + 1)..table.n {
            let lhs = table.at(map.at(i), map.at(j)).clone();
            let rhs = if kannan {
                let mut r = table.at(i, map.at(i)).clone();
                r += table.at(j, map.at(j));
                r
            } else {
                table.at(i, j).clone()
            };
            offer(&mut best, lhs, rhs, &[i, j]);
        }
    }
    best
}

fn subset_search<W: Weight>(table: &Table<'_, W>, map: &SelfMap, k: usize) -> Option<Best<W>> {
    let mut best = None;
    let mut image = Vec::with_capacity(k);
    for subset in k_subsets(table.n, k).expect("k validated by caller") {
        map.apply_into(&subset, &mut image);
        offer(&mut best, table.pairwise(&image), table.pairwise(&subset), &subset);
    }
    best
}

fn polygon_subset<W: Weight>(
    table: &Table<'_, W>,
    map: &SelfMap,
    subset: &[usize],
    denominator: PolygonDenominator,
    semantics: Semantics,
) -> Option<Best<W>> {
    let mut best = None;
    let mut image = Vec::with_capacity(subset.len());
    let fixed_rhs = match denominator {
        PolygonDenominator::Displacement => Some(table.displacement(map, subset)),
        PolygonDenominator::Perimeter => None,
    };
    let mut score = |cycle: &[usize]| {
        map.apply_into(cycle, &mut image);
        let lhs = table.perimeter(&image);
        let rhs = match &fixed_rhs {
            Some(r) => r.clone(),
            None => table.perimeter(cycle),
        };
        offer(&mut best, lhs, rhs, cycle);
    };
    match semantics {
        Semantics::Strict => for_each_cycle(subset, &mut score),
        Semantics::ListedOrder => score(subset),
    }
    best
}

fn polygon_search<W: Weight>(
    table: &Table<'_, W>,
    map: &SelfMap,
    k: usize,
    denominator: PolygonDenominator,
    options: &Options,
) -> Option<Best<W>> {
    let subsets = k_subsets(table.n, k).expect("k validated by caller");
    let parallel = match options.evaluation {
        Evaluation::Sequential => false,
        Evaluation::Parallel => true,
        Evaluation::Auto => {
            let cycles: u128 = crate::polygon::cycle_count(k).unwrap_or(1);
            let subsets = binomial(table.n, k);
            cycles.saturating_mul(subsets) > 20_000
        }
    };
    if parallel {
        let subsets: Vec<Vec<usize>> = subsets.collect();
        let per_subset: Vec<Option<Best<W>>> = subsets
            .par_iter()
            .map(|s| polygon_subset(table, map, s, denominator, options.semantics))
            .collect();
        per_subset.into_iter().fold(None, merge)
    } else {
        subsets
            .map(|s| polygon_subset(table, map, &s, denominator, options.semantics))
            .fold(None, merge)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

#[derive(Debug, Clone, Copy)]
enum Search {
    Banach,
    Kannan,
    TotalPairwise(usize),
    Polygon(usize, PolygonDenominator),
}

fn run<W: Weight>(
    d: &[W],
    space: &FiniteMetricSpace,
    map: &SelfMap,
    search: Search,
    options: &Options,
) -> Option<Best<BigInt>> {
    let table = Table { d, n: space.len() };
    let best = match search {
        Search::Banach => pair_search(&table, map, false),
        Search::Kannan => pair_search(&table, map, true),
        Search::TotalPairwise(k) => subset_search(&table, map, k),
        Search::Polygon(k, denom) => polygon_search(&table, map, k, denom, options),
    };
    best.map(|b| Best {
        lhs: b.lhs.into_big(),
        rhs: b.rhs.into_big(),
        witness: b.witness,
    })
}

fn evaluate(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    class: ContractionClass,
    search: Search,
    options: &Options,
) -> CoefficientResult {
    let scaled = space.scaled();
    let best = match &scaled.small {
        Some(small) => run(small, space, map, search, options),
        None => run(&scaled.exact, space, map, search, options),
    };
    let threshold = class.threshold();
    let Some(best) = best else {
        // every admissible tuple was 0/0: no constraint at all
        return CoefficientResult {
            class,
            coefficient: Coefficient::Finite(Rational::zero()),
            witness: Vec::new(),
            witness_labels: Vec::new(),
            lhs: Rational::zero(),
            rhs: Rational::zero(),
            member: true,
            threshold,
        };
    };
    let coefficient = if best.rhs.is_zero() {
        Coefficient::Infeasible
    } else {
        Coefficient::Finite(Rational::from_big(best.lhs.clone(), best.rhs.clone()))
    };
    let member = coefficient.below(&threshold);
    CoefficientResult {
        class,
        member,
        witness_labels: space.labels_of(&best.witness),
        witness: best.witness,
        lhs: scaled.unscale(best.lhs),
        rhs: scaled.unscale(best.rhs),
        coefficient,
        threshold,
    }
}

fn check_map(space: &FiniteMetricSpace, map: &SelfMap) -> Result<()> {
    if map.len() != space.len() {
        return Err(Error::InvalidConfig(format!(
            "map has {} entries for a {}-point space",
            map.len(),
            space.len()
        )));
    }
    Ok(())
}

fn check_k(what: &'static str, space: &FiniteMetricSpace, k: usize, min: usize) -> Result<()> {
    if k < min || k > space.len() {
        return Err(Error::InvalidK {
            what,
            k,
            min,
            max: space.len(),
        });
    }
    Ok(())
}

/// `max d(Tx,Ty) / d(x,y)` over unordered pairs of distinct points.
pub fn banach_coefficient(space: &FiniteMetricSpace, map: &SelfMap) -> Result<CoefficientResult> {
    check_map(space, map)?;
    if space.len() < 2 {
        return Err(Error::TooFewPoints("banach_coefficient"));
    }
    Ok(evaluate(space, map, ContractionClass::Banach, Search::Banach, &Options::default()))
}

/// `max d(Tx,Ty) / (d(x,Tx) + d(y,Ty))` over pairs of distinct points.
pub fn kannan_coefficient(space: &FiniteMetricSpace, map: &SelfMap) -> Result<CoefficientResult> {
    check_map(space, map)?;
    if space.len() < 2 {
        return Err(Error::TooFewPoints("kannan_coefficient"));
    }
    Ok(evaluate(space, map, ContractionClass::Kannan, Search::Kannan, &Options::default()))
}

pub fn perimetric_coefficient(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    k: usize,
) -> Result<CoefficientResult> {
    perimetric_coefficient_with(space, map, k, &Options::default())
}

/// `max P(Tx1..Txk) / P(x1..xk)` over distinct k-tuples.
pub fn perimetric_coefficient_with(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    k: usize,
    options: &Options,
) -> Result<CoefficientResult> {
    check_map(space, map)?;
    check_k("perimetric_coefficient", space, k, 3)?;
    Ok(evaluate(
        space,
        map,
        ContractionClass::Perimetric(k),
        Search::Polygon(k, PolygonDenominator::Perimeter),
        options,
    ))
}

/// `max S(Tx1..Txk) / S(x1..xk)` over k-subsets.
pub fn total_distance_coefficient(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    k: usize,
) -> Result<CoefficientResult> {
    check_map(space, map)?;
    check_k("total_distance_coefficient", space, k, 2)?;
    Ok(evaluate(
        space,
        map,
        ContractionClass::TotalPairwise(k),
        Search::TotalPairwise(k),
        &Options::default(),
    ))
}

pub fn kannan_perimetric_coefficient(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    k: usize,
) -> Result<CoefficientResult> {
    kannan_perimetric_coefficient_with(space, map, k, &Options::default())
}

/// `max P(Tx1..Txk) / sum d(xi,Txi)` over distinct k-tuples.
pub fn kannan_perimetric_coefficient_with(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    k: usize,
    options: &Options,
) -> Result<CoefficientResult> {
    check_map(space, map)?;
    check_k("kannan_perimetric_coefficient", space, k, 3)?;
    Ok(evaluate(
        space,
        map,
        ContractionClass::KannanPerimetric(k),
        Search::Polygon(k, PolygonDenominator::Displacement),
        options,
    ))
}

/// The class to read off a single cycle with [`ratio_for_cycle`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleRatio {
    Perimetric,
    KannanPerimetric,
    TotalPairwise,
}

/// The exact `(lhs, rhs)` one class inequality compares for one ordering.
pub fn ratio_for_cycle(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    cycle: &[usize],
    class: CycleRatio,
) -> Result<(Rational, Rational)> {
    check_map(space, map)?;
    let image = map.apply(cycle);
    match class {
        CycleRatio::Perimetric => Ok((space.perimeter(&image)?, space.perimeter(cycle)?)),
        CycleRatio::KannanPerimetric => {
            let lhs = space.perimeter(&image)?;
            let rhs = cycle
                .iter()
                .map(|&x| space.distance(x, map.at(x)))
                .sum();
            Ok((lhs, rhs))
        }
        CycleRatio::TotalPairwise => Ok((space.total_pairwise(&image)?, space.total_pairwise(cycle)?)),
    }
}

/// Ratio for a canonical cycle; convenience wrapper over [`ratio_for_cycle`].
pub fn ratio_for_canonical(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    cycle: &CanonicalCycle,
    class: CycleRatio,
) -> Result<(Rational, Rational)> {
    ratio_for_cycle(space, map, cycle.vertices(), class)
}

/// All five coefficients for one space, map and polygon size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub k: usize,
    pub semantics: Semantics,
    pub banach: CoefficientResult,
    pub kannan: CoefficientResult,
    pub perimetric: CoefficientResult,
    pub total_pairwise: CoefficientResult,
    pub kannan_perimetric: CoefficientResult,
    /// Kannan-perimetric coefficient over listed orderings only, reported
    /// next to the all-orderings value so the two readings can be compared.
    pub kannan_perimetric_listed_order: CoefficientResult,
    /// Kannan coefficient strictly below `1/k`.
    pub kannan_below_inverse_k: bool,
    /// Perimetric coefficient strictly below `1/(k+1)`.
    pub perimetric_below_inverse_k_plus_one: bool,
}

impl ClassificationReport {
    pub fn results(&self) -> [&CoefficientResult; 5] {
        [
            &self.banach,
            &self.kannan,
            &self.perimetric,
            &self.total_pairwise,
            &self.kannan_perimetric,
        ]
    }
}

pub fn classify_all(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    k: usize,
    semantics: Semantics,
) -> Result<ClassificationReport> {
    check_k("classify_all", space, k, 3)?;
    let options = Options {
        semantics,
        evaluation: Evaluation::Auto,
    };
    let listed = Options {
        semantics: Semantics::ListedOrder,
        evaluation: Evaluation::Auto,
    };
    let banach = banach_coefficient(space, map)?;
    let kannan = kannan_coefficient(space, map)?;
    let perimetric = perimetric_coefficient_with(space, map, k, &options)?;
    let total_pairwise = total_distance_coefficient(space, map, k)?;
    let kannan_perimetric = kannan_perimetric_coefficient_with(space, map, k, &options)?;
    let kannan_perimetric_listed_order = kannan_perimetric_coefficient_with(space, map, k, &listed)?;
    let kannan_below_inverse_k = kannan.coefficient.below(&Rational::new(1, k as i64));
    let perimetric_below_inverse_k_plus_one =
        perimetric.coefficient.below(&Rational::new(1, k as i64 + 1));
    Ok(ClassificationReport {
        k,
        semantics,
        banach,
        kannan,
        perimetric,
        total_pairwise,
        kannan_perimetric,
        kannan_perimetric_listed_order,
        kannan_below_inverse_k,
        perimetric_below_inverse_k_plus_one,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d)
    }

    fn em_2_1() -> (FiniteMetricSpace, SelfMap) {
        let s = FiniteMetricSpace::from_integer_matrix(&[
            vec![0, 2, 2, 2],
            vec![2, 0, 2, 1],
            vec![2, 2, 0, 2],
            vec![2, 1, 2, 0],
        ])
        .unwrap();
        (s, SelfMap::new(vec![0, 2, 3, 0]).unwrap())
    }

    fn five_point() -> (FiniteMetricSpace, SelfMap) {
        let mut d = vec![vec![1i64; 5]; 5];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
            if i != 4 {
                row[4] = 9;
            }
        }
        for j in 0..4 {
            d[4][j] = 9;
        }
        let s = FiniteMetricSpace::from_integer_matrix(&d).unwrap();
        (s, SelfMap::new(vec![1, 2, 3, 3, 0]).unwrap())
    }

    /// Brute force over every ordered pair; independent of the search path.
    fn brute_banach(s: &FiniteMetricSpace, t: &SelfMap) -> Rational {
        let mut best = Rational::zero();
        for x in 0..s.len() {
            for y in 0..s.len() {
                if x != y {
                    let r = s.distance(t.at(x), t.at(y)) / s.distance(x, y);
                    if r > best {
                        best = r;
                    }
                }
            }
        }
        best
    }

    #[test]
    fn banach_examples() {
        let (s, t) = em_2_1();
        let r = banach_coefficient(&s, &t).unwrap();
        assert_eq!(brute_banach(&s, &t), q(2, 1));
        assert_eq!(r.coefficient, Coefficient::Finite(q(2, 1)));
        assert_eq!(r.witness, vec![1, 3]);
        assert!(!r.member);

        let c = banach_coefficient(&s, &SelfMap::constant(4, 2).unwrap()).unwrap();
        assert_eq!(c.coefficient, Coefficient::Finite(Rational::zero()));
        assert!(c.member);

        let id = banach_coefficient(&s, &SelfMap::identity(4)).unwrap();
        assert_eq!(id.coefficient, Coefficient::Finite(Rational::one()));
        assert!(!id.member);
    }

    #[test]
    fn kannan_examples() {
        let (s, t) = five_point();
        let r = kannan_coefficient(&s, &t).unwrap();
        assert_eq!(r.coefficient, Coefficient::Finite(Rational::one()));
        // (x1,x4) ties with (x2,x4) at ratio 1 and is earlier
        assert_eq!(r.witness, vec![0, 3]);
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (q(1, 1), q(1, 1)));
        assert!(!r.member);

        let id = kannan_coefficient(&s, &SelfMap::identity(5)).unwrap();
        assert!(id.coefficient.is_infeasible());
        assert!(!id.member);

        let c = kannan_coefficient(&s, &SelfMap::constant(5, 0).unwrap()).unwrap();
        assert_eq!(c.coefficient, Coefficient::Finite(Rational::zero()));
        assert!(c.member);
    }

    #[test]
    fn perimetric_em_2_1() {
        let (s, t) = em_2_1();
        let r = perimetric_coefficient(&s, &t, 4).unwrap();
        assert_eq!(r.coefficient, Coefficient::Finite(q(8, 7)));
        assert_eq!(r.witness, vec![0, 1, 3, 2]);
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (q(8, 1), q(7, 1)));
        assert!(!r.member);
        let tp = total_distance_coefficient(&s, &t, 4).unwrap();
        assert_eq!(tp.coefficient, Coefficient::Finite(q(10, 11)));
        assert!(tp.member);
    }

    #[test]
    fn kannan_perimetric_five_point() {
        let (s, t) = five_point();
        let strict = kannan_perimetric_coefficient(&s, &t, 5).unwrap();
        assert_eq!(strict.coefficient, Coefficient::Finite(q(5, 12)));
        assert!(!strict.member);
        let listed = kannan_perimetric_coefficient_with(
            &s,
            &t,
            5,
            &Options {
                semantics: Semantics::ListedOrder,
                ..Options::default()
            },
        )
        .unwrap();
        assert_eq!(listed.coefficient, Coefficient::Finite(q(1, 3)));
        assert!(listed.member);
        assert_eq!(
            ratio_for_cycle(&s, &t, &[0, 1, 2, 3, 4], CycleRatio::KannanPerimetric).unwrap(),
            (q(4, 1), q(12, 1))
        );
        assert_eq!(
            ratio_for_cycle(&s, &t, &[0, 2, 1, 3, 4], CycleRatio::KannanPerimetric).unwrap(),
            (q(5, 1), q(12, 1))
        );
    }

    #[test]
    fn fixing_k_points_is_infeasible() {
        let (s, _) = five_point();
        let r = kannan_perimetric_coefficient(&s, &SelfMap::identity(5), 3).unwrap();
        assert!(r.coefficient.is_infeasible());
        assert!(!r.member);
        assert!(r.rhs.is_zero() && r.lhs.is_positive());
    }

    #[test]
    fn k_range_is_enforced() {
        let (s, t) = em_2_1();
        assert!(matches!(
            perimetric_coefficient(&s, &t, 2),
            Err(Error::InvalidK { .. })
        ));
        assert!(perimetric_coefficient(&s, &t, 5).is_err());
        assert!(total_distance_coefficient(&s, &t, 1).is_err());
        assert!(kannan_perimetric_coefficient(&s, &t, 5).is_err());
        assert!(classify_all(&s, &t, 2, Semantics::Strict).is_err());
        assert!(perimetric_coefficient(&s, &SelfMap::identity(3), 3).is_err());
    }

    #[test]
    fn identity_cycle_ratio_is_trivial() {
        let (s, _) = em_2_1();
        let (l, r) = ratio_for_cycle(&s, &SelfMap::identity(4), &[0, 2, 1, 3], CycleRatio::Perimetric)
            .unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let (s, t) = five_point();
        for k in 3..=5 {
            let seq = Options {
                semantics: Semantics::Strict,
                evaluation: Evaluation::Sequential,
            };
            let par = Options {
                evaluation: Evaluation::Parallel,
                ..seq
            };
            assert_eq!(
                perimetric_coefficient_with(&s, &t, k, &seq).unwrap(),
                perimetric_coefficient_with(&s, &t, k, &par).unwrap()
            );
            assert_eq!(
                kannan_perimetric_coefficient_with(&s, &t, k, &seq).unwrap(),
                kannan_perimetric_coefficient_with(&s, &t, k, &par).unwrap()
            );
        }
    }

    #[test]
    fn report_serializes_exact_fractions_and_labels() {
        let (s, t) = em_2_1();
        let report = classify_all(&s, &t, 4, Semantics::Strict).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["perimetric"]["coefficient"], "8/7");
        assert_eq!(json["perimetric"]["class"], "perimetric");
        assert_eq!(json["perimetric"]["k"], 4);
        assert_eq!(json["perimetric"]["witness"], serde_json::json!(["x1", "x2", "x4", "x3"]));
        assert_eq!(json["total_pairwise"]["coefficient"], "10/11");
        assert_eq!(json["semantics"], "strict");
    }
}
