//! Finite metric spaces with exact distances, self-maps, and the two tuple
//! functionals: polygon perimeter and total pairwise distance.
//!
//! Points are identified by index. Labels exist only for display and for the
//! instance file format.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// One violated metric axiom, located by its offending indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomViolation {
    NonzeroDiagonal { i: usize },
    Asymmetric { i: usize, j: usize },
    NonPositive { i: usize, j: usize },
    /// `d(i, k) > d(i, j) + d(j, k)`.
    Triangle { i: usize, j: usize, k: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<AxiomViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the metric axioms on a candidate distance matrix.
///
/// Structural problems (empty, non-square, negative entries) are returned as
/// errors; axiom violations are collected in the report.
pub fn validate_metric(dist: &[Vec<Rational>]) -> Result<ValidationReport> {
    let n = dist.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    for (row, r) in dist.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NonSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
    }
    for (i, row) in dist.iter().enumerate() {
        for (j, d) in row.iter().enumerate() {
            if d.is_negative() {
                return Err(Error::NegativeEntry { i, j });
            }
        }
    }

    let mut violations = Vec::new();
    for i in 0..n {
        if !dist[i][i].is_zero() {
            violations.push(AxiomViolation::NonzeroDiagonal { i });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if dist[i][j] != dist[j][i] {
                violations.push(AxiomViolation::Asymmetric { i, j });
            }
            if !dist[i][j].is_positive() || !dist[j][i].is_positive() {
                violations.push(AxiomViolation::NonPositive { i, j });
            }
        }
    }
    for i in 0..n {
        for k in (i + 1)..n {
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                if dist[i][k] > &dist[i][j] + &dist[j][k] {
                    violations.push(AxiomViolation::Triangle { i, j, k });
                }
            }
        }
    }
    Ok(ValidationReport { violations })
}

/// Distances multiplied by the least common denominator, so that every
/// perimeter and pairwise sum is an integer.
#[derive(Debug, Clone)]
pub(crate) struct ScaledDistances {
    pub(crate) scale: BigInt,
    pub(crate) exact: Vec<BigInt>,
    /// Present when all scaled entries are below 2^56, which keeps every
    /// cross-multiplied comparison inside `i128`.
    pub(crate) small: Option<Vec<i128>>,
}

impl ScaledDistances {
    fn build(dist: &[Vec<Rational>]) -> Self {
        let scale = dist
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, d| acc.lcm(d.denom()));
        let exact: Vec<BigInt> = dist
            .iter()
            .flatten()
            .map(|d| d.numer() * (&scale / d.denom()))
            .collect();
        let limit = BigInt::one() << 56u32;
        let small = if exact.iter().all(|v| v.abs() < limit) {
            Some(exact.iter().map(|v| v.to_i128().expect("bounded")).collect())
        } else {
            None
        };
        ScaledDistances { scale, exact, small }
    }

    pub(crate) fn unscale(&self, value: BigInt) -> Rational {
        Rational::from_big(value, self.scale.clone())
    }
}

/// A finite metric space with exact rational distances.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rational>>,
    scaled: ScaledDistances,
}

impl PartialEq for FiniteMetricSpace {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.dist == other.dist
    }
}

impl Eq for FiniteMetricSpace {}

impl FiniteMetricSpace {
    /// Builds a space, rejecting anything that is not a metric.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Self> {
        let report = validate_metric(&dist)?;
        if labels.len() != dist.len() {
            return Err(Error::LabelCountMismatch {
                count: labels.len(),
                size: dist.len(),
            });
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        if !report.is_valid() {
            let summary = report
                .violations
                .iter()
                .take(5)
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::NotAMetric(format!(
                "{} violation(s): {summary}",
                report.violations.len()
            )));
        }
        let scaled = ScaledDistances::build(&dist);
        Ok(FiniteMetricSpace {
            labels,
            dist,
            scaled,
        })
    }

    /// Convenience constructor with labels `x1..xn`.
    pub fn from_matrix(dist: Vec<Vec<Rational>>) -> Result<Self> {
        let labels = (1..=dist.len()).map(|i| format!("x{i}")).collect();
        Self::new(labels, dist)
    }

    pub fn from_integer_matrix(dist: &[Vec<i64>]) -> Result<Self> {
        Self::from_matrix(
            dist.iter()
                .map(|row| row.iter().map(|&v| Rational::from_integer(v)).collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    pub fn distance(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub(crate) fn scaled(&self) -> &ScaledDistances {
        &self.scaled
    }

    /// The same space with every distance multiplied by a positive factor.
    pub fn scaled_by(&self, factor: &Rational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::InvalidConfig("scale factor must be positive".into()));
        }
        let dist = self
            .dist
            .iter()
            .map(|row| row.iter().map(|d| d * factor).collect())
            .collect();
        Self::new(self.labels.clone(), dist)
    }

    fn check_indices(&self, tuple: &[usize]) -> Result<()> {
        match tuple.iter().find(|&&i| i >= self.len()) {
            Some(&index) => Err(Error::IndexOutOfRange {
                index,
                size: self.len(),
            }),
            None => Ok(()),
        }
    }

    /// `d(x1,x2) + d(x2,x3) + ... + d(xk,x1)`. Repeated points are allowed.
    pub fn perimeter(&self, tuple: &[usize]) -> Result<Rational> {
        if tuple.len() < 3 {
            return Err(Error::TupleTooShort {
                what: "perimeter",
                len: tuple.len(),
                min: 3,
            });
        }
        self.check_indices(tuple)?;
        Ok(self.scaled.unscale(perimeter_exact(&self.scaled.exact, self.len(), tuple)))
    }

    /// Sum of `d(xi, xj)` over all position pairs `i < j`.
    pub fn total_pairwise(&self, tuple: &[usize]) -> Result<Rational> {
        if tuple.len() < 2 {
            return Err(Error::TupleTooShort {
                what: "total pairwise distance",
                len: tuple.len(),
                min: 2,
            });
        }
        self.check_indices(tuple)?;
        Ok(self.scaled.unscale(total_pairwise_exact(&self.scaled.exact, self.len(), tuple)))
    }

    pub fn labels_of(&self, tuple: &[usize]) -> Vec<String> {
        tuple.iter().map(|&i| self.labels[i].clone()).collect()
    }
}

pub(crate) fn perimeter_exact(d: &[BigInt], n: usize, t: &[usize]) -> BigInt {
    let k = t.len();
    (0..k).map(|i| &d[t[i] * n + t[(i + 1) % k]]).sum()
}

pub(crate) fn total_pairwise_exact(d: &[BigInt], n: usize, t: &[usize]) -> BigInt {
    let mut acc = BigInt::default();
    for i in 0..t.len() {
        for j in (i + 1)..t.len() {
            acc += &d[t[i] * n + t[j]];
        }
    }
    acc
}

/// A total self-map `T`, stored as `image[i] = T(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SelfMap {
    image: Vec<usize>,
}

impl SelfMap {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        if let Some(&index) = image.iter().find(|&&v| v >= n) {
            return Err(Error::IndexOutOfRange { index, size: n });
        }
        Ok(SelfMap { image })
    }

    pub fn identity(n: usize) -> Self {
        SelfMap {
            image: (0..n).collect(),
        }
    }

    pub fn constant(n: usize, target: usize) -> Result<Self> {
        Self::new(vec![target; n])
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.image[i]
    }

    /// Positionwise image `(Tx1, ..., Txk)`; may contain repeats.
    pub fn apply(&self, tuple: &[usize]) -> Vec<usize> {
        tuple.iter().map(|&i| self.image[i]).collect()
    }

    pub(crate) fn apply_into(&self, tuple: &[usize], out: &mut Vec<usize>) {
        out.clear();
        out.extend(tuple.iter().map(|&i| self.image[i]));
    }
}

pub fn is_pairwise_distinct(tuple: &[usize]) -> bool {
    let mut seen = HashSet::with_capacity(tuple.len());
    tuple.iter().all(|i| seen.insert(*i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i64) -> Rational {
        Rational::from_integer(v)
    }

    fn em_2_1() -> FiniteMetricSpace {
        FiniteMetricSpace::from_integer_matrix(&[
            vec![0, 2, 2, 2],
            vec![2, 0, 2, 1],
            vec![2, 2, 0, 2],
            vec![2, 1, 2, 0],
        ])
        .unwrap()
    }

    #[test]
    fn validates_example_and_two_point_space() {
        let s = em_2_1();
        assert!(validate_metric(s.matrix()).unwrap().is_valid());
        let two = vec![vec![r(0), r(1)], vec![r(1), r(0)]];
        assert!(validate_metric(&two).unwrap().is_valid());
    }

    #[test]
    fn triangle_violation_is_located() {
        let m = vec![
            vec![r(0), r(1), r(5)],
            vec![r(1), r(0), r(1)],
            vec![r(5), r(1), r(0)],
        ];
        let report = validate_metric(&m).unwrap();
        assert_eq!(
            report.violations,
            vec![AxiomViolation::Triangle { i: 0, j: 1, k: 2 }]
        );
    }

    #[test]
    fn structural_errors_are_distinct() {
        let ragged = vec![vec![r(0), r(1)], vec![r(1)]];
        assert!(matches!(
            validate_metric(&ragged),
            Err(Error::NonSquare { row: 1, .. })
        ));
        let negative = vec![vec![r(0), r(-1)], vec![r(-1), r(0)]];
        assert!(matches!(
            validate_metric(&negative),
            Err(Error::NegativeEntry { .. })
        ));
        assert!(matches!(validate_metric(&[]), Err(Error::EmptySpace)));
    }

    #[test]
    fn other_axioms_reported() {
        let m = vec![
            vec![r(1), r(2), r(0)],
            vec![r(3), r(0), r(1)],
            vec![r(0), r(1), r(0)],
        ];
        let v = validate_metric(&m).unwrap().violations;
        assert!(v.contains(&AxiomViolation::NonzeroDiagonal { i: 0 }));
        assert!(v.contains(&AxiomViolation::Asymmetric { i: 0, j: 1 }));
        assert!(v.contains(&AxiomViolation::NonPositive { i: 0, j: 2 }));
    }

    #[test]
    fn functionals_on_example() {
        let s = em_2_1();
        assert_eq!(s.perimeter(&[0, 1, 3, 2]).unwrap(), r(7));
        assert_eq!(s.total_pairwise(&[0, 1, 2, 3]).unwrap(), r(11));
        assert_eq!(s.total_pairwise(&[0, 2, 3, 0]).unwrap(), r(10));
        assert_eq!(s.perimeter(&[2, 2, 2]).unwrap(), r(0));
        assert_eq!(s.total_pairwise(&[1, 1]).unwrap(), r(0));
    }

    #[test]
    fn functional_preconditions() {
        let s = em_2_1();
        assert!(matches!(
            s.perimeter(&[0, 1]),
            Err(Error::TupleTooShort { min: 3, .. })
        ));
        assert!(matches!(
            s.total_pairwise(&[0]),
            Err(Error::TupleTooShort { min: 2, .. })
        ));
        assert!(matches!(
            s.perimeter(&[0, 1, 9]),
            Err(Error::IndexOutOfRange { index: 9, .. })
        ));
    }

    #[test]
    fn apply_map_forms_image_tuple() {
        let t = SelfMap::new(vec![0, 2, 3, 0]).unwrap();
        assert_eq!(t.apply(&[0, 1, 2, 3]), vec![0, 2, 3, 0]);
        let id = SelfMap::identity(4);
        assert_eq!(id.apply(&[3, 1, 1]), vec![3, 1, 1]);
        assert!(SelfMap::new(vec![0, 5]).is_err());
    }

    #[test]
    fn new_rejects_bad_labels() {
        let m = vec![vec![r(0), r(1)], vec![r(1), r(0)]];
        assert!(matches!(
            FiniteMetricSpace::new(vec!["a".into(), "a".into()], m.clone()),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            FiniteMetricSpace::new(vec!["a".into()], m),
            Err(Error::LabelCountMismatch { .. })
        ));
    }

    #[test]
    fn fractional_distances_scale_exactly() {
        let half = Rational::new(1, 2);
        let third = Rational::new(1, 3);
        let m = vec![
            vec![r(0), half.clone(), third.clone()],
            vec![half.clone(), r(0), half.clone()],
            vec![third.clone(), half.clone(), r(0)],
        ];
        let s = FiniteMetricSpace::from_matrix(m).unwrap();
        assert_eq!(s.perimeter(&[0, 1, 2]).unwrap(), Rational::new(4, 3));
    }
}
