//! Functional-graph view of a self-map on a finite space: orbits, fixed
//! points, prime periods, and fixed-point theorem verdicts.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::classify::{
    kannan_perimetric_coefficient_with, perimetric_coefficient_with, Coefficient, Options,
    Semantics,
};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, SelfMap};

/// Trajectory of one point: a (possibly empty) tail followed by a cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitStructure {
    pub start: usize,
    pub tail: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl OrbitStructure {
    pub fn period(&self) -> usize {
        self.cycle.len()
    }

    /// The point the Picard sequence from `start` settles on, if it settles.
    pub fn limit(&self) -> Option<usize> {
        (self.cycle.len() == 1).then(|| self.cycle[0])
    }
}

pub fn orbit(map: &SelfMap, start: usize) -> Result<OrbitStructure> {
    let n = map.len();
    if start >= n {
        return Err(Error::IndexOutOfRange { index: start, size: n });
    }
    let mut position = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut x = start;
    while position[x] == usize::MAX {
        position[x] = path.len();
        path.push(x);
        x = map.at(x);
    }
    let cycle = path.split_off(position[x]);
    Ok(OrbitStructure {
        start,
        tail: path,
        cycle,
    })
}

pub fn fixed_points(map: &SelfMap) -> Vec<usize> {
    (0..map.len()).filter(|&i| map.at(i) == i).collect()
}

/// Least period of every point that lies on a cycle; `None` for tail points.
pub fn least_periods(map: &SelfMap) -> Vec<Option<usize>> {
    let n = map.len();
    let mut period = vec![None; n];
    let mut done = vec![false; n];
    for s in 0..n {
        if done[s] {
            continue;
        }
        let o = orbit(map, s).expect("index in range");
        for &c in &o.cycle {
            period[c] = Some(o.cycle.len());
        }
        for &x in o.tail.iter().chain(&o.cycle) {
            done[x] = true;
        }
    }
    period
}

/// Points whose least period is exactly `p`.
pub fn periodic_points(map: &SelfMap, p: usize) -> Result<Vec<usize>> {
    if p == 0 {
        return Err(Error::InvalidConfig("period must be at least 1".into()));
    }
    Ok(least_periods(map)
        .into_iter()
        .enumerate()
        .filter_map(|(i, q)| (q == Some(p)).then_some(i))
        .collect())
}

/// Prime period to the sorted points having it.
pub fn prime_period_table(map: &SelfMap) -> BTreeMap<usize, Vec<usize>> {
    let mut table: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, p) in least_periods(map).into_iter().enumerate() {
        if let Some(p) = p {
            table.entry(p).or_default().push(i);
        }
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremKind {
    Perimetric,
    KannanPerimetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Hypotheses hold and every conclusion checked out.
    Verified,
    /// Hypotheses fail; only the unconditional fixed-point bound was checked
    /// (when the map is a class member).
    HypothesesNotSatisfied,
    /// Some asserted conclusion failed.
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicViolation {
    pub point: String,
    pub period: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremVerdict {
    pub theorem: TheoremKind,
    pub k: usize,
    pub semantics: Semantics,
    pub class_member: bool,
    pub coefficient: Coefficient,
    /// No points of prime period `2..=k-1`.
    pub periodic_free: bool,
    pub periodic_violation: Option<PeriodicViolation>,
    pub hypotheses_hold: bool,
    #[serde(skip)]
    pub fixed_points: Vec<usize>,
    #[serde(rename = "fixed_points")]
    pub fixed_point_labels: Vec<String>,
    /// At most `k - 1` fixed points.
    pub fixed_point_bound_holds: bool,
    /// Distinct cycle lengths reached from any start.
    pub orbit_cycle_lengths: Vec<usize>,
    pub all_orbits_reach_fixed_point: bool,
    pub conclusion_verified: bool,
    pub outcome: Outcome,
}

fn theorem_check(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    k: usize,
    semantics: Semantics,
    theorem: TheoremKind,
) -> Result<TheoremVerdict> {
    let options = Options {
        semantics,
        ..Options::default()
    };
    let result = match theorem {
        TheoremKind::Perimetric => perimetric_coefficient_with(space, map, k, &options)?,
        TheoremKind::KannanPerimetric => kannan_perimetric_coefficient_with(space, map, k, &options)?,
    };
    let periods = least_periods(map);
    let periodic_violation = periods
        .iter()
        .enumerate()
        .find_map(|(i, p)| p.filter(|&p| (2..k).contains(&p)).map(|p| (i, p)))
        .map(|(i, period)| PeriodicViolation {
            point: space.label(i).to_string(),
            period,
        });
    let periodic_free = periodic_violation.is_none();
    let hypotheses_hold = result.member && periodic_free;

    let fixed = fixed_points(map);
    let fixed_point_bound_holds = fixed.len() < k;
    let orbit_cycle_lengths: Vec<usize> = periods
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let all_orbits_reach_fixed_point = orbit_cycle_lengths == [1];

    let (conclusion_verified, outcome) = if hypotheses_hold {
        let ok = !fixed.is_empty() && fixed_point_bound_holds && all_orbits_reach_fixed_point;
        (ok, if ok { Outcome::Verified } else { Outcome::Violated })
    } else if result.member && !fixed_point_bound_holds {
        (false, Outcome::Violated)
    } else {
        (false, Outcome::HypothesesNotSatisfied)
    };

    Ok(TheoremVerdict {
        theorem,
        k,
        semantics,
        class_member: result.member,
        coefficient: result.coefficient,
        periodic_free,
        periodic_violation,
        hypotheses_hold,
        fixed_point_labels: space.labels_of(&fixed),
        fixed_points: fixed,
        fixed_point_bound_holds,
        orbit_cycle_lengths,
        all_orbits_reach_fixed_point,
        conclusion_verified,
        outcome,
    })
}

/// Fixed-point theorem for perimetric contractions on k-polygons.
///
/// With membership and no prime periods `2..k-1`, a fixed point must exist
/// and every orbit must end on one; membership alone caps the number of
/// fixed points at `k - 1`.
pub fn fixed_point_theorem_check(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    k: usize,
    semantics: Semantics,
) -> Result<TheoremVerdict> {
    theorem_check(space, map, k, semantics, TheoremKind::Perimetric)
}

/// Same shape as [`fixed_point_theorem_check`] for the Kannan-perimetric
/// class (`mu < 2/k`).
pub fn kannan_theorem_check(
    space: &FiniteMetricSpace,
    map: &SelfMap,
    k: usize,
    semantics: Semantics,
) -> Result<TheoremVerdict> {
    theorem_check(space, map, k, semantics, TheoremKind::KannanPerimetric)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex_2_1_map() -> SelfMap {
        SelfMap::new(vec![0, 2, 1, 4, 5, 3, 0]).unwrap()
    }

    #[test]
    fn orbits() {
        let t = ex_2_1_map();
        let o = orbit(&t, 6).unwrap();
        assert_eq!((o.tail, o.cycle), (vec![6], vec![0]));
        let o = orbit(&t, 3).unwrap();
        assert_eq!((o.tail.clone(), o.cycle.clone()), (vec![], vec![3, 4, 5]));
        assert_eq!(o.limit(), None);
        let id = SelfMap::identity(3);
        let o = orbit(&id, 2).unwrap();
        assert_eq!((o.tail, o.cycle), (vec![], vec![2]));
        assert!(orbit(&id, 3).is_err());
    }

    #[test]
    fn orbit_structure_invariants() {
        let t = SelfMap::new(vec![1, 2, 3, 1, 0, 4]).unwrap();
        for s in 0..6 {
            let o = orbit(&t, s).unwrap();
            assert!(!o.cycle.is_empty());
            if let Some(&last) = o.tail.last() {
                assert_eq!(t.at(last), o.cycle[0]);
            }
            for w in o.cycle.windows(2) {
                assert_eq!(t.at(w[0]), w[1]);
            }
            assert_eq!(t.at(*o.cycle.last().unwrap()), o.cycle[0]);
            assert!(o.tail.iter().all(|x| !o.cycle.contains(x)));
            assert!(o.tail.len() + o.cycle.len() <= 6);
        }
    }

    #[test]
    fn periods_of_example() {
        let t = ex_2_1_map();
        assert_eq!(fixed_points(&t), vec![0]);
        assert_eq!(periodic_points(&t, 2).unwrap(), vec![1, 2]);
        assert_eq!(periodic_points(&t, 3).unwrap(), vec![3, 4, 5]);
        assert_eq!(periodic_points(&t, 1).unwrap(), vec![0]);
        assert!(periodic_points(&SelfMap::identity(4), 2).unwrap().is_empty());
        assert!(periodic_points(&t, 0).is_err());
        let table = prime_period_table(&t);
        let on_cycles: usize = table.values().map(Vec::len).sum();
        assert_eq!(on_cycles, 6);
    }

    #[test]
    fn constant_map_verdict() {
        let s = FiniteMetricSpace::from_integer_matrix(&[
            vec![0, 1, 1, 1],
            vec![1, 0, 1, 1],
            vec![1, 1, 0, 1],
            vec![1, 1, 1, 0],
        ])
        .unwrap();
        let c = SelfMap::constant(4, 2).unwrap();
        for k in 3..=4 {
            let v = fixed_point_theorem_check(&s, &c, k, Semantics::Strict).unwrap();
            assert!(v.hypotheses_hold);
            assert_eq!(v.fixed_points, vec![2]);
            assert_eq!(v.outcome, Outcome::Verified);
            let v = kannan_theorem_check(&s, &c, k, Semantics::Strict).unwrap();
            assert!(v.hypotheses_hold && v.conclusion_verified);
        }
    }

    #[test]
    fn identity_fails_hypotheses() {
        let s = FiniteMetricSpace::from_integer_matrix(&[
            vec![0, 1, 1, 1, 1],
            vec![1, 0, 1, 1, 1],
            vec![1, 1, 0, 1, 1],
            vec![1, 1, 1, 0, 1],
            vec![1, 1, 1, 1, 0],
        ])
        .unwrap();
        let v = kannan_theorem_check(&s, &SelfMap::identity(5), 5, Semantics::Strict).unwrap();
        assert!(v.coefficient.is_infeasible());
        assert!(!v.hypotheses_hold);
        assert_eq!(v.outcome, Outcome::HypothesesNotSatisfied);
    }
}
