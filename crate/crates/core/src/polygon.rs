//! Lazy enumeration of k-subsets and of Hamiltonian cycles up to rotation
//! and reflection.
//!
//! A cycle is canonical when its first vertex is the smallest and its second
//! vertex is smaller than its last. Each undirected cyclic order on `k`
//! distinct points has exactly one canonical representative, and there are
//! `(k-1)!/2` of them. Across all of them every unordered pair of points is
//! adjacent exactly `(k-2)!` times; summing perimeters over all cycles
//! therefore gives `(k-2)!` times the total pairwise distance.

use serde::Serialize;

use crate::error::{Error, Result};

/// One cyclic order in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CanonicalCycle {
    vertices: Vec<usize>,
}

impl CanonicalCycle {
    /// Canonicalizes an arbitrary cyclic order of distinct vertices.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        if order.len() < 3 {
            return Err(Error::InvalidK {
                what: "cycle",
                k: order.len(),
                min: 3,
                max: usize::MAX,
            });
        }
        if !crate::metric::is_pairwise_distinct(order) {
            return Err(Error::InvalidConfig("cycle vertices must be distinct".into()));
        }
        let k = order.len();
        let start = (0..k).min_by_key(|&i| order[i]).expect("nonempty");
        let mut v: Vec<usize> = (0..k).map(|i| order[(start + i) % k]).collect();
        if v[1] > v[k - 1] {
            v[1..].reverse();
        }
        Ok(CanonicalCycle { vertices: v })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Undirected edges `(min, max)` in cycle order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % k];
            (a.min(b), a.max(b))
        })
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.vertices
    }
}

fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}

fn check_cycle_k(what: &'static str, k: usize) -> Result<()> {
    if k < 3 {
        return Err(Error::InvalidK {
            what,
            k,
            min: 3,
            max: usize::MAX,
        });
    }
    Ok(())
}

/// Number of canonical Hamiltonian cycles on `k` points: `(k-1)!/2`.
pub fn cycle_count(k: usize) -> Result<u128> {
    check_cycle_k("cycle_count", k)?;
    Ok(factorial(k - 1) / 2)
}

/// Number of canonical cycles containing a fixed edge: `(k-2)!`.
pub fn edge_frequency(k: usize) -> Result<u128> {
    check_cycle_k("edge_frequency", k)?;
    Ok(factorial(k - 2))
}

/// Lexicographic k-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct KSubsets {
    n: usize,
    current: Vec<usize>,
    done: bool,
}

impl Iterator for KSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let k = self.current.len();
        // advance: rightmost position that can still move
        match (0..k).rev().find(|&i| self.current[i] < self.n - k + i) {
            Some(i) => {
                self.current[i] += 1;
                for j in (i + 1)..k {
                    self.current[j] = self.current[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}

pub fn k_subsets(n: usize, k: usize) -> Result<KSubsets> {
    if k < 2 || k > n {
        return Err(Error::InvalidK {
            what: "k_subsets",
            k,
            min: 2,
            max: n,
        });
    }
    Ok(KSubsets {
        n,
        current: (0..k).collect(),
        done: false,
    })
}

/// Rearranges `v` into the next lexicographic permutation; false at the end.
fn next_permutation(v: &mut [usize]) -> bool {
    let len = v.len();
    if len < 2 {
        return false;
    }
    let Some(i) = (0..len - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..len).rev().find(|&j| v[j] > v[i]).expect("exists");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Canonical Hamiltonian cycles on one subset, in lexicographic order.
#[derive(Debug, Clone)]
pub struct HamiltonianCycles {
    first: usize,
    rest: Vec<usize>,
    done: bool,
}

impl Iterator for HamiltonianCycles {
    type Item = CanonicalCycle;

    fn next(&mut self) -> Option<CanonicalCycle> {
        while !self.done {
            let emit = self.rest[0] < self.rest[self.rest.len() - 1];
            let snapshot = emit.then(|| {
                let mut v = Vec::with_capacity(self.rest.len() + 1);
                v.push(self.first);
                v.extend_from_slice(&self.rest);
                v
            });
            if !next_permutation(&mut self.rest) {
                self.done = true;
            }
            if let Some(vertices) = snapshot {
                return Some(CanonicalCycle { vertices });
            }
        }
        None
    }
}

pub fn hamiltonian_cycles(subset: &[usize]) -> Result<HamiltonianCycles> {
    check_cycle_k("hamiltonian_cycles", subset.len())?;
    if !crate::metric::is_pairwise_distinct(subset) {
        return Err(Error::InvalidConfig("subset indices must be distinct".into()));
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    Ok(HamiltonianCycles {
        first: sorted[0],
        rest: sorted[1..].to_vec(),
        done: false,
    })
}

/// Visits the same cycles as [`hamiltonian_cycles`] without allocating per
/// cycle. `subset` must be sorted, distinct, and of length at least 3.
pub(crate) fn for_each_cycle(subset: &[usize], mut visit: impl FnMut(&[usize])) {
    let k = subset.len();
    debug_assert!(k >= 3);
    let mut buf = subset.to_vec();
    loop {
        if buf[1] < buf[k - 1] {
            visit(&buf);
        }
        if !next_permutation(&mut buf[1..]) {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeMap, HashSet};

    fn binomial(n: u64, k: u64) -> u64 {
        // Pascal's triangle, independent of the enumerator
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![1u64; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row[k as usize]
    }

    #[test]
    fn subset_counts() {
        assert_eq!(k_subsets(4, 4).unwrap().count(), 1);
        assert_eq!(k_subsets(4, 3).unwrap().count(), 4);
        assert_eq!(binomial(10, 7), 120);
        assert_eq!(k_subsets(10, 7).unwrap().count(), 120);
        assert!(k_subsets(3, 4).is_err());
    }

    #[test]
    fn subsets_are_lexicographic_and_unique() {
        let all: Vec<_> = k_subsets(6, 3).unwrap().collect();
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(all, sorted);
        assert_eq!(all.len() as u64, binomial(6, 3));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(cycle_count(3).unwrap(), 1);
        assert_eq!(edge_frequency(3).unwrap(), 1);
        assert_eq!(cycle_count(4).unwrap(), 3);
        assert_eq!(cycle_count(7).unwrap(), 360);
        assert_eq!(edge_frequency(7).unwrap(), 120);
        assert!(cycle_count(2).is_err());
        assert!(edge_frequency(1).is_err());
    }

    #[test]
    fn enumerated_cycles_match_closed_forms_and_double_count_edges() {
        for k in 3..=8usize {
            let subset: Vec<usize> = (0..k).collect();
            let cycles: Vec<_> = hamiltonian_cycles(&subset).unwrap().collect();
            assert_eq!(cycles.len() as u128, cycle_count(k).unwrap(), "k={k}");
            let mut freq: BTreeMap<(usize, usize), u128> = BTreeMap::new();
            for c in &cycles {
                for e in c.edges() {
                    *freq.entry(e).or_default() += 1;
                }
            }
            assert_eq!(freq.len(), k * (k - 1) / 2);
            let e = edge_frequency(k).unwrap();
            assert!(freq.values().all(|&f| f == e), "k={k}");
        }
    }

    #[test]
    fn no_two_cycles_are_dihedrally_related() {
        for k in 3..=7usize {
            let subset: Vec<usize> = (10..10 + k).collect();
            let mut seen = HashSet::new();
            for c in hamiltonian_cycles(&subset).unwrap() {
                let v = c.vertices();
                assert_eq!(v[0], 10);
                assert!(v[1] < v[k - 1]);
                // every rotation and reflection canonicalizes back to itself
                for shift in 0..k {
                    let mut rot: Vec<usize> = (0..k).map(|i| v[(i + shift) % k]).collect();
                    assert_eq!(CanonicalCycle::from_order(&rot).unwrap(), c);
                    rot.reverse();
                    assert_eq!(CanonicalCycle::from_order(&rot).unwrap(), c);
                }
                assert!(seen.insert(c));
            }
        }
    }

    #[test]
    fn small_k_examples() {
        let three: Vec<_> = hamiltonian_cycles(&[4, 2, 9]).unwrap().collect();
        assert_eq!(three, vec![CanonicalCycle::from_order(&[2, 4, 9]).unwrap()]);
        let four: Vec<Vec<usize>> = hamiltonian_cycles(&[0, 1, 2, 3])
            .unwrap()
            .map(CanonicalCycle::into_vec)
            .collect();
        assert_eq!(four, vec![vec![0, 1, 2, 3], vec![0, 1, 3, 2], vec![0, 2, 1, 3]]);
        assert!(hamiltonian_cycles(&[0, 1]).is_err());
        assert!(hamiltonian_cycles(&[0, 1, 1]).is_err());
    }

    #[test]
    fn visitor_matches_iterator() {
        let subset = [1, 3, 4, 6, 7];
        let mut visited = Vec::new();
        for_each_cycle(&subset, |c| visited.push(c.to_vec()));
        let iterated: Vec<Vec<usize>> = hamiltonian_cycles(&subset)
            .unwrap()
            .map(CanonicalCycle::into_vec)
            .collect();
        assert_eq!(visited, iterated);
    }
}
