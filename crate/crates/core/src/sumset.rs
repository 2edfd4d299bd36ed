//! Frequency-set combinatorics: sumsets, the majorant window
//! `jS + (j−1)(−S)`, and Sidon sets of order `j` (B_j sets).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MajorantError, Result};

/// Refuse B_j enumeration above this many multisets.
pub const DEFAULT_ENUMERATION_LIMIT: u128 = 1_000_000;

/// Finite sorted set of integer frequencies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrequencySet {
    elements: BTreeSet<i64>,
}

impl FrequencySet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, n: i64) -> bool {
        self.elements.contains(&n)
    }

    pub fn insert(&mut self, n: i64) -> bool {
        self.elements.insert(n)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = i64> + '_ {
        self.elements.iter().copied()
    }

    pub fn min(&self) -> Option<i64> {
        self.elements.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.elements.last().copied()
    }

    pub fn union(&self, other: &Self) -> Self {
        self.elements.union(&other.elements).copied().collect()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.elements.is_subset(&other.elements)
    }

    pub fn negate(&self) -> Self {
        self.iter().map(|n| -n).collect()
    }

    /// Algebraic sum `{a + b : a ∈ self, b ∈ other}`.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = BTreeSet::new();
        for a in self.iter() {
            for b in other.iter() {
                out.insert(a + b);
            }
        }
        Self { elements: out }
    }
}

impl FromIterator<i64> for FrequencySet {
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        Self {
            elements: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for FrequencySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|n| n.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `{k₁ + … + k_j : kᵢ ∈ S}`.
pub fn sumset(s: &FrequencySet, j: u32) -> Result<FrequencySet> {
    if j == 0 {
        return Err(MajorantError::InvalidOrder { j, min: 1 });
    }
    let mut out = s.clone();
    for _ in 1..j {
        out = out.add(s);
    }
    Ok(out)
}

/// Frequencies that `Ḡ^{j−1}G^j` can occupy when `Ĝ` lives on `S`.
pub fn majorant_window(s: &FrequencySet, j: u32) -> Result<FrequencySet> {
    let forward = sumset(s, j)?;
    if j == 1 {
        return Ok(forward);
    }
    Ok(forward.add(&sumset(&s.negate(), j - 1)?))
}

/// Multiset of elements of `S`, stored as multiplicities `α(k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Representation {
    pub multiplicity: BTreeMap<i64, u32>,
}

impl Representation {
    fn from_sorted(elements: &[i64]) -> Self {
        let mut multiplicity = BTreeMap::new();
        for &e in elements {
            *multiplicity.entry(e).or_insert(0) += 1;
        }
        Self { multiplicity }
    }

    pub fn order(&self) -> u32 {
        self.multiplicity.values().sum()
    }

    pub fn total(&self) -> i64 {
        self.multiplicity.iter().map(|(&k, &a)| k * a as i64).sum()
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .multiplicity
            .iter()
            .flat_map(|(&k, &a)| std::iter::repeat(k.to_string()).take(a as usize))
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

/// Two distinct order-`j` representations of the same integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BjWitness {
    pub target: i64,
    pub rep_a: Representation,
    pub rep_b: Representation,
}

impl fmt::Display for BjWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.rep_a, self.rep_b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BjVerdict {
    pub is_bj: bool,
    pub witness: Option<BjWitness>,
}

/// Number of multisets of size `j` drawn from `n` elements, `C(n+j−1, j)`,
/// saturating at `u128::MAX`.
pub fn multiset_count(n: usize, j: u32) -> u128 {
    if n == 0 {
        return if j == 0 { 1 } else { 0 };
    }
    let mut acc: u128 = 1;
    for i in 1..=j as u128 {
        // acc·(n−1+i)/i stays integral at every step
        acc = match acc.checked_mul(n as u128 - 1 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}

/// Decides whether `S` is a Sidon set of order `j`, returning a collision
/// when it is not. Multisets are visited in lexicographic order, so the
/// witness pairs the first two representations found for the target.
pub fn is_bj_set(s: &FrequencySet, j: u32, limit: u128) -> Result<BjVerdict> {
    if j == 0 {
        return Err(MajorantError::InvalidOrder { j, min: 1 });
    }
    let count = multiset_count(s.len(), j);
    if count > limit {
        return Err(MajorantError::EnumerationBudgetExceeded { count, limit });
    }
    let elems: Vec<i64> = s.iter().collect();
    if elems.is_empty() {
        return Ok(BjVerdict {
            is_bj: true,
            witness: None,
        });
    }

    // non-decreasing index tuples
    let mut idx = vec![0usize; j as usize];
    let mut seen: HashMap<i64, Vec<i64>> = HashMap::new();
    loop {
        let tuple: Vec<i64> = idx.iter().map(|&i| elems[i]).collect();
        let total: i64 = tuple.iter().sum();
        if let Some(prev) = seen.get(&total) {
            return Ok(BjVerdict {
                is_bj: false,
                witness: Some(BjWitness {
                    target: total,
                    rep_a: Representation::from_sorted(prev),
                    rep_b: Representation::from_sorted(&tuple),
                }),
            });
        }
        seen.insert(total, tuple);

        // advance to the next non-decreasing tuple
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return Ok(BjVerdict {
                    is_bj: true,
                    witness: None,
                });
            }
            pos -= 1;
            if idx[pos] + 1 < elems.len() {
                let next = idx[pos] + 1;
                for slot in idx[pos..].iter_mut() {
                    *slot = next;
                }
                break;
            }
        }
    }
}

/// One row of [`sj_growth_report`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub j: u32,
    pub size: usize,
    /// Set when `|S| >= 2` and the window grew by fewer than two points
    /// over the previous order.
    pub flagged: bool,
}

/// Sizes of `majorant_window(S, j)` for `j = 1..=j_max`.
///
/// These are sizes of index windows, i.e. supports for generic coefficients.
/// A particular `G` can have a smaller support through cancellation.
pub fn sj_growth_report(s: &FrequencySet, j_max: u32) -> Result<Vec<GrowthRow>> {
    if s.is_empty() {
        return Err(MajorantError::EmptyInput);
    }
    if j_max == 0 {
        return Err(MajorantError::InvalidOrder { j: 0, min: 1 });
    }
    let mut rows: Vec<GrowthRow> = Vec::with_capacity(j_max as usize);
    for j in 1..=j_max {
        let size = majorant_window(s, j)?.len();
        let flagged = match rows.last() {
            Some(prev) => s.len() >= 2 && size < prev.size + 2,
            None => false,
        };
        rows.push(GrowthRow { j, size, flagged });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> FrequencySet {
        v.iter().copied().collect()
    }

    #[test]
    fn sumset_examples() {
        assert_eq!(sumset(&set(&[0, 1]), 2).unwrap(), set(&[0, 1, 2]));
        assert_eq!(
            sumset(&set(&[0, 1, 3]), 2).unwrap(),
            set(&[0, 1, 2, 3, 4, 6])
        );
        for j in 1..6 {
            assert_eq!(sumset(&set(&[5]), j).unwrap(), set(&[5 * j as i64]));
        }
        assert_eq!(sumset(&set(&[2, 9]), 1).unwrap(), set(&[2, 9]));
        assert!(sumset(&set(&[1]), 0).is_err());
    }

    #[test]
    fn window_examples() {
        assert_eq!(
            majorant_window(&set(&[0, 1]), 2).unwrap(),
            set(&[-1, 0, 1, 2])
        );
        for j in 1..5 {
            assert_eq!(majorant_window(&set(&[0]), j).unwrap(), set(&[0]));
        }
        assert_eq!(
            majorant_window(&set(&[0, 1, 3]), 2).unwrap(),
            set(&[-3, -2, -1, 0, 1, 2, 3, 4, 5, 6])
        );
        assert_eq!(majorant_window(&set(&[4, 7]), 1).unwrap(), set(&[4, 7]));
    }

    #[test]
    fn bj_examples() {
        let v = is_bj_set(&set(&[0, 1, 2]), 2, DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert!(!v.is_bj);
        let w = v.witness.unwrap();
        assert_eq!(w.to_string(), "0+2 = 1+1");
        assert_eq!(w.target, 2);
        assert_eq!(w.rep_a.order(), 2);
        assert_eq!(w.rep_b.total(), 2);

        assert!(
            is_bj_set(&set(&[0, 1, 3]), 2, DEFAULT_ENUMERATION_LIMIT)
                .unwrap()
                .is_bj
        );
        for j in 1..6 {
            assert!(
                is_bj_set(&set(&[7]), j, DEFAULT_ENUMERATION_LIMIT)
                    .unwrap()
                    .is_bj
            );
        }
    }

    #[test]
    fn bj_budget_is_enforced() {
        let big: FrequencySet = (0..200).collect();
        match is_bj_set(&big, 4, DEFAULT_ENUMERATION_LIMIT) {
            Err(MajorantError::EnumerationBudgetExceeded { count, .. }) => {
                assert_eq!(count, multiset_count(200, 4))
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn multiset_counts() {
        assert_eq!(multiset_count(3, 2), 6);
        assert_eq!(multiset_count(4, 3), 20);
        assert_eq!(multiset_count(1, 9), 1);
        assert_eq!(multiset_count(0, 2), 0);
    }

    #[test]
    fn lacunary_sets_are_bj() {
        let s = set(&[1, 10, 100, 1000]);
        for j in [2, 3] {
            assert!(is_bj_set(&s, j, DEFAULT_ENUMERATION_LIMIT).unwrap().is_bj);
        }
    }

    #[test]
    fn growth_examples() {
        let rows = sj_growth_report(&set(&[0, 1]), 5).unwrap();
        let sizes: Vec<usize> = rows.iter().map(|r| r.size).collect();
        assert_eq!(sizes, vec![2, 4, 6, 8, 10]);
        assert!(rows.iter().all(|r| !r.flagged));
        assert!(rows[1].size >= 4);

        let rows = sj_growth_report(&set(&[0]), 4).unwrap();
        assert!(rows.iter().all(|r| r.size == 1 && !r.flagged));
        assert!(sj_growth_report(&FrequencySet::new(), 3).is_err());
    }

    #[test]
    fn display_formats() {
        assert_eq!(set(&[3, -1, 0]).to_string(), "{-1,0,3}");
    }
}
