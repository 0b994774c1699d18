use std::fmt;
use std::hash::BuildHasherDefault;

use indexmap::IndexSet;
use rustc_hash::FxHasher;

use super::element::{Family, GroupElement};
use super::order::{canonical_key, CanonKey};
use crate::error::{Error, Result};

type FxIndexSet<T> = IndexSet<T, BuildHasherDefault<FxHasher>>;

/// A finite set of group elements, stored in canonical order with hashed membership.
///
/// Positions in the canonical order are stable handles: `index_of` and `get`
/// convert between elements and dense integer ids.
#[derive(Clone, Default)]
pub struct FiniteSubset {
    elems: FxIndexSet<GroupElement>,
}

impl FiniteSubset {
    pub fn empty() -> Self {
        FiniteSubset::default()
    }

    pub fn singleton(g: GroupElement) -> Self {
        let mut elems = FxIndexSet::default();
        elems.insert(g);
        FiniteSubset { elems }
    }

    /// Deduplicates and sorts into canonical order.
    pub fn new<I: IntoIterator<Item = GroupElement>>(items: I) -> Self {
        let mut v: Vec<GroupElement> = items.into_iter().collect();
        v.sort_by_cached_key(canonical_key);
        v.dedup();
        FiniteSubset { elems: v.into_iter().collect() }
    }

    /// Builds from items already sorted and deduplicated in canonical order.
    pub fn from_canonical_unchecked(items: Vec<GroupElement>) -> Self {
        debug_assert!(items
            .windows(2)
            .all(|w| canonical_key(&w[0]) < canonical_key(&w[1])));
        FiniteSubset { elems: items.into_iter().collect() }
    }

    /// ℤ interval `[lo, hi]`.
    pub fn interval(lo: i64, hi: i64) -> Self {
        FiniteSubset::new((lo..=hi).map(GroupElement::z))
    }

    /// Box `∏ [lo_i, hi_i]` in ℤᵈ.
    pub fn zd_box(lo: &[i64], hi: &[i64]) -> Self {
        assert_eq!(lo.len(), hi.len());
        let d = lo.len();
        let mut out = Vec::new();
        let mut cur = lo.to_vec();
        if (0..d).any(|i| lo[i] > hi[i]) {
            return FiniteSubset::empty();
        }
        loop {
            out.push(GroupElement::zd(&cur));
            let mut i = 0;
            loop {
                if i == d {
                    return FiniteSubset::new(out);
                }
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = lo[i];
                i += 1;
            }
        }
    }

    /// Cube `[−n, n]ᵈ`.
    pub fn zd_cube(d: usize, n: i64) -> Self {
        FiniteSubset::zd_box(&vec![-n; d], &vec![n; d])
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elems.contains(g)
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.elems.get_index_of(g)
    }

    pub fn get(&self, i: usize) -> Option<&GroupElement> {
        self.elems.get_index(i)
    }

    pub fn first(&self) -> Option<&GroupElement> {
        self.elems.first()
    }

    /// Iterates in canonical order.
    pub fn iter(&self) -> indexmap::set::Iter<'_, GroupElement> {
        self.elems.iter()
    }

    pub fn to_vec(&self) -> Vec<GroupElement> {
        self.elems.iter().cloned().collect()
    }

    pub fn family(&self) -> Option<Family> {
        self.first().map(GroupElement::family)
    }

    pub fn keys(&self) -> Vec<CanonKey> {
        self.elems.iter().map(canonical_key).collect()
    }

    pub fn is_subset(&self, other: &FiniteSubset) -> bool {
        self.len() <= other.len() && self.iter().all(|g| other.contains(g))
    }

    pub fn is_disjoint(&self, other: &FiniteSubset) -> bool {
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().all(|g| !big.contains(g))
    }

    pub fn union(&self, other: &FiniteSubset) -> FiniteSubset {
        FiniteSubset::new(self.iter().chain(other.iter()).cloned())
    }

    pub fn intersection(&self, other: &FiniteSubset) -> FiniteSubset {
        // filtering preserves canonical order
        let v = self.iter().filter(|g| other.contains(g)).cloned().collect();
        FiniteSubset::from_canonical_unchecked(v)
    }

    pub fn difference(&self, other: &FiniteSubset) -> FiniteSubset {
        let v = self.iter().filter(|g| !other.contains(g)).cloned().collect();
        FiniteSubset::from_canonical_unchecked(v)
    }

    pub fn symmetric_difference(&self, other: &FiniteSubset) -> FiniteSubset {
        self.difference(other).union(&other.difference(self))
    }

    pub fn intersection_len(&self, other: &FiniteSubset) -> usize {
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().filter(|g| big.contains(g)).count()
    }

    pub fn filter(&self, mut keep: impl FnMut(&GroupElement) -> bool) -> FiniteSubset {
        let v = self.iter().filter(|g| keep(g)).cloned().collect();
        FiniteSubset::from_canonical_unchecked(v)
    }

    /// Right translate `S·g`.
    pub fn translate(&self, g: &GroupElement) -> FiniteSubset {
        FiniteSubset::new(self.iter().map(|s| s.mul(g)))
    }

    /// Left translate `g·S`.
    pub fn left_translate(&self, g: &GroupElement) -> FiniteSubset {
        FiniteSubset::new(self.iter().map(|s| g.mul(s)))
    }

    /// `S⁻¹ = {s⁻¹}`.
    pub fn inverse(&self) -> FiniteSubset {
        FiniteSubset::new(self.iter().map(GroupElement::inv))
    }

    /// Line-oriented text: one normal form per line, canonical order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for g in self.iter() {
            s.push_str(&g.to_text());
            s.push('\n');
        }
        s
    }

    /// Parses [`Self::to_text`] output; blank lines and `#` comments are skipped.
    pub fn parse(family: Family, text: &str) -> Result<FiniteSubset> {
        let mut v = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            v.push(
                GroupElement::parse(family, line)
                    .map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?,
            );
        }
        Ok(FiniteSubset::new(v))
    }
}

impl PartialEq for FiniteSubset {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().zip(other.iter()).all(|(a, b)| a == b)
    }
}

impl Eq for FiniteSubset {}

impl std::hash::Hash for FiniteSubset {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.len().hash(state);
        for g in self.iter() {
            g.hash(state);
        }
    }
}

impl fmt::Debug for FiniteSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, g) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&g.to_text())?;
        }
        f.write_str("}")
    }
}

impl FromIterator<GroupElement> for FiniteSubset {
    fn from_iter<I: IntoIterator<Item = GroupElement>>(iter: I) -> Self {
        FiniteSubset::new(iter)
    }
}

impl IntoIterator for FiniteSubset {
    type Item = GroupElement;
    type IntoIter = indexmap::set::IntoIter<GroupElement>;

    fn into_iter(self) -> Self::IntoIter {
        self.elems.into_iter()
    }
}

impl<'a> IntoIterator for &'a FiniteSubset {
    type Item = &'a GroupElement;
    type IntoIter = indexmap::set::Iter<'a, GroupElement>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}
