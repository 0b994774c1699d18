//! Partial injections with bounded multipliers, corrected along chains until
//! they are total on a tiled region.

mod blockcode;
mod bound;
mod chains;
mod solve;

pub use blockcode::{verify_block_code, BlockCodeVerdict};
pub use bound::{chain_bound_n, ChainBound};
pub use chains::{
    correct_along, find_chain, minimal_chains, select_minimal, validate_chain, ChainSearch,
    MinimalSelection, MINIMAL_CHAIN_BUDGET,
};
pub use solve::{comparison_solve, hall_oracle, HallReport, RoundTrace, SolveOptions, Solution};

use std::cmp::Ordering;

use rustc_hash::FxHashMap;

use crate::density::Window;
use crate::error::{Error, Result};
use crate::group::{product_set, FiniteSubset, GroupElement};
use crate::quasitiling::Quasitiling;
use crate::symbolic::SymbolicArray;
use crate::Rational;

/// Injective map `A′ → B′` whose multipliers `φ(a)a⁻¹` lie in an ordered set `E`.
#[derive(Clone, Debug)]
pub struct PartialBijection {
    e: Vec<GroupElement>,
    e_index: FxHashMap<GroupElement, u32>,
    forward: FxHashMap<GroupElement, GroupElement>,
    reverse: FxHashMap<GroupElement, GroupElement>,
}

impl PartialEq for PartialBijection {
    fn eq(&self, other: &Self) -> bool {
        self.e == other.e && self.forward == other.forward
    }
}

impl PartialBijection {
    /// Empty map; `E` is enumerated in the order of the given set.
    pub fn new(e: &FiniteSubset) -> Self {
        let e: Vec<GroupElement> = e.to_vec();
        let e_index = e.iter().enumerate().map(|(i, g)| (g.clone(), i as u32)).collect();
        PartialBijection { e, e_index, forward: FxHashMap::default(), reverse: FxHashMap::default() }
    }

    pub fn multiplier_set(&self) -> &[GroupElement] {
        &self.e
    }

    /// Position of `g` in the enumeration of `E`.
    pub fn e_position(&self, g: &GroupElement) -> Option<u32> {
        self.e_index.get(g).copied()
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn get(&self, a: &GroupElement) -> Option<&GroupElement> {
        self.forward.get(a)
    }

    pub fn preimage(&self, b: &GroupElement) -> Option<&GroupElement> {
        self.reverse.get(b)
    }

    pub fn in_domain(&self, a: &GroupElement) -> bool {
        self.forward.contains_key(a)
    }

    pub fn in_range(&self, b: &GroupElement) -> bool {
        self.reverse.contains_key(b)
    }

    /// `φ(a)a⁻¹` as an element of `E`.
    pub fn multiplier(&self, a: &GroupElement) -> Option<GroupElement> {
        self.forward.get(a).map(|b| b.mul(&a.inv()))
    }

    /// Adds `a ↦ b`, rejecting multipliers outside `E` and collisions.
    pub fn insert(&mut self, a: GroupElement, b: GroupElement) -> Result<()> {
        let m = b.mul(&a.inv());
        if !self.e_index.contains_key(&m) {
            return Err(Error::usage(format!("multiplier {m} of {a} ↦ {b} is not in E")));
        }
        if self.forward.contains_key(&a) {
            return Err(Error::usage(format!("{a} is already in the domain")));
        }
        if self.reverse.contains_key(&b) {
            return Err(Error::usage(format!("{b} is already in the range")));
        }
        self.forward.insert(a.clone(), b.clone());
        self.reverse.insert(b, a);
        Ok(())
    }

    pub fn domain(&self) -> FiniteSubset {
        FiniteSubset::new(self.forward.keys().cloned())
    }

    pub fn range(&self) -> FiniteSubset {
        FiniteSubset::new(self.reverse.keys().cloned())
    }

    /// Pairs `(a, φ(a))` in canonical order of `a`.
    pub fn pairs(&self) -> Vec<(GroupElement, GroupElement)> {
        self.domain().iter().map(|a| (a.clone(), self.forward[a].clone())).collect()
    }

    /// Injectivity, multipliers in `E`, domain in `A` and range in `B`.
    pub fn check(&self, a: &FiniteSubset, b: &FiniteSubset) -> Result<()> {
        if self.forward.len() != self.reverse.len() {
            return Err(Error::internal("forward and reverse maps differ in size"));
        }
        for (x, y) in &self.forward {
            if self.reverse.get(y) != Some(x) {
                return Err(Error::internal(format!("{x} ↦ {y} is not injective")));
            }
            if !self.e_index.contains_key(&y.mul(&x.inv())) {
                return Err(Error::internal(format!("multiplier of {x} ↦ {y} is outside E")));
            }
            if !a.contains(x) || !b.contains(y) {
                return Err(Error::internal(format!("{x} ↦ {y} leaves A × B")));
            }
        }
        Ok(())
    }

    /// Line-oriented text: `a -> b` per pair.
    pub fn to_text(&self) -> String {
        self.pairs()
            .iter()
            .map(|(a, b)| format!("{} -> {}\n", a.to_text(), b.to_text()))
            .collect()
    }

    fn remove(&mut self, a: &GroupElement) {
        if let Some(b) = self.forward.remove(a) {
            self.reverse.remove(&b);
        }
    }
}

/// `(a₁,b₁,…,aₙ,bₙ)` with its name `(p₁,q₁,…,pₙ)` given as positions in `E`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CorrectionChain {
    pub points: Vec<GroupElement>,
    pub name: Vec<u32>,
}

impl CorrectionChain {
    /// Number of points, `2n`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> &GroupElement {
        &self.points[0]
    }

    pub fn end(&self) -> &GroupElement {
        self.points.last().expect("nonempty chain")
    }

    pub fn collides(&self, other: &CorrectionChain) -> bool {
        self.points.iter().any(|p| other.points.contains(p))
    }

    pub fn cmp_name(&self, other: &CorrectionChain) -> Ordering {
        name_cmp(&self.name, &other.name)
    }
}

/// Names are ordered by length, then lexicographically.
pub fn name_cmp(a: &[u32], b: &[u32]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Two disjoint sets, a tiling and the per-tile advantage `ε`.
///
/// Everything is restricted to the region `R` covered by tiles lying wholly
/// inside the carrier, where the per-tile counting argument applies.
#[derive(Clone, Debug)]
pub struct ComparisonInstance {
    pub a: FiniteSubset,
    pub b: FiniteSubset,
    pub tiling: Quasitiling,
    pub eps: Rational,
    pub window: Window,
    /// Ordered multiplier set, `⋃ SS⁻¹` over shapes unless widened.
    pub e: FiniteSubset,
    region: FiniteSubset,
    complete_tiles: Vec<usize>,
    a_r: FiniteSubset,
    b_r: FiniteSubset,
}

impl ComparisonInstance {
    pub fn new(
        a: FiniteSubset,
        b: FiniteSubset,
        tiling: Quasitiling,
        eps: Rational,
        window: Window,
    ) -> Result<Self> {
        if !a.is_disjoint(&b) {
            return Err(Error::usage("A and B must be disjoint"));
        }
        if eps <= Rational::from_integer(0) {
            return Err(Error::domain(format!("ε must be positive, got {eps}")));
        }
        let sets = tiling.tile_sets();
        let mut complete_tiles = Vec::new();
        let mut cells = Vec::new();
        for (k, s) in sets.iter().enumerate() {
            if s.is_subset(&window.carrier) {
                complete_tiles.push(k);
                cells.extend(s.iter().cloned());
            }
        }
        let n_cells = cells.len();
        let region = FiniteSubset::new(cells);
        if region.len() != n_cells {
            return Err(Error::usage("the tiles of a comparison instance must be disjoint"));
        }
        let e = FiniteSubset::new(tiling.shapes.iter().flat_map(|s| product_set(s, &s.inverse())));
        let a_r = a.intersection(&region);
        let b_r = b.intersection(&region);
        Ok(ComparisonInstance { a, b, tiling, eps, window, e, region, complete_tiles, a_r, b_r })
    }

    /// Replaces `E` by a superset of `⋃ SS⁻¹`.
    pub fn with_multipliers(mut self, e: FiniteSubset) -> Result<Self> {
        if !self.e.is_subset(&e) {
            return Err(Error::usage("E may only be widened"));
        }
        self.e = e;
        Ok(self)
    }

    /// Union `R` of the tiles lying inside the carrier.
    pub fn region(&self) -> &FiniteSubset {
        &self.region
    }

    pub fn a_region(&self) -> &FiniteSubset {
        &self.a_r
    }

    pub fn b_region(&self) -> &FiniteSubset {
        &self.b_r
    }

    pub fn complete_tiles(&self) -> &[usize] {
        &self.complete_tiles
    }

    /// Complete tiles where `|B∩T| − |A∩T| > ε|T|` fails.
    pub fn advantage_violations(&self) -> Vec<usize> {
        self.complete_tiles
            .iter()
            .copied()
            .filter(|&k| {
                let t = self.tiling.tile_set(k);
                let adv = t.intersection_len(&self.b_r) as i64 - t.intersection_len(&self.a_r) as i64;
                Rational::from_integer(adv) <= self.eps * t.len() as i64
            })
            .collect()
    }

    /// `y^{AB}` of the restricted sets over the window.
    pub fn y_ab(&self) -> Result<SymbolicArray> {
        SymbolicArray::from_sets(self.window.clone(), &self.a_r, &self.b_r)
    }
}

/// The first approximation: for each `g` of `E` in order, map every still
/// unassigned `a` to `ga` when `ga ∈ B` is still free.
pub fn greedy_initial(inst: &ComparisonInstance, e: &FiniteSubset) -> PartialBijection {
    let mut phi = PartialBijection::new(e);
    for g in e {
        for a in inst.a_region() {
            if phi.in_domain(a) {
                continue;
            }
            let b = g.mul(a);
            if inst.b_region().contains(&b) && !phi.in_range(&b) {
                phi.insert(a.clone(), b).expect("fresh pair with multiplier in E");
            }
        }
    }
    phi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasitiling::Tile;

    pub(crate) fn one_tile(lo: i64, hi: i64, a: &[i64], b: &[i64]) -> ComparisonInstance {
        let shape = FiniteSubset::interval(0, hi - lo);
        let t = Quasitiling::new(vec![shape], vec![Tile::new(0, GroupElement::z(lo))]).unwrap();
        let w = Window::new(FiniteSubset::interval(lo, hi), FiniteSubset::singleton(GroupElement::z(0)))
            .unwrap();
        ComparisonInstance::new(
            FiniteSubset::new(a.iter().map(|&x| GroupElement::z(x))),
            FiniteSubset::new(b.iter().map(|&x| GroupElement::z(x))),
            t,
            Rational::new(1, 10),
            w,
        )
        .unwrap()
    }

    fn ints(xs: &[i64]) -> FiniteSubset {
        FiniteSubset::new(xs.iter().map(|&x| GroupElement::z(x)))
    }

    #[test]
    fn greedy_examples() {
        let inst = one_tile(0, 3, &[0], &[1]);
        let phi = greedy_initial(&inst, &ints(&[1]));
        assert_eq!(phi.get(&GroupElement::z(0)), Some(&GroupElement::z(1)));

        let inst = one_tile(0, 3, &[0, 1], &[2, 3]);
        let phi = greedy_initial(&inst, &ints(&[2, 3]));
        assert_eq!(phi.get(&GroupElement::z(0)), Some(&GroupElement::z(2)));
        assert_eq!(phi.get(&GroupElement::z(1)), Some(&GroupElement::z(3)));

        let inst = one_tile(0, 3, &[], &[2, 3]);
        assert!(greedy_initial(&inst, &ints(&[2, 3])).is_empty());
    }

    #[test]
    fn name_order() {
        assert_eq!(name_cmp(&[5], &[0, 0, 0]), Ordering::Less);
        assert_eq!(name_cmp(&[1, 2, 3], &[1, 3, 0]), Ordering::Less);
        assert_eq!(name_cmp(&[1], &[1]), Ordering::Equal);
    }

    #[test]
    fn region_and_multipliers() {
        let inst = one_tile(0, 3, &[0], &[1, 2]);
        assert_eq!(inst.e, FiniteSubset::interval(-3, 3));
        assert_eq!(inst.region(), &FiniteSubset::interval(0, 3));
        assert!(inst.advantage_violations().is_empty());
        assert!(ComparisonInstance::new(
            ints(&[0]),
            ints(&[0]),
            inst.tiling.clone(),
            Rational::new(1, 2),
            inst.window.clone()
        )
        .is_err());
    }
}
