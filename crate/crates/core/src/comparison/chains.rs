use std::cmp::Ordering;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use super::{name_cmp, ComparisonInstance, CorrectionChain, PartialBijection};
use crate::error::{Error, Result};
use crate::group::GroupElement;

/// Step budget for the exhaustive enumeration inside [`minimal_chains`].
pub const MINIMAL_CHAIN_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum ChainSearch {
    Found(CorrectionChain),
    /// The alternating reachable set closed without meeting a free point of `B`.
    Exhausted { reached: usize },
    /// No chain with at most `max_pairs` pairs; the search did not close.
    Truncated { reached: usize },
}

impl ChainSearch {
    pub fn chain(&self) -> Option<&CorrectionChain> {
        match self {
            ChainSearch::Found(c) => Some(c),
            _ => None,
        }
    }
}

struct Node {
    a: GroupElement,
    points: Vec<GroupElement>,
    name: Vec<u32>,
}

/// Shortest correction chain from `a1`, name-minimal among the shortest.
///
/// Breadth-first over `A`-points: from `a` every `b = ga ∈ B` (`g` in the
/// order of `E`) either ends the chain when `b` is free or continues to
/// `φ⁻¹(b)`. Each layer is scanned in name order, so the first discovery of a
/// point carries its least name prefix.
pub fn find_chain(
    phi: &PartialBijection,
    a1: &GroupElement,
    inst: &ComparisonInstance,
    max_pairs: usize,
) -> Result<ChainSearch> {
    if !inst.a_region().contains(a1) {
        return Err(Error::usage(format!("{a1} is not a point of A in the tiled region")));
    }
    if phi.in_domain(a1) {
        return Err(Error::usage(format!("{a1} is already in the domain")));
    }
    let e = phi.multiplier_set();
    let b_r = inst.b_region();
    let mut visited: FxHashSet<GroupElement> = FxHashSet::default();
    visited.insert(a1.clone());
    let mut layer = vec![Node { a: a1.clone(), points: vec![a1.clone()], name: Vec::new() }];
    for _ in 0..max_pairs {
        let mut next = Vec::new();
        for node in &layer {
            for (gi, g) in e.iter().enumerate() {
                let b = g.mul(&node.a);
                if !b_r.contains(&b) {
                    continue;
                }
                match phi.preimage(&b) {
                    None => {
                        let mut points = node.points.clone();
                        points.push(b);
                        let mut name = node.name.clone();
                        name.push(gi as u32);
                        return Ok(ChainSearch::Found(CorrectionChain { points, name }));
                    }
                    Some(a2) => {
                        if visited.insert(a2.clone()) {
                            let q = phi.e_position(&phi.multiplier(a2).expect("in domain"))
                                .expect("multiplier in E");
                            let mut points = node.points.clone();
                            points.push(b);
                            points.push(a2.clone());
                            let mut name = node.name.clone();
                            name.push(gi as u32);
                            name.push(q);
                            next.push(Node { a: a2.clone(), points, name });
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            return Ok(ChainSearch::Exhausted { reached: visited.len() });
        }
        // discovery order already follows (parent name, g); keep it
        layer = next;
    }
    Ok(ChainSearch::Truncated { reached: visited.len() })
}

/// Correction of `φ` along `C`: `aᵢ ↦ bᵢ` for every `i`.
pub fn correct_along(phi: &PartialBijection, c: &CorrectionChain) -> Result<PartialBijection> {
    validate_chain(phi, c)?;
    let mut out = phi.clone();
    apply(&mut out, c);
    Ok(out)
}

fn apply(phi: &mut PartialBijection, c: &CorrectionChain) {
    for pair in c.points.chunks(2) {
        phi.remove(&pair[0]);
    }
    for pair in c.points.chunks(2) {
        phi.insert(pair[0].clone(), pair[1].clone()).expect("validated chain");
    }
}

/// Checks that `C` is a `φ`-correction chain with a consistent name.
pub fn validate_chain(phi: &PartialBijection, c: &CorrectionChain) -> Result<()> {
    let p = &c.points;
    if p.is_empty() || p.len() % 2 != 0 || c.name.len() != p.len() - 1 {
        return Err(Error::usage("a chain has 2n points and a name of length 2n−1"));
    }
    let distinct: FxHashSet<&GroupElement> = p.iter().collect();
    if distinct.len() != p.len() {
        return Err(Error::usage("chain points must be distinct"));
    }
    if phi.in_domain(&p[0]) {
        return Err(Error::usage(format!("chain start {} is already in the domain", p[0])));
    }
    if phi.in_range(c.end()) {
        return Err(Error::usage(format!("chain end {} is already in the range", c.end())));
    }
    let e = phi.multiplier_set();
    for i in 0..p.len() / 2 {
        let (a, b) = (&p[2 * i], &p[2 * i + 1]);
        let want = e.get(c.name[2 * i] as usize);
        if want != Some(&b.mul(&a.inv())) {
            return Err(Error::usage(format!("{b} is not p·{a} for the named p")));
        }
        if 2 * i + 2 < p.len() {
            let a2 = &p[2 * i + 2];
            if phi.get(a2) != Some(b) {
                return Err(Error::usage(format!("{b} is not φ({a2})")));
            }
            if e.get(c.name[2 * i + 1] as usize) != Some(&b.mul(&a2.inv())) {
                return Err(Error::usage("chain name does not match its points"));
            }
        }
    }
    Ok(())
}

/// Candidate chains and the minimal ones among them.
#[derive(Clone, Debug, Default)]
pub struct MinimalSelection {
    /// Shortest name-minimal chain from every free point that has one.
    pub candidates: Vec<CorrectionChain>,
    /// Free points whose alternating reachable set closes without a chain.
    pub exhausted: Vec<GroupElement>,
    /// Free points with no chain of at most `max_pairs` pairs.
    pub truncated: Vec<GroupElement>,
    /// Minimal chains in name order; pairwise point-disjoint.
    pub minimal: Vec<CorrectionChain>,
    pub enumeration_steps: u64,
}

/// All minimal `φ`-correction chains with at most `max_pairs` pairs.
pub fn minimal_chains(
    phi: &PartialBijection,
    inst: &ComparisonInstance,
    max_pairs: usize,
) -> Result<Vec<CorrectionChain>> {
    Ok(select_minimal(phi, inst, max_pairs)?.minimal)
}

/// A minimal chain starting at `a` is the name-least chain from `a`, so the
/// minimal chains are the candidates `C_a` through whose points no chain with
/// a smaller name passes. That is decided by enumerating every correction
/// chain whose name is at most the largest candidate name and recording, per
/// point, the least name through it.
pub fn select_minimal(
    phi: &PartialBijection,
    inst: &ComparisonInstance,
    max_pairs: usize,
) -> Result<MinimalSelection> {
    let free: Vec<&GroupElement> = inst.a_region().iter().filter(|a| !phi.in_domain(a)).collect();
    let searches: Vec<Result<ChainSearch>> =
        free.par_iter().map(|a| find_chain(phi, a, inst, max_pairs)).collect();
    let mut sel = MinimalSelection::default();
    for (a, s) in free.iter().zip(searches) {
        match s? {
            ChainSearch::Found(c) => sel.candidates.push(c),
            ChainSearch::Exhausted { .. } => sel.exhausted.push((*a).clone()),
            ChainSearch::Truncated { .. } => sel.truncated.push((*a).clone()),
        }
    }
    let Some(bound) = sel.candidates.iter().max_by(|x, y| x.cmp_name(y)).map(|c| c.name.clone())
    else {
        return Ok(sel);
    };
    let mut least: FxHashMap<GroupElement, Vec<u32>> = FxHashMap::default();
    let mut en = Enumerator { phi, inst, bound: &bound, least: &mut least, steps: 0 };
    for a in &free {
        let mut points = vec![(*a).clone()];
        let mut name = Vec::new();
        en.extend(&mut points, &mut name, Ordering::Equal)?;
    }
    sel.enumeration_steps = en.steps;
    let mut minimal: Vec<CorrectionChain> = sel
        .candidates
        .iter()
        .filter(|c| {
            c.points
                .iter()
                .all(|v| least.get(v).is_some_and(|m| name_cmp(m, &c.name) == Ordering::Equal))
        })
        .cloned()
        .collect();
    minimal.sort_by(|x, y| x.cmp_name(y));
    let mut owner: FxHashSet<&GroupElement> = FxHashSet::default();
    for c in &minimal {
        for p in &c.points {
            if !owner.insert(p) {
                return Err(Error::internal(format!("minimal chains collide at {p}")));
            }
        }
    }
    sel.minimal = minimal;
    Ok(sel)
}

struct Enumerator<'a> {
    phi: &'a PartialBijection,
    inst: &'a ComparisonInstance,
    bound: &'a [u32],
    least: &'a mut FxHashMap<GroupElement, Vec<u32>>,
    steps: u64,
}

impl Enumerator<'_> {
    /// Extends a chain ending at an `A`-point. `state` compares the current
    /// name with the same-length prefix of the bound.
    fn extend(&mut self, points: &mut Vec<GroupElement>, name: &mut Vec<u32>, state: Ordering) -> Result<()> {
        let max_pairs = self.bound.len().div_ceil(2);
        let pairs_after = points.len() / 2 + 1;
        let a = points.last().expect("nonempty").clone();
        let e = self.phi.multiplier_set();
        for (gi, g) in e.iter().enumerate() {
            self.steps += 1;
            if self.steps > MINIMAL_CHAIN_BUDGET {
                return Err(Error::Resource(format!(
                    "minimal chain enumeration exceeded {MINIMAL_CHAIN_BUDGET} steps"
                )));
            }
            let b = g.mul(&a);
            if !self.inst.b_region().contains(&b) || points.contains(&b) {
                continue;
            }
            let st = step(state, gi as u32, self.bound.get(name.len()));
            match self.phi.preimage(&b) {
                None => {
                    if pairs_after < max_pairs || st != Ordering::Greater {
                        name.push(gi as u32);
                        points.push(b);
                        self.record(points, name);
                        points.pop();
                        name.pop();
                    }
                }
                Some(a2) => {
                    if pairs_after >= max_pairs || points.contains(a2) {
                        continue;
                    }
                    let q = self.phi.e_position(&self.phi.multiplier(a2).expect("domain")).expect("E");
                    let st2 = step(st, q, self.bound.get(name.len() + 1));
                    if pairs_after + 1 == max_pairs && st2 == Ordering::Greater {
                        // only full-length chains follow, and they exceed the bound
                        continue;
                    }
                    let a2 = a2.clone();
                    name.push(gi as u32);
                    name.push(q);
                    points.push(b);
                    points.push(a2);
                    self.extend(points, name, st2)?;
                    points.truncate(points.len() - 2);
                    name.truncate(name.len() - 2);
                }
            }
        }
        Ok(())
    }

    fn record(&mut self, points: &[GroupElement], name: &[u32]) {
        for p in points {
            match self.least.get_mut(p) {
                Some(m) if name_cmp(name, m) != Ordering::Less => {}
                Some(m) => *m = name.to_vec(),
                None => {
                    self.least.insert(p.clone(), name.to_vec());
                }
            }
        }
    }
}

fn step(state: Ordering, x: u32, bound: Option<&u32>) -> Ordering {
    match (state, bound) {
        (Ordering::Equal, Some(&b)) => x.cmp(&b),
        (Ordering::Equal, None) => Ordering::Greater,
        (s, _) => s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::tests::one_tile;
    use crate::group::FiniteSubset;

    fn z(x: i64) -> GroupElement {
        GroupElement::z(x)
    }

    #[test]
    fn direct_chain() {
        let inst = one_tile(0, 3, &[0], &[1]);
        let phi = PartialBijection::new(&inst.e);
        let c = find_chain(&phi, &z(0), &inst, 4).unwrap();
        let c = c.chain().unwrap();
        assert_eq!(c.points, vec![z(0), z(1)]);
        let fixed = correct_along(&phi, c).unwrap();
        assert_eq!(fixed.get(&z(0)), Some(&z(1)));
    }

    #[test]
    fn length_four_chain() {
        // E = [-1,1] on the tile [0,3]; 1 ↦ 2 blocks 0, whose only way out is via 1
        let inst = one_tile(0, 3, &[0, 2], &[1, 3]).with_multipliers(FiniteSubset::interval(-3, 3)).unwrap();
        let e = FiniteSubset::interval(-1, 1);
        let mut phi = PartialBijection::new(&e);
        phi.insert(z(2), z(1)).unwrap();
        let c = find_chain(&phi, &z(0), &inst, 4).unwrap();
        let c = c.chain().unwrap().clone();
        assert_eq!(c.points, vec![z(0), z(1), z(2), z(3)]);
        let fixed = correct_along(&phi, &c).unwrap();
        assert_eq!(fixed.get(&z(0)), Some(&z(1)));
        assert_eq!(fixed.get(&z(2)), Some(&z(3)));
        assert!(find_chain(&fixed, &z(0), &inst, 4).is_err());
    }

    #[test]
    fn exhausted_when_no_room() {
        let inst = one_tile(0, 3, &[0, 2], &[1]);
        let mut phi = PartialBijection::new(&inst.e);
        phi.insert(z(2), z(1)).unwrap();
        assert!(matches!(find_chain(&phi, &z(0), &inst, 8).unwrap(), ChainSearch::Exhausted { .. }));
    }

    #[test]
    fn crossing_candidates_resolve_by_name() {
        // both free points want B-point 1 first; the smaller name wins
        let inst = one_tile(0, 4, &[0, 2], &[1, 4]);
        let phi = PartialBijection::new(&inst.e);
        let sel = select_minimal(&phi, &inst, 4).unwrap();
        assert_eq!(sel.candidates.len(), 2);
        assert_eq!(sel.minimal.len(), 1);
        assert!(sel.minimal[0].points.contains(&z(1)));
    }

    #[test]
    fn invalid_chain_rejected() {
        let inst = one_tile(0, 3, &[0], &[1]);
        let phi = PartialBijection::new(&inst.e);
        let bad = CorrectionChain { points: vec![z(0), z(2)], name: vec![0] };
        assert!(correct_along(&phi, &bad).is_err());
    }
}
