use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::group::{canonical_key, least_outside, FiniteSubset, GroupElement};

/// Sets of equal size whose translates can be told apart, with the margin
/// beyond which separated placements are fully recognizable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecognizableFamily {
    /// `Bᵢ = Aᵢ ∪ {gᵢ}`, each containing `e`.
    pub sets: Vec<FiniteSubset>,
    pub added: Vec<GroupElement>,
    /// `⋃ Bᵢ′⁻¹ Bᵢ Bᵢ⁻¹ Bᵢ″`.
    pub margin: FiniteSubset,
}

fn triple(a: &FiniteSubset, b: &FiniteSubset, c: &FiniteSubset, out: &mut FxHashSet<GroupElement>) {
    for x in a {
        for y in b {
            let xy = x.mul(y);
            for z in c {
                out.insert(xy.mul(z));
            }
        }
    }
}

/// `A ∪ {g}` with `g` canonically least outside `AA⁻¹A`; sets of size at most
/// one are returned unchanged.
pub fn make_recognizable_origin(a: &FiniteSubset) -> Result<FiniteSubset> {
    if a.len() <= 1 {
        return Ok(a.clone());
    }
    let fam = a.family().expect("nonempty");
    let mut x = FxHashSet::default();
    triple(a, &a.inverse(), a, &mut x);
    let g = least_outside(fam, &FiniteSubset::new(x))?;
    Ok(a.union(&FiniteSubset::singleton(g)))
}

/// Extends each set by one element so that `Bᵢg = Bⱼ` forces `i = j`, `g = e`.
///
/// Sets not containing `e` are first translated by the inverse of their
/// canonically least element.
pub fn make_recognizable_family(sets: &[FiniteSubset]) -> Result<RecognizableFamily> {
    let Some(first) = sets.first() else {
        return Err(Error::usage("empty family"));
    };
    let size = first.len();
    if size < 2 || sets.iter().any(|s| s.len() != size) {
        return Err(Error::usage("family sets must share one cardinality of at least 2"));
    }
    let fam = first.family().expect("nonempty");
    if sets.iter().any(|s| s.family() != Some(fam)) {
        return Err(Error::usage("family sets belong to different groups"));
    }
    let normal: Vec<FiniteSubset> = sets
        .iter()
        .map(|s| {
            if s.contains(&GroupElement::identity(fam)) {
                s.clone()
            } else {
                s.translate(&s.first().expect("nonempty").inv())
            }
        })
        .collect();
    let mut added: Vec<GroupElement> = Vec::with_capacity(normal.len());
    for (i, a) in normal.iter().enumerate() {
        let mut x = FxHashSet::default();
        triple(a, &a.inverse(), a, &mut x);
        for (aj, gj) in normal[..i].iter().zip(&added) {
            let gj_set = FiniteSubset::singleton(gj.clone());
            let gj_inv = FiniteSubset::singleton(gj.inv());
            triple(&gj_set, &aj.inverse(), a, &mut x);
            triple(aj, &gj_inv, a, &mut x);
        }
        added.push(least_outside(fam, &FiniteSubset::new(x))?);
    }
    let sets: Vec<FiniteSubset> = normal
        .iter()
        .zip(&added)
        .map(|(a, g)| a.union(&FiniteSubset::singleton(g.clone())))
        .collect();
    let margin = margin_of(&sets);
    Ok(RecognizableFamily { sets, added, margin })
}

/// `⋃ Bᵢ′⁻¹ Bᵢ Bᵢ⁻¹ Bᵢ″` over all index triples.
pub fn margin_of(sets: &[FiniteSubset]) -> FiniteSubset {
    let inv: FxHashSet<GroupElement> = sets.iter().flat_map(|s| s.inverse()).collect();
    let mut mid: FxHashSet<GroupElement> = FxHashSet::default();
    for s in sets {
        for x in s {
            for y in s {
                mid.insert(x.mul(&y.inv()));
            }
        }
    }
    let all: FxHashSet<GroupElement> = sets.iter().flat_map(|s| s.iter().cloned()).collect();
    let mut out = FxHashSet::default();
    for a in &inv {
        for m in &mid {
            let am = a.mul(m);
            for b in &all {
                out.insert(am.mul(b));
            }
        }
    }
    FiniteSubset::new(out)
}

impl RecognizableFamily {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// All `(t, g)` with `B_t·g ⊆ cells`, in canonical order of `g`, then `t`.
    pub fn occurrences(&self, cells: &FxHashSet<GroupElement>) -> Vec<(usize, GroupElement)> {
        let mut found: FxHashSet<(usize, GroupElement)> = FxHashSet::default();
        for x in cells {
            for (t, b) in self.sets.iter().enumerate() {
                for y in b {
                    let g = y.inv().mul(x);
                    if !found.contains(&(t, g.clone())) && b.iter().all(|z| cells.contains(&z.mul(&g))) {
                        found.insert((t, g));
                    }
                }
            }
        }
        let mut v: Vec<(usize, GroupElement)> = found.into_iter().collect();
        v.sort_by_cached_key(|(t, g)| (canonical_key(g), *t));
        v
    }
}

/// Whether the placements `B_t·g` form a fully recognizable family.
///
/// `true` exactly when no quotient `g′g″⁻¹` of distinct placements lies in the
/// margin; in that case every occurrence of a member inside the union is also
/// checked to be one of the placements, and a failure there is an internal error.
pub fn check_fully_recognizable(
    fam: &RecognizableFamily,
    placements: &[(usize, GroupElement)],
) -> Result<bool> {
    if let Some(&(t, _)) = placements.iter().find(|(t, _)| *t >= fam.len()) {
        return Err(Error::usage(format!("placement uses set {t} of a {}-set family", fam.len())));
    }
    let centers: Vec<&GroupElement> = placements.iter().map(|(_, g)| g).collect();
    let index: rustc_hash::FxHashMap<&GroupElement, usize> =
        centers.iter().enumerate().map(|(k, g)| (*g, k)).collect();
    for (k, g) in centers.iter().enumerate() {
        for x in &fam.margin {
            if let Some(&k2) = index.get(&x.mul(g)) {
                if k2 != k {
                    return Ok(false);
                }
            }
        }
    }
    if index.len() != centers.len() {
        // two sets placed at one origin: the quotient e lies in the margin
        return Ok(false);
    }
    let cells: FxHashSet<GroupElement> = placements
        .iter()
        .flat_map(|(t, g)| fam.sets[*t].iter().map(move |b| b.mul(g)))
        .collect();
    let placed: FxHashSet<(usize, GroupElement)> = placements.iter().cloned().collect();
    if let Some(extra) = fam.occurrences(&cells).into_iter().find(|o| !placed.contains(o)) {
        return Err(Error::internal(format!(
            "set {} occurs at {} inside the union although the margin condition holds",
            extra.0, extra.1
        )));
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{ball, Family, GroupSpec};

    fn z(v: &[i64]) -> FiniteSubset {
        FiniteSubset::new(v.iter().map(|&x| GroupElement::z(x)))
    }

    /// Brute force: `Bᵢh = Bⱼ` only for `i = j`, `h = e`, over a ball.
    fn oracle(sets: &[FiniteSubset], radius: usize) -> bool {
        let fam = sets[0].family().unwrap();
        let b = ball(&GroupSpec::standard(fam), radius).unwrap();
        b.iter().all(|h| {
            sets.iter().enumerate().all(|(i, bi)| {
                let t = bi.translate(h);
                sets.iter().enumerate().all(|(j, bj)| t != *bj || (i == j && h.is_identity()))
            })
        })
    }

    #[test]
    fn origin_examples() {
        assert_eq!(make_recognizable_origin(&z(&[0])).unwrap(), z(&[0]));
        let b = make_recognizable_origin(&z(&[0, 1])).unwrap();
        assert_eq!(b, z(&[-2, 0, 1]));
        assert!(oracle(&[b], 6));
        let b = make_recognizable_origin(&z(&[0, 2])).unwrap();
        assert_eq!(b.len(), 3);
        assert!(oracle(&[b], 12));
    }

    #[test]
    fn family_examples() {
        let f = make_recognizable_family(&[z(&[0, 1]), z(&[0, 2])]).unwrap();
        assert!(oracle(&f.sets, 12));
        let base: Vec<FiniteSubset> = [1, -1, 2, -2, 3, -3].iter().map(|&h| z(&[0, h])).collect();
        let f = make_recognizable_family(&base).unwrap();
        assert_eq!(f.len(), 6);
        assert!(oracle(&f.sets, 40));
        assert!(f.sets.iter().all(|s| s.is_subset(&f.margin)));
    }

    #[test]
    fn heisenberg_family() {
        let s = GroupSpec::heisenberg();
        let gens = s.symmetric_generators();
        let base: Vec<FiniteSubset> = gens
            .iter()
            .map(|g| FiniteSubset::new([s.identity(), g.clone()]))
            .collect();
        let f = make_recognizable_family(&base).unwrap();
        assert!(oracle(&f.sets, 6));
        assert_eq!(f.sets[0].family(), Some(Family::Heisenberg));
    }

    #[test]
    fn full_recognizability() {
        let f = make_recognizable_family(&[z(&[0, 1]), z(&[0, 2])]).unwrap();
        assert!(check_fully_recognizable(&f, &[(0, GroupElement::z(0))]).unwrap());
        let span = f.margin.len() as i64;
        let far: Vec<(usize, GroupElement)> =
            (0..6).map(|k| (k % 2, GroupElement::z(k as i64 * span))).collect();
        assert!(check_fully_recognizable(&f, &far).unwrap());
        let near = [(0, GroupElement::z(0)), (0, GroupElement::z(1))];
        assert!(!check_fully_recognizable(&f, &near).unwrap());
    }
}
