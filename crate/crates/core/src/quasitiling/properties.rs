use rustc_hash::FxHashMap;

use super::Quasitiling;
use crate::density::Window;
use crate::error::Result;
use crate::group::{is_invariant, product_set, FiniteSubset, GroupElement};
use crate::matching::FlowNetwork;
use crate::Rational;

#[derive(Clone, Debug)]
pub struct PropertyReport {
    /// Every shape is `(K,ε)`-invariant.
    pub invariant: bool,
    /// Disjoint `(1−ε)`-subsets `T° ⊆ T`, one per tile, when they exist.
    pub eps_disjoint_witness: Option<Vec<FiniteSubset>>,
    pub disjoint: bool,
    /// Covered fraction of the coverage core.
    pub alpha: Rational,
    /// Tiles are disjoint and cover the coverage core.
    pub tiling: bool,
    /// `1 − |core|/|carrier|`.
    pub core_defect: Rational,
    pub core_size: usize,
    /// Tiles with a center in the core that leave the carrier.
    pub escaping_tiles: usize,
}

impl PropertyReport {
    pub fn eps_disjoint(&self) -> bool {
        self.eps_disjoint_witness.is_some()
    }
}

/// Points whose every potential covering tile lies in the carrier:
/// `{g : (VV⁻¹ ∪ M)g ⊆ carrier}` with `V = ⋃shapes`, `M` the margin shape.
pub fn coverage_core(t: &Quasitiling, w: &Window) -> FiniteSubset {
    let v = t.shape_union();
    let k = if v.is_empty() {
        w.margin_shape.clone()
    } else {
        product_set(&v, &v.inverse()).union(&w.margin_shape)
    };
    w.admissible(&k)
}

pub fn check_properties(
    t: &Quasitiling,
    k: &FiniteSubset,
    eps: Rational,
    w: &Window,
) -> Result<PropertyReport> {
    let mut invariant = true;
    for s in &t.shapes {
        invariant &= is_invariant(s, k, eps)?;
    }
    let sets = t.tile_sets();
    let mut mult: FxHashMap<&GroupElement, u32> = FxHashMap::default();
    for s in &sets {
        for g in s {
            *mult.entry(g).or_insert(0) += 1;
        }
    }
    let disjoint = mult.values().all(|&m| m == 1);
    let core = coverage_core(t, w);
    let covered = core.iter().filter(|g| mult.contains_key(g)).count();
    let alpha = if core.is_empty() {
        Rational::from_integer(0)
    } else {
        Rational::new(covered as i64, core.len() as i64)
    };
    let window_core = w.core();
    let escaping_tiles = (0..t.len())
        .filter(|&i| window_core.contains(&t.tiles[i].center) && !sets[i].is_subset(&w.carrier))
        .count();
    Ok(PropertyReport {
        invariant,
        eps_disjoint_witness: eps_disjoint_witness(&sets, eps),
        disjoint,
        alpha,
        tiling: disjoint && covered == core.len(),
        core_defect: Rational::new(
            (w.carrier.len() - core.len().min(w.carrier.len())) as i64,
            w.carrier.len() as i64,
        ),
        core_size: core.len(),
        escaping_tiles,
    })
}

/// Smallest integer strictly above `(1−ε)n`.
fn quota(n: usize, eps: Rational) -> i64 {
    let x = (Rational::from_integer(1) - eps) * n as i64;
    x.floor().to_integer() + 1
}

/// Disjoint `T° ⊆ T` with `|T°| > (1−ε)|T|`, found exactly by max-flow:
/// points shared by several tiles are routed to at most one of them.
pub fn eps_disjoint_witness(tiles: &[FiniteSubset], eps: Rational) -> Option<Vec<FiniteSubset>> {
    let mut owners: FxHashMap<&GroupElement, Vec<usize>> = FxHashMap::default();
    for (k, t) in tiles.iter().enumerate() {
        for g in t {
            owners.entry(g).or_default().push(k);
        }
    }
    let mut need: Vec<i64> = tiles.iter().map(|t| quota(t.len(), eps)).collect();
    if tiles.iter().zip(&need).any(|(t, &q)| q > t.len() as i64) {
        return None;
    }
    let mut keep: Vec<Vec<GroupElement>> = vec![Vec::new(); tiles.len()];
    let mut shared: Vec<(&GroupElement, &Vec<usize>)> = Vec::new();
    for (ti, t) in tiles.iter().enumerate() {
        for g in t {
            let o = &owners[g];
            if o.len() == 1 {
                keep[ti].push(g.clone());
                need[ti] -= 1;
            } else if o[0] == ti {
                shared.push((g, o));
            }
        }
    }
    let demand: i64 = need.iter().map(|&n| n.max(0)).sum();
    if demand > 0 {
        // source 0, shared points 1..=p, tiles after, sink last
        let p = shared.len();
        let n_t = tiles.len();
        let sink = 1 + p + n_t;
        let mut net = FlowNetwork::new(sink + 1);
        let mut edges = Vec::new();
        for (i, (_, o)) in shared.iter().enumerate() {
            net.add_edge(0, 1 + i, 1);
            for &k in o.iter() {
                edges.push((i, k, net.add_edge(1 + i, 1 + p + k, 1)));
            }
        }
        for (k, &n) in need.iter().enumerate() {
            if n > 0 {
                net.add_edge(1 + p + k, sink, n);
            }
        }
        if net.max_flow(0, sink) < demand {
            return None;
        }
        for (i, k, e) in edges {
            if net.flow(e) > 0 {
                keep[k].push(shared[i].0.clone());
            }
        }
    }
    Some(keep.into_iter().map(FiniteSubset::new).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasitiling::Tile;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn interval_partition_is_a_tiling() {
        let shape = FiniteSubset::interval(0, 4);
        let w = Window::new(FiniteSubset::interval(0, 99), shape.clone()).unwrap();
        let centers = w.core().filter(|g| g.coords().unwrap()[0] % 5 == 0);
        let t = Quasitiling::from_centers(vec![shape.clone()], vec![centers]).unwrap();
        let r = check_properties(&t, &FiniteSubset::interval(0, 1), q(1, 2), &w).unwrap();
        assert!(r.tiling && r.disjoint && r.eps_disjoint());
        assert_eq!(r.alpha, q(1, 1));
    }

    #[test]
    fn overlapping_pair() {
        let shape = FiniteSubset::interval(0, 9);
        let t = Quasitiling::new(
            vec![shape.clone()],
            vec![Tile::new(0, GroupElement::z(0)), Tile::new(0, GroupElement::z(5))],
        )
        .unwrap();
        let sets = t.tile_sets();
        assert!(eps_disjoint_witness(&sets, q(1, 2)).is_some());
        assert!(eps_disjoint_witness(&sets, q(1, 4)).is_none());
        let wit = eps_disjoint_witness(&sets, q(1, 2)).unwrap();
        assert!(wit[0].is_disjoint(&wit[1]));
        assert!(wit.iter().all(|s| s.len() >= 6));
    }

    #[test]
    fn empty_quasitiling() {
        let w = Window::new(FiniteSubset::interval(0, 20), FiniteSubset::interval(0, 2)).unwrap();
        let t = Quasitiling::default();
        let r = check_properties(&t, &FiniteSubset::interval(0, 1), q(1, 2), &w).unwrap();
        assert_eq!(r.alpha, q(0, 1));
        assert!(r.disjoint && !r.tiling);
    }
}
