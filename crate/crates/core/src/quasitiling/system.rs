use rustc_hash::{FxHashMap, FxHashSet};

use super::{coverage_core, Quasitiling, Tile};
use crate::density::Window;
use crate::error::{Error, Result};
use crate::group::{FiniteSubset, GroupElement};

/// Multi-level tilings where each level-`(k+1)` tile is a disjoint union of
/// level-`k` tiles.
#[derive(Clone, Debug)]
pub struct TilingSystemWindow {
    pub levels: Vec<Quasitiling>,
    /// `congruence_maps[k][t]` lists the level-`k` tiles composing tile `t` of
    /// level `k+1`.
    pub congruence_maps: Vec<Vec<Vec<usize>>>,
}

/// How a shape splits into lower-level tiles: `(lower shape, relative center)`.
type Decomposition = Vec<(usize, GroupElement)>;

/// Regroups each level into unions of tiles of the level below and assigns
/// shape indices so that equal decompositions share a shape and different
/// decompositions of the same set get duplicated shapes.
pub fn build_congruent_system(levels: &[Quasitiling], w: &Window) -> Result<TilingSystemWindow> {
    let Some(first) = levels.first() else {
        return Err(Error::usage("a tiling system needs at least one level"));
    };
    let mut out = vec![sorted(first)];
    let mut maps = Vec::new();
    for (k, lvl) in levels.iter().enumerate().skip(1) {
        let prev = out.last().expect("nonempty");
        let sets = lvl.tile_sets();
        let mut owner: FxHashMap<&GroupElement, usize> = FxHashMap::default();
        for (t, s) in sets.iter().enumerate() {
            for g in s {
                owner.insert(g, t);
            }
        }
        let core = coverage_core(lvl, w);
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); lvl.len()];
        for (p, tile) in prev.tiles.iter().enumerate() {
            match owner.get(&tile.center) {
                Some(&t) => members[t].push(p),
                None if core.contains(&tile.center) => {
                    return Err(Error::Hypothesis(format!(
                        "level {k} center {} is not covered by level {}",
                        tile.center,
                        k + 1
                    )));
                }
                None => {}
            }
        }
        let prev_sets = prev.tile_sets();
        let mut shapes: Vec<FiniteSubset> = Vec::new();
        let mut index: FxHashMap<(FiniteSubset, Decomposition), usize> = FxHashMap::default();
        let mut raw: Vec<(Tile, Vec<usize>)> = Vec::new();
        for (t, ms) in members.into_iter().enumerate() {
            if ms.is_empty() {
                continue;
            }
            let union = FiniteSubset::new(ms.iter().flat_map(|&p| prev_sets[p].iter().cloned()));
            let c = &lvl.tiles[t].center;
            let a = union.translate(&c.inv()).first().cloned().expect("nonempty").mul(c);
            let a_inv = a.inv();
            let shape = union.translate(&a_inv);
            let mut dec: Decomposition = ms
                .iter()
                .map(|&p| (prev.tiles[p].shape, prev.tiles[p].center.mul(&a_inv)))
                .collect();
            dec.sort_by_cached_key(|(s, g)| (*s, crate::group::canonical_key(g)));
            let next = shapes.len();
            let s = *index.entry((shape.clone(), dec)).or_insert_with(|| {
                shapes.push(shape);
                next
            });
            let tile = Tile { shape: s, center: a, origin: Some(lvl.tiles[t].shape), ..lvl.tiles[t].clone() };
            raw.push((tile, ms));
        }
        raw.sort_by_cached_key(|(t, _)| crate::group::canonical_key(&t.center));
        let (tiles, map): (Vec<Tile>, Vec<Vec<usize>>) = raw.into_iter().unzip();
        out.push(Quasitiling::new(shapes, tiles)?);
        maps.push(map);
    }
    Ok(TilingSystemWindow { levels: out, congruence_maps: maps })
}

fn sorted(q: &Quasitiling) -> Quasitiling {
    let tiles = q.canonical_tile_order().into_iter().map(|k| q.tiles[k].clone()).collect();
    Quasitiling { shapes: q.shapes.clone(), tiles }
}

impl TilingSystemWindow {
    /// Every level-`(k+1)` tile equals the disjoint union of its listed members.
    pub fn check_congruent(&self) -> std::result::Result<(), String> {
        for (k, map) in self.congruence_maps.iter().enumerate() {
            let lower = self.levels[k].tile_sets();
            let upper = &self.levels[k + 1];
            let mut used: FxHashSet<usize> = FxHashSet::default();
            for (t, ms) in map.iter().enumerate() {
                let mut seen: FxHashSet<&GroupElement> = FxHashSet::default();
                for &m in ms {
                    if !used.insert(m) {
                        return Err(format!("level {} tile {m} is used twice", k + 1));
                    }
                    for g in &lower[m] {
                        if !seen.insert(g) {
                            return Err(format!("members of level {} tile {t} overlap at {g}", k + 2));
                        }
                    }
                }
                let set = upper.tile_set(t);
                if set.len() != seen.len() || !set.iter().all(|g| seen.contains(g)) {
                    return Err(format!("level {} tile {t} is not the union of its members", k + 2));
                }
            }
        }
        Ok(())
    }

    /// Tiles sharing a shape index decompose identically relative to their centers.
    pub fn check_deterministic(&self) -> std::result::Result<(), String> {
        for (k, map) in self.congruence_maps.iter().enumerate() {
            let lower = &self.levels[k];
            let upper = &self.levels[k + 1];
            let mut by_shape: FxHashMap<usize, FxHashSet<(usize, GroupElement)>> = FxHashMap::default();
            for (t, ms) in map.iter().enumerate() {
                let ut = &upper.tiles[t];
                let c_inv = ut.center.inv();
                let dec: FxHashSet<(usize, GroupElement)> = ms
                    .iter()
                    .map(|&m| (lower.tiles[m].shape, lower.tiles[m].center.mul(&c_inv)))
                    .collect();
                match by_shape.get(&ut.shape) {
                    Some(d) if *d != dec => {
                        return Err(format!(
                            "level {} shape {} has two decompositions",
                            k + 2,
                            ut.shape
                        ));
                    }
                    Some(_) => {}
                    None => {
                        by_shape.insert(ut.shape, dec);
                    }
                }
            }
        }
        Ok(())
    }

    /// Per level: number of distinct shape sets and number of shape indices.
    pub fn duplication_counts(&self) -> Vec<(usize, usize)> {
        self.levels
            .iter()
            .map(|q| {
                let distinct: FxHashSet<&FiniteSubset> = q.shapes.iter().collect();
                (distinct.len(), q.shapes.len())
            })
            .collect()
    }
}
