use rustc_hash::{FxHashMap, FxHashSet};

use super::{Quasitiling, Tile};
use crate::error::{Error, Result};
use crate::group::{canonical_key, FiniteSubset, GroupElement};

/// Replaces each tile by its part not covered by strictly earlier tiles.
///
/// Order is `(j` descending`, i` ascending`)`, ties broken by canonical order
/// of the center. Empty remnants are dropped. A remnant `R` of a tile centered
/// at `c` becomes the shape `Rc⁻¹` with the same (possibly stale) center, and
/// records the index of the shape it came from.
pub fn disjointify(t: &Quasitiling) -> Result<Quasitiling> {
    if !t.has_order_tags() {
        return Err(Error::usage("disjointify needs an order tag on every tile"));
    }
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by_cached_key(|&k| {
        let tile = &t.tiles[k];
        (tile.tag.expect("checked").rank(), canonical_key(&tile.center))
    });
    let mut shapes = t.shapes.clone();
    let mut index: FxHashMap<(FiniteSubset, usize), usize> = FxHashMap::default();
    for (s, sh) in t.shapes.iter().enumerate() {
        index.insert((sh.clone(), s), s);
    }
    let mut covered: FxHashSet<GroupElement> = FxHashSet::default();
    let mut tiles = Vec::new();
    for k in order {
        let tile = &t.tiles[k];
        let remnant: Vec<GroupElement> = t.shapes[tile.shape]
            .iter()
            .map(|x| x.mul(&tile.center))
            .filter(|g| !covered.contains(g))
            .collect();
        if remnant.is_empty() {
            continue;
        }
        let c_inv = tile.center.inv();
        let shape = FiniteSubset::new(remnant.iter().map(|g| g.mul(&c_inv)));
        covered.extend(remnant);
        let next = shapes.len();
        let s = *index.entry((shape.clone(), tile.shape)).or_insert_with(|| {
            shapes.push(shape);
            next
        });
        tiles.push(Tile { shape: s, origin: Some(tile.shape), ..tile.clone() });
    }
    Quasitiling::new(shapes, tiles)
}

/// Moves every center into its tile: shape `Ŝ` becomes `Ŝa⁻¹` and a center
/// `c` becomes `ac`, where `a` is the canonical minimum of `Ŝ`.
pub fn adjust_centers(t: &Quasitiling) -> Result<Quasitiling> {
    let mut shift = Vec::with_capacity(t.shapes.len());
    let mut shapes = Vec::with_capacity(t.shapes.len());
    for (s, sh) in t.shapes.iter().enumerate() {
        let a = match sh.first() {
            Some(a) => a.clone(),
            None if t.tiles.iter().any(|x| x.shape == s) => {
                return Err(Error::internal(format!("shape {s} is empty but in use")));
            }
            None => {
                shift.push(None);
                shapes.push(sh.clone());
                continue;
            }
        };
        shapes.push(sh.translate(&a.inv()));
        shift.push(Some(a));
    }
    let tiles = t
        .tiles
        .iter()
        .map(|x| Tile {
            center: shift[x.shape].as_ref().expect("nonempty").mul(&x.center),
            ..x.clone()
        })
        .collect();
    Quasitiling::new(shapes, tiles)
}
