//! Static quasitilings on windows: construction, property checks,
//! disjointification, center adjustment and congruent multi-level systems.

mod construct;
mod disjoint;
mod properties;
mod system;

pub use construct::{construct_epsilon_quasitiling, Construction};
pub use disjoint::{adjust_centers, disjointify};
pub use properties::{check_properties, coverage_core, eps_disjoint_witness, PropertyReport};
pub use system::{build_congruent_system, TilingSystemWindow};

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::group::{canonical_key, FiniteSubset, GroupElement};

/// Position of a tile in the construction order: `j` is the shape rank
/// (larger shapes carry larger `j` and are placed first), `i` the pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderTag {
    pub j: u32,
    pub i: u32,
}

impl OrderTag {
    /// Sort key realising the construction order.
    pub fn rank(&self) -> (std::cmp::Reverse<u32>, u32) {
        (std::cmp::Reverse(self.j), self.i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tile {
    pub shape: usize,
    pub center: GroupElement,
    pub tag: Option<OrderTag>,
    pub primary: Option<bool>,
    /// Shape index in the quasitiling this tile was derived from.
    pub origin: Option<usize>,
}

impl Tile {
    pub fn new(shape: usize, center: GroupElement) -> Self {
        Tile { shape, center, tag: None, primary: None, origin: None }
    }
}

/// Shapes placed at centers; tile `k` is `shapes[tiles[k].shape] · tiles[k].center`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Quasitiling {
    pub shapes: Vec<FiniteSubset>,
    pub tiles: Vec<Tile>,
}

impl Quasitiling {
    /// Validates shape indices and that no element is the center of two tiles.
    pub fn new(shapes: Vec<FiniteSubset>, tiles: Vec<Tile>) -> Result<Self> {
        let mut seen: FxHashMap<&GroupElement, usize> = FxHashMap::default();
        for (k, t) in tiles.iter().enumerate() {
            if t.shape >= shapes.len() {
                return Err(Error::usage(format!("tile {k} uses unknown shape {}", t.shape)));
            }
            if let Some(prev) = seen.insert(&t.center, k) {
                return Err(Error::usage(format!(
                    "tiles {prev} and {k} share the center {}",
                    t.center
                )));
            }
        }
        Ok(Quasitiling { shapes, tiles })
    }

    /// Shapes each containing the identity, placed at the given centers.
    pub fn from_centers(shapes: Vec<FiniteSubset>, centers: Vec<FiniteSubset>) -> Result<Self> {
        if shapes.len() != centers.len() {
            return Err(Error::usage("one center set per shape is required"));
        }
        let tiles = centers
            .iter()
            .enumerate()
            .flat_map(|(s, cs)| cs.iter().map(move |c| Tile::new(s, c.clone())))
            .collect();
        Quasitiling::new(shapes, tiles)
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn tile_set(&self, k: usize) -> FiniteSubset {
        let t = &self.tiles[k];
        self.shapes[t.shape].translate(&t.center)
    }

    pub fn tile_sets(&self) -> Vec<FiniteSubset> {
        (0..self.len()).map(|k| self.tile_set(k)).collect()
    }

    /// Centers of shape `s`, in canonical order.
    pub fn centers(&self, s: usize) -> FiniteSubset {
        FiniteSubset::new(self.tiles.iter().filter(|t| t.shape == s).map(|t| t.center.clone()))
    }

    pub fn all_centers(&self) -> FiniteSubset {
        FiniteSubset::new(self.tiles.iter().map(|t| t.center.clone()))
    }

    /// `V = ⋃ shapes`.
    pub fn shape_union(&self) -> FiniteSubset {
        FiniteSubset::new(self.shapes.iter().flat_map(|s| s.iter().cloned()))
    }

    pub fn union(&self) -> FiniteSubset {
        FiniteSubset::new(self.tiles.iter().flat_map(|t| {
            self.shapes[t.shape].iter().map(move |s| s.mul(&t.center))
        }))
    }

    pub fn has_order_tags(&self) -> bool {
        self.tiles.iter().all(|t| t.tag.is_some())
    }

    /// Translate every tile on the right by `g`.
    pub fn shifted(&self, g: &GroupElement) -> Quasitiling {
        let mut q = self.clone();
        for t in &mut q.tiles {
            t.center = t.center.mul(g);
        }
        q
    }

    /// Tile indices sorted by center in canonical order.
    pub fn canonical_tile_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by_cached_key(|&k| canonical_key(&self.tiles[k].center));
        idx
    }

    /// Line-oriented text: `shape <index>` blocks followed by `tile` records.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, sh) in self.shapes.iter().enumerate() {
            s.push_str(&format!("shape {i} {}\n", sh.len()));
            for g in sh {
                s.push_str(&format!("  {}\n", g.to_text()));
            }
        }
        for k in self.canonical_tile_order() {
            let t = &self.tiles[k];
            s.push_str(&format!("tile shape={} center={}", t.shape, t.center.to_text()));
            if let Some(tag) = t.tag {
                s.push_str(&format!(" j={} i={}", tag.j, tag.i));
            }
            if let Some(p) = t.primary {
                s.push_str(if p { " primary" } else { " secondary" });
            }
            if let Some(o) = t.origin {
                s.push_str(&format!(" origin={o}"));
            }
            s.push('\n');
        }
        s
    }
}
