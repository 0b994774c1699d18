use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};

use super::{coverage_core, OrderTag, Quasitiling, Tile};
use crate::density::Window;
use crate::error::{Error, Result};
use crate::group::{canonical_key, product_set, FiniteSubset, GroupElement};
use crate::Rational;

#[derive(Clone, Debug)]
pub struct Construction {
    pub tiling: Quasitiling,
    /// Covered fraction of the coverage core.
    pub alpha: Rational,
    /// Set when `alpha < 1 − ε`.
    pub diagnostic: Option<String>,
    /// Number of passes used for each shape, largest shape first.
    pub passes: Vec<u32>,
}

/// Greedy ε-quasitiling of a window.
///
/// Shapes are placed largest first. Candidate centers for a shape `F` are the
/// admissible translates, ordered canonically around a phase drawn from
/// `seed`, and split into passes: each pass is an `F`-separated class of the
/// greedy colouring of the conflict graph `c' ∈ F⁻¹Fc`. A tile `Fc` is kept
/// iff `|Fc ∩ V| < ε|F|`, `V` the union of tiles kept so far.
pub fn construct_epsilon_quasitiling(
    pool: &[FiniteSubset],
    eps: Rational,
    w: &Window,
    seed: u64,
) -> Result<Construction> {
    if pool.is_empty() {
        return Err(Error::usage("shape pool is empty"));
    }
    if eps <= Rational::from_integer(0) || eps >= Rational::from_integer(1) {
        return Err(Error::domain(format!("ε = {eps} is outside (0,1)")));
    }
    for (k, s) in pool.iter().enumerate() {
        let Some(fam) = s.family() else {
            return Err(Error::usage(format!("shape {k} is empty")));
        };
        if !s.contains(&GroupElement::identity(fam)) {
            return Err(Error::usage(format!("shape {k} does not contain e")));
        }
        if k > 0 && s.len() > pool[k - 1].len() {
            return Err(Error::usage("shape pool must be ordered largest first"));
        }
    }
    let core = w.core();
    let phase = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        core.get(rng.gen_range(0..core.len())).cloned().expect("nonempty core")
    };
    let phase_inv = phase.inv();
    let r = pool.len() as u32;

    let mut covered: FxHashSet<GroupElement> = FxHashSet::default();
    let mut used: FxHashSet<GroupElement> = FxHashSet::default();
    let mut tiles = Vec::new();
    let mut passes = Vec::new();
    for (idx, f) in pool.iter().enumerate() {
        let j = r - idx as u32;
        let mut cands = w.admissible(f).to_vec();
        cands.sort_by_cached_key(|c| canonical_key(&c.mul(&phase_inv)));
        let classes = separated_passes(f, &cands);
        passes.push(classes.len() as u32);
        for (p, class) in classes.iter().enumerate() {
            let i = p as u32 + 1;
            for &ci in class {
                let c = &cands[ci];
                if used.contains(c) {
                    continue;
                }
                let tile: Vec<GroupElement> = f.iter().map(|x| x.mul(c)).collect();
                let overlap = tile.iter().filter(|g| covered.contains(*g)).count();
                if Rational::from_integer(overlap as i64) < eps * f.len() as i64 {
                    covered.extend(tile);
                    used.insert(c.clone());
                    tiles.push(Tile {
                        shape: idx,
                        center: c.clone(),
                        tag: Some(OrderTag { j, i }),
                        primary: Some(i == 1),
                        origin: None,
                    });
                }
            }
        }
    }
    let tiling = Quasitiling::new(pool.to_vec(), tiles)?;
    let cc = coverage_core(&tiling, w);
    let alpha = if cc.is_empty() {
        Rational::from_integer(0)
    } else {
        Rational::new(cc.iter().filter(|g| covered.contains(*g)).count() as i64, cc.len() as i64)
    };
    let target = Rational::from_integer(1) - eps;
    let diagnostic = (alpha < target).then(|| {
        format!("pool too coarse: covered fraction {alpha} is below 1 − ε = {target}")
    });
    Ok(Construction { tiling, alpha, diagnostic, passes })
}

/// Greedy colouring of `cands` (in order) so that each colour class is
/// `F`-separated. Returns candidate indices per class.
fn separated_passes(f: &FiniteSubset, cands: &[GroupElement]) -> Vec<Vec<usize>> {
    let diff = product_set(&f.inverse(), f);
    let mut colour: FxHashMap<&GroupElement, u32> = FxHashMap::default();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut taken: Vec<bool> = Vec::new();
    for (k, c) in cands.iter().enumerate() {
        taken.iter_mut().for_each(|t| *t = false);
        for d in &diff {
            if let Some(&col) = colour.get(&d.mul(c)) {
                taken[col as usize] = true;
            }
        }
        let col = taken.iter().position(|t| !t).unwrap_or(taken.len());
        if col == classes.len() {
            classes.push(Vec::new());
            taken.push(false);
        }
        classes[col].push(k);
        colour.insert(c, col as u32);
    }
    classes
}
