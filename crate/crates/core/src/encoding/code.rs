use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};

use super::codebook::{ShapeCodebook, SymbolMode};
use crate::density::{density_over, Window};
use crate::error::{Error, Result};
use crate::group::{product_set, FiniteSubset, GroupElement};
use crate::quasitiling::{Quasitiling, Tile};
use crate::symbolic::SymbolicArray;
use crate::Rational;

/// Free trits at the top level's centers.
#[derive(Clone, Debug, Default)]
pub struct Choices {
    pub default: i8,
    pub explicit: FxHashMap<GroupElement, i8>,
}

impl Choices {
    pub fn constant(i: i8) -> Self {
        Choices { default: i.clamp(-1, 1), explicit: FxHashMap::default() }
    }

    /// Independent uniform trits, drawn in canonical order of `centers`.
    pub fn seeded(centers: &FiniteSubset, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let explicit = centers.iter().map(|c| (c.clone(), rng.gen_range(-1..=1))).collect();
        Choices { default: 1, explicit }
    }

    pub fn get(&self, c: &GroupElement) -> i8 {
        self.explicit.get(c).copied().unwrap_or(self.default)
    }
}

fn first_collision(q: &Quasitiling, v: &FiniteSubset) -> Option<(GroupElement, GroupElement)> {
    let mut owner: FxHashMap<GroupElement, &GroupElement> = FxHashMap::default();
    for k in q.canonical_tile_order() {
        let c = &q.tiles[k].center;
        for x in v {
            if let Some(prev) = owner.insert(x.mul(c), c) {
                return Some((prev.clone(), c.clone()));
            }
        }
    }
    None
}

fn check_levels(levels: &[Quasitiling], book: &ShapeCodebook) -> Result<()> {
    if levels.len() != book.levels.len() {
        return Err(Error::usage(format!(
            "{} levels given, the codebook has {}",
            levels.len(),
            book.levels.len()
        )));
    }
    for (q, lc) in levels.iter().zip(&book.levels) {
        if q.shapes != lc.shapes {
            return Err(Error::usage(format!("level {} shapes differ from the codebook", lc.level)));
        }
        if let Some((a, b)) = first_collision(q, &lc.v) {
            return Err(Error::usage(format!(
                "level {} centers {a} and {b} are not V-separated (|V| = {})",
                lc.level,
                lc.v.len()
            )));
        }
    }
    Ok(())
}

/// Level-`k` tiles whose coding horizon `U_k·c` lies in the carrier, in
/// canonical center order, with primariness made explicit (absent = primary)
/// and construction bookkeeping dropped.
pub fn horizon_safe(levels: &[Quasitiling], book: &ShapeCodebook, window: &Window) -> Vec<Quasitiling> {
    levels
        .iter()
        .zip(&book.levels)
        .map(|(q, lc)| {
            let tiles = q
                .canonical_tile_order()
                .into_iter()
                .map(|k| &q.tiles[k])
                .filter(|t| window.fits(&lc.u, &t.center))
                .map(|t| Tile { primary: Some(t.primary.unwrap_or(true)), ..Tile::new(t.shape, t.center.clone()) })
                .collect();
            Quasitiling { shapes: q.shapes.clone(), tiles }
        })
        .collect()
}

/// Trits per level, top-down: each in-range level-(k+1) tile writes its word
/// into the trits of the chain `c₁, …, c_m` of level-k centers; every other
/// level-k center keeps the background trit 1.
fn assign_trits(
    levels: &[Quasitiling],
    book: &ShapeCodebook,
    window: &Window,
    choices: &Choices,
) -> Result<Vec<FxHashMap<GroupElement, i8>>> {
    let top = levels.len() - 1;
    let mut trits: Vec<FxHashMap<GroupElement, i8>> = vec![FxHashMap::default(); levels.len()];
    for t in &levels[top].tiles {
        trits[top].insert(t.center.clone(), choices.get(&t.center));
    }
    for li in (1..=top).rev() {
        let k = li + 2;
        let lc = book.level(k);
        let below: FxHashSet<&GroupElement> = levels[li - 1].tiles.iter().map(|t| &t.center).collect();
        let mut assigned: FxHashMap<GroupElement, GroupElement> = FxHashMap::default();
        let q = &levels[li];
        for idx in q.canonical_tile_order() {
            let t = &q.tiles[idx];
            let c0 = &t.center;
            if !window.fits(&lc.u, c0) {
                continue;
            }
            let Some((u_idx, c1)) = lc
                .syndetic
                .iter()
                .enumerate()
                .map(|(j, u)| (j, u.mul(c0)))
                .find(|(_, x)| below.contains(x))
            else {
                return Err(Error::Hypothesis(format!(
                    "no level-{} center within U·{c0}: the centers are not U-syndetic here",
                    k - 1
                )));
            };
            let mut chain = vec![c1.clone()];
            for g in &lc.u_hat {
                if chain.len() == lc.m {
                    break;
                }
                let x = g.mul(&c1);
                if x != c1 && below.contains(&x) {
                    chain.push(x);
                }
            }
            if chain.len() < lc.m {
                return Err(Error::Hypothesis(format!(
                    "only {} level-{} centers within Û·{c1}, {} needed",
                    chain.len(),
                    k - 1,
                    lc.m
                )));
            }
            let i = trits[li].get(c0).copied().unwrap_or(1);
            let word = book.word(k, book.key(k, u_idx, t.shape, t.primary.unwrap_or(true)), i);
            for (x, s) in chain.into_iter().zip(word) {
                if let Some(other) = assigned.insert(x.clone(), c0.clone()) {
                    return Err(Error::internal(format!(
                        "level-{} tiles at {other} and {c0} both use the center {x}",
                        k
                    )));
                }
                trits[li - 1].insert(x, s);
            }
        }
        for t in &levels[li - 1].tiles {
            trits[li - 1].entry(t.center.clone()).or_insert(1);
        }
    }
    Ok(trits)
}

/// Symbolic encoding of levels `2..` (`levels[0]` is level 2) on the window.
///
/// Only level-2 centers with `U₂c` inside the carrier are written; the
/// remaining cells carry the background symbol.
pub fn encode_level(
    levels: &[Quasitiling],
    book: &ShapeCodebook,
    window: &Window,
    choices: &Choices,
) -> Result<SymbolicArray> {
    check_levels(levels, book)?;
    let trits = assign_trits(levels, book, window, choices)?;
    let mut z = SymbolicArray::new(window.clone(), book.mode.alphabet(), book.mode.background())?;
    let lc = book.level(2);
    for t in &levels[0].tiles {
        let c = &t.center;
        if !window.fits(&lc.u, c) {
            continue;
        }
        let key = book.key(2, 0, t.shape, t.primary.unwrap_or(true));
        let i = trits[0][c];
        match book.mode {
            SymbolMode::Three => {
                z.set(c, 0)?;
                for (x, s) in lc.u.iter().skip(1).zip(book.word(2, key, i)) {
                    z.set(&x.mul(c), s as i32)?;
                }
            }
            SymbolMode::Two => {
                for x in book.marker_set(key, i).expect("two-symbol family") {
                    z.set(&x.mul(c), 1)?;
                }
            }
        }
    }
    Ok(z)
}

/// Decoded center: shape, primariness, trit.
type Decoded = FxHashMap<GroupElement, (usize, bool, i8)>;

fn corrupt(g: &GroupElement, message: String) -> Error {
    Error::Corrupt { position: g.to_text(), message }
}

fn decode_two(z: &SymbolicArray, book: &ShapeCodebook) -> Result<(Decoded, FxHashSet<GroupElement>)> {
    let fam = book.recognizable.as_ref().ok_or_else(|| Error::usage("codebook has no marker family"))?;
    let lc = book.level(2);
    let ones: FxHashSet<GroupElement> = z.positions(1).into_iter().collect();
    let mut claimed: FxHashMap<GroupElement, GroupElement> = FxHashMap::default();
    let mut out = Decoded::default();
    for (t, g) in fam.occurrences(&ones) {
        for b in &fam.sets[t] {
            if let Some(prev) = claimed.insert(b.mul(&g), g.clone()) {
                return Err(corrupt(&g, format!("markers at {prev} and {g} overlap")));
            }
        }
        if z.window.fits(&lc.u, &g) {
            let (key, i) = (t / 3, (t % 3) as i8 - 1);
            let (_, shape, primary) = book.unkey(2, key);
            out.insert(g, (shape, primary, i));
        }
    }
    let stray = ones.into_iter().filter(|x| !claimed.contains_key(x)).collect();
    Ok((out, stray))
}

fn decode_three(z: &SymbolicArray, book: &ShapeCodebook) -> Result<(Decoded, FxHashSet<GroupElement>)> {
    let lc = book.level(2);
    let mut claimed: FxHashMap<GroupElement, GroupElement> = FxHashMap::default();
    let mut out = Decoded::default();
    for c in &z.positions(0) {
        if !z.window.fits(&lc.u, c) {
            continue;
        }
        for x in &lc.u {
            if let Some(prev) = claimed.insert(x.mul(c), c.clone()) {
                return Err(corrupt(c, format!("marker blocks at {prev} and {c} overlap")));
            }
        }
        let word: Vec<i8> = lc.u.iter().skip(1).map(|x| z.get(&x.mul(c)).expect("fits") as i8).collect();
        let (key, i) = book
            .lookup(2, &word)
            .ok_or_else(|| corrupt(c, format!("unknown level-2 block {word:?}")))?;
        let (_, shape, primary) = book.unkey(2, key);
        out.insert(c.clone(), (shape, primary, i));
    }
    let stray = z
        .window
        .carrier
        .iter()
        .zip(z.cells())
        .filter(|(x, &s)| s != 1 && !claimed.contains_key(*x))
        .map(|(x, _)| x.clone())
        .collect();
    Ok((out, stray))
}

fn decode_up(
    z: &SymbolicArray,
    book: &ShapeCodebook,
    k: usize,
    prev: &Decoded,
) -> Result<Decoded> {
    let lc = book.level(k);
    let prev_u = &book.level(k - 1).u;
    let scan = product_set(prev_u, &FiniteSubset::new(lc.u_hat.iter().cloned()));
    let mut starts: Vec<&GroupElement> =
        prev.iter().filter(|(_, v)| v.2 == 0).map(|(c, _)| c).collect();
    starts.sort_by_cached_key(|c| crate::group::canonical_key(c));
    let mut out = Decoded::default();
    let mut claimed: FxHashMap<GroupElement, GroupElement> = FxHashMap::default();
    for c1 in starts {
        if !z.window.fits(&scan, c1) {
            continue;
        }
        let mut word = vec![0i8];
        for g in &lc.u_hat {
            if word.len() == lc.m {
                break;
            }
            let x = g.mul(c1);
            if x != *c1 {
                if let Some(v) = prev.get(&x) {
                    word.push(v.2);
                }
            }
        }
        let (key, i) = book
            .lookup(k, &word)
            .ok_or_else(|| corrupt(c1, format!("unknown level-{k} word {word:?}")))?;
        let (u_idx, shape, primary) = book.unkey(k, key);
        let c0 = lc.syndetic.get(u_idx).expect("key in range").inv().mul(c1);
        if !z.window.fits(&lc.u, &c0) {
            continue;
        }
        let first = lc.syndetic.iter().map(|u| u.mul(&c0)).find(|x| prev.contains_key(x));
        if first.as_ref() != Some(c1) {
            return Err(corrupt(
                c1,
                format!("level-{k} marker at {c1} points to {c0}, whose first level-{} center is not {c1}", k - 1),
            ));
        }
        for x in &lc.u {
            if let Some(other) = claimed.insert(x.mul(&c0), c0.clone()) {
                return Err(corrupt(&c0, format!("decoded level-{k} centers {other} and {c0} are not U-separated")));
            }
        }
        out.insert(c0, (shape, primary, i));
    }
    Ok(out)
}

fn to_quasitiling(d: &Decoded, shapes: &[FiniteSubset]) -> Result<Quasitiling> {
    let tiles = d
        .iter()
        .map(|(c, &(s, p, _))| Tile { primary: Some(p), ..Tile::new(s, c.clone()) })
        .collect();
    let q = Quasitiling::new(shapes.to_vec(), tiles)?;
    let order = q.canonical_tile_order();
    Ok(Quasitiling { tiles: order.into_iter().map(|k| q.tiles[k].clone()).collect(), shapes: q.shapes })
}

/// Levels `2..=k` read back from `z` on the horizon-safe core.
///
/// Cells off the marker blocks must carry the background symbol wherever
/// every block that could contain them fits in the carrier; anything else is
/// reported as corrupt input.
pub fn decode_level(z: &SymbolicArray, book: &ShapeCodebook, k: usize) -> Result<Vec<Quasitiling>> {
    if k < 2 || k > book.top() {
        return Err(Error::usage(format!("level {k} outside 2..={}", book.top())));
    }
    if z.alphabet != book.mode.alphabet() {
        return Err(Error::usage("array alphabet does not match the codebook mode"));
    }
    let (mut cur, stray) = match book.mode {
        SymbolMode::Three => decode_three(z, book)?,
        SymbolMode::Two => decode_two(z, book)?,
    };
    let u2 = &book.level(2).u;
    let reach = product_set(u2, &u2.inverse());
    let mut stray: Vec<GroupElement> = stray.into_iter().filter(|x| z.window.fits(&reach, x)).collect();
    if !stray.is_empty() {
        stray.sort_by_cached_key(crate::group::canonical_key);
        return Err(corrupt(
            &stray[0],
            format!("{} cells outside every marker carry a non-background symbol", stray.len()),
        ));
    }
    let mut out = vec![to_quasitiling(&cur, &book.level(2).shapes)?];
    for level in 3..=k {
        cur = decode_up(z, book, level, &cur)?;
        out.push(to_quasitiling(&cur, &book.level(level).shapes)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarkerDensity {
    pub level: usize,
    /// Largest `|U_k C_k ∩ V_k g| / |V_k|` over `V_k g` inside the carrier.
    pub measured: Rational,
    /// `|U_k| / |V_k|`.
    pub bound: Rational,
    pub holds: bool,
}

/// Window upper density of the marked region `U_k·C_k` of each level.
pub fn marker_density_bound(
    levels: &[Quasitiling],
    book: &ShapeCodebook,
    window: &Window,
) -> Result<Vec<MarkerDensity>> {
    check_levels(levels, book)?;
    levels
        .iter()
        .zip(&book.levels)
        .map(|(q, lc)| {
            let marked = FiniteSubset::new(
                q.tiles.iter().flat_map(|t| lc.u.iter().map(move |x| x.mul(&t.center))),
            );
            let rep = density_over(&marked, &lc.v, &window.admissible(&lc.v), lc.v.len())?;
            let bound = Rational::new(lc.u.len() as i64, lc.v.len() as i64);
            Ok(MarkerDensity { level: lc.level, measured: rep.upper, bound, holds: rep.upper <= bound })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::build_codebook;

    fn aligned(len: i64, count: i64, offset: i64) -> Quasitiling {
        let centers = FiniteSubset::new((0..count).map(|k| GroupElement::z(offset + k * len)));
        Quasitiling::from_centers(vec![FiniteSubset::interval(0, len - 1)], vec![centers]).unwrap()
    }

    fn window(n: i64) -> Window {
        Window::new(FiniteSubset::interval(0, n - 1), FiniteSubset::interval(0, 0)).unwrap()
    }

    #[test]
    fn single_tile_single_block() {
        let w = window(20);
        let q = Quasitiling::from_centers(
            vec![FiniteSubset::interval(0, 4)],
            vec![FiniteSubset::singleton(GroupElement::z(5))],
        )
        .unwrap();
        let book = build_codebook(&[q.clone()], &w, SymbolMode::Three).unwrap();
        let z = encode_level(&[q.clone()], &book, &w, &Choices::constant(0)).unwrap();
        let expect = book.word(2, 0, 0);
        let mut off = 0;
        for (x, s) in w.carrier.iter().zip(z.cells()) {
            let n = x.coords().unwrap()[0];
            if n == 5 {
                assert_eq!(*s, 0);
            } else if (4..=7).contains(&n) {
                let pos = book.level(2).u.index_of(&GroupElement::z(n - 5)).unwrap();
                assert_eq!(*s, expect[pos - 1] as i32);
                off += 1;
            } else {
                assert_eq!(*s, 1);
            }
        }
        assert_eq!(off, 3);
        let back = decode_level(&z, &book, 2).unwrap();
        assert_eq!(back, horizon_safe(&[q], &book, &w));
    }

    #[test]
    fn background_decodes_empty() {
        let w = window(50);
        let book = build_codebook(&[aligned(5, 10, 0)], &w, SymbolMode::Three).unwrap();
        let z = SymbolicArray::new(w, SymbolMode::Three.alphabet(), 1).unwrap();
        assert!(decode_level(&z, &book, 2).unwrap()[0].is_empty());
    }

    #[test]
    fn two_level_round_trip() {
        let w = window(1000);
        let levels = [aligned(5, 200, 0), aligned(125, 8, 0)];
        let book = build_codebook(&levels, &w, SymbolMode::Three).unwrap();
        let ch = Choices::seeded(&levels[1].all_centers(), 7);
        let z = encode_level(&levels, &book, &w, &ch).unwrap();
        let back = decode_level(&z, &book, 3).unwrap();
        let safe = horizon_safe(&levels, &book, &w);
        assert_eq!(back, safe);
        assert!(!safe[1].is_empty());
        for d in marker_density_bound(&levels, &book, &w).unwrap() {
            assert!(d.holds, "{d:?}");
        }
    }

    #[test]
    fn two_symbol_round_trip() {
        let w = window(3000);
        let levels = [aligned(100, 30, 0)];
        let book = build_codebook(&levels, &w, SymbolMode::Two).unwrap();
        let z = encode_level(&levels, &book, &w, &Choices::seeded(&levels[0].all_centers(), 3)).unwrap();
        assert_eq!(decode_level(&z, &book, 2).unwrap(), horizon_safe(&levels, &book, &w));
    }

    #[test]
    fn separation_violation_names_centers() {
        let w = window(100);
        let book = build_codebook(&[aligned(5, 10, 0)], &w, SymbolMode::Three).unwrap();
        let bad = Quasitiling::from_centers(
            vec![FiniteSubset::interval(0, 4)],
            vec![FiniteSubset::new([GroupElement::z(10), GroupElement::z(12)])],
        )
        .unwrap();
        let err = encode_level(&[bad], &book, &w, &Choices::constant(1)).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("10") && err.to_string().contains("12"));
    }
}
