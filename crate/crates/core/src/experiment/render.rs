use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use super::commands::construct_tiling;
use super::config::ExperimentConfig;
use super::Artifacts;
use crate::density::Window;
use crate::error::{Error, Result};
use crate::group::{Family, FiniteSubset, GroupElement};
use crate::quasitiling::Quasitiling;

pub fn cmd_render(cfg: &ExperimentConfig, check: bool) -> Result<Artifacts> {
    if !matches!(cfg.family(), Family::FreeAbelian(1 | 2)) {
        return Err(Error::Config { path: "group".into(), message: "rendering needs ℤ or ℤ²".into() });
    }
    let blk = cfg.block(&cfg.render, "render")?;
    let (w, levels) = match &blk.levels {
        Some(l) => {
            let w = cfg.window(FiniteSubset::singleton(cfg.identity()))?;
            let levels = cfg.aligned_levels("render.levels", &w, l)?;
            (w, levels)
        }
        None => {
            let (w, _, _, c) = construct_tiling(cfg)?;
            (w, vec![c.tiling])
        }
    };
    let svg = render_svg(&w, &levels, blk.palette_seed, blk.cell)?;
    if check && render_svg(&w, &levels, blk.palette_seed, blk.cell)? != svg {
        return Err(Error::Integrity("two renders of the same input differ".into()));
    }
    Ok(Artifacts::from([("render.svg".into(), svg)]))
}

fn palette(levels: &[Quasitiling], seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    levels
        .iter()
        .map(|q| {
            (0..q.shapes.len())
                .map(|_| {
                    let [r, g, b]: [u8; 3] = std::array::from_fn(|_| rng.gen_range(96..=232));
                    format!("#{r:02x}{g:02x}{b:02x}")
                })
                .collect()
        })
        .collect()
}

/// SVG of nested tilings of a ℤ or ℤ² box window.
///
/// In ℤ each level gets its own row, level 1 on top. In ℤ² level 1 is filled
/// and every level is outlined, with stroke width growing with the level.
/// Tile colours depend on the shape index and `palette_seed` only; centers are
/// drawn as dots. Output is a pure function of the arguments.
pub fn render_svg(w: &Window, levels: &[Quasitiling], palette_seed: u64, cell: u32) -> Result<String> {
    let (lo, hi) = w.carrier_box().ok_or_else(|| Error::usage("rendering needs a box window"))?;
    let d = lo.len();
    if !(1..=2).contains(&d) {
        return Err(Error::usage("rendering needs ℤ or ℤ²"));
    }
    let cell = cell.max(1) as i64;
    let cols = hi[0] - lo[0] + 1;
    let rows = if d == 1 { levels.len().max(1) as i64 } else { hi[1] - lo[1] + 1 };
    let (width, height) = (cols * cell, rows * cell);
    // pixel origin of a cell, and its row for levels of a ℤ render
    let place = |g: &GroupElement, level: usize| -> Option<(i64, i64)> {
        let c = g.coords()?;
        if (0..d).any(|i| c[i] < lo[i] || c[i] > hi[i]) {
            return None;
        }
        let x = (c[0] - lo[0]) * cell;
        let y = if d == 1 { level as i64 * cell } else { (hi[1] - c[1]) * cell };
        Some((x, y))
    };
    let colours = palette(levels, palette_seed);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"#f4f4f4\"/>");
    for (l, q) in levels.iter().enumerate() {
        let filled = d == 1 || l == 0;
        let stroke = l as i64 + 1;
        let sets = q.tile_sets();
        let mut owner: FxHashMap<&GroupElement, usize> = FxHashMap::default();
        for (t, set) in sets.iter().enumerate() {
            for g in set {
                owner.insert(g, t);
            }
        }
        let _ = writeln!(s, "<g class=\"level{}\">", l + 1);
        for t in q.canonical_tile_order() {
            let tile = &q.tiles[t];
            if filled {
                for g in &sets[t] {
                    if let Some((x, y)) = place(g, l) {
                        let _ = writeln!(
                            s,
                            "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"{}\"/>",
                            colours[l][tile.shape]
                        );
                    }
                }
            }
            for g in &sets[t] {
                let Some((x, y)) = place(g, l) else { continue };
                let c = g.coords().expect("ℤᵈ element");
                let mut edge = |dx: i64, dy: i64, x1: i64, y1: i64, x2: i64, y2: i64| {
                    let mut v = c.to_vec();
                    v[0] += dx;
                    if d == 2 {
                        v[1] += dy;
                    }
                    let same = (d == 2 || dy == 0) && owner.get(&GroupElement::zd(&v)) == Some(&t);
                    if !same {
                        let _ = writeln!(
                            s,
                            "<line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"#202020\" stroke-width=\"{stroke}\"/>"
                        );
                    }
                };
                edge(-1, 0, x, y, x, y + cell);
                edge(1, 0, x + cell, y, x + cell, y + cell);
                edge(0, 1, x, y, x + cell, y);
                edge(0, -1, x, y + cell, x + cell, y + cell);
            }
            if let Some((x, y)) = place(&tile.center, l) {
                let r = (cell / 4 + l as i64).max(1);
                let _ = writeln!(
                    s,
                    "<circle cx=\"{}\" cy=\"{}\" r=\"{r}\" fill=\"#000000\"/>",
                    x + cell / 2,
                    y + cell / 2
                );
            }
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_tiling_is_background_only() {
        let w = Window::new(FiniteSubset::interval(0, 9), FiniteSubset::interval(0, 0)).unwrap();
        let q = Quasitiling::new(vec![FiniteSubset::interval(0, 4)], vec![]).unwrap();
        let svg = render_svg(&w, &[q], 0, 8).unwrap();
        assert!(!svg.contains("<line") && !svg.contains("<circle"));
        assert_eq!(svg.matches("<rect").count(), 1);
    }

    #[test]
    fn intervals_have_two_ends() {
        let w = Window::new(FiniteSubset::interval(0, 9), FiniteSubset::interval(0, 0)).unwrap();
        let centers = FiniteSubset::new([GroupElement::z(0), GroupElement::z(5)]);
        let q = Quasitiling::from_centers(vec![FiniteSubset::interval(0, 4)], vec![centers]).unwrap();
        let svg = render_svg(&w, &[q], 3, 8).unwrap();
        // per tile: two vertical ends plus top and bottom of five cells
        assert_eq!(svg.matches("<line").count(), 2 * (2 + 10));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg, render_svg(&w, &[render_input()], 3, 8).unwrap());
    }

    fn render_input() -> Quasitiling {
        let centers = FiniteSubset::new([GroupElement::z(0), GroupElement::z(5)]);
        Quasitiling::from_centers(vec![FiniteSubset::interval(0, 4)], vec![centers]).unwrap()
    }
}
