//! Encodes a two-level nested tiling of a ℤ window as a three-symbol array and
//! decodes it back. Only tiles far enough from the boundary survive the trip.

use amenable::density::Window;
use amenable::encoding::{build_codebook, decode_level, encode_level, horizon_safe, marker_density_bound, Choices, SymbolMode};
use amenable::group::{FiniteSubset, GroupElement};
use amenable::quasitiling::Quasitiling;

fn aligned(len: i64, n: i64) -> amenable::Result<Quasitiling> {
    let centers = FiniteSubset::new((0..n / len).map(|t| GroupElement::z(t * len)));
    Quasitiling::from_centers(vec![FiniteSubset::interval(0, len - 1)], vec![centers])
}

fn main() -> amenable::Result<()> {
    let n = 2000;
    let w = Window::new(FiniteSubset::interval(0, n - 1), FiniteSubset::interval(0, 0))?;
    let levels = vec![aligned(5, n)?, aligned(125, n)?];

    let book = build_codebook(&levels, &w, SymbolMode::Three)?;
    for k in 2..=3 {
        let lc = book.level(k);
        println!("level {k}: m = {}, |U| = {}, |V| = {}", lc.m, lc.u.len(), lc.v.len());
    }

    let z = encode_level(&levels, &book, &w, &Choices::seeded(&levels[1].all_centers(), 7))?;
    let head: String = (0..40).map(|i| match z.get(&GroupElement::z(i)) {
        Some(-1) => '-',
        Some(0) => '0',
        Some(1) => '+',
        _ => '?',
    }).collect();
    println!("first 40 symbols: {head}");

    let decoded = decode_level(&z, &book, 3)?;
    let safe = horizon_safe(&levels, &book, &w);
    for (k, (d, s)) in decoded.iter().zip(&safe).enumerate() {
        println!("level {}: decoded {} tiles, horizon-safe {}, equal: {}", k + 2, d.tiles.len(), s.tiles.len(), d == s);
    }
    for m in marker_density_bound(&levels, &book, &w)? {
        println!("level {} marker density {:.4} ≤ {:.4}: {}", m.level, m.measured, m.bound, m.holds);
    }
    Ok(())
}
