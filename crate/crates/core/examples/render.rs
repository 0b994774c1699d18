//! Writes an SVG of two nested box tilings of a ℤ² window.
//!
//! `cargo run --example render > tiling.svg`

use amenable::density::Window;
use amenable::experiment::render_svg;
use amenable::group::{FiniteSubset, GroupElement};
use amenable::quasitiling::Quasitiling;

fn level(side: i64, n: i64) -> amenable::Result<Quasitiling> {
    let centers = FiniteSubset::new(
        (0..n / side).flat_map(|i| (0..n / side).map(move |j| GroupElement::zd(&[i * side, j * side]))),
    );
    Quasitiling::from_centers(vec![FiniteSubset::zd_box(&[0, 0], &[side - 1, side - 1])], vec![centers])
}

fn main() -> amenable::Result<()> {
    let n = 24;
    let w = Window::new(FiniteSubset::zd_box(&[0, 0], &[n - 1, n - 1]), FiniteSubset::zd_box(&[0, 0], &[0, 0]))?;
    let svg = render_svg(&w, &[level(3, n)?, level(12, n)?], 1, 10)?;
    print!("{svg}");
    Ok(())
}
