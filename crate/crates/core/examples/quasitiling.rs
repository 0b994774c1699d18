//! Builds an ε-quasitiling of a ℤ² window from a pool of boxes, checks its
//! properties and turns it into a disjoint tiling.

use amenable::density::Window;
use amenable::group::FiniteSubset;
use amenable::quasitiling::{check_properties, construct_epsilon_quasitiling, disjointify};
use amenable::Rational;

fn main() -> amenable::Result<()> {
    let w = Window::new(FiniteSubset::zd_box(&[0, 0], &[39, 39]), FiniteSubset::zd_box(&[0, 0], &[0, 0]))?;
    let pool: Vec<FiniteSubset> =
        [6, 4, 2, 1].iter().map(|&s| FiniteSubset::zd_box(&[0, 0], &[s - 1, s - 1])).collect();
    let eps = Rational::new(1, 5);

    let c = construct_epsilon_quasitiling(&pool, eps, &w, 9)?;
    println!("{} tiles, α = {}, greedy passes {:?}", c.tiling.tiles.len(), c.alpha, c.passes);

    let k = FiniteSubset::zd_box(&[-1, -1], &[1, 1]);
    let rep = check_properties(&c.tiling, &k, eps, &w)?;
    println!(
        "ε-disjoint: {}, disjoint: {}, covering α = {}, tiling: {}",
        rep.eps_disjoint(),
        rep.disjoint,
        rep.alpha,
        rep.tiling
    );

    let d = disjointify(&c.tiling)?;
    let cells: usize = d.tile_sets().iter().map(FiniteSubset::len).sum();
    println!("disjointified: {} tiles, {} cells, union preserved: {}", d.tiles.len(), cells, d.union() == c.tiling.union());
    Ok(())
}
