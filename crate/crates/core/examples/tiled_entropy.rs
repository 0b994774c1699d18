//! Tiled entropy of a random tile-pattern array along a three-level congruent
//! tiling system of ℤ, against the Følner-box entropy estimate.

use amenable::density::Window;
use amenable::entropy::check_two_path;
use amenable::entropy::check_tiled_monotonicity;
use amenable::experiment::tile_pattern_layers;
use amenable::group::{FiniteSubset, GroupElement};
use amenable::quasitiling::{build_congruent_system, Quasitiling};

fn main() -> amenable::Result<()> {
    let n = 3600;
    let w = Window::new(FiniteSubset::interval(0, n - 1), FiniteSubset::interval(0, 0))?;
    let levels = [4, 12, 36]
        .iter()
        .map(|&len| {
            let centers = FiniteSubset::new((0..n / len).map(|t| GroupElement::z(t * len)));
            Quasitiling::from_centers(vec![FiniteSubset::interval(0, len - 1)], vec![centers])
        })
        .collect::<amenable::Result<Vec<_>>>()?;
    let sys = build_congruent_system(&levels, &w)?;

    // layer 0: each level-1 tile carries one of two random patterns
    let x = tile_pattern_layers(&w, &sys, 3, 2, 2)?;
    let p = x.symbol_partition([0])?;
    let terms: Vec<FiniteSubset> = (0..6).map(|j| FiniteSubset::interval(0, (1 << j) - 1)).collect();

    let r = check_tiled_monotonicity(&x, &sys, &p, &terms)?;
    for (k, v) in r.values.iter().enumerate() {
        println!("level {}: tiled entropy {:.6} bits/cell", k + 1, v.value);
    }
    println!("box estimate {:.6}; monotone {}, above estimate {}", r.estimate.value(), r.monotone, r.above_estimate);

    for k in 1..=2 {
        println!("level {k}: two-path difference {:.2e}", check_two_path(&x, &sys, k)?.difference());
    }
    Ok(())
}
