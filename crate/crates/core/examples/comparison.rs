//! Finds an injection `φ: A → B` with `φ(a)a⁻¹` in a finite set `E` by
//! correction chains, compares with a bipartite matching, and checks that `φ`
//! is a block code.

use amenable::comparison::{comparison_solve, hall_oracle, verify_block_code, ComparisonInstance, SolveOptions};
use amenable::density::{PeriodicSet, Window};
use amenable::group::{product_set, FiniteSubset, GroupElement};
use amenable::quasitiling::Quasitiling;
use amenable::Rational;

fn main() -> amenable::Result<()> {
    let w = Window::new(FiniteSubset::interval(0, 999), FiniteSubset::interval(0, 0))?;
    let a = PeriodicSet::new(vec![10], vec![vec![0], vec![1], vec![2]])?.restrict(&w.carrier);
    let b = PeriodicSet::new(vec![10], (4..10).map(|r| vec![r]))?.restrict(&w.carrier);
    let centers = FiniteSubset::new((0..100).map(|t| GroupElement::z(10 * t)));
    let tiling = Quasitiling::from_centers(vec![FiniteSubset::interval(0, 9)], vec![centers])?;

    let inst = ComparisonInstance::new(a, b, tiling, Rational::new(1, 5), w)?;
    println!("|A| = {}, |B| = {}, |E| = {}", inst.a.len(), inst.b.len(), inst.e.len());

    let sol = comparison_solve(&inst, SolveOptions::default())?;
    let hall = hall_oracle(&inst);
    println!(
        "φ defined on {} points in {} rounds; N = {}, longest chain {} points",
        sol.phi.len(),
        sol.rounds,
        sol.n,
        sol.max_chain_len
    );
    println!("matching oracle: {}/{} matched", hall.matched, hall.needed);

    // horizon E^r with r from the solver
    let mut h = FiniteSubset::singleton(GroupElement::z(0));
    for _ in 0..sol.horizon_radius {
        h = product_set(&h, &inst.e);
    }
    let v = verify_block_code(&[(inst.y_ab()?, sol.phi.clone())], &h)?;
    println!("block code with horizon of {} cells: {} ({} points checked)", h.len(), v.holds, v.checked);
    Ok(())
}
