//! Lower and upper Banach densities of a periodic subset of ℤ², evaluated on
//! growing Følner boxes, approach the exact density at rate `c/n`.

use amenable::density::{density_over, PeriodicSet};
use amenable::group::FiniteSubset;
use amenable::Rational;

fn main() -> amenable::Result<()> {
    // a 3×4-periodic set with 5 residues per period
    let b = PeriodicSet::new(vec![3, 4], vec![vec![0, 0], vec![1, 1], vec![2, 2], vec![0, 3], vec![2, 0]])?;
    let rho = b.density();
    let c = 2 * b.period_diameter();
    println!("exact density {rho}, c = {c}");

    // the counts are periodic in the translate, so one period of translates suffices
    let period = FiniteSubset::zd_box(&[0, 0], &[2, 3]);
    for n in [1, 2, 4, 8, 16, 32] {
        let f = FiniteSubset::zd_cube(2, n);
        let rep = density_over(&b, &f, &period, f.len())?;
        let dev = (rep.upper - rho).max(rho - rep.lower);
        println!("n = {n:>2}: lower {} upper {} deviation {dev} bound {}", rep.lower, rep.upper, Rational::new(c, n));
    }
    Ok(())
}
