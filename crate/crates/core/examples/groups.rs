//! Group arithmetic, balls and Følner invariance in ℤ², the Heisenberg group
//! and the lamplighter group.

use amenable::group::{ball, invariance_ratio, is_invariant, FiniteSubset, GroupElement, GroupSpec};
use amenable::Rational;

fn main() -> amenable::Result<()> {
    for (name, spec) in [("ℤ²", GroupSpec::zd(2)), ("Heisenberg", GroupSpec::heisenberg()), ("lamplighter", GroupSpec::lamplighter())] {
        let sizes: Vec<usize> = (0..=4).map(|r| ball(&spec, r).map(|b| b.len())).collect::<Result<_, _>>()?;
        println!("{name:<12} |ball(r)| for r = 0..4: {sizes:?}");
    }

    let x = GroupElement::heis(1, 0, 0);
    let y = GroupElement::heis(0, 1, 0);
    let commutator = x.mul(&y).mul(&x.inv()).mul(&y.inv());
    println!("[x, y] = {commutator}");

    let k = FiniteSubset::new([GroupElement::zd(&[1, 0]), GroupElement::zd(&[0, 1])]);
    for n in [2, 8, 32] {
        let f = FiniteSubset::zd_box(&[0, 0], &[n - 1, n - 1]);
        let ratio = invariance_ratio(&f, &k)?;
        let ok = is_invariant(&f, &k, Rational::new(1, 10))?;
        println!("box side {n:>2}: |KF △ F|/|F| = {ratio}, (K, 1/10)-invariant: {ok}");
    }
    Ok(())
}
