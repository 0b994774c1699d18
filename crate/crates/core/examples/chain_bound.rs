//! The chain-length bound `N` for a multiplier set: the least `N` with
//! `|(E²)ⁿ| < (1+ε)ⁿ` from `N` on, certified by polynomial growth.

use amenable::comparison::chain_bound_n;
use amenable::group::{ball, FiniteSubset, GroupSpec};
use amenable::Rational;

fn main() -> amenable::Result<()> {
    let eps = Rational::from_integer(1);
    let cases = [
        ("ℤ, E = {-1, 0, 1}", GroupSpec::zd(1), FiniteSubset::interval(-1, 1)),
        ("ℤ², E = ball(1)", GroupSpec::zd(2), ball(&GroupSpec::zd(2), 1)?),
        ("Heisenberg, E = ball(1)", GroupSpec::heisenberg(), ball(&GroupSpec::heisenberg(), 1)?),
    ];
    for (name, spec, e) in cases {
        let cb = chain_bound_n(&e, eps, &spec, 512)?;
        println!("{name}: N = {} (certified from n = {})", cb.n, cb.certificate_from);
    }

    let lamp = GroupSpec::lamplighter();
    match chain_bound_n(&ball(&lamp, 1)?, eps, &lamp, 512) {
        Ok(cb) => println!("lamplighter: N = {}", cb.n),
        Err(e) => println!("lamplighter: {e}"),
    }
    Ok(())
}
