//! Extends a family of finite sets by one element each so that no translate of
//! one member equals another member, or itself, except trivially.

use amenable::encoding::{make_recognizable_family, make_recognizable_origin};
use amenable::group::{FiniteSubset, GroupElement};

fn show(s: &FiniteSubset) -> String {
    s.iter().map(GroupElement::to_text).collect::<Vec<_>>().join(" ")
}

fn main() -> amenable::Result<()> {
    // {0, 1} and {0, 2} are translates of themselves' shape class only up to
    // the identity, but {0, 1} and {5, 6} coincide after a shift
    let fam = vec![
        FiniteSubset::new([GroupElement::z(0), GroupElement::z(1)]),
        FiniteSubset::new([GroupElement::z(5), GroupElement::z(6)]),
        FiniteSubset::new([GroupElement::z(0), GroupElement::z(2)]),
    ];
    let out = make_recognizable_family(&fam)?;
    for (before, after) in fam.iter().zip(&out.sets) {
        println!("{{{}}} -> {{{}}}", show(before), show(after));
    }
    println!("margin has {} elements", out.margin.len());

    let h = FiniteSubset::new([GroupElement::heis(0, 0, 0), GroupElement::heis(1, 0, 0)]);
    println!("Heisenberg {{{}}} -> {{{}}}", show(&h), show(&make_recognizable_origin(&h)?));
    Ok(())
}
