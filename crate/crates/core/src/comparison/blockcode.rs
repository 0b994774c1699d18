use rustc_hash::FxHashMap;

use super::PartialBijection;
use crate::error::{Error, Result};
use crate::group::{FiniteSubset, GroupElement};
use crate::symbolic::{RuleConflict, SymbolicArray};

#[derive(Clone, Debug, PartialEq)]
pub struct BlockCodeVerdict {
    pub holds: bool,
    /// `A`-points whose horizon fits the carrier.
    pub checked: usize,
    /// `A`-points skipped because their horizon leaves the carrier.
    pub skipped: usize,
    pub distinct_patterns: usize,
    /// Equal patterns with different multipliers (`None` = undefined).
    pub counterexample: Option<RuleConflict<Option<GroupElement>>>,
}

/// Whether the multiplier `φ(a)a⁻¹` is a function of the pattern `y|_{Fa}`
/// over all `A`-points (symbol 1) of all given solutions.
pub fn verify_block_code(
    solutions: &[(SymbolicArray, PartialBijection)],
    f: &FiniteSubset,
) -> Result<BlockCodeVerdict> {
    let Some(fam) = f.family() else {
        return Err(Error::usage("horizon is empty"));
    };
    if !f.contains(&GroupElement::identity(fam)) {
        return Err(Error::usage("horizon must contain e"));
    }
    let mut seen: FxHashMap<Vec<i32>, (GroupElement, Option<GroupElement>)> = FxHashMap::default();
    let (mut checked, mut skipped) = (0, 0);
    for (y, phi) in solutions {
        for a in &y.positions(1) {
            let Some(p) = y.pattern(f, a) else {
                skipped += 1;
                continue;
            };
            checked += 1;
            let out = phi.multiplier(a);
            match seen.get(&p) {
                Some((a0, o)) if *o != out => {
                    return Ok(BlockCodeVerdict {
                        holds: false,
                        checked,
                        skipped,
                        distinct_patterns: seen.len(),
                        counterexample: Some(RuleConflict {
                            pattern: p,
                            first: (a0.clone(), o.clone()),
                            second: (a.clone(), out),
                        }),
                    });
                }
                Some(_) => {}
                None => {
                    seen.insert(p, (a.clone(), out));
                }
            }
        }
    }
    if checked == 0 {
        return Err(Error::usage(format!(
            "the {}-element horizon fits around no A-point of any window",
            f.len()
        )));
    }
    Ok(BlockCodeVerdict { holds: true, checked, skipped, distinct_patterns: seen.len(), counterexample: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Window;

    #[test]
    fn constant_and_inconsistent_maps() {
        let w = Window::new(FiniteSubset::interval(0, 19), FiniteSubset::interval(0, 1)).unwrap();
        let a = FiniteSubset::new((0..10).map(|k| GroupElement::z(2 * k)));
        let b = FiniteSubset::new((0..10).map(|k| GroupElement::z(2 * k + 1)));
        let y = SymbolicArray::from_sets(w, &a, &b).unwrap();
        let e = FiniteSubset::interval(-1, 1);
        let mut phi = PartialBijection::new(&e);
        for x in &a {
            phi.insert(x.clone(), x.mul(&GroupElement::z(1))).unwrap();
        }
        let e_only = FiniteSubset::singleton(GroupElement::z(0));
        let v = verify_block_code(&[(y.clone(), phi)], &e_only).unwrap();
        assert!(v.holds);
        assert_eq!(v.checked, 10);

        // same pattern everywhere, but one point is left unmatched
        let mut bad = PartialBijection::new(&e);
        for x in a.iter().skip(1) {
            bad.insert(x.clone(), x.mul(&GroupElement::z(1))).unwrap();
        }
        let v = verify_block_code(&[(y, bad)], &e_only).unwrap();
        assert!(!v.holds);
        assert!(v.counterexample.is_some());
    }
}
