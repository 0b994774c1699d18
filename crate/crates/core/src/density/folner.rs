use crate::error::{Error, Result};
use crate::group::{ball, product_set, Family, FiniteSubset, GroupSpec};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct FolnerFlags {
    pub centered: bool,
    pub nested: bool,
    pub symmetric: bool,
}

#[derive(Clone, Debug)]
enum Terms {
    Boxes(GroupSpec),
    Explicit(Vec<FiniteSubset>),
}

/// Følner sequence `F_1, F_2, …` (1-based, as in the literature).
#[derive(Clone, Debug)]
pub struct FolnerSequence {
    terms: Terms,
    pub flags: FolnerFlags,
}

/// Cubes `[−n,n]ᵈ` for ℤᵈ and balls for the Heisenberg group.
pub fn folner_boxes(spec: &GroupSpec) -> Result<FolnerSequence> {
    match spec.family {
        Family::FreeAbelian(_) | Family::Heisenberg => Ok(FolnerSequence {
            terms: Terms::Boxes(spec.clone()),
            flags: FolnerFlags { centered: true, nested: true, symmetric: true },
        }),
        Family::Lamplighter => Err(Error::usage(
            "no Følner boxes are shipped for the lamplighter group",
        )),
    }
}

impl FolnerSequence {
    /// Wraps explicit terms; `terms[0]` is `F_1`. Flags are checked, not trusted.
    pub fn explicit(terms: Vec<FiniteSubset>, flags: FolnerFlags) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::domain("a Følner sequence needs at least one term"));
        }
        let s = FolnerSequence { terms: Terms::Explicit(terms), flags };
        s.check_flags(s.len().unwrap_or(1))?;
        Ok(s)
    }

    /// Number of available terms, or `None` when unbounded.
    pub fn len(&self) -> Option<usize> {
        match &self.terms {
            Terms::Boxes(_) => None,
            Terms::Explicit(v) => Some(v.len()),
        }
    }

    /// `F_n` for `n ≥ 1`; box sequences also accept `n = 0` (`{e}`).
    pub fn term(&self, n: usize) -> Result<FiniteSubset> {
        match &self.terms {
            Terms::Boxes(spec) => match spec.family {
                Family::FreeAbelian(d) => Ok(FiniteSubset::zd_cube(d as usize, n as i64)),
                _ => ball(spec, n),
            },
            Terms::Explicit(v) => {
                if n == 0 || n > v.len() {
                    Err(Error::domain(format!("term {n} outside 1..={}", v.len())))
                } else {
                    Ok(v[n - 1].clone())
                }
            }
        }
    }

    /// Checks the declared flags on `F_1..F_up_to`.
    pub fn check_flags(&self, up_to: usize) -> Result<()> {
        let mut prev: Option<FiniteSubset> = None;
        for n in 1..=up_to {
            let f = self.term(n)?;
            let Some(fam) = f.family() else {
                return Err(Error::domain(format!("term {n} is empty")));
            };
            let e = crate::group::GroupElement::identity(fam);
            if self.flags.centered && !f.contains(&e) {
                return Err(Error::domain(format!("term {n} does not contain e")));
            }
            if self.flags.symmetric && f.inverse() != f {
                return Err(Error::domain(format!("term {n} is not symmetric")));
            }
            if self.flags.nested {
                if let Some(p) = &prev {
                    if !p.is_subset(&f) {
                        return Err(Error::domain(format!("term {} ⊄ term {n}", n - 1)));
                    }
                }
            }
            prev = Some(f);
        }
        Ok(())
    }
}

/// Shulman constant over the explored range.
#[derive(Clone, Debug, PartialEq)]
pub struct TemperedReport {
    /// Least `C` with `|⋃_{i≤n} F_i⁻¹F_{n+1}| ≤ C|F_{n+1}|` for all `n < up_to`.
    pub constant: Rational,
    /// The per-`n` ratios, `ratios[n-1]` for `n = 1..up_to-1`.
    pub ratios: Vec<Rational>,
    /// Whether the ratios have plateaued: every ratio in the second half of the
    /// range is at most twice the maximum over the first half.
    pub plateau: bool,
}

/// Shulman's condition on `F_1..F_up_to`.
pub fn check_tempered(seq: &FolnerSequence, up_to: usize) -> Result<(bool, Rational)> {
    let r = tempered_report(seq, up_to)?;
    Ok((r.plateau, r.constant))
}

pub fn tempered_report(seq: &FolnerSequence, up_to: usize) -> Result<TemperedReport> {
    if up_to < 2 {
        return Err(Error::domain("check_tempered needs up_to ≥ 2"));
    }
    let mut inv_union = FiniteSubset::empty();
    let mut ratios = Vec::new();
    for n in 1..up_to {
        inv_union = inv_union.union(&seq.term(n)?.inverse());
        let next = seq.term(n + 1)?;
        let u = product_set(&inv_union, &next);
        ratios.push(Rational::new(u.len() as i64, next.len() as i64));
    }
    let constant = *ratios.iter().max().expect("up_to ≥ 2");
    let half = ratios.len().div_ceil(2);
    let first_max = *ratios[..half].iter().max().expect("nonempty");
    let plateau = ratios[half..].iter().all(|&r| r <= first_max * 2);
    Ok(TemperedReport { constant, ratios, plateau })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{is_invariant, GroupElement};

    #[test]
    fn boxes_examples() {
        let s = folner_boxes(&GroupSpec::zd(1)).unwrap();
        assert_eq!(s.term(3).unwrap(), FiniteSubset::interval(-3, 3));
        s.check_flags(10).unwrap();
        folner_boxes(&GroupSpec::heisenberg()).unwrap().check_flags(4).unwrap();
        assert!(folner_boxes(&GroupSpec::lamplighter()).is_err());

        let s2 = folner_boxes(&GroupSpec::zd(2)).unwrap();
        let k = FiniteSubset::singleton(GroupElement::zd(&[1, 0]));
        let f = s2.term(2).unwrap();
        let kf = product_set(&k, &f);
        assert_eq!(kf.difference(&f).len(), 5);
        assert_eq!(f.difference(&kf).len(), 5);
        // 10/25 is not below 1/4
        assert!(!is_invariant(&f, &k, Rational::new(1, 4)).unwrap());
        assert!(is_invariant(&f, &k, Rational::new(2, 5) + Rational::new(1, 100)).unwrap());
    }

    #[test]
    fn tempered_integer_boxes() {
        let s = folner_boxes(&GroupSpec::zd(1)).unwrap();
        let (_, c) = check_tempered(&s, 11).unwrap();
        // nested: the union is F_n⁻¹ = F_n, and F_nF_{n+1} = [−2n−1, 2n+1]
        let expected = (1..=10)
            .map(|n| Rational::new(4 * n + 3, 2 * n + 3))
            .max()
            .unwrap();
        assert_eq!(c, expected);
        let (_, c1) = check_tempered(&s, 2).unwrap();
        assert_eq!(c1, Rational::new(7, 5));

        let e = FiniteSubset::singleton(GroupElement::z(0));
        let seq = FolnerSequence::explicit(
            vec![e, FiniteSubset::interval(-1, 1)],
            FolnerFlags { centered: true, nested: true, symmetric: true },
        )
        .unwrap();
        assert_eq!(check_tempered(&seq, 2).unwrap().1, Rational::from_integer(1));
    }
}
