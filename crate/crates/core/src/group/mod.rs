//! Group backends, finite subsets and the (K,ε)-invariance calculus.

mod element;
mod order;
mod set;

pub use element::{Family, GroupElement, MAX_DIM};
pub use order::{
    canonical_cmp, canonical_key, heis_length_lower_bound, heis_word_length, lamplighter_length,
    zigzag, CanonKey, HEIS_EXACT_RADIUS,
};
pub use set::FiniteSubset;

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::Rational;

/// Elements a ball may hold before enumeration gives up.
pub const DEFAULT_BALL_CAP: usize = 20_000_000;

/// A group family together with an ordered generator list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    pub family: Family,
    pub generators: Vec<GroupElement>,
}

impl GroupSpec {
    /// ℤᵈ with the standard basis.
    pub fn zd(d: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&d), "ℤᵈ needs 1 ≤ d ≤ {MAX_DIM}");
        let generators = (0..d)
            .map(|i| {
                let mut v = vec![0; d];
                v[i] = 1;
                GroupElement::zd(&v)
            })
            .collect();
        GroupSpec { family: Family::FreeAbelian(d as u8), generators }
    }

    pub fn heisenberg() -> Self {
        GroupSpec {
            family: Family::Heisenberg,
            generators: vec![GroupElement::heis(1, 0, 0), GroupElement::heis(0, 1, 0)],
        }
    }

    /// Generators t (cursor step) and a (toggle at the cursor).
    pub fn lamplighter() -> Self {
        GroupSpec {
            family: Family::Lamplighter,
            generators: vec![GroupElement::lamp(1, &[]), GroupElement::lamp(0, &[0])],
        }
    }

    /// The family with its standard generators, as used by the canonical order.
    pub fn standard(family: Family) -> Self {
        match family {
            Family::FreeAbelian(d) => GroupSpec::zd(d as usize),
            Family::Heisenberg => GroupSpec::heisenberg(),
            Family::Lamplighter => GroupSpec::lamplighter(),
        }
    }

    /// Parses `zd:D`, `heis3` or `lamplighter`.
    pub fn parse(desc: &str) -> Result<Self> {
        let d = desc.trim();
        if let Some(n) = d.strip_prefix("zd:") {
            let n: usize = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad rank in group descriptor `{d}`")))?;
            if !(1..=MAX_DIM).contains(&n) {
                return Err(Error::Parse(format!("rank must be in 1..={MAX_DIM}, got {n}")));
            }
            return Ok(GroupSpec::zd(n));
        }
        match d {
            "heis3" => Ok(GroupSpec::heisenberg()),
            "lamplighter" => Ok(GroupSpec::lamplighter()),
            _ => Err(Error::Parse(format!("unknown group descriptor `{d}`"))),
        }
    }

    pub fn descriptor(&self) -> String {
        match self.family {
            Family::FreeAbelian(d) => format!("zd:{d}"),
            Family::Heisenberg => "heis3".into(),
            Family::Lamplighter => "lamplighter".into(),
        }
    }

    /// Replaces the generator list (used for balls only; the canonical order
    /// always uses the family's standard generators).
    pub fn with_generators(mut self, generators: Vec<GroupElement>) -> Result<Self> {
        for g in &generators {
            self.check(g)?;
        }
        self.generators = generators;
        Ok(self)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.family)
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if g.family() == self.family {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "element {g} does not belong to {}",
                self.descriptor()
            )))
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        g.try_mul(h)
    }

    pub fn invert(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(g.inv())
    }

    /// Generators with inverses, without the identity, deduplicated.
    pub fn symmetric_generators(&self) -> Vec<GroupElement> {
        let mut out: Vec<GroupElement> = Vec::new();
        for g in &self.generators {
            for h in [g.clone(), g.inv()] {
                if !h.is_identity() && !out.contains(&h) {
                    out.push(h);
                }
            }
        }
        out
    }

    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        GroupElement::parse(self.family, text)
    }

    pub fn parse_subset(&self, text: &str) -> Result<FiniteSubset> {
        FiniteSubset::parse(self.family, text)
    }
}

/// `KF = {k·f}`.
pub fn product_set(k: &FiniteSubset, f: &FiniteSubset) -> FiniteSubset {
    let mut seen: FxHashSet<GroupElement> = FxHashSet::default();
    for a in k {
        for b in f {
            seen.insert(a.mul(b));
        }
    }
    FiniteSubset::new(seen)
}

/// `K`-core `F_K = {f ∈ F : Kf ⊆ F}`.
pub fn k_core(f: &FiniteSubset, k: &FiniteSubset) -> FiniteSubset {
    f.filter(|x| k.iter().all(|a| f.contains(&a.mul(x))))
}

/// `|KF △ F| / |F|` as an exact rational.
pub fn invariance_ratio(f: &FiniteSubset, k: &FiniteSubset) -> Result<Rational> {
    if f.is_empty() {
        return Err(Error::domain("invariance of the empty set is undefined"));
    }
    let kf = product_set(k, f);
    let sym = kf.difference(f).len() + f.difference(&kf).len();
    Ok(Rational::new(sym as i64, f.len() as i64))
}

/// `F` is `(K,ε)`-invariant iff `|KF △ F| < ε|F|`.
pub fn is_invariant(f: &FiniteSubset, k: &FiniteSubset, eps: Rational) -> Result<bool> {
    if eps <= Rational::from_integer(0) || eps >= Rational::from_integer(1) {
        return Err(Error::domain(format!("ε must lie in (0,1), got {eps}")));
    }
    Ok(invariance_ratio(f, k)? < eps)
}

/// `(R ∪ R⁻¹ ∪ {e})ⁿ` by breadth-first closure.
pub fn ball(spec: &GroupSpec, n: usize) -> Result<FiniteSubset> {
    ball_capped(spec, n, DEFAULT_BALL_CAP)
}

pub fn ball_capped(spec: &GroupSpec, n: usize, cap: usize) -> Result<FiniteSubset> {
    Ok(FiniteSubset::new(ball_layers(spec, n, cap)?.into_iter().flatten()))
}

/// Spheres of radius 0..=n in generation order.
pub fn ball_layers(spec: &GroupSpec, n: usize, cap: usize) -> Result<Vec<Vec<GroupElement>>> {
    let gens = spec.symmetric_generators();
    let e = spec.identity();
    let mut seen: FxHashSet<GroupElement> = FxHashSet::default();
    seen.insert(e.clone());
    let mut layers = vec![vec![e]];
    for r in 0..n {
        let mut next = Vec::new();
        for g in layers.last().expect("nonempty") {
            for s in &gens {
                let h = g.mul(s);
                if seen.insert(h.clone()) {
                    next.push(h);
                }
            }
        }
        if seen.len() > cap {
            return Err(Error::Resource(format!(
                "ball enumeration exceeded {cap} elements; achieved radius {r}"
            )));
        }
        if next.is_empty() {
            break;
        }
        layers.push(next);
    }
    Ok(layers)
}

/// The first `n` elements of the family in canonical order.
pub fn canonical_prefix(family: Family, n: usize) -> Result<FiniteSubset> {
    let spec = GroupSpec::standard(family);
    let mut r = 0;
    loop {
        let b = ball(&spec, r)?;
        if b.len() >= n {
            return Ok(FiniteSubset::from_canonical_unchecked(b.iter().take(n).cloned().collect()));
        }
        r += 1;
    }
}

/// The canonically least element outside the finite set `x`.
pub fn least_outside(family: Family, x: &FiniteSubset) -> Result<GroupElement> {
    let spec = GroupSpec::standard(family);
    let mut r = 1;
    loop {
        if let Some(g) = ball(&spec, r)?.iter().find(|g| !x.contains(g)) {
            return Ok(g.clone());
        }
        r += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn spec_examples() {
        let zz = GroupSpec::zd(2);
        let p = zz
            .multiply(&GroupElement::zd(&[1, 2]), &GroupElement::zd(&[3, -1]))
            .unwrap();
        assert_eq!(p, GroupElement::zd(&[4, 1]));

        let k = FiniteSubset::interval(0, 1);
        let f = FiniteSubset::interval(0, 2);
        assert_eq!(product_set(&k, &f), FiniteSubset::interval(0, 3));

        assert_eq!(k_core(&FiniteSubset::interval(0, 9), &k), FiniteSubset::interval(0, 8));
        let sq = FiniteSubset::zd_box(&[0, 0], &[4, 4]);
        let kk = FiniteSubset::new([
            GroupElement::zd(&[0, 0]),
            GroupElement::zd(&[1, 0]),
            GroupElement::zd(&[0, 1]),
        ]);
        assert_eq!(k_core(&sq, &kk), FiniteSubset::zd_box(&[0, 0], &[3, 3]));

        assert!(is_invariant(&FiniteSubset::interval(0, 99), &k, r(1, 50)).unwrap());
        let k05 = FiniteSubset::new([GroupElement::z(0), GroupElement::z(5)]);
        assert!(!is_invariant(&FiniteSubset::interval(0, 9), &k05, r(3, 10)).unwrap());
        assert_eq!(invariance_ratio(&FiniteSubset::interval(0, 9), &k05).unwrap(), r(1, 2));
        assert!(is_invariant(&FiniteSubset::empty(), &k, r(1, 2)).is_err());
    }

    #[test]
    fn prefixes() {
        let p = canonical_prefix(Family::FreeAbelian(1), 5).unwrap();
        let v: Vec<i64> = p.iter().map(|g| g.coords().unwrap()[0]).collect();
        assert_eq!(v, [0, 1, -1, 2, -2]);
        let x = FiniteSubset::interval(-1, 2);
        assert_eq!(least_outside(Family::FreeAbelian(1), &x).unwrap(), GroupElement::z(-2));
    }

    #[test]
    fn balls() {
        for n in 0..6 {
            assert_eq!(ball(&GroupSpec::zd(1), n).unwrap().len(), 2 * n + 1);
        }
        assert_eq!(ball(&GroupSpec::zd(2), 2).unwrap().len(), 13);
        let tiny = ball_capped(&GroupSpec::heisenberg(), 10, 50);
        assert!(matches!(tiny, Err(Error::Resource(_))));
    }

    #[test]
    fn parse_descriptors() {
        assert_eq!(GroupSpec::parse("zd:3").unwrap(), GroupSpec::zd(3));
        assert_eq!(GroupSpec::parse("heis3").unwrap().family, Family::Heisenberg);
        assert!(GroupSpec::parse("zd:9").is_err());
        assert!(GroupSpec::parse("free2").is_err());
        let s = GroupSpec::zd(2);
        let set = s.parse_subset("# box\n0,0\n1,-1\n\n0,0\n").unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(s.parse_subset(&set.to_text()).unwrap(), set);
    }
}
