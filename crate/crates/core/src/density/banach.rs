use rayon::prelude::*;
use rustc_hash::FxHashSet;

use super::window::Window;
use crate::error::{Error, Result};
use crate::group::{is_invariant, k_core, product_set, FiniteSubset, GroupElement};
use crate::Rational;

/// Anything with a membership test: explicit finite sets or periodic patterns.
pub trait PointSet: Sync {
    fn contains_point(&self, g: &GroupElement) -> bool;
}

impl PointSet for FiniteSubset {
    fn contains_point(&self, g: &GroupElement) -> bool {
        self.contains(g)
    }
}

/// A subset of ℤᵈ invariant under `∏ p_i ℤ`, given by its residues in `∏[0,p_i)`.
#[derive(Clone, Debug)]
pub struct PeriodicSet {
    periods: Vec<i64>,
    residues: FxHashSet<Vec<i64>>,
}

impl PeriodicSet {
    pub fn new(periods: Vec<i64>, residues: impl IntoIterator<Item = Vec<i64>>) -> Result<Self> {
        if periods.is_empty() || periods.iter().any(|&p| p <= 0) {
            return Err(Error::domain("periods must be positive"));
        }
        let mut set = FxHashSet::default();
        for r in residues {
            if r.len() != periods.len() {
                return Err(Error::domain("residue has the wrong dimension"));
            }
            set.insert(r.iter().zip(&periods).map(|(x, p)| x.rem_euclid(*p)).collect());
        }
        Ok(PeriodicSet { periods, residues: set })
    }

    pub fn periods(&self) -> &[i64] {
        &self.periods
    }

    pub fn residues(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.residues.iter()
    }

    /// Exact density `#residues / ∏ p_i`.
    pub fn density(&self) -> Rational {
        Rational::new(self.residues.len() as i64, self.periods.iter().product())
    }

    /// Longest side of the fundamental box.
    pub fn period_diameter(&self) -> i64 {
        *self.periods.iter().max().expect("nonempty")
    }

    /// Elements of the set inside a finite region.
    pub fn restrict(&self, region: &FiniteSubset) -> FiniteSubset {
        region.filter(|g| self.contains_point(g))
    }
}

impl PointSet for PeriodicSet {
    fn contains_point(&self, g: &GroupElement) -> bool {
        let Some(c) = g.coords() else { return false };
        if c.len() != self.periods.len() {
            return false;
        }
        let r: Vec<i64> = c.iter().zip(&self.periods).map(|(x, p)| x.rem_euclid(*p)).collect();
        self.residues.contains(&r)
    }
}

/// Window Banach-density statistics with their witnesses.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    pub lower: Rational,
    pub upper: Rational,
    pub advantage: Option<Rational>,
    pub lower_witness: GroupElement,
    pub upper_witness: GroupElement,
    pub advantage_witness: Option<GroupElement>,
    pub translates: usize,
    pub shape_size: usize,
    pub margin_size: usize,
}

impl DensityReport {
    /// `key = value` record (TOML compatible).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("lower = \"{}\"\n", self.lower));
        s.push_str(&format!("upper = \"{}\"\n", self.upper));
        if let Some(a) = self.advantage {
            s.push_str(&format!("advantage = \"{a}\"\n"));
        }
        s.push_str(&format!(
            "witness = {{ lower = \"{}\", upper = \"{}\"{} }}\n",
            self.lower_witness.to_text(),
            self.upper_witness.to_text(),
            self.advantage_witness
                .as_ref()
                .map(|g| format!(", advantage = \"{}\"", g.to_text()))
                .unwrap_or_default()
        ));
        s.push_str(&format!("translates = {}\n", self.translates));
        s.push_str(&format!("shape_size = {}\n", self.shape_size));
        s.push_str(&format!("margin_size = {}\n", self.margin_size));
        s
    }
}

fn count_in(set: &dyn PointSet, f: &FiniteSubset, g: &GroupElement) -> i64 {
    f.iter().filter(|x| set.contains_point(&x.mul(g))).count() as i64
}

/// Per-translate statistic, evaluated in parallel; ties resolve to the canonically first translate.
fn extremes(
    translates: &FiniteSubset,
    stat: impl Fn(&GroupElement) -> i64 + Sync,
) -> Option<((i64, usize), (i64, usize))> {
    let vals: Vec<i64> = (0..translates.len())
        .into_par_iter()
        .map(|i| stat(translates.get(i).expect("in range")))
        .collect();
    let min = vals.iter().enumerate().min_by_key(|&(i, v)| (*v, i))?;
    let max = vals.iter().enumerate().max_by_key(|&(i, v)| (*v, std::cmp::Reverse(i)))?;
    Some(((*min.1, min.0), (*max.1, max.0)))
}

fn check_shape(f: &FiniteSubset, w: &Window) -> Result<()> {
    if f.is_empty() {
        return Err(Error::domain("density shape is empty"));
    }
    if !f.is_subset(&w.margin_shape) {
        return Err(Error::usage("density shape must lie inside the window margin shape"));
    }
    Ok(())
}

/// Lower and upper density of `B` over translates `Fg ⊆ carrier`.
pub fn density_window(b: &dyn PointSet, f: &FiniteSubset, w: &Window) -> Result<DensityReport> {
    check_shape(f, w)?;
    density_over(b, f, &w.admissible(f), w.margin_shape.len())
}

/// Same statistic over an explicit translate set.
pub fn density_over(
    b: &dyn PointSet,
    f: &FiniteSubset,
    translates: &FiniteSubset,
    margin_size: usize,
) -> Result<DensityReport> {
    let ((lo, li), (hi, hi_i)) = extremes(translates, |g| count_in(b, f, g))
        .ok_or_else(|| Error::domain("no admissible translate inside the carrier"))?;
    let n = f.len() as i64;
    Ok(DensityReport {
        lower: Rational::new(lo, n),
        upper: Rational::new(hi, n),
        advantage: None,
        lower_witness: translates.get(li).cloned().expect("witness"),
        upper_witness: translates.get(hi_i).cloned().expect("witness"),
        advantage_witness: None,
        translates: translates.len(),
        shape_size: f.len(),
        margin_size,
    })
}

fn check_disjoint_on(a: &dyn PointSet, b: &dyn PointSet, region: &FiniteSubset) -> Result<()> {
    if let Some(g) = region.iter().find(|g| a.contains_point(g) && b.contains_point(g)) {
        return Err(Error::usage(format!(
            "A and B overlap at {g}; split them before comparing"
        )));
    }
    Ok(())
}

/// `min_g (|B∩Fg| − |A∩Fg|)/|F|` over admissible translates, with witness.
pub fn advantage_window_report(
    b: &dyn PointSet,
    a: &dyn PointSet,
    f: &FiniteSubset,
    w: &Window,
) -> Result<(Rational, GroupElement)> {
    check_shape(f, w)?;
    check_disjoint_on(a, b, &w.carrier)?;
    advantage_over(b, a, f, &w.admissible(f))
}

pub fn advantage_window(
    b: &dyn PointSet,
    a: &dyn PointSet,
    f: &FiniteSubset,
    w: &Window,
) -> Result<Rational> {
    Ok(advantage_window_report(b, a, f, w)?.0)
}

fn advantage_over(
    b: &dyn PointSet,
    a: &dyn PointSet,
    f: &FiniteSubset,
    translates: &FiniteSubset,
) -> Result<(Rational, GroupElement)> {
    let ((lo, li), _) = extremes(translates, |g| count_in(b, f, g) - count_in(a, f, g))
        .ok_or_else(|| Error::domain("no admissible translate inside the carrier"))?;
    Ok((
        Rational::new(lo, f.len() as i64),
        translates.get(li).cloned().expect("witness"),
    ))
}

/// Greedy maximal `F`-separated subset of the window core, in canonical order.
pub fn maximal_separated(f: &FiniteSubset, w: &Window) -> Result<FiniteSubset> {
    maximal_separated_in(f, &w.core())
}

/// Greedy maximal `F`-separated subset of `candidates` (canonical order).
pub fn maximal_separated_in(f: &FiniteSubset, candidates: &FiniteSubset) -> Result<FiniteSubset> {
    let Some(fam) = f.family() else {
        return Err(Error::domain("separation shape is empty"));
    };
    if !f.contains(&GroupElement::identity(fam)) {
        return Err(Error::usage("separation shape must contain e"));
    }
    let mut occupied: FxHashSet<GroupElement> = FxHashSet::default();
    let mut chosen = Vec::new();
    for c in candidates {
        let tile: Vec<GroupElement> = f.iter().map(|x| x.mul(c)).collect();
        if tile.iter().all(|t| !occupied.contains(t)) {
            occupied.extend(tile);
            chosen.push(c.clone());
        }
    }
    Ok(FiniteSubset::from_canonical_unchecked(chosen))
}

/// Whether the translates `{Fc : c ∈ C}` are pairwise disjoint.
pub fn is_separated(c: &FiniteSubset, f: &FiniteSubset) -> bool {
    let mut seen: FxHashSet<GroupElement> = FxHashSet::default();
    c.iter().all(|x| f.iter().all(|s| seen.insert(s.mul(x))))
}

/// A point of `region` outside `KC`, witnessing that `C` is not `K`-syndetic there.
pub fn syndeticity_gap(c: &FiniteSubset, k: &FiniteSubset, region: &FiniteSubset) -> Option<GroupElement> {
    let k_inv: Vec<GroupElement> = k.iter().map(GroupElement::inv).collect();
    region
        .iter()
        .find(|g| !k_inv.iter().any(|ki| c.contains(&ki.mul(g))))
        .cloned()
}

/// Both sides of the density-advantage stability inequality on a finite window.
#[derive(Clone, Debug, PartialEq)]
pub struct BdcVerdict {
    /// Advantage over `F₁`-translates whose `F`-thickening `FF₁g` fits the carrier.
    pub lhs: Rational,
    /// Advantage over all admissible `F`-translates.
    pub rhs: Rational,
    pub eps: Rational,
    pub holds: bool,
}

/// Checks `D̲_{F₁}(B,A) ≥ D̲_F(B,A) − 4ε` when `F₁` is `(F,ε)`-invariant.
///
/// `F₁`-translates are restricted to those whose `F`-neighbourhood lies in the
/// carrier so that every `F`-translate used in the averaging is admissible.
pub fn check_bdc(
    b: &dyn PointSet,
    a: &dyn PointSet,
    f: &FiniteSubset,
    f1: &FiniteSubset,
    eps: Rational,
    w: &Window,
) -> Result<BdcVerdict> {
    if !is_invariant(f1, f, eps)? {
        return Err(Error::usage("F₁ is not (F,ε)-invariant"));
    }
    check_disjoint_on(a, b, &w.carrier)?;
    let rhs = advantage_over(b, a, f, &w.admissible(f))?.0;
    let thick = product_set(f, f1);
    let lhs = advantage_over(b, a, f1, &w.admissible(&thick))?.0;
    let holds = lhs >= rhs - eps * 4;
    Ok(BdcVerdict { lhs, rhs, eps, holds })
}

/// Defect term `|F \ F_{KK⁻¹}| / |F|` bounding the boundary loss when a union of
/// translated pieces with `⋃A_k ⊆ K` is counted inside `F`-translates.
pub fn piece_core_defect(f: &FiniteSubset, k: &FiniteSubset) -> Rational {
    let kk = product_set(k, &k.inverse());
    let core = k_core(f, &kk);
    Rational::new((f.len() - core.len()) as i64, f.len() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn spec_examples() {
        let carrier = FiniteSubset::interval(0, 99);
        let f = FiniteSubset::interval(0, 9);
        let w = Window::new(carrier.clone(), f.clone()).unwrap();
        let evens = carrier.filter(|g| g.coords().unwrap()[0] % 2 == 0);
        let r = density_window(&evens, &f, &w).unwrap();
        assert_eq!((r.lower, r.upper), (q(1, 2), q(1, 2)));
        let r = density_window(&FiniteSubset::empty(), &f, &w).unwrap();
        assert_eq!((r.lower, r.upper), (q(0, 1), q(0, 1)));

        let f8 = FiniteSubset::interval(0, 7);
        let w8 = Window::new(FiniteSubset::interval(0, 63), f8.clone()).unwrap();
        let a = PeriodicSet::new(vec![4], [vec![0]]).unwrap();
        let b = PeriodicSet::new(vec![4], [vec![1], vec![2]]).unwrap();
        assert_eq!(advantage_window(&b, &a, &f8, &w8).unwrap(), q(2, 8));
        assert_eq!(
            advantage_window(&b, &FiniteSubset::empty(), &f8, &w8).unwrap(),
            density_window(&b, &f8, &w8).unwrap().lower
        );
        // shifted copy: B = A + 1 restricted to [0,3] has deficits in some windows
        let a2 = FiniteSubset::new([0, 4, 8].map(GroupElement::z));
        let b2 = FiniteSubset::new([1].map(GroupElement::z));
        assert!(advantage_window(&b2, &a2, &f8, &w8).unwrap() < q(0, 1));
        assert!(advantage_window(&a, &a, &f8, &w8).is_err());

        let f5 = FiniteSubset::interval(0, 4);
        let w24 = Window::new(FiniteSubset::interval(0, 24), f5.clone()).unwrap();
        let c = maximal_separated(&f5, &w24).unwrap();
        assert_eq!(c, FiniteSubset::new([0, 5, 10, 15, 20].map(GroupElement::z)));
        let e = FiniteSubset::singleton(GroupElement::z(0));
        assert_eq!(maximal_separated(&e, &w24).unwrap(), w24.core());
    }

    #[test]
    fn maximal_separated_is_syndetic() {
        let f = FiniteSubset::zd_box(&[-1, 0], &[1, 2]);
        let w = Window::zd_box(&[0, 0], &[20, 17], f.clone()).unwrap();
        let c = maximal_separated(&f, &w).unwrap();
        assert!(is_separated(&c, &f));
        let k = product_set(&f.inverse(), &f);
        assert_eq!(syndeticity_gap(&c, &k, &w.core()), None);
    }

    #[test]
    fn bdc_periodic() {
        let f = FiniteSubset::interval(0, 9);
        let f1 = FiniteSubset::interval(0, 99);
        let w = Window::new(FiniteSubset::interval(0, 400), product_set(&f, &f1)).unwrap();
        let a = PeriodicSet::new(vec![7], [vec![0], vec![3]]).unwrap();
        let b = PeriodicSet::new(vec![5], [vec![1], vec![2], vec![4]]).unwrap();
        let bd = PeriodicSet::new(vec![35], (0..35).filter(|x| b.contains_point(&GroupElement::z(*x)) && !a.contains_point(&GroupElement::z(*x))).map(|x| vec![x])).unwrap();
        let v = check_bdc(&bd, &a, &f, &f1, q(1, 10), &w).unwrap();
        assert!(v.holds, "{v:?}");
        // |FF △ F| = 9 for F = [0,9]
        assert!(check_bdc(&bd, &a, &f, &f, q(9, 10), &w).is_err());
        assert!(check_bdc(&bd, &a, &f, &f, q(19, 20), &w).unwrap().holds);
    }
}
