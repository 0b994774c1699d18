use crate::error::{Error, Result};
use crate::group::{FiniteSubset, GroupElement};

/// A finite carrier plus the shape whose translates inside it are trusted.
#[derive(Clone, Debug)]
pub struct Window {
    pub carrier: FiniteSubset,
    pub margin_shape: FiniteSubset,
    bbox: Option<(Vec<i64>, Vec<i64>)>,
}

impl Window {
    pub fn new(carrier: FiniteSubset, margin_shape: FiniteSubset) -> Result<Self> {
        if margin_shape.is_empty() {
            return Err(Error::domain("window margin shape is empty"));
        }
        let bbox = full_box(&carrier);
        let w = Window { carrier, margin_shape, bbox };
        if w.core().is_empty() {
            return Err(Error::Margin(format!(
                "window core is empty: no translate of the {}-element margin shape fits the {}-element carrier",
                w.margin_shape.len(),
                w.carrier.len()
            )));
        }
        Ok(w)
    }

    /// ℤᵈ box window `∏[lo_i, hi_i]`.
    pub fn zd_box(lo: &[i64], hi: &[i64], margin_shape: FiniteSubset) -> Result<Self> {
        Window::new(FiniteSubset::zd_box(lo, hi), margin_shape)
    }

    /// Same carrier, different margin shape.
    pub fn with_margin(&self, margin_shape: FiniteSubset) -> Result<Self> {
        Window::new(self.carrier.clone(), margin_shape)
    }

    /// Usable core `{g : margin_shape·g ⊆ carrier}`.
    pub fn core(&self) -> FiniteSubset {
        self.admissible(&self.margin_shape)
    }

    /// All `g` with `F·g ⊆ carrier`, in canonical order.
    pub fn admissible(&self, f: &FiniteSubset) -> FiniteSubset {
        let Some(f0) = f.first() else {
            return FiniteSubset::empty();
        };
        if let (Some((clo, chi)), Some((flo, fhi))) = (&self.bbox, zd_bounds(f)) {
            if clo.len() == flo.len() {
                let lo: Vec<i64> = (0..clo.len()).map(|i| clo[i] - flo[i]).collect();
                let hi: Vec<i64> = (0..clo.len()).map(|i| chi[i] - fhi[i]).collect();
                return FiniteSubset::zd_box(&lo, &hi);
            }
        }
        let f0_inv = f0.inv();
        let cands: Vec<GroupElement> = self.carrier.iter().map(|c| f0_inv.mul(c)).collect();
        FiniteSubset::new(
            cands
                .into_iter()
                .filter(|g| f.iter().all(|x| self.carrier.contains(&x.mul(g)))),
        )
    }

    /// Bounds of the carrier when it is a full ℤᵈ box.
    pub fn carrier_box(&self) -> Option<(&[i64], &[i64])> {
        self.bbox.as_ref().map(|(l, h)| (l.as_slice(), h.as_slice()))
    }

    pub fn fits(&self, f: &FiniteSubset, g: &GroupElement) -> bool {
        f.iter().all(|x| self.carrier.contains(&x.mul(g)))
    }
}

/// Per-coordinate bounds of a ℤᵈ set.
pub fn zd_bounds(s: &FiniteSubset) -> Option<(Vec<i64>, Vec<i64>)> {
    let first = s.first()?.coords()?;
    let mut lo = first.to_vec();
    let mut hi = first.to_vec();
    for g in s.iter() {
        let c = g.coords()?;
        for i in 0..c.len() {
            lo[i] = lo[i].min(c[i]);
            hi[i] = hi[i].max(c[i]);
        }
    }
    Some((lo, hi))
}

fn full_box(s: &FiniteSubset) -> Option<(Vec<i64>, Vec<i64>)> {
    let (lo, hi) = zd_bounds(s)?;
    let vol: i128 = (0..lo.len()).map(|i| (hi[i] - lo[i] + 1) as i128).product();
    (vol == s.len() as i128).then_some((lo, hi))
}
