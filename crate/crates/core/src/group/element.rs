use std::fmt;

use crate::error::{Error, Result};

/// Largest supported rank of a free abelian group.
pub const MAX_DIM: usize = 4;

/// The three shipped group families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// ℤᵈ with 1 ≤ d ≤ [`MAX_DIM`].
    FreeAbelian(u8),
    /// Discrete Heisenberg group, (x,y,z)(x′,y′,z′) = (x+x′, y+y′, z+z′+xy′).
    Heisenberg,
    /// ℤ/2 ≀ ℤ: a lamp configuration with finite support and a cursor.
    Lamplighter,
}

/// An element in normal form. Equality of elements is equality of normal forms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum GroupElement {
    Zd { d: u8, v: [i64; MAX_DIM] },
    Heis([i64; 3]),
    /// `lamps` is sorted ascending and duplicate free.
    Lamp { pos: i64, lamps: Box<[i64]> },
}

impl GroupElement {
    pub fn identity(family: Family) -> Self {
        match family {
            Family::FreeAbelian(d) => GroupElement::Zd { d, v: [0; MAX_DIM] },
            Family::Heisenberg => GroupElement::Heis([0; 3]),
            Family::Lamplighter => GroupElement::Lamp { pos: 0, lamps: Box::new([]) },
        }
    }

    /// Element of ℤᵈ from its coordinates.
    pub fn zd(coords: &[i64]) -> Self {
        assert!(
            !coords.is_empty() && coords.len() <= MAX_DIM,
            "ℤᵈ needs 1 ≤ d ≤ {MAX_DIM}"
        );
        let mut v = [0; MAX_DIM];
        v[..coords.len()].copy_from_slice(coords);
        GroupElement::Zd { d: coords.len() as u8, v }
    }

    /// Shorthand for an element of ℤ.
    pub fn z(n: i64) -> Self {
        GroupElement::zd(&[n])
    }

    pub fn heis(x: i64, y: i64, z: i64) -> Self {
        GroupElement::Heis([x, y, z])
    }

    /// Lamplighter element; `lamps` may be unsorted and lamps listed twice cancel.
    pub fn lamp(pos: i64, lamps: &[i64]) -> Self {
        let mut l: Vec<i64> = Vec::with_capacity(lamps.len());
        let mut sorted = lamps.to_vec();
        sorted.sort_unstable();
        for x in sorted {
            if l.last() == Some(&x) {
                l.pop();
            } else {
                l.push(x);
            }
        }
        GroupElement::Lamp { pos, lamps: l.into_boxed_slice() }
    }

    pub fn family(&self) -> Family {
        match self {
            GroupElement::Zd { d, .. } => Family::FreeAbelian(*d),
            GroupElement::Heis(_) => Family::Heisenberg,
            GroupElement::Lamp { .. } => Family::Lamplighter,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Zd { v, .. } => v.iter().all(|&x| x == 0),
            GroupElement::Heis(h) => h == &[0, 0, 0],
            GroupElement::Lamp { pos, lamps } => *pos == 0 && lamps.is_empty(),
        }
    }

    /// Coordinates of a ℤᵈ element.
    pub fn coords(&self) -> Option<&[i64]> {
        match self {
            GroupElement::Zd { d, v } => Some(&v[..*d as usize]),
            _ => None,
        }
    }

    /// Product `self · other`, or a usage error when the families differ.
    pub fn try_mul(&self, other: &GroupElement) -> Result<GroupElement> {
        match (self, other) {
            (GroupElement::Zd { d, v }, GroupElement::Zd { d: d2, v: w }) if d == d2 => {
                let mut out = [0; MAX_DIM];
                for i in 0..*d as usize {
                    out[i] = v[i] + w[i];
                }
                Ok(GroupElement::Zd { d: *d, v: out })
            }
            (GroupElement::Heis([x, y, z]), GroupElement::Heis([a, b, c])) => {
                Ok(GroupElement::Heis([x + a, y + b, z + c + x * b]))
            }
            (GroupElement::Lamp { pos, lamps }, GroupElement::Lamp { pos: p2, lamps: l2 }) => {
                let shifted: Vec<i64> = l2.iter().map(|l| l + pos).collect();
                Ok(GroupElement::Lamp {
                    pos: pos + p2,
                    lamps: sym_diff_sorted(lamps, &shifted).into_boxed_slice(),
                })
            }
            _ => Err(Error::usage(format!(
                "cannot multiply elements of {:?} and {:?}",
                self.family(),
                other.family()
            ))),
        }
    }

    /// Product `self · other`. Panics on mixed families; use [`Self::try_mul`] at API edges.
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        self.try_mul(other).expect("mixed group families")
    }

    pub fn inv(&self) -> GroupElement {
        match self {
            GroupElement::Zd { d, v } => {
                let mut out = [0; MAX_DIM];
                for i in 0..*d as usize {
                    out[i] = -v[i];
                }
                GroupElement::Zd { d: *d, v: out }
            }
            GroupElement::Heis([x, y, z]) => GroupElement::Heis([-x, -y, x * y - z]),
            GroupElement::Lamp { pos, lamps } => GroupElement::Lamp {
                pos: -pos,
                lamps: lamps.iter().map(|l| l - pos).collect(),
            },
        }
    }

    /// Normal form text: `1,-2` for ℤᵈ and Heisenberg, `cursor|l1,l2` for lamplighter.
    pub fn to_text(&self) -> String {
        let join = |xs: &[i64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            GroupElement::Zd { d, v } => join(&v[..*d as usize]),
            GroupElement::Heis(h) => join(h),
            GroupElement::Lamp { pos, lamps } => format!("{pos}|{}", join(lamps)),
        }
    }

    pub fn parse(family: Family, text: &str) -> Result<GroupElement> {
        let ints = |s: &str| -> Result<Vec<i64>> {
            if s.trim().is_empty() {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<i64>()
                        .map_err(|e| Error::Parse(format!("`{t}` in `{text}`: {e}")))
                })
                .collect()
        };
        match family {
            Family::FreeAbelian(d) => {
                let v = ints(text)?;
                if v.len() != d as usize {
                    return Err(Error::Parse(format!("expected {d} coordinates in `{text}`")));
                }
                Ok(GroupElement::zd(&v))
            }
            Family::Heisenberg => {
                let v = ints(text)?;
                if v.len() != 3 {
                    return Err(Error::Parse(format!("expected x,y,z in `{text}`")));
                }
                Ok(GroupElement::heis(v[0], v[1], v[2]))
            }
            Family::Lamplighter => {
                let (p, l) = text
                    .split_once('|')
                    .ok_or_else(|| Error::Parse(format!("expected cursor|lamps in `{text}`")))?;
                let pos = p
                    .trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("cursor `{p}`: {e}")))?;
                Ok(GroupElement::lamp(pos, &ints(l)?))
            }
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_text())
    }
}

fn sym_diff_sorted(a: &[i64], b: &[i64]) -> Vec<i64> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_matches_unitriangular_matrices() {
        // (x,y,z) ↦ [[1,x,z],[0,1,y],[0,0,1]]
        let m = |g: &GroupElement| match g {
            GroupElement::Heis([x, y, z]) => [[1, *x, *z], [0, 1, *y], [0, 0, 1]],
            _ => unreachable!(),
        };
        let mat_mul = |a: [[i64; 3]; 3], b: [[i64; 3]; 3]| {
            let mut c = [[0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        c[i][j] += a[i][k] * b[k][j];
                    }
                }
            }
            c
        };
        let samples = [(1, 0, 0), (0, 1, 0), (2, -3, 5), (-1, 4, -2), (3, 3, 3)];
        for &(a, b, c) in &samples {
            for &(x, y, z) in &samples {
                let g = GroupElement::heis(a, b, c);
                let h = GroupElement::heis(x, y, z);
                assert_eq!(m(&g.mul(&h)), mat_mul(m(&g), m(&h)));
            }
        }
        assert_eq!(
            GroupElement::heis(1, 0, 0).mul(&GroupElement::heis(0, 1, 0)),
            GroupElement::heis(1, 1, 1)
        );
    }

    #[test]
    fn lamplighter_inverse_and_text() {
        let g = GroupElement::lamp(3, &[0, 2, 2, 5]);
        assert_eq!(g, GroupElement::lamp(3, &[0, 5]));
        assert!(g.mul(&g.inv()).is_identity());
        assert!(g.inv().mul(&g).is_identity());
        assert_eq!(g.to_text(), "3|0,5");
        assert_eq!(GroupElement::parse(Family::Lamplighter, "3|0,5").unwrap(), g);
        assert_eq!(GroupElement::parse(Family::Lamplighter, "-1|").unwrap(), GroupElement::lamp(-1, &[]));
    }

    #[test]
    fn mixed_families_are_rejected() {
        let e = GroupElement::z(1).try_mul(&GroupElement::heis(0, 0, 0));
        assert!(matches!(e, Err(Error::Usage(_))));
        let e = GroupElement::z(1).try_mul(&GroupElement::zd(&[0, 0]));
        assert!(matches!(e, Err(Error::Usage(_))));
    }
}
