//! Window-indexed symbol arrays and finite-horizon block codes.

use rustc_hash::FxHashMap;

use crate::density::{zd_bounds, Window};
use crate::error::{Error, Result};
use crate::group::{Family, FiniteSubset, GroupElement};

/// Symbols on every cell of a window carrier, stored in carrier order.
#[derive(Clone, Debug)]
pub struct SymbolicArray {
    pub window: Window,
    pub alphabet: Vec<i32>,
    cells: Vec<i32>,
}

impl PartialEq for SymbolicArray {
    fn eq(&self, other: &Self) -> bool {
        self.window.carrier == other.window.carrier
            && self.alphabet == other.alphabet
            && self.cells == other.cells
    }
}

impl SymbolicArray {
    pub fn new(window: Window, alphabet: Vec<i32>, fill: i32) -> Result<Self> {
        if alphabet.len() < 2 {
            return Err(Error::usage("an alphabet needs at least two symbols"));
        }
        if !alphabet.contains(&fill) {
            return Err(Error::usage(format!("fill symbol {fill} is not in the alphabet")));
        }
        let cells = vec![fill; window.carrier.len()];
        Ok(SymbolicArray { window, alphabet, cells })
    }

    pub fn from_fn(
        window: Window,
        alphabet: Vec<i32>,
        f: impl Fn(&GroupElement) -> i32,
    ) -> Result<Self> {
        let fill = *alphabet.first().ok_or_else(|| Error::usage("empty alphabet"))?;
        let mut a = SymbolicArray::new(window, alphabet, fill)?;
        let cells: Vec<i32> = a.window.carrier.iter().map(&f).collect();
        if let Some(s) = cells.iter().find(|s| !a.alphabet.contains(s)) {
            return Err(Error::usage(format!("symbol {s} is not in the alphabet")));
        }
        a.cells = cells;
        Ok(a)
    }

    /// The array `y^{AB}`: 1 on `A`, 2 on `B`, 0 elsewhere.
    pub fn from_sets(window: Window, a: &FiniteSubset, b: &FiniteSubset) -> Result<Self> {
        if !a.is_disjoint(b) {
            return Err(Error::usage("A and B must be disjoint"));
        }
        SymbolicArray::from_fn(window, vec![0, 1, 2], |g| {
            if a.contains(g) {
                1
            } else if b.contains(g) {
                2
            } else {
                0
            }
        })
    }

    pub fn cells(&self) -> &[i32] {
        &self.cells
    }

    pub fn get(&self, g: &GroupElement) -> Option<i32> {
        self.window.carrier.index_of(g).map(|i| self.cells[i])
    }

    pub fn set(&mut self, g: &GroupElement, s: i32) -> Result<()> {
        if !self.alphabet.contains(&s) {
            return Err(Error::usage(format!("symbol {s} is not in the alphabet")));
        }
        let i = self
            .window
            .carrier
            .index_of(g)
            .ok_or_else(|| Error::usage(format!("{g} is outside the carrier")))?;
        self.cells[i] = s;
        Ok(())
    }

    /// Cells carrying `s`, in canonical order.
    pub fn positions(&self, s: i32) -> FiniteSubset {
        FiniteSubset::from_canonical_unchecked(
            self.window
                .carrier
                .iter()
                .zip(&self.cells)
                .filter(|(_, &c)| c == s)
                .map(|(g, _)| g.clone())
                .collect(),
        )
    }

    /// The pattern `f ↦ y(fg)` over `F` (in `F`'s order), if `Fg` lies in the carrier.
    pub fn pattern(&self, f: &FiniteSubset, g: &GroupElement) -> Option<Vec<i32>> {
        f.iter().map(|x| self.get(&x.mul(g))).collect()
    }

    /// Dense grid for ℤ and ℤ² box carriers (rows by the second coordinate,
    /// ascending), sparse `element symbol` lines otherwise.
    pub fn to_text(&self) -> String {
        let mut s = format!("alphabet {}\n", join(&self.alphabet));
        let dense = matches!(self.window.carrier.family(), Some(Family::FreeAbelian(1 | 2)))
            && self.alphabet.iter().all(|&a| (-1..=9).contains(&a));
        match zd_bounds(&self.window.carrier) {
            Some((lo, hi)) if dense && box_len(&lo, &hi) == self.cells.len() => {
                s.push_str(&format!("grid {} {}\n", join(&lo), join(&hi)));
                let (ylo, yhi) = if lo.len() == 2 { (lo[1], hi[1]) } else { (0, 0) };
                for y in ylo..=yhi {
                    let row: String = (lo[0]..=hi[0])
                        .map(|x| {
                            let g = if lo.len() == 2 {
                                GroupElement::zd(&[x, y])
                            } else {
                                GroupElement::z(x)
                            };
                            symbol_char(self.get(&g).expect("box cell"))
                        })
                        .collect();
                    s.push_str(&row);
                    s.push('\n');
                }
            }
            _ => {
                s.push_str("sparse\n");
                for (g, c) in self.window.carrier.iter().zip(&self.cells) {
                    s.push_str(&format!("{} {c}\n", g.to_text()));
                }
            }
        }
        s
    }
}

fn join(v: &[impl ToString]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn box_len(lo: &[i64], hi: &[i64]) -> usize {
    lo.iter().zip(hi).map(|(l, h)| (h - l + 1) as usize).product()
}

fn symbol_char(s: i32) -> char {
    if s < 0 {
        '-'
    } else {
        char::from_digit(s as u32, 10).expect("single digit")
    }
}

/// A local rule: the output at `g` is `rule[pattern over F·g]`.
#[derive(Clone, Debug)]
pub struct BlockCode {
    pub horizon: FiniteSubset,
    pub rule: FxHashMap<Vec<i32>, i32>,
}

/// Two cells with the same horizon pattern but different outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleConflict<T> {
    pub pattern: Vec<i32>,
    pub first: (GroupElement, T),
    pub second: (GroupElement, T),
}

impl BlockCode {
    pub fn new(horizon: FiniteSubset) -> Result<Self> {
        let Some(fam) = horizon.family() else {
            return Err(Error::usage("block code horizon is empty"));
        };
        if !horizon.contains(&GroupElement::identity(fam)) {
            return Err(Error::usage("block code horizon must contain e"));
        }
        Ok(BlockCode { horizon, rule: FxHashMap::default() })
    }

    /// Learns the rule from observed outputs, failing on the first conflict.
    pub fn learn<'a>(
        horizon: FiniteSubset,
        array: &SymbolicArray,
        outputs: impl IntoIterator<Item = (&'a GroupElement, i32)>,
    ) -> Result<std::result::Result<Self, RuleConflict<i32>>> {
        let mut code = BlockCode::new(horizon)?;
        let mut seen: FxHashMap<Vec<i32>, (GroupElement, i32)> = FxHashMap::default();
        for (g, out) in outputs {
            let Some(p) = array.pattern(&code.horizon, g) else { continue };
            match seen.get(&p) {
                Some((h, o)) if *o != out => {
                    return Ok(Err(RuleConflict {
                        pattern: p,
                        first: (h.clone(), *o),
                        second: (g.clone(), out),
                    }));
                }
                Some(_) => {}
                None => {
                    code.rule.insert(p.clone(), out);
                    seen.insert(p, (g.clone(), out));
                }
            }
        }
        Ok(Ok(code))
    }

    /// Output at `g`, `None` when `F·g` leaves the carrier or the pattern is unknown.
    pub fn apply(&self, array: &SymbolicArray, g: &GroupElement) -> Option<i32> {
        array.pattern(&self.horizon, g).and_then(|p| self.rule.get(&p).copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: i64) -> Window {
        Window::new(FiniteSubset::interval(0, n), FiniteSubset::interval(0, 1)).unwrap()
    }

    #[test]
    fn y_ab_and_text() {
        let a = FiniteSubset::new([GroupElement::z(1)]);
        let b = FiniteSubset::new([GroupElement::z(2), GroupElement::z(3)]);
        let y = SymbolicArray::from_sets(line(4), &a, &b).unwrap();
        assert_eq!(y.to_text(), "alphabet 0,1,2\ngrid 0 4\n01220\n");
        assert_eq!(y.positions(2), b);
        let f = FiniteSubset::interval(0, 1);
        assert_eq!(y.pattern(&f, &GroupElement::z(1)), Some(vec![1, 2]));
        assert_eq!(y.pattern(&f, &GroupElement::z(4)), None);
    }

    #[test]
    fn learning_detects_conflicts() {
        let y = SymbolicArray::from_fn(line(9), vec![0, 1], |g| (g.coords().unwrap()[0] % 2) as i32)
            .unwrap();
        let f = FiniteSubset::interval(0, 1);
        let pts = y.window.carrier.to_vec();
        let ok = BlockCode::learn(f.clone(), &y, pts.iter().map(|g| (g, y.get(g).unwrap()))).unwrap();
        assert!(ok.is_ok());
        let bad = BlockCode::learn(
            f,
            &y,
            pts.iter().map(|g| (g, (g.coords().unwrap()[0] < 4) as i32)),
        )
        .unwrap();
        assert!(bad.is_err());
    }
}
