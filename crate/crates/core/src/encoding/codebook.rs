use rustc_hash::FxHashSet;
use sha2::{Digest, Sha256};

use super::recognizable::{make_recognizable_family, RecognizableFamily};
use crate::density::Window;
use crate::error::{Error, Result};
use crate::group::{canonical_prefix, product_set, Family, FiniteSubset, GroupElement, GroupSpec, ball};
use crate::quasitiling::Quasitiling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolMode {
    /// Alphabet {−1, 0, 1}; zeros mark level-2 centers.
    Three,
    /// Alphabet {0, 1}; level-2 centers carry indicator sets of a recognizable family.
    Two,
}

impl SymbolMode {
    pub fn alphabet(self) -> Vec<i32> {
        match self {
            SymbolMode::Three => vec![-1, 0, 1],
            SymbolMode::Two => vec![0, 1],
        }
    }

    pub fn background(self) -> i32 {
        match self {
            SymbolMode::Three => 1,
            SymbolMode::Two => 0,
        }
    }
}

/// Coding data of one level `k ≥ 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelCode {
    pub level: usize,
    pub shapes: Vec<FiniteSubset>,
    /// Word length. At level 2 in two-symbol mode: the number of family sets.
    pub m: usize,
    /// Coding horizon `U_k`.
    pub u: FiniteSubset,
    /// Separation set `V_k ⊇ U_k`.
    pub v: FiniteSubset,
    /// `U` with every `Ug` meeting a level-(k−1) center (empty at level 2).
    pub syndetic: FiniteSubset,
    /// `Û = U·H` enumerated with `U` first, then canonically (empty at level 2).
    pub u_hat: Vec<GroupElement>,
}

impl LevelCode {
    /// Number of (u, S, s) keys.
    pub fn keys(&self) -> usize {
        2 * self.shapes.len() * self.syndetic.len().max(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeCodebook {
    pub mode: SymbolMode,
    pub family: Family,
    /// `levels[0]` is level 2.
    pub levels: Vec<LevelCode>,
    pub recognizable: Option<RecognizableFamily>,
}

/// Least `b` with `2ᵇ ≥ n`.
fn ceil_log2(n: usize) -> usize {
    (usize::BITS - n.saturating_sub(1).leading_zeros()) as usize
}

impl ShapeCodebook {
    /// Highest encoded level.
    pub fn top(&self) -> usize {
        self.levels.len() + 1
    }

    pub fn level(&self, k: usize) -> &LevelCode {
        &self.levels[k - 2]
    }

    pub fn key(&self, k: usize, u_idx: usize, shape: usize, primary: bool) -> usize {
        let r = self.level(k).shapes.len();
        2 * (u_idx * r + shape) + usize::from(!primary)
    }

    /// `(u index, shape, primary)` of a key.
    pub fn unkey(&self, k: usize, key: usize) -> (usize, usize, bool) {
        let r = self.level(k).shapes.len();
        (key / 2 / r, (key / 2) % r, key % 2 == 0)
    }

    /// Word number `3κ + (i+1)` in lexicographic order over {−1, 1}.
    /// Level 2 (three-symbol): the block on `U₂ \ {e}`; higher levels: a leading 0
    /// followed by `m − 1` signs.
    pub fn word(&self, k: usize, key: usize, i: i8) -> Vec<i8> {
        let lc = self.level(k);
        let n = 3 * key + (i + 1) as usize;
        let len = lc.m - 1;
        let signs = (0..len).map(|p| if (n >> (len - 1 - p)) & 1 == 1 { 1 } else { -1 });
        if k == 2 {
            signs.collect()
        } else {
            std::iter::once(0).chain(signs).collect()
        }
    }

    /// Inverse of [`Self::word`]: `(key, i)`.
    pub fn lookup(&self, k: usize, word: &[i8]) -> Option<(usize, i8)> {
        let lc = self.level(k);
        let signs = if k == 2 {
            word
        } else {
            match word.split_first() {
                Some((0, rest)) => rest,
                _ => return None,
            }
        };
        if signs.len() != lc.m - 1 {
            return None;
        }
        let mut n = 0usize;
        for &s in signs {
            n = 2 * n
                + match s {
                    1 => 1,
                    -1 => 0,
                    _ => return None,
                };
        }
        (n < 3 * lc.keys()).then(|| (n / 3, (n % 3) as i8 - 1))
    }

    /// Two-symbol marker set for a level-2 key and trit.
    pub fn marker_set(&self, key: usize, i: i8) -> Option<&FiniteSubset> {
        self.recognizable.as_ref().map(|f| &f.sets[3 * key + (i + 1) as usize])
    }

    pub fn to_text(&self) -> String {
        let mode = match self.mode {
            SymbolMode::Three => "three",
            SymbolMode::Two => "two",
        };
        let line = |s: &FiniteSubset| s.iter().map(|g| g.to_text()).collect::<Vec<_>>().join(" ");
        let mut s = format!("codebook mode={mode} levels={}\n", self.levels.len());
        for lc in &self.levels {
            s.push_str(&format!(
                "level {} m={} shapes={} |U|={} |V|={}\n",
                lc.level,
                lc.m,
                lc.shapes.len(),
                lc.u.len(),
                lc.v.len()
            ));
            for (i, sh) in lc.shapes.iter().enumerate() {
                s.push_str(&format!("  shape {i}: {}\n", line(sh)));
            }
            if lc.level > 2 {
                s.push_str(&format!("  syndetic: {}\n", line(&lc.syndetic)));
                let uh: Vec<String> = lc.u_hat.iter().map(GroupElement::to_text).collect();
                s.push_str(&format!("  uhat: {}\n", uh.join(" ")));
            }
            s.push_str(&format!("  U: {}\n", line(&lc.u)));
            s.push_str(&format!("  V: {}\n", line(&lc.v)));
            if lc.level > 2 || self.mode == SymbolMode::Three {
                for key in 0..lc.keys() {
                    let (u, sh, p) = self.unkey(lc.level, key);
                    for i in -1..=1i8 {
                        let w: Vec<String> = self.word(lc.level, key, i).iter().map(|x| x.to_string()).collect();
                        s.push_str(&format!(
                            "  word u={u} shape={sh} {} i={i}: {}\n",
                            if p { "p" } else { "n" },
                            w.join(" ")
                        ));
                    }
                }
            }
        }
        if let Some(f) = &self.recognizable {
            for (t, set) in f.sets.iter().enumerate() {
                s.push_str(&format!("marker {t}: {}\n", line(set)));
            }
        }
        s
    }

    /// Hex SHA-256 of [`Self::to_text`].
    pub fn digest(&self) -> String {
        Sha256::digest(self.to_text().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Smallest canonical prefix `U` such that every `g` with `Ug` inside the
/// union of `prev` sees a center of `prev` in `Ug`.
pub fn syndetic_set(prev: &Quasitiling) -> Result<FiniteSubset> {
    let centers: FxHashSet<GroupElement> = prev.tiles.iter().map(|t| t.center.clone()).collect();
    let cover = prev.union();
    let Some(fam) = cover.family() else {
        return Err(Error::Hypothesis("the previous level has no tiles".into()));
    };
    // Some(ok) when the region {g : Ug ⊆ cover} is nonempty
    let test = |n: usize| -> Result<Option<bool>> {
        let u = canonical_prefix(fam, n)?;
        let mut any = false;
        for g in &cover {
            if u.iter().all(|x| cover.contains(&x.mul(g))) {
                any = true;
                if !u.iter().any(|x| centers.contains(&x.mul(g))) {
                    return Ok(Some(false));
                }
            }
        }
        Ok(any.then_some(true))
    };
    let mut hi = 1;
    loop {
        match test(hi)? {
            Some(true) => break,
            Some(false) => hi *= 2,
            None => {
                return Err(Error::Hypothesis(format!(
                    "centers are not syndetic inside their own union: no prefix of size below {hi} works"
                )))
            }
        }
    }
    let mut lo = hi / 2; // fails (or zero)
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if test(mid)? == Some(true) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    canonical_prefix(fam, hi)
}

/// `H = {h₁ = e, h₂, …, h_m}` canonically greedy with the `Uhⱼ` pairwise disjoint.
fn disjoint_translates(fam: Family, u: &FiniteSubset, m: usize) -> Result<Vec<GroupElement>> {
    let spec = GroupSpec::standard(fam);
    let mut r = 0;
    loop {
        let mut used: FxHashSet<GroupElement> = FxHashSet::default();
        let mut h = Vec::new();
        for g in &ball(&spec, r)? {
            let t: Vec<GroupElement> = u.iter().map(|x| x.mul(g)).collect();
            if t.iter().all(|x| !used.contains(x)) {
                used.extend(t);
                h.push(g.clone());
                if h.len() == m {
                    return Ok(h);
                }
            }
        }
        r += 1;
    }
}

/// `V ⊇ U` with `|V| ≥ ratio·|U|`: `U` together with a canonical prefix.
fn separation_set(fam: Family, u: &FiniteSubset, ratio: usize) -> Result<FiniteSubset> {
    let target = ratio * u.len();
    let mut n = target.saturating_sub(u.len());
    loop {
        let v = u.union(&canonical_prefix(fam, n)?);
        if v.len() >= target {
            return Ok(v);
        }
        n += target - v.len();
    }
}

/// Codebook for levels `2..=levels.len()+1`; `levels[0]` is level 2.
///
/// Level 2 uses `m = ⌈log₂(3·2r)⌉ + 1` and `U₂` the first `m` elements
/// (three symbols), or the margin of a recognizable family of `3·2r` sets
/// `{e, hₜ}` extended by one element each (two symbols). Level `k+1` uses the
/// syndeticity set `U` of level `k`, `m = ⌈log₂(3·|U|·2r)⌉ + 1`,
/// `Û = U·H`, `U_{k+1} = U_k·Û·U` and `|V_{k+1}| ≥ k·|U_{k+1}|`.
pub fn build_codebook(levels: &[Quasitiling], window: &Window, mode: SymbolMode) -> Result<ShapeCodebook> {
    let Some(fam) = window.carrier.family() else {
        return Err(Error::usage("empty carrier"));
    };
    if levels.is_empty() {
        return Err(Error::usage("at least one level is required"));
    }
    if levels.iter().any(|q| q.shapes.is_empty()) {
        return Err(Error::usage("every level needs at least one shape"));
    }
    let r2 = levels[0].shapes.len();
    let (m2, u2, recognizable) = match mode {
        SymbolMode::Three => {
            let m = ceil_log2(6 * r2) + 1;
            (m, canonical_prefix(fam, m)?, None)
        }
        SymbolMode::Two => {
            let count = 6 * r2;
            let pre = canonical_prefix(fam, count + 1)?;
            let e = GroupElement::identity(fam);
            let base: Vec<FiniteSubset> = pre
                .iter()
                .skip(1)
                .map(|h| FiniteSubset::new([e.clone(), h.clone()]))
                .collect();
            let f = make_recognizable_family(&base)?;
            (count, f.margin.clone(), Some(f))
        }
    };
    let mut out = vec![LevelCode {
        level: 2,
        shapes: levels[0].shapes.clone(),
        m: m2,
        u: u2.clone(),
        v: u2,
        syndetic: FiniteSubset::empty(),
        u_hat: Vec::new(),
    }];
    for k in 3..=levels.len() + 1 {
        let q = &levels[k - 2];
        let syn = syndetic_set(&levels[k - 3])?;
        let r = q.shapes.len();
        let m = ceil_log2(3 * syn.len() * 2 * r) + 1;
        let h = disjoint_translates(fam, &syn, m)?;
        let hs = FiniteSubset::new(h);
        let u_hat_set = product_set(&syn, &hs);
        let u_hat: Vec<GroupElement> =
            syn.iter().chain(u_hat_set.iter().filter(|g| !syn.contains(g))).cloned().collect();
        let prev_u = &out.last().expect("level 2").u;
        let u = product_set(&product_set(prev_u, &u_hat_set), &syn);
        let v = separation_set(fam, &u, k - 1)?;
        out.push(LevelCode { level: k, shapes: q.shapes.clone(), m, u, v, syndetic: syn, u_hat });
    }
    Ok(ShapeCodebook { mode, family: fam, levels: out, recognizable })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aligned(len: i64, count: i64, offset: i64) -> Quasitiling {
        let centers = FiniteSubset::new((0..count).map(|k| GroupElement::z(offset + k * len)));
        Quasitiling::from_centers(vec![FiniteSubset::interval(0, len - 1)], vec![centers]).unwrap()
    }

    #[test]
    fn words_and_lookup() {
        let w = Window::new(FiniteSubset::interval(0, 999), FiniteSubset::interval(0, 0)).unwrap();
        let book = build_codebook(&[aligned(5, 200, 0)], &w, SymbolMode::Three).unwrap();
        let lc = book.level(2);
        assert_eq!(lc.m, 4);
        assert_eq!(lc.u, FiniteSubset::interval(-1, 2));
        let mut seen = FxHashSet::default();
        for key in 0..lc.keys() {
            for i in -1..=1 {
                let w = book.word(2, key, i);
                assert_eq!(w.len(), 3);
                assert!(w.iter().all(|&x| x == 1 || x == -1));
                assert_eq!(book.lookup(2, &w), Some((key, i)));
                assert!(seen.insert(w));
            }
        }
        // 2^(m-1) > 6r: the all-ones block is never used
        assert_eq!(book.lookup(2, &[1, 1, 1]), None);
    }

    #[test]
    fn two_levels() {
        let w = Window::new(FiniteSubset::interval(0, 999), FiniteSubset::interval(0, 0)).unwrap();
        let book = build_codebook(&[aligned(5, 200, 0), aligned(125, 8, 0)], &w, SymbolMode::Three).unwrap();
        let lc = book.level(3);
        assert_eq!(lc.syndetic, FiniteSubset::interval(-2, 2));
        assert_eq!(lc.m, 6);
        assert_eq!(lc.u_hat.len(), 30);
        assert_eq!(&lc.u_hat[..5], lc.syndetic.to_vec().as_slice());
        assert_eq!(lc.u, FiniteSubset::interval(-15, 21));
        assert!(lc.v.len() >= 2 * lc.u.len() && lc.u.is_subset(&lc.v));
        for key in 0..lc.keys() {
            for i in -1..=1 {
                let w = book.word(3, key, i);
                assert_eq!(w.iter().filter(|&&x| x == 0).count(), 1);
                assert_eq!(w[0], 0);
                assert_eq!(book.lookup(3, &w), Some((key, i)));
            }
        }
        let again = build_codebook(&[aligned(5, 200, 0), aligned(125, 8, 0)], &w, SymbolMode::Three).unwrap();
        assert_eq!(book.digest(), again.digest());
    }

    #[test]
    fn two_symbol_level() {
        let w = Window::new(FiniteSubset::interval(0, 999), FiniteSubset::interval(0, 0)).unwrap();
        let book = build_codebook(&[aligned(100, 10, 0)], &w, SymbolMode::Two).unwrap();
        let f = book.recognizable.as_ref().unwrap();
        assert_eq!(f.len(), 6);
        assert_eq!(book.level(2).u, f.margin);
        assert!(f.sets.iter().all(|s| s.len() == 3 && s.contains(&GroupElement::z(0))));
    }
}
