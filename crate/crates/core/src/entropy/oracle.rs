use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::tiled::{member_rectangles, upper_rectangles, Rectangle};
use super::LayeredArray;
use crate::error::{Error, Result};
use crate::group::FiniteSubset;
use crate::quasitiling::TilingSystemWindow;
use crate::Rational;

/// Largest binary exponent evaluated exactly.
const MAX_EXPONENT_BITS: u128 = 1 << 24;

/// Positive integer budgets for the rectangles of one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Oracle {
    pub level: usize,
    values: BTreeMap<Rectangle, BigUint>,
}

impl Oracle {
    pub fn new(values: BTreeMap<Rectangle, BigUint>) -> Result<Self> {
        let Some(first) = values.keys().next() else {
            return Err(Error::usage("an oracle needs at least one rectangle"));
        };
        let level = first.level;
        if let Some(r) = values.keys().find(|r| r.level != level) {
            return Err(Error::usage(format!("oracle mixes levels {level} and {}", r.level)));
        }
        if let Some(r) = values.iter().find(|(_, v)| v.is_zero()).map(|(r, _)| r) {
            return Err(Error::domain(format!("oracle value of {} is zero", r.to_text())));
        }
        Ok(Oracle { level, values })
    }

    /// The same value on every listed rectangle.
    pub fn constant<'a>(rects: impl IntoIterator<Item = &'a Rectangle>, value: u64) -> Result<Self> {
        Oracle::new(rects.into_iter().map(|r| (r.clone(), BigUint::from(value))).collect())
    }

    pub fn get(&self, r: &Rectangle) -> Option<&BigUint> {
        self.values.get(r)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rectangle, &BigUint)> {
        self.values.iter()
    }

    /// `digest value` lines in rectangle order.
    pub fn to_text(&self) -> String {
        let mut s = format!("oracle level {} rectangles {}\n", self.level, self.values.len());
        for (r, v) in &self.values {
            s.push_str(&format!("{} {v}\n", r.digest()));
        }
        s
    }
}

/// `⌈2^t⌉` for rational `t ≥ 0`, exactly.
pub fn pow2_ceil(t: Rational) -> Result<BigUint> {
    if t < Rational::from_integer(0) {
        return Err(Error::domain(format!("exponent {t} is negative")));
    }
    pow2_ceil_parts(*t.numer() as u128, *t.denom() as u128)
}

fn pow2_ceil_parts(p: u128, q: u128) -> Result<BigUint> {
    let g = p.gcd(&q);
    let (p, q) = (p / g, q / g);
    if p > MAX_EXPONENT_BITS || q > u32::MAX as u128 {
        return Err(Error::Resource(format!("2^({p}/{q}) is beyond the exact evaluation range")));
    }
    let y = BigUint::one() << (p as usize);
    if q == 1 {
        return Ok(y);
    }
    let r = y.nth_root(q as u32);
    Ok(if r.pow(q as u32) == y { r } else { r + 1u32 })
}

/// `O(R) = ⌈2^{|R|·g(R)}⌉` for every listed rectangle.
pub fn build_oracle<'a>(
    rects: impl IntoIterator<Item = &'a Rectangle>,
    g: impl Fn(&Rectangle) -> Rational,
) -> Result<Oracle> {
    let mut values = BTreeMap::new();
    for r in rects {
        let v = g(r);
        if v < Rational::from_integer(0) {
            return Err(Error::domain(format!("g = {v} is negative on {}", r.to_text())));
        }
        let p = *v.numer() as u128 * r.size as u128;
        values.insert(r.clone(), pow2_ceil_parts(p, *v.denom() as u128)?);
    }
    Oracle::new(values)
}

fn log2_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 64 {
        return (n.to_u64().expect("fits").max(1) as f64).log2();
    }
    let top = (n >> (bits - 64)).to_u64().expect("fits") as f64;
    top.log2() + (bits - 64) as f64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleWitness {
    /// The first `k` layers of the level-`(k+1)` rectangles.
    pub concatenation: Rectangle,
    pub components: Vec<Rectangle>,
    pub extensions: Vec<Rectangle>,
    pub sum: BigUint,
    pub product: BigUint,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleCheck {
    pub level: usize,
    pub concatenations: usize,
    pub holds: bool,
    /// `max log₂(Σ O(R′) / ∏ O(R⁽ⁱ⁾))` over the observed concatenations.
    pub worst_log2_ratio: f64,
    pub witness: Option<OracleWitness>,
}

impl OracleCheck {
    pub fn worst_ratio(&self) -> f64 {
        self.worst_log2_ratio.exp2()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "oracle_condition level {} concatenations {} holds {} worst_log2_ratio {:.12}\n",
            self.level, self.concatenations, self.holds, self.worst_log2_ratio
        );
        if let Some(w) = &self.witness {
            s.push_str(&format!("witness {}\n", w.concatenation.to_text()));
            s.push_str(&format!("sum {} product {}\n", w.sum, w.product));
            for r in &w.extensions {
                s.push_str(&format!("extension {}\n", r.to_text()));
            }
        }
        s
    }
}

/// Exact check of `Σ O(R′) ≤ ∏ O(R⁽ⁱ⁾)` for every concatenation of `k`-rectangles
/// observed as the first `k` layers of a level-`(k+1)` rectangle of `x`.
pub fn check_oracle_condition(
    lower: &Oracle,
    upper: &Oracle,
    x: &LayeredArray,
    sys: &TilingSystemWindow,
) -> Result<OracleCheck> {
    let k = lower.level;
    if upper.level != k + 1 {
        return Err(Error::usage(format!("oracle levels {k} and {} are not consecutive", upper.level)));
    }
    if x.layer_count() < k + 1 {
        return Err(Error::usage(format!("level {} rectangles need {} layers", k + 1, k + 1)));
    }
    let mut groups: BTreeMap<Rectangle, (BTreeSet<Rectangle>, Vec<Rectangle>)> = BTreeMap::new();
    for o in upper_rectangles(x, sys, k)? {
        let key = o.rect.project(k);
        if !groups.contains_key(&key) {
            let comps = member_rectangles(x, sys, k, o.tile, k)?;
            groups.insert(key.clone(), (BTreeSet::new(), comps));
        }
        groups.get_mut(&key).expect("inserted").0.insert(o.rect);
    }
    let lookup = |o: &Oracle, r: &Rectangle| {
        o.get(r).cloned().ok_or_else(|| Error::usage(format!("the oracle has no value for {}", r.to_text())))
    };
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for (key, (exts, comps)) in &groups {
        let mut sum = BigUint::zero();
        for r in exts {
            sum += lookup(upper, r)?;
        }
        let mut product = BigUint::one();
        for r in comps {
            product *= lookup(lower, r)?;
        }
        worst = worst.max(log2_big(&sum) - log2_big(&product));
        if sum > product && witness.is_none() {
            witness = Some(OracleWitness {
                concatenation: key.clone(),
                components: comps.clone(),
                extensions: exts.iter().cloned().collect(),
                sum,
                product,
            });
        }
    }
    if groups.is_empty() {
        return Err(Error::Margin(format!("no level-{} rectangle lies in the region", k + 1)));
    }
    Ok(OracleCheck { level: k, concatenations: groups.len(), holds: witness.is_none(), worst_log2_ratio: worst, witness })
}

/// The block family `F_S(R)`: indices `start..start+count` of `Λ^S` in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CarvedFamily {
    pub rect: Rectangle,
    pub start: BigUint,
    pub count: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphabetPlan {
    /// Least `l` with `l^{|S|} ≥ Σ_{R∈ℛ_S} O(R)` for every shape.
    pub l: BigUint,
    /// `Σ_{R∈ℛ_S} O(R)` per shape index.
    pub sums: Vec<BigUint>,
    pub families: Vec<CarvedFamily>,
}

impl AlphabetPlan {
    /// The patterns of family `i`, as base-`l` digit strings of length `|S|`.
    pub fn patterns(&self, i: usize, cap: usize) -> Result<Vec<Vec<u64>>> {
        let fam = self.families.get(i).ok_or_else(|| Error::usage(format!("no family {i}")))?;
        let count = fam.count.to_usize().filter(|&c| c <= cap).ok_or_else(|| {
            Error::Resource(format!("family {i} has {} patterns, more than the cap {cap}", fam.count))
        })?;
        let l = self.l.to_u64().ok_or_else(|| Error::Resource("alphabet too large to list".into()))?;
        let mut out = Vec::with_capacity(count);
        let mut idx = fam.start.clone();
        for _ in 0..count {
            let mut digits = vec![0u64; fam.rect.size];
            let mut v = idx.clone();
            for d in digits.iter_mut().rev() {
                let (q, r) = v.div_rem(&BigUint::from(l));
                *d = r.to_u64().expect("digit");
                v = q;
            }
            out.push(digits);
            idx += 1u32;
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("alphabet {}\n", self.l);
        for (i, sum) in self.sums.iter().enumerate() {
            s.push_str(&format!("shape {i} budget {sum}\n"));
        }
        for f in &self.families {
            s.push_str(&format!("family {} start {} count {}\n", f.rect.digest(), f.start, f.count));
        }
        s
    }
}

fn root_ceil(n: &BigUint, k: u32) -> BigUint {
    let r = n.nth_root(k);
    if &r.pow(k) < n {
        r + 1u32
    } else {
        r
    }
}

/// Alphabet size for the first-level blocks and the disjoint carving of each
/// `Λ^S` into families of `O(R)` patterns.
pub fn min_alphabet(shapes: &[FiniteSubset], o: &Oracle) -> Result<AlphabetPlan> {
    let mut sums = vec![BigUint::zero(); shapes.len()];
    for (r, v) in o.iter() {
        let shape = shapes
            .get(r.shape)
            .ok_or_else(|| Error::usage(format!("rectangle shape {} is not among the {} shapes", r.shape, shapes.len())))?;
        if shape.len() != r.size {
            return Err(Error::usage(format!("rectangle size {} differs from |S| = {}", r.size, shape.len())));
        }
        sums[r.shape] += v;
    }
    let mut l = BigUint::one();
    for (s, sum) in shapes.iter().zip(&sums) {
        if !sum.is_zero() {
            l = l.max(root_ceil(sum, s.len() as u32));
        }
    }
    let mut next: Vec<BigUint> = vec![BigUint::zero(); shapes.len()];
    let mut families = Vec::with_capacity(o.len());
    for (r, v) in o.iter() {
        families.push(CarvedFamily { rect: r.clone(), start: next[r.shape].clone(), count: v.clone() });
        next[r.shape] += v;
    }
    Ok(AlphabetPlan { l, sums, families })
}
