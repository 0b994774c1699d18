//! Entropy of window-empirical measures: Shannon and dynamical estimates,
//! tiled entropy along a tiling system, rectangles and the oracle of the
//! symbolic-extension construction.
//!
//! The empirical measure of a [`LayeredArray`] over a set of translates `Γ`
//! is the uniform average of the point masses at the shifted configurations
//! `g(x)`, `g ∈ Γ`. A [`Partition`] reads the symbols of some layers on a
//! finite horizon `H`; its refinement `P^F` reads them on `H·F·g`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::density::Window;
use crate::error::{Error, Result};
use crate::group::{product_set, FiniteSubset, GroupElement};
use crate::symbolic::SymbolicArray;

mod oracle;
mod tiled;

pub use oracle::{
    build_oracle, check_oracle_condition, min_alphabet, pow2_ceil, AlphabetPlan, CarvedFamily, Oracle,
    OracleCheck, OracleWitness,
};
pub use tiled::{
    check_two_path, check_tiled_monotonicity, conditional_tiled_entropy, rectangle_measure, rectangles,
    tiled_entropy, MonotonicityReport, TwoPathCheck, Rectangle, RectangleOccurrence, ShapeTerm, TiledEntropy,
};

/// Several symbol layers over one window carrier.
#[derive(Clone, Debug)]
pub struct LayeredArray {
    pub window: Window,
    alphabets: Vec<Vec<i32>>,
    layers: Vec<Vec<i32>>,
}

impl LayeredArray {
    pub fn new(layers: Vec<SymbolicArray>) -> Result<Self> {
        let Some(first) = layers.first() else {
            return Err(Error::usage("a layered array needs at least one layer"));
        };
        let window = first.window.clone();
        if let Some(k) = layers.iter().position(|l| l.window.carrier != window.carrier) {
            return Err(Error::usage(format!("layer {k} lives on a different carrier")));
        }
        Ok(LayeredArray {
            alphabets: layers.iter().map(|l| l.alphabet.clone()).collect(),
            layers: layers.iter().map(|l| l.cells().to_vec()).collect(),
            window,
        })
    }

    pub fn single(x: SymbolicArray) -> Self {
        LayeredArray::new(vec![x]).expect("one layer")
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn alphabet(&self, layer: usize) -> &[i32] {
        &self.alphabets[layer]
    }

    /// One layer as a standalone array.
    pub fn layer_array(&self, layer: usize) -> SymbolicArray {
        let cells = &self.layers[layer];
        let idx = |g: &GroupElement| self.window.carrier.index_of(g).expect("carrier cell");
        SymbolicArray::from_fn(self.window.clone(), self.alphabets[layer].clone(), |g| cells[idx(g)])
            .expect("symbols come from the alphabet")
    }

    pub fn get(&self, layer: usize, g: &GroupElement) -> Option<i32> {
        self.window.carrier.index_of(g).map(|i| self.layers[layer][i])
    }

    /// Symbols of `layers` on `cells·g`, cell-major; `None` if a cell leaves the carrier.
    pub fn pattern(&self, cells: &[GroupElement], layers: &[usize], g: &GroupElement) -> Option<Vec<i32>> {
        let mut out = Vec::with_capacity(cells.len() * layers.len());
        for c in cells {
            let i = self.window.carrier.index_of(&c.mul(g))?;
            out.extend(layers.iter().map(|&l| self.layers[l][i]));
        }
        Some(out)
    }

    /// The partition reading `layers` at the identity.
    pub fn symbol_partition(&self, layers: impl IntoIterator<Item = usize>) -> Result<Partition> {
        let fam = self.window.carrier.family().expect("nonempty carrier");
        Partition::new(FiniteSubset::singleton(GroupElement::identity(fam)), layers)
    }

    fn check_partition(&self, p: &Partition) -> Result<()> {
        match p.layers.iter().find(|&&l| l >= self.layers.len()) {
            Some(l) => Err(Error::usage(format!("partition reads layer {l} of a {}-layer array", self.layers.len()))),
            None => Ok(()),
        }
    }
}

/// The partition by the symbols of `layers` on the horizon `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub horizon: FiniteSubset,
    pub layers: Vec<usize>,
}

impl Partition {
    pub fn new(horizon: FiniteSubset, layers: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut layers: Vec<usize> = layers.into_iter().collect();
        layers.sort_unstable();
        layers.dedup();
        if horizon.is_empty() || layers.is_empty() {
            return Err(Error::usage("a partition needs a nonempty horizon and at least one layer"));
        }
        Ok(Partition { horizon, layers })
    }

    /// `P ∨ Q`, available when the two share a horizon or a layer set.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        if self.horizon == other.horizon {
            Partition::new(self.horizon.clone(), self.layers.iter().chain(&other.layers).copied())
        } else if self.layers == other.layers {
            Partition::new(self.horizon.union(&other.horizon), self.layers.clone())
        } else {
            Err(Error::usage("only partitions sharing a horizon or a layer set can be joined"))
        }
    }

    /// The cells read by `P^F`, i.e. `H·F`.
    pub fn cells(&self, f: &FiniteSubset) -> FiniteSubset {
        product_set(&self.horizon, f)
    }

    /// `log₂` of the number of atoms.
    pub fn log_atoms(&self, x: &LayeredArray) -> f64 {
        let per_cell: f64 = self.layers.iter().map(|&l| (x.alphabet(l).len() as f64).log2()).sum();
        per_cell * self.horizon.len() as f64
    }
}

/// Pattern counts over a shape, on some layers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalMeasure {
    pub shape: FiniteSubset,
    pub layers: Vec<usize>,
    pub counts: BTreeMap<Vec<i32>, u64>,
    pub total: u64,
}

impl EmpiricalMeasure {
    /// Patterns of `x` on `shape·g` for every listed `g`; a translate leaving
    /// the carrier is a margin error.
    pub fn from_translates(
        x: &LayeredArray,
        shape: &FiniteSubset,
        layers: &[usize],
        translates: &[GroupElement],
    ) -> Result<Self> {
        let cells = shape.to_vec();
        let pats: Vec<Option<Vec<i32>>> = translates.par_iter().map(|g| x.pattern(&cells, layers, g)).collect();
        let mut counts: BTreeMap<Vec<i32>, u64> = BTreeMap::new();
        for (p, g) in pats.into_iter().zip(translates) {
            let p = p.ok_or_else(|| {
                Error::Margin(format!("the {}-cell shape translated by {g} leaves the carrier", shape.len()))
            })?;
            *counts.entry(p).or_default() += 1;
        }
        Ok(EmpiricalMeasure { shape: shape.clone(), layers: layers.to_vec(), counts, total: translates.len() as u64 })
    }

    pub fn support(&self) -> usize {
        self.counts.len()
    }

    pub fn probability(&self, pattern: &[i32]) -> f64 {
        match (self.counts.get(pattern), self.total) {
            (Some(&c), t) if t > 0 => c as f64 / t as f64,
            _ => 0.0,
        }
    }

    pub fn entropy(&self) -> f64 {
        entropy_of_counts(self.counts.values().copied(), self.total)
    }

    /// Push-forward to a subshape and a subset of the layers.
    pub fn marginal(&self, sub: &FiniteSubset, layers: &[usize]) -> Result<Self> {
        let cell_idx: Vec<usize> = sub
            .iter()
            .map(|g| self.shape.index_of(g).ok_or_else(|| Error::usage(format!("{g} is not in the shape"))))
            .collect::<Result<_>>()?;
        let layer_idx: Vec<usize> = layers
            .iter()
            .map(|l| {
                self.layers.iter().position(|m| m == l).ok_or_else(|| Error::usage(format!("layer {l} is not measured")))
            })
            .collect::<Result<_>>()?;
        let width = self.layers.len();
        let mut counts: BTreeMap<Vec<i32>, u64> = BTreeMap::new();
        for (p, &c) in &self.counts {
            let q: Vec<i32> = cell_idx.iter().flat_map(|&i| layer_idx.iter().map(move |&j| p[i * width + j])).collect();
            *counts.entry(q).or_default() += c;
        }
        Ok(EmpiricalMeasure { shape: sub.clone(), layers: layers.to_vec(), counts, total: self.total })
    }

    /// Adds the counts of another measure on the same shape and layers.
    pub fn merge(&mut self, other: &EmpiricalMeasure) -> Result<()> {
        if self.shape != other.shape || self.layers != other.layers {
            return Err(Error::usage("merged measures must share shape and layers"));
        }
        for (p, &c) in &other.counts {
            *self.counts.entry(p.clone()).or_default() += c;
        }
        self.total += other.total;
        Ok(())
    }

    pub fn total_variation(&self, other: &EmpiricalMeasure) -> f64 {
        let mut keys: Vec<&Vec<i32>> = self.counts.keys().chain(other.counts.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.iter().map(|k| (self.probability(k) - other.probability(k)).abs()).sum::<f64>() / 2.0
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("measure shape {:?} layers {:?} total {}\n", self.shape, self.layers, self.total);
        for (p, c) in &self.counts {
            s.push_str(&format!("{p:?} {c}\n"));
        }
        s
    }
}

/// `−Σ p log₂ p` with `0·log 0 = 0`.
pub fn shannon_entropy(dist: &[f64]) -> Result<f64> {
    if let Some(p) = dist.iter().find(|p| !(**p >= 0.0)) {
        return Err(Error::domain(format!("probability {p} is negative or not a number")));
    }
    let sum: f64 = dist.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("probabilities sum to {sum}, not 1")));
    }
    Ok(dist.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum::<f64>().max(0.0))
}

pub(crate) fn entropy_of_counts(counts: impl IntoIterator<Item = u64>, total: u64) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateTerm {
    pub size: usize,
    pub translates: usize,
    /// `H(μ, P^F)`.
    pub entropy: f64,
    /// `H(μ, P^F)/|F|`.
    pub per_cell: f64,
    pub running_min: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicalEstimate {
    pub terms: Vec<EstimateTerm>,
}

impl DynamicalEstimate {
    /// The last running minimum, the estimate of `h(μ,P)`.
    pub fn value(&self) -> f64 {
        self.terms.last().map_or(f64::INFINITY, |t| t.running_min)
    }

    /// Index of the term where the final minimum is attained.
    pub fn argmin(&self) -> Option<usize> {
        let v = self.value();
        self.terms.iter().position(|t| t.per_cell == v)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("dynamical_estimate\n");
        for (i, t) in self.terms.iter().enumerate() {
            s.push_str(&format!(
                "term {} size {} translates {} entropy {:.12} per_cell {:.12} running_min {:.12}\n",
                i + 1,
                t.size,
                t.translates,
                t.entropy,
                t.per_cell,
                t.running_min
            ));
        }
        s
    }
}

/// `(1/|Fᵢ|)·H(μ, P^{Fᵢ})` over the empirical measure of all translates with
/// `H·Fᵢ·g` in the carrier, with the running minimum.
pub fn dynamical_entropy_estimate(
    x: &LayeredArray,
    p: &Partition,
    terms: &[FiniteSubset],
) -> Result<DynamicalEstimate> {
    x.check_partition(p)?;
    let mut out = Vec::with_capacity(terms.len());
    let mut best = f64::INFINITY;
    for (i, f) in terms.iter().enumerate() {
        if f.is_empty() {
            return Err(Error::usage(format!("Følner term {} is empty", i + 1)));
        }
        let cells = p.cells(f);
        let translates = x.window.admissible(&cells).to_vec();
        if translates.is_empty() {
            return Err(Error::Margin(format!(
                "Følner term {} ({} cells through the horizon) fits nowhere in the carrier",
                i + 1,
                cells.len()
            )));
        }
        let m = EmpiricalMeasure::from_translates(x, &cells, &p.layers, &translates)?;
        let h = m.entropy();
        let per_cell = h / f.len() as f64;
        best = best.min(per_cell);
        out.push(EstimateTerm { size: f.len(), translates: translates.len(), entropy: h, per_cell, running_min: best });
    }
    Ok(DynamicalEstimate { terms: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(n: i64, f: impl Fn(i64) -> i32) -> LayeredArray {
        let w = Window::new(FiniteSubset::interval(0, n - 1), FiniteSubset::interval(0, 0)).unwrap();
        LayeredArray::single(
            SymbolicArray::from_fn(w, vec![0, 1], |g| f(g.coords().unwrap()[0])).unwrap(),
        )
    }

    #[test]
    fn shannon_examples() {
        assert!((shannon_entropy(&[0.25; 4]).unwrap() - 2.0).abs() < 1e-15);
        assert!((shannon_entropy(&[0.5, 0.25, 0.25]).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(shannon_entropy(&[1.5, -0.5]).unwrap_err().exit_code(), 2);
        assert!(shannon_entropy(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn periodic_and_constant() {
        let x = line(400, |n| (n % 2) as i32);
        let p = x.symbol_partition([0]).unwrap();
        let terms: Vec<FiniteSubset> = (1..=20).map(|n| FiniteSubset::interval(0, n - 1)).collect();
        let est = dynamical_entropy_estimate(&x, &p, &terms).unwrap();
        // two phases with counts differing by at most one among ~400 translates
        for (n, t) in est.terms.iter().enumerate() {
            assert!((t.entropy - 1.0).abs() < 1e-5);
            assert!((t.per_cell * (n + 1) as f64 - t.entropy).abs() < 1e-12);
        }
        assert!((est.value() - 0.05).abs() < 1e-6);
        let c = line(100, |_| 1);
        let est = dynamical_entropy_estimate(&c, &p, &terms).unwrap();
        assert!(est.terms.iter().all(|t| t.entropy == 0.0));
    }

    #[test]
    fn iid_is_near_one_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let bits: Vec<i32> = (0..100_000).map(|_| rng.gen_range(0..2)).collect();
        let x = line(100_000, |n| bits[n as usize]);
        let p = x.symbol_partition([0]).unwrap();
        let terms: Vec<FiniteSubset> = (1..=8).map(|n| FiniteSubset::interval(0, n - 1)).collect();
        let est = dynamical_entropy_estimate(&x, &p, &terms).unwrap();
        assert!((est.value() - 1.0).abs() < 0.05, "{}", est.value());
    }

    #[test]
    fn margin_error_when_nothing_fits() {
        let x = line(5, |_| 0);
        let p = x.symbol_partition([0]).unwrap();
        let err = dynamical_entropy_estimate(&x, &p, &[FiniteSubset::interval(0, 9)]).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn marginals_and_joins() {
        let x = line(50, |n| ((n * n) % 3 == 0) as i32);
        let f = FiniteSubset::interval(0, 2);
        let t = x.window.admissible(&f).to_vec();
        let m = EmpiricalMeasure::from_translates(&x, &f, &[0], &t).unwrap();
        let sub = FiniteSubset::interval(0, 1);
        let direct = EmpiricalMeasure::from_translates(&x, &sub, &[0], &t).unwrap();
        assert_eq!(m.marginal(&sub, &[0]).unwrap(), direct);
        let a = Partition::new(FiniteSubset::interval(0, 0), [0]).unwrap();
        let b = Partition::new(FiniteSubset::interval(1, 1), [0]).unwrap();
        assert_eq!(a.join(&b).unwrap().horizon, FiniteSubset::interval(0, 1));
    }
}
