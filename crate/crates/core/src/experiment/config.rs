use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::density::{PeriodicSet, Window};
use crate::error::{Error, Result};
use crate::group::{ball, Family, FiniteSubset, GroupElement, GroupSpec};
use crate::quasitiling::Quasitiling;
use crate::Rational;

/// One experiment: a group, a window and one block per subcommand.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `zd:D`, `heis3` or `lamplighter`.
    pub group: String,
    #[serde(default)]
    pub seed: u64,
    pub window: Option<WindowSpec>,
    pub density: Option<DensityBlock>,
    pub tile: Option<TileBlock>,
    pub compare: Option<CompareBlock>,
    pub encode: Option<EncodeBlock>,
    pub entropy: Option<EntropyBlock>,
    pub render: Option<RenderBlock>,
}

/// A ℤᵈ box `lo..=hi` or a word-metric ball.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub lo: Option<Vec<i64>>,
    pub hi: Option<Vec<i64>>,
    pub radius: Option<usize>,
}

/// Exactly one of: `side` (box `[0,side)`), `lo`/`hi`, `elements`, `ball`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub side: Option<Vec<i64>>,
    pub lo: Option<Vec<i64>>,
    pub hi: Option<Vec<i64>>,
    pub elements: Option<Vec<String>>,
    pub ball: Option<usize>,
}

/// Exactly one of: `elements`, `periods` with `residues`, `random` (a density).
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    pub elements: Option<Vec<String>>,
    pub periods: Option<Vec<i64>>,
    pub residues: Option<Vec<Vec<i64>>>,
    pub random: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityBlock {
    pub set: SetSpec,
    /// Indices `n ≥ 1` of the Følner terms: `[−n,n]ᵈ` in ℤᵈ, balls in the Heisenberg group.
    pub folner: Vec<i64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileBlock {
    pub pool: Vec<ShapeSpec>,
    pub eps: String,
    /// Invariance set for the property check; generators and `e` by default.
    pub k: Option<ShapeSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareBlock {
    pub eps: String,
    /// Without `a`, only the chain bound for `multipliers` is computed.
    pub a: Option<SetSpec>,
    pub b: Option<SetSpec>,
    /// Box sides of the aligned tiling.
    pub tile: Option<Vec<i64>>,
    pub multipliers: Option<ShapeSpec>,
    pub chain_bound: Option<usize>,
    #[serde(default = "default_growth_cap")]
    pub growth_cap: usize,
    #[serde(default = "default_oracle_cap")]
    pub oracle_cap: usize,
}

fn default_growth_cap() -> usize {
    512
}

fn default_oracle_cap() -> usize {
    400
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncodeBlock {
    /// Box sides per level, each a multiple of the previous.
    pub levels: Vec<Vec<i64>>,
    #[serde(default = "default_mode")]
    pub mode: String,
    /// Constant top-level choice; seeded choices when absent.
    pub choice: Option<i32>,
}

fn default_mode() -> String {
    "three".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyBlock {
    pub levels: Vec<Vec<i64>>,
    /// Number of symbol layers; one per level by default.
    pub layers: Option<usize>,
    /// `tile-patterns` or `iid`.
    #[serde(default = "default_source")]
    pub source: String,
    #[serde(default = "default_patterns")]
    pub patterns: usize,
    /// Box sides of the Følner terms for the dynamical estimate.
    pub terms: Vec<i64>,
    /// Rational `g` per level, for the oracle of levels 1 and 2.
    pub oracle: Option<Vec<String>>,
}

fn default_source() -> String {
    "tile-patterns".into()
}

fn default_patterns() -> usize {
    2
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderBlock {
    /// Nested aligned levels; the `[tile]` construction when absent.
    pub levels: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub palette_seed: u64,
    #[serde(default = "default_cell")]
    pub cell: u32,
}

fn default_cell() -> u32 {
    8
}

fn cfg(path: &str, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

impl ExperimentConfig {
    /// Parses TOML; unknown or mistyped fields are reported with their path.
    pub fn parse(text: &str) -> Result<Self> {
        let de = toml::Deserializer::new(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "<document>".to_string() } else { path };
            cfg(&path, e.into_inner().message().trim().to_string())
        })?;
        config.spec()?;
        Ok(config)
    }

    pub fn spec(&self) -> Result<GroupSpec> {
        GroupSpec::parse(&self.group).map_err(|e| cfg("group", e.to_string()))
    }

    pub fn family(&self) -> Family {
        self.spec().expect("validated at parse time").family
    }

    pub fn block<'a, T>(&self, block: &'a Option<T>, name: &str) -> Result<&'a T> {
        block.as_ref().ok_or_else(|| cfg(name, "this subcommand needs the block"))
    }

    pub fn window(&self, margin: FiniteSubset) -> Result<Window> {
        let spec = self.spec()?;
        let w = self.window.as_ref().ok_or_else(|| cfg("window", "missing window"))?;
        let carrier = match (&w.lo, &w.hi, w.radius) {
            (Some(lo), Some(hi), None) => {
                let d = self.zd_rank("window")?;
                if lo.len() != d || hi.len() != d {
                    return Err(cfg("window.lo", format!("expected {d} coordinates")));
                }
                if lo.iter().zip(hi).any(|(l, h)| l > h) {
                    return Err(cfg("window.hi", "hi must be at least lo"));
                }
                FiniteSubset::zd_box(lo, hi)
            }
            (None, None, Some(r)) => ball(&spec, r).map_err(|e| cfg("window.radius", e.to_string()))?,
            _ => return Err(cfg("window", "give either lo and hi, or radius")),
        };
        Window::new(carrier, margin)
    }

    pub fn zd_rank(&self, path: &str) -> Result<usize> {
        match self.family() {
            Family::FreeAbelian(d) => Ok(d as usize),
            other => Err(cfg(path, format!("needs a group ℤᵈ, not {other:?}"))),
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.family())
    }

    pub fn elements(&self, path: &str, items: &[String]) -> Result<FiniteSubset> {
        let fam = self.family();
        items
            .iter()
            .enumerate()
            .map(|(i, t)| GroupElement::parse(fam, t).map_err(|e| cfg(&format!("{path}[{i}]"), e.to_string())))
            .collect()
    }

    pub fn shape(&self, path: &str, s: &ShapeSpec) -> Result<FiniteSubset> {
        let given = [s.side.is_some(), s.lo.is_some() || s.hi.is_some(), s.elements.is_some(), s.ball.is_some()];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(cfg(path, "give exactly one of side, lo/hi, elements, ball"));
        }
        if let Some(side) = &s.side {
            let d = self.zd_rank(path)?;
            if side.len() != d || side.iter().any(|&x| x < 1) {
                return Err(cfg(&format!("{path}.side"), format!("expected {d} positive lengths")));
            }
            let hi: Vec<i64> = side.iter().map(|x| x - 1).collect();
            return Ok(FiniteSubset::zd_box(&vec![0; d], &hi));
        }
        if let (Some(lo), Some(hi)) = (&s.lo, &s.hi) {
            let d = self.zd_rank(path)?;
            if lo.len() != d || hi.len() != d || lo.iter().zip(hi).any(|(l, h)| l > h) {
                return Err(cfg(&format!("{path}.hi"), format!("expected {d} coordinates with lo ≤ hi")));
            }
            return Ok(FiniteSubset::zd_box(lo, hi));
        }
        if s.lo.is_some() || s.hi.is_some() {
            return Err(cfg(path, "lo and hi go together"));
        }
        if let Some(items) = &s.elements {
            let set = self.elements(&format!("{path}.elements"), items)?;
            if set.is_empty() {
                return Err(cfg(&format!("{path}.elements"), "empty shape"));
            }
            return Ok(set);
        }
        let r = s.ball.expect("one field given");
        ball(&self.spec()?, r).map_err(|e| cfg(&format!("{path}.ball"), e.to_string()))
    }

    pub fn rational(&self, path: &str, text: &str) -> Result<Rational> {
        Rational::from_str(text.trim()).map_err(|_| cfg(path, format!("`{text}` is not a rational number")))
    }

    /// The set restricted to `region`; random sets draw one Bernoulli trial
    /// per region point in canonical order.
    pub fn set(&self, path: &str, s: &SetSpec, region: &FiniteSubset, salt: u64) -> Result<(FiniteSubset, Option<PeriodicSet>)> {
        let given = [s.elements.is_some(), s.periods.is_some() || s.residues.is_some(), s.random.is_some()];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(cfg(path, "give exactly one of elements, periods/residues, random"));
        }
        if let Some(items) = &s.elements {
            return Ok((self.elements(&format!("{path}.elements"), items)?.intersection(region), None));
        }
        if let Some(p) = &s.random {
            let d = self.rational(&format!("{path}.random"), p)?;
            if d < Rational::from_integer(0) || d > Rational::from_integer(1) {
                return Err(cfg(&format!("{path}.random"), "density must lie in [0,1]"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let (num, den) = (*d.numer() as u64, *d.denom() as u64);
            return Ok((region.filter(|_| rng.gen_range(0..den) < num), None));
        }
        let (Some(periods), Some(residues)) = (&s.periods, &s.residues) else {
            return Err(cfg(path, "periods and residues go together"));
        };
        let d = self.zd_rank(path)?;
        if periods.len() != d {
            return Err(cfg(&format!("{path}.periods"), format!("expected {d} periods")));
        }
        let p = PeriodicSet::new(periods.clone(), residues.clone())
            .map_err(|e| cfg(&format!("{path}.residues"), e.to_string()))?;
        Ok((p.restrict(region), Some(p)))
    }

    /// Translates of the box `[0,side)` by multiples of `side` lying inside
    /// the window box, anchored at its lower corner.
    pub fn aligned_tiling(&self, path: &str, w: &Window, side: &[i64]) -> Result<Quasitiling> {
        let shape = self.shape(path, &ShapeSpec { side: Some(side.to_vec()), ..Default::default() })?;
        let (lo, hi) = w.carrier_box().ok_or_else(|| cfg("window", "aligned tilings need a box window"))?;
        let counts: Vec<i64> = (0..lo.len()).map(|i| (hi[i] - lo[i] + 1) / side[i]).collect();
        let mut centers = Vec::new();
        let total: i64 = counts.iter().product();
        for mut t in 0..total {
            let mut v = Vec::with_capacity(lo.len());
            for i in 0..lo.len() {
                v.push(lo[i] + (t % counts[i]) * side[i]);
                t /= counts[i];
            }
            centers.push(GroupElement::zd(&v));
        }
        Quasitiling::from_centers(vec![shape], vec![FiniteSubset::new(centers)])
    }

    /// Nested aligned levels; each side must be a multiple of the one below.
    pub fn aligned_levels(&self, path: &str, w: &Window, levels: &[Vec<i64>]) -> Result<Vec<Quasitiling>> {
        if levels.is_empty() {
            return Err(cfg(path, "at least one level is needed"));
        }
        for (k, pair) in levels.windows(2).enumerate() {
            if pair[0].len() != pair[1].len() || pair[1].iter().zip(&pair[0]).any(|(b, a)| *a <= 0 || b % a != 0) {
                return Err(cfg(&format!("{path}[{}]", k + 1), "each side must be a multiple of the side below"));
            }
        }
        levels
            .iter()
            .enumerate()
            .map(|(k, side)| self.aligned_tiling(&format!("{path}[{k}]"), w, side))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_field_names_its_path() {
        let err = ExperimentConfig::parse("group = \"zd:1\"\n[density]\nset = { elements = [\"0\"], colour = 1 }\nfolner = [2]\n")
            .unwrap_err();
        let Error::Config { path, .. } = &err else { panic!("{err}") };
        assert_eq!(path, "density.set.colour");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn wrong_type_and_bad_group() {
        let err = ExperimentConfig::parse("group = \"zd:1\"\nseed = \"x\"\n").unwrap_err();
        assert!(matches!(&err, Error::Config { path, .. } if path == "seed"));
        let err = ExperimentConfig::parse("group = \"free2\"\n").unwrap_err();
        assert!(matches!(&err, Error::Config { path, .. } if path == "group"));
    }

    #[test]
    fn sets_and_tilings() {
        let c = ExperimentConfig::parse("group = \"zd:1\"\n[window]\nlo = [0]\nhi = [9]\n").unwrap();
        let w = c.window(FiniteSubset::interval(0, 0)).unwrap();
        let evens = SetSpec { periods: Some(vec![2]), residues: Some(vec![vec![0]]), ..Default::default() };
        let (s, p) = c.set("s", &evens, &w.carrier, 0).unwrap();
        assert_eq!(s.len(), 5);
        assert!(p.is_some());
        let t = c.aligned_tiling("t", &w, &[3]).unwrap();
        assert_eq!(t.len(), 3);
        assert!(c.aligned_levels("l", &w, &[vec![3], vec![4]]).is_err());
    }
}
