use super::chains::select_minimal;
use super::{chain_bound_n, greedy_initial, ComparisonInstance, PartialBijection};
use crate::density::zd_bounds;
use crate::error::{Error, Result};
use crate::group::{product_set, Family, FiniteSubset, GroupElement, GroupSpec, DEFAULT_BALL_CAP};
use crate::matching::hopcroft_karp;

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Chain bound `N`; computed by [`chain_bound_n`] when absent.
    pub chain_bound: Option<usize>,
    /// Radius cap handed to [`chain_bound_n`].
    pub growth_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { chain_bound: None, growth_cap: 512 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundTrace {
    pub round: usize,
    pub domain: usize,
    pub chains_applied: usize,
    /// Longest applied chain, in points.
    pub max_chain_len: usize,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub phi: PartialBijection,
    /// Round 1 is the greedy map; later rounds are simultaneous corrections.
    pub trace: Vec<RoundTrace>,
    pub n: usize,
    /// Longest chain applied, in points.
    pub max_chain_len: usize,
    /// Number of correction rounds `m`.
    pub rounds: usize,
    /// `|E^{s(N)}| + 1` with `s(N) = 2N·N|E|^{2N}`, saturating.
    pub round_cap: u128,
    /// `|A∩R| + 1`, a bound on the rounds actually possible.
    pub tight_round_cap: usize,
    /// Radius `k + 4Nm` (in powers of `E`) of the coding horizon.
    pub horizon_radius: usize,
    /// Points of `A∩R` whose horizon leaves the carrier.
    pub margin_indeterminate: FiniteSubset,
    /// Violated hypotheses observed while solving (never hidden).
    pub notes: Vec<String>,
}

impl Solution {
    pub fn trace_text(&self) -> String {
        let mut s = format!(
            "N={} rounds={} max_chain_len={} horizon_radius={} margin_indeterminate={}\n",
            self.n,
            self.rounds,
            self.max_chain_len,
            self.horizon_radius,
            self.margin_indeterminate.len()
        );
        s.push_str(&format!("round_cap={} tight_round_cap={}\n", self.round_cap, self.tight_round_cap));
        for r in &self.trace {
            s.push_str(&format!(
                "round={} domain={} chains={} max_len={}\n",
                r.round, r.domain, r.chains_applied, r.max_chain_len
            ));
        }
        for n in &self.notes {
            s.push_str(&format!("note {n}\n"));
        }
        s
    }
}

/// Greedy first approximation, then rounds of simultaneous correction along
/// all minimal chains until the map is total on `A∩R`.
///
/// Chains longer than `2N` are still followed when no shorter one exists, so
/// success is equivalent to a matching of `A∩R` into `B∩R` along `E`; every
/// such event is recorded in `notes`. A free point whose alternating
/// reachable set closes is a Hall violation and fails with a hypothesis error.
pub fn comparison_solve(inst: &ComparisonInstance, opts: SolveOptions) -> Result<Solution> {
    let Some(family) = inst.window.carrier.family() else {
        return Err(Error::usage("empty carrier"));
    };
    let n = match opts.chain_bound {
        Some(n) => n,
        None => chain_bound_n(&inst.e, inst.eps, &GroupSpec::standard(family), opts.growth_cap)?.n,
    };
    let mut notes = Vec::new();
    let bad = inst.advantage_violations();
    if !bad.is_empty() {
        notes.push(format!(
            "{} of {} complete tiles fail |B∩T| − |A∩T| > ε|T|",
            bad.len(),
            inst.complete_tiles().len()
        ));
    }
    let round_cap = proof_round_cap(&inst.e, n);
    let (a_r, b_r) = (inst.a_region(), inst.b_region());
    let mut phi = greedy_initial(inst, &inst.e);
    phi.check(a_r, b_r)?;
    let mut trace = vec![RoundTrace { round: 1, domain: phi.len(), chains_applied: 0, max_chain_len: 0 }];
    let mut rounds = 0usize;
    let mut longest = 0usize;
    while phi.len() < a_r.len() {
        if rounds as u128 + 1 >= round_cap {
            return Err(Error::Hypothesis(format!("round cap {round_cap} reached")));
        }
        let sel = select_minimal(&phi, inst, usize::MAX)?;
        if let Some(a) = sel.exhausted.first() {
            return Err(Error::Hypothesis(format!(
                "no correction chain from {a} ({} such points): A∩R cannot be matched into B∩R \
                 with multipliers in E",
                sel.exhausted.len()
            )));
        }
        let cand_pairs = sel.candidates.iter().map(|c| c.len() / 2).max().unwrap_or(0);
        if cand_pairs > n {
            notes.push(format!(
                "round {}: a free point needs a chain of length {} > 2N = {}",
                rounds + 2,
                2 * cand_pairs,
                2 * n
            ));
        }
        if sel.minimal.is_empty() {
            return Err(Error::internal("no minimal chain although candidates exist"));
        }
        let before = phi.len();
        let mut max_len = 0;
        for c in &sel.minimal {
            phi = super::correct_along(&phi, c)?;
            max_len = max_len.max(c.len());
        }
        phi.check(a_r, b_r)?;
        if phi.len() != before + sel.minimal.len() {
            return Err(Error::internal("simultaneous corrections interfered"));
        }
        rounds += 1;
        longest = longest.max(max_len);
        trace.push(RoundTrace {
            round: rounds + 1,
            domain: phi.len(),
            chains_applied: sel.minimal.len(),
            max_chain_len: max_len,
        });
    }
    let horizon_radius = inst.e.len() + 4 * n * rounds;
    let margin_indeterminate = indeterminate(inst, horizon_radius);
    Ok(Solution {
        phi,
        trace,
        n,
        max_chain_len: longest,
        rounds,
        round_cap,
        tight_round_cap: a_r.len() + 1,
        horizon_radius,
        margin_indeterminate,
        notes,
    })
}

/// `|E^{s(N)}| + 1`, `s(N) = 2N·σ_N`, `σ_N = N·|E|^{2N}`, bounded above and saturating.
fn proof_round_cap(e: &FiniteSubset, n: usize) -> u128 {
    let k = e.len() as u128;
    let n128 = n as u128;
    let sigma = k.checked_pow(2 * n as u32).map(|p| p.saturating_mul(n128)).unwrap_or(u128::MAX);
    let s = sigma.saturating_mul(2 * n128);
    power_size_bound(e, s).saturating_add(1)
}

/// Upper bound on `|Eˢ|`.
fn power_size_bound(e: &FiniteSubset, s: u128) -> u128 {
    match e.family() {
        Some(Family::FreeAbelian(_)) => {
            let (lo, hi) = zd_bounds(e).expect("ℤᵈ set");
            lo.iter().zip(&hi).fold(1u128, |acc, (l, h)| {
                acc.saturating_mul(s.saturating_mul((h - l) as u128).saturating_add(1))
            })
        }
        Some(Family::Heisenberg) => {
            let mut m = [0u128; 3];
            for g in e {
                if let GroupElement::Heis(c) = g {
                    for i in 0..3 {
                        m[i] = m[i].max(c[i].unsigned_abs() as u128);
                    }
                }
            }
            let lin = |x: u128| s.saturating_mul(2).saturating_mul(x).saturating_add(1);
            let quad = s.saturating_mul(s).saturating_mul(m[0]).saturating_mul(m[1]);
            let z = s.saturating_mul(m[2]).saturating_add(quad).saturating_mul(2).saturating_add(1);
            lin(m[0]).saturating_mul(lin(m[1])).saturating_mul(z)
        }
        _ => u128::MAX,
    }
}

/// Points of `A∩R` whose `E^r`-neighbourhood is not contained in the carrier.
fn indeterminate(inst: &ComparisonInstance, r: usize) -> FiniteSubset {
    let a_r = inst.a_region();
    if let (Some((clo, chi)), Some((elo, ehi))) = (inst.window.carrier_box(), zd_bounds(&inst.e)) {
        if matches!(inst.e.family(), Some(Family::FreeAbelian(_))) && clo.len() == elo.len() {
            let r = r as i64;
            return a_r.filter(|a| {
                let c = a.coords().expect("ℤᵈ");
                (0..c.len()).any(|i| c[i] + r * elo[i] < clo[i] || c[i] + r * ehi[i] > chi[i])
            });
        }
    }
    let mut h = inst.e.clone();
    for _ in 1..r {
        h = product_set(&h, &inst.e);
        if h.len() > DEFAULT_BALL_CAP / 4 {
            return a_r.clone();
        }
    }
    a_r.filter(|a| !inst.window.fits(&h, a))
}

/// Maximum matching of `A∩R` into `B∩R` with edges `b ∈ Ea`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallReport {
    pub saturates: bool,
    pub matched: usize,
    pub needed: usize,
}

pub fn hall_oracle(inst: &ComparisonInstance) -> HallReport {
    let a_r = inst.a_region();
    let b_r = inst.b_region();
    let adj: Vec<Vec<usize>> = a_r
        .iter()
        .map(|a| {
            inst.e
                .iter()
                .filter_map(|g| b_r.index_of(&g.mul(a)))
                .collect()
        })
        .collect();
    let matched = hopcroft_karp(&adj, b_r.len()).iter().flatten().count();
    HallReport { saturates: matched == a_r.len(), matched, needed: a_r.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::tests::one_tile;
    use crate::density::Window;
    use crate::quasitiling::Quasitiling;
    use crate::Rational;

    fn periodic_instance(swap: bool) -> ComparisonInstance {
        // tiles of length 20; per tile A has 4 points, B has 9
        let len = 20;
        let shape = FiniteSubset::interval(0, len - 1);
        let carrier = FiniteSubset::interval(0, 1999);
        let centers = FiniteSubset::new((0..100).map(|k| GroupElement::z(k * len)));
        let t = Quasitiling::from_centers(vec![shape], vec![centers]).unwrap();
        let w = Window::new(carrier.clone(), FiniteSubset::singleton(GroupElement::z(0))).unwrap();
        let a = carrier.filter(|g| [0, 1, 2, 3].contains(&g.coords().unwrap()[0].rem_euclid(len)));
        let b = carrier.filter(|g| (11..20).contains(&g.coords().unwrap()[0].rem_euclid(len)));
        let (a, b) = if swap { (b, a) } else { (a, b) };
        ComparisonInstance::new(a, b, t, Rational::new(1, 5), w).unwrap()
    }

    #[test]
    fn single_multiplier_round_one() {
        let inst = one_tile(0, 5, &[0, 1], &[3, 4]);
        let s = comparison_solve(&inst, SolveOptions::default()).unwrap();
        assert_eq!(s.rounds, 0);
        assert_eq!(s.phi.len(), 2);
    }

    #[test]
    fn periodic_total_injection() {
        let inst = periodic_instance(false);
        let s = comparison_solve(&inst, SolveOptions::default()).unwrap();
        assert_eq!(s.phi.len(), inst.a_region().len());
        s.phi.check(inst.a_region(), inst.b_region()).unwrap();
        assert!(hall_oracle(&inst).saturates);
        assert!(s.notes.is_empty());
    }

    #[test]
    fn swapped_fails() {
        let inst = periodic_instance(true);
        assert!(!hall_oracle(&inst).saturates);
        let err = comparison_solve(&inst, SolveOptions { chain_bound: Some(4), ..Default::default() })
            .unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }
}
