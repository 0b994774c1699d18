use num_bigint::BigUint;

use crate::density::zd_bounds;
use crate::error::{Error, Result};
use crate::group::{product_set, Family, FiniteSubset, GroupElement, GroupSpec};
use crate::Rational;

/// Exact enumeration of `(E²)ⁿ` stops once a power exceeds this many elements.
const EXACT_SIZE_CAP: usize = 400_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ChainBound {
    /// Least `N` with `|(E²)ⁿ| < (1+ε)ⁿ` for every `n ≥ N`.
    pub n: usize,
    /// From this `n` on, the polynomial bound alone certifies the condition.
    pub certificate_from: usize,
    /// `(n, size or bound, exact)` for `n = 1..certificate_from`.
    pub sizes: Vec<(usize, u128, bool)>,
}

/// Least `N` with `(1/n)·log|(E²)ⁿ| < log(1+ε)` for all `n ≥ N`.
///
/// Sizes are exact while `(E²)ⁿ` is enumerable and bounded by a polynomial
/// `P(n) ≥ |(E²)ⁿ|` afterwards: `∏(n·wᵢ+1)` over the bounding box widths of
/// `E²` in ℤᵈ, `(2nX+1)(2nY+1)(2(nZ+n²XY)+1)` in the Heisenberg group. Each
/// factor has a nonincreasing ratio `f(n+1)/f(n)`, so once `P(n₀) < (1+ε)^n₀`
/// and `P(n₀+1) ≤ (1+ε)P(n₀)` the condition holds for every `n ≥ n₀`.
pub fn chain_bound_n(e: &FiniteSubset, eps: Rational, spec: &GroupSpec, cap: usize) -> Result<ChainBound> {
    if eps <= Rational::from_integer(0) {
        return Err(Error::domain(format!("ε must be positive, got {eps}")));
    }
    if e.is_empty() {
        return Err(Error::usage("multiplier set E is empty"));
    }
    let e2 = product_set(e, e);
    let poly = match spec.family {
        Family::Lamplighter => return Err(growth_failure(&e2, eps)),
        Family::FreeAbelian(_) => {
            let (lo, hi) = zd_bounds(&e2).ok_or_else(|| Error::usage("E is not a subset of ℤᵈ"))?;
            Poly::Box(lo.iter().zip(&hi).map(|(l, h)| (h - l) as u128).collect())
        }
        Family::Heisenberg => {
            let mut m = [0u128; 3];
            for g in &e2 {
                let GroupElement::Heis(c) = g else {
                    return Err(Error::usage("E is not a Heisenberg subset"));
                };
                for i in 0..3 {
                    m[i] = m[i].max(c[i].unsigned_abs() as u128);
                }
            }
            Poly::Heis(m[0], m[1], m[2])
        }
    };
    let one_eps = Rational::from_integer(1) + eps;
    let (p, q) = (*one_eps.numer() as u64, *one_eps.denom() as u64);
    let holds = |size: u128, n: usize| {
        BigUint::from(size) * BigUint::from(q).pow(n as u32) < BigUint::from(p).pow(n as u32)
    };
    let n0 = (1..=cap + 1)
        .find(|&n| {
            let (a, b) = (poly.eval(n), poly.eval(n + 1));
            holds(a, n) && BigUint::from(b) * q <= BigUint::from(a) * p
        })
        .ok_or_else(|| {
            Error::Resource(format!(
                "polynomial growth certificate not reached by radius {cap} at ε = {eps}"
            ))
        })?;
    let mut sizes = Vec::new();
    let mut power = Some(e2.clone());
    let mut n = 1;
    let mut last_fail = 0;
    while n < n0 {
        let (size, exact) = match &power {
            Some(s) if s.len() <= EXACT_SIZE_CAP => (s.len() as u128, true),
            _ => (poly.eval(n), false),
        };
        if !holds(size, n) {
            last_fail = n;
        }
        sizes.push((n, size, exact));
        power = match power {
            Some(s) if exact => Some(product_set(&s, &e2)),
            _ => None,
        };
        n += 1;
    }
    Ok(ChainBound { n: last_fail + 1, certificate_from: n0, sizes })
}

enum Poly {
    Box(Vec<u128>),
    Heis(u128, u128, u128),
}

impl Poly {
    fn eval(&self, n: usize) -> u128 {
        let n = n as u128;
        match self {
            Poly::Box(w) => w.iter().fold(1u128, |acc, &wi| acc.saturating_mul(n * wi + 1)),
            Poly::Heis(x, y, z) => (2 * n * x + 1)
                .saturating_mul(2 * n * y + 1)
                .saturating_mul(2 * (n * z + n * n * x * y) + 1),
        }
    }
}

fn growth_failure(e2: &FiniteSubset, eps: Rational) -> Error {
    let mut sizes = vec![e2.len()];
    let mut s = e2.clone();
    while sizes.len() < 4 && s.len() <= EXACT_SIZE_CAP / 8 {
        s = product_set(&s, e2);
        sizes.push(s.len());
    }
    let ratios: Vec<String> = sizes
        .windows(2)
        .map(|w| format!("{:.3}", w[1] as f64 / w[0] as f64))
        .collect();
    Error::Hypothesis(format!(
        "lamplighter growth is exponential: |(E²)ⁿ| = {sizes:?}, successive ratios {} \
         never fall to 1+ε = {}",
        ratios.join(", "),
        Rational::from_integer(1) + eps
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_eps_one() {
        let e = FiniteSubset::interval(-1, 1);
        let b = chain_bound_n(&e, Rational::from_integer(1), &GroupSpec::zd(1), 64).unwrap();
        assert_eq!(b.n, 5);
        // independent check: 4n+1 < 2ⁿ exactly from n = 5
        let first = (1u32..64).find(|&n| (n..64).all(|m| 4 * m as u128 + 1 < 1u128 << m)).unwrap();
        assert_eq!(first, 5);
        assert!(b.sizes.iter().all(|&(n, s, exact)| exact && s == 4 * n as u128 + 1));
    }

    #[test]
    fn large_eps_gives_one() {
        let e = FiniteSubset::interval(-1, 1);
        let b = chain_bound_n(&e, Rational::from_integer(5), &GroupSpec::zd(1), 64).unwrap();
        assert_eq!(b.n, 1);
    }

    #[test]
    fn lamplighter_fails() {
        let spec = GroupSpec::lamplighter();
        let e = FiniteSubset::new(spec.symmetric_generators().into_iter().chain([spec.identity()]));
        let err = chain_bound_n(&e, Rational::new(1, 10), &spec, 64).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn heisenberg_certificate() {
        let spec = GroupSpec::heisenberg();
        let e = FiniteSubset::new(spec.symmetric_generators().into_iter().chain([spec.identity()]));
        let b = chain_bound_n(&e, Rational::from_integer(1), &spec, 200).unwrap();
        assert!(b.n >= 1 && b.n <= b.certificate_from);
    }
}
