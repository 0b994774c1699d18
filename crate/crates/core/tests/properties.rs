use amenable::comparison::{comparison_solve, ComparisonInstance, SolveOptions};
use amenable::density::{advantage_window, density_window, maximal_separated, Window};
use amenable::entropy::{EmpiricalMeasure, LayeredArray};
use amenable::group::{ball, invariance_ratio, is_invariant, k_core, product_set, FiniteSubset, GroupElement, GroupSpec};
use amenable::quasitiling::{construct_epsilon_quasitiling, disjointify, Quasitiling};
use amenable::symbolic::SymbolicArray;
use amenable::Rational;
use proptest::prelude::*;

fn pick(pool: &FiniteSubset, mask: &[bool]) -> FiniteSubset {
    FiniteSubset::new(pool.iter().zip(mask.iter().cycle()).filter(|(_, &m)| m).map(|(g, _)| g.clone()))
}

fn spec_for(i: usize) -> GroupSpec {
    [GroupSpec::zd(2), GroupSpec::heisenberg(), GroupSpec::lamplighter()][i % 3].clone()
}

fn element(spec: &GroupSpec, r: usize, k: usize) -> GroupElement {
    let b = ball(spec, r).unwrap();
    b.get(k % b.len()).unwrap().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_laws(fam in 0usize..3, i in 0usize..1000, j in 0usize..1000, k in 0usize..1000) {
        let spec = spec_for(fam);
        let (g, h, x) = (element(&spec, 3, i), element(&spec, 3, j), element(&spec, 3, k));
        prop_assert_eq!(g.mul(&h).mul(&x), g.mul(&h.mul(&x)));
        prop_assert!(g.mul(&g.inv()).is_identity());
        prop_assert_eq!(g.inv().inv(), g.clone());
        prop_assert_eq!(GroupElement::parse(g.family(), &g.to_text()).unwrap(), g);
    }

    #[test]
    fn core_and_modification_bounds(
        side in 3i64..9,
        kmask in prop::collection::vec(any::<bool>(), 9),
        fmask in prop::collection::vec(any::<bool>(), 64),
        pad in 1i64..50,
    ) {
        let f = FiniteSubset::zd_box(&[0, 0], &[side + 1, side - 1]);
        let k = pick(&FiniteSubset::zd_box(&[-1, -1], &[1, 1]), &kmask);
        prop_assume!(!k.is_empty());
        let eps = invariance_ratio(&f, &k).unwrap() + Rational::new(1, pad);
        prop_assume!(eps < Rational::from_integer(1));
        prop_assert!(is_invariant(&f, &k, eps).unwrap());
        let fk = k_core(&f, &k);
        let n = f.len() as i64;
        prop_assert!(Rational::from_integer(f.difference(&fk).len() as i64) <= eps * k.len() as i64 * n);
        // any F′ between the core and KF
        let kf = product_set(&k, &f);
        let f2 = fk.union(&pick(&kf.difference(&fk), &fmask));
        let sym = (f.difference(&f2).len() + f2.difference(&f).len()) as i64;
        prop_assert!(Rational::new(sym, n) <= eps * (k.len() as i64 + 1));
    }

    #[test]
    fn product_and_ball_monotone(fam in 0usize..3, fmask in prop::collection::vec(any::<bool>(), 30), r in 0usize..3) {
        let spec = spec_for(fam);
        let pool = ball(&spec, 2).unwrap();
        let f = pick(&pool, &fmask);
        let k = ball(&spec, 1).unwrap();
        prop_assert!(product_set(&k, &f).is_subset(&product_set(&k, &pool)));
        prop_assert!(ball(&spec, r).unwrap().is_subset(&ball(&spec, r + 1).unwrap()));
    }

    #[test]
    fn upper_subadditive_and_gap(amask in prop::collection::vec(any::<bool>(), 37), bmask in prop::collection::vec(any::<bool>(), 41), side in 1i64..4) {
        let carrier = FiniteSubset::zd_box(&[0, 0], &[11, 11]);
        let f = FiniteSubset::zd_box(&[0, 0], &[side - 1, side - 1]);
        let w = Window::new(carrier.clone(), f.clone()).unwrap();
        let a = pick(&carrier, &amask);
        let b = pick(&carrier, &bmask).difference(&a);
        let da = density_window(&a, &f, &w).unwrap();
        let db = density_window(&b, &f, &w).unwrap();
        prop_assert!(da.lower <= da.upper && da.upper <= Rational::from_integer(1));
        prop_assert!(density_window(&a.union(&b), &f, &w).unwrap().upper <= da.upper + db.upper);
        prop_assert!(db.lower - da.upper <= advantage_window(&b, &a, &f, &w).unwrap());
    }

    #[test]
    fn separated_sets_are_sparse(len in 1i64..6, wide in 1i64..4) {
        let f = FiniteSubset::zd_box(&[0, 0], &[len - 1, wide - 1]);
        let w = Window::new(FiniteSubset::zd_box(&[0, 0], &[23, 23]), f.clone()).unwrap();
        let c = maximal_separated(&f, &w).unwrap();
        let probe = FiniteSubset::zd_box(&[0, 0], &[3 * len - 1, 3 * wide - 1]);
        let pw = Window::new(w.carrier.clone(), probe.clone()).unwrap();
        // window-scale bound: a probe of k×k copies of F meets at most (k+1)² centers
        let d = density_window(&c, &probe, &pw).unwrap();
        prop_assert!(d.upper <= Rational::new(16, 9 * f.len() as i64));
    }

    #[test]
    fn disjointify_partitions_the_union(seed in 0u64..1000, big in 3i64..12, eps_n in 1i64..4) {
        let w = Window::new(FiniteSubset::interval(0, 149), FiniteSubset::interval(0, 0)).unwrap();
        let pool = vec![FiniteSubset::interval(0, big - 1), FiniteSubset::interval(0, big / 2), FiniteSubset::interval(0, 0)];
        let t = construct_epsilon_quasitiling(&pool, Rational::new(eps_n, 10), &w, seed).unwrap().tiling;
        let d = disjointify(&t).unwrap();
        prop_assert_eq!(d.union(), t.union());
        let sets = d.tile_sets();
        prop_assert_eq!(sets.iter().map(FiniteSubset::len).sum::<usize>(), d.union().len());
        for (tile, set) in d.tiles.iter().zip(&sets) {
            let src = product_set(&t.shapes[tile.origin.unwrap()], &FiniteSubset::singleton(tile.center.clone()));
            prop_assert!(set.is_subset(&src));
        }
    }

    #[test]
    fn solved_maps_are_injective_e_maps(tiles in 2i64..12, len in 5i64..9, seed in prop::collection::vec(0u8..=255, 12)) {
        let n = tiles * len;
        let w = Window::new(FiniteSubset::interval(0, n - 1), FiniteSubset::interval(0, 0)).unwrap();
        let centers = FiniteSubset::new((0..tiles).map(|t| GroupElement::z(t * len)));
        let tiling = Quasitiling::from_centers(vec![FiniteSubset::interval(0, len - 1)], vec![centers]).unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for t in 0..tiles {
            let s = seed[t as usize] as i64;
            let na = s % (len / 3 + 1);
            let off = s % len;
            for j in 0..len {
                let x = GroupElement::z(t * len + (off + j) % len);
                if j < na { a.push(x) } else if j < len - 1 - (s / 7) % 2 { b.push(x) }
            }
        }
        let inst = ComparisonInstance::new(FiniteSubset::new(a), FiniteSubset::new(b), tiling, Rational::new(1, 10), w).unwrap();
        prop_assume!(inst.advantage_violations().is_empty());
        let sol = comparison_solve(&inst, SolveOptions::default()).unwrap();
        let pairs = sol.phi.pairs();
        let mut range: Vec<GroupElement> = pairs.iter().map(|(_, y)| y.clone()).collect();
        range.sort_by_key(|g| g.to_text());
        range.dedup();
        prop_assert_eq!(range.len(), pairs.len());
        for (x, y) in &pairs {
            prop_assert!(inst.b.contains(y));
            prop_assert!(inst.e.contains(&y.mul(&x.inv())));
        }
    }

    #[test]
    fn empirical_entropy_is_subadditive(cells in prop::collection::vec(0i32..3, 300), m1 in prop::collection::vec(any::<bool>(), 6), m2 in prop::collection::vec(any::<bool>(), 6)) {
        let w = Window::new(FiniteSubset::interval(0, 299), FiniteSubset::interval(0, 0)).unwrap();
        let x = LayeredArray::single(SymbolicArray::from_fn(w, vec![0, 1, 2], |g| cells[g.coords().unwrap()[0] as usize]).unwrap());
        let shape = FiniteSubset::interval(0, 5);
        let translates: Vec<GroupElement> = (0..294).map(GroupElement::z).collect();
        let mu = EmpiricalMeasure::from_translates(&x, &shape, &[0], &translates).unwrap();
        let (f1, f2) = (pick(&shape, &m1), pick(&shape, &m2));
        let h = |s: &FiniteSubset| if s.is_empty() { 0.0 } else { mu.marginal(s, &[0]).unwrap().entropy() };
        let (h1, h2, hu, hi) = (h(&f1), h(&f2), h(&f1.union(&f2)), h(&f1.intersection(&f2)));
        prop_assert!(hu >= 0.0 && hu <= 6.0 * 3f64.log2() + 1e-9);
        prop_assert!(hu <= h1 + h2 + 1e-9);
        prop_assert!(hu + hi <= h1 + h2 + 1e-9);
    }
}
