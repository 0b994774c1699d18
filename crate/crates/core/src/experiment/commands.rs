use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::Artifacts;
use crate::comparison::{
    chain_bound_n, comparison_solve, hall_oracle, verify_block_code, ComparisonInstance, SolveOptions,
};
use crate::density::{density_window, folner_boxes, PointSet, Window};
use crate::encoding::{
    build_codebook, decode_level, encode_level, horizon_safe, marker_density_bound, Choices, SymbolMode,
};
use crate::entropy::{
    build_oracle, check_oracle_condition, check_two_path, check_tiled_monotonicity, min_alphabet, rectangles,
    LayeredArray, Rectangle,
};
use crate::error::{Error, Result};
use crate::group::{ball, product_set, Family, FiniteSubset, GroupElement};
use crate::quasitiling::{
    build_congruent_system, check_properties, construct_epsilon_quasitiling, disjointify, Construction,
    TilingSystemWindow,
};
use crate::symbolic::SymbolicArray;
use crate::Rational;

fn cfg_err(path: &str, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

fn fail_on(command: &str, failures: Vec<String>) -> Result<()> {
    if failures.is_empty() {
        return Ok(());
    }
    Err(Error::Integrity(format!("{command} check failed: {}", failures.join("; "))))
}

fn unit(cfg: &ExperimentConfig) -> FiniteSubset {
    FiniteSubset::singleton(cfg.identity())
}

/// `[0,n)ᵈ` in ℤᵈ, the ball of radius `n` elsewhere.
fn folner_term(cfg: &ExperimentConfig, path: &str, n: i64) -> Result<FiniteSubset> {
    if n < 1 {
        return Err(cfg_err(path, "sizes must be positive"));
    }
    match cfg.family() {
        Family::FreeAbelian(d) => Ok(FiniteSubset::zd_box(&vec![0; d as usize], &vec![n - 1; d as usize])),
        _ => ball(&cfg.spec()?, n as usize).map_err(|e| cfg_err(path, e.to_string())),
    }
}

pub fn cmd_density(cfg: &ExperimentConfig, check: bool) -> Result<Artifacts> {
    let blk = cfg.block(&cfg.density, "density")?;
    if blk.folner.is_empty() {
        return Err(cfg_err("density.folner", "at least one size is needed"));
    }
    let seq = folner_boxes(&cfg.spec()?).map_err(|e| cfg_err("group", e.to_string()))?;
    let terms: Vec<FiniteSubset> = blk
        .folner
        .iter()
        .enumerate()
        .map(|(i, &n)| match n {
            1.. => seq.term(n as usize),
            _ => Err(cfg_err(&format!("density.folner[{i}]"), "indices start at 1")),
        })
        .collect::<Result<_>>()?;
    let margin = terms.iter().fold(FiniteSubset::empty(), |acc, t| acc.union(t));
    let w = cfg.window(margin)?;
    let (set, periodic) = cfg.set("density.set", &blk.set, &w.carrier, 1)?;
    let points: &dyn PointSet = match &periodic {
        Some(p) => p,
        None => &set,
    };
    let mut report = format!("group = \"{}\"\nset_size = {}\n", cfg.spec()?.descriptor(), set.len());
    if let Some(p) = &periodic {
        report.push_str(&format!("exact = \"{}\"\nperiod_diameter = {}\n", p.density(), p.period_diameter()));
    }
    let mut failures = Vec::new();
    for (n, f) in blk.folner.iter().zip(&terms) {
        let rep = density_window(points, f, &w)?;
        report.push_str(&format!("\n[[term]]\nindex = {n}\n"));
        report.push_str(&rep.to_text());
        if rep.lower > rep.upper {
            failures.push(format!("F_{n}: lower {} exceeds upper {}", rep.lower, rep.upper));
        }
        if let Some(p) = &periodic {
            let c = Rational::new(2 * p.period_diameter(), *n);
            let exact = p.density();
            for (name, v) in [("lower", rep.lower), ("upper", rep.upper)] {
                let err = if v > exact { v - exact } else { exact - v };
                if err > c {
                    failures.push(format!("F_{n}: {name} {v} is {err} from {exact}, above {c}"));
                }
            }
        }
    }
    if check {
        fail_on("density", failures)?;
    }
    Ok(Artifacts::from([("density.txt".into(), report), ("set.txt".into(), set.to_text())]))
}

/// The `[tile]` construction with its window, pool and ε.
pub(crate) fn construct_tiling(cfg: &ExperimentConfig) -> Result<(Window, Vec<FiniteSubset>, Rational, Construction)> {
    let blk = cfg.block(&cfg.tile, "tile")?;
    if blk.pool.is_empty() {
        return Err(cfg_err("tile.pool", "the shape pool is empty"));
    }
    let mut pool: Vec<FiniteSubset> = blk
        .pool
        .iter()
        .enumerate()
        .map(|(i, s)| cfg.shape(&format!("tile.pool[{i}]"), s))
        .collect::<Result<_>>()?;
    pool.sort_by(|a, b| b.len().cmp(&a.len()));
    let eps = cfg.rational("tile.eps", &blk.eps)?;
    let w = cfg.window(unit(cfg))?;
    let c = construct_epsilon_quasitiling(&pool, eps, &w, cfg.seed)?;
    Ok((w, pool, eps, c))
}

pub fn cmd_tile(cfg: &ExperimentConfig, check: bool) -> Result<Artifacts> {
    let (w, _, eps, c) = construct_tiling(cfg)?;
    let blk = cfg.block(&cfg.tile, "tile")?;
    let k = match &blk.k {
        Some(s) => cfg.shape("tile.k", s)?,
        None => FiniteSubset::new(cfg.spec()?.symmetric_generators()).union(&unit(cfg)),
    };
    let rep = check_properties(&c.tiling, &k, eps, &w)?;
    let d = disjointify(&c.tiling)?;
    let mut construction = format!(
        "eps = \"{eps}\"\nalpha = \"{}\"\npasses = {:?}\ntiles = {}\n",
        c.alpha,
        c.passes,
        c.tiling.len()
    );
    if let Some(msg) = &c.diagnostic {
        construction.push_str(&format!("diagnostic = \"{msg}\"\n"));
    }
    let properties = format!(
        "invariant = {}\neps_disjoint = {}\ndisjoint = {}\nalpha = \"{}\"\ntiling = {}\ncore_defect = \"{}\"\ncore_size = {}\nescaping_tiles = {}\n",
        rep.invariant,
        rep.eps_disjoint(),
        rep.disjoint,
        rep.alpha,
        rep.tiling,
        rep.core_defect,
        rep.core_size,
        rep.escaping_tiles
    );
    if check {
        let mut failures = Vec::new();
        if !rep.eps_disjoint() {
            failures.push("no ε-disjoint witness".to_string());
        }
        if c.alpha < Rational::from_integer(1) - eps {
            failures.push(format!("covered fraction {} below 1 − ε", c.alpha));
        }
        if d.union() != c.tiling.union() {
            failures.push("disjointify changed the union of tiles".into());
        }
        let cells: usize = d.tile_sets().iter().map(FiniteSubset::len).sum();
        if cells != d.union().len() {
            failures.push("disjointified tiles overlap".into());
        }
        fail_on("tile", failures)?;
    }
    Ok(Artifacts::from([
        ("tiling.txt".into(), c.tiling.to_text()),
        ("construction.txt".into(), construction),
        ("properties.txt".into(), properties),
        ("disjoint.txt".into(), d.to_text()),
    ]))
}

/// `Eʳ`, or `None` once the power outgrows the carrier.
fn power_within(e: &FiniteSubset, r: usize, w: &Window) -> Option<FiniteSubset> {
    let mut h = FiniteSubset::singleton(GroupElement::identity(e.family()?));
    for _ in 0..r {
        h = product_set(&h, e);
        if h.len() > w.carrier.len() {
            return None;
        }
    }
    Some(h)
}

pub fn cmd_compare(cfg: &ExperimentConfig, check: bool) -> Result<Artifacts> {
    let blk = cfg.block(&cfg.compare, "compare")?;
    let eps = cfg.rational("compare.eps", &blk.eps)?;
    let spec = cfg.spec()?;
    let multipliers = blk.multipliers.as_ref().map(|s| cfg.shape("compare.multipliers", s)).transpose()?;
    let Some(a_spec) = &blk.a else {
        let e = match multipliers {
            Some(e) => e,
            None => ball(&spec, 1)?,
        };
        let cb = chain_bound_n(&e, eps, &spec, blk.growth_cap)?;
        let mut s = format!("eps = \"{eps}\"\nmultipliers = {}\nn = {}\ncertificate_from = {}\n", e.len(), cb.n, cb.certificate_from);
        for (n, size, exact) in &cb.sizes {
            s.push_str(&format!("size {n} {size} {}\n", if *exact { "exact" } else { "bound" }));
        }
        if check {
            let e2 = product_set(&e, &e);
            let mut p = e2.clone();
            let mut failures = Vec::new();
            for (n, size, exact) in cb.sizes.iter().take(12) {
                if *exact && p.len() as u128 != *size {
                    failures.push(format!("|(E²)^{n}| is {} not {size}", p.len()));
                }
                p = product_set(&p, &e2);
            }
            fail_on("compare", failures)?;
        }
        return Ok(Artifacts::from([("chain_bound.txt".into(), s)]));
    };
    let b_spec = blk.b.as_ref().ok_or_else(|| cfg_err("compare.b", "B is required with A"))?;
    let side = blk.tile.as_ref().ok_or_else(|| cfg_err("compare.tile", "tile sides are required with A"))?;
    let w = cfg.window(unit(cfg))?;
    let tiling = cfg.aligned_tiling("compare.tile", &w, side)?;
    let (a, _) = cfg.set("compare.a", a_spec, &w.carrier, 2)?;
    let (b, _) = cfg.set("compare.b", b_spec, &w.carrier, 3)?;
    let overlap = b.intersection_len(&a);
    let b = b.difference(&a);
    let mut inst = ComparisonInstance::new(a, b, tiling, eps, w)?;
    if let Some(e) = multipliers {
        inst = inst.with_multipliers(e)?;
    }
    let oracle = (inst.a_region().len() + inst.b_region().len() <= blk.oracle_cap).then(|| hall_oracle(&inst));
    let mut summary = format!(
        "eps = \"{eps}\"\na = {}\nb = {}\noverlap_removed = {overlap}\ncomplete_tiles = {}\nadvantage_violations = {}\nmultipliers = {}\n",
        inst.a_region().len(),
        inst.b_region().len(),
        inst.complete_tiles().len(),
        inst.advantage_violations().len(),
        inst.e.len()
    );
    let sol = match comparison_solve(&inst, SolveOptions { chain_bound: blk.chain_bound, growth_cap: blk.growth_cap }) {
        Ok(sol) => sol,
        Err(Error::Hypothesis(msg)) if oracle.as_ref().is_some_and(|h| h.saturates) => {
            return Err(Error::Integrity(format!("the solver failed ({msg}) where a saturating matching exists")));
        }
        Err(e) => return Err(e),
    };
    let mut failures = Vec::new();
    if let Some(h) = &oracle {
        summary.push_str(&format!("oracle_matched = {}\noracle_needed = {}\noracle_agrees = {}\n", h.matched, h.needed, h.saturates));
        if !h.saturates {
            failures.push("the solver succeeded but the matching oracle does not saturate".into());
        }
    }
    let y = inst.y_ab()?;
    let mut blockcode = format!("horizon_radius = {}\n", sol.horizon_radius);
    match power_within(&inst.e, sol.horizon_radius, &inst.window) {
        Some(h) => {
            let v = verify_block_code(&[(y, sol.phi.clone())], &h)?;
            blockcode.push_str(&format!(
                "horizon_size = {}\nholds = {}\nchecked = {}\nskipped = {}\ndistinct_patterns = {}\n",
                h.len(),
                v.holds,
                v.checked,
                v.skipped,
                v.distinct_patterns
            ));
            if !v.holds {
                failures.push("the multiplier is not a function of the horizon pattern".into());
            }
        }
        None => blockcode.push_str("horizon_size = \"exceeds carrier\"\nchecked = 0\n"),
    }
    if let Err(e) = sol.phi.check(inst.a_region(), inst.b_region()) {
        failures.push(e.to_string());
    }
    if sol.phi.len() != inst.a_region().len() {
        failures.push(format!("φ covers {} of {} points of A", sol.phi.len(), inst.a_region().len()));
    }
    if check {
        fail_on("compare", failures)?;
    }
    Ok(Artifacts::from([
        ("summary.txt".into(), summary),
        ("phi.txt".into(), sol.phi.to_text()),
        ("trace.txt".into(), sol.trace_text()),
        ("blockcode.txt".into(), blockcode),
    ]))
}

pub fn cmd_encode(cfg: &ExperimentConfig, check: bool) -> Result<Artifacts> {
    let blk = cfg.block(&cfg.encode, "encode")?;
    let mode = match blk.mode.as_str() {
        "three" => SymbolMode::Three,
        "two" => SymbolMode::Two,
        other => return Err(cfg_err("encode.mode", format!("`{other}` is neither `three` nor `two`"))),
    };
    let w = cfg.window(unit(cfg))?;
    let levels = cfg.aligned_levels("encode.levels", &w, &blk.levels)?;
    let book = build_codebook(&levels, &w, mode)?;
    let choices = match blk.choice {
        Some(i) if (-1..=1).contains(&i) => Choices::constant(i as i8),
        Some(i) => return Err(cfg_err("encode.choice", format!("{i} is not in {{-1, 0, 1}}"))),
        None => Choices::seeded(&levels.last().expect("nonempty").all_centers(), cfg.seed),
    };
    let z = encode_level(&levels, &book, &w, &choices)?;
    let back = decode_level(&z, &book, book.top())?;
    let safe = horizon_safe(&levels, &book, &w);
    let markers = marker_density_bound(&levels, &book, &w)?;
    let mut roundtrip = String::new();
    let mut decoded = String::new();
    let mut failures = Vec::new();
    for (i, (got, want)) in back.iter().zip(&safe).enumerate() {
        let level = i + 2;
        roundtrip.push_str(&format!("level {level} tiles {} match {}\n", want.len(), got == want));
        decoded.push_str(&format!("# level {level}\n{}", got.to_text()));
        if got != want {
            failures.push(format!("level {level} does not round-trip"));
        }
    }
    let mut marker_text = String::new();
    for m in &markers {
        marker_text.push_str(&format!("level {} measured {} bound {} holds {}\n", m.level, m.measured, m.bound, m.holds));
        if !m.holds {
            failures.push(format!("level {} marker density {} above {}", m.level, m.measured, m.bound));
        }
    }
    if check {
        fail_on("encode", failures)?;
    }
    Ok(Artifacts::from([
        ("codebook.txt".into(), book.to_text()),
        ("encoded.txt".into(), z.to_text()),
        ("decoded.txt".into(), decoded),
        ("roundtrip.txt".into(), roundtrip),
        ("markers.txt".into(), marker_text),
    ]))
}

fn binary(w: &Window, cells: Vec<i32>) -> Result<SymbolicArray> {
    let mut x = SymbolicArray::new(w.clone(), vec![0, 1], 0)?;
    for (g, s) in w.carrier.iter().zip(cells) {
        x.set(g, s)?;
    }
    Ok(x)
}

/// Binary layers drawn from `seed`. Layer 0 gives every level-1 tile one of
/// `patterns` distinct random patterns of its shape; layer `j ≥ 1` gives one
/// random bit to every tile of level `min(j, K)`. Cells outside tiles are 0.
pub fn tile_pattern_layers(
    w: &Window,
    sys: &TilingSystemWindow,
    layers: usize,
    patterns: usize,
    seed: u64,
) -> Result<LayeredArray> {
    if layers == 0 || patterns == 0 {
        return Err(Error::usage("at least one layer and one pattern are needed"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let index = |g: &GroupElement| w.carrier.index_of(g);
    let lvl1 = &sys.levels[0];
    let mut tables: Vec<Vec<Vec<i32>>> = Vec::new();
    for s in &lvl1.shapes {
        if s.len() < 64 && (1u64 << s.len()) < patterns as u64 {
            return Err(Error::usage(format!("a {}-cell shape has fewer than {patterns} binary patterns", s.len())));
        }
        let mut table: Vec<Vec<i32>> = Vec::new();
        while table.len() < patterns {
            let p: Vec<i32> = (0..s.len()).map(|_| rng.gen_range(0..2)).collect();
            if !table.contains(&p) {
                table.push(p);
            }
        }
        tables.push(table);
    }
    let mut out = Vec::with_capacity(layers);
    let mut cells = vec![0; w.carrier.len()];
    for t in &lvl1.tiles {
        let pick = &tables[t.shape][rng.gen_range(0..patterns)];
        for (x, &s) in lvl1.shapes[t.shape].iter().zip(pick) {
            if let Some(i) = index(&x.mul(&t.center)) {
                cells[i] = s;
            }
        }
    }
    out.push(binary(w, cells)?);
    for j in 1..layers {
        let q = &sys.levels[j.min(sys.levels.len()) - 1];
        let mut cells = vec![0; w.carrier.len()];
        for (k, _) in q.tiles.iter().enumerate() {
            let bit = rng.gen_range(0..2);
            for g in &q.tile_set(k) {
                if let Some(i) = index(g) {
                    cells[i] = bit;
                }
            }
        }
        out.push(binary(w, cells)?);
    }
    LayeredArray::new(out)
}

/// Independent fair bits on every cell of every layer.
pub fn iid_layers(w: &Window, layers: usize, seed: u64) -> Result<LayeredArray> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = (0..layers)
        .map(|_| binary(w, (0..w.carrier.len()).map(|_| rng.gen_range(0..2)).collect()))
        .collect::<Result<Vec<_>>>()?;
    LayeredArray::new(out)
}

pub fn cmd_entropy(cfg: &ExperimentConfig, check: bool) -> Result<Artifacts> {
    let blk = cfg.block(&cfg.entropy, "entropy")?;
    let w = cfg.window(unit(cfg))?;
    let levels = cfg.aligned_levels("entropy.levels", &w, &blk.levels)?;
    let sys = build_congruent_system(&levels, &w)?;
    let layers = blk.layers.unwrap_or(levels.len());
    if layers == 0 {
        return Err(cfg_err("entropy.layers", "at least one layer is needed"));
    }
    let x = match blk.source.as_str() {
        "tile-patterns" => tile_pattern_layers(&w, &sys, layers, blk.patterns, cfg.seed)
            .map_err(|e| cfg_err("entropy.patterns", e.to_string()))?,
        "iid" => iid_layers(&w, layers, cfg.seed)?,
        other => return Err(cfg_err("entropy.source", format!("`{other}` is neither `tile-patterns` nor `iid`"))),
    };
    let p = x.symbol_partition(0..layers)?;
    let terms: Vec<FiniteSubset> = blk
        .terms
        .iter()
        .enumerate()
        .map(|(i, &n)| folner_term(cfg, &format!("entropy.terms[{i}]"), n))
        .collect::<Result<_>>()?;
    if terms.is_empty() {
        return Err(cfg_err("entropy.terms", "at least one term is needed"));
    }
    let mono = check_tiled_monotonicity(&x, &sys, &p, &terms)?;
    let mut failures: Vec<String> = mono.violations.clone();
    let mut tiled = String::new();
    for v in &mono.values {
        tiled.push_str(&v.to_text());
    }
    let mut two_path = String::new();
    for k in 1..levels.len().min(layers) {
        let c = check_two_path(&x, &sys, k)?;
        two_path.push_str(&c.to_text());
        if c.difference() > 1e-9 {
            failures.push(format!("level {k}: the two conditional entropies differ by {:.3e}", c.difference()));
        }
    }
    let mut art = Artifacts::from([
        ("tiled.txt".into(), tiled),
        ("estimate.txt".into(), mono.estimate.to_text()),
        ("monotonicity.txt".into(), mono.to_text()),
        ("two_path.txt".into(), two_path),
    ]);
    if let Some(gs) = &blk.oracle {
        if gs.len() < 2 || layers < 2 || levels.len() < 2 {
            return Err(cfg_err("entropy.oracle", "needs two values, two levels and two layers"));
        }
        let g1 = cfg.rational("entropy.oracle[0]", &gs[0])?;
        let g2 = cfg.rational("entropy.oracle[1]", &gs[1])?;
        let lower: Vec<Rectangle> = rectangles(&x, &sys, 1, 1)?.into_iter().map(|o| o.rect).collect();
        let upper: Vec<Rectangle> = rectangles(&x, &sys, 2, 2)?.into_iter().map(|o| o.rect).collect();
        let lo = build_oracle(&lower, |_| g1)?;
        let hi = build_oracle(&upper, |_| g2)?;
        let c = check_oracle_condition(&lo, &hi, &x, &sys)?;
        if !c.holds {
            failures.push("the oracle condition fails".into());
        }
        let plan = min_alphabet(&sys.levels[0].shapes, &lo)?;
        art.insert("oracle.txt".into(), format!("{}{}", c.to_text(), lo.to_text()));
        art.insert("alphabet.txt".into(), plan.to_text());
    }
    if check {
        fail_on("entropy", failures)?;
    }
    Ok(art)
}
