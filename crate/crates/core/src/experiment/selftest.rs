use super::{execute, Artifacts, Command, ExperimentConfig};
use crate::error::{Error, Result};

const EVENS: &str = r#"
group = "zd:1"
[window]
lo = [0]
hi = [99]
[density]
set = { periods = [2], residues = [[0]] }
folner = [2, 5]
"#;

const CHAIN_Z: &str = r#"
group = "zd:1"
[compare]
eps = "1"
multipliers = { elements = ["-1", "0", "1"] }
"#;

const CHAIN_LAMP: &str = r#"
group = "lamplighter"
[compare]
eps = "1/2"
"#;

const COMPARE: &str = r#"
group = "zd:1"
[window]
lo = [0]
hi = [59]
[compare]
eps = "1/10"
a = { periods = [6], residues = [[0], [3]] }
b = { periods = [6], residues = [[1], [2], [4], [5]] }
tile = [6]
"#;

const TILE: &str = r#"
group = "zd:2"
seed = 5
[window]
lo = [0, 0]
hi = [29, 29]
[tile]
pool = [{ side = [5, 5] }, { side = [3, 3] }, { side = [1, 1] }]
eps = "1/5"
"#;

const ENCODE: &str = r#"
group = "zd:1"
seed = 7
[window]
lo = [0]
hi = [999]
[encode]
levels = [[5], [125]]
"#;

const ENTROPY: &str = r#"
group = "zd:1"
seed = 11
[window]
lo = [0]
hi = [1799]
[entropy]
levels = [[4], [12], [36]]
terms = [1, 2, 4, 8]
oracle = ["21/10", "1/2"]
"#;

fn contains(art: &Artifacts, file: &str, needle: &str) -> std::result::Result<(), String> {
    match art.get(file) {
        Some(body) if body.contains(needle) => Ok(()),
        Some(_) => Err(format!("{file} lacks `{needle}`")),
        None => Err(format!("{file} missing")),
    }
}

fn case(cmd: Command, text: &str, expect: impl Fn(&Artifacts) -> std::result::Result<(), String>) -> std::result::Result<(), String> {
    let cfg = ExperimentConfig::parse(text).map_err(|e| e.to_string())?;
    let art = execute(cmd, &cfg, true).map_err(|e| e.to_string())?;
    expect(&art)
}

/// Built-in fixtures with known answers; any failure is an integrity error.
pub fn cmd_selftest(_check: bool) -> Result<Artifacts> {
    let results: Vec<(&str, std::result::Result<(), String>)> = vec![
        (
            "density evens",
            case(Command::Density, EVENS, |a| {
                contains(a, "density.txt", "exact = \"1/2\"")
            }),
        ),
        ("chain bound", case(Command::Compare, CHAIN_Z, |a| contains(a, "chain_bound.txt", "n = 5\n"))),
        (
            "lamplighter growth",
            match ExperimentConfig::parse(CHAIN_LAMP).and_then(|c| execute(Command::Compare, &c, true)) {
                Err(e) if e.exit_code() == 4 => Ok(()),
                Err(e) => Err(format!("expected a hypothesis failure, got {e}")),
                Ok(_) => Err("expected a hypothesis failure".into()),
            },
        ),
        ("comparison", case(Command::Compare, COMPARE, |a| contains(a, "summary.txt", "oracle_agrees = true"))),
        ("quasitiling", case(Command::Tile, TILE, |a| contains(a, "properties.txt", "eps_disjoint = true"))),
        ("encoding", case(Command::Encode, ENCODE, |a| contains(a, "roundtrip.txt", "match true"))),
        ("entropy", case(Command::Entropy, ENTROPY, |a| contains(a, "oracle.txt", "holds true"))),
    ];
    let mut report = String::new();
    let mut failed = Vec::new();
    for (name, r) in &results {
        match r {
            Ok(()) => report.push_str(&format!("PASS {name}\n")),
            Err(msg) => {
                report.push_str(&format!("FAIL {name}: {msg}\n"));
                failed.push(*name);
            }
        }
    }
    if !failed.is_empty() {
        return Err(Error::Integrity(format!("selftest failed: {}\n{report}", failed.join(", "))));
    }
    Ok(Artifacts::from([("selftest.txt".into(), report)]))
}
