use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn amenable(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amenable")).args(args).output().expect("binary runs")
}

fn with_config(cmd: &str, config: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    amenable(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn selftest_passes() {
    let o = amenable(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("PASS density evens") && !out.contains("FAIL"));
}

#[test]
fn malformed_config_names_the_field() {
    let o = with_config("density", &fixture("density_malformed.toml"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("density.set"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(amenable(&["density"]).status.code(), Some(2));
    assert_eq!(amenable(&["shuffle"]).status.code(), Some(2));
    assert_eq!(amenable(&["tile", "--threads", "many"]).status.code(), Some(2));
    assert_eq!(with_config("render", &fixture("render_heis.toml"), &[]).status.code(), Some(2));
}

#[test]
fn window_too_small_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    std::fs::write(
        &cfg,
        "group = \"zd:1\"\n[window]\nlo = [0]\nhi = [9]\n[density]\nset = { periods = [2], residues = [[0]] }\nfolner = [20]\n",
    )
    .unwrap();
    let o = with_config("density", &cfg, &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn exponential_growth_exits_4() {
    let o = with_config("compare", &fixture("chain_lamplighter.toml"), &[]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn run_directory_has_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = with_config("tile", &fixture("tile_z.toml"), &["--out", out.to_str().unwrap(), "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("command = \"tile\""));
    assert!(manifest.contains("tiling.txt"));
    assert!(out.join("timings.txt").exists());
}

#[test]
fn threads_do_not_change_results_but_seeds_do() {
    let cfg = fixture("density_z2_random.toml");
    let run = |extra: &[&str]| with_config("density", &cfg, extra).stdout;
    let base = run(&["--threads", "1"]);
    assert_eq!(base, run(&["--threads", "4"]));
    assert_ne!(base, run(&["--threads", "1", "--seed", "18"]));
}
