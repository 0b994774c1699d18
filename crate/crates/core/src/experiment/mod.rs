//! Config-driven runs of every module, writing one run directory per call.
//!
//! Each subcommand is a pure function of the parsed config (seed included)
//! returning named text artifacts; [`run`] adds a manifest with content
//! hashes and a separate timings file.

mod commands;
mod config;
mod render;
mod selftest;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use sha2::{Digest, Sha256};

pub use commands::{cmd_compare, cmd_density, cmd_encode, cmd_entropy, cmd_tile, iid_layers, tile_pattern_layers};
pub use config::{
    CompareBlock, DensityBlock, EncodeBlock, EntropyBlock, ExperimentConfig, RenderBlock, SetSpec, ShapeSpec,
    TileBlock, WindowSpec,
};
pub use render::{cmd_render, render_svg};
pub use selftest::cmd_selftest;

use crate::error::{Error, Result};

/// Output files of one subcommand, keyed by file name.
pub type Artifacts = BTreeMap<String, String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Density,
    Tile,
    Compare,
    Encode,
    Entropy,
    Render,
    Selftest,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Density,
        Command::Tile,
        Command::Compare,
        Command::Encode,
        Command::Entropy,
        Command::Render,
        Command::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Density => "density",
            Command::Tile => "tile",
            Command::Compare => "compare",
            Command::Encode => "encode",
            Command::Entropy => "entropy",
            Command::Render => "render",
            Command::Selftest => "selftest",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::usage(format!("unknown subcommand `{s}`")))
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Overrides the config seed.
    pub seed: Option<u64>,
    /// Run the invariant suite of the module and fail on any violation.
    pub check: bool,
    /// Worker threads; 0 picks the rayon default. Never affects outputs.
    pub threads: usize,
}

/// What a finished run produced.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub artifacts: Artifacts,
    pub manifest: String,
    pub elapsed_ms: u128,
}

/// Runs `cmd` on an already parsed config.
pub fn execute(cmd: Command, cfg: &ExperimentConfig, check: bool) -> Result<Artifacts> {
    match cmd {
        Command::Density => cmd_density(cfg, check),
        Command::Tile => cmd_tile(cfg, check),
        Command::Compare => cmd_compare(cfg, check),
        Command::Encode => cmd_encode(cfg, check),
        Command::Entropy => cmd_entropy(cfg, check),
        Command::Render => cmd_render(cfg, check),
        Command::Selftest => cmd_selftest(check),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Manifest text: inputs hash, version, seed and one hash per artifact.
pub fn manifest(cmd: Command, config_text: &str, seed: Option<u64>, artifacts: &Artifacts) -> String {
    let mut s = format!("command = \"{cmd}\"\nversion = \"{}\"\n", env!("CARGO_PKG_VERSION"));
    s.push_str(&format!("config_sha256 = \"{}\"\n", sha256_hex(config_text.as_bytes())));
    if let Some(seed) = seed {
        s.push_str(&format!("seed = {seed}\n"));
    }
    s.push_str("\n[outputs]\n");
    for (name, body) in artifacts {
        s.push_str(&format!("\"{name}\" = \"{}\"\n", sha256_hex(body.as_bytes())));
    }
    s
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Reads and validates the config, runs `cmd` on a dedicated thread pool and
/// writes artifacts, `manifest.txt` and `timings.txt` under `opts.out`.
pub fn run(cmd: Command, opts: &RunOptions) -> Result<RunSummary> {
    let (text, cfg) = match (&opts.config, cmd) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config { path: "--config".into(), message: format!("{}: {e}", path.display()) })?;
            let mut cfg = ExperimentConfig::parse(&text)?;
            if let Some(seed) = opts.seed {
                cfg.seed = seed;
            }
            (text, Some(cfg))
        }
        (None, Command::Selftest) => (String::new(), None),
        (None, _) => return Err(Error::Config { path: "--config".into(), message: "a config file is required".into() }),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::internal(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let artifacts = pool.install(|| match &cfg {
        Some(cfg) => execute(cmd, cfg, opts.check),
        None => cmd_selftest(opts.check),
    })?;
    let elapsed_ms = start.elapsed().as_millis();
    let manifest = manifest(cmd, &text, cfg.as_ref().map(|c| c.seed), &artifacts);
    if let Some(dir) = &opts.out {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        for (name, body) in &artifacts {
            let p = dir.join(name);
            std::fs::write(&p, body).map_err(|e| io_err(&p, e))?;
        }
        let p = dir.join("manifest.txt");
        std::fs::write(&p, &manifest).map_err(|e| io_err(&p, e))?;
        let p = dir.join("timings.txt");
        let timings = format!("{cmd} elapsed_ms = {elapsed_ms}\nthreads = {}\n", pool.current_num_threads());
        std::fs::write(&p, timings).map_err(|e| io_err(&p, e))?;
    }
    Ok(RunSummary { artifacts, manifest, elapsed_ms })
}
