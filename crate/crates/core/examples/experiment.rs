//! Runs a CLI experiment in-process from a TOML config and prints its artifacts.

use amenable::experiment::{execute, Command, ExperimentConfig};

const CONFIG: &str = r#"
group = "zd:1"
seed = 4
[window]
lo = [0]
hi = [299]
[density]
set = { random = "1/3" }
folner = [5, 10, 20, 40]
"#;

fn main() -> amenable::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG)?;
    for (name, body) in execute(Command::Density, &cfg, true)? {
        if name == "density.txt" {
            println!("== {name}\n{body}");
        }
    }
    Ok(())
}
