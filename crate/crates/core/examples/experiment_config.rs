//! Drive a sweep from a JSON experiment description, as the `simulate`
//! subcommand does, and print the aggregate plus a few CSV rows.

use busyloss::cli::{self, ExperimentConfig};

const CONFIG: &str = r#"{
    "system": {
        "arrival_rate": 2.0,
        "service": {"type": "erlang", "shape": 2, "rate": 2.0},
        "servers": 2,
        "waiting_places": 0
    },
    "replications": 20000,
    "master_seed": 42,
    "confidence": 0.99,
    "sweep": [0, 1, 2, 3]
}"#;

fn main() -> busyloss::Result<()> {
    let config = ExperimentConfig::from_json(CONFIG)?;
    let out = cli::cmd_simulate(&config, config.master_seed.unwrap_or(cli::DEFAULT_SEED))?;
    println!("{}", out.json());
    for line in out.csv().lines().take(4) {
        println!("{line}");
    }
    Ok(())
}
