//! Runs a bundled scenario and prints windowed tracking metrics.
//!
//! ```text
//! cargo run --release --example tracking -- scenarios/still_air.json
//! ```

use std::time::Instant;

use quadnn::config::ScenarioConfig;
use quadnn::sim::{metrics, run_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/still_air.json").to_string());
    let cfg = ScenarioConfig::from_path(path.as_ref())?;
    let start = Instant::now();
    let log = run_scenario(&cfg)?;
    println!("{} ({}): {} records in {:.2?}", cfg.name, cfg.variant.name(), log.records.len(), start.elapsed());

    let end = log.final_time();
    let mut from = 0.0;
    while from < end {
        let to = (from + 1.0).min(end);
        let m = metrics(&log, from, to)?;
        println!("t {from:>5.1}-{to:<5.1} max|e_x| {:.3e}  max|e_R| {:.3e}  max T {:.3}", m.max_e_x, m.max_e_r, m.max_thrust);
        from = to;
    }
    Ok(())
}
