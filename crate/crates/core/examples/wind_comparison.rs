//! Baseline versus adaptive controller in a steady wind, tracking a
//! sinusoid along the first axis.
//!
//! ```text
//! cargo run --release --example wind_comparison
//! ```

use quadnn::config::{ScenarioConfig, Variant};
use quadnn::sim::{metrics, run_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/wind_sinusoid.json");
    let base = ScenarioConfig::from_path(path.as_ref())?;

    println!("{:>9} {:>11} {:>11} {:>11} {:>11} {:>9}", "variant", "window", "rms|e_x|", "max|e_x|", "max|e_R|", "max T");
    for variant in [Variant::Baseline, Variant::Adaptive] {
        let cfg = ScenarioConfig { variant, ..base.clone() };
        let log = run_scenario(&cfg)?;
        for (from, to) in [(0.0, 5.0), (5.0, 10.0), (10.0, 15.0), (15.0, 20.0)] {
            let m = metrics(&log, from, to)?;
            println!(
                "{:>9} {:>5}-{:<5} {:>11.4e} {:>11.4e} {:>11.4e} {:>9.3}",
                variant.name(),
                from,
                to,
                m.rms_e_x,
                m.max_e_x,
                m.max_e_r,
                m.max_thrust
            );
        }
    }
    Ok(())
}
