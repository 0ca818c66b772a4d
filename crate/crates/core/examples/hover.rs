//! Hover at the origin on the simple plant: with zero initial error the
//! controller holds the equilibrium exactly and commands `f = m g`.
//!
//! ```text
//! cargo run --release --example hover
//! ```

use quadnn::config::ScenarioConfig;
use quadnn::sim::{metrics, run_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/hover.json");
    let cfg = ScenarioConfig::from_path(path.as_ref())?;
    let log = run_scenario(&cfg)?;
    let m = metrics(&log, 0.0, log.final_time())?;
    let weight = cfg.vehicle.mass * cfg.vehicle.gravity;
    println!("f(0)        {:.12} N (m g = {weight:.12} N)", log.records[0].f);
    println!("max |e_x|   {:.3e} m", m.max_e_x);
    println!("max |e_R|   {:.3e}", m.max_e_r);
    println!("rotor T     {:?}", log.records[0].thrusts);
    Ok(())
}
