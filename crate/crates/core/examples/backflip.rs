//! Three-phase backflip: climb, a bang-bang rotation through one full turn,
//! then hover, flown in a 2 m/s crosswind.
//!
//! ```text
//! cargo run --release --example backflip
//! ```

use quadnn::config::{ScenarioConfig, TrajectoryConfig};
use quadnn::sim::{metrics, run_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/backflip.json");
    let cfg = ScenarioConfig::from_path(path.as_ref())?;
    let TrajectoryConfig::Backflip { plan } = &cfg.trajectory else {
        return Err("scenario is not a backflip".into());
    };
    let dt = plan.delta_t();
    println!("flip starts {:.3} s, lasts {dt:.4} s, peak rate {:.3} rad/s", plan.t1, plan.alpha_m * dt / 2.0);
    println!("flip angle at end {:.12} rad", plan.flip_profile(plan.flip_end()).0);

    let log = run_scenario(&cfg)?;
    let end = plan.flip_end();
    for (label, from, to) in [("climb", 0.0, plan.t1), ("flip", plan.t1, end), ("recovery", end, end + 2.0), ("hover", end + 2.0, cfg.duration)] {
        let m = metrics(&log, from, to)?;
        println!(
            "{label:>8} {from:5.2}-{to:<5.2} max|e_x| {:.3e}  max|e_R| {:.3e}  max T {:.3}  saturated {}",
            m.max_e_x, m.max_e_r, m.max_thrust, m.saturation_count
        );
    }
    Ok(())
}
