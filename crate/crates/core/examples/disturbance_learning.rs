//! The position network learning a constant force disturbance at hover.
//!
//! ```text
//! cargo run --release --example disturbance_learning
//! ```

use quadnn::config::{ScenarioConfig, Variant};
use quadnn::se3::Vec3;
use quadnn::sim::{metrics, run_scenario, SimLog};

fn mean_estimate_error(log: &SimLog, truth: &Vec3, from: f64, to: f64) -> f64 {
    let errs: Vec<f64> = log.records.iter().filter(|r| r.t >= from && r.t <= to).map(|r| (r.delta1_hat - truth).norm()).collect();
    errs.iter().sum::<f64>() / errs.len() as f64
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/constant_disturbance.json");
    let cfg = ScenarioConfig::from_path(path.as_ref())?;
    let truth = Vec3::from(cfg.disturbance.force);
    let end = cfg.duration;

    let log = run_scenario(&cfg)?;
    let last = log.records.last().expect("non-empty log");
    println!("applied force disturbance {:.3?}", truth.as_slice());
    println!("estimate at {end} s         {:.3?}", last.delta1_hat.as_slice());
    println!("mean |error| first 5 s     {:.4}", mean_estimate_error(&log, &truth, 0.0, 5.0));
    println!("mean |error| last 5 s      {:.4}", mean_estimate_error(&log, &truth, end - 5.0, end));

    let baseline = run_scenario(&ScenarioConfig { variant: Variant::Baseline, ..cfg.clone() })?;
    for (name, l) in [("baseline", &baseline), ("adaptive", &log)] {
        let m = metrics(l, end - 5.0, end)?;
        println!("{name:>8}: max |e_x| over the last 5 s {:.3e}", m.max_e_x);
    }
    Ok(())
}
