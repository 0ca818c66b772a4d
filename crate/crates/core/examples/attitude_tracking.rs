//! Attitude-only tracking of the Euler-angle profile with a constant moment
//! disturbance. Thrust is held at `m g`, so only the attitude errors matter.
//!
//! ```text
//! cargo run --release --example attitude_tracking
//! ```

use quadnn::config::{ScenarioConfig, Variant};
use quadnn::se3::euler_extract;
use quadnn::sim::{metrics, run_scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/attitude_tracking.json");
    let base = ScenarioConfig::from_path(path.as_ref())?;
    let disturbance = base.disturbance.moment;

    for variant in [Variant::Baseline, Variant::Adaptive] {
        let log = run_scenario(&ScenarioConfig { variant, ..base.clone() })?;
        let late = metrics(&log, 5.0, log.final_time())?;
        let last = log.records.last().expect("non-empty log");
        let r = nalgebra::Matrix3::from_row_slice(&last.r);
        let angles = euler_extract(&nalgebra::Rotation3::from_matrix_unchecked(r))?;
        println!("{}:", variant.name());
        println!("  max |e_R| over 5-10 s  {:.3e}", late.max_e_r);
        println!("  rms |e_R| over 5-10 s  {:.3e}", late.rms_e_r);
        println!("  final euler [th ph ps]  {:.4} {:.4} {:.4}", angles.theta, angles.phi, angles.psi);
        println!(
            "  Delta2_hat at end       {:.4} {:.4} {:.4}  (applied {:?})",
            last.delta2_hat.x, last.delta2_hat.y, last.delta2_hat.z, disturbance
        );
    }
    Ok(())
}
