//! One network driven open-loop by a fixed composite error: the weights grow
//! until the projection pins them on the norm bound.
//!
//! ```text
//! cargo run --release --example adaptive_law
//! ```

use quadnn::adaptive::{adaptive_step, build_input_position, estimate_disturbance, AdaptiveParams, NetworkShape, NetworkWeights};
use quadnn::se3::Vec3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = AdaptiveParams { gamma_w: 5.0, gamma_v: 0.5, kappa: 1e-3, c: 1.0, w_max: 2.0, v_max: 1.0 };
    let shape = NetworkShape::new(3)?;
    let mut w = NetworkWeights::initialize(shape, params.v_max, 7);
    let input = build_input_position(&Vec3::new(0.1, -0.2, 0.05), &Vec3::new(0.0, 0.3, 0.0));
    let a = Vec3::new(0.4, -0.1, 0.2);
    let dt = 2.5e-3;
    for step in 0..=4000 {
        if step % 500 == 0 {
            let est = estimate_disturbance(&w, &input);
            println!(
                "t {:>5.2} s  |W| {:.4} (max {})  |V| {:.4} (max {})  Delta_hat {:+.3} {:+.3} {:+.3}",
                step as f64 * dt,
                w.w_norm(),
                params.w_max,
                w.v_norm(),
                params.v_max,
                est.x,
                est.y,
                est.z
            );
        }
        w = adaptive_step(&w, &input, &a, &params, dt)?;
    }
    Ok(())
}
