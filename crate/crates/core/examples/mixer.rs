//! Control allocation: mixing matrix, its conditioning, a round trip, and
//! what saturation does to an oversized command.
//!
//! ```text
//! cargo run --release --example mixer
//! ```

use quadnn::allocation::{mix, mixer_condition_number, mixing_matrix, unmix, RotorCommand};
use quadnn::rigid_body::RotorGeometry;
use quadnn::se3::Vec3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let geom = RotorGeometry { d_h: 0.169, d_v: 0.1, c_tq: 0.0167, t_max: 7.0, c_t_prime: 1.2e-5 };
    println!("mixing matrix{}", mixing_matrix(&geom)?);
    println!("condition number {:.3}", mixer_condition_number(&geom));

    let (f, m) = (8.0, Vec3::new(0.05, -0.08, 0.01));
    let t = mix(f, &m, &geom);
    let (f2, m2) = unmix(&t, &geom);
    println!("\nthrusts {t:.5?}");
    println!("round trip error: f {:.1e}, M {:.1e}", (f2 - f).abs(), (m2 - m).norm());

    let cmd = RotorCommand::from_wrench(30.0, &Vec3::new(0.0, 1.0, 0.0), &geom)?;
    println!("\noversized command -> thrusts {:.3?} saturated {}", cmd.thrusts, cmd.saturated);
    println!("rotor speeds {:.1?} rad/s", cmd.speeds);
    Ok(())
}
