//! Thrust coefficient and inflow ratio over a grid of advance ratios, and
//! the per-rotor wrench in a steady wind.
//!
//! ```text
//! cargo run --release --example inflow_solver
//! ```

use quadnn::aero::{solve_thrust_coefficient, BladeAeroParams, HoverCoefficients, WindField, WindPlant};
use quadnn::rigid_body::RigidBodyState;
use quadnn::se3::Vec3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let blade = BladeAeroParams::default();
    let hover = HoverCoefficients::solve(&blade)?;
    println!("hover: C_T {:.6e}  lambda {:.6e}  C_Q {:.6e}", hover.c_t, hover.lambda, hover.c_q);
    println!("       C_T' {:.6e} N s^2, C_TQ {:.4e} m\n", hover.c_t_prime(&blade), hover.c_tq(&blade));

    print!("{:>8}", "mu_z\\mu_x");
    let mu_x = [0.0, 0.05, 0.1, 0.2, 0.3];
    for mx in mu_x {
        print!("{mx:>12.2}");
    }
    println!();
    for mz in [-0.1, -0.05, 0.0, 0.05, 0.1] {
        print!("{mz:>8.2} ");
        for mx in mu_x {
            let sol = solve_thrust_coefficient(mx, mz, &blade)?;
            print!("{:>12.4e}", sol.c_t);
        }
        println!();
    }

    let plant = WindPlant::new(blade, WindField::constant(Vec3::new(3.0, 5.0, 0.5)));
    let s = RigidBodyState::at_rest(Vec3::zeros());
    let omega = (0.755 * 9.81 / 4.0 / hover.c_t_prime(&blade)).sqrt();
    println!("\nrotors at the hover speed {omega:.1} rad/s in a [3, 5, 0.5] m/s wind:");
    for (j, r_j) in [Vec3::new(0.169, 0.0, -0.1), Vec3::new(0.0, 0.169, -0.1)].iter().enumerate() {
        let v_rel = quadnn::aero::relative_wind(&s, &plant.field.velocity(0.0), r_j);
        let sol = plant.rotor(&v_rel, omega)?;
        println!(
            "  rotor {}: mu_x {:.4} mu_z {:+.4} C_T {:.4e} thrust {:.4} N flap {:.2e} rad",
            j + 1,
            sol.mu_x,
            sol.mu_z,
            sol.c_t,
            sol.thrust,
            sol.alpha
        );
    }
    Ok(())
}
