//! Lyapunov gain-condition audit for the bundled assumption sets, plus the
//! effect of doubling all four feedback gains.
//!
//! ```text
//! cargo run --release --example stability_audit
//! ```

use quadnn::audit::{audit, AuditAssumptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["audit_reference", "audit_reference_tight", "audit_high_gain", "audit_zero_uncertainty"] {
        let path = format!("{}/scenarios/{name}.json", env!("CARGO_MANIFEST_DIR"));
        let a = AuditAssumptions::from_path(path.as_ref())?;
        let report = audit(&a)?;
        println!("== {name}");
        println!("{}", report.to_text());
        let doubled = audit(&a.with_scaled_gains(2.0))?;
        match (report.bound, doubled.bound) {
            (Some(b), Some(d)) => println!("doubling the gains: radius {:.4e} -> {:.4e}\n", b.radius, d.radius),
            _ => println!("doubling the gains: failed {:?}\n", doubled.failures()),
        }
    }
    Ok(())
}
