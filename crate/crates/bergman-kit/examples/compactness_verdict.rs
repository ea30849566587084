//! The full compactness report: Berezin decay profiles, estimator trends,
//! and a labeled verdict for a small operator battery.
//!
//! ```bash
//! cargo run --release -p bergman-kit --example compactness_verdict
//! ```

use bergman_kit::essential::{compactness_verdict, VerdictConfig};
use bergman_kit::experiments::operator_battery;

fn main() -> bergman_kit::Result<()> {
    println!("Compactness verdicts");
    println!("====================\n");
    println!("Battery: identity, the projection onto constants, the Toeplitz");
    println!("operator of prod(1-|z_l|^2), and the coordinate shift, all at a");
    println!("profile degree deep enough to look at the 0.99 shell.\n");

    let config = VerdictConfig::default();
    println!(
        "rule: vanishing if the boundary-shell max is below {} of the profile max\n",
        config.epsilon_compact
    );

    for (name, op) in operator_battery(1, 800)? {
        let report = compactness_verdict(&op, &config)?;
        println!("{name}");
        println!("  verdict: {:?} (Toeplitz-algebra membership assumed, not decided)", report.verdict);
        println!(
            "  boundary shell |B| = {:.4e} at r = {} vs threshold {:.4e}",
            report.boundary_value, report.verdict_radius_used, report.threshold
        );
        print!("  estimator_c trend:");
        for p in &report.estimator_c_trend {
            print!(" ({}, {:.4})", p.parameter, p.value);
        }
        println!();
        print!("  estimator_b trend:");
        for p in &report.estimator_b_trend {
            print!(" ({}, {:.4})", p.parameter, p.value);
        }
        println!("\n  ||S|| = {:.6}\n", report.operator_norm);
    }
    Ok(())
}
