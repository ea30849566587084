//! The lattice measure as an approximate identity: T_{mu_rho} -> I as the
//! lattice scale shrinks.
//!
//! ```bash
//! cargo run --release -p bergman-kit --example approximate_identity
//! ```

use bergman_kit::covering::PolydiscLattice;
use bergman_kit::essential::approx_identity_error;
use bergman_kit::operators::{lattice_toeplitz, MonomialBasis};

fn main() -> bergman_kit::Result<()> {
    println!("Approximate identity from lattice sampling");
    println!("==========================================\n");

    let basis = MonomialBasis::new(1, 12)?;
    let beta_max = 8.0;

    println!("||T_(mu_rho) - I|| on the degree-12 truncation, beta_max = {beta_max}:");
    println!("rho       error         halving ratio   uncovered estimate");
    let mut previous: Option<f64> = None;
    for rho in [1.0, 0.5, 0.25, 0.125, 0.0625] {
        let report = approx_identity_error(rho, &basis, beta_max)?;
        let ratio = previous
            .map(|p| format!("{:.3}", report.error / p))
            .unwrap_or_else(|| "-".into());
        println!(
            "{rho:<9} {:<13.6e} {ratio:<15} {:.2e}",
            report.error, report.uncovered_estimate
        );
        previous = Some(report.error);
    }
    println!("\nThe halving ratio sits near 1/4: sector centers act like midpoint");
    println!("nodes, so the lattice quadrature error is second order in the scale.\n");

    println!("Matrices come from the exact ring-wise evaluation; entries of");
    println!("T_(mu_0.5) - I in the upper-left corner:");
    let lattice = PolydiscLattice::build(0.5, 1, beta_max)?;
    let t = lattice_toeplitz(&lattice, &basis)?;
    for b in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|a| {
                let want = if a == b { 1.0 } else { 0.0 };
                format!("{:+.2e}", (t.matrix[(b, a)].re - want))
            })
            .collect();
        println!("   [{}]", row.join(" "));
    }
    Ok(())
}
