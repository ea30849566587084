//! Berezin transforms along radial paths: compact-looking operators decay,
//! the identity does not.
//!
//! ```bash
//! cargo run --release -p bergman-kit --example berezin_decay
//! ```

use bergman_kit::berezin::{berezin_operator, decay_profile};
use bergman_kit::operators::{one_tensor_one, toeplitz_radial_product, MonomialBasis, TruncatedOperator};
use bergman_kit::point::{Direction, PolyPoint};
use num_complex::Complex64;

fn main() -> bergman_kit::Result<()> {
    println!("Berezin decay profiles");
    println!("======================\n");

    // a degree deep enough that radius 0.99 carries a tiny truncation tail
    let basis = MonomialBasis::new(1, 800)?;
    let tail_budget = 1e-4;

    let id = TruncatedOperator::identity(basis.clone());
    let projection = one_tensor_one(&basis);
    let radial: Vec<&(dyn Fn(f64) -> f64 + Sync)> = vec![&|x: f64| 1.0 - x];
    let t_vanishing = toeplitz_radial_product(&basis, &radial)?;

    let dir = Direction::from_angles(&[0.6])?;
    let radii = [0.2, 0.5, 0.9, 0.99];

    println!("radius     B(I)          B(1x1)        B(T_(1-|z|^2))");
    let p_id = decay_profile(&id, &dir, &radii, tail_budget)?;
    let p_proj = decay_profile(&projection, &dir, &radii, tail_budget)?;
    let p_van = decay_profile(&t_vanishing, &dir, &radii, tail_budget)?;
    for i in 0..radii.len() {
        println!(
            "{:<10} {:<13.6e} {:<13.6e} {:.6e}",
            radii[i],
            p_id.values[i].re,
            p_proj.values[i].re,
            p_van.values[i].re
        );
    }
    println!("\nThe projection decays like (1-r^2)^2; the radial Toeplitz symbol");
    println!("vanishes at the boundary so its transform follows it; the identity");
    println!("stays pinned at one. Each value carries its truncation tail:");
    println!("tails at r = 0.99: {:.2e}\n", p_id.tails[3]);

    // pointwise values with the tail-budget guard
    let z = PolyPoint::disc(Complex64::new(0.5, 0.5))?;
    let bv = berezin_operator(&projection, &z, tail_budget)?;
    println!("B(1x1)(0.5+0.5i) = {:.10} (closed form {:.10})", bv.value.re, z.one_minus_sq_product().powi(2));

    // a shallow truncation refuses rim evaluations instead of degrading
    let shallow = TruncatedOperator::identity(MonomialBasis::new(1, 10)?);
    let rim = PolyPoint::disc(Complex64::new(0.95, 0.0))?;
    match berezin_operator(&shallow, &rim, 1e-8) {
        Err(e) => println!("shallow basis at |z| = 0.95 is rejected: {e}"),
        Ok(_) => println!("unexpected acceptance"),
    }
    Ok(())
}
