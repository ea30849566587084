//! The k-Berezin transform: Möbius covariance on measures and uniform
//! symbol approximation as k grows.
//!
//! ```bash
//! cargo run --release -p bergman-kit --example k_berezin_approximation
//! ```

use bergman_kit::berezin::{approx_symbol_error, berezin_covariance_check, k_berezin_measure, k_berezin_symbol};
use bergman_kit::measures::AtomicMeasure;
use bergman_kit::point::{GridSpec, PolyPoint};
use bergman_kit::quadrature::QuadratureSpec;
use bergman_kit::symbol::Symbol;
use num_complex::Complex64;

fn main() -> bergman_kit::Result<()> {
    println!("k-Berezin transforms");
    println!("====================\n");

    println!("1. Normalization: B_k(dv) is identically one");
    for k in [0usize, 4, 16] {
        let z = PolyPoint::disc(Complex64::new(0.37, -0.52))?;
        let v = k_berezin_symbol(&Symbol::one(), k, &z, QuadratureSpec::for_k_transform(0, k))?;
        println!("   k = {k:<3} B_k(1)(z) = {:.12}", v.re);
    }
    println!();

    println!("2. Covariance under the automorphism group (exact on atoms):");
    let mut mu = AtomicMeasure::new(1);
    mu.push(&PolyPoint::disc(Complex64::new(0.5, 0.2))?, Complex64::new(1.0, 0.0));
    mu.push(&PolyPoint::disc(Complex64::new(-0.3, 0.4))?, Complex64::new(0.0, 0.7));
    let z = PolyPoint::disc(Complex64::new(0.4, -0.1))?;
    let w = PolyPoint::disc(Complex64::new(0.2, 0.6))?;
    for k in [0usize, 2, 5] {
        let chk = berezin_covariance_check(&mu, k, &z, &w)?;
        println!(
            "   k = {k}: B_k(mu)(phi_z(w)) = {:.10}{:+.10}i, via pushforward {:.10}{:+.10}i, gap {:.1e}",
            chk.lhs.re, chk.lhs.im, chk.rhs.re, chk.rhs.im, chk.difference
        );
    }
    println!();

    println!("3. Dirac at the origin has the closed form (k+1) (1-|z|^2)^(2+k):");
    let d0 = AtomicMeasure::dirac(&PolyPoint::origin(1), Complex64::new(1.0, 0.0));
    for k in [0usize, 3] {
        let v = k_berezin_measure(&d0, k, &z)?;
        let want = (k as f64 + 1.0) * (1.0 - z.coord(0).norm_sqr()).powf(2.0 + k as f64);
        println!("   k = {k}: {:.10} vs closed form {:.10}", v.re, want);
    }
    println!();

    println!("4. B_k(a) -> a uniformly for rho-uniformly-continuous symbols:");
    let grid = GridSpec::default().capped(0.9).points(1)?;
    for sym in [Symbol::one_minus_abs_sq_product(), Symbol::re_coordinate(0)] {
        print!("   {:<20}", sym.name);
        for k in [1usize, 8, 32] {
            let e = approx_symbol_error(&sym, k, &grid, QuadratureSpec::for_k_transform(8, k))?;
            print!(" k={k}: {e:.3e} ");
        }
        println!();
    }
    println!("   (for 1-|z|^2 the sup error is exactly 1/(k+2), attained at 0)");
    Ok(())
}
