//! Möbius automorphisms and the invariant geometry of the polydisc.
//!
//! ```bash
//! cargo run --release -p bergman-kit --example mobius_geometry
//! ```

use bergman_kit::geometry::{beta, euclidean_realization, mobius_apply, rho, HyperbolicDisc};
use bergman_kit::point::PolyPoint;
use num_complex::Complex64;

fn main() -> bergman_kit::Result<()> {
    println!("Mobius geometry on the bidisc");
    println!("=============================\n");

    let z = PolyPoint::new(vec![Complex64::new(0.5, 0.0), Complex64::new(0.1, -0.4)])?;
    let w = PolyPoint::new(vec![Complex64::new(0.0, 0.5), Complex64::new(-0.3, 0.2)])?;
    let origin = PolyPoint::origin(2);

    println!("1. The automorphism exchanging 0 and z");
    let img = mobius_apply(&z, &origin)?;
    println!("   phi_z(0) = {:?}  (should be z)", img.coords());
    let img = mobius_apply(&z, &z)?;
    println!("   phi_z(z) = {:?}  (should be 0)", img.coords());
    let back = mobius_apply(&z, &mobius_apply(&z, &w)?)?;
    println!(
        "   phi_z(phi_z(w)) recovers w to {:.2e}\n",
        back.coords()
            .iter()
            .zip(w.coords())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max)
    );

    println!("2. Invariant metrics");
    println!("   rho(z, w)  = {:.6}  (max of per-axis pseudohyperbolic distances)", rho(&z, &w)?);
    println!("   beta(z, w) = {:.6}  (atanh of rho)", beta(&z, &w)?);
    let v = PolyPoint::new(vec![Complex64::new(-0.2, 0.3), Complex64::new(0.4, 0.1)])?;
    let moved = (mobius_apply(&v, &z)?, mobius_apply(&v, &w)?);
    println!(
        "   beta after applying phi_v to both points: {:.6} (invariant)\n",
        beta(&moved.0, &moved.1)?
    );

    println!("3. Distance growth toward the boundary");
    println!("   |z|      beta(0, z)");
    for m in [0.1, 0.5, 0.9, 0.99, 0.999] {
        let p = PolyPoint::disc(Complex64::new(m, 0.0))?;
        println!("   {m:<8} {:.4}", beta(&p, &PolyPoint::origin(1))?);
    }
    println!();

    println!("4. Hyperbolic boxes and their Euclidean realization");
    let disc = HyperbolicDisc::new(PolyPoint::disc(Complex64::new(0.5, 0.0))?, 0.5_f64.atanh())?;
    let (c, r) = euclidean_realization(&disc, 0)?;
    println!("   D(0.5, atanh 0.5) realizes as the Euclidean disc");
    println!("   center {:.6}, radius {:.6}", c.re, r);
    println!("   (the hyperbolic center sits off the Euclidean one)");
    println!("   normalized volume = {:.6}", disc.volume());
    Ok(())
}
