//! Three equivalent sizes of a measure: the kernel-integrand supremum, the
//! geometric box ratio, and the Toeplitz operator norm.
//!
//! ```bash
//! cargo run --release -p bergman-kit --example carleson_norms
//! ```

use bergman_kit::covering::mu_rho;
use bergman_kit::measures::{
    carleson_constant, geometric_norm, pushforward_mu_z, rkm_norm, AtomicMeasure, DensityMeasure,
    Measure,
};
use bergman_kit::operators::MonomialBasis;
use bergman_kit::point::{GridSpec, PolyPoint};
use bergman_kit::quadrature::QuadratureSpec;
use bergman_kit::symbol::Symbol;
use num_complex::Complex64;

fn main() -> bergman_kit::Result<()> {
    println!("Carleson-measure norms");
    println!("======================\n");

    let basis = MonomialBasis::new(1, 12)?;
    let grid = GridSpec::default().capped(0.9).points(1)?;
    let quad = QuadratureSpec::new(48, 64);

    let battery: Vec<(&str, Measure)> = vec![
        (
            "normalized area dv",
            Measure::Density(DensityMeasure { density: Symbol::one(), quad }),
        ),
        ("lattice comb mu_1.0", Measure::Atomic(mu_rho(1.0, 1, 3.0)?)),
        (
            "Dirac at 0",
            Measure::Atomic(AtomicMeasure::dirac(&PolyPoint::origin(1), Complex64::new(1.0, 0.0))),
        ),
    ];

    println!("measure               kernel-sup   box ratio (r=1)   ||T_mu||");
    for (name, mu) in &battery {
        let a = rkm_norm(mu, &grid)?;
        let b = geometric_norm(mu, 1.0, &grid)?;
        let c = carleson_constant(mu, &basis)?;
        println!("{name:<22} {:<12.6} {:<17.6} {:.6}", a.value, b.value, c);
    }
    println!("(equivalent up to constants depending on the dimension and r)\n");

    println!("Mobius pushforward preserves the kernel-sup norm:");
    let mut mu = AtomicMeasure::new(1);
    mu.push(&PolyPoint::disc(Complex64::new(0.4, 0.1))?, Complex64::new(1.0, 0.0));
    mu.push(&PolyPoint::disc(Complex64::new(-0.2, 0.5))?, Complex64::new(0.5, 0.0));
    let z = PolyPoint::disc(Complex64::new(0.3, -0.6))?;
    let pushed = pushforward_mu_z(&mu, &z)?;
    // matched grids: the pushforward's sup grid is the Mobius image
    let moved_grid: Vec<PolyPoint> = grid
        .iter()
        .map(|g| bergman_kit::geometry::mobius_apply(&z, g))
        .collect::<bergman_kit::Result<_>>()?;
    let before = rkm_norm(&Measure::Atomic(mu), &grid)?.value;
    let after = rkm_norm(&Measure::Atomic(pushed), &moved_grid)?.value;
    println!("   sup before: {before:.12}");
    println!("   sup after:  {after:.12}   (difference {:.2e})", (before - after).abs());
    Ok(())
}
