//! Annular-sector decompositions of the disc and nested coverings with
//! measured overlap and diameter constants.
//!
//! ```bash
//! cargo run --release -p bergman-kit --example lattice_and_covering
//! ```

use bergman_kit::covering::{
    build_suarez_covering, cell_volume, enlarge, mu_rho, PolydiscLattice,
};
use bergman_kit::geometry::beta;
use bergman_kit::point::PolyPoint;
use bergman_kit::quadrature::QuadratureSpec;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() -> bergman_kit::Result<()> {
    println!("Lattices and coverings");
    println!("======================\n");

    let rho_scale = 0.8;
    let lattice = PolydiscLattice::build(rho_scale, 1, 2.5)?;
    let cells = lattice.cells();
    println!("1. Lattice at scale {rho_scale} covering beta <= 2.5");
    println!("   cells: {}", cells.len());
    println!("   first cell: central disc of hyperbolic radius {}", rho_scale / 2.0);
    let total: f64 = cells.iter().map(|c| c.volume).sum();
    println!(
        "   volumes sum to {total:.10} = area of the covered disc ({:.10})\n",
        lattice.axis.covered_beta().tanh().powi(2)
    );

    println!("2. Every point lies in exactly one cell, within beta <= {rho_scale} of its center");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut max_center_distance = 0.0f64;
    for _ in 0..20_000 {
        let x: f64 = rng.gen::<f64>() * lattice.axis.covered_beta().tanh().powi(2);
        let th = rng.gen::<f64>() * std::f64::consts::TAU;
        let z = PolyPoint::disc(Complex64::from_polar(x.sqrt() * (1.0 - 1e-12), th))?;
        let idx = lattice.locate(&z)?.expect("covered");
        let center = lattice.cell(&idx).center;
        max_center_distance = max_center_distance.max(beta(&z, &center)?);
    }
    println!("   max beta(point, owning center) over 20k samples: {max_center_distance:.4}\n");

    println!("3. Enlargement by sigma = 0.5 (membership via exact hyperbolic distance)");
    let grown = enlarge(&cells[..4], 0.5)?;
    for (cell, big) in cells.iter().zip(&grown) {
        println!(
            "   cell {:?}: volume {:.5} -> enlarged {:.5}",
            cell.index,
            cell_volume(cell, QuadratureSpec::default()),
            cell_volume(big, QuadratureSpec::default()),
        );
    }
    println!();

    println!("4. Nested covering (sigma = 1, k = 1): base cells at scale (k+1) sigma");
    let cov = build_suarez_covering(1.0, 1, 1, 2.5)?;
    println!("   levels: {} (base, then one enlargement per level)", cov.levels());
    println!("   base cells: {}", cov.base.cell_count());
    println!("   measured overlap bound N = {}", cov.overlap_bound);
    println!("   measured diameter bound (pseudohyperbolic) = {:.4}\n", cov.diameter_bound);

    println!("5. The lattice measure mu_rho: cell volumes at cell centers");
    let mu = mu_rho(0.8, 1, 2.5)?;
    println!("   atoms: {}", mu.len());
    println!("   total mass: {:.10}", mu.total_variation());
    Ok(())
}
