//! Truncated Toeplitz matrices, reproducing kernels, and the weighted
//! translation operators.
//!
//! ```bash
//! cargo run --release -p bergman-kit --example toeplitz_operators
//! ```

use bergman_kit::operators::{
    b_z_eval, kernel_coefficients, kernel_eval, lambda_p, operator_norm, toeplitz_measure,
    toeplitz_symbol, u_z_matrix, MonomialBasis, SpaceParams,
};
use bergman_kit::measures::AtomicMeasure;
use bergman_kit::point::PolyPoint;
use bergman_kit::quadrature::QuadratureSpec;
use bergman_kit::symbol::Symbol;
use num_complex::Complex64;

fn main() -> bergman_kit::Result<()> {
    println!("Toeplitz operators in the truncated monomial basis");
    println!("==================================================\n");

    let basis = MonomialBasis::new(1, 8)?;
    let quad = QuadratureSpec::for_degree(8);

    println!("1. T_{{|z|^2}} is diagonal with entries (k+1)/(k+2):");
    let t = toeplitz_symbol(&Symbol::abs_sq(0), &basis, quad)?;
    let diag: Vec<String> = (0..5).map(|k| format!("{:.4}", t.matrix[(k, k)].re)).collect();
    println!("   diag = [{} ...]", diag.join(", "));
    println!("   ||T|| = {:.6} <= sup |a| = 1\n", operator_norm(&t)?);

    println!("2. T_z is the weighted shift sqrt((k+1)/(k+2)):");
    let tz = toeplitz_symbol(&Symbol::coordinate(0), &basis, quad)?;
    println!("   subdiagonal entry (1,0) = {:.6} = sqrt(1/2)\n", tz.matrix[(1, 0)].re);

    println!("3. A Dirac mass gives a rank-one kernel projection:");
    let mu = AtomicMeasure::dirac(&PolyPoint::origin(1), Complex64::new(1.0, 0.0));
    let tm = toeplitz_measure(&mu, &basis)?;
    println!("   T_(delta_0) entry (0,0) = {:.1}, norm = {:.6}\n", tm.matrix[(0, 0)].re, operator_norm(&tm)?);

    println!("4. Reproducing kernels:");
    let l = PolyPoint::disc(Complex64::new(0.5, 0.0))?;
    println!("   K_0.5(0.5) = {:.10} (= 1/(1-0.25)^2)", kernel_eval(&l, &l)?.re);
    let (coeffs, tail) = kernel_coefficients(&l, &basis)?;
    println!("   normalized kernel coefficients: [{:.4}, {:.4}, {:.4}, ...]", coeffs[0].re, coeffs[1].re, coeffs[2].re);
    println!("   squared-mass tail beyond degree 8: {tail:.3e}\n");

    println!("5. The translation operator U_z at p = 2:");
    let z = PolyPoint::disc(Complex64::new(0.35, 0.15))?;
    let basis16 = MonomialBasis::new(1, 16)?;
    let u = u_z_matrix(&z, &basis16, QuadratureSpec::for_degree(16))?;
    println!("   interior involution defect ||(U_z U_z - I) P|| = {:.3e}", u.involution_defect);
    let params = SpaceParams::new(2.0, 1)?;
    let w = PolyPoint::disc(Complex64::new(-0.4, 0.2))?;
    println!("   b_z(w) at p = 2: {} (identically one)", b_z_eval(&z, &w, &params)?);
    let p3 = SpaceParams::new(3.0, 1)?;
    println!(
        "   |b_z(w)| at p = 3: {:.12}, |lambda_(3)(w, z)| = {:.12} (unimodular)",
        b_z_eval(&z, &w, &p3)?.norm(),
        lambda_p(&w, &z, &p3)?.norm()
    );
    Ok(())
}
