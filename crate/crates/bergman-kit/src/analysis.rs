//! Growth integrals, the Schur test, and sampled checks of the separated
//! masking estimate.

use crate::covering::Covering;
use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;
use crate::point::PolyPoint;
use crate::quadrature::{gauss_legendre_unit, radial_rule_with_weight};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// `F_{s,t}(z) = ∫_D (1-|w|^2)^t |1 - conj(w) z|^{-s} dv(w)`; bounded when
/// `s < 2 + t`, growing like `(1-|z|^2)^{2+t-s}` toward the rim otherwise.
/// The angular integral is a uniform rule sized to the pole distance, the
/// radial one absorbs the `(1-x)^t` endpoint weight in its nodes.
pub fn growth_integral(s: f64, t: f64, z: Complex64, radial_nodes: usize) -> Result<f64> {
    if t <= -1.0 {
        return Err(Error::Divergent(format!(
            "growth integral diverges for t = {t} <= -1"
        )));
    }
    let (xs, ws) = radial_rule_with_weight(t, radial_nodes)?;
    let zm = z.norm();
    let angular = angular_nodes_for(zm);
    let mut total = 0.0;
    for (&x, &wr) in xs.iter().zip(&ws) {
        let r = x.sqrt();
        let mut ring = 0.0;
        for j in 0..angular {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / angular as f64;
            let w = Complex64::from_polar(r, theta);
            let d = (Complex64::new(1.0, 0.0) - w.conj() * z).norm();
            ring += d.powf(-s);
        }
        total += wr * ring / angular as f64;
    }
    Ok(total)
}

fn angular_nodes_for(modulus: f64) -> usize {
    let base: f64 = 512.0;
    let needed = 24.0 / (1.0 - modulus).max(1e-4);
    (base.max(needed) as usize).next_power_of_two().min(1 << 16)
}

/// Least-squares slope of `log F` against `log(1-|z|^2)` over a modulus
/// ladder; the boundary growth exponent of the integral.
pub fn growth_exponent_fit(s: f64, t: f64, moduli: &[f64], radial_nodes: usize) -> Result<f64> {
    if moduli.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "moduli",
            reason: "need at least two points to fit a slope".into(),
        });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &m in moduli {
        let f = growth_integral(s, t, Complex64::new(m, 0.0), radial_nodes)?;
        xs.push((1.0 - m * m).ln());
        ys.push(f.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(cov / var)
}

/// Kernel family for the Schur test: `K(z, w) = λ prod_l (1-|w_l|^2)^t / |1-conj(z_l) w_l|^s`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KernelSpec {
    pub s: f64,
    pub t: f64,
    pub scale: f64,
}

impl KernelSpec {
    pub fn eval(&self, z: &PolyPoint, w: &PolyPoint) -> f64 {
        let mut v = self.scale;
        for (&a, &b) in z.coords().iter().zip(w.coords()) {
            let d = (Complex64::new(1.0, 0.0) - a.conj() * b).norm();
            v *= (1.0 - b.norm_sqr()).powf(self.t) / d.powf(self.s);
        }
        v
    }
}

/// Output of the Schur test: the two weighted-integral constants, the bound
/// `C_q^{1/q} C_p^{1/p}`, and an empirical operator norm on random inputs.
#[derive(Clone, Debug, Serialize)]
pub struct SchurReport {
    pub c_p: f64,
    pub c_q: f64,
    pub bound: f64,
    pub empirical_norm: f64,
}

/// Schur test for the integral operator with the given kernel against
/// `h(z) = prod (1-|z_l|^2)^{h_exponent}`. The constants are grid maxima of
/// the two Schur ratios; the empirical norm applies the operator to random
/// bounded test functions by quadrature.
pub fn schur_bound(
    kernel: KernelSpec,
    h_exponent: f64,
    p: f64,
    radial_nodes: usize,
    test_grid: &[PolyPoint],
) -> Result<SchurReport> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!("need p > 1, got {p}"),
        });
    }
    if test_grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "test_grid",
            reason: "empty grid".into(),
        });
    }
    let q = p / (p - 1.0);
    let n = test_grid[0].dim();
    // integrability of the two Schur integrals (per axis):
    //   w-side: (1-|w|^2)^{t + q h}; z-side: (1-|z|^2)^{p h}
    if kernel.t + q * h_exponent <= -1.0 {
        return Err(Error::Divergent(format!(
            "w-side Schur integral diverges: t + q·h = {} <= -1",
            kernel.t + q * h_exponent
        )));
    }
    if p * h_exponent <= -1.0 {
        return Err(Error::Divergent(format!(
            "z-side Schur integral diverges: p·h = {} <= -1",
            p * h_exponent
        )));
    }
    if kernel.scale == 0.0 {
        return Ok(SchurReport {
            c_p: 0.0,
            c_q: 0.0,
            bound: 0.0,
            empirical_norm: 0.0,
        });
    }

    // C_q: sup_z ∫ K(z,w) h(w)^q dv(w) / h(z)^q  — per axis the integral is
    // a growth integral with weight exponent t + q h.
    let mut c_q = 0.0f64;
    for z in test_grid {
        let mut val = kernel.scale;
        for &zl in z.coords() {
            val *= growth_integral(kernel.s, kernel.t + q * h_exponent, zl, radial_nodes)?;
        }
        let h_z: f64 = z
            .coords()
            .iter()
            .map(|c| (1.0 - c.norm_sqr()).powf(h_exponent))
            .product();
        c_q = c_q.max(val / h_z.powf(q));
    }
    // C_p: sup_w ∫ K(z,w) h(z)^p dv(z) / h(w)^p — the (1-|w|^2)^t factor of
    // the kernel comes out of the z-integral.
    let mut c_p = 0.0f64;
    for w in test_grid {
        let mut val = kernel.scale;
        for &wl in w.coords() {
            val *= (1.0 - wl.norm_sqr()).powf(kernel.t)
                * growth_integral(kernel.s, p * h_exponent, wl, radial_nodes)?;
        }
        let h_w: f64 = w
            .coords()
            .iter()
            .map(|c| (1.0 - c.norm_sqr()).powf(h_exponent))
            .product();
        c_p = c_p.max(val / h_w.powf(p));
    }
    let bound = c_q.powf(1.0 / q) * c_p.powf(1.0 / p);

    // empirical ||T f||_p / ||f||_p on random polynomial-like test functions
    let empirical_norm = empirical_operator_norm(kernel, p, n, radial_nodes)?;
    Ok(SchurReport {
        c_p,
        c_q,
        bound,
        empirical_norm,
    })
}

/// Empirical `||T f||_p / ||f||_p` on random product test functions. The
/// kernel is a product over axes, so `T` factorizes on products and the
/// per-axis ratios multiply. The numerator restricts the evaluation to
/// `|z| <= 0.95` where the inner quadrature resolves the kernel; the
/// restriction only lowers the ratio, so the Schur bound still dominates.
fn empirical_operator_norm(kernel: KernelSpec, p: f64, n: usize, radial_nodes: usize) -> Result<f64> {
    let s = kernel.s;
    let t = kernel.t;
    // inner rule for (T f)(z): absorbs the (1-|w|^2)^t endpoint weight
    let (wi_x, wi_w) = radial_rule_with_weight(t, radial_nodes.max(48))?;
    let inner_angular = 512usize;
    let inner_nodes: Vec<(Complex64, f64)> = wi_x
        .iter()
        .zip(&wi_w)
        .flat_map(|(&x, &w)| {
            let r = x.sqrt();
            (0..inner_angular).map(move |j| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / inner_angular as f64;
                (Complex64::from_polar(r, theta), w / inner_angular as f64)
            })
        })
        .collect();
    // outer rules for the p-norms
    let cap: f64 = 0.95;
    let (xs, ws) = gauss_legendre_unit(24);
    let outer_angular = 32usize;
    let outer = |max_x: f64| -> Vec<(Complex64, f64)> {
        xs.iter()
            .zip(&ws)
            .flat_map(|(&x, &w)| {
                let r = (x * max_x).sqrt();
                (0..outer_angular).map(move |j| {
                    let theta = 2.0 * std::f64::consts::PI * j as f64 / outer_angular as f64;
                    (
                        Complex64::from_polar(r, theta),
                        w * max_x / outer_angular as f64,
                    )
                })
            })
            .collect()
    };
    let outer_num = outer(cap * cap);
    let outer_den = outer(1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5c00_71);
    let mut best = 0.0f64;
    for _ in 0..4 {
        let mut product_ratio = 1.0;
        for _axis in 0..n {
            let coeff: Vec<Complex64> = (0..6)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let f = |z: Complex64| -> Complex64 {
                let mut acc = Complex64::default();
                let mut zp = Complex64::new(1.0, 0.0);
                for c in &coeff {
                    acc += c * zp;
                    zp *= z;
                }
                acc
            };
            let tf = |z: Complex64| -> Complex64 {
                let mut acc = Complex64::default();
                for &(w, ww) in &inner_nodes {
                    let d = (Complex64::new(1.0, 0.0) - z.conj() * w).norm();
                    acc += Complex64::new(ww * d.powf(-s), 0.0) * f(w);
                }
                acc
            };
            let num: f64 = outer_num
                .iter()
                .map(|&(z, w)| w * tf(z).norm().powf(p))
                .sum();
            let den: f64 = outer_den
                .iter()
                .map(|&(z, w)| w * f(z).norm().powf(p))
                .sum();
            if den > 0.0 {
                product_ratio *= (num / den).powf(1.0 / p);
            }
        }
        best = best.max(kernel.scale * product_ratio);
    }
    Ok(best)
}

/// Max over samples of the masked-kernel ratio from the separation
/// estimate: LHS is the masked integral against `μ`, RHS the claimed
/// envelope `||T_μ|| (1-δ^2)^γ prod (1-|z_l|^2)^{-1/p}` with `δ = tanh(σ/2)`.
pub fn tech1_ratio(
    sigma: f64,
    p: f64,
    gamma: f64,
    mu: &AtomicMeasure,
    covering: &Covering,
    t_mu_norm: f64,
    samples: &[PolyPoint],
) -> Result<f64> {
    if sigma < 1.0 {
        return Err(Error::InvalidParameter {
            name: "sigma",
            reason: format!("the separation estimate needs sigma >= 1, got {sigma}"),
        });
    }
    let limit = (1.0 / (2.0 * p)).min((p - 1.0) / p);
    if !(gamma > 0.0 && gamma < limit) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("need 0 < gamma < {limit}, got {gamma}"),
        });
    }
    if covering.dim != mu.dim() {
        return Err(Error::DimensionMismatch {
            left: covering.dim,
            right: mu.dim(),
        });
    }
    let delta = (sigma / 2.0).tanh();
    let envelope_scale = t_mu_norm * (1.0 - delta * delta).powf(gamma);
    let mut worst = 0.0f64;
    for z in samples {
        // F_j: the level-0 cell containing z (disjoint family);
        // K_j: complement of the sigma-enlargement of that cell.
        let idx = match covering.base.locate(z)? {
            Some(i) => i,
            None => continue,
        };
        let mut lhs = 0.0;
        for a in 0..mu.len() {
            let (coords, w) = mu.atom(a);
            // separation mask: the atom must be beyond the enlargement on
            // some axis
            let separated = coords
                .iter()
                .zip(&idx)
                .any(|(&c, &cell)| covering.base.axis.shape(cell).beta_distance(c) > sigma);
            if !separated {
                continue;
            }
            let mut term = w.norm();
            for (&zl, &wl) in z.coords().iter().zip(coords) {
                let d = (Complex64::new(1.0, 0.0) - zl.conj() * wl).norm_sqr();
                term *= (1.0 - wl.norm_sqr()).powf(-1.0 / p) / d;
            }
            lhs += term;
        }
        let rhs: f64 = envelope_scale
            * z.coords()
                .iter()
                .map(|c| (1.0 - c.norm_sqr()).powf(-1.0 / p))
                .product::<f64>();
        if rhs > 0.0 {
            worst = worst.max(lhs / rhs);
        } else if lhs > 0.0 {
            worst = f64::INFINITY;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::build_suarez_covering;
    use crate::point::GridSpec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn growth_integral_closed_forms() {
        // s = 0: ∫ (1-|w|^2)^t dv = 1/(t+1)
        for &t in &[-0.5, 0.0, 1.0] {
            let v = growth_integral(0.0, t, Complex64::new(0.3, 0.2), 64).unwrap();
            assert_abs_diff_eq!(v, 1.0 / (t + 1.0), epsilon = 1e-9);
        }
        // s = 4, t = 0: (1-|z|^2)^{-2}
        for &m in &[0.0, 0.5, 0.9] {
            let v = growth_integral(4.0, 0.0, Complex64::from_polar(m, 0.4), 128).unwrap();
            let want = (1.0 - m * m).powi(-2);
            assert!(
                (v - want).abs() <= 1e-8 * want.max(1.0),
                "F_(4,0)({m}) = {v}, want {want}"
            );
        }
        // rotation invariance
        let a = growth_integral(3.0, 0.5, Complex64::from_polar(0.7, 0.0), 96).unwrap();
        let b = growth_integral(3.0, 0.5, Complex64::from_polar(0.7, 2.1), 96).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-9 * a);
        // divergent weight rejected
        assert!(growth_integral(2.0, -1.0, Complex64::new(0.1, 0.0), 32).is_err());
    }

    #[test]
    fn growth_exponent_matches_lemma() {
        let slope = growth_exponent_fit(4.0, 0.0, &[0.9, 0.95, 0.99, 0.995, 0.999], 192).unwrap();
        assert!((slope + 2.0).abs() < 0.05, "fitted exponent {slope}");
    }

    #[test]
    fn schur_report_bounds_empirical_norm() {
        let grid = GridSpec::new(vec![0.0, 0.3, 0.6, 0.9, 0.99], 8).points(1).unwrap();
        let kernel = KernelSpec {
            s: 2.0,
            t: 0.0,
            scale: 1.0,
        };
        let rep = schur_bound(kernel, -0.25, 2.0, 64, &grid).unwrap();
        assert!(rep.c_p.is_finite() && rep.c_q.is_finite());
        assert!(rep.empirical_norm <= rep.bound * 1.05, "{rep:?}");
        // zero kernel
        let zero = schur_bound(
            KernelSpec {
                s: 2.0,
                t: 0.0,
                scale: 0.0,
            },
            -0.25,
            2.0,
            32,
            &grid,
        )
        .unwrap();
        assert_eq!(zero.bound, 0.0);
        assert_eq!(zero.empirical_norm, 0.0);
        // scaling the kernel scales bound and empirical norm
        let doubled = schur_bound(
            KernelSpec {
                s: 2.0,
                t: 0.0,
                scale: 2.0,
            },
            -0.25,
            2.0,
            64,
            &grid,
        )
        .unwrap();
        assert_abs_diff_eq!(doubled.bound, 2.0 * rep.bound, epsilon = 1e-8 * rep.bound);
        assert_abs_diff_eq!(
            doubled.empirical_norm,
            2.0 * rep.empirical_norm,
            epsilon = 1e-8 * rep.empirical_norm.max(1.0)
        );
    }

    #[test]
    fn tech1_ratio_behaviour() {
        let cov = build_suarez_covering(1.0, 0, 1, 2.5).unwrap();
        let mu = crate::covering::mu_rho(0.5, 1, 2.5).unwrap();
        let basis = crate::operators::MonomialBasis::new(1, 10).unwrap();
        let t_norm = crate::operators::operator_norm(
            &crate::operators::toeplitz_measure(&mu, &basis).unwrap(),
        )
        .unwrap();
        let samples = GridSpec::new(vec![0.1, 0.5, 0.8, 0.95], 8).points(1).unwrap();
        let ratio = tech1_ratio(1.0, 2.0, 0.2, &mu, &cov, t_norm, &samples).unwrap();
        assert!(ratio.is_finite());
        // empty measure gives zero
        let empty = AtomicMeasure::new(1);
        let r0 = tech1_ratio(1.0, 2.0, 0.2, &empty, &cov, 1.0, &samples).unwrap();
        assert_eq!(r0, 0.0);
        // out-of-range gamma rejected
        assert!(tech1_ratio(1.0, 2.0, 0.3, &mu, &cov, t_norm, &samples).is_err());
        assert!(tech1_ratio(0.5, 2.0, 0.2, &mu, &cov, t_norm, &samples).is_err());
    }

    #[test]
    fn tech1_single_far_atom_masked_out() {
        // an atom within the enlargement of every sampled cell contributes 0
        let cov = build_suarez_covering(1.0, 0, 1, 2.0).unwrap();
        let mu = AtomicMeasure::dirac(
            &PolyPoint::disc(Complex64::new(0.05, 0.0)).unwrap(),
            Complex64::new(1.0, 0.0),
        );
        // sample near the atom: the atom sits inside the enlarged cell, so
        // the mask kills the only term
        let samples = vec![PolyPoint::disc(Complex64::new(0.1, 0.0)).unwrap()];
        let r = tech1_ratio(1.0, 2.0, 0.2, &mu, &cov, 1.0, &samples).unwrap();
        assert_eq!(r, 0.0);
    }
}
