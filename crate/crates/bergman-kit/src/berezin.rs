//! Berezin transforms: of truncated operators at `p = 2`, and the
//! `k`-parameter family of kernel averages of measures and symbols.
//!
//! Every operator-Berezin value carries the closed-form kernel mass tail of
//! the truncation; values whose tail exceeds the caller's budget are
//! rejected rather than silently degraded.

use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;
use crate::operators::{kernel_coefficients, MonomialBasis, TruncatedOperator};
use crate::point::{Direction, PolyPoint};
use crate::quadrature::{PolydiscRule, QuadratureSpec};
use crate::symbol::Symbol;
use num_complex::Complex64;

/// Default admissibility budget for the truncation tail of a Berezin value.
pub const DEFAULT_TAIL_BUDGET: f64 = 1e-8;

/// A Berezin value together with the truncation mass tail it was computed
/// under.
#[derive(Clone, Copy, Debug)]
pub struct BerezinValue {
    pub value: Complex64,
    pub tail: f64,
}

/// `B(S)(z) = <S k_z, k_z>` on the truncation, `p = 2`. Errors when the
/// kernel mass tail at `z` exceeds `tail_budget`.
pub fn berezin_operator(
    op: &TruncatedOperator,
    z: &PolyPoint,
    tail_budget: f64,
) -> Result<BerezinValue> {
    let (coeffs, tail) = kernel_coefficients(z, &op.basis)?;
    if tail > tail_budget {
        return Err(Error::TailBound {
            tail,
            budget: tail_budget,
        });
    }
    let image = op.apply(&coeffs);
    Ok(BerezinValue {
        value: coeffs.dotc(&image),
        tail,
    })
}

/// `k`-Berezin transform of an atomic measure: the exact finite sum
/// `(k+1)^n Σ_i c_i prod_l (1-|z_l|^2)^{2+k} (1-|p_l|^2)^k / |1-conj(p_l) z_l|^{2(2+k)}`.
pub fn k_berezin_measure(mu: &AtomicMeasure, k: usize, z: &PolyPoint) -> Result<Complex64> {
    if mu.dim() != z.dim() {
        return Err(Error::DimensionMismatch {
            left: mu.dim(),
            right: z.dim(),
        });
    }
    let n = z.dim() as i32;
    let kf = k as f64;
    let front = ((kf + 1.0).powi(n), z.coords());
    let mut acc = Complex64::default();
    for i in 0..mu.len() {
        let (p, c) = mu.atom(i);
        let mut term = 1.0;
        for (&zl, &pl) in front.1.iter().zip(p) {
            let dz = 1.0 - zl.norm_sqr();
            let dp = 1.0 - pl.norm_sqr();
            let den = (Complex64::new(1.0, 0.0) - pl.conj() * zl).norm_sqr();
            term *= dz.powf(2.0 + kf) * dp.powf(kf) / den.powf(2.0 + kf);
        }
        acc += c * term;
    }
    Ok(front.0 * acc)
}

/// `k`-Berezin transform of a bounded symbol, through the change of
/// variables: `B_k(a)(z) = (k+1)^n ∫ prod (1-|ξ_l|^2)^k a(φ_z(ξ)) dv(ξ)`.
pub fn k_berezin_symbol(
    a: &Symbol,
    k: usize,
    z: &PolyPoint,
    quad: QuadratureSpec,
) -> Result<Complex64> {
    let n = z.dim();
    let rule = PolydiscRule::build(n, quad);
    let kf = k as f64;
    let zc: Vec<Complex64> = z.coords().to_vec();
    let mut mapped = vec![Complex64::default(); n];
    let mut acc = Complex64::default();
    let mut bad: Option<Complex64> = None;
    rule.for_each(|coords, w| {
        let mut weight = w;
        for (l, &xi) in coords.iter().enumerate() {
            weight *= (1.0 - xi.norm_sqr()).powf(kf);
            mapped[l] = crate::geometry::mobius_1d(zc[l], xi);
        }
        let v = a.eval(&mapped);
        if !v.re.is_finite() || !v.im.is_finite() {
            bad = Some(coords[0]);
        }
        acc += weight * v;
    });
    if let Some(node) = bad {
        return Err(Error::SymbolNotFinite {
            re: node.re,
            im: node.im,
        });
    }
    Ok((kf + 1.0).powi(n as i32) * acc)
}

/// Both sides of the Möbius covariance identity
/// `B_k(μ)(φ_z(w)) = B_k(μ_z)(w)` for an atomic measure, with their gap.
pub struct CovarianceCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub difference: f64,
}

pub fn berezin_covariance_check(
    mu: &AtomicMeasure,
    k: usize,
    z: &PolyPoint,
    w: &PolyPoint,
) -> Result<CovarianceCheck> {
    let moved = crate::geometry::mobius_apply(z, w)?;
    let lhs = k_berezin_measure(mu, k, &moved)?;
    let pushed = crate::measures::pushforward_mu_z(mu, z)?;
    let rhs = k_berezin_measure(&pushed, k, w)?;
    Ok(CovarianceCheck {
        lhs,
        rhs,
        difference: (lhs - rhs).norm(),
    })
}

/// Sup over a grid of `|B_k(a) - a|` (the symbol-approximation error that
/// vanishes as `k` grows for uniformly continuous symbols).
pub fn approx_symbol_error(
    a: &Symbol,
    k: usize,
    grid: &[PolyPoint],
    quad: QuadratureSpec,
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "empty grid".into(),
        });
    }
    let mut worst = 0.0f64;
    for z in grid {
        let bk = k_berezin_symbol(a, k, z, quad)?;
        let direct = a.eval(z.coords());
        worst = worst.max((bk - direct).norm());
    }
    Ok(worst)
}

/// Berezin values of one operator along a radial path toward the boundary.
#[derive(Clone, Debug)]
pub struct BerezinProfile {
    pub direction: Direction,
    pub radii: Vec<f64>,
    pub values: Vec<Complex64>,
    pub tails: Vec<f64>,
}

/// Evaluate `B(S)` along `z = radius * direction`. Radii must be strictly
/// increasing and tail-admissible for the basis degree.
pub fn decay_profile(
    op: &TruncatedOperator,
    direction: &Direction,
    radii: &[f64],
    tail_budget: f64,
) -> Result<BerezinProfile> {
    if direction.dim() != op.basis.dim() {
        return Err(Error::DimensionMismatch {
            left: direction.dim(),
            right: op.basis.dim(),
        });
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name: "radii",
            reason: "radii must be strictly increasing".into(),
        });
    }
    let mut values = Vec::with_capacity(radii.len());
    let mut tails = Vec::with_capacity(radii.len());
    for &r in radii {
        let z = direction.at_radius(r)?;
        let bv = berezin_operator(op, &z, tail_budget)?;
        values.push(bv.value);
        tails.push(bv.tail);
    }
    Ok(BerezinProfile {
        direction: direction.clone(),
        radii: radii.to_vec(),
        values,
        tails,
    })
}

/// Largest radius whose kernel mass tail stays within the budget for a
/// degree-`d`, dimension-`n` basis (bisection on the closed form).
pub fn admissible_radius(n: usize, d: usize, tail_budget: f64) -> f64 {
    let tail_at = |r: f64| {
        let coords = vec![Complex64::new(r, 0.0); n];
        let z = PolyPoint::new(coords).expect("interior point");
        crate::operators::kernel_mass_tail(&z, d)
    };
    let mut lo = 0.0f64;
    let mut hi = 1.0 - 1e-12;
    if tail_at(hi) <= tail_budget {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tail_at(mid) <= tail_budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `B_0(|μ|)` — the transform of the total variation, used for the
/// domination inequality `|B_k(μ)| <= (k+1)^n B_0(|μ|)`.
pub fn b0_total_variation(mu: &AtomicMeasure, z: &PolyPoint) -> Result<f64> {
    let mut abs = AtomicMeasure::new(mu.dim());
    for i in 0..mu.len() {
        let (c, w) = mu.atom(i);
        abs.push_coords(c, Complex64::new(w.norm(), 0.0));
    }
    Ok(k_berezin_measure(&abs, 0, z)?.re)
}

pub fn default_basis_for_profiles(n: usize) -> Result<MonomialBasis> {
    // degree at which radius 0.99 is admissible at the default budget
    let d = if n == 1 { 800 } else { 48 };
    MonomialBasis::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{one_tensor_one, toeplitz_symbol, TruncatedOperator};
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rand_point(rng: &mut ChaCha8Rng, dim: usize, max: f64) -> PolyPoint {
        PolyPoint::new(
            (0..dim)
                .map(|_| crate::geometry::random_disc_point(rng, max))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn berezin_of_identity_is_one_minus_tail() {
        let basis = MonomialBasis::new(1, 30).unwrap();
        let id = TruncatedOperator::identity(basis);
        for &m in &[0.0, 0.25, 0.5] {
            let z = PolyPoint::disc(Complex64::from_polar(m, 1.0)).unwrap();
            let bv = berezin_operator(&id, &z, 1e-8).unwrap();
            assert!(bv.tail <= 1e-9, "tail {} too large", bv.tail);
            assert!((bv.value.re - 1.0).abs() <= bv.tail + 1e-15);
            assert!(bv.value.im.abs() < 1e-15);
        }
    }

    #[test]
    fn berezin_tail_budget_rejects_rim_points() {
        let basis = MonomialBasis::new(1, 8).unwrap();
        let id = TruncatedOperator::identity(basis);
        let z = PolyPoint::disc(Complex64::new(0.95, 0.0)).unwrap();
        match berezin_operator(&id, &z, 1e-8) {
            Err(Error::TailBound { .. }) => {}
            other => panic!("expected tail rejection, got {other:?}"),
        }
    }

    #[test]
    fn berezin_of_rank_one_projection() {
        let basis = MonomialBasis::new(2, 6).unwrap();
        let p = one_tensor_one(&basis);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let z = rand_point(&mut rng, 2, 0.45);
            let bv = berezin_operator(&p, &z, 1e-2).unwrap();
            let want = z.one_minus_sq_product().powi(2);
            assert_abs_diff_eq!(bv.value.re, want, epsilon = 1e-10);
            assert!(bv.value.im.abs() < 1e-12);
        }
        // zero operator
        let zero = TruncatedOperator::zero(MonomialBasis::new(2, 6).unwrap());
        let z = rand_point(&mut rng, 2, 0.3);
        assert_eq!(berezin_operator(&zero, &z, 1e-2).unwrap().value, Complex64::default());
    }

    #[test]
    fn berezin_bounded_by_operator_norm() {
        let basis = MonomialBasis::new(1, 12).unwrap();
        let t = toeplitz_symbol(&Symbol::coordinate(0), &basis, QuadratureSpec::for_degree(12)).unwrap();
        let norm = crate::operators::operator_norm(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let z = rand_point(&mut rng, 1, 0.4);
            let bv = berezin_operator(&t, &z, 1e-4).unwrap();
            assert!(bv.value.norm() <= norm + 1e-9);
        }
    }

    #[test]
    fn k_berezin_measure_examples() {
        // Dirac at zero: (k+1)^n prod (1-|z_l|^2)^{2+k}
        let mu = AtomicMeasure::dirac(&PolyPoint::origin(2), Complex64::new(1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for &k in &[0usize, 1, 4] {
            let z = rand_point(&mut rng, 2, 0.8);
            let got = k_berezin_measure(&mu, k, &z).unwrap();
            let want: f64 = ((k + 1) as f64).powi(2)
                * z.coords()
                    .iter()
                    .map(|c| (1.0 - c.norm_sqr()).powf(2.0 + k as f64))
                    .product::<f64>();
            assert_abs_diff_eq!(got.re, want, epsilon = 1e-12 * want.max(1.0));
            // at z = 0: (k+1)^n
            let at0 = k_berezin_measure(&mu, k, &PolyPoint::origin(2)).unwrap();
            assert_abs_diff_eq!(at0.re, ((k + 1) as f64).powi(2), epsilon = 1e-12);
        }
    }

    #[test]
    fn k_berezin_of_lebesgue_is_one() {
        for n in 1..=2usize {
            for &k in &[0usize, 1, 4, 16] {
                let quad = QuadratureSpec::for_k_transform(0, k);
                let z = PolyPoint::new(vec![Complex64::new(0.37, -0.21); n]).unwrap();
                let got = k_berezin_symbol(&Symbol::one(), k, &z, quad).unwrap();
                assert_abs_diff_eq!(got.re, 1.0, epsilon = 1e-10);
                assert!(got.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn k_berezin_symbol_examples() {
        // a = |w|^2 at z = 0, k = 0: ∫ |ξ|^2 dv = 1/2
        let got = k_berezin_symbol(
            &Symbol::abs_sq(0),
            0,
            &PolyPoint::origin(1),
            QuadratureSpec::for_degree(4),
        )
        .unwrap();
        assert_abs_diff_eq!(got.re, 0.5, epsilon = 1e-12);
        // odd symmetry kills Re z at the origin for every k
        for &k in &[0usize, 3, 8] {
            let got = k_berezin_symbol(
                &Symbol::re_coordinate(0),
                k,
                &PolyPoint::origin(1),
                QuadratureSpec::for_k_transform(2, k),
            )
            .unwrap();
            assert!(got.norm() < 1e-13);
        }
    }

    #[test]
    fn covariance_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        // w = 0 reduces both sides to B_k(mu)(z)
        let mu = AtomicMeasure::dirac(&rand_point(&mut rng, 1, 0.7), Complex64::new(0.8, 0.1));
        let z = rand_point(&mut rng, 1, 0.7);
        let chk = berezin_covariance_check(&mu, 2, &z, &PolyPoint::origin(1)).unwrap();
        let direct = k_berezin_measure(&mu, 2, &z).unwrap();
        assert!((chk.lhs - direct).norm() < 1e-13);
        assert!(chk.difference < 1e-12);
        // random atomic measures on the bidisc
        for _ in 0..25 {
            let mut mu = AtomicMeasure::new(2);
            for _ in 0..5 {
                mu.push(
                    &rand_point(&mut rng, 2, 0.75),
                    Complex64::new(rng.gen::<f64>() - 0.4, rng.gen::<f64>() - 0.5),
                );
            }
            let z = rand_point(&mut rng, 2, 0.7);
            let w = rand_point(&mut rng, 2, 0.7);
            for &k in &[0usize, 1, 3] {
                let chk = berezin_covariance_check(&mu, k, &z, &w).unwrap();
                assert!(
                    chk.difference < 1e-11 * (1.0 + chk.lhs.norm()),
                    "covariance gap {} at k = {k}",
                    chk.difference
                );
            }
        }
    }

    #[test]
    fn k_berezin_domination_and_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..20 {
            let mut mu = AtomicMeasure::new(1);
            let mut abs = AtomicMeasure::new(1);
            for _ in 0..6 {
                let p = rand_point(&mut rng, 1, 0.8);
                let w = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                mu.push(&p, w);
                abs.push(&p, Complex64::new(w.norm(), 0.0));
            }
            let z = rand_point(&mut rng, 1, 0.8);
            for &k in &[0usize, 2, 5] {
                let bk = k_berezin_measure(&mu, k, &z).unwrap();
                let b0 = k_berezin_measure(&abs, 0, &z).unwrap().re;
                assert!(bk.norm() <= ((k + 1) as f64) * b0 + 1e-12);
                // positivity for the nonnegative measure
                assert!(k_berezin_measure(&abs, k, &z).unwrap().re >= 0.0);
            }
        }
    }

    #[test]
    fn k_berezin_lipschitz_ratio_is_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let mut mu = AtomicMeasure::new(1);
        for _ in 0..6 {
            mu.push(
                &rand_point(&mut rng, 1, 0.75),
                Complex64::new(rng.gen::<f64>(), 0.0),
            );
        }
        // sup of B_0 over a grid as the scale
        let grid = crate::point::GridSpec::default().points(1).unwrap();
        let mut b0_sup = 0.0f64;
        for z in &grid {
            b0_sup = b0_sup.max(k_berezin_measure(&mu, 0, z).unwrap().norm());
        }
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let z1 = rand_point(&mut rng, 1, 0.9);
            let z2 = rand_point(&mut rng, 1, 0.9);
            let d = crate::geometry::rho(&z1, &z2).unwrap();
            if d < 1e-3 {
                continue;
            }
            let b1 = k_berezin_measure(&mu, 1, &z1).unwrap();
            let b2 = k_berezin_measure(&mu, 1, &z2).unwrap();
            worst = worst.max((b1 - b2).norm() / (d * b0_sup));
        }
        // recorded empirical Lipschitz ratio; generous but finite
        assert!(worst < 40.0, "Lipschitz ratio blew up: {worst}");
    }

    #[test]
    fn decay_profile_examples() {
        // rank-one projection decays like (1-r^2)^2
        let basis = MonomialBasis::new(1, 800).unwrap();
        let p = one_tensor_one(&basis);
        let dir = Direction::from_angles(&[0.0]).unwrap();
        let prof = decay_profile(&p, &dir, &[0.5, 0.9, 0.99], 1e-4).unwrap();
        let want = [0.5625, 0.0361, 0.00039601];
        for (got, want) in prof.values.iter().zip(want) {
            assert_abs_diff_eq!(got.re, want, epsilon = 1e-10);
        }
        // identity stays near one on admissible radii
        let id = TruncatedOperator::identity(MonomialBasis::new(1, 800).unwrap());
        let prof = decay_profile(&id, &dir, &[0.5, 0.9, 0.99], 1e-4).unwrap();
        for (v, t) in prof.values.iter().zip(&prof.tails) {
            assert!((v.re - 1.0).abs() <= t + 1e-14);
        }
        // zero operator profiles to zeros; decreasing radii rejected
        let zero = TruncatedOperator::zero(MonomialBasis::new(1, 10).unwrap());
        let prof = decay_profile(&zero, &dir, &[0.1, 0.2], 1e-2).unwrap();
        assert!(prof.values.iter().all(|v| v.norm() == 0.0));
        assert!(decay_profile(&zero, &dir, &[0.2, 0.1], 1e-2).is_err());
    }

    #[test]
    fn admissible_radius_matches_tail() {
        let r = admissible_radius(1, 30, 1e-8);
        let z = PolyPoint::disc(Complex64::new(r, 0.0)).unwrap();
        assert!(crate::operators::kernel_mass_tail(&z, 30) <= 1e-8);
        let z2 = PolyPoint::disc(Complex64::new((r + 0.02).min(0.999), 0.0)).unwrap();
        assert!(crate::operators::kernel_mass_tail(&z2, 30) > 1e-8);
    }
}
