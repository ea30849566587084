//! Möbius automorphisms and the pseudohyperbolic / hyperbolic geometry of
//! the disc and the polydisc.
//!
//! Conventions: `phi_z(w) = (z - w) / (1 - conj(z) w)` coordinatewise,
//! `rho(z, w) = max_l |phi_{z_l}(w_l)|`, `beta = atanh(rho)`. Hyperbolic
//! boxes `D(z, r)` are products of per-axis discs `beta(z_l, w_l) <= r`.

use crate::error::{Error, Result};
use crate::point::PolyPoint;
use num_complex::Complex64;

/// One-variable Möbius involution exchanging `0` and `z`.
pub fn mobius_1d(z: Complex64, w: Complex64) -> Complex64 {
    (z - w) / (Complex64::new(1.0, 0.0) - z.conj() * w)
}

/// Coordinatewise Möbius map `phi_z(w)`.
pub fn mobius_apply(z: &PolyPoint, w: &PolyPoint) -> Result<PolyPoint> {
    z.check_same_dim(w)?;
    let coords = z
        .coords()
        .iter()
        .zip(w.coords())
        .map(|(&a, &b)| mobius_1d(a, b))
        .collect();
    PolyPoint::new(coords)
}

/// One-variable pseudohyperbolic distance.
pub fn rho_1d(z: Complex64, w: Complex64) -> f64 {
    mobius_1d(z, w).norm()
}

/// Pseudohyperbolic distance on the polydisc (max over coordinates).
pub fn rho(z: &PolyPoint, w: &PolyPoint) -> Result<f64> {
    z.check_same_dim(w)?;
    Ok(z.coords()
        .iter()
        .zip(w.coords())
        .map(|(&a, &b)| rho_1d(a, b))
        .fold(0.0, f64::max))
}

/// Hyperbolic distance `beta = 1/2 log((1+rho)/(1-rho)) = atanh(rho)`.
pub fn beta(z: &PolyPoint, w: &PolyPoint) -> Result<f64> {
    Ok(rho(z, w)?.atanh())
}

pub fn beta_1d(z: Complex64, w: Complex64) -> f64 {
    rho_1d(z, w).atanh()
}

/// Hyperbolic radial coordinate `beta(0, z) = atanh(|z|)` of a disc point.
pub fn radial_coordinate(z: Complex64) -> f64 {
    z.norm().atanh()
}

/// A hyperbolic box: product of per-axis hyperbolic discs of common radius.
#[derive(Clone, Debug)]
pub struct HyperbolicDisc {
    pub center: PolyPoint,
    pub radius: f64,
}

impl HyperbolicDisc {
    pub fn new(center: PolyPoint, radius: f64) -> Result<Self> {
        if radius < 0.0 || !radius.is_finite() {
            return Err(Error::InvalidParameter {
                name: "radius",
                reason: format!("hyperbolic radius must be a nonnegative real, got {radius}"),
            });
        }
        Ok(HyperbolicDisc { center, radius })
    }

    /// Membership is per-axis: `beta(center_l, w_l) <= radius` for all `l`.
    pub fn contains(&self, w: &PolyPoint) -> Result<bool> {
        self.center.check_same_dim(w)?;
        let t = self.radius.tanh();
        Ok(self
            .center
            .coords()
            .iter()
            .zip(w.coords())
            .all(|(&c, &p)| rho_1d(c, p) <= t))
    }

    /// Normalized volume: product of per-axis Euclidean disc areas.
    pub fn volume(&self) -> f64 {
        let t = self.radius.tanh();
        self.center
            .coords()
            .iter()
            .map(|&c| {
                let (_, r) = euclidean_disc(c, t);
                r * r
            })
            .product()
    }
}

/// Euclidean disc realizing `{w : rho(z, w) <= t}` in one variable:
/// center `(1-t^2) z / (1-t^2 |z|^2)`, radius `t (1-|z|^2) / (1-t^2 |z|^2)`.
pub fn euclidean_disc(z: Complex64, t: f64) -> (Complex64, f64) {
    let zz = z.norm_sqr();
    let denom = 1.0 - t * t * zz;
    ((1.0 - t * t) * z / denom, t * (1.0 - zz) / denom)
}

/// Euclidean realization of one axis of a hyperbolic box.
pub fn euclidean_realization(d: &HyperbolicDisc, axis: usize) -> Result<(Complex64, f64)> {
    if axis >= d.center.dim() {
        return Err(Error::InvalidParameter {
            name: "axis",
            reason: format!("axis {axis} out of range for dimension {}", d.center.dim()),
        });
    }
    Ok(euclidean_disc(d.center.coord(axis), d.radius.tanh()))
}

/// Largest angular deviation `|arg w - arg c|` over the Euclidean disc
/// `(c, r)`, assuming `|c| > r` so the origin is outside.
pub fn disc_angular_half_extent(c: Complex64, r: f64) -> f64 {
    let m = c.norm();
    debug_assert!(m > r);
    (r / m).asin()
}

/// Hyperbolic distance from `z` to the real segment `[a, b]` (a geodesic
/// segment through the origin). The foot of the perpendicular onto the full
/// diameter solves `x t^2 - (1+|z|^2) t + x = 0` where `x = Re z`; clamping
/// to `[a, b]` gives the nearest segment point.
pub fn beta_to_real_segment(z: Complex64, a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    let x = z.re;
    // the root of x t^2 - (1+|z|^2) t + x = 0 with modulus < 1 (the two
    // roots have product 1); written in the form stable near x = 0
    let s = 1.0 + z.norm_sqr();
    let disc = (s * s - 4.0 * x * x).max(0.0).sqrt();
    let t_star = 2.0 * x / (s + disc);
    let t = t_star.clamp(a, b);
    beta_1d(z, Complex64::new(t, 0.0))
}

/// Hyperbolic distance from `z` to the circular arc
/// `{ |w| = radius_euclid, theta in [theta_min, theta_max] }` (a metric
/// circle about the origin). Along the circle the distance is monotone in
/// angular offset, so the nearest point has the clamped angle.
pub fn beta_to_arc(z: Complex64, radius_euclid: f64, theta_min: f64, theta_max: f64) -> f64 {
    let theta = clamp_angle(z.arg(), theta_min, theta_max);
    beta_1d(z, Complex64::from_polar(radius_euclid, theta))
}

/// Clamp an angle into `[lo, hi]` (interval width <= 2 pi), choosing the
/// circularly nearest endpoint when outside.
pub fn clamp_angle(theta: f64, lo: f64, hi: f64) -> f64 {
    use std::f64::consts::PI;
    // normalize offset from lo into [0, 2pi)
    let width = hi - lo;
    let mut off = (theta - lo) % (2.0 * PI);
    if off < 0.0 {
        off += 2.0 * PI;
    }
    if off <= width {
        return lo + off;
    }
    // outside: nearer to hi going forward or to lo going backward?
    let over = off - width; // forward gap beyond hi
    let back = 2.0 * PI - off; // backward gap before lo
    if over <= back {
        hi
    } else {
        lo
    }
}

/// Uniform-ish random point of the disc of radius `max_mod` (test support).
#[cfg(test)]
pub(crate) fn random_disc_point(rng: &mut impl rand::Rng, max_mod: f64) -> Complex64 {
    let r = max_mod * rng.gen::<f64>().sqrt();
    let th = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    Complex64::from_polar(r, th)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mobius_fixed_values() {
        // phi_z(0) = z and phi_z(z) = 0
        let z = PolyPoint::new(vec![Complex64::new(0.3, 0.4), Complex64::new(-0.2, 0.1)]).unwrap();
        let o = PolyPoint::origin(2);
        let img = mobius_apply(&z, &o).unwrap();
        for (a, b) in img.coords().iter().zip(z.coords()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-15);
        }
        let zero = mobius_apply(&z, &z).unwrap();
        for c in zero.coords() {
            assert!(c.norm() < 1e-15);
        }
        // (0.5 - 0.5i)/(1 - 0.25i) = 10/17 - 6/17 i
        let got = mobius_1d(Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.5));
        assert_abs_diff_eq!(got.re, 10.0 / 17.0, epsilon = 1e-12);
        assert_abs_diff_eq!(got.im, -6.0 / 17.0, epsilon = 1e-12);
    }

    #[test]
    fn rho_and_beta_examples() {
        let z = PolyPoint::new(vec![Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let w = PolyPoint::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.0)]).unwrap();
        assert_abs_diff_eq!(rho(&z, &w).unwrap(), 0.5, epsilon = 1e-15);
        // beta at rho = 0.5 is log(3)/2
        assert_abs_diff_eq!(0.5_f64.atanh(), 3.0_f64.ln() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(beta(&z, &w).unwrap(), 0.5493061443340549, epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let z = PolyPoint::origin(1);
        let w = PolyPoint::origin(2);
        assert!(rho(&z, &w).is_err());
        assert!(mobius_apply(&z, &w).is_err());
    }

    #[test]
    fn mobius_involution_and_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let z = random_disc_point(&mut rng, 0.98);
            let w = random_disc_point(&mut rng, 0.98);
            let xi = random_disc_point(&mut rng, 0.98);
            let back = mobius_1d(z, mobius_1d(z, w));
            assert!((back - w).norm() < 1e-12);
            // 1 - |phi_z(w)|^2 = (1-|z|^2)(1-|w|^2)/|1-conj(z)w|^2
            let lhs = 1.0 - mobius_1d(z, w).norm_sqr();
            let rhs = (1.0 - z.norm_sqr()) * (1.0 - w.norm_sqr())
                / (Complex64::new(1.0, 0.0) - z.conj() * w).norm_sqr();
            assert!((lhs - rhs).abs() < 1e-12);
            // 1 - conj(phi_z(w)) phi_z(xi)
            //   = (1-|z|^2)(1-conj(w)xi)/((1-conj(z)xi)(1-conj(w)z))
            let one = Complex64::new(1.0, 0.0);
            let lhs = one - mobius_1d(z, w).conj() * mobius_1d(z, xi);
            let rhs = (1.0 - z.norm_sqr()) * (one - w.conj() * xi)
                / ((one - z.conj() * xi) * (one - w.conj() * z));
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn beta_is_mobius_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..300 {
            let v = PolyPoint::disc(random_disc_point(&mut rng, 0.9)).unwrap();
            let z = PolyPoint::disc(random_disc_point(&mut rng, 0.9)).unwrap();
            let w = PolyPoint::disc(random_disc_point(&mut rng, 0.9)).unwrap();
            let b0 = beta(&z, &w).unwrap();
            let b1 = beta(&mobius_apply(&v, &z).unwrap(), &mobius_apply(&v, &w).unwrap()).unwrap();
            assert!((b0 - b1).abs() < 1e-11, "beta not invariant: {b0} vs {b1}");
        }
    }

    #[test]
    fn euclidean_disc_matches_membership() {
        // formula oracle cross-checked by membership sampling
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let z = Complex64::new(0.5, 0.0);
        let t = 0.5;
        let (c, r) = euclidean_disc(z, t);
        assert_abs_diff_eq!(c.re, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(r, 0.4, epsilon = 1e-12);
        for _ in 0..10_000 {
            let w = random_disc_point(&mut rng, 0.999);
            let in_euclid = (w - c).norm() <= r;
            let in_hyper = rho_1d(z, w) <= t;
            assert_eq!(in_euclid, in_hyper);
        }
        // degenerate radius
        let (c0, r0) = euclidean_disc(z, 0.0);
        assert_eq!(c0, z);
        assert_eq!(r0, 0.0);
        // centered at origin: (0, tanh r)
        let (cc, rr) = euclidean_disc(Complex64::new(0.0, 0.0), 0.7_f64.tanh());
        assert_eq!(cc.norm(), 0.0);
        assert_abs_diff_eq!(rr, 0.7_f64.tanh(), epsilon = 1e-15);
    }

    #[test]
    fn segment_distance_matches_search() {
        // closed-form foot of perpendicular vs dense minimization
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let z = random_disc_point(&mut rng, 0.95);
            let mut a = rng.gen_range(-0.9..0.9);
            let mut b = rng.gen_range(-0.9..0.9);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            let fast = beta_to_real_segment(z, a, b);
            let mut best = f64::INFINITY;
            for i in 0..=4000 {
                let t = a + (b - a) * i as f64 / 4000.0;
                best = best.min(beta_1d(z, Complex64::new(t, 0.0)));
            }
            assert!(
                fast <= best + 1e-9,
                "closed form {fast} above sampled minimum {best}"
            );
            assert!(fast >= best - 1e-6);
        }
    }

    #[test]
    fn arc_distance_matches_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let z = random_disc_point(&mut rng, 0.95);
            let rad = rng.gen_range(0.05..0.95);
            let lo = rng.gen_range(0.0..5.0);
            let hi = lo + rng.gen_range(0.01..1.2);
            let fast = beta_to_arc(z, rad, lo, hi);
            let mut best = f64::INFINITY;
            for i in 0..=4000 {
                let th = lo + (hi - lo) * i as f64 / 4000.0;
                best = best.min(beta_1d(z, Complex64::from_polar(rad, th)));
            }
            assert!(fast <= best + 1e-9);
            assert!(fast >= best - 1e-6);
        }
    }

    proptest! {
        #[test]
        fn tanh_beta_is_rho(zr in -0.9f64..0.9, zi in -0.4f64..0.4, wr in -0.9f64..0.9, wi in -0.4f64..0.4) {
            let z = PolyPoint::disc(Complex64::new(zr, zi)).unwrap();
            let w = PolyPoint::disc(Complex64::new(wr, wi)).unwrap();
            let r = rho(&z, &w).unwrap();
            prop_assert!((beta(&z, &w).unwrap().tanh() - r).abs() < 1e-13);
        }

        #[test]
        fn rho_triangle_inequality(ar in -0.9f64..0.9, ai in -0.3f64..0.3,
                                   br in -0.9f64..0.9, bi in -0.3f64..0.3,
                                   cr in -0.9f64..0.9, ci in -0.3f64..0.3) {
            let a = Complex64::new(ar, ai);
            let b = Complex64::new(br, bi);
            let c = Complex64::new(cr, ci);
            prop_assert!(rho_1d(a, c) <= rho_1d(a, b) + rho_1d(b, c) + 1e-12);
        }
    }
}
