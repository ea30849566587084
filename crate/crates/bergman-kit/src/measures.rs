//! Measures on the polydisc and their Carleson-measure norms.
//!
//! Atomic measures are the exact computable class: every integral against
//! them is a finite sum. Density measures `a dv` route through quadrature.
//! The three norms (kernel integrand sup, geometric ratio, Toeplitz norm)
//! are equivalent up to constants depending on the dimension and the
//! geometric radius; this module computes each on explicit finite grids
//! and reports the witness so callers can refine.

use crate::error::{Error, Result};
use crate::geometry::{euclidean_disc, rho_1d};
use crate::operators::{operator_norm, toeplitz_measure, toeplitz_symbol, MonomialBasis};
use crate::point::{PolyPoint, SupEstimate};
use crate::quadrature::{DiscRule, PolydiscRule, QuadratureSpec};
use crate::symbol::Symbol;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A finite complex combination of point masses, stored flat
/// (structure-of-arrays) so large lattice measures stay cheap.
#[derive(Clone, Debug, Default)]
pub struct AtomicMeasure {
    dim: usize,
    points: Vec<Complex64>,
    weights: Vec<Complex64>,
}

impl AtomicMeasure {
    pub fn new(dim: usize) -> Self {
        AtomicMeasure {
            dim,
            points: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn dirac(point: &PolyPoint, weight: Complex64) -> Self {
        let mut m = AtomicMeasure::new(point.dim());
        m.push(point, weight);
        m
    }

    pub fn from_atoms(atoms: &[(PolyPoint, Complex64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter {
                name: "atoms",
                reason: "empty atom list has no dimension; use AtomicMeasure::new".into(),
            });
        }
        let mut m = AtomicMeasure::new(atoms[0].0.dim());
        for (p, w) in atoms {
            if p.dim() != m.dim {
                return Err(Error::DimensionMismatch {
                    left: p.dim(),
                    right: m.dim,
                });
            }
            m.push(p, *w);
        }
        Ok(m)
    }

    pub fn push(&mut self, point: &PolyPoint, weight: Complex64) {
        debug_assert_eq!(point.dim(), self.dim);
        self.points.extend_from_slice(point.coords());
        self.weights.push(weight);
    }

    pub fn push_coords(&mut self, coords: &[Complex64], weight: Complex64) {
        debug_assert_eq!(coords.len(), self.dim);
        self.points.extend_from_slice(coords);
        self.weights.push(weight);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn atom(&self, i: usize) -> (&[Complex64], Complex64) {
        (&self.points[i * self.dim..(i + 1) * self.dim], self.weights[i])
    }

    pub fn atom_point(&self, i: usize) -> PolyPoint {
        PolyPoint::new(self.points[i * self.dim..(i + 1) * self.dim].to_vec())
            .expect("stored atoms are valid points")
    }

    pub fn points_flat(&self) -> &[Complex64] {
        &self.points
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// Total variation `Σ |c_i|`.
    pub fn total_variation(&self) -> f64 {
        self.weights.iter().map(|w| w.norm()).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        AtomicMeasure {
            dim: self.dim,
            points: self.points.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
        }
    }

    /// Restrict to atoms satisfying a predicate on the coordinates.
    pub fn filter(&self, keep: impl Fn(&[Complex64]) -> bool) -> Self {
        let mut out = AtomicMeasure::new(self.dim);
        for i in 0..self.len() {
            let (c, w) = self.atom(i);
            if keep(c) {
                out.push_coords(c, w);
            }
        }
        out
    }
}

/// JSON form: list of `{coords: [[re,im],...], weight: [re,im]}`.
#[derive(Serialize, Deserialize)]
struct AtomJson {
    coords: Vec<[f64; 2]>,
    weight: [f64; 2],
}

impl AtomicMeasure {
    pub fn to_json(&self) -> serde_json::Value {
        let atoms: Vec<AtomJson> = (0..self.len())
            .map(|i| {
                let (c, w) = self.atom(i);
                AtomJson {
                    coords: c.iter().map(|z| [z.re, z.im]).collect(),
                    weight: [w.re, w.im],
                }
            })
            .collect();
        serde_json::to_value(atoms).expect("atomic measure serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let atoms: Vec<AtomJson> = serde_json::from_value(value.clone())?;
        if atoms.is_empty() {
            return Err(Error::Config("empty atomic measure".into()));
        }
        let dim = atoms[0].coords.len();
        let mut m = AtomicMeasure::new(dim);
        for a in &atoms {
            let coords: Vec<Complex64> =
                a.coords.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            let p = PolyPoint::new(coords)?;
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: p.dim(),
                    right: dim,
                });
            }
            m.push(&p, Complex64::new(a.weight[0], a.weight[1]));
        }
        Ok(m)
    }
}

/// An absolutely continuous measure `a dv` with the quadrature used to
/// integrate against it.
#[derive(Clone, Debug)]
pub struct DensityMeasure {
    pub density: Symbol,
    pub quad: QuadratureSpec,
}

/// Either computable measure class.
#[derive(Clone, Debug)]
pub enum Measure {
    Atomic(AtomicMeasure),
    Density(DensityMeasure),
}

/// The reproducing-kernel integrand of the Carleson condition at `z`:
/// `∫ prod_l (1-|z_l|^2)^2 / |1-conj(z_l) w_l|^4 d|μ|(w)`.
pub fn rkm_integrand(mu: &Measure, z: &PolyPoint) -> f64 {
    let front = {
        let p: f64 = z.coords().iter().map(|c| 1.0 - c.norm_sqr()).product();
        p * p
    };
    let kernel4 = |w: &[Complex64]| -> f64 {
        let mut denom = 1.0;
        for (zc, wc) in z.coords().iter().zip(w) {
            let d = (Complex64::new(1.0, 0.0) - zc.conj() * wc).norm_sqr();
            denom *= d * d;
        }
        denom
    };
    match mu {
        Measure::Atomic(m) => {
            let mut acc = 0.0;
            for i in 0..m.len() {
                let (c, w) = m.atom(i);
                acc += w.norm() / kernel4(c);
            }
            front * acc
        }
        Measure::Density(d) => {
            let rule = PolydiscRule::build(z.dim(), d.quad);
            let mut acc = 0.0;
            rule.for_each(|coords, w| {
                acc += w * d.density.eval(coords).norm() / kernel4(coords);
            });
            front * acc
        }
    }
}

/// Sup of the kernel integrand over a finite grid (a lower bound for the
/// true sup; the witness is reported for refinement).
pub fn rkm_norm(mu: &Measure, grid: &[PolyPoint]) -> Result<SupEstimate> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "empty grid".into(),
        });
    }
    let mut best = f64::NEG_INFINITY;
    let mut witness = grid[0].clone();
    for z in grid {
        let v = rkm_integrand(mu, z);
        if v > best {
            best = v;
            witness = z.clone();
        }
    }
    Ok(SupEstimate {
        value: best,
        witness,
    })
}

/// Mass of `|μ|` on the hyperbolic box `D(z, r)`.
pub fn measure_of_box(mu: &Measure, z: &PolyPoint, r: f64) -> f64 {
    let t = r.tanh();
    match mu {
        Measure::Atomic(m) => {
            let mut acc = 0.0;
            for i in 0..m.len() {
                let (c, w) = m.atom(i);
                let inside = z
                    .coords()
                    .iter()
                    .zip(c)
                    .all(|(&a, &b)| rho_1d(a, b) <= t);
                if inside {
                    acc += w.norm();
                }
            }
            acc
        }
        Measure::Density(d) => {
            // per-axis Euclidean realization, then tensor quadrature
            let dim = z.dim();
            let rules: Vec<DiscRule> = z
                .coords()
                .iter()
                .map(|&c| {
                    let (ec, er) = euclidean_disc(c, t);
                    DiscRule::build_on_disc(d.quad, ec, er)
                })
                .collect();
            let mut acc = 0.0;
            let k = rules[0].points.len();
            let mut idx = vec![0usize; dim];
            let mut coords = vec![Complex64::default(); dim];
            loop {
                let mut w = 1.0;
                for (l, &i) in idx.iter().enumerate() {
                    coords[l] = rules[l].points[i];
                    w *= rules[l].weights[i];
                }
                acc += w * d.density.eval(&coords).norm();
                let mut l = 0;
                loop {
                    idx[l] += 1;
                    if idx[l] < k {
                        break;
                    }
                    idx[l] = 0;
                    l += 1;
                    if l == dim {
                        return acc;
                    }
                }
            }
        }
    }
}

/// Geometric Carleson norm: `max over centers of |μ|(D(z,r)) / prod (1-|z_l|^2)^2`.
pub fn geometric_norm(mu: &Measure, r: f64, centers: &[PolyPoint]) -> Result<SupEstimate> {
    if r <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: format!("geometric radius must be positive, got {r}"),
        });
    }
    if centers.is_empty() {
        return Err(Error::InvalidParameter {
            name: "centers",
            reason: "empty center list".into(),
        });
    }
    let mut best = f64::NEG_INFINITY;
    let mut witness = centers[0].clone();
    for z in centers {
        let denom = {
            let p = z.one_minus_sq_product();
            p * p
        };
        let v = measure_of_box(mu, z, r) / denom;
        if v > best {
            best = v;
            witness = z.clone();
        }
    }
    Ok(SupEstimate {
        value: best,
        witness,
    })
}

/// Operator-norm Carleson constant at `p = 2`: `||T_|μ|||` on the truncation.
pub fn carleson_constant(mu: &Measure, basis: &MonomialBasis) -> Result<f64> {
    let op = match mu {
        Measure::Atomic(m) => {
            let abs = AtomicMeasure {
                dim: m.dim(),
                points: m.points.clone(),
                weights: m.weights.iter().map(|w| Complex64::new(w.norm(), 0.0)).collect(),
            };
            toeplitz_measure(&abs, basis)?
        }
        Measure::Density(d) => {
            let abs = Symbol::new(
                format!("|{}|", d.density.name),
                d.density.sup_bound,
                {
                    let inner = d.density.clone();
                    move |z: &[Complex64]| Complex64::new(inner.eval(z).norm(), 0.0)
                },
            );
            toeplitz_symbol(&abs, basis, d.quad)?
        }
    };
    operator_norm(&op)
}

/// Möbius pushforward `μ_z`: atoms move by `φ_z`, weights pick up the factor
/// `prod_l (1-|z_l|^2)^2 / |1-conj(z_l) p_l|^4`, making
/// `∫ f(φ_z(ξ)) prod (1-|z_l|^2)^2/|1-conj(z_l)ξ_l|^4 dμ(ξ) = ∫ f dμ_z` exact.
pub fn pushforward_mu_z(mu: &AtomicMeasure, z: &PolyPoint) -> Result<AtomicMeasure> {
    if mu.dim() != z.dim() {
        return Err(Error::DimensionMismatch {
            left: mu.dim(),
            right: z.dim(),
        });
    }
    let mut out = AtomicMeasure::new(mu.dim());
    let one = Complex64::new(1.0, 0.0);
    let mut mapped = vec![Complex64::default(); mu.dim()];
    for i in 0..mu.len() {
        let (coords, w) = mu.atom(i);
        let mut factor = 1.0;
        for (l, (&zc, &pc)) in z.coords().iter().zip(coords).enumerate() {
            let d = (one - zc.conj() * pc).norm_sqr();
            let num = 1.0 - zc.norm_sqr();
            factor *= num * num / (d * d);
            mapped[l] = crate::geometry::mobius_1d(zc, pc);
        }
        out.push_coords(&mapped, w * factor);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::GridSpec;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn lebesgue(quad: QuadratureSpec) -> Measure {
        Measure::Density(DensityMeasure {
            density: Symbol::one(),
            quad,
        })
    }

    #[test]
    fn rkm_of_lebesgue_is_one_everywhere() {
        // series oracle: ∫ |1 - conj(z) w|^{-4} dv(w) = (1-|z|^2)^{-2}
        let mu = lebesgue(QuadratureSpec::new(96, 256));
        for &m in &[0.0, 0.3, 0.6, 0.9] {
            let z = PolyPoint::disc(Complex64::from_polar(m, 0.7)).unwrap();
            let v = rkm_integrand(&mu, &z);
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn rkm_of_diracs() {
        // δ_0: integrand is prod (1-|z_l|^2)^2, sup attained at 0 with value 1
        let mu = Measure::Atomic(AtomicMeasure::dirac(
            &PolyPoint::origin(2),
            Complex64::new(1.0, 0.0),
        ));
        let grid = GridSpec::default().points(2).unwrap();
        let est = rkm_norm(&mu, &grid).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-12);
        assert_eq!(est.witness.coords()[0].norm(), 0.0);
        // two-atom example on the bidisc
        let p1 = PolyPoint::new(vec![Complex64::new(0.9, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let p2 = PolyPoint::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.9, 0.0)]).unwrap();
        let mut m = AtomicMeasure::new(2);
        m.push(&p1, Complex64::new(1.0, 0.0));
        m.push(&p2, Complex64::new(1.0, 0.0));
        let v = rkm_integrand(&Measure::Atomic(m), &p1);
        let want = (0.19f64 * 0.19) * (1.0 / 0.19f64.powi(4) + 1.0);
        assert_abs_diff_eq!(v, want, epsilon = 1e-10);
    }

    #[test]
    fn geometric_norm_examples() {
        let origin = PolyPoint::origin(1);
        let mu = Measure::Atomic(AtomicMeasure::dirac(&origin, Complex64::new(1.0, 0.0)));
        let est = geometric_norm(&mu, 1.0, &[origin.clone()]).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-12);
        // no atoms in any box -> 0
        let far = PolyPoint::disc(Complex64::new(0.99, 0.0)).unwrap();
        let est = geometric_norm(&mu, 0.1, &[far]).unwrap();
        assert_eq!(est.value, 0.0);
        // Lebesgue: μ(D(z,r)) = t^2 (1-|z|^2)^2 / (1-t^2|z|^2)^2
        let mu = lebesgue(QuadratureSpec::new(24, 32));
        let r: f64 = 1.0;
        let t = r.tanh();
        for &m in &[0.0, 0.4, 0.8] {
            let z = PolyPoint::disc(Complex64::from_polar(m, 1.1)).unwrap();
            let got = measure_of_box(&mu, &z, r);
            let want = t * t * (1.0 - m * m).powi(2) / (1.0 - t * t * m * m).powi(2);
            assert_abs_diff_eq!(got, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn carleson_constant_examples() {
        let basis = MonomialBasis::new(1, 8).unwrap();
        // dv -> identity -> norm 1
        let mu = lebesgue(QuadratureSpec::for_degree(8));
        assert_abs_diff_eq!(carleson_constant(&mu, &basis).unwrap(), 1.0, epsilon = 1e-8);
        // 2 dv -> 2
        let mu2 = Measure::Density(DensityMeasure {
            density: Symbol::constant(Complex64::new(2.0, 0.0)),
            quad: QuadratureSpec::for_degree(8),
        });
        assert_abs_diff_eq!(carleson_constant(&mu2, &basis).unwrap(), 2.0, epsilon = 1e-8);
        // δ_0 -> rank-one projection -> 1
        let d0 = Measure::Atomic(AtomicMeasure::dirac(
            &PolyPoint::origin(1),
            Complex64::new(1.0, 0.0),
        ));
        assert_abs_diff_eq!(carleson_constant(&d0, &basis).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn pushforward_formulas() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        // δ_0 pushes to δ_z with weight prod (1-|z_l|^2)^2
        let z = PolyPoint::new(vec![Complex64::new(0.5, 0.2), Complex64::new(-0.1, 0.6)]).unwrap();
        let mu = AtomicMeasure::dirac(&PolyPoint::origin(2), Complex64::new(1.0, 0.0));
        let pushed = pushforward_mu_z(&mu, &z).unwrap();
        assert_eq!(pushed.len(), 1);
        let (coords, w) = pushed.atom(0);
        for (a, b) in coords.iter().zip(z.coords()) {
            assert!((a - b).norm() < 1e-15);
        }
        let want = z.one_minus_sq_product().powi(2);
        assert_abs_diff_eq!(w.re, want, epsilon = 1e-14);
        // z = 0: atoms flip sign, weights unchanged
        let p = PolyPoint::disc(Complex64::new(0.3, -0.4)).unwrap();
        let mu = AtomicMeasure::dirac(&p, Complex64::new(2.0, 1.0));
        let pushed = pushforward_mu_z(&mu, &PolyPoint::origin(1)).unwrap();
        let (coords, w) = pushed.atom(0);
        assert!((coords[0] + p.coord(0)).norm() < 1e-15);
        assert!((w - Complex64::new(2.0, 1.0)).norm() < 1e-15);
        // change-of-variables identity with f = k_w^{(2)} on random inputs
        for _ in 0..50 {
            let dim = 2;
            let randp = |rng: &mut ChaCha8Rng| {
                PolyPoint::new(
                    (0..dim)
                        .map(|_| crate::geometry::random_disc_point(rng, 0.8))
                        .collect(),
                )
                .unwrap()
            };
            let z = randp(&mut rng);
            let w = randp(&mut rng);
            let mut mu = AtomicMeasure::new(dim);
            for _ in 0..4 {
                mu.push(&randp(&mut rng), Complex64::new(rng.gen::<f64>() - 0.3, rng.gen::<f64>()));
            }
            let pushed = pushforward_mu_z(&mu, &z).unwrap();
            let f = |p: &PolyPoint| crate::operators::kernel_eval(&w, p).unwrap();
            // lhs: ∫ f(φ_z(ξ)) prod (1-|z|^2)^2/|1-conj(z)ξ|^4 dμ(ξ)
            let mut lhs = Complex64::default();
            for i in 0..mu.len() {
                let (c, wt) = mu.atom(i);
                let mapped = crate::geometry::mobius_apply(&z, &PolyPoint::new(c.to_vec()).unwrap()).unwrap();
                let mut fac = 1.0;
                for (&zc, &pc) in z.coords().iter().zip(c) {
                    let d = (Complex64::new(1.0, 0.0) - zc.conj() * pc).norm_sqr();
                    fac *= (1.0 - zc.norm_sqr()).powi(2) / (d * d);
                }
                lhs += wt * fac * f(&mapped);
            }
            let mut rhs = Complex64::default();
            for i in 0..pushed.len() {
                let (c, wt) = pushed.atom(i);
                rhs += wt * f(&PolyPoint::new(c.to_vec()).unwrap());
            }
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn norms_are_homogeneous() {
        let mut m = AtomicMeasure::new(1);
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..5 {
            m.push(
                &PolyPoint::disc(crate::geometry::random_disc_point(&mut rng, 0.8)).unwrap(),
                Complex64::new(rng.gen::<f64>(), 0.0),
            );
        }
        let grid = GridSpec::default().points(1).unwrap();
        let basis = MonomialBasis::new(1, 6).unwrap();
        let s3 = m.scaled(Complex64::new(3.0, 0.0));
        let r1 = rkm_norm(&Measure::Atomic(m.clone()), &grid).unwrap().value;
        let r3 = rkm_norm(&Measure::Atomic(s3.clone()), &grid).unwrap().value;
        assert_abs_diff_eq!(r3, 3.0 * r1, epsilon = 1e-10 * r1.abs());
        let g1 = geometric_norm(&Measure::Atomic(m.clone()), 1.0, &grid).unwrap().value;
        let g3 = geometric_norm(&Measure::Atomic(s3.clone()), 1.0, &grid).unwrap().value;
        assert_abs_diff_eq!(g3, 3.0 * g1, epsilon = 1e-10 * g1.abs());
        let c1 = carleson_constant(&Measure::Atomic(m), &basis).unwrap();
        let c3 = carleson_constant(&Measure::Atomic(s3), &basis).unwrap();
        assert_abs_diff_eq!(c3, 3.0 * c1, epsilon = 1e-7 * c1.abs());
    }

    #[test]
    fn pushforward_preserves_rkm_sup_on_matched_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut mu = AtomicMeasure::new(2);
        for _ in 0..4 {
            let p = PolyPoint::new(vec![
                crate::geometry::random_disc_point(&mut rng, 0.7),
                crate::geometry::random_disc_point(&mut rng, 0.7),
            ])
            .unwrap();
            mu.push(&p, Complex64::new(rng.gen::<f64>(), rng.gen::<f64>() - 0.5));
        }
        let z = PolyPoint::new(vec![Complex64::new(0.4, -0.2), Complex64::new(-0.1, 0.5)]).unwrap();
        let grid = GridSpec::new(vec![0.0, 0.4, 0.8], 6).points(2).unwrap();
        let moved_grid: Vec<PolyPoint> = grid
            .iter()
            .map(|g| crate::geometry::mobius_apply(&z, g).unwrap())
            .collect();
        let pushed = pushforward_mu_z(&mu, &z).unwrap();
        let before = rkm_norm(&Measure::Atomic(mu), &grid).unwrap().value;
        let after = rkm_norm(&Measure::Atomic(pushed), &moved_grid).unwrap().value;
        assert!(
            (before - after).abs() < 1e-11 * before.max(1.0),
            "rkm sup not transported: {before} vs {after}"
        );
    }

    #[test]
    fn atomic_measure_json_roundtrip() {
        let p = PolyPoint::new(vec![Complex64::new(0.1, 0.2), Complex64::new(-0.3, 0.4)]).unwrap();
        let mut m = AtomicMeasure::new(2);
        m.push(&p, Complex64::new(1.5, -0.5));
        let v = m.to_json();
        let back = AtomicMeasure::from_json(&v).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back.atom(0).1, Complex64::new(1.5, -0.5));
        assert_eq!(back.atom(0).0, m.atom(0).0);
    }
}
