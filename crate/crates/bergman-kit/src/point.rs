//! Points of the polydisc and evaluation grids.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Strict margin kept between admissible points and the boundary torus.
pub const BOUNDARY_MARGIN: f64 = 1e-14;

/// A point of the open unit polydisc: `n` complex coordinates, each of
/// modulus `< 1 - BOUNDARY_MARGIN`. Construction rejects boundary points;
/// every routine in the crate may assume strict interiority.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyPoint {
    coords: Vec<Complex64>,
}

impl PolyPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter {
                name: "coords",
                reason: "a point needs at least one coordinate".into(),
            });
        }
        for (index, c) in coords.iter().enumerate() {
            let modulus = c.norm();
            if !(modulus < 1.0 - BOUNDARY_MARGIN) {
                return Err(Error::InvalidPoint { index, modulus });
            }
        }
        Ok(PolyPoint { coords })
    }

    /// One-variable point.
    pub fn disc(z: Complex64) -> Result<Self> {
        Self::new(vec![z])
    }

    /// The origin of the `n`-dimensional polydisc.
    pub fn origin(n: usize) -> Self {
        PolyPoint {
            coords: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn coord(&self, axis: usize) -> Complex64 {
        self.coords[axis]
    }

    /// `prod_l (1 - |z_l|^2)`.
    pub fn one_minus_sq_product(&self) -> f64 {
        self.coords.iter().map(|c| 1.0 - c.norm_sqr()).product()
    }

    pub fn check_same_dim(&self, other: &PolyPoint) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }
}

/// A boundary direction: unimodular component per axis. Radial paths toward
/// the boundary are `r * direction` for `r` in `[0, 1)`.
#[derive(Clone, Debug)]
pub struct Direction {
    components: Vec<Complex64>,
}

impl Direction {
    pub fn new(components: Vec<Complex64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter {
                name: "direction",
                reason: "needs at least one component".into(),
            });
        }
        let components = components
            .into_iter()
            .map(|c| {
                let m = c.norm();
                if m == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    c / m
                }
            })
            .collect();
        Ok(Direction { components })
    }

    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        Self::new(angles.iter().map(|&a| Complex64::from_polar(1.0, a)).collect())
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn angles(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.arg()).collect()
    }

    /// The point `r * direction` (same `r` on every axis).
    pub fn at_radius(&self, r: f64) -> Result<PolyPoint> {
        PolyPoint::new(self.components.iter().map(|c| c * r).collect())
    }
}

/// Finite evaluation grid standing in for a supremum over the polydisc.
/// Default moduli follow the radial-grid convention used throughout the
/// crate; callers can refine when the reported witness sits on the rim.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GridSpec {
    pub moduli: Vec<f64>,
    pub angles_per_axis: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            moduli: vec![0.0, 0.3, 0.6, 0.9, 0.99, 0.999],
            angles_per_axis: 16,
        }
    }
}

impl GridSpec {
    pub fn new(moduli: Vec<f64>, angles_per_axis: usize) -> Self {
        GridSpec {
            moduli,
            angles_per_axis,
        }
    }

    /// A grid that stays inside `|z| <= max_modulus` (useful where quadrature
    /// accuracy or tail bounds degrade near the rim).
    pub fn capped(&self, max_modulus: f64) -> Self {
        GridSpec {
            moduli: self
                .moduli
                .iter()
                .copied()
                .filter(|&m| m <= max_modulus)
                .collect(),
            angles_per_axis: self.angles_per_axis,
        }
    }

    fn axis_points(&self) -> Vec<Complex64> {
        let mut pts = Vec::new();
        for &m in &self.moduli {
            if m == 0.0 {
                pts.push(Complex64::new(0.0, 0.0));
                continue;
            }
            for j in 0..self.angles_per_axis {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / self.angles_per_axis as f64;
                pts.push(Complex64::from_polar(m, theta));
            }
        }
        pts
    }

    /// Materialize the full tensor grid on the `n`-dimensional polydisc.
    pub fn points(&self, n: usize) -> Result<Vec<PolyPoint>> {
        let axis = self.axis_points();
        if axis.is_empty() {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: "empty grid".into(),
            });
        }
        let mut out = Vec::with_capacity(axis.len().pow(n as u32));
        let mut idx = vec![0usize; n];
        loop {
            let coords: Vec<Complex64> = idx.iter().map(|&i| axis[i]).collect();
            out.push(PolyPoint::new(coords)?);
            // odometer increment
            let mut l = 0;
            loop {
                idx[l] += 1;
                if idx[l] < axis.len() {
                    break;
                }
                idx[l] = 0;
                l += 1;
                if l == n {
                    return Ok(out);
                }
            }
        }
    }
}

/// A supremum estimated over a finite grid: the value plus the witness where
/// it was attained, so callers can refine around it.
#[derive(Clone, Debug)]
pub struct SupEstimate {
    pub value: f64,
    pub witness: PolyPoint,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_boundary_points() {
        assert!(PolyPoint::disc(Complex64::new(1.0, 0.0)).is_err());
        assert!(PolyPoint::disc(Complex64::new(1.0 - 1e-15, 0.0)).is_err());
        assert!(PolyPoint::disc(Complex64::new(1.0 - 1e-13, 0.0)).is_ok());
    }

    #[test]
    fn rejects_empty() {
        assert!(PolyPoint::new(vec![]).is_err());
    }

    #[test]
    fn grid_has_expected_cardinality() {
        let g = GridSpec::new(vec![0.0, 0.5], 4);
        // modulus 0 contributes one point, modulus 0.5 contributes 4
        assert_eq!(g.points(1).unwrap().len(), 5);
        assert_eq!(g.points(2).unwrap().len(), 25);
    }
}
