//! Constructive lattices and coverings of the polydisc.
//!
//! The one-variable lattice partitions the disc into hyperbolic annular
//! rings of thickness `ϱ/2`, each split into equal angular sectors. Sector
//! counts are chosen as large as the inner-disc containment allows, so each
//! cell is pinched between `D(center, ϱ/4)` and `D(center, ϱ)`; both
//! containments are verified exactly at build time. Product cells extend
//! the construction to the polydisc. Coverings keep a base lattice at scale
//! `(k+1)σ` and realize level `i` as the hyperbolic `iσ`-enlargement of the
//! base cells, evaluated through exact per-axis distance functions (the
//! enlargement of a product set in the max metric is the product of the
//! per-axis enlargements).

use crate::error::{Error, Result};
use crate::geometry::{
    beta_to_arc, beta_to_real_segment, disc_angular_half_extent, euclidean_disc, radial_coordinate,
};
use crate::measures::AtomicMeasure;
use crate::point::PolyPoint;
use crate::quadrature::QuadratureSpec;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

const TWO_PI: f64 = 2.0 * PI;

/// One-variable cell shape. Radial coordinates are hyperbolic
/// (`u = atanh |z|`); angular intervals live in `[0, 2π)` and are half-open.
#[derive(Clone, Debug)]
pub enum AxisShape {
    /// Central disc `u < u_max` (ring zero).
    Disc { u_max: f64 },
    /// Annular sector `u in [u_min, u_max)`, `theta in [theta_min, theta_max)`.
    Sector {
        u_min: f64,
        u_max: f64,
        theta_min: f64,
        theta_max: f64,
    },
    /// The whole disc (degenerate single-cell decomposition).
    Full,
    /// Pseudohyperbolic ball `rho(center, .) <= t`.
    Ball { center: Complex64, t: f64 },
    /// Hyperbolic enlargement `beta(., base) <= radius`.
    Enlarged { base: Box<AxisShape>, radius: f64 },
}

impl AxisShape {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            AxisShape::Disc { u_max } => radial_coordinate(z) < *u_max,
            AxisShape::Sector {
                u_min,
                u_max,
                theta_min,
                theta_max,
            } => {
                let u = radial_coordinate(z);
                if u < *u_min || u >= *u_max {
                    return false;
                }
                let mut th = z.arg();
                if th < 0.0 {
                    th += TWO_PI;
                }
                th >= *theta_min && th < *theta_max
            }
            AxisShape::Full => true,
            AxisShape::Ball { center, t } => crate::geometry::rho_1d(*center, z) <= *t,
            AxisShape::Enlarged { base, radius } => base.beta_distance(z) <= *radius,
        }
    }

    /// Hyperbolic distance `beta(z, shape)` (zero inside; exact up to the
    /// floating-point arithmetic of the closed forms).
    pub fn beta_distance(&self, z: Complex64) -> f64 {
        match self {
            AxisShape::Disc { u_max } => (radial_coordinate(z) - u_max).max(0.0),
            AxisShape::Full => 0.0,
            AxisShape::Ball { center, t } => {
                (crate::geometry::beta_1d(*center, z) - t.atanh()).max(0.0)
            }
            AxisShape::Enlarged { base, radius } => (base.beta_distance(z) - radius).max(0.0),
            AxisShape::Sector {
                u_min,
                u_max,
                theta_min,
                theta_max,
            } => {
                if self.contains(z) {
                    return 0.0;
                }
                let r_in = u_min.tanh();
                let r_out = u_max.tanh();
                let mut best = beta_to_arc(z, r_out, *theta_min, *theta_max);
                if r_in > 0.0 {
                    best = best.min(beta_to_arc(z, r_in, *theta_min, *theta_max));
                }
                for &th in &[*theta_min, *theta_max] {
                    let rotated = z * Complex64::from_polar(1.0, -th);
                    best = best.min(beta_to_real_segment(rotated, r_in, r_out));
                }
                best
            }
        }
    }

    /// Normalized area (closed form for the lattice shapes, radial scan for
    /// enlargements).
    pub fn volume(&self, scan_angles: usize) -> f64 {
        match self {
            AxisShape::Disc { u_max } => u_max.tanh().powi(2),
            AxisShape::Full => 1.0,
            AxisShape::Ball { center, t } => {
                let (_, r) = euclidean_disc(*center, *t);
                r * r
            }
            AxisShape::Sector {
                u_min,
                u_max,
                theta_min,
                theta_max,
            } => {
                (theta_max - theta_min) / TWO_PI * (u_max.tanh().powi(2) - u_min.tanh().powi(2))
            }
            AxisShape::Enlarged { .. } => self.scan_volume(scan_angles),
        }
    }

    /// Area by per-angle radial interval scan: on each ray the membership
    /// set is a union of intervals located by sampling plus bisection.
    fn scan_volume(&self, angles: usize) -> f64 {
        let u_hi = self.radial_bound() + 1e-9;
        let x_hi = u_hi.tanh().powi(2);
        let steps = 256;
        let mut total = 0.0;
        for a in 0..angles {
            let theta = TWO_PI * (a as f64 + 0.5) / angles as f64;
            let member = |x: f64| {
                let r = x.sqrt();
                self.contains(Complex64::from_polar(r, theta))
            };
            // walk in x = r^2 (area coordinate), refine crossings
            let mut inside = member(0.0);
            let mut x_prev = 0.0;
            let mut start = if inside { Some(0.0) } else { None };
            let mut length = 0.0;
            for s in 1..=steps {
                let x = x_hi * s as f64 / steps as f64;
                let now = member(x);
                if now != inside {
                    // bisect the crossing
                    let (mut lo, mut hi) = (x_prev, x);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + hi);
                        if member(mid) == inside {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    let xc = 0.5 * (lo + hi);
                    if inside {
                        length += xc - start.take().unwrap_or(0.0);
                    } else {
                        start = Some(xc);
                    }
                    inside = now;
                }
                x_prev = x;
            }
            if inside {
                length += x_hi - start.unwrap_or(0.0);
            }
            total += length;
        }
        total / angles as f64
    }

    /// Upper bound for the hyperbolic radial extent of the shape.
    fn radial_bound(&self) -> f64 {
        match self {
            AxisShape::Disc { u_max } => *u_max,
            AxisShape::Full => 40.0,
            AxisShape::Ball { center, t } => {
                crate::geometry::radial_coordinate(*center) + t.atanh()
            }
            AxisShape::Sector { u_max, .. } => *u_max,
            AxisShape::Enlarged { base, radius } => base.radial_bound() + radius,
        }
    }
}

/// A labeled cell of a polydisc decomposition: product of per-axis shapes.
#[derive(Clone, Debug)]
pub struct LatticeCell {
    pub index: Vec<usize>,
    pub center: PolyPoint,
    pub volume: f64,
    pub axes: Vec<AxisShape>,
}

impl LatticeCell {
    pub fn contains(&self, z: &PolyPoint) -> Result<bool> {
        if z.dim() != self.axes.len() {
            return Err(Error::DimensionMismatch {
                left: z.dim(),
                right: self.axes.len(),
            });
        }
        Ok(self
            .axes
            .iter()
            .zip(z.coords())
            .all(|(s, &c)| s.contains(c)))
    }

    /// `beta(z, cell)` in the max metric: the largest per-axis distance.
    pub fn beta_distance(&self, z: &PolyPoint) -> Result<f64> {
        if z.dim() != self.axes.len() {
            return Err(Error::DimensionMismatch {
                left: z.dim(),
                right: self.axes.len(),
            });
        }
        Ok(self
            .axes
            .iter()
            .zip(z.coords())
            .map(|(s, &c)| s.beta_distance(c))
            .fold(0.0, f64::max))
    }
}

/// Normalized volume of a cell by quadrature (closed-form shapes reduce to
/// the exact value; enlargements use the radial scan with `quad.angular`
/// rays per axis).
pub fn cell_volume(cell: &LatticeCell, quad: QuadratureSpec) -> f64 {
    cell.axes
        .iter()
        .map(|s| s.volume(quad.angular.max(32)))
        .product()
}

// ---------------------------------------------------------------------------
// one-variable lattice

#[derive(Clone, Debug, Serialize)]
struct Ring {
    u_min: f64,
    u_max: f64,
    u_center: f64,
    sectors: usize,
    first_cell: usize,
}

/// Annular-sector decomposition of the disc out to hyperbolic radius
/// `>= beta_max`.
#[derive(Clone, Debug)]
pub struct DiscLattice {
    pub rho: f64,
    pub beta_max: f64,
    rings: Vec<Ring>,
    cell_count: usize,
}

impl DiscLattice {
    pub fn build(rho: f64, beta_max: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: format!("lattice scale must be positive, got {rho}"),
            });
        }
        if !(beta_max > 0.0) || !beta_max.is_finite() {
            return Err(Error::InvalidParameter {
                name: "beta_max",
                reason: format!("truncation radius must be positive, got {beta_max}"),
            });
        }
        let h = rho / 2.0;
        let ring_count = (beta_max / h).ceil().max(1.0) as usize;
        let mut rings = Vec::with_capacity(ring_count);
        let mut cells = 0usize;
        for j in 0..ring_count {
            let u_min = j as f64 * h;
            let u_max = (j + 1) as f64 * h;
            let u_center = u_min + 0.5 * h;
            let sectors = if j == 0 {
                1
            } else {
                let s = u_center.tanh();
                let t = (rho / 4.0).tanh();
                let (c0, r0) = euclidean_disc(Complex64::new(s, 0.0), t);
                let half_extent = disc_angular_half_extent(c0, r0);
                ((PI / half_extent).floor() as usize).max(2)
            };
            rings.push(Ring {
                u_min,
                u_max,
                u_center,
                sectors,
                first_cell: cells,
            });
            cells += sectors;
        }
        let lattice = DiscLattice {
            rho,
            beta_max,
            rings,
            cell_count: cells,
        };
        lattice.verify_containments()?;
        Ok(lattice)
    }

    /// Outer containment `cell ⊂ D(center, ϱ)` checked exactly on the cell
    /// corners (the distance to the center is maximized there).
    fn verify_containments(&self) -> Result<()> {
        for ring in self.rings.iter().skip(1) {
            let half = PI / ring.sectors as f64;
            let center = Complex64::new(ring.u_center.tanh(), 0.0);
            for &u in &[ring.u_min, ring.u_max] {
                let corner = Complex64::from_polar(u.tanh(), half);
                let d = crate::geometry::beta_1d(center, corner);
                if d > self.rho * (1.0 + 1e-9) {
                    return Err(Error::PropertyViolation {
                        property: "outer containment",
                        detail: format!(
                            "corner at (u={u:.4}, θ={half:.4}) sits {d:.6} > ϱ = {} from the center",
                            self.rho
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.cell_count
    }

    /// Hyperbolic radius actually covered (`ring_count * ϱ/2 >= beta_max`).
    pub fn covered_beta(&self) -> f64 {
        self.rings.last().map(|r| r.u_max).unwrap_or(0.0)
    }

    pub fn shape(&self, cell: usize) -> AxisShape {
        let ring = self
            .rings
            .iter()
            .rev()
            .find(|r| cell >= r.first_cell)
            .expect("cell index in range");
        if ring.first_cell == 0 {
            return AxisShape::Disc { u_max: ring.u_max };
        }
        let i = cell - ring.first_cell;
        let width = TWO_PI / ring.sectors as f64;
        AxisShape::Sector {
            u_min: ring.u_min,
            u_max: ring.u_max,
            theta_min: i as f64 * width,
            theta_max: (i + 1) as f64 * width,
        }
    }

    pub fn center(&self, cell: usize) -> Complex64 {
        let ring = self
            .rings
            .iter()
            .rev()
            .find(|r| cell >= r.first_cell)
            .expect("cell index in range");
        if ring.first_cell == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let i = cell - ring.first_cell;
        let width = TWO_PI / ring.sectors as f64;
        Complex64::from_polar(ring.u_center.tanh(), (i as f64 + 0.5) * width)
    }

    pub fn volume(&self, cell: usize) -> f64 {
        self.shape(cell).volume(0)
    }

    /// Ring data: `(u_min, u_max, u_center, sector_count)` per ring.
    pub fn ring_data(&self) -> Vec<(f64, f64, f64, usize)> {
        self.rings
            .iter()
            .map(|r| (r.u_min, r.u_max, r.u_center, r.sectors))
            .collect()
    }

    /// Cells within hyperbolic distance `radius` of `z`: candidate rings by
    /// radial gap, candidate sectors by the angular wedge of the hyperbolic
    /// ball around `z`, then the exact distance.
    pub fn cells_within(&self, z: Complex64, radius: f64) -> Vec<usize> {
        let u = radial_coordinate(z);
        let (ec, er) = euclidean_disc(z, radius.tanh());
        let full_circle = ec.norm() <= er;
        let wedge_half = if full_circle {
            PI
        } else {
            disc_angular_half_extent(ec, er)
        };
        let mut theta_c = z.arg();
        if theta_c < 0.0 {
            theta_c += TWO_PI;
        }
        let mut out = Vec::new();
        for ring in &self.rings {
            let gap = if u < ring.u_min {
                ring.u_min - u
            } else if u >= ring.u_max {
                u - ring.u_max
            } else {
                0.0
            };
            if gap > radius {
                continue;
            }
            if ring.first_cell == 0 {
                let shape = AxisShape::Disc { u_max: ring.u_max };
                if shape.beta_distance(z) <= radius {
                    out.push(0);
                }
                continue;
            }
            let width = TWO_PI / ring.sectors as f64;
            let (lo, hi) = if full_circle || 2.0 * wedge_half + width >= TWO_PI {
                (0i64, ring.sectors as i64 - 1)
            } else {
                let lo = ((theta_c - wedge_half) / width).floor() as i64;
                let hi = ((theta_c + wedge_half) / width).floor() as i64 + 1;
                (lo, hi)
            };
            for raw in lo..=hi {
                let i = raw.rem_euclid(ring.sectors as i64) as usize;
                let cell = ring.first_cell + i;
                if out.last() == Some(&cell) || out.contains(&cell) {
                    continue;
                }
                if self.shape(cell).beta_distance(z) <= radius {
                    out.push(cell);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Index of the unique cell containing `z`, or `None` outside the
    /// covered region.
    pub fn locate(&self, z: Complex64) -> Option<usize> {
        let u = radial_coordinate(z);
        let h = self.rho / 2.0;
        if u >= self.covered_beta() {
            return None;
        }
        let j = ((u / h).floor() as usize).min(self.rings.len() - 1);
        let ring = &self.rings[j];
        if ring.first_cell == 0 {
            return Some(0);
        }
        let mut th = z.arg();
        if th < 0.0 {
            th += TWO_PI;
        }
        let width = TWO_PI / ring.sectors as f64;
        let i = ((th / width).floor() as usize).min(ring.sectors - 1);
        Some(ring.first_cell + i)
    }
}

// ---------------------------------------------------------------------------
// product lattice

/// Product decomposition of the polydisc: the same one-variable lattice on
/// every axis, cells indexed by per-axis cell numbers.
#[derive(Clone, Debug)]
pub struct PolydiscLattice {
    pub axis: DiscLattice,
    pub dim: usize,
}

impl PolydiscLattice {
    pub fn build(rho: f64, dim: usize, beta_max: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "dimension must be >= 1".into(),
            });
        }
        Ok(PolydiscLattice {
            axis: DiscLattice::build(rho, beta_max)?,
            dim,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.axis.cell_count().pow(self.dim as u32)
    }

    pub fn locate(&self, z: &PolyPoint) -> Result<Option<Vec<usize>>> {
        if z.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: z.dim(),
                right: self.dim,
            });
        }
        let mut idx = Vec::with_capacity(self.dim);
        for &c in z.coords() {
            match self.axis.locate(c) {
                Some(i) => idx.push(i),
                None => return Ok(None),
            }
        }
        Ok(Some(idx))
    }

    pub fn cell(&self, index: &[usize]) -> LatticeCell {
        let center = PolyPoint::new(index.iter().map(|&i| self.axis.center(i)).collect())
            .expect("lattice centers are interior");
        let volume = index.iter().map(|&i| self.axis.volume(i)).product();
        LatticeCell {
            index: index.to_vec(),
            center,
            volume,
            axes: index.iter().map(|&i| self.axis.shape(i)).collect(),
        }
    }

    /// Materialize every product cell (use the iterator-style accessors for
    /// large decompositions).
    pub fn cells(&self) -> Vec<LatticeCell> {
        let k = self.axis.cell_count();
        let mut out = Vec::with_capacity(self.cell_count());
        let mut idx = vec![0usize; self.dim];
        loop {
            out.push(self.cell(&idx));
            let mut l = 0;
            loop {
                idx[l] += 1;
                if idx[l] < k {
                    break;
                }
                idx[l] = 0;
                l += 1;
                if l == self.dim {
                    return out;
                }
            }
        }
    }

    /// Centers and volumes of all product cells, without materializing the
    /// shape data (the path `mu_rho` takes).
    pub fn centers_and_volumes(&self) -> (Vec<Vec<Complex64>>, Vec<f64>) {
        let k = self.axis.cell_count();
        let axis_centers: Vec<Complex64> = (0..k).map(|i| self.axis.center(i)).collect();
        let axis_volumes: Vec<f64> = (0..k).map(|i| self.axis.volume(i)).collect();
        let total = self.cell_count();
        let mut centers = Vec::with_capacity(total);
        let mut volumes = Vec::with_capacity(total);
        let mut idx = vec![0usize; self.dim];
        loop {
            centers.push(idx.iter().map(|&i| axis_centers[i]).collect());
            volumes.push(idx.iter().map(|&i| axis_volumes[i]).product());
            let mut l = 0;
            loop {
                idx[l] += 1;
                if idx[l] < k {
                    break;
                }
                idx[l] = 0;
                l += 1;
                if l == self.dim {
                    return (centers, volumes);
                }
            }
        }
    }
}

/// One-variable decomposition (`n = 1` lattice cells).
pub fn build_cr_lattice_disc(rho: f64, beta_max: f64) -> Result<Vec<LatticeCell>> {
    Ok(PolydiscLattice::build(rho, 1, beta_max)?.cells())
}

/// Product decomposition of the polydisc.
pub fn build_cr_lattice_polydisc(rho: f64, dim: usize, beta_max: f64) -> Result<Vec<LatticeCell>> {
    Ok(PolydiscLattice::build(rho, dim, beta_max)?.cells())
}

/// Hyperbolic `σ`-enlargement of cells: membership becomes
/// `rho(z, cell) <= tanh σ`, evaluated through the exact per-axis distance.
pub fn enlarge(cells: &[LatticeCell], sigma: f64) -> Result<Vec<LatticeCell>> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "sigma",
            reason: format!("enlargement radius must be positive, got {sigma}"),
        });
    }
    Ok(cells
        .iter()
        .map(|c| {
            let axes: Vec<AxisShape> = c
                .axes
                .iter()
                .map(|s| AxisShape::Enlarged {
                    base: Box::new(s.clone()),
                    radius: sigma,
                })
                .collect();
            let volume = axes.iter().map(|s| s.volume(128)).product();
            LatticeCell {
                index: c.index.clone(),
                center: c.center.clone(),
                volume,
                axes,
            }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// nested coverings

/// Nested covering: base cells at scale `(k+1)σ`, level `i` their
/// `iσ`-enlargement, for `i = 0..=k+1`. The overlap and diameter constants
/// are measured by sampling at build time and recorded.
#[derive(Clone, Debug)]
pub struct Covering {
    pub sigma: f64,
    pub k: usize,
    pub dim: usize,
    pub beta_max: f64,
    pub base: PolydiscLattice,
    /// Measured max number of cells covering one point, per level.
    pub overlap_bound: usize,
    /// Measured pseudohyperbolic diameter bound over all levels.
    pub diameter_bound: f64,
    /// Sample count used for the build-time verification.
    pub check_samples: usize,
}

impl Covering {
    pub fn levels(&self) -> usize {
        self.k + 2
    }

    /// Per-axis membership test at a level.
    pub fn axis_member(&self, level: usize, axis_cell: usize, z: Complex64) -> bool {
        let shape = self.base.axis.shape(axis_cell);
        if level == 0 {
            shape.contains(z)
        } else {
            shape.beta_distance(z) <= level as f64 * self.sigma
        }
    }

    pub fn member(&self, level: usize, index: &[usize], z: &PolyPoint) -> Result<bool> {
        if z.dim() != self.dim || index.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: z.dim(),
                right: self.dim,
            });
        }
        Ok(index
            .iter()
            .zip(z.coords())
            .all(|(&i, &c)| self.axis_member(level, i, c)))
    }

    /// How many cells of a level contain `z` (product of per-axis counts).
    pub fn covering_count(&self, level: usize, z: &PolyPoint) -> Result<usize> {
        if z.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: z.dim(),
                right: self.dim,
            });
        }
        let k = self.base.axis.cell_count();
        let mut product = 1usize;
        for &c in z.coords() {
            let count = (0..k).filter(|&i| self.axis_member(level, i, c)).count();
            product *= count;
        }
        Ok(product)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct CellJson {
            index: Vec<usize>,
            center: Vec<[f64; 2]>,
            volume: f64,
            shape: Vec<serde_json::Value>,
        }
        #[derive(Serialize)]
        struct CoveringJson {
            sigma: f64,
            k: usize,
            n: usize,
            beta_max: f64,
            base_scale: f64,
            overlap_bound: usize,
            diameter_bound: f64,
            levels: usize,
            level_radii: Vec<f64>,
            base_cells: Vec<CellJson>,
        }
        let shape_json = |s: &AxisShape| match s {
            AxisShape::Disc { u_max } => serde_json::json!({"kind": "disc", "u_max": u_max}),
            AxisShape::Sector {
                u_min,
                u_max,
                theta_min,
                theta_max,
            } => serde_json::json!({
                "kind": "sector",
                "u_min": u_min, "u_max": u_max,
                "theta_min": theta_min, "theta_max": theta_max,
            }),
            _ => serde_json::json!({"kind": "other"}),
        };
        // base cells only; higher levels are the recorded radii applied to them
        let k_axis = self.base.axis.cell_count();
        let mut base_cells = Vec::new();
        let mut idx = vec![0usize; self.dim];
        loop {
            let cell = self.base.cell(&idx);
            base_cells.push(CellJson {
                index: cell.index.clone(),
                center: cell.center.coords().iter().map(|c| [c.re, c.im]).collect(),
                volume: cell.volume,
                shape: cell.axes.iter().map(shape_json).collect(),
            });
            let mut l = 0;
            loop {
                idx[l] += 1;
                if idx[l] < k_axis {
                    break;
                }
                idx[l] = 0;
                l += 1;
                if l == self.dim {
                    let radii: Vec<f64> =
                        (0..self.levels()).map(|i| i as f64 * self.sigma).collect();
                    return serde_json::to_value(CoveringJson {
                        sigma: self.sigma,
                        k: self.k,
                        n: self.dim,
                        beta_max: self.beta_max,
                        base_scale: (self.k as f64 + 1.0) * self.sigma,
                        overlap_bound: self.overlap_bound,
                        diameter_bound: self.diameter_bound,
                        levels: self.levels(),
                        level_radii: radii,
                        base_cells,
                    })
                    .expect("covering serialization cannot fail");
                }
            }
        }
    }
}

fn sample_covered_point(rng: &mut impl Rng, dim: usize, covered_beta: f64) -> PolyPoint {
    let r_max = covered_beta.tanh() * (1.0 - 1e-12);
    let coords = (0..dim)
        .map(|_| {
            let x = rng.gen::<f64>() * r_max * r_max;
            let th = rng.gen::<f64>() * TWO_PI;
            Complex64::from_polar(x.sqrt(), th)
        })
        .collect();
    PolyPoint::new(coords).expect("sampled points are interior")
}

/// Build a nested covering and verify its properties by sampling;
/// violations abort the build with the property named.
pub fn build_suarez_covering(
    sigma: f64,
    k: usize,
    dim: usize,
    beta_max: f64,
) -> Result<Covering> {
    build_suarez_covering_with_samples(sigma, k, dim, beta_max, 2_000, 0x51a7_c0de)
}

pub fn build_suarez_covering_with_samples(
    sigma: f64,
    k: usize,
    dim: usize,
    beta_max: f64,
    samples: usize,
    seed: u64,
) -> Result<Covering> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter {
            name: "sigma",
            reason: format!("need sigma > 0, got {sigma}"),
        });
    }
    let base_scale = (k as f64 + 1.0) * sigma;
    let base = PolydiscLattice::build(base_scale, dim, beta_max)?;
    let mut covering = Covering {
        sigma,
        k,
        dim,
        beta_max,
        base,
        overlap_bound: 0,
        diameter_bound: 0.0,
        check_samples: samples,
    };
    verify_covering(&mut covering, samples, seed)?;
    Ok(covering)
}

/// Sampled verification of disjointness, nesting, separation, overlap and
/// diameter; measured constants are stored on the covering.
fn verify_covering(cov: &mut Covering, samples: usize, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let covered = cov.base.axis.covered_beta();
    let k_axis = cov.base.axis.cell_count();
    let shapes: Vec<AxisShape> = (0..k_axis).map(|i| cov.base.axis.shape(i)).collect();
    let margin = 1e-6;
    let mut max_overlap = 1usize;
    // per-axis in-cell samples for the diameter measurement
    let mut axis_members: Vec<Vec<Complex64>> = vec![Vec::new(); k_axis];
    for _ in 0..samples {
        let z = sample_covered_point(&mut rng, 1, covered);
        let c = z.coord(0);
        // level-0 disjointness + coverage: exactly one cell
        let holders: Vec<usize> = (0..k_axis)
            .filter(|&i| shapes[i].contains(c))
            .collect();
        if holders.len() != 1 {
            return Err(Error::PropertyViolation {
                property: "level-0 partition",
                detail: format!("point {c} lies in {} base cells", holders.len()),
            });
        }
        axis_members[holders[0]].push(c);
        // distances to every base cell determine all level memberships;
        // nesting F_i ⊆ F_{i+1} is automatic from the monotone thresholds
        let dists: Vec<f64> = shapes.iter().map(|s| s.beta_distance(c)).collect();
        for level in 0..cov.levels() {
            let radius = level as f64 * cov.sigma;
            let count = if level == 0 {
                1
            } else {
                dists.iter().filter(|&&d| d <= radius).count()
            };
            if count == 0 {
                return Err(Error::PropertyViolation {
                    property: "coverage",
                    detail: format!("point {c} uncovered at level {level}"),
                });
            }
            // in the product, one point is covered by the product of counts
            max_overlap = max_overlap.max(count.pow(cov.dim as u32));
        }
    }
    // separation: z in F_{i,j}, w outside F_{i+1,j} forces
    // rho(z, w) >= tanh(sigma) - margin. Sample pairs at pseudohyperbolic
    // distance just below tanh(sigma) and require that no cell straddles
    // the two thresholds for such a pair.
    let t_sigma = cov.sigma.tanh();
    for _ in 0..samples {
        let z = sample_covered_point(&mut rng, 1, covered).coord(0);
        let t = (rng.gen::<f64>() * (t_sigma - margin)).max(0.0);
        let th = rng.gen::<f64>() * TWO_PI;
        let w = crate::geometry::mobius_1d(z, Complex64::from_polar(t, th));
        // rho(z, w) = t < tanh sigma - margin by construction
        for (i, shape) in shapes.iter().enumerate() {
            let dz = shape.beta_distance(z);
            let dw = shape.beta_distance(w);
            for level in 0..cov.levels() - 1 {
                let inside = if level == 0 {
                    shape.contains(z)
                } else {
                    dz <= level as f64 * cov.sigma
                };
                if inside && dw > (level + 1) as f64 * cov.sigma {
                    return Err(Error::PropertyViolation {
                        property: "separation",
                        detail: format!(
                            "cell {i}: rho = {t:.8} < tanh σ = {t_sigma:.8} crosses levels {level} -> {}",
                            level + 1
                        ),
                    });
                }
            }
        }
    }
    // diameter: measured over in-cell sample pairs at the top level
    let mut diam: f64 = 0.0;
    let top_radius = (cov.levels() - 1) as f64 * cov.sigma;
    for (i, members) in axis_members.iter().enumerate() {
        let shape = cov.base.axis.shape(i);
        for (a, &za) in members.iter().enumerate().take(30) {
            for &zb in members.iter().skip(a + 1).take(30) {
                diam = diam.max(crate::geometry::beta_1d(za, zb));
            }
        }
        let _ = shape;
    }
    cov.diameter_bound = (diam + 2.0 * top_radius).tanh();
    cov.overlap_bound = max_overlap;
    Ok(())
}

/// Lattice measure: point masses at the cell centers weighted by the cell
/// volumes. The total mass equals the volume of the covered region.
pub fn mu_rho(rho: f64, dim: usize, beta_max: f64) -> Result<AtomicMeasure> {
    let lattice = PolydiscLattice::build(rho, dim, beta_max)?;
    let (centers, volumes) = lattice.centers_and_volumes();
    let mut mu = AtomicMeasure::new(dim);
    for (c, v) in centers.iter().zip(&volumes) {
        mu.push_coords(c, Complex64::new(*v, 0.0));
    }
    Ok(mu)
}

// ---------------------------------------------------------------------------
// monomial Grams over cells

/// One-variable Gram `G[b,a] = ∫_shape e_a conj(e_b) dv` in closed form
/// (annular sectors integrate monomials exactly in polar coordinates).
pub fn axis_cell_gram(shape: &AxisShape, max_degree: usize) -> Result<DMatrix<Complex64>> {
    let k = max_degree + 1;
    let (r1, r2, th1, th2) = match shape {
        AxisShape::Disc { u_max } => (0.0, u_max.tanh(), 0.0, TWO_PI),
        AxisShape::Full => (0.0, 1.0, 0.0, TWO_PI),
        AxisShape::Sector {
            u_min,
            u_max,
            theta_min,
            theta_max,
        } => (u_min.tanh(), u_max.tanh(), *theta_min, *theta_max),
        _ => {
            return Err(Error::InvalidParameter {
                name: "shape",
                reason: "closed-form Grams exist for disc and sector cells only".into(),
            })
        }
    };
    let mut g = DMatrix::zeros(k, k);
    for b in 0..k {
        for a in 0..k {
            let p = (a + b) as f64 + 2.0;
            let radial = (r2.powf(p) - r1.powf(p)) / p;
            let m = a as i64 - b as i64;
            let angular = if m == 0 {
                Complex64::new(th2 - th1, 0.0)
            } else {
                let mf = m as f64;
                (Complex64::from_polar(1.0, mf * th2) - Complex64::from_polar(1.0, mf * th1))
                    / Complex64::new(0.0, mf)
            };
            let norm = (((a + 1) * (b + 1)) as f64).sqrt();
            g[(b, a)] = norm / PI * radial * angular;
        }
    }
    Ok(g)
}
