//! Truncated-basis representations of operators on the Bergman space of the
//! polydisc, reproducing kernels, and the Möbius translation maps.
//!
//! The orthonormal monomial basis is `e_α(z) = prod_l sqrt(α_l + 1) z_l^{α_l}`
//! over multi-indices `0 <= α_l <= D`. A `TruncatedOperator` is the
//! compression of an operator on `A²` to the span of this basis. Numerical
//! unitary conjugation and norm claims are made at `p = 2` only; for other
//! exponents the kernels and the `J`, `b_z`, `λ` factors are exposed at
//! formula level.

use crate::error::{Error, Result};
use crate::geometry::mobius_1d;
use crate::measures::AtomicMeasure;
use crate::point::PolyPoint;
use crate::quadrature::{gauss_legendre_unit, PolydiscRule, QuadratureSpec};
use crate::symbol::Symbol;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Conjugate exponents for `A^p`: `1/p + 1/q = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceParams {
    pub p: f64,
    pub n: usize,
}

impl SpaceParams {
    pub fn new(p: f64, n: usize) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "p",
                reason: format!("need 1 < p < inf, got {p}"),
            });
        }
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "dimension must be >= 1".into(),
            });
        }
        Ok(SpaceParams { p, n })
    }

    pub fn q(&self) -> f64 {
        self.p / (self.p - 1.0)
    }
}

/// Orthonormal monomials of per-axis degree `<= max_degree` on the
/// `n`-dimensional polydisc.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialBasis {
    n: usize,
    max_degree: usize,
    /// `prod_l sqrt(α_l + 1)` per flat index.
    norm_consts: Vec<f64>,
}

impl MonomialBasis {
    pub fn new(n: usize, max_degree: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "dimension must be >= 1".into(),
            });
        }
        let len = (max_degree + 1).pow(n as u32);
        let mut norm_consts = vec![0.0; len];
        let mut idx = vec![0usize; n];
        for (flat, nc) in norm_consts.iter_mut().enumerate() {
            *nc = idx.iter().map(|&a| ((a + 1) as f64).sqrt()).product();
            Self::advance(&mut idx, max_degree);
            let _ = flat;
        }
        Ok(MonomialBasis {
            n,
            max_degree,
            norm_consts,
        })
    }

    fn advance(idx: &mut [usize], max_degree: usize) {
        // odometer with the last axis fastest
        for l in (0..idx.len()).rev() {
            idx[l] += 1;
            if idx[l] <= max_degree {
                return;
            }
            idx[l] = 0;
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.norm_consts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Multi-index of a flat position (axis 0 most significant).
    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut rem = flat;
        let base = self.max_degree + 1;
        let mut idx = vec![0usize; self.n];
        for l in (0..self.n).rev() {
            idx[l] = rem % base;
            rem /= base;
        }
        idx
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        let base = self.max_degree + 1;
        multi.iter().fold(0, |acc, &a| acc * base + a)
    }

    /// One-axis restriction (used to tensor per-axis Grams).
    pub fn axis_basis(&self) -> MonomialBasis {
        MonomialBasis::new(1, self.max_degree).expect("axis basis")
    }

    /// Evaluate every basis function at `coords` into `out`.
    /// `powers` is scratch of size `n * (max_degree + 1)`.
    pub fn eval_into(&self, coords: &[Complex64], powers: &mut [Complex64], out: &mut [Complex64]) {
        let d1 = self.max_degree + 1;
        debug_assert_eq!(coords.len(), self.n);
        debug_assert_eq!(powers.len(), self.n * d1);
        debug_assert_eq!(out.len(), self.len());
        for (l, &z) in coords.iter().enumerate() {
            let row = &mut powers[l * d1..(l + 1) * d1];
            row[0] = Complex64::new(1.0, 0.0);
            for k in 1..d1 {
                row[k] = row[k - 1] * z;
            }
        }
        if self.n == 1 {
            for (o, (p, c)) in out
                .iter_mut()
                .zip(powers[..d1].iter().zip(&self.norm_consts))
            {
                *o = p * c;
            }
            return;
        }
        let mut idx = vec![0usize; self.n];
        for (flat, o) in out.iter_mut().enumerate() {
            let mut v = Complex64::new(self.norm_consts[flat], 0.0);
            for (l, &a) in idx.iter().enumerate() {
                v *= powers[l * d1 + a];
            }
            *o = v;
            Self::advance(&mut idx, self.max_degree);
        }
    }

    pub fn eval(&self, point: &PolyPoint) -> DVector<Complex64> {
        let mut powers = vec![Complex64::default(); self.n * (self.max_degree + 1)];
        let mut out = vec![Complex64::default(); self.len()];
        self.eval_into(point.coords(), &mut powers, &mut out);
        DVector::from_vec(out)
    }

    /// Evaluate the polynomial with coefficient vector `coeffs` at `coords`.
    pub fn eval_poly(&self, coeffs: &DVector<Complex64>, point: &PolyPoint) -> Complex64 {
        let row = self.eval(point);
        row.iter()
            .zip(coeffs.iter())
            .map(|(e, c)| e * c)
            .sum()
    }
}

/// A complex matrix over a `MonomialBasis`, representing the compression of
/// an operator on `A²(D^n)` to the truncated span.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub basis: MonomialBasis,
    pub matrix: DMatrix<Complex64>,
}

impl TruncatedOperator {
    pub fn new(basis: MonomialBasis, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != basis.len() || matrix.ncols() != basis.len() {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows(),
                right: basis.len(),
            });
        }
        Ok(TruncatedOperator { basis, matrix })
    }

    pub fn zero(basis: MonomialBasis) -> Self {
        let k = basis.len();
        TruncatedOperator {
            basis,
            matrix: DMatrix::zeros(k, k),
        }
    }

    pub fn identity(basis: MonomialBasis) -> Self {
        let k = basis.len();
        TruncatedOperator {
            basis,
            matrix: DMatrix::identity(k, k),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        TruncatedOperator {
            basis: self.basis.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn add(&self, other: &TruncatedOperator) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(TruncatedOperator {
            basis: self.basis.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &TruncatedOperator) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(TruncatedOperator {
            basis: self.basis.clone(),
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn compose(&self, other: &TruncatedOperator) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(TruncatedOperator {
            basis: self.basis.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn adjoint(&self) -> Self {
        TruncatedOperator {
            basis: self.basis.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.matrix * v
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.diagonal().iter().sum()
    }

    fn check_same_basis(&self, other: &TruncatedOperator) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::DimensionMismatch {
                left: self.basis.len(),
                right: other.basis.len(),
            });
        }
        Ok(())
    }

    /// Compression onto the sub-basis of per-axis degree `<= degree`.
    pub fn compress(&self, degree: usize) -> Result<TruncatedOperator> {
        let d = degree.min(self.basis.max_degree());
        let small = MonomialBasis::new(self.basis.dim(), d)?;
        let mut m = DMatrix::zeros(small.len(), small.len());
        for row in 0..small.len() {
            let rbig = self.basis.flat_index(&small.multi_index(row));
            for col in 0..small.len() {
                let cbig = self.basis.flat_index(&small.multi_index(col));
                m[(row, col)] = self.matrix[(rbig, cbig)];
            }
        }
        TruncatedOperator::new(small, m)
    }
}

/// Rank-one operator `f ⊗ g : h -> <h, g> f` over coefficient vectors.
pub fn rank_one(
    basis: &MonomialBasis,
    f: &DVector<Complex64>,
    g: &DVector<Complex64>,
) -> Result<TruncatedOperator> {
    if f.len() != basis.len() || g.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            left: f.len(),
            right: basis.len(),
        });
    }
    let mut m = DMatrix::zeros(basis.len(), basis.len());
    for row in 0..basis.len() {
        for col in 0..basis.len() {
            m[(row, col)] = f[row] * g[col].conj();
        }
    }
    TruncatedOperator::new(basis.clone(), m)
}

/// The projection onto constants, `1 ⊗ 1`.
pub fn one_tensor_one(basis: &MonomialBasis) -> TruncatedOperator {
    let k = basis.len();
    let mut e0 = DVector::zeros(k);
    e0[0] = Complex64::new(1.0, 0.0);
    rank_one(basis, &e0, &e0).expect("dimensions agree")
}

// ---------------------------------------------------------------------------
// kernels

/// Unnormalized reproducing kernel `K_λ(z) = prod_l (1 - conj(λ_l) z_l)^{-2}`.
pub fn kernel_eval(lambda: &PolyPoint, z: &PolyPoint) -> Result<Complex64> {
    lambda.check_same_dim(z)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(lambda
        .coords()
        .iter()
        .zip(z.coords())
        .map(|(&l, &w)| {
            let d = one - l.conj() * w;
            one / (d * d)
        })
        .product())
}

/// `p`-normalized kernel `k_λ^(p)(z) = prod_l (1-|λ_l|^2)^{2/q} (1-conj(λ_l) z_l)^{-2}`.
pub fn normalized_kernel_eval(
    lambda: &PolyPoint,
    z: &PolyPoint,
    params: &SpaceParams,
) -> Result<Complex64> {
    let e = 2.0 / params.q();
    let scale: f64 = lambda
        .coords()
        .iter()
        .map(|&l| (1.0 - l.norm_sqr()).powf(e))
        .product();
    Ok(scale * kernel_eval(lambda, z)?)
}

/// Coefficients of `k_z^{(2)}` in the orthonormal basis together with the
/// squared-mass tail `1 - Σ_{α in basis} |c_α|^2` of the discarded degrees
/// (closed form from the geometric series; this is the rigorous truncation
/// bookkeeping every Berezin value is reported with).
pub fn kernel_coefficients(z: &PolyPoint, basis: &MonomialBasis) -> Result<(DVector<Complex64>, f64)> {
    if z.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: z.dim(),
            right: basis.dim(),
        });
    }
    let d1 = basis.max_degree() + 1;
    let n = basis.dim();
    let front: f64 = z.one_minus_sq_product();
    let mut conj_powers = vec![Complex64::default(); n * d1];
    for (l, &c) in z.coords().iter().enumerate() {
        let row = &mut conj_powers[l * d1..(l + 1) * d1];
        row[0] = Complex64::new(1.0, 0.0);
        let cb = c.conj();
        for k in 1..d1 {
            row[k] = row[k - 1] * cb;
        }
    }
    let mut coeffs = DVector::zeros(basis.len());
    for flat in 0..basis.len() {
        let multi = basis.multi_index(flat);
        let mut v = Complex64::new(front, 0.0);
        for (l, &a) in multi.iter().enumerate() {
            v *= conj_powers[l * d1 + a] * ((a + 1) as f64).sqrt();
        }
        coeffs[flat] = v;
    }
    Ok((coeffs, kernel_mass_tail(z, basis.max_degree())))
}

/// `1 - prod_l retained_l` where `retained_l = 1 - (D+2) x^{D+1} + (D+1) x^{D+2}`
/// is the kernel mass kept by degrees `<= D` on axis `l` (`x = |z_l|^2`).
pub fn kernel_mass_tail(z: &PolyPoint, max_degree: usize) -> f64 {
    let d = max_degree as f64;
    let retained: f64 = z
        .coords()
        .iter()
        .map(|c| {
            let x = c.norm_sqr();
            1.0 - (d + 2.0) * x.powi(max_degree as i32 + 1)
                + (d + 1.0) * x.powi(max_degree as i32 + 2)
        })
        .product();
    (1.0 - retained).max(0.0)
}

// ---------------------------------------------------------------------------
// Möbius translation factors

/// `J_z^r(w) = prod_l (1-|z_l|^2)^r (1 - w_l conj(z_l))^{-2r}` with principal
/// branch powers (the argument of `1 - w conj(z)` defines the root).
pub fn j_z_eval(z: &PolyPoint, w: &PolyPoint, r: f64) -> Result<Complex64> {
    z.check_same_dim(w)?;
    let one = Complex64::new(1.0, 0.0);
    Ok(z.coords()
        .iter()
        .zip(w.coords())
        .map(|(&a, &b)| {
            let num = (1.0 - a.norm_sqr()).powf(r);
            let den = (one - b * a.conj()).powf(2.0 * r);
            num / den
        })
        .product())
}

/// `b_z(w) = prod_l ((1-conj(w_l) z_l)/(1-conj(z_l) w_l))^{2(1/q - 1/p)}`;
/// unimodular, and identically `1` at `p = 2`.
pub fn b_z_eval(z: &PolyPoint, w: &PolyPoint, params: &SpaceParams) -> Result<Complex64> {
    z.check_same_dim(w)?;
    let e = 2.0 * (1.0 / params.q() - 1.0 / params.p);
    if e == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let one = Complex64::new(1.0, 0.0);
    Ok(z.coords()
        .iter()
        .zip(w.coords())
        .map(|(&a, &b)| ((one - b.conj() * a) / (one - a.conj() * b)).powf(e))
        .product())
}

/// The unimodular constant in `(U_z^p)^* k_ξ^{(q)} = λ_{(p)}(ξ, z) k_{φ_z(ξ)}^{(q)}`
/// (inner products conjugate-linear in the second slot):
/// `λ_{(p)}(ξ,z) = prod_l ((1 - conj(z_l) ξ_l)/(1 - z_l conj(ξ_l)))^{2/p}`.
pub fn lambda_p(xi: &PolyPoint, z: &PolyPoint, params: &SpaceParams) -> Result<Complex64> {
    xi.check_same_dim(z)?;
    let e = 2.0 / params.p;
    let one = Complex64::new(1.0, 0.0);
    Ok(xi
        .coords()
        .iter()
        .zip(z.coords())
        .map(|(&x, &a)| ((one - a.conj() * x) / (one - a * x.conj())).powf(e))
        .product())
}

// ---------------------------------------------------------------------------
// matrix assembly

struct NodeSet {
    coords: Vec<Complex64>, // node-major, dim entries per node
    weights: Vec<f64>,
    dim: usize,
}

fn collect_nodes(dim: usize, quad: QuadratureSpec) -> NodeSet {
    let rule = PolydiscRule::build(dim, quad);
    let count = rule.node_count();
    let mut coords = Vec::with_capacity(count * dim);
    let mut weights = Vec::with_capacity(count);
    rule.for_each(|c, w| {
        coords.extend_from_slice(c);
        weights.push(w);
    });
    NodeSet {
        coords,
        weights,
        dim,
    }
}

/// Gram-style accumulation `G[β,α] = Σ_nodes c(node) row_a[α] conj(row_b[β])`
/// over fixed-size chunks summed in order, so the result does not depend on
/// the number of worker threads.
fn accumulate_matrix(
    basis_cols: &MonomialBasis,
    basis_rows: &MonomialBasis,
    nodes: &NodeSet,
    coefficient: impl Fn(usize, &[Complex64], f64) -> Complex64 + Sync,
    col_row: impl Fn(&[Complex64], &mut [Complex64], &mut [Complex64]) + Sync,
) -> DMatrix<Complex64> {
    const CHUNK: usize = 2048;
    let kc = basis_cols.len();
    let kr = basis_rows.len();
    let dim = nodes.dim;
    let node_count = nodes.weights.len();
    let chunk_ranges: Vec<(usize, usize)> = (0..node_count)
        .step_by(CHUNK)
        .map(|s| (s, (s + CHUNK).min(node_count)))
        .collect();
    let partials: Vec<DMatrix<Complex64>> = chunk_ranges
        .par_iter()
        .map(|&(start, end)| {
            let mut local = DMatrix::<Complex64>::zeros(kr, kc);
            let d1 = basis_rows.max_degree() + 1;
            let mut powers = vec![Complex64::default(); dim * d1];
            let mut row_b = vec![Complex64::default(); kr];
            let mut row_a = vec![Complex64::default(); kc];
            for i in start..end {
                let coords = &nodes.coords[i * dim..(i + 1) * dim];
                let w = nodes.weights[i];
                let c = coefficient(i, coords, w);
                if c == Complex64::default() {
                    continue;
                }
                basis_rows.eval_into(coords, &mut powers, &mut row_b);
                col_row(coords, &mut powers, &mut row_a);
                for (bi, rb) in row_b.iter().enumerate() {
                    let cb = c * rb.conj();
                    let mut out_row = local.row_mut(bi);
                    for (ai, ra) in row_a.iter().enumerate() {
                        out_row[ai] += cb * ra;
                    }
                }
            }
            local
        })
        .collect();
    let mut total = DMatrix::<Complex64>::zeros(kr, kc);
    for p in partials {
        total += p;
    }
    total
}

/// Toeplitz operator `T_a = P M_a` in the truncated basis, entries
/// `<a e_α, e_β>` by tensor quadrature.
pub fn toeplitz_symbol(
    a: &Symbol,
    basis: &MonomialBasis,
    quad: QuadratureSpec,
) -> Result<TruncatedOperator> {
    quad.validate_for_degree(basis.max_degree())?;
    let nodes = collect_nodes(basis.dim(), quad);
    // reject non-finite symbol values up front
    for i in 0..nodes.weights.len() {
        let coords = &nodes.coords[i * nodes.dim..(i + 1) * nodes.dim];
        let v = a.eval(coords);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::SymbolNotFinite {
                re: coords[0].re,
                im: coords[0].im,
            });
        }
    }
    let m = accumulate_matrix(
        basis,
        basis,
        &nodes,
        |_, coords, w| w * a.eval(coords),
        |_, powers, out| {
            // column row equals the plain basis row; recompute from powers
            basis_row_from_powers(basis, powers, out);
        },
    );
    TruncatedOperator::new(basis.clone(), m)
}

fn basis_row_from_powers(basis: &MonomialBasis, powers: &[Complex64], out: &mut [Complex64]) {
    // powers already hold z^k per axis from the row evaluation
    let d1 = basis.max_degree() + 1;
    if basis.dim() == 1 {
        for (flat, o) in out.iter_mut().enumerate() {
            *o = powers[flat] * ((flat + 1) as f64).sqrt();
        }
        return;
    }
    for (flat, o) in out.iter_mut().enumerate() {
        let multi = basis.multi_index(flat);
        let mut v = Complex64::new(1.0, 0.0);
        for (l, &aidx) in multi.iter().enumerate() {
            v *= powers[l * d1 + aidx] * ((aidx + 1) as f64).sqrt();
        }
        *o = v;
    }
}

/// Toeplitz operator of an atomic measure: exact finite sums
/// `entry[β,α] = Σ_i c_i e_α(p_i) conj(e_β(p_i))`.
pub fn toeplitz_measure(mu: &AtomicMeasure, basis: &MonomialBasis) -> Result<TruncatedOperator> {
    if mu.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: mu.dim(),
            right: basis.dim(),
        });
    }
    let nodes = NodeSet {
        coords: mu.points_flat().to_vec(),
        weights: vec![1.0; mu.len()],
        dim: mu.dim(),
    };
    let weights = mu.weights();
    let m = accumulate_matrix(
        basis,
        basis,
        &nodes,
        |i, _, _| weights[i],
        |_, powers, out| basis_row_from_powers(basis, powers, out),
    );
    TruncatedOperator::new(basis.clone(), m)
}

/// Toeplitz operator of the lattice measure `μ_ϱ` evaluated ring by ring:
/// on a ring of `K` equally spaced sectors the angular sums vanish except
/// on the bands `a - b ≡ 0 (mod K)`, where they equal `K (-1)^{(a-b)/K}`
/// (sector centers sit at half-offsets). This is exact, and makes deep
/// truncation radii free — no atom list is ever materialized.
pub fn lattice_toeplitz(
    lattice: &crate::covering::PolydiscLattice,
    basis: &MonomialBasis,
) -> Result<TruncatedOperator> {
    if lattice.dim != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: lattice.dim,
            right: basis.dim(),
        });
    }
    let d = basis.max_degree();
    let k1 = d + 1;
    let mut axis = DMatrix::<Complex64>::zeros(k1, k1);
    for (u_min, u_max, u_center, sectors) in lattice.axis.ring_data() {
        let r = u_center.tanh();
        let ring_mass = u_max.tanh().powi(2) - u_min.tanh().powi(2);
        if u_min == 0.0 && sectors == 1 {
            // central disc cell: center at the origin touches e_0 only
            axis[(0, 0)] += Complex64::new(u_max.tanh().powi(2), 0.0);
            continue;
        }
        let cell_volume = ring_mass / sectors as f64;
        let mut band = 0usize;
        loop {
            let m = band * sectors; // |a - b|
            if m > d {
                break;
            }
            let sign = if band % 2 == 0 { 1.0 } else { -1.0 };
            let factor = cell_volume * sectors as f64 * sign;
            for a in m..=d {
                let b = a - m;
                let v = factor
                    * (((a + 1) * (b + 1)) as f64).sqrt()
                    * r.powi((a + b) as i32);
                axis[(b, a)] += Complex64::new(v, 0.0);
                if m > 0 {
                    axis[(a, b)] += Complex64::new(v, 0.0);
                }
            }
            band += 1;
        }
    }
    let mut total = axis.clone();
    for _ in 1..lattice.dim {
        total = total.kronecker(&axis);
    }
    TruncatedOperator::new(basis.clone(), total)
}

/// Toeplitz operator of a product-radial symbol `a(z) = prod_l g_l(|z_l|^2)`:
/// diagonal in the monomial basis with entries
/// `prod_l (α_l+1) ∫_0^1 g_l(x) x^{α_l} dx` (Gauss–Legendre per axis).
pub fn toeplitz_radial_product(
    basis: &MonomialBasis,
    per_axis: &[&(dyn Fn(f64) -> f64 + Sync)],
) -> Result<TruncatedOperator> {
    if per_axis.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: per_axis.len(),
            right: basis.dim(),
        });
    }
    let d = basis.max_degree();
    let (xs, ws) = gauss_legendre_unit(d + 16);
    // per-axis moments m_l[a] = (a+1) ∫ g_l(x) x^a dx
    let moments: Vec<Vec<f64>> = per_axis
        .iter()
        .map(|g| {
            (0..=d)
                .map(|a| {
                    let int: f64 = xs
                        .iter()
                        .zip(&ws)
                        .map(|(&x, &w)| w * g(x) * x.powi(a as i32))
                        .sum();
                    (a as f64 + 1.0) * int
                })
                .collect()
        })
        .collect();
    let k = basis.len();
    let mut m = DMatrix::zeros(k, k);
    for flat in 0..k {
        let multi = basis.multi_index(flat);
        let v: f64 = multi
            .iter()
            .enumerate()
            .map(|(l, &a)| moments[l][a])
            .product();
        m[(flat, flat)] = Complex64::new(v, 0.0);
    }
    TruncatedOperator::new(basis.clone(), m)
}

/// Toeplitz operator of the coordinate symbol `z_axis` (closed form: the
/// weighted shift `<z e_α, e_{α + 1_axis}> = sqrt((α+1)/(α+2))` on that axis).
pub fn toeplitz_coordinate(basis: &MonomialBasis, axis: usize) -> Result<TruncatedOperator> {
    if axis >= basis.dim() {
        return Err(Error::InvalidParameter {
            name: "axis",
            reason: format!("axis {axis} out of range"),
        });
    }
    let k = basis.len();
    let mut m = DMatrix::zeros(k, k);
    for col in 0..k {
        let mut multi = basis.multi_index(col);
        if multi[axis] == basis.max_degree() {
            continue;
        }
        let a = multi[axis] as f64;
        multi[axis] += 1;
        let row = basis.flat_index(&multi);
        m[(row, col)] = Complex64::new(((a + 1.0) / (a + 2.0)).sqrt(), 0.0);
    }
    TruncatedOperator::new(basis.clone(), m)
}

/// The weighted composition map `U_z f = (f ∘ φ_z) · J_z^1` at `p = 2`,
/// compressed to the basis. Top-degree columns necessarily leak mass out of
/// the truncation, so unitarity is only meaningful on the interior: the
/// reported defect is `||(U_z U_z - I) P||` with `P` the projection onto
/// per-axis degrees `<= D/2`, and it shrinks as the degree grows.
pub struct UzMatrix {
    pub operator: TruncatedOperator,
    pub involution_defect: f64,
}

pub fn u_z_matrix(z: &PolyPoint, basis: &MonomialBasis, quad: QuadratureSpec) -> Result<UzMatrix> {
    if z.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: z.dim(),
            right: basis.dim(),
        });
    }
    quad.validate_for_degree(basis.max_degree())?;
    let nodes = collect_nodes(basis.dim(), quad);
    let zc: Vec<Complex64> = z.coords().to_vec();
    let one = Complex64::new(1.0, 0.0);
    let m = accumulate_matrix(
        basis,
        basis,
        &nodes,
        |_, _, w| Complex64::new(w, 0.0),
        |coords, powers, out| {
            // image point φ_z(w) and the weight J_z^1(w)
            let mut jfac = one;
            let mapped: Vec<Complex64> = coords
                .iter()
                .zip(&zc)
                .map(|(&w, &a)| {
                    let den = one - w * a.conj();
                    jfac *= (1.0 - a.norm_sqr()) / (den * den);
                    mobius_1d(a, w)
                })
                .collect();
            basis_from_coords(basis, &mapped, powers, out);
            for o in out.iter_mut() {
                *o *= jfac;
            }
        },
    );
    let op = TruncatedOperator::new(basis.clone(), m)?;
    let uu = op.compose(&op)?;
    let gap = uu.matrix - DMatrix::identity(basis.len(), basis.len());
    // interior columns only: the composition spreads degree-α mass across a
    // band several times wider, so unitarity is measured on the lowest
    // quarter of the degree range
    let interior: Vec<usize> = (0..basis.len())
        .filter(|&flat| {
            basis
                .multi_index(flat)
                .iter()
                .all(|&a| 4 * a <= basis.max_degree())
        })
        .collect();
    let mut restricted = DMatrix::zeros(basis.len(), interior.len());
    for (j, &col) in interior.iter().enumerate() {
        restricted.set_column(j, &gap.column(col));
    }
    let defect = matrix_operator_norm(&restricted)?;
    Ok(UzMatrix {
        operator: op,
        involution_defect: defect,
    })
}

fn basis_from_coords(
    basis: &MonomialBasis,
    coords: &[Complex64],
    powers: &mut [Complex64],
    out: &mut [Complex64],
) {
    basis.eval_into(coords, powers, out);
}

// ---------------------------------------------------------------------------
// operator norm

const POWER_ITERATION_SEED: u64 = 0x5eed_b17;
const POWER_ITERATION_TOL: f64 = 1e-8;
/// Largest dimension for which the dense Hermitian eigensolve fallback is
/// still affordable.
const DIRECT_FALLBACK_DIM: usize = 1600;

/// Largest singular value of a truncated operator, to relative `1e-8`.
///
/// Power iteration on `S* S` from a deterministic start vector, stopped by
/// the Hermitian residual bound, handles the common well-separated spectra
/// in a handful of matvecs. Spectra whose top is a near-degenerate cluster
/// stall it, so past an iteration budget the norm falls back to a dense
/// Hermitian eigendecomposition of `S* S`.
pub fn operator_norm(op: &TruncatedOperator) -> Result<f64> {
    matrix_operator_norm(&op.matrix)
}

pub fn matrix_operator_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    let k = m.ncols();
    if k == 0 || m.nrows() == 0 {
        return Ok(0.0);
    }
    let max_abs = m.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max_abs == 0.0 {
        return Ok(0.0);
    }
    let scaled = m / Complex64::new(max_abs, 0.0);
    let adj = scaled.adjoint();
    // iteration budget scaled so the fast path never dominates the fallback
    let max_iter = (200_000_000 / (m.nrows() * k).max(1)).clamp(64, 20_000);
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_ITERATION_SEED);
    let mut v = DVector::from_fn(k, |_, _| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    v /= Complex64::new(v.norm(), 0.0);
    let mut residual = f64::INFINITY;
    for it in 0..max_iter {
        let w = &scaled * &v;
        let av = &adj * &w;
        // Rayleigh quotient v* (S*S) v with ||v|| = 1
        let lambda = w.norm_squared();
        let r = &av - &v * Complex64::new(lambda, 0.0);
        residual = r.norm();
        if residual <= POWER_ITERATION_TOL * lambda.max(1e-300) && it >= 8 {
            return Ok(lambda.sqrt() * max_abs);
        }
        let nn = av.norm();
        if nn == 0.0 {
            // start vector annihilated; restart deterministically
            v = DVector::from_fn(k, |_, _| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            v /= Complex64::new(v.norm(), 0.0);
            continue;
        }
        v = av / Complex64::new(nn, 0.0);
    }
    if k <= DIRECT_FALLBACK_DIM {
        let gram = &adj * &scaled;
        let eigen = nalgebra::SymmetricEigen::new(gram);
        let top = eigen.eigenvalues.iter().copied().fold(0.0f64, f64::max);
        return Ok(top.max(0.0).sqrt() * max_abs);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

// ---------------------------------------------------------------------------
// serialization

#[derive(Serialize, Deserialize)]
struct BasisJson {
    n: usize,
    d: usize,
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    basis: BasisJson,
    /// row-major `[re, im]` pairs
    matrix: Vec<[f64; 2]>,
}

impl TruncatedOperator {
    pub fn to_json(&self) -> serde_json::Value {
        let mut entries = Vec::with_capacity(self.basis.len() * self.basis.len());
        for r in 0..self.matrix.nrows() {
            for c in 0..self.matrix.ncols() {
                let v = self.matrix[(r, c)];
                entries.push([v.re, v.im]);
            }
        }
        serde_json::to_value(OperatorJson {
            basis: BasisJson {
                n: self.basis.dim(),
                d: self.basis.max_degree(),
            },
            matrix: entries,
        })
        .expect("operator serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let parsed: OperatorJson = serde_json::from_value(value.clone())?;
        let basis = MonomialBasis::new(parsed.basis.n, parsed.basis.d)?;
        let k = basis.len();
        if parsed.matrix.len() != k * k {
            return Err(Error::DimensionMismatch {
                left: parsed.matrix.len(),
                right: k * k,
            });
        }
        let m = DMatrix::from_fn(k, k, |r, c| {
            let [re, im] = parsed.matrix[r * k + c];
            Complex64::new(re, im)
        });
        TruncatedOperator::new(basis, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::AtomicMeasure;
    use approx::assert_abs_diff_eq;

    fn basis1(d: usize) -> MonomialBasis {
        MonomialBasis::new(1, d).unwrap()
    }

    #[test]
    fn basis_is_orthonormal_under_quadrature() {
        for (n, d) in [(1usize, 6usize), (2, 3)] {
            let basis = MonomialBasis::new(n, d).unwrap();
            let id = toeplitz_symbol(&Symbol::one(), &basis, QuadratureSpec::for_degree(d)).unwrap();
            for r in 0..basis.len() {
                for c in 0..basis.len() {
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert!(
                        (id.matrix[(r, c)] - Complex64::new(want, 0.0)).norm() < 1e-10,
                        "<e_{r}, e_{c}> off: {}",
                        id.matrix[(r, c)]
                    );
                }
            }
        }
    }

    #[test]
    fn kernel_values() {
        let l = PolyPoint::disc(Complex64::new(0.5, 0.0)).unwrap();
        let z = PolyPoint::disc(Complex64::new(0.5, 0.0)).unwrap();
        let k = kernel_eval(&l, &z).unwrap();
        assert_abs_diff_eq!(k.re, 16.0 / 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k.im, 0.0, epsilon = 1e-15);
        // K_0(z) = 1
        let o = PolyPoint::origin(1);
        let any = PolyPoint::disc(Complex64::new(0.3, -0.7)).unwrap();
        assert_abs_diff_eq!(kernel_eval(&o, &any).unwrap().re, 1.0, epsilon = 1e-15);
        // k_λ^{(2)}(λ) = prod 1/(1-|λ|^2) and unit A² norm
        let params = SpaceParams::new(2.0, 1).unwrap();
        let v = normalized_kernel_eval(&l, &l, &params).unwrap();
        assert_abs_diff_eq!(v.re, 1.0 / 0.75, epsilon = 1e-12);
        let (coeffs, tail) = kernel_coefficients(&l, &basis1(60)).unwrap();
        assert_abs_diff_eq!(coeffs.norm_squared() + tail, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kernel_coefficient_example() {
        let z = PolyPoint::disc(Complex64::new(0.5, 0.0)).unwrap();
        let (c, _) = kernel_coefficients(&z, &basis1(2)).unwrap();
        assert_abs_diff_eq!(c[0].re, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(c[1].re, 0.5303300858899106, epsilon = 1e-10);
        assert_abs_diff_eq!(c[2].re, 0.32475952641916445, epsilon = 1e-10);
        let o = PolyPoint::origin(1);
        let (c0, _) = kernel_coefficients(&o, &basis1(2)).unwrap();
        assert_abs_diff_eq!(c0[0].re, 1.0, epsilon = 1e-15);
        assert!(c0[1].norm() < 1e-15 && c0[2].norm() < 1e-15);
    }

    #[test]
    fn toeplitz_abs_square_is_diagonal() {
        let basis = basis1(8);
        let t = toeplitz_symbol(&Symbol::abs_sq(0), &basis, QuadratureSpec::for_degree(8)).unwrap();
        for k in 0..=8usize {
            let want = (k as f64 + 1.0) / (k as f64 + 2.0);
            assert_abs_diff_eq!(t.matrix[(k, k)].re, want, epsilon = 1e-11);
        }
        for r in 0..9 {
            for c in 0..9 {
                if r != c {
                    assert!(t.matrix[(r, c)].norm() < 1e-11);
                }
            }
        }
        // matches the closed-form radial constructor
        let g = |x: f64| x;
        let t2 = toeplitz_radial_product(&basis, &[&g]).unwrap();
        assert!((&t.matrix - &t2.matrix).norm() < 1e-10);
    }

    #[test]
    fn toeplitz_coordinate_is_weighted_shift() {
        let basis = basis1(6);
        let t = toeplitz_symbol(&Symbol::coordinate(0), &basis, QuadratureSpec::for_degree(6)).unwrap();
        let closed = toeplitz_coordinate(&basis, 0).unwrap();
        for r in 0..basis.len() {
            for c in 0..basis.len() {
                assert!(
                    (t.matrix[(r, c)] - closed.matrix[(r, c)]).norm() < 1e-11,
                    "entry ({r},{c})"
                );
            }
        }
        assert_abs_diff_eq!(closed.matrix[(1, 0)].re, (1.0f64 / 2.0).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn toeplitz_adjoint_matches_conjugate_symbol() {
        let basis = MonomialBasis::new(2, 3).unwrap();
        let quad = QuadratureSpec::for_degree(3);
        let a = Symbol::new("test", 2.0, |z| {
            z[0] + Complex64::new(0.0, 0.5) * z[1].conj() + z[0] * z[1]
        });
        let t = toeplitz_symbol(&a, &basis, quad).unwrap();
        let tc = toeplitz_symbol(&a.conj(), &basis, quad).unwrap();
        assert!((t.adjoint().matrix - tc.matrix).norm() < 1e-10);
    }

    #[test]
    fn lattice_toeplitz_matches_atom_sums() {
        // ring-wise closed form against the explicit atom accumulation
        let basis = basis1(10);
        let lat = crate::covering::PolydiscLattice::build(0.5, 1, 3.0).unwrap();
        let fast = lattice_toeplitz(&lat, &basis).unwrap();
        let mu = crate::covering::mu_rho(0.5, 1, 3.0).unwrap();
        let slow = toeplitz_measure(&mu, &basis).unwrap();
        assert!((&fast.matrix - &slow.matrix).norm() < 1e-12);
        let basis2 = MonomialBasis::new(2, 4).unwrap();
        let lat2 = crate::covering::PolydiscLattice::build(0.7, 2, 2.0).unwrap();
        let fast2 = lattice_toeplitz(&lat2, &basis2).unwrap();
        let mu2 = crate::covering::mu_rho(0.7, 2, 2.0).unwrap();
        let slow2 = toeplitz_measure(&mu2, &basis2).unwrap();
        assert!((&fast2.matrix - &slow2.matrix).norm() < 1e-12);
    }

    #[test]
    fn toeplitz_measure_dirac_at_zero_is_rank_one() {
        let basis = basis1(4);
        let mu = AtomicMeasure::dirac(&PolyPoint::origin(1), Complex64::new(1.0, 0.0));
        let t = toeplitz_measure(&mu, &basis).unwrap();
        let p = one_tensor_one(&basis);
        assert!((&t.matrix - &p.matrix).norm() < 1e-14);
    }

    #[test]
    fn reproducing_property_inside_truncation() {
        let basis = basis1(10);
        let w = PolyPoint::disc(Complex64::new(0.4, -0.3)).unwrap();
        // f random polynomial within the truncation
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = DVector::from_fn(basis.len(), |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        // <f, K_w> = Σ f_α e_α(w)
        let (kc, _) = kernel_coefficients(&w, &basis).unwrap();
        let front = w.one_minus_sq_product();
        let paired: Complex64 = f
            .iter()
            .zip(kc.iter())
            .map(|(fa, ka)| fa * (ka / front).conj())
            .sum();
        let direct = basis.eval_poly(&f, &w);
        assert!((paired - direct).norm() < 1e-10);
    }

    #[test]
    fn u_zero_is_parity() {
        let basis = basis1(5);
        let u = u_z_matrix(&PolyPoint::origin(1), &basis, QuadratureSpec::for_degree(5)).unwrap();
        for r in 0..basis.len() {
            for c in 0..basis.len() {
                let want = if r == c {
                    if r % 2 == 0 { 1.0 } else { -1.0 }
                } else {
                    0.0
                };
                assert!(
                    (u.operator.matrix[(r, c)] - Complex64::new(want, 0.0)).norm() < 1e-11,
                    "U_0 entry ({r},{c}) = {}",
                    u.operator.matrix[(r, c)]
                );
            }
        }
        assert!(u.involution_defect < 1e-10);
    }

    #[test]
    fn u_z_is_involution_up_to_truncation() {
        let z = PolyPoint::disc(Complex64::new(0.4, 0.2)).unwrap();
        let d_small = u_z_matrix(&z, &basis1(8), QuadratureSpec::for_degree(8))
            .unwrap()
            .involution_defect;
        let d_large = u_z_matrix(&z, &basis1(16), QuadratureSpec::for_degree(16))
            .unwrap()
            .involution_defect;
        assert!(d_large < d_small, "defect should shrink with degree: {d_small} -> {d_large}");
        assert!(d_large < 5e-2);
        // column norms close to one on the truncation interior
        let u = u_z_matrix(&z, &basis1(16), QuadratureSpec::for_degree(16)).unwrap();
        for c in 0..4 {
            let norm = u.operator.matrix.column(c).norm();
            assert!((norm - 1.0).abs() < 1e-2, "column {c} norm {norm}");
        }
    }

    #[test]
    fn unimodular_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let p = 1.0 + rng.gen::<f64>() * 4.0;
            let params = SpaceParams::new(p.max(1.01), 2).unwrap();
            let z = PolyPoint::new(vec![
                crate::geometry::random_disc_point(&mut rng, 0.95),
                crate::geometry::random_disc_point(&mut rng, 0.95),
            ])
            .unwrap();
            let w = PolyPoint::new(vec![
                crate::geometry::random_disc_point(&mut rng, 0.95),
                crate::geometry::random_disc_point(&mut rng, 0.95),
            ])
            .unwrap();
            assert!((b_z_eval(&z, &w, &params).unwrap().norm() - 1.0).abs() < 1e-12);
            assert!((lambda_p(&w, &z, &params).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        // p = 2 makes b identically one; λ(0, z) = λ(ξ, 0) = 1
        let params = SpaceParams::new(2.0, 1).unwrap();
        let z = PolyPoint::disc(Complex64::new(0.3, 0.6)).unwrap();
        let w = PolyPoint::disc(Complex64::new(-0.5, 0.1)).unwrap();
        assert_eq!(b_z_eval(&z, &w, &params).unwrap(), Complex64::new(1.0, 0.0));
        let o = PolyPoint::origin(1);
        assert!((lambda_p(&o, &z, &params).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((lambda_p(&w, &o, &params).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        // J_z^0 = 1
        assert!((j_z_eval(&z, &w, 0.0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn lambda_identity_at_p2() {
        // (U_z)^* k_ξ^{(2)} = λ(ξ,z) k_{φ_z(ξ)}^{(2)} on the truncation
        let basis = basis1(20);
        let params = SpaceParams::new(2.0, 1).unwrap();
        let z = PolyPoint::disc(Complex64::new(0.3, -0.2)).unwrap();
        let xi = PolyPoint::disc(Complex64::new(-0.25, 0.35)).unwrap();
        let u = u_z_matrix(&z, &basis, QuadratureSpec::for_degree(20)).unwrap();
        let (kxi, _) = kernel_coefficients(&xi, &basis).unwrap();
        let lhs = u.operator.adjoint().apply(&kxi);
        let img = crate::geometry::mobius_apply(&z, &xi).unwrap();
        let (kimg, _) = kernel_coefficients(&img, &basis).unwrap();
        let lam = lambda_p(&xi, &z, &params).unwrap();
        let rhs = kimg * lam;
        // residual is truncation spill of the composition at degree 20
        assert!(
            (&lhs - &rhs).norm() < 2e-2,
            "translation identity defect {}",
            (&lhs - &rhs).norm()
        );
    }

    #[test]
    fn operator_norm_basics() {
        let basis = basis1(2);
        assert_abs_diff_eq!(operator_norm(&TruncatedOperator::identity(basis.clone())).unwrap(), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(operator_norm(&one_tensor_one(&basis)).unwrap(), 1.0, epsilon = 1e-8);
        assert_eq!(operator_norm(&TruncatedOperator::zero(basis.clone())).unwrap(), 0.0);
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
        ]));
        let op = TruncatedOperator::new(basis, m).unwrap();
        assert_abs_diff_eq!(operator_norm(&op).unwrap(), 3.0, epsilon = 1e-7);
    }

    #[test]
    fn norm_of_toeplitz_bounded_by_sup() {
        let basis = MonomialBasis::new(2, 4).unwrap();
        let a = Symbol::new("mixed", 1.0, |z| {
            Complex64::new(0.5 * z[0].re + 0.5 * z[1].norm_sqr(), 0.0)
        });
        let t = toeplitz_symbol(&a, &basis, QuadratureSpec::for_degree(4)).unwrap();
        assert!(operator_norm(&t).unwrap() <= 1.0 + 1e-9);
        // linearity in the symbol
        let t2 = toeplitz_symbol(&a.scale(Complex64::new(2.0, 0.0)), &basis, QuadratureSpec::for_degree(4)).unwrap();
        assert!((&t2.matrix - &t.matrix * Complex64::new(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn rank_one_algebra() {
        let basis = basis1(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = DVector::from_fn(basis.len(), |_, _| Complex64::new(rng.gen(), rng.gen()));
        let g = DVector::from_fn(basis.len(), |_, _| Complex64::new(rng.gen(), rng.gen()));
        let op = rank_one(&basis, &f, &g).unwrap();
        // trace(f ⊗ g) = <f, g>
        let want: Complex64 = f.iter().zip(g.iter()).map(|(a, b)| a * b.conj()).sum();
        assert!((op.trace() - want).norm() < 1e-12);
        // h orthogonal to g is annihilated
        let mut h = DVector::zeros(basis.len());
        h[0] = g[1].conj();
        h[1] = -g[0].conj();
        assert!(op.apply(&h).norm() < 1e-12 * (f.norm() * g.norm() + 1.0));
    }

    #[test]
    fn operator_json_roundtrip() {
        let basis = basis1(2);
        let t = toeplitz_coordinate(&basis, 0).unwrap();
        let j = t.to_json();
        let back = TruncatedOperator::from_json(&j).unwrap();
        assert!((&t.matrix - &back.matrix).norm() == 0.0);
    }
}
