//! Essential-norm machinery: the lattice approximate identity, the three
//! boundary-localized size estimators, segmented approximation, and the
//! compactness verdict.
//!
//! All norms here are `p = 2` norms computed through Gram forms on the
//! truncation. Limits `r -> 1` and `z -> boundary` are realized as ladders
//! and outermost shells; trends are reported, never extrapolated.

use crate::berezin::{admissible_radius, berezin_operator, BerezinProfile};
use crate::covering::{axis_cell_gram, Covering, DiscLattice, PolydiscLattice};
use crate::error::{Error, Result};
use crate::geometry::euclidean_disc;
use crate::measures::AtomicMeasure;
use crate::operators::{
    kernel_coefficients, matrix_operator_norm, toeplitz_measure, MonomialBasis, TruncatedOperator,
};
use crate::point::{Direction, PolyPoint};
use crate::quadrature::{DiscRule, QuadratureSpec};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;

pub use crate::covering::mu_rho;

/// One estimator evaluation inside a trend.
#[derive(Clone, Debug, Serialize)]
pub struct TrendPoint {
    pub parameter: f64,
    pub value: f64,
}

// ---------------------------------------------------------------------------
// approximate identity

/// Report for `||T_{μ_ϱ} - I||` on the truncation.
#[derive(Clone, Debug)]
pub struct ApproxIdentityReport {
    pub error: f64,
    /// Error at the comparison truncation radius.
    pub comparison_error: f64,
    pub comparison_beta_max: f64,
    /// Estimated contribution of the uncovered region.
    pub uncovered_estimate: f64,
}

/// `||T_{μ_ϱ} - I||`, with a sensitivity check that the uncovered region
/// beyond `beta_max` contributes less than 10% of the reported error
/// (comparison against a second truncation radius plus the exact norm of
/// the uncovered Gram).
pub fn approx_identity_error(
    rho: f64,
    basis: &MonomialBasis,
    beta_max: f64,
) -> Result<ApproxIdentityReport> {
    let value = raw_approx_identity_error(rho, basis, beta_max)?;
    let comparison_beta_max = (beta_max - 0.5).max(beta_max / 2.0);
    let comparison = raw_approx_identity_error(rho, basis, comparison_beta_max)?;
    // exact norm of the Gram of the uncovered region (diagonal)
    let uncovered_now = uncovered_gram_norm(rho, basis, beta_max);
    let uncovered_cmp = uncovered_gram_norm(rho, basis, comparison_beta_max);
    let q = if uncovered_cmp > 0.0 {
        (uncovered_now / uncovered_cmp).min(1.0)
    } else {
        0.0
    };
    let extrapolated = if q < 1.0 {
        (comparison - value).abs() * q / (1.0 - q)
    } else {
        f64::INFINITY
    };
    let uncovered_estimate = uncovered_now.max(extrapolated);
    if uncovered_estimate >= 0.1 * value {
        return Err(Error::CoverageSensitivity {
            sensitivity: uncovered_estimate,
            value,
        });
    }
    Ok(ApproxIdentityReport {
        error: value,
        comparison_error: comparison,
        comparison_beta_max,
        uncovered_estimate,
    })
}

/// `||T_{μ_ϱ} - I||` without the coverage-sensitivity gate.
pub fn approx_identity_error_unchecked(
    rho: f64,
    basis: &MonomialBasis,
    beta_max: f64,
) -> Result<f64> {
    raw_approx_identity_error(rho, basis, beta_max)
}

fn raw_approx_identity_error(rho: f64, basis: &MonomialBasis, beta_max: f64) -> Result<f64> {
    // ring-wise closed form: exact and cheap at any truncation radius
    let lattice = PolydiscLattice::build(rho, basis.dim(), beta_max)?;
    let t = crate::operators::lattice_toeplitz(&lattice, basis)?;
    let id = TruncatedOperator::identity(basis.clone());
    matrix_operator_norm(&(&t.matrix - &id.matrix))
}

fn uncovered_gram_norm(rho: f64, basis: &MonomialBasis, beta_max: f64) -> f64 {
    let lattice = DiscLattice::build(rho, beta_max).expect("validated by caller");
    let r = lattice.covered_beta().tanh();
    let d1 = basis.max_degree() as i32 + 1;
    1.0 - r.powi(2 * d1 * basis.dim() as i32)
}

// ---------------------------------------------------------------------------
// annulus and box Grams

/// Diagonal Gram of the basis over `D^n \ r D^n`:
/// `G_r[α] = 1 - prod_l r^{2(α_l + 1)}`.
pub fn annulus_gram(basis: &MonomialBasis, r: f64) -> DVector<f64> {
    DVector::from_fn(basis.len(), |flat, _| {
        let multi = basis.multi_index(flat);
        let p: f64 = multi
            .iter()
            .map(|&a| r.powi(2 * (a as i32 + 1)))
            .product();
        1.0 - p
    })
}

/// `c_S(r) = ||M_{1_{(rD^n)^c}} S||_{A² -> L²} = ||G_r^{1/2} S||` with the
/// exact diagonal Gram.
pub fn estimator_c(op: &TruncatedOperator, r: f64) -> Result<f64> {
    if !(0.0 < r && r < 1.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: format!("need 0 < r < 1, got {r}"),
        });
    }
    let g = annulus_gram(&op.basis, r);
    let mut m = op.matrix.clone();
    for (row, gv) in g.iter().enumerate() {
        let s = gv.max(0.0).sqrt();
        for c in 0..m.ncols() {
            m[(row, c)] *= s;
        }
    }
    matrix_operator_norm(&m)
}

/// Hermitian Gram of the basis over the hyperbolic box `D(z, r)`
/// (per-axis quadrature over the Euclidean realization, tensored).
pub fn box_gram(
    basis: &MonomialBasis,
    z: &PolyPoint,
    r: f64,
    quad: QuadratureSpec,
) -> Result<DMatrix<Complex64>> {
    if z.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            left: z.dim(),
            right: basis.dim(),
        });
    }
    let t = r.tanh();
    let d = basis.max_degree();
    let axis_basis = basis.axis_basis();
    let mut grams: Vec<DMatrix<Complex64>> = Vec::with_capacity(z.dim());
    for &c in z.coords() {
        let (ec, er) = euclidean_disc(c, t);
        let rule = DiscRule::build_on_disc(quad, ec, er);
        let k = d + 1;
        let mut g = DMatrix::<Complex64>::zeros(k, k);
        let mut powers = vec![Complex64::default(); k];
        let mut row = vec![Complex64::default(); k];
        for (pt, w) in rule.points.iter().zip(&rule.weights) {
            axis_basis.eval_into(&[*pt], &mut powers, &mut row);
            for (b, rb) in row.iter().enumerate() {
                let cb = Complex64::new(*w, 0.0) * rb.conj();
                for (a, ra) in row.iter().enumerate() {
                    g[(b, a)] += cb * ra;
                }
            }
        }
        grams.push(g);
    }
    let mut total = grams[0].clone();
    for g in &grams[1..] {
        total = total.kronecker(g);
    }
    Ok(total)
}

/// `b_S`: max over centers of `||M_{1_{D(z,r)}} S|| = sqrt(λ_max(S* G S))`
/// with the quadrature box Gram.
pub fn estimator_b(
    op: &TruncatedOperator,
    r: f64,
    centers: &[PolyPoint],
    quad: QuadratureSpec,
) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::InvalidParameter {
            name: "centers",
            reason: "need at least one center".into(),
        });
    }
    let mut best = 0.0f64;
    for z in centers {
        let g = box_gram(&op.basis, z, r, quad)?;
        let m = op.matrix.adjoint() * (&g * &op.matrix);
        best = best.max(matrix_operator_norm(&m)?.max(0.0).sqrt());
    }
    Ok(best)
}

/// Result of the kernel-span estimator.
#[derive(Clone, Debug)]
pub struct EstimatorAResult {
    pub value: f64,
    pub span_size: usize,
    pub ridge: f64,
}

/// `a_S(r)` at one center: maximize `||S f|| / ||f||` over the span of the
/// normalized kernels at the lattice points of `μ_ϱ` inside `D(z, r)`
/// (generalized eigenproblem against the kernel Gram, ridge-regularized).
pub fn estimator_a(
    op: &TruncatedOperator,
    r: f64,
    z: &PolyPoint,
    rho_scale: f64,
) -> Result<EstimatorAResult> {
    let n = op.basis.dim();
    if z.dim() != n {
        return Err(Error::DimensionMismatch {
            left: z.dim(),
            right: n,
        });
    }
    let reach = z
        .coords()
        .iter()
        .map(|c| crate::geometry::radial_coordinate(*c))
        .fold(0.0, f64::max)
        + r
        + rho_scale;
    let lattice = PolydiscLattice::build(rho_scale, n, reach)?;
    let (centers, _) = lattice.centers_and_volumes();
    let t = r.tanh();
    let span: Vec<PolyPoint> = centers
        .into_iter()
        .filter(|c| {
            c.iter()
                .zip(z.coords())
                .all(|(&p, &zc)| crate::geometry::rho_1d(zc, p) <= t)
        })
        .map(|c| PolyPoint::new(c).expect("lattice centers are interior"))
        .collect();
    if span.is_empty() {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: "no lattice points inside the box; enlarge r or the lattice scale".into(),
        });
    }
    let k = op.basis.len();
    let mut c = DMatrix::<Complex64>::zeros(k, span.len());
    for (j, w) in span.iter().enumerate() {
        let (coeffs, _) = kernel_coefficients(w, &op.basis)?;
        c.set_column(j, &coeffs);
    }
    let gram = c.adjoint() * &c;
    let sc = &op.matrix * &c;
    let target = sc.adjoint() * &sc;
    // ridge keeps the crowded kernel Gram invertible
    let ridge = 1e-12 * (1.0 + gram.diagonal().iter().map(|d| d.re).fold(0.0, f64::max));
    let regularized = &gram + DMatrix::<Complex64>::identity(span.len(), span.len()) * Complex64::new(ridge, 0.0);
    let chol = nalgebra::linalg::Cholesky::new(regularized).ok_or(Error::InvalidParameter {
        name: "gram",
        reason: "kernel Gram not positive definite even after ridge".into(),
    })?;
    // λ_max(L^{-1} A L^{-*}) via the Cholesky factor
    let l = chol.l();
    let linv_a = l.clone().solve_lower_triangular(&target).ok_or(Error::InvalidParameter {
        name: "gram",
        reason: "singular Cholesky factor".into(),
    })?;
    let m = l
        .solve_lower_triangular(&linv_a.adjoint())
        .ok_or(Error::InvalidParameter {
            name: "gram",
            reason: "singular Cholesky factor".into(),
        })?;
    let lam = matrix_operator_norm(&m)?;
    Ok(EstimatorAResult {
        value: lam.max(0.0).sqrt(),
        span_size: span.len(),
        ridge,
    })
}

// ---------------------------------------------------------------------------
// segmented approximation

/// `L²` operator-norm gap between `S T_μ` and its segmented form
/// `Σ_j M_{1_{F_j}} S T_{1_{G_j} μ}` over a nested covering
/// (`F` = level 0, `G` = top level). Multiplier Grams are closed-form
/// sector integrals; the restriction of the atomic `μ` is exact filtering.
pub fn segmented_error(
    op: &TruncatedOperator,
    mu: &AtomicMeasure,
    covering: &Covering,
    basis: &MonomialBasis,
) -> Result<f64> {
    let n = basis.dim();
    if covering.dim != n || mu.dim() != n || op.basis.dim() != n {
        return Err(Error::DimensionMismatch {
            left: covering.dim,
            right: n,
        });
    }
    let top_radius = (covering.levels() - 1) as f64 * covering.sigma;
    // atoms -> cells whose top-level enlargement contains them
    let mut per_cell: BTreeMap<Vec<usize>, AtomicMeasure> = BTreeMap::new();
    for i in 0..mu.len() {
        let (coords, w) = mu.atom(i);
        let axis_lists: Vec<Vec<usize>> = coords
            .iter()
            .map(|&c| covering.base.axis.cells_within(c, top_radius))
            .collect();
        if axis_lists.iter().any(|l| l.is_empty()) {
            return Err(Error::PropertyViolation {
                property: "coverage",
                detail: "atom not covered by any top-level cell".into(),
            });
        }
        let mut idx = vec![0usize; n];
        'combos: loop {
            let cell: Vec<usize> = idx
                .iter()
                .zip(&axis_lists)
                .map(|(&i, list)| list[i])
                .collect();
            per_cell
                .entry(cell)
                .or_insert_with(|| AtomicMeasure::new(n))
                .push_coords(coords, w);
            let mut l = 0;
            loop {
                idx[l] += 1;
                if idx[l] < axis_lists[l].len() {
                    break;
                }
                idx[l] = 0;
                l += 1;
                if l == n {
                    break 'combos;
                }
            }
        }
    }
    let t_full = toeplitz_measure(mu, basis)?;
    let m_full = &op.matrix * &t_full.matrix;
    let k = basis.len();
    let mut cross = DMatrix::<Complex64>::zeros(k, k);
    let mut quad_term = DMatrix::<Complex64>::zeros(k, k);
    for (cell, mu_j) in &per_cell {
        let t_j = toeplitz_measure(mu_j, basis)?;
        let a_j = &op.matrix * &t_j.matrix;
        // level-0 multiplier Gram (product of per-axis sector Grams)
        let mut w_j = axis_cell_gram(&covering.base.axis.shape(cell[0]), basis.max_degree())?;
        for &ci in &cell[1..] {
            let g = axis_cell_gram(&covering.base.axis.shape(ci), basis.max_degree())?;
            w_j = w_j.kronecker(&g);
        }
        let wa = &w_j * &a_j;
        cross += &wa;
        quad_term += a_j.adjoint() * wa;
    }
    let q = m_full.adjoint() * &m_full - m_full.adjoint() * &cross - cross.adjoint() * &m_full
        + quad_term;
    let lam = matrix_operator_norm(&q)?;
    Ok(lam.max(0.0).sqrt())
}

// ---------------------------------------------------------------------------
// compactness verdict

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Vanishing,
    NonVanishing,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictConfig {
    pub directions_per_axis: usize,
    pub profile_radii: Vec<f64>,
    pub verdict_radius: f64,
    /// Fraction of the profile maximum below which the boundary value
    /// counts as vanished (heuristic, echoed in every report).
    pub epsilon_compact: f64,
    /// Gray zone: boundary values in `[ε, gray_factor·ε) · profile_max`
    /// are inconclusive.
    pub gray_factor: f64,
    pub tail_budget: f64,
    pub estimator_r_ladder: Vec<f64>,
    /// Estimators b and a run on the compression to this per-axis degree.
    pub estimator_degree: usize,
    pub estimator_b_hyper_radius: f64,
    pub estimator_b_center_modulus: f64,
}

impl Default for VerdictConfig {
    fn default() -> Self {
        VerdictConfig {
            directions_per_axis: 8,
            profile_radii: vec![0.2, 0.5, 0.7, 0.9, 0.99],
            verdict_radius: 0.99,
            epsilon_compact: 5e-2,
            gray_factor: 1.5,
            tail_budget: 1e-4,
            estimator_r_ladder: vec![0.5, 0.7, 0.9, 0.95],
            estimator_degree: 12,
            estimator_b_hyper_radius: 1.0,
            estimator_b_center_modulus: 0.9,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub verdict_radius_used: f64,
    pub radius_was_capped: bool,
    pub boundary_value: f64,
    pub profile_max: f64,
    pub threshold: f64,
    pub operator_norm: f64,
    /// Membership of the operator in the Toeplitz algebra is assumed for
    /// Toeplitz-built inputs, never decided numerically.
    pub toeplitz_membership_assumed: bool,
    pub estimator_c_trend: Vec<TrendPoint>,
    pub estimator_b_trend: Vec<TrendPoint>,
    #[serde(skip)]
    pub profiles: Vec<BerezinProfile>,
    pub config: VerdictConfig,
}

fn axis_directions(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| 2.0 * std::f64::consts::PI * i as f64 / count as f64)
        .collect()
}

fn all_directions(n: usize, per_axis: usize) -> Vec<Direction> {
    let angles = axis_directions(per_axis);
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let dir = Direction::from_angles(&idx.iter().map(|&i| angles[i]).collect::<Vec<_>>())
            .expect("nonempty direction");
        out.push(dir);
        let mut l = 0;
        loop {
            idx[l] += 1;
            if idx[l] < per_axis {
                break;
            }
            idx[l] = 0;
            l += 1;
            if l == n {
                return out;
            }
        }
    }
}

/// Berezin-decay verdict plus estimator trends. The verdict compares the
/// largest boundary-shell Berezin value against a fraction of the profile
/// maximum; it never claims a proof of compactness, and membership in the
/// Toeplitz algebra is an assumption recorded in the report.
pub fn compactness_verdict(op: &TruncatedOperator, config: &VerdictConfig) -> Result<VerdictReport> {
    let n = op.basis.dim();
    let d = op.basis.max_degree();
    let r_adm = admissible_radius(n, d, config.tail_budget);
    let r_verdict = config.verdict_radius.min(r_adm);
    let radius_was_capped = r_verdict < config.verdict_radius;
    let radii: Vec<f64> = {
        let mut rs: Vec<f64> = config
            .profile_radii
            .iter()
            .copied()
            .filter(|&r| r <= r_adm)
            .collect();
        if rs.last().map(|&r| r < r_verdict).unwrap_or(true) {
            rs.push(r_verdict);
        }
        rs
    };
    let dirs = all_directions(n, config.directions_per_axis);
    let mut profiles = Vec::with_capacity(dirs.len());
    let mut profile_max = 0.0f64;
    let mut boundary_value = 0.0f64;
    for dir in &dirs {
        let mut values = Vec::with_capacity(radii.len());
        let mut tails = Vec::with_capacity(radii.len());
        for &r in &radii {
            let z = dir.at_radius(r)?;
            let bv = berezin_operator(op, &z, config.tail_budget)?;
            profile_max = profile_max.max(bv.value.norm());
            if r == *radii.last().unwrap() {
                boundary_value = boundary_value.max(bv.value.norm());
            }
            values.push(bv.value);
            tails.push(bv.tail);
        }
        profiles.push(BerezinProfile {
            direction: dir.clone(),
            radii: radii.clone(),
            values,
            tails,
        });
    }
    let threshold = config.epsilon_compact * profile_max;
    let verdict = if boundary_value <= threshold {
        Verdict::Vanishing
    } else if boundary_value >= config.gray_factor * threshold {
        Verdict::NonVanishing
    } else {
        Verdict::Inconclusive
    };
    // estimator trends, on the compression: clustered spectra at profile
    // degrees make the full-degree norms needlessly expensive, and the
    // compression degree is echoed through the config
    let compressed = op.compress(config.estimator_degree)?;
    let mut c_trend = Vec::new();
    for &r in &config.estimator_r_ladder {
        c_trend.push(TrendPoint {
            parameter: r,
            value: estimator_c(&compressed, r)?,
        });
    }
    // estimator_b trend: centers marching toward the boundary along the
    // profile directions (the ladder doubles as the center-modulus ladder)
    let quad = QuadratureSpec::for_degree(compressed.basis.max_degree());
    let b_dirs = all_directions(n, config.directions_per_axis.min(4));
    let mut b_trend = Vec::new();
    for &m in &config.estimator_r_ladder {
        let centers: Vec<PolyPoint> = b_dirs
            .iter()
            .map(|d| d.at_radius(m))
            .collect::<Result<_>>()?;
        b_trend.push(TrendPoint {
            parameter: m,
            value: estimator_b(&compressed, config.estimator_b_hyper_radius, &centers, quad)?,
        });
    }
    let norm = crate::operators::operator_norm(op)?;
    Ok(VerdictReport {
        verdict,
        verdict_radius_used: r_verdict,
        radius_was_capped,
        boundary_value,
        profile_max,
        threshold,
        operator_norm: norm,
        toeplitz_membership_assumed: true,
        estimator_c_trend: c_trend,
        estimator_b_trend: b_trend,
        profiles,
        config: config.clone(),
    })
}
