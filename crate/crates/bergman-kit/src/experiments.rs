//! Batch experiment runner behind the `bergman-kit` binary.
//!
//! Each experiment reads one JSON config, runs deterministically under the
//! config seed, and writes a CSV table plus a JSON echo. Outputs embed the
//! full config and the crate version; numbers are printed with 17
//! significant digits so reruns are diffable byte for byte.

use crate::analysis::{growth_exponent_fit, growth_integral, schur_bound, KernelSpec};
use crate::berezin::decay_profile;
use crate::covering::{build_suarez_covering_with_samples, mu_rho, PolydiscLattice};
use crate::error::{Error, Result};
use crate::essential::{
    approx_identity_error, approx_identity_error_unchecked, compactness_verdict, estimator_a,
    estimator_b, estimator_c, segmented_error, VerdictConfig,
};
use crate::measures::{carleson_constant, geometric_norm, rkm_norm, DensityMeasure, Measure};
use crate::operators::{
    one_tensor_one, toeplitz_coordinate, toeplitz_radial_product, toeplitz_symbol, MonomialBasis,
    TruncatedOperator,
};
use crate::point::{Direction, GridSpec, PolyPoint};
use crate::quadrature::QuadratureSpec;
use crate::symbol::{Symbol, SymbolSpec};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const EXPERIMENTS: &[&str] = &[
    "lattice",
    "carleson",
    "berezin-profile",
    "approx-identity",
    "bk-approx",
    "segmented",
    "estimators",
    "verdict",
];

/// One JSON document drives every experiment; unused sections are ignored
/// by experiments that do not reference them.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub beta_max: Option<f64>,
    #[serde(default)]
    pub rho_ladder: Option<Vec<f64>>,
    #[serde(default)]
    pub sigma_ladder: Option<Vec<f64>>,
    #[serde(default)]
    pub k_list: Option<Vec<usize>>,
    #[serde(default)]
    pub r_ladder: Option<Vec<f64>>,
    #[serde(default)]
    pub symbols: Option<Vec<SymbolSpec>>,
    #[serde(default)]
    pub covering_k: Option<usize>,
    #[serde(default)]
    pub samples: Option<usize>,
    /// Per-axis degree for Berezin profiles in the verdict/profile paths.
    #[serde(default)]
    pub profile_degree: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_n() -> usize {
    1
}
fn default_degree() -> usize {
    12
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return Err(Error::Config(format!(
                "unknown experiment '{}'; known: {}",
                self.experiment,
                EXPERIMENTS.join(", ")
            )));
        }
        if self.n == 0 || self.n > 4 {
            return Err(Error::Config(format!(
                "dimension n = {} out of the supported range 1..=4",
                self.n
            )));
        }
        for (name, ladder) in [
            ("rho_ladder", &self.rho_ladder),
            ("sigma_ladder", &self.sigma_ladder),
            ("r_ladder", &self.r_ladder),
        ] {
            if let Some(l) = ladder {
                if l.is_empty() {
                    return Err(Error::Config(format!("{name} must be nonempty")));
                }
                let increasing = l.windows(2).all(|w| w[1] > w[0]);
                let decreasing = l.windows(2).all(|w| w[1] < w[0]);
                if l.len() > 1 && !increasing && !decreasing {
                    return Err(Error::Config(format!("{name} must be strictly monotone")));
                }
            }
        }
        if let Some(ks) = &self.k_list {
            if ks.is_empty() {
                return Err(Error::Config("k_list must be nonempty".into()));
            }
        }
        Ok(())
    }

    fn grid_points(&self, cap: f64) -> Result<Vec<PolyPoint>> {
        self.grid
            .clone()
            .unwrap_or_default()
            .capped(cap)
            .points(self.n)
    }

    fn quad(&self) -> QuadratureSpec {
        self.quadrature
            .unwrap_or_else(|| QuadratureSpec::for_degree(self.degree))
    }
}

/// A finished experiment: named CSV tables plus one JSON report.
pub struct ExperimentOutput {
    pub name: String,
    pub csv: String,
    pub json: serde_json::Value,
}

impl ExperimentOutput {
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.name));
        let json_path = dir.join(format!("{}.json", self.name));
        std::fs::write(&csv_path, self.csv.as_bytes())?;
        std::fs::write(&json_path, serde_json::to_string_pretty(&self.json)? + "\n")?;
        Ok(vec![csv_path, json_path])
    }
}

/// Format a float with 17 significant digits (diffable reruns).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

struct CsvBuilder {
    text: String,
}

impl CsvBuilder {
    fn new(config: &ExperimentConfig, columns: &[&str]) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "# bergman-kit {}", crate::VERSION);
        let _ = writeln!(
            text,
            "# config: {}",
            serde_json::to_string(config).expect("config serializes")
        );
        let _ = writeln!(text, "{}", columns.join(","));
        CsvBuilder { text }
    }

    fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    fn finish(self) -> String {
        self.text
    }
}

fn report_json(config: &ExperimentConfig, body: serde_json::Value) -> serde_json::Value {
    serde_json::json!({
        "version": crate::VERSION,
        "config": config,
        "results": body,
    })
}

/// Run one experiment and write its artifacts into `out_dir`.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let output = produce(config)?;
    output.write_to(out_dir)
}

/// Run one experiment into in-memory artifacts.
pub fn produce(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    match config.experiment.as_str() {
        "lattice" => lattice_experiment(config),
        "carleson" => carleson_experiment(config),
        "berezin-profile" => berezin_profile_experiment(config),
        "approx-identity" => approx_identity_experiment(config),
        "bk-approx" => bk_approx_experiment(config),
        "segmented" => segmented_experiment(config),
        "estimators" => estimators_experiment(config),
        "verdict" => verdict_experiment(config),
        other => Err(Error::Config(format!("unknown experiment '{other}'"))),
    }
}

// ---------------------------------------------------------------------------
// shared battery

/// The standard operator battery: identity, the projection onto constants,
/// the Toeplitz operator of `prod (1-|z_l|^2)`, and the coordinate shift.
pub fn operator_battery(n: usize, degree: usize) -> Result<Vec<(String, TruncatedOperator)>> {
    let basis = MonomialBasis::new(n, degree)?;
    let radial: Vec<&(dyn Fn(f64) -> f64 + Sync)> = (0..n)
        .map(|_| &(|x: f64| 1.0 - x) as &(dyn Fn(f64) -> f64 + Sync))
        .collect();
    Ok(vec![
        ("identity".into(), TruncatedOperator::identity(basis.clone())),
        ("one_tensor_one".into(), one_tensor_one(&basis)),
        (
            "toeplitz_one_minus_abs_sq".into(),
            toeplitz_radial_product(&basis, &radial)?,
        ),
        ("toeplitz_z1".into(), toeplitz_coordinate(&basis, 0)?),
    ])
}

fn uniform_disc_point(rng: &mut impl Rng, max_mod: f64) -> Complex64 {
    let x = rng.gen::<f64>() * max_mod * max_mod;
    let th = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
    Complex64::from_polar(x.sqrt(), th)
}

fn uniform_point(rng: &mut impl Rng, n: usize, max_mod: f64) -> PolyPoint {
    PolyPoint::new((0..n).map(|_| uniform_disc_point(rng, max_mod)).collect())
        .expect("interior point")
}

// ---------------------------------------------------------------------------
// lattice

fn lattice_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let beta_max = config.beta_max.unwrap_or(2.5);
    let rhos = config.rho_ladder.clone().unwrap_or(vec![0.5, 1.0]);
    let sigmas = config.sigma_ladder.clone().unwrap_or(vec![1.0, 2.0]);
    let ks = config.k_list.clone().unwrap_or(vec![0, 2]);
    let samples = config.samples.unwrap_or(10_000);
    let mut csv = CsvBuilder::new(
        config,
        &[
            "kind",
            "n",
            "scale",
            "k",
            "cells",
            "samples",
            "partition_violations",
            "max_center_beta",
            "inner_violations",
            "overlap_bound",
            "diameter_bound",
        ],
    );
    let mut results = Vec::new();
    for &rho in &rhos {
        let lattice = PolydiscLattice::build(rho, config.n, beta_max)?;
        let check = check_cr_lattice(&lattice, samples, config.seed)?;
        csv.row(&[
            "cr".into(),
            config.n.to_string(),
            fmt_f64(rho),
            String::new(),
            lattice.cell_count().to_string(),
            samples.to_string(),
            check.partition_violations.to_string(),
            fmt_f64(check.max_center_beta),
            check.inner_violations.to_string(),
            String::new(),
            String::new(),
        ]);
        results.push(serde_json::json!({
            "kind": "cr", "scale": rho, "cells": lattice.cell_count(),
            "partition_violations": check.partition_violations,
            "max_center_beta": check.max_center_beta,
            "inner_violations": check.inner_violations,
        }));
    }
    for &sigma in &sigmas {
        for &k in &ks {
            let cov = build_suarez_covering_with_samples(
                sigma,
                k,
                config.n,
                beta_max,
                samples.min(4_000),
                config.seed,
            )?;
            csv.row(&[
                "suarez".into(),
                config.n.to_string(),
                fmt_f64(sigma),
                k.to_string(),
                cov.base.cell_count().to_string(),
                cov.check_samples.to_string(),
                "0".into(),
                String::new(),
                "0".into(),
                cov.overlap_bound.to_string(),
                fmt_f64(cov.diameter_bound),
            ]);
            results.push(serde_json::json!({
                "kind": "suarez", "sigma": sigma, "k": k,
                "cells": cov.base.cell_count(),
                "overlap_bound": cov.overlap_bound,
                "diameter_bound": cov.diameter_bound,
            }));
        }
    }
    Ok(ExperimentOutput {
        name: "lattice".into(),
        csv: csv.finish(),
        json: report_json(config, serde_json::Value::Array(results)),
    })
}

/// Sampled checks of the partition and pinching properties of a lattice.
pub struct CrCheckReport {
    pub partition_violations: usize,
    pub max_center_beta: f64,
    pub inner_violations: usize,
}

pub fn check_cr_lattice(
    lattice: &PolydiscLattice,
    samples: usize,
    seed: u64,
) -> Result<CrCheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xce11);
    let covered = lattice.axis.covered_beta().tanh();
    let mut partition_violations = 0;
    let mut max_center_beta = 0.0f64;
    for _ in 0..samples {
        let z = uniform_point(&mut rng, lattice.dim, covered * (1.0 - 1e-12));
        match lattice.locate(&z)? {
            None => partition_violations += 1,
            Some(idx) => {
                let cell = lattice.cell(&idx);
                if !cell.contains(&z)? {
                    partition_violations += 1;
                }
                max_center_beta = max_center_beta.max(crate::geometry::beta(&z, &cell.center)?);
            }
        }
    }
    // inner containment: sample inside D(center, rho/4) for a cell subset
    let mut inner_violations = 0;
    let axis_cells = lattice.axis.cell_count();
    let step = (axis_cells / 25).max(1);
    for c0 in (0..axis_cells).step_by(step) {
        let idx = vec![c0; lattice.dim];
        let cell = lattice.cell(&idx);
        let t = (lattice.axis.rho / 4.0 * (1.0 - 1e-9)).tanh();
        for _ in 0..200 {
            let coords: Vec<Complex64> = cell
                .center
                .coords()
                .iter()
                .map(|&c| crate::geometry::mobius_1d(c, -uniform_disc_point(&mut rng, t)))
                .collect();
            let w = PolyPoint::new(coords)?;
            if !cell.contains(&w)? {
                inner_violations += 1;
            }
        }
    }
    Ok(CrCheckReport {
        partition_violations,
        max_center_beta,
        inner_violations,
    })
}

// ---------------------------------------------------------------------------
// carleson

fn carleson_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let basis = MonomialBasis::new(config.n, config.degree)?;
    let quad = config.quad();
    let grid = config.grid_points(0.9)?;
    let beta_max = config.beta_max.unwrap_or(2.5);
    let battery: Vec<(String, Measure)> = vec![
        (
            "lebesgue".into(),
            Measure::Density(DensityMeasure {
                density: Symbol::one(),
                quad,
            }),
        ),
        ("mu_rho_1.0".into(), Measure::Atomic(mu_rho(1.0, config.n, beta_max)?)),
        (
            "half_polydisc".into(),
            Measure::Density(DensityMeasure {
                density: Symbol::new("half", 1.0, |z: &[Complex64]| {
                    if z[0].re > 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::default()
                    }
                }),
                quad,
            }),
        ),
    ];
    let mut csv = CsvBuilder::new(
        config,
        &["measure", "rkm", "geometric_r1", "toeplitz_norm", "max_pairwise_ratio"],
    );
    let mut results = Vec::new();
    for (name, mu) in &battery {
        let rkm = rkm_norm(mu, &grid)?.value;
        let geo = geometric_norm(mu, 1.0, &grid)?.value;
        let car = carleson_constant(mu, &basis)?;
        let vals = [rkm, geo, car];
        let mut ratio = 1.0f64;
        for &a in &vals {
            for &b in &vals {
                if b > 0.0 {
                    ratio = ratio.max(a / b);
                }
            }
        }
        csv.row(&[
            name.clone(),
            fmt_f64(rkm),
            fmt_f64(geo),
            fmt_f64(car),
            fmt_f64(ratio),
        ]);
        results.push(serde_json::json!({
            "measure": name, "rkm": rkm, "geometric": geo,
            "toeplitz_norm": car, "max_pairwise_ratio": ratio,
        }));
    }
    Ok(ExperimentOutput {
        name: "carleson".into(),
        csv: csv.finish(),
        json: report_json(config, serde_json::Value::Array(results)),
    })
}

// ---------------------------------------------------------------------------
// berezin-profile

fn berezin_profile_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let degree = config.profile_degree.unwrap_or(if config.n == 1 { 800 } else { 48 });
    let battery = operator_battery(config.n, degree)?;
    let radii = config.r_ladder.clone().unwrap_or(vec![0.2, 0.5, 0.9, 0.99]);
    let tail_budget = 1e-4;
    let directions = 8usize;
    let mut csv = CsvBuilder::new(
        config,
        &["operator", "direction", "radius", "re", "im", "tail_bound"],
    );
    let mut results = Vec::new();
    for (name, op) in &battery {
        for d in 0..directions {
            let angle = 2.0 * std::f64::consts::PI * d as f64 / directions as f64;
            let dir = Direction::from_angles(&vec![angle; config.n])?;
            let profile = decay_profile(op, &dir, &radii, tail_budget)?;
            for ((r, v), t) in profile
                .radii
                .iter()
                .zip(&profile.values)
                .zip(&profile.tails)
            {
                csv.row(&[
                    name.clone(),
                    fmt_f64(angle),
                    fmt_f64(*r),
                    fmt_f64(v.re),
                    fmt_f64(v.im),
                    fmt_f64(*t),
                ]);
            }
            results.push(serde_json::json!({
                "operator": name, "direction": angle,
                "radii": profile.radii,
                "values": profile.values.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
            }));
        }
    }
    Ok(ExperimentOutput {
        name: "berezin-profile".into(),
        csv: csv.finish(),
        json: report_json(config, serde_json::Value::Array(results)),
    })
}

// ---------------------------------------------------------------------------
// approx-identity

fn approx_identity_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let basis = MonomialBasis::new(config.n, config.degree)?;
    let beta_max = config.beta_max.unwrap_or(8.0);
    let ladder = config.rho_ladder.clone().unwrap_or(vec![0.5, 0.25, 0.125]);
    let mut csv = CsvBuilder::new(
        config,
        &["rho", "error", "ratio_to_previous", "uncovered_estimate", "comparison_beta_max"],
    );
    let mut results = Vec::new();
    let mut previous: Option<f64> = None;
    for &rho in &ladder {
        let report = approx_identity_error(rho, &basis, beta_max)?;
        let ratio = previous.map(|p| report.error / p);
        csv.row(&[
            fmt_f64(rho),
            fmt_f64(report.error),
            ratio.map(fmt_f64).unwrap_or_default(),
            fmt_f64(report.uncovered_estimate),
            fmt_f64(report.comparison_beta_max),
        ]);
        results.push(serde_json::json!({
            "rho": rho, "error": report.error,
            "ratio_to_previous": ratio,
            "uncovered_estimate": report.uncovered_estimate,
        }));
        previous = Some(report.error);
    }
    Ok(ExperimentOutput {
        name: "approx-identity".into(),
        csv: csv.finish(),
        json: report_json(config, serde_json::Value::Array(results)),
    })
}

// ---------------------------------------------------------------------------
// bk-approx

fn bk_approx_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let ks = config.k_list.clone().unwrap_or(vec![1, 8, 32]);
    let specs = config.symbols.clone().unwrap_or(vec![
        SymbolSpec::OneMinusAbsSqProduct,
        SymbolSpec::ReCoordinate { axis: 0 },
    ]);
    let grid = config.grid_points(0.9)?;
    let mut csv = CsvBuilder::new(config, &["symbol", "k", "sup_error"]);
    let mut results = Vec::new();
    for spec in &specs {
        let symbol = spec.build(config.n)?;
        for &k in &ks {
            let quad = config
                .quadrature
                .unwrap_or_else(|| QuadratureSpec::for_k_transform(8, k));
            let err = crate::berezin::approx_symbol_error(&symbol, k, &grid, quad)?;
            csv.row(&[symbol.name.clone(), k.to_string(), fmt_f64(err)]);
            results.push(serde_json::json!({
                "symbol": symbol.name, "k": k, "sup_error": err,
            }));
        }
    }
    Ok(ExperimentOutput {
        name: "bk-approx".into(),
        csv: csv.finish(),
        json: report_json(config, serde_json::Value::Array(results)),
    })
}

// ---------------------------------------------------------------------------
// segmented

fn segmented_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let basis = MonomialBasis::new(config.n, config.degree.min(8))?;
    let beta_max = config.beta_max.unwrap_or(3.0);
    let sigmas = config.sigma_ladder.clone().unwrap_or(vec![1.0, 2.0, 3.0]);
    let k = config.covering_k.unwrap_or(0);
    let spec = config
        .symbols
        .as_ref()
        .and_then(|s| s.first().cloned())
        .unwrap_or(SymbolSpec::AbsSq { axis: 0 });
    let symbol = spec.build(config.n)?;
    let op = toeplitz_symbol(&symbol, &basis, config.quad())?;
    let mu = mu_rho(0.5, config.n, beta_max)?;
    let mut csv = CsvBuilder::new(config, &["sigma", "k", "error"]);
    let mut results = Vec::new();
    for &sigma in &sigmas {
        let cov = build_suarez_covering_with_samples(
            sigma,
            k,
            config.n,
            beta_max,
            config.samples.unwrap_or(1_000),
            config.seed,
        )?;
        let err = segmented_error(&op, &mu, &cov, &basis)?;
        csv.row(&[fmt_f64(sigma), k.to_string(), fmt_f64(err)]);
        results.push(serde_json::json!({"sigma": sigma, "k": k, "error": err}));
    }
    Ok(ExperimentOutput {
        name: "segmented".into(),
        csv: csv.finish(),
        json: report_json(config, serde_json::Value::Array(results)),
    })
}

// ---------------------------------------------------------------------------
// estimators

fn estimators_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let battery = operator_battery(config.n, config.degree)?;
    let ladder = config.r_ladder.clone().unwrap_or(vec![0.5, 0.7, 0.9, 0.95]);
    let quad = config.quad();
    let beta_max = config.beta_max.unwrap_or(3.5);
    // lattice scale for the kernel-span estimator: first ladder value with
    // ||T_mu - I|| < 1/4
    let basis = MonomialBasis::new(config.n, config.degree)?;
    let mut rho_for_a = 0.5;
    for &candidate in &[0.5, 0.25] {
        rho_for_a = candidate;
        if approx_identity_error_unchecked(candidate, &basis, beta_max)? < 0.25 {
            break;
        }
    }
    let mut csv = CsvBuilder::new(config, &["operator", "estimator", "parameter", "value"]);
    let mut results = Vec::new();
    for (name, op) in &battery {
        for &r in &ladder {
            let c = estimator_c(op, r)?;
            csv.row(&[name.clone(), "c".into(), fmt_f64(r), fmt_f64(c)]);
            results.push(serde_json::json!({"operator": name, "estimator": "c", "parameter": r, "value": c}));
        }
        for &m in &ladder {
            let dir = Direction::from_angles(&vec![0.0; config.n])?;
            let center = dir.at_radius(m)?;
            let b = estimator_b(op, 1.0, std::slice::from_ref(&center), quad)?;
            csv.row(&[name.clone(), "b".into(), fmt_f64(m), fmt_f64(b)]);
            results.push(serde_json::json!({"operator": name, "estimator": "b", "parameter": m, "value": b}));
            let a = estimator_a(op, 1.0, &center, rho_for_a)?;
            csv.row(&[name.clone(), "a".into(), fmt_f64(m), fmt_f64(a.value)]);
            results.push(serde_json::json!({
                "operator": name, "estimator": "a", "parameter": m,
                "value": a.value, "span_size": a.span_size, "ridge": a.ridge,
            }));
        }
    }
    Ok(ExperimentOutput {
        name: "estimators".into(),
        csv: csv.finish(),
        json: report_json(config, serde_json::Value::Array(results)),
    })
}

// ---------------------------------------------------------------------------
// verdict

fn verdict_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let degree = config.profile_degree.unwrap_or(if config.n == 1 { 800 } else { 48 });
    let battery = operator_battery(config.n, degree)?;
    let vconfig = VerdictConfig {
        estimator_degree: config.degree.min(12),
        ..VerdictConfig::default()
    };
    let mut csv = CsvBuilder::new(
        config,
        &[
            "operator",
            "verdict",
            "boundary_value",
            "profile_max",
            "threshold",
            "radius_used",
            "radius_was_capped",
            "operator_norm",
        ],
    );
    let mut results = Vec::new();
    for (name, op) in &battery {
        let report = compactness_verdict(op, &vconfig)?;
        csv.row(&[
            name.clone(),
            format!("{:?}", report.verdict).to_lowercase(),
            fmt_f64(report.boundary_value),
            fmt_f64(report.profile_max),
            fmt_f64(report.threshold),
            fmt_f64(report.verdict_radius_used),
            report.radius_was_capped.to_string(),
            fmt_f64(report.operator_norm),
        ]);
        results.push(serde_json::json!({
            "operator": name,
            "report": report,
        }));
    }
    Ok(ExperimentOutput {
        name: "verdict".into(),
        csv: csv.finish(),
        json: report_json(config, serde_json::Value::Array(results)),
    })
}

// ---------------------------------------------------------------------------
// growth/schur: reusable helpers for tests and examples (not a CLI
// experiment of their own; they back the analysis example)

/// The Schur-test battery used by the acceptance checks:
/// `(kernel, h_exponent, p)` triples with both weighted integrals
/// integrable (`t + q h > -1` and `p h > -1`).
pub fn schur_battery() -> Vec<(KernelSpec, f64, f64)> {
    vec![
        (KernelSpec { s: 2.0, t: 0.0, scale: 1.0 }, -0.25, 2.0),
        (KernelSpec { s: 2.0, t: -0.25, scale: 1.0 }, -0.25, 2.0),
        (KernelSpec { s: 1.5, t: 0.0, scale: 1.0 }, -1.0 / 6.0, 3.0),
        (KernelSpec { s: 2.0, t: 0.0, scale: 3.0 }, -0.25, 2.0),
    ]
}

pub use crate::analysis::SchurReport;

pub fn run_schur_case(
    kernel: KernelSpec,
    h_exponent: f64,
    p: f64,
    grid: &[PolyPoint],
) -> Result<SchurReport> {
    schur_bound(kernel, h_exponent, p, 64, grid)
}

pub fn growth_check(s: f64, t: f64, moduli: &[f64]) -> Result<Vec<(f64, f64)>> {
    moduli
        .iter()
        .map(|&m| Ok((m, growth_integral(s, t, Complex64::new(m, 0.0), 128)?)))
        .collect()
}

pub fn growth_slope(s: f64, t: f64, moduli: &[f64]) -> Result<f64> {
    growth_exponent_fit(s, t, moduli, 192)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn base_config(experiment: &str) -> ExperimentConfig {
        ExperimentConfig {
            experiment: experiment.into(),
            n: 1,
            degree: 6,
            seed: 7,
            quadrature: None,
            grid: Some(GridSpec::new(vec![0.0, 0.4, 0.8], 4)),
            beta_max: Some(2.0),
            rho_ladder: None,
            sigma_ladder: None,
            k_list: None,
            r_ladder: None,
            symbols: None,
            covering_k: None,
            samples: Some(500),
            profile_degree: Some(64),
            out: None,
        }
    }

    #[test]
    fn config_validation() {
        let mut c = base_config("lattice");
        c.rho_ladder = Some(vec![]);
        assert!(c.validate().is_err());
        c.rho_ladder = Some(vec![0.5, 0.5]);
        assert!(c.validate().is_err());
        c.rho_ladder = Some(vec![0.5, 1.0]);
        assert!(c.validate().is_ok());
        c.experiment = "nope".into();
        assert!(c.validate().is_err());
    }

    #[test]
    fn experiments_are_deterministic() {
        for exp in ["carleson", "bk-approx"] {
            let mut config = base_config(exp);
            config.k_list = Some(vec![1, 4]);
            let a = produce(&config).unwrap();
            let b = produce(&config).unwrap();
            assert_eq!(a.csv, b.csv, "{exp} CSV must be byte-identical");
            assert_eq!(
                serde_json::to_string(&a.json).unwrap(),
                serde_json::to_string(&b.json).unwrap()
            );
        }
    }

    #[test]
    fn outputs_embed_config_and_version() {
        let config = base_config("carleson");
        let out = produce(&config).unwrap();
        assert!(out.csv.starts_with(&format!("# bergman-kit {}", crate::VERSION)));
        assert!(out.csv.contains("\"experiment\":\"carleson\""));
        let dir = tempdir().unwrap();
        let files = out.write_to(dir.path()).unwrap();
        assert_eq!(files.len(), 2);
        for f in files {
            assert!(f.exists());
        }
    }
}
