//! Operator theory on Bergman spaces of the polydisc at desk scale.
//!
//! The crate makes the standard cast of objects computable: Möbius
//! geometry and hyperbolic decompositions of the polydisc, Carleson-measure
//! norms, Toeplitz operators compressed to truncated monomial bases,
//! Berezin and `k`-Berezin transforms, lattice approximate identities, and
//! boundary-localized estimators feeding a compactness verdict. Everything
//! is backed by analytic oracles in the test suites: closed forms, series,
//! change-of-variables identities, and sampled geometric properties.
//!
//! Start with the runnable examples (`cargo run --example <name>`); each
//! one walks through a capability:
//!
//! - `mobius_geometry` — automorphisms, invariant metrics, hyperbolic boxes
//! - `lattice_and_covering` — annular-sector decompositions and nested coverings
//! - `carleson_norms` — the three equivalent size measures of a measure
//! - `toeplitz_operators` — truncated matrices, kernels, translation maps
//! - `berezin_decay` — Berezin transforms along radial boundary paths
//! - `k_berezin_approximation` — `B_k(a) -> a` for uniformly continuous symbols
//! - `approximate_identity` — `T_{μ_ϱ} -> I` along a lattice-scale ladder
//! - `segmented_approximation` — covering-localized operator surgery
//! - `essential_norm_estimators` — the three boundary size estimators
//! - `compactness_verdict` — the full report on a small operator battery
//! - `growth_and_schur` — growth integrals, the Schur test, masked kernels
//!
//! The `bergman-kit` binary exposes the same machinery as reproducible
//! batch experiments driven by JSON configs with CSV/JSON outputs.

pub mod analysis;
pub mod berezin;
pub mod covering;
pub mod error;
pub mod essential;
pub mod experiments;
pub mod geometry;
pub mod measures;
pub mod operators;
pub mod point;
pub mod quadrature;
pub mod symbol;

pub use crate::error::{Error, Result};
pub use crate::point::{Direction, GridSpec, PolyPoint, SupEstimate};

/// Version string embedded in every experiment artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
