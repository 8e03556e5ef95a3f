//! Fourier-extension oversampling collocation on irregular planar domains.
//!
//! A domain `Ω` is embedded in the square `R = [-T, T]^2` and functions on
//! `Ω` are represented by a truncated Fourier series that is periodic on
//! `R`. Restricted to `Ω` the Fourier basis is only a frame, so the
//! collocation systems are rectangular, oversampled and severely
//! ill-conditioned; they are solved by truncated SVD.
//!
//! - [`extension`] fits a given function (discrete Fourier extension).
//! - [`pde`] solves `-∇·(α∇U) + βU = F` in `Ω`, `U = H` on `∂Ω`.
//! - [`presets`] holds the built-in test functions and manufactured problems.

pub mod cli;
pub mod extension;
pub mod fields;
pub mod frames;
pub mod geometry;
pub mod linalg;
pub mod nodes;
pub mod pde;
pub mod presets;

pub use faer;
pub use num_complex::Complex64;

pub use extension::Approximant;
pub use fields::{RealField, ScalarField};
pub use frames::{DerivOrder, FrameSpec, MultiIndex};
pub use geometry::{catalog, Domain, Location, Point2};
pub use linalg::{tsvd_solve, TsvdReport};
pub use nodes::{GridSpec, NodeSet};
pub use pde::{BoundaryPolicy, CoefficientField, PdeProblem, PdeSolution};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Frame(#[from] frames::FrameError),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("undersampled system: N_Ω = {n_omega} collocation rows for N_Λ = {n_lambda} unknowns")]
    Undersampled { n_omega: usize, n_lambda: usize },
    #[error("rejection sampling accepted {accepted} of {trials} trials; domain is degenerate")]
    DegenerateDomain { accepted: usize, trials: u64 },
    #[error("domain `{domain}` is not strictly inside [-{half_width}, {half_width}]^2")]
    NotEmbedded { domain: String, half_width: f64 },
    #[error("coefficient condition violated at interior node {index} {point}: {detail}")]
    CoefficientSign { index: usize, point: Point2, detail: String },
    #[error("no interior evaluation points")]
    EmptyEvaluation,
    #[error("eval density must be at least 1")]
    EvalDensity,
}
