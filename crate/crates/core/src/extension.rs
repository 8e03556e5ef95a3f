//! Discrete Fourier extension: least-squares fit of a function sampled at
//! interior grid nodes by the tensor Fourier frame.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fields::ScalarField;
use crate::frames::{eval_matrix, synthesize, DerivOrder, FrameSpec};
use crate::geometry::{Domain, Point2};
use crate::linalg::{tsvd_solve, TsvdReport};
use crate::nodes::{restrict_interior, tensor_grid, GridSpec, NodeMetadata, NodeSet, NodeSource};
use crate::Error;

/// Oversampling factor used when no grid is given explicitly.
pub const DEFAULT_GAMMA: f64 = 4.0;

/// Default refinement of the error-measurement grid relative to the fit grid.
pub const DEFAULT_EVAL_DENSITY: usize = 2;

/// A fitted Fourier extension.
///
/// Values are `synthesis_scale * Σ_j a_j φ_j(x)`, where `a` are the raw
/// least-squares coefficients. For grid fits the scale is `1/√N_R`, the
/// same factor that multiplies the collocation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Approximant {
    spec: FrameSpec,
    coefficients: Vec<Complex64>,
    synthesis_scale: f64,
    reference_grid: GridSpec,
    fit_report: Option<TsvdReport>,
    nodes: Option<NodeMetadata>,
}

impl Approximant {
    /// Wraps raw coefficients; panics if their count is not `N_Λ`.
    pub fn new(spec: FrameSpec, coefficients: Vec<Complex64>, synthesis_scale: f64) -> Self {
        assert_eq!(coefficients.len(), spec.len(), "coefficient length must equal N_Λ");
        let reference_grid = GridSpec::from_gamma(spec.size(), DEFAULT_GAMMA, spec.half_width())
            .expect("default grid is valid for any frame");
        Self { spec, coefficients, synthesis_scale, reference_grid, fit_report: None, nodes: None }
    }

    pub(crate) fn with_fit(mut self, report: TsvdReport, nodes: NodeMetadata, grid: Option<GridSpec>) -> Self {
        self.fit_report = Some(report);
        self.nodes = Some(nodes);
        if let Some(g) = grid {
            self.reference_grid = g;
        }
        self
    }

    pub fn spec(&self) -> &FrameSpec {
        &self.spec
    }

    /// Raw solution of the scaled collocation system.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Fourier coefficients of the synthesized function, `synthesis_scale * a`.
    pub fn rescaled_coefficients(&self) -> Vec<Complex64> {
        self.coefficients.iter().map(|c| c * self.synthesis_scale).collect()
    }

    pub fn synthesis_scale(&self) -> f64 {
        self.synthesis_scale
    }

    pub fn fit_report(&self) -> Option<&TsvdReport> {
        self.fit_report.as_ref()
    }

    pub fn node_metadata(&self) -> Option<&NodeMetadata> {
        self.nodes.as_ref()
    }

    /// Grid from which error-measurement grids are refined: the fit grid,
    /// or the `γ = 4` grid for fits on random nodes.
    pub fn reference_grid(&self) -> &GridSpec {
        &self.reference_grid
    }

    pub fn evaluate(&self, points: &[Point2]) -> Vec<Complex64> {
        self.evaluate_derivative(points, DerivOrder::Value)
    }

    pub fn evaluate_derivative(&self, points: &[Point2], d: DerivOrder) -> Vec<Complex64> {
        synthesize(&self.spec, &self.coefficients, points, d, self.synthesis_scale)
    }
}

fn check_embedding(domain: &Domain, spec: &FrameSpec) -> Result<(), Error> {
    if !domain.bbox().strictly_inside_square(spec.half_width()) {
        return Err(Error::NotEmbedded { domain: domain.name().into(), half_width: spec.half_width() });
    }
    Ok(())
}

/// Fits `f` on `P_Ω = P_R ∩ Ω` for the grid `grid`.
///
/// The collocation matrix is `A_kj = φ_j(x_k) / √N_R` and the data vector
/// is `b_k = f(x_k)` without scaling.
pub fn fit(f: &ScalarField, domain: &Domain, spec: &FrameSpec, grid: &GridSpec) -> Result<Approximant, Error> {
    check_embedding(domain, spec)?;
    if grid.half_width != spec.half_width() {
        return Err(Error::InvalidGrid(format!(
            "grid half-width {} differs from frame half-width {}",
            grid.half_width,
            spec.half_width()
        )));
    }
    fit_on_nodes(f, &NodeSet::from_grid(domain, grid), spec)
}

/// Fits `f` on an arbitrary node set (interior and boundary rows alike).
///
/// Grid node sets use the scale `1/√N_R`; random sets use `1/√N_Ω`.
pub fn fit_on_nodes(f: &ScalarField, nodes: &NodeSet, spec: &FrameSpec) -> Result<Approximant, Error> {
    nodes.ensure_oversampled(spec)?;
    let points: Vec<Point2> = nodes.interior.iter().chain(&nodes.boundary).copied().collect();
    let n_r = match &nodes.source {
        NodeSource::Grid(g) => g.len(),
        NodeSource::Random { .. } => points.len(),
    };
    let scale = 1.0 / (n_r as f64).sqrt();
    let a = eval_matrix(spec, &points, DerivOrder::Value, scale);
    let b = f.sample(&points);
    let (coefficients, report) = tsvd_solve(a.as_ref(), &b, spec.tolerance())?;
    Ok(Approximant::new(*spec, coefficients, scale).with_fit(report, nodes.metadata(spec), nodes.grid().copied()))
}

/// Interior points of the grid `eval_density` times finer than the approximant's reference grid.
pub fn error_points(ap: &Approximant, domain: &Domain, eval_density: usize) -> Result<Vec<Point2>, Error> {
    if eval_density < 1 {
        return Err(Error::EvalDensity);
    }
    let pts = restrict_interior(&tensor_grid(&ap.reference_grid().refined(eval_density)), domain);
    if pts.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    Ok(pts)
}

/// `max |f - ap|` over the given points.
pub fn max_error_on(ap: &Approximant, f: &ScalarField, points: &[Point2]) -> Result<f64, Error> {
    if points.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    let approx = ap.evaluate(points);
    Ok(points
        .iter()
        .zip(&approx)
        .map(|(&p, v)| (f.eval(p) - v).norm())
        .fold(0.0, f64::max))
}

/// Sup-norm error on the interior of a grid `eval_density` times finer than the fit grid.
pub fn max_error(ap: &Approximant, f: &ScalarField, domain: &Domain, eval_density: usize) -> Result<f64, Error> {
    max_error_on(ap, f, &error_points(ap, domain, eval_density)?)
}

/// Summary record of one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub domain: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N_Lambda")]
    pub n_lambda: usize,
    #[serde(rename = "N_Omega")]
    pub n_omega: usize,
    pub gamma: Option<f64>,
    #[serde(rename = "T")]
    pub t: f64,
    pub eps: f64,
    pub max_error: f64,
    pub rank_eps: usize,
    pub cond: f64,
    pub runtime_ms: f64,
}
