//! Oversampling collocation for `-∇·(α∇U) + βU = F` in `Ω`, `U = H` on `∂Ω`.
//!
//! Interior rows apply the operator to every frame element at the interior
//! nodes,
//!
//! ```text
//! β∘A1 − ∂xα∘A2 − ∂yα∘A3 − α∘(A4 + A5),
//! ```
//!
//! where `A1..A5` hold the value, `∂x`, `∂y`, `∂xx` and `∂yy` of the frame
//! elements and `∘` scales each row by the coefficient sampled at its node.
//! Boundary rows are plain evaluations at the boundary nodes. The stacked
//! rectangular system is solved by truncated SVD.

use std::fmt;
use std::str::FromStr;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::extension::{error_points, max_error_on, Approximant, DEFAULT_EVAL_DENSITY};
use crate::fields::{RealField, ScalarField};
use crate::frames::{axis_table, DerivOrder, FrameSpec};
use crate::geometry::{boundary_nodes, Domain, Point2};
use crate::linalg::{tsvd_solve, TsvdReport};
use crate::nodes::{GridSpec, NodeSet};
use crate::Error;

/// Step of the central-difference fallback for coefficient derivatives.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DerivativeSource {
    Analytic,
    FiniteDifference { step: f64 },
}

/// `α`, its first partials, and `β`.
#[derive(Debug, Clone)]
pub struct CoefficientField {
    pub alpha: RealField,
    pub alpha_dx: RealField,
    pub alpha_dy: RealField,
    pub beta: RealField,
    pub derivatives: DerivativeSource,
}

impl CoefficientField {
    pub fn new(alpha: RealField, alpha_dx: RealField, alpha_dy: RealField, beta: RealField) -> Self {
        Self { alpha, alpha_dx, alpha_dy, beta, derivatives: DerivativeSource::Analytic }
    }

    pub fn constant(alpha: f64, beta: f64) -> Self {
        Self::new(RealField::constant(alpha), RealField::constant(0.0), RealField::constant(0.0), RealField::constant(beta))
    }

    /// Approximates `∂xα` and `∂yα` by central differences with step [`FD_STEP`].
    /// Intended for exploration; the result is flagged in [`Self::derivatives`].
    pub fn with_fd_derivatives(alpha: RealField, beta: RealField) -> Self {
        let (ax, ay) = (alpha.clone(), alpha.clone());
        let h = FD_STEP;
        let dx = RealField::new(move |p| (ax.eval(Point2::new(p.x + h, p.y)) - ax.eval(Point2::new(p.x - h, p.y))) / (2.0 * h));
        let dy = RealField::new(move |p| (ay.eval(Point2::new(p.x, p.y + h)) - ay.eval(Point2::new(p.x, p.y - h))) / (2.0 * h));
        Self { alpha, alpha_dx: dx, alpha_dy: dy, beta, derivatives: DerivativeSource::FiniteDifference { step: h } }
    }
}

/// A Dirichlet problem on a domain.
#[derive(Debug, Clone)]
pub struct PdeProblem {
    pub domain: Domain,
    pub coeffs: CoefficientField,
    pub source: ScalarField,
    pub dirichlet: ScalarField,
    pub exact: Option<ScalarField>,
}

impl PdeProblem {
    pub fn new(domain: Domain, coeffs: CoefficientField, source: ScalarField, dirichlet: ScalarField) -> Self {
        Self { domain, coeffs, source, dirichlet, exact: None }
    }

    pub fn with_exact(mut self, exact: ScalarField) -> Self {
        self.exact = Some(exact);
        self
    }

    /// Same operator and domain with data `c·F`, `c·H` (and exact `c·U`).
    pub fn scaled(&self, c: f64) -> Self {
        let c = Complex64::new(c, 0.0);
        Self {
            domain: self.domain.clone(),
            coeffs: self.coeffs.clone(),
            source: self.source.scaled(c),
            dirichlet: self.dirichlet.scaled(c),
            exact: self.exact.as_ref().map(|u| u.scaled(c)),
        }
    }
}

/// Number of boundary nodes as a function of `N` and `N_Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryPolicy {
    /// `K N`.
    Linear { k: usize },
    /// `c ⌊log N_Λ⌋` (natural log, or base 10 when `base10`).
    Log { c: usize, base10: bool },
    /// `k N − offset`, e.g. `4N − 4` on the square.
    SquareStyle { k: usize, offset: usize },
    Explicit { count: usize },
}

impl BoundaryPolicy {
    pub fn count(&self, n: usize, n_lambda: usize) -> usize {
        match *self {
            BoundaryPolicy::Linear { k } => k * n,
            BoundaryPolicy::Log { c, base10 } => {
                let l = if base10 { (n_lambda as f64).log10() } else { (n_lambda as f64).ln() };
                c * l.floor().max(0.0) as usize
            }
            BoundaryPolicy::SquareStyle { k, offset } => (k * n).saturating_sub(offset),
            BoundaryPolicy::Explicit { count } => count,
        }
    }
}

impl fmt::Display for BoundaryPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BoundaryPolicy::Linear { k } => write!(f, "linear:{k}"),
            BoundaryPolicy::Log { c, base10: false } => write!(f, "log:{c}"),
            BoundaryPolicy::Log { c, base10: true } => write!(f, "log10:{c}"),
            BoundaryPolicy::SquareStyle { k, offset } => write!(f, "square:{k}:{offset}"),
            BoundaryPolicy::Explicit { count } => write!(f, "explicit:{count}"),
        }
    }
}

impl FromStr for BoundaryPolicy {
    type Err = String;

    /// Parses `linear:K`, `log:C`, `log10:C`, `square[:K[:OFFSET]]` or `explicit:COUNT`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize, default: Option<usize>| -> Result<usize, String> {
            match parts.get(i) {
                Some(v) => v.parse::<usize>().map_err(|_| format!("`{v}` is not a non-negative integer in `{s}`")),
                None => default.ok_or_else(|| format!("missing parameter in boundary policy `{s}`")),
            }
        };
        let positive = |v: usize| if v == 0 { Err(format!("boundary policy `{s}` needs a positive parameter")) } else { Ok(v) };
        let policy = match parts[0] {
            "linear" => BoundaryPolicy::Linear { k: positive(num(1, None)?)? },
            "log" => BoundaryPolicy::Log { c: positive(num(1, None)?)?, base10: false },
            "log10" => BoundaryPolicy::Log { c: positive(num(1, None)?)?, base10: true },
            "square" => BoundaryPolicy::SquareStyle { k: positive(num(1, Some(4))?)?, offset: num(2, Some(4))? },
            "explicit" => BoundaryPolicy::Explicit { count: positive(num(1, None)?)? },
            other => return Err(format!("unknown boundary policy `{other}`; expected linear, log, log10, square or explicit")),
        };
        let expected_len = match policy {
            BoundaryPolicy::SquareStyle { .. } => 3,
            _ => 2,
        };
        if parts.len() > expected_len {
            return Err(format!("too many parameters in boundary policy `{s}`"));
        }
        Ok(policy)
    }
}

/// How interior collocation nodes are generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InteriorNodes {
    Grid(GridSpec),
    Random { count: usize, seed: u64 },
}

fn check_coefficients(coeffs: &CoefficientField, interior: &[Point2]) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>), Error> {
    let n = interior.len();
    let (mut alpha, mut ax, mut ay, mut beta) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for (index, &p) in interior.iter().enumerate() {
        let (a, b) = (coeffs.alpha.eval(p), coeffs.beta.eval(p));
        let fail = |detail: String| Err(Error::CoefficientSign { index, point: p, detail });
        if !(a > 0.0 && a.is_finite()) {
            return fail(format!("alpha = {a} must be positive"));
        }
        if !(b >= 0.0 && b.is_finite()) {
            return fail(format!("beta = {b} must be non-negative"));
        }
        let (dx, dy) = (coeffs.alpha_dx.eval(p), coeffs.alpha_dy.eval(p));
        if !(dx.is_finite() && dy.is_finite()) {
            return fail("alpha derivatives must be finite".into());
        }
        alpha.push(a);
        ax.push(dx);
        ay.push(dy);
        beta.push(b);
    }
    Ok((alpha, ax, ay, beta))
}

/// Builds the `(N_I + N_B) x N_Λ` collocation matrix and its right-hand side.
pub fn assemble(problem: &PdeProblem, nodes: &NodeSet, spec: &FrameSpec) -> Result<(Mat<Complex64>, Vec<Complex64>), Error> {
    nodes.ensure_oversampled(spec)?;
    let (ni, nb) = (nodes.n_interior(), nodes.n_boundary());
    let (alpha, alpha_dx, alpha_dy, beta) = check_coefficients(&problem.coeffs, &nodes.interior)?;

    let n = spec.size();
    let w = spec.wavenumber();
    let lo = spec.min_index();
    let wave = |i: usize| w * (lo + i as i32) as f64;

    let mut p = Mat::<Complex64>::zeros(ni + nb, spec.len());
    let (ex, ey) = (
        axis_table(spec, &nodes.interior, DerivOrder::Value, 0),
        axis_table(spec, &nodes.interior, DerivOrder::Value, 1),
    );
    let (bx, by) = (
        axis_table(spec, &nodes.boundary, DerivOrder::Value, 0),
        axis_table(spec, &nodes.boundary, DerivOrder::Value, 1),
    );
    for i in 0..n {
        let kx = wave(i);
        for j in 0..n {
            let ky = wave(j);
            let k2 = kx * kx + ky * ky;
            let (cx, cy, dx, dy) = (ex.col(i), ey.col(j), bx.col(i), by.col(j));
            let mut col = p.col_mut(i * n + j);
            for r in 0..ni {
                // β φ − ∂xα (i kx φ) − ∂yα (i ky φ) + α (kx² + ky²) φ
                let factor = Complex64::new(beta[r] + alpha[r] * k2, -(alpha_dx[r] * kx + alpha_dy[r] * ky));
                col[r] = cx[r] * cy[r] * factor;
            }
            for r in 0..nb {
                col[ni + r] = dx[r] * dy[r];
            }
        }
    }

    let rhs = problem
        .source
        .sample(&nodes.interior)
        .into_iter()
        .chain(problem.dirichlet.sample(&nodes.boundary))
        .collect();
    Ok((p, rhs))
}

/// Solution of a collocation solve with its diagnostics.
#[derive(Debug, Clone)]
pub struct PdeSolution {
    pub approximant: Approximant,
    pub report: TsvdReport,
    pub nodes: NodeSet,
    pub boundary_policy: BoundaryPolicy,
    /// Sup-norm error against the exact solution, when one is known.
    pub max_error: Option<f64>,
}

/// Generates nodes, assembles, solves by truncated SVD and measures the
/// error on the refined interior grid when `problem.exact` is set.
pub fn solve(
    problem: &PdeProblem,
    spec: &FrameSpec,
    policy: BoundaryPolicy,
    interior: InteriorNodes,
) -> Result<PdeSolution, Error> {
    let domain = &problem.domain;
    if !domain.bbox().strictly_inside_square(spec.half_width()) {
        return Err(Error::NotEmbedded { domain: domain.name().into(), half_width: spec.half_width() });
    }
    let nodes = match interior {
        InteriorNodes::Grid(g) => {
            if g.half_width != spec.half_width() {
                return Err(Error::InvalidGrid(format!(
                    "grid half-width {} differs from frame half-width {}",
                    g.half_width,
                    spec.half_width()
                )));
            }
            NodeSet::from_grid(domain, &g)
        }
        InteriorNodes::Random { count, seed } => NodeSet::random(domain, count, seed)?,
    };
    let n_b = policy.count(spec.size(), spec.len());
    let nodes = nodes.with_boundary(boundary_nodes(domain, n_b)?);
    solve_on_nodes(problem, spec, policy, nodes)
}

/// Like [`solve`] with a caller-supplied node set.
pub fn solve_on_nodes(problem: &PdeProblem, spec: &FrameSpec, policy: BoundaryPolicy, nodes: NodeSet) -> Result<PdeSolution, Error> {
    let (p, rhs) = assemble(problem, &nodes, spec)?;
    let (coefficients, report) = tsvd_solve(p.as_ref(), &rhs, spec.tolerance())?;
    drop(p);
    let approximant =
        Approximant::new(*spec, coefficients, 1.0).with_fit(report.clone(), nodes.metadata(spec), nodes.grid().copied());
    let max_error = match &problem.exact {
        Some(u) => Some(max_error_on(&approximant, u, &error_points(&approximant, &problem.domain, DEFAULT_EVAL_DENSITY)?)?),
        None => None,
    };
    Ok(PdeSolution { approximant, report, nodes, boundary_policy: policy, max_error })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max: f64,
    pub rms: f64,
}

/// Strong-form residual `−∇·(α∇U_N) + βU_N − F` of the discrete solution at `probe`.
pub fn residual_diagnostics(sol: &PdeSolution, problem: &PdeProblem, probe: &[Point2]) -> ResidualReport {
    if probe.is_empty() {
        return ResidualReport { max: 0.0, rms: 0.0 };
    }
    let ap = &sol.approximant;
    let u = ap.evaluate_derivative(probe, DerivOrder::Value);
    let ux = ap.evaluate_derivative(probe, DerivOrder::Dx);
    let uy = ap.evaluate_derivative(probe, DerivOrder::Dy);
    let uxx = ap.evaluate_derivative(probe, DerivOrder::Dxx);
    let uyy = ap.evaluate_derivative(probe, DerivOrder::Dyy);
    let c = &problem.coeffs;
    let residuals: Vec<f64> = probe
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let lu = -c.alpha.eval(p) * (uxx[k] + uyy[k]) - c.alpha_dx.eval(p) * ux[k] - c.alpha_dy.eval(p) * uy[k]
                + c.beta.eval(p) * u[k];
            (lu - problem.source.eval(p)).norm()
        })
        .collect();
    let max = residuals.iter().copied().fold(0.0, f64::max);
    let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    ResidualReport { max, rms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::eval_matrix;
    use crate::geometry::catalog;

    #[test]
    fn policy_counts() {
        assert_eq!(BoundaryPolicy::Linear { k: 3 }.count(20, 400), 60);
        assert_eq!(BoundaryPolicy::Log { c: 20, base10: false }.count(20, 1681), 140);
        assert_eq!(BoundaryPolicy::Log { c: 20, base10: true }.count(20, 1681), 60);
        assert_eq!(BoundaryPolicy::SquareStyle { k: 4, offset: 4 }.count(30, 900), 116);
        assert_eq!(BoundaryPolicy::Explicit { count: 17 }.count(30, 900), 17);
    }

    #[test]
    fn policy_parsing_round_trips() {
        for s in ["linear:5", "log:20", "log10:10", "square:8:4", "explicit:120"] {
            let p: BoundaryPolicy = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert_eq!("square".parse::<BoundaryPolicy>().unwrap(), BoundaryPolicy::SquareStyle { k: 4, offset: 4 });
        for bad in ["linear", "linear:0", "linear:x", "cubic:3", "linear:3:4"] {
            assert!(bad.parse::<BoundaryPolicy>().is_err(), "{bad}");
        }
    }

    fn small_nodes(domain: &Domain, size: usize, n_b: usize) -> NodeSet {
        NodeSet::from_grid(domain, &GridSpec::from_gamma(size, 4.0, 2.0).unwrap())
            .with_boundary(boundary_nodes(domain, n_b).unwrap())
    }

    #[test]
    fn laplacian_rows_for_unit_alpha() {
        let d = catalog("pentagon").unwrap();
        let spec = FrameSpec::new(6, 2.0, 1e-14).unwrap();
        let nodes = small_nodes(&d, 6, 18);
        let problem = PdeProblem::new(d, CoefficientField::constant(1.0, 0.0), ScalarField::real(|_| 0.0), ScalarField::real(|_| 0.0));
        let (p, _) = assemble(&problem, &nodes, &spec).unwrap();
        let a4 = eval_matrix(&spec, &nodes.interior, DerivOrder::Dxx, 1.0);
        let a5 = eval_matrix(&spec, &nodes.interior, DerivOrder::Dyy, 1.0);
        let b = eval_matrix(&spec, &nodes.boundary, DerivOrder::Value, 1.0);
        let ni = nodes.n_interior();
        for c in 0..spec.len() {
            for r in 0..ni {
                let expected = -(a4[(r, c)] + a5[(r, c)]);
                assert!((p[(r, c)] - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
            }
            for r in 0..nodes.n_boundary() {
                assert!((p[(ni + r, c)] - b[(r, c)]).norm() <= 1e-15);
            }
        }
    }

    #[test]
    fn variable_rows_match_hadamard_form() {
        let d = catalog("triangle").unwrap();
        let spec = FrameSpec::new(5, 2.0, 1e-14).unwrap();
        let nodes = small_nodes(&d, 5, 15);
        let coeffs = CoefficientField::new(
            RealField::new(|p| (p.x.sin() + 1.0) * (p.y.cos() + 1.0)),
            RealField::new(|p| p.x.cos() * (p.y.cos() + 1.0)),
            RealField::new(|p| -(p.x.sin() + 1.0) * p.y.sin()),
            RealField::new(|p| (p.x + p.y).exp()),
        );
        let problem = PdeProblem::new(d, coeffs.clone(), ScalarField::real(|_| 0.0), ScalarField::real(|_| 0.0));
        let (p, _) = assemble(&problem, &nodes, &spec).unwrap();
        let m = |d| eval_matrix(&spec, &nodes.interior, d, 1.0);
        let (a1, a2, a3, a4, a5) = (m(DerivOrder::Value), m(DerivOrder::Dx), m(DerivOrder::Dy), m(DerivOrder::Dxx), m(DerivOrder::Dyy));
        for (r, &x) in nodes.interior.iter().enumerate() {
            let (al, ax, ay, be) = (coeffs.alpha.eval(x), coeffs.alpha_dx.eval(x), coeffs.alpha_dy.eval(x), coeffs.beta.eval(x));
            for c in 0..spec.len() {
                let expected = be * a1[(r, c)] - ax * a2[(r, c)] - ay * a3[(r, c)] - al * (a4[(r, c)] + a5[(r, c)]);
                assert!((p[(r, c)] - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
            }
        }
    }

    #[test]
    fn one_mode_degenerate_system() {
        let d = catalog("diamond").unwrap();
        let spec = FrameSpec::new(1, 2.0, 1e-14).unwrap();
        let nodes = NodeSet {
            interior: vec![Point2::new(0.1, 0.2)],
            boundary: vec![Point2::new(1.0, 0.0)],
            source: crate::nodes::NodeSource::Random { generator: "manual".into(), seed: 0 },
        };
        let problem = PdeProblem::new(d, CoefficientField::constant(1.0, 3.5), ScalarField::real(|_| 0.0), ScalarField::real(|_| 0.0));
        let (p, _) = assemble(&problem, &nodes, &spec).unwrap();
        assert_eq!((p.nrows(), p.ncols()), (2, 1));
        assert_eq!(p[(0, 0)], Complex64::new(3.5, 0.0));
        assert_eq!(p[(1, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn coefficient_violations_name_the_node() {
        let d = catalog("square").unwrap();
        let spec = FrameSpec::new(4, 2.0, 1e-14).unwrap();
        let nodes = small_nodes(&d, 4, 12);
        let bad_alpha = CoefficientField::new(RealField::new(|p| p.x), RealField::constant(1.0), RealField::constant(0.0), RealField::constant(0.0));
        let problem = PdeProblem::new(d.clone(), bad_alpha, ScalarField::real(|_| 0.0), ScalarField::real(|_| 0.0));
        let err = assemble(&problem, &nodes, &spec).unwrap_err();
        assert!(matches!(err, Error::CoefficientSign { index: 0, .. }), "{err}");
        let bad_beta = CoefficientField::constant(1.0, -1.0);
        let problem = PdeProblem::new(d, bad_beta, ScalarField::real(|_| 0.0), ScalarField::real(|_| 0.0));
        assert!(assemble(&problem, &nodes, &spec).unwrap_err().to_string().contains("beta"));
    }

    #[test]
    fn fd_derivatives_are_flagged_and_accurate() {
        let c = CoefficientField::with_fd_derivatives(RealField::new(|p| (p.x + p.y).exp()), RealField::constant(0.0));
        assert_eq!(c.derivatives, DerivativeSource::FiniteDifference { step: FD_STEP });
        let p = Point2::new(0.2, -0.4);
        assert!((c.alpha_dx.eval(p) - (-0.2f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn constant_solution_is_exact() {
        let d = catalog("pentagon").unwrap();
        let spec = FrameSpec::new(8, 2.0, 1e-14).unwrap();
        let c = 1.7;
        let problem = PdeProblem::new(d, CoefficientField::constant(1.0, 10.0), ScalarField::real(move |_| 10.0 * c), ScalarField::real(move |_| c))
            .with_exact(ScalarField::real(move |_| c));
        let grid = GridSpec::from_gamma(8, 4.0, 2.0).unwrap();
        let sol = solve(&problem, &spec, BoundaryPolicy::Linear { k: 3 }, InteriorNodes::Grid(grid)).unwrap();
        assert!(sol.max_error.unwrap() <= 1e-10, "{:?}", sol.max_error);
    }

    #[test]
    fn homogeneous_problem_has_zero_solution() {
        let d = catalog("ellipse").unwrap();
        let spec = FrameSpec::new(6, 2.0, 1e-14).unwrap();
        let problem = PdeProblem::new(d.clone(), CoefficientField::constant(1.0, 1.0), ScalarField::real(|_| 0.0), ScalarField::real(|_| 0.0));
        let grid = GridSpec::from_gamma(6, 4.0, 2.0).unwrap();
        let sol = solve(&problem, &spec, BoundaryPolicy::Linear { k: 3 }, InteriorNodes::Grid(grid)).unwrap();
        assert!(sol.approximant.coefficients().iter().all(|c| c.norm() == 0.0));
        let probe = crate::nodes::restrict_interior(&crate::nodes::tensor_grid(&grid.refined(3)), &d);
        let r = residual_diagnostics(&sol, &problem, &probe);
        assert_eq!((r.max, r.rms), (0.0, 0.0));
    }
}
