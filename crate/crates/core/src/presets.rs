//! Built-in test functions and manufactured Dirichlet problems.
//!
//! Each PDE preset fixes `α`, `β` and an exact solution `U`; the source
//! `F = −∇·(α∇U) + βU = −α ΔU − ∂xα U_x − ∂yα U_y + βU` is written out in
//! closed form below, and the Dirichlet data is `H = U`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::fields::{RealField, ScalarField};
use crate::frames::FrameSpec;
use crate::geometry::{catalog, Point2};
use crate::nodes::GridSpec;
use crate::pde::{BoundaryPolicy, CoefficientField, InteriorNodes, PdeProblem};
use crate::Error;

#[derive(Debug, Clone, Serialize)]
pub struct FunctionPreset {
    pub id: &'static str,
    pub formula: &'static str,
    /// Domain the function is paired with in the reference sweeps.
    pub default_domain: &'static str,
    #[serde(skip)]
    build: fn() -> ScalarField,
}

impl FunctionPreset {
    pub fn field(&self) -> ScalarField {
        (self.build)()
    }
}

fn f1() -> ScalarField {
    ScalarField::real(|p| (p.x * p.y).abs().powi(3))
}

fn f2() -> ScalarField {
    ScalarField::real(|p| {
        let r2 = (p.x - 1.1).powi(2) + (p.y - 1.1).powi(2);
        1.0 / r2.powf(1.5)
    })
}

fn f3() -> ScalarField {
    ScalarField::real(|p| (5.0 * p.x + p.y).cos() * (p.x - 3.0 * p.y).sin())
}

fn f4() -> ScalarField {
    ScalarField::real(|p| (p.x + 2.0 * p.y).exp())
}

pub fn function_presets() -> Vec<FunctionPreset> {
    vec![
        FunctionPreset { id: "f1", formula: "|xy|^3", default_domain: "pentagon", build: f1 },
        FunctionPreset { id: "f2", formula: "1/((x-1.1)^2+(y-1.1)^2)^(3/2)", default_domain: "triangle", build: f2 },
        FunctionPreset { id: "f3", formula: "cos(5x+y) sin(x-3y)", default_domain: "lune", build: f3 },
        FunctionPreset { id: "f4", formula: "exp(x+2y)", default_domain: "pentagon", build: f4 },
    ]
}

pub fn function_preset(id: &str) -> Option<FunctionPreset> {
    function_presets().into_iter().find(|p| p.id == id)
}

/// Rule for generating interior nodes of a PDE preset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InteriorRule {
    /// Grid with `M_y = γN` and `M_x = x_factor · M_y`.
    Grid { gamma: f64, x_factor: usize },
    /// `N_I = factor · N_Λ` seeded uniform samples.
    Random { factor: usize },
}

impl InteriorRule {
    /// Interior node recipe for frame `spec`; `gamma` overrides the preset's factor.
    pub fn nodes(&self, spec: &FrameSpec, gamma: Option<f64>, seed: u64) -> Result<InteriorNodes, Error> {
        Ok(match *self {
            InteriorRule::Grid { gamma: g, x_factor } => {
                InteriorNodes::Grid(GridSpec::from_gamma_aspect(spec.size(), gamma.unwrap_or(g), spec.half_width(), x_factor)?)
            }
            InteriorRule::Random { factor } => InteriorNodes::Random { count: factor * spec.len(), seed },
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PdePreset {
    pub id: &'static str,
    pub domain: &'static str,
    pub alpha: &'static str,
    pub beta: &'static str,
    pub exact: &'static str,
    pub policy: BoundaryPolicy,
    pub interior: InteriorRule,
    #[serde(skip)]
    build: fn() -> Result<PdeProblem, Error>,
}

impl PdePreset {
    pub fn problem(&self) -> Result<PdeProblem, Error> {
        (self.build)()
    }
}

fn gaussian(p: Point2) -> f64 {
    (-(p.x * p.x + p.y * p.y) / 2.0).exp()
}

fn exp_sum(p: Point2) -> f64 {
    (p.x + p.y).exp()
}

/// `α = e^{x+y}`, so `∂xα = ∂yα = α`.
fn exp_alpha() -> CoefficientField {
    CoefficientField::new(RealField::new(exp_sum), RealField::new(exp_sum), RealField::new(exp_sum), RealField::constant(0.0))
}

fn manufactured(domain: &str, coeffs: CoefficientField, u: fn(Point2) -> f64, f: fn(Point2) -> f64) -> Result<PdeProblem, Error> {
    Ok(PdeProblem::new(catalog(domain)?, coeffs, ScalarField::real(f), ScalarField::real(u)).with_exact(ScalarField::real(u)))
}

fn example1() -> Result<PdeProblem, Error> {
    // U = e^{-r²/2}: U_x = -xU, U_xx = (x²-1)U, ΔU = (r²-2)U
    // F = -(r²-2)U + 10U = (12 - r²)U
    manufactured("pentagon", CoefficientField::constant(1.0, 10.0), gaussian, |p| (12.0 - p.norm_sq()) * gaussian(p))
}

fn ellipse_u(p: Point2) -> f64 {
    (PI / 2.0 * (p.x * p.x / 0.36 + p.y * p.y / 0.81 - 1.0)).sin()
}

fn example2() -> Result<PdeProblem, Error> {
    // θ = π/2 (x²/0.36 + y²/0.81 - 1), U = sin θ
    // U_x = cos θ · πx/0.36, U_xx = cos θ · π/0.36 - sin θ (πx/0.36)², same in y with 0.81
    // F = -α (ΔU + U_x + U_y)
    manufactured("ellipse", exp_alpha(), ellipse_u, |p| {
        let th = PI / 2.0 * (p.x * p.x / 0.36 + p.y * p.y / 0.81 - 1.0);
        let (gx, gy) = (PI * p.x / 0.36, PI * p.y / 0.81);
        let lap = th.cos() * (PI / 0.36 + PI / 0.81) - th.sin() * (gx * gx + gy * gy);
        -exp_sum(p) * (lap + th.cos() * (gx + gy))
    })
}

fn example3() -> Result<PdeProblem, Error> {
    // α = (sin x + 1)(cos y + 1), β = e^{x+y}, U = e^{-r²/2}
    // F = -α (r²-2)U - ∂xα(-xU) - ∂yα(-yU) + βU
    let coeffs = CoefficientField::new(
        RealField::new(|p| (p.x.sin() + 1.0) * (p.y.cos() + 1.0)),
        RealField::new(|p| p.x.cos() * (p.y.cos() + 1.0)),
        RealField::new(|p| -(p.x.sin() + 1.0) * p.y.sin()),
        RealField::new(exp_sum),
    );
    manufactured("triangle", coeffs, gaussian, |p| {
        let u = gaussian(p);
        let alpha = (p.x.sin() + 1.0) * (p.y.cos() + 1.0);
        let ax = p.x.cos() * (p.y.cos() + 1.0);
        let ay = -(p.x.sin() + 1.0) * p.y.sin();
        -alpha * (p.norm_sq() - 2.0) * u + (ax * p.x + ay * p.y) * u + exp_sum(p) * u
    })
}

fn bump(x: f64) -> f64 {
    (1.0 - x * x).max(0.0).powf(2.5)
}

fn bump_dd(x: f64) -> f64 {
    // d²/dx² (1-x²)^{5/2} = -5(1-x²)^{3/2} + 15x²(1-x²)^{1/2}
    let s = (1.0 - x * x).max(0.0);
    -5.0 * s.powf(1.5) + 15.0 * x * x * s.sqrt()
}

fn example4() -> Result<PdeProblem, Error> {
    // U = b(x) b(y), α = 1, β = 0: F = -(b''(x) b(y) + b(x) b''(y))
    manufactured("square", CoefficientField::constant(1.0, 0.0), |p| bump(p.x) * bump(p.y), |p| {
        -(bump_dd(p.x) * bump(p.y) + bump(p.x) * bump_dd(p.y))
    })
}

fn lune_u(p: Point2) -> f64 {
    (PI * (p.norm_sq() - 0.81) / 2.0).sin()
}

fn example5() -> Result<PdeProblem, Error> {
    // θ = π(r² - 0.81)/2: U_x = πx cos θ, ΔU = 2π cos θ - π² r² sin θ
    // F = -α (ΔU + π(x+y) cos θ)
    manufactured("lune", exp_alpha(), lune_u, |p| {
        let th = PI * (p.norm_sq() - 0.81) / 2.0;
        let lap = 2.0 * PI * th.cos() - PI * PI * p.norm_sq() * th.sin();
        -exp_sum(p) * (lap + PI * (p.x + p.y) * th.cos())
    })
}

fn example6() -> Result<PdeProblem, Error> {
    // U = sin r²: U_x = 2x cos r², ΔU = 4 cos r² - 4r² sin r²
    // F = -α (ΔU + 2(x+y) cos r²)
    manufactured("five_petal_annulus", exp_alpha(), |p| p.norm_sq().sin(), |p| {
        let r2 = p.norm_sq();
        -exp_sum(p) * (4.0 * r2.cos() - 4.0 * r2 * r2.sin() + 2.0 * (p.x + p.y) * r2.cos())
    })
}

fn bowtie_level(p: Point2) -> f64 {
    4.0 * p.x * p.x - 4.0 * p.x.powi(4) / 0.81 - p.y * p.y
}

fn example7() -> Result<PdeProblem, Error> {
    // g = 4x² - 4x⁴/0.81 - y², U = sin g
    // g_x = 8x - 16x³/0.81, g_xx = 8 - 48x²/0.81, g_y = -2y, g_yy = -2
    // ΔU = cos g (g_xx + g_yy) - sin g (g_x² + g_y²); F = -α (ΔU + cos g (g_x + g_y))
    manufactured("bowtie", exp_alpha(), |p| bowtie_level(p).sin(), |p| {
        let g = bowtie_level(p);
        let gx = 8.0 * p.x - 16.0 * p.x.powi(3) / 0.81;
        let gxx = 8.0 - 48.0 * p.x * p.x / 0.81;
        let gy = -2.0 * p.y;
        let lap = g.cos() * (gxx - 2.0) - g.sin() * (gx * gx + gy * gy);
        -exp_sum(p) * (lap + g.cos() * (gx + gy))
    })
}

const GRID4: InteriorRule = InteriorRule::Grid { gamma: 4.0, x_factor: 1 };

pub fn pde_presets() -> Vec<PdePreset> {
    vec![
        PdePreset {
            id: "example1",
            domain: "pentagon",
            alpha: "1",
            beta: "10",
            exact: "exp(-(x^2+y^2)/2)",
            policy: BoundaryPolicy::Linear { k: 5 },
            interior: GRID4,
            build: example1,
        },
        PdePreset {
            id: "example2",
            domain: "ellipse",
            alpha: "exp(x+y)",
            beta: "0",
            exact: "sin(pi/2 (x^2/0.6^2 + y^2/0.9^2 - 1))",
            policy: BoundaryPolicy::Linear { k: 3 },
            interior: GRID4,
            build: example2,
        },
        PdePreset {
            id: "example3",
            domain: "triangle",
            alpha: "(sin x + 1)(cos y + 1)",
            beta: "exp(x+y)",
            exact: "exp(-(x^2+y^2)/2)",
            policy: BoundaryPolicy::Linear { k: 6 },
            interior: GRID4,
            build: example3,
        },
        PdePreset {
            id: "example4",
            domain: "square",
            alpha: "1",
            beta: "0",
            exact: "(1-x^2)^(5/2) (1-y^2)^(5/2)",
            policy: BoundaryPolicy::SquareStyle { k: 4, offset: 4 },
            interior: GRID4,
            build: example4,
        },
        PdePreset {
            id: "example5",
            domain: "lune",
            alpha: "exp(x+y)",
            beta: "0",
            exact: "sin(pi (x^2+y^2-0.9^2)/2)",
            policy: BoundaryPolicy::Linear { k: 6 },
            interior: GRID4,
            build: example5,
        },
        PdePreset {
            id: "example6",
            domain: "five_petal_annulus",
            alpha: "exp(x+y)",
            beta: "0",
            exact: "sin(x^2+y^2)",
            policy: BoundaryPolicy::Linear { k: 8 },
            interior: InteriorRule::Grid { gamma: 4.0, x_factor: 2 },
            build: example6,
        },
        PdePreset {
            id: "example7",
            domain: "bowtie",
            alpha: "exp(x+y)",
            beta: "0",
            exact: "sin(4x^2 - 4x^4/0.9^2 - y^2)",
            policy: BoundaryPolicy::Linear { k: 4 },
            interior: InteriorRule::Random { factor: 2 },
            build: example7,
        },
    ]
}

pub fn pde_preset(id: &str) -> Option<PdePreset> {
    pde_presets().into_iter().find(|p| p.id == id)
}

/// Every built-in preset.
#[derive(Debug, Clone, Serialize)]
pub struct PresetRegistry {
    pub functions: Vec<FunctionPreset>,
    pub pdes: Vec<PdePreset>,
}

pub fn preset_registry() -> PresetRegistry {
    PresetRegistry { functions: function_presets(), pdes: pde_presets() }
}
