//! Collocation node sets: equispaced tensor grids on `R`, their restriction
//! to a domain, and seeded uniform random interior samples.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::frames::FrameSpec;
use crate::geometry::{Domain, Location, Point2};
use crate::Error;

/// Name recorded in metadata for the random-node generator.
pub const RANDOM_GENERATOR: &str = "chacha8-rand0.8";

const REJECTION_WINDOW: u64 = 1_000_000;
const MIN_ACCEPTANCE: f64 = 1e-4;

/// Equispaced grid with `mx x my` points on `[-T, T)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub mx: usize,
    pub my: usize,
    pub half_width: f64,
    /// Oversampling factor the grid was derived from, if any.
    pub gamma: Option<f64>,
}

impl GridSpec {
    pub fn new(mx: usize, my: usize, half_width: f64) -> Result<Self, Error> {
        for m in [mx, my] {
            if m < 2 || m % 2 != 0 {
                return Err(Error::InvalidGrid(format!("grid counts must be even and >= 2, got {mx}x{my}")));
            }
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!("half-width {half_width} must be positive")));
        }
        Ok(Self { mx, my, half_width, gamma: None })
    }

    /// Square grid with `M = γ N` points per axis, rounded to the nearest even count.
    pub fn from_gamma(frame_size: usize, gamma: f64, half_width: f64) -> Result<Self, Error> {
        Self::from_gamma_aspect(frame_size, gamma, half_width, 1)
    }

    /// Grid with `M_y = γ N` and `M_x = x_factor · M_y`.
    pub fn from_gamma_aspect(frame_size: usize, gamma: f64, half_width: f64, x_factor: usize) -> Result<Self, Error> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidGrid(format!("oversampling factor {gamma} must be positive")));
        }
        let m = (2.0 * (gamma * frame_size as f64 / 2.0).round()).max(2.0) as usize;
        let mut g = Self::new(m * x_factor.max(1), m, half_width)?;
        g.gamma = Some(gamma);
        Ok(g)
    }

    /// Grid `density` times finer along each axis; contains this grid.
    pub fn refined(&self, density: usize) -> Self {
        Self { mx: self.mx * density, my: self.my * density, ..*self }
    }

    /// `N_R = M_x M_y`.
    pub fn len(&self) -> usize {
        self.mx * self.my
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> (f64, f64) {
        (2.0 * self.half_width / self.mx as f64, 2.0 * self.half_width / self.my as f64)
    }
}

/// Points `(2T k1 / M_x, 2T k2 / M_y)` for `k_i in [-M_i/2, M_i/2)`, `k1` outermost.
pub fn tensor_grid(g: &GridSpec) -> Vec<Point2> {
    let coord = |k: i64, m: usize| 2.0 * g.half_width * k as f64 / m as f64;
    let (hx, hy) = ((g.mx / 2) as i64, (g.my / 2) as i64);
    let mut out = Vec::with_capacity(g.len());
    for k1 in -hx..hx {
        for k2 in -hy..hy {
            out.push(Point2::new(coord(k1, g.mx), coord(k2, g.my)));
        }
    }
    out
}

/// Keeps the points strictly inside `domain`.
pub fn restrict_interior(grid: &[Point2], domain: &Domain) -> Vec<Point2> {
    grid.iter().copied().filter(|&p| domain.contains(p) == Location::Interior).collect()
}

/// `count` i.i.d. uniform interior points by rejection from the bounding box.
pub fn random_interior(domain: &Domain, count: usize, seed: u64) -> Result<Vec<Point2>, Error> {
    let bbox = domain.bbox();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut trials: u64 = 0;
    while out.len() < count {
        let p = Point2::new(
            bbox.min.x + bbox.width() * rng.gen::<f64>(),
            bbox.min.y + bbox.height() * rng.gen::<f64>(),
        );
        trials += 1;
        if domain.contains(p) == Location::Interior {
            out.push(p);
        }
        if trials >= REJECTION_WINDOW && (out.len() as f64) < MIN_ACCEPTANCE * trials as f64 {
            return Err(Error::DegenerateDomain { accepted: out.len(), trials });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NodeSource {
    Grid(GridSpec),
    Random { generator: String, seed: u64 },
}

/// Interior and boundary collocation nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    pub interior: Vec<Point2>,
    pub boundary: Vec<Point2>,
    pub source: NodeSource,
}

impl NodeSet {
    /// Grid nodes `P_Ω = P_R ∩ Ω` with no boundary nodes.
    pub fn from_grid(domain: &Domain, grid: &GridSpec) -> Self {
        Self {
            interior: restrict_interior(&tensor_grid(grid), domain),
            boundary: Vec::new(),
            source: NodeSource::Grid(*grid),
        }
    }

    pub fn random(domain: &Domain, count: usize, seed: u64) -> Result<Self, Error> {
        Ok(Self {
            interior: random_interior(domain, count, seed)?,
            boundary: Vec::new(),
            source: NodeSource::Random { generator: RANDOM_GENERATOR.into(), seed },
        })
    }

    pub fn with_boundary(mut self, boundary: Vec<Point2>) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn n_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.len()
    }

    /// Total number of collocation rows, `N_I + N_B`.
    pub fn n_total(&self) -> usize {
        self.interior.len() + self.boundary.len()
    }

    pub fn grid(&self) -> Option<&GridSpec> {
        match &self.source {
            NodeSource::Grid(g) => Some(g),
            NodeSource::Random { .. } => None,
        }
    }

    /// Fails unless `N_I + N_B > N_Λ`.
    pub fn ensure_oversampled(&self, spec: &FrameSpec) -> Result<(), Error> {
        if self.n_total() <= spec.len() {
            return Err(Error::Undersampled { n_omega: self.n_total(), n_lambda: spec.len() });
        }
        Ok(())
    }

    pub fn metadata(&self, spec: &FrameSpec) -> NodeMetadata {
        let (m_x, m_y, gamma, seed, generator) = match &self.source {
            NodeSource::Grid(g) => (Some(g.mx), Some(g.my), g.gamma, None, None),
            NodeSource::Random { generator, seed } => (None, None, None, Some(*seed), Some(generator.clone())),
        };
        NodeMetadata {
            m_x,
            m_y,
            gamma,
            t: spec.half_width(),
            seed,
            generator,
            counts: oversampling_report(self, spec),
        }
    }
}

/// Node counts relative to the frame size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OversamplingReport {
    pub n_interior: usize,
    pub n_boundary: usize,
    pub n_lambda: usize,
    pub interior_ratio: f64,
    pub total_ratio: f64,
}

pub fn oversampling_report(ns: &NodeSet, spec: &FrameSpec) -> OversamplingReport {
    let n_lambda = spec.len() as f64;
    OversamplingReport {
        n_interior: ns.n_interior(),
        n_boundary: ns.n_boundary(),
        n_lambda: spec.len(),
        interior_ratio: ns.n_interior() as f64 / n_lambda,
        total_ratio: ns.n_total() as f64 / n_lambda,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMetadata {
    pub m_x: Option<usize>,
    pub m_y: Option<usize>,
    pub gamma: Option<f64>,
    pub t: f64,
    pub seed: Option<u64>,
    pub generator: Option<String>,
    pub counts: OversamplingReport,
}

/// CSV `x,y,kind` with 17 significant digits.
pub fn write_nodes_csv<W: Write>(mut out: W, ns: &NodeSet) -> io::Result<()> {
    writeln!(out, "x,y,kind")?;
    for (kind, pts) in [("interior", &ns.interior), ("boundary", &ns.boundary)] {
        for p in pts.iter() {
            writeln!(out, "{:.16e},{:.16e},{kind}", p.x, p.y)?;
        }
    }
    Ok(())
}
