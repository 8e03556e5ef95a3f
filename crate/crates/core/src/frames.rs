//! Tensor Fourier frame on the square `R = [-T, T]^2`.
//!
//! Elements are `exp(iπ (l1 x + l2 y) / T)` for integer indices taken from a
//! window of `N` consecutive integers per axis, so the frame has `N^2`
//! elements. For odd `N = 2n + 1` the window is the symmetric `-n..=n`; for
//! even `N` it is `-N/2..N/2`.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("frame size per axis must be at least 1")]
    EmptyFrame,
    #[error("embedding half-width T = {0} must exceed 1")]
    HalfWidth(f64),
    #[error("truncation tolerance {0} must lie in (0, 1)")]
    Tolerance(f64),
}

/// Parameters of a tensor Fourier frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameSpec {
    size: usize,
    half_width: f64,
    tolerance: f64,
}

impl FrameSpec {
    /// Frame with `size` elements per axis on `[-half_width, half_width]^2`.
    pub fn new(size: usize, half_width: f64, tolerance: f64) -> Result<Self, FrameError> {
        if size == 0 {
            return Err(FrameError::EmptyFrame);
        }
        if !(half_width > 1.0 && half_width.is_finite()) {
            return Err(FrameError::HalfWidth(half_width));
        }
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return Err(FrameError::Tolerance(tolerance));
        }
        Ok(Self { size, half_width, tolerance })
    }

    /// Symmetric frame `-n <= l_i <= n`, i.e. `N = 2n + 1`.
    pub fn from_half_degree(n: usize, half_width: f64, tolerance: f64) -> Result<Self, FrameError> {
        Self::new(2 * n + 1, half_width, tolerance)
    }

    /// Per-axis size `N`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Total number of frame elements `N_Λ = N^2`.
    pub fn len(&self) -> usize {
        self.size * self.size
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Smallest index per axis.
    pub fn min_index(&self) -> i32 {
        -((self.size / 2) as i32)
    }

    pub fn max_index(&self) -> i32 {
        self.min_index() + self.size as i32 - 1
    }

    /// True when the index window is closed under `l -> -l`.
    pub fn is_symmetric(&self) -> bool {
        self.size % 2 == 1
    }

    /// Column position of `l` in [`linear_index`] order.
    pub fn position(&self, l: MultiIndex) -> Option<usize> {
        let (lo, hi) = (self.min_index(), self.max_index());
        if l.l1 < lo || l.l1 > hi || l.l2 < lo || l.l2 > hi {
            return None;
        }
        Some((l.l1 - lo) as usize * self.size + (l.l2 - lo) as usize)
    }

    /// Angular wavenumber `π / T`.
    pub fn wavenumber(&self) -> f64 {
        PI / self.half_width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub l1: i32,
    pub l2: i32,
}

impl MultiIndex {
    pub const fn new(l1: i32, l2: i32) -> Self {
        Self { l1, l2 }
    }
}

impl std::ops::Neg for MultiIndex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.l1, -self.l2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DerivOrder {
    Value,
    Dx,
    Dy,
    Dxx,
    Dyy,
}

impl DerivOrder {
    pub const ALL: [DerivOrder; 5] = [Self::Value, Self::Dx, Self::Dy, Self::Dxx, Self::Dyy];

    /// Per-axis multipliers `(x factor for l1, y factor for l2)` applied to
    /// `exp(iπ l·x / T)`, as functions of the per-axis wavenumber `k = π l / T`.
    fn axis_factors(self, kx: f64, ky: f64) -> (Complex64, Complex64) {
        let one = Complex64::new(1.0, 0.0);
        match self {
            DerivOrder::Value => (one, one),
            DerivOrder::Dx => (Complex64::new(0.0, kx), one),
            DerivOrder::Dy => (one, Complex64::new(0.0, ky)),
            DerivOrder::Dxx => (Complex64::new(-kx * kx, 0.0), one),
            DerivOrder::Dyy => (one, Complex64::new(-ky * ky, 0.0)),
        }
    }
}

/// All multi-indices in row-major `(l1, l2)` order.
pub fn linear_index(spec: &FrameSpec) -> Vec<MultiIndex> {
    let (lo, hi) = (spec.min_index(), spec.max_index());
    (lo..=hi)
        .flat_map(|l1| (lo..=hi).map(move |l2| MultiIndex::new(l1, l2)))
        .collect()
}

/// Frame element `l` (or one of its partial derivatives) at `p`.
pub fn eval_basis(spec: &FrameSpec, l: MultiIndex, p: Point2, d: DerivOrder) -> Complex64 {
    let w = spec.wavenumber();
    let (kx, ky) = (w * l.l1 as f64, w * l.l2 as f64);
    let (fx, fy) = d.axis_factors(kx, ky);
    Complex64::cis(kx * p.x + ky * p.y) * fx * fy
}

/// Per-axis factors `exp(iπ l x / T) * deriv factor` for every `l` in the window.
pub(crate) fn axis_row(spec: &FrameSpec, coord: f64, d: DerivOrder, axis: usize) -> Vec<Complex64> {
    let w = spec.wavenumber();
    (spec.min_index()..=spec.max_index())
        .map(|l| {
            let k = w * l as f64;
            let (fx, fy) = d.axis_factors(k, k);
            let factor = if axis == 0 { fx } else { fy };
            Complex64::cis(k * coord) * factor
        })
        .collect()
}

/// `points x N` table of per-axis factors (column `i` holds index `min_index + i`).
pub(crate) fn axis_table(spec: &FrameSpec, points: &[Point2], d: DerivOrder, axis: usize) -> Mat<Complex64> {
    let w = spec.wavenumber();
    let lo = spec.min_index();
    Mat::from_fn(points.len(), spec.size(), |k, i| {
        let kw = w * (lo + i as i32) as f64;
        let (fx, fy) = d.axis_factors(kw, kw);
        let (coord, factor) = if axis == 0 { (points[k].x, fx) } else { (points[k].y, fy) };
        Complex64::cis(kw * coord) * factor
    })
}

/// `|points| x N_Λ` matrix with entry `(k, j) = scale * φ_j^{(d)}(x_k)`.
///
/// Each row is the outer product of two per-axis factor vectors, so every
/// entry costs one complex multiply.
pub fn eval_matrix(spec: &FrameSpec, points: &[Point2], d: DerivOrder, scale: f64) -> Mat<Complex64> {
    let n = spec.size();
    let ex = axis_table(spec, points, d, 0);
    let ey = axis_table(spec, points, d, 1);
    let mut out = Mat::<Complex64>::zeros(points.len(), spec.len());
    for i in 0..n {
        for j in 0..n {
            let (cx, cy) = (ex.col(i), ey.col(j));
            let mut col = out.col_mut(i * n + j);
            for k in 0..points.len() {
                col[k] = cx[k] * cy[k] * scale;
            }
        }
    }
    out
}

/// Synthesis `scale * Σ_j c_j φ_j^{(d)}(p)` at each point.
pub fn synthesize(
    spec: &FrameSpec,
    coefficients: &[Complex64],
    points: &[Point2],
    d: DerivOrder,
    scale: f64,
) -> Vec<Complex64> {
    assert_eq!(coefficients.len(), spec.len(), "coefficient length must equal N_Λ");
    let n = spec.size();
    points
        .iter()
        .map(|p| {
            let ex = axis_row(spec, p.x, d, 0);
            let ey = axis_row(spec, p.y, d, 1);
            let sum: Complex64 = ex
                .iter()
                .enumerate()
                .map(|(i, fx)| {
                    let inner: Complex64 = coefficients[i * n..(i + 1) * n].iter().zip(&ey).map(|(c, fy)| c * fy).sum();
                    fx * inner
                })
                .sum();
            sum * scale
        })
        .collect()
}
