//! Shareable scalar fields over the plane.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::geometry::Point2;

/// Complex-valued field, cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct ScalarField(Arc<dyn Fn(Point2) -> Complex64 + Send + Sync>);

impl ScalarField {
    pub fn real<F>(f: F) -> Self
    where
        F: Fn(Point2) -> f64 + Send + Sync + 'static,
    {
        Self(Arc::new(move |p| Complex64::new(f(p), 0.0)))
    }

    pub fn complex<F>(f: F) -> Self
    where
        F: Fn(Point2) -> Complex64 + Send + Sync + 'static,
    {
        Self(Arc::new(f))
    }

    pub fn constant(value: Complex64) -> Self {
        Self::complex(move |_| value)
    }

    pub fn eval(&self, p: Point2) -> Complex64 {
        (self.0)(p)
    }

    pub fn sample(&self, points: &[Point2]) -> Vec<Complex64> {
        points.iter().map(|&p| self.eval(p)).collect()
    }

    /// `c · self`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let inner = self.clone();
        Self::complex(move |p| c * inner.eval(p))
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarField(..)")
    }
}

/// Real-valued field, used for PDE coefficients.
#[derive(Clone)]
pub struct RealField(Arc<dyn Fn(Point2) -> f64 + Send + Sync>);

impl RealField {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(Point2) -> f64 + Send + Sync + 'static,
    {
        Self(Arc::new(f))
    }

    pub fn constant(value: f64) -> Self {
        Self::new(move |_| value)
    }

    pub fn eval(&self, p: Point2) -> f64 {
        (self.0)(p)
    }
}

impl fmt::Debug for RealField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RealField(..)")
    }
}
