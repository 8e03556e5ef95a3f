//! Irregular planar domains.
//!
//! A [`Domain`] couples an exact membership predicate with the closed curves
//! that make up its boundary. Curves are parametrized over `t in [0, 1)` and
//! carry an arc-length table so boundary nodes can be placed equally spaced
//! in arc length.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance on a domain's defining level functions below which a
/// point is classified as lying on the boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Points closer than this are treated as duplicates by [`corner_refine`].
pub const DUPLICATE_TOL: f64 = 1e-12;

const ARC_PANELS: usize = 64;
const SIMPSON_TOL: f64 = 1e-15;
const SIMPSON_MAX_DEPTH: u32 = 48;

/// Identifiers accepted by [`catalog`].
pub const CATALOG_NAMES: [&str; 8] = [
    "diamond",
    "pentagon",
    "triangle",
    "lune",
    "ellipse",
    "square",
    "five_petal_annulus",
    "bowtie",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("unknown domain `{name}`; valid identifiers: {}", CATALOG_NAMES.join(", "))]
    UnknownDomain { name: String },
    #[error("arc-length quadrature did not converge on curve {curve}")]
    NonRectifiable { curve: usize },
    #[error("{requested} boundary nodes cannot cover {curves} curves")]
    TooFewBoundaryNodes { requested: usize, curves: usize },
    #[error("invalid domain: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Outer,
    InnerHole,
}

/// Axis-aligned bounding rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point2,
    pub max: Point2,
}

impl BBox {
    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    /// True when the box lies strictly inside `[-t, t]^2`.
    pub fn strictly_inside_square(&self, t: f64) -> bool {
        self.min.x > -t && self.min.y > -t && self.max.x < t && self.max.y < t
    }
}

/// Closed-form shape of a boundary curve.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveShape {
    /// Closed polyline; `t` is proportional to arc length.
    Polygon { vertices: Vec<Point2> },
    /// `center + (a cos 2πt, b sin 2πt)`.
    Ellipse { center: Point2, a: f64, b: f64 },
    /// Polar curve `r(θ) = r0 + amp sin(k θ)` with `θ = 2πt`.
    Polar { r0: f64, amp: f64, k: f64 },
    /// Figure eight `(a sin 2πt, a sin 4πt)`; it crosses itself at the origin
    /// at `t = 0` and `t = 1/2`.
    FigureEight { a: f64 },
}

impl CurveShape {
    fn point(&self, t: f64) -> Point2 {
        match self {
            CurveShape::Polygon { vertices } => polygon_point(vertices, t),
            CurveShape::Ellipse { center, a, b } => {
                let th = TAU * t;
                Point2::new(center.x + a * th.cos(), center.y + b * th.sin())
            }
            CurveShape::Polar { r0, amp, k } => {
                let th = TAU * t;
                let r = r0 + amp * (k * th).sin();
                Point2::new(r * th.cos(), r * th.sin())
            }
            CurveShape::FigureEight { a } => {
                let th = TAU * t;
                Point2::new(a * th.sin(), a * (2.0 * th).sin())
            }
        }
    }

    fn speed(&self, t: f64) -> f64 {
        match self {
            CurveShape::Polygon { vertices } => polygon_perimeter(vertices),
            CurveShape::Ellipse { a, b, .. } => {
                let th = TAU * t;
                TAU * (a * th.sin()).hypot(b * th.cos())
            }
            CurveShape::Polar { r0, amp, k } => {
                let th = TAU * t;
                let r = r0 + amp * (k * th).sin();
                let dr = amp * k * (k * th).cos();
                TAU * r.hypot(dr)
            }
            CurveShape::FigureEight { a } => {
                let th = TAU * t;
                TAU * (a * th.cos()).hypot(2.0 * a * (2.0 * th).cos())
            }
        }
    }
}

fn polygon_perimeter(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| vertices[i].distance(vertices[(i + 1) % n]))
        .sum()
}

fn polygon_point(vertices: &[Point2], t: f64) -> Point2 {
    let n = vertices.len();
    let total = polygon_perimeter(vertices);
    let mut s = t.rem_euclid(1.0) * total;
    for i in 0..n {
        let (p, q) = (vertices[i], vertices[(i + 1) % n]);
        let len = p.distance(q);
        if s <= len || i == n - 1 {
            let u = (s / len).clamp(0.0, 1.0);
            return Point2::new(p.x + u * (q.x - p.x), p.y + u * (q.y - p.y));
        }
        s -= len;
    }
    unreachable!("polygon has at least three vertices")
}

/// A closed boundary component with its arc-length table.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    shape: CurveShape,
    orientation: Orientation,
    // cumulative[i] = arc length from t = 0 to t = i / ARC_PANELS
    cumulative: Vec<f64>,
}

impl BoundaryCurve {
    fn new(shape: CurveShape, orientation: Orientation, index: usize) -> Result<Self, GeometryError> {
        let mut cumulative = Vec::with_capacity(ARC_PANELS + 1);
        cumulative.push(0.0);
        if let CurveShape::Polygon { vertices } = &shape {
            let total = polygon_perimeter(vertices);
            cumulative.extend((1..=ARC_PANELS).map(|i| total * i as f64 / ARC_PANELS as f64));
        } else {
            let h = 1.0 / ARC_PANELS as f64;
            let mut acc = 0.0;
            for i in 0..ARC_PANELS {
                let a = i as f64 * h;
                acc += adaptive_simpson(|t| shape.speed(t), a, a + h)
                    .ok_or(GeometryError::NonRectifiable { curve: index })?;
                cumulative.push(acc);
            }
        }
        Ok(Self { shape, orientation, cumulative })
    }

    pub fn shape(&self) -> &CurveShape {
        &self.shape
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn param(&self, t: f64) -> Point2 {
        self.shape.point(t)
    }

    /// `|p'(t)|`.
    pub fn speed(&self, t: f64) -> f64 {
        self.shape.speed(t)
    }

    pub fn length(&self) -> f64 {
        self.cumulative[ARC_PANELS]
    }

    /// Arc length from `t = 0` to `t` (`t` in `[0, 1]`).
    pub fn arc_length_to(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        if let CurveShape::Polygon { .. } = self.shape {
            return t * self.length();
        }
        let h = 1.0 / ARC_PANELS as f64;
        let panel = ((t / h).floor() as usize).min(ARC_PANELS - 1);
        let a = panel as f64 * h;
        let partial = adaptive_simpson(|u| self.shape.speed(u), a, t).unwrap_or_else(|| {
            // the panel itself converged, so a sub-interval can only fail
            // through pathological roundoff; fall back to linear interpolation
            (t - a) / h * (self.cumulative[panel + 1] - self.cumulative[panel])
        });
        self.cumulative[panel] + partial
    }

    /// Inverse of [`Self::arc_length_to`]: the parameter at which the arc
    /// length from `t = 0` equals `s` (taken modulo the curve length).
    pub fn param_at_arc(&self, s: f64) -> f64 {
        let total = self.length();
        let s = s.rem_euclid(total);
        if let CurveShape::Polygon { .. } = self.shape {
            return s / total;
        }
        let h = 1.0 / ARC_PANELS as f64;
        let panel = match self.cumulative.partition_point(|&c| c <= s) {
            0 => 0,
            p => (p - 1).min(ARC_PANELS - 1),
        };
        let (mut lo, mut hi) = (panel as f64 * h, (panel + 1) as f64 * h);
        let (c0, c1) = (self.cumulative[panel], self.cumulative[panel + 1]);
        let mut t = lo + (s - c0) / (c1 - c0) * h;
        for _ in 0..100 {
            let f = self.arc_length_to(t) - s;
            if f.abs() <= 1e-15 * total.max(1.0) {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let speed = self.speed(t);
            let newton = t - f / speed;
            t = if speed > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-16 {
                break;
            }
        }
        t
    }

    /// Parameters of `count` points spaced equally in arc length, the first at `t = 0`.
    pub fn equispaced_params(&self, count: usize) -> Vec<f64> {
        let total = self.length();
        (0..count)
            .map(|j| {
                if j == 0 {
                    0.0
                } else {
                    self.param_at_arc(total * j as f64 / count as f64)
                }
            })
            .collect()
    }
}

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson quadrature with Richardson correction. Returns `None`
/// when the recursion depth is exhausted.
fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Option<f64> {
    if b <= a {
        return Some(0.0);
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, a, b);
    let scale = whole.abs().max(1.0);
    simpson_step(&f, a, b, fa, fm, fb, whole, SIMPSON_TOL * scale, SIMPSON_MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) < 1e-14 {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 || !delta.is_finite() {
        return None;
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Some(l + r)
}

/// A flagged corner or cusp: the curve passes through `point` at parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerRef {
    pub curve: usize,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Region {
    /// Counter-clockwise convex polygon.
    ConvexPolygon(Vec<Point2>),
    Ellipse { a: f64, b: f64 },
    /// Disk of radius `outer` minus the open disk `|p - inner_center| < inner`.
    Lune { outer: f64, inner_center: Point2, inner: f64 },
    /// `r0_in + amp sin(kθ) <= r <= r0_out + amp sin(kθ)`.
    PolarAnnulus { r0_in: f64, r0_out: f64, amp: f64, k: f64 },
    /// `4x² - 4x⁴/a² - y² >= 0`.
    Bowtie { a: f64 },
}

/// An irregular compact domain in the plane.
#[derive(Debug, Clone)]
pub struct Domain {
    name: String,
    region: Region,
    curves: Vec<BoundaryCurve>,
    bbox: BBox,
    corners: Vec<CornerRef>,
}

impl Domain {
    /// Convex polygon from vertices in either winding order.
    pub fn convex_polygon(name: &str, vertices: &[Point2]) -> Result<Self, GeometryError> {
        if vertices.len() < 3 || vertices.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::Invalid("polygon needs at least three finite vertices".into()));
        }
        let n = vertices.len();
        let cross = |i: usize| {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x)
        };
        let signs: Vec<f64> = (0..n).map(cross).collect();
        let mut verts = vertices.to_vec();
        if signs.iter().all(|&s| s < 0.0) {
            // clockwise: keep vertex 0 first, reverse the rest
            verts[1..].reverse();
        } else if !signs.iter().all(|&s| s > 0.0) {
            return Err(GeometryError::Invalid("polygon is not strictly convex".into()));
        }
        let curve = BoundaryCurve::new(CurveShape::Polygon { vertices: verts.clone() }, Orientation::Outer, 0)?;
        let perimeter = curve.length();
        let mut corners = Vec::with_capacity(n);
        let mut s = 0.0;
        for i in 0..n {
            corners.push(CornerRef { curve: 0, t: s / perimeter });
            s += verts[i].distance(verts[(i + 1) % n]);
        }
        let bbox = BBox {
            min: Point2::new(
                verts.iter().map(|v| v.x).fold(f64::INFINITY, f64::min),
                verts.iter().map(|v| v.y).fold(f64::INFINITY, f64::min),
            ),
            max: Point2::new(
                verts.iter().map(|v| v.x).fold(f64::NEG_INFINITY, f64::max),
                verts.iter().map(|v| v.y).fold(f64::NEG_INFINITY, f64::max),
            ),
        };
        Ok(Self {
            name: name.to_string(),
            region: Region::ConvexPolygon(verts),
            curves: vec![curve],
            bbox,
            corners,
        })
    }

    /// Origin-centred ellipse `x²/a² + y²/b² <= 1`.
    pub fn ellipse(a: f64, b: f64) -> Result<Self, GeometryError> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(GeometryError::Invalid("ellipse semi-axes must be positive".into()));
        }
        let curve = BoundaryCurve::new(CurveShape::Ellipse { center: Point2::ORIGIN, a, b }, Orientation::Outer, 0)?;
        Ok(Self {
            name: "ellipse".into(),
            region: Region::Ellipse { a, b },
            curves: vec![curve],
            bbox: BBox { min: Point2::new(-a, -b), max: Point2::new(a, b) },
            corners: Vec::new(),
        })
    }

    fn lune() -> Result<Self, GeometryError> {
        let (outer, inner, c) = (0.9, 0.6, Point2::new(0.3, 0.0));
        let curves = vec![
            BoundaryCurve::new(
                CurveShape::Ellipse { center: Point2::ORIGIN, a: outer, b: outer },
                Orientation::Outer,
                0,
            )?,
            BoundaryCurve::new(CurveShape::Ellipse { center: c, a: inner, b: inner }, Orientation::InnerHole, 1)?,
        ];
        Ok(Self {
            name: "lune".into(),
            region: Region::Lune { outer, inner_center: c, inner },
            curves,
            bbox: BBox { min: Point2::new(-outer, -outer), max: Point2::new(outer, outer) },
            // both circles pass through the tangency point (0.9, 0) at t = 0
            corners: vec![CornerRef { curve: 0, t: 0.0 }, CornerRef { curve: 1, t: 0.0 }],
        })
    }

    fn five_petal_annulus() -> Result<Self, GeometryError> {
        let (r0_in, r0_out, amp, k) = (0.4, 0.7, 0.2, 5.0);
        let curves = vec![
            BoundaryCurve::new(CurveShape::Polar { r0: r0_out, amp, k }, Orientation::Outer, 0)?,
            BoundaryCurve::new(CurveShape::Polar { r0: r0_in, amp, k }, Orientation::InnerHole, 1)?,
        ];
        let rmax = r0_out + amp;
        Ok(Self {
            name: "five_petal_annulus".into(),
            region: Region::PolarAnnulus { r0_in, r0_out, amp, k },
            curves,
            bbox: BBox { min: Point2::new(-rmax, -rmax), max: Point2::new(rmax, rmax) },
            corners: Vec::new(),
        })
    }

    fn bowtie() -> Result<Self, GeometryError> {
        let a = 0.9;
        let curve = BoundaryCurve::new(CurveShape::FigureEight { a }, Orientation::Outer, 0)?;
        // max of 2x sqrt(1 - x²/a²) is a, attained at x = a/sqrt(2)
        Ok(Self {
            name: "bowtie".into(),
            region: Region::Bowtie { a },
            curves: vec![curve],
            bbox: BBox { min: Point2::new(-a, -a), max: Point2::new(a, a) },
            corners: vec![CornerRef { curve: 0, t: 0.0 }, CornerRef { curve: 0, t: 0.5 }],
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn curves(&self) -> &[BoundaryCurve] {
        &self.curves
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn corners(&self) -> &[CornerRef] {
        &self.corners
    }

    /// Classifies `p` as interior, boundary or exterior.
    pub fn contains(&self, p: Point2) -> Location {
        let (worst, nearest) = self.level_values(p);
        if worst < -BOUNDARY_TOL {
            Location::Exterior
        } else if nearest <= BOUNDARY_TOL {
            Location::Boundary
        } else {
            Location::Interior
        }
    }

    /// Distance of `p` from satisfying the boundary equation: the smallest
    /// absolute value among the defining level functions.
    pub fn boundary_residual(&self, p: Point2) -> f64 {
        self.level_values(p).1
    }

    /// Returns `(min level, min |level|)` over the defining constraints,
    /// each written so that non-negative means "inside".
    fn level_values(&self, p: Point2) -> (f64, f64) {
        let mut worst = f64::INFINITY;
        let mut nearest = f64::INFINITY;
        let mut push = |v: f64| {
            worst = worst.min(v);
            nearest = nearest.min(v.abs());
        };
        match &self.region {
            Region::ConvexPolygon(verts) => {
                let n = verts.len();
                for i in 0..n {
                    let (a, b) = (verts[i], verts[(i + 1) % n]);
                    let (dx, dy) = (b.x - a.x, b.y - a.y);
                    let len = dx.hypot(dy);
                    push((dx * (p.y - a.y) - dy * (p.x - a.x)) / len);
                }
            }
            Region::Ellipse { a, b } => {
                push(1.0 - (p.x * p.x / (a * a) + p.y * p.y / (b * b)));
            }
            Region::Lune { outer, inner_center, inner } => {
                push(1.0 - p.norm_sq() / (outer * outer));
                let (dx, dy) = (p.x - inner_center.x, p.y - inner_center.y);
                push((dx * dx + dy * dy) / (inner * inner) - 1.0);
            }
            Region::PolarAnnulus { r0_in, r0_out, amp, k } => {
                let r = p.x.hypot(p.y);
                let wave = amp * (k * p.y.atan2(p.x)).sin();
                push(r - (r0_in + wave));
                push(r0_out + wave - r);
            }
            Region::Bowtie { a } => {
                let x2 = p.x * p.x;
                push(4.0 * x2 - 4.0 * x2 * x2 / (a * a) - p.y * p.y);
            }
        }
        (worst, nearest)
    }
}

/// Looks up one of the built-in domains by identifier.
pub fn catalog(name: &str) -> Result<Domain, GeometryError> {
    let p = Point2::new;
    match name {
        "diamond" => Domain::convex_polygon(name, &[p(1.0, 0.0), p(0.0, 1.0), p(-1.0, 0.0), p(0.0, -1.0)]),
        "pentagon" => Domain::convex_polygon(
            name,
            &[p(0.0, 0.9), p(-0.9, 0.2), p(-0.7, -0.8), p(0.7, -0.8), p(0.9, 0.2)],
        ),
        "triangle" => Domain::convex_polygon(name, &[p(0.0, 0.9), p(-0.6, -0.9), p(0.6, -0.9)]),
        "square" => Domain::convex_polygon(name, &[p(-1.0, -1.0), p(1.0, -1.0), p(1.0, 1.0), p(-1.0, 1.0)]),
        "ellipse" => Domain::ellipse(0.6, 0.9),
        "lune" => Domain::lune(),
        "five_petal_annulus" => Domain::five_petal_annulus(),
        "bowtie" => Domain::bowtie(),
        _ => Err(GeometryError::UnknownDomain { name: name.to_string() }),
    }
}

/// Distributes `total` among `weights` proportionally using largest-remainder
/// rounding, giving every entry at least one.
fn largest_remainder(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&i, &j| {
        let (ri, rj) = (quotas[i] - quotas[i].floor(), quotas[j] - quotas[j].floor());
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    let assigned: usize = counts.iter().sum();
    for &i in order.iter().take(total - assigned) {
        counts[i] += 1;
    }
    for i in 0..counts.len() {
        if counts[i] == 0 {
            let donor = (0..counts.len()).max_by_key(|&j| counts[j]).expect("non-empty");
            counts[donor] -= 1;
            counts[i] = 1;
        }
    }
    counts
}

/// Places `n_total` boundary nodes, split across the curves in proportion to
/// their arc lengths and equally spaced in arc length on each curve.
pub fn boundary_nodes(domain: &Domain, n_total: usize) -> Result<Vec<Point2>, GeometryError> {
    let curves = domain.curves();
    if n_total < curves.len() {
        return Err(GeometryError::TooFewBoundaryNodes { requested: n_total, curves: curves.len() });
    }
    let lengths: Vec<f64> = curves.iter().map(BoundaryCurve::length).collect();
    let counts = largest_remainder(&lengths, n_total);
    let mut out = Vec::with_capacity(n_total);
    for (curve, &count) in curves.iter().zip(&counts) {
        out.extend(curve.equispaced_params(count).into_iter().map(|t| curve.param(t)));
    }
    Ok(out)
}

/// Appends boundary points graded geometrically (ratio 1/2) toward every
/// flagged corner of `domain`.
///
/// Each corner entry receives `extra_per_corner` points: half (rounded up)
/// ahead of the corner along its curve and the rest behind it, at arc
/// offsets `radius, radius/2, radius/4, ...`. Points within
/// [`DUPLICATE_TOL`] of an existing node are dropped.
pub fn corner_refine(nodes: &[Point2], domain: &Domain, extra_per_corner: usize, radius: f64) -> Vec<Point2> {
    let mut out = nodes.to_vec();
    if extra_per_corner == 0 {
        return out;
    }
    for corner in domain.corners() {
        let curve = &domain.curves()[corner.curve];
        let s0 = curve.arc_length_to(corner.t);
        let ahead = extra_per_corner.div_ceil(2);
        let behind = extra_per_corner - ahead;
        let offsets = (0..ahead)
            .map(|j| radius * 0.5f64.powi(j as i32))
            .chain((0..behind).map(|j| -radius * 0.5f64.powi(j as i32)));
        for offset in offsets {
            let p = curve.param(curve.param_at_arc(s0 + offset));
            if out.iter().all(|q| q.distance(p) >= DUPLICATE_TOL) {
                out.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_membership_examples() {
        assert_eq!(catalog("diamond").unwrap().contains(Point2::ORIGIN), Location::Interior);
        assert_eq!(catalog("pentagon").unwrap().contains(Point2::new(0.0, 0.9)), Location::Boundary);
        assert_eq!(catalog("lune").unwrap().contains(Point2::new(0.3, 0.0)), Location::Exterior);
        assert_eq!(catalog("bowtie").unwrap().contains(Point2::ORIGIN), Location::Boundary);
        assert_eq!(catalog("five_petal_annulus").unwrap().contains(Point2::ORIGIN), Location::Exterior);
    }

    #[test]
    fn unknown_domain_lists_valid_names() {
        let err = catalog("hexagon").unwrap_err();
        let msg = err.to_string();
        for name in CATALOG_NAMES {
            assert!(msg.contains(name), "{msg}");
        }
    }

    #[test]
    fn curve_counts_and_corners() {
        let lune = catalog("lune").unwrap();
        assert_eq!(lune.curves().len(), 2);
        for c in lune.corners() {
            let p = lune.curves()[c.curve].param(c.t);
            assert!(p.distance(Point2::new(0.9, 0.0)) < 1e-15);
        }
        let petals = catalog("five_petal_annulus").unwrap();
        assert_eq!(petals.curves().len(), 2);
        assert_eq!(petals.curves()[1].orientation(), Orientation::InnerHole);
        let bowtie = catalog("bowtie").unwrap();
        assert!(bowtie.corners().iter().all(|c| bowtie.curves()[0].param(c.t).distance(Point2::ORIGIN) < 1e-15));
    }

    #[test]
    fn circle_nodes_are_quarter_turns() {
        let circle = Domain::ellipse(0.9, 0.9).unwrap();
        let nodes = boundary_nodes(&circle, 4).unwrap();
        let expected = [(0.9, 0.0), (0.0, 0.9), (-0.9, 0.0), (0.0, -0.9)];
        for (p, (x, y)) in nodes.iter().zip(expected) {
            assert!((p.x - x).abs() < 1e-12 && (p.y - y).abs() < 1e-12, "{p}");
        }
    }

    #[test]
    fn square_nodes_hit_vertices() {
        let square = catalog("square").unwrap();
        for n in [5, 10, 21, 30] {
            let nodes = boundary_nodes(&square, 4 * n - 4).unwrap();
            for v in [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)] {
                let v = Point2::new(v.0, v.1);
                assert!(nodes.iter().any(|p| p.distance(v) < 1e-12), "N={n} missing {v}");
            }
        }
    }

    #[test]
    fn too_few_nodes_is_an_error() {
        let lune = catalog("lune").unwrap();
        assert!(matches!(boundary_nodes(&lune, 1), Err(GeometryError::TooFewBoundaryNodes { .. })));
    }

    #[test]
    fn largest_remainder_sums_to_total() {
        assert_eq!(largest_remainder(&[2.0, 1.0], 10), vec![7, 3]);
        assert_eq!(largest_remainder(&[1.0, 1.0, 1.0], 4).iter().sum::<usize>(), 4);
        assert_eq!(largest_remainder(&[1000.0, 1.0], 2), vec![1, 1]);
    }

    #[test]
    fn corner_refine_zero_is_identity() {
        let tri = catalog("triangle").unwrap();
        let nodes = boundary_nodes(&tri, 30).unwrap();
        assert_eq!(corner_refine(&nodes, &tri, 0, 0.1), nodes);
    }

    #[test]
    fn corner_refine_lune_counts() {
        let lune = catalog("lune").unwrap();
        let nodes = boundary_nodes(&lune, 40).unwrap();
        let refined = corner_refine(&nodes, &lune, 5, 0.1);
        assert_eq!(refined.len(), nodes.len() + 10);
        assert_eq!(&refined[..nodes.len()], &nodes[..]);
        let cusp = Point2::new(0.9, 0.0);
        for p in &refined[nodes.len()..] {
            assert!(p.distance(cusp) <= 0.1 + 1e-12);
            assert_eq!(lune.contains(*p), Location::Boundary);
        }
    }

    #[test]
    fn corner_refine_bowtie_radius() {
        let bowtie = catalog("bowtie").unwrap();
        let nodes = boundary_nodes(&bowtie, 41).unwrap();
        let refined = corner_refine(&nodes, &bowtie, 3, 0.05);
        assert_eq!(refined.len(), nodes.len() + 6);
        for p in &refined[nodes.len()..] {
            assert!(p.distance(Point2::ORIGIN) <= 0.05 + 1e-12, "{p}");
        }
    }

    #[test]
    fn clockwise_polygon_is_reoriented() {
        let p = Point2::new;
        let cw = Domain::convex_polygon("cw", &[p(0.0, 0.5), p(0.5, -0.5), p(-0.5, -0.5)]).unwrap();
        assert_eq!(cw.contains(p(0.0, 0.0)), Location::Interior);
        assert_eq!(cw.contains(p(0.0, 0.6)), Location::Exterior);
        let bad = Domain::convex_polygon("bad", &[p(0.0, 0.0), p(1.0, 0.0), p(0.2, 0.2), p(0.0, 1.0)]);
        assert!(bad.is_err());
    }
}
