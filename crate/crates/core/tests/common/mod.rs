//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the library's numerics.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

/// Defining inequality of each catalog domain: `Some(true)` inside,
/// `Some(false)` outside, `None` within `tol` of the boundary.
pub fn membership(domain: &str, x: f64, y: f64, tol: f64) -> Option<bool> {
    let constraints = constraints(domain, x, y);
    if constraints.iter().any(|&c| c < -tol) {
        Some(false)
    } else if constraints.iter().all(|&c| c > tol) {
        Some(true)
    } else {
        None
    }
}

/// Constraint values, all positive exactly in the open domain.
pub fn constraints(domain: &str, x: f64, y: f64) -> Vec<f64> {
    match domain {
        "diamond" => vec![1.0 - x.abs() - y.abs()],
        "square" => vec![1.0 - x.abs(), 1.0 - y.abs()],
        "ellipse" => vec![1.0 - (x / 0.6).powi(2) - (y / 0.9).powi(2)],
        "pentagon" => half_planes(&[(0.0, 0.9), (-0.9, 0.2), (-0.7, -0.8), (0.7, -0.8), (0.9, 0.2)], x, y),
        "triangle" => half_planes(&[(0.0, 0.9), (-0.6, -0.9), (0.6, -0.9)], x, y),
        "lune" => vec![0.81 - x * x - y * y, (x - 0.3).powi(2) + y * y - 0.36],
        "five_petal_annulus" => {
            let r = x.hypot(y);
            let s = (5.0 * y.atan2(x)).sin();
            vec![0.7 + 0.2 * s - r, r - 0.4 - 0.2 * s]
        }
        "bowtie" => vec![4.0 * x * x - 4.0 * x.powi(4) / 0.81 - y * y, 0.9 - x.abs()],
        other => panic!("no oracle for {other}"),
    }
}

/// Signed distances to the edges of a polygon given in any winding order.
fn half_planes(v: &[(f64, f64)], x: f64, y: f64) -> Vec<f64> {
    let area: f64 = (0..v.len())
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum();
    let s = area.signum();
    (0..v.len())
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            let len = (b.0 - a.0).hypot(b.1 - a.1);
            s * ((b.0 - a.0) * (y - a.1) - (b.1 - a.1) * (x - a.0)) / len
        })
        .collect()
}

/// Halton point `i` in `[lo, hi]²` (bases 2 and 3).
pub fn halton(i: usize, lo: f64, hi: f64) -> (f64, f64) {
    let radical = |mut n: usize, base: usize| {
        let (mut f, mut r) = (1.0, 0.0);
        while n > 0 {
            f /= base as f64;
            r += f * (n % base) as f64;
            n /= base;
        }
        r
    };
    (lo + (hi - lo) * radical(i + 1, 2), lo + (hi - lo) * radical(i + 1, 3))
}

/// Composite 10-point Gauss-Legendre rule for `∫_a^b f` on `panels` panels.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        0.148_874_338_981_631_2,
        0.433_395_394_129_247_2,
        0.679_409_568_299_024_4,
        0.865_063_366_688_984_5,
        0.973_906_528_517_171_7,
    ];
    const W: [f64; 5] = [
        0.295_524_224_714_752_9,
        0.269_266_719_309_996_4,
        0.219_086_362_515_982_0,
        0.149_451_349_150_580_6,
        0.066_671_344_308_688_1,
    ];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            let half = 0.5 * h;
            X.iter()
                .zip(W)
                .map(|(&x, w)| w * (f(mid - half * x) + f(mid + half * x)))
                .sum::<f64>()
                * half
        })
        .sum()
}

/// `exp(iπ(l1 x + l2 y)/T)` written out with sin/cos.
pub fn plane_wave(l1: i32, l2: i32, t: f64, x: f64, y: f64) -> Complex64 {
    let theta = PI * (l1 as f64 * x + l2 as f64 * y) / t;
    Complex64::new(theta.cos(), theta.sin())
}

/// Dense complex matrix stored by rows.
#[derive(Clone, Debug)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }
    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.at(i, j) * x[j]).sum()).collect()
    }
    pub fn to_faer(&self) -> faer::Mat<Complex64> {
        faer::Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j))
    }
}

/// Least-squares solution of a full-column-rank tall system by Householder QR.
pub fn qr_least_squares(a: &Dense, b: &[Complex64]) -> Vec<Complex64> {
    assert!(a.rows >= a.cols);
    let (m, n) = (a.rows, a.cols);
    let mut r = a.clone();
    let mut rhs = b.to_vec();
    for k in 0..n {
        let norm = (k..m).map(|i| r.at(i, k).norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let akk = r.at(k, k);
        let phase = if akk.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { akk / akk.norm() };
        let mut v: Vec<Complex64> = (k..m).map(|i| r.at(i, k)).collect();
        v[0] += phase * norm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        // apply H = I - 2 v vᴴ / (vᴴ v) to the trailing columns and the rhs
        for j in k..n {
            let dot: Complex64 = (k..m).map(|i| v[i - k].conj() * r.at(i, j)).sum();
            let s = dot * 2.0 / vnorm;
            for i in k..m {
                let val = r.at(i, j) - v[i - k] * s;
                r.set(i, j, val);
            }
        }
        let dot: Complex64 = (k..m).map(|i| v[i - k].conj() * rhs[i]).sum();
        let s = dot * 2.0 / vnorm;
        for i in k..m {
            rhs[i] -= v[i - k] * s;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: Complex64 = (i + 1..n).map(|j| r.at(i, j) * x[j]).sum();
        x[i] = (rhs[i] - s) / r.at(i, i);
    }
    x
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&d) / norm(b).max(f64::MIN_POSITIVE)
}

/// Deterministic complex matrix with entries uniform in the unit square,
/// plus `diag` on the leading diagonal to keep it well conditioned.
pub fn random_dense(rows: usize, cols: usize, diag: f64, rng: &mut impl rand::Rng) -> Dense {
    let mut a = Dense::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let mut v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if i == j {
                v += diag;
            }
            a.set(i, j, v);
        }
    }
    a
}

/// Parses a CSV produced by the CLI into its header and numeric rows.
pub fn read_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().expect("header").split(',').map(str::to_string).collect();
    let rows = lines.filter(|l| !l.is_empty()).map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

/// `U diag(sigmas) Vᴴ` with random orthonormal `U` (rows × k) and `V` (cols × k).
pub fn with_spectrum(rows: usize, cols: usize, sigmas: &[f64], rng: &mut impl rand::Rng) -> (Dense, faer::Mat<Complex64>) {
    let k = sigmas.len();
    let u = random_dense(rows, k, 0.0, rng).to_faer().qr().compute_thin_Q();
    let v = random_dense(cols, k, 0.0, rng).to_faer().qr().compute_thin_Q();
    let mut a = Dense::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let s: Complex64 = (0..k).map(|l| u[(i, l)] * sigmas[l] * v[(j, l)].conj()).sum();
            a.set(i, j, s);
        }
    }
    (a, v)
}
