mod common;

use common::plane_wave;
use fourier_collocation::frames::{eval_basis, eval_matrix, linear_index};
use fourier_collocation::{Complex64, DerivOrder, FrameSpec, MultiIndex, Point2};
use proptest::prelude::*;

const T: f64 = 2.0;

fn spec() -> FrameSpec {
    FrameSpec::new(21, T, 1e-14).unwrap()
}

fn index() -> impl Strategy<Value = MultiIndex> {
    (-10i32..=10, -10i32..=10).prop_map(|(a, b)| MultiIndex::new(a, b))
}

fn point() -> impl Strategy<Value = Point2> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(x, y)| Point2::new(x, y))
}

proptest! {
    #[test]
    fn unit_modulus(l in index(), p in point()) {
        prop_assert!((eval_basis(&spec(), l, p, DerivOrder::Value).norm() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn matches_plane_wave(l in index(), p in point()) {
        let v = eval_basis(&spec(), l, p, DerivOrder::Value);
        prop_assert!((v - plane_wave(l.l1, l.l2, T, p.x, p.y)).norm() <= 1e-14);
    }

    #[test]
    fn conjugate_symmetry(l in index(), p in point()) {
        let a = eval_basis(&spec(), -l, p, DerivOrder::Value);
        let b = eval_basis(&spec(), l, p, DerivOrder::Value).conj();
        prop_assert!((a - b).norm() <= 1e-14);
    }

    #[test]
    fn laplacian_eigenfunction(l in index(), p in point()) {
        let s = spec();
        let lap = eval_basis(&s, l, p, DerivOrder::Dxx) + eval_basis(&s, l, p, DerivOrder::Dyy);
        let k = std::f64::consts::PI / T;
        let expected = -k * k * f64::from(l.l1 * l.l1 + l.l2 * l.l2) * eval_basis(&s, l, p, DerivOrder::Value);
        prop_assert!((lap - expected).norm() <= 1e-12 * expected.norm().max(1.0));
    }

    #[test]
    fn first_derivatives_match_finite_differences(l in index(), p in point()) {
        let h = 1e-5;
        let f = |x: f64, y: f64| plane_wave(l.l1, l.l2, T, x, y);
        let fdx = (f(p.x + h, p.y) - f(p.x - h, p.y)) / (2.0 * h);
        let fdy = (f(p.x, p.y + h) - f(p.x, p.y - h)) / (2.0 * h);
        for (d, fd) in [(DerivOrder::Dx, fdx), (DerivOrder::Dy, fdy)] {
            let exact = eval_basis(&spec(), l, p, d);
            let scale = exact.norm().max(1.0);
            prop_assert!((exact.re - fd.re).abs() <= 1e-6 * scale);
            prop_assert!((exact.im - fd.im).abs() <= 1e-6 * scale);
        }
    }

    #[test]
    fn second_derivatives_match_finite_differences(l in index(), p in point()) {
        let h = 1e-4;
        let f = |x: f64, y: f64| plane_wave(l.l1, l.l2, T, x, y);
        let c = f(p.x, p.y);
        let fdxx = (f(p.x + h, p.y) - 2.0 * c + f(p.x - h, p.y)) / (h * h);
        let fdyy = (f(p.x, p.y + h) - 2.0 * c + f(p.x, p.y - h)) / (h * h);
        for (d, fd) in [(DerivOrder::Dxx, fdxx), (DerivOrder::Dyy, fdyy)] {
            let exact = eval_basis(&spec(), l, p, d);
            let scale = exact.norm().max(1.0);
            prop_assert!((exact - fd).norm() <= 1e-6 * scale, "{d:?}: {exact} vs {fd}");
        }
    }
}

#[test]
fn matrix_columns_follow_linear_index() {
    let s = FrameSpec::new(6, T, 1e-14).unwrap();
    let pts = [Point2::new(0.3, -0.2), Point2::new(-0.7, 0.5), Point2::new(0.0, 0.0)];
    let scale = 1.0 / 40.0;
    for d in DerivOrder::ALL {
        let m = eval_matrix(&s, &pts, d, scale);
        for (j, l) in linear_index(&s).into_iter().enumerate() {
            for (i, p) in pts.iter().enumerate() {
                let expected: Complex64 = eval_basis(&s, l, *p, d) * scale;
                assert!((m[(i, j)] - expected).norm() <= 1e-15 * expected.norm().max(1.0));
            }
        }
    }
}

#[test]
fn pinned_derivative_example() {
    let s = spec();
    let (l, p, h) = (MultiIndex::new(3, -2), Point2::new(0.17, -0.42), 1e-5);
    let fd = (plane_wave(3, -2, T, p.x + h, p.y) - plane_wave(3, -2, T, p.x - h, p.y)) / (2.0 * h);
    let exact = eval_basis(&s, l, p, DerivOrder::Dx);
    assert!((exact - fd).norm() / exact.norm() <= 1e-8);
}
