mod common;

use bifrac::frft::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

fn axis() -> SampledAxis<f64> {
    SampledAxis::symmetric(8.0, 512).unwrap()
}

fn hermite_grid(n: usize) -> ComplexGrid1D<f64> {
    let wide = SampledAxis::symmetric(10.0, 640).unwrap();
    ComplexGrid1D::from_fn(wide, |x| Complex64::new(common::hermite_fn(n, x), 0.0))
}

#[test]
fn additivity_examples() {
    assert!(frft_compose_check(FRAC_PI_4, FRAC_PI_4, axis()).unwrap() < 1e-6);
    assert!(frft_compose_check(0.9, 0.0, axis()).unwrap() < 1e-12);
    assert!(frft_compose_check(FRAC_PI_2, FRAC_PI_2, axis()).unwrap() < 1e-6);
}

#[test]
fn half_turn_reflects() {
    let f = ComplexGrid1D::from_fn(axis(), |x| Complex64::new((-(x - 1.0).powi(2) / 2.0).exp(), 0.0));
    let g = frft_apply(&f, PI).unwrap();
    let r = ComplexGrid1D::from_fn(axis(), |x| Complex64::new((-(x + 1.0).powi(2) / 2.0).exp(), 0.0));
    assert!(g.max_abs_diff(&r) < 1e-12);
}

#[test]
fn shifted_gaussian_fourier_transform() {
    // ∫ e^{ixy} e^{−(y−1)²/2} dy / √(2π) = e^{ix} e^{−x²/2}
    let f = ComplexGrid1D::from_fn(axis(), |x| Complex64::new((-(x - 1.0).powi(2) / 2.0).exp(), 0.0));
    let g = frft_apply(&f, FRAC_PI_2).unwrap();
    let want = ComplexGrid1D::from_fn(axis(), |x| Complex64::from_polar((-x * x / 2.0).exp(), x));
    assert!(g.max_abs_diff(&want) < 1e-10);
}

#[test]
fn two_dimensional_fourier_transform() {
    let ax = SampledAxis::symmetric(8.0, 161).unwrap();
    let f = ComplexGrid2D::square(ax, |a: f64, b: f64| {
        Complex64::new((-((a - 0.5).powi(2) + (b + 1.0).powi(2)) / 2.0).exp(), 0.0)
    });
    let spec = Frft2::new(FRAC_PI_2, Sign::Plus, FRAC_PI_2, Sign::Minus, Layout::Direct);
    let g = frft2_apply(&f, &spec).unwrap();
    let want =
        ComplexGrid2D::square(ax, |a: f64, b: f64| Complex64::from_polar((-(a * a + b * b) / 2.0).exp(), 0.5 * a + b));
    assert!(g.max_abs_diff(&want) < 1e-9);
}

#[test]
fn frft2_compatibility() {
    let ax = SampledAxis::symmetric(8.0, 161).unwrap();
    let f = ComplexGrid2D::square(ax, |a: f64, b: f64| {
        Complex64::new(1.0 + 0.3 * a, b * 0.2) * (-(a * a + b * b) / 2.0).exp()
    });
    let (t, p) = ((0.7, 1.1), (1.9, 0.4));
    let step = |g: &ComplexGrid2D<f64>, x: f64, y: f64| {
        frft2_apply(g, &Frft2::new(x, Sign::Plus, y, Sign::Plus, Layout::Direct)).unwrap()
    };
    let two = step(&step(&f, t.0, t.1), p.0 - t.0, p.1 - t.1);
    let one = step(&f, p.0, p.1);
    assert!(two.max_abs_diff(&one) < 1e-5);
}

#[test]
fn chirp_is_shifted_kernel() {
    for &(b, t) in &[(2.0, PI / 6.0), (0.0, 1.0), (-1.3, 2.5)] {
        let want = kernel_eval(0.0, b, t + FRAC_PI_2).unwrap() * (2.0 * PI).sqrt();
        assert!((chirp_eval(b, t).unwrap() - want).norm() < 1e-12);
    }
    assert_eq!(chirp_eval(1.7, 0.0).unwrap(), Complex64::new(1.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_matches_closed_form(x in -4.0f64..4.0, y in -4.0f64..4.0, t in 0.05f64..3.1) {
        let k = kernel_eval(x, y, t).unwrap();
        prop_assert!((k - common::kernel(x, y, t)).norm() < 1e-12);
        prop_assert!((k - kernel_eval(y, x, t).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn hermite_modes_are_eigenfunctions(n in 0usize..6, t in 0.1f64..3.0) {
        let g = frft_apply(&hermite_grid(n), t).unwrap();
        let want = hermite_grid(n).values.iter().map(|v| v * Complex64::from_polar(1.0, n as f64 * t)).collect::<Vec<_>>();
        let err = g.values.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-8, "n={} θ={}: {:e}", n, t, err);
    }

    #[test]
    fn additivity_random_angles(t1 in 0.05f64..3.0, t2 in 0.05f64..3.0) {
        prop_assert!(frft_compose_check(t1, t2, axis()).unwrap() < 1e-5);
    }

    #[test]
    fn transform_preserves_norm_and_inverts(t in -3.0f64..3.0) {
        let f = &test_battery(axis())[4];
        let g = frft_apply(f, t).unwrap();
        prop_assert!((g.norm2() / f.norm2() - 1.0).abs() < 1e-6);
        let back = frft_apply(&g, -t).unwrap();
        prop_assert!(back.max_abs_diff(f) < 1e-6);
    }
}
