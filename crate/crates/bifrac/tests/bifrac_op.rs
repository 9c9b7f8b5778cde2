mod common;

use bifrac::bifrac_op::*;
use bifrac::fock::{displacement, parity_displaced, FockSpace};
use bifrac::frame::AnglePair;
use bifrac::frft::{chirp_eval, kernel_eval};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

fn q() -> Quadrature<f64> {
    Quadrature::default()
}

fn ap(t1: f64, t2: f64) -> AnglePair<f64> {
    AnglePair::new(t1, t2).unwrap()
}

#[test]
fn generic_angles_match_position_kernel() {
    for &(a, b, t1, t2) in &[(0.3, -0.4, FRAC_PI_3, PI / 5.0), (-0.6, 0.2, 2.2, 1.9), (0.0, 0.0, 0.9, 0.6)] {
        let u = bifrac_block(a, b, &ap(t1, t2), 8, 8, &q()).unwrap();
        let o = common::position_kernel_block(a, b, t1, t2, 8, 8, 9.0, 1201);
        let err = u.max_abs_diff(&o);
        assert!(err < 1e-6, "({t1}, {t2}): {err:e}");
    }
}

#[test]
fn both_routes_agree() {
    let a = ap(1.1, 0.7);
    let w = Quadrature { route: Route::Weyl, ..q() };
    let p = Quadrature { route: Route::Position, ..q() };
    let uw = bifrac_block(0.4, 0.1, &a, 10, 10, &w).unwrap();
    let up = bifrac_block(0.4, 0.1, &a, 10, 10, &p).unwrap();
    assert!(uw.max_abs_diff(&up) < 1e-10);
}

#[test]
fn vacuum_element_matches_direct_quadrature() {
    let t = FRAC_PI_3;
    let u = bifrac_matrix_element(0, 0, 0.0, 0.0, &ap(t, t), FockSpace::new(8).unwrap()).unwrap();
    let o = common::position_kernel_block(0.0, 0.0, t, t, 1, 1, 9.0, 1201)[(0, 0)];
    assert!((u - o).norm() < 1e-6, "{u} vs {o}");
}

#[test]
fn half_turn_folds_to_displacement() {
    let s = FockSpace::new(48).unwrap();
    let u = bifrac_block_raw(0.3, -0.5, PI, PI, 16, 16, &q()).unwrap();
    let d = displacement(s, 0.5, 0.3).unwrap();
    assert!(u.max_abs_diff(&d.matrix().block(16, 16)) < 1e-9);
}

#[test]
fn first_angle_half_turn_flips_alpha() {
    let (t1, t2) = (0.7, 0.4);
    let a = bifrac_block_raw(0.35, -0.2, t1 + PI, t2, 10, 10, &q()).unwrap();
    let b = bifrac_block_raw(-0.35, -0.2, t1, t2, 10, 10, &q()).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-9);
}

#[test]
fn unit_prefactor_product_is_identity() {
    let a = ap(0.8, 0.5);
    let u = build_bifrac(0.0, 0.0, &a, FockSpace::new(32).unwrap()).unwrap();
    let k = interior_block(32);
    let g = u.matrix.matrix().matmul(&u.matrix.dagger().matrix().clone());
    let err = g.block(k, k).max_abs_diff(&bifrac::linalg::CMatrix::identity(k));
    assert!(err < 1e-5, "{err:e}");
}

#[test]
fn undersized_space_fails_unitarity() {
    let r = build_bifrac(2.5, 2.0, &ap(0.9, 0.2), FockSpace::new(8).unwrap());
    assert!(r.is_err());
}

#[test]
fn double_marginal_is_shifted_operator() {
    let s = FockSpace::new(12).unwrap();
    for &(t1, t2) in &[(1.0, 0.6), (FRAC_PI_2, FRAC_PI_2), (0.4, 0.9)] {
        let both = marginal_u(&ap(t1, t2), Marginal::Both, s, &q()).unwrap();
        let shifted = bifrac_block(0.0, 0.0, &ap(t1 + FRAC_PI_2, t2 + FRAC_PI_2), 6, 6, &q()).unwrap();
        let target = shifted.scale(Complex64::new(2.0 * PI, 0.0));
        let err = both.matrix().block(6, 6).max_abs_diff(&target);
        assert!(err < 1e-8, "({t1}, {t2}): {err:e}");
    }
}

#[test]
fn single_marginals_match_chirp_construction() {
    let s = FockSpace::new(12).unwrap();
    for &(t1, t2) in &[(1.0, 0.6), (FRAC_PI_2, FRAC_PI_2), (2.2, 1.9)] {
        let a = ap(t1, t2);
        for m in [Marginal::Alpha { beta: 0.4 }, Marginal::Beta { alpha: -0.3 }] {
            let x = marginal_u(&a, m, s, &q()).unwrap();
            let y = chirp_marginal(&a, m, s, &q()).unwrap();
            let err = x.matrix().block(6, 6).max_abs_diff(&y.matrix().block(6, 6));
            assert!(err < 1e-8, "({t1}, {t2}) {m:?}: {err:e}");
        }
    }
}

/// `∫exp(−A x² + B x) dx = √(π/A)·exp(B²/(4A))` for `Re A ≥ 0`.
fn fresnel_integral(y: f64, theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    let a = Complex64::new(0.0, c / s / 2.0) + Complex64::new(1e-300, 0.0);
    let b = Complex64::new(0.0, y / s);
    let pref = (Complex64::new(1.0, c / s) / (2.0 * PI)).sqrt();
    let quad = Complex64::from_polar(1.0, -y * y * c / s / 2.0);
    pref * quad * (PI / a).sqrt() * (b * b / (4.0 * a)).exp()
}

#[test]
fn integrated_kernel_closed_form() {
    for &th in &[0.3, 1.0, 2.0, -0.8] {
        for &y in &[0.0, 0.7, -1.5] {
            let f = fresnel_integral(y, th);
            let c = chirp_eval(y, th).unwrap();
            let k = kernel_eval(0.0, y, th + FRAC_PI_2).unwrap() * (2.0 * PI).sqrt();
            assert!((f - c).norm() < 1e-12, "θ={th} y={y}: {f} vs {c}");
            assert!((f - k).norm() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn zero_angles_collapse_to_displacement(a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let s = FockSpace::new(40).unwrap();
        let u = bifrac_block(a, b, &ap(0.0, 0.0), 16, 16, &q()).unwrap();
        let d = displacement(s, b, -a).unwrap();
        prop_assert!(u.max_abs_diff(&d.matrix().block(16, 16)) < 1e-9);
    }

    #[test]
    fn quarter_angles_collapse_to_displaced_parity(a in -1.5f64..1.5, b in -1.5f64..1.5) {
        let s = FockSpace::new(40).unwrap();
        let u = bifrac_block(a, b, &ap(FRAC_PI_2, FRAC_PI_2), 12, 12, &q()).unwrap();
        let p = parity_displaced(s, a, b).unwrap();
        prop_assert!(u.max_abs_diff(&p.matrix().block(12, 12)) < 1e-9);
    }

    #[test]
    fn interior_block_is_unitary(
        c in FRAC_PI_4..(3.0 * FRAC_PI_4),
        d in -0.4f64..0.4,
        a in -0.5f64..0.5,
        b in -0.5f64..0.5,
    ) {
        let angles = ap(c + d / 2.0, c - d / 2.0);
        let e = unitarity_defect(a, b, &angles, 40, 6, &q()).unwrap();
        prop_assert!(e < UNITARITY_TOL, "defect {e:e}");
    }
}
