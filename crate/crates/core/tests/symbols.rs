//! Angular-momentum kernel: identities, an independent Racah-formula oracle
//! and large-argument evaluation. All arguments are doubled.

mod common;

use common::identities::*;
use common::*;
use num_complex::Complex64;
use polarkit::angular::{nine_j, six_j, spherical_y, three_j, triangle, wigner_d, EulerAngles};
use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::{PI, TAU};

#[test]
fn three_j_matches_racah_formula() {
    let mut worst = 0.0f64;
    for j1 in 0..=6 {
        for j2 in 0..=6 {
            for j3 in 0..=6 {
                if !triangle(j1, j2, j3) {
                    continue;
                }
                for m1 in (-j1..=j1).step_by(2) {
                    for m2 in (-j2..=j2).step_by(2) {
                        let m3 = -m1 - m2;
                        if m3.abs() > j3 {
                            continue;
                        }
                        worst = worst.max((three_j(j1, j2, j3, m1, m2, m3) - racah_3j(j1, j2, j3, m1, m2, m3)).abs());
                    }
                }
            }
        }
    }
    assert!(worst < 1e-14, "worst deviation {worst:e}");
}

#[test]
fn frozen_values() {
    // exact rationals under the square root
    assert!((three_j(2, 2, 2, 2, 0, -2) + (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
    assert!((three_j(4, 4, 4, 0, 0, 0) + (2.0f64 / 35.0).sqrt()).abs() < 1e-15);
    assert!((six_j(2, 2, 2, 2, 2, 2) - 1.0 / 6.0).abs() < 1e-15);
    assert!((six_j(1, 1, 2, 1, 1, 2) - 1.0 / 6.0).abs() < 1e-15);
    assert!((nine_j(1, 1, 2, 1, 1, 2, 2, 2, 4) - 1.0 / 9.0).abs() < 1e-15);
}

#[test]
fn three_j_orthogonality() {
    let worst = three_j_orthogonality_residual(8);
    assert!(worst < 1e-13, "worst residual {worst:e}");
}

#[test]
fn six_j_biedenharn_elliott() {
    let (worst, checked) = biedenharn_elliott_residual(6);
    assert!(checked > 10_000, "only {checked} cases");
    assert!(worst < 1e-12, "worst residual {worst:e} over {checked} cases");
}

#[test]
fn nine_j_matches_projection_sum() {
    let worst = nine_j_residual(4, 400, 9);
    assert!(worst < 1e-12, "worst residual {worst:e}");
}

#[test]
fn large_arguments_are_finite() {
    for two_j in [100, 200] {
        let e = three_j_closed_form_error(two_j);
        assert!(e <= 1e-10, "2j={two_j}: {e:e}");
    }
    assert!(large_symbols_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn three_j_column_permutations(j1 in 0i32..=6, j2 in 0i32..=6, j3 in 0i32..=6, m1s in 0i32..=6, m2s in 0i32..=6) {
        prop_assume!(triangle(j1, j2, j3));
        let m1 = 2 * (m1s % (j1 + 1)) - j1;
        let m2 = 2 * (m2s % (j2 + 1)) - j2;
        let m3 = -m1 - m2;
        prop_assume!(m3.abs() <= j3);
        let v = three_j(j1, j2, j3, m1, m2, m3);
        let odd = sign((j1 + j2 + j3) / 2);
        prop_assert!((three_j(j2, j3, j1, m2, m3, m1) - v).abs() < 1e-15);
        prop_assert!((three_j(j3, j1, j2, m3, m1, m2) - v).abs() < 1e-15);
        prop_assert!((three_j(j2, j1, j3, m2, m1, m3) - odd * v).abs() < 1e-15);
        prop_assert!((three_j(j1, j3, j2, m1, m3, m2) - odd * v).abs() < 1e-15);
        prop_assert!((three_j(j1, j2, j3, -m1, -m2, -m3) - odd * v).abs() < 1e-15);
    }

    #[test]
    fn harmonic_conjugation(k in 0i32..=6, n in 0i32..=12, theta in 0.0f64..PI, phi in 0.0f64..TAU) {
        let n = 2 * (n % (2 * k + 1)) - 2 * k;
        let k = 2 * k;
        let lhs = spherical_y(k, n, theta, phi).conj();
        let rhs = spherical_y(k, -n, theta, phi) * sign(n / 2);
        prop_assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn rotation_matrices_compose(seed in any::<u64>(), j in 0i32..=2) {
        // integer ranks only: half-integer D matrices compose up to a sign
        let two_j = 2 * j;
        let mut r = rng(seed);
        let mut euler = || EulerAngles::new(r.gen_range(0.0..TAU), r.gen_range(0.0..PI), r.gen_range(0.0..TAU));
        let (r1, r2) = (euler(), euler());
        let r12 = r1.compose(&r2);
        let d = |rot: &EulerAngles, a: i32, b: i32| wigner_d(two_j, a, b, rot.alpha, rot.beta, rot.gamma);
        for a in (-two_j..=two_j).step_by(2) {
            let mut norm = 0.0;
            for b in (-two_j..=two_j).step_by(2) {
                let mut s = Complex64::new(0.0, 0.0);
                for c in (-two_j..=two_j).step_by(2) {
                    s += d(&r1, a, c) * d(&r2, c, b);
                }
                prop_assert!((s - d(&r12, a, b)).norm() < 1e-12);
                norm += d(&r1, a, b).norm_sqr();
            }
            prop_assert!((norm - 1.0).abs() < 1e-13);
        }
    }
}
