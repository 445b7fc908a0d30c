//! Sum rules of the state and photon tensors.

mod common;

use common::identities::*;
use common::*;
use num_complex::Complex64;
use polarkit::angular::Direction;
use polarkit::tensors::{unpolarized_photon_tensor, StateMultipoleIndex};

#[test]
fn projection_sum_is_a_delta() {
    assert!(projection_sum_residual(&Direction::z()) < 1e-13);
    let mut rng = rng(48);
    for _ in 0..3 {
        let r = projection_sum_residual(&direction(&mut rng));
        assert!(r < 1e-13, "residual {r:e}");
    }
}

#[test]
fn harmonic_integral_by_quadrature() {
    let r = harmonic_integral_residual();
    assert!(r < 1e-12, "residual {r:e}");
}

#[test]
fn unpolarized_photon_is_the_helicity_average() {
    let mut rng = rng(50);
    assert!(helicity_average_residual(&Direction::z()) < 1e-14);
    for _ in 0..20 {
        let r = helicity_average_residual(&direction(&mut rng));
        assert!(r < 1e-14, "residual {r:e}");
    }
}

#[test]
fn unpolarized_photon_values() {
    let beam = Direction::z();
    let t = |k: i32, n: i32| -> Complex64 {
        unpolarized_photon_tensor(StateMultipoleIndex::from_ints(k, n).unwrap(), &beam)
    };
    assert!((t(0, 0) - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
    assert_eq!(t(1, 0), Complex64::new(0.0, 0.0));
    // sqrt(4pi/3) <1 1 1 -1|2 0> Y_20(z) = sqrt(4pi/3) sqrt(1/6) sqrt(5/4pi)
    let expect = (5.0f64 / 18.0).sqrt();
    assert!((t(2, 0).re - expect).abs() < 1e-15);
}
