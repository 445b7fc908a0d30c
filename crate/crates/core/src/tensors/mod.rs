//! Polarization tensors of atoms, electrons and photons.
//!
//! The bracket coupling the two angular momenta in every tensor is a
//! Clebsch-Gordan coefficient. With that normalization the sum over
//! projections of a state tensor is exactly `delta(K,0) delta(N,0)`.

use num_complex::Complex;

use crate::angular::{clebsch_gordan, spherical_y, wigner_d, AngularError, AngularMomentum, Direction, EulerAngles};
use crate::Real;

/// State-multipole index `(K, N)`; `K` is an integer rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateMultipoleIndex {
    pub k: AngularMomentum,
    pub n: AngularMomentum,
}

impl StateMultipoleIndex {
    pub fn new(k: AngularMomentum, n: AngularMomentum) -> Result<Self, AngularError> {
        if !k.is_integer() || !n.is_integer() {
            return Err(AngularError::NonIntegerRank(k.twice()));
        }
        if k.twice() < 0 {
            return Err(AngularError::NegativeMagnitude(k.twice()));
        }
        if n.twice().abs() > k.twice() {
            return Err(AngularError::ProjectionOutOfRange { two_j: k.twice(), two_m: n.twice() });
        }
        Ok(StateMultipoleIndex { k, n })
    }

    /// Index from plain integers `K`, `N`.
    pub fn from_ints(k: i32, n: i32) -> Result<Self, AngularError> {
        Self::new(AngularMomentum::integer(k), AngularMomentum::integer(n))
    }

    pub fn is_monopole(&self) -> bool {
        self.k.twice() == 0
    }
}

/// What is known about a particle's angular-momentum state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PolarizationKind {
    HelicityPlus,
    HelicityMinus,
    Unpolarized,
    /// Definite projection `2M` on the state's axis.
    Projection(AngularMomentum),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationState<T = f64> {
    pub kind: PolarizationKind,
    pub axis: Direction<T>,
}

impl<T: Real> PolarizationState<T> {
    pub fn unpolarized() -> Self {
        PolarizationState { kind: PolarizationKind::Unpolarized, axis: Direction::z() }
    }

    pub fn projection(two_m: i32, axis: Direction<T>) -> Self {
        PolarizationState { kind: PolarizationKind::Projection(AngularMomentum::from_twice(two_m)), axis }
    }

    pub fn helicity(sign: i32, axis: Direction<T>) -> Self {
        let kind = if sign > 0 { PolarizationKind::HelicityPlus } else { PolarizationKind::HelicityMinus };
        PolarizationState { kind, axis }
    }

    /// Doubled helicity `+-2` when definite.
    pub fn helicity_twice(&self) -> Option<i32> {
        match self.kind {
            PolarizationKind::HelicityPlus => Some(2),
            PolarizationKind::HelicityMinus => Some(-2),
            _ => None,
        }
    }
}

fn sign<T: Real>(odd: bool) -> T {
    if odd {
        -T::one()
    } else {
        T::one()
    }
}

/// `T*^K_N(J, J', M | axis)` on doubled arguments, no validation.
pub fn state_tensor_raw<T: Real>(j: i32, jp: i32, m: i32, k: i32, n: i32, axis: &Direction<T>) -> Complex<T> {
    if n.abs() > k || m.abs() > j.min(jp) {
        return Complex::new(T::zero(), T::zero());
    }
    let c = clebsch_gordan(j, m, jp, -m, k, 0);
    if c == 0.0 {
        return Complex::new(T::zero(), T::zero());
    }
    let four_pi = T::from_f64(4.0).unwrap() * T::PI();
    let pref = (four_pi / T::from_i32(j + 1).unwrap()).sqrt()
        * T::from_f64(c).unwrap()
        * sign::<T>(((jp - m) / 2).rem_euclid(2) == 1);
    spherical_y(k, n, axis.theta(), axis.phi()).conj() * pref
}

/// State tensor `T*^K_N(J, J', M | axis)`
/// `= (-1)^{J'-M} sqrt(4pi/(2J+1)) <J M J' -M | K 0> Y*_{KN}(axis)`.
///
/// The unstarred tensor is the complex conjugate. Ranks outside the
/// `(J, J')` triangle give zero.
pub fn state_tensor<T: Real>(
    j: AngularMomentum,
    jp: AngularMomentum,
    m: AngularMomentum,
    idx: StateMultipoleIndex,
    axis: &Direction<T>,
) -> Result<Complex<T>, AngularError> {
    if (j.twice() - m.twice()) % 2 != 0 || (jp.twice() - m.twice()) % 2 != 0 {
        return Err(AngularError::ParityMismatch { two_j: j.twice(), two_m: m.twice() });
    }
    if m.twice().abs() > j.twice().min(jp.twice()) {
        return Err(AngularError::ProjectionOutOfRange { two_j: j.twice().min(jp.twice()), two_m: m.twice() });
    }
    Ok(state_tensor_raw(j.twice(), jp.twice(), m.twice(), idx.k.twice(), idx.n.twice(), axis))
}

/// Two-projection tensor
/// `T^K_{NN'}(J, J', M, M' | rot) = (-1)^{J'-M'} sqrt((2K+1)/(2J+1)) <J M J' M' | K N'> D*^K_{NN'}(rot)`.
pub fn state_tensor_double<T: Real>(
    j: AngularMomentum,
    jp: AngularMomentum,
    m: AngularMomentum,
    mp: AngularMomentum,
    idx: StateMultipoleIndex,
    n_prime: AngularMomentum,
    rot: &EulerAngles<T>,
) -> Result<Complex<T>, AngularError> {
    for (a, b) in [(j, m), (jp, mp)] {
        if (a.twice() - b.twice()) % 2 != 0 {
            return Err(AngularError::ParityMismatch { two_j: a.twice(), two_m: b.twice() });
        }
        if b.twice().abs() > a.twice() {
            return Err(AngularError::ProjectionOutOfRange { two_j: a.twice(), two_m: b.twice() });
        }
    }
    let (k, n, np) = (idx.k.twice(), idx.n.twice(), n_prime.twice());
    if np.abs() > k {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let c = clebsch_gordan(j.twice(), m.twice(), jp.twice(), mp.twice(), k, np);
    let pref = (T::from_i32(k + 1).unwrap() / T::from_i32(j.twice() + 1).unwrap()).sqrt()
        * T::from_f64(c).unwrap()
        * sign::<T>(((jp.twice() - mp.twice()) / 2).rem_euclid(2) == 1);
    Ok(wigner_d(k, n, np, rot.alpha, rot.beta, rot.gamma).conj() * pref)
}

/// Photon tensor `T*^K_N(k, k', q | beam)` for helicity `q = +-1`.
///
/// Same kernel as [`state_tensor`] with `(J, J', M) -> (k, k', q)`.
pub fn photon_tensor<T: Real>(
    k: AngularMomentum,
    kp: AngularMomentum,
    q: AngularMomentum,
    idx: StateMultipoleIndex,
    beam: &Direction<T>,
) -> Result<Complex<T>, AngularError> {
    if q.twice().abs() != 2 {
        return Err(AngularError::ProjectionOutOfRange { two_j: 2, two_m: q.twice() });
    }
    state_tensor(k, kp, q, idx, beam)
}

/// Dipole tensor of unpolarized light, the helicity average of the unstarred
/// photon tensor: `(1/3) delta(K,0) + sqrt(4pi/3) <1 1 1 -1 | 2 0> Y_{2N}(beam) delta(K,2)`.
pub fn unpolarized_photon_tensor<T: Real>(idx: StateMultipoleIndex, beam: &Direction<T>) -> Complex<T> {
    let zero = Complex::new(T::zero(), T::zero());
    match idx.k.twice() {
        0 => Complex::new(T::one() / T::from_f64(3.0).unwrap(), T::zero()),
        4 => {
            let four_pi = T::from_f64(4.0).unwrap() * T::PI();
            let c = T::from_f64(clebsch_gordan(2, 2, 2, -2, 4, 0)).unwrap();
            spherical_y(4, idx.n.twice(), beam.theta(), beam.phi()) * ((four_pi / T::from_f64(3.0).unwrap()).sqrt() * c)
        }
        _ => zero,
    }
}

/// Spin tensor summed over projections: `delta(K,0) delta(N,0)`.
pub fn summed_spin_tensor<T: Real>(idx: StateMultipoleIndex) -> T {
    if idx.k.twice() == 0 && idx.n.twice() == 0 {
        T::one()
    } else {
        T::zero()
    }
}

/// Integral of `Y_{KN}` over the sphere: `sqrt(4pi) delta(K,0) delta(N,0)`.
pub fn integrated_harmonic<T: Real>(idx: StateMultipoleIndex) -> T {
    if idx.k.twice() == 0 && idx.n.twice() == 0 {
        (T::from_f64(4.0).unwrap() * T::PI()).sqrt()
    } else {
        T::zero()
    }
}

pub(crate) mod kernel {
    //! f64 tensor factors on doubled integers, used by the coefficient contractions.

    use super::state_tensor_raw;
    use crate::angular::{spherical_y, Direction};
    use crate::tensors::{PolarizationKind, PolarizationState};
    use crate::Complex64;

    const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

    fn delta(k: i32, n: i32) -> bool {
        k == 0 && n == 0
    }

    /// Tensor of a state that is prepared (averaged when unpolarized).
    pub fn prepared(two_j: i32, pol: &PolarizationState, k: i32, n: i32) -> Complex64 {
        match pol.kind {
            PolarizationKind::Projection(m) => state_tensor_raw(two_j, two_j, m.twice(), k, n, &pol.axis),
            _ => {
                if delta(k, n) {
                    Complex64::new(1.0 / f64::from(two_j + 1), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    /// Tensor of a state that is detected (summed when unpolarized).
    pub fn detected(two_j: i32, pol: &PolarizationState, k: i32, n: i32) -> Complex64 {
        match pol.kind {
            PolarizationKind::Projection(m) => state_tensor_raw(two_j, two_j, m.twice(), k, n, &pol.axis).conj(),
            _ => {
                if delta(k, n) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    /// `T*^K_N(k, k', q | axis)` for a definite doubled helicity `q`.
    pub fn photon(k: i32, kp: i32, q: i32, axis: &Direction, big_k: i32, n: i32) -> Complex64 {
        state_tensor_raw(k, kp, q, big_k, n, axis)
    }

    /// Direction integral of the photon tensor for a definite helicity.
    pub fn photon_integrated(k: i32, kp: i32, big_k: i32, n: i32) -> Complex64 {
        if delta(big_k, n) && k == kp {
            Complex64::new(FOUR_PI / f64::from(k + 1), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `sqrt(4pi) Y_{KN}(dir)`, or its sphere integral `4pi delta` when `dir` is `None`.
    pub fn harmonic(k: i32, n: i32, dir: Option<&Direction>) -> Complex64 {
        match dir {
            Some(d) => spherical_y(k, n, d.theta(), d.phi()) * FOUR_PI.sqrt(),
            None => {
                if delta(k, n) {
                    Complex64::new(FOUR_PI, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }
}
