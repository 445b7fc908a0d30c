//! Angular-momentum algebra: 3j/6j/9j symbols, Clebsch-Gordan coefficients,
//! spherical harmonics, Legendre polynomials and Wigner rotation matrices.
//!
//! Angular momenta are stored as doubled integers everywhere. The raw
//! functions in [`symbols`] and [`rotation`] take doubled `i32` arguments and
//! skip validation; the typed functions here validate and return errors.

mod exact;
pub mod rotation;
pub mod symbols;

use std::fmt;

use num_complex::Complex;
use thiserror::Error;

use crate::Real;

pub use rotation::{gauss_legendre, legendre_p, small_d, spherical_y, wigner_d};
pub use symbols::{cache_sizes, clear_caches, clebsch_gordan, nine_j, six_j, three_j, triangle};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AngularError {
    #[error("projection 2m={two_m} does not match angular momentum 2j={two_j}")]
    ParityMismatch { two_j: i32, two_m: i32 },
    #[error("projection 2m={two_m} outside range of 2j={two_j}")]
    ProjectionOutOfRange { two_j: i32, two_m: i32 },
    #[error("negative angular momentum magnitude 2j={0}")]
    NegativeMagnitude(i32),
    #[error("rank 2k={0} is not an integer")]
    NonIntegerRank(i32),
    #[error("argument {0} outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("polar angle {0} outside [0, pi]")]
    PolarAngle(f64),
}

/// Integer or half-integer angular momentum (or projection) stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AngularMomentum(i32);

impl AngularMomentum {
    pub const ZERO: AngularMomentum = AngularMomentum(0);
    pub const HALF: AngularMomentum = AngularMomentum(1);

    pub const fn from_twice(twice_value: i32) -> Self {
        AngularMomentum(twice_value)
    }

    pub const fn integer(n: i32) -> Self {
        AngularMomentum(2 * n)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Multiplicity `2j + 1`.
    pub fn dim(self) -> i32 {
        self.0 + 1
    }

    /// All projections `-j..=j` in unit steps.
    pub fn projections(self) -> impl Iterator<Item = AngularMomentum> {
        (-self.0..=self.0).step_by(2).map(AngularMomentum)
    }

    fn check_magnitude(self) -> Result<(), AngularError> {
        if self.0 < 0 {
            Err(AngularError::NegativeMagnitude(self.0))
        } else {
            Ok(())
        }
    }

    fn check_projection(self, m: AngularMomentum) -> Result<(), AngularError> {
        self.check_magnitude()?;
        if (self.0 - m.0) % 2 != 0 {
            return Err(AngularError::ParityMismatch { two_j: self.0, two_m: m.0 });
        }
        Ok(())
    }
}

impl std::ops::Neg for AngularMomentum {
    type Output = AngularMomentum;
    fn neg(self) -> Self {
        AngularMomentum(-self.0)
    }
}

impl fmt::Display for AngularMomentum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Polar direction `(theta, phi)` in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction<T = f64> {
    theta: T,
    phi: T,
}

impl<T: Real> Direction<T> {
    /// Normalizes `phi` into `[0, 2pi)` and to zero at the poles.
    pub fn new(theta: T, phi: T) -> Result<Self, AngularError> {
        let eps = T::from_f64(1e-12).unwrap();
        if !(theta >= -eps && theta <= T::PI() + eps) {
            return Err(AngularError::PolarAngle(theta.to_f64().unwrap_or(f64::NAN)));
        }
        let theta = theta.max(T::zero()).min(T::PI());
        let two_pi = T::PI() + T::PI();
        let mut phi = phi % two_pi;
        if phi < T::zero() {
            phi = phi + two_pi;
        }
        if phi >= two_pi {
            phi = T::zero();
        }
        if theta == T::zero() || theta == T::PI() {
            phi = T::zero();
        }
        Ok(Direction { theta, phi })
    }

    pub fn z() -> Self {
        Direction { theta: T::zero(), phi: T::zero() }
    }

    pub fn from_degrees(theta: T, phi: T) -> Result<Self, AngularError> {
        Self::new(theta.to_radians(), phi.to_radians())
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn to_vector(&self) -> [T; 3] {
        let s = self.theta.sin();
        [s * self.phi.cos(), s * self.phi.sin(), self.theta.cos()]
    }

    pub fn from_vector(v: [T; 3]) -> Self {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        let c = (v[2] / r).max(-T::one()).min(T::one());
        let theta = c.acos();
        let phi = v[1].atan2(v[0]);
        Self::new(theta, phi).expect("acos lies in [0, pi]")
    }

    /// Rotation `(phi, theta, 0)` carrying the z axis onto this direction.
    pub fn to_euler(&self) -> EulerAngles<T> {
        EulerAngles { alpha: self.phi, beta: self.theta, gamma: T::zero() }
    }

    pub fn rotated(&self, rot: &EulerAngles<T>) -> Self {
        Self::from_vector(rot.apply(self.to_vector()))
    }
}

/// Euler angles in the z-y-z convention, radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerAngles<T = f64> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

impl<T: Real> EulerAngles<T> {
    pub fn identity() -> Self {
        EulerAngles { alpha: T::zero(), beta: T::zero(), gamma: T::zero() }
    }

    pub fn new(alpha: T, beta: T, gamma: T) -> Self {
        EulerAngles { alpha, beta, gamma }
    }

    /// Active rotation matrix `Rz(alpha) Ry(beta) Rz(gamma)`.
    pub fn matrix(&self) -> [[T; 3]; 3] {
        let (sa, ca) = self.alpha.sin_cos();
        let (sb, cb) = self.beta.sin_cos();
        let (sg, cg) = self.gamma.sin_cos();
        [
            [ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb],
            [sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb],
            [-sb * cg, sb * sg, cb],
        ]
    }

    pub fn from_matrix(r: [[T; 3]; 3]) -> Self {
        let cb = r[2][2].max(-T::one()).min(T::one());
        let beta = cb.acos();
        let eps = T::from_f64(1e-12).unwrap();
        if beta.sin().abs() > eps {
            EulerAngles { alpha: r[1][2].atan2(r[0][2]), beta, gamma: r[2][1].atan2(-r[2][0]) }
        } else if cb > T::zero() {
            EulerAngles { alpha: r[1][0].atan2(r[0][0]), beta: T::zero(), gamma: T::zero() }
        } else {
            EulerAngles { alpha: (-r[1][0]).atan2(-r[0][0]), beta: T::PI(), gamma: T::zero() }
        }
    }

    pub fn apply(&self, v: [T; 3]) -> [T; 3] {
        let r = self.matrix();
        let mut out = [T::zero(); 3];
        for i in 0..3 {
            out[i] = r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
        }
        out
    }

    /// Rotation matrix product `R(self) R(other)`.
    pub fn compose(&self, other: &Self) -> Self {
        let a = self.matrix();
        let b = other.matrix();
        let mut c = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for k in 0..3 {
                c[i][k] = a[i][0] * b[0][k] + a[i][1] * b[1][k] + a[i][2] * b[2][k];
            }
        }
        Self::from_matrix(c)
    }
}

fn real<T: Real>(v: f64) -> T {
    T::from_f64(v).unwrap()
}

/// Wigner 3j symbol. Returns zero when triangle or projection rules fail.
pub fn wigner_3j<T: Real>(
    j1: AngularMomentum,
    j2: AngularMomentum,
    j3: AngularMomentum,
    m1: AngularMomentum,
    m2: AngularMomentum,
    m3: AngularMomentum,
) -> Result<T, AngularError> {
    j1.check_projection(m1)?;
    j2.check_projection(m2)?;
    j3.check_projection(m3)?;
    Ok(real(three_j(j1.0, j2.0, j3.0, m1.0, m2.0, m3.0)))
}

/// Clebsch-Gordan coefficient `<j1 m1 j2 m2 | J M>`.
pub fn clebsch_gordan_coefficient<T: Real>(
    j1: AngularMomentum,
    m1: AngularMomentum,
    j2: AngularMomentum,
    m2: AngularMomentum,
    j: AngularMomentum,
    m: AngularMomentum,
) -> Result<T, AngularError> {
    j1.check_projection(m1)?;
    j2.check_projection(m2)?;
    j.check_projection(m)?;
    Ok(real(clebsch_gordan(j1.0, m1.0, j2.0, m2.0, j.0, m.0)))
}

/// Wigner 6j symbol `{j1 j2 j3; j4 j5 j6}`.
pub fn wigner_6j<T: Real>(j: [AngularMomentum; 6]) -> Result<T, AngularError> {
    for x in j {
        x.check_magnitude()?;
    }
    Ok(real(six_j(j[0].0, j[1].0, j[2].0, j[3].0, j[4].0, j[5].0)))
}

/// Wigner 9j symbol, row-major.
pub fn wigner_9j<T: Real>(j: [AngularMomentum; 9]) -> Result<T, AngularError> {
    for x in j {
        x.check_magnitude()?;
    }
    Ok(real(nine_j(j[0].0, j[1].0, j[2].0, j[3].0, j[4].0, j[5].0, j[6].0, j[7].0, j[8].0)))
}

/// Spherical harmonic `Y_{KN}` with Condon-Shortley phase.
pub fn spherical_harmonic<T: Real>(
    k: AngularMomentum,
    n: AngularMomentum,
    dir: &Direction<T>,
) -> Result<Complex<T>, AngularError> {
    if !k.is_integer() {
        return Err(AngularError::NonIntegerRank(k.0));
    }
    k.check_projection(n)?;
    if n.0.abs() > k.0 {
        return Err(AngularError::ProjectionOutOfRange { two_j: k.0, two_m: n.0 });
    }
    Ok(spherical_y(k.0, n.0, dir.theta, dir.phi))
}

/// Legendre polynomial `P_K(x)`.
pub fn legendre<T: Real>(k: u32, x: T) -> Result<T, AngularError> {
    if x.abs() > T::one() {
        return Err(AngularError::OutOfDomain(x.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(legendre_p(k, x))
}

/// Wigner rotation matrix element `D^J_{M'M}(rot)`.
pub fn wigner_rotation<T: Real>(
    j: AngularMomentum,
    m_row: AngularMomentum,
    m_col: AngularMomentum,
    rot: &EulerAngles<T>,
) -> Result<Complex<T>, AngularError> {
    j.check_projection(m_row)?;
    j.check_projection(m_col)?;
    for m in [m_row, m_col] {
        if m.0.abs() > j.0 {
            return Err(AngularError::ProjectionOutOfRange { two_j: j.0, two_m: m.0 });
        }
    }
    Ok(wigner_d(j.0, m_row.0, m_col.0, rot.alpha, rot.beta, rot.gamma))
}
