//! Experiment-ready observables: photoelectron and Auger-electron angular
//! distributions, the alignment of a photoion and the photo-Auger angular
//! correlation.
//!
//! Distributions of unpolarized atoms are axially symmetric about the photon
//! beam and are reported as Legendre coefficients in `cos theta`, with theta
//! measured from the beam.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::amplitudes::ReducedAmplitudeTable;
use crate::angular::{legendre_p, Direction};
use crate::processes::coeff::{self, AugerRanks, IonizationRanks};
use crate::processes::geometry;
use crate::processes::spec::{
    absorbed_helicities, resolve_auger, resolve_photoionization, AugerSystem, ParticleSpec, PhotoionizationSystem,
};
use crate::processes::{
    compose_two_step, AugerExpansion, MultipoleDistribution, PhotoionizationExpansion, ProcessError, ProcessKind,
    ProcessSpec, Role,
};
use crate::tensors::PolarizationKind;

/// Relative size below which a monopole counts as vanishing.
const DEGENERATE: f64 = 1e-300;
/// Non-axial multipoles tolerated relative to the monopole.
const AXIAL_TOL: f64 = 1e-12;

/// Angle where `P2(cos theta)` vanishes, in degrees.
pub fn magic_angle_deg() -> f64 {
    (1.0 / 3f64.sqrt()).acos().to_degrees()
}

/// `W(theta) = sigma / 4pi * sum_K c_K P_K(cos theta)` with `c_0 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct AngularDistribution {
    /// Legendre coefficients normalized to the monopole; keys are plain ranks.
    pub coefficients: BTreeMap<u32, f64>,
    /// Angle-integrated value.
    pub sigma: f64,
}

impl AngularDistribution {
    /// Builds from raw Legendre coefficients `a_K` of `W(theta)`.
    pub fn from_legendre(raw: &BTreeMap<u32, f64>) -> Result<Self, ProcessError> {
        let a0 = raw.get(&0).copied().unwrap_or(0.0);
        let scale = raw.values().fold(0.0f64, |m, v| m.max(v.abs()));
        if a0.abs() <= DEGENERATE || a0.abs() <= 1e-14 * scale {
            return Err(ProcessError::Domain("degenerate distribution: vanishing monopole".into()));
        }
        let coefficients = raw.iter().map(|(&k, &v)| (k, v / a0)).collect();
        Ok(AngularDistribution { coefficients, sigma: 4.0 * PI * a0 })
    }

    pub fn coefficient(&self, k: u32) -> f64 {
        self.coefficients.get(&k).copied().unwrap_or(0.0)
    }

    /// Anisotropy in the `1 + beta P2` form.
    pub fn beta(&self) -> f64 {
        self.coefficient(2)
    }

    /// Anisotropy in the `1 - beta/2 P2` form customary for circularly
    /// polarized or unpolarized light.
    pub fn beta_circular(&self) -> f64 {
        -2.0 * self.coefficient(2)
    }

    pub fn value(&self, theta_deg: f64) -> f64 {
        let x = theta_deg.to_radians().cos();
        let s: f64 = self.coefficients.iter().map(|(&k, &c)| c * legendre_p(k, x)).sum();
        self.sigma / (4.0 * PI) * s
    }

    /// `(theta, W)` from 0 to 180 degrees inclusive.
    pub fn sampled(&self, step_deg: f64) -> Vec<(f64, f64)> {
        let n = (180.0 / step_deg).round() as usize;
        (0..=n).map(|i| i as f64 * 180.0 / n as f64).map(|t| (t, self.value(t))).collect()
    }

    /// Smallest value on the 1 degree grid relative to the isotropic value.
    pub fn min_relative(&self) -> f64 {
        let iso = self.sigma / (4.0 * PI);
        self.sampled(1.0).iter().map(|p| p.1 / iso).fold(f64::INFINITY, f64::min)
    }
}

fn require_unpolarized(p: &ParticleSpec, what: &str) -> Result<(), ProcessError> {
    if p.polarization.kind != PolarizationKind::Unpolarized {
        return Err(ProcessError::Domain(format!("{what} must be unpolarized for this observable")));
    }
    Ok(())
}

fn plain(two_k: i32) -> u32 {
    (two_k / 2) as u32
}

/// Raw Legendre coefficients of the photoelectron distribution of an
/// unpolarized atom, theta measured from the photon beam. The ion state and
/// the electron spin are summed.
pub fn photoelectron_legendre(sys: &PhotoionizationSystem, photon: &ParticleSpec) -> BTreeMap<u32, f64> {
    let ks: Vec<i32> = {
        let mut v: Vec<i32> = sys.amplitudes.iter().map(|a| a.amp.two_k).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let lmax = sys.channels.iter().map(|c| c.wave.two_lambda).max().unwrap_or(0);
    let z = Direction::z();
    let mut out = BTreeMap::new();
    for big_k in (0..=2 * lmax).step_by(2) {
        let mut a = Complex64::new(0.0, 0.0);
        for (q, wq) in absorbed_helicities(photon) {
            for &k in &ks {
                for &kp in &ks {
                    let r = IonizationRanks {
                        k0: 0,
                        kr: big_k,
                        k: big_k,
                        k1: 0,
                        kj: big_k,
                        kl: big_k,
                        ks: 0,
                        mk: k,
                        mkp: kp,
                    };
                    let b = coeff::photoionization(sys, q, r);
                    if b == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    // photon tensor along the beam times sqrt(4pi) Y_K0 = sqrt(2K+1) P_K
                    let t = geometry::photon(k, kp, q, Some(&z)).get(big_k, 0);
                    a += b * t * wq * f64::from(big_k + 1).sqrt();
                }
            }
        }
        out.insert(plain(big_k), a.re * PI / f64::from(sys.two_j0 + 1));
    }
    out
}

/// Photoelectron angular distribution of an unpolarized atom for the photon
/// of a photoionization spec.
pub fn photoelectron_distribution(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<AngularDistribution, ProcessError> {
    if spec.kind != ProcessKind::Photoionization {
        return Err(ProcessError::Spec(format!("expected a photoionization spec, got {}", spec.kind.as_str())));
    }
    spec.validate()?;
    require_unpolarized(&spec.particle(Role::Target), "the atom")?;
    let (sys, _) = resolve_photoionization(spec, table)?;
    AngularDistribution::from_legendre(&photoelectron_legendre(&sys, &spec.particle(Role::PhotonIn)))
}

/// Dipole anisotropy for circularly polarized light from the ratio of the
/// rank-2 and rank-0 photoionization coefficients, in the `1 - beta/2 P2` form.
pub fn dipole_beta_ratio(sys: &PhotoionizationSystem) -> Result<f64, ProcessError> {
    let r = |k: i32| IonizationRanks { k0: 0, kr: k, k, k1: 0, kj: k, kl: k, ks: 0, mk: 2, mkp: 2 };
    let b0 = coeff::photoionization(sys, 2, r(0));
    let b2 = coeff::photoionization(sys, 2, r(4));
    if b0.norm() <= DEGENERATE {
        return Err(ProcessError::Domain("degenerate distribution: vanishing dipole monopole".into()));
    }
    Ok(-5.0 * 2f64.sqrt() * (b2 / b0).re)
}

/// `A(K, 0, K, 0, K)`: the Auger coefficient surviving for a summed final ion
/// and undetected spin.
fn auger_rank(sys: &AugerSystem, two_k: i32) -> Complex64 {
    coeff::auger(sys, AugerRanks { k1: two_k, k2: 0, kl: two_k, ks: 0, kp: two_k })
}

fn axial_components(first: &MultipoleDistribution) -> Result<BTreeMap<i32, Complex64>, ProcessError> {
    let mono = first.component(0, 0).norm();
    let mut out = BTreeMap::new();
    for (idx, v) in first.components() {
        let (k, n) = (idx.k.twice(), idx.n.twice());
        if n != 0 {
            if v.norm() > AXIAL_TOL * mono {
                return Err(ProcessError::Domain("multipoles are not axially symmetric about the beam".into()));
            }
            continue;
        }
        out.insert(k, v);
    }
    Ok(out)
}

/// Alignment `A2 = sqrt(5) rho_20 / rho_00` of a level; the Auger anisotropy
/// is `A(2,0,2,0,2) / A(0,0,0,0,0)` times this value.
pub fn alignment_a2(first: &MultipoleDistribution) -> Result<f64, ProcessError> {
    let m = first.component(0, 0);
    if m.norm() <= DEGENERATE {
        return Err(ProcessError::Domain("alignment of a level with vanishing population".into()));
    }
    if first.two_j < 2 {
        return Ok(0.0);
    }
    Ok((5f64.sqrt() * first.component(4, 0) / m).re)
}

/// Raw Legendre coefficients of the Auger-electron distribution for a
/// decaying level with axially symmetric multipoles.
pub fn auger_legendre(first: &MultipoleDistribution, sys: &AugerSystem) -> Result<BTreeMap<u32, f64>, ProcessError> {
    if first.two_j != sys.two_j1 {
        return Err(ProcessError::Domain(format!(
            "multipoles of 2J={} cannot feed a decay of 2J={}",
            first.two_j, sys.two_j1
        )));
    }
    let mut out = BTreeMap::new();
    for (k, rho) in axial_components(first)? {
        let a = rho * auger_rank(sys, k) * f64::from(k + 1).sqrt();
        out.insert(plain(k), a.re);
    }
    Ok(out)
}

/// Auger-electron angular distribution from the multipoles of the decaying
/// level; the final ion and the electron spin are summed.
pub fn auger_distribution(
    first: &MultipoleDistribution,
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<AngularDistribution, ProcessError> {
    if spec.kind != ProcessKind::Auger {
        return Err(ProcessError::Spec(format!("expected an auger spec, got {}", spec.kind.as_str())));
    }
    spec.validate()?;
    let (sys, _) = resolve_auger(spec, table)?;
    AngularDistribution::from_legendre(&auger_legendre(first, &sys)?)
}

/// `A(2,0,2,0,2) / A(0,0,0,0,0)`: Auger anisotropy per unit alignment.
pub fn auger_anisotropy_ratio(sys: &AugerSystem) -> Result<f64, ProcessError> {
    let a0 = auger_rank(sys, 0);
    if a0.norm() <= DEGENERATE {
        return Err(ProcessError::Domain("vanishing Auger rate".into()));
    }
    Ok((auger_rank(sys, 4) / a0).re)
}

/// Double-differential photoelectron/Auger-electron correlation for an
/// unpolarized atom, both electrons detected in the directions of the specs.
pub fn photo_auger_correlation(
    photo: &ProcessSpec,
    auger: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<f64, ProcessError> {
    if photo.kind != ProcessKind::Photoionization || auger.kind != ProcessKind::Auger {
        return Err(ProcessError::Spec("the correlation needs a photoionization and an auger spec".into()));
    }
    photo.validate()?;
    auger.validate()?;
    require_unpolarized(&photo.particle(Role::Target), "the atom")?;
    for (s, role) in [(photo, Role::ElectronOut), (auger, Role::ElectronOut)] {
        if !s.particle(role).detected {
            return Err(ProcessError::Spec("both electrons must be detected".into()));
        }
    }
    let (pi, _) = resolve_photoionization(photo, table)?;
    let (au, _) = resolve_auger(auger, table)?;
    let first = PhotoionizationExpansion::new(pi).multipoles(photo);
    compose_two_step(&first, &AugerExpansion::new(au).response(auger))
}
