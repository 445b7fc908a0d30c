//! Differential cross-sections and probabilities of the eight processes,
//! evaluated through state-multipole expansions, and the composition of
//! multi-step cascades.
//!
//! Every expansion is built once per resolved system (all angular
//! coefficients precomputed) and then evaluated for any number of
//! geometries. The spec-level functions below resolve the amplitudes,
//! build the expansion and evaluate a single geometry.

pub mod coeff;
pub mod decay;
pub mod geometry;
pub mod impact;
pub mod multipoles;
pub mod photo;
pub mod spec;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::amplitudes::ReducedAmplitudeTable;
use crate::tensors::PolarizationState;

pub use decay::{AugerExpansion, EmissionExpansion};
pub use impact::{impact_constant, IonizingExpansion, ScatteringExpansion};
pub use multipoles::{
    compose_chain, compose_two_step, ChainStep, MultipoleDistribution, MultipoleResponse, MultipoleTransfer,
};
pub use photo::{PhotoexcitationExpansion, PhotoionizationExpansion};
pub use spec::{Observation, ParticleSpec, ProcessError, ProcessKind, ProcessSpec, Resonance, Role, Warning};

use multipoles::Weighted;
use spec::{electron_momentum, recombination_photon_energy};

fn observed(value: f64, warnings: Vec<Warning>) -> Observation {
    Observation { value, warnings }
}

fn expect_kind(spec: &ProcessSpec, kind: ProcessKind) -> Result<(), ProcessError> {
    spec.validate()?;
    if spec.kind != kind {
        return Err(ProcessError::Spec(format!("expected a {} spec, got {}", kind.as_str(), spec.kind.as_str())));
    }
    Ok(())
}

/// Multipoles of a level prepared with the given polarization, normalized
/// to unit population.
pub fn level_multipoles(two_j: i32, polarization: &PolarizationState) -> MultipoleDistribution {
    let p = ParticleSpec { polarization: *polarization, ..ParticleSpec::default() };
    let t = geometry::prepared(two_j, &p);
    let mut w = Weighted::zeros(2 * two_j);
    for (k, n, v) in t.iter() {
        if v != Complex64::new(0.0, 0.0) {
            w.add(k, n, v * (f64::from(two_j + 1) / f64::from(k + 1)).sqrt());
        }
    }
    MultipoleDistribution::new(two_j, w)
}

pub fn xsec_photoexcitation(spec: &ProcessSpec, table: &ReducedAmplitudeTable) -> Result<Observation, ProcessError> {
    expect_kind(spec, ProcessKind::Photoexcitation)?;
    let (sys, w) = spec::resolve_photoexcitation(spec, table)?;
    Ok(observed(PhotoexcitationExpansion::new(sys).cross_section(spec)?, w))
}

pub fn multipole_photoexcitation(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<(MultipoleDistribution, Vec<Warning>), ProcessError> {
    expect_kind(spec, ProcessKind::Photoexcitation)?;
    let (sys, w) = spec::resolve_photoexcitation(spec, table)?;
    Ok((PhotoexcitationExpansion::new(sys).multipoles(spec), w))
}

pub fn xsec_photoionization(spec: &ProcessSpec, table: &ReducedAmplitudeTable) -> Result<Observation, ProcessError> {
    expect_kind(spec, ProcessKind::Photoionization)?;
    let (sys, w) = spec::resolve_photoionization(spec, table)?;
    Ok(observed(PhotoionizationExpansion::new(sys).cross_section(spec)?, w))
}

pub fn multipole_photoionization(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<(MultipoleDistribution, Vec<Warning>), ProcessError> {
    expect_kind(spec, ProcessKind::Photoionization)?;
    let (sys, w) = spec::resolve_photoionization(spec, table)?;
    Ok((PhotoionizationExpansion::new(sys).multipoles(spec), w))
}

pub fn xsec_e_excitation(spec: &ProcessSpec, table: &ReducedAmplitudeTable) -> Result<Observation, ProcessError> {
    expect_kind(spec, ProcessKind::EExcitation)?;
    let sys = spec::resolve_scattering(spec, table)?;
    Ok(observed(ScatteringExpansion::new(sys).cross_section(spec)?, Vec::new()))
}

pub fn xsec_e_ionization(spec: &ProcessSpec, table: &ReducedAmplitudeTable) -> Result<Observation, ProcessError> {
    expect_kind(spec, ProcessKind::EIonization)?;
    let sys = spec::resolve_ionizing(spec, table)?;
    Ok(observed(IonizingExpansion::new(sys).cross_section(spec)?, Vec::new()))
}

pub fn xsec_radiative_recombination(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<Observation, ProcessError> {
    expect_kind(spec, ProcessKind::RadRecombination)?;
    let e1 = recombination_photon_energy(spec, table)?;
    let e0 = spec.electron_energy.unwrap_or_default();
    let (sys, w) = spec::resolve_recombination(spec, table)?;
    Ok(observed(PhotoionizationExpansion::new(sys).recombination(spec, e1, e0)?, w))
}

/// Photon emission probability of a level with multipoles `input`.
pub fn prob_radiative_decay(
    input: &MultipoleDistribution,
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<Observation, ProcessError> {
    expect_kind(spec, ProcessKind::RadDecay)?;
    let (sys, w) = spec::resolve_emission(spec, table)?;
    let r = EmissionExpansion::new(sys).response(spec);
    Ok(observed(compose_two_step(input, &r)?, w))
}

/// Auger emission probability of a level with multipoles `input`.
pub fn prob_auger(
    input: &MultipoleDistribution,
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<Observation, ProcessError> {
    expect_kind(spec, ProcessKind::Auger)?;
    let (sys, w) = spec::resolve_auger(spec, table)?;
    let r = AugerExpansion::new(sys).response(spec);
    Ok(observed(compose_two_step(input, &r)?, w))
}

/// Lorentzian resonance factor `1 / ((E - E_res)^2 + Gamma^2/4)`.
pub fn resonance_profile(energy: f64, res: &Resonance) -> Result<f64, ProcessError> {
    if res.width <= 0.0 {
        return Err(ProcessError::Domain(format!("resonance width {} must be positive", res.width)));
    }
    Ok(1.0 / ((energy - res.energy).powi(2) + res.width * res.width / 4.0))
}

pub fn xsec_dielectronic_recombination(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<Observation, ProcessError> {
    expect_kind(spec, ProcessKind::DielectronicRecombination)?;
    let e0 = spec.electron_energy.ok_or_else(|| ProcessError::Spec("electron_energy missing".into()))?;
    if e0 <= 0.0 {
        return Err(ProcessError::Domain(format!("electron energy {e0} must be positive")));
    }
    let res = spec.resonance.ok_or_else(|| ProcessError::Spec("resonance missing".into()))?;
    let lorentz = resonance_profile(e0, &res)?;
    let (sys, w) = spec::resolve_dielectronic(spec, table)?;
    let captured = AugerExpansion::new(sys.capture).capture(spec);
    let r = EmissionExpansion::new(sys.emission).response(spec);
    let p0 = electron_momentum(e0);
    Ok(observed(compose_two_step(&captured, &r)? * 2.0 * PI / (p0 * p0) * lorentz, w))
}

/// Multipoles handed on by the first step of a cascade.
pub fn first_step_multipoles(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<(MultipoleDistribution, Vec<Warning>), ProcessError> {
    match spec.kind {
        ProcessKind::Photoexcitation => multipole_photoexcitation(spec, table),
        ProcessKind::Photoionization => multipole_photoionization(spec, table),
        k => Err(ProcessError::Spec(format!("{} cannot start a cascade", k.as_str()))),
    }
}

fn decay_link(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
    last: bool,
) -> Result<(ChainStep, Vec<Warning>), ProcessError> {
    spec.validate()?;
    match spec.kind {
        ProcessKind::Auger => {
            let (sys, w) = spec::resolve_auger(spec, table)?;
            let e = AugerExpansion::new(sys);
            Ok((if last { ChainStep::Response(e.response(spec)) } else { ChainStep::Transfer(e.transfer(spec)) }, w))
        }
        ProcessKind::RadDecay => {
            let (sys, w) = spec::resolve_emission(spec, table)?;
            let e = EmissionExpansion::new(sys);
            Ok((if last { ChainStep::Response(e.response(spec)) } else { ChainStep::Transfer(e.transfer(spec)) }, w))
        }
        k => Err(ProcessError::Spec(format!("{} is not a decay step", k.as_str()))),
    }
}

/// Cascade observable: a photoabsorption step followed by decays, each step
/// described by its own spec.
pub fn xsec_cascade(specs: &[ProcessSpec], table: &ReducedAmplitudeTable) -> Result<Observation, ProcessError> {
    if specs.len() < 2 {
        return Err(ProcessError::Domain(format!("a cascade needs at least two steps, got {}", specs.len())));
    }
    let (first, mut warnings) = first_step_multipoles(&specs[0], table)?;
    let mut steps = vec![ChainStep::Distribution(first)];
    for (i, s) in specs[1..].iter().enumerate() {
        let (link, w) = decay_link(s, table, i + 2 == specs.len())?;
        warnings.extend(w);
        steps.push(link);
    }
    Ok(observed(compose_chain(&steps)?, warnings))
}

/// Decay of a level prepared as described by the spec's target particle.
pub fn prob_decay_of_level(spec: &ProcessSpec, table: &ReducedAmplitudeTable) -> Result<Observation, ProcessError> {
    let level = match spec.kind {
        ProcessKind::Auger => spec::resolve_auger(spec, table)?.0.two_j1,
        ProcessKind::RadDecay => spec::resolve_emission(spec, table)?.0.two_j1,
        k => return Err(ProcessError::Spec(format!("{} is not a decay", k.as_str()))),
    };
    let input = level_multipoles(level, &spec.particle(Role::Target).polarization);
    match spec.kind {
        ProcessKind::Auger => prob_auger(&input, spec, table),
        _ => prob_radiative_decay(&input, spec, table),
    }
}

/// Single-step observable for any process kind.
pub fn evaluate(spec: &ProcessSpec, table: &ReducedAmplitudeTable) -> Result<Observation, ProcessError> {
    match spec.kind {
        ProcessKind::Photoexcitation => xsec_photoexcitation(spec, table),
        ProcessKind::Photoionization => xsec_photoionization(spec, table),
        ProcessKind::EExcitation => xsec_e_excitation(spec, table),
        ProcessKind::EIonization => xsec_e_ionization(spec, table),
        ProcessKind::RadRecombination => xsec_radiative_recombination(spec, table),
        ProcessKind::RadDecay | ProcessKind::Auger => prob_decay_of_level(spec, table),
        ProcessKind::DielectronicRecombination => xsec_dielectronic_recombination(spec, table),
    }
}

/// Photoexcitation coefficient for the spec's transition and photon helicity `two_q`.
pub fn coeff_photoexcitation(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
    two_q: i32,
    ranks: coeff::ExcitationRanks,
) -> Result<Complex64, ProcessError> {
    let (sys, _) = spec::resolve_photoexcitation(spec, table)?;
    Ok(coeff::photoexcitation(&sys, two_q, ranks))
}

pub fn coeff_photoionization(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
    two_q: i32,
    ranks: coeff::IonizationRanks,
) -> Result<Complex64, ProcessError> {
    let (sys, _) = spec::resolve_photoionization(spec, table)?;
    Ok(coeff::photoionization(&sys, two_q, ranks))
}

pub fn coeff_e_excitation(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
    ranks: coeff::ScatteringRanks,
) -> Result<Complex64, ProcessError> {
    Ok(coeff::scattering(&spec::resolve_scattering(spec, table)?, ranks))
}

pub fn coeff_e_ionization(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
    ranks: coeff::IonizingRanks,
) -> Result<Complex64, ProcessError> {
    Ok(coeff::ionizing(&spec::resolve_ionizing(spec, table)?, ranks))
}

pub fn coeff_auger(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
    ranks: coeff::AugerRanks,
) -> Result<Complex64, ProcessError> {
    Ok(coeff::auger(&spec::resolve_auger(spec, table)?.0, ranks))
}

pub fn coeff_radiative_decay(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
    ranks: coeff::EmissionRanks,
) -> Result<Complex64, ProcessError> {
    Ok(coeff::emission(&spec::resolve_emission(spec, table)?.0, ranks))
}
