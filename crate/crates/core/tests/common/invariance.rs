//! Rotation covariance and positivity probes over random systems.

use polarkit::angular::EulerAngles;
use polarkit::processes::spec::{ProcessKind, ProcessSpec, Role};
use polarkit::processes::{
    compose_two_step, AugerExpansion, IonizingExpansion, PhotoexcitationExpansion, PhotoionizationExpansion,
    ScatteringExpansion,
};
use rand::Rng;

use super::*;

type Observable = Box<dyn Fn(&[ProcessSpec]) -> f64>;

/// A random system of `family`, its observable and a random geometry.
fn draw(family: Family, rng: &mut TestRng) -> (Observable, Vec<ProcessSpec>) {
    match family {
        Family::Photoexcitation => {
            let sys = photoexcitation(rng);
            let g = geometry(rng, ProcessKind::Photoexcitation, sys.two_j0, sys.two_j1);
            let e = PhotoexcitationExpansion::new(sys);
            (Box::new(move |s| e.cross_section(&s[0]).unwrap()), vec![g])
        }
        Family::Photoionization => {
            let sys = photoionization(rng);
            let g = geometry(rng, ProcessKind::Photoionization, sys.two_j0, sys.two_j1);
            let e = PhotoionizationExpansion::new(sys);
            (Box::new(move |s| e.cross_section(&s[0]).unwrap()), vec![g])
        }
        Family::EExcitation => {
            let sys = scattering(rng);
            let g = geometry(rng, ProcessKind::EExcitation, sys.two_j0, sys.two_j1);
            let e = ScatteringExpansion::new(sys);
            (Box::new(move |s| e.cross_section(&s[0]).unwrap()), vec![g])
        }
        Family::EIonization => {
            let sys = ionizing(rng);
            let g = geometry(rng, ProcessKind::EIonization, sys.two_j0, sys.two_j1);
            let e = IonizingExpansion::new(sys);
            (Box::new(move |s| e.cross_section(&s[0]).unwrap()), vec![g])
        }
        Family::PhotoAuger => {
            let (pi, au) = photo_auger(rng);
            let g1 = geometry(rng, ProcessKind::Photoionization, pi.two_j0, pi.two_j1);
            let g2 = geometry(rng, ProcessKind::Auger, au.two_j1, au.two_j2);
            let (ep, ea) = (PhotoionizationExpansion::new(pi), AugerExpansion::new(au));
            (Box::new(move |s| compose_two_step(&ep.multipoles(&s[0]), &ea.response(&s[1])).unwrap()), vec![g1, g2])
        }
    }
}

fn euler(rng: &mut TestRng) -> EulerAngles {
    EulerAngles::new(
        rng.gen_range(0.0..std::f64::consts::TAU),
        rng.gen_range(0.0..std::f64::consts::PI),
        rng.gen_range(0.0..std::f64::consts::TAU),
    )
}

/// Largest relative change of the observable under a common rotation.
pub fn rotation_deviation(family: Family, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let (f, specs) = draw(family, &mut rng);
    let rot = euler(&mut rng);
    let rotated: Vec<ProcessSpec> = specs.iter().map(|s| s.rotated(&rot)).collect();
    let (a, b) = (f(&specs), f(&rotated));
    let d = (a - b).abs();
    if d <= 1e-14 {
        0.0
    } else {
        d / a.abs().max(b.abs())
    }
}

/// Smallest value over random directions of the detected particle relative
/// to the angle-integrated monopole.
pub fn min_relative_to_monopole(family: Family, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let (f, mut specs) = draw(family, &mut rng);
    let last = specs.len() - 1;
    let role = match family {
        Family::Photoexcitation => Role::PhotonIn,
        _ => Role::ElectronOut,
    };
    let base = specs[last].particle(role);
    let monopole = if role == Role::PhotonIn {
        None
    } else {
        let mut s = specs.clone();
        s[last].set_particle(role, polarkit::processes::ParticleSpec { detected: false, ..base });
        Some(f(&s) / (4.0 * std::f64::consts::PI))
    };
    let mut values = Vec::new();
    for _ in 0..40 {
        let mut p = base;
        p.direction = direction(&mut rng);
        p.detected = true;
        if let Some(h) = p.polarization.helicity_twice() {
            p.polarization = polarkit::tensors::PolarizationState::helicity(h / 2, p.direction);
        }
        specs[last].set_particle(role, p);
        values.push(f(&specs));
    }
    let scale = monopole.unwrap_or_else(|| values.iter().sum::<f64>() / values.len() as f64);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if scale == 0.0 {
        return if min.abs() <= 1e-14 { 0.0 } else { min.signum() * f64::INFINITY };
    }
    min / scale
}
