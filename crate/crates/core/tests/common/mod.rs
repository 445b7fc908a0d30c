//! Random toy systems and geometries shared by the integration tests.
#![allow(dead_code)]

pub mod identities;
pub mod invariance;

use num_complex::Complex64;
use polarkit::amplitudes::PartialWave;
use polarkit::angular::{triangle, Direction};
use polarkit::oracle;
use polarkit::processes::spec::{
    AugerSystem, BoundTransition, ChannelAmplitude, DielectronicSystem, EmissionSystem, HelicityAmplitude,
    IonizationChannel, IonizingAmplitude, IonizingSystem, ParticleSpec, PhotoionizationSystem, ProcessKind,
    ProcessSpec, Resonance, Role, ScatteringAmplitude, ScatteringSystem,
};
use polarkit::processes::{
    compose_chain, compose_two_step, AugerExpansion, ChainStep, EmissionExpansion, IonizingExpansion,
    PhotoexcitationExpansion, PhotoionizationExpansion, ScatteringExpansion,
};
use polarkit::tensors::PolarizationState;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut TestRng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn direction(rng: &mut TestRng) -> Direction {
    let c: f64 = rng.gen_range(-1.0..1.0);
    Direction::new(c.acos(), rng.gen_range(0.0..std::f64::consts::TAU)).unwrap()
}

/// Relative agreement with an absolute floor.
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + abs
}

fn bound(rng: &mut TestRng, two_j: i32) -> ParticleSpec {
    let pol = if rng.gen_bool(0.3) {
        PolarizationState::unpolarized()
    } else {
        let m = 2 * rng.gen_range(0..=two_j) - two_j;
        PolarizationState::projection(m, direction(rng))
    };
    ParticleSpec { polarization: pol, direction: Direction::z(), detected: false }
}

fn photon(rng: &mut TestRng, beam: bool) -> ParticleSpec {
    let dir = direction(rng);
    let pol = match rng.gen_range(0..3) {
        0 => PolarizationState::unpolarized(),
        1 => PolarizationState::helicity(1, dir),
        _ => PolarizationState::helicity(-1, dir),
    };
    ParticleSpec { polarization: pol, direction: dir, detected: beam || rng.gen_bool(0.7) }
}

fn electron(rng: &mut TestRng, beam: bool) -> ParticleSpec {
    let pol = if rng.gen_bool(0.4) {
        PolarizationState::unpolarized()
    } else {
        PolarizationState::projection(if rng.gen_bool(0.5) { 1 } else { -1 }, direction(rng))
    };
    ParticleSpec { polarization: pol, direction: direction(rng), detected: beam || rng.gen_bool(0.7) }
}

/// Random polarizations and directions for every role of `kind`.
pub fn geometry(rng: &mut TestRng, kind: ProcessKind, two_j0: i32, two_j1: i32) -> ProcessSpec {
    let mut s = ProcessSpec::new(kind, "a", "b");
    s.k_max = 4;
    s.electron_energy = Some(rng.gen_range(0.5..3.0));
    s.photon_energy = Some(rng.gen_range(0.5..3.0));
    for &role in s.roles() {
        let p = match role {
            Role::Target => bound(rng, two_j0),
            Role::Residual => bound(rng, two_j1),
            Role::PhotonIn => photon(rng, true),
            Role::PhotonOut => photon(rng, false),
            Role::ElectronIn => electron(rng, true),
            Role::ElectronOut | Role::ElectronOut2 => electron(rng, false),
        };
        s.set_particle(role, p);
    }
    s
}

fn waves(lmax: i32) -> Vec<PartialWave> {
    let mut out = Vec::new();
    for l in 0..=lmax {
        for two_j in [2 * l - 1, 2 * l + 1] {
            if two_j > 0 {
                out.push(PartialWave::new(l, two_j));
            }
        }
    }
    out
}

fn pick<T: Clone>(rng: &mut TestRng, v: Vec<T>, n: usize) -> Vec<T> {
    v.choose_multiple(rng, n).cloned().collect()
}

fn momentum(rng: &mut TestRng) -> i32 {
    rng.gen_range(0..=3)
}

pub fn photoexcitation(rng: &mut TestRng) -> BoundTransition {
    loop {
        let (j0, j1) = (momentum(rng), momentum(rng));
        let ks: Vec<i32> = [2, 4].into_iter().filter(|&k| triangle(j0, k, j1)).collect();
        if ks.is_empty() {
            continue;
        }
        let multipoles =
            ks.into_iter().map(|k| HelicityAmplitude { two_k: k, plus: complex(rng), minus: complex(rng) }).collect();
        return BoundTransition { two_j0: j0, two_j1: j1, multipoles, hyperfine: None };
    }
}

pub fn photoionization_between(rng: &mut TestRng, j0: i32, j1: i32) -> Option<PhotoionizationSystem> {
    let mut chans = Vec::new();
    for w in waves(3) {
        for jt in (0..=8).filter(|&jt| triangle(j1, w.two_j, jt)) {
            if [2, 4].iter().any(|&k| triangle(j0, k, jt)) {
                chans.push(IonizationChannel { wave: w, two_j_total: jt });
            }
        }
    }
    if chans.is_empty() {
        return None;
    }
    let n = rng.gen_range(1..=3);
    let channels = pick(rng, chans, n);
    let mut amplitudes = Vec::new();
    for (i, c) in channels.iter().enumerate() {
        for k in [2, 4] {
            if triangle(j0, k, c.two_j_total) && (k == 2 || rng.gen_bool(0.5)) {
                amplitudes.push(ChannelAmplitude {
                    channel: i,
                    amp: HelicityAmplitude { two_k: k, plus: complex(rng), minus: complex(rng) },
                });
            }
        }
    }
    if amplitudes.is_empty() {
        return None;
    }
    Some(PhotoionizationSystem { two_j0: j0, two_j1: j1, channels, amplitudes })
}

pub fn photoionization(rng: &mut TestRng) -> PhotoionizationSystem {
    loop {
        let (j0, j1) = (momentum(rng), momentum(rng));
        if let Some(s) = photoionization_between(rng, j0, j1) {
            return s;
        }
    }
}

pub fn auger_between(rng: &mut TestRng, j1: i32, j2: i32) -> Option<AugerSystem> {
    let ws: Vec<PartialWave> = waves(3).into_iter().filter(|w| triangle(j2, w.two_j, j1)).collect();
    if ws.is_empty() {
        return None;
    }
    let n = rng.gen_range(1..=3);
    let channels = pick(rng, ws, n).into_iter().map(|w| (w, complex(rng))).collect();
    Some(AugerSystem { two_j1: j1, two_j2: j2, channels })
}

pub fn emission_between(rng: &mut TestRng, j1: i32, j2: i32) -> Option<EmissionSystem> {
    let multipoles: Vec<(i32, Complex64)> =
        [2, 4].into_iter().filter(|&k| triangle(j1, k, j2)).map(|k| (k, complex(rng))).collect();
    (!multipoles.is_empty()).then_some(EmissionSystem { two_j1: j1, two_j2: j2, multipoles })
}

pub fn scattering(rng: &mut TestRng) -> ScatteringSystem {
    loop {
        let (j0, j1) = (momentum(rng), momentum(rng));
        let mut chans = Vec::new();
        for w0 in waves(2) {
            for jt in (0..=8).filter(|&jt| triangle(j0, w0.two_j, jt)) {
                for w1 in waves(2) {
                    if triangle(j1, w1.two_j, jt) {
                        chans.push((w0, w1, jt));
                    }
                }
            }
        }
        if chans.is_empty() {
            continue;
        }
        let n = rng.gen_range(1..=3);
        let amplitudes = pick(rng, chans, n)
            .into_iter()
            .map(|(incoming, outgoing, two_j_total)| ScatteringAmplitude {
                incoming,
                outgoing,
                two_j_total,
                value: complex(rng),
            })
            .collect();
        return ScatteringSystem { two_j0: j0, two_j1: j1, amplitudes };
    }
}

pub fn ionizing(rng: &mut TestRng) -> IonizingSystem {
    loop {
        let (j0, j1) = (momentum(rng), momentum(rng));
        let mut chans = Vec::new();
        for w0 in waves(1) {
            for jt in (0..=8).filter(|&jt| triangle(j0, w0.two_j, jt)) {
                for w2 in waves(1) {
                    for w1 in waves(1) {
                        for jp in (0..=6).filter(|&jp| triangle(w2.two_j, w1.two_j, jp)) {
                            if triangle(j1, jp, jt) {
                                chans.push((w0, w1, w2, jp, jt));
                            }
                        }
                    }
                }
            }
        }
        if chans.is_empty() {
            continue;
        }
        let n = rng.gen_range(1..=3);
        let amplitudes = pick(rng, chans, n)
            .into_iter()
            .map(|(incoming, out1, out2, two_j_pair, two_j_total)| IonizingAmplitude {
                incoming,
                out1,
                out2,
                two_j_pair,
                two_j_total,
                value: complex(rng),
            })
            .collect();
        return IonizingSystem { two_j0: j0, two_j1: j1, amplitudes };
    }
}

/// Photoionization into `J1` followed by an Auger decay to `J2`.
pub fn photo_auger(rng: &mut TestRng) -> (PhotoionizationSystem, AugerSystem) {
    loop {
        let (j0, j1, j2) = (momentum(rng), momentum(rng), momentum(rng));
        if let (Some(p), Some(a)) = (photoionization_between(rng, j0, j1), auger_between(rng, j1, j2)) {
            return (p, a);
        }
    }
}

pub fn resonance(rng: &mut TestRng) -> Resonance {
    Resonance { energy: rng.gen_range(0.5..3.0), width: rng.gen_range(0.05..0.5) }
}

pub fn dielectronic(rng: &mut TestRng) -> DielectronicSystem {
    loop {
        let (ion, res, fin) = (momentum(rng), momentum(rng), momentum(rng));
        if let (Some(capture), Some(emission)) = (auger_between(rng, res, ion), emission_between(rng, res, fin)) {
            return DielectronicSystem { capture, emission };
        }
    }
}

/// Photoionization into `J1`, Auger decay to `J2`, photon emission to `J3`.
pub fn photo_auger_emission(rng: &mut TestRng) -> (PhotoionizationSystem, AugerSystem, EmissionSystem) {
    loop {
        let (j0, j1, j2, j3) = (momentum(rng), momentum(rng), momentum(rng), momentum(rng));
        if let (Some(p), Some(a), Some(e)) =
            (photoionization_between(rng, j0, j1), auger_between(rng, j1, j2), emission_between(rng, j2, j3))
        {
            return (p, a, e);
        }
    }
}

/// Worst agreement seen over a batch of expansion/oracle comparisons.
#[derive(Debug, Default)]
pub struct Agreement {
    pub compared: usize,
    pub failures: usize,
    pub worst: f64,
    pub first_failure: Option<String>,
}

impl Agreement {
    pub fn record(&mut self, label: &str, expansion: f64, oracle: f64, rel: f64, abs: f64) {
        self.compared += 1;
        let err = (expansion - oracle).abs() / (oracle.abs() + abs / rel);
        self.worst = self.worst.max(err);
        if !close(expansion, oracle, rel, abs) {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(format!("{label}: expansion {expansion:e} oracle {oracle:e}"));
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.compared > 0 && self.failures == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Photoexcitation,
    Photoionization,
    EExcitation,
    EIonization,
    PhotoAuger,
}

pub const FAMILIES: [Family; 5] =
    [Family::Photoexcitation, Family::Photoionization, Family::EExcitation, Family::EIonization, Family::PhotoAuger];

/// Compares the multipole expansion of `family` with the brute-force oracle
/// on `systems` random systems times `geometries` random geometries.
pub fn compare_family(family: Family, systems: usize, geometries: usize, seed: u64, rel: f64, abs: f64) -> Agreement {
    let mut rng = rng(seed);
    let mut agg = Agreement::default();
    for s in 0..systems {
        match family {
            Family::Photoexcitation => {
                let sys = photoexcitation(&mut rng);
                let e = PhotoexcitationExpansion::new(sys.clone());
                for g in 0..geometries {
                    let spec = geometry(&mut rng, ProcessKind::Photoexcitation, sys.two_j0, sys.two_j1);
                    let o = oracle::photoexcitation(&sys, &spec).unwrap().value;
                    agg.record(&format!("system {s} geometry {g}"), e.cross_section(&spec).unwrap(), o, rel, abs);
                }
            }
            Family::Photoionization => {
                let sys = photoionization(&mut rng);
                let e = PhotoionizationExpansion::new(sys.clone());
                for g in 0..geometries {
                    let spec = geometry(&mut rng, ProcessKind::Photoionization, sys.two_j0, sys.two_j1);
                    let o = oracle::photoionization(&sys, &spec).unwrap().value;
                    agg.record(&format!("system {s} geometry {g}"), e.cross_section(&spec).unwrap(), o, rel, abs);
                }
            }
            Family::EExcitation => {
                let sys = scattering(&mut rng);
                let e = ScatteringExpansion::new(sys.clone());
                for g in 0..geometries {
                    let spec = geometry(&mut rng, ProcessKind::EExcitation, sys.two_j0, sys.two_j1);
                    let o = oracle::e_excitation(&sys, &spec).unwrap().value;
                    agg.record(&format!("system {s} geometry {g}"), e.cross_section(&spec).unwrap(), o, rel, abs);
                }
            }
            Family::EIonization => {
                let sys = ionizing(&mut rng);
                let e = IonizingExpansion::new(sys.clone());
                for g in 0..geometries {
                    let spec = geometry(&mut rng, ProcessKind::EIonization, sys.two_j0, sys.two_j1);
                    let o = oracle::e_ionization(&sys, &spec).unwrap().value;
                    agg.record(&format!("system {s} geometry {g}"), e.cross_section(&spec).unwrap(), o, rel, abs);
                }
            }
            Family::PhotoAuger => {
                let (pi, au) = photo_auger(&mut rng);
                let (ep, ea) = (PhotoionizationExpansion::new(pi.clone()), AugerExpansion::new(au.clone()));
                for g in 0..geometries {
                    let first = geometry(&mut rng, ProcessKind::Photoionization, pi.two_j0, pi.two_j1);
                    let second = geometry(&mut rng, ProcessKind::Auger, au.two_j1, au.two_j2);
                    let o = oracle::cascade(
                        &oracle::FirstStep::Photoionization(&pi, &first),
                        &[oracle::DecayStep::Auger(&au, &second)],
                    )
                    .unwrap()
                    .value;
                    let v = compose_two_step(&ep.multipoles(&first), &ea.response(&second)).unwrap();
                    agg.record(&format!("system {s} geometry {g}"), v, o, rel, abs);
                }
            }
        }
    }
    agg
}

/// Photoionization, Auger decay and photon emission composed as a chain
/// against the coherent oracle.
pub fn compare_three_step(systems: usize, geometries: usize, seed: u64, rel: f64, abs: f64) -> Agreement {
    let mut rng = rng(seed);
    let mut agg = Agreement::default();
    for s in 0..systems {
        let (pi, au, em) = photo_auger_emission(&mut rng);
        let ep = PhotoionizationExpansion::new(pi.clone());
        let (ea, ee) = (AugerExpansion::new(au.clone()), EmissionExpansion::new(em.clone()));
        for g in 0..geometries {
            let s1 = geometry(&mut rng, ProcessKind::Photoionization, pi.two_j0, pi.two_j1);
            let s2 = geometry(&mut rng, ProcessKind::Auger, au.two_j1, au.two_j2);
            let s3 = geometry(&mut rng, ProcessKind::RadDecay, em.two_j1, em.two_j2);
            let o = oracle::cascade(
                &oracle::FirstStep::Photoionization(&pi, &s1),
                &[oracle::DecayStep::Auger(&au, &s2), oracle::DecayStep::Emission(&em, &s3)],
            )
            .unwrap()
            .value;
            let v = compose_chain(&[
                ChainStep::Distribution(ep.multipoles(&s1)),
                ChainStep::Transfer(ea.transfer(&s2)),
                ChainStep::Response(ee.response(&s3)),
            ])
            .unwrap();
            agg.record(&format!("system {s} geometry {g}"), v, o, rel, abs);
        }
    }
    agg
}

/// Least-squares Legendre fit of `(theta_deg, W)` samples up to rank `kmax`.
pub fn legendre_fit(samples: &[(f64, f64)], kmax: u32) -> Vec<f64> {
    let n = kmax as usize + 1;
    let a = nalgebra::DMatrix::from_fn(samples.len(), n, |i, k| {
        polarkit::angular::legendre_p(k as u32, samples[i].0.to_radians().cos())
    });
    let b = nalgebra::DVector::from_iterator(samples.len(), samples.iter().map(|s| s.1));
    let svd = a.svd(true, true);
    svd.solve(&b, 1e-14).unwrap().iter().copied().collect()
}

/// Single epsilon-p photoionization of a closed s shell: `J0 = 0`, ion
/// `J1 = 1/2`, two channels recoupled from a spin-singlet p wave.
pub fn s_shell_ep() -> PhotoionizationSystem {
    let channels = vec![
        IonizationChannel { wave: PartialWave::new(1, 1), two_j_total: 2 },
        IonizationChannel { wave: PartialWave::new(1, 3), two_j_total: 2 },
    ];
    let amp =
        |c: usize, v: f64| ChannelAmplitude { channel: c, amp: HelicityAmplitude::uniform(2, Complex64::new(v, 0.0)) };
    PhotoionizationSystem {
        two_j0: 0,
        two_j1: 1,
        channels,
        amplitudes: vec![amp(0, (1.0f64 / 3.0).sqrt()), amp(1, (2.0f64 / 3.0).sqrt())],
    }
}

/// Pure epsilon-s photoionization of `J0 = 0` to `J1 = 1/2`.
pub fn s_shell_es() -> PhotoionizationSystem {
    PhotoionizationSystem {
        two_j0: 0,
        two_j1: 1,
        channels: vec![IonizationChannel { wave: PartialWave::new(0, 1), two_j_total: 2 }],
        amplitudes: vec![ChannelAmplitude {
            channel: 0,
            amp: HelicityAmplitude::uniform(2, Complex64::new(0.7, -0.2)),
        }],
    }
}

/// Photoionization geometry with the beam along z and the photoelectron
/// detected at `theta_deg` in the `phi` half-plane; atom, ion and spin
/// unpolarized and unobserved.
pub fn photoelectron_at(photon: PolarizationState, theta_deg: f64, phi_deg: f64) -> ProcessSpec {
    let mut s = ProcessSpec::new(ProcessKind::Photoionization, "a", "b");
    s.set_particle(Role::PhotonIn, ParticleSpec { polarization: photon, direction: Direction::z(), detected: true });
    let d = Direction::from_degrees(theta_deg, phi_deg).unwrap();
    s.set_particle(
        Role::ElectronOut,
        ParticleSpec { polarization: PolarizationState::unpolarized(), direction: d, detected: true },
    );
    s
}
