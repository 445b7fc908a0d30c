//! Process descriptions and their resolution against an amplitude table
//! into numeric systems on doubled angular momenta.
//!
//! Both the multipole expansions and the brute-force oracle consume the
//! resolved systems defined here.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::amplitudes::{
    assemble_photon_multipole, decay_reduced_me_normalization, hyperfine_reduced_me, AmplitudeError, AmplitudeKey,
    ChannelKind, MultipoleMode, PartialWave, ReducedAmplitudeTable, TransitionKind, SPEED_OF_LIGHT,
};
use crate::angular::Direction;
use crate::tensors::{PolarizationKind, PolarizationState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProcessKind {
    Photoexcitation,
    Photoionization,
    EExcitation,
    EIonization,
    RadRecombination,
    RadDecay,
    Auger,
    DielectronicRecombination,
}

impl ProcessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProcessKind::Photoexcitation => "photoexcitation",
            ProcessKind::Photoionization => "photoionization",
            ProcessKind::EExcitation => "e_excitation",
            ProcessKind::EIonization => "e_ionization",
            ProcessKind::RadRecombination => "rad_recombination",
            ProcessKind::RadDecay => "rad_decay",
            ProcessKind::Auger => "auger",
            ProcessKind::DielectronicRecombination => "dielectronic_recombination",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "photoexcitation" => ProcessKind::Photoexcitation,
            "photoionization" => ProcessKind::Photoionization,
            "e_excitation" => ProcessKind::EExcitation,
            "e_ionization" => ProcessKind::EIonization,
            "rad_recombination" => ProcessKind::RadRecombination,
            "rad_decay" => ProcessKind::RadDecay,
            "auger" => ProcessKind::Auger,
            "dielectronic_recombination" => ProcessKind::DielectronicRecombination,
            _ => return None,
        })
    }
}

/// Particle slots of a process.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    /// Initial bound state (atom or ion).
    Target,
    /// Final bound state.
    Residual,
    PhotonIn,
    PhotonOut,
    ElectronIn,
    ElectronOut,
    ElectronOut2,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Target => "target",
            Role::Residual => "residual",
            Role::PhotonIn => "photon_in",
            Role::PhotonOut => "photon_out",
            Role::ElectronIn => "electron_in",
            Role::ElectronOut => "electron_out",
            Role::ElectronOut2 => "electron_out2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "target" => Role::Target,
            "residual" => Role::Residual,
            "photon_in" => Role::PhotonIn,
            "photon_out" => Role::PhotonOut,
            "electron_in" => Role::ElectronIn,
            "electron_out" => Role::ElectronOut,
            "electron_out2" => Role::ElectronOut2,
            _ => return None,
        })
    }
}

/// Polarization and direction of one particle. `direction` is the beam for
/// incoming particles and the detector for outgoing ones; undetected outgoing
/// particles are integrated over all directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParticleSpec {
    pub polarization: PolarizationState,
    pub direction: Direction,
    pub detected: bool,
}

impl Default for ParticleSpec {
    fn default() -> Self {
        ParticleSpec { polarization: PolarizationState::unpolarized(), direction: Direction::z(), detected: false }
    }
}

impl ParticleSpec {
    pub fn unpolarized_at(direction: Direction) -> Self {
        ParticleSpec { polarization: PolarizationState::unpolarized(), direction, detected: true }
    }

    pub fn polarized_at(polarization: PolarizationState, direction: Direction) -> Self {
        ParticleSpec { polarization, direction, detected: true }
    }

    /// Detector direction when detected.
    pub fn detector(&self) -> Option<&Direction> {
        self.detected.then_some(&self.direction)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Resonance {
    /// Hartree.
    pub energy: f64,
    pub width: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub initial: String,
    pub final_state: String,
    /// Resonance state of dielectronic recombination.
    pub intermediate: Option<String>,
    pub particles: BTreeMap<Role, ParticleSpec>,
    pub k_max: u32,
    /// Photon energy in hartree; inferred from state energies when absent.
    pub photon_energy: Option<f64>,
    /// Kinetic energy of the incoming electron `E0`.
    pub electron_energy: Option<f64>,
    pub ionization_potential: Option<f64>,
    pub resonance: Option<Resonance>,
    pub multipole_mode: MultipoleMode,
}

impl ProcessSpec {
    pub fn new(kind: ProcessKind, initial: &str, final_state: &str) -> Self {
        ProcessSpec {
            kind,
            initial: initial.to_string(),
            final_state: final_state.to_string(),
            intermediate: None,
            particles: BTreeMap::new(),
            k_max: 1,
            photon_energy: None,
            electron_energy: None,
            ionization_potential: None,
            resonance: None,
            multipole_mode: MultipoleMode::General,
        }
    }

    pub fn with(mut self, role: Role, p: ParticleSpec) -> Self {
        self.particles.insert(role, p);
        self
    }

    pub fn particle(&self, role: Role) -> ParticleSpec {
        self.particles.get(&role).copied().unwrap_or_default()
    }

    pub fn set_particle(&mut self, role: Role, p: ParticleSpec) {
        self.particles.insert(role, p);
    }

    /// Roles that carry meaning for this process kind.
    pub fn roles(&self) -> &'static [Role] {
        use Role::*;
        match self.kind {
            ProcessKind::Photoexcitation => &[Target, PhotonIn, Residual],
            ProcessKind::Photoionization => &[Target, PhotonIn, Residual, ElectronOut],
            ProcessKind::EExcitation => &[Target, ElectronIn, Residual, ElectronOut],
            ProcessKind::EIonization => &[Target, ElectronIn, Residual, ElectronOut, ElectronOut2],
            ProcessKind::RadRecombination => &[Target, ElectronIn, Residual, PhotonOut],
            ProcessKind::RadDecay => &[Target, Residual, PhotonOut],
            ProcessKind::Auger => &[Target, Residual, ElectronOut],
            ProcessKind::DielectronicRecombination => &[Target, ElectronIn, Residual, PhotonOut],
        }
    }

    /// Rotates every direction and polarization axis by `rot`.
    pub fn rotated(&self, rot: &crate::angular::EulerAngles) -> Self {
        let mut s = self.clone();
        for p in s.particles.values_mut() {
            p.direction = p.direction.rotated(rot);
            p.polarization.axis = p.polarization.axis.rotated(rot);
        }
        s
    }

    pub fn validate(&self) -> Result<(), ProcessError> {
        if self.k_max < 1 {
            return Err(ProcessError::Spec("k_max must be >= 1".into()));
        }
        for (role, p) in &self.particles {
            let kind = p.polarization.kind;
            let ok = match role {
                Role::PhotonIn | Role::PhotonOut => !matches!(kind, PolarizationKind::Projection(_)),
                Role::ElectronIn | Role::ElectronOut | Role::ElectronOut2 => match kind {
                    PolarizationKind::Projection(m) => m.twice().abs() == 1,
                    PolarizationKind::Unpolarized => true,
                    _ => false,
                },
                Role::Target | Role::Residual => {
                    matches!(kind, PolarizationKind::Projection(_) | PolarizationKind::Unpolarized)
                }
            };
            if !ok {
                return Err(ProcessError::Spec(format!("polarization {:?} not allowed for {}", kind, role.as_str())));
            }
        }
        for role in [Role::PhotonIn, Role::ElectronIn] {
            if let Some(p) = self.particles.get(&role) {
                if !p.detected {
                    return Err(ProcessError::Spec(format!("{} needs a beam direction", role.as_str())));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Warning {
    /// Amplitudes above `k_max` were dropped.
    Truncated { entries: Vec<String>, largest: f64 },
    /// Zero photon energy makes every emission amplitude vanish.
    DegeneratePhoton,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Truncated { entries, largest } => write!(
                f,
                "k_max truncation dropped {} amplitude(s), largest |value| {:.3e}: {}",
                entries.len(),
                largest,
                entries.join(", ")
            ),
            Warning::DegeneratePhoton => write!(f, "photon energy is zero; emission amplitudes vanish"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ProcessError {
    #[error(transparent)]
    Amplitude(#[from] AmplitudeError),
    #[error("invalid process specification: {0}")]
    Spec(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("imaginary residue {im:e} exceeds tolerance for value {re:e} (scale {scale:e})")]
    ImaginaryResidue { re: f64, im: f64, scale: f64 },
    #[error("negative value {value:e} beyond tolerance (scale {scale:e})")]
    Negative { value: f64, scale: f64 },
    #[error("system too large for brute-force summation: about {0} projection tuples")]
    TooLarge(f64),
}

/// A scalar result with the warnings raised while computing it.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub value: f64,
    pub warnings: Vec<Warning>,
}

/// Photon multipole amplitude for both helicities (Clebsch-Gordan reduced form).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HelicityAmplitude {
    pub two_k: i32,
    pub plus: Complex64,
    pub minus: Complex64,
}

impl HelicityAmplitude {
    pub fn uniform(two_k: i32, v: Complex64) -> Self {
        HelicityAmplitude { two_k, plus: v, minus: v }
    }

    /// Amplitude for doubled helicity `+-2`.
    pub fn at(&self, two_q: i32) -> Complex64 {
        if two_q > 0 {
            self.plus
        } else {
            self.minus
        }
    }
}

/// Photoabsorption between bound states `J0 -> J1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundTransition {
    pub two_j0: i32,
    pub two_j1: i32,
    pub multipoles: Vec<HelicityAmplitude>,
    /// Nuclear spin when the levels are hyperfine components; `two_j0`,
    /// `two_j1` then hold `F0`, `F1` and the amplitudes are already transformed.
    pub hyperfine: Option<HyperfineLevels>,
}

/// Fine-structure labels and amplitudes behind a hyperfine transition.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperfineLevels {
    pub two_i: i32,
    pub two_j0: i32,
    pub two_j1: i32,
    pub fine: Vec<HelicityAmplitude>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IonizationChannel {
    pub wave: PartialWave,
    pub two_j_total: i32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelAmplitude {
    pub channel: usize,
    pub amp: HelicityAmplitude,
}

/// `J0 + photon -> J1 + e(lambda j) ; J`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotoionizationSystem {
    pub two_j0: i32,
    pub two_j1: i32,
    pub channels: Vec<IonizationChannel>,
    pub amplitudes: Vec<ChannelAmplitude>,
}

/// Photon emission `J1 -> J2 + photon`; values are helicity independent.
#[derive(Clone, Debug, PartialEq)]
pub struct EmissionSystem {
    pub two_j1: i32,
    pub two_j2: i32,
    /// `(2k, b)` with `b` the reduced emission element.
    pub multipoles: Vec<(i32, Complex64)>,
}

/// Electron emission `J1 -> J2 + e(lambda j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AugerSystem {
    pub two_j1: i32,
    pub two_j2: i32,
    pub channels: Vec<(PartialWave, Complex64)>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatteringAmplitude {
    pub incoming: PartialWave,
    pub outgoing: PartialWave,
    pub two_j_total: i32,
    pub value: Complex64,
}

/// `J0 + e -> J1 + e`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringSystem {
    pub two_j0: i32,
    pub two_j1: i32,
    pub amplitudes: Vec<ScatteringAmplitude>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IonizingAmplitude {
    pub incoming: PartialWave,
    pub out1: PartialWave,
    pub out2: PartialWave,
    pub two_j_pair: i32,
    pub two_j_total: i32,
    pub value: Complex64,
}

/// `J0 + e -> J1 + e + e`.
#[derive(Clone, Debug, PartialEq)]
pub struct IonizingSystem {
    pub two_j0: i32,
    pub two_j1: i32,
    pub amplitudes: Vec<IonizingAmplitude>,
}

/// Resonant capture `J0 + e -> J1` followed by `J1 -> J2 + photon`.
#[derive(Clone, Debug, PartialEq)]
pub struct DielectronicSystem {
    /// Auger system of the time-reversed capture (`J1 -> J0 + e`).
    pub capture: AugerSystem,
    pub emission: EmissionSystem,
}

/// Electron momentum `sqrt(2E)` for a kinetic energy in hartree.
pub fn electron_momentum(energy: f64) -> f64 {
    (2.0 * energy).sqrt()
}

struct Resolver<'a> {
    spec: &'a ProcessSpec,
    table: &'a ReducedAmplitudeTable,
    dropped: Vec<(String, f64)>,
}

impl<'a> Resolver<'a> {
    fn new(spec: &'a ProcessSpec, table: &'a ReducedAmplitudeTable) -> Self {
        Resolver { spec, table, dropped: Vec::new() }
    }

    fn two_j(&self, id: &str) -> Result<i32, ProcessError> {
        self.table
            .state(id)
            .map(|s| s.j.twice())
            .ok_or_else(|| ProcessError::Amplitude(AmplitudeError::Lookup(format!("state {id}"))))
    }

    fn energy_gap(&self, upper: &str, lower: &str) -> Option<f64> {
        let eu = self.table.state(upper)?.energy?;
        let el = self.table.state(lower)?.energy?;
        Some((eu - el).abs())
    }

    fn photon_energy(&self, upper: &str, lower: &str) -> Result<f64, ProcessError> {
        self.spec
            .photon_energy
            .or_else(|| self.energy_gap(upper, lower))
            .ok_or_else(|| ProcessError::Spec("photon energy not given and state energies missing".into()))
    }

    /// Keys of `kind` between `bra` and `ket`, with k above `k_max` recorded and skipped.
    fn keys(&mut self, kind: TransitionKind, bra: &str, ket: &str) -> Vec<AmplitudeKey> {
        let mut out = Vec::new();
        for (key, v) in self.table.entries() {
            if key.kind != kind || key.bra != bra || key.ket != ket {
                continue;
            }
            if kind != TransitionKind::Electrostatic && key.k > self.spec.k_max {
                self.dropped.push((key.to_string(), v.norm()));
                continue;
            }
            out.push(key.clone());
        }
        out
    }

    fn warnings(&self) -> Vec<Warning> {
        if self.dropped.is_empty() {
            return Vec::new();
        }
        let mut seen = BTreeSet::new();
        vec![Warning::Truncated {
            entries: self.dropped.iter().filter(|(k, _)| seen.insert(k.clone())).map(|(k, _)| k.clone()).collect(),
            largest: self.dropped.iter().map(|(_, v)| *v).fold(0.0, f64::max),
        }]
    }

    fn photo_multipoles(
        &mut self,
        bra: &str,
        ket: &str,
        channel: Option<&str>,
        energy: f64,
    ) -> Result<Vec<HelicityAmplitude>, ProcessError> {
        let ks: BTreeSet<u32> = self
            .keys(TransitionKind::Photo, bra, ket)
            .into_iter()
            .filter(|k| k.channel.as_deref() == channel)
            .map(|k| k.k)
            .collect();
        let mode = self.spec.multipole_mode;
        let mut out = Vec::new();
        for k in ks {
            if mode == MultipoleMode::Dipole && k != 1 {
                self.dropped.push((format!("{bra} <- {ket} k={k} (dipole mode)"), 0.0));
                continue;
            }
            let plus = assemble_photon_multipole(self.table, bra, ket, channel, k, energy, 1, mode)?;
            let minus = assemble_photon_multipole(self.table, bra, ket, channel, k, energy, -1, mode)?;
            out.push(HelicityAmplitude { two_k: 2 * k as i32, plus, minus });
        }
        Ok(out)
    }

    fn photoionization(&mut self, atom: &str, ion: &str, energy: f64) -> Result<PhotoionizationSystem, ProcessError> {
        let channel_ids: BTreeSet<String> =
            self.keys(TransitionKind::Photo, ion, atom).into_iter().filter_map(|k| k.channel).collect();
        let mut channels = Vec::new();
        let mut amplitudes = Vec::new();
        for id in channel_ids {
            let c = self.table.channel(&id).expect("validated channel");
            let ChannelKind::Single(wave) = c.kind else { continue };
            let idx = channels.len();
            channels.push(IonizationChannel { wave, two_j_total: c.two_j_total });
            for amp in self.photo_multipoles(ion, atom, Some(&id), energy)? {
                amplitudes.push(ChannelAmplitude { channel: idx, amp });
            }
        }
        Ok(PhotoionizationSystem { two_j0: self.two_j(atom)?, two_j1: self.two_j(ion)?, channels, amplitudes })
    }

    fn emission(&mut self, upper: &str, lower: &str) -> Result<(EmissionSystem, bool), ProcessError> {
        let energy = self.photon_energy(upper, lower)?;
        let two_j2 = self.two_j(lower)?;
        let mut by_k: BTreeMap<i32, Complex64> = BTreeMap::new();
        for key in self.keys(TransitionKind::Decay, lower, upper) {
            let v = self.table.get(&key).unwrap();
            *by_k.entry(2 * key.k as i32).or_default() += v;
        }
        let mut degenerate = false;
        let multipoles = by_k
            .into_iter()
            .map(|(k, v)| {
                let (paren, flag) = decay_reduced_me_normalization(v, two_j2, energy);
                degenerate |= flag;
                (k, paren / f64::from(two_j2 + 1).sqrt())
            })
            .collect();
        Ok((EmissionSystem { two_j1: self.two_j(upper)?, two_j2, multipoles }, degenerate))
    }

    fn auger(&mut self, upper: &str, lower: &str) -> Result<AugerSystem, ProcessError> {
        let mut channels = Vec::new();
        for key in self.keys(TransitionKind::Electrostatic, lower, upper) {
            let c = self.table.channel(key.channel.as_deref().unwrap()).unwrap();
            if let ChannelKind::Single(w) = c.kind {
                channels.push((w, self.table.get(&key).unwrap()));
            }
        }
        Ok(AugerSystem { two_j1: self.two_j(upper)?, two_j2: self.two_j(lower)?, channels })
    }
}

fn require_nonempty(n: usize, what: &str) -> Result<(), ProcessError> {
    if n == 0 {
        Err(ProcessError::Amplitude(AmplitudeError::Lookup(what.to_string())))
    } else {
        Ok(())
    }
}

pub fn resolve_photoexcitation(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<(BoundTransition, Vec<Warning>), ProcessError> {
    let mut r = Resolver::new(spec, table);
    let (ini, fin) = (&spec.initial, &spec.final_state);
    let energy = r.photon_energy(fin, ini)?;
    let mut multipoles = r.photo_multipoles(fin, ini, None, energy)?;
    require_nonempty(multipoles.len(), &format!("photo amplitudes {fin} <- {ini}"))?;
    let s0 = table.state(ini).unwrap();
    let s1 = table.state(fin).unwrap();
    let (two_j0, two_j1, hyperfine) = match (s0.nuclear_spin.zip(s0.f), s1.nuclear_spin.zip(s1.f)) {
        (Some((i0, f0)), Some((i1, f1))) => {
            if i0 != i1 {
                return Err(ProcessError::Spec("hyperfine levels with different nuclear spins".into()));
            }
            let (j0, j1) = (s0.j.twice(), s1.j.twice());
            let (f0, f1, i) = (f0.twice(), f1.twice(), i0.twice());
            let fine = multipoles.clone();
            for m in &mut multipoles {
                let conv = |a: Complex64| {
                    let paren = a * f64::from(j1 + 1).sqrt();
                    hyperfine_reduced_me(paren, j0, j1, i, f0, f1, m.two_k) / f64::from(f1 + 1).sqrt()
                };
                m.plus = conv(m.plus);
                m.minus = conv(m.minus);
            }
            (f0, f1, Some(HyperfineLevels { two_i: i, two_j0: j0, two_j1: j1, fine }))
        }
        _ => (s0.j.twice(), s1.j.twice(), None),
    };
    Ok((BoundTransition { two_j0, two_j1, multipoles, hyperfine }, r.warnings()))
}

pub fn resolve_photoionization(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<(PhotoionizationSystem, Vec<Warning>), ProcessError> {
    let mut r = Resolver::new(spec, table);
    let energy = spec.photon_energy.ok_or_else(|| ProcessError::Spec("photoionization needs photon_energy".into()))?;
    if energy <= 0.0 {
        return Err(ProcessError::Domain(format!("photon energy {energy} must be positive")));
    }
    let sys = r.photoionization(&spec.initial, &spec.final_state, energy)?;
    require_nonempty(
        sys.amplitudes.len(),
        &format!("photo channel amplitudes {} <- {}", spec.final_state, spec.initial),
    )?;
    Ok((sys, r.warnings()))
}

/// Photon energy of radiative recombination, `E0 + I_p`.
pub fn recombination_photon_energy(spec: &ProcessSpec, table: &ReducedAmplitudeTable) -> Result<f64, ProcessError> {
    let e0 = spec
        .electron_energy
        .ok_or_else(|| ProcessError::Spec("radiative recombination needs electron_energy".into()))?;
    if e0 <= 0.0 {
        return Err(ProcessError::Domain(format!("electron energy {e0} must be positive")));
    }
    let ip = spec
        .ionization_potential
        .or_else(|| {
            let ion = table.state(&spec.initial)?.energy?;
            let atom = table.state(&spec.final_state)?.energy?;
            Some(ion - atom)
        })
        .ok_or_else(|| ProcessError::Spec("ionization potential not given and state energies missing".into()))?;
    Ok(e0 + ip)
}

/// Radiative recombination reuses the photoionization amplitudes of the
/// time-reversed process: `initial` is the ion, `final_state` the atom.
pub fn resolve_recombination(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<(PhotoionizationSystem, Vec<Warning>), ProcessError> {
    let energy = recombination_photon_energy(spec, table)?;
    let mut r = Resolver::new(spec, table);
    let sys = r.photoionization(&spec.final_state, &spec.initial, energy)?;
    require_nonempty(
        sys.amplitudes.len(),
        &format!("photo channel amplitudes {} <- {}", spec.initial, spec.final_state),
    )?;
    Ok((sys, r.warnings()))
}

pub fn resolve_emission(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<(EmissionSystem, Vec<Warning>), ProcessError> {
    let mut r = Resolver::new(spec, table);
    let (sys, degenerate) = r.emission(&spec.initial, &spec.final_state)?;
    require_nonempty(sys.multipoles.len(), &format!("decay amplitudes {} <- {}", spec.final_state, spec.initial))?;
    let mut w = r.warnings();
    if degenerate {
        w.push(Warning::DegeneratePhoton);
    }
    Ok((sys, w))
}

pub fn resolve_auger(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<(AugerSystem, Vec<Warning>), ProcessError> {
    let mut r = Resolver::new(spec, table);
    let sys = r.auger(&spec.initial, &spec.final_state)?;
    require_nonempty(
        sys.channels.len(),
        &format!("electrostatic amplitudes {} <- {}", spec.final_state, spec.initial),
    )?;
    Ok((sys, r.warnings()))
}

pub fn resolve_scattering(spec: &ProcessSpec, table: &ReducedAmplitudeTable) -> Result<ScatteringSystem, ProcessError> {
    let mut r = Resolver::new(spec, table);
    let mut amplitudes = Vec::new();
    for key in r.keys(TransitionKind::Electrostatic, &spec.final_state, &spec.initial) {
        let c = table.channel(key.channel.as_deref().unwrap()).unwrap();
        if let ChannelKind::Scattering { incoming, outgoing } = c.kind {
            amplitudes.push(ScatteringAmplitude {
                incoming,
                outgoing,
                two_j_total: c.two_j_total,
                value: table.get(&key).unwrap(),
            });
        }
    }
    require_nonempty(amplitudes.len(), "scattering amplitudes")?;
    Ok(ScatteringSystem { two_j0: r.two_j(&spec.initial)?, two_j1: r.two_j(&spec.final_state)?, amplitudes })
}

pub fn resolve_ionizing(spec: &ProcessSpec, table: &ReducedAmplitudeTable) -> Result<IonizingSystem, ProcessError> {
    let mut r = Resolver::new(spec, table);
    let mut amplitudes = Vec::new();
    for key in r.keys(TransitionKind::Electrostatic, &spec.final_state, &spec.initial) {
        let c = table.channel(key.channel.as_deref().unwrap()).unwrap();
        if let ChannelKind::Ionizing { incoming, out1, out2, two_j_pair } = c.kind {
            amplitudes.push(IonizingAmplitude {
                incoming,
                out1,
                out2,
                two_j_pair,
                two_j_total: c.two_j_total,
                value: table.get(&key).unwrap(),
            });
        }
    }
    require_nonempty(amplitudes.len(), "ionizing amplitudes")?;
    Ok(IonizingSystem { two_j0: r.two_j(&spec.initial)?, two_j1: r.two_j(&spec.final_state)?, amplitudes })
}

pub fn resolve_dielectronic(
    spec: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<(DielectronicSystem, Vec<Warning>), ProcessError> {
    let res = spec
        .intermediate
        .as_deref()
        .ok_or_else(|| ProcessError::Spec("dielectronic recombination needs an intermediate state".into()))?;
    let mut r = Resolver::new(spec, table);
    let capture = r.auger(res, &spec.initial)?;
    require_nonempty(capture.channels.len(), &format!("capture amplitudes {} <- {}", spec.initial, res))?;
    let (emission, degenerate) = r.emission(res, &spec.final_state)?;
    let mut w = r.warnings();
    if degenerate {
        w.push(Warning::DegeneratePhoton);
    }
    Ok((DielectronicSystem { capture, emission }, w))
}

/// Photon wave number `k0 = E / c`.
pub fn photon_wavenumber(energy: f64) -> f64 {
    energy / SPEED_OF_LIGHT
}

/// Helicity choices of an incoming photon with their weights.
pub fn absorbed_helicities(p: &ParticleSpec) -> Vec<(i32, f64)> {
    match p.polarization.helicity_twice() {
        Some(q) => vec![(q, 1.0)],
        None => vec![(2, 0.5), (-2, 0.5)],
    }
}

/// Helicity choices of an outgoing photon (summed when unobserved).
pub fn emitted_helicities(p: &ParticleSpec) -> Vec<(i32, f64)> {
    match p.polarization.helicity_twice() {
        Some(q) => vec![(q, 1.0)],
        None => vec![(2, 1.0), (-2, 1.0)],
    }
}
