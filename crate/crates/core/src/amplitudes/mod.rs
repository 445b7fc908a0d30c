//! User-supplied reduced matrix elements and their assembly into the
//! multipole amplitudes consumed by the process evaluators.
//!
//! Every stored value is the reduced element in the Clebsch-Gordan form of
//! the Wigner-Eckart theorem: `<a J M | T^k_q | b J' M'> = <J' M' k q | J M> x value`.
//! The parenthesized element used in the coefficient formulas is
//! `sqrt(2J+1) x value`.

mod io;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::angular::{six_j, triangle, AngularMomentum};

pub use io::{load_table, parse_table};

/// Speed of light in atomic units.
pub const SPEED_OF_LIGHT: f64 = 137.035_999_084;

#[derive(Debug, Error)]
pub enum AmplitudeError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("line {line}: duplicate amplitude key {key}")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: unknown label `{label}`")]
    Dangling { line: usize, label: String },
    #[error("line {line}: {message}")]
    Coupling { line: usize, message: String },
    #[error("missing amplitude: {0}")]
    Lookup(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransitionKind {
    Photo,
    Electrostatic,
    Decay,
}

impl TransitionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TransitionKind::Photo => "photo",
            TransitionKind::Electrostatic => "electrostatic",
            TransitionKind::Decay => "decay",
        }
    }
}

/// Electric (`E`) or magnetic (`M`) multipole.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multipolarity {
    Electric,
    Magnetic,
}

impl Multipolarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Multipolarity::Electric => "E",
            Multipolarity::Magnetic => "M",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundStateLabel {
    pub id: String,
    pub config: String,
    pub j: AngularMomentum,
    /// Hartree.
    pub energy: Option<f64>,
    pub nuclear_spin: Option<AngularMomentum>,
    pub f: Option<AngularMomentum>,
}

impl BoundStateLabel {
    pub fn new(id: &str, two_j: i32) -> Self {
        BoundStateLabel {
            id: id.to_string(),
            config: String::new(),
            j: AngularMomentum::from_twice(two_j),
            energy: None,
            nuclear_spin: None,
            f: None,
        }
    }

    pub fn with_energy(mut self, energy: f64) -> Self {
        self.energy = Some(energy);
        self
    }

    pub fn with_hyperfine(mut self, two_i: i32, two_f: i32) -> Self {
        self.nuclear_spin = Some(AngularMomentum::from_twice(two_i));
        self.f = Some(AngularMomentum::from_twice(two_f));
        self
    }
}

/// One continuum electron partial wave `lambda (j)`, both doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialWave {
    pub two_lambda: i32,
    pub two_j: i32,
}

impl PartialWave {
    pub fn new(lambda: i32, two_j: i32) -> Self {
        PartialWave { two_lambda: 2 * lambda, two_j }
    }

    pub fn lambda(&self) -> i32 {
        self.two_lambda / 2
    }

    /// `|lambda - 1/2| <= j <= lambda + 1/2`.
    pub fn is_valid(&self) -> bool {
        self.two_lambda >= 0 && self.two_lambda % 2 == 0 && triangle(self.two_lambda, 1, self.two_j)
    }
}

impl fmt::Display for PartialWave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lambda={} j={}/2", self.lambda(), self.two_j)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChannelKind {
    /// One outgoing (or captured) electron coupled to the ion: `J_ion + j = J`.
    Single(PartialWave),
    /// Incoming and outgoing electron of a scattering event.
    Scattering { incoming: PartialWave, outgoing: PartialWave },
    /// Incoming electron plus two outgoing electrons coupled `j2 + j1 = j_pair`.
    Ionizing { incoming: PartialWave, out1: PartialWave, out2: PartialWave, two_j_pair: i32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuumChannel {
    pub id: String,
    /// Electron energy in hartree.
    pub epsilon: Option<f64>,
    pub kind: ChannelKind,
    /// Total angular momentum `J` of the coupled channel, doubled.
    pub two_j_total: i32,
}

impl ContinuumChannel {
    pub fn single(id: &str, lambda: i32, two_j: i32, two_j_total: i32) -> Self {
        ContinuumChannel {
            id: id.to_string(),
            epsilon: None,
            kind: ChannelKind::Single(PartialWave::new(lambda, two_j)),
            two_j_total,
        }
    }

    pub fn scattering(id: &str, incoming: PartialWave, outgoing: PartialWave, two_j_total: i32) -> Self {
        ContinuumChannel {
            id: id.to_string(),
            epsilon: None,
            kind: ChannelKind::Scattering { incoming, outgoing },
            two_j_total,
        }
    }

    pub fn ionizing(
        id: &str,
        incoming: PartialWave,
        out1: PartialWave,
        out2: PartialWave,
        two_j_pair: i32,
        two_j_total: i32,
    ) -> Self {
        ContinuumChannel {
            id: id.to_string(),
            epsilon: None,
            kind: ChannelKind::Ionizing { incoming, out1, out2, two_j_pair },
            two_j_total,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AmplitudeKey {
    pub kind: TransitionKind,
    pub bra: String,
    pub ket: String,
    pub channel: Option<String>,
    pub k: u32,
    pub p: Multipolarity,
}

impl AmplitudeKey {
    pub fn photo(bra: &str, ket: &str, channel: Option<&str>, k: u32, p: Multipolarity) -> Self {
        AmplitudeKey {
            kind: TransitionKind::Photo,
            bra: bra.to_string(),
            ket: ket.to_string(),
            channel: channel.map(str::to_string),
            k,
            p,
        }
    }

    pub fn decay(bra: &str, ket: &str, k: u32, p: Multipolarity) -> Self {
        AmplitudeKey { kind: TransitionKind::Decay, bra: bra.to_string(), ket: ket.to_string(), channel: None, k, p }
    }

    pub fn electrostatic(bra: &str, ket: &str, channel: &str) -> Self {
        AmplitudeKey {
            kind: TransitionKind::Electrostatic,
            bra: bra.to_string(),
            ket: ket.to_string(),
            channel: Some(channel.to_string()),
            k: 0,
            p: Multipolarity::Electric,
        }
    }
}

impl fmt::Display for AmplitudeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} <- {}", self.kind.as_str(), self.bra, self.ket)?;
        if let Some(c) = &self.channel {
            write!(f, ", channel {c}")?;
        }
        if self.kind != TransitionKind::Electrostatic {
            write!(f, ", {}{}", self.p.as_str(), self.k)?;
        }
        write!(f, ")")
    }
}

/// Validated, immutable set of reduced amplitudes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReducedAmplitudeTable {
    states: BTreeMap<String, BoundStateLabel>,
    channels: BTreeMap<String, ContinuumChannel>,
    entries: BTreeMap<AmplitudeKey, Complex64>,
}

/// Incremental construction with the same validation as the file loader.
#[derive(Default)]
pub struct TableBuilder {
    table: ReducedAmplitudeTable,
}

impl TableBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(self, s: BoundStateLabel) -> Result<Self, AmplitudeError> {
        self.state_at(s, 0)
    }

    pub fn channel(self, c: ContinuumChannel) -> Result<Self, AmplitudeError> {
        self.channel_at(c, 0)
    }

    pub fn amplitude(self, key: AmplitudeKey, value: Complex64) -> Result<Self, AmplitudeError> {
        self.amplitude_at(key, value, 0)
    }

    pub(crate) fn state_at(mut self, s: BoundStateLabel, line: usize) -> Result<Self, AmplitudeError> {
        validate_state(&s, line)?;
        if self.table.states.contains_key(&s.id) {
            return Err(AmplitudeError::Duplicate { line, key: format!("state {}", s.id) });
        }
        self.table.states.insert(s.id.clone(), s);
        Ok(self)
    }

    pub(crate) fn channel_at(mut self, c: ContinuumChannel, line: usize) -> Result<Self, AmplitudeError> {
        validate_channel(&c, line)?;
        if self.table.channels.contains_key(&c.id) {
            return Err(AmplitudeError::Duplicate { line, key: format!("channel {}", c.id) });
        }
        self.table.channels.insert(c.id.clone(), c);
        Ok(self)
    }

    pub(crate) fn amplitude_at(
        mut self,
        key: AmplitudeKey,
        value: Complex64,
        line: usize,
    ) -> Result<Self, AmplitudeError> {
        self.table.validate_key(&key, line)?;
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(AmplitudeError::Coupling { line, message: format!("non-finite value for {key}") });
        }
        if self.table.entries.contains_key(&key) {
            return Err(AmplitudeError::Duplicate { line, key: key.to_string() });
        }
        self.table.entries.insert(key, value);
        Ok(self)
    }

    pub fn build(self) -> ReducedAmplitudeTable {
        self.table
    }
}

fn coupling(line: usize, message: String) -> AmplitudeError {
    AmplitudeError::Coupling { line, message }
}

fn validate_state(s: &BoundStateLabel, line: usize) -> Result<(), AmplitudeError> {
    if s.j.twice() < 0 {
        return Err(coupling(line, format!("state {} has negative J", s.id)));
    }
    match (s.nuclear_spin, s.f) {
        (None, None) => Ok(()),
        (Some(i), Some(f)) => {
            if triangle(s.j.twice(), i.twice(), f.twice()) {
                Ok(())
            } else {
                Err(coupling(line, format!("state {}: F={} not reachable from J={} and I={}", s.id, f, s.j, i)))
            }
        }
        _ => Err(coupling(line, format!("state {}: nuclear spin and F must be given together", s.id))),
    }
}

fn validate_channel(c: &ContinuumChannel, line: usize) -> Result<(), AmplitudeError> {
    let waves: Vec<PartialWave> = match &c.kind {
        ChannelKind::Single(w) => vec![*w],
        ChannelKind::Scattering { incoming, outgoing } => vec![*incoming, *outgoing],
        ChannelKind::Ionizing { incoming, out1, out2, two_j_pair } => {
            if !triangle(out2.two_j, out1.two_j, *two_j_pair) {
                return Err(coupling(line, format!("channel {}: j1, j2 cannot couple to 2j={two_j_pair}", c.id)));
            }
            vec![*incoming, *out1, *out2]
        }
    };
    for w in waves {
        if !w.is_valid() {
            return Err(coupling(line, format!("channel {}: {} violates j = lambda +- 1/2", c.id, w)));
        }
    }
    if c.two_j_total < 0 {
        return Err(coupling(line, format!("channel {}: negative total J", c.id)));
    }
    Ok(())
}

impl ReducedAmplitudeTable {
    pub fn state(&self, id: &str) -> Option<&BoundStateLabel> {
        self.states.get(id)
    }

    pub fn channel(&self, id: &str) -> Option<&ContinuumChannel> {
        self.channels.get(id)
    }

    pub fn states(&self) -> impl Iterator<Item = &BoundStateLabel> {
        self.states.values()
    }

    pub fn channels(&self) -> impl Iterator<Item = &ContinuumChannel> {
        self.channels.values()
    }

    pub fn get(&self, key: &AmplitudeKey) -> Option<Complex64> {
        self.entries.get(key).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&AmplitudeKey, &Complex64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Same table with every value multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let mut t = self.clone();
        for v in t.entries.values_mut() {
            *v *= c;
        }
        t
    }

    fn validate_key(&self, key: &AmplitudeKey, line: usize) -> Result<(), AmplitudeError> {
        let dangling = |label: &str| AmplitudeError::Dangling { line, label: label.to_string() };
        let bra = self.states.get(&key.bra).ok_or_else(|| dangling(&key.bra))?;
        let ket = self.states.get(&key.ket).ok_or_else(|| dangling(&key.ket))?;
        let channel = match &key.channel {
            Some(c) => Some(self.channels.get(c).ok_or_else(|| dangling(c))?),
            None => None,
        };
        let (jb, jk) = (bra.j.twice(), ket.j.twice());
        let k2 = 2 * key.k as i32;
        let fail = |what: String| coupling(line, format!("{key}: {what}"));
        match key.kind {
            TransitionKind::Photo | TransitionKind::Decay => {
                if key.k < 1 {
                    return Err(fail("photon multipole order must be >= 1".into()));
                }
                match channel {
                    None => {
                        if !triangle(jb, k2, jk) {
                            return Err(fail(format!("triangle (J={}/2, k={}, J'={}/2) fails", jb, key.k, jk)));
                        }
                    }
                    Some(c) => {
                        if key.kind == TransitionKind::Decay {
                            return Err(fail("decay amplitudes take no continuum channel".into()));
                        }
                        let ChannelKind::Single(w) = c.kind else {
                            return Err(fail("photoionization needs a single-electron channel".into()));
                        };
                        if !triangle(jk, k2, c.two_j_total) || !triangle(jb, w.two_j, c.two_j_total) {
                            return Err(fail("channel total J not reachable".into()));
                        }
                    }
                }
            }
            TransitionKind::Electrostatic => {
                let Some(c) = channel else {
                    return Err(fail("electrostatic amplitudes need a channel".into()));
                };
                let ok = match c.kind {
                    ChannelKind::Single(w) => c.two_j_total == jk && triangle(jb, w.two_j, jk),
                    ChannelKind::Scattering { incoming, outgoing } => {
                        triangle(jk, incoming.two_j, c.two_j_total) && triangle(jb, outgoing.two_j, c.two_j_total)
                    }
                    ChannelKind::Ionizing { incoming, two_j_pair, .. } => {
                        triangle(jk, incoming.two_j, c.two_j_total) && triangle(jb, two_j_pair, c.two_j_total)
                    }
                };
                if !ok {
                    return Err(fail("channel coupling inconsistent with the bound states".into()));
                }
            }
        }
        Ok(())
    }

    /// Largest photon multipole order present.
    pub fn max_k(&self) -> u32 {
        self.entries.keys().filter(|k| k.kind != TransitionKind::Electrostatic).map(|k| k.k).max().unwrap_or(0)
    }
}

/// How photon multipole amplitudes are formed from the E/M reduced elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MultipoleMode {
    /// All orders with electric and magnetic parts.
    #[default]
    General,
    /// Electric dipole only, `sqrt(2 k0)` times the E1 element.
    Dipole,
}

fn double_factorial_odd(k: u32) -> f64 {
    // (2k-1)!!
    (1..=k).map(|i| f64::from(2 * i - 1)).product()
}

/// Photon multipole amplitude `Q^(k)` for helicity `+-1` from the electric
/// and magnetic reduced elements.
///
/// `k0^(k-1/2) sqrt((k+1)/k) i^k / (2k-1)!! x sum_p (-i helicity)^p Q^p`.
pub fn multipole_prefactor(k: u32, k0: f64, helicity: i32, p: Multipolarity) -> Complex64 {
    let kf = f64::from(k);
    let mag = k0.powf(kf - 0.5) * ((kf + 1.0) / kf).sqrt() / double_factorial_odd(k);
    let ik = Complex64::i().powu(k);
    let ph = match p {
        Multipolarity::Electric => Complex64::new(1.0, 0.0),
        Multipolarity::Magnetic => Complex64::new(0.0, -f64::from(helicity.signum())),
    };
    ik * ph * mag
}

/// Assembled `Q^(k)` reduced amplitude for one transition and helicity.
#[allow(clippy::too_many_arguments)]
pub fn assemble_photon_multipole(
    table: &ReducedAmplitudeTable,
    bra: &str,
    ket: &str,
    channel: Option<&str>,
    k: u32,
    photon_energy: f64,
    helicity: i32,
    mode: MultipoleMode,
) -> Result<Complex64, AmplitudeError> {
    let k0 = photon_energy / SPEED_OF_LIGHT;
    let e = table.get(&AmplitudeKey::photo(bra, ket, channel, k, Multipolarity::Electric));
    match mode {
        MultipoleMode::Dipole => {
            let key = AmplitudeKey::photo(bra, ket, channel, 1, Multipolarity::Electric);
            if k != 1 {
                return Err(AmplitudeError::Lookup(format!("{key}: dipole mode has only k=1")));
            }
            let v = e.ok_or_else(|| AmplitudeError::Lookup(key.to_string()))?;
            Ok(v * (2.0 * k0).sqrt())
        }
        MultipoleMode::General => {
            let m = table.get(&AmplitudeKey::photo(bra, ket, channel, k, Multipolarity::Magnetic));
            if e.is_none() && m.is_none() {
                return Err(AmplitudeError::Lookup(
                    AmplitudeKey::photo(bra, ket, channel, k, Multipolarity::Electric).to_string(),
                ));
            }
            let mut v = Complex64::new(0.0, 0.0);
            if let Some(e) = e {
                v += multipole_prefactor(k, k0, helicity, Multipolarity::Electric) * e;
            }
            if let Some(m) = m {
                v += multipole_prefactor(k, k0, helicity, Multipolarity::Magnetic) * m;
            }
            Ok(v)
        }
    }
}

/// Parenthesized reduced element between hyperfine levels from the
/// fine-structure one, `J0 -> J1` coupled with nuclear spin `I` into `F0 -> F1`.
///
/// `(-1)^{J1+I+F0+k} sqrt((2F0+1)(2F1+1)) {J1 F1 I; F0 J0 k} x (J1||Q||J0)`.
/// All arguments doubled; a broken triangle gives zero.
pub fn hyperfine_reduced_me(
    value: Complex64,
    two_j0: i32,
    two_j1: i32,
    two_i: i32,
    two_f0: i32,
    two_f1: i32,
    two_k: i32,
) -> Complex64 {
    if !(triangle(two_j0, two_i, two_f0) && triangle(two_j1, two_i, two_f1) && triangle(two_f0, two_k, two_f1)) {
        return Complex64::new(0.0, 0.0);
    }
    let w = six_j(two_j1, two_f1, two_i, two_f0, two_j0, two_k);
    let phase = if ((two_j1 + two_i + two_f0 + two_k) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    value * (phase * (f64::from((two_f0 + 1) * (two_f1 + 1))).sqrt() * w)
}

/// Parenthesized emission element `sqrt(2J2+1) k02 <J2||Q||J1>`; the flag is
/// set when the photon energy vanishes.
pub fn decay_reduced_me_normalization(value: Complex64, two_j2: i32, photon_energy: f64) -> (Complex64, bool) {
    let k02 = photon_energy / SPEED_OF_LIGHT;
    (value * (f64::from(two_j2 + 1).sqrt() * k02), photon_energy == 0.0)
}

/// Decay reduced element from a photon wave number given directly.
pub fn decay_reduced_me_wavenumber(value: Complex64, two_j2: i32, k02: f64) -> Complex64 {
    value * (f64::from(two_j2 + 1).sqrt() * k02)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn dipole_mode_prefactor() {
        let t = TableBuilder::new()
            .state(BoundStateLabel::new("g", 0))
            .unwrap()
            .state(BoundStateLabel::new("e", 2))
            .unwrap()
            .amplitude(AmplitudeKey::photo("e", "g", None, 1, Multipolarity::Electric), c(1.0))
            .unwrap()
            .build();
        let v =
            assemble_photon_multipole(&t, "e", "g", None, 1, 0.5 * SPEED_OF_LIGHT, 1, MultipoleMode::Dipole).unwrap();
        assert!((v - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn quadrupole_prefactor_magnitude() {
        let p = multipole_prefactor(2, 1.0, 1, Multipolarity::Electric);
        assert!((p.norm() - 1.5f64.sqrt() / 3.0).abs() < 1e-15);
        assert!((p.re + p.norm()).abs() < 1e-15);
    }

    #[test]
    fn decay_normalization_values() {
        let (v, _) = decay_reduced_me_normalization(c(1.0), 0, 2.0 * SPEED_OF_LIGHT);
        assert!((v.re - 2.0).abs() < 1e-14);
        let (v, _) = decay_reduced_me_normalization(c(1.0), 4, SPEED_OF_LIGHT);
        assert!((v.re - 5f64.sqrt()).abs() < 1e-14);
        let (v, flag) = decay_reduced_me_normalization(c(1.0), 4, 0.0);
        assert!(flag && v.norm() == 0.0);
    }

    #[test]
    fn hyperfine_identity_for_spinless_nucleus() {
        let v = Complex64::new(0.3, -0.7);
        for (j0, j1, k) in [(1, 3, 2), (2, 2, 2), (0, 4, 4), (3, 1, 2)] {
            let h = hyperfine_reduced_me(v, j0, j1, 0, j0, j1, k);
            assert!((h - v).norm() < 1e-14);
        }
        assert_eq!(hyperfine_reduced_me(v, 0, 2, 1, 1, 1, 4).norm(), 0.0);
    }
}
