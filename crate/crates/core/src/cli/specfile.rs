//! JSON process-spec files.
//!
//! A file holds one process object or `{"steps": [...]}` for a cascade:
//!
//! ```json
//! {
//!   "process": "photoionization",
//!   "initial": "g", "final": "ion",
//!   "k_max": 1, "photon_energy": 2.0,
//!   "particles": {
//!     "photon_in": {"direction": {"theta_deg": 0, "phi_deg": 0},
//!                   "polarization": {"kind": "helicity", "two_m": 2}},
//!     "electron_out": {"detected": true}
//!   },
//!   "scan": {"role": "electron_out", "phi_deg": 0}
//! }
//! ```

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::amplitudes::MultipoleMode;
use crate::angular::Direction;
use crate::processes::{ParticleSpec, ProcessKind, ProcessSpec, Resonance, Role};
use crate::tensors::PolarizationState;

#[derive(Debug, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SpecFileError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SpecFileError {
    fn at(e: &serde_json::Error) -> Self {
        SpecFileError { line: e.line(), column: e.column(), message: e.to_string() }
    }

    fn plain(message: String) -> Self {
        SpecFileError { line: 0, column: 0, message }
    }
}

#[derive(Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct DirectionRecord {
    theta_deg: f64,
    phi_deg: f64,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct PolarizationRecord {
    kind: String,
    #[serde(default)]
    axis: Option<DirectionRecord>,
    #[serde(default)]
    two_m: Option<i32>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct ParticleRecord {
    #[serde(default)]
    direction: Option<DirectionRecord>,
    #[serde(default)]
    polarization: Option<PolarizationRecord>,
    #[serde(default)]
    detected: Option<bool>,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct ResonanceRecord {
    energy: f64,
    width: f64,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct ScanRecord {
    role: String,
    #[serde(default)]
    phi_deg: Option<f64>,
}

#[derive(Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct ProcessRecord {
    process: String,
    initial: String,
    #[serde(rename = "final")]
    final_state: String,
    #[serde(default)]
    intermediate: Option<String>,
    #[serde(default = "one")]
    k_max: u32,
    #[serde(default)]
    photon_energy: Option<f64>,
    #[serde(default)]
    electron_energy: Option<f64>,
    #[serde(default)]
    ionization_potential: Option<f64>,
    #[serde(default)]
    resonance: Option<ResonanceRecord>,
    #[serde(default)]
    multipole_mode: Option<String>,
    #[serde(default)]
    particles: BTreeMap<String, ParticleRecord>,
    #[serde(default)]
    scan: Option<ScanRecord>,
}

fn one() -> u32 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CascadeRecord {
    steps: Vec<serde_json::Value>,
}

/// Angle scanned by a run: the direction of `role` at polar angle theta in
/// the half-plane `phi_deg`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scan {
    pub role: Role,
    pub phi_deg: f64,
}

/// A parsed spec file: one or more steps and the scanned particle of the last.
#[derive(Clone, Debug)]
pub struct SpecFile {
    pub steps: Vec<ProcessSpec>,
    pub scan: Scan,
}

impl SpecFile {
    pub fn is_cascade(&self) -> bool {
        self.steps.len() > 1
    }

    pub fn last(&self) -> &ProcessSpec {
        self.steps.last().expect("at least one step")
    }
}

fn direction(d: DirectionRecord) -> Result<Direction, String> {
    Direction::from_degrees(d.theta_deg, d.phi_deg).map_err(|e| e.to_string())
}

fn polarization(p: &PolarizationRecord, beam: Direction) -> Result<PolarizationState, String> {
    let axis = match p.axis {
        Some(a) => direction(a)?,
        None => Direction::z(),
    };
    match p.kind.as_str() {
        "unpolarized" => Ok(PolarizationState::unpolarized()),
        "projection" => {
            let m = p.two_m.ok_or("projection polarization needs `two_m`")?;
            Ok(PolarizationState::projection(m, axis))
        }
        "helicity" => match p.two_m {
            Some(2) => Ok(PolarizationState::helicity(1, beam)),
            Some(-2) => Ok(PolarizationState::helicity(-1, beam)),
            _ => Err("helicity polarization needs `two_m` of 2 or -2".into()),
        },
        other => Err(format!("unknown polarization kind `{other}`")),
    }
}

/// Particle emitted or scattered into the detector by default.
pub fn default_scan_role(kind: ProcessKind) -> Role {
    match kind {
        ProcessKind::Photoexcitation => Role::PhotonIn,
        ProcessKind::RadRecombination | ProcessKind::RadDecay | ProcessKind::DielectronicRecombination => {
            Role::PhotonOut
        }
        _ => Role::ElectronOut,
    }
}

fn build(r: ProcessRecord) -> Result<(ProcessSpec, Option<ScanRecord>), String> {
    let kind = ProcessKind::parse(&r.process).ok_or_else(|| format!("unknown process `{}`", r.process))?;
    let mut spec = ProcessSpec::new(kind, &r.initial, &r.final_state);
    spec.intermediate = r.intermediate;
    spec.k_max = r.k_max;
    spec.photon_energy = r.photon_energy;
    spec.electron_energy = r.electron_energy;
    spec.ionization_potential = r.ionization_potential;
    spec.resonance = r.resonance.map(|x| Resonance { energy: x.energy, width: x.width });
    spec.multipole_mode = match r.multipole_mode.as_deref() {
        None | Some("general") => MultipoleMode::General,
        Some("dipole") => MultipoleMode::Dipole,
        Some(other) => return Err(format!("unknown multipole_mode `{other}`")),
    };
    for (name, p) in &r.particles {
        let role = Role::parse(name).ok_or_else(|| format!("unknown particle role `{name}`"))?;
        if !spec.roles().contains(&role) {
            return Err(format!("{} has no particle `{name}`", kind.as_str()));
        }
        let dir = match p.direction {
            Some(d) => direction(d)?,
            None => Direction::z(),
        };
        let pol = match &p.polarization {
            Some(x) => polarization(x, dir)?,
            None => PolarizationState::unpolarized(),
        };
        let beam = matches!(role, Role::PhotonIn | Role::ElectronIn);
        let detected = beam || p.detected.unwrap_or(p.direction.is_some());
        spec.set_particle(role, ParticleSpec { polarization: pol, direction: dir, detected });
    }
    for role in [Role::PhotonIn, Role::ElectronIn] {
        if spec.roles().contains(&role) && !spec.particles.contains_key(&role) {
            spec.set_particle(role, ParticleSpec { detected: true, ..ParticleSpec::default() });
        }
    }
    Ok((spec, r.scan))
}

fn step(v: &serde_json::Value) -> Result<(ProcessSpec, Option<ScanRecord>), SpecFileError> {
    let r: ProcessRecord = serde_json::from_value(v.clone()).map_err(|e| SpecFileError::plain(e.to_string()))?;
    build(r).map_err(SpecFileError::plain)
}

/// Parses a spec file; errors carry the line and column of the offending JSON.
pub fn parse_spec(src: &str) -> Result<SpecFile, SpecFileError> {
    let value: serde_json::Value = serde_json::from_str(src).map_err(|e| SpecFileError::at(&e))?;
    let (steps, scan) = if value.get("steps").is_some() {
        let c: CascadeRecord = serde_json::from_str(src).map_err(|e| SpecFileError::at(&e))?;
        if c.steps.len() < 2 {
            return Err(SpecFileError::plain("a cascade needs at least two steps".into()));
        }
        let mut steps = Vec::new();
        let mut scan = None;
        for (i, v) in c.steps.iter().enumerate() {
            let (s, sc) = step(v).map_err(|e| SpecFileError::plain(format!("step {}: {}", i + 1, e.message)))?;
            steps.push(s);
            scan = sc.or(scan);
        }
        (steps, scan)
    } else {
        let r: ProcessRecord = serde_json::from_str(src).map_err(|e| SpecFileError::at(&e))?;
        let (s, sc) = build(r).map_err(SpecFileError::plain)?;
        (vec![s], sc)
    };
    let last = steps.last().expect("nonempty");
    let scan = match scan {
        Some(s) => {
            let role =
                Role::parse(&s.role).ok_or_else(|| SpecFileError::plain(format!("unknown scan role `{}`", s.role)))?;
            if !last.roles().contains(&role) {
                return Err(SpecFileError::plain(format!(
                    "{} has no particle `{}` to scan",
                    last.kind.as_str(),
                    s.role
                )));
            }
            Scan { role, phi_deg: s.phi_deg.unwrap_or_else(|| last.particle(role).direction.phi().to_degrees()) }
        }
        None => {
            let role = default_scan_role(last.kind);
            Scan { role, phi_deg: last.particle(role).direction.phi().to_degrees() }
        }
    };
    Ok(SpecFile { steps, scan })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_process_defaults() {
        let f = parse_spec(r#"{"process": "photoionization", "initial": "g", "final": "i", "photon_energy": 1.0}"#)
            .unwrap();
        assert_eq!(f.steps.len(), 1);
        assert_eq!(f.scan.role, Role::ElectronOut);
        assert!(f.steps[0].particle(Role::PhotonIn).detected);
        assert_eq!(f.steps[0].k_max, 1);
    }

    #[test]
    fn helicity_follows_beam() {
        let src = r#"{"process": "photoexcitation", "initial": "g", "final": "e",
            "particles": {"photon_in": {"direction": {"theta_deg": 90, "phi_deg": 0},
                                        "polarization": {"kind": "helicity", "two_m": -2}}}}"#;
        let f = parse_spec(src).unwrap();
        let p = f.steps[0].particle(Role::PhotonIn);
        assert_eq!(p.polarization.helicity_twice(), Some(-2));
        assert!((p.polarization.axis.theta() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn errors_name_the_line() {
        let src = "{\n  \"process\": \"auger\",\n  \"initial\": 3\n}";
        let e = parse_spec(src).unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn unknown_role_is_rejected() {
        let src = r#"{"process": "auger", "initial": "a", "final": "b", "particles": {"photon_in": {}}}"#;
        assert!(parse_spec(src).is_err());
    }

    #[test]
    fn cascade_takes_scan_from_steps() {
        let src = r#"{"steps": [
            {"process": "photoionization", "initial": "g", "final": "i", "photon_energy": 1.0},
            {"process": "auger", "initial": "i", "final": "f", "scan": {"role": "electron_out", "phi_deg": 45}}
        ]}"#;
        let f = parse_spec(src).unwrap();
        assert!(f.is_cascade());
        assert_eq!(f.scan, Scan { role: Role::ElectronOut, phi_deg: 45.0 });
    }
}
