//! Brute-force reference evaluators.
//!
//! Every observable is computed by building the transition amplitude for each
//! set of magnetic quantum numbers from Clebsch-Gordan coefficients, rotation
//! matrices and spherical harmonics, then summing `|amplitude|^2`. Nothing here
//! uses state multipoles or recoupling coefficients, so agreement with the
//! `processes` expansions is a check of the whole angular algebra.
//!
//! Bound states polarized along an axis enter through `D^J(axis)` (prepared)
//! or its conjugate (detected); unpolarized states are averaged when prepared
//! and summed when detected. Unobserved outgoing directions are integrated
//! analytically from the orthogonality of `Y_lm` and `D^k_{q'q}` on the sphere.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::amplitudes::{ReducedAmplitudeTable, SPEED_OF_LIGHT};
use crate::angular::{clebsch_gordan, spherical_y, wigner_d, Direction};
use crate::processes::spec::{
    absorbed_helicities, electron_momentum, emitted_helicities, recombination_photon_energy, resolve_auger,
    resolve_dielectronic, resolve_emission, resolve_ionizing, resolve_photoexcitation, resolve_photoionization,
    resolve_recombination, resolve_scattering, AugerSystem, BoundTransition, EmissionSystem, IonizingSystem,
    ParticleSpec, PhotoionizationSystem, ProcessError, ProcessKind, ProcessSpec, Role, ScatteringSystem,
};
use crate::tensors::PolarizationKind;

const FOUR_PI: f64 = 4.0 * PI;
const SPIN: i32 = 1;
/// Refuse systems whose projection sums exceed this many terms.
pub const MAX_TERMS: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    /// Number of `|amplitude|^2` terms added.
    pub terms_summed: u64,
    pub max_term: f64,
}

type Key = [i32; 8];

/// Amplitude resolved over the labels of unobserved outgoing directions.
#[derive(Clone, Debug, Default)]
struct Amp(BTreeMap<Key, Complex64>);

impl Amp {
    fn add(&mut self, key: Key, v: Complex64) {
        if v != Complex64::new(0.0, 0.0) {
            *self.0.entry(key).or_default() += v;
        }
    }

    fn scale_add(&mut self, other: &Amp, c: Complex64) {
        for (k, v) in &other.0 {
            self.add(*k, v * c);
        }
    }

    /// Outer product; labels of the two factors occupy disjoint slots.
    fn product(&self, other: &Amp) -> Amp {
        let mut out = Amp::default();
        for (ka, va) in &self.0 {
            for (kb, vb) in &other.0 {
                let mut k = *ka;
                for i in 0..8 {
                    k[i] += kb[i];
                }
                out.add(k, va * vb);
            }
        }
        out
    }

    fn conj(&self) -> Amp {
        Amp(self.0.iter().map(|(k, v)| (*k, v.conj())).collect())
    }
}

#[derive(Default)]
struct Accumulator {
    value: f64,
    terms: u64,
    max_term: f64,
}

impl Accumulator {
    fn add(&mut self, weight: f64, amp: &Amp) {
        for v in amp.0.values() {
            let t = weight * v.norm_sqr();
            self.value += t;
            self.terms += 1;
            self.max_term = self.max_term.max(t);
        }
    }

    fn finish(self, constant: f64) -> OracleResult {
        OracleResult { value: constant * self.value, terms_summed: self.terms, max_term: constant * self.max_term }
    }
}

fn projections(two_j: i32) -> impl Iterator<Item = i32> + Clone {
    (-two_j..=two_j).step_by(2)
}

fn idx(two_j: i32, two_m: i32) -> usize {
    ((two_m + two_j) / 2) as usize
}

fn rot_d(two_j: i32, mp: i32, m: i32, dir: &Direction) -> Complex64 {
    wigner_d(two_j, mp, m, dir.phi(), dir.theta(), 0.0)
}

/// Coefficient vectors over lab-frame projections with statistical weights.
/// Prepared states carry `D^J_{M'M}(axis)`, detected ones its conjugate.
fn state_options(two_j: i32, p: &ParticleSpec, prepared: bool) -> Vec<(f64, Vec<Complex64>)> {
    let dim = (two_j + 1) as usize;
    match p.polarization.kind {
        PolarizationKind::Projection(m) => {
            let m = m.twice();
            let v = projections(two_j)
                .map(|mt| {
                    let d = rot_d(two_j, mt, m, &p.polarization.axis);
                    if prepared {
                        d
                    } else {
                        d.conj()
                    }
                })
                .collect();
            vec![(1.0, v)]
        }
        _ => {
            let w = if prepared { 1.0 / dim as f64 } else { 1.0 };
            (0..dim)
                .map(|i| {
                    let mut v = vec![Complex64::new(0.0, 0.0); dim];
                    v[i] = Complex64::new(1.0, 0.0);
                    (w, v)
                })
                .collect()
        }
    }
}

fn unit_vectors(two_j: i32) -> Vec<Vec<Complex64>> {
    let dim = (two_j + 1) as usize;
    (0..dim)
        .map(|i| {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            v[i] = Complex64::new(1.0, 0.0);
            v
        })
        .collect()
}

/// Angular factor of an outgoing electron in partial wave `(lambda, mu)`:
/// `sqrt(4pi) Y_{lambda mu}` when detected, otherwise an orthogonal label.
fn electron_out(dir: Option<&Direction>, two_l: i32, two_mu: i32, slot: usize) -> (Key, Complex64) {
    let mut key = [0; 8];
    match dir {
        Some(d) => (key, spherical_y(two_l, two_mu, d.theta(), d.phi()) * FOUR_PI.sqrt()),
        None => {
            key[slot] = two_l + 1;
            key[slot + 1] = two_mu + 101;
            (key, Complex64::new(FOUR_PI.sqrt(), 0.0))
        }
    }
}

/// Emitted-photon factor `D*^k_{q' q}(k)` or, integrated, an orthogonal label
/// with weight `sqrt(4pi/(2k+1))`.
fn photon_out(dir: Option<&Direction>, two_k: i32, two_qt: i32, two_q: i32, slot: usize) -> (Key, Complex64) {
    let mut key = [0; 8];
    match dir {
        Some(d) => (key, rot_d(two_k, two_qt, two_q, d).conj()),
        None => {
            key[slot] = two_k + 1;
            key[slot + 1] = two_qt + 101;
            (key, Complex64::new((FOUR_PI / f64::from(two_k + 1)).sqrt(), 0.0))
        }
    }
}

fn check_size(estimate: f64) -> Result<(), ProcessError> {
    if estimate > MAX_TERMS {
        Err(ProcessError::TooLarge(estimate))
    } else {
        Ok(())
    }
}

/// `sum_{sigma} <lambda mu 1/2 sigma | j m_j> c_s[sigma] x electron factor`, accumulated into `out`.
#[allow(clippy::too_many_arguments)]
fn add_electron(
    out: &mut Amp,
    pre: Complex64,
    two_l: i32,
    two_j: i32,
    two_mj: i32,
    spin: &[Complex64],
    dir: Option<&Direction>,
    slot: usize,
    incoming: bool,
) {
    for sg in projections(SPIN) {
        let cs = spin[idx(SPIN, sg)];
        if cs == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mu = two_mj - sg;
        if mu.abs() > two_l {
            continue;
        }
        let c = clebsch_gordan(two_l, mu, SPIN, sg, two_j, two_mj);
        if c == 0.0 {
            continue;
        }
        let (key, f) = if incoming {
            let d = dir.expect("incoming electron has a beam direction");
            ([0; 8], spherical_y(two_l, mu, d.theta(), d.phi()).conj() * FOUR_PI.sqrt())
        } else {
            electron_out(dir, two_l, mu, slot)
        };
        out.add(key, pre * cs * c * f);
    }
}

// ---------------------------------------------------------------------------
// photon absorption

/// Bound-bound absorption amplitude per final lab projection.
fn excitation_amp(sys: &BoundTransition, c0: &[Complex64], two_q: i32, beam: &Direction) -> Vec<Amp> {
    let (j0, j1) = (sys.two_j0, sys.two_j1);
    let mut out = vec![Amp::default(); (j1 + 1) as usize];
    for m in &sys.multipoles {
        let k = m.two_k;
        let a = m.at(two_q);
        for qt in projections(k) {
            let dk = rot_d(k, qt, two_q, beam);
            for m0 in projections(j0) {
                let m1 = m0 + qt;
                if m1.abs() > j1 {
                    continue;
                }
                let v = match &sys.hyperfine {
                    None => clebsch_gordan(j0, m0, k, qt, j1, m1) * a,
                    Some(h) => {
                        let fine = h.fine.iter().find(|f| f.two_k == k).map(|f| f.at(two_q)).unwrap_or_default();
                        hyperfine_element(h.two_j0, h.two_j1, h.two_i, j0, m0, j1, m1, k, qt) * fine
                    }
                };
                out[idx(j1, m1)].add([0; 8], v * dk * c0[idx(j0, m0)]);
            }
        }
    }
    out
}

/// `<(J1 I) F1 M1 | T^k_q | (J0 I) F0 M0>` for a fine-structure element of one.
#[allow(clippy::too_many_arguments)]
fn hyperfine_element(j0: i32, j1: i32, i: i32, f0: i32, mf0: i32, f1: i32, mf1: i32, k: i32, q: i32) -> f64 {
    let mut s = 0.0;
    for mi in projections(i) {
        let (mj0, mj1) = (mf0 - mi, mf1 - mi);
        if mj0.abs() > j0 || mj1.abs() > j1 {
            continue;
        }
        s += clebsch_gordan(j1, mj1, i, mi, f1, mf1)
            * clebsch_gordan(j0, mj0, i, mi, f0, mf0)
            * clebsch_gordan(j0, mj0, k, q, j1, mj1);
    }
    s
}

/// Photoionization amplitude per ion lab projection; the electron occupies label slots 0-1.
fn ionization_amp(
    sys: &PhotoionizationSystem,
    c0: &[Complex64],
    two_q: i32,
    beam: &Direction,
    spin: &[Complex64],
    p: Option<&Direction>,
) -> Vec<Amp> {
    let (j0, j1) = (sys.two_j0, sys.two_j1);
    let mut out = vec![Amp::default(); (j1 + 1) as usize];
    for ca in &sys.amplitudes {
        let ch = sys.channels[ca.channel];
        let (l, j, jt) = (ch.wave.two_lambda, ch.wave.two_j, ch.two_j_total);
        let k = ca.amp.two_k;
        let a = ca.amp.at(two_q);
        for qt in projections(k) {
            let dk = rot_d(k, qt, two_q, beam);
            for m0 in projections(j0) {
                let mt = m0 + qt;
                if mt.abs() > jt {
                    continue;
                }
                let c3 = clebsch_gordan(j0, m0, k, qt, jt, mt);
                if c3 == 0.0 {
                    continue;
                }
                let pre = a * dk * c0[idx(j0, m0)] * c3;
                for m1 in projections(j1) {
                    let mj = mt - m1;
                    if mj.abs() > j {
                        continue;
                    }
                    let c2 = clebsch_gordan(j1, m1, j, mj, jt, mt);
                    if c2 != 0.0 {
                        add_electron(&mut out[idx(j1, m1)], pre * c2, l, j, mj, spin, p, 0, false);
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// decay of a lab-frame projection M1

/// Auger emission from `|J1 M1>`; `c2` selects the final state, electron in slots `slot..slot+2`.
fn auger_amp(
    sys: &AugerSystem,
    two_m1: i32,
    c2: &[Complex64],
    spin: &[Complex64],
    p: Option<&Direction>,
    slot: usize,
) -> Amp {
    let (j1, j2) = (sys.two_j1, sys.two_j2);
    let mut out = Amp::default();
    for (w, c) in &sys.channels {
        for m2 in projections(j2) {
            let cf = c2[idx(j2, m2)];
            if cf == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mj = two_m1 - m2;
            if mj.abs() > w.two_j {
                continue;
            }
            let cg = clebsch_gordan(j2, m2, w.two_j, mj, j1, two_m1);
            if cg != 0.0 {
                add_electron(&mut out, c * cf * cg, w.two_lambda, w.two_j, mj, spin, p, slot, false);
            }
        }
    }
    out
}

/// Photon emission from `|J1 M1>` with helicity `q`; photon labels in slots `slot..slot+2`.
fn emission_amp(
    sys: &EmissionSystem,
    two_m1: i32,
    c2: &[Complex64],
    two_q: i32,
    k_dir: Option<&Direction>,
    slot: usize,
) -> Amp {
    let (j1, j2) = (sys.two_j1, sys.two_j2);
    let mut out = Amp::default();
    for (k, b) in &sys.multipoles {
        for qt in projections(*k) {
            let m2 = two_m1 - qt;
            if m2.abs() > j2 {
                continue;
            }
            let cf = c2[idx(j2, m2)];
            // adjoint of the absorption operator: (-1)^q Q^k_{-q}
            let sign = if (qt / 2).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
            let cg = sign * clebsch_gordan(j1, two_m1, *k, -qt, j2, m2);
            if cg == 0.0 || cf == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (key, f) = photon_out(k_dir, *k, qt, two_q, slot);
            out.add(key, b * cf * cg * f);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// single-step observables

pub fn photoexcitation(sys: &BoundTransition, spec: &ProcessSpec) -> Result<OracleResult, ProcessError> {
    let (target, photon, residual) =
        (spec.particle(Role::Target), spec.particle(Role::PhotonIn), spec.particle(Role::Residual));
    check_size(f64::from((sys.two_j0 + 1) * (sys.two_j1 + 1)).powi(2) * 8.0 * sys.multipoles.len() as f64)?;
    let mut acc = Accumulator::default();
    for (w0, c0) in state_options(sys.two_j0, &target, true) {
        for (q, wq) in absorbed_helicities(&photon) {
            let amps = excitation_amp(sys, &c0, q, &photon.direction);
            for (w1, c1) in state_options(sys.two_j1, &residual, false) {
                let mut a = Amp::default();
                for (m, am) in amps.iter().enumerate() {
                    a.scale_add(am, c1[m]);
                }
                acc.add(w0 * wq * w1, &a);
            }
        }
    }
    Ok(acc.finish(2.0 * PI * PI))
}

fn spin_options(p: &ParticleSpec, prepared: bool) -> Vec<(f64, Vec<Complex64>)> {
    state_options(SPIN, p, prepared)
}

pub fn photoionization(sys: &PhotoionizationSystem, spec: &ProcessSpec) -> Result<OracleResult, ProcessError> {
    let target = spec.particle(Role::Target);
    let photon = spec.particle(Role::PhotonIn);
    let residual = spec.particle(Role::Residual);
    let electron = spec.particle(Role::ElectronOut);
    check_size(f64::from((sys.two_j0 + 1) * (sys.two_j1 + 1)).powi(2) * 32.0 * sys.amplitudes.len() as f64)?;
    let mut acc = Accumulator::default();
    for (w0, c0) in state_options(sys.two_j0, &target, true) {
        for (q, wq) in absorbed_helicities(&photon) {
            for (ws, cs) in spin_options(&electron, false) {
                let amps = ionization_amp(sys, &c0, q, &photon.direction, &cs, electron.detector());
                for (w1, c1) in state_options(sys.two_j1, &residual, false) {
                    let mut a = Amp::default();
                    for (m, am) in amps.iter().enumerate() {
                        a.scale_add(am, c1[m]);
                    }
                    acc.add(w0 * wq * ws * w1, &a);
                }
            }
        }
    }
    Ok(acc.finish(PI))
}

fn conj_vec(v: &[Complex64]) -> Vec<Complex64> {
    v.iter().map(|c| c.conj()).collect()
}

/// Radiative recombination as the time reverse of photoionization: the
/// amplitude is the complex conjugate of the photoionization amplitude with
/// the ion prepared, the atom detected and the photon emitted.
pub fn recombination(
    sys: &PhotoionizationSystem,
    spec: &ProcessSpec,
    photon_energy: f64,
) -> Result<OracleResult, ProcessError> {
    let ion = spec.particle(Role::Target);
    let electron = spec.particle(Role::ElectronIn);
    let atom = spec.particle(Role::Residual);
    let photon = spec.particle(Role::PhotonOut);
    let e0 = spec.electron_energy.ok_or_else(|| ProcessError::Spec("electron_energy missing".into()))?;
    check_size(f64::from((sys.two_j0 + 1) * (sys.two_j1 + 1)).powi(2) * 32.0 * sys.amplitudes.len() as f64)?;
    let mut acc = Accumulator::default();
    for (wi, ci) in state_options(sys.two_j1, &ion, true) {
        let ci_pi = conj_vec(&ci);
        for (ws, cs) in spin_options(&electron, true) {
            let cs_pi = conj_vec(&cs);
            for (wa, ca) in state_options(sys.two_j0, &atom, false) {
                let ca_pi = conj_vec(&ca);
                for (q, wq) in emitted_helicities(&photon) {
                    let a = recombination_amp(sys, &ca_pi, q, &photon, &cs_pi, &electron.direction, &ci_pi);
                    acc.add(wi * ws * wa * wq, &a.conj());
                }
            }
        }
    }
    let alpha_e = photon_energy / SPEED_OF_LIGHT;
    Ok(acc.finish(PI * alpha_e * alpha_e / (2.0 * e0)))
}

/// Photoionization amplitude summed against the ion coefficients, with the
/// photon factor integrated when the photon is not observed.
fn recombination_amp(
    sys: &PhotoionizationSystem,
    c_atom: &[Complex64],
    two_q: i32,
    photon: &ParticleSpec,
    spin: &[Complex64],
    p: &Direction,
    c_ion: &[Complex64],
) -> Amp {
    let (j0, j1) = (sys.two_j0, sys.two_j1);
    let mut out = Amp::default();
    for ca in &sys.amplitudes {
        let ch = sys.channels[ca.channel];
        let (l, j, jt) = (ch.wave.two_lambda, ch.wave.two_j, ch.two_j_total);
        let k = ca.amp.two_k;
        let a = ca.amp.at(two_q);
        for qt in projections(k) {
            // conjugated again with the whole amplitude, so this is D^k(k)
            let (key, f) = photon_out(photon.detector(), k, qt, two_q, 2);
            let f = f.conj();
            for m0 in projections(j0) {
                let mt = m0 + qt;
                if mt.abs() > jt {
                    continue;
                }
                let c3 = clebsch_gordan(j0, m0, k, qt, jt, mt);
                if c3 == 0.0 {
                    continue;
                }
                for m1 in projections(j1) {
                    let mj = mt - m1;
                    if mj.abs() > j {
                        continue;
                    }
                    let c2 = clebsch_gordan(j1, m1, j, mj, jt, mt);
                    if c2 == 0.0 {
                        continue;
                    }
                    let mut e = Amp::default();
                    add_electron(&mut e, Complex64::new(1.0, 0.0), l, j, mj, spin, Some(p), 0, false);
                    let pre = a * f * c0_at(c_atom, j0, m0) * c3 * c2 * c_ion[idx(j1, m1)];
                    for v in e.0.values() {
                        out.add(key, pre * v);
                    }
                }
            }
        }
    }
    out
}

fn c0_at(c: &[Complex64], two_j: i32, two_m: i32) -> Complex64 {
    c[idx(two_j, two_m)]
}

pub fn e_excitation(sys: &ScatteringSystem, spec: &ProcessSpec) -> Result<OracleResult, ProcessError> {
    let e0 = spec.electron_energy.ok_or_else(|| ProcessError::Spec("electron_energy missing".into()))?;
    let target = spec.particle(Role::Target);
    let e_in = spec.particle(Role::ElectronIn);
    let residual = spec.particle(Role::Residual);
    let e_out = spec.particle(Role::ElectronOut);
    check_size(f64::from((sys.two_j0 + 1) * (sys.two_j1 + 1)).powi(2) * 64.0 * sys.amplitudes.len() as f64)?;
    let mut acc = Accumulator::default();
    for (w0, c0) in state_options(sys.two_j0, &target, true) {
        for (ws0, cs0) in spin_options(&e_in, true) {
            for (w1, c1) in state_options(sys.two_j1, &residual, false) {
                for (ws1, cs1) in spin_options(&e_out, false) {
                    let mut a = Amp::default();
                    for h in &sys.amplitudes {
                        scattering_term(
                            &mut a,
                            h.value,
                            sys.two_j0,
                            &c0,
                            h.incoming.two_lambda,
                            h.incoming.two_j,
                            &cs0,
                            &e_in.direction,
                            h.two_j_total,
                            &mut |out, pre, two_mt| {
                                for m1 in projections(sys.two_j1) {
                                    let mj1 = two_mt - m1;
                                    if mj1.abs() > h.outgoing.two_j {
                                        continue;
                                    }
                                    let cg =
                                        clebsch_gordan(sys.two_j1, m1, h.outgoing.two_j, mj1, h.two_j_total, two_mt);
                                    if cg != 0.0 {
                                        add_electron(
                                            out,
                                            pre * cg * c1[idx(sys.two_j1, m1)],
                                            h.outgoing.two_lambda,
                                            h.outgoing.two_j,
                                            mj1,
                                            &cs1,
                                            e_out.detector(),
                                            0,
                                            false,
                                        );
                                    }
                                }
                            },
                        );
                    }
                    acc.add(w0 * ws0 * w1 * ws1, &a);
                }
            }
        }
    }
    let p0 = electron_momentum(e0);
    Ok(acc.finish(4.0 * PI.powi(4) / (p0 * p0)))
}

/// Incoming half of an electron-impact amplitude: target plus incoming
/// electron coupled to total `(J, M)`, handed to `rest` for each `M`.
#[allow(clippy::too_many_arguments)]
fn scattering_term(
    out: &mut Amp,
    h: Complex64,
    two_j0: i32,
    c0: &[Complex64],
    two_l0: i32,
    two_jj0: i32,
    cs0: &[Complex64],
    p0: &Direction,
    two_jt: i32,
    rest: &mut dyn FnMut(&mut Amp, Complex64, i32),
) {
    for mt in projections(two_jt) {
        let mut pre = Amp::default();
        for m0 in projections(two_j0) {
            let mj0 = mt - m0;
            if mj0.abs() > two_jj0 {
                continue;
            }
            let cg = clebsch_gordan(two_j0, m0, two_jj0, mj0, two_jt, mt);
            if cg != 0.0 {
                add_electron(&mut pre, h * cg * c0[idx(two_j0, m0)], two_l0, two_jj0, mj0, cs0, Some(p0), 0, true);
            }
        }
        let v: Complex64 = pre.0.values().sum();
        if v != Complex64::new(0.0, 0.0) {
            rest(out, v, mt);
        }
    }
}

pub fn e_ionization(sys: &IonizingSystem, spec: &ProcessSpec) -> Result<OracleResult, ProcessError> {
    let e0 = spec.electron_energy.ok_or_else(|| ProcessError::Spec("electron_energy missing".into()))?;
    let target = spec.particle(Role::Target);
    let e_in = spec.particle(Role::ElectronIn);
    let residual = spec.particle(Role::Residual);
    let e1 = spec.particle(Role::ElectronOut);
    let e2 = spec.particle(Role::ElectronOut2);
    check_size(f64::from((sys.two_j0 + 1) * (sys.two_j1 + 1)).powi(2) * 512.0 * sys.amplitudes.len() as f64)?;
    let mut acc = Accumulator::default();
    for (w0, c0) in state_options(sys.two_j0, &target, true) {
        for (ws0, cs0) in spin_options(&e_in, true) {
            for (w1, c1) in state_options(sys.two_j1, &residual, false) {
                for (ws1, cs1) in spin_options(&e1, false) {
                    for (ws2, cs2) in spin_options(&e2, false) {
                        let mut a = Amp::default();
                        for h in &sys.amplitudes {
                            let jp = h.two_j_pair;
                            scattering_term(
                                &mut a,
                                h.value,
                                sys.two_j0,
                                &c0,
                                h.incoming.two_lambda,
                                h.incoming.two_j,
                                &cs0,
                                &e_in.direction,
                                h.two_j_total,
                                &mut |out, pre, two_mt| {
                                    for m1 in projections(sys.two_j1) {
                                        let mj = two_mt - m1;
                                        if mj.abs() > jp {
                                            continue;
                                        }
                                        let cg = clebsch_gordan(sys.two_j1, m1, jp, mj, h.two_j_total, two_mt);
                                        if cg == 0.0 {
                                            continue;
                                        }
                                        let pre = pre * cg * c1[idx(sys.two_j1, m1)];
                                        for mj2 in projections(h.out2.two_j) {
                                            let mj1 = mj - mj2;
                                            if mj1.abs() > h.out1.two_j {
                                                continue;
                                            }
                                            let cp = clebsch_gordan(h.out2.two_j, mj2, h.out1.two_j, mj1, jp, mj);
                                            if cp == 0.0 {
                                                continue;
                                            }
                                            let mut a1 = Amp::default();
                                            add_electron(
                                                &mut a1,
                                                Complex64::new(1.0, 0.0),
                                                h.out1.two_lambda,
                                                h.out1.two_j,
                                                mj1,
                                                &cs1,
                                                e1.detector(),
                                                0,
                                                false,
                                            );
                                            let mut a2 = Amp::default();
                                            add_electron(
                                                &mut a2,
                                                Complex64::new(1.0, 0.0),
                                                h.out2.two_lambda,
                                                h.out2.two_j,
                                                mj2,
                                                &cs2,
                                                e2.detector(),
                                                2,
                                                false,
                                            );
                                            out.scale_add(&a1.product(&a2), pre * cp);
                                        }
                                    }
                                },
                            );
                        }
                        acc.add(w0 * ws0 * w1 * ws1 * ws2, &a);
                    }
                }
            }
        }
    }
    let p0 = electron_momentum(e0);
    Ok(acc.finish(4.0 * PI.powi(4) / (p0 * p0)))
}

// ---------------------------------------------------------------------------
// sequential processes

/// Population-producing first step of a cascade.
pub enum FirstStep<'a> {
    Photoexcitation(&'a BoundTransition, &'a ProcessSpec),
    Photoionization(&'a PhotoionizationSystem, &'a ProcessSpec),
    /// A level of doubled momentum `2J` prepared as described by the particle.
    Level(i32, &'a ParticleSpec),
}

/// Decay step of a cascade; `spec` supplies the final state and emitted particle.
pub enum DecayStep<'a> {
    Auger(&'a AugerSystem, &'a ProcessSpec),
    Emission(&'a EmissionSystem, &'a ProcessSpec),
}

impl DecayStep<'_> {
    fn two_j1(&self) -> i32 {
        match self {
            DecayStep::Auger(s, _) => s.two_j1,
            DecayStep::Emission(s, _) => s.two_j1,
        }
    }

    fn two_j2(&self) -> i32 {
        match self {
            DecayStep::Auger(s, _) => s.two_j2,
            DecayStep::Emission(s, _) => s.two_j2,
        }
    }

    fn constant(&self) -> f64 {
        match self {
            DecayStep::Auger(..) => 2.0 * PI,
            DecayStep::Emission(..) => 1.0 / (2.0 * PI),
        }
    }

    /// Options of the emitted particle: weight and an evaluator of the
    /// amplitude for `(M1, final coefficients)`.
    fn amplitudes(&self, slot: usize, c2: &[Complex64], two_m1: i32, option: &DecayOption) -> Amp {
        match (self, option) {
            (DecayStep::Auger(s, spec), DecayOption::Spin(cs)) => {
                auger_amp(s, two_m1, c2, cs, spec.particle(Role::ElectronOut).detector(), slot)
            }
            (DecayStep::Emission(s, spec), DecayOption::Helicity(q)) => {
                emission_amp(s, two_m1, c2, *q, spec.particle(Role::PhotonOut).detector(), slot)
            }
            _ => unreachable!("option kind matches step kind"),
        }
    }

    fn options(&self) -> Vec<(f64, DecayOption)> {
        match self {
            DecayStep::Auger(_, spec) => spin_options(&spec.particle(Role::ElectronOut), false)
                .into_iter()
                .map(|(w, c)| (w, DecayOption::Spin(c)))
                .collect(),
            DecayStep::Emission(_, spec) => emitted_helicities(&spec.particle(Role::PhotonOut))
                .into_iter()
                .map(|(q, w)| (w, DecayOption::Helicity(q)))
                .collect(),
        }
    }
}

enum DecayOption {
    Spin(Vec<Complex64>),
    Helicity(i32),
}

/// Weighted first-step amplitudes per intermediate lab projection.
fn first_step_amplitudes(first: &FirstStep) -> (i32, f64, Vec<(f64, Vec<Amp>)>) {
    match first {
        FirstStep::Photoexcitation(sys, spec) => {
            let (target, photon) = (spec.particle(Role::Target), spec.particle(Role::PhotonIn));
            let mut out = Vec::new();
            for (w0, c0) in state_options(sys.two_j0, &target, true) {
                for (q, wq) in absorbed_helicities(&photon) {
                    out.push((w0 * wq, excitation_amp(sys, &c0, q, &photon.direction)));
                }
            }
            (sys.two_j1, 2.0 * PI * PI, out)
        }
        FirstStep::Photoionization(sys, spec) => {
            let target = spec.particle(Role::Target);
            let photon = spec.particle(Role::PhotonIn);
            let electron = spec.particle(Role::ElectronOut);
            let mut out = Vec::new();
            for (w0, c0) in state_options(sys.two_j0, &target, true) {
                for (q, wq) in absorbed_helicities(&photon) {
                    for (ws, cs) in spin_options(&electron, false) {
                        out.push((
                            w0 * wq * ws,
                            ionization_amp(sys, &c0, q, &photon.direction, &cs, electron.detector()),
                        ));
                    }
                }
            }
            (sys.two_j1, PI, out)
        }
        FirstStep::Level(two_j, p) => {
            let out = state_options(*two_j, p, true)
                .into_iter()
                .map(|(w, c)| {
                    let amps = c
                        .iter()
                        .map(|v| {
                            let mut a = Amp::default();
                            a.add([0; 8], *v);
                            a
                        })
                        .collect();
                    (w, amps)
                })
                .collect();
            (*two_j, 1.0, out)
        }
    }
}

/// Cascade summed coherently over every intermediate projection and
/// incoherently over the observed labels of each step.
pub fn cascade(first: &FirstStep, steps: &[DecayStep]) -> Result<OracleResult, ProcessError> {
    if steps.is_empty() || steps.len() > 3 {
        return Err(ProcessError::Domain(format!("a cascade takes 1 to 3 decay steps, got {}", steps.len())));
    }
    let (mut two_j, mut constant, firsts) = first_step_amplitudes(first);
    let mut estimate = firsts.len() as f64 * f64::from(two_j + 1);
    for s in steps {
        if s.two_j1() != two_j {
            return Err(ProcessError::Domain(format!(
                "cascade momentum mismatch: 2J={} feeds 2J={}",
                two_j,
                s.two_j1()
            )));
        }
        two_j = s.two_j2();
        constant *= s.constant();
        estimate *= f64::from((s.two_j1() + 1) * (s.two_j2() + 1)) * 4.0;
    }
    check_size(estimate)?;

    // states: weighted amplitude vectors over the current lab projection
    let mut states: Vec<(f64, Vec<Amp>)> = firsts;
    let (last, middle) = steps.split_last().unwrap();
    for (n, step) in middle.iter().enumerate() {
        let slot = 2 * (n + 1);
        let (j1, j2) = (step.two_j1(), step.two_j2());
        let units = unit_vectors(j2);
        let mut next = Vec::new();
        for (w, amps) in &states {
            for (wo, opt) in step.options() {
                let mut v = vec![Amp::default(); (j2 + 1) as usize];
                for (m2i, u) in units.iter().enumerate() {
                    for m1 in projections(j1) {
                        let a2 = step.amplitudes(slot, u, m1, &opt);
                        v[m2i].scale_add(&amps[idx(j1, m1)].product(&a2), Complex64::new(1.0, 0.0));
                    }
                }
                next.push((w * wo, v));
            }
        }
        states = next;
    }
    let slot = 2 * steps.len();
    let final_spec = match last {
        DecayStep::Auger(_, s) | DecayStep::Emission(_, s) => s,
    };
    let (j1, j2) = (last.two_j1(), last.two_j2());
    let mut acc = Accumulator::default();
    for (w, amps) in &states {
        for (wo, opt) in last.options() {
            for (w2, c2) in state_options(j2, &final_spec.particle(Role::Residual), false) {
                let mut total = Amp::default();
                for m1 in projections(j1) {
                    let a2 = last.amplitudes(slot, &c2, m1, &opt);
                    total.scale_add(&amps[idx(j1, m1)].product(&a2), Complex64::new(1.0, 0.0));
                }
                acc.add(w * wo * w2, &total);
            }
        }
    }
    Ok(acc.finish(constant))
}

/// Dielectronic recombination: capture (time-reversed Auger decay of the
/// resonance) followed by photon emission, coherent over the resonance
/// projections and weighted by the resonance profile.
pub fn dielectronic(
    capture: &AugerSystem,
    emission: &EmissionSystem,
    spec: &ProcessSpec,
) -> Result<OracleResult, ProcessError> {
    let e0 = spec.electron_energy.ok_or_else(|| ProcessError::Spec("electron_energy missing".into()))?;
    let res = spec.resonance.ok_or_else(|| ProcessError::Spec("resonance missing".into()))?;
    if res.width <= 0.0 {
        return Err(ProcessError::Domain(format!("resonance width {} must be positive", res.width)));
    }
    let ion = spec.particle(Role::Target);
    let electron = spec.particle(Role::ElectronIn);
    let residual = spec.particle(Role::Residual);
    let photon = spec.particle(Role::PhotonOut);
    let j1 = capture.two_j1;
    check_size(f64::from((capture.two_j2 + 1) * (j1 + 1) * (emission.two_j2 + 1)).powi(2) * 16.0)?;
    let mut acc = Accumulator::default();
    for (w0, c0) in state_options(capture.two_j2, &ion, true) {
        let c0_aug = conj_vec(&c0);
        for (ws, cs) in spin_options(&electron, true) {
            let cs_aug = conj_vec(&cs);
            let cap: Vec<Complex64> = projections(j1)
                .map(|m1| {
                    let a = auger_amp(capture, m1, &c0_aug, &cs_aug, Some(&electron.direction), 0);
                    // detected direction: a single unlabelled entry
                    a.0.values().sum::<Complex64>().conj()
                })
                .collect();
            for (w2, c2) in state_options(emission.two_j2, &residual, false) {
                for (q, wq) in emitted_helicities(&photon) {
                    let mut total = Amp::default();
                    for m1 in projections(j1) {
                        let r = emission_amp(emission, m1, &c2, q, photon.detector(), 0);
                        total.scale_add(&r, cap[idx(j1, m1)]);
                    }
                    acc.add(w0 * ws * w2 * wq, &total);
                }
            }
        }
    }
    let p0 = electron_momentum(e0);
    let lorentz = 1.0 / ((e0 - res.energy).powi(2) + res.width * res.width / 4.0);
    Ok(acc.finish(2.0 * PI / (p0 * p0) * lorentz))
}

// ---------------------------------------------------------------------------
// spec-level entry points

/// Photoexcitation, photoionization or radiative recombination.
pub fn oracle_photo(spec: &ProcessSpec, table: &ReducedAmplitudeTable) -> Result<OracleResult, ProcessError> {
    spec.validate()?;
    match spec.kind {
        ProcessKind::Photoexcitation => photoexcitation(&resolve_photoexcitation(spec, table)?.0, spec),
        ProcessKind::Photoionization => photoionization(&resolve_photoionization(spec, table)?.0, spec),
        ProcessKind::RadRecombination => {
            let e = recombination_photon_energy(spec, table)?;
            recombination(&resolve_recombination(spec, table)?.0, spec, e)
        }
        ProcessKind::DielectronicRecombination => {
            let (sys, _) = resolve_dielectronic(spec, table)?;
            dielectronic(&sys.capture, &sys.emission, spec)
        }
        k => Err(ProcessError::Spec(format!("{} is not a photon process", k.as_str()))),
    }
}

/// Electron-impact excitation or ionization.
pub fn oracle_e_impact(spec: &ProcessSpec, table: &ReducedAmplitudeTable) -> Result<OracleResult, ProcessError> {
    spec.validate()?;
    match spec.kind {
        ProcessKind::EExcitation => e_excitation(&resolve_scattering(spec, table)?, spec),
        ProcessKind::EIonization => e_ionization(&resolve_ionizing(spec, table)?, spec),
        k => Err(ProcessError::Spec(format!("{} is not an electron-impact process", k.as_str()))),
    }
}

/// Cascade of a photoabsorption step followed by Auger or radiative decays,
/// each described by its own spec.
pub fn oracle_cascade(specs: &[ProcessSpec], table: &ReducedAmplitudeTable) -> Result<OracleResult, ProcessError> {
    if specs.len() < 2 {
        return Err(ProcessError::Domain("a cascade needs at least two steps".into()));
    }
    for s in specs {
        s.validate()?;
    }
    let pe;
    let pi;
    let first = match specs[0].kind {
        ProcessKind::Photoexcitation => {
            pe = resolve_photoexcitation(&specs[0], table)?.0;
            FirstStep::Photoexcitation(&pe, &specs[0])
        }
        ProcessKind::Photoionization => {
            pi = resolve_photoionization(&specs[0], table)?.0;
            FirstStep::Photoionization(&pi, &specs[0])
        }
        k => return Err(ProcessError::Spec(format!("{} cannot start a cascade", k.as_str()))),
    };
    enum Owned {
        A(AugerSystem),
        E(EmissionSystem),
    }
    let mut owned = Vec::new();
    for s in &specs[1..] {
        owned.push(match s.kind {
            ProcessKind::Auger => Owned::A(resolve_auger(s, table)?.0),
            ProcessKind::RadDecay => Owned::E(resolve_emission(s, table)?.0),
            k => return Err(ProcessError::Spec(format!("{} is not a decay step", k.as_str()))),
        });
    }
    let steps: Vec<DecayStep> = owned
        .iter()
        .zip(&specs[1..])
        .map(|(o, s)| match o {
            Owned::A(a) => DecayStep::Auger(a, s),
            Owned::E(e) => DecayStep::Emission(e, s),
        })
        .collect();
    cascade(&first, &steps)
}

/// Decay of a level prepared as described by the spec's target particle.
pub fn oracle_decay(spec: &ProcessSpec, table: &ReducedAmplitudeTable) -> Result<OracleResult, ProcessError> {
    spec.validate()?;
    let target = spec.particle(Role::Target);
    match spec.kind {
        ProcessKind::Auger => {
            let sys = resolve_auger(spec, table)?.0;
            cascade(&FirstStep::Level(sys.two_j1, &target), &[DecayStep::Auger(&sys, spec)])
        }
        ProcessKind::RadDecay => {
            let sys = resolve_emission(spec, table)?.0;
            cascade(&FirstStep::Level(sys.two_j1, &target), &[DecayStep::Emission(&sys, spec)])
        }
        k => Err(ProcessError::Spec(format!("{} is not a decay", k.as_str()))),
    }
}

/// Two-step process: first step plus one decay.
pub fn oracle_two_step(
    first: &ProcessSpec,
    second: &ProcessSpec,
    table: &ReducedAmplitudeTable,
) -> Result<OracleResult, ProcessError> {
    oracle_cascade(&[first.clone(), second.clone()], table)
}
