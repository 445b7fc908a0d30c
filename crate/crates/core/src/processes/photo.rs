//! Photoexcitation, photoionization and radiative recombination.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::angular::clebsch_gordan;

use super::coeff::{self, ExcitationRanks, IonizationRanks};
use super::geometry::{self, Accumulator, KnTable};
use super::multipoles::{MultipoleDistribution, Weighted};
use super::spec::{
    absorbed_helicities, emitted_helicities, BoundTransition, PhotoionizationSystem, ProcessError, ProcessSpec, Role,
};

const SPIN: i32 = 1;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Position of a doubled helicity in per-helicity coefficient pairs.
pub(crate) fn helicity_slot(two_q: i32) -> usize {
    usize::from(two_q < 0)
}

pub(crate) fn ranks(lo: i32, hi: i32) -> impl Iterator<Item = i32> + Clone {
    (lo..=hi).step_by(2)
}

pub(crate) fn projections(k: i32) -> impl Iterator<Item = i32> + Clone {
    (-k..=k).step_by(2)
}

/// Photon tensors keyed by `(2k, 2k')` for one helicity.
struct PhotonTables<'a> {
    dir: Option<&'a crate::angular::Direction>,
    two_q: i32,
    cache: HashMap<(i32, i32), KnTable>,
}

impl<'a> PhotonTables<'a> {
    fn new(dir: Option<&'a crate::angular::Direction>, two_q: i32) -> Self {
        PhotonTables { dir, two_q, cache: HashMap::new() }
    }

    fn get(&mut self, k: i32, kp: i32) -> &KnTable {
        let (dir, q) = (self.dir, self.two_q);
        self.cache.entry((k, kp)).or_insert_with(|| geometry::photon(k, kp, q, dir))
    }
}

/// Photoexcitation expansion with coefficients for both helicities.
#[derive(Clone, Debug)]
pub struct PhotoexcitationExpansion {
    pub system: BoundTransition,
    terms: Vec<(ExcitationRanks, [Complex64; 2])>,
}

impl PhotoexcitationExpansion {
    pub fn new(system: BoundTransition) -> Self {
        let (j0, j1) = (system.two_j0, system.two_j1);
        let ks: Vec<i32> = system.multipoles.iter().map(|m| m.two_k).collect();
        let mut terms = Vec::new();
        for &k in &ks {
            for &kp in &ks {
                for k0 in ranks(0, 2 * j0) {
                    for kr in ranks((k - kp).abs(), k + kp) {
                        for k1 in ranks((k0 - kr).abs(), (k0 + kr).min(2 * j1)) {
                            let r = ExcitationRanks { k0, kr, k1, k, kp };
                            let b = [coeff::photoexcitation(&system, 2, r), coeff::photoexcitation(&system, -2, r)];
                            if b != [ZERO; 2] {
                                terms.push((r, b));
                            }
                        }
                    }
                }
            }
        }
        PhotoexcitationExpansion { system, terms }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `W(K1, N1)` before the excited-state factor, with the `2pi^2` constant.
    fn partial(&self, spec: &ProcessSpec) -> Weighted {
        let (j0, j1) = (self.system.two_j0, self.system.two_j1);
        let target = spec.particle(Role::Target);
        let photon = spec.particle(Role::PhotonIn);
        let t0 = geometry::prepared(j0, &target);
        let mut w = Weighted::zeros(2 * j1);
        for (q, wq) in absorbed_helicities(&photon) {
            let mut tables = PhotonTables::new(Some(&photon.direction), q);
            for (r, b) in &self.terms {
                let b = b[helicity_slot(q)] * wq / f64::from(r.k1 + 1);
                if b == ZERO {
                    continue;
                }
                let tph = tables.get(r.k, r.kp);
                for n0 in projections(r.k0) {
                    let a0 = t0.get(r.k0, n0);
                    if a0 == ZERO {
                        continue;
                    }
                    for nr in projections(r.kr) {
                        let n1 = n0 + nr;
                        if n1.abs() > r.k1 {
                            continue;
                        }
                        let c = clebsch_gordan(r.k0, n0, r.kr, nr, r.k1, n1);
                        if c != 0.0 {
                            w.add(r.k1, n1, b * c * a0 * tph.get(r.kr, nr));
                        }
                    }
                }
            }
        }
        w.scaled(2.0 * PI * PI)
    }

    pub fn cross_section(&self, spec: &ProcessSpec) -> Result<f64, ProcessError> {
        let f = geometry::detected(self.system.two_j1, &spec.particle(Role::Residual));
        let (v, m) = self.partial(spec).contract(&f);
        geometry::finalize(v, m)
    }

    pub fn multipoles(&self, spec: &ProcessSpec) -> MultipoleDistribution {
        let j1 = self.system.two_j1;
        MultipoleDistribution::new(j1, self.partial(spec).times(&geometry::handed_on(j1)))
    }
}

/// Photoionization expansion; also drives radiative recombination, whose
/// coefficients are the complex conjugates with atom and ion exchanged.
#[derive(Clone, Debug)]
pub struct PhotoionizationExpansion {
    pub system: PhotoionizationSystem,
    terms: Vec<(IonizationRanks, [Complex64; 2])>,
}

impl PhotoionizationExpansion {
    pub fn new(system: PhotoionizationSystem) -> Self {
        let (j0, j1) = (system.two_j0, system.two_j1);
        let mut ks: Vec<i32> = system.amplitudes.iter().map(|a| a.amp.two_k).collect();
        ks.sort_unstable();
        ks.dedup();
        let lmax = system.channels.iter().map(|c| c.wave.two_lambda).max().unwrap_or(0);
        let jmax = system.channels.iter().map(|c| c.wave.two_j).max().unwrap_or(0);
        let mut terms = Vec::new();
        for &mk in &ks {
            for &mkp in &ks {
                for k0 in ranks(0, 2 * j0) {
                    for kr in ranks((mk - mkp).abs(), mk + mkp) {
                        for k in ranks((k0 - kr).abs(), k0 + kr) {
                            for k1 in ranks(0, 2 * j1) {
                                for kj in ranks((k1 - k).abs(), (k1 + k).min(2 * jmax)) {
                                    for kl in ranks(0, 2 * lmax) {
                                        for ks_ in [0, 2] {
                                            if !crate::angular::triangle(kl, ks_, kj) {
                                                continue;
                                            }
                                            let r = IonizationRanks { k0, kr, k, k1, kj, kl, ks: ks_, mk, mkp };
                                            let b = [
                                                coeff::photoionization(&system, 2, r),
                                                coeff::photoionization(&system, -2, r),
                                            ];
                                            if b != [ZERO; 2] {
                                                terms.push((r, b));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        PhotoionizationExpansion { system, terms }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `W(K1, N1)` before the ion factor, with the constant `pi`.
    fn partial(&self, spec: &ProcessSpec) -> Weighted {
        let (j0, j1) = (self.system.two_j0, self.system.two_j1);
        let target = spec.particle(Role::Target);
        let photon = spec.particle(Role::PhotonIn);
        let electron = spec.particle(Role::ElectronOut);
        let t0 = geometry::prepared(j0, &target);
        let ts = geometry::detected(SPIN, &electron);
        let lmax = self.terms.iter().map(|t| t.0.kl).max().unwrap_or(0);
        let y = geometry::harmonic(lmax, electron.detector());
        let mut w = Weighted::zeros(2 * j1);
        for (q, wq) in absorbed_helicities(&photon) {
            let mut tables = PhotonTables::new(Some(&photon.direction), q);
            for (r, b) in &self.terms {
                let b = b[helicity_slot(q)] * wq;
                if b == ZERO {
                    continue;
                }
                let tph = tables.get(r.mk, r.mkp);
                let e = electron_factor(&ts, &y, r.kl, r.ks, r.kj);
                if e.is_rank_zero(r.kj) {
                    continue;
                }
                for n0 in projections(r.k0) {
                    let a0 = t0.get(r.k0, n0);
                    if a0 == ZERO {
                        continue;
                    }
                    for nr in projections(r.kr) {
                        let n = n0 + nr;
                        if n.abs() > r.k {
                            continue;
                        }
                        let c0 = clebsch_gordan(r.k0, n0, r.kr, nr, r.k, n);
                        let ph = tph.get(r.kr, nr);
                        if c0 == 0.0 || ph == ZERO {
                            continue;
                        }
                        let pre = b * a0 * ph * c0;
                        for n1 in projections(r.k1) {
                            let nj = n - n1;
                            if nj.abs() > r.kj {
                                continue;
                            }
                            let c1 = clebsch_gordan(r.k1, n1, r.kj, nj, r.k, n);
                            let ev = e.get(r.kj, nj);
                            if c1 != 0.0 && ev != ZERO {
                                w.add(r.k1, n1, pre * c1 * ev);
                            }
                        }
                    }
                }
            }
        }
        w.scaled(PI)
    }

    pub fn cross_section(&self, spec: &ProcessSpec) -> Result<f64, ProcessError> {
        let f = geometry::detected(self.system.two_j1, &spec.particle(Role::Residual));
        let (v, m) = self.partial(spec).contract(&f);
        geometry::finalize(v, m)
    }

    pub fn multipoles(&self, spec: &ProcessSpec) -> MultipoleDistribution {
        let j1 = self.system.two_j1;
        MultipoleDistribution::new(j1, self.partial(spec).times(&geometry::handed_on(j1)))
    }

    /// Radiative recombination onto the photoionization target: the ion
    /// (`J1`) is prepared together with the electron, the atom (`J0`) is
    /// detected with the emitted photon.
    pub fn recombination(
        &self,
        spec: &ProcessSpec,
        photon_energy: f64,
        electron_energy: f64,
    ) -> Result<f64, ProcessError> {
        if electron_energy <= 0.0 {
            return Err(ProcessError::Domain(format!("electron energy {electron_energy} must be positive")));
        }
        let (atom_j, ion_j) = (self.system.two_j0, self.system.two_j1);
        let ion = spec.particle(Role::Target);
        let electron = spec.particle(Role::ElectronIn);
        let atom = spec.particle(Role::Residual);
        let photon = spec.particle(Role::PhotonOut);
        let ti = geometry::prepared(ion_j, &ion);
        let ts = geometry::prepared(SPIN, &electron);
        let ta = geometry::detected(atom_j, &atom);
        let lmax = self.terms.iter().map(|t| t.0.kl).max().unwrap_or(0);
        let y = geometry::conj(&geometry::harmonic(lmax, Some(&electron.direction)));
        let mut acc = Accumulator::default();
        for (q, wq) in emitted_helicities(&photon) {
            let mut tables = PhotonTables::new(photon.detector(), q);
            for (r, b) in &self.terms {
                // ion plays K1, atom plays K0 of the photoionization coefficient
                let b = b[helicity_slot(q)].conj() * wq;
                if b == ZERO {
                    continue;
                }
                let tph = geometry::conj(tables.get(r.mk, r.mkp));
                let e = electron_factor(&ts, &y, r.kl, r.ks, r.kj);
                for ni in projections(r.k1) {
                    let a0 = ti.get(r.k1, ni);
                    if a0 == ZERO {
                        continue;
                    }
                    for nj in projections(r.kj) {
                        let n = ni + nj;
                        if n.abs() > r.k {
                            continue;
                        }
                        let c0 = clebsch_gordan(r.k1, ni, r.kj, nj, r.k, n);
                        let ev = e.get(r.kj, nj);
                        if c0 == 0.0 || ev == ZERO {
                            continue;
                        }
                        for na in projections(r.k0) {
                            let nr = n - na;
                            if nr.abs() > r.kr {
                                continue;
                            }
                            let c2 = clebsch_gordan(r.k0, na, r.kr, nr, r.k, n);
                            if c2 != 0.0 {
                                acc.add(b * a0 * ev * c0 * c2 * ta.get(r.k0, na) * tph.get(r.kr, nr));
                            }
                        }
                    }
                }
            }
        }
        let alpha_e = photon_energy / crate::amplitudes::SPEED_OF_LIGHT;
        acc.finish(PI * alpha_e * alpha_e / (2.0 * electron_energy))
    }
}

/// `sum <Kl Nl Ks Ns | Kj Nj> s(Ks,Ns) y(Kl,Nl)` over `Nj`.
pub(crate) fn electron_factor(spin: &KnTable, y: &KnTable, kl: i32, ks: i32, kj: i32) -> KnTable {
    let mut out = KnTable::zeros(kj);
    for nj in projections(kj) {
        let mut s = ZERO;
        for ns in projections(ks) {
            let nl = nj - ns;
            if nl.abs() > kl {
                continue;
            }
            let sv = spin.get(ks, ns);
            if sv == ZERO {
                continue;
            }
            let c = clebsch_gordan(kl, nl, ks, ns, kj, nj);
            if c != 0.0 {
                s += c * sv * y.get(kl, nl);
            }
        }
        if s != ZERO {
            out.add(kj, nj, s);
        }
    }
    out
}
