//! Auger and radiative decay of an oriented or aligned level, and the
//! resonant capture that starts dielectronic recombination.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::angular::{clebsch_gordan, triangle};

use super::coeff::{self, AugerRanks, EmissionRanks};
use super::geometry::{self, KnTable};
use super::multipoles::{MultipoleDistribution, MultipoleResponse, MultipoleTransfer, TransferEntry, Weighted};
use super::photo::{electron_factor, projections, ranks};
use super::spec::{emitted_helicities, AugerSystem, EmissionSystem, ProcessSpec, Role};

const SPIN: i32 = 1;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Auger expansion `J1 -> J2 + e`.
#[derive(Clone, Debug)]
pub struct AugerExpansion {
    pub system: AugerSystem,
    terms: Vec<(AugerRanks, Complex64)>,
}

impl AugerExpansion {
    pub fn new(system: AugerSystem) -> Self {
        let (j1, j2) = (system.two_j1, system.two_j2);
        let lmax = system.channels.iter().map(|c| c.0.two_lambda).max().unwrap_or(0);
        let jmax = system.channels.iter().map(|c| c.0.two_j).max().unwrap_or(0);
        let mut terms = Vec::new();
        for k1 in ranks(0, 2 * j1) {
            for k2 in ranks(0, 2 * j2) {
                for kp in ranks((k2 - k1).abs(), (k2 + k1).min(2 * jmax)) {
                    for kl in ranks(0, 2 * lmax) {
                        for ks in [0, 2] {
                            if !triangle(kl, ks, kp) {
                                continue;
                            }
                            let r = AugerRanks { k1, k2, kl, ks, kp };
                            let a = coeff::auger(&system, r);
                            if a != ZERO {
                                terms.push((r, a));
                            }
                        }
                    }
                }
            }
        }
        AugerExpansion { system, terms }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn lmax(&self) -> i32 {
        self.terms.iter().map(|t| t.0.kl).max().unwrap_or(0)
    }

    /// Sums `coefficient x f(K2, N2) x electron(K', N')` into `(K1, N1)` slots
    /// chosen by `sink`.
    fn contract(
        &self,
        final_state: &dyn Fn(i32, i32) -> Complex64,
        spin: &KnTable,
        y: &KnTable,
        coefficient: &dyn Fn(Complex64) -> Complex64,
        sink: &mut dyn FnMut((i32, i32), (i32, i32), Complex64),
    ) {
        for (r, a) in &self.terms {
            let a = coefficient(*a);
            let e = electron_factor(spin, y, r.kl, r.ks, r.kp);
            if e.is_rank_zero(r.kp) {
                continue;
            }
            for n1 in projections(r.k1) {
                for n2 in projections(r.k2) {
                    let np = n1 - n2;
                    if np.abs() > r.kp {
                        continue;
                    }
                    let f = final_state(r.k2, n2);
                    let ev = e.get(r.kp, np);
                    if f == ZERO || ev == ZERO {
                        continue;
                    }
                    let c = clebsch_gordan(r.k2, n2, r.kp, np, r.k1, n1);
                    if c != 0.0 {
                        sink((r.k1, n1), (r.k2, n2), a * c * f * ev);
                    }
                }
            }
        }
    }

    /// Response `R(K1, N1)` for the emitted electron and final ion in `spec`.
    pub fn response(&self, spec: &ProcessSpec) -> MultipoleResponse {
        let j2 = self.system.two_j2;
        let fin = geometry::detected(j2, &spec.particle(Role::Residual));
        let electron = spec.particle(Role::ElectronOut);
        let ts = geometry::detected(SPIN, &electron);
        let y = geometry::harmonic(self.lmax(), electron.detector());
        let mut w = Weighted::zeros(2 * self.system.two_j1);
        self.contract(&|k, n| fin.get(k, n), &ts, &y, &|a| a, &mut |(k1, n1), _, v| w.add(k1, n1, v));
        MultipoleResponse::new(self.system.two_j1, w)
    }

    /// Transfer of multipoles from `J1` to the final ion `J2`.
    pub fn transfer(&self, spec: &ProcessSpec) -> MultipoleTransfer {
        let j2 = self.system.two_j2;
        let fin = geometry::handed_on(j2);
        let electron = spec.particle(Role::ElectronOut);
        let ts = geometry::detected(SPIN, &electron);
        let y = geometry::harmonic(self.lmax(), electron.detector());
        let mut entries: Vec<TransferEntry> = Vec::new();
        self.contract(&|k, n| fin.get(k, n), &ts, &y, &|a| a, &mut |from, to, v| entries.push((from, to, v, v.norm())));
        MultipoleTransfer { two_j1: self.system.two_j1, two_j2: j2, entries: merge(entries) }
    }

    /// Multipoles of a resonance `J1` populated by capture of an electron on
    /// the ion `J2`: the time reverse of this Auger decay.
    pub fn capture(&self, spec: &ProcessSpec) -> MultipoleDistribution {
        let j2 = self.system.two_j2;
        let ion = geometry::prepared(j2, &spec.particle(Role::Target));
        let electron = spec.particle(Role::ElectronIn);
        let ts = geometry::prepared(SPIN, &electron);
        let y = geometry::conj(&geometry::harmonic(self.lmax(), Some(&electron.direction)));
        let mut w = Weighted::zeros(2 * self.system.two_j1);
        self.contract(&|k, n| ion.get(k, n), &ts, &y, &|a| a.conj(), &mut |(k1, n1), _, v| w.add(k1, n1, v));
        MultipoleDistribution::new(self.system.two_j1, w)
    }
}

/// Combines transfer entries sharing the same `(K1 N1) -> (K2 N2)` pair.
fn merge(mut entries: Vec<TransferEntry>) -> Vec<TransferEntry> {
    entries.sort_by_key(|e| (e.0, e.1));
    let mut out: Vec<TransferEntry> = Vec::new();
    for e in entries {
        match out.last_mut() {
            Some(last) if last.0 == e.0 && last.1 == e.1 => {
                last.2 += e.2;
                last.3 += e.3;
            }
            _ => out.push(e),
        }
    }
    out
}

/// Radiative decay `J1 -> J2 + photon`.
#[derive(Clone, Debug)]
pub struct EmissionExpansion {
    pub system: EmissionSystem,
    terms: Vec<(EmissionRanks, Complex64)>,
}

impl EmissionExpansion {
    pub fn new(system: EmissionSystem) -> Self {
        let (j1, j2) = (system.two_j1, system.two_j2);
        let ks: Vec<i32> = system.multipoles.iter().map(|m| m.0).collect();
        let mut terms = Vec::new();
        for &k in &ks {
            for &kp in &ks {
                for kr in ranks((k - kp).abs(), k + kp) {
                    for k1 in ranks(0, 2 * j1) {
                        for k2 in ranks(0, 2 * j2) {
                            let r = EmissionRanks { k1, kr, k2, k, kp };
                            let a = coeff::emission(&system, r);
                            if a != ZERO {
                                let sign = if ((k1 - k2) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                                terms.push((r, a * sign / (2.0 * PI)));
                            }
                        }
                    }
                }
            }
        }
        EmissionExpansion { system, terms }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn contract(
        &self,
        spec: &ProcessSpec,
        final_state: &dyn Fn(i32, i32) -> Complex64,
        sink: &mut dyn FnMut((i32, i32), (i32, i32), Complex64),
    ) {
        let photon = spec.particle(Role::PhotonOut);
        let helicities = emitted_helicities(&photon);
        for (r, a) in &self.terms {
            let mut tph = KnTable::zeros(r.k + r.kp);
            for &(q, wq) in &helicities {
                let t = geometry::photon(r.k, r.kp, q, photon.detector());
                tph = KnTable::build(r.k + r.kp, |kk, n| tph.get(kk, n) + t.get(kk, n) * wq);
            }
            for n1 in projections(r.k1) {
                for nr in projections(r.kr) {
                    let n2 = n1 + nr;
                    if n2.abs() > r.k2 {
                        continue;
                    }
                    let f = final_state(r.k2, n2);
                    let p = tph.get(r.kr, nr);
                    if f == ZERO || p == ZERO {
                        continue;
                    }
                    let c = clebsch_gordan(r.k1, n1, r.kr, nr, r.k2, n2);
                    if c != 0.0 {
                        sink((r.k1, n1), (r.k2, n2), a * c * f * p);
                    }
                }
            }
        }
    }

    pub fn response(&self, spec: &ProcessSpec) -> MultipoleResponse {
        let fin = geometry::detected(self.system.two_j2, &spec.particle(Role::Residual));
        let mut w = Weighted::zeros(2 * self.system.two_j1);
        self.contract(spec, &|k, n| fin.get(k, n), &mut |(k1, n1), _, v| w.add(k1, n1, v));
        MultipoleResponse::new(self.system.two_j1, w)
    }

    pub fn transfer(&self, spec: &ProcessSpec) -> MultipoleTransfer {
        let fin = geometry::handed_on(self.system.two_j2);
        let mut entries = Vec::new();
        self.contract(spec, &|k, n| fin.get(k, n), &mut |from, to, v| entries.push((from, to, v, v.norm())));
        MultipoleTransfer { two_j1: self.system.two_j1, two_j2: self.system.two_j2, entries: merge(entries) }
    }
}
