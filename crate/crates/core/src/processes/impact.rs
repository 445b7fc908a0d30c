//! Electron-impact excitation and ionization.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::angular::{clebsch_gordan, triangle};

use super::coeff::{self, IonizingRanks, ScatteringRanks};
use super::geometry::{self, Accumulator, KnTable};
use super::photo::{electron_factor, projections, ranks};
use super::spec::{electron_momentum, IonizingSystem, ProcessError, ProcessSpec, Role, ScatteringSystem};

const SPIN: i32 = 1;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Rate constant `4 pi^4 / p0^2` of the electron-impact cross-sections.
pub fn impact_constant(electron_energy: f64) -> Result<f64, ProcessError> {
    if electron_energy <= 0.0 {
        return Err(ProcessError::Domain(format!("electron energy {electron_energy} must be positive")));
    }
    let p0 = electron_momentum(electron_energy);
    Ok(4.0 * PI.powi(4) / (p0 * p0))
}

/// Prepared target coupled with the incoming electron: `sum <K0 N0 K0' N0' | K N> t0 e0`.
fn incoming(t0: &KnTable, e0: &KnTable, k0: i32, k0p: i32, k: i32) -> KnTable {
    let mut out = KnTable::zeros(k);
    for n0 in projections(k0) {
        let a = t0.get(k0, n0);
        if a == ZERO {
            continue;
        }
        for n0p in projections(k0p) {
            let n = n0 + n0p;
            if n.abs() > k {
                continue;
            }
            let b = e0.get(k0p, n0p);
            let c = clebsch_gordan(k0, n0, k0p, n0p, k, n);
            if b != ZERO && c != 0.0 {
                out.add(k, n, a * b * c);
            }
        }
    }
    out
}

/// Electron-impact excitation `J0 + e -> J1 + e`.
#[derive(Clone, Debug)]
pub struct ScatteringExpansion {
    pub system: ScatteringSystem,
    terms: Vec<(ScatteringRanks, Complex64)>,
}

impl ScatteringExpansion {
    pub fn new(system: ScatteringSystem) -> Self {
        let (j0, j1) = (system.two_j0, system.two_j1);
        let a = &system.amplitudes;
        let lmax0 = a.iter().map(|h| h.incoming.two_lambda).max().unwrap_or(0);
        let jmax0 = a.iter().map(|h| h.incoming.two_j).max().unwrap_or(0);
        let lmax1 = a.iter().map(|h| h.outgoing.two_lambda).max().unwrap_or(0);
        let jmax1 = a.iter().map(|h| h.outgoing.two_j).max().unwrap_or(0);
        let mut terms = Vec::new();
        for k0 in ranks(0, 2 * j0) {
            for k0p in ranks(0, 2 * jmax0) {
                for k in ranks((k0 - k0p).abs(), k0 + k0p) {
                    for k1 in ranks(0, 2 * j1) {
                        for k1p in ranks((k1 - k).abs(), (k1 + k).min(2 * jmax1)) {
                            for kl0 in ranks(0, 2 * lmax0) {
                                for ks0 in [0, 2] {
                                    if !triangle(kl0, ks0, k0p) {
                                        continue;
                                    }
                                    for kl1 in ranks(0, 2 * lmax1) {
                                        for ks1 in [0, 2] {
                                            if !triangle(kl1, ks1, k1p) {
                                                continue;
                                            }
                                            let r = ScatteringRanks { k0, k0p, k, k1, k1p, kl0, ks0, kl1, ks1 };
                                            let b = coeff::scattering(&system, r);
                                            if b != ZERO {
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
        ScatteringExpansion { system, terms }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn cross_section(&self, spec: &ProcessSpec) -> Result<f64, ProcessError> {
        let e0 = spec.electron_energy.ok_or_else(|| ProcessError::Spec("electron_energy missing".into()))?;
        let constant = impact_constant(e0)?;
        let (j0, j1) = (self.system.two_j0, self.system.two_j1);
        let e_in = spec.particle(Role::ElectronIn);
        let e_out = spec.particle(Role::ElectronOut);
        let t0 = geometry::prepared(j0, &spec.particle(Role::Target));
        let t1 = geometry::detected(j1, &spec.particle(Role::Residual));
        let s0 = geometry::prepared(SPIN, &e_in);
        let s1 = geometry::detected(SPIN, &e_out);
        let lmax0 = self.terms.iter().map(|t| t.0.kl0).max().unwrap_or(0);
        let lmax1 = self.terms.iter().map(|t| t.0.kl1).max().unwrap_or(0);
        let y0 = geometry::conj(&geometry::harmonic(lmax0, Some(&e_in.direction)));
        let y1 = geometry::harmonic(lmax1, e_out.detector());
        let mut acc = Accumulator::default();
        for (r, b) in &self.terms {
            let e0t = electron_factor(&s0, &y0, r.kl0, r.ks0, r.k0p);
            let e1t = electron_factor(&s1, &y1, r.kl1, r.ks1, r.k1p);
            if e0t.is_rank_zero(r.k0p) || e1t.is_rank_zero(r.k1p) {
                continue;
            }
            let inc = incoming(&t0, &e0t, r.k0, r.k0p, r.k);
            for n in projections(r.k) {
                let a = inc.get(r.k, n);
                if a == ZERO {
                    continue;
                }
                for n1 in projections(r.k1) {
                    let n1p = n - n1;
                    if n1p.abs() > r.k1p {
                        continue;
                    }
                    let f = t1.get(r.k1, n1) * e1t.get(r.k1p, n1p);
                    if f == ZERO {
                        continue;
                    }
                    let c = clebsch_gordan(r.k1, n1, r.k1p, n1p, r.k, n);
                    if c != 0.0 {
                        acc.add(b * a * c * f);
                    }
                }
            }
        }
        acc.finish(constant)
    }
}

/// Electron-impact ionization `J0 + e -> J1 + e + e`.
#[derive(Clone, Debug)]
pub struct IonizingExpansion {
    pub system: IonizingSystem,
    terms: Vec<(IonizingRanks, Complex64)>,
}

impl IonizingExpansion {
    pub fn new(system: IonizingSystem) -> Self {
        let (j0, j1) = (system.two_j0, system.two_j1);
        let a = &system.amplitudes;
        let max = |f: &dyn Fn(&super::spec::IonizingAmplitude) -> i32| a.iter().map(f).max().unwrap_or(0);
        let (l0, jj0) = (max(&|h| h.incoming.two_lambda), max(&|h| h.incoming.two_j));
        let (l1, jj1) = (max(&|h| h.out1.two_lambda), max(&|h| h.out1.two_j));
        let (l2, jj2) = (max(&|h| h.out2.two_lambda), max(&|h| h.out2.two_j));
        let jpair = max(&|h| h.two_j_pair);
        let mut terms = Vec::new();
        for k0 in ranks(0, 2 * j0) {
            for k0p in ranks(0, 2 * jj0) {
                for k in ranks((k0 - k0p).abs(), k0 + k0p) {
                    for k1 in ranks(0, 2 * j1) {
                        for kp in ranks((k1 - k).abs(), (k1 + k).min(2 * jpair)) {
                            for k2p in ranks(0, 2 * jj2) {
                                for k1p in ranks((k2p - kp).abs(), (k2p + kp).min(2 * jj1)) {
                                    for (kl0, ks0) in spin_orbit_ranks(l0, k0p) {
                                        for (kl1, ks1) in spin_orbit_ranks(l1, k1p) {
                                            for (kl2, ks2) in spin_orbit_ranks(l2, k2p) {
                                                let r = IonizingRanks {
                                                    k0,
                                                    k0p,
                                                    k,
                                                    k1,
                                                    kp,
                                                    k1p,
                                                    k2p,
                                                    kl0,
                                                    ks0,
                                                    kl1,
                                                    ks1,
                                                    kl2,
                                                    ks2,
                                                };
                                                let b = coeff::ionizing(&system, r);
                                                if b != ZERO {
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
        }
        IonizingExpansion { system, terms }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn cross_section(&self, spec: &ProcessSpec) -> Result<f64, ProcessError> {
        let e0 = spec.electron_energy.ok_or_else(|| ProcessError::Spec("electron_energy missing".into()))?;
        let constant = impact_constant(e0)?;
        let (j0, j1) = (self.system.two_j0, self.system.two_j1);
        let e_in = spec.particle(Role::ElectronIn);
        let e1 = spec.particle(Role::ElectronOut);
        let e2 = spec.particle(Role::ElectronOut2);
        let t0 = geometry::prepared(j0, &spec.particle(Role::Target));
        let t1 = geometry::detected(j1, &spec.particle(Role::Residual));
        let s0 = geometry::prepared(SPIN, &e_in);
        let s1 = geometry::detected(SPIN, &e1);
        let s2 = geometry::detected(SPIN, &e2);
        let lmax = |f: &dyn Fn(&IonizingRanks) -> i32| self.terms.iter().map(|t| f(&t.0)).max().unwrap_or(0);
        let y0 = geometry::conj(&geometry::harmonic(lmax(&|r| r.kl0), Some(&e_in.direction)));
        let y1 = geometry::harmonic(lmax(&|r| r.kl1), e1.detector());
        let y2 = geometry::harmonic(lmax(&|r| r.kl2), e2.detector());
        let mut acc = Accumulator::default();
        for (r, b) in &self.terms {
            let e0t = electron_factor(&s0, &y0, r.kl0, r.ks0, r.k0p);
            let e1t = electron_factor(&s1, &y1, r.kl1, r.ks1, r.k1p);
            let e2t = electron_factor(&s2, &y2, r.kl2, r.ks2, r.k2p);
            if e0t.is_rank_zero(r.k0p) || e1t.is_rank_zero(r.k1p) || e2t.is_rank_zero(r.k2p) {
                continue;
            }
            // outgoing pair coupled to rank K'
            let mut pair = KnTable::zeros(r.kp);
            for np in projections(r.kp) {
                let mut s = ZERO;
                for n2p in projections(r.k2p) {
                    let n1p = np - n2p;
                    if n1p.abs() > r.k1p {
                        continue;
                    }
                    let c = clebsch_gordan(r.k2p, n2p, r.k1p, n1p, r.kp, np);
                    if c != 0.0 {
                        s += c * e2t.get(r.k2p, n2p) * e1t.get(r.k1p, n1p);
                    }
                }
                if s != ZERO {
                    pair.add(r.kp, np, s);
                }
            }
            let inc = incoming(&t0, &e0t, r.k0, r.k0p, r.k);
            for n in projections(r.k) {
                let a = inc.get(r.k, n);
                if a == ZERO {
                    continue;
                }
                for n1 in projections(r.k1) {
                    let np = n - n1;
                    if np.abs() > r.kp {
                        continue;
                    }
                    let f = t1.get(r.k1, n1) * pair.get(r.kp, np);
                    if f == ZERO {
                        continue;
                    }
                    let c = clebsch_gordan(r.k1, n1, r.kp, np, r.k, n);
                    if c != 0.0 {
                        acc.add(b * a * c * f);
                    }
                }
            }
        }
        acc.finish(constant)
    }
}

/// Orbital and spin ranks `(Kl, Ks)` that can build an electron rank `Kj`.
fn spin_orbit_ranks(lmax: i32, kj: i32) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    for kl in ranks(0, 2 * lmax) {
        for ks in [0, 2] {
            if triangle(kl, ks, kj) {
                out.push((kl, ks));
            }
        }
    }
    out
}
