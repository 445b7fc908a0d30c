//! Angular coefficients of the multipole expansions.
//!
//! Each builder contracts products of reduced amplitudes (the second one
//! conjugated) with 9j symbols, zero-projection Clebsch-Gordan coefficients
//! and dimension factors. All angular momenta and ranks are doubled integers.

use num_complex::Complex64;

use crate::angular::{clebsch_gordan, nine_j, triangle};

use super::spec::{
    AugerSystem, BoundTransition, EmissionSystem, IonizingSystem, PhotoionizationSystem, ScatteringSystem,
};

const SPIN: i32 = 1;

fn dim(two_j: i32) -> f64 {
    f64::from(two_j + 1)
}

/// `(-1)^{x/2}` for an even doubled exponent.
fn phase(two_x: i32) -> f64 {
    if (two_x / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `sqrt(2l+1)(2l'+1)) <l 0 l' 0 | K 0> (-1)^{l'}`, shared by every continuum electron.
fn orbital(two_l: i32, two_lp: i32, two_kl: i32) -> f64 {
    if (two_l + two_lp + two_kl) % 4 != 0 {
        return 0.0;
    }
    let c = clebsch_gordan(two_l, 0, two_lp, 0, two_kl, 0);
    if c == 0.0 {
        return 0.0;
    }
    phase(two_lp) * (dim(two_l) * dim(two_lp)).sqrt() * c
}

/// Spin-orbit recoupling of one continuum electron:
/// `{l' Kl l; s Ks s; j' Kj j} sqrt((2j+1)(2j'+1))`.
fn spin_orbit(two_l: i32, two_j: i32, two_lp: i32, two_jp: i32, two_kl: i32, two_ks: i32, two_kj: i32) -> f64 {
    nine_j(two_lp, two_kl, two_l, SPIN, two_ks, SPIN, two_jp, two_kj, two_j) * (dim(two_j) * dim(two_jp)).sqrt()
}

/// Ranks of the photoexcitation coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExcitationRanks {
    pub k0: i32,
    pub kr: i32,
    pub k1: i32,
    pub k: i32,
    pub kp: i32,
}

/// Photoexcitation coefficient for photon helicity `two_q`.
pub fn photoexcitation(sys: &BoundTransition, two_q: i32, r: ExcitationRanks) -> Complex64 {
    let (j0, j1) = (sys.two_j0, sys.two_j1);
    if !triangle(r.k, r.kp, r.kr) || !triangle(r.k0, r.kr, r.k1) || r.k0 > 2 * j0 || r.k1 > 2 * j1 {
        return Complex64::new(0.0, 0.0);
    }
    let find = |k: i32| sys.multipoles.iter().find(|m| m.two_k == k).map(|m| m.at(two_q));
    let (Some(a), Some(ap)) = (find(r.k), find(r.kp)) else {
        return Complex64::new(0.0, 0.0);
    };
    let norm = dim(j1);
    let w = nine_j(j0, r.k0, j0, r.kp, r.kr, r.k, j1, r.k1, j1) * (dim(j0) * dim(j1) * dim(r.k) * dim(r.k1)).sqrt();
    a * ap.conj() * norm * w
}

/// Ranks of the photoionization coefficient: target `K0`, photon `Kr`,
/// total `K`, ion `K1`, electron `Kj` split into orbital `Kl` and spin `Ks`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IonizationRanks {
    pub k0: i32,
    pub kr: i32,
    pub k: i32,
    pub k1: i32,
    pub kj: i32,
    pub kl: i32,
    pub ks: i32,
    pub mk: i32,
    pub mkp: i32,
}

/// Photoionization coefficient for photon helicity `two_q`.
pub fn photoionization(sys: &PhotoionizationSystem, two_q: i32, r: IonizationRanks) -> Complex64 {
    let (j0, j1) = (sys.two_j0, sys.two_j1);
    if !triangle(r.k0, r.kr, r.k)
        || !triangle(r.k1, r.kj, r.k)
        || !triangle(r.kl, r.ks, r.kj)
        || !triangle(r.mk, r.mkp, r.kr)
        || r.ks > 2
    {
        return Complex64::new(0.0, 0.0);
    }
    let common = (dim(j0) * dim(r.kj) * dim(j1) * dim(r.mk) * dim(SPIN)).sqrt();
    let mut sum = Complex64::new(0.0, 0.0);
    for ca in sys.amplitudes.iter().filter(|c| c.amp.two_k == r.mk) {
        let ch = sys.channels[ca.channel];
        let (l, j, jt) = (ch.wave.two_lambda, ch.wave.two_j, ch.two_j_total);
        for cb in sys.amplitudes.iter().filter(|c| c.amp.two_k == r.mkp) {
            let chp = sys.channels[cb.channel];
            let (lp, jp, jtp) = (chp.wave.two_lambda, chp.wave.two_j, chp.two_j_total);
            let o = orbital(l, lp, r.kl);
            if o == 0.0 {
                continue;
            }
            let g = nine_j(j0, r.k0, j0, r.mkp, r.kr, r.mk, jtp, r.k, jt);
            if g == 0.0 {
                continue;
            }
            let h = nine_j(j1, r.k1, j1, jp, r.kj, j, jtp, r.k, jt);
            if h == 0.0 {
                continue;
            }
            let v = dim(jt) * dim(jtp) * common * o * g * h * spin_orbit(l, j, lp, jp, r.kl, r.ks, r.kj);
            sum += ca.amp.at(two_q) * cb.amp.at(two_q).conj() * v;
        }
    }
    sum
}

/// Ranks of the Auger coefficient: decaying state `K1`, final ion `K2`,
/// electron `K'` split into orbital `Kl` and spin `Ks`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AugerRanks {
    pub k1: i32,
    pub k2: i32,
    pub kl: i32,
    pub ks: i32,
    pub kp: i32,
}

/// Auger coefficient including the `2pi` rate factor.
pub fn auger(sys: &AugerSystem, r: AugerRanks) -> Complex64 {
    let (j1, j2) = (sys.two_j1, sys.two_j2);
    if !triangle(r.k2, r.kp, r.k1) || !triangle(r.kl, r.ks, r.kp) || r.ks > 2 {
        return Complex64::new(0.0, 0.0);
    }
    let common = dim(j1) * (dim(j2) * dim(SPIN) * dim(r.kp)).sqrt();
    let mut sum = Complex64::new(0.0, 0.0);
    for (w, c) in &sys.channels {
        for (wp, cp) in &sys.channels {
            let o = orbital(w.two_lambda, wp.two_lambda, r.kl);
            if o == 0.0 {
                continue;
            }
            let g = nine_j(j2, w.two_j, j1, j2, wp.two_j, j1, r.k2, r.kp, r.k1);
            if g == 0.0 {
                continue;
            }
            let v = common * o * g * spin_orbit(w.two_lambda, w.two_j, wp.two_lambda, wp.two_j, r.kl, r.ks, r.kp);
            sum += c * cp.conj() * v;
        }
    }
    sum * (2.0 * std::f64::consts::PI)
}

/// Ranks of the radiative-decay coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EmissionRanks {
    pub k1: i32,
    pub kr: i32,
    pub k2: i32,
    pub k: i32,
    pub kp: i32,
}

/// Radiative-decay coefficient (without the `1/2pi` rate factor).
pub fn emission(sys: &EmissionSystem, r: EmissionRanks) -> Complex64 {
    let (j1, j2) = (sys.two_j1, sys.two_j2);
    if !triangle(r.k, r.kp, r.kr) || !triangle(r.k1, r.kr, r.k2) {
        return Complex64::new(0.0, 0.0);
    }
    let find = |k: i32| sys.multipoles.iter().find(|m| m.0 == k).map(|m| m.1);
    let (Some(b), Some(bp)) = (find(r.k), find(r.kp)) else {
        return Complex64::new(0.0, 0.0);
    };
    let w = nine_j(j1, r.k1, j1, r.k, r.kr, r.kp, j2, r.k2, j2) * (dim(r.k1) * dim(j2) * dim(r.k) / dim(r.k2)).sqrt();
    b * bp.conj() * dim(j2) * w
}

/// Ranks of the electron-excitation coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScatteringRanks {
    pub k0: i32,
    pub k0p: i32,
    pub k: i32,
    pub k1: i32,
    pub k1p: i32,
    pub kl0: i32,
    pub ks0: i32,
    pub kl1: i32,
    pub ks1: i32,
}

/// Electron-impact excitation coefficient.
pub fn scattering(sys: &ScatteringSystem, r: ScatteringRanks) -> Complex64 {
    let (j0, j1) = (sys.two_j0, sys.two_j1);
    if !triangle(r.k0, r.k0p, r.k)
        || !triangle(r.k1, r.k1p, r.k)
        || !triangle(r.kl0, r.ks0, r.k0p)
        || !triangle(r.kl1, r.ks1, r.k1p)
    {
        return Complex64::new(0.0, 0.0);
    }
    let common = dim(SPIN) * (dim(j0) * dim(j1) * dim(r.k0p) * dim(r.k1p)).sqrt();
    let mut sum = Complex64::new(0.0, 0.0);
    for h in &sys.amplitudes {
        let (l0, jj0, l1, jj1, jt) =
            (h.incoming.two_lambda, h.incoming.two_j, h.outgoing.two_lambda, h.outgoing.two_j, h.two_j_total);
        for hp in &sys.amplitudes {
            let (l0p, jj0p, l1p, jj1p, jtp) =
                (hp.incoming.two_lambda, hp.incoming.two_j, hp.outgoing.two_lambda, hp.outgoing.two_j, hp.two_j_total);
            let o = orbital(l0, l0p, r.kl0) * orbital(l1, l1p, r.kl1);
            if o == 0.0 {
                continue;
            }
            let g0 = nine_j(j0, r.k0, j0, jj0p, r.k0p, jj0, jtp, r.k, jt);
            let g1 = nine_j(j1, r.k1, j1, jj1p, r.k1p, jj1, jtp, r.k, jt);
            if g0 == 0.0 || g1 == 0.0 {
                continue;
            }
            let v = dim(jt)
                * dim(jtp)
                * common
                * o
                * g0
                * g1
                * spin_orbit(l0, jj0, l0p, jj0p, r.kl0, r.ks0, r.k0p)
                * spin_orbit(l1, jj1, l1p, jj1p, r.kl1, r.ks1, r.k1p);
            sum += h.value * hp.value.conj() * v;
        }
    }
    sum
}

/// Ranks of the electron-impact ionization coefficient. The outgoing pair
/// carries rank `K'`, built from the second electron `K2'` and first `K1'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IonizingRanks {
    pub k0: i32,
    pub k0p: i32,
    pub k: i32,
    pub k1: i32,
    pub kp: i32,
    pub k1p: i32,
    pub k2p: i32,
    pub kl0: i32,
    pub ks0: i32,
    pub kl1: i32,
    pub ks1: i32,
    pub kl2: i32,
    pub ks2: i32,
}

/// Electron-impact ionization coefficient.
pub fn ionizing(sys: &IonizingSystem, r: IonizingRanks) -> Complex64 {
    let (j0, j1) = (sys.two_j0, sys.two_j1);
    if !triangle(r.k0, r.k0p, r.k)
        || !triangle(r.k1, r.kp, r.k)
        || !triangle(r.k2p, r.k1p, r.kp)
        || !triangle(r.kl0, r.ks0, r.k0p)
        || !triangle(r.kl1, r.ks1, r.k1p)
        || !triangle(r.kl2, r.ks2, r.k2p)
    {
        return Complex64::new(0.0, 0.0);
    }
    let common = dim(SPIN) * (dim(SPIN) * dim(j0) * dim(j1) * dim(r.k0p) * dim(r.k1p) * dim(r.kp) * dim(r.k2p)).sqrt();
    let mut sum = Complex64::new(0.0, 0.0);
    for h in &sys.amplitudes {
        for hp in &sys.amplitudes {
            let o = orbital(h.incoming.two_lambda, hp.incoming.two_lambda, r.kl0)
                * orbital(h.out1.two_lambda, hp.out1.two_lambda, r.kl1)
                * orbital(h.out2.two_lambda, hp.out2.two_lambda, r.kl2);
            if o == 0.0 {
                continue;
            }
            let (jt, jtp, jj, jjp) = (h.two_j_total, hp.two_j_total, h.two_j_pair, hp.two_j_pair);
            let g0 = nine_j(j0, r.k0, j0, hp.incoming.two_j, r.k0p, h.incoming.two_j, jtp, r.k, jt);
            let g1 = nine_j(j1, r.k1, j1, jjp, r.kp, jj, jtp, r.k, jt);
            let gp = nine_j(hp.out2.two_j, r.k2p, h.out2.two_j, hp.out1.two_j, r.k1p, h.out1.two_j, jjp, r.kp, jj);
            if g0 == 0.0 || g1 == 0.0 || gp == 0.0 {
                continue;
            }
            let v = dim(jt)
                * dim(jtp)
                * (dim(jj) * dim(jjp)).sqrt()
                * common
                * o
                * g0
                * g1
                * gp
                * spin_orbit(
                    h.incoming.two_lambda,
                    h.incoming.two_j,
                    hp.incoming.two_lambda,
                    hp.incoming.two_j,
                    r.kl0,
                    r.ks0,
                    r.k0p,
                )
                * spin_orbit(h.out1.two_lambda, h.out1.two_j, hp.out1.two_lambda, hp.out1.two_j, r.kl1, r.ks1, r.k1p)
                * spin_orbit(h.out2.two_lambda, h.out2.two_j, hp.out2.two_lambda, hp.out2.two_j, r.kl2, r.ks2, r.k2p);
            sum += h.value * hp.value.conj() * v;
        }
    }
    sum
}
