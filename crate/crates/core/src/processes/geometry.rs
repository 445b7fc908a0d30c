//! Per-geometry tensor tables and result finalization.

use num_complex::Complex64;

use crate::tensors::kernel;

use super::spec::{ParticleSpec, ProcessError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Values indexed by a doubled rank `K` (even) and projection `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct KnTable {
    kmax: i32,
    values: Vec<Complex64>,
}

fn index(k: i32, n: i32) -> usize {
    let kk = (k / 2) as usize;
    kk * kk + ((n + k) / 2) as usize
}

impl KnTable {
    pub fn zeros(kmax: i32) -> Self {
        let kmax = kmax.max(0) & !1;
        let len = index(kmax, kmax) + 1;
        KnTable { kmax, values: vec![ZERO; len] }
    }

    pub fn build(kmax: i32, f: impl Fn(i32, i32) -> Complex64) -> Self {
        let mut t = Self::zeros(kmax);
        for k in (0..=t.kmax).step_by(2) {
            for n in (-k..=k).step_by(2) {
                t.values[index(k, n)] = f(k, n);
            }
        }
        t
    }

    /// Largest doubled rank stored.
    pub fn kmax(&self) -> i32 {
        self.kmax
    }

    pub fn get(&self, k: i32, n: i32) -> Complex64 {
        if k < 0 || k > self.kmax || n.abs() > k || k % 2 != 0 {
            ZERO
        } else {
            self.values[index(k, n)]
        }
    }

    pub fn add(&mut self, k: i32, n: i32, v: Complex64) {
        assert!(k <= self.kmax && n.abs() <= k && k % 2 == 0, "rank ({k},{n}) outside table");
        self.values[index(k, n)] += v;
    }

    /// Every entry as `(2K, 2N, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (i32, i32, Complex64)> + '_ {
        (0..=self.kmax).step_by(2).flat_map(move |k| (-k..=k).step_by(2).map(move |n| (k, n, self.get(k, n))))
    }

    /// True when every projection of rank `K` is zero.
    pub fn is_rank_zero(&self, k: i32) -> bool {
        (-k..=k).step_by(2).all(|n| self.get(k, n) == ZERO)
    }
}

pub fn prepared(two_j: i32, p: &ParticleSpec) -> KnTable {
    KnTable::build(2 * two_j, |k, n| kernel::prepared(two_j, &p.polarization, k, n))
}

pub fn detected(two_j: i32, p: &ParticleSpec) -> KnTable {
    KnTable::build(2 * two_j, |k, n| kernel::detected(two_j, &p.polarization, k, n))
}

/// Factor replacing a detected final state when its multipoles are handed on.
pub fn handed_on(two_j: i32) -> KnTable {
    KnTable::build(2 * two_j, |k, _| Complex64::new((f64::from(k + 1) / f64::from(two_j + 1)).sqrt(), 0.0))
}

/// `sqrt(4pi) Y_{KN}` at the particle's direction, integrated if undetected.
pub fn harmonic(kmax: i32, dir: Option<&crate::angular::Direction>) -> KnTable {
    KnTable::build(kmax, |k, n| kernel::harmonic(k, n, dir))
}

/// Complex conjugate of every entry.
pub fn conj(t: &KnTable) -> KnTable {
    KnTable { kmax: t.kmax, values: t.values.iter().map(|v| v.conj()).collect() }
}

/// Photon tensor `T*(k, k', q)` for a beam or a detected photon; the
/// direction integral when `dir` is `None`.
pub fn photon(two_k: i32, two_kp: i32, two_q: i32, dir: Option<&crate::angular::Direction>) -> KnTable {
    KnTable::build(two_k + two_kp, |kk, n| match dir {
        Some(d) => kernel::photon(two_k, two_kp, two_q, d, kk, n),
        None => kernel::photon_integrated(two_k, two_kp, kk, n),
    })
}

/// Accumulates a real observable while tracking the magnitude of its terms.
#[derive(Clone, Copy, Debug, Default)]
pub struct Accumulator {
    pub sum: Complex64,
    pub scale: f64,
}

impl Accumulator {
    pub fn add(&mut self, v: Complex64) {
        self.sum += v;
        self.scale += v.norm();
    }

    pub fn merge(&mut self, o: Accumulator) {
        self.sum += o.sum;
        self.scale += o.scale;
    }

    /// Asserts reality and positivity within tolerance, then clamps.
    pub fn finish(self, constant: f64) -> Result<f64, ProcessError> {
        finalize(self.sum * constant, self.scale * constant.abs())
    }
}

/// Relative tolerance on the imaginary residue of a real observable.
pub const IMAG_TOL: f64 = 1e-10;
/// Relative tolerance on negative values.
pub const NEG_TOL: f64 = 1e-12;

pub fn finalize(v: Complex64, scale: f64) -> Result<f64, ProcessError> {
    if v.im.abs() > IMAG_TOL * scale {
        return Err(ProcessError::ImaginaryResidue { re: v.re, im: v.im, scale });
    }
    if v.re < -NEG_TOL * scale {
        return Err(ProcessError::Negative { value: v.re, scale });
    }
    Ok(v.re.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_layout() {
        let t = KnTable::build(4, |k, n| Complex64::new(f64::from(k), f64::from(n)));
        assert_eq!(t.get(4, -2), Complex64::new(4.0, -2.0));
        assert_eq!(t.get(6, 0), ZERO);
        assert_eq!(t.iter().count(), 9);
    }

    #[test]
    fn finalize_policy() {
        assert_eq!(finalize(Complex64::new(-1e-15, 0.0), 1.0).unwrap(), 0.0);
        assert!(matches!(finalize(Complex64::new(-1e-6, 0.0), 1.0), Err(ProcessError::Negative { .. })));
        assert!(matches!(finalize(Complex64::new(1.0, 1e-6), 1.0), Err(ProcessError::ImaginaryResidue { .. })));
    }
}
