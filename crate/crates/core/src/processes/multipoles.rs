//! State multipoles handed from one step of a cascade to the next.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::angular::AngularMomentum;
use crate::tensors::StateMultipoleIndex;

use super::geometry::{finalize, KnTable};
use super::spec::ProcessError;

/// Multipole table with the accumulated magnitude of its terms per entry,
/// used to judge the reality and sign of contracted results.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Weighted {
    pub values: KnTable,
    pub magnitude: KnTable,
}

impl Weighted {
    pub fn zeros(kmax: i32) -> Self {
        Weighted { values: KnTable::zeros(kmax), magnitude: KnTable::zeros(kmax) }
    }

    pub fn add(&mut self, k: i32, n: i32, v: Complex64) {
        self.values.add(k, n, v);
        self.magnitude.add(k, n, Complex64::new(v.norm(), 0.0));
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.values = KnTable::build(self.values.kmax(), |k, n| self.values.get(k, n) * c);
        self.magnitude = KnTable::build(self.magnitude.kmax(), |k, n| self.magnitude.get(k, n) * c.abs());
        self
    }

    /// Multiplies every entry by `f(K, N)`.
    pub fn times(&self, f: &KnTable) -> Self {
        let kmax = self.values.kmax();
        Weighted {
            values: KnTable::build(kmax, |k, n| self.values.get(k, n) * f.get(k, n)),
            magnitude: KnTable::build(kmax, |k, n| self.magnitude.get(k, n) * f.get(k, n).norm()),
        }
    }

    /// `sum_{KN} a(K,N) b(K,N)` with the matching magnitude bound.
    pub fn dot(&self, other: &Weighted) -> (Complex64, f64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut m = 0.0;
        for (k, n, a) in self.values.iter() {
            v += a * other.values.get(k, n);
            m += self.magnitude.get(k, n).re * other.magnitude.get(k, n).re;
        }
        (v, m)
    }

    /// `sum_{KN} a(K,N) f(K,N)` for a plain factor table.
    pub fn contract(&self, f: &KnTable) -> (Complex64, f64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut m = 0.0;
        for (k, n, a) in self.values.iter() {
            let x = f.get(k, n);
            v += a * x;
            m += self.magnitude.get(k, n).re * x.norm();
        }
        (v, m)
    }
}

/// State multipoles `W(K, N)` of a level `J` produced by a first step, in
/// the normalization where contracting with a second-step response gives
/// the two-step observable.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipoleDistribution {
    pub(crate) two_j: i32,
    pub(crate) table: Weighted,
}

impl MultipoleDistribution {
    pub(crate) fn new(two_j: i32, table: Weighted) -> Self {
        MultipoleDistribution { two_j, table }
    }

    pub fn reference(&self) -> AngularMomentum {
        AngularMomentum::from_twice(self.two_j)
    }

    /// Component for doubled rank and projection.
    pub fn component(&self, two_k: i32, two_n: i32) -> Complex64 {
        self.table.values.get(two_k, two_n)
    }

    /// Nonzero components keyed by multipole index.
    pub fn components(&self) -> BTreeMap<StateMultipoleIndex, Complex64> {
        self.table
            .values
            .iter()
            .filter(|(_, _, v)| *v != Complex64::new(0.0, 0.0))
            .map(|(k, n, v)| {
                let idx = StateMultipoleIndex { k: AngularMomentum::from_twice(k), n: AngularMomentum::from_twice(n) };
                (idx, v)
            })
            .collect()
    }

    /// Real part of the `(0,0)` component.
    pub fn monopole(&self) -> f64 {
        self.component(0, 0).re
    }

    pub fn scaled(&self, c: f64) -> Self {
        MultipoleDistribution { two_j: self.two_j, table: self.table.clone().scaled(c) }
    }
}

/// Second-step factor `R(K, N)`: contracting it with a distribution of the
/// same level yields the observable of the final step.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipoleResponse {
    pub(crate) two_j: i32,
    pub(crate) table: Weighted,
}

impl MultipoleResponse {
    pub(crate) fn new(two_j: i32, table: Weighted) -> Self {
        MultipoleResponse { two_j, table }
    }

    pub fn reference(&self) -> AngularMomentum {
        AngularMomentum::from_twice(self.two_j)
    }

    pub fn component(&self, two_k: i32, two_n: i32) -> Complex64 {
        self.table.values.get(two_k, two_n)
    }
}

/// `((2K1, 2N1), (2K2, 2N2), value, magnitude)`.
pub(crate) type TransferEntry = ((i32, i32), (i32, i32), Complex64, f64);

/// Linear map from the multipoles of `J1` to those of `J2` produced by a decay.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipoleTransfer {
    pub(crate) two_j1: i32,
    pub(crate) two_j2: i32,
    pub(crate) entries: Vec<TransferEntry>,
}

impl MultipoleTransfer {
    pub fn from_reference(&self) -> AngularMomentum {
        AngularMomentum::from_twice(self.two_j1)
    }

    pub fn to_reference(&self) -> AngularMomentum {
        AngularMomentum::from_twice(self.two_j2)
    }

    /// Multipoles of `J2` fed by `input`.
    pub fn apply(&self, input: &MultipoleDistribution) -> Result<MultipoleDistribution, ProcessError> {
        check_reference(input.two_j, self.two_j1)?;
        let mut out = Weighted::zeros(2 * self.two_j2);
        for ((k1, n1), (k2, n2), v, m) in &self.entries {
            let a = input.table.values.get(*k1, *n1);
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            out.values.add(*k2, *n2, a * v);
            out.magnitude.add(*k2, *n2, Complex64::new(input.table.magnitude.get(*k1, *n1).re * m, 0.0));
        }
        Ok(MultipoleDistribution::new(self.two_j2, out))
    }
}

fn check_reference(a: i32, b: i32) -> Result<(), ProcessError> {
    if a != b {
        return Err(ProcessError::Domain(format!("multipoles of 2J={a} cannot feed a step expecting 2J={b}")));
    }
    Ok(())
}

/// Two-step observable `sum_{K1 N1} first(K1,N1) second(K1,N1)`.
pub fn compose_two_step(first: &MultipoleDistribution, second: &MultipoleResponse) -> Result<f64, ProcessError> {
    check_reference(first.two_j, second.two_j)?;
    let (v, m) = first.table.dot(&second.table);
    finalize(v, m)
}

/// One link of a cascade.
#[derive(Clone, Debug)]
pub enum ChainStep {
    Distribution(MultipoleDistribution),
    Transfer(MultipoleTransfer),
    Response(MultipoleResponse),
}

/// Observable of a cascade: a distribution, any number of transfers, and a
/// closing response.
pub fn compose_chain(steps: &[ChainStep]) -> Result<f64, ProcessError> {
    if steps.len() < 2 {
        return Err(ProcessError::Domain(format!("a chain needs at least two steps, got {}", steps.len())));
    }
    let mut current = match &steps[0] {
        ChainStep::Distribution(d) => d.clone(),
        _ => return Err(ProcessError::Domain("a chain must start with a multipole distribution".into())),
    };
    for s in &steps[1..steps.len() - 1] {
        current = match s {
            ChainStep::Transfer(t) => t.apply(&current)?,
            _ => return Err(ProcessError::Domain("inner chain links must be multipole transfers".into())),
        };
    }
    match &steps[steps.len() - 1] {
        ChainStep::Response(r) => compose_two_step(&current, r),
        _ => Err(ProcessError::Domain("a chain must end with a response".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(two_j: i32, vals: &[(i32, i32, f64)]) -> MultipoleDistribution {
        let mut w = Weighted::zeros(2 * two_j);
        for &(k, n, v) in vals {
            w.add(k, n, Complex64::new(v, 0.0));
        }
        MultipoleDistribution::new(two_j, w)
    }

    #[test]
    fn isotropic_response_picks_monopole() {
        let d = dist(2, &[(0, 0, 3.0), (4, 0, -0.5), (2, 2, 0.1)]);
        let mut w = Weighted::zeros(4);
        w.add(0, 0, Complex64::new(2.0, 0.0));
        let r = MultipoleResponse::new(2, w);
        assert!((compose_two_step(&d, &r).unwrap() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn mismatched_levels_are_rejected() {
        let d = dist(2, &[(0, 0, 1.0)]);
        let r = MultipoleResponse::new(3, Weighted::zeros(6));
        assert!(matches!(compose_two_step(&d, &r), Err(ProcessError::Domain(_))));
        assert!(compose_chain(&[ChainStep::Distribution(d)]).is_err());
    }
}
