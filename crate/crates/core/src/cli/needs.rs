//! Dry-run resolution of the amplitudes a spec file will look up.
//!
//! A continuum channel counts as needed by a transition when its couplings fit
//! both states and no other pair of states uses it. Parity is not recorded in
//! the table, so a photo channel is satisfied by an amplitude of any rank.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::amplitudes::{ChannelKind, ContinuumChannel, ReducedAmplitudeTable, TransitionKind};
use crate::angular::triangle;
use crate::processes::spec::{
    resolve_auger, resolve_dielectronic, resolve_emission, resolve_photoexcitation, resolve_photoionization,
    resolve_recombination,
};
use crate::processes::{ProcessKind, ProcessSpec, Warning};

use super::specfile::SpecFile;

/// Outcome of a dry run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub needed: usize,
    pub missing: Vec<String>,
    pub warnings: Vec<String>,
    pub rank_bounds: Vec<String>,
}

impl Report {
    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} needed, {} missing", self.needed, self.missing.len()).unwrap();
        for m in &self.missing {
            writeln!(s, "missing: {m}").unwrap();
        }
        for w in &self.warnings {
            writeln!(s, "warning: {w}").unwrap();
        }
        for r in &self.rank_bounds {
            writeln!(s, "ranks: {r}").unwrap();
        }
        s
    }
}

fn half(two: i32) -> String {
    if two % 2 == 0 {
        (two / 2).to_string()
    } else {
        format!("{two}/2")
    }
}

/// Photo transition between bound states or into single-electron channels.
enum Link<'a> {
    Photo { bra: &'a str, ket: &'a str, continuum: bool },
    Decay { bra: &'a str, ket: &'a str },
    Electrostatic { bra: &'a str, ket: &'a str },
}

fn links(spec: &ProcessSpec) -> Vec<Link<'_>> {
    let (i, f) = (spec.initial.as_str(), spec.final_state.as_str());
    match spec.kind {
        ProcessKind::Photoexcitation => vec![Link::Photo { bra: f, ket: i, continuum: false }],
        ProcessKind::Photoionization => vec![Link::Photo { bra: f, ket: i, continuum: true }],
        ProcessKind::RadRecombination => vec![Link::Photo { bra: i, ket: f, continuum: true }],
        ProcessKind::RadDecay => vec![Link::Decay { bra: f, ket: i }],
        ProcessKind::Auger | ProcessKind::EExcitation | ProcessKind::EIonization => {
            vec![Link::Electrostatic { bra: f, ket: i }]
        }
        ProcessKind::DielectronicRecombination => match spec.intermediate.as_deref() {
            Some(r) => vec![Link::Electrostatic { bra: i, ket: r }, Link::Decay { bra: f, ket: r }],
            None => Vec::new(),
        },
    }
}

struct Checker<'a> {
    table: &'a ReducedAmplitudeTable,
    /// (kind, channel) -> (bra, ket) pairs with an amplitude.
    users: BTreeMap<(TransitionKind, String), BTreeSet<(String, String)>>,
    report: Report,
}

impl<'a> Checker<'a> {
    fn new(table: &'a ReducedAmplitudeTable) -> Self {
        let mut users: BTreeMap<_, BTreeSet<_>> = BTreeMap::new();
        for (key, _) in table.entries() {
            if let Some(c) = &key.channel {
                users.entry((key.kind, c.clone())).or_default().insert((key.bra.clone(), key.ket.clone()));
            }
        }
        Checker { table, users, report: Report::default() }
    }

    fn two_j(&mut self, id: &str) -> Option<i32> {
        self.report.needed += 1;
        match self.table.state(id) {
            Some(s) => Some(s.j.twice()),
            None => {
                self.report.missing.push(format!("state `{id}`"));
                None
            }
        }
    }

    fn has(&self, kind: TransitionKind, bra: &str, ket: &str, channel: Option<&str>) -> bool {
        self.table
            .entries()
            .any(|(k, _)| k.kind == kind && k.bra == bra && k.ket == ket && k.channel.as_deref() == channel)
    }

    /// Channel claimed by a different pair of states.
    fn foreign(&self, kind: TransitionKind, c: &ContinuumChannel, bra: &str, ket: &str) -> bool {
        self.users.get(&(kind, c.id.clone())).is_some_and(|u| !u.contains(&(bra.to_string(), ket.to_string())))
    }

    fn lowest_k(j0: i32, j1: i32, k_max: u32) -> Option<u32> {
        (1..=k_max).find(|&k| triangle(j0, 2 * k as i32, j1))
    }

    fn bound(&mut self, kind: TransitionKind, bra: &str, ket: &str, k_max: u32) {
        let (Some(jb), Some(jk)) = (self.two_j(bra), self.two_j(ket)) else { return };
        let Some(k) = Self::lowest_k(jk, jb, k_max) else {
            self.report.warnings.push(format!(
                "no multipole up to k_max={k_max} couples J={} and J={}",
                half(jk),
                half(jb)
            ));
            return;
        };
        self.report.needed += 1;
        if !self.has(kind, bra, ket, None) {
            self.report.missing.push(format!("{} {bra} <- {ket}: (k={k})", kind.as_str()));
        }
    }

    fn continuum(&mut self, kind: TransitionKind, bra: &str, ket: &str, k_max: u32, spec_kind: ProcessKind) {
        let (Some(jb), Some(jk)) = (self.two_j(bra), self.two_j(ket)) else { return };
        let channels: Vec<ContinuumChannel> = self.table.channels().cloned().collect();
        let mut lambda_max = 0;
        let mut any = false;
        for c in &channels {
            if self.foreign(kind, c, bra, ket) {
                continue;
            }
            let (fits, label, k) = match (&c.kind, kind) {
                (ChannelKind::Single(w), TransitionKind::Photo) => {
                    let k = Self::lowest_k(jk, c.two_j_total, k_max);
                    let fits = triangle(jb, w.two_j, c.two_j_total) && k.is_some();
                    (fits, format!("lambda={}, j={}, J={}", w.lambda(), half(w.two_j), half(c.two_j_total)), k)
                }
                (ChannelKind::Single(w), TransitionKind::Electrostatic)
                    if spec_kind != ProcessKind::EExcitation && spec_kind != ProcessKind::EIonization =>
                {
                    let fits = c.two_j_total == jk && triangle(jb, w.two_j, c.two_j_total);
                    (fits, format!("lambda={}, j={}, J={}", w.lambda(), half(w.two_j), half(c.two_j_total)), None)
                }
                (ChannelKind::Scattering { incoming, outgoing }, TransitionKind::Electrostatic)
                    if spec_kind == ProcessKind::EExcitation =>
                {
                    let fits =
                        triangle(jk, incoming.two_j, c.two_j_total) && triangle(jb, outgoing.two_j, c.two_j_total);
                    (fits, format!("in ({incoming}), out ({outgoing}), J={}", half(c.two_j_total)), None)
                }
                (ChannelKind::Ionizing { incoming, out1, out2, two_j_pair }, TransitionKind::Electrostatic)
                    if spec_kind == ProcessKind::EIonization =>
                {
                    let fits = triangle(jk, incoming.two_j, c.two_j_total)
                        && triangle(jb, *two_j_pair, c.two_j_total)
                        && triangle(out1.two_j, out2.two_j, *two_j_pair);
                    (
                        fits,
                        format!(
                            "in ({incoming}), out ({out1}) ({out2}), j_pair={}, J={}",
                            half(*two_j_pair),
                            half(c.two_j_total)
                        ),
                        None,
                    )
                }
                _ => (false, String::new(), None),
            };
            if !fits {
                continue;
            }
            any = true;
            if let ChannelKind::Single(w) = &c.kind {
                lambda_max = lambda_max.max(w.lambda());
            }
            self.report.needed += 1;
            if !self.has(kind, bra, ket, Some(&c.id)) {
                let k = k.map(|k| format!(", k={k}")).unwrap_or_default();
                self.report.missing.push(format!("{} {bra} <- {ket}, channel `{}`: ({label}{k})", kind.as_str(), c.id));
            }
        }
        if !any {
            self.report.needed += 1;
            self.report
                .missing
                .push(format!("{} {bra} <- {ket}: no compatible continuum channel declared", kind.as_str()));
        }
        if lambda_max > 0 {
            self.report.rank_bounds.push(format!("electron {bra} <- {ket}: K <= {}", 2 * lambda_max));
        }
    }

    fn step(&mut self, spec: &ProcessSpec) {
        let k_max = spec.k_max;
        for link in links(spec) {
            match link {
                Link::Photo { bra, ket, continuum: false } => self.bound(TransitionKind::Photo, bra, ket, k_max),
                Link::Photo { bra, ket, continuum: true } => {
                    self.continuum(TransitionKind::Photo, bra, ket, k_max, spec.kind)
                }
                Link::Decay { bra, ket } => self.bound(TransitionKind::Decay, bra, ket, k_max),
                Link::Electrostatic { bra, ket } => {
                    self.continuum(TransitionKind::Electrostatic, bra, ket, k_max, spec.kind)
                }
            }
        }
        if spec.kind == ProcessKind::DielectronicRecombination && spec.intermediate.is_none() {
            self.report.missing.push("intermediate resonance state".into());
        }
        for id in [&spec.initial, &spec.final_state] {
            if let Some(s) = self.table.state(id) {
                let j = s.j.twice();
                self.report.rank_bounds.push(format!("level `{id}` (J={}): K <= {j}", half(j)));
            }
        }
        if matches!(
            spec.kind,
            ProcessKind::Photoexcitation
                | ProcessKind::Photoionization
                | ProcessKind::RadRecombination
                | ProcessKind::RadDecay
                | ProcessKind::DielectronicRecombination
        ) {
            self.report.rank_bounds.push(format!("photon ({}): K <= {}", spec.kind.as_str(), 2 * k_max));
        }
        for w in truncation(spec, self.table) {
            self.report.warnings.push(w.to_string());
        }
    }
}

/// Warnings of the resolver, ignoring failures already listed as missing keys.
fn truncation(spec: &ProcessSpec, table: &ReducedAmplitudeTable) -> Vec<Warning> {
    let r = match spec.kind {
        ProcessKind::Photoexcitation => resolve_photoexcitation(spec, table).map(|x| x.1),
        ProcessKind::Photoionization => resolve_photoionization(spec, table).map(|x| x.1),
        ProcessKind::RadRecombination => resolve_recombination(spec, table).map(|x| x.1),
        ProcessKind::RadDecay => resolve_emission(spec, table).map(|x| x.1),
        ProcessKind::Auger => resolve_auger(spec, table).map(|x| x.1),
        ProcessKind::DielectronicRecombination => resolve_dielectronic(spec, table).map(|x| x.1),
        ProcessKind::EExcitation | ProcessKind::EIonization => Ok(Vec::new()),
    };
    r.unwrap_or_default()
}

/// Lists missing amplitudes, truncation warnings and rank bounds.
pub fn validate(file: &SpecFile, table: &ReducedAmplitudeTable) -> Report {
    let mut c = Checker::new(table);
    for s in &file.steps {
        c.step(s);
    }
    let mut r = c.report;
    let mut seen = BTreeSet::new();
    r.rank_bounds.retain(|b| seen.insert(b.clone()));
    r
}
