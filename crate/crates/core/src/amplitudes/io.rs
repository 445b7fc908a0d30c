//! JSON reading and writing of amplitude tables.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use super::{
    AmplitudeError, AmplitudeKey, BoundStateLabel, ChannelKind, ContinuumChannel, Multipolarity, PartialWave,
    ReducedAmplitudeTable, TableBuilder, TransitionKind,
};
use crate::angular::AngularMomentum;

#[derive(Deserialize)]
struct RawFile<'a> {
    #[serde(borrow, default)]
    states: Vec<&'a RawValue>,
    #[serde(borrow, default)]
    channels: Vec<&'a RawValue>,
    #[serde(borrow, default)]
    amplitudes: Vec<&'a RawValue>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRecord {
    id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    config: String,
    #[serde(rename = "two_J")]
    two_big_j: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    energy: Option<f64>,
    #[serde(rename = "two_I", default, skip_serializing_if = "Option::is_none")]
    two_nuclear: Option<i32>,
    #[serde(rename = "two_F", default, skip_serializing_if = "Option::is_none")]
    two_f: Option<i32>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(deny_unknown_fields)]
struct WaveRecord {
    lambda: i32,
    two_j: i32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelRecord {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    two_j: Option<i32>,
    #[serde(rename = "in", default, skip_serializing_if = "Option::is_none")]
    incoming: Option<WaveRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out: Option<WaveRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out1: Option<WaveRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out2: Option<WaveRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    two_j_pair: Option<i32>,
    #[serde(rename = "two_J")]
    two_big_j: i32,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum KindRecord {
    Photo,
    Electrostatic,
    Decay,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
enum PRecord {
    E,
    M,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmplitudeRecord {
    kind: KindRecord,
    bra: String,
    ket: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    channel: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<PRecord>,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct FileOut {
    states: Vec<StateRecord>,
    channels: Vec<ChannelRecord>,
    amplitudes: Vec<AmplitudeRecord>,
}

fn line_of(src: &str, raw: &RawValue) -> usize {
    let offset = raw.get().as_ptr() as usize - src.as_ptr() as usize;
    src[..offset].bytes().filter(|&b| b == b'\n').count() + 1
}

fn parse_record<'a, T: Deserialize<'a>>(src: &str, raw: &'a RawValue) -> Result<(T, usize), AmplitudeError> {
    let line = line_of(src, raw);
    serde_json::from_str(raw.get()).map(|v| (v, line)).map_err(|e| AmplitudeError::Parse {
        line: line + e.line() - 1,
        column: e.column(),
        message: e.to_string(),
    })
}

fn wave(w: WaveRecord) -> PartialWave {
    PartialWave::new(w.lambda, w.two_j)
}

fn channel_from(r: ChannelRecord, line: usize) -> Result<ContinuumChannel, AmplitudeError> {
    let kind = match (r.lambda, r.two_j, r.incoming, r.out, r.out1, r.out2, r.two_j_pair) {
        (Some(l), Some(j), None, None, None, None, None) => ChannelKind::Single(PartialWave::new(l, j)),
        (None, None, Some(i), Some(o), None, None, None) => {
            ChannelKind::Scattering { incoming: wave(i), outgoing: wave(o) }
        }
        (None, None, Some(i), None, Some(o1), Some(o2), Some(jp)) => {
            ChannelKind::Ionizing { incoming: wave(i), out1: wave(o1), out2: wave(o2), two_j_pair: jp }
        }
        _ => {
            return Err(AmplitudeError::Parse {
                line,
                column: 1,
                message: format!(
                    "channel {}: expected {{lambda, two_j}}, {{in, out}} or {{in, out1, out2, two_j_pair}}",
                    r.id
                ),
            })
        }
    };
    Ok(ContinuumChannel { id: r.id, epsilon: r.epsilon, kind, two_j_total: r.two_big_j })
}

/// Parses and validates an amplitude table from JSON text.
pub fn parse_table(src: &str) -> Result<ReducedAmplitudeTable, AmplitudeError> {
    let file: RawFile = serde_json::from_str(src).map_err(|e| AmplitudeError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut b = TableBuilder::new();
    for raw in &file.states {
        let (r, line): (StateRecord, usize) = parse_record(src, raw)?;
        let mut s = BoundStateLabel::new(&r.id, r.two_big_j);
        s.config = r.config;
        s.energy = r.energy;
        s.nuclear_spin = r.two_nuclear.map(AngularMomentum::from_twice);
        s.f = r.two_f.map(AngularMomentum::from_twice);
        b = b.state_at(s, line)?;
    }
    for raw in &file.channels {
        let (r, line): (ChannelRecord, usize) = parse_record(src, raw)?;
        b = b.channel_at(channel_from(r, line)?, line)?;
    }
    for raw in &file.amplitudes {
        let (r, line): (AmplitudeRecord, usize) = parse_record(src, raw)?;
        let kind = match r.kind {
            KindRecord::Photo => TransitionKind::Photo,
            KindRecord::Electrostatic => TransitionKind::Electrostatic,
            KindRecord::Decay => TransitionKind::Decay,
        };
        let p = match r.p {
            Some(PRecord::M) => Multipolarity::Magnetic,
            _ => Multipolarity::Electric,
        };
        if kind != TransitionKind::Electrostatic && (r.k.is_none() || r.p.is_none()) {
            return Err(AmplitudeError::Parse {
                line,
                column: 1,
                message: "photon amplitudes need `k` and `p`".into(),
            });
        }
        let key = AmplitudeKey { kind, bra: r.bra, ket: r.ket, channel: r.channel, k: r.k.unwrap_or(0), p };
        b = b.amplitude_at(key, Complex64::new(r.re, r.im), line)?;
    }
    Ok(b.build())
}

/// Reads an amplitude table from a file.
pub fn load_table(path: impl AsRef<std::path::Path>) -> Result<ReducedAmplitudeTable, AmplitudeError> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path)
        .map_err(|source| AmplitudeError::Io { path: path.display().to_string(), source })?;
    parse_table(&src)
}

fn wave_out(w: PartialWave) -> WaveRecord {
    WaveRecord { lambda: w.lambda(), two_j: w.two_j }
}

impl ReducedAmplitudeTable {
    /// Serializes to the same JSON layout the loader reads.
    pub fn to_json(&self) -> String {
        let states = self
            .states()
            .map(|s| StateRecord {
                id: s.id.clone(),
                config: s.config.clone(),
                two_big_j: s.j.twice(),
                energy: s.energy,
                two_nuclear: s.nuclear_spin.map(|x| x.twice()),
                two_f: s.f.map(|x| x.twice()),
            })
            .collect();
        let channels = self
            .channels()
            .map(|c| {
                let mut r = ChannelRecord {
                    id: c.id.clone(),
                    epsilon: c.epsilon,
                    lambda: None,
                    two_j: None,
                    incoming: None,
                    out: None,
                    out1: None,
                    out2: None,
                    two_j_pair: None,
                    two_big_j: c.two_j_total,
                };
                match c.kind {
                    ChannelKind::Single(w) => {
                        r.lambda = Some(w.lambda());
                        r.two_j = Some(w.two_j);
                    }
                    ChannelKind::Scattering { incoming, outgoing } => {
                        r.incoming = Some(wave_out(incoming));
                        r.out = Some(wave_out(outgoing));
                    }
                    ChannelKind::Ionizing { incoming, out1, out2, two_j_pair } => {
                        r.incoming = Some(wave_out(incoming));
                        r.out1 = Some(wave_out(out1));
                        r.out2 = Some(wave_out(out2));
                        r.two_j_pair = Some(two_j_pair);
                    }
                }
                r
            })
            .collect();
        let amplitudes = self
            .entries()
            .map(|(k, v)| {
                let photon = k.kind != TransitionKind::Electrostatic;
                AmplitudeRecord {
                    kind: match k.kind {
                        TransitionKind::Photo => KindRecord::Photo,
                        TransitionKind::Electrostatic => KindRecord::Electrostatic,
                        TransitionKind::Decay => KindRecord::Decay,
                    },
                    bra: k.bra.clone(),
                    ket: k.ket.clone(),
                    channel: k.channel.clone(),
                    k: photon.then_some(k.k),
                    p: photon.then_some(match k.p {
                        Multipolarity::Electric => PRecord::E,
                        Multipolarity::Magnetic => PRecord::M,
                    }),
                    re: v.re,
                    im: v.im,
                }
            })
            .collect();
        serde_json::to_string_pretty(&FileOut { states, channels, amplitudes }).expect("serializable table")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "states": [
    {"id": "g", "two_J": 0},
    {"id": "e", "two_J": 2}
  ],
  "amplitudes": [
    {"kind": "photo", "bra": "e", "ket": "g", "k": 1, "p": "E", "re": 1.0, "im": 0.0}
  ]
}"#;

    #[test]
    fn minimal_file() {
        let t = parse_table(MINIMAL).unwrap();
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn duplicate_key_is_named() {
        let src = MINIMAL.replace(
            "\"im\": 0.0}\n",
            "\"im\": 0.0},\n    {\"kind\": \"photo\", \"bra\": \"e\", \"ket\": \"g\", \"k\": 1, \"p\": \"E\", \"re\": 2.0, \"im\": 0.0}\n",
        );
        match parse_table(&src) {
            Err(AmplitudeError::Duplicate { line, key }) => {
                assert_eq!(line, 8);
                assert!(key.contains("photo e <- g"), "{key}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn channel_coupling_rule() {
        let ok = r#"{"states": [{"id": "a", "two_J": 0}, {"id": "i", "two_J": 1}],
 "channels": [{"id": "c", "lambda": 1, "two_j": 3, "two_J": 2}],
 "amplitudes": [{"kind": "photo", "bra": "i", "ket": "a", "channel": "c", "k": 1, "p": "E", "re": 1.0, "im": 0.0}]}"#;
        assert!(parse_table(ok).is_ok());
        let bad = ok.replace("\"two_j\": 3", "\"two_j\": 5");
        match parse_table(&bad) {
            Err(AmplitudeError::Coupling { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_reports_line() {
        let src = "{\n \"states\": [\n {\"id\": \"g\", \"two_J\": }\n]}";
        match parse_table(src) {
            Err(AmplitudeError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        let t = parse_table(MINIMAL).unwrap();
        let again = parse_table(&t.to_json()).unwrap();
        assert_eq!(t, again);
    }
}
