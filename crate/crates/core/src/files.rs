//! JSON file formats for protocols and input distributions. Complex
//! numbers are `[re, im]` pairs and matrices are row-major nested arrays.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::engine::{Party, ProtocolSpec, Roles, Round};
use crate::linalg::{CMatrix, Isometry, PureState, RegisterLayout};
use crate::{Error, InputDistribution, Result};

/// Tolerance applied to isometries and normalization read from files.
pub const FILE_TOL: f64 = 1e-9;

type Pair = [f64; 2];

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegisterEntry {
    pub label: String,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrestateEntry {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    pub amplitudes: Vec<Pair>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsometryEntry {
    /// 1-based round; defaults to one isometry per round in file order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round: Option<usize>,
    #[serde(rename = "in")]
    pub inputs: Vec<RegisterEntry>,
    #[serde(rename = "out")]
    pub outputs: Vec<RegisterEntry>,
    pub matrix: Vec<Vec<Pair>>,
    pub sender: String,
    /// Registers sent at the end of the round.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub send: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RolesEntry {
    pub alice_inputs: Vec<RegisterEntry>,
    pub bob_inputs: Vec<RegisterEntry>,
    #[serde(default)]
    pub alice_outputs: Vec<String>,
    #[serde(default)]
    pub bob_outputs: Vec<String>,
    #[serde(default)]
    pub alice_prestate: Vec<String>,
    #[serde(default)]
    pub bob_prestate: Vec<String>,
}

/// On-disk protocol. `rounds` counts message rounds; the protocol has one
/// more, final, silent round. A round's message is, in order of
/// precedence, the `messages` entry, the union of its isometries' `send`
/// lists, or the last output register of its last isometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolFile {
    pub rounds: usize,
    pub x_alphabet: Vec<serde_json::Value>,
    pub y_alphabet: Vec<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prestate: Option<PrestateEntry>,
    pub isometries: Vec<IsometryEntry>,
    pub roles: RolesEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub messages: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    /// Indexed `[x][y]`.
    pub probs: Vec<Vec<f64>>,
}

/// Parses JSON, naming the offending field on failure.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Parse(format!("at `{path}`: {}", e.into_inner()))
    })
}

fn regs(entries: &[RegisterEntry]) -> Vec<(String, usize)> {
    entries.iter().map(|e| (e.label.clone(), e.dim)).collect()
}

fn entries(regs: &[(String, usize)]) -> Vec<RegisterEntry> {
    regs.iter().map(|(label, dim)| RegisterEntry { label: label.clone(), dim: *dim }).collect()
}

fn complex(p: Pair) -> num_complex::Complex64 {
    num_complex::Complex64::new(p[0], p[1])
}

fn field_err(field: String, e: Error) -> Error {
    Error::Parse(format!("at `{field}`: {e}"))
}

impl ProtocolFile {
    pub fn into_spec(self) -> Result<ProtocolSpec> {
        let n_rounds = self.rounds + 1;
        if self.rounds == 0 {
            return Err(Error::Parse("at `rounds`: need at least one message round".into()));
        }
        let prestate = match &self.prestate {
            None => PureState::trivial(),
            Some(p) => {
                if p.labels.len() != p.dims.len() {
                    return Err(Error::Parse("at `prestate.dims`: one dim per label".into()));
                }
                let layout = RegisterLayout::new(p.labels.iter().cloned().zip(p.dims.iter().copied()))
                    .map_err(|e| field_err("prestate.labels".into(), e))?;
                let amps = p.amplitudes.iter().copied().map(complex).collect();
                PureState::new_with_tol(layout, amps, FILE_TOL)
                    .map_err(|e| field_err("prestate.amplitudes".into(), e))?
            }
        };
        let mut rounds = vec![Round::empty(); n_rounds];
        let mut sends: Vec<Option<Vec<String>>> = vec![None; n_rounds];
        for (k, iso) in self.isometries.iter().enumerate() {
            let at = |f: &str| format!("isometries[{k}].{f}");
            let round = iso.round.unwrap_or(k + 1);
            if round == 0 || round > n_rounds {
                return Err(Error::Parse(format!("at `{}`: round {round} outside 1..={n_rounds}", at("round"))));
            }
            let expected = Party::of_round(round);
            if iso.sender != expected.to_string() {
                return Err(Error::Parse(format!(
                    "at `{}`: round {round} belongs to {expected}, found `{}`",
                    at("sender"),
                    iso.sender
                )));
            }
            let cols = iso.matrix.first().map_or(0, Vec::len);
            if iso.matrix.iter().any(|row| row.len() != cols) {
                return Err(Error::Parse(format!("at `{}`: ragged matrix", at("matrix"))));
            }
            let m = CMatrix::from_fn(iso.matrix.len(), cols, |i, j| complex(iso.matrix[i][j]));
            let v = Isometry::new(regs(&iso.inputs), regs(&iso.outputs), m, FILE_TOL)
                .map_err(|e| field_err(at("matrix"), e))?;
            rounds[round - 1].ops.push(v);
            if let Some(s) = &iso.send {
                sends[round - 1].get_or_insert_with(Vec::new).extend(s.iter().cloned());
            }
        }
        for (i, round) in rounds.iter_mut().enumerate() {
            let explicit = self.messages.as_ref().map(|m| m.get(i).cloned().unwrap_or_default());
            round.message = match (explicit, sends[i].take()) {
                (Some(m), _) => m,
                (None, Some(s)) => s,
                (None, None) if i + 1 < n_rounds => {
                    let last = round.ops.last().and_then(|v| v.outputs().last()).ok_or_else(|| {
                        Error::Parse(format!("round {}: no isometry and no message declared", i + 1))
                    })?;
                    vec![last.0.clone()]
                }
                (None, None) => vec![],
            };
        }
        let r = &self.roles;
        let x_size: usize = r.alice_inputs.iter().map(|e| e.dim).product();
        let y_size: usize = r.bob_inputs.iter().map(|e| e.dim).product();
        if x_size != self.x_alphabet.len() {
            return Err(Error::Parse(format!(
                "at `x_alphabet`: {} symbols but Alice's input registers span {x_size}",
                self.x_alphabet.len()
            )));
        }
        if y_size != self.y_alphabet.len() {
            return Err(Error::Parse(format!(
                "at `y_alphabet`: {} symbols but Bob's input registers span {y_size}",
                self.y_alphabet.len()
            )));
        }
        let spec = ProtocolSpec {
            x_size,
            y_size,
            prestate,
            rounds,
            roles: Roles {
                alice_inputs: regs(&r.alice_inputs),
                bob_inputs: regs(&r.bob_inputs),
                alice_outputs: r.alice_outputs.clone(),
                bob_outputs: r.bob_outputs.clone(),
                alice_prestate: r.alice_prestate.clone(),
                bob_prestate: r.bob_prestate.clone(),
            },
        };
        spec.schedule()?;
        Ok(spec)
    }

    pub fn from_spec(p: &ProtocolSpec) -> Self {
        let mut isometries = Vec::new();
        for (i, round) in p.rounds.iter().enumerate() {
            for v in &round.ops {
                isometries.push(IsometryEntry {
                    round: Some(i + 1),
                    inputs: entries(v.inputs()),
                    outputs: entries(v.outputs()),
                    matrix: (0..v.matrix().nrows())
                        .map(|r| (0..v.matrix().ncols()).map(|c| [v.matrix()[(r, c)].re, v.matrix()[(r, c)].im]).collect())
                        .collect(),
                    sender: Party::of_round(i + 1).to_string(),
                    send: None,
                });
            }
        }
        let layout = p.prestate.layout();
        let prestate = (!layout.is_empty()).then(|| PrestateEntry {
            labels: layout.labels().to_vec(),
            dims: layout.dims().to_vec(),
            amplitudes: p.prestate.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        });
        let r = &p.roles;
        Self {
            rounds: p.r(),
            x_alphabet: (0..p.x_size).map(serde_json::Value::from).collect(),
            y_alphabet: (0..p.y_size).map(serde_json::Value::from).collect(),
            prestate,
            isometries,
            roles: RolesEntry {
                alice_inputs: entries(&r.alice_inputs),
                bob_inputs: entries(&r.bob_inputs),
                alice_outputs: r.alice_outputs.clone(),
                bob_outputs: r.bob_outputs.clone(),
                alice_prestate: r.alice_prestate.clone(),
                bob_prestate: r.bob_prestate.clone(),
            },
            messages: Some(p.rounds.iter().map(|r| r.message.clone()).collect()),
        }
    }
}

pub fn read_protocol(text: &str) -> Result<ProtocolSpec> {
    parse_json::<ProtocolFile>(text)?.into_spec()
}

pub fn write_protocol(p: &ProtocolSpec) -> String {
    serde_json::to_string_pretty(&ProtocolFile::from_spec(p)).expect("protocol files serialize")
}

pub fn read_distribution(text: &str) -> Result<InputDistribution> {
    let f: DistributionFile = parse_json(text)?;
    InputDistribution::from_rows(&f.probs, FILE_TOL).map_err(|e| field_err("probs".into(), e))
}

pub fn write_distribution(mu: &InputDistribution) -> String {
    serde_json::to_string_pretty(&DistributionFile { probs: mu.rows() }).expect("distribution files serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{build_and_protocol, build_classical_exchange, AndParams};
    use crate::engine::{qic, TaskSpec};
    use crate::linalg::Config;

    #[test]
    fn protocol_roundtrip_preserves_cost() {
        let cfg = Config::default();
        let mu = InputDistribution::new(2, 2, vec![0.1, 0.2, 0.3, 0.4], 1e-12).unwrap();
        for p in [
            build_and_protocol(AndParams::new(2).unwrap()).unwrap(),
            build_classical_exchange(&TaskSpec::and()).unwrap(),
        ] {
            let back = read_protocol(&write_protocol(&p)).unwrap();
            assert_eq!(back, p);
            assert_eq!(qic(&back, &mu, &cfg).unwrap(), qic(&p, &mu, &cfg).unwrap());
        }
    }

    #[test]
    fn default_message_is_last_output() {
        let text = r#"{
            "rounds": 1, "x_alphabet": [0, 1], "y_alphabet": ["a"],
            "isometries": [{"in": [{"label": "X", "dim": 2}],
                            "out": [{"label": "X", "dim": 2}, {"label": "C", "dim": 2}],
                            "matrix": [[[1,0],[0,0]],[[0,0],[0,0]],[[0,0],[0,0]],[[0,0],[1,0]]],
                            "sender": "A"}],
            "roles": {"alice_inputs": [{"label": "X", "dim": 2}], "bob_inputs": [{"label": "Y", "dim": 1}]}
        }"#;
        let p = read_protocol(text).unwrap();
        assert_eq!(p.rounds[0].message, vec!["C".to_string()]);
        assert!(p.rounds[1].message.is_empty());
    }

    #[test]
    fn errors_name_the_field() {
        let bad = r#"{"rounds": 1, "x_alphabet": [0], "y_alphabet": [0], "isometries": [],
                      "roles": {"alice_inputs": [{"label": "X", "dimm": 1}], "bob_inputs": []}}"#;
        let msg = read_protocol(bad).unwrap_err().to_string();
        assert!(msg.contains("roles.alice_inputs[0]"), "{msg}");
        let wrong_sender = r#"{"rounds": 1, "x_alphabet": [0], "y_alphabet": [0],
            "isometries": [{"in": [], "out": [{"label": "C", "dim": 1}], "matrix": [[[1,0]]], "sender": "B"}],
            "roles": {"alice_inputs": [], "bob_inputs": []}}"#;
        let msg = read_protocol(wrong_sender).unwrap_err().to_string();
        assert!(msg.contains("isometries[0].sender"), "{msg}");
        let dist = read_distribution(r#"{"probs": [[0.5, 0.6]]}"#).unwrap_err().to_string();
        assert!(dist.contains("probs"), "{dist}");
    }
}
