use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::{Config, Isometry, PureState};
use crate::{Error, Result};

/// Labels of the two coherent copies of `(x, y)` that purify the input.
pub const R1: &str = "R1";
pub const R2: &str = "R2";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    #[serde(rename = "A")]
    Alice,
    #[serde(rename = "B")]
    Bob,
}

impl Party {
    /// Round `i` (1-based) is Alice's when `i` is odd.
    pub fn of_round(i: usize) -> Self {
        if i % 2 == 1 {
            Party::Alice
        } else {
            Party::Bob
        }
    }

    pub fn other(self) -> Self {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "A",
            Party::Bob => "B",
        })
    }
}

/// One turn: the sender applies `ops` in order, then hands the registers
/// named in `message` to the other party.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Round {
    pub ops: Vec<Isometry>,
    pub message: Vec<String>,
}

impl Round {
    pub fn new(ops: Vec<Isometry>, message: Vec<String>) -> Self {
        Self { ops, message }
    }

    pub fn empty() -> Self {
        Self::default()
    }
}

/// Which registers carry inputs, outputs and pre-shared entanglement.
/// Input registers split the input symbol in mixed radix, first register
/// most significant; outputs likewise.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Roles {
    pub alice_inputs: Vec<(String, usize)>,
    pub bob_inputs: Vec<(String, usize)>,
    pub alice_outputs: Vec<String>,
    pub bob_outputs: Vec<String>,
    pub alice_prestate: Vec<String>,
    pub bob_prestate: Vec<String>,
}

/// An interactive protocol: a shared pure prestate and `r + 1` rounds of
/// local isometries, of which the first `r` send a message.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    pub x_size: usize,
    pub y_size: usize,
    pub prestate: PureState,
    pub rounds: Vec<Round>,
    pub roles: Roles,
}

/// Register ownership right after a round's message has been sent.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundView {
    pub round: usize,
    pub sender: Party,
    /// Registers in flight from sender to receiver.
    pub message: Vec<String>,
    /// Product of the message register dimensions (1 when empty).
    pub message_dim: usize,
    pub alice: Vec<String>,
    pub bob: Vec<String>,
}

impl RoundView {
    pub fn holdings(&self, p: Party) -> &[String] {
        match p {
            Party::Alice => &self.alice,
            Party::Bob => &self.bob,
        }
    }
}

/// Result of validating a spec: ownership per round and the dimension of
/// every register alive at the end.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub views: Vec<RoundView>,
    pub dims: BTreeMap<String, usize>,
}

impl Schedule {
    pub fn dim_of(&self, labels: &[String]) -> usize {
        labels.iter().map(|l| self.dims[l]).product()
    }
}

fn product(regs: &[(String, usize)]) -> usize {
    regs.iter().map(|(_, d)| d).product()
}

impl ProtocolSpec {
    /// Number of message rounds `r`.
    pub fn r(&self) -> usize {
        self.rounds.len().saturating_sub(1)
    }

    /// Message dimension per round (1 for an empty message).
    pub fn message_dims(&self) -> Result<Vec<usize>> {
        let s = self.schedule()?;
        Ok(s.views.iter().map(|v| v.message_dim).collect())
    }

    /// Replays register ownership through every round, checking that each
    /// party only touches what it holds and that the final round sends
    /// nothing.
    pub fn schedule(&self) -> Result<Schedule> {
        let bad = |m: String| Error::InvalidProtocol(m);
        if self.rounds.len() < 2 {
            return Err(bad("a protocol needs at least one message round and a final round".into()));
        }
        if product(&self.roles.alice_inputs) != self.x_size {
            return Err(bad(format!(
                "Alice's input registers have dimension {}, |X| = {}",
                product(&self.roles.alice_inputs),
                self.x_size
            )));
        }
        if product(&self.roles.bob_inputs) != self.y_size {
            return Err(bad(format!(
                "Bob's input registers have dimension {}, |Y| = {}",
                product(&self.roles.bob_inputs),
                self.y_size
            )));
        }

        let mut dims: BTreeMap<String, usize> = BTreeMap::new();
        let mut alice: Vec<String> = Vec::new();
        let mut bob: Vec<String> = Vec::new();
        let claim = |label: &str, d: usize, dims: &mut BTreeMap<String, usize>| {
            if label == R1 || label == R2 {
                return Err(bad(format!("register name `{label}` is reserved")));
            }
            if dims.insert(label.to_string(), d).is_some() {
                return Err(Error::LabelCollision(label.to_string()));
            }
            Ok(())
        };
        for (l, d) in &self.roles.alice_inputs {
            claim(l, *d, &mut dims)?;
            alice.push(l.clone());
        }
        for (l, d) in &self.roles.bob_inputs {
            claim(l, *d, &mut dims)?;
            bob.push(l.clone());
        }
        let pre = self.prestate.layout();
        let mut pre_claimed = 0;
        for (list, owner) in [
            (&self.roles.alice_prestate, &mut alice),
            (&self.roles.bob_prestate, &mut bob),
        ] {
            for l in list {
                let d = pre.dim_of(l)?;
                claim(l, d, &mut dims)?;
                owner.push(l.clone());
                pre_claimed += 1;
            }
        }
        if pre_claimed != pre.len() {
            return Err(bad("every prestate register must be assigned to a party".into()));
        }

        let mut views = Vec::with_capacity(self.rounds.len());
        let mut in_flight: Vec<String> = Vec::new();
        let last = self.rounds.len();
        for (k, round) in self.rounds.iter().enumerate() {
            let i = k + 1;
            let sender = Party::of_round(i);
            let (mine, theirs) = match sender {
                Party::Alice => (&mut alice, &mut bob),
                Party::Bob => (&mut bob, &mut alice),
            };
            mine.append(&mut in_flight);
            for op in &round.ops {
                for (l, d) in op.inputs() {
                    let pos = mine.iter().position(|m| m == l).ok_or_else(|| {
                        bad(format!("round {i}: {sender} applies an isometry to `{l}` it does not hold"))
                    })?;
                    if dims[l] != *d {
                        return Err(Error::DimensionMismatch {
                            label: l.clone(),
                            expected: *d,
                            found: dims[l],
                        });
                    }
                    mine.remove(pos);
                    dims.remove(l);
                }
                for (l, d) in op.outputs() {
                    if theirs.contains(l) || dims.contains_key(l) {
                        return Err(bad(format!("round {i}: output register `{l}` already exists")));
                    }
                    if l == R1 || l == R2 {
                        return Err(bad(format!("register name `{l}` is reserved")));
                    }
                    dims.insert(l.clone(), *d);
                    mine.push(l.clone());
                }
            }
            if i == last && !round.message.is_empty() {
                return Err(bad("the final round must not send a message".into()));
            }
            for l in &round.message {
                let pos = mine
                    .iter()
                    .position(|m| m == l)
                    .ok_or_else(|| bad(format!("round {i}: {sender} sends `{l}` it does not hold")))?;
                in_flight.push(mine.remove(pos));
            }
            views.push(RoundView {
                round: i,
                sender,
                message: in_flight.clone(),
                message_dim: in_flight.iter().map(|l| dims[l]).product(),
                alice: alice.clone(),
                bob: bob.clone(),
            });
        }
        for (list, owner, who) in [
            (&self.roles.alice_outputs, &alice, "Alice"),
            (&self.roles.bob_outputs, &bob, "Bob"),
        ] {
            for l in list {
                if !owner.contains(l) {
                    return Err(bad(format!("output `{l}` is not held by {who} at the end")));
                }
            }
        }
        Ok(Schedule { views, dims })
    }

    pub fn validate(&self, cfg: &Config) -> Result<Schedule> {
        for (k, round) in self.rounds.iter().enumerate() {
            for op in &round.ops {
                op.validate(cfg.tol_iso).map_err(|e| {
                    Error::InvalidProtocol(format!("round {}: {e}", k + 1))
                })?;
            }
        }
        self.schedule()
    }

    /// Dimensions of Alice's and Bob's output alphabets.
    pub fn output_sizes(&self) -> Result<(usize, usize)> {
        let s = self.schedule()?;
        Ok((
            s.dim_of(&self.roles.alice_outputs),
            s.dim_of(&self.roles.bob_outputs),
        ))
    }

    /// Renames every register.
    pub fn relabeled(&self, rename: impl Fn(&str) -> String) -> Result<Self> {
        let names = |v: &[String]| v.iter().map(|l| rename(l)).collect::<Vec<_>>();
        let regs = |v: &[(String, usize)]| v.iter().map(|(l, d)| (rename(l), *d)).collect::<Vec<_>>();
        Ok(Self {
            x_size: self.x_size,
            y_size: self.y_size,
            prestate: self.prestate.relabeled(&rename)?,
            rounds: self
                .rounds
                .iter()
                .map(|r| Round {
                    ops: r.ops.iter().map(|v| v.relabeled(&rename)).collect(),
                    message: names(&r.message),
                })
                .collect(),
            roles: Roles {
                alice_inputs: regs(&self.roles.alice_inputs),
                bob_inputs: regs(&self.roles.bob_inputs),
                alice_outputs: names(&self.roles.alice_outputs),
                bob_outputs: names(&self.roles.bob_outputs),
                alice_prestate: names(&self.roles.alice_prestate),
                bob_prestate: names(&self.roles.bob_prestate),
            },
        })
    }

    /// Prefixes every register name.
    pub fn prefixed(&self, prefix: &str) -> Result<Self> {
        self.relabeled(|l| format!("{prefix}{l}"))
    }

    /// Appends empty rounds until there are `n` rounds in total.
    pub fn padded_to(&self, n: usize) -> Self {
        let mut out = self.clone();
        while out.rounds.len() < n {
            out.rounds.push(Round::empty());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roles() -> Roles {
        Roles {
            alice_inputs: vec![("X".into(), 2)],
            bob_inputs: vec![("Y".into(), 2)],
            ..Roles::default()
        }
    }

    fn spec(rounds: Vec<Round>) -> ProtocolSpec {
        ProtocolSpec {
            x_size: 2,
            y_size: 2,
            prestate: PureState::trivial(),
            rounds,
            roles: roles(),
        }
    }

    #[test]
    fn ownership_follows_messages() {
        let copy = Isometry::copy("X", "C", 2).unwrap();
        let p = spec(vec![Round::new(vec![copy], vec!["C".into()]), Round::empty()]);
        let s = p.schedule().unwrap();
        assert_eq!(s.views[0].message, vec!["C".to_string()]);
        assert_eq!(s.views[0].alice, vec!["X".to_string()]);
        assert_eq!(s.views[1].bob, vec!["Y".to_string(), "C".to_string()]);
    }

    #[test]
    fn rejects_foreign_registers_and_final_message() {
        let touch_y = Isometry::identity(&[("Y".into(), 2)]).unwrap();
        assert!(spec(vec![Round::new(vec![touch_y], vec![]), Round::empty()])
            .schedule()
            .is_err());
        let copy = Isometry::copy("X", "C", 2).unwrap();
        assert!(spec(vec![Round::empty(), Round::new(vec![], vec![]), ])
            .schedule()
            .is_ok());
        assert!(spec(vec![Round::empty(), Round::new(vec![copy], vec!["C".into()])])
            .schedule()
            .is_err());
    }

    #[test]
    fn rejects_reserved_names() {
        let mk = Isometry::prepare("R1", 2, 0).unwrap();
        assert!(spec(vec![Round::new(vec![mk], vec![]), Round::empty()])
            .schedule()
            .is_err());
    }
}
