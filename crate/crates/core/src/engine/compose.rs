//! Building protocols out of protocols.

use super::protocol::{Party, ProtocolSpec, Roles, Round};
use super::run::embed_input_into;
use crate::linalg::{tensor, Isometry, PureState, RegisterLayout};
use crate::{Error, InputDistribution, Result};

fn regs_dim(regs: &[(String, usize)]) -> usize {
    regs.iter().map(|(_, d)| d).product()
}

/// Runs the protocols side by side, round by round. Each is renamed with
/// the matching prefix; shorter ones idle with empty rounds once they
/// finish. Inputs combine in mixed radix, first protocol most significant.
pub fn parallel_many(parts: &[ProtocolSpec], prefixes: &[String]) -> Result<ProtocolSpec> {
    if parts.is_empty() || parts.len() != prefixes.len() {
        return Err(Error::InvalidArgument("need one prefix per protocol".into()));
    }
    let n_rounds = parts.iter().map(|p| p.rounds.len()).max().unwrap_or(0);
    let renamed: Vec<ProtocolSpec> = parts
        .iter()
        .zip(prefixes)
        .map(|(p, pre)| Ok(p.prefixed(pre)?.padded_to(n_rounds)))
        .collect::<Result<_>>()?;

    let mut prestate = PureState::trivial();
    let mut roles = Roles::default();
    let mut rounds = vec![Round::empty(); n_rounds];
    let (mut xs, mut ys) = (1, 1);
    for p in &renamed {
        prestate = tensor(&prestate, &p.prestate)?;
        xs *= p.x_size;
        ys *= p.y_size;
        roles.alice_inputs.extend(p.roles.alice_inputs.iter().cloned());
        roles.bob_inputs.extend(p.roles.bob_inputs.iter().cloned());
        roles.alice_outputs.extend(p.roles.alice_outputs.iter().cloned());
        roles.bob_outputs.extend(p.roles.bob_outputs.iter().cloned());
        roles.alice_prestate.extend(p.roles.alice_prestate.iter().cloned());
        roles.bob_prestate.extend(p.roles.bob_prestate.iter().cloned());
        for (dst, src) in rounds.iter_mut().zip(&p.rounds) {
            dst.ops.extend(src.ops.iter().cloned());
            dst.message.extend(src.message.iter().cloned());
        }
    }
    Ok(ProtocolSpec {
        x_size: xs,
        y_size: ys,
        prestate,
        rounds,
        roles,
    })
}

pub fn parallel(p1: &ProtocolSpec, p2: &ProtocolSpec) -> Result<ProtocolSpec> {
    parallel_many(
        &[p1.clone(), p2.clone()],
        &["p1.".to_string(), "p2.".to_string()],
    )
}

/// `n` parallel copies, coordinate `k` prefixed `c{k}.`.
pub fn repeat_n(p: &ProtocolSpec, n: usize) -> Result<ProtocolSpec> {
    if n == 0 {
        return Err(Error::InvalidArgument("repeat count must be at least 1".into()));
    }
    let parts = vec![p.clone(); n];
    let prefixes: Vec<String> = (0..n).map(|k| format!("c{k}.")).collect();
    parallel_many(&parts, &prefixes)
}

/// Index of each party's last acting round (0-based).
fn last_rounds(n_rounds: usize) -> (usize, usize) {
    let last = n_rounds - 1;
    match Party::of_round(n_rounds) {
        Party::Alice => (last, last - 1),
        Party::Bob => (last - 1, last),
    }
}

/// Appends, in each party's last round, a classical post-processing step
/// `|z> -> |z>|f(z)>` writing `f` of that party's outputs into a fresh
/// register `out_label` of dimension `z_size`, which becomes the party's
/// sole output.
pub fn map_outputs(
    p: &ProtocolSpec,
    out_label: (&str, &str),
    z_size: usize,
    f: impl Fn(usize) -> usize,
) -> Result<ProtocolSpec> {
    let schedule = p.schedule()?;
    let mut out = p.clone();
    let (a_last, b_last) = last_rounds(p.rounds.len());
    for (party, label, last) in [
        (Party::Alice, out_label.0, a_last),
        (Party::Bob, out_label.1, b_last),
    ] {
        let outputs = match party {
            Party::Alice => &mut out.roles.alice_outputs,
            Party::Bob => &mut out.roles.bob_outputs,
        };
        let regs: Vec<(String, usize)> = outputs
            .iter()
            .map(|l| (l.clone(), schedule.dims[l]))
            .collect();
        let mut out_regs = regs.clone();
        out_regs.push((label.to_string(), z_size));
        let v = Isometry::from_injection(regs, out_regs, |z| {
            let fz = f(z);
            if fz < z_size {
                z * z_size + fz
            } else {
                usize::MAX
            }
        })?;
        out.rounds[last].ops.push(v);
        *outputs = vec![label.to_string()];
    }
    out.validate(&Default::default())?;
    Ok(out)
}

/// `n` parallel copies of an AND protocol whose outputs are combined into
/// disjointness: `1` iff no copy outputs `1`.
pub fn repeat_disjointness(and: &ProtocolSpec, n: usize) -> Result<ProtocolSpec> {
    let rep = repeat_n(and, n)?;
    map_outputs(&rep, ("DISJ_A", "DISJ_B"), 2, |z| usize::from(z == 0))
}

fn same_signature(p1: &ProtocolSpec, p2: &ProtocolSpec) -> Result<()> {
    let dims = |p: &ProtocolSpec| -> Result<_> {
        let s = p.schedule()?;
        let outs = |v: &[String]| v.iter().map(|l| s.dims[l]).collect::<Vec<_>>();
        let ins = |v: &[(String, usize)]| v.iter().map(|(_, d)| *d).collect::<Vec<_>>();
        Ok((
            ins(&p.roles.alice_inputs),
            ins(&p.roles.bob_inputs),
            outs(&p.roles.alice_outputs),
            outs(&p.roles.bob_outputs),
        ))
    };
    if (p1.x_size, p1.y_size) != (p2.x_size, p2.y_size) || dims(p1)? != dims(p2)? {
        return Err(Error::Signature(
            "mixed protocols must have identical input and output registers".into(),
        ));
    }
    Ok(())
}

fn regs_of(labels: &[String], dims: &std::collections::BTreeMap<String, usize>) -> Vec<(String, usize)> {
    labels.iter().map(|l| (l.clone(), dims[l])).collect()
}

/// With probability `p` run `p1`, otherwise `p2`, chosen by a pre-shared
/// selector `sqrt(p)|00> + sqrt(1-p)|11>` on `mix.SA`, `mix.SB`.
///
/// Both branches are renamed (`m1.`, `m2.`); the idle branch evolves by
/// zero-padding embeddings so its registers stay in a fixed state. Each
/// round's two branch messages are merged into one register of the larger
/// dimension, with the idle part left behind as sender-side junk; the
/// receiver splits it back using its selector copy. Inputs are routed into
/// the active branch in each party's first round and outputs swapped back
/// to the canonical registers (those of `p1`) in its last round.
pub fn convex_mix(p: f64, p1: &ProtocolSpec, p2: &ProtocolSpec) -> Result<ProtocolSpec> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    same_signature(p1, p2)?;
    let n_rounds = p1.rounds.len().max(p2.rounds.len());
    let b1 = p1.prefixed("m1.")?.padded_to(n_rounds);
    let b2 = p2.prefixed("m2.")?.padded_to(n_rounds);
    let s1 = b1.schedule()?;
    let s2 = b2.schedule()?;
    let (sa, sb) = ("mix.SA", "mix.SB");

    let selector = PureState::new(
        RegisterLayout::new([(sa, 2), (sb, 2)])?,
        vec![p.sqrt().into(), 0.0.into(), 0.0.into(), (1.0 - p).sqrt().into()],
    )?;
    let prestate = tensor(&tensor(&selector, &b1.prestate)?, &b2.prestate)?;

    // Selector-controlled pair: `on` when the branch is active, a padding
    // embedding with the same signature otherwise.
    let controlled = |control: &str, v: &Isometry, active: usize| -> Result<Isometry> {
        let idle = Isometry::embedding(v.inputs(), v.outputs())?;
        let branches = if active == 0 {
            [v.clone(), idle]
        } else {
            [idle, v.clone()]
        };
        Isometry::controlled(control, &branches)
    };

    let (a_last, b_last) = last_rounds(n_rounds);
    let mut rounds = Vec::with_capacity(n_rounds);
    let mut incoming: Option<(String, Vec<(String, usize)>, Vec<(String, usize)>)> = None;
    for k in 0..n_rounds {
        let sender = Party::of_round(k + 1);
        let sel = match sender {
            Party::Alice => sa,
            Party::Bob => sb,
        };
        let mut ops = Vec::new();

        if k <= 1 {
            let (canon, r1, r2) = match sender {
                Party::Alice => (&p1.roles.alice_inputs, &b1.roles.alice_inputs, &b2.roles.alice_inputs),
                Party::Bob => (&p1.roles.bob_inputs, &b1.roles.bob_inputs, &b2.roles.bob_inputs),
            };
            if !canon.is_empty() {
                let d = regs_dim(canon);
                let mut ins = vec![(sel.to_string(), 2)];
                ins.extend(canon.iter().cloned());
                let mut outs = vec![(sel.to_string(), 2)];
                outs.extend(r1.iter().cloned());
                outs.extend(r2.iter().cloned());
                ops.push(Isometry::from_injection(ins, outs, |i| {
                    let (s, x) = (i / d, i % d);
                    let (x1, x2) = if s == 0 { (x, 0) } else { (0, x) };
                    (s * d + x1) * d + x2
                })?);
            }
        }

        if let Some((m, c1, c2)) = incoming.take() {
            let (d1, d2) = (regs_dim(&c1), regs_dim(&c2));
            let dm = d1.max(d2);
            let flag = format!("mix.F{}", k + 1);
            let mut outs = vec![(sel.to_string(), 2)];
            outs.extend(c1.iter().cloned());
            outs.extend(c2.iter().cloned());
            outs.push((flag, 2));
            ops.push(Isometry::from_injection(
                [(sel.to_string(), 2), (m, dm)],
                outs,
                |i| {
                    let (s, m) = (i / dm, i % dm);
                    let (d_act, fits) = if s == 0 { (d1, m < d1) } else { (d2, m < d2) };
                    let (c1, c2, f) = if fits {
                        if s == 0 { (m, 0, 0) } else { (0, m, 0) }
                    } else {
                        let spill = m - d_act;
                        (spill / d2, spill % d2, 1)
                    };
                    ((s * d1 + c1) * d2 + c2) * 2 + f
                },
            )?);
        }

        for v in &b1.rounds[k].ops {
            ops.push(controlled(sel, v, 0)?);
        }
        for v in &b2.rounds[k].ops {
            ops.push(controlled(sel, v, 1)?);
        }

        let last_of_sender = match sender {
            Party::Alice => k == a_last,
            Party::Bob => k == b_last,
        };
        if last_of_sender {
            let (canon, o1, o2, s_1, s_2) = match sender {
                Party::Alice => (&p1.roles.alice_outputs, &b1.roles.alice_outputs, &b2.roles.alice_outputs, &s1, &s2),
                Party::Bob => (&p1.roles.bob_outputs, &b1.roles.bob_outputs, &b2.roles.bob_outputs, &s1, &s2),
            };
            if !canon.is_empty() {
                let r1 = regs_of(o1, &s_1.dims);
                let r2 = regs_of(o2, &s_2.dims);
                let d = regs_dim(&r1);
                let junk = format!("mix.K{sender}");
                let mut ins = vec![(sel.to_string(), 2)];
                ins.extend(r1.iter().cloned());
                ins.extend(r2.iter().cloned());
                let mut outs = vec![(sel.to_string(), 2)];
                outs.extend(canon.iter().cloned().zip(r1.iter().map(|(_, d)| *d)));
                outs.push((junk, d));
                ops.push(Isometry::from_injection(ins, outs, |i| {
                    let (s, o1, o2) = (i / (d * d), (i / d) % d, i % d);
                    let (keep, spare) = if s == 0 { (o1, o2) } else { (o2, o1) };
                    (s * d + keep) * d + spare
                })?);
            }
        }

        let m1 = &b1.rounds[k].message;
        let m2 = &b2.rounds[k].message;
        let mut message = Vec::new();
        if !m1.is_empty() || !m2.is_empty() {
            let c1 = regs_of(m1, &message_dims(&b1, k));
            let c2 = regs_of(m2, &message_dims(&b2, k));
            let (d1, d2) = (regs_dim(&c1), regs_dim(&c2));
            let dm = d1.max(d2);
            let m = format!("mix.M{}", k + 1);
            let junk = format!("mix.J{}", k + 1);
            let mut ins = vec![(sel.to_string(), 2)];
            ins.extend(c1.iter().cloned());
            ins.extend(c2.iter().cloned());
            ops.push(Isometry::from_injection(
                ins,
                [(sel.to_string(), 2), (m.clone(), dm), (junk, dm)],
                |i| {
                    let (s, a, b) = (i / (d1 * d2), (i / d2) % d1, i % d2);
                    let (sent, kept) = if s == 0 { (a, b) } else { (b, a) };
                    (s * dm + sent) * dm + kept
                },
            )?);
            message.push(m.clone());
            incoming = Some((m, c1, c2));
        }
        rounds.push(Round::new(ops, message));
    }

    let mut roles = Roles {
        alice_inputs: p1.roles.alice_inputs.clone(),
        bob_inputs: p1.roles.bob_inputs.clone(),
        alice_outputs: p1.roles.alice_outputs.clone(),
        bob_outputs: p1.roles.bob_outputs.clone(),
        alice_prestate: vec![sa.to_string()],
        bob_prestate: vec![sb.to_string()],
    };
    for b in [&b1, &b2] {
        roles.alice_prestate.extend(b.roles.alice_prestate.iter().cloned());
        roles.bob_prestate.extend(b.roles.bob_prestate.iter().cloned());
    }
    let out = ProtocolSpec {
        x_size: p1.x_size,
        y_size: p1.y_size,
        prestate,
        rounds,
        roles,
    };
    out.schedule()?;
    Ok(out)
}

/// Dimensions of the registers sent in round `k` (0-based).
fn message_dims(p: &ProtocolSpec, k: usize) -> std::collections::BTreeMap<String, usize> {
    let mut dims = std::collections::BTreeMap::new();
    // Sent registers are created by some earlier op or belong to the
    // inputs/prestate; the latest definition before round k wins.
    for (l, d) in p.roles.alice_inputs.iter().chain(&p.roles.bob_inputs) {
        dims.insert(l.clone(), *d);
    }
    for (l, d) in p.prestate.layout().iter() {
        dims.insert(l.to_string(), d);
    }
    for round in &p.rounds[..=k] {
        for op in &round.ops {
            for (l, d) in op.outputs() {
                dims.insert(l.clone(), *d);
            }
        }
    }
    p.rounds[k]
        .message
        .iter()
        .map(|l| (l.clone(), dims[l]))
        .collect()
}

/// The two single-coordinate protocols obtained from a protocol on
/// product inputs by fixing one coordinate's input state.
///
/// `p` must take Alice's input on `alice_split` leading registers for the
/// first coordinate and the rest for the second (likewise `bob_split`).
/// [`Split::first`] runs `p` on the first coordinate with the second
/// coordinate's purified input pre-shared, its purification held by Bob;
/// [`Split::second`] does the converse with the purification held by Alice.
pub struct Split<'a> {
    pub protocol: &'a ProtocolSpec,
    pub alice_split: usize,
    pub bob_split: usize,
}

impl Split<'_> {
    fn halves(&self) -> Result<[(Vec<(String, usize)>, Vec<(String, usize)>); 2]> {
        let r = &self.protocol.roles;
        if self.alice_split > r.alice_inputs.len() || self.bob_split > r.bob_inputs.len() {
            return Err(Error::InvalidArgument("split point past the input registers".into()));
        }
        let (a1, a2) = r.alice_inputs.split_at(self.alice_split);
        let (b1, b2) = r.bob_inputs.split_at(self.bob_split);
        Ok([(a1.to_vec(), b1.to_vec()), (a2.to_vec(), b2.to_vec())])
    }

    fn embed(&self, keep: usize, fixed: &InputDistribution, holder: Party) -> Result<ProtocolSpec> {
        let halves = self.halves()?;
        let (ka, kb) = &halves[keep];
        let (fa, fb) = &halves[1 - keep];
        let (r1, r2) = ("aux.R1", "aux.R2");
        let aux = embed_input_into(fixed, fa, fb, r1, r2)?;
        let p = self.protocol;
        let mut roles = p.roles.clone();
        roles.alice_inputs = ka.clone();
        roles.bob_inputs = kb.clone();
        roles.alice_prestate.extend(fa.iter().map(|(l, _)| l.clone()));
        roles.bob_prestate.extend(fb.iter().map(|(l, _)| l.clone()));
        let purifier = match holder {
            Party::Alice => &mut roles.alice_prestate,
            Party::Bob => &mut roles.bob_prestate,
        };
        purifier.extend([r1.to_string(), r2.to_string()]);
        let out = ProtocolSpec {
            x_size: regs_dim(ka),
            y_size: regs_dim(kb),
            prestate: tensor(&p.prestate, &aux)?,
            rounds: p.rounds.clone(),
            roles,
        };
        out.schedule()?;
        Ok(out)
    }

    /// Protocol on the first coordinate, second coordinate fixed to `rho2`.
    pub fn first(&self, rho2: &InputDistribution) -> Result<ProtocolSpec> {
        self.embed(0, rho2, Party::Bob)
    }

    /// Protocol on the second coordinate, first coordinate fixed to `rho1`.
    pub fn second(&self, rho1: &InputDistribution) -> Result<ProtocolSpec> {
        self.embed(1, rho1, Party::Alice)
    }
}

/// Marginals of a distribution on `(X1 x X2) x (Y1 x Y2)`, combined index
/// `x1 * |X2| + x2`.
pub fn marginals(
    mu: &InputDistribution,
    x1: usize,
    y1: usize,
) -> Result<(InputDistribution, InputDistribution)> {
    if x1 == 0 || y1 == 0 || mu.x_size() % x1 != 0 || mu.y_size() % y1 != 0 {
        return Err(Error::InvalidArgument("factor sizes do not divide the alphabets".into()));
    }
    let (x2, y2) = (mu.x_size() / x1, mu.y_size() / y1);
    let mut m1 = vec![0.0; x1 * y1];
    let mut m2 = vec![0.0; x2 * y2];
    for (x, y, p) in mu.support() {
        m1[(x / x2) * y1 + y / y2] += p;
        m2[(x % x2) * y2 + y % y2] += p;
    }
    Ok((
        InputDistribution::new(x1, y1, m1, 1e-9)?,
        InputDistribution::new(x2, y2, m2, 1e-9)?,
    ))
}
