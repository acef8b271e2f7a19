use serde::{Deserialize, Serialize};

use super::protocol::{Party, ProtocolSpec, RoundView, Schedule, R1, R2};
use crate::info::cqmi;
use crate::linalg::{apply_isometry, tensor, Config, PureState, RegisterLayout, ZERO};
use crate::{Error, InputDistribution, Result};

/// `sum_xy sqrt(mu(x,y)) |x>|y>|xy>_R1 |xy>_R2` on single registers
/// `A_in`, `B_in`.
pub fn embed_input(mu: &InputDistribution) -> Result<PureState> {
    embed_input_into(
        mu,
        &[("A_in".into(), mu.x_size())],
        &[("B_in".into(), mu.y_size())],
        R1,
        R2,
    )
}

/// Same as [`embed_input`] with `x` split in mixed radix over `alice`
/// and `y` over `bob`. `R1` and `R2` each carry the index `x |Y| + y`.
pub fn embed_input_into(
    mu: &InputDistribution,
    alice: &[(String, usize)],
    bob: &[(String, usize)],
    r1: &str,
    r2: &str,
) -> Result<PureState> {
    let (xs, ys) = (mu.x_size(), mu.y_size());
    let n = xs * ys;
    let layout = RegisterLayout::new(
        alice
            .iter()
            .chain(bob)
            .cloned()
            .chain([(r1.to_string(), n), (r2.to_string(), n)]),
    )?;
    if layout.total_dim() != n * n * n {
        return Err(Error::Signature(format!(
            "input registers have dimension {}, distribution is {xs}x{ys}",
            layout.total_dim() / (n * n)
        )));
    }
    let mut amps = vec![ZERO; layout.total_dim()];
    for (x, y, p) in mu.support() {
        let xy = x * ys + y;
        amps[(xy * n + xy) * n + xy] = p.sqrt().into();
    }
    PureState::normalized(layout, amps)
}

fn check_len(len: usize, cfg: &Config) -> Result<()> {
    let limit = cfg.dim_cap.saturating_mul(cfg.dim_cap);
    if len > limit {
        return Err(Error::StateTooLarge { len, limit });
    }
    Ok(())
}

/// Global state after a round together with who holds what.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub view: RoundView,
    pub state: PureState,
}

#[derive(Debug, Clone)]
pub struct Transcript {
    pub snapshots: Vec<Snapshot>,
}

impl Transcript {
    pub fn final_state(&self) -> &PureState {
        &self.snapshots.last().expect("at least two rounds").state
    }
}

fn initial_state(p: &ProtocolSpec, mu: &InputDistribution, cfg: &Config) -> Result<PureState> {
    if (mu.x_size(), mu.y_size()) != (p.x_size, p.y_size) {
        return Err(Error::InvalidDistribution(format!(
            "distribution is {}x{}, protocol expects {}x{}",
            mu.x_size(),
            mu.y_size(),
            p.x_size,
            p.y_size
        )));
    }
    let input = embed_input_into(mu, &p.roles.alice_inputs, &p.roles.bob_inputs, R1, R2)?;
    check_len(input.layout().total_dim() * p.prestate.layout().total_dim(), cfg)?;
    tensor(&input, &p.prestate)
}

/// Drives the protocol, handing each post-round state to `visit`.
fn execute(
    p: &ProtocolSpec,
    mu: &InputDistribution,
    cfg: &Config,
    mut visit: impl FnMut(&RoundView, &PureState) -> Result<()>,
) -> Result<(Schedule, PureState)> {
    let schedule = p.validate(cfg)?;
    let mut state = initial_state(p, mu, cfg)?;
    for (round, view) in p.rounds.iter().zip(&schedule.views) {
        for op in &round.ops {
            let grown = state.layout().total_dim() / op.in_dim() * op.out_dim();
            check_len(grown, cfg)?;
            state = apply_isometry(&state, op, cfg)?;
        }
        visit(view, &state)?;
    }
    Ok((schedule, state))
}

pub fn run(p: &ProtocolSpec, mu: &InputDistribution, cfg: &Config) -> Result<Transcript> {
    let mut snapshots = Vec::with_capacity(p.rounds.len());
    execute(p, mu, cfg, |view, state| {
        snapshots.push(Snapshot {
            view: view.clone(),
            state: state.clone(),
        });
        Ok(())
    })?;
    Ok(Transcript { snapshots })
}

/// `sum_i log2 dim(C_i)`.
pub fn qcc(p: &ProtocolSpec) -> Result<f64> {
    Ok(p.message_dims()?.iter().map(|&d| (d as f64).log2()).sum())
}

/// Half the information the message carries about `R` given everything
/// the receiver holds; zero for an empty message.
pub fn round_term(view: &RoundView, state: &PureState, cfg: &Config) -> Result<f64> {
    if view.message.is_empty() {
        return Ok(0.0);
    }
    let msg: Vec<&str> = view.message.iter().map(String::as_str).collect();
    let recv: Vec<&str> = view
        .holdings(view.sender.other())
        .iter()
        .map(String::as_str)
        .collect();
    Ok(0.5 * cqmi(state, &msg, &[R1, R2], &recv, cfg)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTerm {
    pub round: usize,
    pub sender: Party,
    pub message: Vec<String>,
    pub message_dim: usize,
    pub cqmi_contribution: f64,
}

/// Joint law of `(x, y, z_A, z_B)` after measuring `R1` and the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputTable {
    pub x_size: usize,
    pub y_size: usize,
    pub za_size: usize,
    pub zb_size: usize,
    /// Indexed `((x * |Y| + y) * |Z_A| + z_A) * |Z_B| + z_B`.
    pub probs: Vec<f64>,
}

impl OutputTable {
    pub fn prob(&self, x: usize, y: usize, za: usize, zb: usize) -> f64 {
        self.probs[((x * self.y_size + y) * self.za_size + za) * self.zb_size + zb]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QicReport {
    pub per_round: Vec<RoundTerm>,
    pub qic_total: f64,
    pub qcc: f64,
    pub avg_error: Option<f64>,
    pub outputs: Option<OutputTable>,
}

impl QicReport {
    /// Sum over the first `n` rounds only.
    pub fn qic_first(&self, n: usize) -> f64 {
        self.per_round.iter().take(n).map(|t| t.cqmi_contribution).sum()
    }
}

/// A relation `T` over `X x Y x Z_A x Z_B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub x_size: usize,
    pub y_size: usize,
    pub za_size: usize,
    pub zb_size: usize,
    /// Same indexing as [`OutputTable::probs`].
    pub allowed: Vec<bool>,
}

impl TaskSpec {
    /// Both parties must output `f(x, y) < z_size`.
    pub fn function(
        x_size: usize,
        y_size: usize,
        z_size: usize,
        f: impl Fn(usize, usize) -> usize,
    ) -> Self {
        let mut allowed = vec![false; x_size * y_size * z_size * z_size];
        for x in 0..x_size {
            for y in 0..y_size {
                let z = f(x, y);
                if z < z_size {
                    allowed[((x * y_size + y) * z_size + z) * z_size + z] = true;
                }
            }
        }
        Self {
            x_size,
            y_size,
            za_size: z_size,
            zb_size: z_size,
            allowed,
        }
    }

    pub fn and() -> Self {
        Self::function(2, 2, 2, |x, y| x & y)
    }

    /// `1` iff the `n`-bit strings share no coordinate where both are `1`.
    pub fn disjointness(n: usize) -> Self {
        let s = 1 << n;
        Self::function(s, s, 2, |x, y| usize::from(x & y == 0))
    }

    pub fn is_allowed(&self, x: usize, y: usize, za: usize, zb: usize) -> bool {
        self.allowed[((x * self.y_size + y) * self.za_size + za) * self.zb_size + zb]
    }
}

/// Measures `R1` and the declared outputs of `state` in the computational
/// basis.
pub fn output_table(p: &ProtocolSpec, schedule: &Schedule, state: &PureState) -> Result<OutputTable> {
    let layout = state.layout();
    let za_size = schedule.dim_of(&p.roles.alice_outputs);
    let zb_size = schedule.dim_of(&p.roles.bob_outputs);
    let mut group: Vec<&str> = vec![R1];
    group.extend(p.roles.alice_outputs.iter().map(String::as_str));
    group.extend(p.roles.bob_outputs.iter().map(String::as_str));
    let pos = layout.positions(&group)?;
    let (gi, _, gd, _) = layout.split_indices(&pos);
    let mut probs = vec![0.0; gd];
    for (idx, z) in state.amplitudes().iter().enumerate() {
        probs[gi[idx]] += z.norm_sqr();
    }
    Ok(OutputTable {
        x_size: p.x_size,
        y_size: p.y_size,
        za_size,
        zb_size,
        probs,
    })
}

fn error_of(table: &OutputTable, task: &TaskSpec) -> Result<f64> {
    if (table.x_size, table.y_size, table.za_size, table.zb_size)
        != (task.x_size, task.y_size, task.za_size, task.zb_size)
    {
        return Err(Error::Signature(format!(
            "protocol alphabets {}x{} -> {}x{} do not match task {}x{} -> {}x{}",
            table.x_size,
            table.y_size,
            table.za_size,
            table.zb_size,
            task.x_size,
            task.y_size,
            task.za_size,
            task.zb_size
        )));
    }
    Ok(table
        .probs
        .iter()
        .zip(&task.allowed)
        .filter(|(_, ok)| !**ok)
        .map(|(p, _)| p)
        .sum())
}

/// Information cost, communication cost and, when a task is given, the
/// average error and output law.
pub fn report(
    p: &ProtocolSpec,
    mu: &InputDistribution,
    task: Option<&TaskSpec>,
    cfg: &Config,
) -> Result<QicReport> {
    let mut per_round = Vec::with_capacity(p.rounds.len());
    let (schedule, last) = execute(p, mu, cfg, |view, state| {
        per_round.push(RoundTerm {
            round: view.round,
            sender: view.sender,
            message: view.message.clone(),
            message_dim: view.message_dim,
            cqmi_contribution: round_term(view, state, cfg)?,
        });
        Ok(())
    })?;
    let qic_total = per_round.iter().map(|t| t.cqmi_contribution).sum();
    let qcc = per_round
        .iter()
        .map(|t| (t.message_dim as f64).log2())
        .sum();
    let (avg_error, outputs) = match task {
        Some(t) => {
            let table = output_table(p, &schedule, &last)?;
            (Some(error_of(&table, t)?), Some(table))
        }
        None => (None, None),
    };
    Ok(QicReport {
        per_round,
        qic_total,
        qcc,
        avg_error,
        outputs,
    })
}

pub fn qic(p: &ProtocolSpec, mu: &InputDistribution, cfg: &Config) -> Result<f64> {
    Ok(report(p, mu, None, cfg)?.qic_total)
}

pub fn avg_error(
    p: &ProtocolSpec,
    mu: &InputDistribution,
    task: &TaskSpec,
    cfg: &Config,
) -> Result<f64> {
    let (schedule, last) = execute(p, mu, cfg, |_, _| Ok(()))?;
    error_of(&output_table(p, &schedule, &last)?, task)
}

/// Largest average error over point-mass inputs.
pub fn worst_case_error(p: &ProtocolSpec, task: &TaskSpec, cfg: &Config) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in 0..p.x_size {
        for y in 0..p.y_size {
            let mu = InputDistribution::point_mass(p.x_size, p.y_size, x, y)?;
            worst = worst.max(avg_error(p, &mu, task, cfg)?);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn embed_point_mass_and_uniform() {
        let mu = InputDistribution::point_mass(2, 2, 0, 0).unwrap();
        let s = embed_input(&mu).unwrap();
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));

        let u = InputDistribution::uniform(2, 2).unwrap();
        let s = embed_input(&u).unwrap();
        let nz: Vec<usize> = (0..s.amplitudes().len())
            .filter(|&i| s.amplitudes()[i].norm() > 0.0)
            .collect();
        // |x>|y>|xy>|xy> with xy = 2x + y sits at ((xy * 4) + xy) * 4 + xy
        let expect: Vec<usize> = (0..4).map(|xy| (xy * 4 + xy) * 4 + xy).collect();
        assert_eq!(nz, expect);
        for i in nz {
            assert!((s.amplitudes()[i].re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn embed_mu_star() {
        let mu = InputDistribution::new(2, 2, vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0], 1e-12)
            .unwrap();
        let s = embed_input(&mu).unwrap();
        let nz: Vec<f64> = s
            .amplitudes()
            .iter()
            .filter(|z| z.norm() > 0.0)
            .map(|z| z.re)
            .collect();
        assert_eq!(nz.len(), 3);
        assert!(nz.iter().all(|a| (a - (1.0f64 / 3.0).sqrt()).abs() < 1e-15));
    }

    #[test]
    fn task_tables() {
        let and = TaskSpec::and();
        assert!(and.is_allowed(1, 1, 1, 1));
        assert!(!and.is_allowed(1, 1, 0, 0));
        assert!(!and.is_allowed(0, 1, 0, 1));
        let d = TaskSpec::disjointness(2);
        assert!(d.is_allowed(0b01, 0b10, 1, 1));
        assert!(d.is_allowed(0b11, 0b10, 0, 0));
    }
}
