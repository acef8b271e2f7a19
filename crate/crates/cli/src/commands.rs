use std::fs;
use std::path::Path;

use qic_core::builtins::calibration::{
    decay_ratio, mass_w_ratio, qic_at_zero_mass, DECAY_BAND, MASS_W_RATIO_FLOOR,
};
use qic_core::builtins::{
    and_prior, and_round_entropy, build_and_protocol, build_classical_exchange, build_constant, build_dummy,
    build_random_bit, engine_branch_entropies, random_protocol, AndParams, RandomShape, YBranch,
};
use qic_core::disc::{gdm_delta, gdm_search, BooleanTable};
use qic_core::engine::{qic, report, worst_case_error, ProtocolSpec, TaskSpec};
use qic_core::files::{parse_json, read_distribution, read_protocol, write_protocol};
use qic_core::info::binary_entropy;
use qic_core::linalg::Config;
use qic_core::verify::{run_suite, trial_rng, Suite};
use qic_core::InputDistribution;
use rayon::prelude::*;

use crate::error::CliError;
use crate::table::{emit, Cell, Meta, Table};
use crate::{BuiltinArgs, Builtin, Cli, Command, Function, PriorArgs};

/// Slack for the report's own consistency checks.
const SUM_TOL: f64 = 1e-9;
const QCC_SLACK: f64 = 1e-8;

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let cfg = g.config();
    let meta = |name: &str| Meta { command: name.to_string(), seed: g.seed, cfg };
    let out = g.out.as_deref();
    match &cli.command {
        Command::Run { source, protocol, prior, task } => {
            let (table, check) = run(source, protocol.as_deref(), prior, task.as_deref(), g.seed, &cfg)?;
            emit(&table, &meta("run"), g.format, out)?;
            check
        }
        Command::SweepR { r_min, r_max, w } => {
            emit(&sweep_r(*r_min, *r_max, *w, &cfg)?, &meta("sweep-r"), g.format, out)
        }
        Command::SweepW { r, w } => emit(&sweep_w(*r, w, &cfg)?, &meta("sweep-w"), g.format, out),
        Command::Verify { suite, trials } => {
            let (table, check) = verify(suite, *trials, g.seed, &cfg)?;
            emit(&table, &meta("verify"), g.format, out)?;
            check
        }
        Command::Gdm { table, function, prior, delta, grid_step } => {
            let t = gdm(table.as_deref(), *function, prior, *delta, *grid_step, &cfg)?;
            emit(&t, &meta("gdm"), g.format, out)
        }
        Command::ExportBuiltin { name, r, rounds, dim, value } => {
            let args = BuiltinArgs { builtin: Some(*name), r: *r, rounds: *rounds, dim: *dim, value: *value };
            let text = write_protocol(&builtin(&args, g.seed)?);
            match out {
                Some(path) => fs::write(path, text).map_err(|e| CliError::io_at(path, e)),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io_at(path, e))
}

fn input(context: &str) -> impl Fn(qic_core::Error) -> CliError + '_ {
    CliError::core(context)
}

fn builtin(args: &BuiltinArgs, seed: u64) -> Result<ProtocolSpec, CliError> {
    let which = args.builtin.ok_or_else(|| CliError::Input("one of --builtin or --protocol is required".into()))?;
    let ctx = "building protocol";
    match which {
        Builtin::And => build_and_protocol(AndParams::new(args.r).map_err(input(ctx))?),
        Builtin::Dummy => build_dummy(args.rounds, args.dim, 2, 2),
        Builtin::ClassicalAnd => build_classical_exchange(&TaskSpec::and()),
        Builtin::Constant => build_constant(args.value, 2, 2, 2),
        Builtin::RandomBit => build_random_bit(2, 2),
        Builtin::Random => {
            let shape = RandomShape {
                alice_inputs: vec![2],
                bob_inputs: vec![2],
                rounds: args.rounds,
                message_dim: args.dim,
                entanglement_dim: 2,
            };
            random_protocol(&shape, &mut trial_rng(seed, "builtin/random", 0))
        }
    }
    .map_err(input(ctx))
}

/// Parses `a,b,...` where each entry is a decimal or `num/den`.
fn parse_probs(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            let bad = || CliError::Input(format!("--prior: `{item}` is not a number or fraction"));
            let v = match item.split_once('/') {
                Some((n, d)) => {
                    let n: f64 = n.trim().parse().map_err(|_| bad())?;
                    let d: f64 = d.trim().parse().map_err(|_| bad())?;
                    if d == 0.0 {
                        return Err(bad());
                    }
                    n / d
                }
                None => item.parse().map_err(|_| bad())?,
            };
            Ok(v)
        })
        .collect()
}

/// The prior named by the flags, or `fallback` when none is given.
fn prior(
    args: &PriorArgs,
    x_size: usize,
    y_size: usize,
    fallback: impl FnOnce() -> qic_core::Result<InputDistribution>,
    cfg: &Config,
) -> Result<InputDistribution, CliError> {
    let mu = if let Some(path) = &args.dist {
        read_distribution(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
    } else if let Some(text) = &args.prior {
        let probs = parse_probs(text)?;
        if probs.len() != x_size * y_size {
            return Err(CliError::Input(format!(
                "--prior has {} entries, expected {} ({x_size}x{y_size})",
                probs.len(),
                x_size * y_size
            )));
        }
        InputDistribution::new(x_size, y_size, probs, cfg.tol_norm).map_err(input("--prior"))?
    } else if let Some(w) = args.w {
        and_prior(w).map_err(input("--w"))?
    } else {
        fallback().map_err(input("default prior"))?
    };
    if (mu.x_size(), mu.y_size()) != (x_size, y_size) {
        return Err(CliError::Input(format!(
            "prior is {}x{}, inputs are {x_size}x{y_size}",
            mu.x_size(),
            mu.y_size()
        )));
    }
    Ok(mu)
}

fn read_table(path: &Path) -> Result<BooleanTable, CliError> {
    parse_json(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run(
    source: &BuiltinArgs,
    protocol: Option<&Path>,
    prior_args: &PriorArgs,
    task: Option<&Path>,
    seed: u64,
    cfg: &Config,
) -> Result<(Table, Result<(), CliError>), CliError> {
    let p = match protocol {
        Some(path) => {
            read_protocol(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
        None => builtin(source, seed)?,
    };
    let is_and = protocol.is_none() && source.builtin == Some(Builtin::And);
    let mu = prior(
        prior_args,
        p.x_size,
        p.y_size,
        || if is_and { and_prior(0.0) } else { InputDistribution::uniform(p.x_size, p.y_size) },
        cfg,
    )?;
    let task = match task {
        Some(path) => {
            let t = read_table(path)?;
            Some(TaskSpec::function(t.x_size(), t.y_size(), 2, |x, y| usize::from(t.get(x, y))))
        }
        None if matches!(source.builtin, Some(Builtin::And | Builtin::ClassicalAnd)) && protocol.is_none() => {
            Some(TaskSpec::and())
        }
        None => None,
    };
    let rep = report(&p, &mu, task.as_ref(), cfg).map_err(input("running protocol"))?;

    let mut table = Table::new(["row", "round", "sender", "message_dim", "cqmi_contribution", "qic_total", "qcc", "avg_error"]);
    for t in &rep.per_round {
        table.push(vec![
            "round".into(),
            t.round.into(),
            t.sender.to_string().into(),
            t.message_dim.into(),
            t.cqmi_contribution.into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    table.push(vec![
        "summary".into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        rep.qic_total.into(),
        rep.qcc.into(),
        rep.avg_error.into(),
    ]);

    let sum: f64 = rep.per_round.iter().map(|t| t.cqmi_contribution).sum();
    let mut problems = Vec::new();
    if (sum - rep.qic_total).abs() > SUM_TOL {
        problems.push(format!("round terms sum to {sum}, total is {}", rep.qic_total));
    }
    if rep.qic_total < -SUM_TOL || rep.qic_total > rep.qcc + QCC_SLACK {
        problems.push(format!("qic {} outside [0, qcc = {}]", rep.qic_total, rep.qcc));
    }
    if let Some(e) = rep.avg_error {
        if !(-SUM_TOL..=1.0 + SUM_TOL).contains(&e) {
            problems.push(format!("error {e} is not a probability"));
        }
    }
    let check = if problems.is_empty() { Ok(()) } else { Err(CliError::Verification(problems.join("; "))) };
    Ok((table, check))
}

fn sweep_r(r_min: usize, r_max: usize, w: f64, cfg: &Config) -> Result<Table, CliError> {
    if r_min == 0 || r_min > r_max {
        return Err(CliError::Input(format!("need 1 <= r-min <= r-max, got {r_min}..{r_max}")));
    }
    let mu = and_prior(w).map_err(input("--w"))?;
    let task = TaskSpec::and();
    let rows: Vec<(usize, f64, f64, f64, f64)> = (r_min..=r_max)
        .into_par_iter()
        .map(|r| {
            let p = build_and_protocol(AndParams::new(r)?)?;
            let rep = report(&p, &mu, None, cfg)?;
            let per_round_max = rep.per_round.iter().map(|t| t.cqmi_contribution).fold(0.0, f64::max);
            Ok((r, rep.qic_total, rep.qcc, worst_case_error(&p, &task, cfg)?, per_round_max))
        })
        .collect::<qic_core::Result<_>>()
        .map_err(input("sweeping r"))?;
    let mut table = Table::new(["r", "qic", "qcc", "error", "per_round_max", "decay_ratio"]);
    for &(r, q, c, e, m) in &rows {
        table.push(vec![r.into(), q.into(), c.into(), e.into(), m.into(), decay_ratio(r, q).into()]);
    }
    for pair in rows.windows(2) {
        if pair[1].1 >= pair[0].1 {
            eprintln!("warning: qic does not decrease from r = {} to r = {}", pair[0].0, pair[1].0);
        }
    }
    if w == 0.0 {
        let (lo, hi) = DECAY_BAND;
        for &(r, q, ..) in &rows {
            let d = decay_ratio(r, q);
            if !(lo..=hi).contains(&d) {
                eprintln!("warning: r = {r}: decay ratio {d} outside the calibrated band [{lo}, {hi}]");
            }
        }
    }
    Ok(table)
}

struct WRow {
    w: f64,
    qic: f64,
    increase: f64,
    closed_form: Vec<f64>,
    deviation: f64,
}

fn sweep_w(r: usize, ws: &[f64], cfg: &Config) -> Result<Table, CliError> {
    let params = AndParams::new(r).map_err(input("--r"))?;
    let base = qic_at_zero_mass(params, cfg).map_err(input("running at w = 0"))?;
    let odd: Vec<usize> = (1..=params.ping_pongs()).step_by(2).collect();
    let rows: Vec<WRow> = ws
        .par_iter()
        .map(|&w| {
            let mu = and_prior(w)?;
            let q = qic(&build_and_protocol(params)?, &mu, cfg)?;
            let closed_form = odd
                .iter()
                .map(|&i| and_round_entropy(i, params, w, YBranch::One))
                .collect::<qic_core::Result<Vec<_>>>()?;
            let mut deviation = 0.0f64;
            for (y, branch) in [(0, YBranch::Zero), (1, YBranch::One)] {
                for (k, h) in engine_branch_entropies(params, &mu, y, cfg)?.into_iter().enumerate() {
                    let i = k + 1;
                    if branch == YBranch::One && i % 2 == 0 {
                        continue;
                    }
                    if let Some(h) = h {
                        deviation = deviation.max((h - and_round_entropy(i, params, w, branch)?).abs());
                    }
                }
            }
            Ok(WRow { w, qic: q, increase: q - base, closed_form, deviation })
        })
        .collect::<qic_core::Result<_>>()
        .map_err(input("sweeping w"))?;

    let mut columns: Vec<String> =
        ["w", "qic", "delta_qic", "r_h_w", "ratio", "max_deviation"].map(String::from).to_vec();
    columns.extend(odd.iter().map(|i| format!("cf_{i}")));
    let mut table = Table::new(columns);
    for row in &rows {
        let r_h_w = r as f64 * binary_entropy(row.w).map_err(input("--w"))?;
        let ratio = mass_w_ratio(r, row.w, row.increase).map_err(input("--w"))?;
        if let Some(c) = ratio.filter(|c| *c < MASS_W_RATIO_FLOOR) {
            eprintln!("warning: w = {}: ratio {c} below the calibrated floor {MASS_W_RATIO_FLOOR}", row.w);
        }
        let mut cells =
            vec![row.w.into(), row.qic.into(), row.increase.into(), r_h_w.into(), ratio.into(), row.deviation.into()];
        cells.extend(row.closed_form.iter().map(|&v| Cell::from(v)));
        table.push(cells);
    }
    Ok(table)
}

fn verify(suite: &str, trials: usize, seed: u64, cfg: &Config) -> Result<(Table, Result<(), CliError>), CliError> {
    let suite: Suite = suite.parse().map_err(input("--suite"))?;
    if trials == 0 {
        return Err(CliError::Input("--trials must be at least 1".into()));
    }
    let results = run_suite(suite, trials, seed, cfg);
    let mut table = Table::new(["suite", "property", "trials", "passed", "tol", "max_violation", "status", "error"]);
    let mut failed = Vec::new();
    for r in &results {
        if !r.ok() {
            failed.push(format!("{}/{}", r.suite, r.property));
        }
        table.push(vec![
            r.suite.as_str().into(),
            r.property.as_str().into(),
            r.trials.into(),
            r.passed.into(),
            r.tol.into(),
            r.max_violation.into(),
            if r.ok() { "pass" } else { "fail" }.into(),
            r.error.clone().into(),
        ]);
    }
    eprintln!("{} of {} properties passed", results.len() - failed.len(), results.len());
    let check = if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("failing properties: {}", failed.join(", "))))
    };
    Ok((table, check))
}

fn named_table(f: Function) -> Result<BooleanTable, CliError> {
    let ctx = "building table";
    Ok(match f {
        Function::Xor => BooleanTable::xor(),
        Function::And => BooleanTable::and(),
        Function::Disj1 => BooleanTable::disjointness(1).map_err(input(ctx))?,
        Function::Disj2 => BooleanTable::disjointness(2).map_err(input(ctx))?,
        Function::Disj3 => BooleanTable::disjointness(3).map_err(input(ctx))?,
        Function::Const0 => BooleanTable::constant(2, 2, false).map_err(input(ctx))?,
        Function::Const1 => BooleanTable::constant(2, 2, true).map_err(input(ctx))?,
    })
}

fn indices(v: &[usize]) -> Cell {
    Cell::Text(v.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
}

fn gdm(
    path: Option<&Path>,
    function: Option<Function>,
    prior_args: &PriorArgs,
    delta: f64,
    grid_step: Option<f64>,
    cfg: &Config,
) -> Result<Table, CliError> {
    let f = match (path, function) {
        (Some(p), _) => read_table(p)?,
        (None, Some(name)) => named_table(name)?,
        (None, None) => return Err(CliError::Input("one of --table or --function is required".into())),
    };
    let (mu, res) = match grid_step {
        Some(step) => gdm_search(&f, delta, step).map_err(input("grid search"))?,
        None => {
            let mu = prior(prior_args, f.x_size(), f.y_size(), || InputDistribution::uniform(f.x_size(), f.y_size()), cfg)?;
            let res = gdm_delta(&f, &mu, delta).map_err(input("gdm"))?;
            (mu, res)
        }
    };
    let prior_text = mu.probs().iter().map(|p| crate::table::sig12(*p)).collect::<Vec<_>>().join(" ");
    let mut table = Table::new(["x_size", "y_size", "delta", "value", "disc", "rows", "cols", "flipped", "prior"]);
    table.push(vec![
        f.x_size().into(),
        f.y_size().into(),
        delta.into(),
        (res.value + 0.0).into(),
        res.disc.value.into(),
        indices(&res.disc.rows),
        indices(&res.disc.cols),
        indices(&res.flipped),
        prior_text.into(),
    ]);
    Ok(table)
}
