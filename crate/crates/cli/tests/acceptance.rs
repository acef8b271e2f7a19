//! Acceptance gate. One line per criterion; exits non-zero if any fails.
//! Closed forms are re-derived here rather than taken from the library.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qic_core::builtins::calibration::{DECAY_BAND, MASS_W_RATIO_FLOOR};
use qic_core::builtins::{
    and_prior, build_and_protocol, engine_branch_entropies, engine_trajectory, random_protocol, AndParams,
    RandomShape,
};
use qic_core::disc::{disc_fast, disc_oracle, gdm_delta, BooleanTable};
use qic_core::engine::{qic, repeat_disjointness, repeat_n, worst_case_error, TaskSpec};
use qic_core::linalg::Config;
use qic_core::verify::{random_distribution, run_property, trial_rng, Suite};
use qic_core::InputDistribution;
use rand::Rng;

const SEED: u64 = 7;
const EXACT_TOL: f64 = 1e-9;
const ENTROPY_TOL: f64 = 1e-8;
const PROPERTY_TOL: f64 = 1e-8;
const SUITE_TRIALS: usize = 100;
const DISC_INSTANCES: usize = 200;
const GDM_INSTANCES: usize = 50;
const MAX_BAND_RATIO: f64 = 2.0;

type Outcome = Result<String, String>;

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

fn theta(r: usize) -> f64 {
    PI / (8.0 * r as f64)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(r: qic_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn and_exactness(cfg: &Config) -> Outcome {
    let mut worst = 0.0f64;
    let mut amp = 0.0f64;
    for r in 1..=8 {
        let params = core(AndParams::new(r))?;
        let p = core(build_and_protocol(params))?;
        worst = worst.max(core(worst_case_error(&p, &TaskSpec::and(), cfg))?);
        let last = *core(engine_trajectory(params, 1, 1, cfg))?.last().ok_or("empty trajectory")?;
        amp = amp.max(last[0].norm()).max((last[1] + 1.0).norm());
    }
    ensure(worst <= EXACT_TOL && amp <= EXACT_TOL, || format!("error {worst:e}, amplitude defect {amp:e}"))?;
    Ok(format!("max error {worst:.1e}, max amplitude defect {amp:.1e}"))
}

fn y_zero_entropies(cfg: &Config) -> Outcome {
    let mut dev = 0.0f64;
    for r in 1..=6 {
        let params = core(AndParams::new(r))?;
        let hs = core(engine_branch_entropies(params, &core(and_prior(0.0))?, 0, cfg))?;
        for (k, h) in hs.iter().enumerate() {
            let i = k + 1;
            let expect = match i % 4 {
                1 => h2(theta(r).sin().powi(2)),
                3 => 0.0,
                _ => continue,
            };
            let h = h.ok_or("Y = 0 has zero mass")?;
            dev = dev.max((h - expect).abs());
        }
    }
    ensure(dev <= ENTROPY_TOL, || format!("max deviation {dev:e}"))?;
    Ok(format!("max deviation {dev:.1e}"))
}

/// Smallest `delta_qic / (r H(w))` recorded in the calibration CSVs.
fn recorded_floor() -> Result<f64, String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../calibration");
    let mut min = f64::INFINITY;
    for r in [2, 4, 8] {
        let path = dir.join(format!("mass_w_r{r}.csv"));
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut lines = text.lines().filter(|l| !l.starts_with('#'));
        let header: Vec<&str> = lines.next().ok_or("empty calibration file")?.split(',').collect();
        let col = header.iter().position(|c| *c == "ratio").ok_or("no ratio column")?;
        for line in lines {
            if let Ok(v) = line.split(',').nth(col).unwrap_or("").parse::<f64>() {
                min = min.min(v);
            }
        }
    }
    Ok(min)
}

fn mass_w(cfg: &Config) -> Outcome {
    let mut dev = 0.0f64;
    let mut ratio = f64::INFINITY;
    for r in [2, 4, 8] {
        let params = core(AndParams::new(r))?;
        let p = core(build_and_protocol(params))?;
        let base = core(qic(&p, &core(and_prior(0.0))?, cfg))?;
        for w in [0.01, 0.05, 0.1] {
            let mu = core(and_prior(w))?;
            for (k, h) in core(engine_branch_entropies(params, &mu, 1, cfg))?.iter().enumerate() {
                let i = k + 1;
                if i % 2 == 0 {
                    continue;
                }
                let s2 = ((i + 1) as f64 * theta(r)).sin().powi(2);
                let disc = 1.0 - 12.0 * w * (1.0 - w) * s2 / (1.0 + 2.0 * w).powi(2);
                let expect = h2((1.0 - disc.sqrt()) / 2.0);
                dev = dev.max((h.ok_or("Y = 1 has zero mass")? - expect).abs());
            }
            let increase = core(qic(&p, &mu, cfg))? - base;
            ratio = ratio.min(increase / (r as f64 * h2(w)));
        }
    }
    let recorded = recorded_floor()?;
    ensure(dev <= ENTROPY_TOL, || format!("closed-form deviation {dev:e}"))?;
    ensure(ratio >= MASS_W_RATIO_FLOOR, || format!("ratio {ratio} below c = {MASS_W_RATIO_FLOOR}"))?;
    ensure(MASS_W_RATIO_FLOOR <= recorded, || format!("c = {MASS_W_RATIO_FLOOR} exceeds recorded minimum {recorded}"))?;
    Ok(format!("max deviation {dev:.1e}, min ratio {ratio:.4} >= c = {MASS_W_RATIO_FLOOR}"))
}

fn decay(cfg: &Config) -> Outcome {
    let mut prev = f64::INFINITY;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for r in 1..=16 {
        let q = core(qic(&core(build_and_protocol(core(AndParams::new(r))?))?, &core(and_prior(0.0))?, cfg))?;
        ensure(q < prev, || format!("QIC not strictly decreasing at r = {r}: {q} >= {prev}"))?;
        prev = q;
        let ratio = r as f64 * q / (8.0 * r as f64).log2();
        ensure(DECAY_BAND.0 <= ratio && ratio <= DECAY_BAND.1, || format!("r = {r}: ratio {ratio} outside band"))?;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    ensure(DECAY_BAND.1 / DECAY_BAND.0 <= MAX_BAND_RATIO, || "pinned band wider than 2x".into())?;
    Ok(format!("ratios in [{lo:.4}, {hi:.4}] within band [{}, {}]", DECAY_BAND.0, DECAY_BAND.1))
}

fn suite(cfg: &Config, suites: &[Suite], names: &[&str]) -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for s in suites {
        for p in s.properties().iter().filter(|p| names.contains(&p.name)) {
            ensure(p.tol <= PROPERTY_TOL, || format!("{} tolerance {} looser than {PROPERTY_TOL}", p.name, p.tol))?;
            let res = run_property(p, SUITE_TRIALS, SEED, cfg);
            ensure(res.ok(), || format!("{}: {}/{} passed, {:?}", p.name, res.passed, res.trials, res.error))?;
            worst = worst.max(res.max_violation);
            checked += 1;
        }
    }
    ensure(checked == names.len(), || format!("only {checked} of {} properties found", names.len()))?;
    Ok(format!("{checked} properties x {SUITE_TRIALS} trials, max violation {worst:.1e}"))
}

fn random_table<R: Rng>(x: usize, y: usize, rng: &mut R) -> Result<BooleanTable, String> {
    let values = (0..x).map(|_| (0..y).map(|_| u8::from(rng.random::<bool>())).collect()).collect();
    core(BooleanTable::new(x, y, values))
}

/// A random prior that sometimes has zero cells.
fn random_prior<R: Rng>(x: usize, y: usize, rng: &mut R) -> Result<InputDistribution, String> {
    let mut raw: Vec<f64> = (0..x * y).map(|_| if rng.random::<f64>() < 0.2 { 0.0 } else { rng.random() }).collect();
    if raw.iter().all(|v| *v == 0.0) {
        raw[0] = 1.0;
    }
    let s: f64 = raw.iter().sum();
    core(InputDistribution::new(x, y, raw.into_iter().map(|v| v / s).collect(), 1e-9))
}

fn discrepancy(_: &Config) -> Outcome {
    for k in 0..DISC_INSTANCES {
        let mut rng = trial_rng(SEED, "acceptance/disc", k);
        let (x, y) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let g = random_table(x, y, &mut rng)?;
        let mu = random_prior(x, y, &mut rng)?;
        let (fast, slow) = (core(disc_fast(&g, &mu))?, core(disc_oracle(&g, &mu))?);
        ensure(fast.value == slow.value, || format!("instance {k}: fast {} vs oracle {}", fast.value, slow.value))?;
    }
    let xor = core(gdm_delta(&BooleanTable::xor(), &core(InputDistribution::uniform(2, 2))?, 0.0))?.value;
    ensure(xor == 2.0, || format!("GDM_0 of XOR under uniform = {xor}"))?;
    let deltas = [0.0, 0.05, 0.1, 0.2, 0.35, 0.5, 1.0];
    for k in 0..GDM_INSTANCES {
        let mut rng = trial_rng(SEED, "acceptance/gdm", k);
        let (x, y) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let f = random_table(x, y, &mut rng)?;
        let mu = random_distribution(x, y, &mut rng).map_err(|e| e.to_string())?;
        let mut prev = f64::NEG_INFINITY;
        for d in deltas {
            let v = core(gdm_delta(&f, &mu, d))?.value;
            ensure(v >= prev, || format!("instance {k}: value drops to {v} at delta {d}"))?;
            prev = v;
        }
    }
    Ok(format!("{DISC_INSTANCES} exact matches, GDM_0(XOR) = 2, {GDM_INSTANCES} monotone instances"))
}

fn repetition(cfg: &Config) -> Outcome {
    let shape = RandomShape { alice_inputs: vec![2], bob_inputs: vec![2], rounds: 1, message_dim: 2, entanglement_dim: 1 };
    let mut dev = 0.0f64;
    for k in 0..3 {
        let mut rng = trial_rng(SEED, "acceptance/repeat", k);
        let p = core(random_protocol(&shape, &mut rng))?;
        let mu = random_distribution(2, 2, &mut rng).map_err(|e| e.to_string())?;
        let single = core(qic(&p, &mu, cfg))?;
        for n in 1..=3 {
            let joint = core(qic(&core(repeat_n(&p, n))?, &mu.power(n), cfg))?;
            dev = dev.max((joint - n as f64 * single).abs());
        }
    }
    ensure(dev <= PROPERTY_TOL, || format!("additivity deviation {dev:e}"))?;
    let disj = core(repeat_disjointness(&core(build_and_protocol(core(AndParams::new(1))?))?, 2))?;
    let err = core(worst_case_error(&disj, &TaskSpec::disjointness(2), cfg))?;
    ensure(err <= EXACT_TOL, || format!("DISJ_2 worst-case error {err:e}"))?;
    Ok(format!("max deviation {dev:.1e}, DISJ_2 error {err:.1e}"))
}

fn reproducibility(_: &Config) -> Outcome {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_qicsim"))
            .args(["verify", "--suite", "all", "--seed", "7"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)))?;
        Ok::<_, String>(out.stdout)
    };
    let (a, b) = (run()?, run()?);
    ensure(!a.is_empty() && a == b, || "reports differ".into())?;
    Ok(format!("{} identical bytes", a.len()))
}

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Duration,
    run: fn(&Config) -> Outcome,
}

fn engine_properties(cfg: &Config) -> Outcome {
    suite(
        cfg,
        &[Suite::Engine],
        &[
            "additivity_product_inputs",
            "splitting_equality",
            "convex_mix_equality",
            "subadditivity",
            "concavity_in_input",
            "quasi_convexity_remainder",
            "continuity_bound",
            "qic_within_qcc",
        ],
    )
}

fn identities(cfg: &Config) -> Outcome {
    suite(
        cfg,
        &[Suite::Info, Suite::Linalg],
        &[
            "chain_rule",
            "strong_subadditivity",
            "purification_invariance",
            "classical_conditioning_averages",
            "trace_distance_monotone",
            "trace_distance_unitary_invariant",
            "trace_distance_joint_linearity",
        ],
    )
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, name: "and_protocol_exact", budget: secs(10), run: and_exactness },
        Criterion { id: 2, name: "y_zero_round_entropies", budget: secs(30), run: y_zero_entropies },
        Criterion { id: 3, name: "mass_w_formula_and_increase", budget: secs(120), run: mass_w },
        Criterion { id: 4, name: "qic_decay", budget: secs(300), run: decay },
        Criterion { id: 5, name: "engine_property_suite", budget: secs(600), run: engine_properties },
        Criterion { id: 6, name: "information_identities", budget: secs(300), run: identities },
        Criterion { id: 7, name: "discrepancy_oracles", budget: secs(60), run: discrepancy },
        Criterion { id: 8, name: "parallel_repetition", budget: secs(120), run: repetition },
        Criterion { id: 9, name: "reproducible_reports", budget: secs(600), run: reproducibility },
    ];
    let cfg = Config::default();
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)(&cfg);
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > c.budget => Err(format!("{detail}; took {took:.1?}, budget {:?}", c.budget)),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS [{}] {} ({took:.2?}): {detail}", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {} ({took:.2?}): {why}", c.id, c.name);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
