use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Property, Suite};
use crate::builtins::{
    and_prior, and_round_entropy, build_and_protocol, engine_branch_entropies, engine_trajectory, AndParams,
    YBranch,
};
use crate::engine::{qic, report, worst_case_error, TaskSpec};
use crate::info::binary_entropy;
use crate::linalg::Config;
use crate::{InputDistribution, Result};

/// Constant in `QIC(mu) - QIC(mu0) <= C r H(w)`: the continuity bound at
/// distance `w` on binary alphabets is `r (2w + H(w)) <= 3 r H(w)`.
pub const ONEZERO_CONSTANT: f64 = 3.0;

fn params(rng: &mut ChaCha8Rng, max_r: usize) -> AndParams {
    AndParams::new(rng.random_range(1..=max_r)).expect("r >= 1")
}

fn exactness(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let p = build_and_protocol(params(rng, 8))?;
    worst_case_error(&p, &TaskSpec::and(), cfg)
}

fn final_amplitude(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let a = params(rng, 8);
    let last = engine_trajectory(a, 1, 1, cfg)?[4 * a.r - 1];
    Ok(last[0].norm().max((last[1] + 1.0).norm()))
}

fn y_zero_closed_form(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let a = params(rng, 6);
    let got = engine_branch_entropies(a, &and_prior(0.0)?, 0, cfg)?;
    let mut worst = 0.0f64;
    for (k, h) in got.iter().enumerate() {
        let want = and_round_entropy(k + 1, a, 0.0, YBranch::Zero)?;
        worst = worst.max((h.unwrap_or(f64::NAN) - want).abs());
    }
    Ok(worst)
}

fn y_one_closed_form(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let a = AndParams::new([2, 4, 8][rng.random_range(0..3)])?;
    let w = rng.random::<f64>() * 0.5;
    let got = engine_branch_entropies(a, &and_prior(w)?, 1, cfg)?;
    let mut worst = 0.0f64;
    for i in (1..=a.ping_pongs()).step_by(2) {
        let want = and_round_entropy(i, a, w, YBranch::One)?;
        worst = worst.max((got[i - 1].unwrap_or(f64::NAN) - want).abs());
    }
    Ok(worst)
}

/// Over the ping-pong messages, `QIC(mu*) = (2r/3) H(sin^2 theta)`.
fn decomposition(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let a = params(rng, 8);
    let rep = report(&build_and_protocol(a)?, &and_prior(0.0)?, None, cfg)?;
    let want = 2.0 * a.r as f64 / 3.0 * binary_entropy(a.theta().sin().powi(2))?;
    Ok((rep.qic_first(a.ping_pongs()) - want).abs())
}

fn strictly_decreasing(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let r = rng.random_range(1..=15);
    let mu = and_prior(0.0)?;
    let now = qic(&build_and_protocol(AndParams::new(r)?)?, &mu, cfg)?;
    let next = qic(&build_and_protocol(AndParams::new(r + 1)?)?, &mu, cfg)?;
    // violation is how far `next` fails to drop below `now`
    Ok(if next < now { 0.0 } else { next - now + f64::MIN_POSITIVE })
}

/// Moving mass `w` onto `(1, 1)` costs at most `C r H(w)`.
fn onezero(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let a = params(rng, 4);
    let w = rng.random::<f64>() * 0.5;
    let raw: Vec<f64> = (0..3).map(|_| rng.random::<f64>() + 0.05).collect();
    let s: f64 = raw.iter().sum();
    let base: Vec<f64> = raw.iter().map(|v| v / s).chain([0.0]).collect();
    let mu0 = InputDistribution::new(2, 2, base.clone(), 1e-9)?;
    let mu = InputDistribution::new(
        2,
        2,
        base[..3].iter().map(|v| v * (1.0 - w)).chain([w]).collect(),
        1e-9,
    )?;
    let p = build_and_protocol(a)?;
    let gap = qic(&p, &mu, cfg)? - qic(&p, &mu0, cfg)?;
    Ok((gap - ONEZERO_CONSTANT * p.r() as f64 * binary_entropy(w)?).max(0.0))
}

pub(super) fn properties() -> Vec<Property> {
    let p = |name, tol, check| Property { suite: Suite::And, name, tol, check };
    vec![
        p("and_exact", 1e-9, exactness),
        p("and_final_amplitude", 1e-9, final_amplitude),
        p("y0_entropy_closed_form", 1e-8, y_zero_closed_form),
        p("y1_entropy_closed_form", 1e-8, y_one_closed_form),
        p("qic_decomposition", 1e-8, decomposition),
        p("qic_strictly_decreasing", 0.0, strictly_decreasing),
        p("onezero_bound", 1e-8, onezero),
    ]
}
