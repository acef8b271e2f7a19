use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Property, Suite};
use crate::disc::{disc_fast, disc_oracle, gdm_delta, rectangle_sum, BooleanTable};
use crate::linalg::Config;
use crate::{InputDistribution, Result};

fn table(rng: &mut ChaCha8Rng, max_side: usize) -> Result<BooleanTable> {
    let (x, y) = (rng.random_range(1..=max_side), rng.random_range(1..=max_side));
    let bits: Vec<Vec<u8>> = (0..x).map(|_| (0..y).map(|_| rng.random_range(0..=1)).collect()).collect();
    BooleanTable::new(x, y, bits)
}

/// Random prior; about a third of the draws zero out some cells.
fn prior(g: &BooleanTable, rng: &mut ChaCha8Rng) -> Result<InputDistribution> {
    let sparse = rng.random_range(0..3) == 0;
    let n = g.x_size() * g.y_size();
    let mut raw: Vec<f64> = (0..n)
        .map(|_| if sparse && rng.random::<bool>() { 0.0 } else { rng.random::<f64>() + 1e-3 })
        .collect();
    if raw.iter().all(|v| *v == 0.0) {
        raw[rng.random_range(0..n)] = 1.0;
    }
    let s: f64 = raw.iter().sum();
    InputDistribution::new(g.x_size(), g.y_size(), raw.into_iter().map(|v| v / s).collect(), 1e-9)
}

fn oracle_equivalence(rng: &mut ChaCha8Rng, _: &Config) -> Result<f64> {
    let g = table(rng, 4)?;
    let mu = prior(&g, rng)?;
    let (a, b) = (disc_oracle(&g, &mu)?.value, disc_fast(&g, &mu)?.value);
    Ok(if a == b { 0.0 } else { (a - b).abs().max(f64::MIN_POSITIVE) })
}

fn witness_validity(rng: &mut ChaCha8Rng, _: &Config) -> Result<f64> {
    let g = table(rng, 4)?;
    let mu = prior(&g, rng)?;
    let mut worst = 0.0f64;
    for d in [disc_oracle(&g, &mu)?, disc_fast(&g, &mu)?] {
        worst = worst.max((rectangle_sum(&g, &mu, &d.rows, &d.cols) - d.value).abs());
    }
    Ok(worst)
}

fn disc_in_unit_interval(rng: &mut ChaCha8Rng, _: &Config) -> Result<f64> {
    let g = table(rng, 4)?;
    let v = disc_fast(&g, &prior(&g, rng)?)?.value;
    Ok(if v > 0.0 { (v - 1.0).max(0.0) } else { 1.0 })
}

fn gdm_monotone(rng: &mut ChaCha8Rng, _: &Config) -> Result<f64> {
    let f = table(rng, 3)?;
    let mu = prior(&f, rng)?;
    let (d1, d2) = (rng.random::<f64>(), rng.random::<f64>());
    let (lo, hi) = (d1.min(d2), d1.max(d2));
    Ok((gdm_delta(&f, &mu, lo)?.value - gdm_delta(&f, &mu, hi)?.value).max(0.0))
}

/// With full support and no budget, only `g = f` qualifies.
fn gdm_zero_budget(rng: &mut ChaCha8Rng, _: &Config) -> Result<f64> {
    let f = table(rng, 4)?;
    let n = f.x_size() * f.y_size();
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = raw.iter().sum();
    let mu = InputDistribution::new(f.x_size(), f.y_size(), raw.into_iter().map(|v| v / s).collect(), 1e-9)?;
    let want = -disc_oracle(&f, &mu)?.value.log2();
    Ok((gdm_delta(&f, &mu, 0.0)?.value - want).abs())
}

pub(super) fn properties() -> Vec<Property> {
    let p = |name, tol, check| Property { suite: Suite::Disc, name, tol, check };
    vec![
        p("fast_equals_oracle", 0.0, oracle_equivalence),
        p("witness_reproduces_value", 1e-12, witness_validity),
        p("disc_in_unit_interval", 0.0, disc_in_unit_interval),
        p("gdm_monotone_in_delta", 0.0, gdm_monotone),
        p("gdm_zero_budget_is_log_disc", 1e-12, gdm_zero_budget),
    ]
}
