use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{average, random_distribution, Property, Suite};
use crate::builtins::{random_protocol, RandomShape};
use crate::engine::{convex_mix, marginals, parallel, qcc, qic, ProtocolSpec, Split};
use crate::info::binary_entropy;
use crate::linalg::Config;
use crate::{tv_distance, Result};

/// A random shape whose registers (purifier aside) span at most `max_dim`.
fn shape(rng: &mut ChaCha8Rng, max_dim: usize) -> RandomShape {
    loop {
        let s = RandomShape {
            alice_inputs: vec![rng.random_range(2..=3)],
            bob_inputs: vec![rng.random_range(2..=3)],
            rounds: rng.random_range(1..=3),
            message_dim: rng.random_range(2..=3),
            entanglement_dim: rng.random_range(1..=2),
        };
        if s.total_dim() <= max_dim {
            return s;
        }
    }
}

fn protocol(rng: &mut ChaCha8Rng, max_dim: usize) -> Result<ProtocolSpec> {
    let s = shape(rng, max_dim);
    random_protocol(&s, rng)
}

fn with_prior(rng: &mut ChaCha8Rng, max_dim: usize) -> Result<(ProtocolSpec, crate::InputDistribution)> {
    let p = protocol(rng, max_dim)?;
    let mu = random_distribution(p.x_size, p.y_size, rng)?;
    Ok((p, mu))
}

fn qic_within_qcc(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let (p, mu) = with_prior(rng, 64)?;
    let q = qic(&p, &mu, cfg)?;
    Ok((-q).max(q - qcc(&p)?).max(0.0))
}

/// Side-by-side protocols on independent inputs cost the sum.
fn additivity(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let (p1, mu1) = with_prior(rng, 16)?;
    let (p2, mu2) = with_prior(rng, 16)?;
    let joint = qic(&parallel(&p1, &p2)?, &mu1.product(&mu2), cfg)?;
    Ok((joint - qic(&p1, &mu1, cfg)? - qic(&p2, &mu2, cfg)?).abs())
}

/// A protocol on two-coordinate inputs splits into two one-coordinate
/// protocols whose costs add up to the original.
fn splitting(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let s = RandomShape {
        alice_inputs: vec![2, 2],
        bob_inputs: vec![2, 2],
        rounds: rng.random_range(1..=3),
        message_dim: rng.random_range(2..=3),
        entanglement_dim: 1,
    };
    let p = random_protocol(&s, rng)?;
    let rho1 = random_distribution(2, 2, rng)?;
    let rho2 = random_distribution(2, 2, rng)?;
    let split = Split { protocol: &p, alice_split: 1, bob_split: 1 };
    let whole = qic(&p, &rho1.product(&rho2), cfg)?;
    let parts = qic(&split.first(&rho2)?, &rho1, cfg)? + qic(&split.second(&rho1)?, &rho2, cfg)?;
    Ok((whole - parts).abs())
}

fn convex_combination(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let s = shape(rng, 16);
    let p1 = random_protocol(&s, rng)?;
    let p2 = random_protocol(&s, rng)?;
    let w: f64 = rng.random();
    let mu = random_distribution(p1.x_size, p1.y_size, rng)?;
    let mixed = qic(&convex_mix(w, &p1, &p2)?, &mu, cfg)?;
    Ok((mixed - w * qic(&p1, &mu, cfg)? - (1.0 - w) * qic(&p2, &mu, cfg)?).abs())
}

/// Correlated inputs never cost more than the marginals run separately.
fn subadditivity(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let p1 = protocol(rng, 16)?;
    let p2 = protocol(rng, 16)?;
    let both = parallel(&p1, &p2)?;
    let mu = random_distribution(both.x_size, both.y_size, rng)?;
    let (m1, m2) = marginals(&mu, p1.x_size, p1.y_size)?;
    let lhs = qic(&both, &mu, cfg)?;
    Ok((lhs - qic(&p1, &m1, cfg)? - qic(&p2, &m2, cfg)?).max(0.0))
}

fn concavity(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let p = protocol(rng, 64)?;
    let k = rng.random_range(2..=4);
    let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    let mus = (0..k)
        .map(|_| random_distribution(p.x_size, p.y_size, rng))
        .collect::<Result<Vec<_>>>()?;
    let parts: Vec<(f64, &crate::InputDistribution)> = raw.iter().map(|w| w / total).zip(&mus).collect();
    let mut lhs = 0.0;
    for (w, mu) in &parts {
        lhs += w * qic(&p, mu, cfg)?;
    }
    Ok((lhs - qic(&p, &average(&parts)?, cfg)?).max(0.0))
}

fn quasi_convexity(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let (p, mu1) = with_prior(rng, 64)?;
    let mu2 = random_distribution(p.x_size, p.y_size, rng)?;
    let w: f64 = rng.random();
    let mixed = qic(&p, &mu1.mix(w, &mu2)?, cfg)?;
    let bound = w * qic(&p, &mu1, cfg)? + (1.0 - w) * qic(&p, &mu2, cfg)? + p.r() as f64 * binary_entropy(w)?;
    Ok((mixed - bound).max(0.0))
}

/// `|QIC(mu1) - QIC(mu2)| <= d r (log|X| + log|Y|) + r H(d)`, `d` the
/// total-variation distance. Half the trials use nearby priors.
fn continuity(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let (p, mu1) = with_prior(rng, 64)?;
    let other = random_distribution(p.x_size, p.y_size, rng)?;
    let mu2 = if rng.random::<bool>() {
        mu1.mix(1.0 - rng.random::<f64>() * 0.05, &other)?
    } else {
        other
    };
    let d = tv_distance(&mu1, &mu2, cfg.tol_norm)?.delta;
    let r = p.r() as f64;
    let bound = d * r * ((p.x_size as f64).log2() + (p.y_size as f64).log2()) + r * binary_entropy(d.min(1.0))?;
    Ok(((qic(&p, &mu1, cfg)? - qic(&p, &mu2, cfg)?).abs() - bound).max(0.0))
}

fn relabel_invariance(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let (p, mu) = with_prior(rng, 64)?;
    Ok((qic(&p.prefixed("z.")?, &mu, cfg)? - qic(&p, &mu, cfg)?).abs())
}

pub(super) fn properties() -> Vec<Property> {
    let p = |name, tol, check| Property { suite: Suite::Engine, name, tol, check };
    vec![
        p("qic_within_qcc", 1e-8, qic_within_qcc),
        p("additivity_product_inputs", 1e-8, additivity),
        p("splitting_equality", 1e-8, splitting),
        p("convex_mix_equality", 1e-8, convex_combination),
        p("subadditivity", 1e-8, subadditivity),
        p("concavity_in_input", 1e-8, concavity),
        p("quasi_convexity_remainder", 1e-8, quasi_convexity),
        p("continuity_bound", 1e-8, continuity),
        p("relabel_invariance", 1e-9, relabel_invariance),
    ]
}
