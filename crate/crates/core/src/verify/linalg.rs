use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Property, Suite};
use crate::linalg::{
    partial_trace, purify, trace_distance, Config, DensityOperator, Isometry, PureState, RegisterLayout,
};
use crate::random::{random_density, random_isometry, random_unitary};
use crate::Result;

fn dim<R: Rng>(rng: &mut R) -> usize {
    rng.random_range(2..=4)
}

fn pair(rng: &mut ChaCha8Rng, label: &str, cfg: &Config) -> Result<(DensityOperator, DensityOperator)> {
    let d = dim(rng);
    let l = RegisterLayout::new([(label, d)])?;
    let env = rng.random_range(1..=3);
    Ok((random_density(l.clone(), env, rng, cfg)?, random_density(l, env, rng, cfg)?))
}

/// `A -> B E` followed by discarding `E` never increases distinguishability.
fn monotonicity(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let (r1, r2) = pair(rng, "A", cfg)?;
    let da = r1.side();
    let db = rng.random_range(1..=3);
    let de = da.div_ceil(db) + rng.random_range(0..=1);
    let v = random_isometry(&[("A".into(), da)], &[("B".into(), db), ("E".into(), de)], rng)?;
    let n1 = partial_trace(&r1.apply_isometry(&v, cfg)?, &["B"], cfg)?;
    let n2 = partial_trace(&r2.apply_isometry(&v, cfg)?, &["B"], cfg)?;
    Ok((trace_distance(&n1, &n2, cfg)? - trace_distance(&r1, &r2, cfg)?).max(0.0))
}

fn unitary_invariance(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let (r1, r2) = pair(rng, "A", cfg)?;
    let d = r1.side();
    let u = Isometry::new([("A", d)], [("A", d)], random_unitary(d, rng), cfg.tol_iso)?;
    let after = trace_distance(&r1.apply_isometry(&u, cfg)?, &r2.apply_isometry(&u, cfg)?, cfg)?;
    Ok((after - trace_distance(&r1, &r2, cfg)?).abs())
}

fn adjoin_uncorrelated(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let (r1, r2) = pair(rng, "A", cfg)?;
    let d = dim(rng);
    let sigma = random_density(RegisterLayout::new([("S", d)])?, 2, rng, cfg)?;
    let joint = trace_distance(&r1.tensor(&sigma)?, &r2.tensor(&sigma)?, cfg)?;
    Ok((joint - trace_distance(&r1, &r2, cfg)?).abs())
}

/// `|| sum p_x |x><x| (x) (r1_x - r2_x) || = sum p_x || r1_x - r2_x ||`.
fn joint_linearity(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let k = rng.random_range(2..=3);
    let d = dim(rng);
    let a = RegisterLayout::new([("A", d)])?;
    let xl = RegisterLayout::new([("X", k)])?;
    let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    let mut blocks1 = Vec::new();
    let mut blocks2 = Vec::new();
    let mut expect = 0.0;
    for (x, w) in raw.iter().enumerate() {
        let p = w / total;
        let flag = PureState::basis(xl.clone(), x)?.to_density();
        let s1 = random_density(a.clone(), 2, rng, cfg)?;
        let s2 = random_density(a.clone(), 2, rng, cfg)?;
        expect += p * trace_distance(&s1, &s2, cfg)?;
        blocks1.push((p, flag.tensor(&s1)?));
        blocks2.push((p, flag.tensor(&s2)?));
    }
    let mix = |b: &[(f64, DensityOperator)]| {
        DensityOperator::mixture(&b.iter().map(|(p, r)| (*p, r)).collect::<Vec<_>>())
    };
    Ok((trace_distance(&mix(&blocks1)?, &mix(&blocks2)?, cfg)? - expect).abs())
}

/// Tracing the purifier back out recovers the original matrix.
fn purification_roundtrip(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let (da, db) = (dim(rng), rng.random_range(1..=3));
    let rho = random_density(RegisterLayout::new([("A", da), ("B", db)])?, rng.random_range(1..=4), rng, cfg)?;
    let psi = purify(&rho, "R", cfg)?;
    let back = partial_trace(&psi, &["A", "B"], cfg)?;
    Ok((back.matrix() - rho.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Tracing out in two steps equals tracing out at once.
fn partial_trace_composes(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let layout = RegisterLayout::new([("A", dim(rng)), ("B", dim(rng)), ("C", dim(rng))])?;
    let rho = random_density(layout, 2, rng, cfg)?;
    let ab = partial_trace(&rho, &["A", "B"], cfg)?;
    let a1 = partial_trace(&ab, &["A"], cfg)?;
    let a2 = partial_trace(&rho, &["A"], cfg)?;
    Ok((a1.matrix() - a2.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

fn spectrum_is_a_distribution(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let layout = RegisterLayout::new([("A", dim(rng)), ("B", dim(rng))])?;
    let rho = random_density(layout, rng.random_range(1..=6), rng, cfg)?;
    let ev = rho.spectrum(cfg)?;
    let neg = ev.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
    Ok(neg.max((ev.iter().sum::<f64>() - 1.0).abs()))
}

pub(super) fn properties() -> Vec<Property> {
    let p = |name, tol, check| Property { suite: Suite::Linalg, name, tol, check };
    vec![
        p("trace_distance_monotone", 1e-9, monotonicity),
        p("trace_distance_unitary_invariant", 1e-9, unitary_invariance),
        p("trace_distance_adjoin_uncorrelated", 1e-9, adjoin_uncorrelated),
        p("trace_distance_joint_linearity", 1e-9, joint_linearity),
        p("purification_roundtrip", 1e-9, purification_roundtrip),
        p("partial_trace_composes", 1e-12, partial_trace_composes),
        p("spectrum_is_distribution", 1e-9, spectrum_is_a_distribution),
    ]
}
