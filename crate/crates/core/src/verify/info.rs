use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Property, Suite};
use crate::info::{cqmi, entropy};
use crate::linalg::{apply_isometry, partial_trace, purify, tensor, Config, PureState, RegisterLayout};
use crate::random::{random_isometry, random_pure};
use crate::Result;

fn dim<R: Rng>(rng: &mut R) -> usize {
    rng.random_range(2..=3)
}

fn random_state(labels: &[&str], rng: &mut ChaCha8Rng) -> Result<PureState> {
    let layout = RegisterLayout::new(labels.iter().map(|l| (*l, dim(rng))).collect::<Vec<_>>())?;
    random_pure(layout, rng)
}

fn pure_symmetry(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let psi = random_state(&["A", "B"], rng)?;
    Ok((entropy(&psi, &["A"], cfg)? - entropy(&psi, &["B"], cfg)?).abs())
}

/// `I(AB;C|D) = I(A;C|D) + I(B;C|AD)` on a random mixed state.
fn chain_rule(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let psi = random_state(&["A", "B", "C", "D", "E"], rng)?;
    let whole = cqmi(&psi, &["A", "B"], &["C"], &["D"], cfg)?;
    let parts = cqmi(&psi, &["A"], &["C"], &["D"], cfg)? + cqmi(&psi, &["B"], &["C"], &["A", "D"], cfg)?;
    Ok((whole - parts).abs())
}

fn strong_subadditivity(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let psi = random_state(&["A", "B", "C", "E"], rng)?;
    Ok((-cqmi(&psi, &["A"], &["B"], &["C"], cfg)?).max(0.0))
}

/// Processing `B` through a channel cannot raise `I(A;B|C)`.
fn data_processing(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let psi = random_state(&["A", "B", "C", "E"], rng)?;
    let db = psi.layout().dim_of("B")?;
    let v = random_isometry(&[("B".into(), db)], &[("B2".into(), dim(rng)), ("F".into(), db)], rng)?;
    let out = apply_isometry(&psi, &v, cfg)?;
    let before = cqmi(&psi, &["A"], &["B"], &["C"], cfg)?;
    let after = cqmi(&out, &["A"], &["B2"], &["C"], cfg)?;
    Ok((after - before).max(0.0))
}

/// Replacing the purifier of `CB` by a different purification leaves
/// `I(C;R|B)` unchanged.
fn purification_invariance(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let psi = random_state(&["C", "B", "R"], rng)?;
    let rho = partial_trace(&psi, &["C", "B"], cfg)?;
    let phi = purify(&rho, "R2", cfg)?;
    Ok((cqmi(&psi, &["C"], &["R"], &["B"], cfg)? - cqmi(&phi, &["C"], &["R2"], &["B"], cfg)?).abs())
}

/// With `X` classical (a coherent copy `X'` is held elsewhere),
/// `I(A;B|CX) = sum_x p(x) I(A;B|C)_x`.
fn classical_conditioning(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let k = rng.random_range(2..=3);
    let dims: Vec<usize> = (0..4).map(|_| dim(rng)).collect();
    let inner = RegisterLayout::new(["A", "B", "C", "E"].into_iter().zip(dims.iter().copied()))?;
    let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    let block = inner.total_dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); k * k * block];
    let mut expect = 0.0;
    for (x, w) in raw.iter().enumerate() {
        let p = w / total;
        let branch = random_pure(inner.clone(), rng)?;
        expect += p * cqmi(&branch, &["A"], &["B"], &["C"], cfg)?;
        let offset = (x * k + x) * block;
        for (i, z) in branch.amplitudes().iter().enumerate() {
            amps[offset + i] = z * p.sqrt();
        }
    }
    let layout = RegisterLayout::new([("X", k), ("Xc", k)])?.concat(&inner)?;
    let psi = PureState::new(layout, amps)?;
    Ok((cqmi(&psi, &["A"], &["B"], &["C", "X"], cfg)? - expect).abs())
}

fn additivity_over_products(rng: &mut ChaCha8Rng, cfg: &Config) -> Result<f64> {
    let s1 = random_state(&["A1", "B1", "C1", "E1"], rng)?;
    let s2 = random_state(&["A2", "B2", "C2", "E2"], rng)?;
    let both = tensor(&s1, &s2)?;
    let joint = cqmi(&both, &["A1", "A2"], &["B1", "B2"], &["C1", "C2"], cfg)?;
    let sum = cqmi(&s1, &["A1"], &["B1"], &["C1"], cfg)? + cqmi(&s2, &["A2"], &["B2"], &["C2"], cfg)?;
    Ok((joint - sum).abs())
}

pub(super) fn properties() -> Vec<Property> {
    let p = |name, tol, check| Property { suite: Suite::Info, name, tol, check };
    vec![
        p("pure_bipartite_symmetry", 1e-9, pure_symmetry),
        p("chain_rule", 1e-8, chain_rule),
        p("strong_subadditivity", 1e-8, strong_subadditivity),
        p("data_processing", 1e-8, data_processing),
        p("purification_invariance", 1e-8, purification_invariance),
        p("classical_conditioning_averages", 1e-8, classical_conditioning),
        p("additivity_over_products", 1e-8, additivity_over_products),
    ]
}
