//! Seeded property suites. Every trial draws from its own ChaCha stream,
//! derived from the seed, the property name and the trial index, so a
//! suite's report depends on nothing but `(suite, trials, seed, cfg)`.

mod and;
mod disc;
mod engine;
mod info;
mod linalg;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::Config;
use crate::{Error, InputDistribution, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Linalg,
    Info,
    Engine,
    And,
    Disc,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Linalg, Suite::Info, Suite::Engine, Suite::And, Suite::Disc];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Linalg => "linalg",
            Suite::Info => "info",
            Suite::Engine => "engine",
            Suite::And => "and",
            Suite::Disc => "disc",
            Suite::All => "all",
        }
    }

    pub fn properties(self) -> Vec<Property> {
        match self {
            Suite::Linalg => linalg::properties(),
            Suite::Info => info::properties(),
            Suite::Engine => engine::properties(),
            Suite::And => and::properties(),
            Suite::Disc => disc::properties(),
            Suite::All => Suite::EACH.iter().flat_map(|s| s.properties()).collect(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::Linalg, Suite::Info, Suite::Engine, Suite::And, Suite::Disc, Suite::All]
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite `{s}`")))
    }
}

pub type Check = fn(&mut ChaCha8Rng, &Config) -> Result<f64>;

/// One invariant: `check` returns the amount by which a random instance
/// violates it (0 when it holds exactly); the trial passes when that is at
/// most `tol`.
#[derive(Clone, Copy)]
pub struct Property {
    pub suite: Suite,
    pub name: &'static str,
    pub tol: f64,
    pub check: Check,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub suite: String,
    pub property: String,
    pub trials: usize,
    pub passed: usize,
    pub tol: f64,
    /// Largest violation seen; infinite when a trial errored.
    pub max_violation: f64,
    /// First error message, if any trial errored.
    pub error: Option<String>,
}

impl PropertyResult {
    pub fn ok(&self) -> bool {
        self.passed == self.trials
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

/// The generator for trial `t` of `name` under `seed`.
pub fn trial_rng(seed: u64, name: &str, t: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(name).wrapping_add(t as u64));
    rng
}

pub fn run_property(p: &Property, trials: usize, seed: u64, cfg: &Config) -> PropertyResult {
    let key = format!("{}/{}", p.suite, p.name);
    let outcomes: Vec<Result<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| (p.check)(&mut trial_rng(seed, &key, t), cfg))
        .collect();
    let mut passed = 0;
    let mut worst = 0.0f64;
    let mut error = None;
    for o in outcomes {
        match o {
            Ok(v) if v.is_nan() => {
                worst = f64::INFINITY;
                error.get_or_insert_with(|| "check produced NaN".to_string());
            }
            Ok(v) => {
                worst = worst.max(v);
                if v <= p.tol {
                    passed += 1;
                }
            }
            Err(e) => {
                worst = f64::INFINITY;
                error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    PropertyResult {
        suite: p.suite.to_string(),
        property: p.name.to_string(),
        trials,
        passed,
        tol: p.tol,
        max_violation: worst,
        error,
    }
}

pub fn run_suite(suite: Suite, trials: usize, seed: u64, cfg: &Config) -> Vec<PropertyResult> {
    suite
        .properties()
        .iter()
        .map(|p| run_property(p, trials, seed, cfg))
        .collect()
}

/// Random full-support distribution (normalized exponentials).
pub fn random_distribution<R: Rng + ?Sized>(x: usize, y: usize, rng: &mut R) -> Result<InputDistribution> {
    let raw: Vec<f64> = (0..x * y).map(|_| -(1.0 - rng.random::<f64>()).ln() + 1e-3).collect();
    let s: f64 = raw.iter().sum();
    InputDistribution::new(x, y, raw.into_iter().map(|v| v / s).collect(), 1e-9)
}

/// `sum_j w_j mu_j`, cellwise.
pub(crate) fn average(parts: &[(f64, &InputDistribution)]) -> Result<InputDistribution> {
    let first = parts.first().ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?.1;
    let mut acc = vec![0.0; first.probs().len()];
    for (w, mu) in parts {
        for (a, p) in acc.iter_mut().zip(mu.probs()) {
            *a += w * p;
        }
    }
    InputDistribution::new(first.x_size(), first.y_size(), acc, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_differ_by_trial_and_name() {
        let a: u64 = trial_rng(7, "x", 0).random();
        let b: u64 = trial_rng(7, "x", 1).random();
        let c: u64 = trial_rng(7, "y", 0).random();
        assert!(a != b && a != c);
        assert_eq!(a, trial_rng(7, "x", 0).random::<u64>());
    }

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::EACH {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn every_property_passes_a_few_trials() {
        let cfg = Config::default();
        for r in run_suite(Suite::All, 3, 1, &cfg) {
            assert!(r.ok(), "{}/{}: {:?}", r.suite, r.property, r);
        }
    }
}
