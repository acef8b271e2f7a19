//! The ping-pong AND protocol: one qubit bounced `4r - 1` times, rotated
//! by Alice when `x = 1` and phase-flipped by Bob when `y = 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::engine::{run, ProtocolSpec, Roles, Round};
use crate::info::{binary_entropy, classical_branch, entropy};
use crate::linalg::{CMatrix, Config, Isometry, PureState};
use crate::{Error, InputDistribution, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AndParams {
    pub r: usize,
}

impl AndParams {
    pub fn new(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("r must be at least 1".into()));
        }
        Ok(Self { r })
    }

    /// Half the reflection axis angle, `pi / (8 r)`.
    pub fn theta(&self) -> f64 {
        PI / (8.0 * self.r as f64)
    }

    /// Messages exchanged before the answer.
    pub fn ping_pongs(&self) -> usize {
        4 * self.r - 1
    }
}

fn real(m: &[f64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_row_slice(rows, cols, &m.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>())
}

/// Reflection about `cos(theta)|0> + sin(theta)|1>`.
pub fn reflection(theta: f64) -> CMatrix {
    let (c, s) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    real(&[c, s, s, -c], 2, 2)
}

fn controlled_on(control: &str, target: &str, u: &CMatrix) -> Result<Isometry> {
    let id = Isometry::identity(&[(target.to_string(), 2)])?;
    let on = Isometry::new([(target, 2)], [(target, 2)], u.clone(), 1e-12)?;
    Isometry::controlled(control, &[id, on])
}

/// The protocol for `r`: `4r` messages (the last one the answer) and a
/// final empty round for Alice. Registers: inputs `X`, `Y`; message qubit
/// `C`; outputs `O_A`, `O_B`.
pub fn build_and_protocol(params: AndParams) -> Result<ProtocolSpec> {
    let theta = params.theta();
    let uv = reflection(theta);
    let z = real(&[1.0, 0.0, 0.0, -1.0], 2, 2);
    let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());

    // |x> -> |x> (U_v)^x |0>_C
    let start = Isometry::new(
        [("X", 2)],
        [("X", 2), ("C", 2)],
        real(&[1.0, 0.0, 0.0, 0.0, 0.0, c2, 0.0, s2], 4, 2),
        1e-12,
    )?;
    let alice_step = controlled_on("X", "C", &uv)?;
    let bob_step = controlled_on("Y", "C", &z)?;

    let n = params.ping_pongs();
    let mut rounds = Vec::with_capacity(n + 2);
    rounds.push(Round::new(vec![start], vec!["C".into()]));
    for i in 2..=n {
        let op = if i % 2 == 0 { bob_step.clone() } else { alice_step.clone() };
        rounds.push(Round::new(vec![op], vec!["C".into()]));
    }
    rounds.push(Round::new(
        vec![
            bob_step,
            Isometry::copy("C", "O_B", 2)?,
            Isometry::copy("O_B", "O_A", 2)?,
        ],
        vec!["O_A".into()],
    ));
    rounds.push(Round::empty());

    Ok(ProtocolSpec {
        x_size: 2,
        y_size: 2,
        prestate: PureState::trivial(),
        rounds,
        roles: Roles {
            alice_inputs: vec![("X".into(), 2)],
            bob_inputs: vec![("Y".into(), 2)],
            alice_outputs: vec!["O_A".into()],
            bob_outputs: vec!["O_B".into()],
            ..Roles::default()
        },
    })
}

/// `((1-w)/3, (1-w)/3, (1-w)/3, w)` over `(0,0), (0,1), (1,0), (1,1)`.
pub fn and_prior(w: f64) -> Result<InputDistribution> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidProbability(w));
    }
    let a = (1.0 - w) / 3.0;
    InputDistribution::new(2, 2, vec![a, a, a, w], 1e-12)
}

/// Angle of `C` after message `i` on input `(1, 1)`: `(i + 1) theta` after
/// Alice's odd rounds, `-i theta` after Bob's even rounds.
pub fn and_angle_11(params: AndParams, i: usize) -> f64 {
    let t = params.theta();
    if i % 2 == 1 {
        (i as f64 + 1.0) * t
    } else {
        -(i as f64) * t
    }
}

/// Angle of `C` after message `i` on input `(1, 0)`: `2 theta` at
/// `i = 1, 2 mod 4`, else `0`.
pub fn and_angle_10(params: AndParams, i: usize) -> f64 {
    if matches!(i % 4, 1 | 2) {
        2.0 * params.theta()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum YBranch {
    Zero,
    One,
}

/// Closed-form entropy of `C` conditioned on Bob's input after message `i`
/// under the prior with mass `w` on `(1, 1)`.
///
/// `Y = 0`: the equal mixture of `|0>` and the `(1,0)` state, which has
/// entropy `H(sin^2 theta)` when `i = 1, 2 mod 4` and `0` otherwise
/// (independent of `w`). `Y = 1`, odd `i` only:
/// `H((1 - sqrt(1 - 12 w (1-w) sin^2((i+1) theta) / (1+2w)^2)) / 2)`.
pub fn and_round_entropy(i: usize, params: AndParams, w: f64, branch: YBranch) -> Result<f64> {
    if !(0.0..=0.5).contains(&w) {
        return Err(Error::InvalidArgument(format!("w = {w} outside [0, 1/2]")));
    }
    if i == 0 || i > params.ping_pongs() {
        return Err(Error::InvalidArgument(format!("message index {i} out of range")));
    }
    let t = params.theta();
    match branch {
        YBranch::Zero => {
            if matches!(i % 4, 1 | 2) {
                binary_entropy(t.sin().powi(2))
            } else {
                Ok(0.0)
            }
        }
        YBranch::One => {
            if i % 2 == 0 {
                return Err(Error::InvalidArgument(
                    "the Y = 1 closed form holds for odd message indices".into(),
                ));
            }
            let s2 = ((i as f64 + 1.0) * t).sin().powi(2);
            let inner = 1.0 - 12.0 * w * (1.0 - w) * s2 / (1.0 + 2.0 * w).powi(2);
            binary_entropy((1.0 - inner.max(0.0).sqrt()) / 2.0)
        }
    }
}

/// Engine-computed `H(C | Y = y)` after each of the first `4r - 1`
/// messages of the protocol run on `mu` (entry `i - 1` for message `i`).
/// Entries are `None` when `Y = y` has zero mass.
pub fn engine_branch_entropies(
    params: AndParams,
    mu: &InputDistribution,
    y: usize,
    cfg: &Config,
) -> Result<Vec<Option<f64>>> {
    let p = build_and_protocol(params)?;
    let t = run(&p, mu, cfg)?;
    t.snapshots
        .iter()
        .take(params.ping_pongs())
        .map(|snap| match classical_branch(&snap.state, "Y", y)? {
            (_, Some(branch)) => entropy(&branch, &["C"], cfg).map(Some),
            (_, None) => Ok(None),
        })
        .collect()
}

/// Amplitudes `(<0|C>, <1|C>)` of the message qubit after each of the first
/// `4r` messages on the point input `(x, y)`; the `4r`-th entry reads `C`
/// after Bob's last phase step, before the answer is copied out.
pub fn engine_trajectory(params: AndParams, x: usize, y: usize, cfg: &Config) -> Result<Vec<[Complex64; 2]>> {
    let p = build_and_protocol(params)?;
    let t = run(&p, &InputDistribution::point_mass(2, 2, x, y)?, cfg)?;
    t.snapshots
        .iter()
        .take(4 * params.r)
        .map(|snap| {
            let st = &snap.state;
            let pos = st.layout().position("C").expect("C is live through message 4r");
            let stride: usize = st.layout().dims()[pos + 1..].iter().product();
            // every register other than C sits in a basis state; the answer
            // copies in round 4r are read off the same branch
            let mut amp = [Complex64::new(0.0, 0.0); 2];
            for (i, z) in st.amplitudes().iter().enumerate() {
                amp[(i / stride) % 2] += *z;
            }
            Ok(amp)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::qcc;

    #[test]
    fn reflection_maps_zero_and_one() {
        let t = PI / 8.0;
        let u = reflection(t);
        assert!((u[(0, 0)].re - (2.0 * t).cos()).abs() < 1e-15);
        assert!((u[(1, 0)].re - (2.0 * t).sin()).abs() < 1e-15);
        assert!((u[(0, 1)].re - (2.0 * t).sin()).abs() < 1e-15);
        assert!((u[(1, 1)].re + (2.0 * t).cos()).abs() < 1e-15);
    }

    #[test]
    fn shape_and_cost() {
        for r in 1..=3 {
            let p = build_and_protocol(AndParams::new(r).unwrap()).unwrap();
            assert_eq!(p.rounds.len(), 4 * r + 1);
            assert!((qcc(&p).unwrap() - 4.0 * r as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn y_zero_branch_pattern() {
        let p = AndParams::new(2).unwrap();
        let h = binary_entropy(p.theta().sin().powi(2)).unwrap();
        assert_eq!(and_round_entropy(1, p, 0.0, YBranch::Zero).unwrap(), h);
        assert_eq!(and_round_entropy(3, p, 0.0, YBranch::Zero).unwrap(), 0.0);
        assert_eq!(and_round_entropy(5, p, 0.0, YBranch::Zero).unwrap(), h);
        assert_eq!(and_round_entropy(7, p, 0.0, YBranch::One).unwrap(), 0.0);
        assert!(and_round_entropy(2, p, 0.1, YBranch::One).is_err());
    }

    #[test]
    fn y_one_branch_lower_bound() {
        // when sin^2((i+1) theta) >= 4/5 and w <= 1/6 the eigenvalue is at
        // least 2w / (1 + 2w)
        let p = AndParams::new(4).unwrap();
        for i in (1..p.ping_pongs()).step_by(2) {
            let s2 = ((i as f64 + 1.0) * p.theta()).sin().powi(2);
            if s2 < 0.8 {
                continue;
            }
            for w in [0.01, 0.05, 0.1, 1.0 / 6.0] {
                let lo = binary_entropy(2.0 * w / (1.0 + 2.0 * w)).unwrap();
                assert!(and_round_entropy(i, p, w, YBranch::One).unwrap() >= lo - 1e-12);
            }
        }
    }
}
