use num_complex::Complex64;
use rand::Rng;

use crate::engine::{ProtocolSpec, Roles, Round, TaskSpec};
use crate::linalg::{Isometry, PureState, RegisterLayout};
use crate::random::{random_isometry, random_pure};
use crate::{Error, Result};

fn function_of(task: &TaskSpec) -> Result<Vec<usize>> {
    if task.za_size != task.zb_size {
        return Err(Error::InvalidArgument("task is not a function: output alphabets differ".into()));
    }
    let z = task.za_size;
    let mut f = Vec::with_capacity(task.x_size * task.y_size);
    for x in 0..task.x_size {
        for y in 0..task.y_size {
            let v = (0..z)
                .find(|&v| task.is_allowed(x, y, v, v))
                .ok_or_else(|| Error::InvalidArgument(format!("no valid output for ({x}, {y})")))?;
            f.push(v);
        }
    }
    Ok(f)
}

/// Alice sends a coherent copy of `x`; Bob computes the answer, keeps it
/// and sends a copy back.
pub fn build_classical_exchange(task: &TaskSpec) -> Result<ProtocolSpec> {
    let f = function_of(task)?;
    let (xs, ys, zs) = (task.x_size, task.y_size, task.za_size);
    let send_x = Isometry::copy("X", "C", xs)?;
    let compute = Isometry::from_injection(
        [("C", xs), ("Y", ys)],
        [("C", xs), ("Y", ys), ("O_B", zs)],
        |i| i * zs + f[i],
    )?;
    let reply = Isometry::copy("O_B", "O_A", zs)?;
    Ok(ProtocolSpec {
        x_size: xs,
        y_size: ys,
        prestate: PureState::trivial(),
        rounds: vec![
            Round::new(vec![send_x], vec!["C".into()]),
            Round::new(vec![compute, reply], vec!["O_A".into()]),
            Round::empty(),
        ],
        roles: Roles {
            alice_inputs: vec![("X".into(), xs)],
            bob_inputs: vec![("Y".into(), ys)],
            alice_outputs: vec!["O_A".into()],
            bob_outputs: vec!["O_B".into()],
            ..Roles::default()
        },
    })
}

/// `rounds` messages, each a freshly prepared `|0>` of dimension `dim`.
pub fn build_dummy(rounds: usize, dim: usize, x_size: usize, y_size: usize) -> Result<ProtocolSpec> {
    if rounds == 0 || dim == 0 {
        return Err(Error::InvalidArgument("need at least one round and dim >= 1".into()));
    }
    let mut out = Vec::with_capacity(rounds + 1);
    for i in 1..=rounds {
        let label = format!("D{i}");
        out.push(Round::new(
            vec![Isometry::prepare(&label, dim, 0)?],
            vec![label],
        ));
    }
    out.push(Round::empty());
    Ok(ProtocolSpec {
        x_size,
        y_size,
        prestate: PureState::trivial(),
        rounds: out,
        roles: Roles {
            alice_inputs: vec![("X".into(), x_size)],
            bob_inputs: vec![("Y".into(), y_size)],
            ..Roles::default()
        },
    })
}

/// Both parties output `value` without communicating.
pub fn build_constant(value: usize, z_size: usize, x_size: usize, y_size: usize) -> Result<ProtocolSpec> {
    Ok(ProtocolSpec {
        x_size,
        y_size,
        prestate: PureState::trivial(),
        rounds: vec![
            Round::new(vec![Isometry::prepare("O_A", z_size, value)?], vec![]),
            Round::new(vec![Isometry::prepare("O_B", z_size, value)?], vec![]),
        ],
        roles: Roles {
            alice_inputs: vec![("X".into(), x_size)],
            bob_inputs: vec![("Y".into(), y_size)],
            alice_outputs: vec!["O_A".into()],
            bob_outputs: vec!["O_B".into()],
            ..Roles::default()
        },
    })
}

/// Both parties output the same uniformly random bit, read off a shared
/// maximally entangled pair.
pub fn build_random_bit(x_size: usize, y_size: usize) -> Result<ProtocolSpec> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let pair = PureState::new(
        RegisterLayout::new([("T_A", 2), ("T_B", 2)])?,
        vec![Complex64::new(h, 0.0), z, z, Complex64::new(h, 0.0)],
    )?;
    Ok(ProtocolSpec {
        x_size,
        y_size,
        prestate: pair,
        rounds: vec![Round::empty(), Round::empty()],
        roles: Roles {
            alice_inputs: vec![("X".into(), x_size)],
            bob_inputs: vec![("Y".into(), y_size)],
            alice_outputs: vec!["T_A".into()],
            bob_outputs: vec!["T_B".into()],
            alice_prestate: vec!["T_A".into()],
            bob_prestate: vec!["T_B".into()],
        },
    })
}

/// Shape of a random protocol; see [`random_protocol`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomShape {
    pub alice_inputs: Vec<usize>,
    pub bob_inputs: Vec<usize>,
    pub rounds: usize,
    pub message_dim: usize,
    /// Dimension of each party's share of a random entangled prestate
    /// (1 for none).
    pub entanglement_dim: usize,
}

impl RandomShape {
    /// Dimension of all registers the protocol ever holds, purifier aside.
    pub fn total_dim(&self) -> usize {
        let a: usize = self.alice_inputs.iter().product();
        let b: usize = self.bob_inputs.iter().product();
        a * b * self.message_dim * self.entanglement_dim * self.entanglement_dim
    }
}

/// A protocol whose every round applies a Haar-random unitary to all the
/// sender's registers together with the message register `C` (the first
/// round creates `C` through a random isometry). Input registers are
/// named `X{k}` / `Y{k}` and double as the parties' memory and outputs.
pub fn random_protocol<R: Rng + ?Sized>(shape: &RandomShape, rng: &mut R) -> Result<ProtocolSpec> {
    if shape.rounds == 0 || shape.message_dim == 0 || shape.entanglement_dim == 0 {
        return Err(Error::InvalidArgument("degenerate random protocol shape".into()));
    }
    let named = |prefix: &str, dims: &[usize]| -> Vec<(String, usize)> {
        dims.iter().enumerate().map(|(k, d)| (format!("{prefix}{k}"), *d)).collect()
    };
    let a_in = named("X", &shape.alice_inputs);
    let b_in = named("Y", &shape.bob_inputs);
    let te = shape.entanglement_dim;
    let (prestate, a_pre, b_pre) = if te > 1 {
        let layout = RegisterLayout::new([("T_A", te), ("T_B", te)])?;
        (random_pure(layout, rng)?, vec!["T_A".to_string()], vec!["T_B".to_string()])
    } else {
        (PureState::trivial(), vec![], vec![])
    };
    let mut a_mem = a_in.clone();
    a_mem.extend(a_pre.iter().map(|l| (l.clone(), te)));
    let mut b_mem = b_in.clone();
    b_mem.extend(b_pre.iter().map(|l| (l.clone(), te)));
    let c = ("C".to_string(), shape.message_dim);

    let mut rounds = Vec::with_capacity(shape.rounds + 1);
    for i in 1..=shape.rounds + 1 {
        let mem = if i % 2 == 1 { &a_mem } else { &b_mem };
        let mut with_c = mem.clone();
        with_c.push(c.clone());
        let ins = if i == 1 { mem.clone() } else { with_c.clone() };
        let op = random_isometry(&ins, &with_c, rng)?;
        let message = if i <= shape.rounds { vec!["C".to_string()] } else { vec![] };
        rounds.push(Round::new(vec![op], message));
    }
    Ok(ProtocolSpec {
        x_size: shape.alice_inputs.iter().product(),
        y_size: shape.bob_inputs.iter().product(),
        prestate,
        rounds,
        roles: Roles {
            alice_inputs: a_in.clone(),
            bob_inputs: b_in.clone(),
            alice_outputs: a_in.into_iter().map(|(l, _)| l).collect(),
            bob_outputs: b_in.into_iter().map(|(l, _)| l).collect(),
            alice_prestate: a_pre,
            bob_prestate: b_pre,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{qcc, report, worst_case_error};
    use crate::linalg::Config;
    use crate::InputDistribution;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn classical_exchange_and() {
        let cfg = Config::default();
        let p = build_classical_exchange(&TaskSpec::and()).unwrap();
        assert!((qcc(&p).unwrap() - 2.0).abs() < 1e-12);
        assert!(worst_case_error(&p, &TaskSpec::and(), &cfg).unwrap() < 1e-12);
        let rep = report(&p, &InputDistribution::uniform(2, 2).unwrap(), None, &cfg).unwrap();
        assert!((rep.per_round[0].cqmi_contribution - 0.5).abs() < 1e-9);
        // answer round: I(Z; R | X) = H(Z | X) = 1/2 under uniform inputs
        assert!((rep.per_round[1].cqmi_contribution - 0.25).abs() < 1e-9);
    }

    #[test]
    fn dummy_costs() {
        let cfg = Config::default();
        let p = build_dummy(4, 3, 2, 2).unwrap();
        assert!((qcc(&p).unwrap() - 4.0 * 3f64.log2()).abs() < 1e-12);
        let mu = InputDistribution::new(2, 2, vec![0.1, 0.2, 0.3, 0.4], 1e-12).unwrap();
        assert!(report(&p, &mu, None, &cfg).unwrap().qic_total.abs() < 1e-12);
    }

    #[test]
    fn constant_and_random_bit_errors() {
        let cfg = Config::default();
        let and = TaskSpec::and();
        let zero = build_constant(0, 2, 2, 2).unwrap();
        let at11 = InputDistribution::point_mass(2, 2, 1, 1).unwrap();
        assert_eq!(crate::engine::avg_error(&zero, &at11, &and, &cfg).unwrap(), 1.0);
        assert_eq!(worst_case_error(&zero, &and, &cfg).unwrap(), 1.0);
        let coin = build_random_bit(2, 2).unwrap();
        let mu = InputDistribution::new(2, 2, vec![0.1, 0.2, 0.3, 0.4], 1e-12).unwrap();
        let e = crate::engine::avg_error(&coin, &mu, &and, &cfg).unwrap();
        assert!((e - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_protocol_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let shape = RandomShape {
            alice_inputs: vec![2],
            bob_inputs: vec![2],
            rounds: 3,
            message_dim: 3,
            entanglement_dim: 2,
        };
        assert!(shape.total_dim() <= 64);
        let p = random_protocol(&shape, &mut rng).unwrap();
        p.validate(&Config::default()).unwrap();
        let rep = report(&p, &InputDistribution::uniform(2, 2).unwrap(), None, &Config::default()).unwrap();
        assert!(rep.qic_total >= -1e-9 && rep.qic_total <= rep.qcc + 1e-8);
    }
}
