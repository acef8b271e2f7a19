//! Seeded random states, unitaries and isometries for property checks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{partial_trace, CMatrix, Config, DensityOperator, Isometry, PureState, RegisterLayout};
use crate::Result;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Normalized complex Gaussian vector (unitarily invariant).
pub fn random_pure<R: Rng + ?Sized>(layout: RegisterLayout, rng: &mut R) -> Result<PureState> {
    let amps = (0..layout.total_dim()).map(|_| gaussian(rng)).collect();
    PureState::normalized(layout, amps)
}

/// Reduced state of a random pure state on `layout` plus an environment
/// of dimension `env_dim`.
pub fn random_density<R: Rng + ?Sized>(
    layout: RegisterLayout,
    env_dim: usize,
    rng: &mut R,
    cfg: &Config,
) -> Result<DensityOperator> {
    let env = "__env";
    let full = layout.concat(&RegisterLayout::new([(env, env_dim)])?)?;
    let psi = random_pure(full, rng)?;
    let keep: Vec<&str> = layout.labels().iter().map(String::as_str).collect();
    partial_trace(&psi, &keep, cfg)
}

/// Haar unitary via QR of a Gaussian matrix with the diagonal phase fix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let (q, r) = g.qr().unpack();
    let mut q = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random isometry: the first `in_dim` columns of a Haar unitary on the
/// output space.
pub fn random_isometry<R: Rng + ?Sized>(
    inputs: &[(String, usize)],
    outputs: &[(String, usize)],
    rng: &mut R,
) -> Result<Isometry> {
    let di: usize = inputs.iter().map(|(_, d)| d).product();
    let dout: usize = outputs.iter().map(|(_, d)| d).product();
    if dout < di {
        return Err(crate::Error::Signature("output smaller than input".into()));
    }
    let u = random_unitary(dout, rng);
    let m = u.columns(0, di).into_owned();
    Isometry::new(inputs.to_vec(), outputs.to_vec(), m, 1e-9)
}
