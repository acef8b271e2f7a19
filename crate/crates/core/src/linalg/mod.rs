//! Dense complex linear algebra over labeled multipartite registers.
//!
//! A [`RegisterLayout`] fixes an ordered list of named subsystems. The
//! computational-basis index of a global state is row-major in that order,
//! with the first label most significant: for labels `A` (dim 2) and `B`
//! (dim 3) the basis vector `|a>|b>` sits at index `3 * a + b`.

mod eig;
mod isometry;
mod layout;
mod state;

pub use eig::{eig_hermitian, eigenvalues_hermitian, HermitianEigen};
pub use isometry::{apply_isometry, Isometry};
pub use layout::{compose, digits, LabelSet, RegisterLayout};
pub use state::{
    partial_trace, purify, tensor, trace_distance, DensityOperator, PureState, StateRef,
};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Numerical tolerances and the dense-simulation size cap.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Config {
    pub tol_norm: f64,
    pub tol_herm: f64,
    pub tol_psd: f64,
    pub tol_iso: f64,
    /// Largest matrix side any reduced density operator may have.
    pub dim_cap: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tol_norm: 1e-9,
            tol_herm: 1e-9,
            tol_psd: 1e-9,
            tol_iso: 1e-9,
            dim_cap: 4096,
        }
    }
}

impl Config {
    pub(crate) fn check_side(&self, side: usize) -> crate::Result<()> {
        if side > self.dim_cap {
            Err(crate::Error::DimCapExceeded {
                side,
                cap: self.dim_cap,
            })
        } else {
            Ok(())
        }
    }
}

/// Maximum entrywise deviation of `m` from its conjugate transpose.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
