use nalgebra::SymmetricEigen;

use super::{hermiticity_defect, CMatrix};
use crate::{Error, Result};

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted in descending order (stable, so exact ties keep
/// the solver's order). Each eigenvector is rescaled by a unit phase so that
/// its first entry of modulus above `1e-12` is real and positive.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, matching `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let mut d = CMatrix::zeros(n, n);
        for (i, &v) in self.values.iter().enumerate() {
            d[(i, i)] = v.into();
        }
        &self.vectors * d * self.vectors.adjoint()
    }
}

pub fn eig_hermitian(m: &CMatrix, tol_herm: f64) -> Result<HermitianEigen> {
    check_square_hermitian(m, tol_herm)?;
    let n = m.nrows();
    let sym = symmetrize(m);
    let se = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));

    let mut vectors = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        values.push(se.eigenvalues[src]);
        let v = se.eigenvectors.column(src);
        let phase = v
            .iter()
            .find(|z| z.norm() > 1e-12)
            .map(|z| z.conj() / z.norm())
            .unwrap_or(super::ONE);
        for row in 0..n {
            vectors[(row, col)] = v[row] * phase;
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, descending.
pub fn eigenvalues_hermitian(m: &CMatrix, tol_herm: f64) -> Result<Vec<f64>> {
    check_square_hermitian(m, tol_herm)?;
    let mut vals: Vec<f64> = symmetrize(m).symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

fn check_square_hermitian(m: &CMatrix, tol_herm: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidArgument(format!(
            "matrix is {}x{}, not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let defect = hermiticity_defect(m);
    if defect > tol_herm {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

// Average with the adjoint so the solver sees an exactly Hermitian input.
fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}
