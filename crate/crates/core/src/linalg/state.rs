use num_complex::Complex64;

use super::layout::RegisterLayout;
use super::{eig_hermitian, eigenvalues_hermitian, hermiticity_defect, CMatrix, Config, ZERO};
use crate::{Error, Result};

/// Unit vector over a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

/// Density operator over a register layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    layout: RegisterLayout,
    matrix: CMatrix,
}

/// Either kind of state, for operations that accept both.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a> {
    Pure(&'a PureState),
    Mixed(&'a DensityOperator),
}

impl<'a> From<&'a PureState> for StateRef<'a> {
    fn from(s: &'a PureState) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityOperator> for StateRef<'a> {
    fn from(s: &'a DensityOperator) -> Self {
        StateRef::Mixed(s)
    }
}

impl StateRef<'_> {
    pub fn layout(&self) -> &RegisterLayout {
        match self {
            StateRef::Pure(s) => s.layout(),
            StateRef::Mixed(s) => s.layout(),
        }
    }
}

impl PureState {
    /// Checks the length against the layout and the norm against `1e-9`.
    pub fn new(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        Self::new_with_tol(layout, amps, Config::default().tol_norm)
    }

    pub fn new_with_tol(layout: RegisterLayout, amps: Vec<Complex64>, tol_norm: f64) -> Result<Self> {
        let s = Self::unchecked(layout, amps)?;
        let n = s.norm();
        if (n - 1.0).abs() > tol_norm {
            return Err(Error::NotNormalized(n));
        }
        Ok(s)
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(layout: RegisterLayout, mut amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        amps.iter_mut().for_each(|z| *z /= n);
        Self::unchecked(layout, amps)
    }

    pub(crate) fn unchecked(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::LengthMismatch {
                expected: layout.total_dim(),
                found: amps.len(),
            });
        }
        Ok(Self { layout, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        let mut amps = vec![ZERO; layout.total_dim()];
        if index >= amps.len() {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range {}",
                amps.len()
            )));
        }
        amps[index] = super::ONE;
        Self::unchecked(layout, amps)
    }

    /// The one-dimensional state on the empty layout.
    pub fn trivial() -> Self {
        Self {
            layout: RegisterLayout::empty(),
            amps: vec![super::ONE],
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_parts(self) -> (RegisterLayout, Vec<Complex64>) {
        (self.layout, self.amps)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch("inner product".into()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Renames registers; `rename` is applied to every label.
    pub fn relabeled(&self, rename: impl Fn(&str) -> String) -> Result<Self> {
        let layout = RegisterLayout::new(self.layout.iter().map(|(l, d)| (rename(l), d)))?;
        Ok(Self {
            layout,
            amps: self.amps.clone(),
        })
    }

    pub fn to_density(&self) -> DensityOperator {
        let n = self.amps.len();
        let v = CMatrix::from_iterator(n, 1, self.amps.iter().copied());
        DensityOperator {
            layout: self.layout.clone(),
            matrix: &v * v.adjoint(),
        }
    }

    /// Permutes registers into the order given by `labels` (which must list
    /// every label exactly once).
    pub fn reordered(&self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.layout.len() {
            return Err(Error::InvalidArgument(
                "reorder must list every register".into(),
            ));
        }
        let pos = self.layout.positions(labels)?;
        let (gi, _, _, _) = self.layout.split_indices(&pos);
        let mut amps = vec![ZERO; self.amps.len()];
        for (idx, &z) in self.amps.iter().enumerate() {
            amps[gi[idx]] = z;
        }
        let layout = RegisterLayout::new(pos.iter().map(|&p| {
            (self.layout.labels()[p].clone(), self.layout.dims()[p])
        }))?;
        Ok(Self { layout, amps })
    }
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and unit trace against `cfg`.
    pub fn new(layout: RegisterLayout, matrix: CMatrix, cfg: &Config) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::LengthMismatch {
                expected: d,
                found: matrix.nrows(),
            });
        }
        let defect = hermiticity_defect(&matrix);
        if defect > cfg.tol_herm {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > cfg.tol_norm || tr.im.abs() > cfg.tol_norm {
            return Err(Error::BadTrace(tr.re));
        }
        let vals = eigenvalues_hermitian(&matrix, cfg.tol_herm)?;
        let min = vals.last().copied().unwrap_or(0.0);
        if min < -cfg.tol_psd {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { layout, matrix })
    }

    pub(crate) fn unchecked(layout: RegisterLayout, matrix: CMatrix) -> Self {
        Self { layout, matrix }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn side(&self) -> usize {
        self.matrix.nrows()
    }

    /// Diagonal in the computational basis.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.side()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// Eigenvalues, descending, with values in `[-tol_psd, 0)` clamped to 0.
    pub fn spectrum(&self, cfg: &Config) -> Result<Vec<f64>> {
        let vals = eigenvalues_hermitian(&self.matrix, cfg.tol_herm.max(1e-7))?;
        Ok(vals
            .into_iter()
            .map(|v| if v < 0.0 && v >= -cfg.tol_psd { 0.0 } else { v })
            .collect())
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Self {
            layout,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Convex combination `sum_k w_k rho_k` of states on the same layout.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?
            .1;
        let mut m = CMatrix::zeros(first.side(), first.side());
        for (w, rho) in parts {
            if rho.layout != first.layout {
                return Err(Error::LayoutMismatch("mixture components".into()));
            }
            m += rho.matrix.scale(*w);
        }
        Ok(Self {
            layout: first.layout.clone(),
            matrix: m,
        })
    }
}

/// Kronecker product; `a`'s labels come first.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    let layout = a.layout.concat(&b.layout)?;
    let mut amps = Vec::with_capacity(a.amps.len() * b.amps.len());
    for x in &a.amps {
        for y in &b.amps {
            amps.push(x * y);
        }
    }
    PureState::unchecked(layout, amps)
}

/// Reduced state on `keep`. The result lists the kept labels in their
/// original relative order.
pub fn partial_trace<'a>(
    state: impl Into<StateRef<'a>>,
    keep: &[&str],
    cfg: &Config,
) -> Result<DensityOperator> {
    let state = state.into();
    if keep.is_empty() {
        return Err(Error::EmptyLabelSet);
    }
    let layout = state.layout();
    let mut pos = layout.positions(keep)?;
    pos.sort_unstable();
    let side: usize = pos.iter().map(|&p| layout.dims()[p]).product();
    cfg.check_side(side)?;
    let sub = RegisterLayout::new(
        pos.iter()
            .map(|&p| (layout.labels()[p].clone(), layout.dims()[p])),
    )?;
    let (gi, ri, kd, rd) = layout.split_indices(&pos);

    let matrix = match state {
        StateRef::Pure(s) => {
            let mut m = CMatrix::zeros(kd, rd);
            for (idx, z) in s.amps.iter().enumerate() {
                m[(gi[idx], ri[idx])] = *z;
            }
            &m * m.adjoint()
        }
        StateRef::Mixed(s) => {
            // table[k * rd + r] = global index
            let mut table = vec![0usize; kd * rd];
            for idx in 0..gi.len() {
                table[gi[idx] * rd + ri[idx]] = idx;
            }
            CMatrix::from_fn(kd, kd, |k, k2| {
                (0..rd)
                    .map(|r| s.matrix[(table[k * rd + r], table[k2 * rd + r])])
                    .sum()
            })
        }
    };
    Ok(DensityOperator::unchecked(sub, matrix))
}

/// Canonical purification `sum_k sqrt(lambda_k) |k>|k>_R` built from the
/// eigendecomposition of `rho` (descending eigenvalues, fixed phase rule).
pub fn purify(rho: &DensityOperator, r_label: &str, cfg: &Config) -> Result<PureState> {
    let checked = DensityOperator::new(rho.layout.clone(), rho.matrix.clone(), cfg)?;
    let side = checked.side();
    let e = eig_hermitian(&checked.matrix, cfg.tol_herm)?;
    let r_layout = RegisterLayout::new([(r_label, side)])?;
    let layout = checked.layout.concat(&r_layout)?;
    let mut amps = vec![ZERO; side * side];
    for (k, &lam) in e.values.iter().enumerate() {
        let w = lam.max(0.0).sqrt();
        if w == 0.0 {
            continue;
        }
        for a in 0..side {
            amps[a * side + k] = e.vectors[(a, k)] * w;
        }
    }
    PureState::normalized(layout, amps)
}

/// `Tr|r1 - r2|`, in `[0, 2]` for states.
pub fn trace_distance(r1: &DensityOperator, r2: &DensityOperator, cfg: &Config) -> Result<f64> {
    if r1.layout != r2.layout {
        return Err(Error::LayoutMismatch(format!(
            "{:?} vs {:?}",
            r1.layout.labels(),
            r2.layout.labels()
        )));
    }
    let diff = &r1.matrix - &r2.matrix;
    let vals = eigenvalues_hermitian(&diff, cfg.tol_herm.max(1e-7))?;
    Ok(vals.iter().map(|v| v.abs()).sum())
}
