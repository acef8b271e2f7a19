use num_complex::Complex64;

use super::layout::RegisterLayout;
use super::state::{DensityOperator, PureState};
use super::{CMatrix, Config, ONE, ZERO};
use crate::{Error, Result};

/// A linear map `V` from the registers `inputs` to the registers `outputs`
/// with `V^dag V = I`. The matrix has shape `(out_dim, in_dim)`; both sides
/// use the row-major, first-label-most-significant basis convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    inputs: Vec<(String, usize)>,
    outputs: Vec<(String, usize)>,
    matrix: CMatrix,
}

fn regs<S: Into<String>>(r: impl IntoIterator<Item = (S, usize)>) -> Result<Vec<(String, usize)>> {
    let layout = RegisterLayout::new(r)?;
    Ok(layout.iter().map(|(l, d)| (l.to_string(), d)).collect())
}

fn dim(r: &[(String, usize)]) -> usize {
    r.iter().map(|(_, d)| d).product()
}

impl Isometry {
    /// Checks shape and `V^dag V = I` within `tol_iso`.
    pub fn new<S: Into<String>, T: Into<String>>(
        inputs: impl IntoIterator<Item = (S, usize)>,
        outputs: impl IntoIterator<Item = (T, usize)>,
        matrix: CMatrix,
        tol_iso: f64,
    ) -> Result<Self> {
        let v = Self {
            inputs: regs(inputs)?,
            outputs: regs(outputs)?,
            matrix,
        };
        v.validate(tol_iso)?;
        Ok(v)
    }

    /// Builds the matrix column by column: `column(i)` is `V|i>`.
    pub fn from_columns<S: Into<String>, T: Into<String>>(
        inputs: impl IntoIterator<Item = (S, usize)>,
        outputs: impl IntoIterator<Item = (T, usize)>,
        column: impl Fn(usize) -> Vec<Complex64>,
        tol_iso: f64,
    ) -> Result<Self> {
        let inputs = regs(inputs)?;
        let outputs = regs(outputs)?;
        let (di, dout) = (dim(&inputs), dim(&outputs));
        let mut m = CMatrix::zeros(dout, di);
        for i in 0..di {
            let col = column(i);
            if col.len() != dout {
                return Err(Error::Signature(format!(
                    "column {i} has length {}, expected {dout}",
                    col.len()
                )));
            }
            for (o, z) in col.into_iter().enumerate() {
                m[(o, i)] = z;
            }
        }
        Self::new(inputs, outputs, m, tol_iso)
    }

    /// Classical reversible-on-its-image map `|i> -> |f(i)>`; `f` must be
    /// injective for the result to be an isometry.
    pub fn from_injection<S: Into<String>, T: Into<String>>(
        inputs: impl IntoIterator<Item = (S, usize)>,
        outputs: impl IntoIterator<Item = (T, usize)>,
        f: impl Fn(usize) -> usize,
    ) -> Result<Self> {
        let inputs = regs(inputs)?;
        let outputs = regs(outputs)?;
        let dout = dim(&outputs);
        Self::from_columns(
            inputs,
            outputs,
            |i| {
                let mut c = vec![ZERO; dout];
                if let Some(slot) = c.get_mut(f(i)) {
                    *slot = ONE;
                }
                c
            },
            1e-12,
        )
    }

    /// Identity on `labels`.
    pub fn identity(labels: &[(String, usize)]) -> Result<Self> {
        Self::from_injection(labels.to_vec(), labels.to_vec(), |i| i)
    }

    /// Maps `|i>` to `|i>` padded with zeros: the first `in_dim` output
    /// basis vectors.
    pub fn embedding(inputs: &[(String, usize)], outputs: &[(String, usize)]) -> Result<Self> {
        if dim(outputs) < dim(inputs) {
            return Err(Error::Signature("embedding into a smaller space".into()));
        }
        Self::from_injection(inputs.to_vec(), outputs.to_vec(), |i| i)
    }

    /// Coherent copy `|b> -> |b>|b>` of a computational-basis register into
    /// a fresh register of the same dimension.
    pub fn copy(label: &str, copy_label: &str, d: usize) -> Result<Self> {
        Self::from_injection([(label, d)], [(label, d), (copy_label, d)], |b| b * d + b)
    }

    /// Prepares a fresh register in `|index>`.
    pub fn prepare(label: &str, d: usize, index: usize) -> Result<Self> {
        Self::from_injection(Vec::<(String, usize)>::new(), [(label, d)], |_| index)
    }

    /// Block-controlled isometry: with the control register in `|k>`,
    /// `branches[k]` acts on the targets. The control is kept and comes
    /// first in both signatures. All branches must share one signature.
    pub fn controlled(control: &str, branches: &[Isometry]) -> Result<Self> {
        let first = branches
            .first()
            .ok_or_else(|| Error::Signature("no branches".into()))?;
        for b in branches {
            if b.inputs != first.inputs || b.outputs != first.outputs {
                return Err(Error::Signature(
                    "controlled branches differ in signature".into(),
                ));
            }
        }
        let k = branches.len();
        let (di, dout) = (first.in_dim(), first.out_dim());
        let mut m = CMatrix::zeros(k * dout, k * di);
        for (c, b) in branches.iter().enumerate() {
            m.view_mut((c * dout, c * di), (dout, di)).copy_from(&b.matrix);
        }
        let mut inputs = vec![(control.to_string(), k)];
        inputs.extend(first.inputs.iter().cloned());
        let mut outputs = vec![(control.to_string(), k)];
        outputs.extend(first.outputs.iter().cloned());
        Self::new(inputs, outputs, m, 1e-9)
    }

    /// `self (x) other` acting on the concatenated registers.
    pub fn tensor(&self, other: &Isometry) -> Result<Self> {
        let inputs = regs(self.inputs.iter().chain(&other.inputs).cloned())?;
        let outputs = regs(self.outputs.iter().chain(&other.outputs).cloned())?;
        Ok(Self {
            inputs,
            outputs,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    pub fn relabeled(&self, rename: impl Fn(&str) -> String) -> Self {
        Self {
            inputs: self.inputs.iter().map(|(l, d)| (rename(l), *d)).collect(),
            outputs: self.outputs.iter().map(|(l, d)| (rename(l), *d)).collect(),
            matrix: self.matrix.clone(),
        }
    }

    pub fn inputs(&self) -> &[(String, usize)] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[(String, usize)] {
        &self.outputs
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn in_dim(&self) -> usize {
        dim(&self.inputs)
    }

    pub fn out_dim(&self) -> usize {
        dim(&self.outputs)
    }

    /// Max entry of `|V^dag V - I|`.
    pub fn isometry_defect(&self) -> f64 {
        let g = self.matrix.adjoint() * &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((g[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub fn validate(&self, tol_iso: f64) -> Result<()> {
        let (di, dout) = (self.in_dim(), self.out_dim());
        if self.matrix.nrows() != dout || self.matrix.ncols() != di {
            return Err(Error::Signature(format!(
                "matrix is {}x{}, signature needs {dout}x{di}",
                self.matrix.nrows(),
                self.matrix.ncols()
            )));
        }
        if dout < di {
            return Err(Error::Signature(format!(
                "output dimension {dout} smaller than input dimension {di}"
            )));
        }
        let defect = self.isometry_defect();
        if defect > tol_iso {
            return Err(Error::NotIsometry(defect));
        }
        Ok(())
    }
}

struct Plan {
    in_pos: Vec<usize>,
    new_layout: RegisterLayout,
    suffix_dim: usize,
}

fn plan(layout: &RegisterLayout, v: &Isometry) -> Result<Plan> {
    let in_labels: Vec<&str> = v.inputs.iter().map(|(l, _)| l.as_str()).collect();
    let in_pos = layout.positions(&in_labels)?;
    for ((label, d), &p) in v.inputs.iter().zip(&in_pos) {
        if layout.dims()[p] != *d {
            return Err(Error::DimensionMismatch {
                label: label.clone(),
                expected: *d,
                found: layout.dims()[p],
            });
        }
    }
    let rest: Vec<(String, usize)> = layout
        .iter()
        .enumerate()
        .filter(|(p, _)| !in_pos.contains(p))
        .map(|(_, (l, d))| (l.to_string(), d))
        .collect();
    for (label, _) in &v.outputs {
        if rest.iter().any(|(l, _)| l == label) {
            return Err(Error::Signature(format!(
                "output register `{label}` collides with an untouched register"
            )));
        }
    }
    let insert_at = match in_pos.iter().min() {
        Some(&first) => (0..first).filter(|p| !in_pos.contains(p)).count(),
        None => rest.len(),
    };
    let suffix_dim = rest[insert_at..].iter().map(|(_, d)| d).product();
    let new_layout = RegisterLayout::new(
        rest[..insert_at]
            .iter()
            .cloned()
            .chain(v.outputs.iter().cloned())
            .chain(rest[insert_at..].iter().cloned()),
    )?;
    Ok(Plan {
        in_pos,
        new_layout,
        suffix_dim,
    })
}

/// Applies `v` to the registers it names, identity elsewhere. The output
/// registers take the place of the first consumed register in the layout
/// (or are appended when `v` consumes nothing).
pub fn apply_isometry(state: &PureState, v: &Isometry, cfg: &Config) -> Result<PureState> {
    v.validate(cfg.tol_iso)?;
    let layout = state.layout();
    let p = plan(layout, v)?;
    let (gi, ri, in_dim, rest_dim) = layout.split_indices(&p.in_pos);

    let mut psi = CMatrix::zeros(in_dim, rest_dim);
    for (idx, z) in state.amplitudes().iter().enumerate() {
        psi[(gi[idx], ri[idx])] = *z;
    }
    let phi = &v.matrix * psi;
    let out_dim = v.out_dim();
    let mut amps = vec![ZERO; out_dim * rest_dim];
    for r in 0..rest_dim {
        let (pre, suf) = (r / p.suffix_dim, r % p.suffix_dim);
        for o in 0..out_dim {
            amps[(pre * out_dim + o) * p.suffix_dim + suf] = phi[(o, r)];
        }
    }
    let out = PureState::unchecked(p.new_layout, amps)?;
    let n = out.norm();
    if (n - 1.0).abs() > cfg.tol_norm.max(1e-9) && (state.norm() - 1.0).abs() <= cfg.tol_norm {
        return Err(Error::NotNormalized(n));
    }
    Ok(out)
}

impl DensityOperator {
    /// `V rho V^dag` with the same register placement rule as
    /// [`apply_isometry`].
    pub fn apply_isometry(&self, v: &Isometry, cfg: &Config) -> Result<DensityOperator> {
        v.validate(cfg.tol_iso)?;
        let layout = self.layout();
        let p = plan(layout, v)?;
        let (gi, ri, _, rest_dim) = layout.split_indices(&p.in_pos);
        let out_dim = v.out_dim();
        let new_dim = out_dim * rest_dim;
        cfg.check_side(new_dim)?;
        let mut k = CMatrix::zeros(new_dim, layout.total_dim());
        for old in 0..layout.total_dim() {
            let (i, r) = (gi[old], ri[old]);
            let (pre, suf) = (r / p.suffix_dim, r % p.suffix_dim);
            for o in 0..out_dim {
                k[((pre * out_dim + o) * p.suffix_dim + suf, old)] = v.matrix[(o, i)];
            }
        }
        let m = &k * self.matrix() * k.adjoint();
        Ok(DensityOperator::unchecked(p.new_layout, m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace, tensor};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn reflection(theta: f64) -> Isometry {
        // reflection about cos(theta)|0> + sin(theta)|1>
        let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());
        Isometry::new(
            [("C", 2)],
            [("C", 2)],
            CMatrix::from_row_slice(2, 2, &[c(c2), c(s2), c(s2), c(-c2)]),
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn identity_is_noop() {
        let l = RegisterLayout::new([("A", 2), ("B", 3)]).unwrap();
        let s = PureState::normalized(l, (0..6).map(|i| Complex64::new(i as f64, 1.0)).collect())
            .unwrap();
        let id = Isometry::identity(&[("B".into(), 3)]).unwrap();
        assert_eq!(apply_isometry(&s, &id, &Config::default()).unwrap(), s);
        let id = Isometry::identity(&[("A".into(), 2)]).unwrap();
        assert_eq!(apply_isometry(&s, &id, &Config::default()).unwrap(), s);
    }

    #[test]
    fn reflection_rotates_zero() {
        let theta = std::f64::consts::PI / 8.0;
        let s = PureState::basis(RegisterLayout::new([("C", 2)]).unwrap(), 0).unwrap();
        let out = apply_isometry(&s, &reflection(theta), &Config::default()).unwrap();
        let h = (std::f64::consts::PI / 4.0).cos();
        assert!((out.amplitudes()[0] - c(h)).norm() < 1e-12);
        assert!((out.amplitudes()[1] - c(h)).norm() < 1e-12);
    }

    #[test]
    fn copy_makes_bell_pair() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = PureState::new(RegisterLayout::new([("B", 2)]).unwrap(), vec![c(h), c(h)]).unwrap();
        let out = apply_isometry(&s, &Isometry::copy("B", "B'", 2).unwrap(), &Config::default())
            .unwrap();
        assert_eq!(out.layout().labels(), ["B", "B'"]);
        let expect = [h, 0.0, 0.0, h];
        for (z, e) in out.amplitudes().iter().zip(expect) {
            assert!((z - c(e)).norm() < 1e-12);
        }
    }

    #[test]
    fn acts_on_non_leading_register() {
        // X on the middle register of |0>|0>|1>
        let x = Isometry::from_injection([("B", 2)], [("B", 2)], |i| 1 - i).unwrap();
        let l = RegisterLayout::new([("A", 2), ("B", 2), ("C", 2)]).unwrap();
        let s = PureState::basis(l, 1).unwrap();
        let out = apply_isometry(&s, &x, &Config::default()).unwrap();
        assert_eq!(out.amplitudes()[3], c(1.0));
    }

    #[test]
    fn registers_addressed_out_of_layout_order() {
        // swap-like map written with inputs in reverse layout order
        let l = RegisterLayout::new([("A", 2), ("B", 3)]).unwrap();
        let s = PureState::basis(l, 1 * 3 + 2).unwrap(); // A=1, B=2
        let v = Isometry::from_injection([("B", 3), ("A", 2)], [("B", 3), ("A", 2)], |i| i)
            .unwrap();
        let out = apply_isometry(&s, &v, &Config::default()).unwrap();
        assert_eq!(out.layout().labels(), ["B", "A"]);
        assert_eq!(out.amplitudes()[2 * 2 + 1], c(1.0));
    }

    #[test]
    fn signature_errors() {
        let s = PureState::basis(RegisterLayout::new([("A", 2), ("B", 2)]).unwrap(), 0).unwrap();
        let wrong_dim = Isometry::identity(&[("A".into(), 3)]).unwrap();
        assert!(matches!(
            apply_isometry(&s, &wrong_dim, &Config::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        let clash = Isometry::copy("A", "B", 2).unwrap();
        assert!(matches!(
            apply_isometry(&s, &clash, &Config::default()),
            Err(Error::Signature(_))
        ));
        let not_iso = Isometry {
            inputs: vec![("A".into(), 2)],
            outputs: vec![("A".into(), 2)],
            matrix: CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]),
        };
        assert!(matches!(
            apply_isometry(&s, &not_iso, &Config::default()),
            Err(Error::NotIsometry(_))
        ));
    }

    #[test]
    fn density_route_matches_pure_route() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = PureState::new(RegisterLayout::new([("A", 2)]).unwrap(), vec![c(h), c(h)]).unwrap();
        let b = PureState::basis(RegisterLayout::new([("B", 2)]).unwrap(), 1).unwrap();
        let s = tensor(&a, &b).unwrap();
        let v = Isometry::copy("A", "A2", 2).unwrap();
        let cfg = Config::default();
        let pure = apply_isometry(&s, &v, &cfg).unwrap().to_density();
        let mixed = s.to_density().apply_isometry(&v, &cfg).unwrap();
        assert_eq!(pure.layout(), mixed.layout());
        assert!((pure.matrix() - mixed.matrix()).iter().all(|z| z.norm() < 1e-12));
        let r = partial_trace(&mixed, &["A2"], &cfg).unwrap();
        assert!((r.matrix()[(0, 0)].re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn controlled_and_tensor() {
        let x = Isometry::from_injection([("T", 2)], [("T", 2)], |i| 1 - i).unwrap();
        let id = Isometry::identity(&[("T".into(), 2)]).unwrap();
        let cx = Isometry::controlled("S", &[id, x.clone()]).unwrap();
        assert_eq!(cx.in_dim(), 4);
        // |S=1, T=0> -> |1, 1>
        assert_eq!(cx.matrix()[(3, 2)], c(1.0));
        let xx = x.tensor(&x.relabeled(|_| "U".into())).unwrap();
        assert_eq!(xx.matrix()[(3, 0)], c(1.0));
    }
}
