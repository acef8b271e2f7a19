//! Entropic quantities in bits.

use crate::linalg::{partial_trace, Config, PureState, StateRef};
use crate::{Error, Result};

/// Shannon entropy of a spectrum, skipping zeros.
pub fn shannon(values: &[f64]) -> f64 {
    -values
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.log2())
        .sum::<f64>()
}

pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(shannon(&[p, 1.0 - p]))
}

/// von Neumann entropy of the reduced state on `labels`.
///
/// For a pure global state the smaller of `labels` and its complement is
/// traced down to, since both sides share one spectrum.
pub fn entropy<'a>(state: impl Into<StateRef<'a>>, labels: &[&str], cfg: &Config) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyLabelSet);
    }
    entropy_or_zero(state.into(), labels, cfg)
}

fn entropy_or_zero(state: StateRef<'_>, labels: &[&str], cfg: &Config) -> Result<f64> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    let layout = state.layout();
    let dim = layout.dim_of_set(labels)?;
    let keep: Vec<&str> = match state {
        StateRef::Pure(_) => {
            let rest = layout.complement(labels);
            if rest.is_empty() {
                return Ok(0.0);
            }
            if layout.total_dim() / dim < dim {
                rest
            } else {
                labels.to_vec()
            }
        }
        StateRef::Mixed(_) => labels.to_vec(),
    };
    let rho = partial_trace(state, &keep, cfg)?;
    Ok(shannon(&rho.spectrum(cfg)?))
}

fn check_disjoint(sets: &[&[&str]]) -> Result<()> {
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if let Some(l) = a.iter().find(|l| b.contains(l)) {
                return Err(Error::OverlappingLabels(l.to_string()));
            }
        }
    }
    Ok(())
}

fn union<'s>(a: &[&'s str], b: &[&'s str]) -> Vec<&'s str> {
    a.iter().chain(b).copied().collect()
}

/// `H(A|B) = H(AB) - H(B)`.
pub fn cond_entropy<'a>(
    state: impl Into<StateRef<'a>>,
    a: &[&str],
    b: &[&str],
    cfg: &Config,
) -> Result<f64> {
    let state = state.into();
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyLabelSet);
    }
    check_disjoint(&[a, b])?;
    Ok(entropy_or_zero(state, &union(a, b), cfg)? - entropy_or_zero(state, b, cfg)?)
}

/// `I(A;B|C) = H(AC) + H(BC) - H(ABC) - H(C)`; `c` may be empty.
pub fn cqmi<'a>(
    state: impl Into<StateRef<'a>>,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    cfg: &Config,
) -> Result<f64> {
    let state = state.into();
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyLabelSet);
    }
    check_disjoint(&[a, b, c])?;
    let ac = union(a, c);
    let bc = union(b, c);
    let abc = union(&ac, b);
    Ok(entropy_or_zero(state, &ac, cfg)? + entropy_or_zero(state, &bc, cfg)?
        - entropy_or_zero(state, &abc, cfg)?
        - entropy_or_zero(state, c, cfg)?)
}

pub fn mutual_information<'a>(
    state: impl Into<StateRef<'a>>,
    a: &[&str],
    b: &[&str],
    cfg: &Config,
) -> Result<f64> {
    cqmi(state, a, b, &[], cfg)
}

/// Projects `label` onto the basis vector `|value>` and renormalizes.
/// Returns the branch probability and, when it is positive, the branch
/// state (same layout).
pub fn classical_branch(
    state: &PureState,
    label: &str,
    value: usize,
) -> Result<(f64, Option<PureState>)> {
    let layout = state.layout();
    let pos = layout
        .position(label)
        .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
    let d = layout.dims()[pos];
    if value >= d {
        return Err(Error::InvalidArgument(format!(
            "value {value} out of range for `{label}` (dim {d})"
        )));
    }
    let stride: usize = layout.dims()[pos + 1..].iter().product();
    let amps: Vec<_> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, z)| {
            if (i / stride) % d == value {
                *z
            } else {
                crate::linalg::ZERO
            }
        })
        .collect();
    let p: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if p <= 0.0 {
        return Ok((0.0, None));
    }
    Ok((p, Some(PureState::normalized(layout.clone(), amps)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DensityOperator, RegisterLayout, CMatrix};
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn ab() -> RegisterLayout {
        RegisterLayout::new([("A", 2), ("B", 2)]).unwrap()
    }

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(ab(), vec![c(h), c(0.0), c(0.0), c(h)]).unwrap()
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        // -0.1 log2 0.1 - 0.9 log2 0.9
        assert!((binary_entropy(0.1).unwrap() - 0.468_995_593_589_281_2).abs() < 1e-12);
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn entropy_examples() {
        let cfg = Config::default();
        let zero = PureState::basis(RegisterLayout::new([("A", 2)]).unwrap(), 0).unwrap();
        assert_eq!(entropy(&zero, &["A"], &cfg).unwrap(), 0.0);
        assert!((entropy(&bell(), &["A"], &cfg).unwrap() - 1.0).abs() < 1e-12);
        assert!((entropy(&bell(), &["B"], &cfg).unwrap() - 1.0).abs() < 1e-12);

        let t = std::f64::consts::PI / 8.0;
        let (c2, s2) = ((2.0 * t).cos(), (2.0 * t).sin());
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5 + 0.5 * c2 * c2), c(0.5 * c2 * s2), c(0.5 * c2 * s2), c(0.5 * s2 * s2)],
        );
        let rho = DensityOperator::new(RegisterLayout::new([("C", 2)]).unwrap(), m, &cfg).unwrap();
        let h = entropy(&rho, &["C"], &cfg).unwrap();
        assert!((h - binary_entropy(t.sin().powi(2)).unwrap()).abs() < 1e-12);
        assert!((h - 0.600_876_036_692_856_2).abs() < 1e-9);
    }

    #[test]
    fn conditional_examples() {
        let cfg = Config::default();
        assert!((cond_entropy(&bell(), &["A"], &["B"], &cfg).unwrap() + 1.0).abs() < 1e-12);
        let cl = DensityOperator::new(
            ab(),
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.5), c(0.0), c(0.0), c(0.5)])),
            &cfg,
        )
        .unwrap();
        assert!(cond_entropy(&cl, &["A"], &["B"], &cfg).unwrap().abs() < 1e-12);
        assert!(matches!(
            cond_entropy(&bell(), &["A"], &["A"], &cfg),
            Err(Error::OverlappingLabels(_))
        ));
    }

    #[test]
    fn cqmi_examples() {
        let cfg = Config::default();
        assert!((mutual_information(&bell(), &["A"], &["B"], &cfg).unwrap() - 2.0).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0); 8];
        amps[0] = c(h);
        amps[7] = c(h);
        let ghz =
            PureState::new(RegisterLayout::new([("A", 2), ("B", 2), ("C", 2)]).unwrap(), amps)
                .unwrap();
        assert!((cqmi(&ghz, &["A"], &["B"], &["C"], &cfg).unwrap() - 1.0).abs() < 1e-12);
        let prod = PureState::basis(ab(), 3).unwrap();
        assert!(cqmi(&prod, &["A"], &["B"], &[], &cfg).unwrap().abs() < 1e-12);
    }

    #[test]
    fn branch_projection() {
        let (p, s) = classical_branch(&bell(), "A", 1).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert_eq!(s.unwrap().amplitudes()[3], c(1.0));
    }
}
