use std::collections::HashSet;

use crate::{Error, Result};

/// A borrowed list of register labels.
pub type LabelSet<'a> = &'a [&'a str];

/// Ordered, labeled finite-dimensional subsystems.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RegisterLayout {
    labels: Vec<String>,
    dims: Vec<usize>,
}

impl RegisterLayout {
    pub fn new<S: Into<String>>(regs: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let mut labels = Vec::new();
        let mut dims = Vec::new();
        let mut seen = HashSet::new();
        for (label, dim) in regs {
            let label = label.into();
            if dim == 0 {
                return Err(Error::ZeroDimension { label, dim });
            }
            if !seen.insert(label.clone()) {
                return Err(Error::LabelCollision(label));
            }
            labels.push(label);
            dims.push(dim);
        }
        Ok(Self { labels, dims })
    }

    /// The layout with no registers; its total dimension is 1.
    pub fn empty() -> Self {
        Self {
            labels: Vec::new(),
            dims: Vec::new(),
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|p| self.dims[p])
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.labels
            .iter()
            .map(String::as_str)
            .zip(self.dims.iter().copied())
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &RegisterLayout) -> Result<Self> {
        Self::new(self.iter().chain(other.iter()))
    }

    /// Positions of `labels` in this layout, in the order given.
    pub fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut seen = HashSet::new();
        labels
            .iter()
            .map(|l| {
                if !seen.insert(*l) {
                    return Err(Error::LabelCollision(l.to_string()));
                }
                self.position(l)
                    .ok_or_else(|| Error::UnknownLabel(l.to_string()))
            })
            .collect()
    }

    /// Product of the dimensions of `labels`.
    pub fn dim_of_set(&self, labels: &[&str]) -> Result<usize> {
        Ok(self
            .positions(labels)?
            .into_iter()
            .map(|p| self.dims[p])
            .product())
    }

    /// Sub-layout of the given labels, kept in this layout's relative order.
    pub fn restrict(&self, labels: &[&str]) -> Result<Self> {
        let mut pos = self.positions(labels)?;
        pos.sort_unstable();
        Self::new(pos.into_iter().map(|p| (self.labels[p].clone(), self.dims[p])))
    }

    /// Labels not in `labels`, in layout order.
    pub fn complement(&self, labels: &[&str]) -> Vec<&str> {
        self.labels
            .iter()
            .map(String::as_str)
            .filter(|l| !labels.contains(l))
            .collect()
    }

    /// For every global basis index, the pair (index within `group`,
    /// index within the complement). `group` order defines the mixed-radix
    /// order of the first component; the complement keeps layout order.
    pub(crate) fn split_indices(&self, group: &[usize]) -> (Vec<usize>, Vec<usize>, usize, usize) {
        let n = self.labels.len();
        let mut in_group = vec![false; n];
        for &g in group {
            in_group[g] = true;
        }
        let rest: Vec<usize> = (0..n).filter(|p| !in_group[*p]).collect();

        // stride of each register inside its own group
        let mut local_stride = vec![0usize; n];
        let mut s = 1;
        for &g in group.iter().rev() {
            local_stride[g] = s;
            s *= self.dims[g];
        }
        let group_dim = s;
        let mut s = 1;
        for &r in rest.iter().rev() {
            local_stride[r] = s;
            s *= self.dims[r];
        }
        let rest_dim = s;

        let total = group_dim * rest_dim;
        let mut gi = vec![0usize; total];
        let mut ri = vec![0usize; total];
        let mut digits = vec![0usize; n];
        let (mut g_acc, mut r_acc) = (0usize, 0usize);
        for idx in 0..total {
            gi[idx] = g_acc;
            ri[idx] = r_acc;
            // increment mixed-radix counter, last register fastest
            for p in (0..n).rev() {
                digits[p] += 1;
                let (acc, stride) = if in_group[p] {
                    (&mut g_acc, local_stride[p])
                } else {
                    (&mut r_acc, local_stride[p])
                };
                if digits[p] < self.dims[p] {
                    *acc += stride;
                    break;
                }
                *acc -= stride * (self.dims[p] - 1);
                digits[p] = 0;
            }
        }
        (gi, ri, group_dim, rest_dim)
    }
}

/// Decompose `index` into mixed-radix digits, first digit most significant.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

/// Inverse of [`digits`].
pub fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_and_zero() {
        assert_eq!(
            RegisterLayout::new([("A", 2), ("A", 3)]),
            Err(Error::LabelCollision("A".into()))
        );
        assert!(matches!(
            RegisterLayout::new([("A", 0)]),
            Err(Error::ZeroDimension { .. })
        ));
    }

    #[test]
    fn split_indices_matches_digit_arithmetic() {
        let l = RegisterLayout::new([("A", 2), ("B", 3), ("C", 2)]).unwrap();
        let (gi, ri, gd, rd) = l.split_indices(&[2, 0]);
        assert_eq!((gd, rd), (4, 3));
        for idx in 0..12 {
            let d = digits(idx, &[2, 3, 2]);
            assert_eq!(gi[idx], d[2] * 2 + d[0]);
            assert_eq!(ri[idx], d[1]);
        }
    }

    #[test]
    fn digits_roundtrip() {
        let dims = [3, 1, 4, 2];
        for i in 0..24 {
            assert_eq!(compose(&digits(i, &dims), &dims), i);
        }
    }
}
