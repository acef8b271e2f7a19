use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A probability table over `X x Y`, stored row-major (`x` major).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDistribution {
    x_size: usize,
    y_size: usize,
    probs: Vec<f64>,
}

impl InputDistribution {
    pub fn new(x_size: usize, y_size: usize, probs: Vec<f64>, tol_norm: f64) -> Result<Self> {
        if x_size == 0 || y_size == 0 {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if probs.len() != x_size * y_size {
            return Err(Error::LengthMismatch {
                expected: x_size * y_size,
                found: probs.len(),
            });
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {p} is negative or not finite")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tol_norm {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        Ok(Self {
            x_size,
            y_size,
            probs,
        })
    }

    /// From nested rows `table[x][y]`.
    pub fn from_rows(table: &[Vec<f64>], tol_norm: f64) -> Result<Self> {
        let x_size = table.len();
        let y_size = table.first().map_or(0, Vec::len);
        if table.iter().any(|row| row.len() != y_size) {
            return Err(Error::InvalidDistribution("ragged probability table".into()));
        }
        Self::new(x_size, y_size, table.concat(), tol_norm)
    }

    pub fn uniform(x_size: usize, y_size: usize) -> Result<Self> {
        let n = x_size * y_size;
        Self::new(x_size, y_size, vec![1.0 / n as f64; n], 1e-9)
    }

    pub fn point_mass(x_size: usize, y_size: usize, x: usize, y: usize) -> Result<Self> {
        if x >= x_size || y >= y_size {
            return Err(Error::InvalidArgument(format!("point ({x}, {y}) out of range")));
        }
        let mut probs = vec![0.0; x_size * y_size];
        probs[x * y_size + y] = 1.0;
        Self::new(x_size, y_size, probs, 0.0)
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.y_size + y]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.probs.chunks(self.y_size).map(<[f64]>::to_vec).collect()
    }

    /// Independent product; the combined index is `x1 * |X2| + x2` (same for y).
    pub fn product(&self, other: &Self) -> Self {
        let (xs, ys) = (self.x_size * other.x_size, self.y_size * other.y_size);
        let mut probs = vec![0.0; xs * ys];
        for x1 in 0..self.x_size {
            for y1 in 0..self.y_size {
                for x2 in 0..other.x_size {
                    for y2 in 0..other.y_size {
                        let x = x1 * other.x_size + x2;
                        let y = y1 * other.y_size + y2;
                        probs[x * ys + y] = self.prob(x1, y1) * other.prob(x2, y2);
                    }
                }
            }
        }
        Self {
            x_size: xs,
            y_size: ys,
            probs,
        }
    }

    /// `self^{(x) n}`.
    pub fn power(&self, n: usize) -> Self {
        let mut out = self.clone();
        for _ in 1..n {
            out = out.product(self);
        }
        out
    }

    /// `p * self + (1 - p) * other`.
    pub fn mix(&self, p: f64, other: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        self.check_same_shape(other)?;
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| p * a + (1.0 - p) * b)
            .collect();
        Ok(Self {
            probs,
            ..self.clone()
        })
    }

    /// Support points `(x, y, mu(x, y))` with positive mass, in index order.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, p)| (i / self.y_size, i % self.y_size, *p))
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if (self.x_size, self.y_size) != (other.x_size, other.y_size) {
            return Err(Error::InvalidDistribution(format!(
                "shapes {}x{} and {}x{} differ",
                self.x_size, self.y_size, other.x_size, other.y_size
            )));
        }
        Ok(())
    }

    fn from_weights(x_size: usize, y_size: usize, w: Vec<f64>) -> Option<Self> {
        let total: f64 = w.iter().sum();
        (total > 0.0).then(|| Self {
            x_size,
            y_size,
            probs: w.into_iter().map(|v| v / total).collect(),
        })
    }
}

/// Total-variation distance together with the common-part decomposition
/// `mu1 = (1 - delta) common + delta only1`, `mu2 = (1 - delta) common + delta only2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TvSplit {
    pub delta: f64,
    /// Normalized pointwise minimum; `None` when `delta = 1`.
    pub common: Option<InputDistribution>,
    /// Normalized excess of the first distribution; `None` when `delta = 0`.
    pub only1: Option<InputDistribution>,
    pub only2: Option<InputDistribution>,
}

pub fn tv_distance(
    mu1: &InputDistribution,
    mu2: &InputDistribution,
    tol_norm: f64,
) -> Result<TvSplit> {
    mu1.check_same_shape(mu2)?;
    for mu in [mu1, mu2] {
        let total: f64 = mu.probs.iter().sum();
        if (total - 1.0).abs() > tol_norm {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
    }
    let (xs, ys) = (mu1.x_size, mu1.y_size);
    let delta = 0.5
        * mu1
            .probs
            .iter()
            .zip(&mu2.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>();
    let min: Vec<f64> = mu1.probs.iter().zip(&mu2.probs).map(|(a, b)| a.min(*b)).collect();
    let excess = |mu: &InputDistribution| {
        mu.probs
            .iter()
            .zip(&min)
            .map(|(a, m)| a - m)
            .collect::<Vec<_>>()
    };
    Ok(TvSplit {
        delta,
        common: InputDistribution::from_weights(xs, ys, min.clone()),
        only1: InputDistribution::from_weights(xs, ys, excess(mu1)),
        only2: InputDistribution::from_weights(xs, ys, excess(mu2)),
    })
}
