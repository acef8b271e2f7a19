use super::protocol::ProtocolSpec;
use super::run::qic;
use crate::linalg::Config;
use crate::{Error, InputDistribution, Result};

/// Largest number of grid points any simplex scan may visit.
pub const GRID_LIMIT: usize = 2_000_000;

fn binomial(n: usize, k: usize) -> Option<usize> {
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Every distribution on `x_size x y_size` whose entries are multiples of
/// `step`, in lexicographic order of the (row-major) weight vector.
pub fn simplex_grid(x_size: usize, y_size: usize, step: f64) -> Result<Vec<InputDistribution>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidArgument(format!("grid step {step} outside (0, 1]")));
    }
    let n = (1.0 / step).round() as usize;
    if ((n as f64) * step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("1/{step} is not an integer")));
    }
    let k = x_size * y_size;
    let count = binomial(n + k - 1, k - 1).unwrap_or(usize::MAX);
    if count > GRID_LIMIT {
        return Err(Error::SizeLimit(format!("{count} grid points exceed {GRID_LIMIT}")));
    }
    let mut out = Vec::with_capacity(count);
    let mut parts = vec![0usize; k];
    fn rec(
        i: usize,
        left: usize,
        n: usize,
        parts: &mut Vec<usize>,
        dims: (usize, usize),
        out: &mut Vec<InputDistribution>,
    ) -> Result<()> {
        if i + 1 == parts.len() {
            parts[i] = left;
            let probs = parts.iter().map(|&c| c as f64 / n as f64).collect();
            out.push(InputDistribution::new(dims.0, dims.1, probs, 1e-9)?);
            return Ok(());
        }
        for c in 0..=left {
            parts[i] = c;
            rec(i + 1, left - c, n, parts, dims, out)?;
        }
        Ok(())
    }
    rec(0, n, n, &mut parts, (x_size, y_size), &mut out)?;
    Ok(out)
}

/// Grid maximum of `QIC(p, mu)` over priors satisfying `constraint`.
/// Ties keep the first point in scan order.
pub fn qic_sup_over_prior(
    p: &ProtocolSpec,
    grid_step: f64,
    constraint: impl Fn(&InputDistribution) -> bool + Sync,
    cfg: &Config,
) -> Result<(f64, InputDistribution)> {
    use rayon::prelude::*;
    if !(grid_step > 0.0 && grid_step <= 0.5) {
        return Err(Error::InvalidArgument(format!("grid step {grid_step} outside (0, 1/2]")));
    }
    let grid: Vec<InputDistribution> = simplex_grid(p.x_size, p.y_size, grid_step)?
        .into_iter()
        .filter(|mu| constraint(mu))
        .collect();
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let values: Vec<f64> = grid
        .par_iter()
        .map(|mu| qic(p, mu, cfg))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    Ok((values[best], grid[best].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        // compositions of 4 into 4 parts: C(7, 3) = 35
        assert_eq!(simplex_grid(2, 2, 0.25).unwrap().len(), 35);
        assert_eq!(simplex_grid(1, 1, 0.5).unwrap().len(), 1);
        assert!(simplex_grid(2, 2, 0.3).is_err());
    }
}
