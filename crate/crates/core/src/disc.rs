//! Rectangle discrepancy and the generalized discrepancy bound for small
//! boolean tables, by exhaustive enumeration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::simplex_grid;
use crate::{Error, InputDistribution, Result};

/// Largest `|X| + |Y|` the rectangle oracle accepts.
pub const ORACLE_LIMIT: usize = 24;
/// Largest `|X|` the row-subset evaluator accepts.
pub const FAST_ROW_LIMIT: usize = 24;
/// Largest `|X| * |Y|` for which flip sets are enumerated.
pub const GDM_CELL_LIMIT: usize = 20;
/// Slack on the flip-set mass budget.
pub const DELTA_SLACK: f64 = 1e-12;

#[derive(Debug, Deserialize)]
struct RawTable {
    x_size: usize,
    y_size: usize,
    values: Vec<Vec<u8>>,
}

/// A 0/1 table `g(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct BooleanTable {
    x_size: usize,
    y_size: usize,
    values: Vec<Vec<u8>>,
}

impl TryFrom<RawTable> for BooleanTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        Self::new(raw.x_size, raw.y_size, raw.values)
    }
}

impl BooleanTable {
    pub fn new(x_size: usize, y_size: usize, values: Vec<Vec<u8>>) -> Result<Self> {
        if x_size == 0 || y_size == 0 {
            return Err(Error::InvalidArgument("table sides must be positive".into()));
        }
        if values.len() != x_size || values.iter().any(|row| row.len() != y_size) {
            return Err(Error::InvalidArgument(format!(
                "values: expected {x_size} rows of {y_size} entries"
            )));
        }
        if let Some(v) = values.iter().flatten().find(|&&v| v > 1) {
            return Err(Error::InvalidArgument(format!("values: entry {v} is not 0 or 1")));
        }
        Ok(Self { x_size, y_size, values })
    }

    pub fn from_fn(x_size: usize, y_size: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let values = (0..x_size)
            .map(|x| (0..y_size).map(|y| u8::from(f(x, y))).collect())
            .collect();
        Self::new(x_size, y_size, values)
    }

    pub fn constant(x_size: usize, y_size: usize, v: bool) -> Result<Self> {
        Self::from_fn(x_size, y_size, |_, _| v)
    }

    pub fn xor() -> Self {
        Self::from_fn(2, 2, |x, y| x != y).expect("2x2")
    }

    pub fn and() -> Self {
        Self::from_fn(2, 2, |x, y| x == 1 && y == 1).expect("2x2")
    }

    /// `DISJ_n` on `n`-bit strings: 1 iff no shared 1 bit.
    pub fn disjointness(n: usize) -> Result<Self> {
        if n == 0 || n > 10 {
            return Err(Error::SizeLimit(format!("disjointness on {n} bits")));
        }
        let m = 1 << n;
        Self::from_fn(m, m, |x, y| x & y == 0)
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn values(&self) -> &[Vec<u8>] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.values[x][y] == 1
    }

    fn flipped(&self, cells: &[usize]) -> Self {
        let mut out = self.clone();
        for &c in cells {
            let v = &mut out.values[c / self.y_size][c % self.y_size];
            *v ^= 1;
        }
        out
    }
}

/// A maximizing rectangle and its value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscResult {
    pub value: f64,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

fn check_shape(g: &BooleanTable, mu: &InputDistribution) -> Result<()> {
    if (g.x_size, g.y_size) != (mu.x_size(), mu.y_size()) {
        return Err(Error::InvalidDistribution(format!(
            "distribution is {}x{}, table is {}x{}",
            mu.x_size(),
            mu.y_size(),
            g.x_size,
            g.y_size
        )));
    }
    Ok(())
}

fn signed(g: &BooleanTable, mu: &InputDistribution) -> Vec<Vec<f64>> {
    (0..g.x_size)
        .map(|x| {
            (0..g.y_size)
                .map(|y| if g.get(x, y) { -mu.prob(x, y) } else { mu.prob(x, y) })
                .collect()
        })
        .collect()
}

fn members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Column sums `s_y` over the rows in `mask`, rows added in ascending order.
fn column_sums(w: &[Vec<f64>], mask: u64, y_size: usize) -> Vec<f64> {
    let mut s = vec![0.0; y_size];
    for (x, row) in w.iter().enumerate() {
        if mask >> x & 1 == 1 {
            for (acc, v) in s.iter_mut().zip(row) {
                *acc += v;
            }
        }
    }
    s
}

/// `|sum over B of s_y|`, columns added in ascending order.
fn rect_value(s: &[f64], cols: u64) -> f64 {
    let mut acc = 0.0;
    for (y, v) in s.iter().enumerate() {
        if cols >> y & 1 == 1 {
            acc += v;
        }
    }
    acc.abs()
}

/// Brute force over every `(rows, cols)` pair, empty sets included. Ties go
/// to the lexicographically smallest `(rows, cols)` as sorted index lists.
pub fn disc_oracle(g: &BooleanTable, mu: &InputDistribution) -> Result<DiscResult> {
    check_shape(g, mu)?;
    if g.x_size + g.y_size > ORACLE_LIMIT {
        return Err(Error::SizeLimit(format!(
            "rectangle oracle needs |X| + |Y| <= {ORACLE_LIMIT}, got {}",
            g.x_size + g.y_size
        )));
    }
    let w = signed(g, mu);
    let mut best = DiscResult { value: 0.0, rows: vec![], cols: vec![] };
    for a in 0..1u64 << g.x_size {
        let s = column_sums(&w, a, g.y_size);
        for b in 0..1u64 << g.y_size {
            let v = rect_value(&s, b);
            if v < best.value {
                continue;
            }
            let (rows, cols) = (members(a, g.x_size), members(b, g.y_size));
            if v > best.value || (&rows, &cols) < (&best.rows, &best.cols) {
                best = DiscResult { value: v, rows, cols };
            }
        }
    }
    Ok(best)
}

/// For each row set the best column set is all strictly positive or all
/// strictly negative column sums; rounding is monotone, so the value is
/// bit-identical to the oracle's.
pub fn disc_fast(g: &BooleanTable, mu: &InputDistribution) -> Result<DiscResult> {
    check_shape(g, mu)?;
    if g.x_size > FAST_ROW_LIMIT || g.y_size > 63 {
        return Err(Error::SizeLimit(format!(
            "row-subset evaluator needs |X| <= {FAST_ROW_LIMIT} and |Y| <= 63, got {}x{}",
            g.x_size, g.y_size
        )));
    }
    let w = signed(g, mu);
    let per_rowset = |a: u64| -> (f64, u64, u64) {
        let s = column_sums(&w, a, g.y_size);
        let pos: u64 = s.iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(y, _)| 1 << y).sum();
        let neg: u64 = s.iter().enumerate().filter(|(_, v)| **v < 0.0).map(|(y, _)| 1 << y).sum();
        let (vp, vn) = (rect_value(&s, pos), rect_value(&s, neg));
        if vp >= vn {
            (vp, a, pos)
        } else {
            (vn, a, neg)
        }
    };
    let candidates: Vec<(f64, u64, u64)> = if g.x_size >= 14 {
        (0..1u64 << g.x_size).into_par_iter().map(per_rowset).collect()
    } else {
        (0..1u64 << g.x_size).map(per_rowset).collect()
    };
    // first maximum in row-mask order
    let (value, a, b) = candidates
        .into_iter()
        .fold((0.0, 0, 0), |best, c| if c.0 > best.0 { c } else { best });
    Ok(DiscResult { value, rows: members(a, g.x_size), cols: members(b, g.y_size) })
}

/// Recomputes the signed mass of a witness rectangle.
pub fn rectangle_sum(g: &BooleanTable, mu: &InputDistribution, rows: &[usize], cols: &[usize]) -> f64 {
    let mut acc = 0.0;
    for &x in rows {
        for &y in cols {
            let p = mu.prob(x, y);
            acc += if g.get(x, y) { -p } else { p };
        }
    }
    acc.abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GdmResult {
    /// `log2(1 / disc)` of the best table found.
    pub value: f64,
    pub witness: BooleanTable,
    pub disc: DiscResult,
    /// Cells (row-major indices) where the witness differs from `f`.
    pub flipped: Vec<usize>,
}

/// Maximum of `log2(1 / disc(g))` over tables `g` that differ from `f` on
/// mass at most `delta`. Zero-mass cells never change a discrepancy, so
/// only flips of positive-mass cells are enumerated.
pub fn gdm_delta(f: &BooleanTable, mu: &InputDistribution, delta: f64) -> Result<GdmResult> {
    check_shape(f, mu)?;
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidArgument(format!("delta = {delta} outside [0, 1]")));
    }
    let cells = f.x_size * f.y_size;
    if cells > GDM_CELL_LIMIT {
        return Err(Error::SizeLimit(format!(
            "flip-set enumeration needs |X| * |Y| <= {GDM_CELL_LIMIT}, got {cells}"
        )));
    }
    let support: Vec<(usize, f64)> = mu
        .probs()
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, p)| *p > 0.0)
        .collect();
    let mut search = FlipSearch {
        f,
        mu,
        support: &support,
        budget: delta + DELTA_SLACK,
        chosen: Vec::new(),
        best: None,
    };
    search.visit(0, 0.0)?;
    Ok(search.best.expect("the empty flip set is always feasible"))
}

struct FlipSearch<'a> {
    f: &'a BooleanTable,
    mu: &'a InputDistribution,
    support: &'a [(usize, f64)],
    budget: f64,
    chosen: Vec<usize>,
    best: Option<GdmResult>,
}

impl FlipSearch<'_> {
    /// Decides cell `k` of the support, skipping it before flipping it, so
    /// smaller flip sets win ties.
    fn visit(&mut self, k: usize, mass: f64) -> Result<()> {
        if k == self.support.len() {
            let g = self.f.flipped(&self.chosen);
            let d = disc_fast(&g, self.mu)?;
            let value = -d.value.log2();
            if self.best.as_ref().is_none_or(|b| value > b.value) {
                self.best = Some(GdmResult { value, witness: g, disc: d, flipped: self.chosen.clone() });
            }
            return Ok(());
        }
        self.visit(k + 1, mass)?;
        let (cell, p) = self.support[k];
        if mass + p <= self.budget {
            self.chosen.push(cell);
            self.visit(k + 1, mass + p)?;
            self.chosen.pop();
        }
        Ok(())
    }
}

/// Grid search over priors; a lower bound on the prior-free quantity.
pub fn gdm_search(f: &BooleanTable, delta: f64, grid_step: f64) -> Result<(InputDistribution, GdmResult)> {
    let grid = simplex_grid(f.x_size, f.y_size, grid_step)?;
    let results: Vec<GdmResult> = grid
        .par_iter()
        .map(|mu| gdm_delta(f, mu, delta))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.value > results[best].value {
            best = i;
        }
    }
    let mu = grid[best].clone();
    Ok((mu, results.into_iter().nth(best).expect("grid is nonempty")))
}
