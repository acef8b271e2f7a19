//! Cost curves of the AND protocol and the constants pinned from their
//! calibration runs (`calibration/` at the repository root holds the data).

use super::{and_prior, build_and_protocol, AndParams};
use crate::engine::qic;
use crate::info::binary_entropy;
use crate::linalg::Config;
use crate::Result;

/// Lower bound on `(QIC(mu_w) - QIC(mu_0)) / (r H(w))` over
/// `r in {2, 4, 8}`, `w in {0.01, 0.05, 0.1, 0.15}`. Calibrated minimum
/// 1.5087 at `r = 8, w = 0.15`; the ratio falls with both `r` and `w`.
pub const MASS_W_RATIO_FLOOR: f64 = 1.5;

/// `r QIC(mu_0) / log2(8 r)` stays inside this band for `r in 1..=16`.
/// Calibrated range 0.1335 (`r = 1`) to 0.1783 (`r = 16`), increasing.
pub const DECAY_BAND: (f64, f64) = (0.13, 0.18);

/// `QIC(mu_w) - QIC(mu_0)`.
pub fn mass_w_increase(params: AndParams, w: f64, cfg: &Config) -> Result<f64> {
    let p = build_and_protocol(params)?;
    Ok(qic(&p, &and_prior(w)?, cfg)? - qic(&p, &and_prior(0.0)?, cfg)?)
}

/// `increase / (r H(w))`; undefined at `w = 0`.
pub fn mass_w_ratio(r: usize, w: f64, increase: f64) -> Result<Option<f64>> {
    let scale = r as f64 * binary_entropy(w)?;
    Ok((scale > 0.0).then(|| increase / scale))
}

/// `r QIC / log2(8 r)`.
pub fn decay_ratio(r: usize, qic: f64) -> f64 {
    r as f64 * qic / (8.0 * r as f64).log2()
}

/// `QIC(mu_0)` of the `r`-pair protocol.
pub fn qic_at_zero_mass(params: AndParams, cfg: &Config) -> Result<f64> {
    qic(&build_and_protocol(params)?, &and_prior(0.0)?, cfg)
}
