//! Size of the large-frequency product `L(z) = Π (1 − z/λ_m)` with
//! `λ_m = mπ + i log(4m²π²/(A d²))` along the real axis.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{lambert_w, CanonicalProduct, EigenvalueLaw, TailModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LConstancy {
    /// `(|z|, |L(z)|)` per sample.
    pub rows: Vec<(f64, f64)>,
    /// `(max − min) / mean` of `|L|`.
    pub relative_variation: f64,
    /// The `z`-independent residue bound for the given `A` and `d`.
    pub bound: f64,
    /// Largest tail error estimate relative to `|log L|`.
    pub worst_tail_ratio: f64,
}

/// `(16/π) W(½√A d) + 8π³/(A d²)`.
pub fn residue_bound(a: f64, d: f64) -> Result<f64> {
    let w = lambert_w(Complex64::new(0.5 * a.sqrt() * d, 0.0), 0)?;
    Ok(16.0 / PI * w.re + 8.0 * PI.powi(3) / (a * d * d))
}

/// Tabulates `|L(z)|` at the samples with paired `±m` factors up to `m = M`.
pub fn verify_l_constancy(a: f64, d: f64, truncation: usize, z_samples: &[f64]) -> Result<LConstancy> {
    if z_samples.is_empty() {
        return Err(Error::InvalidInput("no samples".into()));
    }
    let cp = CanonicalProduct::from_law(EigenvalueLaw::LargeFrequency { a, d }, truncation, TailModel::AsymptoticPairing)?;
    let mut rows = Vec::with_capacity(z_samples.len());
    let mut worst: f64 = 0.0;
    for &x in z_samples {
        let lp = cp.eval_log(Complex64::new(x, 0.0))?;
        let log_abs = lp.log.norm();
        if lp.tail_error > 0.01 * log_abs {
            return Err(Error::TruncationTooSmall { tail_error: lp.tail_error, log_abs });
        }
        if log_abs > 0.0 {
            worst = worst.max(lp.tail_error / log_abs);
        }
        rows.push((x.abs(), lp.log.re.exp()));
    }
    let max = rows.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    let min = rows.iter().map(|r| r.1).fold(f64::MAX, f64::min);
    let mean = rows.iter().map(|r| r.1).sum::<f64>() / rows.len() as f64;
    Ok(LConstancy { rows, relative_variation: (max - min) / mean, bound: residue_bound(a, d)?, worst_tail_ratio: worst })
}
