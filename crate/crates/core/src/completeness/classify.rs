//! Completeness of an eigenvalue set from the decay of its canonical product.
//!
//! The set is complete on the matching interval exactly when `F` is not
//! square integrable along the real axis. With `|F(x)| ~ C x^p` that is the
//! case for `p ≥ −½`, so the classifier fits `p` and compares it with `−½`
//! up to a margin.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::{CanonicalProduct, TailModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Complete,
    Incomplete,
    Undetermined,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Complete => "complete",
            Classification::Incomplete => "incomplete",
            Classification::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Distance of the exponent from `−½` needed for a verdict.
    pub margin: f64,
    /// Largest accepted RMS residual of the log-log fit.
    pub fit_threshold: f64,
    pub points_per_decade: usize,
    /// Repeat the fit with twice the truncation (needs an eigenvalue law).
    pub check_doubling: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { margin: 0.1, fit_threshold: 0.05, points_per_decade: 50, check_doubling: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessReport {
    pub classification: Classification,
    /// Fitted `p` in `|F(x)| ~ C x^p`.
    pub decay_exponent: f64,
    pub fit_range: (f64, f64),
    /// RMS residual of the fit in natural-log units.
    pub fit_residual: f64,
    /// `|λ_m| / (π|m|)` stays in `[0.5, 2]` over the tail and ends within 5% of 1.
    pub paley_wiener_ratio_check: bool,
    pub truncation: usize,
    pub tail_model: TailModel,
    pub tail_provenance: Option<&'static str>,
    /// `|p(2M) − p(M)|` when the truncation could be doubled.
    pub doubling_change: Option<f64>,
    /// For incomplete sets, how many adjoined modes lift `|F|` out of `L²`.
    pub modes_to_complete: Option<u32>,
    /// `(x, log|F(x)|)` at the sample points.
    pub samples: Vec<(f64, f64)>,
}

/// Log-spaced points on `[x_min, x_max]`, each moved to the midpoint between
/// the real parts of the two nearest eigenvalues so no sample sits on a zero.
pub fn real_grid(cp: &CanonicalProduct, x_min: f64, x_max: f64, points_per_decade: usize) -> Result<Vec<f64>> {
    if !(x_min > 0.0 && x_max >= 100.0 * x_min && x_max.is_finite()) {
        return Err(Error::InvalidInput(alloc::format!(
            "grid [{x_min}, {x_max}] must be positive and span two decades"
        )));
    }
    let mut re: Vec<f64> = cp.factors.iter().map(|f| f.1.re).filter(|&r| r > 0.0).collect();
    re.sort_by(f64::total_cmp);
    re.dedup();
    let decades = (x_max / x_min).log10();
    let n = (decades * points_per_decade as f64).round() as usize + 1;
    let mut grid = Vec::with_capacity(n);
    for k in 0..n {
        let x = x_min * 10f64.powf(decades * k as f64 / (n - 1) as f64);
        let i = re.partition_point(|&r| r < x);
        let moved = match (i.checked_sub(1).map(|j| re[j]), re.get(i)) {
            (Some(lo), Some(&hi)) => 0.5 * (lo + hi),
            _ => x,
        };
        if grid.last().is_none_or(|&l: &f64| moved > l) {
            grid.push(moved);
        }
    }
    Ok(grid)
}

fn fit(samples: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = samples.len() as f64;
    if samples.len() < 3 {
        return Err(Error::InvalidInput("too few samples in the fit decade".into()));
    }
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in samples {
        let lx = x.ln();
        sx += lx;
        sy += y;
        sxx += lx * lx;
        sxy += lx * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let icpt = (sy - slope * sx) / n;
    let ss: f64 = samples.iter().map(|&(x, y)| (y - icpt - slope * x.ln()).powi(2)).sum();
    Ok((slope, (ss / n).sqrt()))
}

struct Decay {
    p: f64,
    residual: f64,
    fit_range: (f64, f64),
    samples: Vec<(f64, f64)>,
}

fn decay(cp: &CanonicalProduct, grid: &[f64]) -> Result<Decay> {
    let top = *grid.last().expect("grid is nonempty");
    let mut samples = Vec::with_capacity(grid.len());
    for &x in grid {
        let lp = cp.eval_log(Complex64::new(x, 0.0))?;
        samples.push((x, lp.log.re));
    }
    let upper: Vec<(f64, f64)> = samples.iter().copied().filter(|s| s.0 >= top / 10.0).collect();
    let (p, residual) = fit(&upper)?;
    Ok(Decay { p, residual, fit_range: (upper[0].0, top), samples })
}

fn ratio_check(cp: &CanonicalProduct) -> bool {
    if cp.check_ratio().is_err() {
        return false;
    }
    let m = cp.truncation as i64;
    cp.factors
        .iter()
        .filter(|f| f.0.abs() == m)
        .all(|f| (f.1.norm() / (core::f64::consts::PI * m as f64) - 1.0).abs() <= 0.05)
}

/// Classifies the product over `[x_min, x_max]` with the default options.
pub fn classify(cp: &CanonicalProduct, x_min: f64, x_max: f64) -> Result<CompletenessReport> {
    classify_with(cp, x_min, x_max, &ClassifyOptions::default())
}

pub fn classify_with(cp: &CanonicalProduct, x_min: f64, x_max: f64, opts: &ClassifyOptions) -> Result<CompletenessReport> {
    if cp.factors.is_empty() {
        return Err(Error::InvalidInput("empty eigenvalue set".into()));
    }
    let grid = real_grid(cp, x_min, x_max, opts.points_per_decade)?;
    let Decay { p, residual, fit_range, samples } = decay(cp, &grid)?;
    if !(residual <= opts.fit_threshold) {
        return Err(Error::FitUnstable { residual });
    }
    let doubling_change = if opts.check_doubling && cp.law.is_some() {
        let doubled = cp.extended(2 * cp.truncation)?;
        Some((decay(&doubled, &grid)?.p - p).abs())
    } else {
        None
    };
    let classification = if p >= -0.5 + opts.margin {
        Classification::Complete
    } else if p <= -0.5 - opts.margin {
        Classification::Incomplete
    } else {
        Classification::Undetermined
    };
    // Each adjoined zero multiplies F by a linear factor and raises p by one.
    let modes_to_complete = (classification == Classification::Incomplete).then(|| (-0.5 - p).floor() as u32 + 1);
    Ok(CompletenessReport {
        classification,
        decay_exponent: p,
        fit_range,
        fit_residual: residual,
        paley_wiener_ratio_check: ratio_check(cp),
        truncation: cp.truncation,
        tail_model: cp.tail_model,
        tail_provenance: cp.tail_provenance,
        doubling_change,
        modes_to_complete,
        samples,
    })
}
