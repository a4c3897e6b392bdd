//! Reflectance and transmittance on a real frequency grid.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::transfer::{layer_params, recursion, Stack};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub omega: f64,
    pub r: f64,
    pub t: f64,
    pub is_peak: bool,
    /// Full width of a transmission peak at half its prominence over the
    /// surrounding minima (half maximum when those minima reach zero).
    pub fwhm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Peak position refined by a parabola through the three top samples.
    pub omega: f64,
    pub height: f64,
    pub fwhm: Option<f64>,
    pub grid_index: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Spectrum {
    pub points: Vec<SpectrumPoint>,
    pub peaks: Vec<Peak>,
}

impl Spectrum {
    /// Largest `|R + T − 1|` over the grid.
    pub fn max_flux_defect(&self) -> f64 {
        self.points.iter().map(|p| (p.r + p.t - 1.0).abs()).fold(0.0, f64::max)
    }
}

pub fn spectrum(stack: &Stack, omega_grid: &[f64]) -> Result<Spectrum> {
    if omega_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("frequency grid must be strictly increasing".into()));
    }
    let mut points = Vec::with_capacity(omega_grid.len());
    for &w in omega_grid {
        let (r, t) = reflectance_transmittance(stack, w)?;
        points.push(SpectrumPoint { omega: w, r, t, is_peak: false, fwhm: None });
    }
    let mut peaks = find_peaks(&points);
    for peak in &mut peaks {
        // The parabola only locates the maximum; its value can overshoot.
        peak.height = reflectance_transmittance(stack, peak.omega)?.1;
        let p = &mut points[peak.grid_index];
        p.is_peak = true;
        p.fwhm = peak.fwhm;
    }
    Ok(Spectrum { points, peaks })
}

fn reflectance_transmittance(stack: &Stack, w: f64) -> Result<(f64, f64)> {
    let p = layer_params(stack, Complex64::new(w, 0.0))?;
    let res = recursion(&p);
    let g_in = p.g[p.g.len() - 1].re;
    let g_out = p.g[0].re;
    let r = (res.z / res.n).norm_sqr();
    let t = (g_out / g_in) * (res.t_numerator / res.n).norm_sqr();
    Ok((r, t))
}

fn find_peaks(points: &[SpectrumPoint]) -> Vec<Peak> {
    let mut peaks = Vec::new();
    if points.len() < 3 {
        return peaks;
    }
    let w: Vec<f64> = points.iter().map(|p| p.omega).collect();
    let t: Vec<f64> = points.iter().map(|p| p.t).collect();
    for i in 1..t.len() - 1 {
        // Plateaus count once, at their left end.
        if !(t[i] > t[i - 1] && t[i] >= t[i + 1]) {
            continue;
        }
        let (omega, height) = parabola_vertex((w[i - 1], t[i - 1]), (w[i], t[i]), (w[i + 1], t[i + 1]))
            .unwrap_or((w[i], t[i]));
        // Width at half prominence: halfway between the top sample and the
        // higher of the two minima separating it from taller samples.
        let left_base = (0..i).rev().take_while(|&j| t[j] <= t[i]).map(|j| t[j]).fold(t[i], f64::min);
        let right_base = (i + 1..t.len()).take_while(|&j| t[j] <= t[i]).map(|j| t[j]).fold(t[i], f64::min);
        let level = t[i] - 0.5 * (t[i] - left_base.max(right_base));
        let fwhm = if level < t[i] {
            let left = (1..=i).rev().find(|&j| t[j - 1] < level).map(|j| crossing(&w, &t, j - 1, j, level));
            let right = (i..t.len() - 1).find(|&j| t[j + 1] < level).map(|j| crossing(&w, &t, j, j + 1, level));
            match (left, right) {
                (Some(a), Some(b)) => Some(b - a),
                _ => None,
            }
        } else {
            None
        };
        peaks.push(Peak { omega, height, fwhm, grid_index: i });
    }
    peaks
}

fn parabola_vertex(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Option<(f64, f64)> {
    let (x0, y0) = a;
    let (x1, y1) = b;
    let (x2, y2) = c;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curv = (d12 - d01) / (x2 - x0);
    if !(curv < 0.0) {
        return None;
    }
    // y = y1 + d(x − x1) + curv (x − x1)(x − x_other), written around x1.
    let slope_at_x1 = d01 + curv * (x1 - x0);
    let x = x1 - slope_at_x1 / (2.0 * curv);
    if x < x0 || x > x2 {
        return None;
    }
    let y = y1 + slope_at_x1 * (x - x1) + curv * (x - x1) * (x - x1);
    Some((x, y))
}

/// Half-level crossing between samples `lo` and `hi = lo + 1`, quadratic through
/// a third neighbouring sample when one exists, linear otherwise.
fn crossing(w: &[f64], t: &[f64], lo: usize, hi: usize, level: f64) -> f64 {
    let linear = w[lo] + (level - t[lo]) * (w[hi] - w[lo]) / (t[hi] - t[lo]);
    let third = if hi + 1 < w.len() { hi + 1 } else if lo > 0 { lo - 1 } else { return linear };
    let mut idx = [lo, hi, third];
    idx.sort_unstable();
    let [a, b, c] = idx;
    let (x0, x1, x2) = (w[a], w[b], w[c]);
    let (y0, y1, y2) = (t[a] - level, t[b] - level, t[c] - level);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let q = (d12 - d01) / (x2 - x0);
    // y(x) = y0 + d01 (x − x0) + q (x − x0)(x − x1); solve on [w[lo], w[hi]] by bisection.
    let f = |x: f64| y0 + d01 * (x - x0) + q * (x - x0) * (x - x1);
    let (mut l, mut r) = (w[lo], w[hi]);
    let (fl, fr) = (f(l), f(r));
    if fl.signum() == fr.signum() {
        return linear;
    }
    for _ in 0..80 {
        let m = 0.5 * (l + r);
        if f(m).signum() == fl.signum() {
            l = m;
        } else {
            r = m;
        }
    }
    0.5 * (l + r)
}
