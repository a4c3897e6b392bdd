//! Winding numbers along rectangular contours.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

use core::f64::consts::PI;

/// A function value `value · exp(log_norm)` together with the magnitude below
/// which `value` counts as zero (`|value| <= tol * scale`).
///
/// Splitting off `log_norm` lets functions with huge dynamic range report a
/// well-scaled `value`; only the phase of `value` enters winding numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: Complex64,
    pub scale: f64,
    pub log_norm: f64,
}

impl Sample {
    pub fn new(value: Complex64, scale: f64) -> Self {
        Self { value, scale, log_norm: 0.0 }
    }

    /// `self / other` as a plain complex number.
    pub fn ratio(&self, other: &Sample) -> Complex64 {
        self.value / other.value * (self.log_norm - other.log_norm).exp()
    }
}

pub trait AnalyticFunction {
    fn sample(&self, z: Complex64) -> Result<Sample>;
}

impl<F> AnalyticFunction for F
where
    F: Fn(Complex64) -> Result<Sample>,
{
    fn sample(&self, z: Complex64) -> Result<Sample> {
        self(z)
    }
}

/// Axis-aligned rectangle in the complex frequency plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max) || !(im_min < im_max) || ![re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(alloc::format!(
                "degenerate rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Self { re_min, re_max, im_min, im_max })
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn expanded(&self, margin: f64) -> Rect {
        Rect {
            re_min: self.re_min - margin,
            re_max: self.re_max + margin,
            im_min: self.im_min - margin,
            im_max: self.im_max + margin,
        }
    }

    /// Whether the closed rectangle meets the closed disk.
    pub fn meets_disk(&self, center: Complex64, radius: f64) -> bool {
        let dx = (self.re_min - center.re).max(0.0).max(center.re - self.re_max);
        let dy = (self.im_min - center.im).max(0.0).max(center.im - self.im_max);
        dx.hypot(dy) <= radius
    }

    /// Splits at fractions `fx`, `fy` of the width/height: lower-left,
    /// lower-right, upper-left, upper-right.
    pub fn split(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let xm = self.re_min + fx * self.width();
        let ym = self.im_min + fy * self.height();
        [
            Rect { re_min: self.re_min, re_max: xm, im_min: self.im_min, im_max: ym },
            Rect { re_min: xm, re_max: self.re_max, im_min: self.im_min, im_max: ym },
            Rect { re_min: self.re_min, re_max: xm, im_min: ym, im_max: self.im_max },
            Rect { re_min: xm, re_max: self.re_max, im_min: ym, im_max: self.im_max },
        ]
    }

    /// Corners in counter-clockwise order starting at the lower-left.
    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourOptions {
    /// `|f| <= zero_tol * scale` on the contour aborts the count.
    pub zero_tol: f64,
    /// Uniform segments per edge before adaptive refinement.
    pub initial_segments: usize,
    /// Bisection depth limit per initial segment.
    pub max_refinement: u32,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self { zero_tol: 1e-12, initial_segments: 8, max_refinement: 48 }
    }
}

/// Accepted per-step phase change; the argument principle needs < π/2.
const MAX_STEP_PHASE: f64 = PI / 3.0;

/// Winding number of `f` around 0 along the boundary of `rect`, counter-clockwise.
pub fn winding_number<F: AnalyticFunction + ?Sized>(f: &F, rect: &Rect, opts: &ContourOptions) -> Result<i64> {
    let corners = rect.corners();
    let mut total = 0.0;
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        let edge = Edge { f, dir: (b - a) / (b - a).norm(), opts };
        let segments = opts.initial_segments.max(1);
        let len = (b - a).norm() / segments as f64;
        let mut pa = edge.point(a, len)?;
        for s in 0..segments {
            let zb = if s + 1 == segments { b } else { a + (b - a) * ((s + 1) as f64 / segments as f64) };
            let pb = edge.point(zb, len)?;
            total += edge.refine(pa.z, pb.z, pa, pb, 0)?;
            pa = pb;
        }
    }
    let turns = total / (2.0 * PI);
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-3 {
        return Err(Error::ContourThroughZero { at: rect.center() });
    }
    Ok(rounded as i64)
}

/// Number of zeros inside `rect` for a function analytic there.
pub fn count_zeros<F: AnalyticFunction + ?Sized>(f: &F, rect: &Rect, opts: &ContourOptions) -> Result<u32> {
    let w = winding_number(f, rect, opts)?;
    if w < 0 {
        return Err(Error::InvalidInput(alloc::format!(
            "negative winding {w}: the function has poles inside the contour"
        )));
    }
    Ok(w as u32)
}

fn checked<F: AnalyticFunction + ?Sized>(f: &F, z: Complex64, opts: &ContourOptions) -> Result<Sample> {
    let s = f.sample(z)?;
    if !s.value.is_finite() || s.value.norm() <= opts.zero_tol * s.scale {
        return Err(Error::ContourThroughZero { at: z });
    }
    Ok(s)
}

fn phase(ratio: Complex64) -> f64 {
    ratio.im.atan2(ratio.re)
}

/// A contour point with the logarithmic derivative of `f` along the edge.
#[derive(Clone, Copy)]
struct EdgePoint {
    z: Complex64,
    sample: Sample,
    log_rate: f64,
}

struct Edge<'a, F: ?Sized> {
    f: &'a F,
    dir: Complex64,
    opts: &'a ContourOptions,
}

impl<F: AnalyticFunction + ?Sized> Edge<'_, F> {
    /// `len` is the length of the segments the point belongs to; the
    /// derivative step is a small fraction of it.
    fn point(&self, z: Complex64, len: f64) -> Result<EdgePoint> {
        let sample = checked(self.f, z, self.opts)?;
        let h = (1e-3 * len).max(32.0 * f64::EPSILON * z.norm());
        let ahead = checked(self.f, z + self.dir * h, self.opts)?;
        let log_rate = ahead.ratio(&sample).ln().norm() / h;
        Ok(EdgePoint { z, sample, log_rate })
    }

    fn refine(&self, a: Complex64, b: Complex64, pa: EdgePoint, pb: EdgePoint, depth: u32) -> Result<f64> {
        let m = (a + b) * 0.5;
        let half = 0.5 * (b - a).norm();
        let pm = self.point(m, half)?;
        // Values relative to f(a).
        let rm = pm.sample.ratio(&pa.sample);
        let rb = pb.sample.ratio(&pa.sample);
        let d1 = phase(rm);
        let d2 = phase(rb / rm);
        let d = phase(rb);
        // Sampled phases cannot see whole turns between samples, so also bound
        // the local rate of change of log f at all three points.
        let rate = pa.log_rate.max(pb.log_rate).max(pm.log_rate);
        if rate * half < MAX_STEP_PHASE
            && d1.abs() < MAX_STEP_PHASE
            && d2.abs() < MAX_STEP_PHASE
            && (d1 + d2 - d).abs() < 1e-9
        {
            return Ok(d);
        }
        if depth >= self.opts.max_refinement {
            return Err(Error::ContourThroughZero { at: m });
        }
        Ok(self.refine(a, m, pa, pm, depth + 1)? + self.refine(m, b, pm, pb, depth + 1)?)
    }
}
