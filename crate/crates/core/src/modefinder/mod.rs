//! Natural-mode frequencies as complex zeros of the transfer denominator.
//!
//! The general search counts zeros with the argument principle, quadrisects
//! the region until every cell holds at most one zero and polishes each one
//! with Newton's method. Quarter-wave stacks reduce to a polynomial in
//! `e^{2iδ}` and are solved directly ([`polynomial`]).
//!
//! Counting uses the inverse transmission amplitude `N / t_numerator` rather
//! than `N` itself. Both have the same zeros, but only the former is
//! single-valued in the (branch-cut) refractive indices of the layers.

pub mod contour;
pub mod langer;
pub mod polynomial;

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result, UnresolvedSearch};
use crate::transfer::{layer_params, recursion, Stack};

pub use contour::{AnalyticFunction, ContourOptions, Rect, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    ExactPolynomial,
    ContourNewton,
    Asymptotic,
    NearResonance,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactPolynomial => "exact-polynomial",
            Method::ContourNewton => "contour-newton",
            Method::Asymptotic => "asymptotic",
            Method::NearResonance => "near-resonance",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub omega: Complex64,
    pub multiplicity: u32,
    pub method: Method,
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModeSet {
    pub modes: Vec<Mode>,
    pub stack_fingerprint: u64,
}

impl ModeSet {
    pub fn new(modes: Vec<Mode>, stack_fingerprint: u64) -> Self {
        let mut set = Self { modes, stack_fingerprint };
        set.sort();
        set
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Sum of multiplicities.
    pub fn total_multiplicity(&self) -> u32 {
        self.modes.iter().map(|m| m.multiplicity).sum()
    }

    /// Sorts by real part, then imaginary part, then method.
    pub fn sort(&mut self) {
        self.modes.sort_by(compare_modes);
    }

    /// Drops modes closer than `radius` to an earlier one (in sort order).
    pub fn dedup(&mut self, radius: f64) {
        self.sort();
        let mut kept: Vec<Mode> = Vec::with_capacity(self.modes.len());
        for m in self.modes.drain(..) {
            if !kept.iter().any(|k| (k.omega - m.omega).norm() <= radius) {
                kept.push(m);
            }
        }
        self.modes = kept;
    }

    pub fn nearest(&self, omega: Complex64) -> Option<&Mode> {
        self.modes.iter().min_by(|a, b| {
            (a.omega - omega).norm().partial_cmp(&(b.omega - omega).norm()).unwrap_or(Ordering::Equal)
        })
    }

    pub fn contains_near(&self, omega: Complex64, tol: f64) -> bool {
        self.nearest(omega).is_some_and(|m| (m.omega - omega).norm() <= tol)
    }

    /// Modes whose mirror `−ω*` lies in `rect` but is not present within `tol`.
    pub fn missing_mirrors(&self, rect: &Rect, tol: f64) -> Vec<Complex64> {
        self.modes
            .iter()
            .map(|m| -m.omega.conj())
            .filter(|w| rect.contains(*w) && !self.contains_near(*w, tol))
            .collect()
    }

    pub fn inside(&self, rect: &Rect) -> impl Iterator<Item = &Mode> + '_ {
        let r = *rect;
        self.modes.iter().filter(move |m| r.contains(m.omega))
    }
}

fn compare_modes(a: &Mode, b: &Mode) -> Ordering {
    a.omega
        .re
        .total_cmp(&b.omega.re)
        .then(a.omega.im.total_cmp(&b.omega.im))
        .then(a.method.cmp(&b.method))
}

/// Rectangle plus search controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub max_depth: u32,
    /// Newton stops once `|N| <= newton_tol (|Z| + 1)` (or its step reaches
    /// rounding level); modes closer than `10 newton_tol` are merged.
    pub newton_tol: f64,
    /// Radius of the disks around material poles left out of the search.
    /// `None` means `max(1e-3 Γ, 1e-8)` per pole. Zeros within three radii
    /// of a pole are not reported.
    pub exclusion_radius: Option<f64>,
    /// Seed for the contour jitter.
    pub seed: u64,
    pub contour: ContourOptions,
}

pub const DEFAULT_MAX_DEPTH: u32 = 40;
pub const DEFAULT_NEWTON_TOL: f64 = 1e-10;
const MAX_JITTER: usize = 5;
const NEWTON_MAX_ITER: usize = 60;

impl SearchRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        Rect::new(re_min, re_max, im_min, im_max)?;
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
            max_depth: DEFAULT_MAX_DEPTH,
            newton_tol: DEFAULT_NEWTON_TOL,
            exclusion_radius: None,
            seed: 0,
            contour: ContourOptions::default(),
        })
    }

    pub fn from_rect(rect: Rect) -> Self {
        Self::new(rect.re_min, rect.re_max, rect.im_min, rect.im_max).expect("Rect is validated on construction")
    }

    pub fn rect(&self) -> Rect {
        Rect { re_min: self.re_min, re_max: self.re_max, im_min: self.im_min, im_max: self.im_max }
    }

    pub fn validate(&self) -> Result<()> {
        Rect::new(self.re_min, self.re_max, self.im_min, self.im_max)?;
        if let Some(r) = self.exclusion_radius {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidInput(alloc::format!("exclusion radius must be > 0, got {r}")));
            }
        }
        if !(self.newton_tol > 0.0) || !self.newton_tol.is_finite() {
            return Err(Error::InvalidInput(alloc::format!("newton_tol must be > 0, got {}", self.newton_tol)));
        }
        Ok(())
    }

    /// Pole disks of `stack` to leave out.
    pub fn exclusions(&self, stack: &Stack) -> Vec<(Complex64, f64)> {
        let mut out = Vec::new();
        for m in stack.media() {
            if let (Ok((p, q)), crate::dispersion::Material::Lorentz { gamma, .. }) = (m.pole_frequencies(), m) {
                let r = self.exclusion_radius.unwrap_or((1e-3 * gamma).max(1e-8));
                for w in [p, q] {
                    if !out.iter().any(|&(c, _): &(Complex64, f64)| c == w) {
                        out.push((w, r));
                    }
                }
            }
        }
        out
    }
}

/// [`AnalyticFunction`] view of `N / t_numerator` for a stack.
///
/// `value` carries the phase of the mode function and the relative size
/// `|N| / (|Z| + 1)`; zero means `|N| <= tol (|Z| + 1)`.
#[derive(Debug, Clone, Copy)]
pub struct StackModeFunction<'a> {
    pub stack: &'a Stack,
}

impl<'a> StackModeFunction<'a> {
    pub fn new(stack: &'a Stack) -> Self {
        Self { stack }
    }
}

impl AnalyticFunction for StackModeFunction<'_> {
    fn sample(&self, z: Complex64) -> Result<Sample> {
        let p = layer_params(self.stack, z)?;
        let r = recursion(&p);
        let interfaces = p.g.len() - 1;
        let mut log_t = Complex64::new(0.0, 0.0);
        for gi in &p.g[1..] {
            log_t += gi.ln();
        }
        let size = r.z.norm() + 1.0;
        let value = r.n * Complex64::from_polar(1.0 / size, -log_t.im);
        let log_norm = r.log_scale + size.ln() - log_t.re - interfaces as f64 * core::f64::consts::LN_2;
        Ok(Sample { value, scale: 1.0, log_norm })
    }
}

/// Outcome of a zero search over a rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSearch {
    /// `(z, multiplicity, |value| / scale)`.
    pub zeros: Vec<(Complex64, u32, f64)>,
    pub unresolved: Vec<Rect>,
    /// Cells dropped because they met an exclusion disk.
    pub excluded_cells: usize,
    /// Winding count of the whole region when it avoids every exclusion disk.
    pub region_count: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub max_depth: u32,
    pub newton_tol: f64,
    pub seed: u64,
    pub contour: ContourOptions,
}

impl From<&SearchRegion> for SearchOptions {
    fn from(r: &SearchRegion) -> Self {
        Self { max_depth: r.max_depth, newton_tol: r.newton_tol, seed: r.seed, contour: r.contour }
    }
}

struct Cell {
    rect: Rect,
    depth: u32,
    /// `None` for cells that meet an exclusion disk.
    count: Option<u32>,
}

/// Finds every zero of `f` in `rect` outside the `exclusions` disks.
pub fn find_zeros<F: AnalyticFunction + ?Sized>(
    f: &F,
    rect: Rect,
    exclusions: &[(Complex64, f64)],
    opts: &SearchOptions,
) -> Result<ZeroSearch> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let excluded = |r: &Rect| exclusions.iter().any(|&(c, rad)| r.meets_disk(c, rad));

    let (root, region_count) = if excluded(&rect) {
        (rect, None)
    } else {
        let (r, n) = count_jittered(f, rect, &opts.contour, &mut rng)?;
        (r, Some(n))
    };

    let mut out = ZeroSearch { zeros: Vec::new(), unresolved: Vec::new(), excluded_cells: 0, region_count };
    let mut stack = alloc::vec![Cell { rect: root, depth: 0, count: region_count }];
    while let Some(cell) = stack.pop() {
        match cell.count {
            None => {
                if cell.rect.diagonal() <= 2.0 * min_radius_hit(&cell.rect, exclusions) {
                    out.excluded_cells += 1;
                    continue;
                }
                // Still much larger than its disk: zeros around the pole are unaccounted for.
                if cell.depth >= opts.max_depth {
                    out.unresolved.push(cell.rect);
                    continue;
                }
            }
            Some(0) => continue,
            Some(k) => {
                let polish = k == 1 || cell.depth >= opts.max_depth;
                if polish {
                    if let Some((z, res)) = newton(f, &cell.rect, opts)? {
                        // At full depth a count k > 1 only stands for a k-fold
                        // root if a much smaller contour around it still holds k.
                        if k == 1 || tight_count(f, &cell.rect, z, &opts.contour, &mut rng)? == Some(k) {
                            out.zeros.push((z, k, res));
                            continue;
                        }
                    }
                    if cell.depth >= opts.max_depth {
                        out.unresolved.push(cell.rect);
                        continue;
                    }
                }
            }
        }
        let children = split_counted(f, &cell, &excluded, &opts.contour, &mut rng)?;
        // Depth-first, lower-left first after popping.
        for child in children.into_iter().rev() {
            stack.push(child);
        }
    }

    // Dropped cells reach at most three radii from a pole; dropping every zero
    // in that band keeps the result independent of the cell layout (and hence
    // mirror symmetric).
    out.zeros.retain(|(z, _, _)| exclusions.iter().all(|&(c, r)| (z - c).norm() > 3.0 * r));
    let radius = 10.0 * opts.newton_tol;
    out.zeros.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let mut kept: Vec<(Complex64, u32, f64)> = Vec::with_capacity(out.zeros.len());
    for z in out.zeros.drain(..) {
        if !kept.iter().any(|k| (k.0 - z.0).norm() <= radius) {
            kept.push(z);
        }
    }
    out.zeros = kept;
    Ok(out)
}

fn min_radius_hit(rect: &Rect, exclusions: &[(Complex64, f64)]) -> f64 {
    exclusions
        .iter()
        .filter(|&&(c, r)| rect.meets_disk(c, r))
        .map(|&(_, r)| r)
        .fold(f64::INFINITY, f64::min)
}

/// Counts zeros in `rect`, nudging the boundary outward by a tiny random amount
/// when it passes through a zero.
fn count_jittered<F: AnalyticFunction + ?Sized>(
    f: &F,
    rect: Rect,
    opts: &ContourOptions,
    rng: &mut ChaCha8Rng,
) -> Result<(Rect, u32)> {
    let mut current = rect;
    let mut last_err = None;
    for _ in 0..=MAX_JITTER {
        match contour::count_zeros(f, &current, opts) {
            Ok(n) => return Ok((current, n)),
            Err(e @ Error::ContourThroughZero { .. }) => {
                last_err = Some(e);
                let s = 1e-7 * rect.diagonal();
                current = Rect {
                    re_min: rect.re_min - s * unit(rng),
                    re_max: rect.re_max + s * unit(rng),
                    im_min: rect.im_min - s * unit(rng),
                    im_max: rect.im_max + s * unit(rng),
                };
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("loop ran at least once"))
}

/// Zero count in a square of a hundredth of the cell's short side centred
/// on `z`; `None` when that contour cannot be evaluated.
fn tight_count<F: AnalyticFunction + ?Sized>(
    f: &F,
    cell: &Rect,
    z: Complex64,
    opts: &ContourOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Option<u32>> {
    let h = 0.005 * cell.width().min(cell.height());
    let square = Rect { re_min: z.re - h, re_max: z.re + h, im_min: z.im - h, im_max: z.im + h };
    match count_jittered(f, square, opts, rng) {
        Ok((_, n)) => Ok(Some(n)),
        Err(Error::ContourThroughZero { .. } | Error::NoConvergence { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn split_counted<F: AnalyticFunction + ?Sized>(
    f: &F,
    cell: &Cell,
    excluded: &dyn Fn(&Rect) -> bool,
    opts: &ContourOptions,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Cell>> {
    let mut last_err = None;
    for attempt in 0..=MAX_JITTER {
        let (fx, fy) = if attempt == 0 { (0.5, 0.5) } else { (0.35 + 0.3 * unit(rng), 0.35 + 0.3 * unit(rng)) };
        match count_children(f, cell, fx, fy, excluded, opts) {
            Ok(children) => {
                let all_counted = children.iter().all(|c| c.count.is_some());
                let sum: u32 = children.iter().filter_map(|c| c.count).sum();
                match cell.count {
                    Some(k) if all_counted && sum != k => {
                        last_err = Some(Error::ContourThroughZero { at: cell.rect.center() });
                    }
                    _ => return Ok(children),
                }
            }
            Err(e @ Error::ContourThroughZero { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("loop ran at least once"))
}

fn count_children<F: AnalyticFunction + ?Sized>(
    f: &F,
    cell: &Cell,
    fx: f64,
    fy: f64,
    excluded: &dyn Fn(&Rect) -> bool,
    opts: &ContourOptions,
) -> Result<Vec<Cell>> {
    let mut out = Vec::with_capacity(4);
    for rect in cell.rect.split(fx, fy) {
        let count = if excluded(&rect) { None } else { Some(contour::count_zeros(f, &rect, opts)?) };
        out.push(Cell { rect, depth: cell.depth + 1, count });
    }
    Ok(out)
}

/// Newton's method from the cell center; `None` unless it converges inside the cell.
fn newton<F: AnalyticFunction + ?Sized>(f: &F, rect: &Rect, opts: &SearchOptions) -> Result<Option<(Complex64, f64)>> {
    let size = rect.diagonal();
    Ok(newton_iterate(f, rect.center(), size, opts.newton_tol)?
        .filter(|(z, _)| rect.expanded(1e-9 * size).contains(*z)))
}

/// Newton's method with a central-difference derivative (step `1e-6 size`)
/// and steps capped at `size`. Returns the root and `|value| / scale` once the
/// residual is below `tol` or the step has shrunk to rounding level.
pub fn newton_iterate<F: AnalyticFunction + ?Sized>(
    f: &F,
    z0: Complex64,
    size: f64,
    tol: f64,
) -> Result<Option<(Complex64, f64)>> {
    let mut z = z0;
    let mut last_step = f64::INFINITY;
    let mut s0 = f.sample(z)?;
    for _ in 0..NEWTON_MAX_ITER {
        if s0.value == Complex64::new(0.0, 0.0) {
            last_step = 0.0;
            break;
        }
        let h = (1e-6 * size).max(64.0 * f64::EPSILON * z.norm());
        let plus = f.sample(z + h)?;
        let minus = f.sample(z - h)?;
        let diff = plus.ratio(&s0) - minus.ratio(&s0);
        let mut step = 2.0 * h / diff;
        if !step.is_finite() {
            return Ok(None);
        }
        if step.norm() > size {
            step *= size / step.norm();
        }
        z -= step;
        last_step = step.norm();
        s0 = f.sample(z)?;
        if last_step <= 4.0 * f64::EPSILON * z.norm().max(size) {
            break;
        }
    }
    let residual = s0.value.norm() / s0.scale;
    let step_converged = last_step <= 1e-12 * z.norm().max(size);
    if residual <= tol || step_converged {
        Ok(Some((z, residual)))
    } else {
        Ok(None)
    }
}

/// Polishes an approximate natural frequency of `stack` by Newton iteration
/// with steps of at most `size`.
pub fn polish_mode(stack: &Stack, guess: Complex64, size: f64) -> Result<Mode> {
    check_ambient(stack)?;
    let f = StackModeFunction::new(stack);
    match newton_iterate(&f, guess, size, DEFAULT_NEWTON_TOL)? {
        Some((omega, _)) => {
            let residual = recursion(&layer_params(stack, omega)?).residual();
            Ok(Mode { omega, multiplicity: 1, method: Method::ContourNewton, residual })
        }
        None => Err(Error::NoConvergence { what: "Newton polish", iterations: NEWTON_MAX_ITER }),
    }
}

/// Diagnostics of a mode search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub modes: ModeSet,
    pub excluded_cells: usize,
    pub region_count: Option<u32>,
}

/// Zeros of `N` inside a region of a stack with non-dispersive ambients.
pub fn count_zeros(stack: &Stack, rect: &Rect) -> Result<u32> {
    check_ambient(stack)?;
    contour::count_zeros(&StackModeFunction::new(stack), rect, &ContourOptions::default())
}

fn check_ambient(stack: &Stack) -> Result<()> {
    if stack.ambient_in.is_dispersive() || stack.ambient_out.is_dispersive() {
        return Err(Error::DispersiveAmbient);
    }
    Ok(())
}

pub fn find_modes(stack: &Stack, region: &SearchRegion) -> Result<ModeSet> {
    Ok(find_modes_report(stack, region)?.modes)
}

pub fn find_modes_report(stack: &Stack, region: &SearchRegion) -> Result<SearchReport> {
    region.validate()?;
    check_ambient(stack)?;
    let f = StackModeFunction::new(stack);
    let exclusions = region.exclusions(stack);
    let search = find_zeros(&f, region.rect(), &exclusions, &SearchOptions::from(region))?;
    let mut modes = Vec::with_capacity(search.zeros.len());
    for &(omega, multiplicity, _) in &search.zeros {
        let residual = recursion(&layer_params(stack, omega)?).residual();
        modes.push(Mode { omega, multiplicity, method: Method::ContourNewton, residual });
    }
    let set = ModeSet::new(modes, stack.fingerprint());
    if !search.unresolved.is_empty() {
        return Err(Error::MaxDepthExceeded(alloc::boxed::Box::new(UnresolvedSearch {
            found: set,
            unresolved: search.unresolved,
        })));
    }
    if let Some(n) = search.region_count {
        if set.total_multiplicity() != n {
            return Err(Error::MaxDepthExceeded(alloc::boxed::Box::new(UnresolvedSearch {
                found: set,
                unresolved: alloc::vec![region.rect()],
            })));
        }
    }
    Ok(SearchReport { modes: set, excluded_cells: search.excluded_cells, region_count: search.region_count })
}
