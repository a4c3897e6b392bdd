//! Closed-form and asymptotic approximations to the natural frequencies.
//!
//! Near a material resonance the index is large and the reflection at the
//! layer faces is total, so a single Lorentz slab resonates where
//! `sin(n(ω) ω d / c) = 0`. With `n ≈ √(f / (ω₀² − ω² − iΓω))` this is a
//! quadratic in `ω` for each order `m`, and the roots pile up at the pole as
//! `m → ∞`. Far above every resonance `n ≈ 1 − A/(2ω²)` and the modes follow
//! a logarithmic curve.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dispersion::{FrequencyScale, Material};
use crate::error::{Error, Result};
use crate::modefinder::ModeSet;
use crate::transfer::Stack;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearResonanceFamily {
    /// Stack layer (0-based) whose resonance generates the family.
    pub layer_index: usize,
    pub pole: Complex64,
    pub m: u32,
    pub omega_approx: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticFamily {
    pub a: f64,
    pub d: f64,
    pub m: i64,
    /// The large-frequency formula as written, `(c/d)(mπ + i log(4m²π²/(A d²))`.
    pub omega_m: Complex64,
    /// Its decaying counterpart, the complex conjugate.
    pub omega_decaying: Complex64,
    /// `|sin(−i log(4ω²/A) + (ω − A/(2ω)) d/c)|` at `omega_m`.
    pub implicit_residual: f64,
}

/// Default smallest `|m|` accepted by [`asymptotic_modes`].
pub const ASYMPTOTIC_M_MIN: i64 = 10;

fn lorentz_parts(material: &Material) -> Result<(f64, f64, f64)> {
    match *material {
        Material::Lorentz { f, omega0, gamma } => Ok((f, omega0, gamma)),
        Material::Constant { .. } => Err(Error::NotDispersive),
    }
}

/// Root of `(ωd/c)² f = m²π² (ω₀² − ω² − iΓω)` continuous in `Γ` with the
/// positive root at `Γ = 0`.
fn near_resonance_root(f: f64, omega0: f64, gamma: f64, d: f64, c: f64, m: u32) -> Complex64 {
    let mp2 = (m as f64 * PI).powi(2);
    let a = d * d * f / (c * c) + mp2;
    let b = Complex64::new(0.0, gamma * mp2);
    let cc = -mp2 * omega0 * omega0;
    let disc = (b * b - 4.0 * a * cc).sqrt();
    (-b + disc) / (2.0 * a)
}

/// Fourth-quadrant near-resonance roots of a Lorentz slab of thickness `d`.
/// The mirror family is `−ω*`.
pub fn near_resonance_modes_slab(
    material: &Material,
    d: f64,
    m_range: RangeInclusive<u32>,
    scale: FrequencyScale,
) -> Result<Vec<NearResonanceFamily>> {
    let (f, omega0, gamma) = lorentz_parts(material)?;
    if !(d > 0.0) {
        return Err(Error::InvalidInput(alloc::format!("thickness must be > 0, got {d}")));
    }
    if *m_range.start() == 0 {
        return Err(Error::InvalidInput("near-resonance orders start at m = 1".into()));
    }
    let pole = material.pole_frequencies()?.0;
    Ok(m_range
        .map(|m| NearResonanceFamily {
            layer_index: 0,
            pole,
            m,
            omega_approx: near_resonance_root(f, omega0, gamma, d, scale.c, m),
        })
        .collect())
}

/// `sin(ω d √(f / (ω₀² − ω² − iΓω)) / c)`, the slab equation the
/// near-resonance roots solve, and the size of its argument.
pub fn near_resonance_residual(material: &Material, d: f64, omega: Complex64, scale: FrequencyScale) -> Result<(Complex64, f64)> {
    let chi = material.susceptibility(omega)?;
    let arg = omega * d * chi.sqrt() / scale.c;
    Ok((arg.sin(), arg.norm()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhichLayer {
    First,
    Second,
}

/// How the second layer's index enters the first-layer equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondIndex {
    /// `n₂(ω)` evaluated at every iterate.
    Exact,
    /// `n₂` frozen at the first layer's resonance frequency.
    Frozen,
}

/// Left-hand side of the first-layer equation
/// `sin(n₁d₁ω/c) cos(n₂d₂ω/c) + n₂ cos(n₁d₁ω/c) sin(n₂d₂ω/c)`.
pub fn two_layer_first_equation(stack: &Stack, omega: Complex64, n2: Option<Complex64>) -> Result<Complex64> {
    let (l1, l2) = two_layers(stack)?;
    let c = stack.scale.c;
    let n1 = l1.material.eval_n(omega)?;
    let n2 = match n2 {
        Some(v) => v,
        None => l2.material.eval_n(omega)?,
    };
    let a = n1 * l1.thickness * omega / c;
    let b = n2 * l2.thickness * omega / c;
    Ok(a.sin() * b.cos() + n2 * a.cos() * b.sin())
}

fn two_layers(stack: &Stack) -> Result<(&crate::transfer::Layer, &crate::transfer::Layer)> {
    if stack.layers.len() != 2 {
        return Err(Error::InvalidInput(alloc::format!(
            "two-layer reduction needs exactly two layers, got {}",
            stack.layers.len()
        )));
    }
    Ok((&stack.layers[0], &stack.layers[1]))
}

/// Near-resonance families of a two-layer Lorentz stack.
///
/// `Second` is the slab family of layer 2. `First` seeds Newton's method on
/// [`two_layer_first_equation`] with the slab family of layer 1.
pub fn two_layer_near_resonance(
    stack: &Stack,
    which: WhichLayer,
    m_range: RangeInclusive<u32>,
    second_index: SecondIndex,
) -> Result<Vec<NearResonanceFamily>> {
    let (l1, l2) = two_layers(stack)?;
    let (_, w1, _) = lorentz_parts(&l1.material)?;
    let (_, w2, _) = lorentz_parts(&l2.material)?;
    if w1 == w2 {
        return Err(Error::InvalidInput("two-layer reduction needs distinct resonance frequencies".into()));
    }
    match which {
        WhichLayer::Second => {
            let mut fam = near_resonance_modes_slab(&l2.material, l2.thickness, m_range, stack.scale)?;
            for f in &mut fam {
                f.layer_index = 1;
            }
            Ok(fam)
        }
        WhichLayer::First => {
            let seeds = near_resonance_modes_slab(&l1.material, l1.thickness, m_range, stack.scale)?;
            let pole = l1.material.pole_frequencies()?.0;
            let frozen = match second_index {
                SecondIndex::Exact => None,
                SecondIndex::Frozen => Some(l2.material.eval_n(Complex64::new(pole.re, 0.0))?),
            };
            let mut out = Vec::with_capacity(seeds.len());
            for seed in seeds {
                // Steps stay within the gap to the neighbouring orders.
                let size = 0.5 * (seed.omega_approx - pole).norm() / seed.m as f64;
                let root = newton_scalar(
                    |w| two_layer_first_equation(stack, w, frozen),
                    seed.omega_approx,
                    size,
                )?;
                out.push(NearResonanceFamily { layer_index: 0, pole, m: seed.m, omega_approx: root });
            }
            Ok(out)
        }
    }
}

/// Newton's method for a plain complex function with a central-difference
/// derivative; steps are capped at `size`.
pub fn newton_scalar<F: Fn(Complex64) -> Result<Complex64>>(f: F, z0: Complex64, size: f64) -> Result<Complex64> {
    const MAX_ITER: usize = 100;
    let mut z = z0;
    let mut last_step = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let v = f(z)?;
        if v == Complex64::new(0.0, 0.0) {
            return Ok(z);
        }
        let h = (1e-6 * size).max(64.0 * f64::EPSILON * z.norm());
        let dv = (f(z + h)? - f(z - h)?) / (2.0 * h);
        let mut step = v / dv;
        if !step.is_finite() {
            break;
        }
        if step.norm() > size {
            step *= size / step.norm();
        }
        z -= step;
        last_step = step.norm();
        if last_step <= 4.0 * f64::EPSILON * z.norm().max(size) {
            return Ok(z);
        }
    }
    // Rounding noise can keep the last steps from shrinking any further.
    if last_step <= 1e-12 * z.norm().max(size) {
        return Ok(z);
    }
    Err(Error::NoConvergence { what: "near-resonance Newton", iterations: MAX_ITER })
}

/// Large-frequency modes of a dispersive slab of total thickness `d` for
/// orders with `|m| >= m_min`.
pub fn asymptotic_modes_with_min(
    a: f64,
    d: f64,
    ms: &[i64],
    m_min: i64,
    scale: FrequencyScale,
) -> Result<Vec<AsymptoticFamily>> {
    if !(a > 0.0) || !(d > 0.0) {
        return Err(Error::InvalidInput(alloc::format!("need A > 0 and d > 0, got A = {a}, d = {d}")));
    }
    let c = scale.c;
    let mut out = Vec::with_capacity(ms.len());
    for &m in ms {
        if m == 0 {
            return Err(Error::InvalidInput("asymptotic orders exclude m = 0".into()));
        }
        if m.abs() < m_min {
            return Err(Error::InvalidInput(alloc::format!("|m| = {} is below the minimum order {m_min}", m.abs())));
        }
        let mp = m as f64 * PI;
        let log = Complex64::new(4.0 * mp * mp / (a * d * d), 0.0).ln();
        let omega_m = (c / d) * (Complex64::new(mp, 0.0) + Complex64::i() * log);
        out.push(AsymptoticFamily {
            a,
            d,
            m,
            omega_m,
            omega_decaying: omega_m.conj(),
            implicit_residual: implicit_residual(a, d, omega_m, c),
        });
    }
    Ok(out)
}

pub fn asymptotic_modes(a: f64, d: f64, ms: &[i64], scale: FrequencyScale) -> Result<Vec<AsymptoticFamily>> {
    asymptotic_modes_with_min(a, d, ms, ASYMPTOTIC_M_MIN, scale)
}

/// `|sin(−i log(4ω²/A) + (ω − A/(2ω)) d/c)|`.
pub fn implicit_residual(a: f64, d: f64, omega: Complex64, c: f64) -> f64 {
    let log = (4.0 * omega * omega / a).ln();
    let arg = -Complex64::i() * log + (omega - a / (2.0 * omega)) * d / c;
    arg.sin().norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensusRow {
    pub radius: f64,
    pub count: usize,
    /// `count / (π radius²)`.
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Census {
    pub pole: Complex64,
    /// Rows in the order of the requested (decreasing) radii.
    pub rows: Vec<CensusRow>,
    /// Counts never drop as the radius grows.
    pub monotone: bool,
    /// The count strictly grows from the second-largest to the largest radius.
    pub grows_at_largest: bool,
    /// Mode density strictly grows at every step toward the pole.
    pub density_increases: bool,
}

/// Mode counts in disks of decreasing radius around `pole`.
pub fn cluster_census(modes: &ModeSet, pole: Complex64, radii: &[f64]) -> Result<Census> {
    if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidInput("census radii must be positive".into()));
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidInput("census radii must be strictly decreasing".into()));
    }
    let rows: Vec<CensusRow> = radii
        .iter()
        .map(|&radius| {
            let count = modes.modes.iter().filter(|m| (m.omega - pole).norm() <= radius).count();
            CensusRow { radius, count, density: count as f64 / (PI * radius * radius) }
        })
        .collect();
    let monotone = rows.windows(2).all(|w| w[0].count >= w[1].count);
    let grows_at_largest = rows.len() >= 2 && rows[0].count > rows[1].count;
    let density_increases = rows.len() >= 2 && rows.windows(2).all(|w| w[1].density > w[0].density);
    Ok(Census { pole, rows, monotone, grows_at_largest, density_increases })
}
