//! Wolter's recursion for stratified media.
//!
//! The recursion numbers media from the exit side: medium 0 is the ambient
//! the wave leaves into, media `1..=L` are the layers from the exit side
//! onward and medium `m = L + 1` is the ambient the wave comes from. A stack
//! with `L` layers has `m` interfaces. [`Stack`] lists media in the opposite,
//! incidence-first order; [`layer_params`] reverses them. The recursion runs
//! over interfaces,
//!
//! ```text
//! Z_m = (g_m − g_{m−1}) e^{−iδ_{m−1}} N_{m−1} + (g_m + g_{m−1}) e^{iδ_{m−1}} Z_{m−1}
//! N_m = (g_m + g_{m−1}) e^{−iδ_{m−1}} N_{m−1} + (g_m − g_{m−1}) e^{iδ_{m−1}} Z_{m−1}
//! Z_1 = g_1 − g_0,  N_1 = g_1 + g_0
//! ```
//!
//! with `g = n cosθ` (TE) or `g = cosθ / n` (TM) and `δ = n d ω cosθ / c`.
//! Then `r = Z_m / N_m` and `t = 2^m Π_{i=1..m} g_i / N_m` for incidence from
//! medium `m`.
//! Values are rescaled every step; the true values are the stored ones times
//! `exp(log_scale)`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;
use sha2::{Digest, Sha256};

use crate::dispersion::{FrequencyScale, Material};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    Te,
    Tm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub material: Material,
    pub thickness: f64,
}

impl Layer {
    pub fn new(material: Material, thickness: f64) -> Self {
        Self { material, thickness }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stack {
    pub ambient_in: Material,
    pub layers: Vec<Layer>,
    pub ambient_out: Material,
    pub polarization: Polarization,
    /// Incidence angle in the entry medium, radians.
    pub theta0: f64,
    pub scale: FrequencyScale,
}

impl Stack {
    pub fn new(
        ambient_in: Material,
        layers: Vec<Layer>,
        ambient_out: Material,
        polarization: Polarization,
        theta0: f64,
        scale: FrequencyScale,
    ) -> Result<Self> {
        let s = Self { ambient_in, layers, ambient_out, polarization, theta0, scale };
        s.validate()?;
        Ok(s)
    }

    /// TE, normal incidence, `c = 1`.
    pub fn normal_incidence(ambient_in: Material, layers: Vec<Layer>, ambient_out: Material) -> Result<Self> {
        Self::new(ambient_in, layers, ambient_out, Polarization::Te, 0.0, FrequencyScale::default())
    }

    /// A single layer between two identical ambients.
    pub fn slab(ambient: Material, material: Material, thickness: f64) -> Result<Self> {
        Self::normal_incidence(ambient, alloc::vec![Layer::new(material, thickness)], ambient)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidInput("a stack needs at least one layer".into()));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            if !(layer.thickness > 0.0) || !layer.thickness.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "layer {i}: thickness must be > 0, got {}",
                    layer.thickness
                )));
            }
            layer.material.validate()?;
        }
        self.ambient_in.validate()?;
        self.ambient_out.validate()?;
        if !self.theta0.is_finite() || self.theta0.abs() >= core::f64::consts::FRAC_PI_2 {
            return Err(Error::InvalidInput(format!("incidence angle {} outside (-pi/2, pi/2)", self.theta0)));
        }
        if self.theta0 != 0.0 && self.media().any(|m| m.is_dispersive()) {
            return Err(Error::InvalidInput(
                "dispersive media are only supported at normal incidence".into(),
            ));
        }
        FrequencyScale::new(self.scale.c)?;
        Ok(())
    }

    pub fn num_media(&self) -> usize {
        self.layers.len() + 2
    }

    pub fn num_interfaces(&self) -> usize {
        self.layers.len() + 1
    }

    pub fn medium(&self, index: usize) -> &Material {
        if index == 0 {
            &self.ambient_in
        } else if index <= self.layers.len() {
            &self.layers[index - 1].material
        } else {
            &self.ambient_out
        }
    }

    pub fn media(&self) -> impl Iterator<Item = &Material> + '_ {
        (0..self.num_media()).map(move |i| self.medium(i))
    }

    pub fn is_dispersive(&self) -> bool {
        self.media().any(|m| m.is_dispersive())
    }

    /// Poles of every dispersive layer (the essential singularities of the
    /// mode function).
    pub fn singular_points(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for m in self.media() {
            if let Ok((p, q)) = m.pole_frequencies() {
                for w in [p, q] {
                    if !out.contains(&w) {
                        out.push(w);
                    }
                }
            }
        }
        out
    }

    /// Total thickness of the layers.
    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }

    /// Stable 64-bit digest of the full configuration.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Sha256::new();
        let material = |h: &mut Sha256, m: &Material| match *m {
            Material::Constant { n } => {
                h.update([0u8]);
                h.update(n.re.to_bits().to_le_bytes());
                h.update(n.im.to_bits().to_le_bytes());
            }
            Material::Lorentz { f, omega0, gamma } => {
                h.update([1u8]);
                for v in [f, omega0, gamma] {
                    h.update(v.to_bits().to_le_bytes());
                }
            }
        };
        material(&mut h, &self.ambient_in);
        for l in &self.layers {
            material(&mut h, &l.material);
            h.update(l.thickness.to_bits().to_le_bytes());
        }
        material(&mut h, &self.ambient_out);
        h.update([matches!(self.polarization, Polarization::Tm) as u8]);
        h.update(self.theta0.to_bits().to_le_bytes());
        h.update(self.scale.c.to_bits().to_le_bytes());
        let digest = h.finalize();
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(bytes)
    }
}

/// Interface admittances and layer phases at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    /// `g_m` per medium, index 0 = incidence ambient.
    pub g: Vec<Complex64>,
    /// `g_m − g_{m−1}` for `m = 1..`, evaluated without cancellation where possible.
    pub dg: Vec<Complex64>,
    /// `δ_m` per layer.
    pub delta: Vec<Complex64>,
    pub omega: Complex64,
}

impl LayerParams {
    /// Builds parameters from raw admittances and phases; `g.len()` must be
    /// `delta.len() + 2` (a single interface has no phases).
    pub fn from_parts(g: Vec<Complex64>, delta: Vec<Complex64>, omega: Complex64) -> Result<Self> {
        if g.len() != delta.len() + 2 {
            return Err(Error::InvalidInput(format!(
                "{} admittances do not match {} layer phases",
                g.len(),
                delta.len()
            )));
        }
        let dg = g.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self { g, dg, delta, omega })
    }
}

/// Admittances and phases in recursion order (exit ambient first).
pub fn layer_params(stack: &Stack, omega: Complex64) -> Result<LayerParams> {
    let media = stack.num_media();
    let mut n = Vec::with_capacity(media);
    let mut chi = Vec::with_capacity(media);
    for i in (0..media).rev() {
        let m = stack.medium(i);
        chi.push(m.susceptibility(omega)?);
        n.push(m.eval_n(omega)?);
    }

    let normal = stack.theta0 == 0.0;
    let cos: Vec<Complex64> = if normal {
        alloc::vec![Complex64::new(1.0, 0.0); media]
    } else {
        let s = n[media - 1] * stack.theta0.sin();
        n.iter().map(|&nm| (Complex64::new(1.0, 0.0) - (s / nm) * (s / nm)).sqrt()).collect()
    };

    let g: Vec<Complex64> = match stack.polarization {
        Polarization::Te => n.iter().zip(&cos).map(|(&nm, &cm)| nm * cm).collect(),
        Polarization::Tm => n.iter().zip(&cos).map(|(&nm, &cm)| cm / nm).collect(),
    };

    let mut dg = Vec::with_capacity(media - 1);
    for i in 1..media {
        let direct = g[i] - g[i - 1];
        let accurate = match stack.polarization {
            // g_i² − g_{i−1}² = χ_i − χ_{i−1} for TE at any angle.
            Polarization::Te => stable_quotient(chi[i] - chi[i - 1], g[i] + g[i - 1], g[i], g[i - 1]),
            Polarization::Tm if normal => stable_quotient(chi[i - 1] - chi[i], n[i] + n[i - 1], n[i], n[i - 1])
                .map(|dn| dn / (n[i] * n[i - 1])),
            Polarization::Tm => None,
        };
        dg.push(accurate.unwrap_or(direct));
    }

    let c = stack.scale.c;
    let delta = stack
        .layers
        .iter()
        .rev()
        .enumerate()
        .map(|(j, layer)| n[j + 1] * cos[j + 1] * layer.thickness * omega / c)
        .collect();

    Ok(LayerParams { g, dg, delta, omega })
}

fn stable_quotient(num: Complex64, den: Complex64, a: Complex64, b: Complex64) -> Option<Complex64> {
    if den.norm() > 1e-8 * (a.norm() + b.norm()) {
        Some(num / den)
    } else {
        None
    }
}

/// Reflection numerator, shared denominator and transmission numerator.
///
/// The stored values are scaled by `exp(-log_scale)`; ratios are unaffected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferResult {
    pub z: Complex64,
    pub n: Complex64,
    pub t_numerator: Complex64,
    pub log_scale: f64,
}

impl TransferResult {
    pub fn true_z(&self) -> Complex64 {
        self.z * self.log_scale.exp()
    }

    pub fn true_n(&self) -> Complex64 {
        self.n * self.log_scale.exp()
    }

    pub fn true_t_numerator(&self) -> Complex64 {
        self.t_numerator * self.log_scale.exp()
    }

    /// `|N| < tol (|Z| + 1)` on the rescaled values.
    pub fn denominator_vanishes(&self, tol: f64) -> bool {
        self.n.norm() < tol * (self.z.norm() + 1.0)
    }

    /// `N / t_numerator`, the inverse transmission amplitude. It shares the
    /// zeros of `N` but is even in every interior index, hence single-valued
    /// across the branch cuts of `n`.
    pub fn mode_function(&self) -> Complex64 {
        self.n / self.t_numerator
    }

    /// `|N| / max(1, |Z|)` on the unscaled values.
    pub fn residual(&self) -> f64 {
        let s = self.log_scale.exp();
        (self.n.norm() * s) / (self.z.norm() * s).max(1.0)
    }
}

/// Runs the recursion on precomputed parameters.
pub fn recursion(params: &LayerParams) -> TransferResult {
    let g = &params.g;
    let dg = &params.dg;
    let mut z = dg[0];
    let mut n = g[1] + g[0];
    let mut log_scale = 0.0;
    rescale(&mut z, &mut n, &mut log_scale);

    for m in 2..g.len() {
        let sum = g[m] + g[m - 1];
        let diff = dg[m - 1];
        let delta = params.delta[m - 2];
        // e^{±iδ} · e^{−|Im δ|}, the dropped factor goes to log_scale.
        let shift = delta.im.abs();
        let ep = Complex64::new(0.0, 1.0) * delta - shift;
        let em = -Complex64::new(0.0, 1.0) * delta - shift;
        let (ep, em) = (ep.exp(), em.exp());
        let new_z = diff * em * n + sum * ep * z;
        let new_n = sum * em * n + diff * ep * z;
        z = new_z;
        n = new_n;
        log_scale += shift;
        rescale(&mut z, &mut n, &mut log_scale);
    }

    let interfaces = g.len() - 1;
    let mut log_t = Complex64::new(interfaces as f64 * core::f64::consts::LN_2, 0.0);
    let mut t_zero = false;
    for gi in &g[1..] {
        if gi.is_zero() {
            t_zero = true;
        }
        log_t += gi.ln();
    }
    let t_numerator = if t_zero {
        Complex64::zero()
    } else {
        (log_t - log_scale).exp()
    };
    TransferResult { z, n, t_numerator, log_scale }
}

fn rescale(z: &mut Complex64, n: &mut Complex64, log_scale: &mut f64) {
    let s = z.norm().max(n.norm());
    if s > 0.0 && s.is_finite() {
        *z /= s;
        *n /= s;
        *log_scale += s.ln();
    }
}

pub fn wolter_recursion(stack: &Stack, omega: Complex64) -> Result<TransferResult> {
    Ok(recursion(&layer_params(stack, omega)?))
}

/// Default relative tolerance for declaring `N = 0`.
pub const DENOMINATOR_TOL: f64 = 1e-12;

pub fn reflection(stack: &Stack, omega: Complex64) -> Result<Complex64> {
    reflection_with_tol(stack, omega, DENOMINATOR_TOL)
}

pub fn reflection_with_tol(stack: &Stack, omega: Complex64, tol: f64) -> Result<Complex64> {
    let r = wolter_recursion(stack, omega)?;
    if r.denominator_vanishes(tol) {
        return Err(Error::DenominatorZero { omega });
    }
    Ok(r.z / r.n)
}

pub fn transmission(stack: &Stack, omega: Complex64) -> Result<Complex64> {
    transmission_with_tol(stack, omega, DENOMINATOR_TOL)
}

pub fn transmission_with_tol(stack: &Stack, omega: Complex64, tol: f64) -> Result<Complex64> {
    let r = wolter_recursion(stack, omega)?;
    if r.denominator_vanishes(tol) {
        return Err(Error::DenominatorZero { omega });
    }
    Ok(r.t_numerator / r.n)
}

/// Inverse transmission amplitude `N / t_numerator` at `omega`.
pub fn mode_function(stack: &Stack, omega: Complex64) -> Result<Complex64> {
    Ok(wolter_recursion(stack, omega)?.mode_function())
}
