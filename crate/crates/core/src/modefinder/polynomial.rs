//! Stacks whose layers all share one phase `δ` (quarter-wave stacks).
//!
//! With `y = e^{2iδ}` the recursion becomes polynomial,
//!
//! ```text
//! Ñ_m = (g_m + g_{m−1}) Ñ_{m−1} + (g_m − g_{m−1}) y Z̃_{m−1}
//! Z̃_m = (g_m − g_{m−1}) Ñ_{m−1} + (g_m + g_{m−1}) y Z̃_{m−1}
//! ```
//!
//! and `N = e^{−iLδ} Ñ(y)` for `L` layers, so the modes are the roots of a
//! degree-`L` polynomial. Each root gives one `δ` per period `π`:
//! `δ = −(i/2) Log y + kπ`, with `Re δ ∈ [0, π)` for `k = 0`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::dispersion::{FrequencyScale, Material};
use crate::error::{Error, Result};
use crate::modefinder::{Method, Mode, ModeSet};
use crate::transfer::{Layer, Polarization, Stack};

const ABERTH_MAX_ITER: usize = 1000;

/// Horner evaluation of `p` (ascending coefficients) and `p'` at `z`.
pub fn eval_poly(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `|p(z)| / Σ |c_k| |z|^k`, the backward-error size of a root.
pub fn relative_residual(coeffs: &[Complex64], z: Complex64) -> f64 {
    let (p, _) = eval_poly(coeffs, z);
    let r = z.norm();
    let mut scale = 0.0;
    for c in coeffs.iter().rev() {
        scale = scale * r + c.norm();
    }
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

/// All roots of the polynomial with ascending coefficients, by Aberth–Ehrlich
/// iteration followed by a Newton polish.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let top = coeffs
        .iter()
        .rposition(|c| !c.is_zero())
        .ok_or_else(|| Error::InvalidInput("zero polynomial has no isolated roots".into()))?;
    let coeffs = &coeffs[..=top];
    let zeros_at_origin = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let p = &coeffs[zeros_at_origin..];
    let n = p.len() - 1;
    let mut roots = alloc::vec![Complex64::zero(); zeros_at_origin];
    if n == 0 {
        return Ok(roots);
    }

    let radius = (p[0].norm() / p[n].norm()).powf(1.0 / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = alloc::vec![false; n];
    let mut iterations = 0;
    while done.iter().any(|d| !d) {
        if iterations >= ABERTH_MAX_ITER {
            return Err(Error::NoConvergence { what: "Aberth iteration", iterations });
        }
        iterations += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, dv) = eval_poly(p, z[i]);
            if relative_residual(p, z[i]) <= 4.0 * f64::EPSILON {
                done[i] = true;
                continue;
            }
            let ratio = v / dv;
            let mut sum = Complex64::zero();
            for j in 0..n {
                if j != i {
                    sum += 1.0 / (z[i] - z[j]);
                }
            }
            let w = ratio / (1.0 - ratio * sum);
            if !w.is_finite() {
                z[i] += Complex64::new(radius * 1e-3, radius * 1e-3);
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[i].norm() {
                done[i] = true;
            }
        }
    }

    for root in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = eval_poly(p, *root);
            let next = *root - v / dv;
            if next.is_finite() && relative_residual(p, next) < relative_residual(p, *root) {
                *root = next;
            } else {
                break;
            }
        }
    }
    roots.extend(z);
    Ok(roots)
}

/// Stack of `num_layers` alternating layers of index `n_ratio` and 1, each of
/// optical thickness `c`, so that every layer phase equals `ω`. Media run
/// `1 | n_ratio, 1, …, n_ratio, 1 | n_ratio`, so every interface has contrast.
pub fn quarterwave_stack(n_ratio: f64, num_layers: usize) -> Result<Stack> {
    if !(n_ratio > 0.0) || !n_ratio.is_finite() {
        return Err(Error::InvalidInput(alloc::format!("index ratio must be > 0, got {n_ratio}")));
    }
    if num_layers == 0 || !num_layers.is_multiple_of(2) {
        return Err(Error::InvalidInput(alloc::format!(
            "quarter-wave stacks need an even, positive layer count, got {num_layers}"
        )));
    }
    if n_ratio == 1.0 {
        return Err(Error::DegenerateRatio);
    }
    let c = FrequencyScale::default().c;
    let layers = (0..num_layers)
        .map(|j| {
            let n = if j % 2 == 0 { n_ratio } else { 1.0 };
            Layer::new(Material::constant(n), c / n)
        })
        .collect();
    Stack::normal_incidence(Material::constant(1.0), layers, Material::constant(n_ratio))
}

/// Common optical thickness `n d` of the layers, if they share one.
pub fn common_optical_thickness(stack: &Stack) -> Result<f64> {
    if stack.is_dispersive() || stack.theta0 != 0.0 {
        return Err(Error::InvalidInput(
            "equal-phase reduction needs non-dispersive media at normal incidence".into(),
        ));
    }
    let mut common: Option<f64> = None;
    for (j, layer) in stack.layers.iter().enumerate() {
        let n = match layer.material {
            Material::Constant { n } if n.im == 0.0 => n.re,
            _ => return Err(Error::InvalidInput(alloc::format!("layer {j}: index must be real"))),
        };
        let opt = n * layer.thickness;
        match common {
            None => common = Some(opt),
            Some(c) if (opt - c).abs() <= 1e-12 * c.abs() => {}
            Some(c) => {
                return Err(Error::InvalidInput(alloc::format!(
                    "layer {j}: optical thickness {opt} differs from {c}"
                )))
            }
        }
    }
    common.ok_or_else(|| Error::InvalidInput("stack has no layers".into()))
}

/// Ascending coefficients of `Ñ(y)` for an equal-phase stack.
pub fn quarterwave_polynomial(stack: &Stack) -> Result<Vec<Complex64>> {
    common_optical_thickness(stack)?;
    let g: Vec<Complex64> = stack
        .media()
        .map(|m| {
            let n = m.eval_n(Complex64::zero())?;
            Ok(match stack.polarization {
                Polarization::Te => n,
                Polarization::Tm => 1.0 / n,
            })
        })
        .collect::<Result<_>>()?;
    if g.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::DegenerateRatio);
    }
    let mut n_poly = alloc::vec![g[1] + g[0]];
    let mut z_poly = alloc::vec![g[1] - g[0]];
    for m in 2..g.len() {
        let sum = g[m] + g[m - 1];
        let diff = g[m] - g[m - 1];
        let deg = n_poly.len();
        let mut new_n = alloc::vec![Complex64::zero(); deg + 1];
        let mut new_z = alloc::vec![Complex64::zero(); deg + 1];
        for k in 0..deg {
            new_n[k] += sum * n_poly[k];
            new_n[k + 1] += diff * z_poly[k];
            new_z[k] += diff * n_poly[k];
            new_z[k + 1] += sum * z_poly[k];
        }
        n_poly = new_n;
        z_poly = new_z;
    }
    Ok(n_poly)
}

/// `δ = −(i/2) Log y` with `Re δ ∈ [0, π)`.
pub fn delta_from_root(y: Complex64) -> Complex64 {
    let mut re = 0.5 * y.arg();
    if re < 0.0 {
        re += PI;
    }
    if re >= PI {
        re -= PI;
    }
    Complex64::new(re, -0.5 * y.norm().ln())
}

/// Modes of an equal-phase stack in the `δ` plane, one copy per period index.
pub fn equal_phase_modes(stack: &Stack, periods: RangeInclusive<i64>) -> Result<ModeSet> {
    let poly = quarterwave_polynomial(stack)?;
    let roots = polynomial_roots(&poly)?;
    let mut modes = Vec::with_capacity(roots.len() * periods.clone().count());
    for y in roots {
        if y.is_zero() {
            return Err(Error::DegenerateRatio);
        }
        let residual = relative_residual(&poly, y);
        let base = delta_from_root(y);
        for k in periods.clone() {
            modes.push(Mode {
                omega: base + Complex64::new(k as f64 * PI, 0.0),
                multiplicity: 1,
                method: Method::ExactPolynomial,
                residual,
            });
        }
    }
    Ok(ModeSet::new(modes, stack.fingerprint()))
}

/// Modes of [`quarterwave_stack`] in the `δ` plane. With the unit optical
/// thickness used there, `ω = δ c / (n₁ d₁) = δ`.
pub fn quarterwave_modes(n_ratio: f64, num_layers: usize, periods: RangeInclusive<i64>) -> Result<ModeSet> {
    equal_phase_modes(&quarterwave_stack(n_ratio, num_layers)?, periods)
}

/// Largest `|Im δ|` over a mode set.
pub fn max_abs_im(set: &ModeSet) -> f64 {
    set.modes.iter().map(|m| m.omega.im.abs()).fold(0.0, f64::max)
}

/// Widest root-free interval of `Re δ` inside `[lo, hi]` that contains `center`.
pub fn gap_around(set: &ModeSet, center: f64, lo: f64, hi: f64) -> Option<(f64, f64)> {
    if set.modes.iter().any(|m| m.omega.re == center) {
        return None;
    }
    let left = set.modes.iter().map(|m| m.omega.re).filter(|&r| r < center && r >= lo).fold(lo, f64::max);
    let right = set.modes.iter().map(|m| m.omega.re).filter(|&r| r > center && r <= hi).fold(hi, f64::min);
    Some((left, right))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_of_known_polynomial() {
        // (z − 1)(z + 2)(z − i) = z³ + (1 − i) z² + (−2 − i) z + 2i
        let coeffs = [c(0.0, 2.0), c(-2.0, -1.0), c(1.0, -1.0), c(1.0, 0.0)];
        let mut roots = polynomial_roots(&coeffs).unwrap();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let expected = [c(-2.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)];
        for (r, e) in roots.iter().zip(expected) {
            assert!((r - e).norm() < 1e-13, "{r} vs {e}");
        }
    }

    #[test]
    fn zero_roots_and_trailing_zeros() {
        let coeffs = [c(0.0, 0.0), c(0.0, 0.0), c(-4.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let mut roots = polynomial_roots(&coeffs).unwrap();
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert_eq!(roots.len(), 3);
        assert_eq!(roots[0], c(0.0, 0.0));
        assert_eq!(roots[1], c(0.0, 0.0));
        assert!((roots[2] - 4.0).norm() < 1e-14);
        assert!(polynomial_roots(&[c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn slab_polynomial_factorizes() {
        let n = 1.5;
        let s = Stack::slab(Material::constant(1.0), Material::constant(n), 1.0).unwrap();
        let poly = quarterwave_polynomial(&s).unwrap();
        assert_eq!(poly.len(), 2);
        let y = polynomial_roots(&poly).unwrap()[0];
        let expected = ((n + 1.0) / (n - 1.0)).powi(2);
        assert!((y - expected).norm() < 1e-12);
        let set = equal_phase_modes(&s, 0..=2).unwrap();
        for (k, m) in set.modes.iter().enumerate() {
            let d = c(k as f64 * PI, -((n + 1.0) / (n - 1.0)).ln());
            assert!((m.omega - d).norm() < 1e-13);
        }
    }

    #[test]
    fn quarterwave_degree_and_count() {
        for layers in [2, 8, 16] {
            let s = quarterwave_stack(1.5, layers).unwrap();
            assert_eq!(quarterwave_polynomial(&s).unwrap().len(), layers + 1);
            let set = quarterwave_modes(1.5, layers, 0..=0).unwrap();
            assert_eq!(set.len(), layers);
            for m in &set.modes {
                assert!(m.omega.re >= 0.0 && m.omega.re < PI);
                assert!(m.omega.im < 0.0);
                assert!(m.residual < 1e-13);
            }
        }
    }

    #[test]
    fn quarterwave_validation() {
        assert_eq!(quarterwave_stack(1.0, 8).unwrap_err(), Error::DegenerateRatio);
        assert!(quarterwave_stack(1.5, 7).is_err());
        assert!(quarterwave_stack(1.5, 0).is_err());
        assert!(quarterwave_stack(-1.5, 8).is_err());
    }

    #[test]
    fn unequal_phases_are_rejected() {
        let layers = alloc::vec![
            Layer::new(Material::constant(1.5), 1.0),
            Layer::new(Material::constant(2.0), 1.0),
        ];
        let s = Stack::normal_incidence(Material::constant(1.0), layers, Material::constant(1.0)).unwrap();
        assert!(quarterwave_polynomial(&s).is_err());
    }

    #[test]
    fn delta_map_range() {
        for y in [c(2.0, 0.0), c(-3.0, 0.0), c(0.0, 5.0), c(0.0, -5.0), c(-1.0, -1e-20)] {
            let d = delta_from_root(y);
            assert!(d.re >= 0.0 && d.re < PI);
            let back = (Complex64::i() * 2.0 * d).exp();
            assert!((back - y).norm() < 1e-12 * y.norm());
        }
    }
}
