//! Refractive indices of the layer materials.
//!
//! A material is either frequency independent or a single Lorentz resonance,
//! `n²(ω) = 1 + f / (ω₀² − ω² − iΓω)`, under the `e^{−iωt}` time convention.
//! `n` is the principal square root of `n²`; quantities that matter for the
//! natural frequencies are even in each interior index, so the branch choice
//! only affects intermediate values.

use alloc::format;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Units of the frequency variable. Only the wave speed enters the numerics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyScale {
    pub c: f64,
}

impl FrequencyScale {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidInput(format!("wave speed must be > 0, got {c}")));
        }
        Ok(Self { c })
    }
}

impl Default for FrequencyScale {
    fn default() -> Self {
        Self { c: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Material {
    Constant { n: Complex64 },
    Lorentz { f: f64, omega0: f64, gamma: f64 },
}

impl Material {
    pub fn constant(n: f64) -> Self {
        Material::Constant { n: Complex64::new(n, 0.0) }
    }

    pub fn lorentz(f: f64, omega0: f64, gamma: f64) -> Result<Self> {
        let m = Material::Lorentz { f, omega0, gamma };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Material::Constant { n } => {
                if n.is_zero() || !n.is_finite() {
                    return Err(Error::InvalidInput(format!("constant index must be finite and nonzero, got {n}")));
                }
            }
            Material::Lorentz { f, omega0, gamma } => {
                if !(f > 0.0 && f.is_finite()) {
                    return Err(Error::InvalidInput(format!("oscillator strength must be > 0, got {f}")));
                }
                if !(omega0 > 0.0 && omega0.is_finite()) {
                    return Err(Error::InvalidInput(format!("resonance frequency must be > 0, got {omega0}")));
                }
                if !(gamma >= 0.0 && gamma.is_finite()) {
                    return Err(Error::InvalidInput(format!("damping must be >= 0, got {gamma}")));
                }
            }
        }
        Ok(())
    }

    pub fn is_dispersive(&self) -> bool {
        matches!(self, Material::Lorentz { .. })
    }

    /// `n² − 1`. Kept separate so interface contrasts can be formed without
    /// cancelling the leading 1.
    pub fn susceptibility(&self, omega: Complex64) -> Result<Complex64> {
        match *self {
            Material::Constant { n } => Ok(n * n - 1.0),
            Material::Lorentz { f, omega0, gamma } => {
                let denom = omega0 * omega0 - omega * omega - Complex64::i() * gamma * omega;
                if denom.is_zero() {
                    return Err(Error::PoleEvaluation { omega });
                }
                let chi = f / denom;
                if !chi.is_finite() {
                    return Err(Error::PoleEvaluation { omega });
                }
                Ok(chi)
            }
        }
    }

    pub fn index_squared(&self, omega: Complex64) -> Result<Complex64> {
        match *self {
            Material::Constant { n } => Ok(n * n),
            Material::Lorentz { .. } => Ok(self.susceptibility(omega)? + 1.0),
        }
    }

    /// Refractive index at complex frequency (principal branch for Lorentz media).
    pub fn eval_n(&self, omega: Complex64) -> Result<Complex64> {
        match *self {
            Material::Constant { n } => Ok(n),
            Material::Lorentz { .. } => Ok(self.index_squared(omega)?.sqrt()),
        }
    }

    /// The two zeros of `ω₀² − ω² − iΓω`, `−iΓ/2 ± √(ω₀² − Γ²/4)`, positive-real one first.
    pub fn pole_frequencies(&self) -> Result<(Complex64, Complex64)> {
        match *self {
            Material::Constant { .. } => Err(Error::NotDispersive),
            Material::Lorentz { omega0, gamma, .. } => {
                Ok(quadratic_pair(omega0 * omega0 - gamma * gamma / 4.0, gamma))
            }
        }
    }

    /// Zeros of `n²` (branch points of `n`), `−iΓ/2 ± √(ω₀² + f − Γ²/4)`.
    pub fn branch_points(&self) -> Result<(Complex64, Complex64)> {
        match *self {
            Material::Constant { .. } => Err(Error::NotDispersive),
            Material::Lorentz { f, omega0, gamma } => {
                Ok(quadratic_pair(omega0 * omega0 + f - gamma * gamma / 4.0, gamma))
            }
        }
    }

    /// Coefficient `A` of `n(ω) = 1 − A/(2ω²) + O(ω⁻³)`.
    pub fn high_freq_coefficient(&self) -> Result<f64> {
        match *self {
            Material::Constant { .. } => Err(Error::NotDispersive),
            Material::Lorentz { f, .. } => Ok(f),
        }
    }
}

fn quadratic_pair(discriminant: f64, gamma: f64) -> (Complex64, Complex64) {
    let root = Complex64::new(discriminant, 0.0).sqrt();
    let shift = Complex64::new(0.0, -gamma / 2.0);
    (shift + root, shift - root)
}

/// Free-function form of [`Material::eval_n`].
pub fn eval_n(material: &Material, omega: Complex64) -> Result<Complex64> {
    material.eval_n(omega)
}

/// Free-function form of [`Material::pole_frequencies`].
pub fn pole_frequencies(material: &Material) -> Result<(Complex64, Complex64)> {
    material.pole_frequencies()
}

/// Free-function form of [`Material::high_freq_coefficient`].
pub fn high_freq_coefficient(material: &Material) -> Result<f64> {
    material.high_freq_coefficient()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn weak_resonance() -> Material {
        Material::lorentz(0.25, 1.0, 1e-3).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn static_limit() {
        let n = weak_resonance().eval_n(c(0.0, 0.0)).unwrap();
        assert_relative_eq!(n.re, 1.25f64.sqrt(), epsilon = 1e-15);
        assert_eq!(n.im, 0.0);
    }

    #[test]
    fn constant_index_ignores_frequency() {
        let m = Material::constant(1.5);
        for w in [c(0.0, 0.0), c(3.0, -2.0), c(-1e6, 5.0)] {
            assert_eq!(m.eval_n(w).unwrap(), c(1.5, 0.0));
        }
    }

    #[test]
    fn high_frequency_expansion() {
        let w = 1e3;
        let n = weak_resonance().eval_n(c(w, 0.0)).unwrap();
        let expected = 1.0 - 0.25 / (2.0 * w * w);
        assert!(((n.re - expected) / expected).abs() < 1e-8);
    }

    #[test]
    fn poles_of_weakly_damped_resonance() {
        let (p, q) = weak_resonance().pole_frequencies().unwrap();
        assert_relative_eq!(p.re, (1.0f64 - 0.25e-6).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(p.im, -0.0005, epsilon = 1e-15);
        assert_relative_eq!(q.re, -p.re, epsilon = 1e-15);
        assert_relative_eq!(q.im, -0.0005, epsilon = 1e-15);
        assert!((p.re - 0.999999875).abs() < 1e-9);
    }

    #[test]
    fn undamped_poles_are_real() {
        let (p, q) = Material::lorentz(0.3, 2.0, 0.0).unwrap().pole_frequencies().unwrap();
        assert_eq!(p, c(2.0, 0.0));
        assert_eq!(q, c(-2.0, 0.0));
    }

    #[test]
    fn critical_damping_double_pole() {
        let (p, q) = Material::lorentz(0.3, 1.5, 3.0).unwrap().pole_frequencies().unwrap();
        assert_eq!(p, q);
        assert_relative_eq!(p.im, -1.5, epsilon = 1e-15);
        assert_eq!(p.re, 0.0);
    }

    #[test]
    fn constant_has_no_poles_or_expansion() {
        let m = Material::constant(2.0);
        assert_eq!(m.pole_frequencies(), Err(Error::NotDispersive));
        assert_eq!(m.high_freq_coefficient(), Err(Error::NotDispersive));
        assert_eq!(m.branch_points(), Err(Error::NotDispersive));
    }

    #[test]
    fn high_freq_coefficient_matches_fit() {
        // Least squares of 1 - n against 1/(2 w^2) on two frequencies.
        for f in [0.25, 1.0] {
            let m = Material::lorentz(f, 1.0, 1e-3).unwrap();
            let xs = [1e3, 1e4];
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for w in xs {
                let x = 1.0 / (2.0 * w * w);
                let y = 1.0 - m.eval_n(c(w, 0.0)).unwrap().re;
                sxy += x * y;
                sxx += x * x;
            }
            let fitted = sxy / sxx;
            assert!((fitted - m.high_freq_coefficient().unwrap()).abs() < 1e-5 * f);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(Material::lorentz(0.0, 1.0, 0.0).is_err());
        assert!(Material::lorentz(0.1, -1.0, 0.0).is_err());
        assert!(Material::lorentz(0.1, 1.0, -1e-3).is_err());
        assert!(Material::Constant { n: c(0.0, 0.0) }.validate().is_err());
    }

    #[test]
    fn exact_pole_is_reported() {
        let m = Material::lorentz(0.25, 1.0, 0.0).unwrap();
        assert_eq!(m.eval_n(c(1.0, 0.0)), Err(Error::PoleEvaluation { omega: c(1.0, 0.0) }));
    }

    #[test]
    fn large_frequency_tends_to_one() {
        for angle in [0.1, 0.7, 1.3, 2.0, 2.9, -0.4, -1.5, -2.5] {
            let w = Complex64::from_polar(1e4, angle);
            for f in [0.1, 0.5, 1.0] {
                let n = Material::lorentz(f, 1.0, 1e-3).unwrap().eval_n(w).unwrap();
                assert!((n - 1.0).norm() < 1e-6);
            }
        }
    }

    proptest! {
        #[test]
        fn conjugation_symmetry(re in -5.0f64..5.0, im in -3.0f64..3.0,
                                f in 0.01f64..2.0, w0 in 0.2f64..3.0, g in 0.0f64..0.5) {
            let m = Material::lorentz(f, w0, g).unwrap();
            let w = c(re, im);
            let lhs = m.eval_n(-w.conj()).unwrap();
            let rhs = m.eval_n(w).unwrap().conj();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }

        #[test]
        fn pole_residual(f in 0.01f64..2.0, w0 in 0.2f64..3.0, g in 0.0f64..4.0) {
            let m = Material::lorentz(f, w0, g).unwrap();
            let (p, q) = m.pole_frequencies().unwrap();
            for w in [p, q] {
                let r = w0 * w0 - w * w - Complex64::i() * g * w;
                prop_assert!(r.norm() < 1e-12 * w0 * w0);
                prop_assert!(w.im <= 0.0);
            }
        }
    }
}
