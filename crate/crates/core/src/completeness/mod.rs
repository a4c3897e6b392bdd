//! Canonical products over eigenvalue sets and the completeness test.
//!
//! `F(z) = Π_{m≠0} (1 − z/λ_m)` is accumulated in log space. Factors for `m`
//! and `−m` can be paired, which makes the partial products of the usual
//! sets converge like `1/M`; the remaining tail is then estimated by the
//! midpoint-rule integral `∫_{M+½}^∞ log(pair(t)) dt` of an eigenvalue law.

pub mod classify;
pub mod lambert;
pub mod lconst;

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::dispersion::Material;
use crate::error::{Error, Result};
use crate::modefinder::ModeSet;

pub use classify::{classify, classify_with, Classification, ClassifyOptions, CompletenessReport};
pub use lambert::lambert_w;
pub use lconst::{residue_bound, verify_l_constancy, LConstancy};

/// How natural frequencies become product eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZMap {
    /// `z = n(ω)` of a resonant material.
    NearResonance(Material),
    /// `z = ω d / c`.
    LargeFrequency { d: f64, c: f64 },
}

impl ZMap {
    pub fn apply(&self, omega: Complex64) -> Result<Complex64> {
        match *self {
            ZMap::NearResonance(m) => m.eval_n(omega),
            ZMap::LargeFrequency { d, c } => Ok(omega * d / c),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ZMap::NearResonance(_) => "near-resonance",
            ZMap::LargeFrequency { .. } => "large-frequency",
        }
    }
}

/// Closed-form eigenvalues used to generate sets and to model the tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigenvalueLaw {
    /// `λ_{±m} = ±spacing (m − shift)` for `m ≥ 1`.
    Arithmetic { spacing: f64, shift: f64 },
    /// `λ_m = mπ + i log(4m²π²/(A d²))` for `m ≠ 0`.
    LargeFrequency { a: f64, d: f64 },
}

impl EigenvalueLaw {
    /// Eigenvalue at a real (possibly non-integer) index `t ≠ 0`.
    pub fn eval(&self, t: f64) -> Complex64 {
        match *self {
            EigenvalueLaw::Arithmetic { spacing, shift } => {
                Complex64::new(t.signum() * spacing * (t.abs() - shift), 0.0)
            }
            EigenvalueLaw::LargeFrequency { a, d } => {
                let mp = t * PI;
                Complex64::new(mp, (4.0 * mp * mp / (a * d * d)).ln())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            EigenvalueLaw::Arithmetic { spacing, shift } => spacing > 0.0 && shift.is_finite() && shift < 1.0,
            EigenvalueLaw::LargeFrequency { a, d } => a > 0.0 && d > 0.0 && a.is_finite() && d.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(alloc::format!("invalid eigenvalue law {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailModel {
    None,
    /// Pair `±m` factors and add the law's integral tail beyond the truncation.
    AsymptoticPairing,
}

impl TailModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            TailModel::None => "none",
            TailModel::AsymptoticPairing => "asymptotic-pairing",
        }
    }
}

/// Smallest truncation accepted for a product.
pub const MIN_TRUNCATION: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalProduct {
    /// `(m, λ_m)` with `m ≠ 0`, the retained factors.
    pub factors: Vec<(i64, Complex64)>,
    /// Largest retained `|m|`.
    pub truncation: usize,
    pub tail_model: TailModel,
    /// Law continuing the set past the truncation (needed for the tail).
    pub law: Option<EigenvalueLaw>,
    /// Where the tail comes from, for reports.
    pub tail_provenance: Option<&'static str>,
}

/// `log F(z)` together with an estimate of the error of the tail term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogProduct {
    pub log: Complex64,
    pub tail: Complex64,
    pub tail_error: f64,
}

impl CanonicalProduct {
    /// The law's eigenvalues for `m = ±1..=±truncation`.
    pub fn from_law(law: EigenvalueLaw, truncation: usize, tail_model: TailModel) -> Result<Self> {
        law.validate()?;
        let mut factors = Vec::with_capacity(2 * truncation);
        for m in 1..=truncation as i64 {
            factors.push((m, law.eval(m as f64)));
            factors.push((-m, law.eval(-(m as f64))));
        }
        let mut cp = Self { factors, truncation, tail_model, law: Some(law), tail_provenance: Some("law") };
        cp.normalize()?;
        Ok(cp)
    }

    /// Eigenvalues from natural frequencies under `z_map`. Modes are numbered
    /// outward from the origin by real part, positive real parts getting
    /// `m = 1, 2, …` and the others `m = −1, −2, …`. A `law` extends the set
    /// beyond the largest index for the tail.
    pub fn from_modes(modes: &ModeSet, z_map: ZMap, tail_model: TailModel, law: Option<EigenvalueLaw>) -> Result<Self> {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for m in &modes.modes {
            let z = z_map.apply(m.omega)?;
            if z.re > 0.0 {
                pos.push(z);
            } else {
                neg.push(z);
            }
        }
        pos.sort_by(|a, b| a.re.total_cmp(&b.re));
        neg.sort_by(|a, b| b.re.total_cmp(&a.re));
        let mut factors = Vec::with_capacity(pos.len() + neg.len());
        factors.extend(pos.iter().enumerate().map(|(i, &z)| (i as i64 + 1, z)));
        factors.extend(neg.iter().enumerate().map(|(i, &z)| (-(i as i64) - 1, z)));
        let truncation = pos.len().max(neg.len());
        let provenance = match z_map {
            ZMap::NearResonance(_) => "near-resonance family",
            ZMap::LargeFrequency { .. } => "asymptotic family",
        };
        let mut cp = Self {
            factors,
            truncation,
            tail_model,
            law,
            tail_provenance: law.map(|_| provenance),
        };
        cp.normalize()?;
        Ok(cp)
    }

    /// Drops the factor with index `m`.
    pub fn without(mut self, m: i64) -> Self {
        self.factors.retain(|f| f.0 != m);
        self
    }

    /// The same set continued by its law up to `truncation`.
    pub fn extended(&self, truncation: usize) -> Result<Self> {
        let law = self.law.ok_or_else(|| Error::InvalidInput("extending a product needs an eigenvalue law".into()))?;
        let mut cp = self.clone();
        for m in self.truncation as i64 + 1..=truncation as i64 {
            cp.factors.push((m, law.eval(m as f64)));
            cp.factors.push((-m, law.eval(-(m as f64))));
        }
        cp.truncation = truncation.max(self.truncation);
        cp.normalize()?;
        Ok(cp)
    }

    /// Orders factors as `−1, 1, −2, 2, …` so that pairs are adjacent.
    fn normalize(&mut self) -> Result<()> {
        self.factors.sort_by_key(|f| (f.0.unsigned_abs(), f.0));
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation < MIN_TRUNCATION {
            return Err(Error::InvalidInput(alloc::format!(
                "truncation {} below the minimum {MIN_TRUNCATION}",
                self.truncation
            )));
        }
        if let Some(&(m, _)) = self.factors.iter().find(|f| f.0 == 0 || f.1 == Complex64::new(0.0, 0.0)) {
            return Err(Error::InvalidInput(alloc::format!("factor {m} has a zero eigenvalue or index")));
        }
        if self.tail_model == TailModel::AsymptoticPairing && self.law.is_none() {
            return Err(Error::InvalidInput("asymptotic pairing needs an eigenvalue law for the tail".into()));
        }
        Ok(())
    }

    /// `|λ_m| / (π|m|)` must stay in `[0.5, 2]` over the upper half of the retained indices.
    pub fn check_ratio(&self) -> Result<()> {
        let half = (self.truncation / 2) as i64;
        for &(m, l) in &self.factors {
            if m.abs() > half {
                let ratio = l.norm() / (PI * m.abs() as f64);
                if !(0.5..=2.0).contains(&ratio) {
                    return Err(Error::RatioConditionViolated { index: m, ratio });
                }
            }
        }
        Ok(())
    }

    /// `log F(z)` (a branch of it, with the tail already added).
    pub fn eval_log(&self, z: Complex64) -> Result<LogProduct> {
        self.check_ratio()?;
        for &(m, l) in &self.factors {
            if (z - l).norm() <= 1e-12 * l.norm() {
                return Err(Error::EigenvalueHit { index: m });
            }
        }
        let mut log = Complex64::new(0.0, 0.0);
        match self.tail_model {
            TailModel::None => {
                for &(_, l) in &self.factors {
                    log += ln_1p(-z / l);
                }
                Ok(LogProduct { log, tail: Complex64::new(0.0, 0.0), tail_error: 0.0 })
            }
            TailModel::AsymptoticPairing => {
                let by_index = &self.factors;
                let mut i = 0;
                while i < by_index.len() {
                    let (m, l) = by_index[i];
                    if i + 1 < by_index.len() && by_index[i + 1].0 == -m {
                        let l2 = by_index[i + 1].1;
                        log += pair_log_of(l, l2, z);
                        i += 2;
                    } else {
                        log += ln_1p(-z / l);
                        i += 1;
                    }
                }
                let law = self.law.expect("validated");
                let (tail, tail_error) = tail_integral(&law, self.truncation as f64 + 0.5, z);
                Ok(LogProduct { log: log + tail, tail, tail_error })
            }
        }
    }

    /// `F(z)`; exactly 0 when `z` coincides with a retained eigenvalue.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self.eval_log(z) {
            Ok(lp) => Ok(lp.log.exp()),
            Err(Error::EigenvalueHit { .. }) => Ok(Complex64::new(0.0, 0.0)),
            Err(e) => Err(e),
        }
    }
}

/// Free-function form of [`CanonicalProduct::eval`].
pub fn eval_canonical_product(cp: &CanonicalProduct, z: Complex64) -> Result<Complex64> {
    cp.eval(z)
}

/// `log((1 − z/a)(1 − z/b))` without forming the product, which would round
/// to 1 far out in the tail.
fn pair_log_of(a: Complex64, b: Complex64, z: Complex64) -> Complex64 {
    let ab = a * b;
    ln_1p(z * (z - a - b) / ab)
}

fn pair_log(law: &EigenvalueLaw, t: f64, z: Complex64) -> Complex64 {
    pair_log_of(law.eval(t), law.eval(-t), z)
}

/// `log(1 + w)`, accurate for small `w`.
fn ln_1p(w: Complex64) -> Complex64 {
    let u = 1.0 + w;
    let d = u - 1.0;
    if d == Complex64::new(0.0, 0.0) {
        w
    } else {
        u.ln() * (w / d)
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1], 10 points.
const GL_NODES: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_WEIGHTS: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// `∫_T^∞ log pair(t) dt` via `t = T/u` on geometrically graded panels of
/// `u ∈ (0, 1]`, plus the size of the leading midpoint-rule correction
/// `|g'(T)| / 24` as the error estimate of replacing the sum by the integral.
fn tail_integral(law: &EigenvalueLaw, t0: f64, z: Complex64) -> (Complex64, f64) {
    let mut total = Complex64::new(0.0, 0.0);
    let mut hi = 1.0;
    for _ in 0..60 {
        let lo = hi * 0.5;
        let mid = 0.5 * (hi + lo);
        let half = 0.5 * (hi - lo);
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            for u in [mid - half * x, mid + half * x] {
                let t = t0 / u;
                total += w * half * pair_log(law, t, z) * (t0 / (u * u));
            }
        }
        hi = lo;
    }
    // The correction is only meaningful when the factors past the truncation
    // are all close to 1.
    if z.norm() > 0.5 * law.eval(t0).norm() {
        return (total, f64::INFINITY);
    }
    let h = 1e-3 * t0;
    let deriv = (pair_log(law, t0 + h, z) - pair_log(law, t0 - h, z)) / (2.0 * h);
    (total, deriv.norm() / 24.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine(m: usize, tail: TailModel) -> CanonicalProduct {
        CanonicalProduct::from_law(EigenvalueLaw::Arithmetic { spacing: PI, shift: 0.0 }, m, tail).unwrap()
    }

    #[test]
    fn sine_product_at_half_pi() {
        let f = sine(100_000, TailModel::AsymptoticPairing).eval(Complex64::new(PI / 2.0, 0.0)).unwrap();
        assert!((f - 2.0 / PI).norm() < 1e-10, "{f}");
    }

    #[test]
    fn cosine_product_at_origin() {
        let cp = CanonicalProduct::from_law(EigenvalueLaw::Arithmetic { spacing: PI, shift: 0.5 }, 1000, TailModel::AsymptoticPairing)
            .unwrap();
        assert_eq!(cp.eval(Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
        let z = Complex64::new(1.3, 0.4);
        assert!((cp.eval(z).unwrap() - z.cos()).norm() < 1e-9);
    }

    #[test]
    fn exact_eigenvalue_gives_zero() {
        let cp = sine(200, TailModel::AsymptoticPairing);
        assert_eq!(cp.eval(Complex64::new(3.0 * PI, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(cp.eval_log(Complex64::new(-3.0 * PI, 0.0)), Err(Error::EigenvalueHit { index: -3 }));
    }

    #[test]
    fn tail_integral_matches_closed_form() {
        // Σ_{m>M} log(1 − z²/(m²π²)) for small z is about −z²/(π²(M + ½)).
        let law = EigenvalueLaw::Arithmetic { spacing: PI, shift: 0.0 };
        let z = Complex64::new(0.3, 0.0);
        let (tail, _) = tail_integral(&law, 1000.5, z);
        let expected = -(z * z) / (PI * PI * 1000.5);
        assert!((tail - expected).norm() < 1e-12);
    }

    #[test]
    fn pairing_matches_unpaired() {
        let z = Complex64::new(7.3, 0.2);
        let a = sine(500, TailModel::None).eval(z).unwrap();
        let mut cp = sine(500, TailModel::AsymptoticPairing);
        let b = cp.eval_log(z).unwrap();
        assert!((a - (b.log - b.tail).exp()).norm() < 1e-10 * a.norm());
        cp.tail_model = TailModel::None;
        assert!((cp.eval(z).unwrap() - a).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn validation() {
        let law = EigenvalueLaw::Arithmetic { spacing: PI, shift: 0.0 };
        assert!(CanonicalProduct::from_law(law, 50, TailModel::None).is_err());
        let mut cp = sine(200, TailModel::None);
        cp.factors[0].1 = Complex64::new(0.1, 0.0);
        assert!(matches!(cp.check_ratio(), Ok(())));
        cp.factors[399].1 = Complex64::new(10.0, 0.0);
        assert!(matches!(cp.check_ratio(), Err(Error::RatioConditionViolated { index: 200, .. })));
        let mut cp = sine(200, TailModel::None);
        cp.law = None;
        cp.tail_model = TailModel::AsymptoticPairing;
        assert!(cp.validate().is_err());
    }
}
