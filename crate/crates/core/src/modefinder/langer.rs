//! Exponential-sum form of the denominator for non-dispersive stacks.
//!
//! With real layer transit times `τ_j = n_j d_j cosθ_j / c`, the recursion
//! expands `N(ω) e^{iωT}` (`T = Σ τ_j`) into `Σ_j b_j e^{iωB_j}` with
//! `0 = B_0 < B_1 < … < B_J = 2T`. Such sums have all their zeros in a
//! horizontal strip, and any interval of real parts of length `l` holds
//! between `B_J l / 2π − (J + 1)` and `B_J l / 2π + (J + 1)` of them.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::transfer::{layer_params, Stack};

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialSum {
    /// `(B_j, b_j)` with strictly increasing `B_j`, starting at 0.
    pub terms: Vec<(f64, Complex64)>,
}

/// Relative size below which an expanded coefficient is treated as cancelled.
const DROP_TOL: f64 = 1e-13;

impl ExponentialSum {
    pub fn eval(&self, omega: Complex64) -> Complex64 {
        self.terms.iter().map(|&(b, c)| c * (Complex64::i() * omega * b).exp()).sum()
    }

    /// `B_J`, the spread of the exponents.
    pub fn spread(&self) -> f64 {
        self.terms.last().map_or(0.0, |t| t.0) - self.terms.first().map_or(0.0, |t| t.0)
    }

    /// `J + 1`, the number of distinct exponents.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Bounds `(lower, upper)` on `Im ω` over all zeros, from dominance of the
    /// first or last term.
    pub fn strip(&self) -> (f64, f64) {
        let j = self.terms.len();
        if j < 2 {
            return (0.0, 0.0);
        }
        let (b_last, c_last) = self.terms[j - 1];
        let b_prev = self.terms[j - 2].0;
        let rest_high: f64 = self.terms[..j - 1].iter().map(|t| t.1.norm()).sum();
        let c_plus = ((rest_high / c_last.norm()).ln() / (b_last - b_prev)).max(0.0);
        let (b0, c0) = self.terms[0];
        let b1 = self.terms[1].0;
        let rest_low: f64 = self.terms[1..].iter().map(|t| t.1.norm()).sum();
        let c_minus = ((rest_low / c0.norm()).ln() / (b1 - b0)).max(0.0);
        (-c_plus, c_minus)
    }

    /// Lower and upper bound on the number of zeros with real part in an
    /// interval of length `l`.
    pub fn count_bounds(&self, l: f64) -> (f64, f64) {
        let mean = self.spread() * l / (2.0 * core::f64::consts::PI);
        let slack = self.num_terms() as f64;
        (mean - slack, mean + slack)
    }
}

/// Expands `N(ω) e^{iωT}` for a stack with real, frequency-independent
/// admittances and transit times.
pub fn exponential_sum(stack: &Stack) -> Result<ExponentialSum> {
    if stack.is_dispersive() {
        return Err(Error::InvalidInput("exponential sums need non-dispersive media".into()));
    }
    // At ω = 1 the phases equal the transit times.
    let p = layer_params(stack, Complex64::new(1.0, 0.0))?;
    let real = |v: Complex64| v.im.abs() <= 1e-14 * v.re.abs();
    if !p.g.iter().all(|&g| real(g)) || !p.delta.iter().all(|&d| real(d) && d.re > 0.0) {
        return Err(Error::InvalidInput(
            "exponential sums need real admittances and transit times".into(),
        ));
    }
    let tau: Vec<f64> = p.delta.iter().map(|d| d.re).collect();
    let total: f64 = tau.iter().sum();
    let merge = 1e-12 * total;

    let mut n_terms = alloc::vec![(0.0, p.g[1] + p.g[0])];
    let mut z_terms = alloc::vec![(0.0, p.dg[0])];
    for m in 2..p.g.len() {
        let sum = p.g[m] + p.g[m - 1];
        let diff = p.dg[m - 1];
        let t = tau[m - 2];
        let mut new_n = Vec::with_capacity(2 * n_terms.len());
        let mut new_z = Vec::with_capacity(2 * n_terms.len());
        for &(k, c) in &n_terms {
            new_n.push((k - t, sum * c));
            new_z.push((k - t, diff * c));
        }
        for &(k, c) in &z_terms {
            new_n.push((k + t, diff * c));
            new_z.push((k + t, sum * c));
        }
        n_terms = combine(new_n, merge);
        z_terms = combine(new_z, merge);
    }

    let biggest = n_terms.iter().map(|t| t.1.norm()).fold(0.0, f64::max);
    let terms = n_terms
        .into_iter()
        .filter(|t| t.1.norm() > DROP_TOL * biggest)
        .map(|(k, c)| (k + total, c))
        .collect();
    Ok(ExponentialSum { terms })
}

fn combine(mut terms: Vec<(f64, Complex64)>, merge: f64) -> Vec<(f64, Complex64)> {
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, Complex64)> = Vec::with_capacity(terms.len());
    for (k, c) in terms {
        match out.last_mut() {
            Some(last) if (k - last.0).abs() <= merge => last.1 += c,
            _ => out.push((k, c)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::Material;
    use crate::transfer::{recursion, Layer};

    #[test]
    fn slab_sum_has_two_terms() {
        let s = Stack::slab(Material::constant(1.0), Material::constant(1.5), 1.0).unwrap();
        let e = exponential_sum(&s).unwrap();
        assert_eq!(e.num_terms(), 2);
        assert!((e.spread() - 3.0).abs() < 1e-14);
        // Zeros solve e^{3iω} = 25, so the lower strip bound ln 25 / 3 is attained.
        let (lo, hi) = e.strip();
        assert!((lo + 25f64.ln() / 3.0).abs() < 1e-12);
        assert_eq!(hi, 0.0);
    }

    #[test]
    fn sum_matches_recursion() {
        let layers = alloc::vec![
            Layer::new(Material::constant(2.1), 0.3),
            Layer::new(Material::constant(1.4), 0.8),
            Layer::new(Material::constant(3.0), 0.2),
        ];
        let s = Stack::normal_incidence(Material::constant(1.0), layers, Material::constant(1.52)).unwrap();
        let e = exponential_sum(&s).unwrap();
        assert_eq!(e.num_terms(), 8);
        let t = s.layers.iter().map(|l| l.thickness * l.material.eval_n(Complex64::new(0.0, 0.0)).unwrap().re).sum::<f64>();
        for w in [Complex64::new(0.7, -0.2), Complex64::new(3.3, 0.4), Complex64::new(-1.1, -1.0)] {
            let r = recursion(&layer_params(&s, w).unwrap());
            let direct = r.true_n() * (Complex64::i() * w * t).exp();
            let sum = e.eval(w);
            assert!((direct - sum).norm() < 1e-12 * (1.0 + sum.norm()));
        }
    }

    #[test]
    fn dispersive_stack_is_rejected() {
        let s = Stack::slab(Material::constant(1.0), Material::lorentz(0.25, 1.0, 1e-3).unwrap(), 1.0).unwrap();
        assert!(exponential_sum(&s).is_err());
    }
}
