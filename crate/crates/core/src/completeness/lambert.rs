//! Principal branch of the Lambert W function, `z = W(z) e^{W(z)}`.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

const MAX_ITER: usize = 100;

/// `W_branch(z)`; only the principal branch (0) is implemented.
pub fn lambert_w(z: Complex64, branch: i32) -> Result<Complex64> {
    if branch != 0 {
        return Err(Error::InvalidInput(alloc::format!("only the principal branch is supported, got {branch}")));
    }
    if !z.is_finite() {
        return Err(Error::InvalidInput(alloc::format!("W is undefined at {z}")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(z);
    }
    let e = core::f64::consts::E;
    // Distance to the branch point z = −1/e, in the variable of its series.
    let p2 = 2.0 * (e * z + 1.0);
    if p2.norm() < 1e-30 {
        return Ok(Complex64::new(-1.0, 0.0));
    }
    let mut w = initial_guess(z, p2, (z + (-1.0f64).exp()).norm());
    let tol = 1e-12 * (1.0 + z.norm());
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - z;
        if f.norm() <= 0.25 * tol {
            return Ok(w);
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        if !step.is_finite() {
            break;
        }
        w -= step;
        if step.norm() <= 4.0 * f64::EPSILON * w.norm().max(1.0) {
            break;
        }
    }
    if (w * w.exp() - z).norm() <= tol {
        Ok(w)
    } else {
        Err(Error::NoConvergence { what: "Lambert W Halley iteration", iterations: MAX_ITER })
    }
}

fn initial_guess(z: Complex64, p2: Complex64, to_branch_point: f64) -> Complex64 {
    if to_branch_point < 0.3 {
        // W = −1 + p − p²/3 + 11p³/72 around the branch point; the principal
        // square root of p² picks the principal branch.
        let p = p2.sqrt();
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    }
    if -1.0 < z.re && z.re < 1.5 && z.im.abs() < 1.0 && -2.5 * z.im.abs() - 0.2 < z.re {
        // Padé approximant at the origin.
        return z * (3.0 + 6.0 * z + z * z) / (3.0 + 9.0 * z + 5.0 * z * z);
    }
    let l1 = z.ln();
    l1 - l1.ln()
}

/// Whether `w` lies in the range of the principal branch.
pub fn is_principal(w: Complex64) -> bool {
    let (u, v) = (w.re, w.im);
    if v == 0.0 {
        return u >= -1.0;
    }
    v.abs() < core::f64::consts::PI && u > -v / v.tan()
}
