//! Closed forms for the two table integrals behind the interference formulas:
//!
//! ```text
//! int_0^pi dphi / (a + b cos phi)^(n+1) = pi P_n(a / sqrt(a^2 - b^2)) / (a^2 - b^2)^((n+1)/2)
//! int 2 t sqrt(a3) dt / sqrt(a1 + a2 t^2 + a3 t^4)   (log / arcsinh / log-linear branches)
//! ```
//!
//! The complex-parameter versions use principal branches throughout. They are
//! only ever consumed through real-valued end results, which the callers
//! cross-check numerically.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Relative width of the band around `4 a1 a3 - a2^2 = 0` that is treated as
/// the degenerate branch of [`identity2_antiderivative`].
pub const IDENTITY2_DEADBAND: f64 = 1e-12;

/// Legendre polynomial `P_n(x)` by the three-term recurrence.
pub fn legendre(n: u32, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

pub fn legendre_complex(n: u32, x: Complex64) -> Complex64 {
    let (mut prev, mut cur) = (Complex64::new(1.0, 0.0), x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let k = f64::from(k);
        let next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `int_0^pi dphi / (a + b cos phi)^(n+1)` for real `a > |b|`.
pub fn identity1(a: f64, b: f64, n: u32) -> Result<f64> {
    if !(a > b.abs()) {
        return Err(Error::Domain(format!(
            "identity1 requires a > |b|, got a = {a}, b = {b}"
        )));
    }
    let q2 = a * a - b * b;
    let q = q2.sqrt();
    Ok(PI * legendre(n, a / q) / q.powi(n as i32 + 1))
}

/// Complex-parameter version of [`identity1`] with principal square roots.
///
/// Valid when `a + b cos(phi)` stays off the closed negative real axis for
/// every `phi` in `[0, pi]`, which covers the shifted arguments `a - j sqrt(c)`
/// that appear in the path loss partial fractions.
pub fn identity1_complex(a: Complex64, b: Complex64, n: u32) -> Result<Complex64> {
    let q2 = a * a - b * b;
    if q2.norm() == 0.0 {
        return Err(Error::Domain("identity1 requires a^2 != b^2".into()));
    }
    let q = q2.sqrt();
    Ok(PI * legendre_complex(n, a / q) / q.powi(n as i32 + 1))
}

/// Antiderivative of `2 t sqrt(a3) / sqrt(a1 + a2 t^2 + a3 t^4)` in `t`.
///
/// With `delta = 4 a1 a3 - a2^2` the branch is
///
/// * `delta < 0`: `ln|2 sqrt(a3 R) + 2 a3 t^2 + a2| - ln sqrt(-delta)`
/// * `delta > 0`: `arcsinh((2 a3 t^2 + a2) / sqrt(delta))`
/// * `delta = 0`: `sign(v) ln|v|` with `v = 2 a3 t^2 + a2`
///
/// The additive constants differ between branches; only differences of the
/// returned value are meaningful.
pub fn identity2_antiderivative(t: f64, a1: f64, a2: f64, a3: f64) -> Result<f64> {
    if !(a3 > 0.0) {
        return Err(Error::Domain(format!("identity2 requires a3 > 0, got {a3}")));
    }
    let t2 = t * t;
    let r = a1 + a2 * t2 + a3 * t2 * t2;
    if !(r > 0.0) {
        return Err(Error::Domain(format!(
            "identity2 requires R(t) > 0, got R({t}) = {r}"
        )));
    }
    let delta = 4.0 * a1 * a3 - a2 * a2;
    let v = 2.0 * a3 * t2 + a2;
    let band = IDENTITY2_DEADBAND * (4.0 * (a1 * a3).abs() + a2 * a2);
    if delta.abs() < band {
        if v == 0.0 {
            return Err(Error::Domain("identity2 degenerate branch at its singular point".into()));
        }
        Ok(v.signum() * v.abs().ln())
    } else if delta > 0.0 {
        Ok((v / delta.sqrt()).asinh())
    } else {
        let w = 2.0 * (a3 * r).sqrt() + v;
        Ok(w.abs().ln() - 0.5 * (-delta).ln())
    }
}

/// Principal-branch `ln(2 sqrt(a3 R) + 2 a3 t^2 + a2)` for complex coefficients.
pub fn identity2_log_complex(t: f64, a1: Complex64, a2: Complex64, a3: Complex64) -> Complex64 {
    let t2 = t * t;
    let r = a1 + a2 * t2 + a3 * t2 * t2;
    (2.0 * (a3 * r).sqrt() + 2.0 * a3 * t2 + a2).ln()
}
