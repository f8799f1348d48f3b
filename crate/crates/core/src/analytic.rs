//! Closed-form interference statistics at a receiver at distance `y0` from
//! the origin.
//!
//! The mean interference is `lambda A_alpha(y0, c)` where the
//! interference-driving function `A_alpha` collapses the 2D Campbell integral
//! `int l(|x - y0|) F(|x|) dx` to a 1D integral against `dF`:
//!
//! ```text
//! A(y0, c) = F(inf) [H(inf) - H(0)] - int_0^inf (H(r) - H(0)) dF(r)
//! ```
//!
//! where `H` is the radial antiderivative of the angular integral of the path
//! loss. For `alpha = 2`, `H(r) = pi arcsinh((r^2 + c - y0^2) / (2 y0 sqrt c))`;
//! for `alpha = 4`, `H(r) = pi / (2 sqrt c) * angle_term(r, c, y0)`. Writing
//! the antiderivative relative to `H(0)` is algebraically the same as the
//! usual boundary-term form but has no `0 * inf` or `inf - inf` pieces, so
//! `y0 = 0` needs no special casing. `dF` includes the jump set of the shape.
//!
//! Rayleigh fading turns the Laplace transform into
//! `exp(-lambda s A(y0, s + c))` and the outage probability into
//! `1 - L(beta (c + d^alpha)) exp(-beta eta)`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{NetworkScenario, PathLossExponent, ShapeFunction};
use crate::quadrature::{integrate_piecewise, QuadratureSpec, Upper};

/// Quadrature settings used by the scenario-level functions.
pub fn analysis_spec() -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: 1e-13,
        rel_tol: 1e-10,
        max_subdivisions: 4000,
    }
}

/// Value of an interference-driving function together with its pieces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterferenceDrivingResult {
    pub value: f64,
    /// Error estimate of the `dF` integral.
    pub quadrature_error: f64,
    /// `F(inf) [H(inf) - H(0)]`; zero whenever `F` vanishes at infinity.
    pub boundary_term: f64,
}

/// Arguments of `kappa(t, a1, a2)` with `t = r`, `a1 = c_like`, `a2 = y0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KappaArgs {
    pub r: f64,
    pub c_like: f64,
    pub y0: f64,
}

/// `kappa = (r^2 - y0^2 - j sqrt c) / sqrt((sqrt c + j (r^2 + y0^2))^2 + 4 r^2 y0^2)`,
/// principal square root.
pub fn kappa(args: KappaArgs) -> Result<Complex64> {
    let KappaArgs { r, c_like, y0 } = args;
    check_c(c_like)?;
    let sc = c_like.sqrt();
    let (r2, y2) = (r * r, y0 * y0);
    let num = Complex64::new(r2 - y2, -sc);
    let den = (Complex64::new(sc, r2 + y2).powi(2) + 4.0 * r2 * y2).sqrt();
    if den.norm() == 0.0 {
        return Err(Error::Domain(format!("kappa denominator vanishes at r = {r}")));
    }
    Ok(num / den)
}

/// `arctan(2 Re kappa / (1 - |kappa|^2))` evaluated literally with a
/// two-argument arctangent.
///
/// Kept as an independent route to [`angle_term`]. It is ill-conditioned:
/// `kappa = -j` identically at `y0 = 0` (0/0), and `1 - |kappa|^2` cancels
/// for small `y0` and for large `r`.
pub fn angle_term_from_kappa(r: f64, c_like: f64, y0: f64) -> Result<f64> {
    let k = kappa(KappaArgs { r, c_like, y0 })?;
    Ok((2.0 * k.re).atan2(1.0 - k.norm_sqr()))
}

/// The continuous branch of `arctan(2 Re kappa / (1 - |kappa|^2))` on
/// `r in [0, inf)`, rising monotonically from `-pi/2` to `pi/2`.
///
/// Evaluated as `2 arg(q) + pi/2` with `q = sqrt(R) + p`, the log branch of
/// the second table integral with complex coefficients, where
/// `p = r^2 - y0^2 - j sqrt c` and `R = p^2 - 4 j sqrt c y0^2`. `R` stays in the
/// lower half plane, so the principal square root is continuous, and `q` is
/// rationalized when `Re p < 0` to avoid cancellation.
pub fn angle_term(r: f64, c_like: f64, y0: f64) -> f64 {
    if r <= 0.0 {
        return -PI / 2.0;
    }
    if r.is_infinite() {
        return PI / 2.0;
    }
    let sc = c_like.sqrt();
    let u = r * r;
    let y2 = y0 * y0;
    let du = u - y2;
    let p = Complex64::new(du, -sc);
    let big_r = Complex64::new(du * du - c_like, -2.0 * sc * (u + y2));
    let root = big_r.sqrt();
    let q = if du >= 0.0 {
        root + p
    } else {
        Complex64::new(0.0, -4.0 * sc * y2) / (root - p)
    };
    2.0 * q.im.atan2(q.re) + PI / 2.0
}

fn check_c(c_like: f64) -> Result<()> {
    if c_like > 0.0 && c_like.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("c must be finite and > 0, got {c_like}")))
    }
}

fn check_y0(y0: f64) -> Result<()> {
    if y0 >= 0.0 && y0.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("receiver distance must be finite and >= 0, got {y0}")))
    }
}

/// `(u + sqrt(u^2 + m^2), sqrt(u^2 + m^2))` without cancellation for `u < 0`
/// or overflow for large arguments.
#[inline]
fn plus_root(u: f64, m: f64) -> (f64, f64) {
    let s = u.hypot(m);
    if u >= 0.0 {
        (u + s, s)
    } else {
        (m * (m / (s - u)), s)
    }
}

/// `-int_0^inf rel(r) dF(r)` split at the shape's breakpoints, its jumps and
/// the receiver radius.
fn stieltjes<H>(shape: &ShapeFunction, y0: f64, c_like: f64, rel: H, tol: &QuadratureSpec) -> Result<(f64, f64)>
where
    H: Fn(f64) -> f64,
{
    let jumps = shape.jumps();
    let jump_part: f64 = jumps.iter().map(|j| j.drop * rel(j.at)).sum();
    if matches!(shape, ShapeFunction::Constant | ShapeFunction::Disk { .. }) {
        // f vanishes identically
        return Ok((jump_part, 0.0));
    }
    let mut points = shape.breakpoints();
    points.extend(jumps.iter().map(|j| j.at));
    if y0 > 0.0 {
        points.push(y0);
    }
    let scale = shape.length_scale().max(y0).max(c_like.sqrt());
    let q = integrate_piecewise(
        |r| {
            let f = shape.deriv(r);
            if f == 0.0 {
                0.0
            } else {
                -f * rel(r)
            }
        },
        0.0,
        &points,
        Upper::Infinite { scale },
        tol,
    )?;
    Ok((q.value + jump_part, q.error))
}

/// Interference-driving function for `alpha = 2`.
///
/// `A2(y0, c) = pi [F(0) arcsinh((y0^2 - c) / (2 y0 sqrt c))
///              + int f(r) arcsinh((y0^2 - r^2 - c) / (2 y0 sqrt c)) dr]`
///
/// Requires a tail exponent `nu > 0`; the homogeneous network has infinite
/// mean interference at `alpha = 2`.
pub fn a2(shape: &ShapeFunction, y0: f64, c_like: f64, tol: &QuadratureSpec) -> Result<InterferenceDrivingResult> {
    check_c(c_like)?;
    check_y0(y0)?;
    let nu = shape.tail().nu();
    if !(nu > 0.0) {
        return Err(Error::TailCondition { nu, required: 0.0 });
    }
    let m = 2.0 * y0 * c_like.sqrt();
    let u0 = c_like - y0 * y0;
    let (h0, s0) = plus_root(u0, m);
    // H(r) - H(0) = pi ln(h(u0 + r^2) / h(u0)) with h(u) = u + sqrt(u^2 + m^2);
    // h(u1) - h(u0) = r^2 (h(u1) + h(u0)) / (s1 + s0) keeps every term positive
    let rel = |r: f64| {
        let r2 = r * r;
        let (h1, s1) = plus_root(u0 + r2, m);
        PI * (r2 * ((h1 + h0) / (s1 + s0)) / h0).ln_1p()
    };
    let (value, err) = stieltjes(shape, y0, c_like, rel, tol)?;
    Ok(InterferenceDrivingResult {
        value,
        quadrature_error: err,
        boundary_term: 0.0,
    })
}

/// Interference-driving function for `alpha = 4`.
///
/// `A4(y0, c) = pi / (2 sqrt c) ([F(r) angle_term(r)]_0^inf - int f(r) angle_term(r) dr)`;
/// finite for every admissible shape.
pub fn a4(shape: &ShapeFunction, y0: f64, c_like: f64, tol: &QuadratureSpec) -> Result<InterferenceDrivingResult> {
    check_c(c_like)?;
    check_y0(y0)?;
    let pref = PI / (2.0 * c_like.sqrt());
    let boundary = shape.limit_at_infinity() * pref * PI;
    let rel = |r: f64| pref * (angle_term(r, c_like, y0) + PI / 2.0);
    let (integral, err) = stieltjes(shape, y0, c_like, rel, tol)?;
    Ok(InterferenceDrivingResult {
        value: boundary + integral,
        quadrature_error: err,
        boundary_term: boundary,
    })
}

/// `A_alpha(y0, c_like)`.
pub fn interference_driving(
    shape: &ShapeFunction,
    alpha: PathLossExponent,
    y0: f64,
    c_like: f64,
    tol: &QuadratureSpec,
) -> Result<InterferenceDrivingResult> {
    match alpha {
        PathLossExponent::Two => a2(shape, y0, c_like, tol),
        PathLossExponent::Four => a4(shape, y0, c_like, tol),
    }
}

/// Mean interference at the reference receiver, `lambda A_alpha(y0, c)`.
pub fn mean_interference(s: &NetworkScenario, y0: f64) -> Result<f64> {
    check_y0(y0)?;
    if s.lambda == 0.0 {
        return Ok(0.0);
    }
    let a = interference_driving(&s.shape, s.channel.alpha, y0, s.channel.c, &analysis_spec())?;
    Ok(s.lambda * a.value)
}

/// Laplace transform of the interference under Rayleigh fading,
/// `exp(-lambda s A_alpha(y0, s + c))`.
pub fn laplace_interference(s: &NetworkScenario, y0: f64, s_arg: f64) -> Result<f64> {
    check_y0(y0)?;
    if !(s_arg >= 0.0 && s_arg.is_finite()) {
        return Err(Error::Domain(format!(
            "Laplace argument must be finite and >= 0, got {s_arg}"
        )));
    }
    if s_arg == 0.0 || s.lambda == 0.0 {
        return Ok(1.0);
    }
    let a = interference_driving(
        &s.shape,
        s.channel.alpha,
        y0,
        s_arg + s.channel.c,
        &analysis_spec(),
    )?;
    Ok((-s.lambda * s_arg * a.value).exp())
}

/// Outage probability of the reference link under Rayleigh fading.
pub fn outage_probability(s: &NetworkScenario, y0: f64) -> Result<f64> {
    let ch = &s.channel;
    let lt = laplace_interference(s, y0, ch.beta * ch.link_inverse_gain())?;
    Ok((1.0 - lt * (-ch.beta * ch.eta).exp()).clamp(0.0, 1.0))
}

/// Locally homogeneous approximation of the outage probability,
/// `1 - exp(-F(y0) lambda pi^2 d^2 beta^(2/alpha) (2/alpha) csc(2 pi / alpha))`.
///
/// Only defined for `alpha = 4`: the cosecant is singular at `alpha = 2`.
pub fn approx_outage(s: &NetworkScenario, y0: f64) -> Result<f64> {
    check_y0(y0)?;
    let ch = &s.channel;
    if ch.alpha != PathLossExponent::Four {
        return Err(Error::Domain(
            "the locally homogeneous outage approximation needs alpha > 2 (csc(pi) is undefined)"
                .into(),
        ));
    }
    let alpha = ch.alpha.value();
    let csc = 1.0 / (2.0 * PI / alpha).sin();
    let exponent = s.shape.eval(y0)
        * s.lambda
        * PI
        * PI
        * ch.d
        * ch.d
        * ch.beta.powf(2.0 / alpha)
        * (2.0 / alpha)
        * csc;
    Ok(-(-exponent).exp_m1())
}

/// `gamma = log((1 - q) / (1 - q~))` in the path-loss-singular limit `c -> 0`
/// with no noise:
/// `lambda d^2 sqrt(beta) (pi^2/2 F(y0) - d^2 sqrt(beta) A4(y0, beta d^4))`.
///
/// The scenario's `c` and `eta` are ignored; the interference-driving function
/// is evaluated at `beta d^4 > 0`.
pub fn gamma_ratio(s: &NetworkScenario, y0: f64) -> Result<f64> {
    check_y0(y0)?;
    let ch = &s.channel;
    if ch.alpha != PathLossExponent::Four {
        return Err(Error::Domain("gamma is only defined for alpha = 4".into()));
    }
    if s.lambda == 0.0 {
        return Ok(0.0);
    }
    let (d, beta) = (ch.d, ch.beta);
    let link = d * d * beta.sqrt();
    let a = a4(&s.shape, y0, beta * d.powi(4), &analysis_spec())?;
    Ok(s.lambda * link * (0.5 * PI * PI * s.shape.eval(y0) - link * a.value))
}
