//! Direct 2D evaluation of field integrals `int_{|x| <= r_max} g(x) dx`.
//!
//! This is the oracle the closed-form interference formulas are checked
//! against: no identity, partial fraction or integration by parts is involved,
//! only nested adaptive quadrature in polar coordinates around the origin.

use std::cell::RefCell;
use std::f64::consts::PI;

use super::{integrate, integrate_piecewise, QuadratureSpec, Upper};
use crate::error::{Error, Result};

/// A point of the plane as seen by a field integrand. The receiver sits on
/// the positive x-axis at distance `y0` from the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldPoint {
    /// Distance to the origin.
    pub r: f64,
    /// Polar angle measured from the receiver direction.
    pub phi: f64,
    /// Distance to the receiver.
    pub dist: f64,
}

impl FieldPoint {
    pub fn new(r: f64, phi: f64, y0: f64) -> Self {
        let dist2 = (r * r + y0 * y0 - 2.0 * r * y0 * phi.cos()).max(0.0);
        Self {
            r,
            phi,
            dist: dist2.sqrt(),
        }
    }
}

/// Integrates `integrand` over the disk of radius `r_max` around the origin,
/// with the receiver at distance `y0_norm` on the x-axis.
///
/// The integrand must be symmetric under reflection about the receiver axis
/// (true for anything built from `|x|` and the distance to the receiver); the
/// angular integral runs over `[0, pi]` and is doubled. `breakpoints` are
/// radii where the integrand is discontinuous in `r`; the receiver radius is
/// always added.
pub fn brute_force_field<G>(
    integrand: G,
    y0_norm: f64,
    r_max: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64>
where
    G: Fn(FieldPoint) -> f64,
{
    if !(y0_norm >= 0.0 && r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::Domain(format!(
            "brute_force_field needs y0 >= 0 and finite r_max > 0, got y0 = {y0_norm}, r_max = {r_max}"
        )));
    }
    let inner_spec = spec.scaled(1e-2);
    let failure: RefCell<Option<Error>> = RefCell::new(None);

    let ring = |r: f64| -> f64 {
        if failure.borrow().is_some() {
            return 0.0;
        }
        let angular = integrate(
            |phi| integrand(FieldPoint::new(r, phi, y0_norm)),
            0.0,
            PI,
            &QuadratureSpec {
                // the radial weight r multiplies the inner result
                abs_tol: inner_spec.abs_tol / r.max(1.0),
                ..inner_spec
            },
        );
        match angular {
            Ok(v) => 2.0 * r * v.value,
            Err(e) => {
                failure.borrow_mut().replace(e);
                0.0
            }
        }
    };

    let mut points = breakpoints.to_vec();
    points.push(y0_norm);
    let outer = integrate_piecewise(ring, 0.0, &points, Upper::Finite(r_max), spec);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(outer?.value)
}
