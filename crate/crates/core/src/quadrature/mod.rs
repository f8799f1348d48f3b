//! Numerical integration backbone.
//!
//! Everything here is built on a single globally adaptive 21-point
//! Gauss-Kronrod integrator (the QUADPACK `qag` scheme). Improper integrals
//! over `[a, inf)` are mapped onto `[0, 1)` with the rational transform
//! `r = a + scale * t / (1 - t)`; no truncation radius is involved.
//!
//! The closed-form integral identities used by the interference formulas
//! live in [`identities`], and the 2D polar brute-force oracle used to
//! cross-check them lives in [`field`].

mod field;
mod gauss_kronrod;
mod identities;

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub use field::{brute_force_field, FieldPoint};
pub use identities::{
    identity1, identity1_complex, identity2_antiderivative, identity2_log_complex, legendre,
    legendre_complex, IDENTITY2_DEADBAND,
};

use crate::error::{Error, Result};

/// Tolerances and budget for adaptive quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        spec.check()?;
        Ok(spec)
    }

    /// Same budget, tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            max_subdivisions: self.max_subdivisions,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::Domain(format!(
                "quadrature tolerances must be positive (abs_tol = {}, rel_tol = {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    pub evaluations: usize,
}

/// Upper limit of a piecewise integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Upper {
    Finite(f64),
    /// Integrate to infinity; the last segment `[p, inf)` is mapped with
    /// `r = p + scale * t / (1 - t)`.
    Infinite { scale: f64 },
}

#[derive(Clone, Copy, Debug)]
enum Segment {
    Finite,
    /// `r = origin + scale * t / (1 - t)` for `t` in `[0, 1)`.
    Tail { origin: f64, scale: f64 },
}

impl Segment {
    #[inline]
    fn map(&self, t: f64) -> (f64, f64) {
        match *self {
            Segment::Finite => (t, 1.0),
            Segment::Tail { origin, scale } => {
                let s = 1.0 - t;
                (origin + scale * t / s, scale / (s * s))
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Piece {
    lo: f64,
    hi: f64,
    segment: usize,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("finite limits required, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut out = adaptive(&f, &[(lo, hi, Segment::Finite)], spec)?;
    out.value *= sign;
    Ok(out)
}

/// Integrates `f` over `[0, inf)` through the map `r = t / (1 - t)`.
pub fn integrate_semi_infinite<F>(f: F, spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    integrate_piecewise(f, 0.0, &[], Upper::Infinite { scale: 1.0 }, spec)
}

/// Integrates `f` from `lower` to `upper`, splitting the range at every
/// breakpoint that falls strictly inside it.
///
/// Breakpoints are where the integrand has jumps, kinks or sharp features.
/// All pieces share one global error budget.
pub fn integrate_piecewise<F>(
    f: F,
    lower: f64,
    breakpoints: &[f64],
    upper: Upper,
    spec: &QuadratureSpec,
) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    let end = match upper {
        Upper::Finite(b) => {
            if b < lower {
                return Err(Error::Domain(format!(
                    "upper limit {b} below lower limit {lower}"
                )));
            }
            b
        }
        Upper::Infinite { scale } => {
            if !(scale > 0.0 && scale.is_finite()) {
                return Err(Error::Domain(format!("tail scale must be positive, got {scale}")));
            }
            f64::INFINITY
        }
    };
    let mut points: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|p| p.is_finite() && *p > lower && *p < end)
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut pieces = Vec::with_capacity(points.len() + 2);
    let mut start = lower;
    for p in points {
        pieces.push((start, p, Segment::Finite));
        start = p;
    }
    match upper {
        Upper::Finite(b) => {
            if b > start {
                pieces.push((start, b, Segment::Finite));
            }
        }
        Upper::Infinite { scale } => pieces.push((
            0.0,
            1.0,
            Segment::Tail {
                origin: start,
                scale,
            },
        )),
    }
    if pieces.is_empty() {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    adaptive(&f, &pieces, spec)
}

/// [`integrate_piecewise`] for integrands that can fail; the first error
/// raised by `f` aborts the integration and is returned as is.
pub fn integrate_piecewise_try<F>(
    f: F,
    lower: f64,
    breakpoints: &[f64],
    upper: Upper,
    spec: &QuadratureSpec,
) -> Result<Integral>
where
    F: Fn(f64) -> Result<f64>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let out = integrate_piecewise(
        |r| {
            if failure.borrow().is_some() {
                return 0.0;
            }
            match f(r) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().replace(e);
                    0.0
                }
            }
        },
        lower,
        breakpoints,
        upper,
        spec,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    out
}

fn adaptive<F>(f: &F, initial: &[(f64, f64, Segment)], spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    spec.check()?;
    let segments: Vec<Segment> = initial.iter().map(|p| p.2).collect();
    let mut evaluations = 0usize;
    let mut eval_piece = |lo: f64, hi: f64, segment: usize| -> Result<Piece> {
        let seg = segments[segment];
        let rule = gauss_kronrod::qk21(
            |t| {
                let (r, jac) = seg.map(t);
                f(r) * jac
            },
            lo,
            hi,
        );
        evaluations += 21;
        if !(rule.value.is_finite() && rule.error.is_finite()) {
            let (r, _) = seg.map(0.5 * (lo + hi));
            return Err(Error::Domain(format!(
                "integrand is not finite near r = {r:.6e}"
            )));
        }
        Ok(Piece {
            lo,
            hi,
            segment,
            value: rule.value,
            error: rule.error,
        })
    };

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for (i, &(lo, hi, _)) in initial.iter().enumerate() {
        let p = eval_piece(lo, hi, i)?;
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }

    // Pieces too narrow to bisect further keep their error here.
    let mut frozen_err = 0.0;
    let mut subdivisions = 0usize;
    loop {
        if total_err <= spec.target(total) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if subdivisions >= spec.max_subdivisions {
            heap.push(worst);
            return Err(Error::NonConvergence {
                value: total,
                estimate: total_err,
                tolerance: spec.target(total),
                subdivisions,
            });
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let width = worst.hi - worst.lo;
        if width <= 1e3 * f64::EPSILON * worst.lo.abs().max(worst.hi.abs()).max(f64::MIN_POSITIVE)
            || mid <= worst.lo
            || mid >= worst.hi
        {
            frozen_err += worst.error;
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = eval_piece(worst.lo, mid, worst.segment)?;
        let right = eval_piece(mid, worst.hi, worst.segment)?;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }

    // Re-sum from the pieces to shed accumulated update roundoff.
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.sort_by(|a, b| (a.segment, a.lo).partial_cmp(&(b.segment, b.lo)).unwrap());
    let value: f64 = pieces.iter().map(|p| p.value).sum();
    let error: f64 = pieces.iter().map(|p| p.error).sum::<f64>() + frozen_err;
    if error > spec.target(value) {
        return Err(Error::NonConvergence {
            value,
            estimate: error,
            tolerance: spec.target(value),
            subdivisions,
        });
    }
    Ok(Integral {
        value,
        error,
        evaluations,
    })
}
