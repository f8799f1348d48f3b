//! Poisson point process sampling by thinning.
//!
//! The disk of radius `r_max` is cut into annuli. Each annulus gets a
//! homogeneous candidate process whose intensity is `lambda` times an upper
//! bound of `F` on the annulus; every candidate at radius `r` is kept with
//! probability `F(r) / bound`. The result is exactly a PPP with intensity
//! `lambda F(|x|)`, and tight bounds keep the number of rejected candidates
//! small.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use std::f64::consts::PI;

use crate::model::ShapeFunction;

/// Uniform annuli cover the first `UNIFORM_SPAN` length scales...
const UNIFORM_SPAN: f64 = 4.0;
const UNIFORM_RINGS: usize = 48;
/// ...then widths grow geometrically.
const GROWTH: f64 = 1.2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Annulus {
    pub inner: f64,
    pub outer: f64,
    /// Upper bound of `F` on `[inner, outer]`.
    pub bound: f64,
    /// Expected number of candidates, `lambda bound pi (outer^2 - inner^2)`.
    pub candidates: f64,
}

/// Candidate annuli covering the disk of radius `r_max`.
pub fn annuli(shape: &ShapeFunction, lambda: f64, r_max: f64) -> Vec<Annulus> {
    let scale = shape.length_scale();
    let uniform_end = (UNIFORM_SPAN * scale).min(r_max);
    let step = uniform_end / UNIFORM_RINGS as f64;
    let mut edges: Vec<f64> = (0..=UNIFORM_RINGS).map(|i| step * i as f64).collect();
    let mut r = uniform_end;
    while r < r_max {
        r = (r * GROWTH).max(r + step);
        edges.push(r.min(r_max));
    }
    edges.extend(shape.breakpoints());
    edges.extend(shape.jumps().iter().map(|j| j.at));
    edges.push(r_max);
    edges.retain(|e| *e >= 0.0 && *e <= r_max);
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges
        .windows(2)
        .map(|w| {
            let bound = shape.upper_bound_on(w[0], w[1]);
            Annulus {
                inner: w[0],
                outer: w[1],
                bound,
                candidates: lambda * bound * PI * (w[1] * w[1] - w[0] * w[0]),
            }
        })
        .collect()
}

/// Draws one realization into `out` (cleared first).
pub fn sample_into<R: Rng + ?Sized>(
    shape: &ShapeFunction,
    rings: &[Annulus],
    rng: &mut R,
    out: &mut Vec<[f64; 2]>,
) {
    out.clear();
    for ring in rings {
        if !(ring.candidates > 0.0) {
            continue;
        }
        let n = Poisson::new(ring.candidates)
            .expect("candidate means are finite and positive")
            .sample(rng) as u64;
        let (a2, b2) = (ring.inner * ring.inner, ring.outer * ring.outer);
        for _ in 0..n {
            let r = (a2 + rng.random::<f64>() * (b2 - a2)).sqrt();
            let theta = 2.0 * PI * rng.random::<f64>();
            let keep = rng.random::<f64>() * ring.bound < shape.eval(r);
            if keep {
                out.push([r * theta.cos(), r * theta.sin()]);
            }
        }
    }
}
