//! Monte Carlo network simulator.
//!
//! Each trial draws a fresh transmitter process in the disk of radius
//! `r_max`; by Slivnyak's theorem this is also the reduced Palm view of the
//! reference link, which is simply superposed on it. Fading is Rayleigh
//! (unit-mean exponential power gains) unless stated otherwise.
//!
//! Reproducibility: trial `t` draws from `ChaCha8Rng::seed_from_u64(master_seed)`
//! switched to stream `t`, so its result does not depend on which thread ran
//! it or in what order. Trials run in parallel, are collected in index order,
//! and are reduced with [`pairwise_sum`].
//!
//! Window: unless given, `r_max` is the smallest radius (within 1%) with
//! `sensitivity * tail_bound(r_max) < tail_tol`, where [`tail_bound`] bounds
//! the mean interference from transmitters beyond `r_max` using the shape's
//! upper envelope. `sensitivity` is 1 for the mean interference and the
//! transform argument for Laplace and outage estimates, since
//! `|E e^{-sI} - E e^{-s(I - I_tail)}| <= s E I_tail`.

mod sampling;
mod stats;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;

pub use sampling::{annuli, sample_into, Annulus};
pub use stats::{pairwise_sum, SimEstimate};

use crate::error::{Error, Result};
use crate::model::{path_loss, sinr, NetworkScenario, PathLossExponent, ShapeFunction};
use crate::quadrature::{integrate_piecewise, QuadratureSpec, Upper};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub master_seed: u64,
    /// Sampling window radius; derived from `tail_tol` when `None`.
    pub r_max: Option<f64>,
    pub tail_tol: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            master_seed: 0,
            r_max: None,
            tail_tol: 1e-6,
        }
    }
}

impl SimConfig {
    pub fn new(trials: u64, master_seed: u64) -> Self {
        Self {
            trials,
            master_seed,
            ..Self::default()
        }
    }

    pub fn with_r_max(self, r_max: f64) -> Self {
        Self {
            r_max: Some(r_max),
            ..self
        }
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Domain("at least one trial is required".into()));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::Domain(format!("tail_tol must be > 0, got {}", self.tail_tol)));
        }
        if let Some(r) = self.r_max {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Domain(format!("r_max must be finite and > 0, got {r}")));
            }
        }
        Ok(())
    }

    /// The generator for trial `t`.
    pub fn trial_rng(&self, t: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(t);
        rng
    }
}

/// Power gain model of the interfering links.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fading {
    Rayleigh,
    /// All gains equal one; only the mean interference is meaningful.
    Unit,
}

/// `lambda int_{r_max}^inf 2 pi r F_up(r) / (c + (r - y0)_+^alpha) dr`, an
/// upper bound of the mean interference at `y0` from transmitters beyond
/// `r_max`. `F_up(r)` is the shape's supremum on `[r, inf)`.
pub fn tail_bound(s: &NetworkScenario, y0: f64, r_max: f64) -> Result<f64> {
    if s.lambda == 0.0 {
        return Ok(0.0);
    }
    let ch = &s.channel;
    let tail = s.shape.tail();
    if ch.alpha == PathLossExponent::Two && s.shape.limit_at_infinity() > 0.0 {
        return Err(Error::TailCondition {
            nu: tail.nu(),
            required: 0.0,
        });
    }
    let integrand = |r: f64| {
        let gap = (r - y0).max(0.0);
        2.0 * PI * r * s.shape.upper_bound_on(r, f64::INFINITY) / (ch.c + ch.alpha.pow(gap))
    };
    let mut points = s.shape.breakpoints();
    points.push(y0);
    let spec = QuadratureSpec {
        abs_tol: 1e-300,
        rel_tol: 1e-6,
        max_subdivisions: 2000,
    };
    let scale = r_max.max(s.shape.length_scale()).max(y0);
    let out = integrate_piecewise(integrand, r_max, &points, Upper::Infinite { scale }, &spec)?;
    Ok(s.lambda * out.value)
}

/// Smallest window radius (to 1%) whose tail bound, times `sensitivity`,
/// stays below `tail_tol`.
pub fn auto_r_max(s: &NetworkScenario, y0: f64, sensitivity: f64, tail_tol: f64) -> Result<f64> {
    let base = s.shape.length_scale().max(1.0) + y0;
    if s.lambda == 0.0 {
        return Ok(base);
    }
    let ok = |r: f64| -> Result<bool> { Ok(sensitivity * tail_bound(s, y0, r)? < tail_tol) };
    let mut hi = base;
    let mut doublings = 0;
    while !ok(hi)? {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::TailCondition {
                nu: s.shape.tail().nu(),
                required: 0.0,
            });
        }
    }
    if doublings == 0 {
        return Ok(hi);
    }
    let mut lo = hi / 2.0;
    while hi - lo > 0.01 * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One realization of the transmitter process in the disk of radius `r_max`.
pub fn sample_ppp(shape: &ShapeFunction, lambda: f64, r_max: f64, seed: u64) -> Result<Vec<[f64; 2]>> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::Domain(format!("r_max must be finite and > 0, got {r_max}")));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    let rings = annuli(shape, lambda, r_max);
    let mut out = Vec::new();
    sample_into(shape, &rings, &mut ChaCha8Rng::seed_from_u64(seed), &mut out);
    Ok(out)
}

/// What one trial observed at the reference receiver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub interference: f64,
    pub sinr: f64,
    pub outage_flag: bool,
}

/// Trials of the reference link with its receiver at `(y0, 0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceiverRun {
    pub r_max: f64,
    pub master_seed: u64,
    pub records: Vec<TrialRecord>,
}

impl ReceiverRun {
    pub fn interference(&self) -> SimEstimate {
        let xs: Vec<f64> = self.records.iter().map(|r| r.interference).collect();
        SimEstimate::from_samples(&xs, self.master_seed)
    }

    pub fn laplace(&self, s_arg: f64) -> SimEstimate {
        let xs: Vec<f64> = self.records.iter().map(|r| (-s_arg * r.interference).exp()).collect();
        SimEstimate::from_samples(&xs, self.master_seed)
    }

    pub fn outage(&self) -> SimEstimate {
        SimEstimate::from_flags(self.records.iter().map(|r| r.outage_flag), self.master_seed)
    }

    /// One CSV line per trial: `trial_index,interference,sinr,outage_flag`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "trial_index,interference,sinr,outage_flag")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{}",
                r.trial_index,
                r.interference,
                r.sinr,
                u8::from(r.outage_flag)
            )?;
        }
        Ok(())
    }
}

fn resolve_r_max(s: &NetworkScenario, y0: f64, cfg: &SimConfig, sensitivity: f64) -> Result<f64> {
    match cfg.r_max {
        Some(r) => Ok(r),
        None => auto_r_max(s, y0, sensitivity.max(1.0), cfg.tail_tol),
    }
}

/// Runs `cfg.trials` trials of the reference link with its receiver at
/// `(y0, 0)`. `sensitivity` only matters when the window is derived
/// automatically.
pub fn simulate_receiver(
    s: &NetworkScenario,
    y0: f64,
    cfg: &SimConfig,
    fading: Fading,
    sensitivity: f64,
) -> Result<ReceiverRun> {
    if !(y0 >= 0.0 && y0.is_finite()) {
        return Err(Error::Domain(format!("y0 must be finite and >= 0, got {y0}")));
    }
    simulate_receiver_at(s, [y0, 0.0], cfg, fading, sensitivity)
}

/// [`simulate_receiver`] with the receiver anywhere in the plane.
pub fn simulate_receiver_at(
    s: &NetworkScenario,
    receiver: [f64; 2],
    cfg: &SimConfig,
    fading: Fading,
    sensitivity: f64,
) -> Result<ReceiverRun> {
    cfg.check()?;
    let y0 = receiver[0].hypot(receiver[1]);
    if !y0.is_finite() {
        return Err(Error::Domain("receiver position must be finite".into()));
    }
    let r_max = resolve_r_max(s, y0, cfg, sensitivity)?;
    let rings = annuli(&s.shape, s.lambda, r_max);
    let ch = s.channel;
    let records = (0..cfg.trials)
        .into_par_iter()
        .map_init(Vec::new, |points, t| {
            let mut rng = cfg.trial_rng(t);
            sample_into(&s.shape, &rings, &mut rng, points);
            let gains: Vec<f64> = match fading {
                Fading::Rayleigh => (0..points.len()).map(|_| rng.sample(Exp1)).collect(),
                Fading::Unit => vec![1.0; points.len()],
            };
            let terms: Vec<f64> = points
                .iter()
                .zip(&gains)
                .map(|(p, g)| g * path_loss((p[0] - receiver[0]).hypot(p[1] - receiver[1]), &ch))
                .collect();
            let interference = pairwise_sum(&terms);
            let g0: f64 = rng.sample(Exp1);
            let sinr = sinr(g0, interference, &ch);
            TrialRecord {
                trial_index: t,
                interference,
                sinr,
                outage_flag: sinr < ch.beta,
            }
        })
        .collect();
    Ok(ReceiverRun {
        r_max,
        master_seed: cfg.master_seed,
        records,
    })
}

/// Mean interference at the reference receiver with Rayleigh fading.
pub fn estimate_mean_interference(s: &NetworkScenario, y0: f64, cfg: &SimConfig) -> Result<SimEstimate> {
    estimate_mean_interference_with(s, y0, cfg, Fading::Rayleigh)
}

pub fn estimate_mean_interference_with(
    s: &NetworkScenario,
    y0: f64,
    cfg: &SimConfig,
    fading: Fading,
) -> Result<SimEstimate> {
    Ok(simulate_receiver(s, y0, cfg, fading, 1.0)?.interference())
}

/// Outage frequency of the reference link.
pub fn estimate_outage(s: &NetworkScenario, y0: f64, cfg: &SimConfig) -> Result<SimEstimate> {
    let sens = s.channel.beta * s.channel.link_inverse_gain();
    Ok(simulate_receiver(s, y0, cfg, Fading::Rayleigh, sens)?.outage())
}

/// `E exp(-s_arg I)`.
pub fn estimate_laplace(s: &NetworkScenario, y0: f64, s_arg: f64, cfg: &SimConfig) -> Result<SimEstimate> {
    if !(s_arg >= 0.0 && s_arg.is_finite()) {
        return Err(Error::Domain(format!("Laplace argument must be finite and >= 0, got {s_arg}")));
    }
    Ok(simulate_receiver(s, y0, cfg, Fading::Rayleigh, s_arg)?.laplace(s_arg))
}

/// Network-wide ratio of successful to attempted transmissions.
///
/// Every transmitter in the window is paired with a receiver: at distance `d`
/// in a uniform direction, or, when `lambda_r` is given, the nearest point of
/// an independent receiver process of intensity `lambda_r F` (no receiver in
/// the window means failure, and the noise scales with the link distance).
/// Each link sees Rayleigh-faded interference from every other transmitter.
/// The window defaults to the radius beyond which the expected fraction of
/// missing transmitters is below `tail_tol`.
pub fn estimate_ast(s: &NetworkScenario, cfg: &SimConfig, lambda_r: Option<f64>) -> Result<SimEstimate> {
    cfg.check()?;
    let r_max = match cfg.r_max {
        Some(r) => r,
        None => ast_window(&s.shape, cfg.tail_tol)?,
    };
    if let Some(l) = lambda_r {
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Domain(format!("receiver intensity must be > 0, got {l}")));
        }
    }
    let tx_rings = annuli(&s.shape, s.lambda, r_max);
    let rx_rings = lambda_r.map(|l| annuli(&s.shape, l, r_max));
    let ch = s.channel;
    let per_trial: Vec<(f64, f64)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = cfg.trial_rng(t);
            let mut tx = Vec::new();
            sample_into(&s.shape, &tx_rings, &mut rng, &mut tx);
            let mut rx = Vec::new();
            if let Some(rings) = &rx_rings {
                sample_into(&s.shape, rings, &mut rng, &mut rx);
                rx.sort_by(|a, b| a[0].total_cmp(&b[0]));
            }
            let mut successes = 0u64;
            let mut terms = Vec::with_capacity(tx.len());
            for (i, x) in tx.iter().enumerate() {
                let (y, link) = match &rx_rings {
                    None => {
                        let phi = 2.0 * PI * rng.random::<f64>();
                        ([x[0] + ch.d * phi.cos(), x[1] + ch.d * phi.sin()], ch)
                    }
                    Some(_) => match nearest(x, &rx) {
                        Some((y, d)) => (y, ch.with_d(d).with_eta(ch.eta_at(d))),
                        None => continue,
                    },
                };
                let g0: f64 = rng.sample(Exp1);
                terms.clear();
                for (j, z) in tx.iter().enumerate() {
                    if j != i {
                        let g: f64 = rng.sample(Exp1);
                        let (dx, dy) = (z[0] - y[0], z[1] - y[1]);
                        terms.push(g * path_loss((dx * dx + dy * dy).sqrt(), &ch));
                    }
                }
                if sinr(g0, pairwise_sum(&terms), &link) >= ch.beta {
                    successes += 1;
                }
            }
            (successes as f64, tx.len() as f64)
        })
        .collect();
    let (num, den): (Vec<f64>, Vec<f64>) = per_trial.into_iter().unzip();
    SimEstimate::ratio(&num, &den, cfg.master_seed)
        .ok_or_else(|| Error::Domain("no transmitter fell in the window in any trial".into()))
}

/// Nearest point of `pts`, which must be sorted by first coordinate. Scans
/// outwards from `x[0]` until the horizontal gap exceeds the best distance.
fn nearest(x: &[f64; 2], pts: &[[f64; 2]]) -> Option<([f64; 2], f64)> {
    let start = pts.partition_point(|p| p[0] < x[0]);
    let mut best: Option<([f64; 2], f64)> = None;
    let consider = |p: &[f64; 2], best: &mut Option<([f64; 2], f64)>| {
        let (dx, dy) = (p[0] - x[0], p[1] - x[1]);
        let d2 = dx * dx + dy * dy;
        if best.is_none_or(|b| d2 < b.1) {
            *best = Some((*p, d2));
        }
    };
    for p in &pts[start..] {
        if best.is_some_and(|b| (p[0] - x[0]).powi(2) > b.1) {
            break;
        }
        consider(p, &mut best);
    }
    for p in pts[..start].iter().rev() {
        if best.is_some_and(|b| (x[0] - p[0]).powi(2) > b.1) {
            break;
        }
        consider(p, &mut best);
    }
    best.map(|(p, d2)| (p, d2.sqrt()))
}

/// Radius beyond which the expected fraction of transmitters is below
/// `tol`; the missing mass is bounded with the shape's upper envelope.
pub fn ast_window(shape: &ShapeFunction, tol: f64) -> Result<f64> {
    let nu = shape.tail().nu();
    if !(nu > 2.0) {
        return Err(Error::TailCondition { nu, required: 2.0 });
    }
    let spec = QuadratureSpec {
        abs_tol: 1e-300,
        rel_tol: 1e-8,
        max_subdivisions: 2000,
    };
    let points = shape.breakpoints();
    let scale = shape.length_scale();
    let mass_beyond = |r: f64| -> Result<f64> {
        let s = r.max(scale);
        Ok(integrate_piecewise(|t| t * shape.upper_bound_on(t, f64::INFINITY), r, &points, Upper::Infinite { scale: s }, &spec)?.value)
    };
    let total = integrate_piecewise(|t| t * shape.eval(t), 0.0, &points, Upper::Infinite { scale }, &spec)?.value;
    let mut r = scale;
    while mass_beyond(r)? >= tol * total {
        r *= 1.25;
        if r > 1e12 * scale {
            return Err(Error::TailCondition { nu, required: 2.0 });
        }
    }
    Ok(r)
}
