//! Table generators behind the command-line tool.
//!
//! Grid points are evaluated in parallel and written in grid order.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{
    approx_outage, gamma_ratio, interference_driving, laplace_interference, mean_interference,
    outage_probability,
};
use crate::error::{Error, Result};
use crate::model::{db_to_linear, validate_scenario, NetworkScenario, PathLossExponent};
use crate::quadrature::{brute_force_field, integrate, integrate_piecewise_try, QuadratureSpec, Upper};
use crate::sim::{auto_r_max, simulate_receiver, Fading, SimConfig, SimEstimate};
use crate::table::{CurveTable, Metadata};
use crate::throughput::{optimize_beta, sum_rate_curve};

/// Evenly spaced grid `start, start + step, ...` up to `stop` inclusive;
/// empty when `start > stop`.
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0) {
        return Err(Error::Domain(format!(
            "grid needs finite bounds and a positive step, got {start}:{stop}:{step}"
        )));
    }
    if start > stop {
        return Ok(Vec::new());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(Error::Domain(format!("grid has {n} points")));
    }
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}

/// Seed of grid point `i` for curves with Monte Carlo columns.
pub fn point_seed(master_seed: u64, i: usize) -> u64 {
    master_seed.wrapping_add(i as u64)
}

/// Analytic outage probability over `y0`, with optional simulation columns.
/// Grid point `i` is simulated with seed [`point_seed`]`(seed, i)`.
pub fn op_curve(s: &NetworkScenario, grid: &[f64], mc: Option<&SimConfig>) -> Result<CurveTable> {
    let meta = Metadata::new("op-curve", s, mc.map(|c| c.master_seed))
        .with("y0_grid", grid)
        .with("trials", mc.map(|c| c.trials));
    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &y0)| {
            let q = outage_probability(s, y0)?;
            let mut row = vec![y0, q];
            if let Some(cfg) = mc {
                let cfg = SimConfig {
                    master_seed: point_seed(cfg.master_seed, i),
                    ..*cfg
                };
                let sens = s.channel.beta * s.channel.link_inverse_gain();
                let e = simulate_receiver(s, y0, &cfg, Fading::Rayleigh, sens)?.outage();
                row.extend([e.mean, e.ci95_low, e.ci95_high]);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let columns: &[&str] = if mc.is_some() {
        &["y0", "q_analytic", "q_mc", "ci_low", "ci_high"]
    } else {
        &["y0", "q_analytic"]
    };
    let mut t = CurveTable::new(meta, columns);
    for r in rows {
        t.push(r)?;
    }
    Ok(t)
}

/// `gamma` and `F` over `y0`; `alpha = 4` only.
pub fn gamma_curve(s: &NetworkScenario, grid: &[f64]) -> Result<CurveTable> {
    if s.channel.alpha != PathLossExponent::Four {
        return Err(Error::Domain(
            "gamma-curve needs alpha = 4: the locally homogeneous approximation is undefined at alpha = 2"
                .into(),
        ));
    }
    let meta = Metadata::new("gamma-curve", s, None).with("y0_grid", grid);
    let rows: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&y0| Ok(vec![y0, gamma_ratio(s, y0)?, s.shape.eval(y0)]))
        .collect::<Result<_>>()?;
    let mut t = CurveTable::new(meta, &["y0", "gamma", "F"]);
    for r in rows {
        t.push(r)?;
    }
    Ok(t)
}

/// Expected sum rate over `beta` (dB); with `optimize`, the maximizer over
/// the grid's range is added to the metadata.
pub fn sum_rate(s: &NetworkScenario, lambda_r: f64, betas_db: &[f64], optimize: bool) -> Result<CurveTable> {
    let rates = sum_rate_curve(s, lambda_r, betas_db)?;
    let mut meta = Metadata::new("sum-rate", s, None)
        .with("lambda_r", lambda_r)
        .with("beta_grid_db", betas_db);
    if optimize {
        let lo = betas_db.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = betas_db.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(lo < hi) {
            return Err(Error::Domain("--optimize needs a grid spanning an interval".into()));
        }
        let opt = optimize_beta(s, lambda_r, (lo, hi))?;
        meta.insert("beta_star_db", opt.beta_star_db);
        meta.insert("rate_star", opt.rate_star);
        meta.insert("at_boundary", opt.at_boundary);
    }
    let mut t = CurveTable::new(meta, &["beta_db", "rate"]);
    for (b, r) in betas_db.iter().zip(rates) {
        t.push(vec![*b, r])?;
    }
    Ok(t)
}

/// One line of a validation report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub reference: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationOutcome {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
    pub checks: Vec<Check>,
    /// Fraction of Monte Carlo 95% intervals covering the analytic value.
    pub mc_coverage: Option<f64>,
}

impl ValidationOutcome {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.errors {
            out.push_str(&format!("FAIL {e}\n"));
        }
        for w in &self.warnings {
            out.push_str(&format!("WARN {w}\n"));
        }
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{tag} {}: value {:.10e}, reference {:.10e}, {}\n",
                c.name, c.value, c.reference, c.detail
            ));
        }
        if let Some(cov) = self.mc_coverage {
            out.push_str(&format!("Monte Carlo 95% coverage {:.1}%\n", 100.0 * cov));
        }
        out.push_str(if self.passed() { "all checks passed\n" } else { "validation failed\n" });
        out
    }
}

/// Relative tolerance between closed forms and the brute-force 2D integral.
pub const BRUTE_FORCE_RTOL: f64 = 1e-5;

/// A simulation check passes when the analytic value lies within this many
/// standard errors (two-sided 99.9%); the 95% coverage is reported too.
pub const MC_Z: f64 = 3.29;

/// A simulation check is only judged when at least this many trials are
/// expected to contain a transmitter in the half-mass ball (see
/// [`simulation_support`]).
pub const MIN_SUPPORT: f64 = 100.0;

/// Expected number of trials, out of `trials`, with at least one
/// transmitter inside the disk around the receiver that carries half of
/// `A(y0, c_like)`.
///
/// When this is small the sample mean is dominated by events the run
/// almost never sees, its standard error is unreliable, and a confidence
/// interval says nothing about the closed form.
pub fn simulation_support(s: &NetworkScenario, y0: f64, c_like: f64, trials: u64) -> Result<f64> {
    let spec = QuadratureSpec::new(1e-300, 1e-7, 2000)?;
    let alpha = s.channel.alpha;
    let shape = &s.shape;
    // angular integral of F on the circle of radius t around the receiver
    let ring = |t: f64| -> Result<f64> {
        let v = integrate(
            |th| shape.eval((y0 * y0 + t * t + 2.0 * y0 * t * th.cos()).max(0.0).sqrt()),
            0.0,
            PI,
            &spec,
        )?;
        Ok(2.0 * v.value)
    };
    let mut bp: Vec<f64> = shape.breakpoints();
    bp.extend(shape.jumps().iter().map(|j| j.at));
    let kinks: Vec<f64> = bp.iter().flat_map(|b| [(b - y0).abs(), b + y0]).collect();
    let ball = |rho: f64, weighted: bool| -> Result<f64> {
        let mut pts: Vec<f64> = kinks.iter().copied().filter(|k| *k > 0.0 && *k < rho).collect();
        pts.sort_by(f64::total_cmp);
        let w = |t: f64| if weighted { 1.0 / (c_like + alpha.pow(t)) } else { 1.0 };
        Ok(integrate_piecewise_try(|t| Ok(t * w(t) * ring(t)?), 0.0, &pts, Upper::Finite(rho), &spec)?.value)
    };
    let total = interference_driving(shape, alpha, y0, c_like, &crate::analytic::analysis_spec())?.value;
    if !(total > 0.0) || s.lambda == 0.0 {
        return Ok(trials as f64);
    }
    let mut hi = c_like.powf(1.0 / alpha.value()).max(1e-3);
    while ball(hi, true)? < 0.5 * total {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::Domain(format!("half-mass radius around y0 = {y0} not found")));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-2 * hi {
        let mid = 0.5 * (lo + hi);
        if ball(mid, true)? < 0.5 * total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let count = s.lambda * ball(hi, false)?;
    Ok(trials as f64 * -(-count).exp_m1())
}

/// Receiver positions exercised by `validate`.
pub fn validation_positions(s: &NetworkScenario) -> Vec<f64> {
    let l = s.shape.length_scale();
    vec![0.0, l, 2.0 * l]
}

/// Transform arguments exercised by `validate`: the outage argument
/// `beta (c + d^alpha)` scaled by 1/4, 1 and 4.
pub fn validation_laplace_args(s: &NetworkScenario) -> Vec<f64> {
    let s0 = s.channel.beta.max(1e-3) * s.channel.link_inverse_gain();
    vec![0.25 * s0, s0, 4.0 * s0]
}

/// `int F(|x|) / (c_like + |x - y0|^alpha) dx` by nested 2D quadrature over a
/// disk whose neglected tail is below `1e-8` of the value.
pub fn brute_force_driving(s: &NetworkScenario, y0: f64, c_like: f64, estimate: f64) -> Result<f64> {
    let unit = s.with_lambda(1.0).with_channel(s.channel.with_c(c_like));
    let r_max = auto_r_max(&unit, y0, 1.0, 1e-8 * estimate.abs().max(1e-300))?;
    let mut bp = s.shape.breakpoints();
    bp.extend(s.shape.jumps().iter().map(|j| j.at));
    let alpha = s.channel.alpha;
    let spec = QuadratureSpec::new(1e-14, 1e-8, 20_000)?;
    brute_force_field(
        |p| s.shape.eval(p.r) / (c_like + alpha.pow(p.dist)),
        y0,
        r_max,
        &bp,
        &spec,
    )
}

/// Analytic versus brute-force quadrature (and, with `mc`, versus
/// simulation) for the mean interference, the Laplace transform and the
/// outage probability.
pub fn validate(s: &NetworkScenario, mc: Option<&SimConfig>) -> Result<ValidationOutcome> {
    let report = validate_scenario(s);
    let errors: Vec<String> = report.errors().map(|v| v.to_string()).collect();
    let mut warnings: Vec<String> = report.warnings().map(|v| v.to_string()).collect();
    if !errors.is_empty() {
        return Ok(ValidationOutcome {
            errors,
            warnings,
            checks: Vec::new(),
            mc_coverage: None,
        });
    }
    let ch = s.channel;
    let spec = crate::analytic::analysis_spec();
    let mut checks = Vec::new();
    let mut covered = 0usize;
    let mut mc_total = 0usize;
    let s_args = validation_laplace_args(s);
    for y0 in validation_positions(s) {
        // interference-driving function at c and at c + s
        let mut cs = vec![ch.c];
        cs.extend(s_args.iter().map(|a| ch.c + a));
        for (k, c_like) in cs.into_iter().enumerate() {
            let a = interference_driving(&s.shape, ch.alpha, y0, c_like, &spec)?.value;
            let b = brute_force_driving(s, y0, c_like, a)?;
            let rel = (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
            let name = if k == 0 {
                format!("driving function vs 2D quadrature, y0={y0}")
            } else {
                format!("driving function at c+s vs 2D quadrature, y0={y0}, s={}", s_args[k - 1])
            };
            checks.push(Check {
                name,
                passed: rel <= BRUTE_FORCE_RTOL,
                value: a,
                reference: b,
                detail: format!("relative difference {rel:.2e} (limit {BRUTE_FORCE_RTOL:.0e})"),
            });
        }
        if let Some(cfg) = mc {
            let sens = s_args
                .iter()
                .copied()
                .fold(ch.beta * ch.link_inverse_gain(), f64::max);
            let run = simulate_receiver(s, y0, cfg, Fading::Rayleigh, sens)?;
            let out_arg = ch.beta * ch.link_inverse_gain();
            let mut pairs: Vec<(String, f64, SimEstimate, f64)> = vec![(
                format!("mean interference vs simulation, y0={y0}"),
                mean_interference(s, y0)?,
                run.interference(),
                ch.c,
            )];
            for &sa in &s_args {
                pairs.push((
                    format!("Laplace transform vs simulation, y0={y0}, s={sa}"),
                    laplace_interference(s, y0, sa)?,
                    run.laplace(sa),
                    ch.c + sa,
                ));
            }
            pairs.push((
                format!("outage probability vs simulation, y0={y0}"),
                outage_probability(s, y0)?,
                run.outage(),
                ch.c + out_arg,
            ));
            for (name, analytic, est, c_like) in pairs {
                let support = simulation_support(s, y0, c_like, cfg.trials)?;
                if support < MIN_SUPPORT {
                    warnings.push(format!(
                        "{name}: inconclusive, only {support:.1} of {} trials are expected to see the transmitters \
                         behind half of the value (need {MIN_SUPPORT}); simulation mean {:.6e}, closed form {analytic:.6e}",
                        cfg.trials, est.mean
                    ));
                    continue;
                }
                mc_total += 1;
                if est.covers(analytic) {
                    covered += 1;
                }
                let z = if est.std_error > 0.0 {
                    (est.mean - analytic).abs() / est.std_error
                } else if est.mean == analytic {
                    0.0
                } else {
                    f64::INFINITY
                };
                checks.push(Check {
                    name,
                    passed: z <= MC_Z,
                    value: analytic,
                    reference: est.mean,
                    detail: format!(
                        "95% CI [{:.6e}, {:.6e}], |z| = {z:.2} (limit {MC_Z}), {} trials, r_max {:.1}, support {support:.0}",
                        est.ci95_low, est.ci95_high, est.trials, run.r_max
                    ),
                });
            }
        }
    }
    if ch.alpha == PathLossExponent::Four {
        // exact when F is locally constant; reported, not judged
        let y0 = 0.0;
        let q = outage_probability(s, y0)?;
        let qa = approx_outage(s, y0)?;
        checks.push(Check {
            name: "locally homogeneous approximation at y0=0 (informational)".into(),
            passed: true,
            value: qa,
            reference: q,
            detail: format!("difference {:.3e}", qa - q),
        });
    }
    Ok(ValidationOutcome {
        errors,
        warnings,
        checks,
        mc_coverage: (mc_total > 0).then(|| covered as f64 / mc_total as f64),
    })
}

/// Quantities the `simulate` command can estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quantity {
    MeanInterference,
    Laplace { s_arg: f64 },
    Outage,
    Ast { lambda_r: Option<f64> },
}

/// A single Monte Carlo estimate as a one-row table, with the analytic
/// value alongside.
pub fn simulate(s: &NetworkScenario, y0: f64, q: Quantity, cfg: &SimConfig) -> Result<(CurveTable, Option<crate::sim::ReceiverRun>)> {
    use crate::throughput::{ast, AstQuery, SuccessModel};
    let mut meta = Metadata::new("simulate", s, Some(cfg.master_seed)).with("trials", cfg.trials);
    let ch = s.channel;
    let (name, analytic, est, run, r_max) = match q {
        Quantity::Ast { lambda_r } => {
            let est = crate::sim::estimate_ast(s, cfg, lambda_r)?;
            let query = AstQuery {
                scenario: s.clone(),
                success_model: if lambda_r.is_some() {
                    SuccessModel::SinrAndConnected
                } else {
                    SuccessModel::SinrOnly
                },
                lambda_r,
            };
            meta.insert("lambda_r", lambda_r);
            let r_max = match cfg.r_max {
                Some(r) => r,
                None => crate::sim::ast_window(&s.shape, cfg.tail_tol)?,
            };
            ("ast", ast(&query, None)?, est, None, r_max)
        }
        _ => {
            meta.insert("y0", y0);
            let sens = match q {
                Quantity::Laplace { s_arg } => s_arg,
                Quantity::Outage => ch.beta * ch.link_inverse_gain(),
                _ => 1.0,
            };
            let run = simulate_receiver(s, y0, cfg, Fading::Rayleigh, sens)?;
            let (name, analytic, est) = match q {
                Quantity::MeanInterference => ("mean_interference", mean_interference(s, y0)?, run.interference()),
                Quantity::Laplace { s_arg } => {
                    meta.insert("s", s_arg);
                    ("laplace", laplace_interference(s, y0, s_arg)?, run.laplace(s_arg))
                }
                _ => ("outage", outage_probability(s, y0)?, run.outage()),
            };
            let r_max = run.r_max;
            (name, analytic, est, Some(run), r_max)
        }
    };
    meta.insert("quantity", name);
    let mut t = CurveTable::new(
        meta,
        &["mean", "std_error", "ci95_low", "ci95_high", "trials", "r_max", "analytic"],
    );
    t.push(vec![
        est.mean,
        est.std_error,
        est.ci95_low,
        est.ci95_high,
        est.trials as f64,
        r_max,
        analytic,
    ])?;
    Ok((t, run))
}

/// `beta` values of a dB grid in linear scale.
pub fn db_grid_to_linear(grid: &[f64]) -> Vec<f64> {
    grid.iter().map(|b| db_to_linear(*b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChannelParams, ShapeFunction};

    fn exp3(alpha: PathLossExponent, lambda: f64, eta: f64) -> NetworkScenario {
        NetworkScenario::new(
            ShapeFunction::exp_power(100.0, 3.0).unwrap(),
            lambda,
            ChannelParams::new(alpha, 1.0, 10.0, eta, 0.5).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn grids() {
        assert_eq!(linear_grid(0.0, 300.0, 25.0).unwrap().len(), 13);
        assert_eq!(linear_grid(0.0, 1.0, 0.1).unwrap().len(), 11);
        assert!(linear_grid(5.0, 1.0, 1.0).unwrap().is_empty());
        assert!(linear_grid(0.0, 1.0, 0.0).is_err());
        let g = linear_grid(-20.0, 20.0, 0.5).unwrap();
        assert_eq!((g[0], *g.last().unwrap(), g.len()), (-20.0, 20.0, 81));
    }

    #[test]
    fn op_curve_columns_and_limits() {
        let s = exp3(PathLossExponent::Two, 0.0, 0.1);
        let t = op_curve(&s, &[0.0, 100.0, 200.0], None).unwrap();
        assert_eq!(t.columns, ["y0", "q_analytic"]);
        let expect = 1.0 - (-0.05f64).exp();
        assert!(t.column("q_analytic").unwrap().iter().all(|q| (q - expect).abs() < 1e-15));
        let empty = op_curve(&s, &[], None).unwrap();
        assert!(empty.rows.is_empty());
        assert_eq!(empty.to_csv().lines().count(), 2);
        let with_mc = op_curve(&s, &[10.0], Some(&SimConfig::new(100, 1))).unwrap();
        assert_eq!(with_mc.columns.len(), 5);
    }

    #[test]
    fn gamma_curve_requires_alpha_four() {
        assert!(gamma_curve(&exp3(PathLossExponent::Two, 1e-3, 0.0), &[0.0]).is_err());
        let flat = NetworkScenario::new(
            ShapeFunction::Constant,
            1e-3,
            ChannelParams::new(PathLossExponent::Four, 1.0, 10.0, 0.0, 0.5).unwrap(),
        )
        .unwrap();
        let t = gamma_curve(&flat, &[0.0, 50.0, 400.0]).unwrap();
        assert!(t.column("gamma").unwrap().iter().all(|g| g.abs() < 1e-9));
        let t0 = gamma_curve(&flat.with_lambda(0.0), &[0.0, 50.0]).unwrap();
        assert!(t0.column("gamma").unwrap().iter().all(|g| *g == 0.0));
    }

    #[test]
    fn validate_stock_scenario() {
        let out = validate(&exp3(PathLossExponent::Four, 1e-3, 0.0), None).unwrap();
        assert!(out.passed(), "{}", out.to_text());
        assert!(out.checks.len() >= 12);
    }

    #[test]
    fn support_of_homogeneous_alpha_four() {
        // the disk of radius rho carries (pi / sqrt c) atan(rho^2 / sqrt c),
        // half of the total at rho^2 = sqrt c
        let c: f64 = 4.0;
        let s = NetworkScenario::new(
            ShapeFunction::Constant,
            1e-3,
            ChannelParams::new(PathLossExponent::Four, c, 10.0, 0.0, 0.5).unwrap(),
        )
        .unwrap();
        let expect = 1e5 * -(-1e-3 * PI * c.sqrt()).exp_m1();
        let got = simulation_support(&s, 37.0, c, 100_000).unwrap();
        assert!((got / expect - 1.0).abs() < 0.03, "{got} vs {expect}");
    }

    #[test]
    fn sparse_edge_is_flagged() {
        let s = exp3(PathLossExponent::Four, 1e-3, 0.0);
        assert!(simulation_support(&s, 200.0, 1.0, 100_000).unwrap() < MIN_SUPPORT);
        assert!(simulation_support(&s, 0.0, 1.0, 100_000).unwrap() > MIN_SUPPORT);
        let out_arg = s.channel.beta * s.channel.link_inverse_gain();
        assert!(simulation_support(&s, 200.0, 1.0 + out_arg, 100_000).unwrap() > MIN_SUPPORT);
    }

    #[test]
    fn validate_rejects_homogeneous_alpha_two() {
        let s = NetworkScenario::new(
            ShapeFunction::Constant,
            1e-3,
            ChannelParams::new(PathLossExponent::Two, 1.0, 10.0, 0.0, 0.5).unwrap(),
        )
        .unwrap();
        let out = validate(&s, None).unwrap();
        assert!(!out.passed());
        assert!(out.to_text().contains("tail"), "{}", out.to_text());
    }

    #[test]
    fn simulate_table() {
        let s = exp3(PathLossExponent::Two, 1e-3, 0.0);
        let (t, run) = simulate(&s, 50.0, Quantity::Outage, &SimConfig::new(300, 4)).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(run.unwrap().records.len(), 300);
        let (again, _) = simulate(&s, 50.0, Quantity::Outage, &SimConfig::new(300, 4)).unwrap();
        assert_eq!(t.to_csv(), again.to_csv());
    }
}
