//! Local throughput: differential transmission capacity, average sum
//! throughput and the sum-rate optimization over the SINR threshold.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::analytic::{analysis_spec, interference_driving, outage_probability};
use crate::error::{Error, Result};
use crate::model::{
    db_to_linear, ChannelParams, NetworkScenario, PathLossExponent, ShapeFunction, REFERENCE_DISTANCE,
};
use crate::quadrature::{integrate_piecewise, integrate_piecewise_try, QuadratureSpec, Upper};

/// Link distances whose contribution to the success probability is provably
/// below this are not integrated; never more than the nearest-neighbor tail
/// `1 - F_d < NN_TAIL`.
pub const NN_TAIL: f64 = 1e-8;

/// Points of the coarse grid that brackets the sum-rate maximizer.
pub const COARSE_GRID: usize = 25;

/// Width (dB) of the final golden-section bracket.
pub const BETA_TOL_DB: f64 = 0.01;

/// Objectives whose spread over the search range is below this are flat.
pub const FLAT_SPREAD: f64 = 1e-12;

/// Outage-constrained density query at a point at distance `y0` from the
/// origin.
#[derive(Clone, Debug, PartialEq)]
pub struct DtcQuery {
    pub y0: f64,
    pub epsilon: f64,
    pub channel: ChannelParams,
    pub shape: ShapeFunction,
}

/// Largest intensity `lambda(y0, eps)` whose outage at `y0` equals `eps`.
pub fn dtc_intensity(q: &DtcQuery) -> Result<f64> {
    if !(q.epsilon > 0.0 && q.epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "outage budget must lie in (0, 1), got {}",
            q.epsilon
        )));
    }
    if !(q.y0 >= 0.0 && q.y0.is_finite()) {
        return Err(Error::Domain(format!("y0 must be finite and >= 0, got {}", q.y0)));
    }
    q.channel.check()?;
    let ch = &q.channel;
    if ch.beta == 0.0 {
        return Err(Error::Domain("a zero SINR threshold never causes outage".into()));
    }
    let budget = -(-q.epsilon).ln_1p();
    let noise_load = ch.beta * ch.eta;
    if noise_load >= budget {
        return Err(Error::Infeasible { noise_load, budget });
    }
    let s = ch.beta * ch.link_inverse_gain();
    let a = interference_driving(&q.shape, ch.alpha, q.y0, s + ch.c, &analysis_spec())?.value;
    if !(a > 0.0) {
        return Err(Error::Domain(format!(
            "no interference reaches y0 = {}; every density meets the budget",
            q.y0
        )));
    }
    Ok((budget - noise_load) / (s * a))
}

/// Differential transmission capacity `lambda(y0, eps) (1 - eps)`.
pub fn dtc(q: &DtcQuery) -> Result<f64> {
    Ok(dtc_intensity(q)? * (1.0 - q.epsilon))
}

/// What counts as a successful transmission.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuccessModel {
    /// SINR above threshold at the fixed link distance `d`.
    SinrOnly,
    /// SINR above threshold with the link distance set by the nearest
    /// receiver of an independent receiver process of intensity
    /// `lambda_r F(r)`.
    SinrAndConnected,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AstQuery {
    pub scenario: NetworkScenario,
    pub success_model: SuccessModel,
    /// Receiver intensity; only read by [`SuccessModel::SinrAndConnected`].
    pub lambda_r: Option<f64>,
}

/// Link-distance law of the typical transmitter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LinkDistance {
    /// Every link has length `d`; the scenario's `eta` applies as is.
    Fixed(f64),
    /// Distance to the nearest receiver of a PPP with local intensity
    /// `lambda_r F(r)`, noise scaled from the reference distance.
    NearestNeighbor { lambda_r: f64 },
}

/// `1 - exp(-local_intensity pi d^2)`.
pub fn nearest_neighbor_cdf(d: f64, local_intensity: f64) -> f64 {
    -(-local_intensity * PI * d * d).exp_m1()
}

fn require_tail(shape: &ShapeFunction) -> Result<()> {
    let nu = shape.tail().nu();
    if nu > 2.0 {
        Ok(())
    } else {
        Err(Error::TailCondition { nu, required: 2.0 })
    }
}

fn radial_points(shape: &ShapeFunction) -> (Vec<f64>, f64) {
    let mut points = shape.breakpoints();
    points.extend(shape.jumps().iter().map(|j| j.at));
    (points, shape.length_scale())
}

/// `int_0^inf r F(r) dr`.
fn attempt_mass(shape: &ShapeFunction, spec: &QuadratureSpec) -> Result<f64> {
    let (points, scale) = radial_points(shape);
    Ok(integrate_piecewise(|r| r * shape.eval(r), 0.0, &points, Upper::Infinite { scale }, spec)?.value)
}

/// Success probability of a link of length `d` whose receiver sits at
/// distance `y0` from the origin, with noise-to-signal ratio `eta`.
fn link_success(s: &NetworkScenario, y0: f64, d: f64, eta: f64, beta: f64, spec: &QuadratureSpec) -> Result<f64> {
    let ch = &s.channel;
    let noise = (-beta * eta).exp();
    if s.lambda == 0.0 || noise == 0.0 {
        return Ok(noise);
    }
    let s_arg = beta * (ch.c + ch.alpha.pow(d));
    let a = interference_driving(&s.shape, ch.alpha, y0, s_arg + ch.c, spec)?.value;
    Ok((-s.lambda * s_arg * a).exp() * noise)
}

/// Nested quadrature tolerances for the success-ratio integrals: radial,
/// link distance, interference-driving function. Each level is an order of
/// magnitude tighter than the one it feeds.
fn nested_specs() -> (QuadratureSpec, QuadratureSpec, QuadratureSpec) {
    let level = |rel_tol: f64| QuadratureSpec {
        abs_tol: 1e-14,
        rel_tol,
        max_subdivisions: 4000,
    };
    (level(1e-7), level(1e-8), level(1e-9))
}

/// Average success probability of a transmitter at distance `r` from the
/// origin whose link distance follows `law`. Interference is evaluated at
/// the transmitter position.
pub fn success_at(s: &NetworkScenario, r: f64, beta: f64, law: LinkDistance) -> Result<f64> {
    let (_, inner, driving) = nested_specs();
    match law {
        LinkDistance::Fixed(d) => link_success(s, r, d, s.channel.eta, beta, &driving),
        LinkDistance::NearestNeighbor { lambda_r } => {
            let local = lambda_r * s.shape.eval(r);
            if !(local > 0.0) {
                return Ok(0.0);
            }
            // t = local pi d^2 turns dF_d into exp(-t) dt
            let Some(t_max) = nn_cutoff(&s.channel, beta, local) else {
                return Ok(0.0);
            };
            let out = integrate_piecewise_try(
                |t| {
                    let d = (t / (local * PI)).sqrt();
                    let eta = s.channel.eta_at(d);
                    Ok(link_success(s, r, d, eta, beta, &driving)? * (-t).exp())
                },
                0.0,
                &[],
                Upper::Finite(t_max),
                &inner,
            )?;
            Ok(out.value)
        }
    }
}

/// Point `t` past which `exp(-t - beta eta(d(t)))`, an upper bound on the
/// link-distance integrand, stays below [`NN_TAIL`]; `None` when noise alone
/// keeps it there for every `t`.
fn nn_cutoff(ch: &ChannelParams, beta: f64, local: f64) -> Option<f64> {
    let budget = -NN_TAIL.ln();
    let ref_gain = ch.c + ch.alpha.pow(REFERENCE_DISTANCE);
    let k = beta * ch.eta / ref_gain;
    let l = budget - k * ch.c;
    if l <= 0.0 {
        return None;
    }
    // beta eta(d) - k c = k (t / (local pi))^(alpha / 2)
    let t = match ch.alpha {
        PathLossExponent::Two => l / (1.0 + k / (local * PI)),
        PathLossExponent::Four => {
            let a = k / (local * PI).powi(2);
            2.0 * l / (1.0 + (1.0 + 4.0 * a * l).sqrt())
        }
    };
    Some(t)
}

/// `int r F(r) P(success at r) dr / int r F(r) dr`.
fn success_ratio(s: &NetworkScenario, beta: f64, law: LinkDistance) -> Result<f64> {
    require_tail(&s.shape)?;
    let (outer, _, _) = nested_specs();
    let (points, scale) = radial_points(&s.shape);
    let mass = attempt_mass(&s.shape, &outer.scaled(1e-2))?;
    let num = integrate_piecewise_try(
        |r| {
            let f = s.shape.eval(r);
            if f == 0.0 {
                return Ok(0.0);
            }
            Ok(r * f * success_at(s, r, beta, law)?)
        },
        0.0,
        &points,
        Upper::Infinite { scale },
        &outer,
    )?;
    Ok((num.value / mass).clamp(0.0, 1.0))
}

/// Average sum throughput: the ratio of expected successful to expected
/// attempted transmissions,
/// `int r (1 - q(r)) F(r) dr / int r F(r) dr`.
///
/// For [`SuccessModel::SinrOnly`], `q(r)` is the outage probability of a
/// receiver at distance `r` from the origin with the scenario's link
/// distance. For [`SuccessModel::SinrAndConnected`], the link distance is
/// averaged over the nearest-neighbor law, interference is evaluated at the
/// transmitter and the scenario's `eta` is taken as referenced to
/// [`crate::model::REFERENCE_DISTANCE`].
pub fn ast(q: &AstQuery, beta_override: Option<f64>) -> Result<f64> {
    let s = &q.scenario;
    require_tail(&s.shape)?;
    let beta = match beta_override {
        Some(b) if b > 0.0 && b.is_finite() => b,
        Some(b) => return Err(Error::Domain(format!("beta must be finite and > 0, got {b}"))),
        None => s.channel.beta,
    };
    match q.success_model {
        SuccessModel::SinrOnly => {
            let ch = s.channel.with_beta(beta);
            if s.lambda == 0.0 {
                return Ok((-beta * ch.eta).exp());
            }
            let sb = s.with_channel(ch);
            let (outer, _, _) = nested_specs();
            let (points, scale) = radial_points(&s.shape);
            let mass = attempt_mass(&s.shape, &outer.scaled(1e-2))?;
            let num = integrate_piecewise_try(
                |r| {
                    let f = s.shape.eval(r);
                    if f == 0.0 {
                        return Ok(0.0);
                    }
                    Ok(r * f * (1.0 - outage_probability(&sb, r)?))
                },
                0.0,
                &points,
                Upper::Infinite { scale },
                &outer,
            )?;
            Ok((num.value / mass).clamp(0.0, 1.0))
        }
        SuccessModel::SinrAndConnected => {
            let lambda_r = q.lambda_r.ok_or_else(|| {
                Error::Domain("the connected success model needs a receiver intensity".into())
            })?;
            check_lambda_r(lambda_r)?;
            success_ratio(s, beta, LinkDistance::NearestNeighbor { lambda_r })
        }
    }
}

fn check_lambda_r(lambda_r: f64) -> Result<()> {
    if lambda_r > 0.0 && lambda_r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "receiver intensity must be finite and > 0, got {lambda_r}"
        )))
    }
}

/// `log2(1 + beta)` times the average success ratio under `law`.
pub fn expected_sum_rate_with(s: &NetworkScenario, beta: f64, law: LinkDistance) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta must be finite and > 0, got {beta}")));
    }
    match law {
        LinkDistance::Fixed(d) if !(d > 0.0 && d.is_finite()) => {
            return Err(Error::Domain(format!("link distance must be > 0, got {d}")))
        }
        LinkDistance::NearestNeighbor { lambda_r } => check_lambda_r(lambda_r)?,
        _ => {}
    }
    Ok((1.0 + beta).log2() * success_ratio(s, beta, law)?)
}

/// Expected sum rate `log2(1 + beta) Omega(beta)` with link distances drawn
/// from the nearest-neighbor law of receivers of intensity `lambda_r F`.
pub fn expected_sum_rate(s: &NetworkScenario, lambda_r: f64, beta: f64) -> Result<f64> {
    expected_sum_rate_with(s, beta, LinkDistance::NearestNeighbor { lambda_r })
}

/// Sum rate at each threshold of `betas_db`, evaluated in parallel and
/// returned in grid order.
pub fn sum_rate_curve(s: &NetworkScenario, lambda_r: f64, betas_db: &[f64]) -> Result<Vec<f64>> {
    betas_db
        .par_iter()
        .map(|&b| expected_sum_rate(s, lambda_r, db_to_linear(b)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetaOptimum {
    pub beta_star: f64,
    pub beta_star_db: f64,
    pub rate_star: f64,
    /// The maximizer sits on an end of the search range.
    pub at_boundary: bool,
    /// The bracketing grid as `(beta_db, objective)` pairs.
    pub coarse: Vec<(f64, f64)>,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes the sum rate over `beta` in `[lo_db, hi_db]` (dB): a
/// 25-point grid brackets the maximum, golden-section search on the dB
/// scale refines it to [`BETA_TOL_DB`].
pub fn optimize_beta(s: &NetworkScenario, lambda_r: f64, beta_range_db: (f64, f64)) -> Result<BetaOptimum> {
    maximize_db(|b| expected_sum_rate(s, lambda_r, db_to_linear(b)), beta_range_db)
}

/// Grid-bracketed golden-section maximization of `objective` over an
/// interval in dB.
pub fn maximize_db<F>(objective: F, (lo, hi): (f64, f64)) -> Result<BetaOptimum>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!("search range must be a finite interval, got [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (COARSE_GRID - 1) as f64;
    let grid: Vec<f64> = (0..COARSE_GRID)
        .map(|i| if i == COARSE_GRID - 1 { hi } else { lo + step * i as f64 })
        .collect();
    let values: Vec<f64> = grid.par_iter().map(|&x| objective(x)).collect::<Result<_>>()?;
    let (best, &vmax) = values
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    let vmin = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(vmax - vmin >= FLAT_SPREAD) {
        return Err(Error::FlatObjective { spread: vmax - vmin });
    }

    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(COARSE_GRID - 1)];
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    while b - a > BETA_TOL_DB {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = objective(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = objective(x2)?;
        }
    }
    let (mut x, mut fx) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    // the golden bracket never reaches the range ends, where a monotone
    // objective peaks
    let mut at_boundary = false;
    if values[best] >= fx {
        x = grid[best];
        fx = values[best];
        at_boundary = best == 0 || best == COARSE_GRID - 1;
    }
    Ok(BetaOptimum {
        beta_star: db_to_linear(x),
        beta_star_db: x,
        rate_star: fx,
        at_boundary,
        coarse: grid.into_iter().zip(values).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn channel(alpha: PathLossExponent, c: f64, eta: f64, beta: f64) -> ChannelParams {
        ChannelParams::new(alpha, c, 10.0, eta, beta).unwrap()
    }

    fn exp250(lambda: f64, eta: f64, beta: f64) -> NetworkScenario {
        NetworkScenario::new(
            ShapeFunction::exponential(250.0).unwrap(),
            lambda,
            channel(PathLossExponent::Two, 1.0, eta, beta),
        )
        .unwrap()
    }

    #[test]
    fn dtc_homogeneous_example() {
        let q = DtcQuery {
            y0: 40.0,
            epsilon: 0.1,
            channel: channel(PathLossExponent::Four, 1.0, 0.0, 0.5),
            shape: ShapeFunction::Constant,
        };
        let s = 0.5 * 10001.0;
        let lam = (1.0f64 / 0.9).ln() / (s * PI * PI / (2.0 * (s + 1.0).sqrt()));
        let got = dtc(&q).unwrap();
        assert!((got - 0.9 * lam).abs() < 1e-12 * lam);
        let scen = NetworkScenario::new(q.shape.clone(), dtc_intensity(&q).unwrap(), q.channel).unwrap();
        let eps = outage_probability(&scen, q.y0).unwrap();
        assert!((eps - 0.1).abs() < 1e-9);
    }

    #[test]
    fn dtc_budget_edges() {
        let shape = ShapeFunction::exp_power(100.0, 3.0).unwrap();
        let mut q = DtcQuery {
            y0: 0.0,
            epsilon: 1e-12,
            channel: channel(PathLossExponent::Four, 1.0, 0.0, 0.5),
            shape,
        };
        assert!(dtc(&q).unwrap() < 1e-14);
        q.epsilon = 0.1;
        q.channel = channel(PathLossExponent::Four, 1.0, -(-0.1f64).ln_1p(), 1.0);
        assert!(matches!(dtc(&q), Err(Error::Infeasible { .. })));
        q.epsilon = 1.0;
        assert!(matches!(dtc(&q), Err(Error::Domain(_))));
    }

    #[test]
    fn dtc_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let shape = ShapeFunction::exp_power(100.0, 3.0).unwrap();
        let mut checked = 0;
        while checked < 20 {
            let alpha = if rng.random::<bool>() { PathLossExponent::Two } else { PathLossExponent::Four };
            let ch = channel(alpha, rng.random_range(0.1..10.0), rng.random_range(0.0..0.2), rng.random_range(0.1..4.0));
            let q = DtcQuery { y0: rng.random_range(0.0..300.0), epsilon: rng.random_range(0.01..0.5), channel: ch, shape: shape.clone() };
            let Ok(lam) = dtc_intensity(&q) else { continue };
            let scen = NetworkScenario::new(shape.clone(), lam, ch).unwrap();
            let eps = outage_probability(&scen, q.y0).unwrap();
            assert!((eps - q.epsilon).abs() < 1e-9, "{eps} vs {}", q.epsilon);
            checked += 1;
        }
    }

    #[test]
    fn nearest_neighbor_examples() {
        assert_eq!(nearest_neighbor_cdf(0.0, 0.01), 0.0);
        assert_eq!(nearest_neighbor_cdf(25.0, 0.0), 0.0);
        assert!((nearest_neighbor_cdf(10.0, 0.01) - (1.0 - (-PI).exp())).abs() < 1e-15);
        assert!((nearest_neighbor_cdf(10.0, 0.01) - 0.9568).abs() < 1e-4);
        // the density used by the sum rate integrates to the CDF
        let local = 3e-3;
        let density = |d: f64| 2.0 * PI * local * d * (-local * PI * d * d).exp();
        for d in [1.0, 7.0, 30.0] {
            let m = integrate(density, 0.0, d, &QuadratureSpec::default()).unwrap().value;
            assert!((m - nearest_neighbor_cdf(d, local)).abs() < 1e-10);
        }
    }

    #[test]
    fn ast_interference_free() {
        let q = AstQuery { scenario: exp250(0.0, 0.0, 1.0), success_model: SuccessModel::SinrOnly, lambda_r: None };
        assert_eq!(ast(&q, None).unwrap(), 1.0);
        let q = AstQuery { scenario: exp250(0.0, 0.1, 0.5), ..q };
        assert!((ast(&q, None).unwrap() - (-0.05f64).exp()).abs() < 1e-15);
        assert!((ast(&q, None).unwrap() - 0.9512).abs() < 1e-4);
    }

    #[test]
    fn ast_requires_nu_above_two() {
        for shape in [ShapeFunction::Constant, ShapeFunction::power_law(1.0, 1.5).unwrap()] {
            let q = AstQuery {
                scenario: exp250(1e-3, 0.0, 1.0).with_shape(shape),
                success_model: SuccessModel::SinrOnly,
                lambda_r: None,
            };
            assert!(matches!(ast(&q, None), Err(Error::TailCondition { .. })));
        }
    }

    #[test]
    fn ast_monotone_in_beta_and_lambda() {
        let q = AstQuery { scenario: exp250(1e-3, 0.02, 1.0), success_model: SuccessModel::SinrOnly, lambda_r: None };
        let by_beta: Vec<f64> = [0.1, 0.5, 1.0, 2.0, 8.0].iter().map(|&b| ast(&q, Some(b)).unwrap()).collect();
        assert!(by_beta.windows(2).all(|w| w[1] <= w[0]));
        let by_lambda: Vec<f64> = [0.0, 1e-4, 1e-3, 5e-3]
            .iter()
            .map(|&l| ast(&AstQuery { scenario: q.scenario.with_lambda(l), ..q.clone() }, None).unwrap())
            .collect();
        assert!(by_lambda.windows(2).all(|w| w[1] <= w[0]));
        assert!(by_lambda.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn sum_rate_with_fixed_distance_is_ast() {
        let s = exp250(1e-3, 0.05, 1.0);
        for beta in [0.3, 1.0, 3.0] {
            let q = AstQuery { scenario: s.clone(), success_model: SuccessModel::SinrOnly, lambda_r: None };
            let omega = ast(&q, Some(beta)).unwrap();
            let rate = expected_sum_rate_with(&s, beta, LinkDistance::Fixed(s.channel.d)).unwrap();
            assert!((rate - (1.0 + beta).log2() * omega).abs() < 1e-7 * rate);
        }
    }

    #[test]
    fn connected_ast_matches_sum_rate() {
        let s = exp250(1e-3, 0.1585, 1.0);
        let q = AstQuery { scenario: s.clone(), success_model: SuccessModel::SinrAndConnected, lambda_r: Some(1e-2) };
        let omega = ast(&q, Some(2.0)).unwrap();
        let rate = expected_sum_rate(&s, 1e-2, 2.0).unwrap();
        assert!((rate - 3f64.log2() * omega).abs() < 1e-12);
        let missing = AstQuery { lambda_r: None, ..q };
        assert!(ast(&missing, None).is_err());
    }

    #[test]
    fn sum_rate_limits() {
        let s = exp250(1e-3, 0.1585, 1.0);
        assert!(expected_sum_rate(&s, 1e-2, 1e-6).unwrap() < 2e-6);
        assert!(expected_sum_rate(&s, 1e-2, 1e4).unwrap() < 1e-6);
    }

    #[test]
    fn optimizer_on_known_objectives() {
        let peak = maximize_db(|x| Ok(-(x - 3.3) * (x - 3.3)), (-20.0, 20.0)).unwrap();
        assert!((peak.beta_star_db - 3.3).abs() < 0.05);
        assert!(!peak.at_boundary);
        assert!((peak.beta_star - db_to_linear(peak.beta_star_db)).abs() < 1e-12);

        let rising = maximize_db(|x| Ok((1.0 + db_to_linear(x)).log2()), (-20.0, 20.0)).unwrap();
        assert!(rising.at_boundary);
        assert_eq!(rising.beta_star_db, 20.0);

        assert!(matches!(maximize_db(|_| Ok(0.5), (-1.0, 1.0)), Err(Error::FlatObjective { .. })));
        assert!(maximize_db(|x| Ok(x), (1.0, 1.0)).is_err());
    }

    #[test]
    fn optimizer_interference_and_noise_free() {
        let s = exp250(0.0, 0.0, 1.0);
        let opt = optimize_beta(&s, 1e-2, (-20.0, 20.0)).unwrap();
        assert!(opt.at_boundary);
        assert_eq!(opt.beta_star_db, 20.0);
        assert!((opt.rate_star - 101f64.log2()).abs() < 1e-6);
    }
}
