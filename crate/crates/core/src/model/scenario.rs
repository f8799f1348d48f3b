use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::channel::{ChannelParams, PathLossExponent};
use super::shape::{ShapeFunction, TailDecay};
use crate::error::{Error, Result};

/// One fully specified analysis case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScenario", into = "RawScenario")]
pub struct NetworkScenario {
    pub shape: ShapeFunction,
    /// Base intensity; the transmitter intensity is `lambda F(r)`.
    pub lambda: f64,
    pub channel: ChannelParams,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    shape: ShapeFunction,
    lambda: f64,
    channel: ChannelParams,
}

impl TryFrom<RawScenario> for NetworkScenario {
    type Error = Error;

    fn try_from(raw: RawScenario) -> Result<Self> {
        NetworkScenario::new(raw.shape, raw.lambda, raw.channel)
    }
}

impl From<NetworkScenario> for RawScenario {
    fn from(s: NetworkScenario) -> Self {
        RawScenario {
            shape: s.shape,
            lambda: s.lambda,
            channel: s.channel,
        }
    }
}

impl NetworkScenario {
    /// Checks parameter ranges only; the theorem-level conditions are
    /// reported by [`validate_scenario`]. `lambda = 0` (an empty network) is
    /// accepted.
    pub fn new(shape: ShapeFunction, lambda: f64, channel: ChannelParams) -> Result<Self> {
        shape.check_params()?;
        channel.check()?;
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Parse {
                path: "lambda".into(),
                message: format!("must be finite and >= 0, got {lambda}"),
            });
        }
        Ok(Self {
            shape,
            lambda,
            channel,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let message = inner.to_string();
            // our own TryFrom errors already carry a dotted key path
            let path = if message.starts_with("failed to parse `") || path == "." {
                message
                    .strip_prefix("failed to parse `")
                    .and_then(|m| m.split_once('`'))
                    .map(|(p, _)| p.to_string())
                    .unwrap_or(path)
            } else {
                path
            };
            Error::Parse { path, message }
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    pub fn with_channel(&self, channel: ChannelParams) -> Self {
        Self {
            channel,
            ..self.clone()
        }
    }

    pub fn with_shape(&self, shape: ShapeFunction) -> Self {
        Self {
            shape,
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// The restriction a violation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Restriction {
    Parameters,
    Positivity,
    Normalization,
    Derivative,
    TailDecay,
    /// `alpha = 2` needs `nu > 0` for finite interference.
    TailCondition,
    /// Average sum throughput needs `nu > 2`.
    AstTail,
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Restriction::Parameters => "parameters",
            Restriction::Positivity => "positivity",
            Restriction::Normalization => "normalization",
            Restriction::Derivative => "derivative",
            Restriction::TailDecay => "tail-decay",
            Restriction::TailCondition => "tail-condition",
            Restriction::AstTail => "ast-tail",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub severity: Severity,
    pub restriction: Restriction,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}[{}]: {}", self.restriction, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Warning)
    }

    /// True when no error-level violation was found.
    pub fn is_ok(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.is_ok() {
            Ok(self)
        } else {
            Err(Error::InvalidScenario(
                self.violations
                    .into_iter()
                    .filter(|v| v.severity == Severity::Error)
                    .collect(),
            ))
        }
    }

    fn push(&mut self, severity: Severity, restriction: Restriction, message: String) {
        self.violations.push(Violation {
            severity,
            restriction,
            message,
        });
    }
}

const NORMALIZATION_TOL: f64 = 1e-9;
const DERIVATIVE_RTOL: f64 = 1e-6;
const TAIL_RTOL: f64 = 0.05;

/// Checks a scenario against every restriction the analysis relies on.
pub fn validate_scenario(s: &NetworkScenario) -> ValidationReport {
    let mut report = ValidationReport::default();
    let err = Severity::Error;

    if let Err(e) = s.shape.check_params() {
        report.push(err, Restriction::Parameters, e.to_string());
    }
    if let Err(e) = s.channel.check() {
        report.push(err, Restriction::Parameters, e.to_string());
    }
    if !(s.lambda >= 0.0 && s.lambda.is_finite()) {
        report.push(
            err,
            Restriction::Parameters,
            format!("lambda must be finite and >= 0, got {}", s.lambda),
        );
    }
    if !report.is_ok() {
        return report;
    }

    let shape = &s.shape;
    let tail = shape.tail();
    let probes = probe_radii(shape);

    if let Some(r) = probes.iter().find(|r| !(shape.eval(**r) >= 0.0)) {
        report.push(
            err,
            Restriction::Positivity,
            format!("F({r}) = {} is negative", shape.eval(*r)),
        );
    }

    let peak = shape.eval(shape.argmax());
    if (peak - 1.0).abs() > NORMALIZATION_TOL {
        report.push(
            err,
            Restriction::Normalization,
            format!("max F must be 1, F({}) = {peak}", shape.argmax()),
        );
    } else if let Some(r) = probes
        .iter()
        .find(|r| shape.eval(**r) > 1.0 + NORMALIZATION_TOL)
    {
        report.push(
            err,
            Restriction::Normalization,
            format!("F({r}) = {} exceeds 1", shape.eval(*r)),
        );
    }

    let kinks: Vec<f64> = shape
        .breakpoints()
        .into_iter()
        .chain(shape.jumps().into_iter().map(|j| j.at))
        .collect();
    let scale = shape.length_scale();
    for &r in &probes {
        let h = 1e-6 * r.max(scale);
        if r < 2.0 * h || kinks.iter().any(|k| (r - k).abs() < 2.0 * h) {
            continue;
        }
        let fd = (shape.eval(r + h) - shape.eval(r - h)) / (2.0 * h);
        let f = shape.deriv(r);
        if (fd - f).abs() > DERIVATIVE_RTOL * f.abs() + 1e-9 / scale {
            report.push(
                err,
                Restriction::Derivative,
                format!("f({r}) = {f} disagrees with the finite difference {fd}"),
            );
            break;
        }
    }

    match tail {
        TailDecay::Polynomial { nu, limit, onset } => {
            for m in [1.0, 2.0, 4.0, 8.0] {
                let r = onset.max(scale) * m;
                let v = shape.eval(r) * r.powf(nu);
                if (v - limit).abs() > TAIL_RTOL * limit {
                    report.push(
                        err,
                        Restriction::TailDecay,
                        format!("F(r) r^{nu} = {v} at r = {r}, declared limit {limit}"),
                    );
                    break;
                }
            }
        }
        TailDecay::SuperPolynomial { onset } => {
            let r = 8.0 * onset.max(scale);
            let v = shape.eval(r) * r.powi(3);
            if v > 1e-3 {
                report.push(
                    err,
                    Restriction::TailDecay,
                    format!("declared super-polynomial decay but F({r}) r^3 = {v}"),
                );
            }
        }
    }

    let nu = tail.nu();
    if s.channel.alpha == PathLossExponent::Two && !(nu > 0.0) {
        report.push(
            err,
            Restriction::TailCondition,
            format!(
                "tail condition nu>0 fails (nu = {nu}): mean interference is infinite for alpha = 2"
            ),
        );
    }
    if !(nu > 2.0) {
        report.push(
            Severity::Warning,
            Restriction::AstTail,
            format!("average sum throughput requires nu>2 (nu = {nu})"),
        );
    }
    report
}

fn probe_radii(shape: &ShapeFunction) -> Vec<f64> {
    let top = 2.0 * shape.tail().onset().max(shape.length_scale());
    let n = 400;
    let mut out: Vec<f64> = (0..=n).map(|i| top * i as f64 / n as f64).collect();
    // logarithmic probes resolve the region near the origin
    let lo = 1e-4 * shape.length_scale();
    out.extend((0..60).map(|i| lo * (top / lo).powf(i as f64 / 59.0)));
    out.extend(shape.breakpoints());
    out.push(shape.argmax());
    out
}
