use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance at which a noise-to-signal ratio given for a random link
/// distance is referenced.
pub const REFERENCE_DISTANCE: f64 = 10.0;

/// Supported path loss exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PathLossExponent {
    Two,
    Four,
}

impl PathLossExponent {
    pub fn value(self) -> f64 {
        match self {
            PathLossExponent::Two => 2.0,
            PathLossExponent::Four => 4.0,
        }
    }

    /// `x^alpha`.
    #[inline]
    pub fn pow(self, x: f64) -> f64 {
        match self {
            PathLossExponent::Two => x * x,
            PathLossExponent::Four => {
                let x2 = x * x;
                x2 * x2
            }
        }
    }
}

impl TryFrom<f64> for PathLossExponent {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        if v == 2.0 {
            Ok(PathLossExponent::Two)
        } else if v == 4.0 {
            Ok(PathLossExponent::Four)
        } else {
            Err(Error::Parse {
                path: "channel.alpha".into(),
                message: format!("path loss exponent must be 2 or 4, got {v}"),
            })
        }
    }
}

/// Link and receiver parameters shared by every node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel", into = "RawChannel")]
pub struct ChannelParams {
    pub alpha: PathLossExponent,
    /// Path loss regularizer: `l(x) = 1 / (c + x^alpha)`.
    pub c: f64,
    /// Link distance.
    pub d: f64,
    /// Average noise-to-signal ratio (linear).
    pub eta: f64,
    /// SINR threshold (linear); zero means every transmission succeeds.
    pub beta: f64,
}

impl ChannelParams {
    pub fn new(alpha: PathLossExponent, c: f64, d: f64, eta: f64, beta: f64) -> Result<Self> {
        let ch = Self {
            alpha,
            c,
            d,
            eta,
            beta,
        };
        ch.check()?;
        Ok(ch)
    }

    pub fn check(&self) -> Result<()> {
        let fail = |key: &str, rule: &str, v: f64| {
            Err(Error::Parse {
                path: format!("channel.{key}"),
                message: format!("must be finite and {rule}, got {v}"),
            })
        };
        if !(self.c > 0.0 && self.c.is_finite()) {
            return fail("c", "> 0", self.c);
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return fail("d", "> 0", self.d);
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return fail("eta", ">= 0", self.eta);
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return fail("beta", ">= 0", self.beta);
        }
        Ok(())
    }

    /// Inverse path gain of the reference link, `c + d^alpha`.
    pub fn link_inverse_gain(&self) -> f64 {
        self.c + self.alpha.pow(self.d)
    }

    /// Noise-to-signal ratio for a link of length `d` when `eta` is
    /// referenced to [`REFERENCE_DISTANCE`].
    pub fn eta_at(&self, d: f64) -> f64 {
        self.eta * (self.c + self.alpha.pow(d)) / (self.c + self.alpha.pow(REFERENCE_DISTANCE))
    }

    pub fn with_beta(self, beta: f64) -> Self {
        Self { beta, ..self }
    }

    pub fn with_d(self, d: f64) -> Self {
        Self { d, ..self }
    }

    pub fn with_c(self, c: f64) -> Self {
        Self { c, ..self }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }
}

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Parses a power ratio: either a plain linear number or a number followed
/// by a `dB` suffix (`"-8dB"`, `"3 dB"`).
pub fn parse_level(text: &str) -> Result<f64> {
    let t = text.trim();
    let lower = t.to_ascii_lowercase();
    let (num, is_db) = match lower.strip_suffix("db") {
        Some(rest) => (rest.trim(), true),
        None => (t, false),
    };
    let v: f64 = num.parse().map_err(|_| Error::Parse {
        path: "level".into(),
        message: format!("expected a number or a dB value like \"-8dB\", got {text:?}"),
    })?;
    Ok(if is_db { db_to_linear(v) } else { v })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Level {
    Linear(f64),
    Text(String),
}

impl Level {
    fn linear(&self, key: &str) -> Result<f64> {
        match self {
            Level::Linear(v) => Ok(*v),
            Level::Text(s) => parse_level(s).map_err(|e| match e {
                Error::Parse { message, .. } => Error::Parse {
                    path: format!("channel.{key}"),
                    message,
                },
                other => other,
            }),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    alpha: f64,
    c: f64,
    d: f64,
    eta: Level,
    beta: Level,
}

impl TryFrom<RawChannel> for ChannelParams {
    type Error = Error;

    fn try_from(raw: RawChannel) -> Result<Self> {
        let alpha = PathLossExponent::try_from(raw.alpha)?;
        ChannelParams::new(
            alpha,
            raw.c,
            raw.d,
            raw.eta.linear("eta")?,
            raw.beta.linear("beta")?,
        )
    }
}

impl From<ChannelParams> for RawChannel {
    fn from(ch: ChannelParams) -> Self {
        RawChannel {
            alpha: ch.alpha.value(),
            c: ch.c,
            d: ch.d,
            eta: Level::Linear(ch.eta),
            beta: Level::Linear(ch.beta),
        }
    }
}

/// Power path loss `1 / (c + dist^alpha)`.
pub fn path_loss(dist: f64, ch: &ChannelParams) -> f64 {
    1.0 / (ch.c + ch.alpha.pow(dist))
}

/// SINR of the reference link: `g / (eta + (c + d^alpha) I)`.
///
/// A zero denominator (no noise, no interference) yields `+inf` for a
/// positive gain and `0` for a zero gain.
pub fn sinr(fading_gain: f64, interference: f64, ch: &ChannelParams) -> f64 {
    let denom = ch.eta + ch.link_inverse_gain() * interference;
    if fading_gain == 0.0 {
        0.0
    } else if denom == 0.0 {
        f64::INFINITY
    } else {
        fading_gain / denom
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(alpha: PathLossExponent, eta: f64) -> ChannelParams {
        ChannelParams::new(alpha, 1.0, 10.0, eta, 0.5).unwrap()
    }

    #[test]
    fn path_loss_examples() {
        assert_eq!(path_loss(0.0, &ch(PathLossExponent::Four, 0.0)), 1.0);
        assert!((path_loss(10.0, &ch(PathLossExponent::Two, 0.0)) - 1.0 / 101.0).abs() < 1e-18);
        assert!((path_loss(10.0, &ch(PathLossExponent::Four, 0.0)) - 1.0 / 10001.0).abs() < 1e-18);
    }

    #[test]
    fn path_loss_decreasing_and_bounded() {
        for alpha in [PathLossExponent::Two, PathLossExponent::Four] {
            let c = ch(alpha, 0.0);
            let mut prev = path_loss(0.0, &c);
            assert!(prev <= 1.0 / c.c);
            for i in 1..1000 {
                let v = path_loss(i as f64 * 0.05, &c);
                assert!(v < prev && v > 0.0);
                prev = v;
            }
        }
    }

    #[test]
    fn sinr_examples() {
        let c = ch(PathLossExponent::Two, 0.1);
        assert!((sinr(1.0, 0.0, &c) - 10.0).abs() < 1e-12);
        assert_eq!(sinr(0.0, 0.3, &c), 0.0);
        let c0 = ch(PathLossExponent::Two, 0.0);
        assert!((sinr(2.0, 0.001, &c0) - 2.0 / 0.101).abs() < 1e-12);
        assert_eq!(sinr(1.0, 0.0, &c0), f64::INFINITY);
    }

    #[test]
    fn db_parsing() {
        assert!((parse_level("-8dB").unwrap() - 0.158_489_319_246_111_35).abs() < 1e-15);
        assert!((parse_level(" 10 db ").unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(parse_level("0.5").unwrap(), 0.5);
        assert!(parse_level("loud").is_err());
        let raw = r#"{"alpha":2,"c":1,"d":10,"eta":"-8dB","beta":"0dB"}"#;
        let c: ChannelParams = serde_json::from_str(raw).unwrap();
        assert!((c.beta - 1.0).abs() < 1e-15);
        assert!((linear_to_db(c.eta) + 8.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_channels_name_the_key() {
        let raw = r#"{"alpha":3,"c":1,"d":10,"eta":0,"beta":1}"#;
        let err = serde_json::from_str::<ChannelParams>(raw).unwrap_err().to_string();
        assert!(err.contains("channel.alpha"), "{err}");
        let raw = r#"{"alpha":2,"c":0,"d":10,"eta":0,"beta":1}"#;
        let err = serde_json::from_str::<ChannelParams>(raw).unwrap_err().to_string();
        assert!(err.contains("channel.c"), "{err}");
    }

    #[test]
    fn eta_reference_scaling() {
        let c = ch(PathLossExponent::Two, 0.2);
        assert!((c.eta_at(REFERENCE_DISTANCE) - 0.2).abs() < 1e-15);
        assert!((c.eta_at(20.0) - 0.2 * 401.0 / 101.0).abs() < 1e-15);
    }
}
