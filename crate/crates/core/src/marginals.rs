//! Univariate lifetime laws for the system components.
//!
//! Every model exposes the marginal distribution `u_i(t) = F_i(t)` and the
//! marginal survival `û_i(t) = 1 - F_i(t)` that the copula layer consumes,
//! together with the usual aging functions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimal interface of a continuous lifetime distribution on `[0, ∞)`.
pub trait Lifetime {
    fn cdf(&self, t: f64) -> Result<f64>;
    fn sf(&self, t: f64) -> Result<f64>;
    fn pdf(&self, t: f64) -> Result<f64>;
    fn reversed_hazard(&self, t: f64) -> Result<f64>;
}

/// Component lifetime law. Parametrised by a rate so that the cumulative
/// hazard is `(rate·t)^shape`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarginalModel {
    Exponential { rate: f64 },
    Weibull { rate: f64, shape: f64 },
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        Err(Error::domain(format!("time must be non-negative, got {t}")))
    } else {
        Ok(())
    }
}

impl MarginalModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        check_positive("rate", rate)?;
        Ok(MarginalModel::Exponential { rate })
    }

    pub fn weibull(rate: f64, shape: f64) -> Result<Self> {
        check_positive("rate", rate)?;
        check_positive("shape", shape)?;
        Ok(MarginalModel::Weibull { rate, shape })
    }

    pub fn rate(&self) -> f64 {
        match *self {
            MarginalModel::Exponential { rate } | MarginalModel::Weibull { rate, .. } => rate,
        }
    }

    fn shape(&self) -> f64 {
        match *self {
            MarginalModel::Exponential { .. } => 1.0,
            MarginalModel::Weibull { shape, .. } => shape,
        }
    }

    /// Cumulative hazard `H(t) = (rate·t)^shape`.
    fn cumulative_hazard(&self, t: f64) -> f64 {
        match *self {
            MarginalModel::Exponential { rate } => rate * t,
            MarginalModel::Weibull { rate, shape } => (rate * t).powf(shape),
        }
    }

    pub fn cdf(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(-(-self.cumulative_hazard(t)).exp_m1())
    }

    pub fn sf(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok((-self.cumulative_hazard(t)).exp())
    }

    pub fn hazard(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        match *self {
            MarginalModel::Exponential { rate } => Ok(rate),
            MarginalModel::Weibull { rate, shape } => {
                if t == 0.0 {
                    return if shape > 1.0 {
                        Ok(0.0)
                    } else if shape == 1.0 {
                        Ok(rate)
                    } else {
                        Err(Error::Singularity {
                            t,
                            what: "Weibull hazard with shape < 1 is unbounded at the origin".into(),
                        })
                    };
                }
                Ok(shape * rate * (rate * t).powf(shape - 1.0))
            }
        }
    }

    pub fn pdf(&self, t: f64) -> Result<f64> {
        Ok(self.hazard(t)? * self.sf(t)?)
    }

    /// `μ(t) = f(t)/F(t)`; undefined where `F(t) = 0`.
    pub fn reversed_hazard(&self, t: f64) -> Result<f64> {
        let f = self.cdf(t)?;
        if f <= 0.0 {
            return Err(Error::Singularity {
                t,
                what: "reversed hazard needs F(t) > 0".into(),
            });
        }
        Ok(self.pdf(t)? / f)
    }

    /// Closed-form inverse of the cdf on `[0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::domain(format!("quantile level must lie in [0, 1), got {p}")));
        }
        Ok(self.invert_cumulative_hazard(-(-p).ln_1p()))
    }

    /// Inverse of the survival function on `(0, 1]`, accurate for tiny levels.
    pub fn inverse_sf(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::domain(format!("survival level must lie in (0, 1], got {q}")));
        }
        Ok(self.invert_cumulative_hazard(-q.ln()))
    }

    fn invert_cumulative_hazard(&self, h: f64) -> f64 {
        let h = h.max(0.0);
        h.powf(1.0 / self.shape()) / self.rate()
    }

    pub fn mean(&self) -> f64 {
        let k = self.shape();
        gamma(1.0 + 1.0 / k) / self.rate()
    }
}

impl Lifetime for MarginalModel {
    fn cdf(&self, t: f64) -> Result<f64> {
        MarginalModel::cdf(self, t)
    }
    fn sf(&self, t: f64) -> Result<f64> {
        MarginalModel::sf(self, t)
    }
    fn pdf(&self, t: f64) -> Result<f64> {
        MarginalModel::pdf(self, t)
    }
    fn reversed_hazard(&self, t: f64) -> Result<f64> {
        MarginalModel::reversed_hazard(self, t)
    }
}

// Lanczos approximation (g = 7, n = 9); only used for the Weibull mean.
fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + G + 0.5;
        for (i, c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

impl fmt::Display for MarginalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MarginalModel::Exponential { rate } => write!(f, "exp:{rate}"),
            MarginalModel::Weibull { rate, shape } => write!(f, "weibull:{rate},{shape}"),
        }
    }
}

fn parse_number(token: &str) -> Result<f64> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(token, "expected a real number"))
}

impl FromStr for MarginalModel {
    type Err = Error;

    /// Parses `exp:λ` or `weibull:λ,k`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(s, "expected `exp:RATE` or `weibull:RATE,SHAPE`"))?;
        let args: Vec<&str> = args.split(',').collect();
        let wrap = |e: Error| match e {
            Error::Domain(reason) => Error::parse(s, reason),
            other => other,
        };
        match kind.trim() {
            "exp" => match args.as_slice() {
                [rate] => MarginalModel::exponential(parse_number(rate)?).map_err(wrap),
                _ => Err(Error::parse(s, "exponential takes exactly one rate")),
            },
            "weibull" => match args.as_slice() {
                [rate, shape] => {
                    MarginalModel::weibull(parse_number(rate)?, parse_number(shape)?).map_err(wrap)
                }
                _ => Err(Error::parse(s, "weibull takes a rate and a shape")),
            },
            other => Err(Error::parse(other, "unknown marginal kind")),
        }
    }
}
