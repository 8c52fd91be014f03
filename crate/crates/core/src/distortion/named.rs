//! Stock distortion functions and their `name[:param]` shorthand.

use serde::{Deserialize, Serialize};

use super::{DistortionFunction, Knot, QsmParams};
use crate::error::{Error, Result};

/// Knot count used for sampled curved distortions.
pub const DEFAULT_KNOTS: usize = 1024;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Named {
    Identity,
    /// `p^γ`, sampled.
    Power {
        gamma: f64,
        knots: usize,
    },
    /// `1 − (1 − p)^γ`, sampled.
    DualPower {
        gamma: f64,
        knots: usize,
    },
    /// `min(p / (1 − α'), 1)`.
    Cap {
        alpha: f64,
    },
    Qsm(QsmParams),
    /// `1{p > α}`.
    IndicatorAbove {
        alpha: f64,
    },
    /// Continuous interpolant through a value table.
    Sampled {
        points: Vec<(f64, f64)>,
    },
}

impl Named {
    pub fn build(&self) -> Result<DistortionFunction> {
        match self {
            Named::Identity => Ok(DistortionFunction::identity()),
            Named::Power { gamma, knots } => {
                check_gamma(*gamma)?;
                if *gamma == 1.0 {
                    return Ok(DistortionFunction::identity());
                }
                sample(|p| p.powf(*gamma), *knots)
            }
            Named::DualPower { gamma, knots } => {
                check_gamma(*gamma)?;
                if *gamma == 1.0 {
                    return Ok(DistortionFunction::identity());
                }
                sample(|p| 1.0 - (1.0 - p).powf(*gamma), *knots)
            }
            Named::Cap { alpha } => {
                if !(0.0..1.0).contains(alpha) {
                    return Err(Error::InvalidDistortion(format!(
                        "cap needs alpha in [0,1), got {alpha}"
                    )));
                }
                if *alpha == 0.0 {
                    return Ok(DistortionFunction::identity());
                }
                DistortionFunction::interpolate(&[(0.0, 0.0), (1.0 - alpha, 1.0), (1.0, 1.0)], false)
            }
            Named::Qsm(params) => DistortionFunction::from_qsm(params),
            Named::IndicatorAbove { alpha } => {
                if !(0.0..1.0).contains(alpha) {
                    return Err(Error::InvalidDistortion(format!(
                        "indicator_above needs alpha in [0,1), got {alpha}"
                    )));
                }
                let knots = if *alpha == 0.0 {
                    vec![
                        Knot {
                            t: 0.0,
                            value: 0.0,
                            left: 0.0,
                            right: 1.0,
                        },
                        Knot {
                            t: 1.0,
                            value: 1.0,
                            left: 1.0,
                            right: 1.0,
                        },
                    ]
                } else {
                    vec![
                        Knot {
                            t: 0.0,
                            value: 0.0,
                            left: 0.0,
                            right: 0.0,
                        },
                        Knot {
                            t: *alpha,
                            value: 0.0,
                            left: 0.0,
                            right: 1.0,
                        },
                        Knot {
                            t: 1.0,
                            value: 1.0,
                            left: 1.0,
                            right: 1.0,
                        },
                    ]
                };
                DistortionFunction::from_knots(knots, false)
            }
            Named::Sampled { points } => DistortionFunction::interpolate(points, true),
        }
    }

    /// Parses `identity`, `power:2`, `dual_power:0.5`, `cap:0.2`,
    /// `indicator_above:0.3` or `qsm:a,b,k,alpha,c`.
    pub fn parse_shorthand(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let num = |what: &str| -> Result<f64> {
            let p = param.ok_or_else(|| Error::InvalidDistortion(format!("{name} needs a parameter")))?;
            p.parse()
                .map_err(|_| Error::InvalidDistortion(format!("{name}: bad {what} {p:?}")))
        };
        match name {
            "identity" => Ok(Named::Identity),
            "power" => Ok(Named::Power {
                gamma: num("gamma")?,
                knots: DEFAULT_KNOTS,
            }),
            "dual_power" => Ok(Named::DualPower {
                gamma: num("gamma")?,
                knots: DEFAULT_KNOTS,
            }),
            "cap" => Ok(Named::Cap { alpha: num("alpha")? }),
            "indicator_above" => Ok(Named::IndicatorAbove { alpha: num("alpha")? }),
            "qsm" => {
                let p = param.ok_or_else(|| Error::InvalidDistortion("qsm needs a,b,k,alpha,c".into()))?;
                let v: Vec<f64> = p
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::InvalidDistortion(format!("qsm: bad parameters {p:?}")))?;
                match v[..] {
                    [a, b, k, alpha, c] => Ok(Named::Qsm(QsmParams::new(a, b, k, alpha, c)?)),
                    _ => Err(Error::InvalidDistortion(
                        "qsm needs five parameters a,b,k,alpha,c".into(),
                    )),
                }
            }
            other => Err(Error::InvalidDistortion(format!("unknown distortion name {other:?}"))),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDistortion(format!("gamma must be positive, got {gamma}")))
    }
}

fn sample(f: impl Fn(f64) -> f64, knots: usize) -> Result<DistortionFunction> {
    if knots < 2 {
        return Err(Error::InvalidDistortion("need at least two knots".into()));
    }
    let points: Vec<(f64, f64)> = (0..=knots)
        .map(|i| {
            let p = i as f64 / knots as f64;
            (p, f(p))
        })
        .collect();
    DistortionFunction::interpolate(&points, true)
}
