//! JSON schema for distortion functions.
//!
//! ```json
//! {"type":"pwl_atoms","breakpoints":[{"t":0.0,"value":0.0,"right":-1.0},
//!   {"t":0.3,"value":-0.6,"left":-1.0,"right":0.0},{"t":1.0,"value":1.0,"left":0.0}]}
//! {"type":"qsm","a":1.0,"b":2.0,"k":0.5,"alpha":0.3,"c":0.4}
//! {"type":"named","name":"power","gamma":2.0}
//! ```

use serde::{Deserialize, Serialize};

use super::named::{Named, DEFAULT_KNOTS};
use super::{Breakpoint, DistortionFunction, QsmParams};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistortionSpec {
    PwlAtoms {
        breakpoints: Vec<Breakpoint>,
    },
    Qsm {
        a: f64,
        b: f64,
        k: f64,
        alpha: f64,
        c: f64,
    },
    Named {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        knots: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<(f64, f64)>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
    },
}

impl DistortionSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Accepts either a JSON document or a `name[:param]` shorthand.
    pub fn parse(s: &str) -> Result<Self> {
        let trimmed = s.trim_start();
        if trimmed.starts_with('{') {
            Self::from_json(trimmed)
        } else {
            Ok(Self::from_named(&Named::parse_shorthand(s)?))
        }
    }

    pub fn from_named(named: &Named) -> Self {
        let mut spec = Self::Named {
            name: String::new(),
            gamma: None,
            alpha: None,
            knots: None,
            points: None,
            a: None,
            b: None,
            k: None,
            c: None,
        };
        if let Self::Named {
            name,
            gamma,
            alpha,
            knots,
            points,
            a,
            b,
            k,
            c,
        } = &mut spec
        {
            match named {
                Named::Identity => *name = "identity".into(),
                Named::Power { gamma: g, knots: n } | Named::DualPower { gamma: g, knots: n } => {
                    *name = if matches!(named, Named::Power { .. }) {
                        "power"
                    } else {
                        "dual_power"
                    }
                    .into();
                    *gamma = Some(*g);
                    if *n != DEFAULT_KNOTS {
                        *knots = Some(*n);
                    }
                }
                Named::Cap { alpha: al } => {
                    *name = "cap".into();
                    *alpha = Some(*al);
                }
                Named::IndicatorAbove { alpha: al } => {
                    *name = "indicator_above".into();
                    *alpha = Some(*al);
                }
                Named::Qsm(p) => {
                    *name = "qsm".into();
                    *a = Some(p.a);
                    *b = Some(p.b);
                    *k = Some(p.k);
                    *alpha = Some(p.alpha);
                    *c = Some(p.c);
                }
                Named::Sampled { points: pts } => {
                    *name = "sampled".into();
                    *points = Some(pts.clone());
                }
            }
        }
        spec
    }

    pub fn to_named(&self) -> Result<Option<Named>> {
        let Self::Named {
            name,
            gamma,
            alpha,
            knots,
            points,
            a,
            b,
            k,
            c,
        } = self
        else {
            return Ok(None);
        };
        let need = |v: &Option<f64>, field: &str| {
            v.ok_or_else(|| Error::InvalidDistortion(format!("named distortion {name:?} needs field {field:?}")))
        };
        let knots = knots.unwrap_or(DEFAULT_KNOTS);
        let named = match name.as_str() {
            "identity" => Named::Identity,
            "power" => Named::Power {
                gamma: need(gamma, "gamma")?,
                knots,
            },
            "dual_power" => Named::DualPower {
                gamma: need(gamma, "gamma")?,
                knots,
            },
            "cap" => Named::Cap {
                alpha: need(alpha, "alpha")?,
            },
            "indicator_above" => Named::IndicatorAbove {
                alpha: need(alpha, "alpha")?,
            },
            "qsm" => Named::Qsm(QsmParams::new(
                a.unwrap_or(0.0),
                b.unwrap_or(0.0),
                need(k, "k")?,
                need(alpha, "alpha")?,
                c.unwrap_or(0.0),
            )?),
            "sampled" => Named::Sampled {
                points: points
                    .clone()
                    .ok_or_else(|| Error::InvalidDistortion("sampled distortion needs \"points\"".into()))?,
            },
            other => return Err(Error::InvalidDistortion(format!("unknown distortion name {other:?}"))),
        };
        Ok(Some(named))
    }

    pub fn build(&self) -> Result<DistortionFunction> {
        match self {
            Self::PwlAtoms { breakpoints } => DistortionFunction::new(breakpoints),
            Self::Qsm { a, b, k, alpha, c } => DistortionFunction::from_qsm(&QsmParams::new(*a, *b, *k, *alpha, *c)?),
            Self::Named { .. } => self.to_named()?.expect("named variant").build(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PWL: &str = r#"{"type":"pwl_atoms","breakpoints":[{"t":0.0,"value":0.0,"right":-1.0},{"t":0.3,"value":-0.6,"left":-1.0,"right":0.0},{"t":1.0,"value":1.0,"left":0.0}]}"#;

    #[test]
    fn pwl_schema_round_trips_bit_exact() {
        let spec = DistortionSpec::from_json(PWL).unwrap();
        assert_eq!(serde_json::to_string(&spec).unwrap(), PWL);
        let h = spec.build().unwrap();
        assert_eq!(h.eval(0.3).unwrap(), -0.6);
        assert_eq!(h.eval(0.2).unwrap(), -1.0);
        assert_eq!(h.eval(0.6).unwrap(), 0.0);
        assert_eq!(h.eval(1.0).unwrap(), 1.0);
        assert_eq!(serde_json::to_string(&h).unwrap(), PWL);
    }

    #[test]
    fn qsm_and_named_schemas() {
        let q = DistortionSpec::from_json(r#"{"type":"qsm","a":0,"b":0,"k":1,"alpha":0.3,"c":0.4}"#).unwrap();
        assert_eq!(q.build().unwrap().eval(0.3).unwrap(), 0.4);
        let n = DistortionSpec::from_json(r#"{"type":"named","name":"power","gamma":2.0}"#).unwrap();
        assert!((n.build().unwrap().eval(0.5).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(
            serde_json::to_string(&n).unwrap(),
            r#"{"type":"named","name":"power","gamma":2.0}"#
        );
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(DistortionSpec::from_json(r#"{"type":"qsm","a":0,"b":0,"k":1,"alpha":0.3,"c":0.4,"d":1}"#).is_err());
        assert!(DistortionSpec::from_json(r#"{"type":"named","name":"power","gamma":2.0,"beta":1}"#).is_err());
        assert!(DistortionSpec::from_json(
            r#"{"type":"pwl_atoms","breakpoints":[{"t":0.0,"value":0.0,"slope":1},{"t":1.0,"value":1.0}]}"#
        )
        .is_err());
        assert!(DistortionSpec::from_json(r#"{"type":"spline","knots":[]}"#).is_err());
    }

    #[test]
    fn unknown_name_rejected() {
        let n = DistortionSpec::from_json(r#"{"type":"named","name":"wobble"}"#).unwrap();
        assert!(n.build().is_err());
    }

    #[test]
    fn shorthand_and_json_parse() {
        let a = DistortionSpec::parse("cap:0.25").unwrap().build().unwrap();
        let b = DistortionSpec::parse(r#"{"type":"named","name":"cap","alpha":0.25}"#)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(a, b);
    }
}
