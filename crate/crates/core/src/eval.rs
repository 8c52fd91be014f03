//! Signed Choquet integrals, quantile-spread mixtures and generalized
//! rank-dependent functions on finitely supported laws.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distortion::{DistortionFunction, QsmParams};
use crate::distribution::{DiscreteDistribution, FiniteRandomVariable};
use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, POINT_MERGE_TOL};

/// `I_h(F)` by the descending tail-sum
/// `Σ_i x_(i) (h(T_i) − h(T_{i−1}))`, where `x_(1) > x_(2) > …` and `T_i` is
/// the probability of the `i` largest atoms.
pub fn choquet(h: &DistortionFunction, f: &DiscreteDistribution) -> f64 {
    let atoms = f.atoms();
    let n = atoms.len();
    let mut tail = CompensatedSum::new();
    let mut prev_h = 0.0;
    let mut total = CompensatedSum::new();
    for (i, &(x, p)) in atoms.iter().rev().enumerate() {
        tail.add(p);
        let t = if i + 1 == n { 1.0 } else { tail.value() };
        let cur_h = h.value(t);
        total.add(x * (cur_h - prev_h));
        prev_h = cur_h;
    }
    total.value()
}

/// `I_h(F)` from the integral form
/// `∫_0^∞ h(1 − F(x)) dx + ∫_{−∞}^0 (h(1 − F(x)) − h(1)) dx`, summed over
/// the intervals on which `F` is constant.
pub fn choquet_numeric_oracle(h: &DistortionFunction, f: &DiscreteDistribution) -> f64 {
    let mut grid: Vec<f64> = f.atoms().iter().map(|a| a.0).collect();
    grid.push(0.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let h1 = h.value_at_one();
    let mut total = CompensatedSum::new();
    let mut cdf = CompensatedSum::new();
    let mut atoms = f.atoms().iter().peekable();
    for w in grid.windows(2) {
        let (u, v) = (w[0], w[1]);
        while let Some(&&(x, p)) = atoms.peek() {
            if x <= u {
                cdf.add(p);
                atoms.next();
            } else {
                break;
            }
        }
        let tail = (1.0 - cdf.value()).max(0.0);
        let len = v - u;
        if u >= 0.0 {
            total.add(h.value(tail) * len);
        } else {
            total.add((h.value(tail) - h1) * len);
        }
    }
    total.value()
}

/// `I_h(X) = ∫_0^∞ h(P(X > x)) dx + ∫_{−∞}^0 (h(P(X > x)) − h(1)) dx`,
/// with `P(X > x)` accumulated directly from the state weights.
pub fn choquet_rv(h: &DistortionFunction, x: &FiniteRandomVariable) -> f64 {
    let weights = x.weights();
    let outcomes = x.outcomes();
    let mut order: Vec<usize> = (0..outcomes.len()).collect();
    order.sort_by(|&i, &j| outcomes[j].total_cmp(&outcomes[i]));

    let mut levels: Vec<f64> = outcomes.to_vec();
    levels.push(0.0);
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();

    let h1 = h.value_at_one();
    let mut total = CompensatedSum::new();
    let mut exceed = CompensatedSum::new();
    let mut next = 0;
    let mut all_counted = false;
    // Walk intervals [lo, hi) from the top; P(X > x) there is the weight of
    // states with outcome >= hi.
    for w in levels.windows(2) {
        let (hi, lo) = (w[0], w[1]);
        while next < order.len() && outcomes[order[next]] >= hi {
            exceed.add(weights[order[next]]);
            next += 1;
        }
        if next == order.len() {
            all_counted = true;
        }
        let tail = if all_counted { 1.0 } else { exceed.value() };
        let len = hi - lo;
        if lo >= 0.0 {
            total.add(h.value(tail) * len);
        } else {
            total.add((h.value(tail) - h1) * len);
        }
    }
    total.value()
}

/// `S_{a,b}(F) + k Q^c_{1−α}(F)`. Equals `choquet(from_qsm(params), F)`.
pub fn qsm_eval(params: &QsmParams, f: &DiscreteDistribution) -> Result<f64> {
    params.validate()?;
    let spread = f.spread(params.a, params.b)?;
    if params.k == 0.0 {
        return Ok(spread);
    }
    Ok(spread + params.k * f.quantile_mixed(params.quantile_level(), params.c)?)
}

/// Outcome transforms `v` for generalized rank-dependent functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VTransform {
    Identity,
    /// `x^γ`; integer exponents are defined for negative `x`.
    Power {
        gamma: f64,
    },
    /// `intercept + slope x`.
    Affine {
        intercept: f64,
        slope: f64,
    },
    /// `|x − shift|`.
    Abs {
        shift: f64,
    },
    /// `min(max(x, lo), hi)`.
    Clamp {
        lo: f64,
        hi: f64,
    },
    /// Explicit values on a finite set of points.
    Table {
        entries: Vec<(f64, f64)>,
    },
}

impl VTransform {
    pub fn apply(&self, x: f64) -> Result<f64> {
        let y = match self {
            VTransform::Identity => x,
            VTransform::Power { gamma } => {
                if gamma.fract() == 0.0 && gamma.abs() <= i32::MAX as f64 {
                    x.powi(*gamma as i32)
                } else {
                    x.powf(*gamma)
                }
            }
            VTransform::Affine { intercept, slope } => intercept + slope * x,
            VTransform::Abs { shift } => (x - shift).abs(),
            VTransform::Clamp { lo, hi } => x.max(*lo).min(*hi),
            VTransform::Table { entries } => entries
                .iter()
                .find(|(k, _)| (k - x).abs() <= POINT_MERGE_TOL)
                .map(|e| e.1)
                .ok_or_else(|| Error::domain("v_transform", format!("no table entry for x={x}")))?,
        };
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::domain("v_transform", format!("v({x}) is not finite")))
        }
    }
}

impl FromStr for VTransform {
    type Err = Error;

    /// `identity`, `power:3`, `affine:a,b`, `abs:s`, `clamp:lo,hi` or
    /// `table:x=v;x=v;...`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), p.trim()),
            None => (s.trim(), ""),
        };
        let bad = || Error::domain("v_transform", format!("cannot parse transform {s:?}"));
        let nums = |p: &str| -> Result<Vec<f64>> {
            p.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
                .collect()
        };
        match name {
            "identity" => Ok(VTransform::Identity),
            "power" => match nums(param)?[..] {
                [gamma] => Ok(VTransform::Power { gamma }),
                _ => Err(bad()),
            },
            "affine" => match nums(param)?[..] {
                [intercept, slope] => Ok(VTransform::Affine { intercept, slope }),
                _ => Err(bad()),
            },
            "abs" => match nums(param)?[..] {
                [shift] => Ok(VTransform::Abs { shift }),
                _ => Err(bad()),
            },
            "clamp" => match nums(param)?[..] {
                [lo, hi] if lo <= hi => Ok(VTransform::Clamp { lo, hi }),
                _ => Err(bad()),
            },
            "table" => {
                let entries = param
                    .split(';')
                    .map(|e| {
                        let (x, v) = e.split_once('=').ok_or_else(bad)?;
                        Ok((
                            x.trim().parse().map_err(|_| bad())?,
                            v.trim().parse().map_err(|_| bad())?,
                        ))
                    })
                    .collect::<Result<Vec<(f64, f64)>>>()?;
                Ok(VTransform::Table { entries })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for VTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VTransform::Identity => write!(f, "identity"),
            VTransform::Power { gamma } => write!(f, "power:{gamma}"),
            VTransform::Affine { intercept, slope } => write!(f, "affine:{intercept},{slope}"),
            VTransform::Abs { shift } => write!(f, "abs:{shift}"),
            VTransform::Clamp { lo, hi } => write!(f, "clamp:{lo},{hi}"),
            VTransform::Table { entries } => {
                write!(f, "table:")?;
                for (i, (x, v)) in entries.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{x}={v}")?;
                }
                Ok(())
            }
        }
    }
}

/// Push-forward `F ∘ v⁻¹`.
pub fn v_transform(f: &DiscreteDistribution, v: &VTransform) -> Result<DiscreteDistribution> {
    let atoms = f
        .atoms()
        .iter()
        .map(|&(x, p)| Ok((v.apply(x)?, p)))
        .collect::<Result<Vec<_>>>()?;
    DiscreteDistribution::new(atoms)
}

/// `R_{h,v}(F) = I_h(F ∘ v⁻¹)`.
pub fn rdu(h: &DistortionFunction, v: &VTransform, f: &DiscreteDistribution) -> Result<f64> {
    Ok(choquet(h, &v_transform(f, v)?))
}
