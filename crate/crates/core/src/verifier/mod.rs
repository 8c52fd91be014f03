//! Property checks for signed Choquet integrals and the witnesses that
//! refute them.
//!
//! Every refutation is reported as a [`Witness`] whose values are recomputed
//! from the stored distributions (or joint outcomes) by direct evaluation,
//! and only kept when the violation exceeds the tolerance on the relative
//! scale `tol · (1 + max(|mixed|, |bound|))`.

mod battery;
mod mixture;
mod outcome;
mod pi;
mod probes;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distortion::DistortionFunction;
use crate::distribution::{concave_order_leq, mix, DiscreteDistribution, FiniteRandomVariable, TriplePoints};
use crate::error::{Error, Result};
use crate::eval::{choquet, choquet_rv, rdu, VTransform};

pub use battery::{
    conflict_check, counterexample_search, search_witness, seven_battery, transform_invariance_check,
    transform_invariance_report, two_point_check, two_point_search, Authority, BatteryReport, CheckResult,
    ConflictOutcome, TransformReport, Verdict,
};
pub use mixture::{
    check_m_concave, check_m_convex, check_m_quasi_concave, check_m_quasi_convex, check_pi_quasi_convex,
};
pub use outcome::{
    check_concave_order_monotone, check_o_concave, check_o_convex, check_o_quasi_concave, check_o_superadditive,
};
pub use pi::{lambda_local_convexity, lemma_scaled_pair_check, lemma_witness, pi};

/// Search parameters shared by all checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Subdivisions of `[0,1]` in probe grids.
    pub grid_resolution: usize,
    pub random_trials: usize,
    pub tolerance: f64,
    pub rng_seed: u64,
    /// Support points of the three-point laws searched by the π checks.
    pub triple: TriplePoints,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            grid_resolution: 200,
            random_trials: 1000,
            tolerance: 1e-9,
            rng_seed: 0,
            triple: TriplePoints::default(),
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution < 8 {
            return Err(Error::domain("check_config", "grid_resolution must be at least 8"));
        }
        if self.tolerance <= 0.0 || !self.tolerance.is_finite() {
            return Err(Error::domain("check_config", "tolerance must be positive"));
        }
        TriplePoints::new(self.triple.x, self.triple.y, self.triple.z)?;
        Ok(())
    }

    /// Independent random stream for the check identified by `stream`.
    pub(crate) fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.rng_seed);
        rng.set_stream(stream);
        rng
    }
}

/// The mixture and outcome properties that can be refuted by a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    MQuasiConvex,
    MConvex,
    MQuasiConcave,
    MConcave,
    OConcave,
    OQuasiConcave,
    OSuperadditive,
    OConvex,
    ConcaveOrderMonotone,
}

impl Property {
    pub const ALL: [Property; 9] = [
        Property::MQuasiConvex,
        Property::MConvex,
        Property::MQuasiConcave,
        Property::MConcave,
        Property::OConcave,
        Property::OQuasiConcave,
        Property::OSuperadditive,
        Property::OConvex,
        Property::ConcaveOrderMonotone,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Property::MQuasiConvex => "m-quasi-convex",
            Property::MConvex => "m-convex",
            Property::MQuasiConcave => "m-quasi-concave",
            Property::MConcave => "m-concave",
            Property::OConcave => "o-concave",
            Property::OQuasiConcave => "o-quasi-concave",
            Property::OSuperadditive => "o-superadditive",
            Property::OConvex => "o-convex",
            Property::ConcaveOrderMonotone => "concave-order-monotone",
        }
    }

    /// Whether a violation means the combined value is too large (as opposed
    /// to too small).
    fn violated_from_above(&self) -> bool {
        matches!(
            self,
            Property::MQuasiConvex | Property::MConvex | Property::OConvex | Property::ConcaveOrderMonotone
        )
    }

    /// The property of `I_h` that corresponds to this property of `I_{−h}`.
    pub fn mirrored(&self) -> Property {
        match self {
            Property::MQuasiConvex => Property::MQuasiConcave,
            Property::MQuasiConcave => Property::MQuasiConvex,
            Property::MConvex => Property::MConcave,
            Property::MConcave => Property::MConvex,
            Property::OConcave => Property::OConvex,
            Property::OConvex => Property::OConcave,
            p => *p,
        }
    }

    /// Runs the check for this property.
    pub fn check(&self, h: &DistortionFunction, cfg: &CheckConfig) -> Result<Outcome> {
        match self {
            Property::MQuasiConvex => check_m_quasi_convex(h, cfg),
            Property::MConvex => check_m_convex(h, cfg),
            Property::MQuasiConcave => check_m_quasi_concave(h, cfg),
            Property::MConcave => check_m_concave(h, cfg),
            Property::OConcave => check_o_concave(h, cfg),
            Property::OQuasiConcave => check_o_quasi_concave(h, cfg),
            Property::OSuperadditive => check_o_superadditive(h, cfg),
            Property::OConvex => check_o_convex(h, cfg),
            Property::ConcaveOrderMonotone => check_concave_order_monotone(h, cfg),
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .iter()
            .find(|p| p.name() == s)
            .copied()
            .ok_or_else(|| Error::domain("property", format!("unknown property {s:?}")))
    }
}

/// Outcomes of the two variables in an outcome-property witness, on a
/// shared finite probability space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointOutcomes {
    pub weights: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl JointOutcomes {
    fn variables(&self) -> Result<(FiniteRandomVariable, FiniteRandomVariable)> {
        let space = FiniteRandomVariable::space(&self.weights)?;
        Ok((
            FiniteRandomVariable::new(space.clone(), self.x.clone())?,
            FiniteRandomVariable::new(space, self.y.clone())?,
        ))
    }
}

/// A recorded violation of a property.
///
/// For mixture properties `mixed_value` is the functional at
/// `λF + (1 − λ)G` and `bound` the value the property compares it with.
/// For outcome properties `f` and `g` are the laws of the two variables in
/// `joint`. For concave-order monotonicity `f ≤_cv g`, `mixed_value` is the
/// functional at `f` and `bound` at `g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub property: Property,
    pub f: DiscreteDistribution,
    pub g: DiscreteDistribution,
    pub lambda: Option<f64>,
    pub mixed_value: f64,
    pub bound: f64,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub joint: Option<JointOutcomes>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<VTransform>,
}

/// Evaluates `I_h` or, with a transform, `R_{h,v}`.
#[derive(Clone, Copy)]
pub(crate) struct Evaluator<'a> {
    pub h: &'a DistortionFunction,
    pub v: Option<&'a VTransform>,
}

impl<'a> Evaluator<'a> {
    pub fn new(h: &'a DistortionFunction) -> Self {
        Self { h, v: None }
    }

    pub fn eval(&self, f: &DiscreteDistribution) -> Result<f64> {
        match self.v {
            None => Ok(choquet(self.h, f)),
            Some(v) => rdu(self.h, v, f),
        }
    }
}

fn significant(property: Property, mixed: f64, bound: f64, tol: f64) -> Option<f64> {
    let margin = if property.violated_from_above() {
        mixed - bound
    } else {
        bound - mixed
    };
    (margin > tol * (1.0 + mixed.abs().max(bound.abs()))).then_some(margin)
}

impl Witness {
    /// A mixture-property witness, if `(f, g, λ)` violates `property`.
    pub(crate) fn mixture(
        property: Property,
        ev: Evaluator<'_>,
        f: DiscreteDistribution,
        g: DiscreteDistribution,
        lambda: f64,
        tol: f64,
    ) -> Option<Witness> {
        let vf = ev.eval(&f).ok()?;
        let vg = ev.eval(&g).ok()?;
        let mixed = ev.eval(&mix(&f, &g, lambda).ok()?).ok()?;
        let bound = match property {
            Property::MQuasiConvex => vf.max(vg),
            Property::MQuasiConcave => vf.min(vg),
            Property::MConvex | Property::MConcave => lambda * vf + (1.0 - lambda) * vg,
            _ => return None,
        };
        let margin = significant(property, mixed, bound, tol)?;
        Some(Witness {
            property,
            f,
            g,
            lambda: Some(lambda),
            mixed_value: mixed,
            bound,
            margin,
            joint: None,
            transform: ev.v.cloned(),
        })
    }

    /// An outcome-property witness on the joint outcomes, if they violate
    /// `property`. `lambda` is ignored for superadditivity.
    pub(crate) fn outcome(
        property: Property,
        h: &DistortionFunction,
        joint: JointOutcomes,
        lambda: f64,
        tol: f64,
    ) -> Option<Witness> {
        let (x, y) = joint.variables().ok()?;
        let vx = choquet_rv(h, &x);
        let vy = choquet_rv(h, &y);
        let (mixed, bound, lambda) = match property {
            Property::OSuperadditive => (choquet_rv(h, &x.sum(&y).ok()?), vx + vy, None),
            Property::OConcave | Property::OConvex => (
                choquet_rv(h, &x.convex_combination(&y, lambda).ok()?),
                lambda * vx + (1.0 - lambda) * vy,
                Some(lambda),
            ),
            Property::OQuasiConcave => (
                choquet_rv(h, &x.convex_combination(&y, lambda).ok()?),
                vx.min(vy),
                Some(lambda),
            ),
            _ => return None,
        };
        let margin = significant(property, mixed, bound, tol)?;
        Some(Witness {
            property,
            f: x.distribution(),
            g: y.distribution(),
            lambda,
            mixed_value: mixed,
            bound,
            margin,
            joint: Some(joint),
            transform: None,
        })
    }

    /// A concave-order witness: `f ≤_cv g` with `I_h(f) > I_h(g)`.
    pub(crate) fn concave_order(
        h: &DistortionFunction,
        f: DiscreteDistribution,
        g: DiscreteDistribution,
        tol: f64,
    ) -> Option<Witness> {
        if !concave_order_leq(&f, &g) {
            return None;
        }
        let mixed = choquet(h, &f);
        let bound = choquet(h, &g);
        let property = Property::ConcaveOrderMonotone;
        let margin = significant(property, mixed, bound, tol)?;
        Some(Witness {
            property,
            f,
            g,
            lambda: None,
            mixed_value: mixed,
            bound,
            margin,
            joint: None,
            transform: None,
        })
    }

    /// Recomputes the witness for `h` from its stored inputs and checks that
    /// it still violates its property by more than the tolerance.
    pub fn revalidate(&self, h: &DistortionFunction, tol: f64) -> bool {
        let rebuilt = match self.property {
            Property::MQuasiConvex | Property::MConvex | Property::MQuasiConcave | Property::MConcave => {
                let ev = Evaluator {
                    h,
                    v: self.transform.as_ref(),
                };
                match self.lambda {
                    Some(l) => Witness::mixture(self.property, ev, self.f.clone(), self.g.clone(), l, tol),
                    None => None,
                }
            }
            Property::ConcaveOrderMonotone => Witness::concave_order(h, self.f.clone(), self.g.clone(), tol),
            _ => match &self.joint {
                Some(j) => Witness::outcome(self.property, h, j.clone(), self.lambda.unwrap_or(0.5), tol),
                None => None,
            },
        };
        rebuilt.is_some_and(|w| {
            let scale = 1.0 + w.mixed_value.abs().max(w.bound.abs());
            (w.mixed_value - self.mixed_value).abs() <= 1e-12 * scale && (w.bound - self.bound).abs() <= 1e-12 * scale
        })
    }

    /// Re-expresses a witness found for `−h` as a witness of the mirrored
    /// property for `h`.
    pub(crate) fn mirror(&self, h: &DistortionFunction, tol: f64) -> Option<Witness> {
        let property = self.property.mirrored();
        match property {
            Property::MQuasiConvex | Property::MConvex | Property::MQuasiConcave | Property::MConcave => {
                let ev = Evaluator {
                    h,
                    v: self.transform.as_ref(),
                };
                Witness::mixture(property, ev, self.f.clone(), self.g.clone(), self.lambda?, tol)
            }
            Property::OConcave | Property::OConvex => {
                Witness::outcome(property, h, self.joint.clone()?, self.lambda?, tol)
            }
            _ => None,
        }
    }
}

/// Result of a single property check.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Holds,
    Refuted(Box<Witness>),
}

impl Outcome {
    pub fn holds(&self) -> bool {
        matches!(self, Outcome::Holds)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Outcome::Holds => None,
            Outcome::Refuted(w) => Some(w),
        }
    }

    pub(crate) fn from_option(w: Option<Witness>) -> Self {
        match w {
            Some(w) => Outcome::Refuted(Box::new(w)),
            None => Outcome::Holds,
        }
    }
}

/// Stream identifiers so each check draws from its own random sequence.
pub(crate) mod streams {
    pub const PI_RANDOM: u64 = 1;
    pub const MIXTURE_RANDOM: u64 = 2;
    pub const OUTCOME_RANDOM: u64 = 3;
    pub const CONCAVE_ORDER_RANDOM: u64 = 4;
    pub const TWO_POINT_RANDOM: u64 = 5;
}
