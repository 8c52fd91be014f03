//! The seven-condition battery, the gated counterexample search and the
//! derived checks (two-point domain, transformed outcomes, conflict with
//! outcome convexity).

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mixture::{check_m_convex, quasi_convex_search};
use super::outcome::check_o_convex;
use super::pi::{fixed_search, univariate_violation, Frame};
use super::probes::{epsilon_sweep, probe_levels, sort_dedup, MAX_STRUCTURED_KNOTS};
use super::{streams, CheckConfig, Evaluator, Outcome, Property, Witness};
use crate::distortion::classify::{classify, is_convex, qsm_match};
use crate::distortion::{DistortionFunction, QsmParams};
use crate::distribution::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::eval::VTransform;
use crate::numeric::STRUCT_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Refuted,
    ExactTrue,
    ExactFalse,
}

impl Verdict {
    /// Whether the condition is satisfied.
    pub fn is_true(&self) -> bool {
        matches!(self, Verdict::Holds | Verdict::ExactTrue)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub trials: usize,
    pub resolution: usize,
    pub seed: u64,
}

impl CheckResult {
    pub fn from_outcome(name: &str, outcome: Outcome, cfg: &CheckConfig) -> Self {
        let (verdict, witness) = match outcome {
            Outcome::Holds => (Verdict::Holds, None),
            Outcome::Refuted(w) => (Verdict::Refuted, Some(*w)),
        };
        Self {
            name: name.to_string(),
            verdict,
            witness,
            trials: cfg.random_trials,
            resolution: cfg.grid_resolution,
            seed: cfg.rng_seed,
        }
    }

    fn exact(name: &str, value: bool, cfg: &CheckConfig) -> Self {
        Self {
            name: name.to_string(),
            verdict: if value { Verdict::ExactTrue } else { Verdict::ExactFalse },
            witness: None,
            trials: 0,
            resolution: cfg.grid_resolution,
            seed: cfg.rng_seed,
        }
    }
}

/// Whether verdicts come from an exact representation of `h` or from a
/// sampled approximation of a curved distortion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Authority {
    Structural,
    Empirical,
}

/// Verdicts for the seven conditions, in order: convexity of `h`,
/// concave-order monotonicity, o-superadditivity, o-concavity,
/// o-quasi-concavity, m-convexity and m-quasi-convexity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub conditions: Vec<CheckResult>,
    /// Every verdict agrees with the one implied by the structure of `h`:
    /// all seven hold for convex `h`; otherwise the first six fail and the
    /// seventh holds exactly for quantile-spread step distortions.
    pub coherent: bool,
    pub continuous_or_strictly_monotone: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qsm: Option<QsmParams>,
    pub authority: Authority,
}

impl BatteryReport {
    pub fn verdict(&self, name: &str) -> Option<Verdict> {
        self.conditions.iter().find(|c| c.name == name).map(|c| c.verdict)
    }
}

pub fn seven_battery(h: &DistortionFunction, cfg: &CheckConfig) -> Result<BatteryReport> {
    cfg.validate()?;
    let convex = is_convex(h);
    let qsm = qsm_match(h);
    let mut conditions = vec![CheckResult::exact("convex", convex, cfg)];
    for property in [
        Property::ConcaveOrderMonotone,
        Property::OSuperadditive,
        Property::OConcave,
        Property::OQuasiConcave,
        Property::MConvex,
        Property::MQuasiConvex,
    ] {
        conditions.push(CheckResult::from_outcome(property.name(), property.check(h, cfg)?, cfg));
    }
    let expected_qcx = convex || qsm.is_some();
    let coherent = conditions[1..6].iter().all(|c| c.verdict.is_true() == convex)
        && conditions[6].verdict.is_true() == expected_qcx;
    Ok(BatteryReport {
        conditions,
        coherent,
        continuous_or_strictly_monotone: h.is_continuous() || h.is_strictly_monotone(),
        qsm,
        authority: if h.is_approximate() {
            Authority::Empirical
        } else {
            Authority::Structural
        },
    })
}

/// The full m-quasi-convexity search without the structural gate. Any
/// returned witness has been re-validated by direct evaluation.
pub fn search_witness(h: &DistortionFunction, cfg: &CheckConfig) -> Result<Option<Witness>> {
    cfg.validate()?;
    Ok(quasi_convex_search(Evaluator::new(h), cfg).filter(|w| w.revalidate(h, cfg.tolerance)))
}

/// A witness against m-quasi-convexity of `I_h`, or `None` when `h` is
/// convex or a quantile-spread step distortion (for which none exists).
pub fn counterexample_search(h: &DistortionFunction, cfg: &CheckConfig) -> Result<Option<Witness>> {
    if classify(h).quasi_convex_in_mixtures {
        cfg.validate()?;
        return Ok(None);
    }
    search_witness(h, cfg)
}

/// A violation of m-quasi-convexity among two-point laws on
/// `{cfg.triple.x, cfg.triple.y}`.
pub fn two_point_search(h: &DistortionFunction, cfg: &CheckConfig) -> Result<Option<Witness>> {
    cfg.validate()?;
    let (x, y, tol) = (cfg.triple.x, cfg.triple.y, cfg.tolerance);
    let ev = Evaluator::new(h);
    let build = |p1: f64, p2: f64, lambda: f64| -> Option<Witness> {
        let f = DiscreteDistribution::two_point(x, y, p1).ok()?;
        let g = DiscreteDistribution::two_point(x, y, p2).ok()?;
        Witness::mixture(Property::MQuasiConvex, ev, f, g, lambda, tol)
    };
    let mut probes = probe_levels(h, cfg.grid_resolution);
    if h.breakpoint_locations().len() <= MAX_STRUCTURED_KNOTS {
        for &d in &epsilon_sweep(h) {
            for &k in &h.breakpoint_locations() {
                probes.push(k - d);
                probes.push(k + d);
            }
        }
    }
    let probes = sort_dedup(probes);
    if let Some((q1, q2, q3)) = univariate_violation(h, &probes) {
        if let Some(w) = build(q1, q3, (q3 - q2) / (q3 - q1)) {
            return Ok(Some(w));
        }
    }
    let mut rng = cfg.rng(streams::TWO_POINT_RANDOM);
    for _ in 0..cfg.random_trials {
        let (p1, p2): (f64, f64) = (rng.gen(), rng.gen());
        if let Some(w) = build(p1, p2, rng.gen_range(0.01..0.99)) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Whether `I_h` restricted to two-point laws is m-quasi-convex, decided
/// by search.
pub fn two_point_check(h: &DistortionFunction, cfg: &CheckConfig) -> Result<bool> {
    Ok(two_point_search(h, cfg)?.is_none())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformReport {
    pub transform: VTransform,
    /// `v(x)`, `v(y)`, `v(z)` for the configured triple.
    pub images: [f64; 3],
    pub classified_quasi_convex: bool,
    pub empirical_quasi_convex: bool,
    pub agree: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Searches three-point laws on `cfg.triple` for a violation of
/// m-quasi-convexity of `F ↦ I_h(F ∘ v⁻¹)` and compares the outcome with
/// the structural classification of `h`.
pub fn transform_invariance_report(
    h: &DistortionFunction,
    v: &VTransform,
    cfg: &CheckConfig,
) -> Result<TransformReport> {
    cfg.validate()?;
    let t = cfg.triple;
    let originals = [t.x, t.y, t.z];
    let images = [v.apply(t.x)?, v.apply(t.y)?, v.apply(t.z)?];
    let spread = 1.0 + images.iter().fold(0.0_f64, |m, u| m.max(u.abs()));
    for i in 0..3 {
        for j in i + 1..3 {
            if (images[i] - images[j]).abs() <= 1e-12 * spread {
                return Err(Error::domain(
                    "transform_invariance_check",
                    format!("transform images {images:?} of the triple are not distinct"),
                ));
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| images[b].total_cmp(&images[a]));
    let frame = Frame {
        points: order.map(|i| originals[i]),
        upper: images[order[0]] - images[order[1]],
        lower: images[order[1]] - images[order[2]],
    };
    let ev = Evaluator { h, v: Some(v) };
    let mut rng = cfg.rng(streams::PI_RANDOM);
    let witness = fixed_search(
        ev,
        frame,
        cfg.grid_resolution,
        cfg.random_trials,
        cfg.tolerance,
        &mut rng,
    );
    let classified = classify(h).quasi_convex_in_mixtures;
    let empirical = witness.is_none();
    Ok(TransformReport {
        transform: v.clone(),
        images,
        classified_quasi_convex: classified,
        empirical_quasi_convex: empirical,
        agree: classified == empirical,
        witness,
    })
}

/// Whether the transformed search agrees with the classification of `h`.
pub fn transform_invariance_check(h: &DistortionFunction, v: &VTransform, cfg: &CheckConfig) -> Result<bool> {
    Ok(transform_invariance_report(h, v, cfg)?.agree)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum ConflictOutcome {
    /// `I_h = k E`.
    ScaledMean { k: f64 },
    /// `I_h` is not both o-convex and m-convex; at least one witness is
    /// present.
    ConflictConfirmed {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        o_convex: Option<Witness>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m_convex: Option<Witness>,
    },
}

/// Runs the o-convexity and m-convexity checks. Only `h(p) = kp` may pass
/// both; any other `h` passing both is reported as an incoherence.
pub fn conflict_check(h: &DistortionFunction, cfg: &CheckConfig) -> Result<ConflictOutcome> {
    let o = check_o_convex(h, cfg)?;
    let m = check_m_convex(h, cfg)?;
    if o.holds() && m.holds() {
        let k = h.value_at_one();
        let affine = h.breakpoints().iter().all(|b| {
            let want = k * b.t;
            let close = |v: f64| (v - want).abs() <= STRUCT_TOL * (1.0 + k.abs());
            close(b.value) && b.left.is_none_or(close) && b.right.is_none_or(close)
        });
        if !affine {
            return Err(Error::Incoherent(
                "o-convexity and m-convexity both hold for a non-affine distortion".into(),
            ));
        }
        return Ok(ConflictOutcome::ScaledMean { k });
    }
    Ok(ConflictOutcome::ConflictConfirmed {
        o_convex: o.witness().cloned(),
        m_convex: m.witness().cloned(),
    })
}
