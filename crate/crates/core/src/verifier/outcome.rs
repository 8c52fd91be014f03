//! Outcome properties on a shared finite probability space, and
//! monotonicity in the concave order.

use rand::Rng;

use super::mixture::{midpoint_defect, random_law};
use super::{streams, CheckConfig, JointOutcomes, Outcome, Property, Witness};
use crate::distortion::DistortionFunction;
use crate::distribution::{mean_preserving_contraction_with, DiscreteDistribution};
use crate::error::Result;

/// Indicators of `A = {s₀, s₁}` and `B = {s₀, s₂}` scaled by `scale` on
/// states with weights `(p, (q−p)/2, (q−p)/2, 1−q)`, so that `P(A) = P(B)`
/// is the midpoint of `p` and `q` while `P(A∩B) = p` and `P(A∪B) = q`.
/// Null states are dropped.
fn indicator_joint(p: f64, q: f64, scale: f64) -> JointOutcomes {
    let half = 0.5 * (q - p);
    let states = [
        (p, scale, scale),
        (half, scale, 0.0),
        (half, 0.0, scale),
        (1.0 - q, 0.0, 0.0),
    ];
    let mut joint = JointOutcomes {
        weights: Vec::new(),
        x: Vec::new(),
        y: Vec::new(),
    };
    for (w, x, y) in states {
        if w > 0.0 {
            joint.weights.push(w);
            joint.x.push(x);
            joint.y.push(y);
        }
    }
    joint
}

fn random_joint<R: Rng>(rng: &mut R) -> JointOutcomes {
    let n = rng.gen_range(2..=8);
    let raw: Vec<f64> = (0..n).map(|_| -(rng.gen::<f64>().max(1e-300)).ln()).collect();
    let total: f64 = raw.iter().sum();
    JointOutcomes {
        weights: raw.iter().map(|w| w / total).collect(),
        x: (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect(),
        y: (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect(),
    }
}

fn outcome_check(property: Property, h: &DistortionFunction, cfg: &CheckConfig) -> Result<Outcome> {
    cfg.validate()?;
    let tol = cfg.tolerance;
    let (scale, lambda) = match property {
        Property::OSuperadditive => (1.0, 0.5),
        _ => (2.0, 0.5),
    };
    if let Some((p, q)) = midpoint_defect(h, cfg) {
        if let Some(w) = Witness::outcome(property, h, indicator_joint(p, q, scale), lambda, tol) {
            return Ok(Outcome::Refuted(Box::new(w)));
        }
    }
    let mut rng = cfg.rng(streams::OUTCOME_RANDOM);
    for _ in 0..cfg.random_trials {
        let joint = random_joint(&mut rng);
        let lambda = rng.gen_range(0.01..0.99);
        if let Some(w) = Witness::outcome(property, h, joint, lambda, tol) {
            return Ok(Outcome::Refuted(Box::new(w)));
        }
    }
    Ok(Outcome::Holds)
}

pub fn check_o_concave(h: &DistortionFunction, cfg: &CheckConfig) -> Result<Outcome> {
    outcome_check(Property::OConcave, h, cfg)
}

pub fn check_o_quasi_concave(h: &DistortionFunction, cfg: &CheckConfig) -> Result<Outcome> {
    outcome_check(Property::OQuasiConcave, h, cfg)
}

pub fn check_o_superadditive(h: &DistortionFunction, cfg: &CheckConfig) -> Result<Outcome> {
    outcome_check(Property::OSuperadditive, h, cfg)
}

pub fn check_o_convex(h: &DistortionFunction, cfg: &CheckConfig) -> Result<Outcome> {
    let neg = h.negate();
    Ok(match outcome_check(Property::OConcave, &neg, cfg)? {
        Outcome::Holds => Outcome::Holds,
        Outcome::Refuted(w) => Outcome::from_option(w.mirror(h, cfg.tolerance)),
    })
}

/// Searches for `F ≤_cv G` with `I_h(F) > I_h(G)`: first the two-atom
/// spread of a three-atom law at a midpoint defect of `h`, then random
/// mean-preserving contractions.
pub fn check_concave_order_monotone(h: &DistortionFunction, cfg: &CheckConfig) -> Result<Outcome> {
    cfg.validate()?;
    let tol = cfg.tolerance;
    if let Some((p, q)) = midpoint_defect(h, cfg) {
        let m = 0.5 * p + 0.5 * q;
        let spread = DiscreteDistribution::new([(2.0, m), (0.0, 1.0 - m)]);
        let inner = DiscreteDistribution::new([(2.0, p), (1.0, q - p), (0.0, 1.0 - q)]);
        if let (Ok(f), Ok(g)) = (spread, inner) {
            if let Some(w) = Witness::concave_order(h, f, g, tol) {
                return Ok(Outcome::Refuted(Box::new(w)));
            }
        }
    }
    let mut rng = cfg.rng(streams::CONCAVE_ORDER_RANDOM);
    for _ in 0..cfg.random_trials {
        let f = random_law(&mut rng);
        let Ok(g) = mean_preserving_contraction_with(&f, &mut rng) else {
            continue;
        };
        if let Some(w) = Witness::concave_order(h, f, g, tol) {
            return Ok(Outcome::Refuted(Box::new(w)));
        }
    }
    Ok(Outcome::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distortion::QsmParams;

    fn cfg() -> CheckConfig {
        CheckConfig {
            grid_resolution: 32,
            random_trials: 200,
            ..CheckConfig::default()
        }
    }

    #[test]
    fn convex_passes_everything() {
        let h = DistortionFunction::interpolate(&[(0.0, 0.0), (0.5, 0.1), (1.0, 1.0)], false).unwrap();
        for check in [
            check_o_concave,
            check_o_quasi_concave,
            check_o_superadditive,
            check_concave_order_monotone,
        ] {
            assert!(check(&h, &cfg()).unwrap().holds());
        }
    }

    #[test]
    fn concave_fails_superadditivity() {
        let h = DistortionFunction::interpolate(&[(0.0, 0.0), (0.5, 0.9), (1.0, 1.0)], false).unwrap();
        let out = check_o_superadditive(&h, &cfg()).unwrap();
        let w = out.witness().unwrap();
        assert!(w.joint.is_some());
        assert!(w.revalidate(&h, 1e-9));
        assert!(check_o_convex(&h, &cfg()).unwrap().holds());
    }

    #[test]
    fn indicator_qsm_not_o_concave_nor_o_convex() {
        let h = DistortionFunction::from_qsm(&QsmParams::new(0.0, 0.0, 1.0, 0.3, 0.0).unwrap()).unwrap();
        let w = check_o_concave(&h, &cfg()).unwrap();
        assert!(w.witness().unwrap().revalidate(&h, 1e-9));
        let w = check_o_convex(&h, &cfg()).unwrap();
        assert!(w.witness().unwrap().revalidate(&h, 1e-9));
        let w = check_concave_order_monotone(&h, &cfg()).unwrap();
        assert!(w.witness().unwrap().revalidate(&h, 1e-9));
    }
}
