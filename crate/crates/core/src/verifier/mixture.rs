//! Mixture properties: quasi-convexity, convexity and their concave duals.

use rand::Rng;

use super::pi::{defect_pairs, fixed_search, layout_anchors, Frame, Scale, Searcher};
use super::probes::{coarse_levels, epsilon_sweep, probe_levels, MAX_STRUCTURED_KNOTS};
use super::{streams, CheckConfig, Evaluator, Outcome, Property, Witness};
use crate::distortion::DistortionFunction;
use crate::distribution::DiscreteDistribution;
use crate::error::Result;

/// Subdivisions of the coarse grid used by free-triple exhaustive scans.
const COARSE_GRID: usize = 8;

/// Quasi-convexity of `π` for `cfg.triple`, searched over probe grids,
/// structured layouts and random pairs. A violation is reported on the
/// corresponding three-point laws.
pub fn check_pi_quasi_convex(h: &DistortionFunction, cfg: &CheckConfig) -> Result<Outcome> {
    cfg.validate()?;
    let mut rng = cfg.rng(streams::PI_RANDOM);
    let frame = Frame::plain(cfg.triple);
    Ok(Outcome::from_option(fixed_search(
        Evaluator::new(h),
        frame,
        cfg.grid_resolution,
        cfg.random_trials,
        cfg.tolerance,
        &mut rng,
    )))
}

/// A random law with 2 to 8 atoms on `[−10, 10]`.
pub(crate) fn random_law<R: Rng + ?Sized>(rng: &mut R) -> DiscreteDistribution {
    let n = rng.gen_range(2..=8);
    let atoms: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(-10.0..10.0), -(rng.gen::<f64>().max(1e-300)).ln()))
        .collect();
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    DiscreteDistribution::new(atoms.into_iter().map(|(x, w)| (x, w / total))).expect("valid random law")
}

fn random_mixtures<R: Rng>(
    property: Property,
    ev: Evaluator<'_>,
    rng: &mut R,
    trials: usize,
    tol: f64,
) -> Option<Witness> {
    for _ in 0..trials {
        let f = random_law(rng);
        let g = random_law(rng);
        let lambda = rng.gen_range(0.01..0.99);
        if let Some(w) = Witness::mixture(property, ev, f, g, lambda, tol) {
            return Some(w);
        }
    }
    None
}

/// The complete search for a violation of m-quasi-convexity: univariate
/// and structured layouts, scaled interval pairs and exhaustive probe scans
/// both for `cfg.triple` and for freely chosen triples, then random
/// three-point pairs and random general mixtures.
pub(crate) fn quasi_convex_search(ev: Evaluator<'_>, cfg: &CheckConfig) -> Option<Witness> {
    let h = ev.h;
    let tol = cfg.tolerance;
    let n = cfg.grid_resolution;
    let fixed = Searcher::new(ev, Scale::Fixed(Frame::plain(cfg.triple)), tol);
    let free = Searcher::new(ev, Scale::Free, tol);
    let probes = probe_levels(h, n);
    let anchors = layout_anchors(h, n);
    let eps = epsilon_sweep(h);
    let defects = defect_pairs(h, &probes, 256);
    let structured = h.breakpoint_locations().len() <= MAX_STRUCTURED_KNOTS;
    let found = fixed
        .univariate(&probes)
        .or_else(|| fixed.layouts(&anchors, &eps))
        .or_else(|| free.layouts(&anchors, &eps))
        .or_else(|| fixed.scaled_pairs(&defects))
        .or_else(|| free.scaled_pairs(&defects))
        .or_else(|| {
            structured
                .then(|| free.exhaustive(&coarse_levels(h, COARSE_GRID)))
                .flatten()
        })
        .or_else(|| fixed.exhaustive(&probes));
    if found.is_some() {
        return found;
    }
    let mut rng = cfg.rng(streams::PI_RANDOM);
    if let Some(w) = fixed.random(&mut rng, cfg.random_trials) {
        return Some(w);
    }
    let mut rng = cfg.rng(streams::MIXTURE_RANDOM);
    random_mixtures(Property::MQuasiConvex, ev, &mut rng, cfg.random_trials, tol)
}

pub fn check_m_quasi_convex(h: &DistortionFunction, cfg: &CheckConfig) -> Result<Outcome> {
    cfg.validate()?;
    Ok(Outcome::from_option(quasi_convex_search(Evaluator::new(h), cfg)))
}

pub fn check_m_quasi_concave(h: &DistortionFunction, cfg: &CheckConfig) -> Result<Outcome> {
    cfg.validate()?;
    let neg = h.negate();
    let w = quasi_convex_search(Evaluator::new(&neg), cfg).and_then(|w| w.mirror(h, cfg.tolerance));
    Ok(Outcome::from_option(w))
}

/// A pair `(p, q)` at whose midpoint `h` lies strictly above its chord,
/// preferring the largest excess.
pub(crate) fn midpoint_defect(h: &DistortionFunction, cfg: &CheckConfig) -> Option<(f64, f64)> {
    let mut probes = probe_levels(h, cfg.grid_resolution);
    if h.breakpoint_locations().len() <= MAX_STRUCTURED_KNOTS {
        for &d in &epsilon_sweep(h) {
            for &k in &h.breakpoint_locations() {
                for j in [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0] {
                    probes.push(k + j * d);
                }
            }
        }
        probes = super::probes::sort_dedup(probes);
    }
    let vals: Vec<f64> = probes.iter().map(|&p| h.value(p)).collect();
    let mut best: Option<(f64, (f64, f64))> = None;
    for i in 0..probes.len() {
        for j in i + 1..probes.len() {
            let (p, q) = (probes[i], probes[j]);
            let avg = 0.5 * vals[i] + 0.5 * vals[j];
            let excess = h.value(0.5 * p + 0.5 * q) - avg;
            let scale = 1.0 + avg.abs();
            if excess > cfg.tolerance * scale && best.is_none_or(|(e, _)| excess > e) {
                best = Some((excess, (p, q)));
            }
        }
    }
    best.map(|(_, pq)| pq)
}

fn midpoint_witness(h: &DistortionFunction, cfg: &CheckConfig) -> Option<Witness> {
    let (p, q) = midpoint_defect(h, cfg)?;
    let f = DiscreteDistribution::two_point(1.0, 0.0, p).ok()?;
    let g = DiscreteDistribution::two_point(1.0, 0.0, q).ok()?;
    Witness::mixture(Property::MConvex, Evaluator::new(h), f, g, 0.5, cfg.tolerance)
}

pub fn check_m_convex(h: &DistortionFunction, cfg: &CheckConfig) -> Result<Outcome> {
    cfg.validate()?;
    let w = midpoint_witness(h, cfg).or_else(|| {
        let mut rng = cfg.rng(streams::MIXTURE_RANDOM);
        random_mixtures(
            Property::MConvex,
            Evaluator::new(h),
            &mut rng,
            cfg.random_trials,
            cfg.tolerance,
        )
    });
    Ok(Outcome::from_option(w))
}

pub fn check_m_concave(h: &DistortionFunction, cfg: &CheckConfig) -> Result<Outcome> {
    let neg = h.negate();
    Ok(match check_m_convex(&neg, cfg)? {
        Outcome::Holds => Outcome::Holds,
        Outcome::Refuted(w) => Outcome::from_option(w.mirror(h, cfg.tolerance)),
    })
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
    fn identity_is_mixture_linear() {
        let h = DistortionFunction::identity();
        assert!(check_m_convex(&h, &cfg()).unwrap().holds());
        assert!(check_m_concave(&h, &cfg()).unwrap().holds());
    }

    #[test]
    fn square_is_convex_not_concave() {
        let h = DistortionFunction::interpolate(&[(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)], false).unwrap();
        assert!(check_m_convex(&h, &cfg()).unwrap().holds());
        let out = check_m_concave(&h, &cfg()).unwrap();
        assert!(out.witness().unwrap().revalidate(&h, 1e-9));
    }

    #[test]
    fn qsm_quasi_convex_not_convex() {
        let h = DistortionFunction::from_qsm(&QsmParams::new(0.0, 0.0, 1.0, 0.3, 0.4).unwrap()).unwrap();
        assert!(check_m_quasi_convex(&h, &cfg()).unwrap().holds());
        assert!(check_pi_quasi_convex(&h, &cfg()).unwrap().holds());
        let w = check_m_convex(&h, &cfg()).unwrap();
        assert!(w.witness().unwrap().revalidate(&h, 1e-9));
    }

    #[test]
    fn cap_refuted_on_default_triple() {
        let h = DistortionFunction::interpolate(&[(0.0, 0.0), (0.5, 1.0), (1.0, 1.0)], false).unwrap();
        let out = check_pi_quasi_convex(&h, &cfg()).unwrap();
        let w = out.witness().expect("witness");
        assert!(w.revalidate(&h, 1e-9));
        assert!(w.f.len() <= 3 && w.g.len() <= 3);
    }
}
