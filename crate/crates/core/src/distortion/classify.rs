//! Exact structural tests on piecewise-affine distortions: convexity,
//! univariate quasi-convexity, matching the quantile-spread step form, and
//! classification by quasi-convexity in mixtures.

use serde::{Deserialize, Serialize, Serializer};

use super::{DistortionFunction, Knot, QsmParams};
use crate::numeric::STRUCT_TOL;

const TOL: f64 = STRUCT_TOL;

fn slope_tol(slopes: &[f64]) -> f64 {
    TOL * (1.0 + slopes.iter().fold(0.0_f64, |m, s| m.max(s.abs())))
}

/// Convexity on `[0,1]`: continuous on the open interval, nondecreasing
/// slopes, `h(0+) ≤ 0` and `h(1) ≥ h(1−)`.
pub fn is_convex(h: &DistortionFunction) -> bool {
    let knots = h.knots();
    let n = knots.len();
    let interior_continuous = knots[1..n - 1].iter().all(|k| k.is_trivial());
    if !interior_continuous {
        return false;
    }
    let slopes = h.slopes();
    let stol = slope_tol(&slopes);
    let slopes_ok = slopes.windows(2).all(|w| w[1] >= w[0] - stol);
    slopes_ok && knots[0].right <= TOL && knots[n - 1].value >= knots[n - 1].left - TOL
}

pub fn is_concave(h: &DistortionFunction) -> bool {
    is_convex(&h.negate())
}

/// Whether every sublevel set of `h` on `[0,1]` is an interval, i.e.
/// `h(q) ≤ max(h(p), h(r))` for all `p < q < r`.
///
/// Scans points and open segments in order. An element is a violation when
/// its supremum exceeds both the smallest value strictly to its left that
/// lies below it and the smallest such value to its right.
pub fn is_quasi_convex_univariate(h: &DistortionFunction) -> bool {
    let knots = h.knots();
    let n = knots.len();
    // inf over everything strictly before knot j (prefix) / strictly after (suffix).
    let mut prefix = vec![f64::INFINITY; n];
    for j in 1..n {
        let seg_inf = knots[j - 1].right.min(knots[j].left);
        prefix[j] = prefix[j - 1].min(knots[j - 1].value).min(seg_inf);
    }
    let mut suffix = vec![f64::INFINITY; n];
    for j in (0..n - 1).rev() {
        let seg_inf = knots[j].right.min(knots[j + 1].left);
        suffix[j] = suffix[j + 1].min(knots[j + 1].value).min(seg_inf);
    }
    for j in 0..n {
        let v = knots[j].value;
        if v > prefix[j] + TOL && v > suffix[j] + TOL {
            return false;
        }
    }
    for j in 0..n - 1 {
        let a = knots[j].right;
        let b = knots[j + 1].left;
        let before = prefix[j].min(knots[j].value);
        let after = suffix[j + 1].min(knots[j + 1].value);
        let left_inf = if b > a + TOL { before.min(a) } else { before };
        let right_inf = if a > b + TOL { after.min(b) } else { after };
        if a.max(b) > left_inf.max(right_inf) + TOL {
            return false;
        }
    }
    true
}

fn constant_segments(knots: &[Knot]) -> bool {
    knots.windows(2).all(|w| (w[0].right - w[1].left).abs() <= TOL)
}

/// Parameters `(a, b, k, α, c)` for which `h` equals the step distortion of
/// `S_{a,b} + k Q^c_{1−α}`, if any.
///
/// When `h` is constant on `(0,1)` the parameterization is not unique; the
/// match prefers `b = 0` (jump at `α = 0`) and otherwise uses `α = 1` with
/// `a = 0`.
pub fn qsm_match(h: &DistortionFunction) -> Option<QsmParams> {
    let knots = h.knots();
    if !constant_segments(knots) {
        return None;
    }
    let n = knots.len();
    let top = knots[n - 1].value;
    let interior: Vec<&Knot> = knots[1..n - 1].iter().filter(|k| !k.is_trivial()).collect();
    match interior[..] {
        [] => {
            let v = knots[0].right;
            if top >= v - TOL {
                Some(QsmParams {
                    a: (top - v).max(0.0),
                    b: 0.0,
                    k: v,
                    alpha: 0.0,
                    c: 0.0,
                })
            } else if v <= TOL {
                Some(QsmParams {
                    a: 0.0,
                    b: (-v).max(0.0),
                    k: top - v,
                    alpha: 1.0,
                    c: 0.0,
                })
            } else {
                None
            }
        }
        [jump] => {
            let lower = jump.left;
            let upper = jump.right;
            let k = upper - lower;
            if lower > TOL || k.abs() <= TOL || top < upper - TOL {
                return None;
            }
            let c = (jump.value - lower) / k;
            let ctol = TOL / k.abs();
            if c < -ctol || c > 1.0 + ctol {
                return None;
            }
            Some(QsmParams {
                a: (top - upper).max(0.0),
                b: (-lower).max(0.0),
                k,
                alpha: jump.t,
                c: c.clamp(0.0, 1.0),
            })
        }
        _ => None,
    }
}

/// Why `I_h` is (or is not) quasi-convex in mixtures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QcxReason {
    ConvexDistortion,
    QsmForm(QsmParams),
    NotQcx,
}

impl QcxReason {
    pub fn label(&self) -> &'static str {
        match self {
            QcxReason::ConvexDistortion => "ConvexDistortion",
            QcxReason::QsmForm(_) => "QsmForm",
            QcxReason::NotQcx => "NotQcx",
        }
    }

    pub fn params(&self) -> Option<QsmParams> {
        match self {
            QcxReason::QsmForm(p) => Some(*p),
            _ => None,
        }
    }

    pub fn holds(&self) -> bool {
        !matches!(self, QcxReason::NotQcx)
    }
}

/// The closed forms of functionals that are quasi-linear in mixtures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form")]
pub enum QuasiLinearForm {
    /// `k E`, from `h(p) = k p`.
    ScaledMean { k: f64 },
    /// `k (c Q_1 + (1 − c) Q_0)`, from `h = kc` on `(0,1)` and `h(1) = k`.
    EndpointMix { k: f64, c: f64 },
    /// `k Q^c_{1−α}`, from a single jump of size `k` at `α` with `h(α) = kc`.
    ScaledMixedQuantile { k: f64, alpha: f64, c: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub quasi_convex_in_mixtures: bool,
    pub reason: QcxReason,
    pub quasi_concave_in_mixtures: bool,
    pub concave_reason: QcxReason,
    pub quasi_linear_form: Option<QuasiLinearForm>,
    /// False when `h` is a sampled interpolant of a curved function.
    pub exact: bool,
}

#[derive(Serialize)]
struct ClassificationJson<'a> {
    quasi_convex_in_mixtures: bool,
    reason: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    qsm_params: Option<QsmParams>,
    quasi_concave_in_mixtures: bool,
    concave_reason: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    concave_qsm_params: Option<QsmParams>,
    quasi_linear_form: &'a Option<QuasiLinearForm>,
    exact: bool,
}

impl Serialize for Classification {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ClassificationJson {
            quasi_convex_in_mixtures: self.quasi_convex_in_mixtures,
            reason: self.reason.label(),
            qsm_params: self.reason.params(),
            quasi_concave_in_mixtures: self.quasi_concave_in_mixtures,
            concave_reason: self.concave_reason.label(),
            concave_qsm_params: self.concave_reason.params(),
            quasi_linear_form: &self.quasi_linear_form,
            exact: self.exact,
        }
        .serialize(s)
    }
}

/// Reason `I_h` is quasi-convex in mixtures: `h` convex, or `h` of
/// quantile-spread step form.
pub fn qcx_reason(h: &DistortionFunction) -> QcxReason {
    if is_convex(h) {
        QcxReason::ConvexDistortion
    } else if let Some(p) = qsm_match(h) {
        QcxReason::QsmForm(p)
    } else {
        QcxReason::NotQcx
    }
}

pub fn classify(h: &DistortionFunction) -> Classification {
    let reason = qcx_reason(h);
    let concave_reason = qcx_reason(&h.negate());
    let quasi_linear_form = if reason.holds() && concave_reason.holds() {
        quasi_linear_form(h)
    } else {
        None
    };
    Classification {
        quasi_convex_in_mixtures: reason.holds(),
        reason,
        quasi_concave_in_mixtures: concave_reason.holds(),
        concave_reason,
        quasi_linear_form,
        exact: !h.is_approximate(),
    }
}

/// Matches `h` against the three quasi-linear closed forms.
pub fn quasi_linear_form(h: &DistortionFunction) -> Option<QuasiLinearForm> {
    let knots = h.knots();
    let n = knots.len();
    let top = knots[n - 1].value;
    if n == 2 && knots[0].right.abs() <= TOL && (knots[1].left - top).abs() <= TOL {
        return Some(QuasiLinearForm::ScaledMean { k: top });
    }
    if !constant_segments(knots) {
        return None;
    }
    let interior: Vec<&Knot> = knots[1..n - 1].iter().filter(|k| !k.is_trivial()).collect();
    match interior[..] {
        [] => {
            let v = knots[0].right;
            if top.abs() <= TOL {
                return None;
            }
            let c = v / top;
            let ctol = TOL / top.abs();
            (c >= -ctol && c <= 1.0 + ctol).then_some(QuasiLinearForm::EndpointMix {
                k: top,
                c: c.clamp(0.0, 1.0),
            })
        }
        [jump] => {
            let k = jump.right - jump.left;
            if jump.left.abs() > TOL || (top - jump.right).abs() > TOL || k.abs() <= TOL {
                return None;
            }
            let c = jump.value / k;
            let ctol = TOL / k.abs();
            (c >= -ctol && c <= 1.0 + ctol).then_some(QuasiLinearForm::ScaledMixedQuantile {
                k,
                alpha: jump.t,
                c: c.clamp(0.0, 1.0),
            })
        }
        _ => None,
    }
}

/// Subfamilies of increasing normalized distortions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum DtFamily {
    /// Convex `h`.
    H1,
    /// `I_h = k Q^c_{1−α} + (1 − k) Q_0`.
    H2 { k: f64, alpha: f64, c: f64 },
    /// Concave `h`.
    H1Star,
    /// `I_h = (1 − k) Q_1 + k Q^c_{1−α}`.
    H2Star { k: f64, alpha: f64, c: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualUtilityClassification {
    pub classification: Classification,
    pub qcx_family: Option<DtFamily>,
    pub qcv_family: Option<DtFamily>,
}

/// Classification restricted to increasing `h` with `h(1) = 1`; `None`
/// for any other `h`.
pub fn classify_dual_utility(h: &DistortionFunction) -> Option<DualUtilityClassification> {
    if !h.is_increasing() || (h.value_at_one() - 1.0).abs() > TOL {
        return None;
    }
    let classification = classify(h);
    let qcx_family = match classification.reason {
        QcxReason::ConvexDistortion => Some(DtFamily::H1),
        QcxReason::QsmForm(p) => Some(DtFamily::H2 {
            k: p.k,
            alpha: p.alpha,
            c: p.c,
        }),
        QcxReason::NotQcx => None,
    };
    let qcv_family = match classification.concave_reason {
        QcxReason::ConvexDistortion => Some(DtFamily::H1Star),
        QcxReason::QsmForm(p) => Some(DtFamily::H2Star {
            k: -p.k,
            alpha: p.alpha,
            c: p.c,
        }),
        QcxReason::NotQcx => None,
    };
    Some(DualUtilityClassification {
        classification,
        qcx_family,
        qcv_family,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distortion::named::Named;

    fn qsm(a: f64, b: f64, k: f64, alpha: f64, c: f64) -> DistortionFunction {
        DistortionFunction::from_qsm(&QsmParams::new(a, b, k, alpha, c).unwrap()).unwrap()
    }

    fn pwl(points: &[(f64, f64)]) -> DistortionFunction {
        DistortionFunction::interpolate(points, false).unwrap()
    }

    #[test]
    fn convexity_examples() {
        let id = DistortionFunction::identity();
        assert!(is_convex(&id) && is_concave(&id));
        let kinked = pwl(&[(0.0, 0.0), (0.5, 0.25), (1.0, 1.25)]);
        assert!(is_convex(&kinked) && !is_concave(&kinked));
        let step = qsm(0.0, 0.0, 1.0, 0.3, 0.4);
        assert!(!is_convex(&step) && !is_concave(&step));
    }

    #[test]
    fn endpoint_jump_rules() {
        let down_at_zero = qsm(0.0, 1.0, 0.0, 0.5, 0.0);
        assert!(is_convex(&qsm(2.0, 1.0, 0.0, 0.5, 0.0)));
        assert!(is_convex(&down_at_zero));
        let up_at_zero = qsm(0.0, 0.0, 1.0, 0.0, 0.0);
        assert!(!is_convex(&up_at_zero));
        assert!(is_concave(&up_at_zero));
    }

    #[test]
    fn univariate_quasi_convexity() {
        assert!(is_quasi_convex_univariate(&DistortionFunction::identity()));
        assert!(is_quasi_convex_univariate(&Named::Cap { alpha: 0.4 }.build().unwrap()));
        let tent = pwl(&[(0.0, 0.0), (0.5, 0.25), (1.0, 0.0)]);
        assert!(!is_quasi_convex_univariate(&tent));
        let cap = Named::Sampled {
            points: (0..=64).map(|i| i as f64 / 64.0).map(|p| (p, p * (1.0 - p))).collect(),
        }
        .build()
        .unwrap();
        assert!(!is_quasi_convex_univariate(&cap));
        assert!(is_quasi_convex_univariate(&qsm(1.0, 2.0, 0.5, 0.3, 0.4)));
        let spike = DistortionFunction::from_knots(
            vec![
                Knot {
                    t: 0.0,
                    value: 0.0,
                    left: 0.0,
                    right: 0.0,
                },
                Knot {
                    t: 0.5,
                    value: 1.0,
                    left: 0.0,
                    right: 0.0,
                },
                Knot {
                    t: 1.0,
                    value: 0.0,
                    left: 0.0,
                    right: 0.0,
                },
            ],
            false,
        )
        .unwrap();
        assert!(!is_quasi_convex_univariate(&spike));
    }

    #[test]
    fn qsm_round_trip() {
        let p = QsmParams::new(1.0, 2.0, 0.5, 0.3, 0.4).unwrap();
        let back = qsm_match(&DistortionFunction::from_qsm(&p).unwrap()).unwrap();
        for (x, y) in [
            (back.a, p.a),
            (back.b, p.b),
            (back.k, p.k),
            (back.alpha, p.alpha),
            (back.c, p.c),
        ] {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(qsm_match(&DistortionFunction::identity()).is_none());
    }

    #[test]
    fn qsm_boundary_aliases() {
        let q0 = qsm_match(&qsm(0.0, 0.0, 0.0, 0.5, 0.0).add(&qsm(1.0, 0.0, 0.0, 0.5, 0.0))).unwrap();
        assert_eq!(
            q0,
            QsmParams {
                a: 1.0,
                b: 0.0,
                k: 0.0,
                alpha: 0.0,
                c: 0.0
            }
        );
        // constant 0.5 on (0,1) with h(1) = 0.2: needs a negative a under alpha = 0 and b < 0 under alpha = 1
        let h = DistortionFunction::from_knots(
            vec![
                Knot {
                    t: 0.0,
                    value: 0.0,
                    left: 0.0,
                    right: 0.5,
                },
                Knot {
                    t: 1.0,
                    value: 0.2,
                    left: 0.5,
                    right: 0.2,
                },
            ],
            false,
        )
        .unwrap();
        assert!(qsm_match(&h).is_none());
        let neg = qsm(0.0, 1.0, -0.5, 1.0, 0.0);
        assert_eq!(
            qsm_match(&neg).unwrap(),
            QsmParams {
                a: 0.0,
                b: 1.0,
                k: -0.5,
                alpha: 1.0,
                c: 0.0
            }
        );
    }

    #[test]
    fn classification_examples() {
        let sq = Named::Power { gamma: 2.0, knots: 256 }.build().unwrap();
        let c = classify(&sq);
        assert!(c.quasi_convex_in_mixtures && !c.quasi_concave_in_mixtures);
        assert_eq!(c.reason, QcxReason::ConvexDistortion);
        assert!(!c.exact);

        let c = classify(&DistortionFunction::linear(2.0));
        assert!(c.quasi_convex_in_mixtures && c.quasi_concave_in_mixtures);
        assert_eq!(c.quasi_linear_form, Some(QuasiLinearForm::ScaledMean { k: 2.0 }));

        let c = classify(&qsm(0.0, 0.0, 1.0, 0.3, 0.4));
        assert!(c.quasi_convex_in_mixtures && c.quasi_concave_in_mixtures);
        assert_eq!(
            c.quasi_linear_form,
            Some(QuasiLinearForm::ScaledMixedQuantile {
                k: 1.0,
                alpha: 0.3,
                c: 0.4
            })
        );
        assert!(matches!(c.reason, QcxReason::QsmForm(_)));

        let c = classify(&qsm(1.0, 2.0, 0.5, 0.3, 0.4));
        assert!(c.quasi_convex_in_mixtures && !c.quasi_concave_in_mixtures);
        assert_eq!(c.quasi_linear_form, None);
    }

    #[test]
    fn classification_json_shape() {
        let c = classify(&qsm(0.0, 0.0, 1.0, 0.3, 0.4));
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        assert_eq!(v["quasi_convex_in_mixtures"], true);
        assert_eq!(v["reason"], "QsmForm");
        assert_eq!(v["qsm_params"]["alpha"], 0.3);
        assert_eq!(v["quasi_linear_form"]["form"], "ScaledMixedQuantile");
    }

    #[test]
    fn dual_utility_examples() {
        assert!(classify_dual_utility(&qsm(1.0, 2.0, 0.5, 0.3, 0.4)).is_none());
        let convex = pwl(&[(0.0, 0.0), (0.5, 0.2), (1.0, 1.0)]);
        let d = classify_dual_utility(&convex).unwrap();
        assert_eq!(d.qcx_family, Some(DtFamily::H1));
        assert_eq!(d.qcv_family, None);

        let one = qsm(0.0, 0.0, 1.0, 0.0, 0.0);
        let d = classify_dual_utility(&one).unwrap();
        assert!(d.classification.quasi_convex_in_mixtures && d.classification.quasi_concave_in_mixtures);
        assert_eq!(
            d.classification.quasi_linear_form,
            Some(QuasiLinearForm::EndpointMix { k: 1.0, c: 1.0 })
        );

        let concave = pwl(&[(0.0, 0.0), (0.5, 0.8), (1.0, 1.0)]);
        let d = classify_dual_utility(&concave).unwrap();
        assert_eq!(d.qcx_family, None);
        assert_eq!(d.qcv_family, Some(DtFamily::H1Star));

        let h2 = qsm(0.25, 0.0, 0.75, 0.4, 0.5);
        let d = classify_dual_utility(&h2).unwrap();
        assert_eq!(
            d.qcx_family,
            Some(DtFamily::H2 {
                k: 0.75,
                alpha: 0.4,
                c: 0.5
            })
        );
    }

    #[test]
    fn mirrored_classification_is_symmetric() {
        for h in [
            qsm(1.0, 2.0, 0.5, 0.3, 0.4),
            qsm(0.0, 1.0, -2.0, 0.6, 0.1),
            pwl(&[(0.0, 0.0), (0.3, 0.6), (1.0, 1.0)]),
            DistortionFunction::identity(),
        ] {
            let a = classify(&h);
            let b = classify(&h.negate());
            assert_eq!(a.quasi_convex_in_mixtures, b.quasi_concave_in_mixtures);
            assert_eq!(a.quasi_concave_in_mixtures, b.quasi_convex_in_mixtures);
        }
    }
}
