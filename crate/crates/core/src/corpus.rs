//! A labelled set of exact piecewise-linear distortions.
//!
//! Labels are assigned by construction, independently of the classifier:
//! each entry records whether `h` is convex, a non-convex quantile-spread
//! step distortion, or neither, together with its continuity and whether
//! `I_h` is quasi-linear in mixtures.

use serde::Serialize;

use crate::distortion::{Breakpoint, DistortionFunction, QsmParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Convex,
    /// A quantile-spread step distortion that is not convex.
    Qsm,
    Neither,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub label: Label,
    pub continuous: bool,
    /// `I_h` is both m-quasi-convex and m-quasi-concave.
    pub quasi_linear: bool,
    /// `h(p) = kp`.
    pub affine: bool,
    pub h: DistortionFunction,
}

fn pwl(points: &[(f64, f64)]) -> DistortionFunction {
    DistortionFunction::interpolate(points, false).expect("corpus interpolant")
}

fn bp(t: f64, value: f64, left: Option<f64>, right: Option<f64>) -> Breakpoint {
    Breakpoint { t, value, left, right }
}

fn jumps(breakpoints: &[Breakpoint]) -> DistortionFunction {
    DistortionFunction::new(breakpoints).expect("corpus breakpoints")
}

fn qsm(a: f64, b: f64, k: f64, alpha: f64, c: f64) -> DistortionFunction {
    DistortionFunction::from_qsm(&QsmParams::new(a, b, k, alpha, c).expect("corpus qsm")).expect("corpus qsm")
}

struct Builder(Vec<CorpusEntry>);

impl Builder {
    fn add(&mut self, name: &'static str, label: Label, continuous: bool, quasi_linear: bool, h: DistortionFunction) {
        self.0.push(CorpusEntry {
            name,
            label,
            continuous,
            quasi_linear,
            affine: false,
            h,
        });
    }

    fn affine(&mut self, name: &'static str, k: f64) {
        self.0.push(CorpusEntry {
            name,
            label: Label::Convex,
            continuous: true,
            quasi_linear: true,
            affine: true,
            h: DistortionFunction::linear(k),
        });
    }
}

/// The full corpus: 16 convex, 18 step-form and 22 other distortions.
pub fn corpus() -> Vec<CorpusEntry> {
    use Label::*;
    let mut b = Builder(Vec::new());

    b.affine("identity", 1.0);
    b.affine("linear-2", 2.0);
    b.affine("linear-half", 0.5);
    b.affine("linear-neg", -1.0);
    b.affine("zero", 0.0);
    b.add(
        "square-4",
        Convex,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.25, 0.0625), (0.5, 0.25), (0.75, 0.5625), (1.0, 1.0)]),
    );
    b.add(
        "cube-3",
        Convex,
        true,
        false,
        pwl(&[(0.0, 0.0), (1.0 / 3.0, 1.0 / 27.0), (2.0 / 3.0, 8.0 / 27.0), (1.0, 1.0)]),
    );
    b.add(
        "convex-kink",
        Convex,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.6, 0.2), (1.0, 1.0)]),
    );
    b.add(
        "u-shape",
        Convex,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.5, -0.25), (1.0, 0.0)]),
    );
    b.add(
        "decreasing-convex",
        Convex,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.5, -0.75), (1.0, -1.0)]),
    );
    b.add(
        "convex-drop-at-zero",
        Convex,
        false,
        false,
        jumps(&[bp(0.0, 0.0, None, Some(-0.5)), bp(1.0, 1.0, None, None)]),
    );
    b.add(
        "convex-rise-at-one",
        Convex,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, None),
            bp(0.5, 0.1, None, None),
            bp(1.0, 1.0, Some(0.5), None),
        ]),
    );
    b.add(
        "convex-both-ends",
        Convex,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, Some(-1.0)),
            bp(0.4, -1.0, None, None),
            bp(1.0, 2.0, Some(0.0), None),
        ]),
    );
    b.add(
        "convex-many-kinks",
        Convex,
        true,
        false,
        pwl(&[
            (0.0, 0.0),
            (0.2, 0.01),
            (0.4, 0.05),
            (0.6, 0.15),
            (0.8, 0.4),
            (1.0, 1.0),
        ]),
    );
    b.add(
        "convex-negative-top",
        Convex,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.7, -0.7), (1.0, -0.4)]),
    );
    b.add(
        "convex-flat-then-up",
        Convex,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.5, 0.0), (1.0, 3.0)]),
    );

    b.add("qsm-quantile-mix", Qsm, false, true, qsm(0.0, 0.0, 1.0, 0.3, 0.4));
    b.add("qsm-indicator-above", Qsm, false, true, qsm(0.0, 0.0, 1.0, 0.5, 0.0));
    b.add("qsm-indicator-from", Qsm, false, true, qsm(0.0, 0.0, 1.0, 0.5, 1.0));
    b.add("qsm-spread", Qsm, false, false, qsm(1.0, 0.5, 1.0, 0.3, 0.4));
    b.add("qsm-negative-k", Qsm, false, true, qsm(0.0, 0.0, -1.0, 0.6, 0.2));
    b.add(
        "qsm-negative-k-spread",
        Qsm,
        false,
        false,
        qsm(0.5, 0.0, -2.0, 0.4, 0.5),
    );
    b.add("qsm-negative-k-below", Qsm, false, false, qsm(0.0, 1.0, -1.0, 0.7, 0.5));
    b.add("qsm-negative-k-top", Qsm, false, false, qsm(1.0, 1.0, -0.5, 0.5, 0.5));
    b.add("qsm-alpha0", Qsm, false, true, qsm(0.5, 0.0, 0.7, 0.0, 0.0));
    b.add("qsm-alpha0-flat", Qsm, false, true, qsm(0.0, 0.5, 2.0, 0.0, 0.0));
    b.add("qsm-alpha1", Qsm, false, true, qsm(0.0, 0.5, -1.0, 1.0, 0.0));
    b.add("qsm-alpha1-drop", Qsm, false, true, qsm(0.0, 0.0, -1.0, 1.0, 0.0));
    b.add("qsm-alpha1-spread", Qsm, false, true, qsm(0.2, 1.0, -0.5, 1.0, 0.3));
    b.add("qsm-wide", Qsm, false, false, qsm(2.0, 1.0, 1.0, 0.5, 0.5));
    b.add("qsm-late-jump", Qsm, false, true, qsm(0.0, 0.0, 3.0, 0.9, 0.1));
    b.add("qsm-negative-base", Qsm, false, false, qsm(0.0, 2.0, 1.0, 0.2, 1.0));
    b.add("qsm-top-up", Qsm, false, false, qsm(0.3, 0.0, 1.0, 0.75, 0.5));
    b.add(
        "qsm-breakpoints",
        Qsm,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, Some(-1.0)),
            bp(0.3, -0.6, Some(-1.0), Some(0.0)),
            bp(1.0, 1.0, Some(0.0), None),
        ]),
    );

    b.add(
        "cap-half",
        Neither,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.5, 1.0), (1.0, 1.0)]),
    );
    b.add(
        "concave-kink",
        Neither,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.3, 0.6), (1.0, 1.0)]),
    );
    b.add(
        "dual-square-4",
        Neither,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.25, 0.4375), (0.5, 0.75), (0.75, 0.9375), (1.0, 1.0)]),
    );
    b.add(
        "negative-square",
        Neither,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.5, -0.25), (1.0, -1.0)]),
    );
    b.add(
        "cap-shape",
        Neither,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]),
    );
    b.add(
        "s-shape",
        Neither,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.3, 0.1), (0.5, 0.3), (0.7, 0.8), (1.0, 1.0)]),
    );
    b.add(
        "inverse-s",
        Neither,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.3, 0.5), (0.7, 0.6), (1.0, 1.0)]),
    );
    b.add(
        "zigzag",
        Neither,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.25, 0.5), (0.5, 0.2), (0.75, 0.7), (1.0, 0.4)]),
    );
    b.add(
        "decreasing-concave",
        Neither,
        true,
        false,
        pwl(&[(0.0, 0.0), (0.5, -0.2), (1.0, -1.0)]),
    );
    b.add(
        "spike-up",
        Neither,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, None),
            bp(0.5, 0.9, Some(0.5), Some(0.5)),
            bp(1.0, 1.0, None, None),
        ]),
    );
    b.add(
        "spike-down",
        Neither,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, None),
            bp(0.5, 0.1, Some(0.5), Some(0.5)),
            bp(1.0, 1.0, None, None),
        ]),
    );
    b.add(
        "wrong-sign-jump",
        Neither,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, Some(0.3)),
            bp(0.5, 0.3, Some(0.3), Some(1.0)),
            bp(1.0, 1.0, Some(1.0), None),
        ]),
    );
    b.add(
        "interior-dip",
        Neither,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, Some(1.0)),
            bp(0.5, 0.0, Some(1.0), Some(1.0)),
            bp(1.0, 1.0, Some(1.0), None),
        ]),
    );
    b.add(
        "top-below-plateau",
        Neither,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, None),
            bp(0.5, 0.0, Some(0.0), Some(1.0)),
            bp(1.0, 0.5, Some(1.0), None),
        ]),
    );
    b.add(
        "staircase",
        Neither,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, None),
            bp(1.0 / 3.0, 0.0, Some(0.0), Some(1.0)),
            bp(2.0 / 3.0, 1.0, Some(1.0), Some(2.0)),
            bp(1.0, 2.0, Some(2.0), None),
        ]),
    );
    b.add(
        "uneven-staircase",
        Neither,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, None),
            bp(0.4, 0.5, Some(0.0), Some(1.0)),
            bp(0.6, 4.0, Some(1.0), Some(4.0)),
            bp(1.0, 4.0, Some(4.0), None),
        ]),
    );
    b.add(
        "jump-on-slope",
        Neither,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, None),
            bp(0.5, 0.25, Some(0.125), Some(0.5)),
            bp(1.0, 1.0, None, None),
        ]),
    );
    b.add(
        "positive-start",
        Neither,
        false,
        false,
        jumps(&[bp(0.0, 0.0, None, Some(0.2)), bp(1.0, 1.0, None, None)]),
    );
    b.add(
        "drop-at-one",
        Neither,
        false,
        false,
        jumps(&[bp(0.0, 0.0, None, None), bp(1.0, 0.5, Some(1.0), None)]),
    );
    b.add(
        "downward-jump",
        Neither,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, None),
            bp(0.5, 0.5, Some(0.5), Some(0.0)),
            bp(1.0, 0.5, None, None),
        ]),
    );
    b.add(
        "concave-with-jump",
        Neither,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, None),
            bp(0.3, 0.6, None, None),
            bp(0.6, 0.7, Some(0.7), Some(1.0)),
            bp(1.0, 1.1, None, None),
        ]),
    );
    b.add(
        "negative-plateaus",
        Neither,
        false,
        false,
        jumps(&[
            bp(0.0, 0.0, None, Some(-1.0)),
            bp(0.5, -1.0, Some(-1.0), Some(-2.0)),
            bp(1.0, -3.0, Some(-2.0), None),
        ]),
    );
    b.0
}
