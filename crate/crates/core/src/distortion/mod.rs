//! Piecewise-affine distortion functions with point masses at breakpoints.

pub mod classify;
pub mod named;
pub mod spec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{LEVEL_SNAP, POINT_MERGE_TOL, STRUCT_TOL};

pub use named::Named;

/// A breakpoint as it appears in the JSON schema. `left` is absent at
/// `t = 0` and `right` at `t = 1`; elsewhere a missing limit defaults to the
/// point value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Breakpoint {
    pub t: f64,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<f64>,
}

/// Fully resolved breakpoint: point value and both one-sided limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Knot {
    pub t: f64,
    pub value: f64,
    pub left: f64,
    pub right: f64,
}

impl Knot {
    fn is_trivial(&self) -> bool {
        (self.value - self.left).abs() <= STRUCT_TOL && (self.value - self.right).abs() <= STRUCT_TOL
    }
}

/// Parameters of a scaled quantile-spread mixture `S_{a,b} + k Q^c`.
///
/// `alpha` is the jump location of the distortion function; the functional
/// takes the mixed quantile at level `1 − alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QsmParams {
    pub a: f64,
    pub b: f64,
    pub k: f64,
    pub alpha: f64,
    pub c: f64,
}

impl QsmParams {
    pub fn new(a: f64, b: f64, k: f64, alpha: f64, c: f64) -> Result<Self> {
        let p = Self { a, b, k, alpha, c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.a, self.b, self.k, self.alpha, self.c]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite || self.a < 0.0 || self.b < 0.0 {
            return Err(Error::InvalidDistortion(format!(
                "qsm needs finite a, b >= 0, got {self:?}"
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) || !(0.0..=1.0).contains(&self.c) {
            return Err(Error::InvalidDistortion(format!(
                "qsm needs alpha, c in [0,1], got {self:?}"
            )));
        }
        Ok(())
    }

    /// Level of the mixed quantile in the functional form.
    pub fn quantile_level(&self) -> f64 {
        1.0 - self.alpha
    }
}

/// A function `h` on `[0,1]` with `h(0) = 0`, affine between consecutive
/// breakpoints, with an explicit value and one-sided limits at each
/// breakpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionFunction {
    knots: Vec<Knot>,
    approximate: bool,
}

impl DistortionFunction {
    /// Builds a distortion from breakpoints listed in increasing `t`, starting
    /// at 0 and ending at 1.
    pub fn new(breakpoints: &[Breakpoint]) -> Result<Self> {
        let n = breakpoints.len();
        if n < 2 {
            return Err(Error::InvalidDistortion("need breakpoints at 0 and 1".into()));
        }
        let mut knots = Vec::with_capacity(n);
        for (j, bp) in breakpoints.iter().enumerate() {
            let left = if j == 0 { bp.value } else { bp.left.unwrap_or(bp.value) };
            let right = if j == n - 1 {
                bp.value
            } else {
                bp.right.unwrap_or(bp.value)
            };
            if j == 0 && bp.left.is_some() {
                return Err(Error::InvalidDistortion("breakpoint at 0 has no left limit".into()));
            }
            if j == n - 1 && bp.right.is_some() {
                return Err(Error::InvalidDistortion("breakpoint at 1 has no right limit".into()));
            }
            knots.push(Knot {
                t: bp.t,
                value: bp.value,
                left,
                right,
            });
        }
        Self::from_knots(knots, false)
    }

    pub(crate) fn from_knots(mut knots: Vec<Knot>, approximate: bool) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidDistortion(m));
        if knots.len() < 2 {
            return bad("need breakpoints at 0 and 1".into());
        }
        if knots
            .iter()
            .any(|k| ![k.t, k.value, k.left, k.right].iter().all(|v| v.is_finite()))
        {
            return bad("breakpoints must be finite".into());
        }
        if knots[0].t != 0.0 || knots[knots.len() - 1].t != 1.0 {
            return bad("breakpoints must start at t=0 and end at t=1".into());
        }
        if knots.windows(2).any(|w| w[1].t <= w[0].t) {
            return bad("breakpoints must be strictly increasing in t".into());
        }
        if knots[0].value.abs() > POINT_MERGE_TOL {
            return bad(format!("h(0) must be 0, got {}", knots[0].value));
        }
        knots[0].value = 0.0;
        knots[0].left = 0.0;
        let last = knots.len() - 1;
        knots[last].right = knots[last].value;
        let mut h = Self { knots, approximate };
        h.canonicalize();
        Ok(h)
    }

    /// Drops interior breakpoints where `h` is continuous and the adjacent
    /// slopes agree.
    fn canonicalize(&mut self) {
        let mut out: Vec<Knot> = Vec::with_capacity(self.knots.len());
        out.push(self.knots[0]);
        for j in 1..self.knots.len() {
            let cur = self.knots[j];
            let removable = j + 1 < self.knots.len() && cur.is_trivial() && {
                let prev = out[out.len() - 1];
                let next = self.knots[j + 1];
                let s1 = (cur.left - prev.right) / (cur.t - prev.t);
                let s2 = (next.left - cur.right) / (next.t - cur.t);
                (s1 - s2).abs() <= STRUCT_TOL * (1.0 + s1.abs().max(s2.abs()))
            };
            if !removable {
                out.push(cur);
            }
        }
        self.knots = out;
    }

    pub fn identity() -> Self {
        Self::linear(1.0)
    }

    /// `h(p) = k p`.
    pub fn linear(k: f64) -> Self {
        Self {
            knots: vec![
                Knot {
                    t: 0.0,
                    value: 0.0,
                    left: 0.0,
                    right: 0.0,
                },
                Knot {
                    t: 1.0,
                    value: k,
                    left: k,
                    right: k,
                },
            ],
            approximate: false,
        }
    }

    /// The continuous interpolant through `(p, h(p))` pairs.
    pub fn interpolate(points: &[(f64, f64)], approximate: bool) -> Result<Self> {
        let knots = points
            .iter()
            .map(|&(t, v)| Knot {
                t,
                value: v,
                left: v,
                right: v,
            })
            .collect();
        Self::from_knots(knots, approximate)
    }

    /// The step distortion of a scaled quantile-spread mixture.
    pub fn from_qsm(params: &QsmParams) -> Result<Self> {
        params.validate()?;
        let QsmParams { a, b, k, alpha, c } = *params;
        let top = a - b + k;
        let knots = if alpha == 0.0 {
            let v = k - b;
            vec![
                Knot {
                    t: 0.0,
                    value: 0.0,
                    left: 0.0,
                    right: v,
                },
                Knot {
                    t: 1.0,
                    value: top,
                    left: v,
                    right: top,
                },
            ]
        } else if alpha == 1.0 {
            vec![
                Knot {
                    t: 0.0,
                    value: 0.0,
                    left: 0.0,
                    right: -b,
                },
                Knot {
                    t: 1.0,
                    value: top,
                    left: -b,
                    right: top,
                },
            ]
        } else {
            vec![
                Knot {
                    t: 0.0,
                    value: 0.0,
                    left: 0.0,
                    right: -b,
                },
                Knot {
                    t: alpha,
                    value: -b + k * c,
                    left: -b,
                    right: -b + k,
                },
                Knot {
                    t: 1.0,
                    value: top,
                    left: -b + k,
                    right: top,
                },
            ]
        };
        Self::from_knots(knots, false)
    }

    /// Whether `h` is a sampled interpolant of a curved function, in which
    /// case structural classification is only approximate.
    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    pub(crate) fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn breakpoints(&self) -> Vec<Breakpoint> {
        let n = self.knots.len();
        self.knots
            .iter()
            .enumerate()
            .map(|(j, k)| Breakpoint {
                t: k.t,
                value: k.value,
                left: (j > 0).then_some(k.left),
                right: (j + 1 < n).then_some(k.right),
            })
            .collect()
    }

    pub fn breakpoint_locations(&self) -> Vec<f64> {
        self.knots.iter().map(|k| k.t).collect()
    }

    /// Number of affine pieces.
    pub fn segment_count(&self) -> usize {
        self.knots.len() - 1
    }

    /// Segments as `(t_start, value_after_start, t_end, value_before_end)`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.knots.windows(2).map(|w| (w[0].t, w[0].right, w[1].t, w[1].left))
    }

    pub(crate) fn slopes(&self) -> Vec<f64> {
        self.segments().map(|(t0, v0, t1, v1)| (v1 - v0) / (t1 - t0)).collect()
    }

    fn check_level(op: &'static str, p: f64) -> Result<()> {
        if (0.0..=1.0).contains(&p) {
            Ok(())
        } else {
            Err(Error::domain(op, format!("p={p} outside [0,1]")))
        }
    }

    /// `h(p)`. A level within [`LEVEL_SNAP`] of a breakpoint takes that
    /// breakpoint's point value.
    pub fn eval(&self, p: f64) -> Result<f64> {
        Self::check_level("eval", p)?;
        Ok(self.value(p))
    }

    /// `h(p−)`, with `h(0−) = h(0)`.
    pub fn eval_left(&self, p: f64) -> Result<f64> {
        Self::check_level("eval_left", p)?;
        Ok(self.limit(p, true))
    }

    /// `h(p+)`, with `h(1+) = h(1)`.
    pub fn eval_right(&self, p: f64) -> Result<f64> {
        Self::check_level("eval_right", p)?;
        Ok(self.limit(p, false))
    }

    /// Index of a breakpoint within [`LEVEL_SNAP`] of `p`, or the index of
    /// the segment containing `p` as `Err`.
    fn locate(&self, p: f64) -> std::result::Result<usize, usize> {
        let idx = self.knots.partition_point(|k| k.t < p);
        if idx < self.knots.len() && self.knots[idx].t - p <= LEVEL_SNAP {
            return Ok(idx);
        }
        if idx > 0 && p - self.knots[idx - 1].t <= LEVEL_SNAP {
            return Ok(idx - 1);
        }
        Err(idx.saturating_sub(1).min(self.knots.len() - 2))
    }

    fn on_segment(&self, j: usize, p: f64) -> f64 {
        let a = &self.knots[j];
        let b = &self.knots[j + 1];
        let w = (p - a.t) / (b.t - a.t);
        a.right + (b.left - a.right) * w
    }

    /// Unchecked evaluation; `p` is clamped into `[0,1]`.
    pub(crate) fn value(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match self.locate(p) {
            Ok(j) => self.knots[j].value,
            Err(j) => self.on_segment(j, p),
        }
    }

    pub(crate) fn limit(&self, p: f64, from_left: bool) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match self.locate(p) {
            Ok(j) if from_left => self.knots[j].left,
            Ok(j) => self.knots[j].right,
            Err(j) => self.on_segment(j, p),
        }
    }

    pub fn value_at_one(&self) -> f64 {
        self.knots[self.knots.len() - 1].value
    }

    /// `−h`.
    pub fn negate(&self) -> Self {
        self.scale(-1.0)
    }

    /// `k h`.
    pub fn scale(&self, k: f64) -> Self {
        let knots = self
            .knots
            .iter()
            .map(|x| Knot {
                t: x.t,
                value: k * x.value,
                left: k * x.left,
                right: k * x.right,
            })
            .collect();
        let mut h = Self {
            knots,
            approximate: self.approximate,
        };
        h.canonicalize();
        h
    }

    /// Pointwise sum over the union of breakpoints.
    pub fn add(&self, other: &Self) -> Self {
        let mut ts: Vec<f64> = self.knots.iter().chain(&other.knots).map(|k| k.t).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|b, a| (*b - *a).abs() <= POINT_MERGE_TOL);
        let knots = ts
            .into_iter()
            .map(|t| Knot {
                t,
                value: self.value(t) + other.value(t),
                left: self.limit(t, true) + other.limit(t, true),
                right: self.limit(t, false) + other.limit(t, false),
            })
            .collect();
        let mut h = Self {
            knots,
            approximate: self.approximate || other.approximate,
        };
        let last = h.knots.len() - 1;
        h.knots[last].t = 1.0;
        h.canonicalize();
        h
    }

    /// Continuous on all of `[0,1]`.
    pub fn is_continuous(&self) -> bool {
        self.knots.iter().all(Knot::is_trivial)
    }

    /// Strictly increasing or strictly decreasing on `[0,1]`.
    pub fn is_strictly_monotone(&self) -> bool {
        self.is_strictly_increasing() || self.negate().is_strictly_increasing()
    }

    fn is_strictly_increasing(&self) -> bool {
        let knots_ok = self.knots.iter().all(|k| k.left <= k.value && k.value <= k.right);
        let segs_ok = self.segments().all(|(_, v0, _, v1)| v1 > v0);
        knots_ok && segs_ok
    }

    /// Nondecreasing on `[0,1]`.
    pub fn is_increasing(&self) -> bool {
        let tol = STRUCT_TOL;
        self.knots
            .iter()
            .all(|k| k.left <= k.value + tol && k.value <= k.right + tol)
            && self.segments().all(|(_, v0, _, v1)| v1 >= v0 - tol)
    }

    /// Largest absolute value taken by `h` or its one-sided limits.
    pub fn sup_norm(&self) -> f64 {
        self.knots
            .iter()
            .map(|k| k.value.abs().max(k.left.abs()).max(k.right.abs()))
            .fold(0.0, f64::max)
    }

    /// Smallest positive gap between breakpoints, or 1 for a single piece.
    pub fn min_gap(&self) -> f64 {
        self.knots.windows(2).map(|w| w[1].t - w[0].t).fold(1.0, f64::min)
    }
}

impl Serialize for DistortionFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        spec::DistortionSpec::PwlAtoms {
            breakpoints: self.breakpoints(),
        }
        .serialize(s)
    }
}
