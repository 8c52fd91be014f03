//! The bivariate reduction `π(p,q) = (x−y)h(p) + (y−z)h(q)` on
//! `T₂ = {0 ≤ p ≤ q ≤ 1}` and the searches for quasi-convexity violations
//! of `π`, each materialized as a mixture witness on three-point laws.

use rand::Rng;

use super::probes::{epsilon_sweep, interior_features, probe_levels, MAX_STRUCTURED_KNOTS};
use super::{Evaluator, Property, Witness};
use crate::distortion::DistortionFunction;
use crate::distribution::{DiscreteDistribution, TriplePoints};
use crate::error::{Error, Result};

/// `π(p,q)` for the given triple.
pub fn pi(h: &DistortionFunction, triple: &TriplePoints, p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || p > q {
        return Err(Error::domain("pi", format!("need 0 <= p <= q <= 1, got p={p}, q={q}")));
    }
    Ok(triple.upper_gap() * h.eval(p)? + triple.lower_gap() * h.eval(q)?)
}

/// `λ_h(p,q) = (h(p)/2 + h(q)/2 − h((p+q)/2)) / |h(q) − h(p)|`.
pub fn lambda_local_convexity(h: &DistortionFunction, p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || p >= q {
        return Err(Error::domain(
            "lambda_local_convexity",
            format!("need 0 <= p < q <= 1, got p={p}, q={q}"),
        ));
    }
    let (hp, hq) = (h.eval(p)?, h.eval(q)?);
    if hp == hq {
        return Err(Error::domain("lambda_local_convexity", "h(p) = h(q)"));
    }
    Ok(lambda_unchecked(h, p, q))
}

fn lambda_unchecked(h: &DistortionFunction, p: f64, q: f64) -> f64 {
    let (hp, hq) = (h.value(p), h.value(q));
    (0.5 * hp + 0.5 * hq - h.value(0.5 * p + 0.5 * q)) / (hq - hp).abs()
}

/// Tests `λ_h(p,q) + λ_h(s,t) ≥ −tol` for a pair of disjoint intervals
/// whose increments satisfy `|h(q)−h(p)|(x−y) = |h(t)−h(s)|(y−z)`.
///
/// A `false` result means `I_h` is not m-quasi-convex; [`lemma_witness`]
/// turns such a quadruple into an explicit witness.
pub fn lemma_scaled_pair_check(
    h: &DistortionFunction,
    triple: &TriplePoints,
    (p, q, s, t): (f64, f64, f64, f64),
    tol: f64,
) -> Result<bool> {
    const OP: &str = "lemma_scaled_pair_check";
    if !(0.0 <= p && p < q && q <= s && s < t && t <= 1.0) {
        return Err(Error::domain(
            OP,
            format!("need 0 <= p < q <= s < t <= 1, got ({p}, {q}, {s}, {t})"),
        ));
    }
    let d1 = (h.eval(q)? - h.eval(p)?).abs();
    let d2 = (h.eval(t)? - h.eval(s)?).abs();
    if d1 == 0.0 || d2 == 0.0 {
        return Err(Error::domain(OP, "h must differ at the ends of both intervals"));
    }
    let lhs = d1 * triple.upper_gap();
    let rhs = d2 * triple.lower_gap();
    if (lhs - rhs).abs() > 1e-9 * (1.0 + lhs.max(rhs)) {
        return Err(Error::domain(OP, format!("scaling condition fails: {lhs} vs {rhs}")));
    }
    Ok(lambda_unchecked(h, p, q) + lambda_unchecked(h, s, t) >= -tol)
}

/// The triple `(x, 0, z)` whose gap ratio `(x−y)/(y−z)` is `r`, with the
/// larger gap equal to 1.
pub(crate) fn triple_for_ratio(r: f64) -> TriplePoints {
    if r >= 1.0 {
        TriplePoints {
            x: 1.0,
            y: 0.0,
            z: -1.0 / r,
        }
    } else {
        TriplePoints { x: r, y: 0.0, z: -1.0 }
    }
}

/// Materializes the seven-atom construction for the quadruple
/// `p < q ≤ s < t` on the triple whose gap ratio matches the increments of
/// `h`. Both outcome patterns are tried; the witness is kept only if it
/// re-validates by direct evaluation.
pub fn lemma_witness(h: &DistortionFunction, (p, q, s, t): (f64, f64, f64, f64), tol: f64) -> Option<Witness> {
    if !(0.0 <= p && p < q && q <= s && s < t && t <= 1.0) {
        return None;
    }
    let d1 = (h.value(q) - h.value(p)).abs();
    let d2 = (h.value(t) - h.value(s)).abs();
    if d1 == 0.0 || d2 == 0.0 {
        return None;
    }
    let frame = Frame::plain(triple_for_ratio(d2 / d1));
    let search = Searcher::new(Evaluator::new(h), Scale::Fixed(frame), tol);
    search.quadruple((p, q), (s, t))
}

/// Support points of the three-point laws and the weights of `h(p)` and
/// `h(q)` in `π`. Without a transform the weights are the gaps of the
/// triple; with one they are the gaps of the sorted images.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Frame {
    pub points: [f64; 3],
    pub upper: f64,
    pub lower: f64,
}

impl Frame {
    pub fn plain(t: TriplePoints) -> Self {
        Frame {
            points: [t.x, t.y, t.z],
            upper: t.upper_gap(),
            lower: t.lower_gap(),
        }
    }

    fn law(&self, p: f64, q: f64) -> Option<DiscreteDistribution> {
        if !(0.0 <= p && p <= q && q <= 1.0) {
            return None;
        }
        DiscreteDistribution::new([(self.points[0], p), (self.points[1], q - p), (self.points[2], 1.0 - q)]).ok()
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Scale {
    /// A single triple, as in `check_pi_quasi_convex`.
    Fixed(Frame),
    /// The triple is chosen per candidate to maximize the violation.
    Free,
}

pub(crate) type Pt = (f64, f64);

/// Largest free gap ratio considered, as a power of two.
const MAX_LOG_RATIO: i32 = 30;

pub(crate) struct Searcher<'a> {
    pub ev: Evaluator<'a>,
    pub scale: Scale,
    pub tol: f64,
}

impl<'a> Searcher<'a> {
    pub fn new(ev: Evaluator<'a>, scale: Scale, tol: f64) -> Self {
        Self { ev, scale, tol }
    }

    fn h(&self) -> &'a DistortionFunction {
        self.ev.h
    }

    fn materialize(&self, frame: &Frame, a: Pt, b: Pt, lambda: f64) -> Option<Witness> {
        let f = frame.law(a.0, a.1)?;
        let g = frame.law(b.0, b.1)?;
        Witness::mixture(Property::MQuasiConvex, self.ev, f, g, lambda, self.tol)
    }

    /// Tests the mixture of the three-point laws at `a` and `b` with weight
    /// `lambda` on `a`.
    pub fn attempt(&self, a: Pt, b: Pt, lambda: f64) -> Option<Witness> {
        if !(0.0 < lambda && lambda < 1.0) || a.0 > a.1 || b.0 > b.1 {
            return None;
        }
        let h = self.h();
        let pm = lambda * a.0 + (1.0 - lambda) * b.0;
        let qm = lambda * a.1 + (1.0 - lambda) * b.1;
        let (hm_p, hm_q) = (h.value(pm), h.value(qm));
        let (ha_p, ha_q, hb_p, hb_q) = (h.value(a.0), h.value(a.1), h.value(b.0), h.value(b.1));
        match self.scale {
            Scale::Fixed(frame) => {
                let mid = frame.upper * hm_p + frame.lower * hm_q;
                let va = frame.upper * ha_p + frame.lower * ha_q;
                let vb = frame.upper * hb_p + frame.lower * hb_q;
                let bound = va.max(vb);
                if mid - bound <= 0.5 * self.tol * (1.0 + mid.abs().max(bound.abs())) {
                    return None;
                }
                self.materialize(&frame, a, b, lambda)
            }
            Scale::Free => {
                let r = best_ratio([hm_p - ha_p, hm_p - hb_p], [hm_q - ha_q, hm_q - hb_q], self.tol)?;
                self.materialize(&Frame::plain(triple_for_ratio(r)), a, b, lambda)
            }
        }
    }

    /// The scaled-pair construction at `λ = 1/2` for disjoint intervals
    /// `left = (p,q)`, `right = (s,t)`, in both outcome patterns.
    pub fn quadruple(&self, left: Pt, right: Pt) -> Option<Witness> {
        let ((p, q), (s, t)) = (left, right);
        self.attempt((p, t), (q, s), 0.5)
            .or_else(|| self.attempt((p, s), (q, t), 0.5))
    }

    /// Violations of univariate quasi-convexity of `h` on the line `p = 0`.
    pub fn univariate(&self, probes: &[f64]) -> Option<Witness> {
        let (q1, q2, q3) = univariate_violation(self.h(), probes)?;
        let lambda = (q3 - q2) / (q3 - q1);
        let frame = match self.scale {
            Scale::Fixed(f) => f,
            Scale::Free => Frame::plain(TriplePoints::default()),
        };
        self.materialize(&frame, (0.0, q1), (0.0, q3), lambda)
    }

    /// The point layouts of the necessity arguments, scanned over a
    /// geometric range of `ε` at every interior feature of `h`.
    pub fn layouts(&self, levels: &[f64], eps: &[f64]) -> Option<Witness> {
        let ks: Vec<f64> = match self.scale {
            Scale::Fixed(f) => vec![2.0 * f.upper / f.lower, 2.0 * f.lower / f.upper],
            Scale::Free => vec![0.5, 1.0, 2.0, 4.0],
        };
        for &e in eps {
            for &a in levels {
                let tries: [(Pt, Pt); 3] = [
                    ((0.0, a + 2.0 * e), (a / 2.0, a - e)),
                    ((a / 2.0, 1.0), (a + e, (1.0 + a) / 2.0)),
                    ((a / 2.0, a), (a, (1.0 + a) / 2.0)),
                ];
                for (x, y) in tries {
                    if let Some(w) = self.attempt(x, y, 0.5) {
                        return Some(w);
                    }
                }
                for &k in &ks {
                    let tries: [(Pt, Pt); 2] = [
                        ((0.0, a + 2.0 * k * e), (2.0 * e, a)),
                        ((a - 2.0 * k * e, 1.0), (a, 1.0 - 2.0 * e)),
                    ];
                    for (x, y) in tries {
                        if let Some(w) = self.attempt(x, y, 0.5) {
                            return Some(w);
                        }
                    }
                }
            }
        }
        None
    }

    /// The scaled-pair construction for intervals with negative local convexity,
    /// paired with disjoint intervals on which `h` is affine and not flat
    /// (sized to the scaling condition for a fixed triple) or with one
    /// another.
    pub fn scaled_pairs(&self, defects: &[Pt]) -> Option<Witness> {
        let h = self.h();
        let segs: Vec<(f64, f64, f64)> = h
            .segments()
            .filter(|&(t0, v0, t1, v1)| (v1 - v0).abs() > 1e-12 * (1.0 + v0.abs().max(v1.abs())) && t1 > t0)
            .map(|(t0, v0, t1, v1)| (t0, t1, (v1 - v0) / (t1 - t0)))
            .collect();
        let seg_step = (segs.len() / MAX_STRUCTURED_KNOTS).max(1);
        for &(p, q) in defects {
            let d = (h.value(q) - h.value(p)).abs();
            if d == 0.0 {
                continue;
            }
            for &(t0, t1, slope) in segs.iter().step_by(seg_step) {
                for (lo, hi, defect_left) in [(t0, t1.min(p), false), (t0.max(q), t1, true)] {
                    let len = hi - lo;
                    if len <= 0.0 {
                        continue;
                    }
                    let partners: Vec<Pt> = match self.scale {
                        Scale::Fixed(f) => {
                            let target = if defect_left {
                                d * f.upper / f.lower
                            } else {
                                d * f.lower / f.upper
                            };
                            let ell = target / slope.abs();
                            if ell > len {
                                continue;
                            }
                            let c = 0.5 * (lo + hi);
                            vec![(c - 0.5 * ell, c + 0.5 * ell)]
                        }
                        Scale::Free => {
                            let c = 0.5 * (lo + hi);
                            let short = (0.8 * len).min(q - p);
                            vec![(lo + 0.1 * len, hi - 0.1 * len), (c - 0.5 * short, c + 0.5 * short)]
                        }
                    };
                    for part in partners {
                        let found = if defect_left {
                            self.quadruple((p, q), part)
                        } else {
                            self.quadruple(part, (p, q))
                        };
                        if found.is_some() {
                            return found;
                        }
                    }
                }
            }
        }
        let top = &defects[..defects.len().min(32)];
        for (i, &a) in top.iter().enumerate() {
            for &b in &top[i + 1..] {
                let (l, r) = if a.1 <= b.0 {
                    (a, b)
                } else if b.1 <= a.0 {
                    (b, a)
                } else {
                    continue;
                };
                if let Some(w) = self.quadruple(l, r) {
                    return Some(w);
                }
            }
        }
        None
    }

    /// All pairs of `T₂` points built from `levels`, mixed at `λ = 1/2`.
    pub fn exhaustive(&self, levels: &[f64]) -> Option<Witness> {
        let h = self.h();
        let m = levels.len();
        let vals: Vec<f64> = levels.iter().map(|&p| h.value(p)).collect();
        let mut mid = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let v = h.value(0.5 * levels[i] + 0.5 * levels[j]);
                mid[i * m + j] = v;
                mid[j * m + i] = v;
            }
        }
        let pts: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
        match self.scale {
            Scale::Fixed(f) => {
                let val: Vec<f64> = pts
                    .iter()
                    .map(|&(i, j)| f.upper * vals[i] + f.lower * vals[j])
                    .collect();
                for (ai, &(i1, j1)) in pts.iter().enumerate() {
                    let va = val[ai];
                    let row_p = &mid[i1 * m..(i1 + 1) * m];
                    let row_q = &mid[j1 * m..(j1 + 1) * m];
                    for (bi, &(i2, j2)) in pts.iter().enumerate().skip(ai + 1) {
                        let bound = va.max(val[bi]);
                        let v = f.upper * row_p[i2] + f.lower * row_q[j2];
                        if v > bound + 0.5 * self.tol * (1.0 + v.abs().max(bound.abs())) {
                            let w = self.attempt((levels[i1], levels[j1]), (levels[i2], levels[j2]), 0.5);
                            if w.is_some() {
                                return w;
                            }
                        }
                    }
                }
                None
            }
            Scale::Free => {
                for (ai, &(i1, j1)) in pts.iter().enumerate() {
                    for &(i2, j2) in &pts[ai + 1..] {
                        let mp = mid[i1 * m + i2];
                        let mq = mid[j1 * m + j2];
                        let pa = [mp - vals[i1], mp - vals[i2]];
                        let qa = [mq - vals[j1], mq - vals[j2]];
                        if best_ratio(pa, qa, self.tol).is_some() {
                            let w = self.attempt((levels[i1], levels[j1]), (levels[i2], levels[j2]), 0.5);
                            if w.is_some() {
                                return w;
                            }
                        }
                    }
                }
                None
            }
        }
    }

    /// Random pairs of `T₂` points and random weights.
    pub fn random<R: Rng>(&self, rng: &mut R, trials: usize) -> Option<Witness> {
        let point = |rng: &mut R| {
            let (a, b): (f64, f64) = (rng.gen(), rng.gen());
            (a.min(b), a.max(b))
        };
        for _ in 0..trials {
            let a = point(rng);
            let b = point(rng);
            let lambda: f64 = rng.gen_range(0.01..0.99);
            if let Some(w) = self.attempt(a, b, lambda) {
                return Some(w);
            }
        }
        None
    }
}

/// Levels `q₁ < q₂ < q₃` among `probes` with `h(q₂) > max(h(q₁), h(q₃))`,
/// choosing the largest excess with `q₁`, `q₃` the minimizers on each side.
pub(crate) fn univariate_violation(h: &DistortionFunction, probes: &[f64]) -> Option<(f64, f64, f64)> {
    let vals: Vec<f64> = probes.iter().map(|&q| h.value(q)).collect();
    let n = vals.len();
    if n < 3 {
        return None;
    }
    let mut prefix = vec![0usize; n];
    for j in 2..n {
        prefix[j] = if vals[j - 1] < vals[prefix[j - 1]] {
            j - 1
        } else {
            prefix[j - 1]
        };
    }
    let mut suffix = vec![n - 1; n];
    for j in (0..n.saturating_sub(2)).rev() {
        suffix[j] = if vals[j + 1] < vals[suffix[j + 1]] {
            j + 1
        } else {
            suffix[j + 1]
        };
    }
    let mut best: Option<(f64, usize)> = None;
    for j in 1..n - 1 {
        let excess = vals[j] - vals[prefix[j]].max(vals[suffix[j]]);
        if excess > 0.0 && best.is_none_or(|(e, _)| excess > e) {
            best = Some((excess, j));
        }
    }
    let (_, j) = best?;
    Some((probes[prefix[j]], probes[j], probes[suffix[j]]))
}

/// For increments `a_i = h(p_m) − h(p_i)`, `b_i = h(q_m) − h(q_i)` of two
/// `T₂` points against their mixture, the gap ratio `r = (x−y)/(y−z)`
/// maximizing `min_i (r a_i + b_i) / max(1, r)`, if that maximum is a
/// violation.
fn best_ratio(a: [f64; 2], b: [f64; 2], tol: f64) -> Option<f64> {
    if a.iter().all(|&v| v <= 0.0) && b.iter().all(|&v| v <= 0.0) {
        return None;
    }
    let score = |r: f64| (r * a[0] + b[0]).min(r * a[1] + b[1]) / r.max(1.0);
    let mut best = (f64::NEG_INFINITY, 1.0);
    let mut consider = |r: f64| {
        if r > 0.0 && r.is_finite() {
            let s = score(r);
            if s > best.0 {
                best = (s, r);
            }
        }
    };
    if a[0] != a[1] {
        consider((b[1] - b[0]) / (a[0] - a[1]));
    }
    for k in -MAX_LOG_RATIO..=MAX_LOG_RATIO {
        consider(2f64.powi(k));
    }
    let scale = 1.0 + a.iter().chain(&b).fold(0.0_f64, |m, v| m.max(v.abs()));
    (best.0 > tol * scale).then_some(best.1)
}

/// Intervals `(p,q)` on which `h` has negative local convexity, most
/// negative first: probe pairs plus asymmetric pairs straddling interior
/// features at many scales.
pub(crate) fn defect_pairs(h: &DistortionFunction, probes: &[f64], limit: usize) -> Vec<Pt> {
    let mut found: Vec<(f64, Pt)> = Vec::new();
    let mut push = |p: f64, q: f64| {
        if 0.0 <= p && p < q && q <= 1.0 {
            let d = h.value(q) - h.value(p);
            if d.abs() > 1e-12 {
                let l = lambda_unchecked(h, p, q);
                if l < -1e-12 {
                    found.push((l, (p, q)));
                }
            }
        }
    };
    for (i, &p) in probes.iter().enumerate() {
        for &q in &probes[i + 1..] {
            push(p, q);
        }
    }
    if h.breakpoint_locations().len() <= MAX_STRUCTURED_KNOTS {
        for &d in &epsilon_sweep(h) {
            for &k in &interior_features(h) {
                push(k - d, k + d);
                push(k - d, k + 3.0 * d);
                push(k - 3.0 * d, k + d);
                push(k, k + 2.0 * d);
                push(k - 2.0 * d, k);
            }
            push(0.0, 2.0 * d);
            push(1.0 - 2.0 * d, 1.0);
        }
    }
    found.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then((a.1 .1 - a.1 .0).total_cmp(&(b.1 .1 - b.1 .0)))
    });
    found.dedup_by(|a, b| a.1 == b.1);
    found.truncate(limit);
    found.into_iter().map(|(_, pq)| pq).collect()
}

/// Levels at which the layouts are anchored: interior features of `h`
/// and, for finely sampled `h`, a coarse grid.
pub(crate) fn layout_anchors(h: &DistortionFunction, n: usize) -> Vec<f64> {
    let mut v = if h.breakpoint_locations().len() <= MAX_STRUCTURED_KNOTS {
        interior_features(h)
    } else {
        Vec::new()
    };
    let coarse = n.min(32);
    v.extend((1..coarse).map(|i| i as f64 / coarse as f64));
    v
}

/// The full fixed-triple search for a violation of quasi-convexity of `π`.
pub(crate) fn fixed_search<R: Rng>(
    ev: Evaluator<'_>,
    frame: Frame,
    n: usize,
    trials: usize,
    tol: f64,
    rng: &mut R,
) -> Option<Witness> {
    let h = ev.h;
    let search = Searcher::new(ev, Scale::Fixed(frame), tol);
    let probes = probe_levels(h, n);
    let mut uni = probes.clone();
    if h.breakpoint_locations().len() <= MAX_STRUCTURED_KNOTS {
        for &d in &epsilon_sweep(h) {
            for &k in &h.breakpoint_locations() {
                uni.push(k - d);
                uni.push(k + d);
            }
        }
    }
    let uni = super::probes::sort_dedup(uni);
    search
        .univariate(&uni)
        .or_else(|| search.layouts(&layout_anchors(h, n), &epsilon_sweep(h)))
        .or_else(|| search.scaled_pairs(&defect_pairs(h, &probes, 256)))
        .or_else(|| search.exhaustive(&probes))
        .or_else(|| search.random(rng, trials))
}
