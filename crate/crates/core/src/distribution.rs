//! Finitely supported distributions, random variables on a shared finite
//! probability space, mixtures, quantiles and the concave order.

use std::io::BufRead;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, CompensatedSum, LEVEL_SNAP, MEAN_TOL, POINT_MERGE_TOL, PROB_RENORMALIZE_TOL};

/// A probability distribution on finitely many real points.
///
/// Atoms are kept sorted by point, with no two points closer than
/// [`POINT_MERGE_TOL`] and every probability strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteDistribution {
    /// Builds a distribution from `(point, probability)` pairs in any order.
    ///
    /// Zero-probability atoms are dropped, nearby points merged, and the
    /// probabilities renormalized when their sum is within
    /// [`PROB_RENORMALIZE_TOL`] of one.
    pub fn new(atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        const OP: &str = "distribution";
        let mut raw: Vec<(f64, f64)> = Vec::new();
        for (x, p) in atoms {
            if !x.is_finite() {
                return Err(Error::domain(OP, format!("non-finite point {x}")));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::domain(OP, format!("invalid probability {p} at {x}")));
            }
            if p > 0.0 {
                raw.push((x, p));
            }
        }
        if raw.is_empty() {
            return Err(Error::domain(OP, "no atoms with positive probability"));
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut merged: Vec<(f64, CompensatedSum)> = Vec::with_capacity(raw.len());
        for (x, p) in raw {
            match merged.last_mut() {
                Some((anchor, acc)) if (x - *anchor).abs() <= POINT_MERGE_TOL => acc.add(p),
                _ => {
                    let mut acc = CompensatedSum::new();
                    acc.add(p);
                    merged.push((x, acc));
                }
            }
        }
        let mut atoms: Vec<(f64, f64)> = merged.into_iter().map(|(x, acc)| (x, acc.value())).collect();
        let total = compensated_sum(atoms.iter().map(|a| a.1));
        if (total - 1.0).abs() > PROB_RENORMALIZE_TOL {
            return Err(Error::domain(OP, format!("probabilities sum to {total}, not 1")));
        }
        if total != 1.0 {
            for a in &mut atoms {
                a.1 /= total;
            }
        }
        Ok(Self { atoms })
    }

    pub fn point_mass(x: f64) -> Result<Self> {
        Self::new([(x, 1.0)])
    }

    /// `p δ_x + (q − p) δ_y + (1 − q) δ_z` for `0 ≤ p ≤ q ≤ 1`.
    pub fn three_point(triple: &TriplePoints, p: f64, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || p > q {
            return Err(Error::domain(
                "three_point",
                format!("need 0 <= p <= q <= 1, got p={p}, q={q}"),
            ));
        }
        Self::new([(triple.x, p), (triple.y, q - p), (triple.z, 1.0 - q)])
    }

    /// `p δ_x + (1 − p) δ_y`.
    pub fn two_point(x: f64, y: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("two_point", format!("p={p} outside [0,1]")));
        }
        Self::new([(x, p), (y, 1.0 - p)])
    }

    /// Atoms sorted by increasing point.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn min_point(&self) -> f64 {
        self.atoms[0].0
    }

    pub fn max_point(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].0
    }

    pub fn mean(&self) -> f64 {
        compensated_sum(self.atoms.iter().map(|&(x, p)| x * p))
    }

    /// Right-continuous CDF: total probability of atoms `<= t`.
    pub fn cdf(&self, t: f64) -> f64 {
        compensated_sum(self.atoms.iter().take_while(|a| a.0 <= t).map(|a| a.1))
    }

    /// `inf{x : F(x) >= alpha}`; the support minimum at 0 and maximum at 1.
    pub fn quantile_left(&self, alpha: f64) -> Result<f64> {
        check_level("quantile_left", alpha)?;
        if alpha == 0.0 {
            return Ok(self.min_point());
        }
        if alpha == 1.0 {
            return Ok(self.max_point());
        }
        let mut acc = CompensatedSum::new();
        for &(x, p) in &self.atoms {
            acc.add(p);
            if acc.value() >= alpha - LEVEL_SNAP {
                return Ok(x);
            }
        }
        Ok(self.max_point())
    }

    /// `inf{x : F(x) > alpha}`; the support minimum at 0 and maximum at 1.
    pub fn quantile_right(&self, alpha: f64) -> Result<f64> {
        check_level("quantile_right", alpha)?;
        if alpha == 0.0 {
            return Ok(self.min_point());
        }
        if alpha == 1.0 {
            return Ok(self.max_point());
        }
        let mut acc = CompensatedSum::new();
        for &(x, p) in &self.atoms {
            acc.add(p);
            if acc.value() > alpha + LEVEL_SNAP {
                return Ok(x);
            }
        }
        Ok(self.max_point())
    }

    /// Mixed quantile `c Q⁺_α + (1 − c) Q⁻_α`.
    pub fn quantile_mixed(&self, alpha: f64, c: f64) -> Result<f64> {
        check_level("quantile_mixed", c)?;
        let lo = self.quantile_left(alpha)?;
        let hi = self.quantile_right(alpha)?;
        if c == 0.0 {
            return Ok(lo);
        }
        if c == 1.0 {
            return Ok(hi);
        }
        Ok(c * hi + (1.0 - c) * lo)
    }

    /// Asymmetric spread `a Q_0 − b Q_1`.
    pub fn spread(&self, a: f64, b: f64) -> Result<f64> {
        if a.is_nan() || b.is_nan() || a < 0.0 || b < 0.0 {
            return Err(Error::domain("spread", format!("a={a}, b={b} must be nonnegative")));
        }
        Ok(a * self.min_point() - b * self.max_point())
    }

    /// Stop-loss transform `E[(X − t)^+]`.
    pub fn stop_loss(&self, t: f64) -> f64 {
        compensated_sum(self.atoms.iter().map(|&(x, p)| p * (x - t).max(0.0)))
    }

    /// Applies `f` to each point, merging collisions.
    pub fn map_points(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        Self::new(self.atoms.iter().map(|&(x, p)| (f(x), p)))
    }
}

fn check_level(op: &'static str, alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::domain(op, format!("level {alpha} outside [0,1]")))
    }
}

impl Serialize for DiscreteDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.atoms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteDistribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let atoms = Vec::<(f64, f64)>::deserialize(d)?;
        DiscreteDistribution::new(atoms).map_err(serde::de::Error::custom)
    }
}

/// `λF + (1 − λ)G`.
pub fn mix(f: &DiscreteDistribution, g: &DiscreteDistribution, lambda: f64) -> Result<DiscreteDistribution> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::domain("mix", format!("lambda={lambda} outside [0,1]")));
    }
    let mu = 1.0 - lambda;
    DiscreteDistribution::new(
        f.atoms
            .iter()
            .map(|&(x, p)| (x, lambda * p))
            .chain(g.atoms.iter().map(|&(x, q)| (x, mu * q))),
    )
}

/// `F ≤_cv G`: equal means and `E_F[(X−t)^+] >= E_G[(X−t)^+]` at every
/// point of the union support.
pub fn concave_order_leq(f: &DiscreteDistribution, g: &DiscreteDistribution) -> bool {
    let lo = f.min_point().min(g.min_point());
    let hi = f.max_point().max(g.max_point());
    let width = hi - lo;
    let tol = MEAN_TOL * (1.0 + width);
    if (f.mean() - g.mean()).abs() > tol {
        return false;
    }
    f.atoms
        .iter()
        .chain(g.atoms.iter())
        .all(|&(t, _)| f.stop_loss(t) >= g.stop_loss(t) - tol)
}

/// Replaces atoms `i` and `j` by a single atom at their probability-weighted
/// barycenter.
pub fn collapse_pair(g: &DiscreteDistribution, i: usize, j: usize) -> Result<DiscreteDistribution> {
    let n = g.len();
    if i == j || i >= n || j >= n {
        return Err(Error::domain(
            "collapse_pair",
            format!("invalid atom pair ({i}, {j}) of {n}"),
        ));
    }
    let (xi, pi) = g.atoms[i];
    let (xj, pj) = g.atoms[j];
    let w = pi + pj;
    let bary = (pi * xi + pj * xj) / w;
    DiscreteDistribution::new(
        g.atoms
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i && *k != j)
            .map(|(_, &a)| a)
            .chain(std::iter::once((bary, w))),
    )
}

/// Collapses a randomly chosen pair of atoms of `g` to their barycenter.
/// The result `F` satisfies `g ≤_cv F`.
pub fn mean_preserving_contraction(g: &DiscreteDistribution, seed: u64) -> Result<DiscreteDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    mean_preserving_contraction_with(g, &mut rng)
}

pub fn mean_preserving_contraction_with<R: Rng + ?Sized>(
    g: &DiscreteDistribution,
    rng: &mut R,
) -> Result<DiscreteDistribution> {
    let n = g.len();
    if n < 2 {
        return Err(Error::domain("mean_preserving_contraction", "need at least two atoms"));
    }
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    collapse_pair(g, i, j)
}

/// Equal-weight empirical law of `values`.
pub fn empirical_from_samples(values: &[f64]) -> Result<DiscreteDistribution> {
    if values.is_empty() {
        return Err(Error::domain("empirical_from_samples", "empty sample list"));
    }
    let w = 1.0 / values.len() as f64;
    DiscreteDistribution::new(values.iter().map(|&v| (v, w)))
}

/// Reads one real per line, with an optional `value` header line. Blank
/// lines are skipped.
pub fn read_samples_csv<R: BufRead>(reader: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let field = line.trim();
        if field.is_empty() {
            continue;
        }
        if out.is_empty() && field.eq_ignore_ascii_case("value") {
            continue;
        }
        let v: f64 = field.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("not a real number: {field:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("non-finite value {field:?}"),
            });
        }
        out.push(v);
    }
    Ok(out)
}

/// Parses `"x1:p1,x2:p2,..."`.
pub fn parse_inline(s: &str) -> Result<DiscreteDistribution> {
    let mut atoms = Vec::new();
    for (idx, part) in s.split(',').enumerate() {
        let part = part.trim();
        let (x, p) = part.split_once(':').ok_or_else(|| Error::Parse {
            line: 1,
            msg: format!("atom {} ({part:?}) is not point:probability", idx + 1),
        })?;
        let parse = |v: &str| {
            v.trim().parse::<f64>().map_err(|_| Error::Parse {
                line: 1,
                msg: format!("atom {}: not a number: {v:?}", idx + 1),
            })
        };
        atoms.push((parse(x)?, parse(p)?));
    }
    DiscreteDistribution::new(atoms)
}

/// Three points `x > y > z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriplePoints {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TriplePoints {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && z.is_finite() && x > y && y > z {
            Ok(Self { x, y, z })
        } else {
            Err(Error::domain("triple", format!("need x > y > z, got ({x}, {y}, {z})")))
        }
    }

    /// `x − y`, the weight of `h(p)` in the bivariate reduction.
    pub fn upper_gap(&self) -> f64 {
        self.x - self.y
    }

    /// `y − z`, the weight of `h(q)` in the bivariate reduction.
    pub fn lower_gap(&self) -> f64 {
        self.y - self.z
    }
}

impl Default for TriplePoints {
    fn default() -> Self {
        Self {
            x: 1.0,
            y: 0.0,
            z: -1.0,
        }
    }
}

/// A real-valued random variable on a finite probability space.
///
/// Variables can be combined only when they live on the same space, i.e.
/// share identical state weights.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteRandomVariable {
    weights: Arc<[f64]>,
    outcomes: Vec<f64>,
}

impl FiniteRandomVariable {
    pub fn new(weights: Arc<[f64]>, outcomes: Vec<f64>) -> Result<Self> {
        const OP: &str = "random_variable";
        if weights.is_empty() || weights.len() != outcomes.len() {
            return Err(Error::domain(
                OP,
                "weights and outcomes must be non-empty and of equal length",
            ));
        }
        if weights.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
            return Err(Error::domain(OP, "state weights must be positive"));
        }
        let total = compensated_sum(weights.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(OP, format!("state weights sum to {total}")));
        }
        if outcomes.iter().any(|o| !o.is_finite()) {
            return Err(Error::domain(OP, "outcomes must be finite"));
        }
        Ok(Self { weights, outcomes })
    }

    /// Normalizes `weights` into a shared space handle.
    pub fn space(weights: &[f64]) -> Result<Arc<[f64]>> {
        if weights.is_empty() || weights.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
            return Err(Error::domain("space", "state weights must be positive"));
        }
        let total = compensated_sum(weights.iter().copied());
        Ok(weights.iter().map(|w| w / total).collect())
    }

    pub fn weights(&self) -> &Arc<[f64]> {
        &self.weights
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    fn same_space(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.weights, &other.weights) || self.weights == other.weights {
            Ok(())
        } else {
            Err(Error::domain(
                "combine",
                "variables live on different probability spaces",
            ))
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.same_space(other)?;
        let outcomes = self
            .outcomes
            .iter()
            .zip(&other.outcomes)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            weights: Arc::clone(&self.weights),
            outcomes,
        })
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// `λ X + (1 − λ) Y`.
    pub fn convex_combination(&self, other: &Self, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::domain(
                "convex_combination",
                format!("lambda={lambda} outside [0,1]"),
            ));
        }
        self.zip_with(other, |a, b| lambda * a + (1.0 - lambda) * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            weights: Arc::clone(&self.weights),
            outcomes: self.outcomes.iter().map(|o| c * o).collect(),
        }
    }

    pub fn shift(&self, c: f64) -> Self {
        Self {
            weights: Arc::clone(&self.weights),
            outcomes: self.outcomes.iter().map(|o| o + c).collect(),
        }
    }

    /// The law of the variable.
    pub fn distribution(&self) -> DiscreteDistribution {
        distribution_of(self)
    }
}

pub fn distribution_of(x: &FiniteRandomVariable) -> DiscreteDistribution {
    DiscreteDistribution::new(x.outcomes.iter().copied().zip(x.weights.iter().copied()))
        .expect("a validated random variable has a valid law")
}
