//! Finitely supported probability measures on a finite metric space, and
//! the functionals driving the relaxed filtrations: Frechet functions,
//! p-diameter, p-radius (intrinsic and ambient), the mixed invariant
//! `i_qp`, Euclidean means, and the closed forms on the unit sphere.

use std::sync::Arc;

use thiserror::Error;

use crate::metric::{Embedding, FiniteMetricSpace, MetricError, PointCloud};

/// Absolute slack accepted on a weight vector's sum before rejecting it;
/// anything closer to 1 than this is renormalized.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Unit-norm tolerance for the sphere closed forms.
pub const SPHERE_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("LengthMismatch: {got} weights for a space of {expected} points")]
    LengthMismatch { got: usize, expected: usize },
    #[error("NegativeWeight: w[{i}] = {value}")]
    NegativeWeight { i: usize, value: f64 },
    #[error("NotNormalized: weights sum to {sum}")]
    NotNormalized { sum: f64 },
    #[error("EmptySupport: all weights are zero")]
    EmptySupport,
    #[error("DimensionMismatch: cloud has {cloud} points, space has {space}")]
    DimensionMismatch { cloud: usize, space: usize },
    #[error("NotOnUnitSphere: point {i} has norm {norm}")]
    NotOnUnitSphere { i: usize, norm: f64 },
    #[error("InvalidExponent: p = {0}, exponents must satisfy p >= 1")]
    InvalidExponent(f64),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// An exponent in `[1, oo]`. Infinity is a tagged value, never a large
/// float, so the limit functionals use exact support formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PValue {
    Finite(f64),
    Infinite,
}

impl PValue {
    pub const INF: PValue = PValue::Infinite;

    pub fn finite(p: f64) -> Result<Self, MeasureError> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(MeasureError::InvalidExponent(p));
        }
        Ok(PValue::Finite(p))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PValue::Infinite)
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            PValue::Finite(p) => Some(*p),
            PValue::Infinite => None,
        }
    }

    /// Parses "inf"/"infinity" or a finite value >= 1.
    pub fn parse(text: &str) -> Result<Self, MeasureError> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(PValue::Infinite);
        }
        let p: f64 = t
            .parse()
            .map_err(|_| MeasureError::InvalidExponent(f64::NAN))?;
        PValue::finite(p)
    }
}

impl std::fmt::Display for PValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PValue::Finite(p) => write!(f, "{p}"),
            PValue::Infinite => write!(f, "inf"),
        }
    }
}

/// A finitely supported probability measure on a finite metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    space: Arc<FiniteMetricSpace>,
    w: Vec<f64>,
}

impl Measure {
    /// Validates weights: correct length, nonnegative, non-empty support,
    /// and a sum within [`WEIGHT_SUM_TOL`] of one (then renormalized).
    pub fn new(space: Arc<FiniteMetricSpace>, w: Vec<f64>) -> Result<Self, MeasureError> {
        if w.len() != space.len() {
            return Err(MeasureError::LengthMismatch { got: w.len(), expected: space.len() });
        }
        for (i, &wi) in w.iter().enumerate() {
            if wi < 0.0 {
                return Err(MeasureError::NegativeWeight { i, value: wi });
            }
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(MeasureError::NotNormalized { sum });
        }
        if sum <= 0.0 {
            return Err(MeasureError::EmptySupport);
        }
        let w = w.into_iter().map(|wi| wi / sum).collect();
        Ok(Measure { space, w })
    }

    /// The Dirac measure at point `i`.
    pub fn dirac(space: Arc<FiniteMetricSpace>, i: usize) -> Result<Self, MeasureError> {
        space.check_index(i)?;
        let mut w = vec![0.0; space.len()];
        w[i] = 1.0;
        Ok(Measure { space, w })
    }

    /// The uniform measure on all points.
    pub fn uniform(space: Arc<FiniteMetricSpace>) -> Self {
        let n = space.len();
        Measure { space, w: vec![1.0 / n as f64; n] }
    }

    /// The uniform measure on a subset of points.
    pub fn uniform_on(space: Arc<FiniteMetricSpace>, indices: &[usize]) -> Result<Self, MeasureError> {
        if indices.is_empty() {
            return Err(MeasureError::EmptySupport);
        }
        let mut w = vec![0.0; space.len()];
        for &i in indices {
            space.check_index(i)?;
            w[i] = 1.0 / indices.len() as f64;
        }
        Measure::new(space, w)
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Indices with strictly positive weight. Zero means absent: weights
    /// are caller-controlled, so no epsilon is applied.
    pub fn support(&self) -> Vec<usize> {
        (0..self.w.len()).filter(|&i| self.w[i] > 0.0).collect()
    }

    pub(crate) fn same_space(&self, other: &Measure) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space
    }
}

/// Convex combination `(1 - t) a + t b` of two measures on one space.
pub fn mix(a: &Measure, b: &Measure, t: f64) -> Measure {
    assert!(a.same_space(b) && (0.0..=1.0).contains(&t));
    let w = a
        .w
        .iter()
        .zip(&b.w)
        .map(|(x, y)| (1.0 - t) * x + t * y)
        .collect();
    Measure { space: a.space.clone(), w }
}

/// Convex combination of several measures on one space with the given
/// coefficients (nonnegative, summing to one).
pub fn mix_measures(coefficients: &[f64], measures: &[Measure]) -> Measure {
    assert!(!measures.is_empty() && coefficients.len() == measures.len());
    debug_assert!((coefficients.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    let space = measures[0].space.clone();
    let mut w = vec![0.0; space.len()];
    for (c, m) in coefficients.iter().zip(measures) {
        assert!(m.same_space(&measures[0]) && *c >= 0.0);
        for (acc, wi) in w.iter_mut().zip(&m.w) {
            *acc += c * wi;
        }
    }
    Measure { space, w }
}

/// Distance raised to the exponent, with fast paths for the small
/// integer exponents that dominate in practice.
#[inline]
pub(crate) fn dist_pow(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else if p == 3.0 {
        d * d * d
    } else {
        d.powf(p)
    }
}

/// The p-Frechet function of `alpha` evaluated at the point `center`:
/// the p-th moment of the distance to `center`, or the farthest support
/// point when p is infinite.
pub fn frechet(alpha: &Measure, p: PValue, center: usize) -> f64 {
    let space = alpha.space();
    debug_assert!(center < space.len());
    match p {
        PValue::Finite(p) => {
            let sum: f64 = alpha
                .w
                .iter()
                .enumerate()
                .filter(|&(_, &wi)| wi > 0.0)
                .map(|(i, &wi)| wi * dist_pow(space.dist(i, center), p))
                .sum();
            sum.powf(1.0 / p)
        }
        PValue::Infinite => alpha
            .support()
            .into_iter()
            .map(|i| space.dist(i, center))
            .fold(0.0, f64::max),
    }
}

/// The p-diameter: the double p-th moment of the distance under
/// `alpha x alpha`, or the diameter of the support when p is infinite.
pub fn diam_p(alpha: &Measure, p: PValue) -> f64 {
    let space = alpha.space();
    let support = alpha.support();
    match p {
        PValue::Finite(p) => {
            let mut sum = 0.0;
            for (a, &i) in support.iter().enumerate() {
                for &j in &support[a + 1..] {
                    sum += 2.0 * alpha.w[i] * alpha.w[j] * dist_pow(space.dist(i, j), p);
                }
            }
            sum.powf(1.0 / p)
        }
        PValue::Infinite => {
            let mut best = 0.0f64;
            for (a, &i) in support.iter().enumerate() {
                for &j in &support[a + 1..] {
                    best = best.max(space.dist(i, j));
                }
            }
            best
        }
    }
}

/// The p-radius: the smallest Frechet value over every point of the space
/// (not only the support). The minimum is taken on the p-th moments and
/// rooted once at the end.
pub fn rad_p(alpha: &Measure, p: PValue) -> f64 {
    let space = alpha.space();
    match p {
        PValue::Finite(p) => {
            let support = alpha.support();
            let best = (0..space.len())
                .map(|c| {
                    support
                        .iter()
                        .map(|&i| alpha.w[i] * dist_pow(space.dist(i, c), p))
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            best.powf(1.0 / p)
        }
        PValue::Infinite => (0..space.len())
            .map(|c| frechet(alpha, PValue::Infinite, c))
            .fold(f64::INFINITY, f64::min),
    }
}

/// The ambient p-radius: Frechet centers range over the ambient space the
/// measure's space embeds into.
pub fn rad_p_ambient(alpha: &Measure, emb: &Embedding, p: PValue) -> Result<f64, MeasureError> {
    if !(Arc::ptr_eq(alpha.space(), emb.sub()) || **alpha.space() == **emb.sub()) {
        return Err(MetricError::EmbeddingMismatch(
            "measure lives on a different space than the embedded one".into(),
        )
        .into());
    }
    let ambient = emb.ambient();
    let map = emb.map();
    let support = alpha.support();
    let best = (0..ambient.len())
        .map(|c| match p {
            PValue::Finite(p) => {
                let sum: f64 = support
                    .iter()
                    .map(|&i| alpha.w[i] * dist_pow(ambient.dist(map[i], c), p))
                    .sum();
                sum.powf(1.0 / p)
            }
            PValue::Infinite => support
                .iter()
                .map(|&i| ambient.dist(map[i], c))
                .fold(0.0, f64::max),
        })
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

/// The mixed invariant: the p-th moment, under `alpha`, of the
/// q-Wasserstein distance from `alpha` to the Diracs at its own points.
/// Computed through the closed form `d_{W,q}(alpha, delta_x) = F_{alpha,q}(x)`.
pub fn i_qp(alpha: &Measure, q: PValue, p: PValue) -> f64 {
    let support = alpha.support();
    match p {
        PValue::Finite(p) => {
            let sum: f64 = support
                .iter()
                .map(|&x| alpha.w[x] * dist_pow(frechet(alpha, q, x), p))
                .sum();
            sum.powf(1.0 / p)
        }
        PValue::Infinite => support
            .iter()
            .map(|&x| frechet(alpha, q, x))
            .fold(0.0, f64::max),
    }
}

/// Weighted average of the cloud's coordinates under the measure.
pub fn euclidean_mean(alpha: &Measure, pc: &PointCloud) -> Result<Vec<f64>, MeasureError> {
    if pc.len() != alpha.space().len() {
        return Err(MeasureError::DimensionMismatch {
            cloud: pc.len(),
            space: alpha.space().len(),
        });
    }
    let mut mean = vec![0.0; pc.dim()];
    for i in alpha.support() {
        for (m, x) in mean.iter_mut().zip(pc.point(i)) {
            *m += alpha.w[i] * x;
        }
    }
    Ok(mean)
}

fn require_unit_sphere(pc: &PointCloud) -> Result<(), MeasureError> {
    for i in 0..pc.len() {
        let norm: f64 = pc.point(i).iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > SPHERE_NORM_TOL {
            return Err(MeasureError::NotOnUnitSphere { i, norm });
        }
    }
    Ok(())
}

/// Closed form for the 2-diameter of a measure on the unit sphere:
/// `sqrt(2 - 2 |m(alpha)|^2)`.
pub fn sphere_diam2_closed_form(alpha: &Measure, pc: &PointCloud) -> Result<f64, MeasureError> {
    require_unit_sphere(pc)?;
    let m = euclidean_mean(alpha, pc)?;
    let norm_sq: f64 = m.iter().map(|x| x * x).sum();
    Ok((2.0 - 2.0 * norm_sq).max(0.0).sqrt())
}

/// Closed form for the 2-radius of a measure on the unit sphere:
/// `sqrt(2 - 2 |m(alpha)|)`. The infimum here ranges over the whole
/// sphere, so this is a lower bound for the sampled `rad_p` at p = 2.
pub fn sphere_rad2_closed_form(alpha: &Measure, pc: &PointCloud) -> Result<f64, MeasureError> {
    require_unit_sphere(pc)?;
    let m = euclidean_mean(alpha, pc)?;
    let norm: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok((2.0 - 2.0 * norm).max(0.0).sqrt())
}
