//! Per-simplex filtration values for the relaxed complexes and their
//! assembly into a filtered complex.
//!
//! The Cech value of a face is the exact optimum of a small linear
//! program: maximize the smallest weighted p-th distance moment over the
//! probability simplex on the face, where candidate centers range over
//! every point of the space (not only the face). The Vietoris-Rips value
//! is the exact maximum of the distance-power quadratic form over the same
//! simplex, found by enumerating support subsets and solving each
//! stationarity system. Stored values are the r-scale (after the 1/p
//! root), so diagrams across different p are directly comparable.

use std::collections::HashMap;
use std::sync::Arc;

use num::rational::BigRational;
use num::traits::Pow;
use rayon::prelude::*;
use thiserror::Error;

use crate::measure::PValue;
use crate::metric::{Embedding, FiniteMetricSpace, MetricError};
use crate::solver::linalg::solve_square;
use crate::solver::lp::max_min_over_simplex;
use crate::solver::Scalar;

/// Cap on face size for the exact Vietoris-Rips maximization; the subset
/// enumeration behind it is exponential in the face size.
pub const QP_EXACT_CAP: usize = 16;

/// Slack allowed when clamping float-level face-monotonicity inversions;
/// anything larger is reported as a real violation.
const MONOTONE_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiltrationError {
    #[error("EmptySimplex: a simplex needs at least one vertex")]
    EmptySimplex,
    #[error("DuplicateVertex: vertex {0} repeated")]
    DuplicateVertex(usize),
    #[error("FaceTooLarge({0}): exact maximization is capped at {QP_EXACT_CAP} vertices")]
    FaceTooLarge(usize),
    #[error("InvalidMaxDim: max_dim {max_dim} exceeds n - 1 = {limit}")]
    InvalidMaxDim { max_dim: usize, limit: usize },
    #[error("NonMonotoneComplex: face {face:?} has value {face_value} above {value} of its coface")]
    NonMonotoneComplex { face: Vec<usize>, face_value: f64, value: f64 },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A simplex as a strictly increasing list of point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    pub fn new(mut vertices: Vec<usize>) -> Result<Self, FiltrationError> {
        if vertices.is_empty() {
            return Err(FiltrationError::EmptySimplex);
        }
        vertices.sort_unstable();
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(FiltrationError::DuplicateVertex(w[0]));
            }
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Codimension-one faces, each obtained by dropping one vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        (0..self.vertices.len()).filter(|_| self.vertices.len() > 1).map(move |skip| {
            let vertices = self
                .vertices
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != skip)
                .map(|(_, &v)| v)
                .collect();
            Simplex { vertices }
        })
    }
}

/// How trustworthy the diagram of a complex is as a stand-in for the
/// metric thickening it discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fidelity {
    /// The complex provably has the thickening's persistent homology.
    Faithful,
    /// Skeleton filtration for Vietoris-Rips at finite p: degree-0 output
    /// and the uniform-distance family are proven matches, the rest is
    /// conjectural.
    Conjectural,
}

/// All simplices up to a dimension cap with their filtration values,
/// monotone under face inclusion and sorted by (value, dimension,
/// lexicographic vertices).
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    space: Arc<FiniteMetricSpace>,
    max_dim: usize,
    entries: Vec<(Simplex, f64)>,
    fidelity: Fidelity,
}

impl FilteredComplex {
    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn entries(&self) -> &[(Simplex, f64)] {
        &self.entries
    }

    pub fn fidelity(&self) -> Fidelity {
        self.fidelity
    }

    pub fn value_of(&self, simplex: &Simplex) -> Option<f64> {
        self.entries
            .iter()
            .find(|(s, _)| s == simplex)
            .map(|&(_, v)| v)
    }

    /// Builds a complex directly from per-simplex values (already monotone).
    pub fn from_entries(
        space: Arc<FiniteMetricSpace>,
        max_dim: usize,
        mut entries: Vec<(Simplex, f64)>,
        fidelity: Fidelity,
    ) -> Self {
        sort_entries(&mut entries);
        FilteredComplex { space, max_dim, entries, fidelity }
    }
}

fn sort_entries(entries: &mut [(Simplex, f64)]) {
    entries.sort_by(|(sa, va), (sb, vb)| {
        va.partial_cmp(vb)
            .unwrap()
            .then(sa.dim().cmp(&sb.dim()))
            .then(sa.vertices.cmp(&sb.vertices))
    });
}

/// Which filtration a complex discretizes.
#[derive(Debug, Clone)]
pub enum BuildKind {
    /// Sublevel sets of the p-diameter.
    VietorisRips,
    /// Sublevel sets of the p-radius, centers inside the space.
    Cech,
    /// Sublevel sets of the p-radius with centers in an ambient space.
    AmbientCech(Embedding),
}

/// Which classical (p = infinity) complex a value refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalKind {
    VrInf,
    CechInf,
}

/// The p-Cech filtration value of a face: the p-th root of the maximum,
/// over the probability simplex on the face, of the smallest weighted p-th
/// distance moment to any point of the space.
pub fn cech_value(space: &FiniteMetricSpace, simplex: &Simplex, p: PValue) -> f64 {
    cech_value_against(space, simplex, p, None)
}

/// Same linear program as [`cech_value`] but with candidate centers
/// ranging over every point of the ambient space.
pub fn ambient_cech_value(emb: &Embedding, simplex: &Simplex, p: PValue) -> f64 {
    cech_value_against(emb.sub(), simplex, p, Some(emb))
}

fn cech_value_against(
    space: &FiniteMetricSpace,
    simplex: &Simplex,
    p: PValue,
    emb: Option<&Embedding>,
) -> f64 {
    let verts = simplex.vertices();
    let dist = |i: usize, c: usize| -> f64 {
        match emb {
            Some(e) => e.ambient().dist(e.map()[i], c),
            None => space.dist(i, c),
        }
    };
    let centers = match emb {
        Some(e) => e.ambient().len(),
        None => space.len(),
    };
    match p {
        PValue::Finite(p) => {
            if verts.len() == 1 {
                return 0.0;
            }
            let payoff: Vec<Vec<f64>> = verts
                .iter()
                .map(|&i| (0..centers).map(|c| dist(i, c).powf(p)).collect())
                .collect();
            max_min_over_simplex(&payoff).value.powf(1.0 / p)
        }
        PValue::Infinite => (0..centers)
            .map(|c| verts.iter().map(|&i| dist(i, c)).fold(0.0f64, f64::max))
            .fold(f64::INFINITY, f64::min),
    }
}

/// The p-Vietoris-Rips filtration value of a face: the p-th root of the
/// maximum of `sum a_i a_j d(i,j)^p` over the probability simplex on the
/// face. The maximum sits either at a vertex or at a stationary point of
/// the quadratic restricted to the interior of some subface, so
/// enumerating the stationarity systems of all support subsets is exact.
pub fn vr_value(
    space: &FiniteMetricSpace,
    simplex: &Simplex,
    p: PValue,
) -> Result<f64, FiltrationError> {
    let verts = simplex.vertices();
    match p {
        PValue::Finite(p) => {
            if verts.len() > QP_EXACT_CAP {
                return Err(FiltrationError::FaceTooLarge(verts.len()));
            }
            if verts.len() == 1 {
                return Ok(0.0);
            }
            let m = verts.len();
            let mut powers = vec![vec![0.0f64; m]; m];
            for a in 0..m {
                for b in a + 1..m {
                    let v = space.dist(verts[a], verts[b]).powf(p);
                    powers[a][b] = v;
                    powers[b][a] = v;
                }
            }
            Ok(max_quadratic_over_simplex(&powers, 1e-9).powf(1.0 / p))
        }
        PValue::Infinite => {
            let mut best = 0.0f64;
            for a in 0..verts.len() {
                for b in a + 1..verts.len() {
                    best = best.max(space.dist(verts[a], verts[b]));
                }
            }
            Ok(best)
        }
    }
}

/// Maximizes `a^T Q a` over the probability simplex for a symmetric
/// zero-diagonal matrix, by solving the stationarity system of every
/// support subset. Singular systems are skipped: along their kernel the
/// form is affine, so the same value reappears on a boundary subface.
fn max_quadratic_over_simplex<S: Scalar>(q: &[Vec<S>], feas_tol: f64) -> S {
    let m = q.len();
    let mut best = S::zero(); // vertices attain zero
    for mask in 1u32..(1 << m) {
        let support: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        let k = support.len();
        if k < 2 {
            continue;
        }
        // Unknowns: the k weights then lambda; rows: stationarity, then
        // the normalization sum.
        let mut a = vec![vec![S::zero(); k + 1]; k + 1];
        let mut b = vec![S::zero(); k + 1];
        for (r, &i) in support.iter().enumerate() {
            for (c, &j) in support.iter().enumerate() {
                a[r][c] = q[i][j].clone() + q[i][j].clone();
            }
            a[r][k] = -S::one();
        }
        for c in 0..k {
            a[k][c] = S::one();
        }
        b[k] = S::one();

        let Some(x) = solve_square(a, b) else { continue };
        let neg = S::from_f64(-feas_tol);
        if x[..k].iter().any(|ai| *ai < neg) {
            continue;
        }
        let mut value = S::zero();
        for (r, &i) in support.iter().enumerate() {
            for (c, &j) in support.iter().enumerate() {
                value = value + x[r].clone() * x[c].clone() * q[i][j].clone();
            }
        }
        if value > best {
            best = value;
        }
    }
    best
}

/// Filtration value under the classical simplicial-complex conventions:
/// the largest pairwise distance for Vietoris-Rips, the intrinsic Cech
/// radius (best center among the points themselves) for Cech.
pub fn classical_value(space: &FiniteMetricSpace, simplex: &Simplex, kind: ClassicalKind) -> f64 {
    let verts = simplex.vertices();
    match kind {
        ClassicalKind::VrInf => {
            let mut best = 0.0f64;
            for a in 0..verts.len() {
                for b in a + 1..verts.len() {
                    best = best.max(space.dist(verts[a], verts[b]));
                }
            }
            best
        }
        ClassicalKind::CechInf => (0..space.len())
            .map(|c| verts.iter().map(|&i| space.dist(i, c)).fold(0.0f64, f64::max))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Builds the filtered complex of all simplices up to `max_dim` with values
/// from the requested filtration. Per-simplex values are computed in
/// parallel; the result is sorted into the canonical (value, dimension,
/// lexicographic) order and face monotonicity is verified, with
/// float-level inversions clamped to the facet maximum.
pub fn build_complex(
    space: &Arc<FiniteMetricSpace>,
    p: PValue,
    kind: &BuildKind,
    max_dim: usize,
) -> Result<FilteredComplex, FiltrationError> {
    let n = space.len();
    if max_dim + 1 > n {
        return Err(FiltrationError::InvalidMaxDim { max_dim, limit: n - 1 });
    }
    if let (BuildKind::VietorisRips, PValue::Finite(_)) = (kind, p) {
        if max_dim + 1 > QP_EXACT_CAP {
            return Err(FiltrationError::FaceTooLarge(max_dim + 1));
        }
    }
    if let BuildKind::AmbientCech(emb) = kind {
        if !(Arc::ptr_eq(emb.sub(), space) || **emb.sub() == **space) {
            return Err(MetricError::EmbeddingMismatch(
                "embedding describes a different subspace".into(),
            )
            .into());
        }
    }

    let simplices: Vec<Simplex> = (1..=max_dim + 1)
        .flat_map(|k| combinations(n, k))
        .map(|vertices| Simplex { vertices })
        .collect();

    let values: Result<Vec<f64>, FiltrationError> = simplices
        .par_iter()
        .map(|s| match kind {
            BuildKind::VietorisRips => vr_value(space, s, p),
            BuildKind::Cech => Ok(cech_value(space, s, p)),
            BuildKind::AmbientCech(emb) => Ok(ambient_cech_value(emb, s, p)),
        })
        .collect();
    let values = values?;

    let mut entries: Vec<(Simplex, f64)> = simplices.into_iter().zip(values).collect();
    entries.sort_by(|(sa, _), (sb, _)| sa.dim().cmp(&sb.dim()).then(sa.vertices.cmp(&sb.vertices)));

    // Monotonicity holds mathematically (a subface maximizes the same
    // functional over a subset); repair float-level inversions and reject
    // anything beyond tolerance as a solver bug.
    let scale = space.diam().max(1.0);
    let mut value_by_face: HashMap<Vec<usize>, f64> = HashMap::with_capacity(entries.len());
    for (simplex, value) in entries.iter_mut() {
        let mut floor = 0.0f64;
        let mut worst_face: Option<Vec<usize>> = None;
        for facet in simplex.facets() {
            let fv = value_by_face[facet.vertices()];
            if fv > floor {
                floor = fv;
                worst_face = Some(facet.vertices().to_vec());
            }
        }
        if floor > *value {
            if floor - *value > MONOTONE_TOL * scale {
                return Err(FiltrationError::NonMonotoneComplex {
                    face: worst_face.unwrap_or_default(),
                    face_value: floor,
                    value: *value,
                });
            }
            *value = floor;
        }
        value_by_face.insert(simplex.vertices().to_vec(), *value);
    }

    sort_entries(&mut entries);
    let fidelity = match (kind, p) {
        (BuildKind::VietorisRips, PValue::Finite(_)) => Fidelity::Conjectural,
        _ => Fidelity::Faithful,
    };
    Ok(FilteredComplex { space: space.clone(), max_dim, entries, fidelity })
}

/// Builds the classical simplicial-complex filtration directly from
/// [`classical_value`], independent of the generic p = infinity paths.
pub fn build_classical_complex(
    space: &Arc<FiniteMetricSpace>,
    kind: ClassicalKind,
    max_dim: usize,
) -> Result<FilteredComplex, FiltrationError> {
    let n = space.len();
    if max_dim + 1 > n {
        return Err(FiltrationError::InvalidMaxDim { max_dim, limit: n - 1 });
    }
    let entries: Vec<(Simplex, f64)> = (1..=max_dim + 1)
        .flat_map(|k| combinations(n, k))
        .map(|vertices| {
            let simplex = Simplex { vertices };
            let value = classical_value(space, &simplex, kind);
            (simplex, value)
        })
        .collect();
    Ok(FilteredComplex::from_entries(
        space.clone(),
        max_dim,
        entries,
        Fidelity::Faithful,
    ))
}

/// All k-subsets of 0..n in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Exact rational filtration values for integer exponents, used by tests
/// to certify the float path. The returned rational is the optimum of the
/// p-th power of the functional (the root itself is irrational).
pub mod exact {
    use super::*;

    fn rational_powers(space: &FiniteMetricSpace, verts: &[usize], p: u32) -> Vec<Vec<BigRational>> {
        verts
            .iter()
            .map(|&i| {
                verts
                    .iter()
                    .map(|&j| BigRational::from_float(space.dist(i, j)).unwrap().pow(p))
                    .collect()
            })
            .collect()
    }

    /// Exact `cech_value^p` for integer p.
    pub fn cech_value_pow(space: &FiniteMetricSpace, simplex: &Simplex, p: u32) -> BigRational {
        let verts = simplex.vertices();
        if verts.len() == 1 {
            return Scalar::zero();
        }
        let payoff: Vec<Vec<BigRational>> = verts
            .iter()
            .map(|&i| {
                (0..space.len())
                    .map(|c| BigRational::from_float(space.dist(i, c)).unwrap().pow(p))
                    .collect()
            })
            .collect();
        max_min_over_simplex(&payoff).value
    }

    /// Exact `vr_value^p` for integer p.
    pub fn vr_value_pow(
        space: &FiniteMetricSpace,
        simplex: &Simplex,
        p: u32,
    ) -> Result<BigRational, FiltrationError> {
        let verts = simplex.vertices();
        if verts.len() > QP_EXACT_CAP {
            return Err(FiltrationError::FaceTooLarge(verts.len()));
        }
        if verts.len() == 1 {
            return Ok(Scalar::zero());
        }
        let powers = rational_powers(space, verts, p);
        Ok(super::max_quadratic_over_simplex(&powers, 0.0))
    }

}
