//! Ground metric spaces: validated distance matrices, Euclidean point
//! clouds and samplers, greedy nets, Hausdorff and Gromov-Hausdorff upper
//! bounds, and the metric spread.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Relative tolerance for metric-axiom validation. Distance matrices are
/// user data and often carry rounding noise; strict validation would
/// reject legitimate inputs.
pub const METRIC_TOL: f64 = 1e-9;

/// Point count up to which `metric_spread` guarantees the exact infimum.
/// Subset enumeration is exponential; above the cap the search is
/// truncated and the result flagged approximate.
pub const SPREAD_EXACT_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("NotSquare: expected {n} columns, row {row} has {len}")]
    NotSquare { n: usize, row: usize, len: usize },
    #[error("AsymmetricMatrix: d[{i}][{j}] = {a} but d[{j}][{i}] = {b}")]
    AsymmetricMatrix { i: usize, j: usize, a: f64, b: f64 },
    #[error("NonzeroDiagonal: d[{i}][{i}] = {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("NegativeDistance: d[{i}][{j}] = {value}")]
    NegativeDistance { i: usize, j: usize, value: f64 },
    #[error("ZeroOffDiagonal: d[{i}][{j}] = 0, points must be distinct")]
    ZeroOffDiagonal { i: usize, j: usize },
    #[error("TriangleViolation({i},{j},{k}): d[{i}][{j}] > d[{i}][{k}] + d[{k}][{j}]")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("EmptyInput: at least one point is required")]
    EmptyInput,
    #[error("EmptySubset: a non-empty index subset is required")]
    EmptySubset,
    #[error("IndexOutOfRange: index {index} not below point count {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("DimensionMismatch: point {row} has dimension {len}, expected {dim}")]
    DimensionMismatch { row: usize, len: usize, dim: usize },
    #[error("EmbeddingMismatch: {0}")]
    EmbeddingMismatch(String),
}

/// A finite metric space, stored as a validated symmetric distance matrix.
///
/// Instances are immutable after construction and safe to share across
/// threads; every operation on them is a pure function.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    d: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    /// Validates a square matrix as a metric: zero diagonal, symmetry,
    /// positive off-diagonal entries, and the triangle inequality within
    /// [`METRIC_TOL`] relative tolerance.
    pub fn from_distance_matrix(rows: Vec<Vec<f64>>) -> Result<Arc<Self>, MetricError> {
        let n = rows.len();
        if n == 0 {
            return Err(MetricError::EmptyInput);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare { n, row, len: r.len() });
            }
        }
        let scale = rows
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |acc, &x| acc.max(x.abs()));
        let tol = METRIC_TOL * scale.max(1.0);

        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            if rows[i][i].abs() > tol {
                return Err(MetricError::NonzeroDiagonal { i, value: rows[i][i] });
            }
            for j in i + 1..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if (a - b).abs() > tol {
                    return Err(MetricError::AsymmetricMatrix { i, j, a, b });
                }
                let v = 0.5 * (a + b);
                if v < 0.0 {
                    return Err(MetricError::NegativeDistance { i, j, value: v });
                }
                if v <= 0.0 {
                    return Err(MetricError::ZeroOffDiagonal { i, j });
                }
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if d[i][j] > d[i][k] + d[k][j] + tol {
                        return Err(MetricError::TriangleViolation { i, j, k });
                    }
                }
            }
        }
        Ok(Arc::new(FiniteMetricSpace { n, d }))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i][j]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.d
    }

    /// Largest pairwise distance.
    pub fn diam(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.n {
            for j in i + 1..self.n {
                best = best.max(self.d[i][j]);
            }
        }
        best
    }

    /// Radius with candidate centers restricted to the points themselves:
    /// `min_x max_y d(x, y)`.
    pub fn rad(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.d[i][j])
                    .fold(0.0f64, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// The space on `n` points with all interpoint distances equal to one.
    pub fn uniform_unit(n: usize) -> Arc<Self> {
        assert!(n >= 1);
        let mut d = vec![vec![1.0; n]; n];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        Arc::new(FiniteMetricSpace { n, d })
    }

    /// Restriction of the metric to a subset of distinct points, in the
    /// order given.
    pub fn restrict(&self, indices: &[usize]) -> Result<Arc<Self>, MetricError> {
        if indices.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        let mut seen = vec![false; self.n];
        for &i in indices {
            self.check_index(i)?;
            if seen[i] {
                return Err(MetricError::ZeroOffDiagonal { i, j: i });
            }
            seen[i] = true;
        }
        let k = indices.len();
        let mut d = vec![vec![0.0; k]; k];
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                d[a][b] = self.d[i][j];
            }
        }
        Ok(Arc::new(FiniteMetricSpace { n: k, d }))
    }

    /// Relabels points by a permutation: point `i` of the result is point
    /// `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Arc<Self>, MetricError> {
        if perm.len() != self.n {
            return Err(MetricError::EmbeddingMismatch(format!(
                "permutation has length {}, space has {} points",
                perm.len(),
                self.n
            )));
        }
        self.restrict(perm)
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<(), MetricError> {
        if i >= self.n {
            Err(MetricError::IndexOutOfRange { index: i, n: self.n })
        } else {
            Ok(())
        }
    }
}

/// An ordered list of points in a common Euclidean space.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        if points.is_empty() {
            return Err(MetricError::EmptyInput);
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(MetricError::DimensionMismatch { row: 0, len: 0, dim: 1 });
        }
        for (row, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(MetricError::DimensionMismatch { row, len: p.len(), dim });
            }
        }
        Ok(PointCloud { points, dim })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }
}

pub fn euclidean_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Pairwise Euclidean distances of a point cloud as a metric space.
pub fn euclidean_metric(pc: &PointCloud) -> Result<Arc<FiniteMetricSpace>, MetricError> {
    let n = pc.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = euclidean_dist(pc.point(i), pc.point(j));
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    FiniteMetricSpace::from_distance_matrix(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    /// Deterministic lattice; on the circle this is the regular
    /// `count`-gon, so the Hausdorff distance to the continuum is known in
    /// closed form.
    Grid,
    /// Uniform points, reproducible from the seed.
    SeededUniform,
}

/// Unit-norm samples on the sphere `S^{n_dim}` in `R^{n_dim + 1}`.
///
/// Both modes are fully deterministic for fixed arguments.
pub fn sample_sphere(n_dim: usize, count: usize, mode: SampleMode, seed: u64) -> PointCloud {
    assert!(n_dim >= 1, "sphere dimension must be at least 1");
    assert!(count >= n_dim + 2, "need at least n_dim + 2 samples");
    let points = match mode {
        SampleMode::Grid => match n_dim {
            1 => (0..count)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect(),
            2 => fibonacci_sphere(count),
            // No closed-form lattice in higher dimensions; fall back to a
            // seed-independent deterministic sample.
            _ => gaussian_sphere(n_dim, count, 0x5eed),
        },
        SampleMode::SeededUniform => gaussian_sphere(n_dim, count, seed),
    };
    PointCloud::new(points).expect("sampler produces a valid cloud")
}

fn fibonacci_sphere(count: usize) -> Vec<Vec<f64>> {
    let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
    (0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = 2.0 * std::f64::consts::PI * (k as f64 / golden).fract();
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

fn gaussian_sphere(n_dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let v: Vec<f64> = (0..n_dim + 1)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-9 {
                return v.into_iter().map(|x| x / norm).collect();
            }
        })
        .collect()
}

/// Regular `count`-gon on the circle of circumference 2*pi with arc-length
/// distances.
pub fn geodesic_circle_metric(count: usize) -> Arc<FiniteMetricSpace> {
    assert!(count >= 3, "need at least 3 points on the circle");
    let step = 2.0 * std::f64::consts::PI / count as f64;
    let mut d = vec![vec![0.0; count]; count];
    for i in 0..count {
        for j in i + 1..count {
            let gap = (j - i).min(count - (j - i));
            let v = gap as f64 * step;
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    Arc::new(FiniteMetricSpace { n: count, d })
}

/// Greedy farthest-point net: every point of `space` ends up within
/// strictly less than `eps` of the returned subset. Ties break toward the
/// lowest index, so the result is deterministic.
pub fn epsilon_net(space: &FiniteMetricSpace, eps: f64) -> Vec<usize> {
    assert!(eps > 0.0, "net radius must be positive");
    let n = space.len();
    let mut net = vec![0usize];
    let mut dist_to_net: Vec<f64> = (0..n).map(|i| space.dist(i, 0)).collect();
    loop {
        let mut far = 0usize;
        for i in 1..n {
            if dist_to_net[i] > dist_to_net[far] {
                far = i;
            }
        }
        if dist_to_net[far] < eps {
            return net;
        }
        net.push(far);
        for i in 0..n {
            dist_to_net[i] = dist_to_net[i].min(space.dist(i, far));
        }
    }
}

/// One-sided Hausdorff distance from the whole space to the subset:
/// `max_x min_{u in subset} d(x, u)`.
pub fn hausdorff_subset(space: &FiniteMetricSpace, subset: &[usize]) -> Result<f64, MetricError> {
    if subset.is_empty() {
        return Err(MetricError::EmptySubset);
    }
    for &u in subset {
        space.check_index(u)?;
    }
    let mut worst = 0.0f64;
    for x in 0..space.len() {
        let nearest = subset
            .iter()
            .map(|&u| space.dist(x, u))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    Ok(worst)
}

/// A pair of total maps between the index sets of two spaces, used to
/// certify Gromov-Hausdorff upper bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    pub phi: Vec<usize>,
    pub psi: Vec<usize>,
}

impl Correspondence {
    pub fn new(phi: Vec<usize>, psi: Vec<usize>) -> Self {
        Correspondence { phi, psi }
    }

    /// The identity correspondence between two spaces of equal size.
    pub fn identity(n: usize) -> Self {
        Correspondence { phi: (0..n).collect(), psi: (0..n).collect() }
    }
}

/// Distortion of a map `f` between spaces: the largest change in any
/// pairwise distance.
pub fn distortion(
    from: &FiniteMetricSpace,
    to: &FiniteMetricSpace,
    f: &[usize],
) -> Result<f64, MetricError> {
    if f.len() != from.len() {
        return Err(MetricError::EmbeddingMismatch(format!(
            "map has length {}, domain has {} points",
            f.len(),
            from.len()
        )));
    }
    for &y in f {
        to.check_index(y)?;
    }
    let mut worst = 0.0f64;
    for i in 0..from.len() {
        for j in i + 1..from.len() {
            worst = worst.max((from.dist(i, j) - to.dist(f[i], f[j])).abs());
        }
    }
    Ok(worst)
}

/// Certified Gromov-Hausdorff upper bound from a correspondence:
/// half the max of the two distortions and the codistortion.
pub fn gh_upper_bound(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    c: &Correspondence,
) -> Result<f64, MetricError> {
    let dis_phi = distortion(x, y, &c.phi)?;
    let dis_psi = distortion(y, x, &c.psi)?;
    let mut codis = 0.0f64;
    for i in 0..x.len() {
        for j in 0..y.len() {
            codis = codis.max((x.dist(i, c.psi[j]) - y.dist(c.phi[i], j)).abs());
        }
    }
    Ok(0.5 * dis_phi.max(dis_psi).max(codis))
}

/// Result of a spread computation; `exact` is false when the subset search
/// was truncated at [`SPREAD_EXACT_CAP`] points and the value is only a
/// certified upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub value: f64,
    pub exact: bool,
}

/// Metric spread: `inf_U max(d_H(U, X), diam(U))` over non-empty subsets.
///
/// For spaces within the cap the infimum is exact, found by a depth-first
/// subset search pruned on the running diameter (the diameter only grows
/// as a subset gains points, while the Hausdorff term only shrinks).
pub fn metric_spread(space: &FiniteMetricSpace) -> Spread {
    let n = space.len();
    // Any singleton gives the eccentricity bound, so start from the radius.
    let mut best = space.rad();
    if n > SPREAD_EXACT_CAP {
        // Truncated search: singletons plus greedy nets at each candidate
        // radius still certify an upper bound.
        let mut radii: Vec<f64> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| space.dist(i, j)))
            .collect();
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        radii.dedup();
        for r in radii {
            let net = epsilon_net(space, r);
            let sub = hausdorff_subset(space, &net).expect("net is non-empty");
            let diam = max_pairwise(space, &net);
            best = best.min(sub.max(diam));
        }
        return Spread { value: best, exact: false };
    }

    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut min_dist = vec![f64::INFINITY; n];
    search_spread(space, 0, &mut chosen, 0.0, &mut min_dist, &mut best);
    Spread { value: best, exact: true }
}

fn max_pairwise(space: &FiniteMetricSpace, subset: &[usize]) -> f64 {
    let mut worst = 0.0f64;
    for (a, &i) in subset.iter().enumerate() {
        for &j in &subset[a + 1..] {
            worst = worst.max(space.dist(i, j));
        }
    }
    worst
}

fn search_spread(
    space: &FiniteMetricSpace,
    next: usize,
    chosen: &mut Vec<usize>,
    diam: f64,
    min_dist: &mut [f64],
    best: &mut f64,
) {
    if !chosen.is_empty() {
        let hausdorff = min_dist.iter().copied().fold(0.0f64, f64::max);
        *best = best.min(hausdorff.max(diam));
    }
    if next == space.len() || diam >= *best {
        return;
    }

    // Exclude `next`.
    search_spread(space, next + 1, chosen, diam, min_dist, best);

    // Include `next`: diameter can only grow, distances to the subset only
    // shrink; prune as soon as the diameter alone exceeds the incumbent.
    let mut new_diam = diam;
    for &c in chosen.iter() {
        new_diam = new_diam.max(space.dist(c, next));
    }
    if new_diam >= *best {
        return;
    }
    let saved: Vec<f64> = min_dist.to_vec();
    for i in 0..space.len() {
        min_dist[i] = min_dist[i].min(space.dist(i, next));
    }
    chosen.push(next);
    search_spread(space, next + 1, chosen, new_diam, min_dist, best);
    chosen.pop();
    min_dist.copy_from_slice(&saved);
}

/// A subspace embedded in an ambient space: point `i` of `sub` is point
/// `map[i]` of `ambient`, with matching distances (validated).
#[derive(Debug, Clone)]
pub struct Embedding {
    sub: Arc<FiniteMetricSpace>,
    ambient: Arc<FiniteMetricSpace>,
    map: Vec<usize>,
}

impl Embedding {
    pub fn new(
        sub: Arc<FiniteMetricSpace>,
        ambient: Arc<FiniteMetricSpace>,
        map: Vec<usize>,
    ) -> Result<Self, MetricError> {
        if map.len() != sub.len() {
            return Err(MetricError::EmbeddingMismatch(format!(
                "index map has length {}, subspace has {} points",
                map.len(),
                sub.len()
            )));
        }
        let mut seen = vec![false; ambient.len()];
        for &m in &map {
            ambient.check_index(m)?;
            if seen[m] {
                return Err(MetricError::EmbeddingMismatch(format!(
                    "ambient index {m} used twice"
                )));
            }
            seen[m] = true;
        }
        let tol = METRIC_TOL * ambient.diam().max(1.0);
        for i in 0..sub.len() {
            for j in i + 1..sub.len() {
                let a = sub.dist(i, j);
                let b = ambient.dist(map[i], map[j]);
                if (a - b).abs() > tol {
                    return Err(MetricError::EmbeddingMismatch(format!(
                        "d_sub({i},{j}) = {a} but d_ambient = {b}"
                    )));
                }
            }
        }
        Ok(Embedding { sub, ambient, map })
    }

    /// Embeds a space into an ambient space as its first `sub.len()` points.
    pub fn prefix(
        sub: Arc<FiniteMetricSpace>,
        ambient: Arc<FiniteMetricSpace>,
    ) -> Result<Self, MetricError> {
        let map = (0..sub.len()).collect();
        Embedding::new(sub, ambient, map)
    }

    pub fn sub(&self) -> &Arc<FiniteMetricSpace> {
        &self.sub
    }

    pub fn ambient(&self) -> &Arc<FiniteMetricSpace> {
        &self.ambient
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }
}
