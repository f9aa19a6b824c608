//! Exact optimal transport between finitely supported measures on a common
//! finite metric space, and the net-projection map that redistributes mass
//! onto a net through a subordinate partition of unity.

use thiserror::Error;

use crate::measure::{Measure, PValue};
use crate::metric::hausdorff_subset;
use crate::solver::transport_simplex::solve_transportation;

/// Marginal tolerance a returned plan is validated against.
pub const PLAN_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransportError {
    #[error("SpaceMismatch: measures live on different spaces")]
    SpaceMismatch,
    #[error("NotANet: subset has Hausdorff distance {hausdorff} >= delta = {delta}")]
    NotANet { hausdorff: f64, delta: f64 },
}

/// A coupling between two measures on the same `n`-point space, witnessing
/// a Wasserstein value. Rows are the source marginal, columns the target.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    mu: Vec<Vec<f64>>,
}

impl TransportPlan {
    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.mu
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    /// Transport cost of this plan against exponentiated distances.
    pub fn cost(&self, alpha: &Measure, q: f64) -> f64 {
        let space = alpha.space();
        let mut total = 0.0;
        for (i, row) in self.mu.iter().enumerate() {
            for (j, &m) in row.iter().enumerate() {
                if m > 0.0 {
                    total += m * space.dist(i, j).powf(q);
                }
            }
        }
        total
    }

    /// Checks the coupling conditions: entries nonnegative, row sums equal
    /// the source weights and column sums the target weights within
    /// [`PLAN_TOL`].
    pub fn validate(&self, alpha: &Measure, beta: &Measure) -> bool {
        let n = self.mu.len();
        if alpha.weights().len() != n || beta.weights().len() != n {
            return false;
        }
        for row in &self.mu {
            if row.len() != n || row.iter().any(|&m| m < -PLAN_TOL) {
                return false;
            }
        }
        for i in 0..n {
            let rs: f64 = self.mu[i].iter().sum();
            if (rs - alpha.weights()[i]).abs() > PLAN_TOL {
                return false;
            }
        }
        for j in 0..n {
            let cs: f64 = self.mu.iter().map(|row| row[j]).sum();
            if (cs - beta.weights()[j]).abs() > PLAN_TOL {
                return false;
            }
        }
        true
    }

    pub(crate) fn from_dense(mu: Vec<Vec<f64>>) -> Self {
        TransportPlan { mu }
    }
}

/// The q-Wasserstein distance between two measures on the same space, with
/// an optimal plan. For finite q this is the exact optimum of the
/// transportation program with costs `d^q`, taken to the q-th root;
/// `q = inf` delegates to [`wasserstein_inf`].
///
/// Zero-weight rows and columns are dropped before solving and reinstated
/// as zero rows of the plan, so the solver only ever sees the supports.
pub fn wasserstein(
    alpha: &Measure,
    beta: &Measure,
    q: PValue,
) -> Result<(f64, TransportPlan), TransportError> {
    if !alpha.same_space(beta) {
        return Err(TransportError::SpaceMismatch);
    }
    let q = match q {
        PValue::Finite(q) => q,
        PValue::Infinite => return wasserstein_inf(alpha, beta),
    };
    let space = alpha.space();
    let n = space.len();
    let rows = alpha.support();
    let cols = beta.support();
    let supply: Vec<f64> = rows.iter().map(|&i| alpha.weights()[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| beta.weights()[j]).collect();
    let cost: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| space.dist(i, j).powf(q)).collect())
        .collect();

    let sol = solve_transportation(&supply, &demand, &cost);

    let mut mu = vec![vec![0.0; n]; n];
    for (r, &i) in rows.iter().enumerate() {
        for (c, &j) in cols.iter().enumerate() {
            mu[i][j] = sol.flow[r][c];
        }
    }
    Ok((sol.cost.max(0.0).powf(1.0 / q), TransportPlan { mu }))
}

/// The infinity-Wasserstein distance: the smallest threshold `t` among the
/// attained distances such that the two measures admit a coupling moving
/// mass only across pairs at distance at most `t`. Feasibility at each
/// threshold is decided by bipartite max-flow, so the search runs over the
/// sorted list of exact distance values rather than bisecting reals.
pub fn wasserstein_inf(
    alpha: &Measure,
    beta: &Measure,
) -> Result<(f64, TransportPlan), TransportError> {
    if !alpha.same_space(beta) {
        return Err(TransportError::SpaceMismatch);
    }
    let space = alpha.space();
    let rows = alpha.support();
    let cols = beta.support();

    let mut thresholds: Vec<f64> = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
        .map(|(i, j)| space.dist(i, j))
        .collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup();

    let feasible = |t: f64| -> Option<Vec<Vec<f64>>> {
        max_flow_coupling(alpha, beta, &rows, &cols, t)
    };

    // The largest threshold always admits the product coupling.
    let (mut lo, mut hi) = (0usize, thresholds.len() - 1);
    let mut witness = feasible(thresholds[hi]).expect("product coupling is feasible");
    if let Some(flow) = feasible(thresholds[lo]) {
        return Ok((thresholds[lo], TransportPlan::from_dense(flow)));
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match feasible(thresholds[mid]) {
            Some(flow) => {
                witness = flow;
                hi = mid;
            }
            None => lo = mid,
        }
    }
    Ok((thresholds[hi], TransportPlan::from_dense(witness)))
}

/// Max-flow feasibility test: can all mass move across pairs with
/// `d <= t`? Returns the coupling when it can. Edmonds-Karp on the small
/// bipartite network; the augmentation count is bounded by the shortest
/// path argument, so real-valued capacities are safe here.
fn max_flow_coupling(
    alpha: &Measure,
    beta: &Measure,
    rows: &[usize],
    cols: &[usize],
    t: f64,
) -> Option<Vec<Vec<f64>>> {
    let space = alpha.space();
    let m = rows.len();
    let k = cols.len();
    // Nodes: 0 = source, 1..=m rows, m+1..=m+k cols, m+k+1 sink.
    let nodes = m + k + 2;
    let source = 0;
    let sink = m + k + 1;
    let mut cap = vec![vec![0.0f64; nodes]; nodes];
    for (r, &i) in rows.iter().enumerate() {
        cap[source][1 + r] = alpha.weights()[i];
        for (c, &j) in cols.iter().enumerate() {
            if space.dist(i, j) <= t {
                cap[1 + r][1 + m + c] = 2.0; // more than total mass
            }
        }
    }
    for (c, &j) in cols.iter().enumerate() {
        cap[1 + m + c][sink] = beta.weights()[j];
    }

    let mut flow = 0.0;
    loop {
        let mut parent = vec![usize::MAX; nodes];
        parent[source] = source;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for v in 0..nodes {
                if parent[v] == usize::MAX && cap[u][v] > 1e-12 {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[sink] == usize::MAX {
            break;
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = sink;
        while v != source {
            let u = parent[v];
            bottleneck = bottleneck.min(cap[u][v]);
            v = u;
        }
        let mut v = sink;
        while v != source {
            let u = parent[v];
            cap[u][v] -= bottleneck;
            cap[v][u] += bottleneck;
            v = u;
        }
        flow += bottleneck;
    }

    if flow < 1.0 - 1e-9 {
        return None;
    }
    let n = space.len();
    let mut mu = vec![vec![0.0; n]; n];
    for (r, &i) in rows.iter().enumerate() {
        for (c, &j) in cols.iter().enumerate() {
            // Flow on a forward arc is the capacity pushed back to it.
            let sent = cap[1 + m + c][1 + r];
            if sent > 0.0 {
                mu[i][j] = sent;
            }
        }
    }
    Some(mu)
}

/// Projects a measure onto a delta-net through the hat-function partition
/// of unity subordinate to the net's delta-balls: each point's mass is
/// split among the net points it lies strictly within delta of, in
/// proportion to `delta - d(x, u)`. The result stays within `delta` of the
/// input in every q-Wasserstein distance.
pub fn project_to_net(
    alpha: &Measure,
    net: &[usize],
    delta: f64,
) -> Result<Measure, TransportError> {
    let space = alpha.space();
    let hausdorff = hausdorff_subset(space, net).map_err(|_| TransportError::NotANet {
        hausdorff: f64::INFINITY,
        delta,
    })?;
    if hausdorff >= delta {
        return Err(TransportError::NotANet { hausdorff, delta });
    }

    let mut w = vec![0.0; space.len()];
    for x in alpha.support() {
        let hats: Vec<f64> = net
            .iter()
            .map(|&u| (delta - space.dist(x, u)).max(0.0))
            .collect();
        let total: f64 = hats.iter().sum();
        debug_assert!(total > 0.0, "net property guarantees a covering ball");
        for (&u, hat) in net.iter().zip(&hats) {
            w[u] += alpha.weights()[x] * hat / total;
        }
    }
    let projected =
        Measure::new(space.clone(), w).expect("projection preserves total mass");

    #[cfg(debug_assertions)]
    {
        let (d1, _) = wasserstein(alpha, &projected, PValue::Finite(1.0))?;
        let (dinf, _) = wasserstein_inf(alpha, &projected)?;
        debug_assert!(d1 < delta + 1e-9, "W1 projection bound violated: {d1} vs {delta}");
        debug_assert!(dinf < delta + 1e-9, "Winf projection bound violated: {dinf} vs {delta}");
    }

    Ok(projected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{epsilon_net, euclidean_metric, sample_sphere, FiniteMetricSpace, SampleMode};

    fn p(v: f64) -> PValue {
        PValue::finite(v).unwrap()
    }

    #[test]
    fn identical_measures_have_zero_distance() {
        let z3 = FiniteMetricSpace::uniform_unit(3);
        let alpha = Measure::uniform(z3);
        for q in [p(1.0), p(2.0), PValue::INF] {
            let (d, plan) = wasserstein(&alpha, &alpha, q).unwrap();
            assert!(d.abs() < 1e-12);
            assert!(plan.validate(&alpha, &alpha));
        }
    }

    #[test]
    fn dirac_to_dirac_is_the_distance() {
        let pc = sample_sphere(1, 6, SampleMode::Grid, 0);
        let space = euclidean_metric(&pc).unwrap();
        let a = Measure::dirac(space.clone(), 0).unwrap();
        let b = Measure::dirac(space.clone(), 2).unwrap();
        for q in [p(1.0), p(2.0), p(3.0), PValue::INF] {
            let (d, plan) = wasserstein(&a, &b, q).unwrap();
            assert!((d - space.dist(0, 2)).abs() < 1e-12);
            assert!(plan.validate(&a, &b));
        }
    }

    #[test]
    fn two_point_shift() {
        let z2 = FiniteMetricSpace::uniform_unit(2);
        let a = Measure::new(z2.clone(), vec![0.3, 0.7]).unwrap();
        let b = Measure::new(z2, vec![0.6, 0.4]).unwrap();
        let (d, plan) = wasserstein(&a, &b, p(1.0)).unwrap();
        assert!((d - 0.3).abs() < 1e-12);
        assert!(plan.validate(&a, &b));
    }

    #[test]
    fn infinity_distance_on_uniform_space() {
        let z3 = FiniteMetricSpace::uniform_unit(3);
        let uniform = Measure::uniform(z3.clone());
        let dirac = Measure::dirac(z3, 0).unwrap();
        let (d, plan) = wasserstein_inf(&uniform, &dirac).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert!(plan.validate(&uniform, &dirac));
    }

    #[test]
    fn space_mismatch_detected() {
        let a = Measure::uniform(FiniteMetricSpace::uniform_unit(3));
        let b = Measure::uniform(FiniteMetricSpace::uniform_unit(4));
        assert!(matches!(
            wasserstein(&a, &b, p(1.0)),
            Err(TransportError::SpaceMismatch)
        ));
    }

    #[test]
    fn frechet_closed_form_to_diracs() {
        use crate::measure::frechet;
        let pc = sample_sphere(1, 7, SampleMode::SeededUniform, 9);
        let space = euclidean_metric(&pc).unwrap();
        let alpha = Measure::new(
            space.clone(),
            vec![0.1, 0.15, 0.2, 0.05, 0.3, 0.1, 0.1],
        )
        .unwrap();
        for c in 0..7 {
            let dirac = Measure::dirac(space.clone(), c).unwrap();
            for q in [p(1.0), p(2.0), p(3.0)] {
                let (d, _) = wasserstein(&alpha, &dirac, q).unwrap();
                assert!((d - frechet(&alpha, q, c)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn monotone_in_q() {
        let pc = sample_sphere(1, 8, SampleMode::SeededUniform, 21);
        let space = euclidean_metric(&pc).unwrap();
        let a = Measure::new(space.clone(), vec![0.3, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1]).unwrap();
        let b = Measure::new(space, vec![0.05, 0.05, 0.2, 0.2, 0.1, 0.1, 0.2, 0.1]).unwrap();
        let mut prev = 0.0;
        for q in [p(1.0), p(1.5), p(2.0), p(4.0), PValue::INF] {
            let (d, _) = wasserstein(&a, &b, q).unwrap();
            assert!(d >= prev - 1e-10);
            prev = d;
        }
    }

    #[test]
    fn projection_examples() {
        let z3 = FiniteMetricSpace::uniform_unit(3);
        let uniform = Measure::uniform(z3.clone());
        let projected = project_to_net(&uniform, &[0], 1.5).unwrap();
        assert_eq!(projected.weights(), &[1.0, 0.0, 0.0]);

        // Already net-supported, support points isolated in the net.
        let dirac = Measure::dirac(z3.clone(), 1).unwrap();
        let kept = project_to_net(&dirac, &[0, 1, 2], 0.5).unwrap();
        assert_eq!(kept.weights(), dirac.weights());

        assert!(matches!(
            project_to_net(&uniform, &[0], 0.5),
            Err(TransportError::NotANet { .. })
        ));
    }

    #[test]
    fn projection_stays_within_delta() {
        use rand::{Rng, SeedableRng};
        let pc = sample_sphere(1, 10, SampleMode::SeededUniform, 3);
        let space = euclidean_metric(&pc).unwrap();
        let delta = 0.3f64;
        let net = {
            let mut net = epsilon_net(&space, delta * 0.999);
            net.sort_unstable();
            net
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let raw: Vec<f64> = (0..10).map(|_| rng.gen::<f64>()).collect();
            let sum: f64 = raw.iter().sum();
            let alpha = Measure::new(space.clone(), raw.iter().map(|x| x / sum).collect()).unwrap();
            let projected = project_to_net(&alpha, &net, delta).unwrap();
            assert!(projected.support().iter().all(|i| net.contains(i)));
            let (dinf, _) = wasserstein_inf(&alpha, &projected).unwrap();
            assert!(dinf < delta);
            let (d1, _) = wasserstein(&alpha, &projected, p(1.0)).unwrap();
            assert!(d1 < delta);
        }
    }
}
