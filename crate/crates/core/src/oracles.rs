//! Independent ground-truth generators used to verify the main pipeline:
//! closed-form diagrams for the uniform-distance spaces, single-linkage
//! degree-zero persistence, a dense barycentric grid maximizer for the
//! filtration functionals, and exhaustive vertex enumeration of the
//! transportation polytope.

use thiserror::Error;

use crate::filtration::{vr_value, Simplex};
use crate::measure::{diam_p, rad_p, Measure, PValue};
use crate::metric::FiniteMetricSpace;
use crate::persistence::{Interval, PersistenceDiagram};
use crate::transport::TransportPlan;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("FaceTooLarge({0}): grid search is capped at faces of 4 vertices")]
    FaceTooLarge(usize),
    #[error("SupportTooLarge({0}): vertex enumeration is capped at supports of 3")]
    SupportTooLarge(usize),
}

/// Closed-form persistence diagram of the relaxed filtrations of the
/// space of `n + 1` points at mutual distance one.
#[derive(Debug, Clone)]
pub struct ClosedFormDiagram {
    pub n: usize,
    pub p: PValue,
    pub diagram: PersistenceDiagram,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out = 1usize;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

/// Closed-form diagram for `n + 1` points at mutual distance one: degree 0
/// has `n` bars dying at `(1/2)^{1/p}` plus one essential bar, and degree
/// `1 <= k <= n-1` has `C(n, k+1)` copies of
/// `((k/(k+1))^{1/p}, ((k+1)/(k+2))^{1/p})`. In the p = infinity limit
/// only degree 0 survives, with deaths at one.
pub fn zn_diagram(n: usize, p: PValue) -> ClosedFormDiagram {
    assert!(n >= 1);
    let mut diagram = PersistenceDiagram::new();
    match p {
        PValue::Finite(p) => {
            let h0_death = 0.5f64.powf(1.0 / p);
            for _ in 0..n {
                diagram.push(0, Interval::new(0.0, h0_death));
            }
            diagram.push(0, Interval::new(0.0, f64::INFINITY));
            for k in 1..n {
                let birth = (k as f64 / (k as f64 + 1.0)).powf(1.0 / p);
                let death = ((k as f64 + 1.0) / (k as f64 + 2.0)).powf(1.0 / p);
                for _ in 0..binomial(n, k + 1) {
                    diagram.push(k, Interval::new(birth, death));
                }
            }
        }
        PValue::Infinite => {
            for _ in 0..n {
                diagram.push(0, Interval::new(0.0, 1.0));
            }
            diagram.push(0, Interval::new(0.0, f64::INFINITY));
        }
    }
    diagram.finish();
    ClosedFormDiagram { n, p, diagram }
}

/// Scale factor tying degree-zero persistence to single linkage, derived
/// by direct maximization of the edge functional on a two-point space at
/// unit distance rather than read off any printed constant.
pub fn edge_death_scale(p: PValue) -> f64 {
    let pair = FiniteMetricSpace::uniform_unit(2);
    let edge = Simplex::new(vec![0, 1]).unwrap();
    vr_value(&pair, &edge, p).expect("two-vertex face is under the cap")
}

/// Degree-zero persistence read off single-linkage clustering: minimum
/// spanning tree merge heights, multiplied by `scale`, as deaths of bars
/// born at zero, plus one essential bar.
pub fn single_linkage_h0(space: &FiniteMetricSpace, scale: f64) -> PersistenceDiagram {
    assert!(scale > 0.0);
    let n = space.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    in_tree[0] = true;
    for j in 1..n {
        best[j] = space.dist(0, j);
    }
    let mut merge_heights = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let next = (0..n)
            .filter(|&j| !in_tree[j])
            .min_by(|&a, &b| best[a].partial_cmp(&best[b]).unwrap())
            .expect("tree spans all points");
        merge_heights.push(best[next]);
        in_tree[next] = true;
        for j in 0..n {
            if !in_tree[j] {
                best[j] = best[j].min(space.dist(next, j));
            }
        }
    }

    let mut diagram = PersistenceDiagram::new();
    for h in merge_heights {
        diagram.push(0, Interval::new(0.0, scale * h));
    }
    diagram.push(0, Interval::new(0.0, f64::INFINITY));
    diagram.finish();
    diagram
}

/// Which functional the grid oracle maximizes over a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridFunctional {
    DiamP,
    RadP,
}

/// Brute-force maximum of a filtration functional over the barycentric
/// grid of mesh `step` on the face. Grid weights come from integer
/// compositions, so the coordinates carry no accumulation error. This is
/// the independent check for the LP and stationarity paths.
pub fn grid_maximize(
    space: &std::sync::Arc<FiniteMetricSpace>,
    simplex: &Simplex,
    functional: GridFunctional,
    p: PValue,
    step: f64,
) -> Result<f64, OracleError> {
    let verts = simplex.vertices();
    if verts.len() > 4 {
        return Err(OracleError::FaceTooLarge(verts.len()));
    }
    assert!(step > 0.0 && step <= 1e-2 + 1e-15, "grid step must be in (0, 1e-2]");
    if verts.len() == 1 {
        return Ok(0.0);
    }
    let resolution = (1.0 / step).round() as usize;

    let mut best = 0.0f64;
    let mut counts = vec![0usize; verts.len()];
    compositions(resolution, verts.len(), &mut counts, 0, &mut |counts| {
        let mut w = vec![0.0; space.len()];
        for (&v, &c) in verts.iter().zip(counts.iter()) {
            w[v] = c as f64 / resolution as f64;
        }
        let alpha = Measure::new(space.clone(), w).expect("grid weights are a distribution");
        let value = match functional {
            GridFunctional::DiamP => diam_p(&alpha, p),
            GridFunctional::RadP => rad_p(&alpha, p),
        };
        if value > best {
            best = value;
        }
    });
    Ok(best)
}

fn compositions(total: usize, slots: usize, counts: &mut Vec<usize>, at: usize, f: &mut impl FnMut(&[usize])) {
    if at == slots - 1 {
        counts[at] = total;
        f(counts);
        return;
    }
    for c in 0..=total {
        counts[at] = c;
        compositions(total - c, slots, counts, at + 1, f);
    }
}

/// All basic feasible solutions of the transportation polytope between two
/// small-support measures: every spanning-tree basis of the bipartite
/// support graph, solved by leaf elimination and kept when feasible.
/// Degenerate bases that repeat a plan are deduplicated.
pub fn enumerate_transport_vertices(
    alpha: &Measure,
    beta: &Measure,
) -> Result<Vec<TransportPlan>, OracleError> {
    let rows = alpha.support();
    let cols = beta.support();
    if rows.len() > 3 {
        return Err(OracleError::SupportTooLarge(rows.len()));
    }
    if cols.len() > 3 {
        return Err(OracleError::SupportTooLarge(cols.len()));
    }
    let m = rows.len();
    let k = cols.len();
    let n = alpha.space().len();
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|r| (0..k).map(move |c| (r, c))).collect();
    let basis_size = m + k - 1;

    let mut plans: Vec<TransportPlan> = Vec::new();
    for subset in crate::filtration::combinations(cells.len(), basis_size) {
        let chosen: Vec<(usize, usize)> = subset.iter().map(|&i| cells[i]).collect();
        let Some(flows) = solve_tree_flows(&chosen, alpha, beta, &rows, &cols) else {
            continue;
        };
        let mut mu = vec![vec![0.0; n]; n];
        for (&(r, c), &f) in chosen.iter().zip(&flows) {
            mu[rows[r]][cols[c]] = f;
        }
        let plan = TransportPlan::from_dense(mu);
        debug_assert!(plan.validate(alpha, beta));
        let duplicate = plans.iter().any(|existing| {
            existing
                .matrix()
                .iter()
                .flatten()
                .zip(plan.matrix().iter().flatten())
                .all(|(a, b)| (a - b).abs() < 1e-12)
        });
        if !duplicate {
            plans.push(plan);
        }
    }
    Ok(plans)
}

/// Solves the flows on a candidate spanning-tree basis by repeatedly
/// saturating leaves; returns None when the cells do not form a spanning
/// tree or some flow would go negative.
fn solve_tree_flows(
    chosen: &[(usize, usize)],
    alpha: &Measure,
    beta: &Measure,
    rows: &[usize],
    cols: &[usize],
) -> Option<Vec<f64>> {
    let mut supply: Vec<f64> = rows.iter().map(|&i| alpha.weights()[i]).collect();
    let mut demand: Vec<f64> = cols.iter().map(|&j| beta.weights()[j]).collect();
    let mut remaining: Vec<bool> = vec![true; chosen.len()];
    let mut flows = vec![0.0; chosen.len()];
    for _ in 0..chosen.len() {
        // A leaf node is incident to exactly one remaining cell.
        let mut leaf_cell = None;
        for (idx, &(r, c)) in chosen.iter().enumerate() {
            if !remaining[idx] {
                continue;
            }
            let row_degree = chosen
                .iter()
                .enumerate()
                .filter(|&(i, &(rr, _))| remaining[i] && rr == r)
                .count();
            let col_degree = chosen
                .iter()
                .enumerate()
                .filter(|&(i, &(_, cc))| remaining[i] && cc == c)
                .count();
            if row_degree == 1 {
                leaf_cell = Some((idx, true));
                break;
            }
            if col_degree == 1 {
                leaf_cell = Some((idx, false));
                break;
            }
        }
        let (idx, via_row) = leaf_cell?; // a cycle leaves no leaf: not a tree
        let (r, c) = chosen[idx];
        let f = if via_row { supply[r] } else { demand[c] };
        if f < -1e-12 {
            return None;
        }
        let f = f.max(0.0);
        flows[idx] = f;
        supply[r] -= f;
        demand[c] -= f;
        remaining[idx] = false;
    }
    if supply.iter().any(|&s| s.abs() > 1e-9) || demand.iter().any(|&d| d.abs() > 1e-9) {
        return None;
    }
    if flows.iter().any(|&f| f < -1e-12) {
        return None;
    }
    Some(flows)
}
