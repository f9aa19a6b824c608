//! Dense network simplex for the balanced transportation problem.
//!
//! Instances here are tiny (marginals of finitely supported measures), so
//! the basis tree is stored as a plain cell list and rebuilt structures are
//! recomputed each pivot. Pivoting is deterministic: the entering cell is
//! the first (row-major) with negative reduced cost, and ties in the ratio
//! test are broken by the lexicographically smallest leaving cell.

const REDUCED_COST_TOL: f64 = 1e-12;

pub struct TransportSolution {
    pub cost: f64,
    pub flow: Vec<Vec<f64>>,
}

/// Solves `min sum_{ij} cost[i][j] x[i][j]` subject to row sums `supply`,
/// column sums `demand`, `x >= 0`. Supplies and demands must be positive
/// and balanced.
pub fn solve_transportation(
    supply: &[f64],
    demand: &[f64],
    cost: &[Vec<f64>],
) -> TransportSolution {
    let m = supply.len();
    let n = demand.len();
    assert!(m > 0 && n > 0);
    debug_assert!(supply.iter().all(|&s| s > 0.0) && demand.iter().all(|&d| d > 0.0));
    debug_assert!((supply.iter().sum::<f64>() - demand.iter().sum::<f64>()).abs() < 1e-9);

    let mut flow = vec![vec![0.0; n]; m];
    let mut basic = vec![vec![false; n]; m];

    // Northwest-corner start: walks from (0,0) to (m-1,n-1), one step at a
    // time, so exactly m+n-1 cells enter the basis (some with zero flow).
    let mut ru: Vec<f64> = supply.to_vec();
    let mut rv: Vec<f64> = demand.to_vec();
    let (mut i, mut j) = (0, 0);
    loop {
        let x = ru[i].min(rv[j]);
        flow[i][j] = x;
        basic[i][j] = true;
        ru[i] -= x;
        rv[j] -= x;
        if i == m - 1 && j == n - 1 {
            break;
        }
        if ru[i] <= 0.0 && i < m - 1 {
            i += 1;
        } else {
            j += 1;
        }
    }

    let max_pivots = 500 * (m + n) * (m + n) + 1000;
    for _ in 0..max_pivots {
        let (u, v) = potentials(m, n, cost, &basic);

        let mut entering = None;
        'scan: for r in 0..m {
            for c in 0..n {
                if !basic[r][c] && cost[r][c] - u[r] - v[c] < -REDUCED_COST_TOL {
                    entering = Some((r, c));
                    break 'scan;
                }
            }
        }
        let (ei, ej) = match entering {
            Some(cell) => cell,
            None => {
                let total = flow
                    .iter()
                    .enumerate()
                    .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &f)| (r, c, f)))
                    .map(|(r, c, f)| f * cost[r][c])
                    .sum();
                return TransportSolution { cost: total, flow };
            }
        };

        // Adding the entering cell closes a unique cycle through the basis
        // tree; flow alternates +/- around it starting with + at entry.
        let path = tree_path(m, n, &basic, ei, ej);
        let mut cycle = Vec::with_capacity(path.len() + 1);
        cycle.push((ei, ej));
        cycle.extend(path);

        let mut theta = f64::INFINITY;
        let mut leaving = None;
        for (t, &(r, c)) in cycle.iter().enumerate() {
            if t % 2 == 1 {
                let f = flow[r][c];
                if f < theta - 1e-15 || (f <= theta + 1e-15 && leaving.is_none_or(|lv| (r, c) < lv))
                {
                    theta = theta.min(f);
                    leaving = Some((r, c));
                }
            }
        }
        let leaving = leaving.expect("cycle always has a minus cell");

        for (t, &(r, c)) in cycle.iter().enumerate() {
            if t % 2 == 0 {
                flow[r][c] += theta;
            } else {
                flow[r][c] -= theta;
            }
        }
        basic[ei][ej] = true;
        basic[leaving.0][leaving.1] = false;
        flow[leaving.0][leaving.1] = 0.0;
    }
    unreachable!("transportation simplex exceeded its pivot budget");
}

/// Dual potentials from the basis tree, rooted at row 0 with u[0] = 0.
fn potentials(m: usize, n: usize, cost: &[Vec<f64>], basic: &[Vec<bool>]) -> (Vec<f64>, Vec<f64>) {
    let mut u = vec![f64::NAN; m];
    let mut v = vec![f64::NAN; n];
    u[0] = 0.0;
    let mut queue = std::collections::VecDeque::from([0usize]); // node ids: rows 0..m, cols m..m+n
    let mut seen = vec![false; m + n];
    seen[0] = true;
    while let Some(node) = queue.pop_front() {
        if node < m {
            for c in 0..n {
                if basic[node][c] && !seen[m + c] {
                    v[c] = cost[node][c] - u[node];
                    seen[m + c] = true;
                    queue.push_back(m + c);
                }
            }
        } else {
            let c = node - m;
            for r in 0..m {
                if basic[r][c] && !seen[r] {
                    u[r] = cost[r][c] - v[c];
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
    }
    debug_assert!(seen.iter().all(|&s| s), "basis must span all nodes");
    (u, v)
}

/// Basis cells along the unique tree path from row node `i0` to column node
/// `j0`, in walk order starting at the column end (so that, prefixed with
/// the entering cell, consecutive cells share a node).
fn tree_path(
    m: usize,
    n: usize,
    basic: &[Vec<bool>],
    i0: usize,
    j0: usize,
) -> Vec<(usize, usize)> {
    let nodes = m + n;
    let start = m + j0;
    let goal = i0;
    let mut parent: Vec<Option<(usize, (usize, usize))>> = vec![None; nodes];
    let mut seen = vec![false; nodes];
    seen[start] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        if node == goal {
            break;
        }
        if node < m {
            for c in 0..n {
                if basic[node][c] && !seen[m + c] {
                    seen[m + c] = true;
                    parent[m + c] = Some((node, (node, c)));
                    queue.push_back(m + c);
                }
            }
        } else {
            let c = node - m;
            for r in 0..m {
                if basic[r][c] && !seen[r] {
                    seen[r] = true;
                    parent[r] = Some((node, (r, c)));
                    queue.push_back(r);
                }
            }
        }
    }
    let mut cells = Vec::new();
    let mut node = goal;
    while node != start {
        let (prev, cell) = parent[node].expect("basis tree is connected");
        cells.push(cell);
        node = prev;
    }
    cells.reverse();
    cells
}
