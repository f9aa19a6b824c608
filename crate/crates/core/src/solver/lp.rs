use super::scalar::Scalar;

/// Value and maximizer of `max_{a in simplex} min_j sum_i a_i payoff[i][j]`
/// for a nonnegative payoff matrix.
pub struct SimplexGameSolution<S> {
    pub value: S,
    pub maximizer: Vec<S>,
}

/// Computes the max-min of a nonnegative payoff matrix over the probability
/// simplex on its rows.
///
/// Requires at least two rows and that every column has a positive entry
/// (which forces a positive value); both hold for the distance-power
/// matrices this crate feeds in. The reduction is the classical one: the
/// bounded LP `max sum(w) s.t. payoff * w <= 1, w >= 0` has optimum `1/V`,
/// and the row player's optimal mixture appears as the dual prices of its
/// rows. The LP is solved by a dense primal simplex from the all-slack
/// basis with Bland's rule (lowest variable index entering; ties on the
/// ratio test broken by lowest basic variable index), so pivoting is
/// deterministic and the method terminates.
pub fn max_min_over_simplex<S: Scalar>(payoff: &[Vec<S>]) -> SimplexGameSolution<S> {
    let m = payoff.len();
    assert!(m >= 2, "use the direct formula for singleton faces");
    let n = payoff[0].len();
    debug_assert!(payoff.iter().all(|row| row.len() == n));

    // Tableau: m constraint rows over columns [w_0..w_{n-1} | slack_0..slack_{m-1} | rhs],
    // plus the objective row in canonical (z_j - c_j) form.
    let cols = n + m + 1;
    let mut tab: Vec<Vec<S>> = Vec::with_capacity(m + 1);
    for (i, row) in payoff.iter().enumerate() {
        let mut t = Vec::with_capacity(cols);
        t.extend(row.iter().cloned());
        for k in 0..m {
            t.push(if k == i { S::one() } else { S::zero() });
        }
        t.push(S::one());
        tab.push(t);
    }
    let mut objective = vec![S::zero(); cols];
    for entry in objective.iter_mut().take(n) {
        *entry = -S::one();
    }

    let mut basis: Vec<usize> = (n..n + m).collect();

    let max_pivots = 200 * (m + n) * (m + n);
    for _ in 0..max_pivots {
        let entering = match (0..n + m).find(|&j| objective[j] < -S::pivot_tol()) {
            Some(j) => j,
            None => {
                // Optimal: objective rhs is 1/V, slack duals are the
                // unnormalized row mixture.
                let recip = objective[cols - 1].clone();
                assert!(
                    recip > S::pivot_tol(),
                    "payoff matrix must have positive game value"
                );
                let value = S::one() / recip.clone();
                let maximizer = (0..m)
                    .map(|i| {
                        let dual = objective[n + i].clone();
                        let a = dual / recip.clone();
                        if a < S::zero() {
                            S::zero()
                        } else {
                            a
                        }
                    })
                    .collect();
                return SimplexGameSolution { value, maximizer };
            }
        };

        let mut leaving: Option<usize> = None;
        let mut best_ratio: Option<S> = None;
        for r in 0..m {
            if tab[r][entering] <= S::pivot_tol() {
                continue;
            }
            let ratio = tab[r][cols - 1].clone() / tab[r][entering].clone();
            let better = match &best_ratio {
                None => true,
                Some(b) => ratio < *b || (ratio == *b && basis[r] < basis[leaving.unwrap()]),
            };
            if better {
                best_ratio = Some(ratio);
                leaving = Some(r);
            }
        }
        let r = leaving.expect("bounded: every column has a positive payoff entry");

        let pivot = tab[r][entering].clone();
        for entry in tab[r].iter_mut() {
            *entry = entry.clone() / pivot.clone();
        }
        for row in 0..m {
            if row == r || tab[row][entering].is_negligible() {
                continue;
            }
            let factor = tab[row][entering].clone();
            for c in 0..cols {
                tab[row][c] = tab[row][c].clone() - factor.clone() * tab[r][c].clone();
            }
        }
        if !objective[entering].is_negligible() {
            let factor = objective[entering].clone();
            for c in 0..cols {
                objective[c] = objective[c].clone() - factor.clone() * tab[r][c].clone();
            }
        }
        basis[r] = entering;
    }
    unreachable!("simplex exceeded its pivot budget; Bland's rule should prevent cycling");
}
