use super::scalar::Scalar;

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when the matrix is singular (pivot below the
/// scalar's tolerance); callers treat that as "no isolated solution".
pub fn solve_square<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|row| row.len() == n));

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| {
                a[r][col]
                    .abs()
                    .partial_cmp(&a[s][col].abs())
                    .expect("comparable pivots")
            })
            .unwrap();
        if a[pivot_row][col].is_negligible() {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);

        let pivot = a[col][col].clone();
        for row in col + 1..n {
            if a[row][col].is_negligible() {
                a[row][col] = S::zero();
                continue;
            }
            let factor = a[row][col].clone() / pivot.clone();
            for k in col..n {
                a[row][k] = a[row][k].clone() - factor.clone() * a[col][k].clone();
            }
            b[row] = b[row].clone() - factor * b[col].clone();
        }
    }

    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for col in row + 1..n {
            acc = acc - a[row][col].clone() * x[col].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Some(x)
}
