//! Exact minimum-cost assignment (Hungarian method with potentials).

use crate::num::Scalar;

/// Optimal assignment of rows to distinct columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T> {
    /// `columns[r]` is the column assigned to row `r`.
    pub columns: Vec<usize>,
    pub cost: T,
}

/// Minimum-cost assignment for an `n × m` matrix with `n ≤ m`; every row is
/// assigned and `m - n` columns stay free.
///
/// Costs must be small enough that sums of `2n` of them do not overflow `T`.
///
/// # Panics
/// If rows are ragged or there are more rows than columns.
pub fn min_cost_assignment<T: Scalar>(costs: &[Vec<T>]) -> Assignment<T> {
    let n = costs.len();
    if n == 0 {
        return Assignment { columns: Vec::new(), cost: T::zero() };
    }
    let m = costs[0].len();
    assert!(costs.iter().all(|r| r.len() == m), "ragged cost matrix");
    assert!(n <= m, "more rows than columns");

    // 1-based potentials; column 0 is the virtual start.
    let inf = T::max_value();
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = costs[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] = u[owner[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut columns = vec![0; n];
    for j in 1..=m {
        if owner[j] != 0 {
            columns[owner[j] - 1] = j - 1;
        }
    }
    let cost = columns.iter().enumerate().fold(T::zero(), |acc, (r, &c)| acc + costs[r][c]);
    Assignment { columns, cost }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classic_three_by_three() {
        let c = vec![vec![4i64, 1, 3], vec![2, 0, 5], vec![3, 2, 2]];
        let a = min_cost_assignment(&c);
        assert_eq!(a.cost, 5);
        assert_eq!(a.columns, vec![1, 0, 2]);
    }

    #[test]
    fn rectangular_and_float() {
        let c = vec![vec![1.5f64, 0.5, 9.0], vec![0.25, 4.0, 9.0]];
        let a = min_cost_assignment(&c);
        assert_eq!(a.columns, vec![1, 0]);
        assert!((a.cost - 0.75).abs() < 1e-12);
    }

    #[test]
    fn empty() {
        assert_eq!(min_cost_assignment::<i32>(&[]).cost, 0);
    }
}
