//! Thomas algorithm for the tridiagonal solves of the semi-implicit flows.

/// Solves a tridiagonal system in place. `sub[k]` couples row k to k−1,
/// `sup[k]` couples row k to k+1 (`sub[0]` and `sup[n-1]` unused). `diag`
/// and `rhs` are overwritten; the solution lands in `rhs`.
pub fn solve_in_place(sub: &[f64], diag: &mut [f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    debug_assert!(sub.len() == n && sup.len() == n && rhs.len() == n);
    for k in 1..n {
        let w = sub[k] / diag[k - 1];
        diag[k] -= w * sup[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for k in (0..n - 1).rev() {
        rhs[k] = (rhs[k] - sup[k] * rhs[k + 1]) / diag[k];
    }
}
