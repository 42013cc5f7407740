//! Small shared numerics: bracketing root finder and a dense linear solver
//! for the tiny (2x2 / 3x3) normal-equation systems the fitting code builds.

/// Find a root of `f` in `[lo, hi]` by bisection.
///
/// Scans a coarse logarithmic grid for a sign change first (the callers'
/// functions are monotone-ish but can start with equal signs at both ends),
/// then bisects to a relative interval width of `rel_tol`. Returns `None`
/// when no sign change exists on the bracket.
pub fn bisect<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Option<f64> {
    debug_assert!(lo > 0.0 && hi > lo);
    // Locate a sign change on a log-spaced scan.
    let scan = 256;
    let ratio = (hi / lo).powf(1.0 / scan as f64);
    let mut a = lo;
    let mut fa = f(a);
    if fa == 0.0 {
        return Some(a);
    }
    let mut bracket = None;
    let mut x = a;
    for _ in 0..scan {
        x *= ratio;
        let fx = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fa.signum() != fx.signum() && fa.is_finite() && fx.is_finite() {
            bracket = Some((a, x));
            break;
        }
        a = x;
        fa = fx;
    }
    let (mut a, mut b) = bracket?;
    let mut fa = f(a);
    for _ in 0..max_iter {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 || (b - a) <= rel_tol * mid {
            return Some(mid);
        }
        if fa.signum() == fm.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Solve the dense system `A x = b` in place by Gaussian elimination with
/// partial pivoting. `a` is row-major `n x n`. Returns `None` for a
/// numerically singular matrix.
pub fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        // Pivot on the largest remaining entry in this column.
        let mut pivot = col;
        for row in (col + 1)..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] / diag;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut sum = b[col];
        for k in (col + 1)..n {
            sum -= a[col * n + k] * x[k];
        }
        x[col] = sum / a[col * n + col];
    }
    Some(x)
}

/// Invert a dense `n x n` matrix by solving against the identity columns.
/// Returns `None` for a singular matrix. Only used for the small covariance
/// matrices of fit reports.
pub fn invert_dense(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    for col in 0..n {
        let mut a_copy = a.to_vec();
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        let x = solve_dense(&mut a_copy, &mut e, n)?;
        for row in 0..n {
            inv[row * n + col] = x[row];
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_a_power_law_intersection() {
        // x^0.61 = 9 x^0.29 + 10  =>  x ~ 1.57e3 (checked by substitution).
        let f = |x: f64| x.powf(0.61) - 9.0 * x.powf(0.29) - 10.0;
        let root = bisect(f, 1.0, 1e9, 1e-12, 200).unwrap();
        assert!(f(root).abs() < 1e-6 * root.powf(0.61));
    }

    #[test]
    fn bisect_reports_no_bracket() {
        assert!(bisect(|_| 1.0, 1.0, 1e6, 1e-12, 100).is_none());
    }

    #[test]
    fn dense_solve_recovers_a_known_solution() {
        // A = [[2,1,0],[1,3,1],[0,1,4]], x = [1,-2,3] => b = [0,-2,10].
        let mut a = vec![2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0];
        let mut b = vec![0.0, -2.0, 10.0];
        let x = solve_dense(&mut a, &mut b, 3).unwrap();
        for (got, want) in x.iter().zip([1.0, -2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = vec![4.0, 1.0, 2.0, 0.5, 3.0, 1.0, 1.5, 2.0, 5.0];
        let inv = invert_dense(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut sum = 0.0;
                for k in 0..3 {
                    sum += a[i * 3 + k] * inv[k * 3 + j];
                }
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((sum - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_systems_are_rejected() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 2.0];
        assert!(solve_dense(&mut a, &mut b, 2).is_none());
    }
}
