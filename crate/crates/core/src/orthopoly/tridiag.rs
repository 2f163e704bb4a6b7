//! Symmetric tridiagonal eigensolver (implicit-shift QL) tracking only the
//! first row of the eigenvector matrix, which is all Gauss quadrature needs.

use crate::error::{CoreError, Result};

/// Eigen-decomposition data for a symmetric tridiagonal matrix.
///
/// `values[j]` is the j-th eigenvalue in ascending order and `first_row[j]`
/// the first component of its normalized eigenvector.
#[derive(Debug, Clone)]
pub struct TridiagEigen {
    pub values: Vec<f64>,
    pub first_row: Vec<f64>,
}

/// Solves the symmetric tridiagonal eigenproblem with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples rows i and i+1, so `off.len()`
/// must be `diag.len() - 1`; an empty `off` is a 1x1 problem).
pub fn eigen_tridiagonal(diag: &[f64], off: &[f64]) -> Result<TridiagEigen> {
    let n = diag.len();
    if n == 0 {
        return Err(CoreError::ParameterOutOfRange(
            "empty tridiagonal matrix".into(),
        ));
    }
    if off.len() + 1 != n {
        return Err(CoreError::ParameterOutOfRange(format!(
            "off-diagonal length {} does not match dimension {}",
            off.len(),
            n
        )));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    let cap = 30 * n.max(1);
    let mut total_iter = 0usize;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            total_iter += 1;
            if total_iter > cap {
                return Err(CoreError::EigensolveFailure(cap));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(if g == 0.0 { 1.0 } else { g }));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok(TridiagEigen {
        values: order.iter().map(|&j| d[j]).collect(),
        first_row: order.iter().map(|&j| z[j]).collect(),
    })
}

/// Eigenvalues of a small dense symmetric matrix by the cyclic Jacobi method.
/// Used for condition-number diagnostics of Gram matrices.
pub fn symmetric_eigenvalues(mat: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = mat.len();
    if n == 0 || mat.iter().any(|row| row.len() != n) {
        return Err(CoreError::ParameterOutOfRange(
            "symmetric_eigenvalues needs a square matrix".into(),
        ));
    }
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    for sweep in 0..100 {
        let mut offdiag = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                offdiag += a[i][j] * a[i][j];
            }
        }
        let scale: f64 = (0..n).map(|i| a[i][i].abs()).fold(1e-300, f64::max);
        if offdiag.sqrt() <= 1e-14 * scale {
            break;
        }
        if sweep == 99 {
            return Err(CoreError::EigensolveFailure(100 * n * n));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let e = eigen_tridiagonal(&[3.5], &[]).unwrap();
        assert_eq!(e.values, vec![3.5]);
        assert_eq!(e.first_row, vec![1.0]);
    }

    #[test]
    fn two_by_two_analytic() {
        // [[0, 1], [1, 0]] has eigenvalues -1, 1 and first components 1/sqrt(2).
        let e = eigen_tridiagonal(&[0.0, 0.0], &[1.0]).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        for z in &e.first_row {
            assert!((z.abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        }
    }

    #[test]
    fn diagonal_matrix_sorted() {
        let e = eigen_tridiagonal(&[2.0, -1.0, 0.5], &[0.0, 0.0]).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 0.5).abs() < 1e-15);
        assert!((e.values[2] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn first_row_squares_sum_to_one() {
        // Jacobi matrix of Legendre orthonormal polynomials, n = 12.
        let n = 12;
        let diag = vec![0.0; n];
        let off: Vec<f64> = (1..n)
            .map(|k| {
                let k = k as f64;
                (k * k / ((2.0 * k - 1.0) * (2.0 * k + 1.0))).sqrt()
            })
            .collect();
        let e = eigen_tridiagonal(&diag, &off).unwrap();
        let s: f64 = e.first_row.iter().map(|z| z * z).sum();
        assert!((s - 1.0).abs() < 1e-12);
        for w in e.values.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn jacobi_dense_eigenvalues() {
        let m = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let vals = symmetric_eigenvalues(&m).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
    }
}
