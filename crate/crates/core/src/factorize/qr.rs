use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm2, Matrix};
use crate::problem::QuadraticProblem;

use super::TridiagonalMatrix;

/// Thin QR factors: `q` holds the orthonormal columns, `r` is upper
/// triangular with a positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct QrFactors {
    pub q: Vec<Vec<f64>>,
    pub r: Matrix,
}

/// Householder QR of the `N x w` matrix whose columns are `columns`.
///
/// Fails with [`Error::RankDeficient`] at the first column whose diagonal
/// entry in `R` falls below `rank_tol` times the largest one.
pub fn qr_factor(columns: &[Vec<f64>], rank_tol: f64) -> Result<QrFactors> {
    let w = columns.len();
    if w == 0 {
        return Err(Error::Domain("cannot factor an empty window".into()));
    }
    let n = columns[0].len();
    for col in columns {
        check_len(n, col.len())?;
    }
    if w > n {
        return Err(Error::RankDeficient { index: n });
    }

    // Work column-major: a[j] is column j.
    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut reflectors: Vec<Option<Vec<f64>>> = Vec::with_capacity(w);
    let mut r = Matrix::zeros(w, w);

    for j in 0..w {
        let x = &a[j][j..];
        let xnorm = norm2(x);
        if xnorm == 0.0 {
            reflectors.push(None);
            for k in j..w {
                r[(j, k)] = a[k][j];
            }
            continue;
        }
        let alpha = if x[0] > 0.0 { -xnorm } else { xnorm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vnorm = norm2(&v);
        for vi in &mut v {
            *vi /= vnorm;
        }
        for col in a.iter_mut().skip(j) {
            let tail = &mut col[j..];
            let s = 2.0 * dot(&v, tail);
            for (t, vi) in tail.iter_mut().zip(&v) {
                *t -= s * vi;
            }
        }
        for k in j..w {
            r[(j, k)] = a[k][j];
        }
        reflectors.push(Some(v));
    }

    // Q = H_0 H_1 ... H_{w-1} applied to the first w unit vectors.
    let mut q: Vec<Vec<f64>> = (0..w)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    for (j, v) in reflectors.iter().enumerate().rev() {
        let Some(v) = v else { continue };
        for col in &mut q {
            let tail = &mut col[j..];
            let s = 2.0 * dot(v, tail);
            for (t, vi) in tail.iter_mut().zip(v) {
                *t -= s * vi;
            }
        }
    }

    for j in 0..w {
        if r[(j, j)] < 0.0 {
            for k in j..w {
                r[(j, k)] = -r[(j, k)];
            }
            for qi in &mut q[j] {
                *qi = -*qi;
            }
        }
    }

    let max_diag = (0..w).map(|j| r[(j, j)]).fold(0.0, f64::max);
    if let Some(index) = (0..w).find(|&j| !(r[(j, j)] > 0.0) || r[(j, j)] < rank_tol * max_diag) {
        return Err(Error::RankDeficient { index });
    }
    Ok(QrFactors { q, r })
}

/// The full projection `QᵀAQ` (symmetric up to rounding).
pub fn projected_hessian(q: &[Vec<f64>], problem: &QuadraticProblem) -> Result<Matrix> {
    let w = q.len();
    let aq = q
        .iter()
        .map(|col| problem.apply(col))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Matrix::zeros(w, w);
    for i in 0..w {
        for j in 0..w {
            t[(i, j)] = dot(&q[i], &aq[j]);
        }
    }
    Ok(t)
}

/// Tridiagonal part of `QᵀAQ`.
pub fn build_t_explicit(q: &[Vec<f64>], problem: &QuadraticProblem) -> Result<TridiagonalMatrix> {
    if q.is_empty() {
        return Err(Error::Domain("no basis vectors".into()));
    }
    TridiagonalMatrix::symmetric_band(&projected_hessian(q, problem)?)
}
