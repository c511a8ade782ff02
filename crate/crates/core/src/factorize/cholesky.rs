use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, solve_upper_transposed, Matrix};

use super::{GradientWindow, RFactorExtended, TridiagonalMatrix};

/// Partially extended Cholesky factorization `Gᵀ[G, g] = Rᵀ[R, r]`.
///
/// `R` is the Cholesky factor of the Gram matrix `GᵀG`, `r` solves
/// `Rᵀr = Gᵀg` for the current gradient `g`. A pivot that is nonpositive, or
/// that has lost all significant digits relative to its Gram diagonal, is
/// reported as [`Error::IllConditioned`] at that column.
pub fn cholesky_extend(window: &GradientWindow) -> Result<RFactorExtended> {
    let cols = window.columns();
    let w = cols.len();
    let mut gram = Matrix::zeros(w, w);
    for i in 0..w {
        for j in i..w {
            let v = dot(&cols[i], &cols[j]);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let rhs: Vec<f64> = cols.iter().map(|c| dot(c, window.current())).collect();

    let mut r = Matrix::zeros(w, w);
    for j in 0..w {
        let mut pivot = gram[(j, j)];
        for k in 0..j {
            pivot -= r[(k, j)] * r[(k, j)];
        }
        if !(pivot > f64::EPSILON * gram[(j, j)]) || !pivot.is_finite() {
            return Err(Error::IllConditioned { index: j });
        }
        let rjj = pivot.sqrt();
        r[(j, j)] = rjj;
        for i in j + 1..w {
            let mut s = gram[(j, i)];
            for k in 0..j {
                s -= r[(k, j)] * r[(k, i)];
            }
            r[(j, i)] = s / rjj;
        }
    }
    let r_col = solve_upper_transposed(&r, &rhs);
    Ok(RFactorExtended {
        r_matrix: r,
        r_col,
    })
}

/// The `(w+1) x w` lower bidiagonal matrix with `1/α_j` on the diagonal and
/// `−1/α_j` directly below it.
pub fn j_matrix(steplengths: &[f64]) -> Matrix {
    let w = steplengths.len();
    let mut j = Matrix::zeros(w + 1, w);
    for (k, alpha) in steplengths.iter().enumerate() {
        j[(k, k)] = 1.0 / alpha;
        j[(k + 1, k)] = -1.0 / alpha;
    }
    j
}

/// The full (unsymmetrized) product `[R, r]·J·R⁻¹`.
pub fn matrix_free_projection(rf: &RFactorExtended, steplengths: &[f64]) -> Result<Matrix> {
    let r = &rf.r_matrix;
    let w = r.rows();
    check_len(w, steplengths.len())?;
    check_len(w, rf.r_col.len())?;
    if let Some(bad) = steplengths.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
        return Err(Error::Domain(format!("steplength {bad} is not positive")));
    }
    if let Some(index) = (0..w).find(|&i| r[(i, i)] == 0.0 || !r[(i, i)].is_finite()) {
        return Err(Error::IllConditioned { index });
    }

    let mut extended = Matrix::zeros(w, w + 1);
    for i in 0..w {
        for k in 0..w {
            extended[(i, k)] = r[(i, k)];
        }
        extended[(i, w)] = rf.r_col[i];
    }
    let rj = extended.matmul(&j_matrix(steplengths));

    // Row i of X = (RJ)·R⁻¹ solves Rᵀ xᵀ = (row i of RJ)ᵀ.
    let mut t = Matrix::zeros(w, w);
    for i in 0..w {
        let row = solve_upper_transposed(r, rj.row(i));
        for (k, v) in row.into_iter().enumerate() {
            t[(i, k)] = v;
        }
    }
    Ok(t)
}

/// Symmetrized tridiagonal band of `[R, r]·J·R⁻¹`.
pub fn build_t_matrix_free(rf: &RFactorExtended, steplengths: &[f64]) -> Result<TridiagonalMatrix> {
    TridiagonalMatrix::symmetric_band(&matrix_free_projection(rf, steplengths)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;

    #[test]
    fn single_column_factor() {
        let g = vec![1.0, 2.0, 2.0];
        let gn = vec![0.5, -1.0, 3.0];
        let w = GradientWindow::new(vec![g.clone()], gn.clone()).unwrap();
        let rf = cholesky_extend(&w).unwrap();
        assert!((rf.r_matrix[(0, 0)] - 3.0).abs() < 1e-15);
        assert!((rf.r_col[0] - dot(&g, &gn) / 3.0).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_columns_give_diagonal_factor() {
        let cols = vec![vec![2.0, 0.0, 0.0], vec![0.0, -3.0, 0.0], vec![0.0, 0.0, 0.5]];
        let w = GradientWindow::new(cols.clone(), vec![1.0, 1.0, 1.0]).unwrap();
        let rf = cholesky_extend(&w).unwrap();
        for (i, col) in cols.iter().enumerate() {
            for k in 0..3 {
                let expected = if i == k { norm2(col) } else { 0.0 };
                assert!((rf.r_matrix[(i, k)] - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn dependent_columns_are_ill_conditioned() {
        let cols = vec![vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]];
        let w = GradientWindow::new(cols, vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(cholesky_extend(&w), Err(Error::IllConditioned { index: 1 }));
    }

    #[test]
    fn j_structure() {
        let j = j_matrix(&[0.5, 0.25]);
        let expected = Matrix::from_rows(&[vec![2.0, 0.0], vec![-2.0, 4.0], vec![0.0, -4.0]]);
        assert_eq!(j, expected);
    }

    #[test]
    fn single_gradient_reduces_to_rayleigh_quotient() {
        let lambdas = [1.0, 3.0, 10.0];
        let g = vec![1.0, -2.0, 0.5];
        let ag: Vec<f64> = g.iter().zip(&lambdas).map(|(x, l)| x * l).collect();
        let alpha = 0.07;
        let gn: Vec<f64> = g.iter().zip(&ag).map(|(x, y)| x - alpha * y).collect();
        let w = GradientWindow::new(vec![g.clone()], gn).unwrap();
        let rf = cholesky_extend(&w).unwrap();
        let t = build_t_matrix_free(&rf, &[alpha]).unwrap();
        let rq = dot(&g, &ag) / dot(&g, &g);
        assert!((t.diag()[0] - rq).abs() < 1e-13 * rq);
    }

    #[test]
    fn rejects_nonpositive_steplength() {
        let w = GradientWindow::new(vec![vec![1.0, 0.0]], vec![0.5, 0.0]).unwrap();
        let rf = cholesky_extend(&w).unwrap();
        assert!(matches!(build_t_matrix_free(&rf, &[0.0]), Err(Error::Domain(_))));
        assert!(matches!(build_t_matrix_free(&rf, &[-1.0]), Err(Error::Domain(_))));
        let singular = RFactorExtended {
            r_matrix: Matrix::zeros(1, 1),
            r_col: vec![1.0],
        };
        assert!(matches!(
            build_t_matrix_free(&singular, &[1.0]),
            Err(Error::IllConditioned { index: 0 })
        ));
    }
}
