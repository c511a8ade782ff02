//! Tridiagonal projections of the Hessian onto the span of back gradients,
//! and their eigenvalues (Ritz values).
//!
//! Two routes build the projection `T`:
//!
//! * explicit: Householder QR of the window `G = QR`, then `T = QᵀAQ`;
//! * matrix-free: Cholesky of the Gram matrix `Gᵀ[G, g] = Rᵀ[R, r]`, then
//!   `T = [R, r]·J·R⁻¹` where `J` holds the reciprocal steplengths that link
//!   consecutive gradients. No Hessian products are needed.
//!
//! On a quadratic both routes agree in exact arithmetic.

mod cholesky;
mod eigen;
mod qr;

pub use cholesky::{build_t_matrix_free, cholesky_extend, j_matrix, matrix_free_projection};
pub use eigen::ritz_values;
pub use qr::{build_t_explicit, projected_hessian, qr_factor, QrFactors};

use crate::error::{check_len, Error, Result};
use crate::linalg::Matrix;

/// Default relative threshold on the diagonal of `R` below which a window is
/// treated as numerically rank deficient.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Back gradients `[g_{n−w}, …, g_{n−1}]` (oldest first) plus the current
/// gradient `g_n`.
///
/// `steplengths[j]` is the steplength that took `columns[j]` to the next
/// gradient in the sequence (the last one leads to `current`). It may be
/// empty when the window did not come from a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientWindow {
    columns: Vec<Vec<f64>>,
    current: Vec<f64>,
    steplengths: Vec<f64>,
}

impl GradientWindow {
    pub fn new(columns: Vec<Vec<f64>>, current: Vec<f64>) -> Result<Self> {
        Self::with_steplengths(columns, current, Vec::new())
    }

    pub fn with_steplengths(
        columns: Vec<Vec<f64>>,
        current: Vec<f64>,
        steplengths: Vec<f64>,
    ) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::Domain("gradient window is empty".into()));
        }
        let n = current.len();
        for col in &columns {
            check_len(n, col.len())?;
        }
        if !steplengths.is_empty() {
            check_len(columns.len(), steplengths.len())?;
        }
        Ok(Self {
            columns,
            current,
            steplengths,
        })
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn current(&self) -> &[f64] {
        &self.current
    }

    pub fn steplengths(&self) -> &[f64] {
        &self.steplengths
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Keeps only the `keep` newest columns (and their steplengths).
    pub fn newest(&self, keep: usize) -> Self {
        let keep = keep.clamp(1, self.len());
        let start = self.len() - keep;
        Self {
            columns: self.columns[start..].to_vec(),
            current: self.current.clone(),
            steplengths: if self.steplengths.is_empty() {
                Vec::new()
            } else {
                self.steplengths[start..].to_vec()
            },
        }
    }
}

/// Output of the partially extended Cholesky factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct RFactorExtended {
    pub r_matrix: Matrix,
    pub r_col: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Domain("tridiagonal matrix is empty".into()));
        }
        check_len(diag.len() - 1, offdiag.len())?;
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(Error::Domain("tridiagonal matrix has non-finite entries".into()));
        }
        Ok(Self { diag, offdiag })
    }

    /// Tridiagonal band of a square matrix, with the off-diagonal replaced by
    /// the mean of the sub- and super-diagonal entries.
    pub fn symmetric_band(m: &Matrix) -> Result<Self> {
        check_len(m.rows(), m.cols())?;
        let n = m.rows();
        let diag = (0..n).map(|i| m[(i, i)]).collect();
        let offdiag = (0..n.saturating_sub(1))
            .map(|i| 0.5 * (m[(i, i + 1)] + m[(i + 1, i)]))
            .collect();
        Self::new(diag, offdiag)
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.offdiag[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.offdiag[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.offdiag[i];
                m[(i + 1, i)] = self.offdiag[i];
            }
        }
        m
    }
}

/// Eigenvalues of a projection, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct RitzValues {
    values: Vec<f64>,
}

impl RitzValues {
    pub(crate) fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Drops the oldest back gradients until the QR factor of the remaining
/// window passes the relative diagonal test. At least one column survives.
pub fn condition_guard(window: &GradientWindow, rank_tol: f64) -> GradientWindow {
    for keep in (2..=window.len()).rev() {
        let candidate = window.newest(keep);
        if qr_factor(candidate.columns(), rank_tol).is_ok() {
            return candidate;
        }
    }
    window.newest(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_validation() {
        assert!(GradientWindow::new(vec![], vec![1.0]).is_err());
        assert!(GradientWindow::new(vec![vec![1.0, 2.0]], vec![1.0]).is_err());
        assert!(
            GradientWindow::with_steplengths(vec![vec![1.0]], vec![1.0], vec![0.1, 0.2]).is_err()
        );
        let w = GradientWindow::with_steplengths(
            vec![vec![1.0], vec![2.0], vec![3.0]],
            vec![4.0],
            vec![0.1, 0.2, 0.3],
        )
        .unwrap();
        let n = w.newest(2);
        assert_eq!(n.columns(), &[vec![2.0], vec![3.0]]);
        assert_eq!(n.steplengths(), &[0.2, 0.3]);
        assert_eq!(w.newest(0).len(), 1);
    }

    #[test]
    fn tridiagonal_rejects_nonfinite() {
        assert!(TridiagonalMatrix::new(vec![1.0, f64::NAN], vec![0.0]).is_err());
        assert!(TridiagonalMatrix::new(vec![1.0, 2.0], vec![]).is_err());
    }

    #[test]
    fn guard_keeps_well_conditioned_window() {
        let cols = vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![1.0, 1.0, 0.0, 0.0],
            vec![0.0, 1.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0, 1.0],
        ];
        let w = GradientWindow::new(cols, vec![1.0; 4]).unwrap();
        assert_eq!(condition_guard(&w, DEFAULT_RANK_TOL), w);
    }

    #[test]
    fn guard_drops_older_duplicate() {
        let a = vec![1.0, 2.0, 3.0];
        let b = vec![0.0, 1.0, -1.0];
        let w = GradientWindow::new(vec![a.clone(), b.clone(), a.clone()], vec![1.0; 3]).unwrap();
        let guarded = condition_guard(&w, DEFAULT_RANK_TOL);
        assert_eq!(guarded.columns(), &[b, a]);
        assert!(qr_factor(guarded.columns(), DEFAULT_RANK_TOL).is_ok());
    }

    #[test]
    fn guard_floor_is_one_column() {
        let w = GradientWindow::new(vec![vec![1e-300, 0.0]], vec![1.0, 1.0]).unwrap();
        assert_eq!(condition_guard(&w, 0.9), w);
        let zeros = GradientWindow::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]], vec![1.0, 1.0])
            .unwrap();
        assert_eq!(condition_guard(&zeros, DEFAULT_RANK_TOL).len(), 1);
    }
}
