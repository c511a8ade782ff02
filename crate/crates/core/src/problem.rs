//! Strongly convex quadratic test problems `f(x) = ½ xᵀAx − bᵀx`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm2, Matrix};

/// SPD Hessian storage.
#[derive(Debug, Clone, PartialEq)]
pub enum Hessian {
    /// Eigenvalues in nondecreasing order; the eigenvectors are the unit vectors.
    Diagonal(Vec<f64>),
    /// Dense symmetric matrix with its eigendecomposition cached at construction.
    Dense(DenseSpd),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseSpd {
    matrix: Matrix,
    eigenvalues: Vec<f64>,
    /// Column `i` is the unit eigenvector for `eigenvalues[i]`.
    eigenvectors: Matrix,
}

impl DenseSpd {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Matrix {
        &self.eigenvectors
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProblem {
    hessian: Hessian,
    rhs: Vec<f64>,
}

impl QuadraticProblem {
    /// Diagonal Hessian given by its spectrum.
    pub fn diagonal(eigenvalues: Vec<f64>, rhs: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidSpectrum("empty spectrum".into()));
        }
        check_len(eigenvalues.len(), rhs.len())?;
        if let Some(bad) = eigenvalues.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidSpectrum(format!(
                "eigenvalue {bad} is not a positive finite number"
            )));
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidSpectrum(
                "eigenvalues must be in nondecreasing order".into(),
            ));
        }
        Ok(Self {
            hessian: Hessian::Diagonal(eigenvalues),
            rhs,
        })
    }

    /// Dense symmetric positive definite Hessian. Symmetry is checked exactly.
    pub fn dense(matrix: Matrix, rhs: Vec<f64>) -> Result<Self> {
        let n = matrix.rows();
        if n == 0 {
            return Err(Error::InvalidSpectrum("empty matrix".into()));
        }
        check_len(n, matrix.cols())?;
        check_len(n, rhs.len())?;
        for i in 0..n {
            for j in 0..i {
                if matrix[(i, j)] != matrix[(j, i)] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        let (eigenvalues, eigenvectors) = symmetric_eigen(&matrix);
        if !(eigenvalues[0] > 0.0) {
            return Err(Error::NotPositiveDefinite(eigenvalues[0]));
        }
        Ok(Self {
            hessian: Hessian::Dense(DenseSpd {
                matrix,
                eigenvalues,
                eigenvectors,
            }),
            rhs,
        })
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn hessian(&self) -> &Hessian {
        &self.hessian
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Eigenvalues of the Hessian in nondecreasing order.
    pub fn eigenvalues(&self) -> &[f64] {
        match &self.hessian {
            Hessian::Diagonal(d) => d,
            Hessian::Dense(s) => &s.eigenvalues,
        }
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues().last().expect("nonempty spectrum")
    }

    /// `A·v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), v.len())?;
        Ok(self.apply_unchecked(v))
    }

    pub(crate) fn apply_unchecked(&self, v: &[f64]) -> Vec<f64> {
        match &self.hessian {
            Hessian::Diagonal(d) => d.iter().zip(v).map(|(l, x)| l * x).collect(),
            Hessian::Dense(s) => s.matrix.matvec(v),
        }
    }

    /// `A·x − b`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), x.len())?;
        let mut g = self.apply_unchecked(x);
        for (gi, bi) in g.iter_mut().zip(&self.rhs) {
            *gi -= bi;
        }
        Ok(g)
    }

    /// `½ xᵀAx − bᵀx`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_len(self.dim(), x.len())?;
        let ax = self.apply_unchecked(x);
        Ok(0.5 * dot(x, &ax) - dot(&self.rhs, x))
    }

    /// Coefficients of `g` in the Hessian eigenbasis, ordered like
    /// [`eigenvalues`](Self::eigenvalues).
    pub fn spectral_components(&self, g: &[f64]) -> Result<Vec<f64>> {
        check_len(self.dim(), g.len())?;
        Ok(match &self.hessian {
            Hessian::Diagonal(_) => g.to_vec(),
            Hessian::Dense(s) => s.eigenvectors.transpose().matvec(g),
        })
    }

    /// The unique minimizer `A⁻¹b`.
    pub fn minimizer(&self) -> Vec<f64> {
        match &self.hessian {
            Hessian::Diagonal(d) => self.rhs.iter().zip(d).map(|(b, l)| b / l).collect(),
            Hessian::Dense(s) => {
                let coeffs = s.eigenvectors.transpose().matvec(&self.rhs);
                let scaled: Vec<f64> = coeffs
                    .iter()
                    .zip(&s.eigenvalues)
                    .map(|(c, l)| c / l)
                    .collect();
                s.eigenvectors.matvec(&scaled)
            }
        }
    }

    /// Scale below which a gradient is indistinguishable from rounding noise
    /// at `x`: `ε·(‖A‖‖x‖ + ‖b‖)`.
    pub fn gradient_noise_floor(&self, x: &[f64]) -> f64 {
        f64::EPSILON * (self.lambda_max() * norm2(x) + norm2(&self.rhs))
    }
}

/// The geometric-spectrum test problem: `λ_i = lambda1 · ratio^(i−1)` on the
/// diagonal and `b` drawn uniformly from `[b_low, b_high]`.
///
/// The right-hand side comes from a ChaCha8 stream seeded with
/// `seed_from_u64(seed)`; each entry is `b_low + (b_high − b_low)·u` where
/// `u` takes the top 53 bits of one `next_u64` draw. Equal arguments give
/// bitwise-equal problems on every platform.
pub fn make_fletcher_problem(
    dim: usize,
    lambda1: f64,
    ratio: f64,
    b_low: f64,
    b_high: f64,
    seed: u64,
) -> Result<QuadraticProblem> {
    if dim == 0 {
        return Err(Error::InvalidSpectrum("dimension must be positive".into()));
    }
    if !(lambda1 > 0.0) || !lambda1.is_finite() {
        return Err(Error::InvalidSpectrum(format!("lambda1 = {lambda1} must be positive")));
    }
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(Error::InvalidSpectrum(format!("ratio = {ratio} must be positive")));
    }
    if !(b_low <= b_high) {
        return Err(Error::Domain(format!(
            "rhs range [{b_low}, {b_high}] is empty"
        )));
    }
    let eigenvalues: Vec<f64> = (0..dim).map(|i| lambda1 * ratio.powi(i as i32)).collect();
    if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidSpectrum(format!(
            "ratio = {ratio} below 1 gives a decreasing spectrum"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rhs = (0..dim)
        .map(|_| b_low + (b_high - b_low) * unit_interval(rng.next_u64()))
        .collect();
    QuadraticProblem::diagonal(eigenvalues, rhs)
}

fn unit_interval(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Point on a gradient trajectory together with its cached diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    pub fval: f64,
    pub gnorm: f64,
    pub index: usize,
}

impl Iterate {
    pub fn at(problem: &QuadraticProblem, x: Vec<f64>, index: usize) -> Result<Self> {
        let g = problem.gradient(&x)?;
        let fval = problem.value(&x)?;
        let gnorm = norm2(&g);
        Ok(Self {
            x,
            g,
            fval,
            gnorm,
            index,
        })
    }

    /// `x − alpha·g`, evaluated afresh.
    pub fn step(&self, problem: &QuadraticProblem, alpha: f64, index: usize) -> Result<Self> {
        let x: Vec<f64> = self
            .x
            .iter()
            .zip(&self.g)
            .map(|(xi, gi)| xi - alpha * gi)
            .collect();
        Self::at(problem, x, index)
    }
}

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix. Eigenvalues
/// ascending; each eigenvector column has its largest-magnitude entry positive.
fn symmetric_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() <= f64::EPSILON * m.norm_fro() * 1e-3 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = v.column(src);
        let pivot = col
            .iter()
            .copied()
            .fold(0.0_f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for (i, x) in col.iter().enumerate() {
            vectors[(i, dst)] = sign * x;
        }
    }
    (values, vectors)
}
