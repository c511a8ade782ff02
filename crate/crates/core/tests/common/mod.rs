#![allow(dead_code)]

use lmsd_core::linalg::Matrix;
use lmsd_core::problem::{make_fletcher_problem, QuadraticProblem};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fletcher(seed: u64) -> QuadraticProblem {
    make_fletcher_problem(20, 1.0, 2f64.sqrt(), 10.0, 20.0, seed).unwrap()
}

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    pub fn vector(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|_| self.uniform(lo, hi)).collect()
    }
}

/// Dense copy of the Hessian, built entry by entry.
pub fn dense_hessian(p: &QuadraticProblem) -> Matrix {
    let n = p.dim();
    let mut a = Matrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = p.apply(&e).unwrap();
        for i in 0..n {
            a[(i, j)] = col[i];
        }
    }
    a
}

/// Gradients `g_0, …, g_w` of `x_{j+1} = x_j − α_j g_j` from `x0`, with the
/// steplengths used. Gradients are evaluated directly as `Ax − b`.
pub fn trajectory(p: &QuadraticProblem, x0: &[f64], steps: &[f64]) -> Vec<Vec<f64>> {
    let mut x = x0.to_vec();
    let mut out = vec![p.gradient(&x).unwrap()];
    for alpha in steps {
        let g = out.last().unwrap().clone();
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= alpha * gi;
        }
        out.push(p.gradient(&x).unwrap());
    }
    out
}

/// Eigenvalues of a symmetric tridiagonal matrix by Sturm-sequence bisection
/// on the characteristic polynomial, largest first.
pub fn sturm_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let bound = (0..n)
        .map(|i| {
            diag[i].abs()
                + if i > 0 { off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { off[i].abs() } else { 0.0 }
        })
        .fold(0.0, f64::max)
        + 1.0;
    // Number of eigenvalues strictly below x.
    let count_below = |x: f64| {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..n {
            let b2 = if i > 0 { off[i - 1] * off[i - 1] } else { 0.0 };
            q = diag[i] - x - if i > 0 { b2 / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * bound;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let mut values: Vec<f64> = (0..n)
        .map(|k| {
            // k-th smallest eigenvalue.
            let (mut lo, mut hi) = (-bound, bound);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    values.reverse();
    values
}
