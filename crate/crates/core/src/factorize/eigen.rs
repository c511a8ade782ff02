use crate::error::{Error, Result};

use super::{RitzValues, TridiagonalMatrix};

/// Sweeps allowed per eigenvalue, multiplied by the matrix order.
const SWEEPS_PER_ORDER: usize = 30;

/// All eigenvalues of a symmetric tridiagonal matrix by the QL algorithm
/// with implicit Wilkinson shifts, sorted largest first.
pub fn ritz_values(t: &TridiagonalMatrix) -> Result<RitzValues> {
    let n = t.dim();
    let mut d = t.diag().to_vec();
    // e[i] couples d[i] and d[i+1]; e[n-1] is scratch.
    let mut e = t.offdiag().to_vec();
    e.push(0.0);
    let cap = SWEEPS_PER_ORDER * n;

    for l in 0..n {
        let mut iter = 0;
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
            iter += 1;
            if iter > cap {
                return Err(Error::EigenFailure { index: l });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Underflow: split the matrix here and retry.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(RitzValues::from_unsorted(d))
}
