//! Scalar steplength formulas: exact line search, Barzilai–Borwein and Yuan.

use crate::error::{check_len, Error, Result};
use crate::linalg::dot;
use crate::problem::QuadraticProblem;

/// Exact minimizer of `f(x − αg)` along the negative gradient: `gᵀg / gᵀAg`.
pub fn sd_step(problem: &QuadraticProblem, g: &[f64]) -> Result<f64> {
    check_len(problem.dim(), g.len())?;
    let gg = dot(g, g);
    if gg == 0.0 {
        return Err(Error::Domain("steepest descent step at a zero gradient".into()));
    }
    let ag = problem.apply(g)?;
    Ok(gg / dot(g, &ag))
}

/// `sᵀs / sᵀy`.
pub fn bb_step(s: &[f64], y: &[f64]) -> Result<f64> {
    check_len(s.len(), y.len())?;
    let sy = dot(s, y);
    if !(sy > 0.0) {
        return Err(Error::Curvature(sy));
    }
    Ok(dot(s, s) / sy)
}

/// Data of two consecutive steepest descent iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YuanInputs {
    pub alpha_sd_prev: f64,
    pub alpha_sd_curr: f64,
    pub gnorm_prev: f64,
    pub gnorm_curr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YuanStep {
    pub alpha: f64,
    /// The discriminant came out negative through rounding and was set to zero.
    pub clamped: bool,
}

/// The Yuan steplength `2 / (ρ + √(ρ² − 4Γ))` with
/// `ρ = 1/α_prev + 1/α_curr` and
/// `Γ = 1/(α_prev α_curr) − ‖g_curr‖² / (α_prev ‖g_prev‖)²`.
///
/// Along steepest descent its reciprocal tends to the largest Hessian
/// eigenvalue.
pub fn yuan_step(inputs: &YuanInputs) -> Result<YuanStep> {
    let YuanInputs {
        alpha_sd_prev,
        alpha_sd_curr,
        gnorm_prev,
        gnorm_curr,
    } = *inputs;
    if !(alpha_sd_prev > 0.0) || !(alpha_sd_curr > 0.0) {
        return Err(Error::Domain("Yuan step needs positive SD steplengths".into()));
    }
    if !(gnorm_prev > 0.0) || !(gnorm_curr >= 0.0) {
        return Err(Error::Domain("Yuan step needs a nonzero previous gradient".into()));
    }
    let rho = 1.0 / alpha_sd_prev + 1.0 / alpha_sd_curr;
    let ratio = gnorm_curr / (alpha_sd_prev * gnorm_prev);
    let gamma = 1.0 / (alpha_sd_prev * alpha_sd_curr) - ratio * ratio;
    let disc = rho * rho - 4.0 * gamma;
    let clamped = disc < 0.0;
    let alpha = 2.0 / (rho + disc.max(0.0).sqrt());
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("Yuan step evaluated to {alpha}")));
    }
    Ok(YuanStep { alpha, clamped })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sd_examples() {
        let id = QuadraticProblem::diagonal(vec![1.0; 3], vec![0.0; 3]).unwrap();
        assert_eq!(sd_step(&id, &[1.0, -2.0, 3.0]).unwrap(), 1.0);
        let p = QuadraticProblem::diagonal(vec![1.0, 2.0], vec![0.0; 2]).unwrap();
        assert!((sd_step(&p, &[1.0, 1.0]).unwrap() - 2.0 / 3.0).abs() < 1e-16);
        assert_eq!(sd_step(&p, &[0.0, 3.0]).unwrap(), 0.5);
        assert!(matches!(sd_step(&p, &[0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn bb_examples() {
        assert_eq!(bb_step(&[1.0, 1.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(bb_step(&[1.0, 0.0], &[2.0, 1.0]).unwrap(), 0.5);
        assert!(matches!(bb_step(&[1.0, 0.0], &[-1.0, 3.0]), Err(Error::Curvature(_))));
        assert!(matches!(bb_step(&[1.0, 0.0], &[0.0, 3.0]), Err(Error::Curvature(_))));
    }

    #[test]
    fn bb_on_quadratic_is_previous_sd_step() {
        let p = QuadraticProblem::diagonal(vec![1.0, 4.0, 9.0], vec![1.0, 1.0, 1.0]).unwrap();
        let g = p.gradient(&[0.2, -0.1, 0.4]).unwrap();
        let alpha = 0.13;
        let s: Vec<f64> = g.iter().map(|v| -alpha * v).collect();
        let y = p.apply(&s).unwrap();
        let bb = bb_step(&s, &y).unwrap();
        let sd = sd_step(&p, &g).unwrap();
        assert!((bb - sd).abs() < 1e-14 * sd);
    }

    #[test]
    fn yuan_degenerate_gamma() {
        let y = yuan_step(&YuanInputs {
            alpha_sd_prev: 1.0,
            alpha_sd_curr: 1.0,
            gnorm_prev: 1.0,
            gnorm_curr: 1.0,
        })
        .unwrap();
        assert_eq!(y.alpha, 0.5);
        assert!(!y.clamped);
    }

    #[test]
    fn yuan_clamps_negative_discriminant() {
        // The discriminant equals (1/a − 1/b)² + 4‖g_curr‖²/(a‖g_prev‖)² ≥ 0, so
        // only rounding can make it negative; these inputs do.
        let y = yuan_step(&YuanInputs {
            alpha_sd_prev: 5.004807362210215,
            alpha_sd_curr: 5.004807357154466,
            gnorm_prev: 1.0,
            gnorm_curr: 0.0,
        })
        .unwrap();
        assert!(y.clamped);
        let rho = 1.0 / 5.004807362210215 + 1.0 / 5.004807357154466;
        assert_eq!(y.alpha, 2.0 / rho);
    }

    #[test]
    fn yuan_rejects_bad_inputs() {
        let base = YuanInputs {
            alpha_sd_prev: 1.0,
            alpha_sd_curr: 1.0,
            gnorm_prev: 1.0,
            gnorm_curr: 1.0,
        };
        assert!(yuan_step(&YuanInputs { alpha_sd_prev: 0.0, ..base }).is_err());
        assert!(yuan_step(&YuanInputs { gnorm_prev: 0.0, ..base }).is_err());
    }
}
