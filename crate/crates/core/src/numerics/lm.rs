//! Levenberg-Marquardt least squares with a forward/central-difference
//! Jacobian.
//!
//! The caller supplies a residual function `r(p)`; the solver minimizes
//! `Σ r_i(p)²`. Returning `None` marks a parameter vector as invalid and the
//! step is rejected, which is how simple positivity constraints are encoded.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LmError {
    #[error("residuals undefined at the initial parameters")]
    BadStart,
    #[error("fewer residuals ({m}) than parameters ({n})")]
    Underdetermined { m: usize, n: usize },
    #[error("no convergence after {iterations} iterations; last parameters {last:?}, cost {cost}")]
    NotConverged { iterations: usize, last: Vec<f64>, cost: f64 },
    #[error("normal matrix is singular at the optimum (parameters {last:?})")]
    Singular { last: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Relative parameter-step tolerance.
    pub x_tol: f64,
    /// Relative cost-decrease tolerance.
    pub f_tol: f64,
    /// Gradient infinity-norm tolerance.
    pub g_tol: f64,
    pub initial_lambda: f64,
    /// Use central differences (twice the cost, better accuracy).
    pub central_differences: bool,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iterations: 500,
            x_tol: 1e-15,
            f_tol: 1e-16,
            g_tol: 1e-30,
            initial_lambda: 1e-3,
            central_differences: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmResult {
    pub params: Vec<f64>,
    /// (JᵀJ)⁻¹ at the optimum. Appropriate when residuals are already
    /// divided by their standard deviations.
    pub covariance_unscaled: Vec<Vec<f64>>,
    /// (JᵀJ)⁻¹·χ²/(m−n): covariance when the noise level is estimated from
    /// the scatter of the residuals.
    pub covariance: Vec<Vec<f64>>,
    pub cost: f64,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub dof: usize,
}

impl LmResult {
    pub fn stderr(&self) -> Vec<f64> {
        (0..self.params.len()).map(|i| self.covariance[i][i].max(0.0).sqrt()).collect()
    }

    pub fn stderr_unscaled(&self) -> Vec<f64> {
        (0..self.params.len()).map(|i| self.covariance_unscaled[i][i].max(0.0).sqrt()).collect()
    }

    pub fn reduced_chi2(&self) -> f64 {
        if self.dof == 0 {
            f64::NAN
        } else {
            2.0 * self.cost / self.dof as f64
        }
    }
}

fn eval<F: Fn(&[f64]) -> Option<Vec<f64>>>(f: &F, p: &[f64]) -> Option<DVector<f64>> {
    let r = f(p)?;
    if r.iter().all(|v| v.is_finite()) {
        Some(DVector::from_vec(r))
    } else {
        None
    }
}

fn jacobian<F: Fn(&[f64]) -> Option<Vec<f64>>>(f: &F, p: &[f64], r0: &DVector<f64>, central: bool) -> DMatrix<f64> {
    let m = r0.len();
    let n = p.len();
    let mut j = DMatrix::zeros(m, n);
    let mut q = p.to_vec();
    for k in 0..n {
        let h = if central { 6e-6 } else { 1.5e-8 } * p[k].abs().max(1e-4);
        let mut col: Option<DVector<f64>> = None;
        if central {
            q[k] = p[k] + h;
            let rp = eval(f, &q);
            q[k] = p[k] - h;
            let rm = eval(f, &q);
            q[k] = p[k];
            col = match (rp, rm) {
                (Some(a), Some(b)) => Some((a - b) / (2.0 * h)),
                (Some(a), None) => Some((a - r0) / h),
                (None, Some(b)) => Some((r0 - b) / h),
                (None, None) => None,
            };
        } else {
            q[k] = p[k] + h;
            if let Some(a) = eval(f, &q) {
                col = Some((a - r0) / h);
            } else {
                q[k] = p[k] - h;
                if let Some(b) = eval(f, &q) {
                    col = Some((r0 - b) / h);
                }
            }
            q[k] = p[k];
        }
        if let Some(c) = col {
            j.set_column(k, &c);
        }
    }
    j
}

pub fn levenberg_marquardt<F>(f: F, p0: &[f64], opts: &LmOptions) -> Result<LmResult, LmError>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let n = p0.len();
    let mut p = p0.to_vec();
    let mut r = eval(&f, &p).ok_or(LmError::BadStart)?;
    let m = r.len();
    if m < n {
        return Err(LmError::Underdetermined { m, n });
    }
    let mut cost = 0.5 * r.norm_squared();
    let mut lambda = opts.initial_lambda;
    let mut iterations = 0;
    let mut converged = false;
    let mut jac = jacobian(&f, &p, &r, opts.central_differences);

    while iterations < opts.max_iterations {
        iterations += 1;
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        if g.amax() <= opts.g_tol {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let mut a = jtj.clone();
            for i in 0..n {
                a[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
            }
            let step = match a.cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let Some(rt) = eval(&f, &trial) else {
                lambda *= 10.0;
                continue;
            };
            let ct = 0.5 * rt.norm_squared();
            if ct <= cost {
                let small_step = step.iter().zip(p.iter()).all(|(s, x)| s.abs() <= opts.x_tol * (x.abs() + opts.x_tol));
                let small_gain = (cost - ct) <= opts.f_tol * cost;
                p = trial;
                r = rt;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-15);
                accepted = true;
                if small_step || small_gain || cost == 0.0 {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
            if lambda > 1e16 {
                break;
            }
        }
        if !accepted {
            // no downhill step left at any damping: treat as a minimum
            converged = true;
            break;
        }
        jac = jacobian(&f, &p, &r, opts.central_differences);
        if converged {
            break;
        }
    }
    if !converged {
        return Err(LmError::NotConverged { iterations, last: p, cost });
    }
    let jtj = jac.transpose() * &jac;
    let inv = jtj
        .clone()
        .try_inverse()
        .filter(|m| m.iter().all(|v| v.is_finite()))
        .ok_or_else(|| LmError::Singular { last: p.clone() })?;
    let dof = m - n;
    let s2 = if dof > 0 { 2.0 * cost / dof as f64 } else { 0.0 };
    let to_rows = |mat: &DMatrix<f64>| (0..n).map(|i| (0..n).map(|j| mat[(i, j)]).collect()).collect();
    Ok(LmResult {
        covariance_unscaled: to_rows(&inv),
        covariance: to_rows(&(inv * s2)),
        params: p,
        cost,
        residuals: r.iter().copied().collect(),
        iterations,
        dof,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock_minimum() {
        let res = levenberg_marquardt(
            |p| Some(vec![10.0 * (p[1] - p[0] * p[0]), 1.0 - p[0]]),
            &[-1.2, 1.0],
            &LmOptions::default(),
        )
        .unwrap();
        assert!((res.params[0] - 1.0).abs() < 1e-10);
        assert!((res.params[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exponential_recovery() {
        let xs: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * (-1.3 * x).exp()).collect();
        let res = levenberg_marquardt(
            |p| Some(xs.iter().zip(&ys).map(|(x, y)| p[0] * (-p[1] * x).exp() - y).collect()),
            &[1.0, 0.5],
            &LmOptions::default(),
        )
        .unwrap();
        assert!((res.params[0] - 2.5).abs() < 1e-12);
        assert!((res.params[1] - 1.3).abs() < 1e-12);
    }

    #[test]
    fn too_few_residuals() {
        let e = levenberg_marquardt(|_| Some(vec![1.0]), &[0.0, 0.0], &LmOptions::default());
        assert!(matches!(e, Err(LmError::Underdetermined { .. })));
    }
}
