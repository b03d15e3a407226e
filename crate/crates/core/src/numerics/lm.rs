//! Levenberg–Marquardt least squares with a finite-difference Jacobian, and the
//! few dense linear-algebra helpers the fitters need.

use crate::error::{Error, Result};

/// Solves `a x = b` for a small dense system by Gaussian elimination with
/// partial pivoting. `a` is row-major `n x n`.
pub fn solve(a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i * n + col].abs().total_cmp(&m[j * n + col].abs()))?;
        if m[pivot * n + col].abs() == 0.0 || !m[pivot * n + col].is_finite() {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            x.swap(col, pivot);
        }
        let p = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / p;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                m[row * n + k] -= factor * m[col * n + k];
            }
            x[row] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in col + 1..n {
            s -= m[col * n + k] * x[k];
        }
        x[col] = s / m[col * n + col];
    }
    Some(x)
}

/// Inverse of a small dense matrix, column by column.
pub fn invert(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; n * n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solve(a, &e)?;
        for i in 0..n {
            inv[i * n + j] = col[i];
        }
    }
    Some(inv)
}

/// Stopping rules for [`levenberg_marquardt`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// relative parameter-step tolerance
    pub x_tol: f64,
    /// relative cost-reduction tolerance
    pub f_tol: f64,
    /// relative finite-difference step
    pub diff_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            x_tol: 1e-13,
            f_tol: 1e-15,
            diff_step: 1e-7,
        }
    }
}

/// Outcome of a least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LmResult {
    pub params: Vec<f64>,
    pub residuals: Vec<f64>,
    /// sum of squared residuals
    pub cost: f64,
    /// row-major `m x n` Jacobian at the solution
    pub jacobian: Vec<f64>,
    pub iterations: usize,
}

impl LmResult {
    /// `(JᵀJ)⁻¹` at the solution, if it is invertible.
    pub fn inverse_normal_matrix(&self) -> Option<Vec<f64>> {
        let n = self.params.len();
        let m = self.residuals.len();
        invert(&normal_matrix(&self.jacobian, m, n), n)
    }
}

fn normal_matrix(jac: &[f64], m: usize, n: usize) -> Vec<f64> {
    let mut jtj = vec![0.0; n * n];
    for r in 0..m {
        let row = &jac[r * n..(r + 1) * n];
        for i in 0..n {
            for j in 0..n {
                jtj[i * n + j] += row[i] * row[j];
            }
        }
    }
    jtj
}

fn jacobian<F>(f: &mut F, x: &[f64], r0: &[f64], h_rel: f64) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = x.len();
    let m = r0.len();
    let mut jac = vec![0.0; m * n];
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = h_rel * x[j].abs().max(1e-3);
        xp[j] = x[j] + h;
        let rp = f(&xp)?;
        xp[j] = x[j] - h;
        let rm = f(&xp)?;
        xp[j] = x[j];
        for i in 0..m {
            jac[i * n + j] = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
    Ok(jac)
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Minimizes `Σ r_i(x)²` from the start point `x0`.
///
/// Marquardt's diagonal scaling is used for the damping term. The residual
/// closure may reject a trial point by returning an error; the step is then
/// treated as unsuccessful.
pub fn levenberg_marquardt<F>(mut f: F, x0: &[f64], options: &LmOptions) -> Result<LmResult>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = f(&x)?;
    let m = r.len();
    if m < n {
        return Err(Error::InsufficientData(format!(
            "{m} residuals for {n} parameters"
        )));
    }
    let mut cost = sum_sq(&r);
    if !cost.is_finite() {
        return Err(Error::FitNotConverged("non-finite residuals at the start point".into()));
    }
    let mut lambda = 1e-3;
    let mut jac = jacobian(&mut f, &x, &r, options.diff_step)?;
    for iteration in 1..=options.max_iterations {
        let jtj = normal_matrix(&jac, m, n);
        let mut g = vec![0.0; n];
        for i in 0..m {
            for j in 0..n {
                g[j] += jac[i * n + j] * r[i];
            }
        }
        let mut accepted = false;
        let mut small_step = false;
        for _ in 0..40 {
            let mut a = jtj.clone();
            for j in 0..n {
                a[j * n + j] += lambda * jtj[j * n + j].max(1e-300);
            }
            let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
            let Some(step) = solve(&a, &neg_g) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            let step_norm: f64 = step.iter().map(|v| v * v).sum::<f64>().sqrt();
            let x_norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            small_step = step_norm <= options.x_tol * (x_norm + options.x_tol);
            match f(&trial) {
                Ok(rt) => {
                    let ct = sum_sq(&rt);
                    if ct.is_finite() && ct <= cost {
                        let reduction = cost - ct;
                        x = trial;
                        r = rt;
                        let converged = reduction <= options.f_tol * cost.max(1e-300) || small_step;
                        cost = ct;
                        lambda = (lambda / 10.0).max(1e-12);
                        accepted = true;
                        jac = jacobian(&mut f, &x, &r, options.diff_step)?;
                        if converged {
                            return Ok(LmResult {
                                params: x,
                                residuals: r,
                                cost,
                                jacobian: jac,
                                iterations: iteration,
                            });
                        }
                        break;
                    }
                }
                Err(_) => {}
            }
            if small_step {
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            if small_step || cost == 0.0 {
                return Ok(LmResult {
                    params: x,
                    residuals: r,
                    cost,
                    jacobian: jac,
                    iterations: iteration,
                });
            }
            return Err(Error::FitNotConverged(format!(
                "no downhill step after {iteration} iterations (cost {cost:.6e}, damping {lambda:.1e})"
            )));
        }
    }
    Err(Error::FitNotConverged(format!(
        "iteration limit {} reached (cost {cost:.6e}, parameters {x:?})",
        options.max_iterations
    )))
}
