use nalgebra::{Matrix4, Vector4};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dgp::TabularDataset;
use crate::{Error, Result};

const MAX_ITER: usize = 100;
const STEP_TOL: f64 = 1e-10;

/// Fit of `logit P(y=1) = β₀ + β₁·a + β₂·l + β₃·a·l`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionTest {
    /// `[β₀, β₁, β₂, β₃]` on the raw scale of `l`.
    pub coefficients: [f64; 4],
    pub interaction_se: f64,
    pub z: f64,
    /// Two-sided Wald p-value for `β₃ = 0`.
    pub p_value: f64,
    pub iterations: usize,
}

/// Interaction test with `sex` as `a` and `hours-per-week` as `l`.
pub fn concept_shift_test(ds: &TabularDataset) -> Result<InteractionTest> {
    interaction_logit_test(ds, "sex", "hours-per-week")
}

/// Newton–Raphson maximum likelihood for the interaction model on columns
/// `a_col` and `l_col` of `ds`, with the dataset labels as outcome.
///
/// `l` is centred and scaled internally for conditioning; the Wald statistic
/// of `β₃` is invariant to that reparametrization.
pub fn interaction_logit_test(ds: &TabularDataset, a_col: &str, l_col: &str) -> Result<InteractionTest> {
    let a = ds.column(a_col)?;
    let l = ds.column(l_col)?;
    let y = ds.y();
    let n = ds.n_rows();
    if n < 5 {
        return Err(Error::Sampling(format!("interaction fit needs at least 5 rows, got {n}")));
    }
    let mean = l.sum() / n as f64;
    let sd = (l.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    let sd = if sd > 0.0 { sd } else { 1.0 };
    let rows: Vec<Vector4<f64>> = (0..n)
        .map(|i| {
            let ls = (l[i] - mean) / sd;
            Vector4::new(1.0, a[i], ls, a[i] * ls)
        })
        .collect();

    let mut beta = Vector4::zeros();
    let mut grad_norm = f64::INFINITY;
    for iter in 1..=MAX_ITER {
        let mut grad = Vector4::zeros();
        let mut info = Matrix4::zeros();
        for (x, &yi) in rows.iter().zip(y) {
            let p = 1.0 / (1.0 + (-x.dot(&beta)).exp());
            grad += x * (f64::from(yi) - p);
            info += x * x.transpose() * (p * (1.0 - p));
        }
        grad_norm = grad.norm();
        let Some(chol) = info.cholesky() else {
            return Err(Error::NonConvergence { iterations: iter, grad_norm });
        };
        let step = chol.solve(&grad);
        beta += step;
        if !beta.iter().all(|b| b.is_finite()) {
            return Err(Error::NonConvergence { iterations: iter, grad_norm });
        }
        if step.amax() < STEP_TOL {
            let cov = chol.inverse();
            let se_std = cov[(3, 3)].sqrt();
            let z = beta[3] / se_std;
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            let p_value = 2.0 * (1.0 - normal.cdf(z.abs()));
            let (b0, b1, b2, b3) = (beta[0], beta[1], beta[2], beta[3]);
            return Ok(InteractionTest {
                coefficients: [
                    b0 - b2 * mean / sd,
                    b1 - b3 * mean / sd,
                    b2 / sd,
                    b3 / sd,
                ],
                interaction_se: se_std / sd,
                z,
                p_value,
                iterations: iter,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITER,
        grad_norm,
    })
}
