use nalgebra::{DMatrix, DVector};
use ndarray::ArrayView2;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// The system was singular and a pseudoinverse was used.
    pub singular: bool,
}

impl SurrogateFit {
    pub fn predict(&self, row: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(row)
                .map(|(b, x)| b * x)
                .sum::<f64>()
    }
}

/// Weighted ridge regression with an unpenalized intercept.
///
/// Solves `(XcᵀWXc + λI)β = XcᵀW yc` on weight-centred data, then recovers the
/// intercept from the weighted means.
pub fn fit_surrogate(
    x: ArrayView2<'_, f64>,
    y: &[f64],
    weights: &[f64],
    ridge_lambda: f64,
) -> Result<SurrogateFit> {
    let (n, d) = x.dim();
    if n < 2 {
        return Err(Error::config("perturbations", "surrogate needs at least 2 rows"));
    }
    if y.len() != n || weights.len() != n {
        return Err(Error::Schema("surrogate inputs have different lengths".into()));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::config("weights", "must be non-negative"));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::config("weights", "all weights are zero"));
    }
    let xbar: Vec<f64> = (0..d)
        .map(|j| x.column(j).iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total)
        .collect();
    let ybar = y.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total;

    let mut gram = DMatrix::<f64>::zeros(d, d);
    let mut rhs = DVector::<f64>::zeros(d);
    let mut centred = vec![0.0; d];
    for ((row, &yi), &wi) in x.rows().into_iter().zip(y).zip(weights) {
        if wi == 0.0 {
            continue;
        }
        for j in 0..d {
            centred[j] = row[j] - xbar[j];
        }
        let r = yi - ybar;
        for a in 0..d {
            let wa = wi * centred[a];
            rhs[a] += wa * r;
            for b in a..d {
                gram[(a, b)] += wa * centred[b];
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
        gram[(a, a)] += ridge_lambda;
    }

    let (beta, singular) = solve_symmetric(gram, rhs, ridge_lambda);
    let intercept = ybar - beta.iter().zip(&xbar).map(|(b, m)| b * m).sum::<f64>();
    Ok(SurrogateFit {
        coefficients: beta.iter().copied().collect(),
        intercept,
        singular,
    })
}

fn solve_symmetric(gram: DMatrix<f64>, rhs: DVector<f64>, ridge_lambda: f64) -> (DVector<f64>, bool) {
    if gram.nrows() == 0 {
        return (rhs, false);
    }
    if ridge_lambda > 0.0 {
        if let Some(ch) = gram.clone().cholesky() {
            return (ch.solve(&rhs), false);
        }
    }
    let svd = gram.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * 1e-12 * gram.nrows() as f64;
    let rank_deficient = svd.singular_values.iter().any(|&s| s <= tol);
    if !rank_deficient {
        if let Some(ch) = gram.cholesky() {
            return (ch.solve(&rhs), false);
        }
    }
    let beta = svd.solve(&rhs, tol).unwrap_or_else(|_| DVector::zeros(rhs.len()));
    (beta, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn two_point_line_is_exact() {
        let x = array![[0.0], [1.0]];
        let fit = fit_surrogate(x.view(), &[0.0, 1.0], &[1.0, 1.0], 0.0).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
        assert!(!fit.singular);
    }

    #[test]
    fn ridge_shrinks_the_slope() {
        let x = array![[0.0], [1.0]];
        let fit = fit_surrogate(x.view(), &[0.0, 1.0], &[1.0, 1.0], 1.0).unwrap();
        assert!(fit.coefficients[0].abs() < 1.0 && fit.coefficients[0] > 0.0);
    }

    #[test]
    fn constant_target_gives_flat_surrogate() {
        let x = array![[0.0, 1.0], [1.0, -2.0], [3.0, 0.5]];
        let fit = fit_surrogate(x.view(), &[0.4; 3], &[1.0, 0.5, 0.2], 1.0).unwrap();
        assert!(fit.coefficients.iter().all(|b| b.abs() < 1e-15));
        assert!((fit.intercept - 0.4).abs() < 1e-15);
    }

    #[test]
    fn collinear_unregularized_system_is_flagged() {
        let x = array![[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]];
        let fit = fit_surrogate(x.view(), &[1.0, 2.0, 3.0], &[1.0; 3], 0.0).unwrap();
        assert!(fit.singular);
        for (row, y) in [([1.0, 2.0], 1.0), ([3.0, 6.0], 3.0)] {
            assert!((fit.predict(&row) - y).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_weights_are_rejected() {
        let x = array![[0.0], [1.0]];
        assert!(fit_surrogate(x.view(), &[0.0, 1.0], &[0.0, 0.0], 1.0).is_err());
        assert!(fit_surrogate(x.view(), &[0.0, 1.0], &[-1.0, 1.0], 1.0).is_err());
        assert!(fit_surrogate(x.slice(ndarray::s![..1, ..]), &[0.0], &[1.0], 1.0).is_err());
    }
}
