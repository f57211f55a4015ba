//! Reference-checked test suites, shared by `xdaudit test-oracles` and the
//! acceptance target.
//!
//! Each suite compares a production code path with an independent
//! computation on random inputs.

use std::time::{Duration, Instant};

use ndarray::{array, Array2};
use rand::Rng;

use crate::blackbox::{gradient_check, InputScaler, ModelSpec, Network, TrainedModel};
use crate::dgp::{sample_population, DataGenSpec, Objective};
use crate::lime::{agreement, explain, fit_surrogate, ExplainerConfig, FeatureScaler, Instance};
use crate::metrics::oracle::brute_force_gap_oracle;
use crate::metrics::{max_fidelity_gap, mean_fidelity_gap, FidelityRecord};
use crate::rng;

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: usize,
    /// Largest observed discrepancy against the reference.
    pub max_error: f64,
    pub tolerance: f64,
    pub failures: Vec<String>,
    pub notes: String,
    pub elapsed: Duration,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.max_error <= self.tolerance
    }
}

/// Fidelity gaps against [`brute_force_gap_oracle`] on `draws` random
/// multi-group record sets, plus exact two-group identities.
pub fn metric_suite(draws: usize, seed: u64) -> SuiteResult {
    const TOL: f64 = 1e-12;
    let start = Instant::now();
    let mut r = rng::stream(seed, 0);
    let mut max_error: f64 = 0.0;
    let mut failures = Vec::new();
    let mut checks = 0;
    for k in 0..draws {
        let g = r.random_range(2..=6);
        let mut records = Vec::new();
        for group in 0..g {
            let size = r.random_range(1..=50);
            let binary = r.random::<bool>();
            for _ in 0..size {
                let q = if binary { f64::from(u8::from(r.random::<bool>())) } else { r.random::<f64>() };
                records.push(FidelityRecord {
                    instance_id: records.len(),
                    group,
                    q_value: q,
                });
            }
        }
        let (omax, omean) = brute_force_gap_oracle(&records).expect("all groups nonempty");
        match (max_fidelity_gap(&records), mean_fidelity_gap(&records)) {
            (Ok((max, _)), Ok(mean)) => {
                max_error = max_error.max((max - omax).abs()).max((mean - omean).abs());
            }
            (a, b) => failures.push(format!("draw {k}: {a:?} {b:?}")),
        }
        checks += 1;

        // Two-group identity, exact.
        let two: Vec<FidelityRecord> = records
            .iter()
            .filter(|x| x.group < 2)
            .copied()
            .collect();
        let mean_of = |j: usize| {
            let v: Vec<f64> = two.iter().filter(|x| x.group == j).map(|x| x.q_value).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        let expected = (mean_of(0) - mean_of(1)).abs();
        match mean_fidelity_gap(&two) {
            Ok(v) if v == expected => {}
            other => failures.push(format!("draw {k}: two-group identity {other:?} vs {expected}")),
        }
        checks += 1;
    }
    SuiteResult {
        name: "fidelity-gap oracle",
        checks,
        notes: String::new(),
        max_error,
        tolerance: TOL,
        failures,
        elapsed: start.elapsed(),
    }
}

/// Ridge solution with an unpenalized intercept from the augmented normal
/// equations `(ZᵀWZ + λD)θ = ZᵀWy`, `Z = [1 X]`, `D = diag(0, 1, …, 1)`,
/// solved by Gaussian elimination with partial pivoting.
pub fn normal_equations_ridge(x: &Array2<f64>, y: &[f64], w: &[f64], lambda: f64) -> (f64, Vec<f64>) {
    let (n, d) = x.dim();
    let p = d + 1;
    let mut a = vec![vec![0.0; p + 1]; p];
    for i in 0..n {
        let z: Vec<f64> = std::iter::once(1.0).chain(x.row(i).iter().copied()).collect();
        for r in 0..p {
            for c in 0..p {
                a[r][c] += w[i] * z[r] * z[c];
            }
            a[r][p] += w[i] * z[r] * y[i];
        }
    }
    for (r, row) in a.iter_mut().enumerate().skip(1) {
        row[r] += lambda;
    }
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty");
        a.swap(col, pivot);
        for r in 0..p {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=p {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let theta: Vec<f64> = (0..p).map(|r| a[r][p] / a[r][r]).collect();
    (theta[0], theta[1..].to_vec())
}

/// `fit_surrogate` against [`normal_equations_ridge`] on random problems with
/// up to 5 features, and agreement 1 for a constant black box.
pub fn surrogate_suite(draws: usize, seed: u64) -> SuiteResult {
    const TOL: f64 = 1e-8;
    let start = Instant::now();
    let mut r = rng::stream(seed, 1);
    let mut max_error: f64 = 0.0;
    let mut failures = Vec::new();
    let mut checks = 0;
    for k in 0..draws {
        let d = r.random_range(1..=5);
        let n = r.random_range(10..=300);
        let lambda = [0.01, 1.0, 10.0][k % 3];
        let x = Array2::from_shape_fn((n, d), |_| r.random::<f64>() * 4.0 - 2.0);
        let y: Vec<f64> = (0..n).map(|_| r.random::<f64>()).collect();
        let w: Vec<f64> = (0..n)
            .map(|_| if r.random::<f64>() < 0.1 { 0.0 } else { r.random::<f64>() })
            .collect();
        let (b0, b) = normal_equations_ridge(&x, &y, &w, lambda);
        match fit_surrogate(x.view(), &y, &w, lambda) {
            Ok(fit) => {
                let scale = 1.0f64.max(b0.abs());
                max_error = max_error.max((fit.intercept - b0).abs() / scale);
                for (u, v) in fit.coefficients.iter().zip(&b) {
                    max_error = max_error.max((u - v).abs() / 1.0f64.max(v.abs()));
                }
            }
            Err(e) => failures.push(format!("draw {k}: {e}")),
        }
        checks += 1;
    }

    let ds = sample_population(&DataGenSpec::new(Objective::SampleSize, seed).with_n(300))
        .expect("valid spec");
    let features = vec!["A".to_string(), "C".to_string(), "L".to_string()];
    let spec = ModelSpec::lr(&features, 0);
    let mut net = Network::zeros(&spec.widths());
    net.layers[0].bias = array![0.8];
    let model = TrainedModel::from_parts(spec, InputScaler::identity(3), net).expect("valid parts");
    let cfg = ExplainerConfig::default().with_seed(seed);
    match FeatureScaler::fit(&ds, &features, &[], &cfg) {
        Ok(scaler) => {
            for row in 0..50 {
                checks += 1;
                let inst = Instance::from_dataset(&ds, row, &features).expect("row exists");
                match explain(&model, &inst, &cfg, &scaler) {
                    Ok(e) if agreement(&e) == 1 => {}
                    Ok(_) => failures.push(format!("constant black box: row {row} disagrees")),
                    Err(e) => failures.push(format!("constant black box: row {row}: {e}")),
                }
            }
        }
        Err(e) => failures.push(format!("scaler: {e}")),
    }
    SuiteResult {
        name: "surrogate oracle",
        checks,
        notes: String::new(),
        max_error,
        tolerance: TOL,
        failures,
        elapsed: start.elapsed(),
    }
}

/// Backprop against central finite differences for LR and MLP, `draws` random
/// (parameters, batch) pairs each.
pub fn gradient_suite(draws: usize, seed: u64) -> SuiteResult {
    const TOL: f64 = 1e-3;
    let start = Instant::now();
    let ds = sample_population(&DataGenSpec::new(Objective::ConceptShift, seed).with_n(2000))
        .expect("valid spec");
    let features = ["A", "C", "L"];
    let mut r = rng::stream(seed, 2);
    let mut max_error: f64 = 0.0;
    let mut failures = Vec::new();
    let mut checks = 0;
    let mut skipped = 0;
    for k in 0..draws {
        let rows: Vec<usize> = (0..r.random_range(2..=4)).map(|_| r.random_range(0..ds.n_rows())).collect();
        let batch = ds.select_rows(&rows);
        for spec in [
            ModelSpec::lr(&features, seed.wrapping_add(k as u64)),
            ModelSpec::mlp(&features, seed.wrapping_add(k as u64)),
        ] {
            checks += 1;
            match gradient_check(&spec, &batch) {
                Ok(c) => {
                    max_error = max_error.max(c.max_rel_error);
                    skipped += c.skipped_at_kinks;
                }
                Err(e) => failures.push(format!("draw {k} {}: {e}", spec.kind)),
            }
        }
    }
    SuiteResult {
        name: "gradient check",
        checks,
        notes: format!("{skipped} probes skipped at ReLU kinks"),
        max_error,
        tolerance: TOL,
        failures,
        elapsed: start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_equations_reduce_to_ols() {
        // y = 1 + 2x exactly; with tiny λ the solution approaches OLS.
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (b0, b) = normal_equations_ridge(&x, &y, &[1.0; 4], 1e-12);
        assert!((b0 - 1.0).abs() < 1e-9 && (b[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn suites_pass_small() {
        for s in [metric_suite(10, 1), surrogate_suite(10, 1), gradient_suite(2, 1)] {
            assert!(s.passed(), "{} {:?} {}", s.name, s.failures, s.max_error);
        }
    }
}
