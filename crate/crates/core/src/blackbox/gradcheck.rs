use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use super::network::flatten;
use super::{InputScaler, ModelKind, ModelSpec};
use crate::dgp::TabularDataset;
use crate::rng::{self, tag};
use crate::{Error, Result};

const STEP: f64 = 1e-5;
const WEIGHT_DECAY: f64 = 1e-4;
const MAX_ROWS: usize = 8;
const MAX_PROBES: usize = 600;

/// Outcome of a finite-difference gradient check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck {
    /// Largest `|analytic − numeric| / max(|analytic|, |numeric|, 1e-7)`.
    pub max_rel_error: f64,
    pub probed: usize,
    /// Probes skipped because `±step` moved a hidden unit across the ReLU
    /// kink, where central differences do not estimate the derivative.
    pub skipped_at_kinks: usize,
}

/// Compare the backpropagated gradient of the training objective with central
/// finite differences.
///
/// Parameters are drawn at random from `spec.seed` (fan-in uniform for the
/// MLP, standard normal for LR) so that the check does not sit at a trivial
/// point. Every parameter is probed when there are at most `MAX_PROBES`;
/// otherwise a seeded uniform subset of that size.
pub fn gradient_check(spec: &ModelSpec, batch: &TabularDataset) -> Result<GradientCheck> {
    if batch.n_rows() > MAX_ROWS || batch.is_empty() {
        return Err(Error::config(
            "batch",
            format!("gradient check takes 1..={MAX_ROWS} rows, got {}", batch.n_rows()),
        ));
    }
    let raw = batch.matrix_of(&spec.feature_names)?;
    let x = InputScaler::fit(batch, &spec.feature_names)?.transform(raw.view());
    let y: Vec<f64> = batch.y().iter().map(|&v| f64::from(v)).collect();

    let mut r = rng::stream(spec.seed, tag::MODEL_INIT);
    let mut net = spec.init_network();
    if spec.kind == ModelKind::Lr {
        let draws: Vec<f64> = (0..net.n_params()).map(|_| r.sample(StandardNormal)).collect();
        net.set_flat_params(&draws);
    }
    let (_, _, grads) = net.loss_and_gradient(x.view(), &y, WEIGHT_DECAY);
    let analytic = flatten(&grads);
    let base = net.flat_params();
    let pattern = net.relu_pattern(x.view());
    let coords: Vec<usize> = if base.len() <= MAX_PROBES {
        (0..base.len()).collect()
    } else {
        index::sample(&mut r, base.len(), MAX_PROBES).into_vec()
    };

    let mut probe = net.clone();
    let mut params = base.clone();
    let mut out = GradientCheck {
        max_rel_error: 0.0,
        probed: 0,
        skipped_at_kinks: 0,
    };
    for k in coords {
        let mut eval = |value: f64| {
            params[k] = value;
            probe.set_flat_params(&params);
            let (_, loss, _) = probe.loss_and_gradient(x.view(), &y, WEIGHT_DECAY);
            (loss, probe.relu_pattern(x.view()) == pattern)
        };
        let (up, same_up) = eval(base[k] + STEP);
        let (down, same_down) = eval(base[k] - STEP);
        params[k] = base[k];
        if !(same_up && same_down) {
            out.skipped_at_kinks += 1;
            continue;
        }
        let numeric = (up - down) / (2.0 * STEP);
        let denom = analytic[k].abs().max(numeric.abs()).max(1e-7);
        out.max_rel_error = out.max_rel_error.max((analytic[k] - numeric).abs() / denom);
        out.probed += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{sample_population, DataGenSpec, Objective};

    fn batch(rows: usize, seed: u64) -> TabularDataset {
        let ds = sample_population(&DataGenSpec::new(Objective::SampleSize, seed).with_n(50)).unwrap();
        ds.select_rows(&(0..rows).collect::<Vec<_>>())
    }

    #[test]
    fn lr_gradient_matches_finite_differences() {
        let c = gradient_check(&ModelSpec::lr(&["A", "C", "L"], 3), &batch(4, 1)).unwrap();
        assert_eq!((c.probed, c.skipped_at_kinks), (4, 0));
        assert!(c.max_rel_error <= 1e-4, "{c:?}");
    }

    #[test]
    fn mlp_gradient_matches_finite_differences() {
        let c = gradient_check(&ModelSpec::mlp(&["A", "C", "L"], 3), &batch(2, 1)).unwrap();
        assert_eq!(c.probed + c.skipped_at_kinks, MAX_PROBES);
        assert!(c.probed > MAX_PROBES / 2, "{c:?}");
        assert!(c.max_rel_error <= 1e-3, "{c:?}");
    }

    #[test]
    fn oversized_batch_is_rejected() {
        assert!(gradient_check(&ModelSpec::lr(&["L"], 0), &batch(9, 1)).is_err());
    }
}
