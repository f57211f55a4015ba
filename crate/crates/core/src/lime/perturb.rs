use ndarray::{Array2, ArrayView1};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{ExplainerConfig, FeatureScaler, SampleCentre};
use crate::{Error, Result};

/// `n_samples × d` perturbations around `instance` (model feature order).
///
/// Row 0 is the instance itself. Continuous slots get `c_j + z·sd_j` with
/// `c` chosen by `cfg.centre`; categorical groups are redrawn from their
/// training frequencies.
pub fn perturb(
    instance: ArrayView1<'_, f64>,
    scaler: &FeatureScaler,
    cfg: &ExplainerConfig,
    rng: &mut impl Rng,
) -> Result<Array2<f64>> {
    let d = scaler.n_features();
    if instance.len() != d {
        return Err(Error::Schema(format!(
            "instance has {} values, explainer expects {d}",
            instance.len()
        )));
    }
    let n = cfg.n_samples;
    let mut out = Array2::<f64>::zeros((n, d));
    out.row_mut(0).assign(&instance);
    for i in 1..n {
        let mut row = out.row_mut(i);
        for (j, stat) in scaler.continuous.iter().enumerate() {
            if let Some((mean, sd)) = stat {
                let z: f64 = rng.sample(StandardNormal);
                let centre = match cfg.centre {
                    SampleCentre::Instance => instance[j],
                    SampleCentre::TrainingMean => *mean,
                };
                row[j] = centre + z * sd;
            }
        }
        for g in &scaler.groups {
            let pattern = &g.patterns[g.draw(rng.random())];
            for (&slot, &v) in g.slots.iter().zip(pattern) {
                row[slot] = v;
            }
        }
    }
    Ok(out)
}
