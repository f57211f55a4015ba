use ndarray::{Array1, ArrayView1, ArrayView2};

use super::{ExplainerConfig, FeatureScaler, KernelWidth};

pub fn resolve_kernel_width(cfg: &ExplainerConfig, d: usize) -> f64 {
    match cfg.kernel_width {
        KernelWidth::Auto => 0.75 * (d as f64).sqrt(),
        KernelWidth::Fixed(w) => w,
    }
}

/// Squared distance: standardized Euclidean over continuous slots plus one per
/// mismatched categorical group.
fn squared_distance(row: ArrayView1<'_, f64>, instance: ArrayView1<'_, f64>, scaler: &FeatureScaler) -> f64 {
    let mut d2 = 0.0;
    for (j, stat) in scaler.continuous.iter().enumerate() {
        if let Some((_, sd)) = stat {
            if *sd > 0.0 {
                d2 += ((row[j] - instance[j]) / sd).powi(2);
            }
        }
    }
    for g in &scaler.groups {
        if g.slots.iter().any(|&s| row[s] != instance[s]) {
            d2 += 1.0;
        }
    }
    d2
}

/// `exp(-distance² / width²)` for every perturbation row.
pub fn kernel_weights(
    perturbations: ArrayView2<'_, f64>,
    instance: ArrayView1<'_, f64>,
    scaler: &FeatureScaler,
    cfg: &ExplainerConfig,
) -> Array1<f64> {
    let width = resolve_kernel_width(cfg, scaler.n_features());
    let w2 = width * width;
    perturbations
        .rows()
        .into_iter()
        .map(|r| (-squared_distance(r, instance, scaler) / w2).exp())
        .collect()
}
