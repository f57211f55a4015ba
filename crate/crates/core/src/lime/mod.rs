//! Tabular LIME.
//!
//! For one instance: draw perturbations (centred on it by default, or on the
//! training means as in the reference tool), score them with the
//! black box, weight them with an exponential kernel on standardized distance,
//! and fit a weighted ridge regression. The surrogate's value at the instance
//! is compared with the black box's prediction there.

mod dump;
mod explain;
mod kernel;
mod perturb;
mod scaler;
mod surrogate;

use std::collections::BTreeSet;

pub use dump::{read_dump, write_dump, DumpRow};
pub use explain::{agreement, explain, explain_batch, Instance, LocalExplanation};
pub use kernel::{kernel_weights, resolve_kernel_width};
pub use perturb::perturb;
pub use scaler::{CategoricalGroup, FeatureScaler};
pub use surrogate::{fit_surrogate, SurrogateFit};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelWidth {
    /// `0.75 · sqrt(d)` for `d` model features.
    Auto,
    Fixed(f64),
}

/// What the surrogate regresses on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateTarget {
    /// Black-box class-1 probability.
    Probability,
    /// Black-box hard label.
    HardLabel,
}

/// Where continuous perturbations are centred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleCentre {
    /// `x_j + z·sd_j`.
    Instance,
    /// `mean_j + z·sd_j`, the training-column mean.
    TrainingMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplainerConfig {
    pub n_samples: usize,
    pub kernel_width: KernelWidth,
    pub ridge_lambda: f64,
    pub seed: u64,
    /// Continuous-kind columns to treat as categorical. Binary columns are
    /// always categorical.
    pub categorical_columns: BTreeSet<String>,
    pub target: SurrogateTarget,
    pub centre: SampleCentre,
}

impl Default for ExplainerConfig {
    fn default() -> Self {
        ExplainerConfig {
            n_samples: 1000,
            kernel_width: KernelWidth::Auto,
            ridge_lambda: 1.0,
            seed: 0,
            categorical_columns: BTreeSet::new(),
            target: SurrogateTarget::Probability,
            centre: SampleCentre::Instance,
        }
    }
}

impl ExplainerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        use crate::Error;
        if self.n_samples < 2 {
            return Err(Error::config("n_samples", "must be at least 2"));
        }
        if let KernelWidth::Fixed(w) = self.kernel_width {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::config("kernel_width", format!("must be positive, got {w}")));
            }
        }
        if !(self.ridge_lambda >= 0.0 && self.ridge_lambda.is_finite()) {
            return Err(Error::config("ridge_lambda", "must be non-negative"));
        }
        Ok(())
    }
}
