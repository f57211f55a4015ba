use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::blackbox::{ModelKind, TrainConfig};
use crate::dgp::Objective;
use crate::lime::{ExplainerConfig, KernelWidth, SampleCentre};
use crate::metrics::{CiMethod, QKind};
use crate::{Error, Result};

/// Which input a variant leaves out of the black box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Omitted {
    Sensitive,
    Confounder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelVariant {
    LrA,
    LrNoA,
    MlpA,
    MlpNoA,
    LrC,
    LrNoC,
    MlpC,
    MlpNoC,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 8] = [
        ModelVariant::LrA,
        ModelVariant::LrNoA,
        ModelVariant::MlpA,
        ModelVariant::MlpNoA,
        ModelVariant::LrC,
        ModelVariant::LrNoC,
        ModelVariant::MlpC,
        ModelVariant::MlpNoC,
    ];
    pub const A_VARIANTS: [ModelVariant; 4] =
        [ModelVariant::LrA, ModelVariant::LrNoA, ModelVariant::MlpA, ModelVariant::MlpNoA];
    pub const C_VARIANTS: [ModelVariant; 4] =
        [ModelVariant::LrC, ModelVariant::LrNoC, ModelVariant::MlpC, ModelVariant::MlpNoC];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelVariant::LrA => "LR_A",
            ModelVariant::LrNoA => "LR_noA",
            ModelVariant::MlpA => "MLP_A",
            ModelVariant::MlpNoA => "MLP_noA",
            ModelVariant::LrC => "LR_C",
            ModelVariant::LrNoC => "LR_noC",
            ModelVariant::MlpC => "MLP_C",
            ModelVariant::MlpNoC => "MLP_noC",
        }
    }

    pub fn kind(self) -> ModelKind {
        match self {
            ModelVariant::LrA | ModelVariant::LrNoA | ModelVariant::LrC | ModelVariant::LrNoC => ModelKind::Lr,
            _ => ModelKind::Mlp,
        }
    }

    pub fn omitted(self) -> Option<Omitted> {
        match self {
            ModelVariant::LrNoA | ModelVariant::MlpNoA => Some(Omitted::Sensitive),
            ModelVariant::LrNoC | ModelVariant::MlpNoC => Some(Omitted::Confounder),
            _ => None,
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('¬', "no");
        ModelVariant::ALL
            .into_iter()
            .find(|v| v.as_str().eq_ignore_ascii_case(&norm))
            .ok_or_else(|| Error::config("variants", format!("unknown model variant `{s}`")))
    }
}

/// Adult experiment families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdultKind {
    /// Male share of the training split swept over the grid.
    Proportion,
    /// Fraction of female training rows kept, swept over the grid.
    FemaleFraction,
    /// Male rows with hours at or above the grid value removed.
    Hours,
    /// Balanced 50/50 training split.
    Concept,
    /// Nationality toggled via the C-variants.
    Omitted,
}

impl AdultKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AdultKind::Proportion => "proportion",
            AdultKind::FemaleFraction => "female-fraction",
            AdultKind::Hours => "hours",
            AdultKind::Concept => "concept",
            AdultKind::Omitted => "omitted",
        }
    }
}

impl FromStr for AdultKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "proportion" => AdultKind::Proportion,
            "female-fraction" | "females" => AdultKind::FemaleFraction,
            "hours" => AdultKind::Hours,
            "concept" => AdultKind::Concept,
            "omitted" => AdultKind::Omitted,
            other => return Err(Error::config("scenario", format!("unknown adult scenario `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanSource {
    Synthetic(Objective),
    Adult { kind: AdultKind, data_dir: PathBuf },
}

impl PlanSource {
    /// Label written to the `objective` result column.
    pub fn label(&self) -> String {
        match self {
            PlanSource::Synthetic(o) => o.as_str().to_string(),
            PlanSource::Adult { kind, .. } => format!("adult-{}", kind.as_str()),
        }
    }

    /// Name of the swept quantity.
    pub fn sweep_param(&self) -> &'static str {
        match self {
            PlanSource::Synthetic(Objective::SampleSize) => "p_disadv",
            PlanSource::Synthetic(Objective::CovariateShift) => "overlap",
            PlanSource::Synthetic(Objective::ConceptShift) => "beta",
            PlanSource::Synthetic(Objective::OmittedVariable) => "alpha",
            PlanSource::Adult { kind, .. } => match kind {
                AdultKind::Proportion => "p_male",
                AdultKind::FemaleFraction => "female_fraction",
                AdultKind::Hours => "hours_cap",
                AdultKind::Concept => "female_share",
                AdultKind::Omitted => "none",
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub source: PlanSource,
    pub grid: Vec<f64>,
    pub variants: Vec<ModelVariant>,
    pub trials: usize,
    pub base_seed: u64,
    /// Population size for synthetic objectives.
    pub n: usize,
    pub train_fraction: f64,
    pub train: TrainConfig,
    /// Seed is replaced per trial.
    pub lime: ExplainerConfig,
    /// `None` explains every test instance.
    pub max_explained_per_group: Option<usize>,
    pub q_kinds: Vec<QKind>,
    pub ci: CiMethod,
    pub ci_level: f64,
    /// Write one explanation dump per (run, trial) here.
    pub dump_dir: Option<PathBuf>,
}

fn base_plan(source: PlanSource, grid: Vec<f64>, variants: Vec<ModelVariant>) -> ExperimentPlan {
    ExperimentPlan {
        source,
        grid,
        variants,
        trials: 5,
        base_seed: 0,
        n: 20_000,
        train_fraction: 0.7,
        train: TrainConfig::default(),
        lime: ExplainerConfig::default(),
        max_explained_per_group: Some(500),
        q_kinds: vec![QKind::Accuracy, QKind::ResidualError],
        ci: CiMethod::TrialT,
        ci_level: 0.95,
        dump_dir: None,
    }
}

/// Sweep grid and variants for each synthetic objective, `n = 20000`.
pub fn objective_defaults(objective: Objective) -> ExperimentPlan {
    let grid = match objective {
        Objective::SampleSize => (1..=10).map(|k| k as f64 * 5.0 / 100.0).collect(),
        Objective::CovariateShift => vec![0.2, 0.4, 0.6, 0.8, 1.0],
        Objective::ConceptShift => vec![1.5, 0.5, -0.5],
        Objective::OmittedVariable => vec![0.0, 0.5, 1.0, 1.5],
    };
    let variants = match objective {
        Objective::OmittedVariable => ModelVariant::C_VARIANTS.to_vec(),
        _ => ModelVariant::A_VARIANTS.to_vec(),
    };
    base_plan(PlanSource::Synthetic(objective), grid, variants)
}

/// The Adult protocol for one scenario family. Files are checked at run time.
pub fn adult_plan(kind: AdultKind, data_dir: impl Into<PathBuf>) -> ExperimentPlan {
    let grid = match kind {
        AdultKind::Proportion => (1..=10).map(|k| k as f64 * 5.0 / 100.0).collect(),
        AdultKind::FemaleFraction => (1..=10).map(|k| k as f64 / 10.0).collect(),
        AdultKind::Hours => vec![100.0, 80.0, 60.0, 40.0, 20.0],
        AdultKind::Concept => vec![0.5],
        AdultKind::Omitted => vec![0.0],
    };
    let variants = match kind {
        AdultKind::Omitted => ModelVariant::C_VARIANTS.to_vec(),
        _ => ModelVariant::A_VARIANTS.to_vec(),
    };
    let mut plan = base_plan(
        PlanSource::Adult {
            kind,
            data_dir: data_dir.into(),
        },
        grid,
        variants,
    );
    plan.max_explained_per_group = None;
    plan
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::config("grid", "must not be empty"));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("grid", "values must be finite"));
        }
        if self.variants.is_empty() {
            return Err(Error::config("variants", "must not be empty"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.q_kinds.is_empty() {
            return Err(Error::config("q_kinds", "must not be empty"));
        }
        if self.max_explained_per_group == Some(0) {
            return Err(Error::config("max_explained_per_group", "must be positive or `all`"));
        }
        self.lime.validate()?;
        Ok(())
    }

    /// Number of (grid point, variant, trial) cells.
    pub fn n_cells(&self) -> usize {
        self.grid.len() * self.variants.len() * self.trials
    }

    /// Apply `key=value` overrides (see [`parse_config`]).
    pub fn apply_overrides(&mut self, entries: &BTreeMap<String, String>) -> Result<()> {
        for (key, value) in entries {
            self.set(key, value)?;
        }
        self.validate()
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::config(key, format!("cannot parse `{v}`")))
        }
        match key {
            "grid" => self.grid = parse_list(key, value)?,
            "variants" => {
                self.variants = value
                    .split(',')
                    .map(|v| v.trim().parse())
                    .collect::<Result<_>>()?
            }
            "trials" => self.trials = num(key, value)?,
            "seed" | "base_seed" => self.base_seed = num(key, value)?,
            "n" => self.n = num(key, value)?,
            "train_fraction" => self.train_fraction = num(key, value)?,
            "epochs" => self.train.epochs = num(key, value)?,
            "learning_rate" => self.train.learning_rate = num(key, value)?,
            "weight_decay" => self.train.weight_decay = num(key, value)?,
            "batch_size" => {
                self.train.batch_size = match value {
                    "full" | "none" => None,
                    v => Some(num(key, v)?),
                }
            }
            "lime_samples" | "n_samples" => self.lime.n_samples = num(key, value)?,
            "kernel_width" => {
                self.lime.kernel_width = match value {
                    "auto" => KernelWidth::Auto,
                    v => KernelWidth::Fixed(num(key, v)?),
                }
            }
            "ridge_lambda" => self.lime.ridge_lambda = num(key, value)?,
            "lime_centre" => {
                self.lime.centre = match value {
                    "instance" => SampleCentre::Instance,
                    "mean" | "training_mean" => SampleCentre::TrainingMean,
                    v => return Err(Error::config(key, format!("expected instance or mean, got `{v}`"))),
                }
            }
            "max_explained_per_group" | "cap" => {
                self.max_explained_per_group = match value {
                    "all" => None,
                    v => Some(num(key, v)?),
                }
            }
            "q_kinds" => {
                self.q_kinds = value
                    .split(',')
                    .map(|v| v.trim().parse())
                    .collect::<Result<_>>()?
            }
            "ci" => {
                self.ci = match value {
                    "t" | "trial" => CiMethod::TrialT,
                    "bootstrap" => CiMethod::Bootstrap {
                        resamples: 1000,
                        seed: self.base_seed,
                    },
                    other => return Err(Error::config(key, format!("unknown CI method `{other}`"))),
                }
            }
            "ci_level" => self.ci_level = num(key, value)?,
            "dump_dir" => self.dump_dir = Some(PathBuf::from(value)),
            "data" | "data_dir" => match &mut self.source {
                PlanSource::Adult { data_dir, .. } => *data_dir = PathBuf::from(value),
                PlanSource::Synthetic(_) => {
                    return Err(Error::config(key, "only applies to adult plans"));
                }
            },
            other => return Err(Error::config(other, "unknown plan key")),
        }
        Ok(())
    }
}

/// Comma-separated numbers.
pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::config(key, format!("cannot parse `{v}` as a number")))
        })
        .collect()
}

/// `key=value` lines; blank lines and `#` comments are ignored. Later keys win.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::ParseLine {
            line: k + 1,
            reason: format!("expected key=value, found `{line}`"),
        })?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}
