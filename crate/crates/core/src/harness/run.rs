use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::{AdultKind, ExperimentPlan, ModelVariant, Omitted, PlanSource};
use crate::adult::{self, AdultConfig, AdultScenario, EncodedDataset};
use crate::blackbox::{group_accuracy, train, ModelKind, ModelSpec};
use crate::dgp::{
    apply_covariate_shift, apply_proportion_filter, sample_population, split_indices,
    split_train_test, DataGenSpec, Objective, TabularDataset, ADVANTAGED, DISADVANTAGED,
};
use crate::lime::{explain_batch, write_dump, FeatureScaler, Instance};
use crate::metrics::{
    fidelity_from_explanations, fidelity_report, group_summary, max_fidelity_gap,
    mean_fidelity_gap, FidelityRecord, FidelityReport, QKind,
};
use crate::rng::{derive, tag};
use crate::{Error, Result};

/// One value of one metric for one (run, trial). Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub run_id: String,
    pub objective: String,
    pub model_variant: String,
    pub sweep_param: String,
    pub sweep_value: f64,
    pub trial: usize,
    pub seed: u64,
    /// `accuracy`, `residual_error`, or `none` for `bb_acc_gap`.
    pub q_kind: String,
    /// `max_gap`, `mean_gap`, `group_Q`, `overall_Q` or `bb_acc_gap`.
    pub metric: String,
    pub group_or_all: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureRecord {
    pub run_id: String,
    /// `None` when the failure concerns the cross-trial report.
    pub trial: Option<usize>,
    pub stage: &'static str,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<FailureRecord>,
    /// Cross-trial report per `(run_id, q_kind)`, intervals from `plan.ci`.
    pub reports: Vec<(String, FidelityReport)>,
}

/// Inputs shared by every variant of one (grid point, trial).
struct TrialData {
    train: TabularDataset,
    test: TabularDataset,
    features: Vec<String>,
    one_hot_blocks: Vec<Vec<String>>,
    sensitive_fields: Vec<String>,
    confounder_fields: Vec<String>,
}

impl TrialData {
    fn variant_inputs(&self, variant: ModelVariant) -> (Vec<String>, Vec<Vec<String>>) {
        let dropped: &[String] = match variant.omitted() {
            None => &[],
            Some(Omitted::Sensitive) => &self.sensitive_fields,
            Some(Omitted::Confounder) => &self.confounder_fields,
        };
        let features = self.features.iter().filter(|f| !dropped.contains(f)).cloned().collect();
        let blocks = self
            .one_hot_blocks
            .iter()
            .filter(|b| !b.iter().any(|s| dropped.contains(s)))
            .cloned()
            .collect();
        (features, blocks)
    }
}

/// Loaded once per plan.
enum Shared {
    Synthetic(Objective),
    Adult(AdultKind, Box<EncodedDataset>),
}

pub fn run_id(plan: &ExperimentPlan, variant: ModelVariant, value: f64) -> String {
    format!("{}:{}:{}={}", plan.source.label(), variant, plan.source.sweep_param(), value)
}

pub fn trial_seed(plan: &ExperimentPlan, trial: usize) -> u64 {
    plan.base_seed.wrapping_add(trial as u64)
}

/// Run every (grid point × variant × trial) cell.
///
/// Cell failures are recorded and the plan continues; only plan validation
/// and Adult file loading abort the run. Output order is grid, variant, trial.
pub fn run_plan(plan: &ExperimentPlan) -> Result<RunOutput> {
    plan.validate()?;
    let shared = match &plan.source {
        PlanSource::Synthetic(o) => Shared::Synthetic(*o),
        PlanSource::Adult { kind, data_dir } => {
            let cfg = AdultConfig::new(data_dir);
            let raw = adult::load_raw(&cfg)?;
            Shared::Adult(*kind, Box::new(adult::preprocess(&raw.records, &cfg)?))
        }
    };

    let cells: Vec<(usize, usize)> = (0..plan.grid.len())
        .flat_map(|g| (0..plan.trials).map(move |t| (g, t)))
        .collect();
    type VariantOutcome = std::result::Result<(Vec<ResultRow>, Vec<(QKind, Vec<FidelityRecord>)>), FailureRecord>;
    let outcomes: Vec<Vec<VariantOutcome>> = cells
        .par_iter()
        .map(|&(g, t)| {
            let value = plan.grid[g];
            let seed = trial_seed(plan, t);
            match prepare_trial(plan, &shared, value, seed) {
                Err(e) => plan
                    .variants
                    .iter()
                    .map(|&v| {
                        Err(FailureRecord {
                            run_id: run_id(plan, v, value),
                            trial: Some(t),
                            stage: "data",
                            message: e.to_string(),
                        })
                    })
                    .collect(),
                Ok(data) => plan
                    .variants
                    .iter()
                    .map(|&v| run_variant(plan, &data, v, value, t, seed))
                    .collect(),
            }
        })
        .collect();

    let mut by_cell = BTreeMap::new();
    for (&(g, t), per_variant) in cells.iter().zip(outcomes) {
        for (vi, outcome) in per_variant.into_iter().enumerate() {
            by_cell.insert((g, vi, t), outcome);
        }
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut records: BTreeMap<(usize, usize, QKind), Vec<Vec<FidelityRecord>>> = BTreeMap::new();
    for ((g, vi, _t), outcome) in by_cell {
        match outcome {
            Ok((r, recs)) => {
                rows.extend(r);
                for (q, rec) in recs {
                    records.entry((g, vi, q)).or_default().push(rec);
                }
            }
            Err(f) => failures.push(f),
        }
    }

    let mut reports = Vec::new();
    for ((g, vi, q), trials) in records {
        let id = run_id(plan, plan.variants[vi], plan.grid[g]);
        match fidelity_report(&trials, q, plan.ci, plan.ci_level) {
            Ok(rep) => reports.push((id, rep)),
            Err(e) => failures.push(FailureRecord {
                run_id: id,
                trial: None,
                stage: "report",
                message: e.to_string(),
            }),
        }
    }
    Ok(RunOutput {
        rows,
        failures,
        reports,
    })
}

fn prepare_trial(plan: &ExperimentPlan, shared: &Shared, value: f64, seed: u64) -> Result<TrialData> {
    match shared {
        Shared::Synthetic(objective) => {
            let mut spec = DataGenSpec::new(*objective, derive(seed, tag::POPULATION)).with_n(plan.n);
            match objective {
                Objective::ConceptShift => spec = spec.with_beta(value),
                Objective::OmittedVariable => spec = spec.with_alpha(value),
                _ => {}
            }
            let population = sample_population(&spec)?;
            let (train, test) = split_train_test(&population, plan.train_fraction, derive(seed, tag::SPLIT))?;
            let train = match objective {
                Objective::SampleSize => apply_proportion_filter(&train, value, derive(seed, tag::PROPORTION))?,
                Objective::CovariateShift => apply_covariate_shift(&train, value)?.dataset,
                _ => train,
            };
            Ok(TrialData {
                train,
                test,
                features: vec!["A".into(), "C".into(), "L".into()],
                one_hot_blocks: Vec::new(),
                sensitive_fields: vec!["A".into()],
                confounder_fields: vec!["C".into()],
            })
        }
        Shared::Adult(kind, enc) => {
            let (tr, te) = split_indices(enc.dataset.n_rows(), plan.train_fraction, derive(seed, tag::SPLIT))?;
            let scaled = enc.standardized(&tr)?;
            let train = scaled.select_rows(&tr);
            let test = scaled.select_rows(&te);
            let scenario = match kind {
                AdultKind::Proportion => Some(AdultScenario::Proportion(value)),
                AdultKind::FemaleFraction => Some(AdultScenario::FemaleFraction(value)),
                AdultKind::Hours => Some(AdultScenario::HoursCap(value)),
                AdultKind::Concept => Some(AdultScenario::Balanced5050),
                AdultKind::Omitted => None,
            };
            let train = match scenario {
                Some(s) => adult::build_scenario(&train, &s, derive(seed, tag::BALANCE))?,
                None => train,
            };
            let confounder_fields = scaled
                .blocks
                .iter()
                .filter(|b| b.field == "native-country")
                .flat_map(|b| b.slot_names())
                .collect();
            Ok(TrialData {
                features: scaled.feature_names(),
                one_hot_blocks: scaled.one_hot_blocks(),
                sensitive_fields: vec!["sex".into()],
                confounder_fields,
                train: train.dataset,
                test: test.dataset,
            })
        }
    }
}

/// Test rows to explain: all of each group, or a uniform sample of `cap`.
pub fn select_instances(test: &TabularDataset, cap: Option<usize>, seed: u64) -> Vec<usize> {
    let mut rng = crate::rng::stream(seed, tag::EXPLAIN_SELECT);
    let mut out = Vec::new();
    for group in [DISADVANTAGED, ADVANTAGED] {
        let members = test.group_indices(group);
        match cap {
            Some(k) if members.len() > k => {
                let mut picked: Vec<usize> = index::sample(&mut rng, members.len(), k)
                    .into_iter()
                    .map(|j| members[j])
                    .collect();
                picked.sort_unstable();
                out.extend(picked);
            }
            _ => out.extend(members),
        }
    }
    out.sort_unstable();
    out
}

type CellRecords = Vec<(QKind, Vec<FidelityRecord>)>;

fn run_variant(
    plan: &ExperimentPlan,
    data: &TrialData,
    variant: ModelVariant,
    value: f64,
    trial: usize,
    seed: u64,
) -> std::result::Result<(Vec<ResultRow>, CellRecords), FailureRecord> {
    let id = run_id(plan, variant, value);
    let fail = |stage: &'static str, e: Error| FailureRecord {
        run_id: id.clone(),
        trial: Some(trial),
        stage,
        message: e.to_string(),
    };
    let (features, blocks) = data.variant_inputs(variant);
    let model_seed = derive(seed, tag::MODEL_INIT);
    let spec = match variant.kind() {
        ModelKind::Lr => ModelSpec::lr(&features, model_seed),
        ModelKind::Mlp => ModelSpec::mlp(&features, model_seed),
    };
    let model = train(&spec, &data.train, &plan.train).map_err(|e| fail("train", e))?;

    let lime_cfg = plan.lime.clone().with_seed(derive(seed, tag::LIME));
    let explanations = (|| {
        let scaler = FeatureScaler::fit(&data.train, &features, &blocks, &lime_cfg)?;
        let instances = select_instances(&data.test, plan.max_explained_per_group, seed)
            .into_iter()
            .map(|row| Instance::from_dataset(&data.test, row, &features))
            .collect::<Result<Vec<_>>>()?;
        explain_batch(&model, &instances, &lime_cfg, &scaler)
    })()
    .map_err(|e| fail("explain", e))?;
    if let Some(dir) = &plan.dump_dir {
        let path = dir.join(dump_file_name(&id, trial));
        write_dump(&explanations, &path).map_err(|e| fail("dump", e))?;
    }

    let row = |q_kind: &str, metric: &str, group_or_all: String, v: f64| ResultRow {
        run_id: id.clone(),
        objective: plan.source.label(),
        model_variant: variant.to_string(),
        sweep_param: plan.source.sweep_param().to_string(),
        sweep_value: value,
        trial,
        seed,
        q_kind: q_kind.to_string(),
        metric: metric.to_string(),
        group_or_all,
        value: v,
    };
    let mut rows = Vec::new();
    let mut kept = Vec::new();
    for &q in &plan.q_kinds {
        let records = fidelity_from_explanations(&explanations, q);
        let metrics = (|| {
            let s = group_summary(&records)?;
            Ok::<_, Error>((s, max_fidelity_gap(&records)?.0, mean_fidelity_gap(&records)?))
        })()
        .map_err(|e| fail("metrics", e))?;
        let (summary, max_gap, mean_gap) = metrics;
        let qs = q.as_str();
        rows.push(row(qs, "max_gap", "all".into(), max_gap));
        rows.push(row(qs, "mean_gap", "all".into(), mean_gap));
        for (j, m) in summary.means.iter().enumerate() {
            rows.push(row(qs, "group_Q", j.to_string(), *m));
        }
        rows.push(row(qs, "overall_Q", "all".into(), summary.overall));
        kept.push((q, records));
    }
    let acc = |g| group_accuracy(&model, &data.test, g).map_err(|e| fail("metrics", e));
    rows.push(row("none", "bb_acc_gap", "all".into(), acc(ADVANTAGED)? - acc(DISADVANTAGED)?));
    Ok((rows, kept))
}

/// File name of the explanation dump for one (run, trial).
pub fn dump_file_name(run_id: &str, trial: usize) -> String {
    let safe: String = run_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.=".contains(c) { c } else { '_' })
        .collect();
    format!("{safe}_trial{trial}.csv")
}

pub fn write_results(rows: &[ResultRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record([
            "run_id", "objective", "model_variant", "sweep_param", "sweep_value", "trial", "seed",
            "q_kind", "metric", "group_or_all", "value",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub fn write_failures(failures: &[FailureRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["run_id", "trial", "stage", "message"])?;
    for f in failures {
        let trial = f.trial.map(|t| t.to_string()).unwrap_or_default();
        w.write_record([f.run_id.as_str(), &trial, f.stage, &f.message])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::objective_defaults;
    use crate::lime::read_dump;

    fn small_plan(objective: Objective) -> ExperimentPlan {
        let mut p = objective_defaults(objective);
        p.n = 1500;
        p.trials = 2;
        p.train.epochs = 5;
        p.lime.n_samples = 200;
        p.max_explained_per_group = Some(40);
        p.variants = vec![ModelVariant::LrA, ModelVariant::LrNoA];
        p
    }

    #[test]
    fn every_cell_emits_rows() {
        let mut p = small_plan(Objective::CovariateShift);
        p.grid = vec![0.4, 1.0];
        let out = run_plan(&p).unwrap();
        assert!(out.failures.is_empty(), "{:?}", out.failures);
        // Per cell: 2 q-kinds × (max, mean, 2 groups, overall) + bb_acc_gap.
        assert_eq!(out.rows.len(), p.n_cells() * 11);
        let mut keys: Vec<_> = out
            .rows
            .iter()
            .map(|r| (r.run_id.clone(), r.trial, r.metric.clone(), r.group_or_all.clone(), r.q_kind.clone()))
            .collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), out.rows.len());
        assert_eq!(out.reports.len(), 2 * 2 * 2);
        assert_eq!(out.rows[0].seed, p.base_seed);
    }

    #[test]
    fn rerun_is_byte_identical() {
        let mut p = small_plan(Objective::SampleSize);
        p.grid = vec![0.1];
        p.base_seed = 17;
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        write_results(&run_plan(&p).unwrap().rows, &a).unwrap();
        write_results(&run_plan(&p).unwrap().rows, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        let back = read_results(&a).unwrap();
        assert_eq!(back, run_plan(&p).unwrap().rows);
    }

    #[test]
    fn failures_are_logged_and_plan_continues() {
        let mut p = small_plan(Objective::SampleSize);
        // 0.9 is outside the proportion filter's domain.
        p.grid = vec![0.9, 0.5];
        let out = run_plan(&p).unwrap();
        assert_eq!(out.failures.len(), 2 * 2);
        assert!(out.failures.iter().all(|f| f.stage == "data" && f.run_id.contains("0.9")));
        assert_eq!(out.rows.len(), 2 * 2 * 11);
    }

    #[test]
    fn pooled_overall_matches_dump() {
        let mut p = small_plan(Objective::ConceptShift);
        p.grid = vec![-0.5];
        p.trials = 1;
        let dir = tempfile::tempdir().unwrap();
        p.dump_dir = Some(dir.path().to_path_buf());
        let out = run_plan(&p).unwrap();
        for v in &p.variants {
            let id = run_id(&p, *v, -0.5);
            let (_, rows) = read_dump(&dir.path().join(dump_file_name(&id, 0))).unwrap();
            let records: Vec<FidelityRecord> = rows
                .iter()
                .map(|r| FidelityRecord {
                    instance_id: r.instance_id,
                    group: usize::from(r.group),
                    q_value: f64::from(r.agreement),
                })
                .collect();
            let from_dump = group_summary(&records).unwrap().overall;
            let reported = out
                .rows
                .iter()
                .find(|r| r.run_id == id && r.metric == "overall_Q" && r.q_kind == "accuracy")
                .unwrap()
                .value;
            assert!((from_dump - reported).abs() < 1e-12);
        }
    }

    #[test]
    fn selection_caps_each_group() {
        let ds = sample_population(&DataGenSpec::new(Objective::SampleSize, 2).with_n(600)).unwrap();
        let rows = select_instances(&ds, Some(50), 4);
        let g0 = rows.iter().filter(|&&i| ds.sensitive()[i] == 0).count();
        assert_eq!((g0, rows.len()), (50, 100));
        assert_eq!(select_instances(&ds, None, 4).len(), 600);
        assert_eq!(rows, select_instances(&ds, Some(50), 4));
    }

    #[test]
    fn missing_adult_files_fail_at_startup() {
        let dir = tempfile::tempdir().unwrap();
        let p = crate::harness::adult_plan(AdultKind::Concept, dir.path());
        assert!(matches!(run_plan(&p), Err(Error::MissingFile(_))));
    }

    #[test]
    fn variant_feature_sets() {
        let data = TrialData {
            train: sample_population(&DataGenSpec::new(Objective::SampleSize, 2).with_n(20)).unwrap(),
            test: sample_population(&DataGenSpec::new(Objective::SampleSize, 3).with_n(20)).unwrap(),
            features: vec!["A".into(), "C".into(), "L".into()],
            one_hot_blocks: vec![],
            sensitive_fields: vec!["A".into()],
            confounder_fields: vec!["C".into()],
        };
        assert_eq!(data.variant_inputs(ModelVariant::MlpNoA).0, vec!["C", "L"]);
        assert_eq!(data.variant_inputs(ModelVariant::LrNoC).0, vec!["A", "L"]);
        assert_eq!(data.variant_inputs(ModelVariant::MlpC).0, vec!["A", "C", "L"]);
    }
}
