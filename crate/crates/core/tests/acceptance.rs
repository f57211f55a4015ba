//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion.
//!
//! The exact suites (1-3) and determinism (9) always decide the exit code.
//! The reproduction criteria (4-8) are stochastic comparisons with
//! reference values; a FAIL there is printed and counted, and turns the exit
//! code red only when `ACCEPTANCE_STRICT=1`.
//!
//! Criteria 4-7 run the default synthetic sweeps (n = 20000, 5 trials, 500
//! explained instances per group) and take over an hour on a
//! single core. Criterion 8 needs the UCI Adult files in `ADULT_DATA_DIR` or
//! `crates/core/data/adult`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use xdaudit::adult::{self, AdultConfig, EXPECTED_ROWS};
use xdaudit::dgp::Objective;
use xdaudit::harness::{
    adult_plan, lookup, objective_defaults, run_plan, summarize, write_results, AdultKind,
    ExperimentPlan, ModelVariant, ResultRow, SummaryRow,
};
use xdaudit::oracles;

const LEVEL: f64 = 0.95;
/// Criteria whose failure always fails the target.
const EXACT_CRITERIA: [u8; 4] = [1, 2, 3, 9];
const BASE_SEED: u64 = 0;

// Criterion 1-3 budgets.
const METRIC_DRAWS: usize = 100;
const METRIC_BUDGET: Duration = Duration::from_secs(1);
const SURROGATE_DRAWS: usize = 100;
const SURROGATE_BUDGET: Duration = Duration::from_secs(5);
const GRADIENT_DRAWS: usize = 20;
const GRADIENT_BUDGET: Duration = Duration::from_secs(30);

// Criterion 4, in raw units (0.01 = one percentage point).
const C4_LOW_OVERLAP_RANGE: (f64, f64) = (0.015, 0.08);
const C4_FULL_OVERLAP_MAX: f64 = 0.01;
const C4_NO_A_SPREAD_MAX: f64 = 0.02;
// Criterion 5.
const C5_RATIO_MIN: f64 = 3.0;
const C5_HIGH_SHIFT_MIN: f64 = 0.10;
const C5_LR_MAX: f64 = 0.02;
// Criterion 6.
const C6_SPREAD_MAX: f64 = 0.01;
// Criterion 7.
const C7_INCREASE_MIN: f64 = 0.005;
const C7_MLP_C_MAX: f64 = 0.005;
// Criterion 8.
const C8_P_MAX: f64 = 0.1;
const C8_MAX_GAP_TOL: f64 = 0.02;
const C8_MEAN_GAP_TOL: f64 = 0.03;
const C8_BB_GAP_TOL: f64 = 0.03;

#[derive(Clone, Copy, PartialEq)]
enum Status {
    Pass,
    Fail,
    Skip,
}

struct Outcome {
    id: u8,
    title: &'static str,
    status: Status,
    detail: String,
    elapsed: Duration,
}

fn pct(v: f64) -> String {
    format!("{:.2}%", 100.0 * v)
}

/// Trial-averaged `q_kind = accuracy` metric for one variant and grid value.
fn value(summary: &[SummaryRow], variant: ModelVariant, x: f64, metric: &str) -> f64 {
    let q = if metric == "bb_acc_gap" { "none" } else { "accuracy" };
    lookup(summary, variant.as_str(), x, q, metric)
        .map(|s| s.mean)
        .unwrap_or(f64::NAN)
}

fn spread(summary: &[SummaryRow], variant: ModelVariant, grid: &[f64]) -> f64 {
    let v: Vec<f64> = grid.iter().map(|&x| value(summary, variant, x, "mean_gap")).collect();
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

struct Sweep {
    plan: ExperimentPlan,
    rows: Vec<ResultRow>,
    summary: Vec<SummaryRow>,
    failures: usize,
}

fn sweep(objective: Objective) -> Result<Sweep, String> {
    let mut plan = objective_defaults(objective);
    plan.base_seed = BASE_SEED;
    let out = run_plan(&plan).map_err(|e| e.to_string())?;
    let summary = summarize(&out.rows, LEVEL).map_err(|e| e.to_string())?;
    Ok(Sweep {
        plan,
        rows: out.rows,
        summary,
        failures: out.failures.len(),
    })
}

fn series(s: &Sweep, variant: ModelVariant) -> String {
    let vals: Vec<String> = s
        .plan
        .grid
        .iter()
        .map(|&x| format!("{x}:{}", pct(value(&s.summary, variant, x, "mean_gap"))))
        .collect();
    format!("{variant}[{}]", vals.join(" "))
}

fn timed(id: u8, title: &'static str, f: impl FnOnce() -> (Status, String)) -> Outcome {
    let start = Instant::now();
    let (status, detail) = f();
    let outcome = Outcome {
        id,
        title,
        status,
        detail,
        elapsed: start.elapsed(),
    };
    report(&outcome);
    outcome
}

fn report(o: &Outcome) {
    let tag = match o.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skip => "SKIP",
    };
    println!("{tag} [{}] {} ({:.1?}): {}", o.id, o.title, o.elapsed, o.detail);
}

fn verdict(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn suite_outcome(s: &oracles::SuiteResult, budget: Duration) -> (Status, String) {
    let ok = s.passed() && s.elapsed < budget;
    let mut detail = format!(
        "{} checks, max error {:.2e} <= {:.0e}, {:.2?} < {:.0?}",
        s.checks, s.max_error, s.tolerance, s.elapsed, budget
    );
    if !s.notes.is_empty() {
        detail.push_str(&format!("; {}", s.notes));
    }
    if !s.failures.is_empty() {
        detail.push_str(&format!("; failures: {}", s.failures.join("; ")));
    }
    (verdict(ok), detail)
}

fn criterion_4(s: &Sweep) -> (Status, String) {
    use ModelVariant::*;
    let lo = value(&s.summary, MlpA, 0.2, "mean_gap");
    let hi = value(&s.summary, MlpA, 1.0, "mean_gap");
    let spread_lr = spread(&s.summary, LrNoA, &s.plan.grid);
    let spread_mlp = spread(&s.summary, MlpNoA, &s.plan.grid);
    let checks = [
        lo > hi,
        lo >= C4_LOW_OVERLAP_RANGE.0 && lo <= C4_LOW_OVERLAP_RANGE.1,
        hi <= C4_FULL_OVERLAP_MAX,
        spread_lr < C4_NO_A_SPREAD_MAX,
        spread_mlp < C4_NO_A_SPREAD_MAX,
        s.failures == 0,
    ];
    let detail = format!(
        "MLP_A 20%={} (want {}..{}) > 100%={} (want <= {}); spread LR_noA={} MLP_noA={} (want < {}); cell failures {}; {} {}",
        pct(lo),
        pct(C4_LOW_OVERLAP_RANGE.0),
        pct(C4_LOW_OVERLAP_RANGE.1),
        pct(hi),
        pct(C4_FULL_OVERLAP_MAX),
        pct(spread_lr),
        pct(spread_mlp),
        pct(C4_NO_A_SPREAD_MAX),
        s.failures,
        series(s, MlpA),
        series(s, LrA),
    );
    (verdict(checks.iter().all(|&c| c)), detail)
}

fn criterion_5(s: &Sweep) -> (Status, String) {
    use ModelVariant::*;
    let high = value(&s.summary, MlpNoA, -0.5, "mean_gap");
    let moderate = value(&s.summary, MlpNoA, 0.5, "mean_gap");
    let high_a = value(&s.summary, MlpA, -0.5, "mean_gap");
    let lr_max = s
        .plan
        .grid
        .iter()
        .flat_map(|&x| [LrA, LrNoA].map(|v| value(&s.summary, v, x, "mean_gap")))
        .fold(f64::NEG_INFINITY, f64::max);
    let checks = [
        high >= C5_RATIO_MIN * moderate,
        high >= C5_HIGH_SHIFT_MIN,
        high > high_a,
        lr_max <= C5_LR_MAX,
        s.failures == 0,
    ];
    let detail = format!(
        "MLP_noA high={} moderate={} (want ratio >= {C5_RATIO_MIN}, high >= {}); MLP_A high={}; max LR={} (want <= {}); {} {}",
        pct(high),
        pct(moderate),
        pct(C5_HIGH_SHIFT_MIN),
        pct(high_a),
        pct(lr_max),
        pct(C5_LR_MAX),
        series(s, LrA),
        series(s, LrNoA),
    );
    (verdict(checks.iter().all(|&c| c)), detail)
}

fn criterion_6(s: &Sweep) -> (Status, String) {
    use ModelVariant::*;
    let spread_mlp = spread(&s.summary, MlpNoA, &s.plan.grid);
    let spread_lr = spread(&s.summary, LrNoA, &s.plan.grid);
    let lr_a_low = value(&s.summary, LrA, 0.05, "mean_gap");
    let lr_a_high = value(&s.summary, LrA, 0.5, "mean_gap");
    let checks = [
        spread_mlp <= C6_SPREAD_MAX,
        spread_lr <= C6_SPREAD_MAX,
        lr_a_low > lr_a_high,
        s.failures == 0,
    ];
    let detail = format!(
        "spread MLP_noA={} LR_noA={} (want <= {}); LR_A p=0.05 {} > p=0.5 {}; {} {}",
        pct(spread_mlp),
        pct(spread_lr),
        pct(C6_SPREAD_MAX),
        pct(lr_a_low),
        pct(lr_a_high),
        series(s, MlpNoA),
        series(s, LrNoA),
    );
    (verdict(checks.iter().all(|&c| c)), detail)
}

fn criterion_7(s: &Sweep) -> (Status, String) {
    use ModelVariant::*;
    let at_15 = value(&s.summary, MlpNoC, 1.5, "mean_gap");
    let at_05 = value(&s.summary, MlpNoC, 0.5, "mean_gap");
    let mlp_c_max = s
        .plan
        .grid
        .iter()
        .map(|&x| value(&s.summary, MlpC, x, "mean_gap"))
        .fold(f64::NEG_INFINITY, f64::max);
    let checks = [at_15 - at_05 >= C7_INCREASE_MIN, mlp_c_max <= C7_MLP_C_MAX, s.failures == 0];
    let detail = format!(
        "MLP_noC α=1.5 {} − α=0.5 {} = {} (want >= {}); max MLP_C={} (want <= {}); {} {}",
        pct(at_15),
        pct(at_05),
        pct(at_15 - at_05),
        pct(C7_INCREASE_MIN),
        pct(mlp_c_max),
        pct(C7_MLP_C_MAX),
        series(s, MlpNoC),
        series(s, MlpC),
    );
    (verdict(checks.iter().all(|&c| c)), detail)
}

fn criterion_8() -> (Status, String) {
    use ModelVariant::*;
    let cfg = AdultConfig::from_env_or(concat!(env!("CARGO_MANIFEST_DIR"), "/data/adult"));
    if !cfg.files_present() {
        return (
            Status::Skip,
            format!("UCI Adult files not found in {}", cfg.data_dir.display()),
        );
    }
    let run = || -> xdaudit::Result<(bool, String)> {
        let raw = adult::load_raw(&cfg)?;
        let encoded = adult::preprocess(&raw.records, &cfg)?;
        let test = adult::concept_shift_test(&encoded.dataset)?;
        let mut ok = raw.records.len() == EXPECTED_ROWS && test.p_value <= C8_P_MAX;
        let mut detail = format!(
            "rows {} (want {EXPECTED_ROWS}); interaction p={:.3e} (want <= {C8_P_MAX})",
            raw.records.len(),
            test.p_value
        );

        let mut concept = adult_plan(AdultKind::Concept, &cfg.data_dir);
        concept.base_seed = BASE_SEED;
        let rows = run_plan(&concept)?.rows;
        let s = summarize(&rows, LEVEL)?;
        for (variant, max_ref, mean_ref, bb_ref) in [
            (LrA, 0.021, 0.063, 0.1380),
            (LrNoA, 0.015, 0.046, 0.1421),
            (MlpA, 0.025, 0.078, 0.1301),
            (MlpNoA, 0.022, 0.067, 0.1322),
        ] {
            let max_gap = value(&s, variant, 0.5, "max_gap");
            let mean_gap = value(&s, variant, 0.5, "mean_gap");
            let bb = value(&s, variant, 0.5, "bb_acc_gap").abs();
            let tabled = matches!(variant, LrA | MlpA);
            if tabled {
                ok &= (max_gap - max_ref).abs() <= C8_MAX_GAP_TOL;
                ok &= (mean_gap - mean_ref).abs() <= C8_MEAN_GAP_TOL;
            }
            ok &= (bb - bb_ref).abs() <= C8_BB_GAP_TOL;
            detail.push_str(&format!(
                "; {variant} Δ={max_gap:.3}{} Δgroup={mean_gap:.3}{} bb_gap={bb:.3} (ref {bb_ref}±{C8_BB_GAP_TOL})",
                if tabled { format!(" (ref {max_ref}±{C8_MAX_GAP_TOL})") } else { String::new() },
                if tabled { format!(" (ref {mean_ref}±{C8_MEAN_GAP_TOL})") } else { String::new() },
            ));
        }

        let mut omitted = adult_plan(AdultKind::Omitted, &cfg.data_dir);
        omitted.base_seed = BASE_SEED;
        omitted.variants = vec![MlpC];
        let rows = run_plan(&omitted)?.rows;
        let s = summarize(&rows, LEVEL)?;
        let mlp_c = value(&s, MlpC, 0.0, "mean_gap");
        ok &= (mlp_c - 0.083).abs() <= C8_MEAN_GAP_TOL;
        detail.push_str(&format!("; omitted MLP_C Δgroup={mlp_c:.3} (ref 0.083±{C8_MEAN_GAP_TOL})"));
        Ok((ok, detail))
    };
    match run() {
        Ok((ok, detail)) => (verdict(ok), detail),
        Err(e) => (Status::Fail, format!("error: {e}")),
    }
}

/// Two runs of one criterion-4 cell, compared byte for byte with each other
/// and with the same cell inside the full sweep.
fn criterion_9(full: Option<&Sweep>) -> (Status, String) {
    let mut plan = objective_defaults(Objective::CovariateShift);
    plan.base_seed = BASE_SEED;
    plan.grid = vec![0.2];
    plan.trials = 1;
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return (Status::Fail, e.to_string()),
    };
    let mut bytes = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let path = dir.path().join(name);
        let rows = match run_plan(&plan) {
            Ok(out) => out.rows,
            Err(e) => return (Status::Fail, e.to_string()),
        };
        if let Err(e) = write_results(&rows, &path) {
            return (Status::Fail, e.to_string());
        }
        bytes.push(std::fs::read(&path).unwrap_or_default());
    }
    let identical = !bytes[0].is_empty() && bytes[0] == bytes[1];
    let mut detail = format!("{} bytes per run, identical: {identical}", bytes[0].len());
    let mut ok = identical;
    if let Some(full) = full {
        let cell: Vec<ResultRow> = full
            .rows
            .iter()
            .filter(|r| r.sweep_value == 0.2 && r.trial == 0)
            .cloned()
            .collect();
        let path = dir.path().join("c.csv");
        let same = write_results(&cell, &path).is_ok() && std::fs::read(&path).unwrap_or_default() == bytes[0];
        detail.push_str(&format!("; matches the cell in the full sweep: {same}"));
        ok &= same;
    }
    (verdict(ok), detail)
}

fn sweep_criterion(id: u8, title: &'static str, objective: Objective, check: fn(&Sweep) -> (Status, String)) -> (Outcome, Option<Sweep>) {
    let mut kept = None;
    let outcome = timed(id, title, || match sweep(objective) {
        Ok(s) => {
            let r = check(&s);
            kept = Some(s);
            r
        }
        Err(e) => (Status::Fail, format!("error: {e}")),
    });
    (outcome, kept)
}

fn main() -> ExitCode {
    let mut outcomes = vec![
        timed(1, "metric oracle suite", || {
            suite_outcome(&oracles::metric_suite(METRIC_DRAWS, BASE_SEED), METRIC_BUDGET)
        }),
        timed(2, "surrogate oracle", || {
            suite_outcome(&oracles::surrogate_suite(SURROGATE_DRAWS, BASE_SEED), SURROGATE_BUDGET)
        }),
        timed(3, "gradient checks", || {
            suite_outcome(&oracles::gradient_suite(GRADIENT_DRAWS, BASE_SEED), GRADIENT_BUDGET)
        }),
    ];
    let (o4, s4) = sweep_criterion(4, "objective 2 covariate-shift trend", Objective::CovariateShift, criterion_4);
    outcomes.push(o4);
    outcomes.push(sweep_criterion(5, "objective 3 concept-shift trend", Objective::ConceptShift, criterion_5).0);
    outcomes.push(sweep_criterion(6, "objective 1 sample-size stability", Objective::SampleSize, criterion_6).0);
    outcomes.push(sweep_criterion(7, "objective 4 omitted-variable trend", Objective::OmittedVariable, criterion_7).0);
    outcomes.push(timed(8, "Adult protocol", criterion_8));
    outcomes.push(timed(9, "determinism", || criterion_9(s4.as_ref())));

    println!();
    println!("acceptance summary");
    for o in &outcomes {
        let tag = match o.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        println!("{tag} [{}] {}", o.id, o.title);
    }
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let failed: Vec<u8> = outcomes.iter().filter(|o| o.status == Status::Fail).map(|o| o.id).collect();
    let blocking: Vec<u8> = failed
        .iter()
        .copied()
        .filter(|id| strict || EXACT_CRITERIA.contains(id))
        .collect();
    println!(
        "{} of {} criteria failed {:?}; blocking {:?} (strict={strict})",
        failed.len(),
        outcomes.len(),
        failed,
        blocking
    );
    if !blocking.is_empty() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
