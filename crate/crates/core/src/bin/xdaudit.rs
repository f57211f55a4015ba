use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xdaudit::dgp::{
    apply_covariate_shift, apply_proportion_filter, sample_population, split_train_test,
    summary_stats, write_csv, DataGenSpec, Objective,
};
use xdaudit::harness::{
    adult_plan, objective_defaults, parse_config, read_results, render_plots, run_plan, summarize,
    write_failures, write_results, write_summary, AdultKind, ExperimentPlan,
};
use xdaudit::metrics::write_report_csv;
use xdaudit::{oracles, Error, Result};

#[derive(Parser)]
#[command(name = "xdaudit", version, about = "Audit group disparities in LIME explanation fidelity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a synthetic population and write it with its train/test split.
    Gen {
        #[arg(long)]
        objective: Objective,
        /// Generator parameter `key=value`; also `p_disadv`, `overlap`, `train_fraction`.
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep a synthetic objective.
    Run {
        #[arg(long)]
        objective: Objective,
        #[command(flatten)]
        common: RunArgs,
    },
    /// Run an Adult scenario.
    Adult {
        #[arg(long)]
        scenario: AdultKind,
        #[arg(long)]
        data: Option<PathBuf>,
        #[command(flatten)]
        common: RunArgs,
    },
    /// Summarize a result CSV and draw trend charts.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
    },
    /// Run the reference-checked oracle suites.
    TestOracles {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Comma-separated sweep values.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated variants, e.g. `LR_A,MLP_noA`.
    #[arg(long)]
    variants: Option<String>,
    /// Any plan key as `key=value`.
    #[arg(long = "set", value_name = "K=V")]
    sets: Vec<String>,
    /// `key=value` file applied after every flag.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cross-trial fidelity reports.
    #[arg(long)]
    reports: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn split_kv(s: &str) -> Result<(String, String)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| Error::Parse {
            offset: 0,
            reason: format!("expected key=value, got `{s}`"),
        })
}

fn read_config(path: &Option<PathBuf>) -> Result<BTreeMap<String, String>> {
    match path {
        Some(p) if !p.is_file() => Err(Error::MissingFile(p.clone())),
        Some(p) => parse_config(&fs::read_to_string(p)?),
        None => Ok(BTreeMap::new()),
    }
}

fn gen(objective: Objective, params: &[String], seed: u64, config: &Option<PathBuf>, out: &PathBuf) -> Result<()> {
    let mut entries = BTreeMap::new();
    for p in params {
        let (k, v) = split_kv(p)?;
        entries.insert(k, v);
    }
    entries.extend(read_config(config)?);
    let mut spec = DataGenSpec::new(objective, seed);
    let mut p_disadv = None;
    let mut overlap = None;
    let mut train_fraction = 0.7;
    let num = |k: &str, v: &str| v.parse::<f64>().map_err(|_| Error::Config { field: k.into(), reason: format!("cannot parse `{v}`") });
    for (k, v) in &entries {
        match k.as_str() {
            "p_disadv" => p_disadv = Some(num(k, v)?),
            "overlap" => overlap = Some(num(k, v)?),
            "train_fraction" => train_fraction = num(k, v)?,
            _ => spec.set_param(k, v)?,
        }
    }
    spec.validate()?;
    let population = sample_population(&spec)?;
    let (mut train, test) = split_train_test(&population, train_fraction, seed)?;
    if let Some(p) = p_disadv {
        train = apply_proportion_filter(&train, p, seed)?;
    }
    if let Some(o) = overlap {
        train = apply_covariate_shift(&train, o)?.dataset;
    }
    fs::create_dir_all(out)?;
    write_csv(&population, &out.join("population.csv"))?;
    write_csv(&train, &out.join("train.csv"))?;
    write_csv(&test, &out.join("test.csv"))?;
    for (name, ds) in [("train", &train), ("test", &test)] {
        for g in summary_stats(ds) {
            println!("{name} group {}: n={} P(Y=1)={:.4}", g.group, g.count, g.p_y1);
        }
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn execute(mut plan: ExperimentPlan, args: &RunArgs) -> Result<()> {
    let mut entries = BTreeMap::new();
    if let Some(g) = &args.grid {
        entries.insert("grid".to_string(), g.clone());
    }
    if let Some(t) = args.trials {
        entries.insert("trials".to_string(), t.to_string());
    }
    if let Some(s) = args.seed {
        entries.insert("seed".to_string(), s.to_string());
    }
    if let Some(v) = &args.variants {
        entries.insert("variants".to_string(), v.clone());
    }
    for s in &args.sets {
        let (k, v) = split_kv(s)?;
        entries.insert(k, v);
    }
    plan.apply_overrides(&entries)?;
    // The config file is applied last so that it overrides every flag.
    plan.apply_overrides(&read_config(&args.config)?)?;
    eprintln!("running {} cells", plan.n_cells());
    let output = run_plan(&plan)?;
    write_results(&output.rows, &args.out)?;
    println!("wrote {} rows to {}", output.rows.len(), args.out.display());
    if !output.failures.is_empty() {
        let path = args.out.with_extension("failures.csv");
        write_failures(&output.failures, &path)?;
        eprintln!("{} cell failures logged to {}", output.failures.len(), path.display());
    }
    if let Some(path) = &args.reports {
        let reports: Vec<_> = output.reports.into_iter().map(|(_, r)| r).collect();
        write_report_csv(&reports, path)?;
    }
    Ok(())
}

fn report(input: &Path, out: &Path, level: f64) -> Result<()> {
    let rows = read_results(input)?;
    let summary = summarize(&rows, level)?;
    fs::create_dir_all(out)?;
    write_summary(&summary, &out.join("summary.csv"))?;
    let plots = render_plots(&summary, out)?;
    if plots.is_empty() {
        println!("no gap rows to plot; no SVG written");
    }
    for p in plots {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn test_oracles(seed: u64) -> bool {
    let suites = [
        oracles::metric_suite(100, seed),
        oracles::surrogate_suite(100, seed),
        oracles::gradient_suite(20, seed),
    ];
    let mut ok = true;
    for s in &suites {
        let status = if s.passed() { "PASS" } else { "FAIL" };
        println!(
            "{status} {}: {} checks, max error {:.3e} (tol {:.0e}), {:.2?} {}",
            s.name, s.checks, s.max_error, s.tolerance, s.elapsed, s.notes
        );
        for f in &s.failures {
            println!("    {f}");
        }
        ok &= s.passed();
    }
    ok
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen {
            objective,
            params,
            seed,
            config,
            out,
        } => gen(*objective, params, *seed, config, out),
        Command::Run { objective, common } => execute(objective_defaults(*objective), common),
        Command::Adult { scenario, data, common } => {
            // The environment variable wins over the flag.
            let dir = std::env::var_os(xdaudit::adult::DATA_DIR_ENV)
                .map(PathBuf::from)
                .or_else(|| data.clone())
                .unwrap_or_else(|| PathBuf::from("data/adult"));
            execute(adult_plan(*scenario, dir), common)
        }
        Command::Report { input, out, level } => report(input, out, *level),
        Command::TestOracles { seed } => {
            return if test_oracles(*seed) { ExitCode::SUCCESS } else { ExitCode::FAILURE };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
