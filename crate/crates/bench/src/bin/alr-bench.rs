use std::path::PathBuf;
use std::process::ExitCode;

use alr_bench::config::{parse_model, ExperimentConfig, Method};
use alr_bench::output::emit;
use alr_bench::summary::{Metric, ModelKey, Statistic, ALL_DATASETS};
use alr_bench::{run_experiment, summarize};
use alr_core::selectors::IrdInit;
use anyhow::{bail, Context, Result};
use clap::Parser;

/// Run the active learning for regression benchmark.
///
/// Flags override values from the config file; anything not given falls back
/// to the built-in defaults (M = 5..15, 100 runs, all methods, Ridge, LASSO
/// and LinearSVR).
#[derive(Debug, Parser)]
#[command(name = "alr-bench", version)]
struct Cli {
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset registry manifest.
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Comma-separated dataset names from the registry.
    #[arg(long, value_delimiter = ',')]
    datasets: Option<Vec<String>>,
    /// Comma-separated subset of RS, P-ALICE, GSx, RD, IRD, ID.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Comma-separated subset of Ridge, LASSO, LinearSVR, OLS.
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,
    #[arg(long)]
    m_min: Option<usize>,
    #[arg(long)]
    m_max: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum IRD refinement sweeps.
    #[arg(long)]
    cmax: Option<usize>,
    /// IRD initializer: rd or gsx.
    #[arg(long)]
    init: Option<String>,
    /// Comma-separated Ridge/LASSO penalties.
    #[arg(long, value_delimiter = ',')]
    lambda: Option<Vec<f64>>,
    /// Comma-separated SVR box constraints.
    #[arg(long = "svr-c", value_delimiter = ',')]
    svr_c: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Train ridge with the P-ALICE importance weights.
    #[arg(long)]
    palice_weighted: bool,
    /// Fit normalization statistics on the pool only.
    #[arg(long)]
    pool_only_normalization: bool,
}

fn resolve(cli: Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = cli.registry {
        config.registry = v;
    }
    if let Some(v) = cli.datasets {
        config.datasets = v;
    }
    if let Some(v) = cli.methods {
        config.methods = v.iter().map(|s| s.parse::<Method>()).collect::<Result<_>>()?;
    }
    if let Some(v) = cli.models {
        config.models = v.iter().map(|s| parse_model(s)).collect::<Result<_>>()?;
    }
    if cli.m_min.is_some() || cli.m_max.is_some() {
        let lo = cli.m_min.unwrap_or(config.m_grid[0]);
        let hi = cli.m_max.unwrap_or(*config.m_grid.last().context("empty M grid")?);
        if lo > hi {
            bail!("--m-min {lo} exceeds --m-max {hi}");
        }
        config.m_grid = (lo..=hi).collect();
    }
    if let Some(v) = cli.runs {
        config.runs = v;
    }
    if let Some(v) = cli.seed {
        config.master_seed = v;
    }
    if let Some(v) = cli.cmax {
        config.c_max = v;
    }
    if let Some(v) = cli.init {
        config.ird_init = match v.to_ascii_lowercase().as_str() {
            "rd" => IrdInit::Rd,
            "gsx" => IrdInit::Gsx,
            _ => bail!("unknown initializer {v:?} (expected rd or gsx)"),
        };
    }
    if let Some(v) = cli.lambda {
        config.lambda_grid = v;
    }
    if let Some(v) = cli.svr_c {
        config.svr_c_grid = v;
    }
    if let Some(v) = cli.out {
        config.output_dir = v;
    }
    if cli.threads.is_some() {
        config.threads = cli.threads;
    }
    config.palice_weighted |= cli.palice_weighted;
    config.normalize_pool_only |= cli.pool_only_normalization;
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<()> {
    let config = resolve(cli)?;
    std::fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating {}", config.output_dir.display()))?;
    let partial = config.output_dir.join("results.partial.csv");
    let output = run_experiment(&config, Some(&partial))?;
    let summary = summarize(&output.records, 0.05)?;
    for w in &summary.warnings {
        log::warn!("{w}");
    }
    emit(&config.output_dir, &config, &output, &summary)?;
    std::fs::remove_file(&partial).ok();

    println!(
        "{} records, {} failures -> {}",
        output.records.len(),
        output.failures.len(),
        config.output_dir.display()
    );
    for spec in config.model_specs() {
        let key = ModelKey::new(spec.kind, spec.param);
        println!("\n{} (param {})", spec.kind, spec.param);
        println!("{:<8} {:>14} {:>14} {:>12}", "method", "norm AUC-RMSE", "RMSE impr. %", "CC impr. %");
        for &method in &config.methods {
            let norm = summary.mean_normalized_auc(method, key, Metric::Rmse);
            let rmse = summary.improvement(ALL_DATASETS, method, key, Metric::Rmse, Statistic::Mean);
            let cc = summary.improvement(ALL_DATASETS, method, key, Metric::Cc, Statistic::Mean);
            let show = |v: Option<f64>| v.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
            println!("{:<8} {:>14} {:>14} {:>12}", method.label(), show(norm), show(rmse), show(cc));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
