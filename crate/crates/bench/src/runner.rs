//! Seeded repetition loops: split, select, label, fit, evaluate.

use std::cmp::Ordering;
use std::fs::File;
use std::path::Path;
use std::sync::Mutex;

use alr_core::dataset::{normalize, select_entries, select_rows, split_pool_test, Dataset, NormStats, Registry};
use alr_core::metrics::{cc, rmse};
use alr_core::regressors::{fit, RegKind};
use alr_core::selectors::{
    select_gsx, select_id, select_ird, select_palice, select_random, select_rd, IrdConfig, Selection,
};
use alr_core::Diagnostics;
use anyhow::{Context, Result};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Method, ModelSpec};

/// Test-set performance of one model trained on one selection.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub dataset: String,
    pub method: Method,
    pub model: RegKind,
    /// Lambda for Ridge/LASSO, C for SVR, 0 for OLS.
    pub param: f64,
    pub run: usize,
    pub m: usize,
    pub rmse: f64,
    pub cc: f64,
    pub extra: Diagnostics,
}

impl ResultRecord {
    /// Selected samples as dataset row indices, read from the `selected`
    /// diagnostic.
    pub fn selected(&self) -> Option<Vec<usize>> {
        self.extra
            .get("selected")
            .map(|s| s.split_whitespace().filter_map(|v| v.parse().ok()).collect())
    }
}

/// Canonical output order: dataset, method, model, param, run, M.
pub fn record_order(a: &ResultRecord, b: &ResultRecord) -> Ordering {
    a.dataset
        .cmp(&b.dataset)
        .then_with(|| a.method.label().cmp(b.method.label()))
        .then_with(|| a.model.label().cmp(b.model.label()))
        .then_with(|| a.param.total_cmp(&b.param))
        .then_with(|| a.run.cmp(&b.run))
        .then_with(|| a.m.cmp(&b.m))
}

/// A cell of the experiment grid that produced no record.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub dataset: String,
    pub method: Option<Method>,
    pub model: Option<RegKind>,
    pub param: Option<f64>,
    pub run: Option<usize>,
    pub m: Option<usize>,
    pub message: String,
}

impl Failure {
    fn sort_key(&self) -> (String, String, String, u64, usize, usize, String) {
        (
            self.dataset.clone(),
            self.method.map(|m| m.label().to_string()).unwrap_or_default(),
            self.model.map(|m| m.label().to_string()).unwrap_or_default(),
            self.param.map(f64::to_bits).unwrap_or(0),
            self.run.unwrap_or(0),
            self.m.unwrap_or(0),
            self.message.clone(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitSeed {
    pub dataset: String,
    pub run: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<ResultRecord>,
    pub failures: Vec<Failure>,
    pub split_seeds: Vec<SplitSeed>,
}

/// SHA-256 of the master seed and the length-prefixed parts, truncated to
/// 64 bits.
pub fn derive_seed(master: u64, parts: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

pub fn split_seed(master: u64, dataset: &str, run: usize) -> u64 {
    derive_seed(master, &[dataset, &run.to_string(), "split"])
}

/// Seed of a selection call. Independent of which other methods run.
pub fn selection_seed(master: u64, dataset: &str, run: usize, method: Method, m: usize) -> u64 {
    derive_seed(master, &[dataset, &run.to_string(), method.seed_label(), &m.to_string()])
}

/// Loads the configured datasets from the registry and runs the grid.
/// Datasets that fail to load are reported as failures and skipped.
pub fn run_experiment(config: &ExperimentConfig, progress: Option<&Path>) -> Result<ExperimentOutput> {
    config.validate()?;
    let registry = Registry::from_path(&config.registry)
        .with_context(|| format!("loading registry {}", config.registry.display()))?;
    let mut datasets = Vec::new();
    let mut failures = Vec::new();
    for name in &config.datasets {
        match registry.load(name) {
            Ok(ds) => datasets.push((name.clone(), ds)),
            Err(e) => {
                log::error!("dataset {name}: {e}");
                failures.push(Failure {
                    dataset: name.clone(),
                    method: None,
                    model: None,
                    param: None,
                    run: None,
                    m: None,
                    message: e.to_string(),
                });
            }
        }
    }
    let mut output = run_on_datasets(config, &datasets, progress)?;
    output.failures.extend(failures);
    output.failures.sort_by_key(Failure::sort_key);
    Ok(output)
}

/// Runs the grid on already loaded datasets.
pub fn run_on_datasets(
    config: &ExperimentConfig,
    datasets: &[(String, Dataset)],
    progress: Option<&Path>,
) -> Result<ExperimentOutput> {
    config.validate_grid()?;
    let specs = config.model_specs();
    let contexts: Vec<DatasetContext> = datasets
        .iter()
        .map(|(name, ds)| DatasetContext::new(name, ds, config))
        .collect::<Result<_>>()?;

    let sink = match progress {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            Some(Mutex::new(crate::output::RecordWriter::new(file)?))
        }
        None => None,
    };

    let cells: Vec<(usize, usize)> = (0..contexts.len())
        .flat_map(|d| (0..config.runs).map(move |r| (d, r)))
        .collect();
    let work = || -> Vec<CellOutput> {
        cells
            .par_iter()
            .map(|&(d, run)| {
                let out = run_cell(&contexts[d], config, &specs, run);
                if let Some(sink) = &sink {
                    let mut writer = sink.lock().expect("progress writer poisoned");
                    if let Err(e) = writer.write_all(&out.records) {
                        log::warn!("progress file: {e}");
                    }
                }
                out
            })
            .collect()
    };
    let outputs = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("building thread pool")?
            .install(work),
        None => work(),
    };

    let mut output = ExperimentOutput::default();
    for (cell, &(d, run)) in outputs.into_iter().zip(&cells) {
        output.records.extend(cell.records);
        output.failures.extend(cell.failures);
        output.split_seeds.push(SplitSeed {
            dataset: contexts[d].name.clone(),
            run,
            seed: split_seed(config.master_seed, &contexts[d].name, run),
        });
    }
    output.records.sort_by(record_order);
    output.failures.sort_by_key(Failure::sort_key);
    Ok(output)
}

struct DatasetContext<'a> {
    name: String,
    data: &'a Dataset,
    /// Features normalized with whole-dataset statistics, unless the config
    /// asks for pool-only statistics.
    x: Option<DMatrix<f64>>,
}

impl<'a> DatasetContext<'a> {
    fn new(name: &str, data: &'a Dataset, config: &ExperimentConfig) -> Result<Self> {
        let x = if config.normalize_pool_only {
            None
        } else {
            Some(normalize(&data.x, None)?.0)
        };
        Ok(Self {
            name: name.to_string(),
            data,
            x,
        })
    }
}

#[derive(Default)]
struct CellOutput {
    records: Vec<ResultRecord>,
    failures: Vec<Failure>,
}

fn run_cell(ctx: &DatasetContext, config: &ExperimentConfig, specs: &[ModelSpec], run: usize) -> CellOutput {
    let mut out = CellOutput::default();
    let fail_all = |out: &mut CellOutput, method: Option<Method>, m: Option<usize>, message: String| {
        for spec in specs {
            out.failures.push(Failure {
                dataset: ctx.name.clone(),
                method,
                model: Some(spec.kind),
                param: Some(spec.param),
                run: Some(run),
                m,
                message: message.clone(),
            });
        }
    };

    let split = match split_pool_test(ctx.data.n_samples(), config.pool_fraction, split_seed(config.master_seed, &ctx.name, run)) {
        Ok(s) => s,
        Err(e) => {
            for &method in &config.methods {
                for &m in &config.m_grid {
                    fail_all(&mut out, Some(method), Some(m), format!("split: {e}"));
                }
            }
            return out;
        }
    };

    let x = match &ctx.x {
        Some(x) => x.clone(),
        None => {
            let pool_raw = select_rows(&ctx.data.x, &split.pool_indices);
            match NormStats::fit(&pool_raw).and_then(|s| s.apply(&ctx.data.x)) {
                Ok(x) => x,
                Err(e) => {
                    for &method in &config.methods {
                        for &m in &config.m_grid {
                            fail_all(&mut out, Some(method), Some(m), format!("normalize: {e}"));
                        }
                    }
                    return out;
                }
            }
        }
    };
    let pool = select_rows(&x, &split.pool_indices);
    let test_x = select_rows(&x, &split.test_indices);
    let test_y = select_entries(&ctx.data.y, &split.test_indices);
    let ird = IrdConfig {
        c_max: config.c_max,
        init: config.ird_init,
    };

    for &method in &config.methods {
        for &m in &config.m_grid {
            let mut rng = ChaCha8Rng::seed_from_u64(selection_seed(config.master_seed, &ctx.name, run, method, m));
            let selected = match method {
                Method::Rs => select_random(&pool, m, &mut rng),
                Method::Palice => select_palice(&pool, m, &mut rng),
                Method::Gsx => select_gsx(&pool, m),
                Method::Rd => select_rd(&pool, m, &mut rng),
                Method::Ird => select_ird(&pool, m, &ird, &mut rng),
                Method::Id => select_id(&pool, m, &ird, &mut rng),
            };
            let selection = match selected {
                Ok(s) => s,
                Err(e) => {
                    log::warn!("{} run {run} {method} M={m}: {e}", ctx.name);
                    fail_all(&mut out, Some(method), Some(m), format!("selection: {e}"));
                    continue;
                }
            };
            let rows: Vec<usize> = selection.indices.iter().map(|&i| split.pool_indices[i]).collect();
            let train_x = select_rows(&pool, &selection.indices);
            let train_y = select_entries(&ctx.data.y, &rows);

            for spec in specs {
                let mut reg = spec.config.clone();
                if method == Method::Palice && config.palice_weighted && spec.kind == RegKind::Ridge {
                    reg.sample_weights = selection.weights.clone();
                }
                match evaluate(&reg, &train_x, &train_y, &test_x, &test_y, &selection, &rows) {
                    Ok((rmse, cc, extra)) => out.records.push(ResultRecord {
                        dataset: ctx.name.clone(),
                        method,
                        model: spec.kind,
                        param: spec.param,
                        run,
                        m,
                        rmse,
                        cc,
                        extra,
                    }),
                    Err(e) => {
                        log::warn!("{} run {run} {method} {} M={m}: {e}", ctx.name, spec.kind);
                        out.failures.push(Failure {
                            dataset: ctx.name.clone(),
                            method: Some(method),
                            model: Some(spec.kind),
                            param: Some(spec.param),
                            run: Some(run),
                            m: Some(m),
                            message: format!("fit: {e}"),
                        });
                    }
                }
            }
        }
    }
    out
}

fn evaluate(
    reg: &alr_core::regressors::RegConfig,
    train_x: &DMatrix<f64>,
    train_y: &nalgebra::DVector<f64>,
    test_x: &DMatrix<f64>,
    test_y: &nalgebra::DVector<f64>,
    selection: &Selection,
    rows: &[usize],
) -> Result<(f64, f64, Diagnostics)> {
    let model = fit(reg, train_x, train_y)?;
    let pred = model.predict(test_x)?;
    let error = rmse(&pred, test_y)?;
    let corr = cc(&pred, test_y)?;
    if !error.is_finite() || !corr.value.is_finite() {
        anyhow::bail!("non-finite metrics");
    }
    let mut extra = Diagnostics::new();
    for (k, v) in &selection.diagnostics {
        if k != "method" {
            extra.insert(format!("sel.{k}"), v.clone());
        }
    }
    for (k, v) in &model.diagnostics {
        extra.insert(format!("fit.{k}"), v.clone());
    }
    if corr.degenerate {
        extra.insert("cc_degenerate".into(), "true".into());
    }
    extra.insert(
        "selected".into(),
        rows.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
    );
    Ok((error, corr.value, extra))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_pure_and_distinct() {
        assert_eq!(derive_seed(1, &["a", "b"]), derive_seed(1, &["a", "b"]));
        assert_ne!(derive_seed(1, &["a", "b"]), derive_seed(2, &["a", "b"]));
        // length prefixes keep part boundaries significant
        assert_ne!(derive_seed(1, &["ab", "c"]), derive_seed(1, &["a", "bc"]));
        assert_ne!(
            selection_seed(0, "d", 0, Method::Rs, 5),
            selection_seed(0, "d", 0, Method::Rd, 5)
        );
        assert_eq!(
            selection_seed(0, "d", 3, Method::Id, 5),
            selection_seed(0, "d", 3, Method::Ird, 5)
        );
    }
}
