//! Result files: long-format records, summary tables and the run manifest.
//!
//! Floats are written in their shortest round-trip form, so reading
//! `results.csv` back reproduces the records exactly.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use alr_core::regressors::RegKind;
use alr_core::Diagnostics;
use anyhow::{bail, Context, Result};
use serde::Serialize;

use crate::config::{ExperimentConfig, Method};
use crate::runner::{ExperimentOutput, Failure, ResultRecord};
use crate::summary::Summary;

pub const RESULTS_HEADER: [&str; 9] = ["dataset", "method", "model", "param", "run", "m", "rmse", "cc", "extra"];

/// Streams records as `results.csv` rows.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(sink: W) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(sink);
        inner.write_record(RESULTS_HEADER)?;
        inner.flush()?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, r: &ResultRecord) -> Result<()> {
        let extra = serde_json::to_string(&r.extra)?;
        self.inner.write_record([
            r.dataset.as_str(),
            r.method.label(),
            r.model.label(),
            &r.param.to_string(),
            &r.run.to_string(),
            &r.m.to_string(),
            &r.rmse.to_string(),
            &r.cc.to_string(),
            &extra,
        ])?;
        Ok(())
    }

    pub fn write_all(&mut self, records: &[ResultRecord]) -> Result<()> {
        for r in records {
            self.write(r)?;
        }
        self.inner.flush()?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

pub fn write_results(path: &Path, records: &[ResultRecord]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut writer = RecordWriter::new(file)?;
    writer.write_all(records).with_context(|| format!("writing {}", path.display()))?;
    writer.finish()
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRecord>> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_HEADER {
        bail!("{}: unexpected header {header:?}", path.display());
    }
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let field = |k: usize| row.get(k).with_context(|| format!("{}:{line}: missing column", path.display()));
        let num = |k: usize| -> Result<f64> {
            field(k)?
                .parse()
                .with_context(|| format!("{}:{line}: bad number in {}", path.display(), RESULTS_HEADER[k]))
        };
        let int = |k: usize| -> Result<usize> {
            field(k)?
                .parse()
                .with_context(|| format!("{}:{line}: bad integer in {}", path.display(), RESULTS_HEADER[k]))
        };
        let method: Method = field(1)?.parse()?;
        let model = RegKind::parse(field(2)?).with_context(|| format!("{}:{line}: bad model", path.display()))?;
        let extra: Diagnostics = serde_json::from_str(field(8)?)
            .with_context(|| format!("{}:{line}: bad extra column", path.display()))?;
        records.push(ResultRecord {
            dataset: field(0)?.to_string(),
            method,
            model,
            param: num(3)?,
            run: int(4)?,
            m: int(5)?,
            rmse: num(6)?,
            cc: num(7)?,
            extra,
        });
    }
    Ok(records)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn write_table(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row).with_context(|| format!("writing {}", path.display()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(dir: &Path, summary: &Summary) -> Result<()> {
    write_table(
        &dir.join("summary.csv"),
        &[
            "dataset",
            "method",
            "model",
            "param",
            "metric",
            "n_runs",
            "auc_mean_curve",
            "auc_runs_mean",
            "auc_runs_std",
            "normalized_auc",
        ],
        summary.curves.iter().map(|c| {
            vec![
                c.dataset.clone(),
                c.method.to_string(),
                c.model.model.to_string(),
                c.model.param().to_string(),
                c.metric.label().into(),
                c.run_aucs.len().to_string(),
                c.auc_mean_curve.to_string(),
                c.run_auc_mean().to_string(),
                c.auc_std.to_string(),
                opt(c.normalized_auc),
            ]
        }),
    )?;
    write_table(
        &dir.join("improvements.csv"),
        &["dataset", "method", "model", "param", "metric", "statistic", "improvement_pct"],
        summary.improvements.iter().map(|r| {
            vec![
                r.dataset.clone(),
                r.method.to_string(),
                r.model.model.to_string(),
                r.model.param().to_string(),
                r.metric.label().into(),
                r.statistic.label().into(),
                r.improvement.to_string(),
            ]
        }),
    )?;
    write_table(
        &dir.join("ratios.csv"),
        &["dataset", "method", "model", "param", "metric", "m", "ratio"],
        summary.ratios.iter().map(|r| {
            vec![
                r.dataset.clone(),
                r.method.to_string(),
                r.model.model.to_string(),
                r.model.param().to_string(),
                r.metric.label().into(),
                r.m.to_string(),
                r.ratio.to_string(),
            ]
        }),
    )?;
    write_table(
        &dir.join("pvalues.csv"),
        &[
            "scope",
            "model",
            "param",
            "metric",
            "method_a",
            "method_b",
            "z",
            "p_raw",
            "p_adjusted",
            "significant",
        ],
        summary.pvalues.iter().map(|r| {
            vec![
                r.scope.clone(),
                r.model.model.to_string(),
                r.model.param().to_string(),
                r.metric.label().into(),
                r.method_a.to_string(),
                r.method_b.to_string(),
                r.z.to_string(),
                r.p_raw.to_string(),
                r.p_adjusted.to_string(),
                r.significant.to_string(),
            ]
        }),
    )
}

pub fn write_failures(path: &Path, failures: &[Failure]) -> Result<()> {
    write_table(
        path,
        &["dataset", "method", "model", "param", "run", "m", "message"],
        failures.iter().map(|f| {
            vec![
                f.dataset.clone(),
                opt(f.method),
                opt(f.model),
                opt(f.param),
                opt(f.run),
                opt(f.m),
                f.message.clone(),
            ]
        }),
    )
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    seed_derivation: &'static str,
    records: usize,
    failures: usize,
    config: &'a ExperimentConfig,
    split_seeds: Vec<SeedEntry>,
}

#[derive(Serialize)]
struct SeedEntry {
    dataset: String,
    run: usize,
    seed: String,
}

pub fn write_manifest(path: &Path, config: &ExperimentConfig, output: &ExperimentOutput) -> Result<()> {
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        seed_derivation: "first 8 bytes (little endian) of SHA-256 over the master seed and the \
                          length-prefixed parts: [dataset, run, \"split\"] for splits, \
                          [dataset, run, method, M] for selections (ID shares IRD's)",
        records: output.records.len(),
        failures: output.failures.len(),
        config,
        split_seeds: output
            .split_seeds
            .iter()
            .map(|s| SeedEntry {
                dataset: s.dataset.clone(),
                run: s.run,
                seed: format!("{:#018x}", s.seed),
            })
            .collect(),
    };
    let text = toml::to_string(&manifest).context("serializing manifest")?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes every result file into `dir`, creating it if needed.
pub fn emit(dir: &Path, config: &ExperimentConfig, output: &ExperimentOutput, summary: &Summary) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_results(&dir.join("results.csv"), &output.records)?;
    write_summary(dir, summary)?;
    write_failures(&dir.join("failures.csv"), &output.failures)?;
    write_manifest(&dir.join("manifest.toml"), config, output)
}
