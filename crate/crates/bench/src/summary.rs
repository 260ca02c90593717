//! Aggregation of result records into AUC tables, improvement percentages,
//! ratio curves and pairwise tests.
//!
//! All comparisons are against RS on the same dataset, model and parameter.
//! Cross-dataset tests pool the per-run AUCs after dividing each by RS's
//! AUC of the mean curve on that dataset, so datasets with different error
//! scales can be concatenated.

use std::collections::{BTreeMap, BTreeSet};

use alr_core::metrics::{auc, dunn_fdr, percentage_improvement, CurvePoint};
use alr_core::regressors::RegKind;
use anyhow::Result;

use crate::config::Method;
use crate::runner::ResultRecord;

pub const BASELINE: Method = Method::Rs;
pub const ALL_DATASETS: &str = "ALL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Rmse,
    Cc,
}

impl Metric {
    pub const BOTH: [Metric; 2] = [Metric::Rmse, Metric::Cc];

    pub fn label(self) -> &'static str {
        match self {
            Metric::Rmse => "rmse",
            Metric::Cc => "cc",
        }
    }

    pub fn smaller_is_better(self) -> bool {
        self == Metric::Rmse
    }

    fn of(self, r: &ResultRecord) -> f64 {
        match self {
            Metric::Rmse => r.rmse,
            Metric::Cc => r.cc,
        }
    }
}

/// Model identity including its parameter (bit pattern, for ordering).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModelKey {
    pub model: RegKind,
    param_bits: u64,
}

impl ModelKey {
    pub fn new(model: RegKind, param: f64) -> Self {
        Self {
            model,
            param_bits: param.to_bits(),
        }
    }

    pub fn param(self) -> f64 {
        f64::from_bits(self.param_bits)
    }
}

/// Performance-versus-M summary of one (dataset, method, model, metric).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSummary {
    pub dataset: String,
    pub method: Method,
    pub model: ModelKey,
    pub metric: Metric,
    pub m_grid: Vec<usize>,
    /// Mean over runs at each M.
    pub mean_curve: Vec<f64>,
    pub auc_mean_curve: f64,
    /// AUC of each complete run, by run index.
    pub run_aucs: Vec<(usize, f64)>,
    /// Sample standard deviation of the per-run AUCs.
    pub auc_std: f64,
    /// `auc_mean_curve` divided by RS's.
    pub normalized_auc: Option<f64>,
}

impl CurveSummary {
    pub fn run_auc_mean(&self) -> f64 {
        mean(self.run_aucs.iter().map(|&(_, a)| a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Statistic {
    Mean,
    Std,
}

impl Statistic {
    pub fn label(self) -> &'static str {
        match self {
            Statistic::Mean => "mean",
            Statistic::Std => "std",
        }
    }
}

/// Percentage improvement of a method's AUC statistic over RS's.
#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementRow {
    /// Dataset name, or [`ALL_DATASETS`] for the average over datasets.
    pub dataset: String,
    pub method: Method,
    pub model: ModelKey,
    pub metric: Metric,
    pub statistic: Statistic,
    pub improvement: f64,
}

/// Mean-curve value of a method divided by RS's at one M.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub dataset: String,
    pub method: Method,
    pub model: ModelKey,
    pub metric: Metric,
    pub m: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PValueRow {
    /// Dataset name, or [`ALL_DATASETS`] for the pooled normalized AUCs.
    pub scope: String,
    pub model: ModelKey,
    pub metric: Metric,
    pub method_a: Method,
    pub method_b: Method,
    pub z: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub curves: Vec<CurveSummary>,
    pub improvements: Vec<ImprovementRow>,
    pub ratios: Vec<RatioRow>,
    pub pvalues: Vec<PValueRow>,
    pub warnings: Vec<String>,
}

impl Summary {
    pub fn curve(&self, dataset: &str, method: Method, model: ModelKey, metric: Metric) -> Option<&CurveSummary> {
        self.curves
            .iter()
            .find(|c| c.dataset == dataset && c.method == method && c.model == model && c.metric == metric)
    }

    pub fn improvement(
        &self,
        dataset: &str,
        method: Method,
        model: ModelKey,
        metric: Metric,
        statistic: Statistic,
    ) -> Option<f64> {
        self.improvements
            .iter()
            .find(|r| {
                r.dataset == dataset && r.method == method && r.model == model && r.metric == metric && r.statistic == statistic
            })
            .map(|r| r.improvement)
    }

    /// Mean of the normalized AUCs of `method` over all datasets.
    pub fn mean_normalized_auc(&self, method: Method, model: ModelKey, metric: Metric) -> Option<f64> {
        let values: Vec<f64> = self
            .curves
            .iter()
            .filter(|c| c.method == method && c.model == model && c.metric == metric)
            .filter_map(|c| c.normalized_auc)
            .collect();
        (!values.is_empty()).then(|| mean(values.into_iter()))
    }

    pub fn pvalue(&self, scope: &str, model: ModelKey, metric: Metric, a: Method, b: Method) -> Option<&PValueRow> {
        self.pvalues.iter().find(|r| {
            r.scope == scope
                && r.model == model
                && r.metric == metric
                && ((r.method_a == a && r.method_b == b) || (r.method_a == b && r.method_b == a))
        })
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mu = mean(values.iter().copied());
    (values.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

/// Area under a curve; a single-point grid has area equal to its value.
fn curve_area(m_grid: &[usize], values: &[f64]) -> Result<f64> {
    if m_grid.len() == 1 {
        return Ok(values[0]);
    }
    let points: Vec<CurvePoint> = m_grid.iter().zip(values).map(|(&m, &v)| CurvePoint::new(m, v)).collect();
    Ok(auc(&points)?)
}

type GroupKey = (String, Method, ModelKey);

/// Builds every summary table from the records, using `alpha` for the
/// pairwise tests.
pub fn summarize(records: &[ResultRecord], alpha: f64) -> Result<Summary> {
    let mut summary = Summary::default();

    // dataset -> union of M values; group -> run -> M -> record
    let mut grids: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut groups: BTreeMap<GroupKey, BTreeMap<usize, BTreeMap<usize, &ResultRecord>>> = BTreeMap::new();
    for r in records {
        grids.entry(r.dataset.clone()).or_default().insert(r.m);
        let runs = groups
            .entry((r.dataset.clone(), r.method, ModelKey::new(r.model, r.param)))
            .or_default();
        if runs.entry(r.run).or_default().insert(r.m, r).is_some() {
            summary.warnings.push(format!(
                "duplicate record for {} {} {} run {} M={}",
                r.dataset, r.method, r.model, r.run, r.m
            ));
        }
    }

    for ((dataset, method, model), runs) in &groups {
        let grid: Vec<usize> = grids[dataset].iter().copied().collect();
        let complete: Vec<(usize, &BTreeMap<usize, &ResultRecord>)> = runs
            .iter()
            .filter(|(_, by_m)| grid.iter().all(|m| by_m.contains_key(m)))
            .map(|(&run, by_m)| (run, by_m))
            .collect();
        if complete.len() < runs.len() {
            summary.warnings.push(format!(
                "{dataset} {method} {}: {} of {} runs have an incomplete M grid and were left out",
                model.model,
                runs.len() - complete.len(),
                runs.len()
            ));
        }
        if complete.is_empty() {
            continue;
        }
        for metric in Metric::BOTH {
            let mean_curve: Vec<f64> = grid
                .iter()
                .map(|m| mean(complete.iter().map(|(_, by_m)| metric.of(by_m[m]))))
                .collect();
            let mut run_aucs = Vec::with_capacity(complete.len());
            for (run, by_m) in &complete {
                let values: Vec<f64> = grid.iter().map(|m| metric.of(by_m[m])).collect();
                run_aucs.push((*run, curve_area(&grid, &values)?));
            }
            let aucs: Vec<f64> = run_aucs.iter().map(|&(_, a)| a).collect();
            summary.curves.push(CurveSummary {
                dataset: dataset.clone(),
                method: *method,
                model: *model,
                metric,
                auc_mean_curve: curve_area(&grid, &mean_curve)?,
                m_grid: grid.clone(),
                mean_curve,
                auc_std: sample_std(&aucs),
                run_aucs,
                normalized_auc: None,
            });
        }
    }

    attach_baseline_comparisons(&mut summary)?;
    summary.pvalues = pairwise_tests(&summary, alpha)?;
    Ok(summary)
}

fn attach_baseline_comparisons(summary: &mut Summary) -> Result<()> {
    let baselines: BTreeMap<(String, ModelKey, Metric), CurveSummary> = summary
        .curves
        .iter()
        .filter(|c| c.method == BASELINE)
        .map(|c| ((c.dataset.clone(), c.model, c.metric), c.clone()))
        .collect();

    let mut per_dataset: BTreeMap<(Method, ModelKey, Metric, Statistic), Vec<f64>> = BTreeMap::new();
    for curve in summary.curves.iter_mut() {
        let Some(base) = baselines.get(&(curve.dataset.clone(), curve.model, curve.metric)) else {
            continue;
        };
        if base.auc_mean_curve != 0.0 {
            curve.normalized_auc = Some(if curve.method == BASELINE {
                1.0
            } else {
                curve.auc_mean_curve / base.auc_mean_curve
            });
        }
        if curve.method == BASELINE {
            continue;
        }

        let mut push = |statistic: Statistic, value: Result<f64, alr_core::Error>| {
            if let Ok(v) = value {
                summary.improvements.push(ImprovementRow {
                    dataset: curve.dataset.clone(),
                    method: curve.method,
                    model: curve.model,
                    metric: curve.metric,
                    statistic,
                    improvement: v,
                });
                per_dataset
                    .entry((curve.method, curve.model, curve.metric, statistic))
                    .or_default()
                    .push(v);
            }
        };
        push(
            Statistic::Mean,
            percentage_improvement(curve.auc_mean_curve, base.auc_mean_curve, curve.metric.smaller_is_better()),
        );
        push(Statistic::Std, percentage_improvement(curve.auc_std, base.auc_std, true));

        for (k, &m) in curve.m_grid.iter().enumerate() {
            if let Some(pos) = base.m_grid.iter().position(|&bm| bm == m) {
                if base.mean_curve[pos] != 0.0 {
                    summary.ratios.push(RatioRow {
                        dataset: curve.dataset.clone(),
                        method: curve.method,
                        model: curve.model,
                        metric: curve.metric,
                        m,
                        ratio: curve.mean_curve[k] / base.mean_curve[pos],
                    });
                }
            }
        }
    }

    for ((method, model, metric, statistic), values) in per_dataset {
        summary.improvements.push(ImprovementRow {
            dataset: ALL_DATASETS.to_string(),
            method,
            model,
            metric,
            statistic,
            improvement: mean(values.into_iter()),
        });
    }
    Ok(())
}

/// Dunn's test per dataset (raw per-run AUCs) and over all datasets
/// (per-run AUCs normalized by RS's AUC). When IRD is present only its pairs
/// are reported, oriented with IRD first; the FDR adjustment still spans all
/// pairs.
fn pairwise_tests(summary: &Summary, alpha: f64) -> Result<Vec<PValueRow>> {
    let mut scopes: BTreeMap<(String, ModelKey, Metric), BTreeMap<Method, Vec<f64>>> = BTreeMap::new();
    for curve in &summary.curves {
        let aucs: Vec<f64> = curve.run_aucs.iter().map(|&(_, a)| a).collect();
        scopes
            .entry((curve.dataset.clone(), curve.model, curve.metric))
            .or_default()
            .entry(curve.method)
            .or_default()
            .extend(aucs);
        let base = summary
            .curve(&curve.dataset, BASELINE, curve.model, curve.metric)
            .map(|b| b.auc_mean_curve)
            .filter(|&b| b != 0.0);
        if let Some(base) = base {
            scopes
                .entry((ALL_DATASETS.to_string(), curve.model, curve.metric))
                .or_default()
                .entry(curve.method)
                .or_default()
                .extend(curve.run_aucs.iter().map(|&(_, a)| a / base));
        }
    }

    let mut rows = Vec::new();
    for ((scope, model, metric), by_method) in scopes {
        let samples: Vec<(String, Vec<f64>)> = Method::ALL
            .iter()
            .filter_map(|m| by_method.get(m).map(|v| (m.label().to_string(), v.clone())))
            .filter(|(_, v)| v.len() >= 2)
            .collect();
        if samples.len() < 2 {
            continue;
        }
        let has_ird = samples.iter().any(|(n, _)| n == Method::Ird.label());
        for r in dunn_fdr(&samples, alpha)? {
            let a: Method = r.method_a.parse()?;
            let b: Method = r.method_b.parse()?;
            let (method_a, method_b, z) = if b == Method::Ird { (b, a, -r.z) } else { (a, b, r.z) };
            if has_ird && method_a != Method::Ird {
                continue;
            }
            rows.push(PValueRow {
                scope: scope.clone(),
                model,
                metric,
                method_a,
                method_b,
                z,
                p_raw: r.p_raw,
                p_adjusted: r.p_adjusted,
                significant: r.significant,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alr_core::Diagnostics;

    fn record(dataset: &str, method: Method, run: usize, m: usize, rmse: f64) -> ResultRecord {
        ResultRecord {
            dataset: dataset.into(),
            method,
            model: RegKind::Ridge,
            param: 0.5,
            run,
            m,
            rmse,
            cc: 0.5,
            extra: Diagnostics::new(),
        }
    }

    fn ridge() -> ModelKey {
        ModelKey::new(RegKind::Ridge, 0.5)
    }

    #[test]
    fn baseline_normalizes_to_one() {
        let records: Vec<_> = (0..3)
            .flat_map(|run| (5..=7).map(move |m| record("d", Method::Rs, run, m, 1.0 + run as f64 + m as f64)))
            .collect();
        let s = summarize(&records, 0.05).unwrap();
        for c in &s.curves {
            assert_eq!(c.normalized_auc, Some(1.0));
        }
        assert!(s.improvements.is_empty());
        assert!(s.pvalues.is_empty());
    }

    #[test]
    fn dominating_method_improves() {
        let mut records = Vec::new();
        for run in 0..4 {
            for m in 5..=8 {
                let base = 2.0 + (run * m) as f64 * 0.1;
                records.push(record("d", Method::Rs, run, m, base));
                records.push(record("d", Method::Ird, run, m, base - 0.3));
            }
        }
        let s = summarize(&records, 0.05).unwrap();
        let imp = s.improvement("d", Method::Ird, ridge(), Metric::Rmse, Statistic::Mean).unwrap();
        assert!(imp > 0.0);
        assert_eq!(
            s.improvement(ALL_DATASETS, Method::Ird, ridge(), Metric::Rmse, Statistic::Mean),
            Some(imp)
        );
        assert!(s.ratios.iter().all(|r| r.ratio < 1.0 || r.metric == Metric::Cc));
        let p = s.pvalue(ALL_DATASETS, ridge(), Metric::Rmse, Method::Ird, Method::Rs).unwrap();
        assert_eq!(p.method_a, Method::Ird);
        assert!(p.z < 0.0);
    }

    #[test]
    fn std_improvement_matches_hand_computation() {
        // two-point grid M = 5, 6: per-run AUC = (v5 + v6) / 2
        let mut records = Vec::new();
        let rs = [(1.0, 3.0), (2.0, 4.0), (3.0, 5.0)]; // AUCs 2, 3, 4 -> std 1
        let ird = [(1.0, 2.0), (1.5, 2.5), (2.0, 3.0)]; // AUCs 1.5, 2, 2.5 -> std 0.5
        for (run, (&(a, b), &(c, d))) in rs.iter().zip(&ird).enumerate() {
            records.push(record("d", Method::Rs, run, 5, a));
            records.push(record("d", Method::Rs, run, 6, b));
            records.push(record("d", Method::Ird, run, 5, c));
            records.push(record("d", Method::Ird, run, 6, d));
        }
        let s = summarize(&records, 0.05).unwrap();
        let std = s.improvement("d", Method::Ird, ridge(), Metric::Rmse, Statistic::Std).unwrap();
        assert!((std - 50.0).abs() < 1e-12);
        let mean = s.improvement("d", Method::Ird, ridge(), Metric::Rmse, Statistic::Mean).unwrap();
        assert!((mean - 100.0 * (3.0 - 2.0) / 3.0).abs() < 1e-12);
        let c = s.curve("d", Method::Ird, ridge(), Metric::Rmse).unwrap();
        assert_eq!(c.normalized_auc, Some(2.0 / 3.0));
    }

    #[test]
    fn incomplete_runs_are_dropped_with_a_warning() {
        let mut records = Vec::new();
        for run in 0..3 {
            for m in 5..=6 {
                records.push(record("d", Method::Rs, run, m, 1.0));
            }
        }
        records.retain(|r| !(r.run == 2 && r.m == 6));
        let s = summarize(&records, 0.05).unwrap();
        assert_eq!(s.curves[0].run_aucs.len(), 2);
        assert_eq!(s.warnings.len(), 1);
    }
}
