//! Performance measures, curve summaries and pairwise significance tests.

use std::collections::BTreeMap;

use nalgebra::DVector;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

fn check_lengths(pred: &DVector<f64>, truth: &DVector<f64>, min: usize) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            actual: pred.len(),
        });
    }
    if truth.len() < min {
        return Err(Error::invalid(format!("need at least {min} values, got {}", truth.len())));
    }
    Ok(())
}

/// Root mean squared error.
pub fn rmse(pred: &DVector<f64>, truth: &DVector<f64>) -> Result<f64> {
    check_lengths(pred, truth, 1)?;
    Ok(((pred - truth).norm_squared() / truth.len() as f64).sqrt())
}

/// Pearson correlation. `degenerate` marks the zero-variance convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub value: f64,
    pub degenerate: bool,
}

/// Pearson correlation coefficient; 0 (flagged degenerate) when either
/// vector is constant.
pub fn cc(pred: &DVector<f64>, truth: &DVector<f64>) -> Result<Correlation> {
    check_lengths(pred, truth, 2)?;
    let pc = pred.add_scalar(-pred.mean());
    let tc = truth.add_scalar(-truth.mean());
    let (sp, st) = (pc.norm(), tc.norm());
    // relative to the magnitude so that rounding noise on a constant vector
    // is still treated as constant
    let flat = |centered: f64, v: &DVector<f64>| centered <= 1e-14 * v.amax().max(f64::MIN_POSITIVE) * (v.len() as f64).sqrt();
    if sp == 0.0 || st == 0.0 || flat(sp, pred) || flat(st, truth) {
        return Ok(Correlation {
            value: 0.0,
            degenerate: true,
        });
    }
    Ok(Correlation {
        value: (pc.dot(&tc) / (sp * st)).clamp(-1.0, 1.0),
        degenerate: false,
    })
}

/// One point of a performance-versus-budget curve.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CurvePoint {
    pub m: usize,
    pub value: f64,
}

impl CurvePoint {
    pub fn new(m: usize, value: f64) -> Self {
        Self { m, value }
    }
}

/// Trapezoidal area under a curve over strictly increasing budgets.
pub fn auc(curve: &[CurvePoint]) -> Result<f64> {
    if curve.len() < 2 {
        return Err(Error::invalid("AUC needs at least two points"));
    }
    if curve.windows(2).any(|w| w[1].m <= w[0].m) {
        return Err(Error::invalid("AUC points must have strictly increasing M"));
    }
    if curve.iter().any(|p| !p.value.is_finite()) {
        return Err(Error::invalid("AUC points must be finite"));
    }
    Ok(curve
        .windows(2)
        .map(|w| (w[1].m - w[0].m) as f64 * (w[0].value + w[1].value) / 2.0)
        .sum())
}

/// Divides every AUC by the baseline's.
pub fn normalize_auc(aucs: &BTreeMap<String, f64>, baseline: &str) -> Result<BTreeMap<String, f64>> {
    let base = *aucs
        .get(baseline)
        .ok_or_else(|| Error::invalid(format!("baseline {baseline} missing")))?;
    if base == 0.0 {
        return Err(Error::invalid(format!("baseline {baseline} has zero AUC")));
    }
    Ok(aucs
        .iter()
        .map(|(k, &v)| (k.clone(), if k == baseline { 1.0 } else { v / base }))
        .collect())
}

/// Percentage improvement of `value` over `baseline`, positive when better.
pub fn percentage_improvement(value: f64, baseline: f64, smaller_is_better: bool) -> Result<f64> {
    if baseline == 0.0 {
        return Err(Error::invalid("percentage improvement against a zero baseline"));
    }
    let gain = if smaller_is_better {
        baseline - value
    } else {
        value - baseline
    };
    Ok(100.0 * gain / baseline)
}

/// Benjamini-Hochberg step-up adjusted p-values, in input order.
pub fn benjamini_hochberg(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let mut adjusted = vec![0.0; n];
    let mut running = 1.0f64;
    for (rank, &i) in order.iter().enumerate().rev() {
        running = running.min(p[i] * n as f64 / (rank + 1) as f64);
        adjusted[i] = running.min(1.0).max(p[i]);
    }
    adjusted
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PairwiseTestResult {
    pub method_a: String,
    pub method_b: String,
    /// Positive when `method_a` has the larger mean rank.
    pub z: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    /// `p_adjusted < alpha / 2`.
    pub significant: bool,
}

/// Average ranks (1-based) with ties sharing their mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Dunn's pairwise rank test with Benjamini-Hochberg adjustment over all
/// pairs. Pairs follow the group order: `(0,1), (0,2), .., (1,2), ..`.
pub fn dunn_fdr(samples: &[(String, Vec<f64>)], alpha: f64) -> Result<Vec<PairwiseTestResult>> {
    if samples.len() < 2 {
        return Err(Error::invalid("Dunn's test needs at least two groups"));
    }
    if let Some((name, _)) = samples.iter().find(|(_, v)| v.len() < 2) {
        return Err(Error::invalid(format!("group {name} has fewer than two observations")));
    }
    if samples.iter().flat_map(|(_, v)| v).any(|v| !v.is_finite()) {
        return Err(Error::invalid("Dunn's test needs finite observations"));
    }

    let pooled: Vec<f64> = samples.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    let total = pooled.len() as f64;
    let ranks = average_ranks(&pooled);

    let mut mean_ranks = Vec::with_capacity(samples.len());
    let mut offset = 0;
    for (_, v) in samples {
        mean_ranks.push(ranks[offset..offset + v.len()].iter().sum::<f64>() / v.len() as f64);
        offset += v.len();
    }

    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_sum = 0.0;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        let t = (end - start) as f64;
        tie_sum += t * t * t - t;
        start = end;
    }
    let variance = total * (total + 1.0) / 12.0 - tie_sum / (12.0 * (total - 1.0));

    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut results = Vec::new();
    for a in 0..samples.len() {
        for b in a + 1..samples.len() {
            let se = (variance * (1.0 / samples[a].1.len() as f64 + 1.0 / samples[b].1.len() as f64)).sqrt();
            let diff = mean_ranks[a] - mean_ranks[b];
            // all observations tied: no evidence either way
            let z = if se > 0.0 { diff / se } else { 0.0 };
            let p_raw = (2.0 * normal.cdf(-z.abs())).min(1.0);
            results.push(PairwiseTestResult {
                method_a: samples[a].0.clone(),
                method_b: samples[b].0.clone(),
                z,
                p_raw,
                p_adjusted: p_raw,
                significant: false,
            });
        }
    }
    let adjusted = benjamini_hochberg(&results.iter().map(|r| r.p_raw).collect::<Vec<_>>());
    for (r, p) in results.iter_mut().zip(adjusted) {
        r.p_adjusted = p;
        r.significant = p < alpha / 2.0;
    }
    Ok(results)
}
