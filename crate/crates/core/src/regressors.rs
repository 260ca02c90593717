//! Linear regression models fit on the labeled samples.
//!
//! All losses are plain sums over samples (not means), so a regularization
//! coefficient means the same thing regardless of how many samples were
//! labeled. The bias is never regularized.
//!
//! | model  | objective                                           |
//! |--------|-----------------------------------------------------|
//! | Ridge  | `sum_i w_i (y_i - x_i.w - b)^2 + lambda |w|^2`        |
//! | LASSO  | `sum_i (y_i - x_i.w - b)^2 + lambda |w|_1`           |
//! | SVR    | `|w|^2 / 2 + C sum_i max(0, |y_i - x_i.w - b| - eps)` |
//! | OLS    | Ridge with `lambda = 0` (minimum-norm when singular) |

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::Diagnostics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum RegKind {
    #[serde(rename = "OLS")]
    Ols,
    Ridge,
    #[serde(rename = "LASSO")]
    Lasso,
    #[serde(rename = "LinearSVR")]
    LinearSvr,
}

impl RegKind {
    pub fn label(self) -> &'static str {
        match self {
            RegKind::Ols => "OLS",
            RegKind::Ridge => "Ridge",
            RegKind::Lasso => "LASSO",
            RegKind::LinearSvr => "LinearSVR",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ols" => Some(RegKind::Ols),
            "ridge" | "rr" => Some(RegKind::Ridge),
            "lasso" => Some(RegKind::Lasso),
            "linearsvr" | "svr" => Some(RegKind::LinearSvr),
            _ => None,
        }
    }
}

impl std::fmt::Display for RegKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegConfig {
    pub kind: RegKind,
    /// Ridge/LASSO penalty.
    pub lambda: f64,
    /// SVR box constraint.
    pub c: f64,
    /// SVR tube half-width as a fraction of the target's sample std.
    pub epsilon_factor: f64,
    /// Per-sample weights (Ridge only).
    pub sample_weights: Option<Vec<f64>>,
}

impl RegConfig {
    pub fn ols() -> Self {
        Self::new(RegKind::Ols)
    }

    pub fn ridge(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::new(RegKind::Ridge)
        }
    }

    pub fn lasso(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::new(RegKind::Lasso)
        }
    }

    pub fn linear_svr(c: f64) -> Self {
        Self {
            c,
            ..Self::new(RegKind::LinearSvr)
        }
    }

    fn new(kind: RegKind) -> Self {
        Self {
            kind,
            lambda: 0.5,
            c: 1.0,
            epsilon_factor: 0.1,
            sample_weights: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if self.kind == RegKind::LinearSvr {
            if !(self.c > 0.0 && self.c.is_finite()) {
                return Err(Error::invalid(format!("C must be > 0, got {}", self.c)));
            }
            if !(self.epsilon_factor >= 0.0 && self.epsilon_factor.is_finite()) {
                return Err(Error::invalid(format!(
                    "epsilon factor must be >= 0, got {}",
                    self.epsilon_factor
                )));
            }
        }
        if self.sample_weights.is_some() && self.kind != RegKind::Ridge {
            return Err(Error::invalid("sample weights are only supported for ridge"));
        }
        Ok(())
    }
}

/// `f(x) = x.w + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub w: DVector<f64>,
    pub b: f64,
    pub config: RegConfig,
    pub diagnostics: Diagnostics,
}

impl LinearModel {
    pub fn n_features(&self) -> usize {
        self.w.len()
    }

    pub fn predict(&self, x: &DMatrix<f64>) -> Result<DVector<f64>> {
        predict(self, x)
    }
}

pub fn predict(model: &LinearModel, x: &DMatrix<f64>) -> Result<DVector<f64>> {
    if x.ncols() != model.w.len() {
        return Err(Error::DimensionMismatch {
            expected: model.w.len(),
            actual: x.ncols(),
        });
    }
    Ok((x * &model.w).add_scalar(model.b))
}

/// Fits the model described by `config`.
pub fn fit(config: &RegConfig, x: &DMatrix<f64>, y: &DVector<f64>) -> Result<LinearModel> {
    config.validate()?;
    let mut model = match config.kind {
        RegKind::Ols => fit_ridge(x, y, 0.0, None)?,
        RegKind::Ridge => fit_ridge(x, y, config.lambda, config.sample_weights.as_deref())?,
        RegKind::Lasso => fit_lasso(x, y, config.lambda)?,
        RegKind::LinearSvr => fit_linear_svr(x, y, config.c, config.epsilon_factor)?,
    };
    model.config = config.clone();
    Ok(model)
}

fn check_training_data(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
    if x.nrows() == 0 {
        return Err(Error::invalid("cannot fit a model on zero samples"));
    }
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            actual: y.len(),
        });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::invalid("training data must be finite"));
    }
    Ok(())
}

fn finish(w: DVector<f64>, b: f64, config: RegConfig, diagnostics: Diagnostics) -> Result<LinearModel> {
    if !b.is_finite() || w.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("{} fit produced non-finite coefficients", config.kind)));
    }
    Ok(LinearModel {
        w,
        b,
        config,
        diagnostics,
    })
}

/// Weighted column means and the centered matrix/targets.
fn center(x: &DMatrix<f64>, y: &DVector<f64>, weights: &[f64]) -> (DVector<f64>, f64, DMatrix<f64>, DVector<f64>) {
    let total: f64 = weights.iter().sum();
    let (m, d) = x.shape();
    let x_mean = DVector::from_fn(d, |j, _| (0..m).map(|i| weights[i] * x[(i, j)]).sum::<f64>() / total);
    let y_mean = (0..m).map(|i| weights[i] * y[i]).sum::<f64>() / total;
    let xc = DMatrix::from_fn(m, d, |i, j| x[(i, j)] - x_mean[j]);
    let yc = y.add_scalar(-y_mean);
    (x_mean, y_mean, xc, yc)
}

/// Ridge regression by the augmented normal equations
/// `([X 1]' W [X 1] + diag(lambda, .., lambda, 0)) [w; b] = [X 1]' W y`.
///
/// With `lambda = 0` the system may be singular; the minimum-norm `w` of the
/// weighted-centered problem is returned instead and flagged.
pub fn fit_ridge(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64, weights: Option<&[f64]>) -> Result<LinearModel> {
    check_training_data(x, y)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be >= 0, got {lambda}")));
    }
    let (m, d) = x.shape();
    let ones = vec![1.0; m];
    let weighted = weights.is_some();
    let weights = match weights {
        Some(w) => {
            if w.len() != m {
                return Err(Error::DimensionMismatch { expected: m, actual: w.len() });
            }
            if w.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return Err(Error::invalid("sample weights must be positive and finite"));
            }
            w
        }
        None => &ones[..],
    };
    let config = RegConfig {
        lambda,
        sample_weights: weighted.then(|| weights.to_vec()),
        ..RegConfig::new(if lambda == 0.0 { RegKind::Ols } else { RegKind::Ridge })
    };
    let mut diagnostics = Diagnostics::new();

    if lambda > 0.0 {
        let mut a = DMatrix::zeros(m, d + 1);
        a.view_mut((0, 0), (m, d)).copy_from(x);
        a.column_mut(d).fill(1.0);
        let aw = DMatrix::from_fn(d + 1, m, |i, j| a[(j, i)] * weights[j]);
        let mut lhs = &aw * &a;
        for j in 0..d {
            lhs[(j, j)] += lambda;
        }
        let rhs = &aw * y;
        if let Some(chol) = lhs.clone().cholesky() {
            let theta = chol.solve(&rhs);
            let w = theta.rows(0, d).into_owned();
            return finish(w, theta[d], config, diagnostics);
        }
        diagnostics.insert("cholesky_failed".into(), "true".into());
    }

    // minimum-norm solution of the weighted-centered least squares problem
    let (x_mean, y_mean, xc, yc) = center(x, y, weights);
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let xs = DMatrix::from_fn(m, d, |i, j| xc[(i, j)] * sw[i]);
    let ys = DVector::from_fn(m, |i, _| yc[i] * sw[i]);
    let (w, rank_deficient) = if lambda > 0.0 {
        let mut lhs = xs.transpose() * &xs;
        for j in 0..d {
            lhs[(j, j)] += lambda;
        }
        (pinv_solve(&lhs, &(xs.transpose() * &ys))?, false)
    } else {
        let svd = xs.clone().svd(true, true);
        let tol = svd.singular_values.max() * (m.max(d) as f64) * f64::EPSILON;
        let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
        let w = svd
            .solve(&ys, tol)
            .map_err(|e| Error::Numerical(format!("least squares solve failed: {e}")))?;
        (w, rank < d)
    };
    if rank_deficient {
        diagnostics.insert("min_norm".into(), "true".into());
    }
    let b = y_mean - x_mean.dot(&w);
    finish(w, b, config, diagnostics)
}

fn pinv_solve(a: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let tol = svd.singular_values.max() * (a.nrows() as f64) * f64::EPSILON;
    svd.solve(rhs, tol)
        .map_err(|e| Error::Numerical(format!("pseudo-inverse solve failed: {e}")))
}

/// Maximum number of LASSO coordinate descent sweeps.
pub const LASSO_MAX_SWEEPS: usize = 10_000;

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// LASSO by cyclic coordinate descent on centered data.
///
/// Each coordinate update is `w_j = soft(x_j.r_j, lambda / 2) / |x_j|^2`
/// where `r_j` is the residual without feature `j`. Iterates until the
/// largest subgradient optimality violation is negligible or the sweep cap is
/// hit (flagged in the diagnostics).
pub fn fit_lasso(x: &DMatrix<f64>, y: &DVector<f64>, lambda: f64) -> Result<LinearModel> {
    check_training_data(x, y)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be >= 0, got {lambda}")));
    }
    let (m, d) = x.shape();
    let (x_mean, y_mean, xc, yc) = center(x, y, &vec![1.0; m]);
    let norms: Vec<f64> = (0..d).map(|j| xc.column(j).norm_squared()).collect();
    let scale = norms.iter().copied().fold(0.0, f64::max).max(yc.norm_squared()).max(1.0);
    let tol = 1e-12 * scale;

    let mut w: DVector<f64> = DVector::zeros(d);
    let mut r = yc.clone();
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < LASSO_MAX_SWEEPS {
        sweeps += 1;
        let mut max_change: f64 = 0.0;
        for j in 0..d {
            if norms[j] == 0.0 {
                continue;
            }
            let col = xc.column(j);
            let rho = col.dot(&r) + norms[j] * w[j];
            let new = soft_threshold(rho, lambda / 2.0) / norms[j];
            let delta = new - w[j];
            if delta != 0.0 {
                r.axpy(-delta, &col, 1.0);
                w[j] = new;
                max_change = max_change.max(delta.abs() * norms[j].sqrt());
            }
        }
        if max_change <= 1e-10 * scale.sqrt() && kkt_violation(&xc, &r, &w, lambda) <= tol {
            converged = true;
            break;
        }
    }

    let mut diagnostics = Diagnostics::new();
    diagnostics.insert("sweeps".into(), sweeps.to_string());
    if !converged {
        diagnostics.insert("not_converged".into(), "true".into());
        log::warn!("LASSO stopped at the sweep cap ({LASSO_MAX_SWEEPS})");
    }
    let b = y_mean - x_mean.dot(&w);
    finish(w, b, RegConfig::lasso(lambda), diagnostics)
}

/// Largest violation of the LASSO subgradient conditions
/// `|2 x_j.r| <= lambda` (for `w_j = 0`) and `2 x_j.r = lambda sign(w_j)`.
pub fn kkt_violation(xc: &DMatrix<f64>, r: &DVector<f64>, w: &DVector<f64>, lambda: f64) -> f64 {
    (0..w.len())
        .map(|j| {
            let g = 2.0 * xc.column(j).dot(r);
            if w[j] == 0.0 {
                (g.abs() - lambda).max(0.0)
            } else {
                (g - lambda * w[j].signum()).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Primal objective of the linear epsilon-insensitive SVR.
pub fn svr_objective(x: &DMatrix<f64>, y: &DVector<f64>, w: &DVector<f64>, b: f64, c: f64, epsilon: f64) -> f64 {
    let residuals = y - x * w;
    let loss: f64 = residuals.iter().map(|r| ((r - b).abs() - epsilon).max(0.0)).sum();
    0.5 * w.norm_squared() + c * loss
}

/// Sample standard deviation (`n - 1` denominator); 0 for a single value.
pub fn sample_std(y: &DVector<f64>) -> f64 {
    let n = y.len();
    if n < 2 {
        return 0.0;
    }
    let mean = y.mean();
    (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
}

const SMO_TOL: f64 = 1e-10;
const SMO_MAX_ITER: usize = 1_000_000;
const TAU: f64 = 1e-12;

/// Linear epsilon-insensitive SVR with `eps = epsilon_factor * std(y)`.
///
/// Solves the dual by sequential minimal optimization with second-order
/// working set selection over `a = [alpha; alpha*]`:
/// minimize `a'Qa/2 + p'a` subject to `z'a = 0`, `0 <= a <= C`, with
/// `Q_st = z_s z_t x_s.x_t`, `p = [eps - y; eps + y]`, `z = [1; -1]`.
/// Then `w = sum (alpha_i - alpha*_i) x_i`. Any `b` in the optimal interval
/// is valid; the one closest to `median(y - Xw)` is returned.
pub fn fit_linear_svr(x: &DMatrix<f64>, y: &DVector<f64>, c: f64, epsilon_factor: f64) -> Result<LinearModel> {
    check_training_data(x, y)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("C must be > 0, got {c}")));
    }
    if !(epsilon_factor >= 0.0 && epsilon_factor.is_finite()) {
        return Err(Error::invalid(format!("epsilon factor must be >= 0, got {epsilon_factor}")));
    }
    let (m, d) = x.shape();
    let config = RegConfig {
        c,
        epsilon_factor,
        ..RegConfig::new(RegKind::LinearSvr)
    };
    let epsilon = epsilon_factor * sample_std(y);
    let mut diagnostics = Diagnostics::new();
    diagnostics.insert("epsilon".into(), epsilon.to_string());

    if y.iter().all(|&v| v == y[0]) {
        return finish(DVector::zeros(d), y[0], config, diagnostics);
    }

    let kernel = x * x.transpose();
    let n = 2 * m;
    let z = |t: usize| if t < m { 1.0 } else { -1.0 };
    let sample = |t: usize| if t < m { t } else { t - m };
    let q = |s: usize, t: usize| z(s) * z(t) * kernel[(sample(s), sample(t))];

    let mut a = vec![0.0; n];
    // gradient Qa + p at a = 0
    let mut g: Vec<f64> = (0..n)
        .map(|t| if t < m { epsilon - y[t] } else { epsilon + y[t - m] })
        .collect();
    let in_up = |t: usize, a: &[f64]| if z(t) > 0.0 { a[t] < c } else { a[t] > 0.0 };
    let in_low = |t: usize, a: &[f64]| if z(t) > 0.0 { a[t] > 0.0 } else { a[t] < c };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < SMO_MAX_ITER {
        // i maximizes -z G over the up set
        let mut g_max = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if in_up(t, &a) && -z(t) * g[t] > g_max {
                g_max = -z(t) * g[t];
                i = t;
            }
        }
        let mut g_max2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best_obj = f64::INFINITY;
        for t in 0..n {
            if !in_low(t, &a) {
                continue;
            }
            g_max2 = g_max2.max(z(t) * g[t]);
            if i == usize::MAX {
                continue;
            }
            let grad_diff = g_max + z(t) * g[t];
            if grad_diff > 0.0 {
                let mut quad = q(i, i) + q(t, t) - 2.0 * z(i) * z(t) * q(i, t);
                if quad <= 0.0 {
                    quad = TAU;
                }
                let obj = -grad_diff * grad_diff / quad;
                if obj < best_obj {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        if i == usize::MAX || j == usize::MAX || g_max + g_max2 < SMO_TOL {
            converged = true;
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (a[i], a[j]);
        if z(i) != z(j) {
            let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-g[i] - g[j]) / quad;
            let diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if diff > 0.0 {
                if a[j] < 0.0 {
                    a[j] = 0.0;
                    a[i] = diff;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = -diff;
            }
            if diff > 0.0 {
                if a[i] > c {
                    a[i] = c;
                    a[j] = c - diff;
                }
            } else if a[j] > c {
                a[j] = c;
                a[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (g[i] - g[j]) / quad;
            let sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if sum > c {
                if a[i] > c {
                    a[i] = c;
                    a[j] = sum - c;
                }
            } else if a[j] < 0.0 {
                a[j] = 0.0;
                a[i] = sum;
            }
            if sum > c {
                if a[j] > c {
                    a[j] = c;
                    a[i] = sum - c;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = sum;
            }
        }

        let (di, dj) = (a[i] - old_i, a[j] - old_j);
        for (t, gt) in g.iter_mut().enumerate() {
            *gt += q(i, t) * di + q(j, t) * dj;
        }
    }

    diagnostics.insert("smo_iterations".into(), iterations.to_string());
    if !converged {
        diagnostics.insert("not_converged".into(), "true".into());
        log::warn!("SVR stopped at the iteration cap ({SMO_MAX_ITER})");
    }

    let beta = DVector::from_fn(m, |k, _| a[k] - a[k + m]);
    let w = x.transpose() * beta;

    // optimal bias interval [max over up of -zG, min over low of -zG]
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for t in 0..n {
        let v = -z(t) * g[t];
        if in_up(t, &a) {
            lo = lo.max(v);
        }
        if in_low(t, &a) {
            hi = hi.min(v);
        }
    }
    if lo > hi {
        let mid = 0.5 * (lo + hi);
        lo = mid;
        hi = mid;
    }
    let residuals: Vec<f64> = (y - x * &w).iter().copied().collect();
    let b = median(&residuals).clamp(lo, hi);
    finish(w, b, config, diagnostics)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn col(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(values.len(), 1, values)
    }

    fn lcg_matrix(m: usize, d: usize, seed: u64) -> DMatrix<f64> {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        DMatrix::from_fn(m, d, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    #[test]
    fn ridge_hand_example() {
        let model = fit_ridge(&col(&[-1.0, 1.0]), &DVector::from_vec(vec![-1.0, 1.0]), 0.5, None).unwrap();
        assert!((model.w[0] - 0.8).abs() < 1e-12);
        assert!(model.b.abs() < 1e-12);
    }

    #[test]
    fn ridge_shrinkage_limit_uses_weighted_mean() {
        let x = lcg_matrix(6, 2, 1);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let weights = [1.0, 1.0, 1.0, 1.0, 1.0, 5.0];
        let model = fit_ridge(&x, &y, 1e12, Some(&weights)).unwrap();
        assert!(model.w.amax() < 1e-6);
        let wmean = (15.0 + 30.0) / 10.0;
        assert!((model.b - wmean).abs() < 1e-6);
    }

    #[test]
    fn ols_residuals_are_orthogonal() {
        let x = lcg_matrix(12, 3, 2);
        let y = DVector::from_fn(12, |i, _| (i as f64).sin());
        let model = fit_ridge(&x, &y, 0.0, None).unwrap();
        let r = &y - model.predict(&x).unwrap();
        assert!(r.sum().abs() < 1e-8);
        for j in 0..3 {
            assert!(x.column(j).dot(&r).abs() < 1e-8);
        }
        assert!(!model.diagnostics.contains_key("min_norm"));
    }

    #[test]
    fn ols_underdetermined_is_min_norm_interpolant() {
        let x = lcg_matrix(3, 6, 3);
        let y = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let model = fit(&RegConfig::ols(), &x, &y).unwrap();
        assert_eq!(model.diagnostics["min_norm"], "true");
        let r = &y - model.predict(&x).unwrap();
        assert!(r.amax() < 1e-9);
        // w lies in the row space of the centered design
        let xc = DMatrix::from_fn(3, 6, |i, j| x[(i, j)] - x.column(j).mean());
        let proj = xc.transpose() * xc.clone().pseudo_inverse(1e-12).unwrap().transpose() * &model.w;
        assert!((proj - &model.w).amax() < 1e-9);
    }

    #[test]
    fn ridge_single_sample() {
        let x = DMatrix::from_row_slice(1, 2, &[0.3, -1.0]);
        let y = DVector::from_vec(vec![4.0]);
        let model = fit_ridge(&x, &y, 0.5, None).unwrap();
        assert!(model.w.amax() < 1e-12);
        assert!((model.b - 4.0).abs() < 1e-12);
    }

    #[test]
    fn lasso_hand_example_and_threshold() {
        let x = col(&[-1.0, 1.0]);
        let y = DVector::from_vec(vec![-1.0, 1.0]);
        let model = fit_lasso(&x, &y, 0.5).unwrap();
        assert!((model.w[0] - 0.875).abs() < 1e-12);
        assert!(model.b.abs() < 1e-12);
        // 2 |x'y| = 4
        let zero = fit_lasso(&x, &y, 4.0).unwrap();
        assert_eq!(zero.w[0], 0.0);
    }

    #[test]
    fn lasso_without_penalty_matches_least_squares() {
        let x = lcg_matrix(15, 4, 5);
        let y = DVector::from_fn(15, |i, _| (i as f64 * 0.7).cos());
        let lasso = fit_lasso(&x, &y, 0.0).unwrap();
        let ols = fit_ridge(&x, &y, 0.0, None).unwrap();
        assert!((lasso.w - ols.w).amax() < 1e-6);
        assert!((lasso.b - ols.b).abs() < 1e-6);
    }

    #[test]
    fn svr_constant_targets() {
        let x = lcg_matrix(5, 2, 7);
        let y = DVector::from_element(5, 3.7);
        let model = fit_linear_svr(&x, &y, 1.0, 0.1).unwrap();
        assert_eq!(model.w, DVector::zeros(2));
        assert_eq!(model.b, 3.7);
    }

    #[test]
    fn svr_lad_limit_centers_residuals() {
        let x = lcg_matrix(21, 2, 8);
        let y = DVector::from_fn(21, |i, _| x[(i, 0)] * 2.0 - x[(i, 1)] + ((i * 7) % 5) as f64 * 0.1);
        let model = fit_linear_svr(&x, &y, 1e4, 0.0).unwrap();
        let r: Vec<f64> = (&y - model.predict(&x).unwrap()).iter().copied().collect();
        assert!(median(&r).abs() < 1e-6, "{} {:?}", median(&r), model.diagnostics);
    }

    #[test]
    fn predict_examples() {
        let model = LinearModel {
            w: DVector::from_vec(vec![2.0]),
            b: 1.0,
            config: RegConfig::ols(),
            diagnostics: Diagnostics::new(),
        };
        assert_eq!(model.predict(&col(&[3.0])).unwrap()[0], 7.0);
        assert!(model.predict(&DMatrix::zeros(1, 2)).is_err());
        let flat = LinearModel {
            w: DVector::zeros(2),
            b: 1.5,
            ..model
        };
        assert_eq!(flat.predict(&DMatrix::zeros(3, 2)).unwrap(), DVector::from_element(3, 1.5));
    }

    #[test]
    fn config_validation() {
        assert!(fit(&RegConfig::ridge(-1.0), &col(&[1.0]), &DVector::from_vec(vec![1.0])).is_err());
        assert!(fit(&RegConfig::linear_svr(0.0), &col(&[1.0]), &DVector::from_vec(vec![1.0])).is_err());
        let mut weighted_lasso = RegConfig::lasso(0.5);
        weighted_lasso.sample_weights = Some(vec![1.0]);
        assert!(weighted_lasso.validate().is_err());
        assert!(fit_ridge(&col(&[1.0, 2.0]), &DVector::from_vec(vec![1.0]), 0.5, None).is_err());
        assert_eq!(RegKind::parse("svr"), Some(RegKind::LinearSvr));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn ridge_weight_scaling_equivalence(seed in any::<u64>(), c in 0.1f64..10.0) {
            let x = lcg_matrix(8, 3, seed);
            let y = DVector::from_fn(8, |i, _| x[(i, 0)] - 0.5 * x[(i, 2)] + i as f64 * 0.01);
            let base = fit_ridge(&x, &y, 0.5, None).unwrap();
            let scaled = fit_ridge(&x, &y, 0.5 * c, Some(&[c; 8])).unwrap();
            prop_assert!((base.w - scaled.w).amax() < 1e-9);
            prop_assert!((base.b - scaled.b).abs() < 1e-9);
        }

        #[test]
        fn ridge_gradient_vanishes(seed in any::<u64>(), m in 1usize..15, d in 1usize..6) {
            let x = lcg_matrix(m, d, seed);
            let y = DVector::from_fn(m, |i, _| (i as f64 + seed as f64 % 7.0).sin());
            let model = fit_ridge(&x, &y, 0.5, None).unwrap();
            let r = &y - model.predict(&x).unwrap();
            let gw = -2.0 * x.transpose() * &r + 2.0 * 0.5 * &model.w;
            let gb = -2.0 * r.sum();
            prop_assert!(gw.amax() < 1e-6 && gb.abs() < 1e-6);
        }

        #[test]
        fn lasso_kkt(seed in any::<u64>(), m in 2usize..15, d in 1usize..8, lambda in 0.01f64..3.0) {
            let x = lcg_matrix(m, d, seed);
            let y = DVector::from_fn(m, |i, _| x[(i, 0)] * 1.5 + (i as f64).cos());
            let model = fit_lasso(&x, &y, lambda).unwrap();
            let r = &y - model.predict(&x).unwrap();
            let xc = DMatrix::from_fn(m, d, |i, j| x[(i, j)] - x.column(j).mean());
            prop_assert!(kkt_violation(&xc, &r, &model.w, lambda) < 1e-6);
            prop_assert!(r.sum().abs() < 1e-8);
        }

        #[test]
        fn svr_never_worse_than_constant(seed in any::<u64>(), m in 1usize..15, d in 1usize..5) {
            let x = lcg_matrix(m, d, seed);
            let y = DVector::from_fn(m, |i, _| x[(i, 0)] * 3.0 + (i as f64 * 1.3).sin());
            let model = fit_linear_svr(&x, &y, 1.0, 0.1).unwrap();
            let eps = 0.1 * sample_std(&y);
            let got = svr_objective(&x, &y, &model.w, model.b, 1.0, eps);
            let trivial = svr_objective(&x, &y, &DVector::zeros(d), y.mean(), 1.0, eps);
            prop_assert!(got <= trivial + 1e-9);
        }
    }
}
