//! Solvers and kernels checked against independent reference computations.

use std::path::PathBuf;

use alr_core::metrics::dunn_fdr;
use alr_core::numerics::pca_fit;
use alr_core::regressors::{fit_lasso, fit_linear_svr, fit_ridge, kkt_violation, sample_std, svr_objective};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde_json::Value;

/// splitmix64, mirrored by the fixture generator script.
struct SplitMix(u64);

impl SplitMix {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }
}

fn svr_problem(seed: u64) -> (DMatrix<f64>, DVector<f64>) {
    let (m, d) = (20, 3);
    let mut g = SplitMix(seed);
    let mut x = DMatrix::zeros(m, d);
    for i in 0..m {
        for j in 0..d {
            x[(i, j)] = g.uniform();
        }
    }
    let w = DVector::from_fn(d, |_, _| g.uniform() * 3.0);
    let noise = DVector::from_fn(m, |_, _| g.uniform());
    let y = &x * w + noise * 0.5;
    (x, y)
}

fn fixtures() -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/oracles.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn random_problem(g: &mut SplitMix, m: usize, d: usize) -> (DMatrix<f64>, DVector<f64>) {
    let x = DMatrix::from_fn(m, d, |_, _| g.uniform() * 2.0);
    let w = DVector::from_fn(d, |_, _| g.uniform());
    let y = &x * w + DVector::from_fn(m, |_, _| 0.3 * g.uniform());
    (x, y)
}

#[test]
fn svr_matches_convex_solver() {
    for case in fixtures()["svr"].as_array().unwrap() {
        let seed = case["seed"].as_u64().unwrap();
        let c = case["c"].as_f64().unwrap();
        let factor = case["epsilon_factor"].as_f64().unwrap();
        let reference = case["objective"].as_f64().unwrap();
        let (x, y) = svr_problem(seed);
        let model = fit_linear_svr(&x, &y, c, factor).unwrap();
        let got = svr_objective(&x, &y, &model.w, model.b, c, factor * sample_std(&y));
        assert!(
            (got - reference).abs() <= 1e-4 * reference.abs(),
            "seed {seed}: {got} vs {reference}"
        );
    }
}

#[test]
fn dunn_matches_reference_implementation() {
    let fixtures = fixtures();
    for (name, case) in fixtures["dunn"].as_object().unwrap() {
        let groups: Vec<(String, Vec<f64>)> = case["groups"]
            .as_object()
            .unwrap()
            .iter()
            .map(|(k, v)| (k.clone(), v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()))
            .collect();
        let results = dunn_fdr(&groups, 0.05).unwrap();
        let pairs = case["pairs"].as_array().unwrap();
        assert_eq!(results.len(), pairs.len());
        for (got, want) in results.iter().zip(pairs) {
            assert_eq!(got.method_a, want["a"].as_str().unwrap());
            assert_eq!(got.method_b, want["b"].as_str().unwrap());
            let (raw, adj) = (want["p_raw"].as_f64().unwrap(), want["p_adjusted"].as_f64().unwrap());
            assert!((got.p_raw - raw).abs() < 1e-9, "{name}: {got:?} vs {raw}");
            assert!((got.p_adjusted - adj).abs() < 1e-9, "{name}: {got:?} vs {adj}");
        }
        if name == "two_same_one_shifted" {
            let significant: Vec<(&str, &str)> = results
                .iter()
                .filter(|r| r.significant)
                .map(|r| (r.method_a.as_str(), r.method_b.as_str()))
                .collect();
            assert_eq!(significant, vec![("a", "c"), ("b", "c")]);
        }
        if name == "separated" {
            assert!(results[0].p_adjusted < 0.01);
        }
    }
}

#[test]
fn ridge_matches_centered_closed_form() {
    let mut g = SplitMix(2024);
    for trial in 0..100 {
        let m = 5 + trial % 11;
        let d = 1 + trial % 7;
        let (x, y) = random_problem(&mut g, m, d);
        let lambda = 0.5;
        let model = fit_ridge(&x, &y, lambda, None).unwrap();

        let x_mean = DVector::from_fn(d, |j, _| x.column(j).mean());
        let xc = DMatrix::from_fn(m, d, |i, j| x[(i, j)] - x_mean[j]);
        let yc = y.add_scalar(-y.mean());
        let lhs = xc.transpose() * &xc + DMatrix::identity(d, d) * lambda;
        let w = lhs.lu().solve(&(xc.transpose() * yc)).unwrap();
        let b = y.mean() - x_mean.dot(&w);

        let scale = w.amax().max(1.0);
        assert!((&model.w - &w).amax() <= 1e-8 * scale, "trial {trial}");
        assert!((model.b - b).abs() <= 1e-8 * scale.max(b.abs()), "trial {trial}");
    }
}

#[test]
fn lasso_kkt_on_random_problems() {
    let mut g = SplitMix(77);
    for trial in 0..100 {
        let m = 5 + trial % 11;
        let d = 1 + trial % 9;
        let (x, y) = random_problem(&mut g, m, d);
        let lambda = 0.05 + (trial % 5) as f64 * 0.3;
        let model = fit_lasso(&x, &y, lambda).unwrap();
        let r = &y - model.predict(&x).unwrap();
        let xc = DMatrix::from_fn(m, d, |i, j| x[(i, j)] - x.column(j).mean());
        assert!(kkt_violation(&xc, &r, &model.w, lambda) < 1e-6, "trial {trial}");
        // the bias is unpenalized, so residuals must sum to zero
        assert!(r.sum().abs() < 1e-8);
    }
}

#[test]
fn pca_matches_covariance_eigendecomposition() {
    let mut g = SplitMix(5);
    let x = DMatrix::from_fn(50, 5, |_, j| g.uniform() * (j + 1) as f64);
    let model = pca_fit(&x, 3).unwrap();

    let mean = DVector::from_fn(5, |j, _| x.column(j).mean());
    let xc = DMatrix::from_fn(50, 5, |i, j| x[(i, j)] - mean[j]);
    let cov = xc.transpose() * &xc / 50.0;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..5).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    for (r, &k) in order.iter().take(3).enumerate() {
        assert!((model.variances[r] - eig.eigenvalues[k]).abs() < 1e-9);
        let v = eig.eigenvectors.column(k);
        let dot = model.components.row(r).transpose().dot(&v).abs();
        assert!((dot - 1.0).abs() < 1e-9);
    }
}
