//! Unsupervised pool-based active learning for linear regression.
//!
//! Given a pool of unlabeled samples, the selectors in this crate choose the
//! `M` samples whose labels should be acquired so that a linear model fit on
//! them generalizes well. Nothing here ever looks at a label during selection.
//!
//! # Modules
//!
//! - [`dataset`] - CSV ingestion, one-hot encoding, z-score normalization and pool/test splits
//! - [`numerics`] - PCA, k-means, hyperplanes through points and distance kernels
//! - [`selectors`] - random sampling, GSx, RD, P-ALICE, IRD and its ID ablation
//! - [`regressors`] - ridge, LASSO, linear epsilon-insensitive SVR and least squares
//! - [`metrics`] - RMSE/CC, curve AUCs, improvement percentages and Dunn's test with FDR control
//!
//! # Example
//!
//! ```
//! use alr_core::selectors::{select_ird, IrdConfig};
//! use nalgebra::DMatrix;
//! use rand::SeedableRng;
//! use rand_chacha::ChaCha8Rng;
//!
//! let pool = DMatrix::from_fn(40, 2, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0 + 0.01 * i as f64);
//! let mut rng = ChaCha8Rng::seed_from_u64(7);
//! let selection = select_ird(&pool, 5, &IrdConfig::default(), &mut rng)?;
//! assert_eq!(selection.indices.len(), 5);
//! # Ok::<(), alr_core::Error>(())
//! ```

pub mod dataset;
pub mod error;
pub mod metrics;
pub mod numerics;
pub mod regressors;
pub mod selectors;

use std::collections::BTreeMap;

pub use error::{Error, Result};

/// Free-form key/value notes attached to selections and fitted models
/// (pseudo-inverse fallbacks, chosen hyperparameters, iteration counts).
pub type Diagnostics = BTreeMap<String, String>;
