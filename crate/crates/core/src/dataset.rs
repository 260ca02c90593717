//! Dataset ingestion and preprocessing.
//!
//! CSV files are read into a [`RawDataset`] holding typed cells, expanded into
//! a fully numeric [`Dataset`] by one-hot encoding the categorical columns,
//! and z-score normalized with population statistics ([`NormStats`]).
//! [`split_pool_test`] draws the reproducible pool/test partition used by
//! every experiment repetition.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spellings treated as a missing value.
const MISSING_MARKERS: &[&str] = &["", "?", "NA", "N/A", "NaN", "nan", "null", "NULL"];

/// Columns whose population std falls below this fraction of their scale are
/// considered constant.
const CONSTANT_COLUMN_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Text(String),
}

/// A parsed CSV table before encoding: feature cells plus a numeric target.
#[derive(Debug, Clone)]
pub struct RawDataset {
    pub name: String,
    /// Feature columns in file order (the target column is not included).
    pub columns: Vec<Column>,
    /// One entry per record, one cell per feature column.
    pub rows: Vec<Vec<Cell>>,
    pub target_column: String,
    pub target: Vec<f64>,
}

impl RawDataset {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_categorical(&self) -> usize {
        self.columns
            .iter()
            .filter(|c| c.kind == ColumnKind::Categorical)
            .count()
    }
}

/// Fully numeric design matrix with its target vector.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        x: DMatrix<f64>,
        y: DVector<f64>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let name = name.into();
        if x.ncols() == 0 {
            return Err(Error::InvalidDataset(format!("{name}: no feature columns")));
        }
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.nrows(),
                actual: y.len(),
            });
        }
        if feature_names.len() != x.ncols() {
            return Err(Error::DimensionMismatch {
                expected: x.ncols(),
                actual: feature_names.len(),
            });
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!("{name}: non-finite entry")));
        }
        Ok(Self {
            name,
            x,
            y,
            feature_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }
}

/// Gathers the given rows of `x` into a new matrix, in the given order.
pub fn select_rows(x: &DMatrix<f64>, indices: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(indices.len(), x.ncols(), |i, j| x[(indices[i], j)])
}

/// Gathers the given entries of `y`, in the given order.
pub fn select_entries(y: &DVector<f64>, indices: &[usize]) -> DVector<f64> {
    DVector::from_iterator(indices.len(), indices.iter().map(|&i| y[i]))
}

/// Reads a CSV file with a header row.
///
/// Columns listed in `categorical_columns` are kept as text; every other
/// non-target column must parse as a finite number. Missing values are an
/// error that names the offending line.
pub fn load_csv(
    path: impl AsRef<Path>,
    target_column: &str,
    categorical_columns: &[String],
) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    read_csv(file, &name, target_column, categorical_columns)
}

/// Same as [`load_csv`] but from any reader.
pub fn read_csv<R: Read>(
    reader: R,
    name: &str,
    target_column: &str,
    categorical_columns: &[String],
) -> Result<RawDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();

    let target_idx = headers
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| {
            Error::InvalidDataset(format!("{name}: target column '{target_column}' not found"))
        })?;
    if categorical_columns.iter().any(|c| c == target_column) {
        return Err(Error::InvalidDataset(format!(
            "{name}: target column '{target_column}' cannot be categorical"
        )));
    }
    for cat in categorical_columns {
        if !headers.contains(cat) {
            return Err(Error::InvalidDataset(format!(
                "{name}: categorical column '{cat}' not found"
            )));
        }
    }

    let columns: Vec<Column> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target_idx)
        .map(|(_, h)| Column {
            name: h.clone(),
            kind: if categorical_columns.contains(h) {
                ColumnKind::Categorical
            } else {
                ColumnKind::Numeric
            },
        })
        .collect();

    let mut rows = Vec::new();
    let mut target = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != headers.len() {
            return Err(Error::Parse {
                line,
                message: format!(
                    "expected {} fields, found {}",
                    headers.len(),
                    record.len()
                ),
            });
        }

        let mut row = Vec::with_capacity(columns.len());
        for (i, field) in record.iter().enumerate() {
            if MISSING_MARKERS.contains(&field) {
                return Err(Error::Parse {
                    line,
                    message: format!("missing value in column '{}'", headers[i]),
                });
            }
            if i == target_idx {
                target.push(parse_number(field, &headers[i], line)?);
            } else if categorical_columns.iter().any(|c| c == &headers[i]) {
                row.push(Cell::Text(field.to_string()));
            } else {
                row.push(Cell::Number(parse_number(field, &headers[i], line)?));
            }
        }
        rows.push(row);
    }

    if rows.len() < 2 {
        return Err(Error::InvalidDataset(format!(
            "{name}: need at least 2 rows, found {}",
            rows.len()
        )));
    }

    Ok(RawDataset {
        name: name.to_string(),
        columns,
        rows,
        target_column: target_column.to_string(),
        target,
    })
}

fn parse_number(field: &str, column: &str, line: u64) -> Result<f64> {
    match field.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            line,
            message: format!("column '{column}': '{field}' is not a finite number"),
        }),
    }
}

/// Expands every categorical column with `k` distinct levels into `k` binary
/// indicator columns (levels in lexicographic order). Numeric columns pass
/// through unchanged.
///
/// Returns the encoded dataset and any warnings (a categorical column with a
/// single level still yields one, constant, column).
pub fn one_hot_encode(raw: &RawDataset) -> Result<(Dataset, Vec<String>)> {
    let mut warnings = Vec::new();
    let n = raw.n_rows();

    let mut feature_names = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (j, col) in raw.columns.iter().enumerate() {
        match col.kind {
            ColumnKind::Numeric => {
                let values = raw
                    .rows
                    .iter()
                    .map(|row| match &row[j] {
                        Cell::Number(v) => Ok(*v),
                        Cell::Text(t) => Err(Error::InvalidDataset(format!(
                            "numeric column '{}' holds text '{t}'",
                            col.name
                        ))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                feature_names.push(col.name.clone());
                columns.push(values);
            }
            ColumnKind::Categorical => {
                let labels: Vec<String> = raw
                    .rows
                    .iter()
                    .map(|row| match &row[j] {
                        Cell::Text(t) => t.clone(),
                        Cell::Number(v) => v.to_string(),
                    })
                    .collect();
                let levels: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
                if levels.len() == 1 {
                    let msg = format!(
                        "{}: categorical column '{}' has a single level",
                        raw.name, col.name
                    );
                    log::warn!("{msg}");
                    warnings.push(msg);
                }
                for level in levels {
                    feature_names.push(format!("{}={}", col.name, level));
                    columns.push(
                        labels
                            .iter()
                            .map(|l| if l == level { 1.0 } else { 0.0 })
                            .collect(),
                    );
                }
            }
        }
    }

    let d = columns.len();
    let x = DMatrix::from_fn(n, d, |i, j| columns[j][i]);
    let y = DVector::from_vec(raw.target.clone());
    let dataset = Dataset::new(raw.name.clone(), x, y, feature_names)?;
    Ok((dataset, warnings))
}

/// Per-column location and scale used for z-scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub means: Vec<f64>,
    /// Population standard deviations; 0 marks a constant column.
    pub stds: Vec<f64>,
}

impl NormStats {
    pub fn fit(x: &DMatrix<f64>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::invalid("cannot normalize an empty matrix"));
        }
        let n = x.nrows() as f64;
        let mut means = Vec::with_capacity(x.ncols());
        let mut stds = Vec::with_capacity(x.ncols());
        for col in x.column_iter() {
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            let scale = mean.abs().max(col.amax()).max(1.0);
            means.push(mean);
            stds.push(if std <= CONSTANT_COLUMN_RTOL * scale {
                0.0
            } else {
                std
            });
        }
        Ok(Self { means, stds })
    }

    pub fn apply(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.ncols() != self.means.len() {
            return Err(Error::DimensionMismatch {
                expected: self.means.len(),
                actual: x.ncols(),
            });
        }
        Ok(DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
            if self.stds[j] == 0.0 {
                0.0
            } else {
                (x[(i, j)] - self.means[j]) / self.stds[j]
            }
        }))
    }
}

/// Z-scores the columns of `x`.
///
/// With `stats == None` the statistics are computed from `x` itself;
/// otherwise the given statistics are applied (e.g. pool statistics applied
/// to a test set). Constant columns map to zeros.
pub fn normalize(
    x: &DMatrix<f64>,
    stats: Option<&NormStats>,
) -> Result<(DMatrix<f64>, NormStats)> {
    let stats = match stats {
        Some(s) => s.clone(),
        None => NormStats::fit(x)?,
    };
    let z = stats.apply(x)?;
    Ok((z, stats))
}

/// A partition of `0..n` into training pool and test rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub pool_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    pub seed: u64,
}

/// Uniformly random pool/test partition of `n` rows.
///
/// The pool receives `floor(fraction * n)` rows; both index lists are
/// returned in ascending order.
pub fn split_pool_test(n: usize, fraction: f64, seed: u64) -> Result<Split> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 rows to split, got {n}")));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!(
            "pool fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let pool_size = ((fraction * n as f64) + 1e-9).floor() as usize;
    let pool_size = pool_size.min(n - 1);
    if pool_size == 0 {
        return Err(Error::invalid(format!(
            "pool fraction {fraction} of {n} rows leaves an empty pool"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut pool_indices = order[..pool_size].to_vec();
    let mut test_indices = order[pool_size..].to_vec();
    pool_indices.sort_unstable();
    test_indices.sort_unstable();
    Ok(Split {
        pool_indices,
        test_indices,
        seed,
    })
}

/// One entry of a dataset registry manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub path: PathBuf,
    pub target: String,
    #[serde(default)]
    pub categorical: Vec<String>,
}

/// Maps dataset names to CSV files, target columns and categorical columns.
///
/// ```toml
/// [datasets.autompg]
/// path = "autompg.csv"
/// target = "mpg"
/// categorical = ["origin"]
/// ```
///
/// Relative paths are resolved against the manifest's directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    #[serde(default)]
    pub datasets: BTreeMap<String, RegistryEntry>,
}

impl Registry {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut registry = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for entry in registry.datasets.values_mut() {
            if entry.path.is_relative() {
                entry.path = base.join(&entry.path);
            }
        }
        Ok(registry)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            line: 0,
            message: format!("registry: {e}"),
        })
    }

    pub fn entry(&self, name: &str) -> Result<&RegistryEntry> {
        self.datasets
            .get(name)
            .ok_or_else(|| Error::InvalidDataset(format!("'{name}' is not in the registry")))
    }

    /// Loads, encodes and validates the named dataset (not normalized).
    pub fn load(&self, name: &str) -> Result<Dataset> {
        let entry = self.entry(name)?;
        let mut raw = load_csv(&entry.path, &entry.target, &entry.categorical)?;
        raw.name = name.to_string();
        let (dataset, _) = one_hot_encode(&raw)?;
        Ok(dataset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw_from(text: &str, target: &str, cats: &[&str]) -> Result<RawDataset> {
        let cats: Vec<String> = cats.iter().map(|s| s.to_string()).collect();
        read_csv(text.as_bytes(), "t", target, &cats)
    }

    #[test]
    fn parses_numeric_csv() {
        let raw = raw_from("a,b,y\n1,2,3\n4,5,6\n7,8,9\n1,1,1\n2,2,2\n", "y", &[]).unwrap();
        assert_eq!(raw.columns.len(), 2);
        assert_eq!(raw.n_rows(), 5);
        assert_eq!(raw.target, vec![3.0, 6.0, 9.0, 1.0, 2.0]);
        assert_eq!(raw.rows[1], vec![Cell::Number(4.0), Cell::Number(5.0)]);
    }

    #[test]
    fn records_categorical_kind() {
        let raw = raw_from("make,w,y\nford,1,2\nvw,2,3\n", "y", &["make"]).unwrap();
        assert_eq!(raw.columns[0].kind, ColumnKind::Categorical);
        assert_eq!(raw.columns[1].kind, ColumnKind::Numeric);
        assert_eq!(raw.n_categorical(), 1);
    }

    #[test]
    fn nan_target_names_the_line() {
        let err = raw_from("a,y\n1,2\n2,NaN\n3,4\n", "y", &[]).unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains('y'), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_row_is_rejected() {
        let err = raw_from("a,b,y\n1,2,3\n4,5\n", "y", &[]).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn missing_target_column() {
        assert!(matches!(
            raw_from("a,b\n1,2\n3,4\n", "y", &[]),
            Err(Error::InvalidDataset(_))
        ));
    }

    #[test]
    fn text_in_numeric_column() {
        assert!(matches!(
            raw_from("a,y\n1,2\nx,3\n", "y", &[]),
            Err(Error::Parse { line: 3, .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_csv("/definitely/not/here.csv", "y", &[]).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn one_hot_numeric_only_is_identity() {
        let raw = raw_from("a,b,y\n1,2,3\n4,5,6\n", "y", &[]).unwrap();
        let (ds, warnings) = one_hot_encode(&raw).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(ds.x, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 4.0, 5.0]));
        assert_eq!(ds.feature_names, vec!["a", "b"]);
    }

    #[test]
    fn one_hot_three_levels() {
        let raw = raw_from(
            "c,y\na,1\nb,2\nc,3\na,4\nb,5\nc,6\n",
            "y",
            &["c"],
        )
        .unwrap();
        let (ds, _) = one_hot_encode(&raw).unwrap();
        assert_eq!(ds.n_features(), 3);
        assert_eq!(ds.feature_names, vec!["c=a", "c=b", "c=c"]);
        for row in ds.x.row_iter() {
            assert_eq!(row.sum(), 1.0);
        }
        assert_eq!(ds.x[(1, 1)], 1.0);
    }

    #[test]
    fn autompg_shape_has_nine_features() {
        let mut text = String::from("cyl,disp,hp,wt,acc,yr,origin,mpg\n");
        for (i, o) in ["usa", "europe", "japan", "usa"].iter().enumerate() {
            text.push_str(&format!("{i},1,2,3,4,5,{o},{}\n", 20 + i));
        }
        let raw = raw_from(&text, "mpg", &["origin"]).unwrap();
        assert_eq!(raw.columns.len(), 7);
        let (ds, _) = one_hot_encode(&raw).unwrap();
        assert_eq!(ds.n_features(), 9);
    }

    #[test]
    fn single_level_categorical_warns() {
        let raw = raw_from("c,y\nq,1\nq,2\n", "y", &["c"]).unwrap();
        let (ds, warnings) = one_hot_encode(&raw).unwrap();
        assert_eq!(ds.n_features(), 1);
        assert_eq!(warnings.len(), 1);
        assert!(ds.x.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn zscore_uses_population_std() {
        let x = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        let (z, stats) = normalize(&x, None).unwrap();
        // population std of [1,2,3] is sqrt(2/3)
        let s = (2.0f64 / 3.0).sqrt();
        assert!((stats.means[0] - 2.0).abs() < 1e-15);
        assert!((stats.stds[0] - s).abs() < 1e-15);
        for (got, want) in z.iter().zip([-1.2247, 0.0, 1.2247]) {
            assert!((got - want).abs() < 1e-4);
        }
    }

    #[test]
    fn renormalizing_is_idempotent() {
        let x = DMatrix::from_fn(7, 2, |i, j| (i * i) as f64 + j as f64 * 0.3);
        let (z, _) = normalize(&x, None).unwrap();
        let (z2, _) = normalize(&z, None).unwrap();
        assert!((z - z2).amax() < 1e-9);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let x = DMatrix::from_column_slice(3, 1, &[5.0, 5.0, 5.0]);
        let (z, stats) = normalize(&x, None).unwrap();
        assert_eq!(stats.stds[0], 0.0);
        assert!(z.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn external_stats_are_applied() {
        let x = DMatrix::from_column_slice(2, 1, &[0.0, 2.0]);
        let stats = NormStats {
            means: vec![1.0],
            stds: vec![2.0],
        };
        let (z, _) = normalize(&x, Some(&stats)).unwrap();
        assert_eq!(z.as_slice(), &[-0.5, 0.5]);
        let wide = DMatrix::zeros(2, 3);
        assert!(normalize(&wide, Some(&stats)).is_err());
    }

    #[test]
    fn split_sizes() {
        let s = split_pool_test(10, 0.5, 1).unwrap();
        assert_eq!((s.pool_indices.len(), s.test_indices.len()), (5, 5));
        let s = split_pool_test(11, 0.5, 1).unwrap();
        assert_eq!((s.pool_indices.len(), s.test_indices.len()), (5, 6));
        assert_eq!(split_pool_test(11, 0.5, 9).unwrap(), split_pool_test(11, 0.5, 9).unwrap());
        assert!(split_pool_test(1, 0.5, 0).is_err());
        assert!(split_pool_test(10, 1.0, 0).is_err());
    }

    #[test]
    fn registry_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("d.csv"), "a,k,y\n1,u,2\n2,v,3\n3,u,1\n").unwrap();
        std::fs::write(
            dir.path().join("registry.toml"),
            "[datasets.demo]\npath = \"d.csv\"\ntarget = \"y\"\ncategorical = [\"k\"]\n",
        )
        .unwrap();
        let reg = Registry::from_path(dir.path().join("registry.toml")).unwrap();
        let ds = reg.load("demo").unwrap();
        assert_eq!(ds.name, "demo");
        assert_eq!(ds.n_features(), 3);
        assert!(reg.load("other").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn split_partitions_all_rows(n in 2usize..400, seed in any::<u64>()) {
            let s = split_pool_test(n, 0.5, seed).unwrap();
            let mut all: Vec<usize> = s.pool_indices.iter().chain(&s.test_indices).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            prop_assert!(s.pool_indices.len().abs_diff(s.test_indices.len()) <= 1);
        }
    }

    proptest! {
        #[test]
        fn self_normalized_columns_are_standard(
            data in proptest::collection::vec(-1e3f64..1e3, 6..60),
        ) {
            let n = data.len() / 3;
            let x = DMatrix::from_column_slice(n, 3, &data[..n * 3]);
            let (z, stats) = normalize(&x, None).unwrap();
            for (j, col) in z.column_iter().enumerate() {
                let mean = col.sum() / n as f64;
                prop_assert!(mean.abs() < 1e-9);
                if stats.stds[j] > 0.0 {
                    let std = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
                    prop_assert!((std - 1.0).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn one_hot_groups_sum_to_one(levels in proptest::collection::vec(0u8..4, 2..40)) {
            let mut text = String::from("c,y\n");
            for (i, l) in levels.iter().enumerate() {
                text.push_str(&format!("L{l},{i}\n"));
            }
            let raw = raw_from(&text, "y", &["c"]).unwrap();
            let (ds, _) = one_hot_encode(&raw).unwrap();
            for row in ds.x.row_iter() {
                prop_assert!(row.iter().all(|&v| v == 0.0 || v == 1.0));
                prop_assert_eq!(row.sum(), 1.0);
            }
        }
    }
}
