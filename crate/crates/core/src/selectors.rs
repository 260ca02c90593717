//! Unsupervised sample selectors.
//!
//! Every selector works on an unlabeled pool (rows of a matrix) and returns
//! the pool indices to label. Ties in any argmin/argmax go to the lowest pool
//! index, so all selectors are deterministic given their generator.
//!
//! IRD combines three criteria. For `M = d + 1` samples
//! ([`ird_case_equal`]) each slot is repeatedly re-chosen, with the other `d`
//! samples fixed, as the candidate minimizing
//!
//! ```text
//! sqrt(mean_i |x_i - x|^2) / dist(x, C)
//! ```
//!
//! where `C` is the hyperplane through the fixed samples: a far distance to
//! `C` is informative and diverse, a small mean distance to the pool is
//! representative. Fewer samples ([`ird_case_less`]) run the same procedure
//! in the leading `M - 1` principal component scores; more samples
//! ([`ird_case_greater`]) add one sample per k-means cluster of the rest of
//! the pool, maximizing representativeness times diversity ([`rd_score`]).
//! A sweep stops early as soon as the selected index set repeats.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::dataset::select_rows;
use crate::error::{Error, Result};
use crate::numerics::{
    hyperplane_through_points, kmeans, mean_sq_distance_root, pca_fit, point_manifold_distance,
    row_vec, sq_dist_rows, Hyperplane, KMEANS_MAX_ITER,
};
use crate::Diagnostics;

/// Pool indices chosen for labeling.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub indices: Vec<usize>,
    /// Importance weights, one per index (P-ALICE only).
    pub weights: Option<Vec<f64>>,
    pub diagnostics: Diagnostics,
}

impl Selection {
    fn new(indices: Vec<usize>, method: &str) -> Self {
        let mut diagnostics = Diagnostics::new();
        diagnostics.insert("method".into(), method.into());
        Self {
            indices,
            weights: None,
            diagnostics,
        }
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.diagnostics.insert(key.to_string(), value.to_string());
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }
}

/// Index sets visited by an iterative selector, used for cycle detection.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SelectionHistory {
    rows: Vec<Vec<usize>>,
}

impl SelectionHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, indices: &[usize]) {
        self.rows.push(sorted(indices));
    }

    /// Set-equality against every stored row.
    pub fn contains(&self, indices: &[usize]) -> bool {
        let key = sorted(indices);
        self.rows.contains(&key)
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn sorted(indices: &[usize]) -> Vec<usize> {
    let mut v = indices.to_vec();
    v.sort_unstable();
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum IrdInit {
    #[default]
    Rd,
    Gsx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct IrdConfig {
    /// Maximum number of refinement sweeps.
    pub c_max: usize,
    pub init: IrdInit,
}

impl Default for IrdConfig {
    fn default() -> Self {
        Self {
            c_max: 5,
            init: IrdInit::Rd,
        }
    }
}

/// Scoring rule for the refinement steps: the full IRD criteria, or the ID
/// ablation that drops representativeness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scoring {
    Ird,
    Id,
}

impl Scoring {
    fn label(self) -> &'static str {
        match self {
            Scoring::Ird => "IRD",
            Scoring::Id => "ID",
        }
    }
}

fn check_budget(n_pool: usize, m: usize) -> Result<()> {
    if m == 0 || m > n_pool {
        return Err(Error::invalid(format!(
            "cannot select {m} samples from a pool of {n_pool}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Baselines

/// Uniform sampling without replacement.
pub fn select_random<R: Rng + ?Sized>(pool: &DMatrix<f64>, m: usize, rng: &mut R) -> Result<Selection> {
    check_budget(pool.nrows(), m)?;
    let indices = rand::seq::index::sample(rng, pool.nrows(), m).into_vec();
    Ok(Selection::new(indices, "RS"))
}

/// Greedy sampling in the input space.
///
/// Starts from the sample closest to the pool centroid, then repeatedly adds
/// the sample whose distance to its nearest selected sample is largest. The
/// output order is the selection order, so smaller budgets are prefixes of
/// larger ones.
pub fn select_gsx(pool: &DMatrix<f64>, m: usize) -> Result<Selection> {
    check_budget(pool.nrows(), m)?;
    Ok(Selection::new(gsx_indices(pool, m), "GSx"))
}

fn gsx_indices(pool: &DMatrix<f64>, m: usize) -> Vec<usize> {
    let n = pool.nrows();
    let centroid: Vec<f64> = pool.column_iter().map(|c| c.sum() / n as f64).collect();
    let first = argmin((0..n).map(|i| crate::numerics::sq_dist_to_row(&centroid, pool, i)))
        .expect("non-empty pool");

    let mut selected = vec![first];
    let mut taken = vec![false; n];
    taken[first] = true;
    let mut min_dist: Vec<f64> = (0..n).map(|i| sq_dist_rows(pool, i, first)).collect();
    while selected.len() < m {
        let next = argmax((0..n).map(|i| if taken[i] { f64::NEG_INFINITY } else { min_dist[i] }))
            .expect("unselected samples remain");
        taken[next] = true;
        selected.push(next);
        for i in 0..n {
            min_dist[i] = min_dist[i].min(sq_dist_rows(pool, i, next));
        }
    }
    selected
}

/// Representativeness-diversity baseline: k-means with `k = M`, then the
/// member closest to each centroid.
pub fn select_rd<R: Rng + ?Sized>(pool: &DMatrix<f64>, m: usize, rng: &mut R) -> Result<Selection> {
    check_budget(pool.nrows(), m)?;
    Ok(Selection::new(rd_indices(pool, m, rng)?, "RD"))
}

fn rd_indices<R: Rng + ?Sized>(pool: &DMatrix<f64>, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    let clusters = kmeans(pool, k, rng, KMEANS_MAX_ITER)?;
    Ok(clusters
        .members()
        .iter()
        .enumerate()
        .map(|(c, members)| {
            let centroid = row_vec(&clusters.centroids, c);
            closest_member(pool, members, &centroid)
        })
        .collect())
}

fn closest_member(pool: &DMatrix<f64>, members: &[usize], point: &[f64]) -> usize {
    let best = argmin(
        members
            .iter()
            .map(|&i| crate::numerics::sq_dist_to_row(point, pool, i)),
    )
    .expect("clusters are never empty");
    members[best]
}

/// Position of the smallest value; NaN never wins, ties go to the first.
fn argmin(values: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if v >= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

fn argmax(values: impl Iterator<Item = f64>) -> Option<usize> {
    argmin(values.map(|v| -v))
}

// ---------------------------------------------------------------------------
// P-ALICE

/// The default resampling-bias grid: 0, .1, .2, .3, .40, .41, ..., .60, .7, .8, .9, 1.
pub fn default_lambda_grid() -> Vec<f64> {
    let mut hundredths: Vec<u32> = vec![0, 10, 20, 30];
    hundredths.extend(40..=60);
    hundredths.extend([70, 80, 90, 100]);
    hundredths.into_iter().map(|h| h as f64 / 100.0).collect()
}

/// Resampling bias `(x' U^-1 x)^lambda`, evaluated as the double sum over
/// the entries of `U^-1`.
pub fn palice_bias(x: &[f64], u_inv: &DMatrix<f64>, lambda: f64) -> f64 {
    palice_quadratic(x, u_inv).max(0.0).powf(lambda)
}

fn palice_quadratic(x: &[f64], u_inv: &DMatrix<f64>) -> f64 {
    let d = x.len();
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            sum += u_inv[(i, j)] * x[i] * x[j];
        }
    }
    sum
}

/// Relative eigenvalue cutoff below which a symmetric matrix is treated as
/// singular and pseudo-inverted.
const SINGULAR_RTOL: f64 = 1e-12;

/// Inverse (or pseudo-inverse) of a symmetric positive semi-definite matrix.
/// The flag is set when eigenvalues had to be dropped.
fn spd_inverse(a: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let max = eig.eigenvalues.amax();
    let cutoff = SINGULAR_RTOL * max.max(f64::MIN_POSITIVE);
    let mut singular = false;
    let inv_vals = eig.eigenvalues.map(|v| {
        if v > cutoff {
            1.0 / v
        } else {
            singular = true;
            0.0
        }
    });
    let v = &eig.eigenvectors;
    let inv = v * DMatrix::from_diagonal(&inv_vals) * v.transpose();
    (inv, singular)
}

/// One candidate draw of the P-ALICE search.
#[derive(Debug, Clone)]
pub struct PaliceDraw {
    pub lambda: f64,
    /// Pool indices in draw order.
    pub indices: Vec<usize>,
    /// `b^lambda` of each drawn sample.
    pub bias: Vec<f64>,
    pub q: f64,
    /// The weighted design matrix had to be pseudo-inverted.
    pub singular: bool,
}

#[derive(Debug, Clone)]
pub struct PaliceSearch {
    /// Second-moment matrix `U = X'X / N` of the pool.
    pub u: DMatrix<f64>,
    pub u_inv: DMatrix<f64>,
    pub u_singular: bool,
    pub draws: Vec<PaliceDraw>,
    /// Position of the minimizing draw in `draws`.
    pub best: usize,
}

impl PaliceSearch {
    pub fn best_draw(&self) -> &PaliceDraw {
        &self.draws[self.best]
    }
}

/// Estimated generalization error `trace(U L L')` with
/// `L = (X W X')^-1 X W`, for drawn rows `x_sel` (`M x d`) and weights `w`.
/// Returns the value and whether a pseudo-inverse was needed.
pub fn palice_q(u: &DMatrix<f64>, x_sel: &DMatrix<f64>, weights: &[f64]) -> (f64, bool) {
    let xt = x_sel.transpose();
    let xw = DMatrix::from_fn(xt.nrows(), xt.ncols(), |i, j| xt[(i, j)] * weights[j]);
    let a = &xw * x_sel;
    let (a_inv, singular) = spd_inverse(&a);
    let l = a_inv * xw;
    let q = (u * &l * l.transpose()).trace();
    (q, singular)
}

/// Runs one weighted draw per grid value and scores each with [`palice_q`].
pub fn palice_search<R: Rng + ?Sized>(
    pool: &DMatrix<f64>,
    m: usize,
    lambda_grid: &[f64],
    rng: &mut R,
) -> Result<PaliceSearch> {
    check_budget(pool.nrows(), m)?;
    if lambda_grid.is_empty() {
        return Err(Error::invalid("P-ALICE needs a non-empty lambda grid"));
    }
    if let Some(l) = lambda_grid.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(Error::invalid(format!("lambda {l} outside [0, 1]")));
    }

    let n = pool.nrows();
    let u = pool.transpose() * pool / n as f64;
    let (u_inv, u_singular) = spd_inverse(&u);

    let quad: Vec<f64> = (0..n)
        .map(|i| palice_quadratic(&row_vec(pool, i), &u_inv).max(0.0))
        .collect();
    // keep every bias strictly positive so the importance weights stay finite
    let floor = 1e-12 * (quad.iter().sum::<f64>() / n as f64).max(f64::MIN_POSITIVE);

    let mut draws = Vec::with_capacity(lambda_grid.len());
    for &lambda in lambda_grid {
        let bias_all: Vec<f64> = quad.iter().map(|q| q.max(floor).powf(lambda)).collect();
        let indices = weighted_draw_without_replacement(&bias_all, m, rng);
        let bias: Vec<f64> = indices.iter().map(|&i| bias_all[i]).collect();
        let weights: Vec<f64> = bias.iter().map(|b| 1.0 / b).collect();
        let (q, singular) = palice_q(&u, &select_rows(pool, &indices), &weights);
        draws.push(PaliceDraw {
            lambda,
            indices,
            bias,
            q,
            singular,
        });
    }

    let best = argmin(draws.iter().map(|d| d.q)).unwrap_or(0);
    Ok(PaliceSearch {
        u,
        u_inv,
        u_singular,
        draws,
        best,
    })
}

/// Sequential draws with probability proportional to `weights`,
/// renormalized over the remaining items after each draw.
fn weighted_draw_without_replacement<R: Rng + ?Sized>(weights: &[f64], m: usize, rng: &mut R) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..weights.len()).collect();
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let total: f64 = remaining.iter().map(|&i| weights[i]).sum();
        let pos = if total > 0.0 && total.is_finite() {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pos = remaining.len() - 1;
            for (k, &i) in remaining.iter().enumerate() {
                acc += weights[i];
                if target < acc {
                    pos = k;
                    break;
                }
            }
            pos
        } else {
            rng.gen_range(0..remaining.len())
        };
        out.push(remaining.remove(pos));
    }
    out
}

/// P-ALICE over the default lambda grid.
///
/// Returns the draw with the smallest estimated generalization error and its
/// importance weights `1 / b^lambda*`.
pub fn select_palice<R: Rng + ?Sized>(pool: &DMatrix<f64>, m: usize, rng: &mut R) -> Result<Selection> {
    select_palice_with_grid(pool, m, &default_lambda_grid(), rng)
}

pub fn select_palice_with_grid<R: Rng + ?Sized>(
    pool: &DMatrix<f64>,
    m: usize,
    lambda_grid: &[f64],
    rng: &mut R,
) -> Result<Selection> {
    let search = palice_search(pool, m, lambda_grid, rng)?;
    let best = search.best_draw();
    let mut selection = Selection::new(best.indices.clone(), "P-ALICE");
    selection.weights = Some(best.bias.iter().map(|b| 1.0 / b).collect());
    selection.note("lambda_star", best.lambda);
    selection.note("q_min", best.q);
    if search.u_singular {
        selection.note("u_pseudo_inverse", true);
    }
    if best.singular {
        selection.note("design_pseudo_inverse", true);
    }
    Ok(selection)
}

// ---------------------------------------------------------------------------
// IRD

/// `sqrt(mean |x_i - x|^2) / dist(x, h)`; `+inf` for points on `h`.
pub fn ird_objective(candidate: &[f64], pool: &DMatrix<f64>, h: &Hyperplane) -> f64 {
    ratio(mean_sq_distance_root(candidate, pool), point_manifold_distance(candidate, h))
}

fn ratio(representativeness: f64, distance: f64) -> f64 {
    if distance == 0.0 {
        f64::INFINITY
    } else {
        representativeness / distance
    }
}

/// Representativeness times diversity of `candidate` inside `cluster`.
///
/// `R = |S| / sum_{i in S} |x_n - x_i|^2` (`+inf` when the sum vanishes) and
/// `D` is the distance to the nearest of `others`, the selected samples other
/// than the slot being filled. `D = 0` scores 0 even when `R` is infinite.
pub fn rd_score(candidate: usize, cluster: &[usize], others: &[usize], pool: &DMatrix<f64>) -> f64 {
    let diversity = diversity(candidate, others, pool);
    if diversity == 0.0 {
        return 0.0;
    }
    let spread: f64 = cluster.iter().map(|&i| sq_dist_rows(pool, candidate, i)).sum();
    if spread == 0.0 {
        return f64::INFINITY;
    }
    cluster.len() as f64 / spread * diversity
}

fn diversity(candidate: usize, others: &[usize], pool: &DMatrix<f64>) -> f64 {
    others
        .iter()
        .map(|&t| sq_dist_rows(pool, candidate, t))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Which refinement phase a replacement step belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// The `d + 1` samples scored against hyperplanes.
    Core,
    /// The cluster slots added when `M > d + 1`.
    Extra,
}

/// One slot update of a refinement sweep.
#[derive(Debug, Clone)]
pub struct ReplacementStep {
    pub phase: Phase,
    pub sweep: usize,
    pub slot: usize,
    /// The other selected samples held fixed during the update.
    pub fixed: Vec<usize>,
    /// Samples eligible for the slot.
    pub candidates: Vec<usize>,
    pub previous: usize,
    pub chosen: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrdCase {
    Equal,
    Less,
    Greater,
}

impl IrdCase {
    pub fn label(self) -> &'static str {
        match self {
            IrdCase::Equal => "equal",
            IrdCase::Less => "less",
            IrdCase::Greater => "greater",
        }
    }
}

/// Full record of an IRD/ID run.
#[derive(Debug, Clone)]
pub struct IrdRun {
    pub case: IrdCase,
    pub selection: Selection,
    /// Index sets visited while refining the `d + 1` core samples.
    pub core_history: SelectionHistory,
    /// Index sets visited while refining the cluster slots (`M > d + 1`).
    pub extra_history: SelectionHistory,
    pub core_sweeps: usize,
    pub extra_sweeps: usize,
    pub steps: Vec<ReplacementStep>,
    /// Cluster members of each extra slot, in slot order.
    pub clusters: Vec<Vec<usize>>,
}

struct Refinement {
    selected: Vec<usize>,
    history: SelectionHistory,
    sweeps: usize,
    repeated: bool,
}

/// Refines `M = d' + 1` samples of `space` (`n x d'`) slot by slot.
fn refine_core(
    space: &DMatrix<f64>,
    mut selected: Vec<usize>,
    c_max: usize,
    scoring: Scoring,
    steps: &mut Vec<ReplacementStep>,
) -> Result<Refinement> {
    let n = space.nrows();
    let representativeness: Vec<f64> = match scoring {
        Scoring::Ird => (0..n)
            .map(|i| mean_sq_distance_root(&row_vec(space, i), space))
            .collect(),
        Scoring::Id => Vec::new(),
    };

    let mut history = SelectionHistory::new();
    history.push(&selected);
    let mut sweeps = 0;
    let mut repeated = false;
    while sweeps < c_max {
        // samples selected when the sweep starts stay out of the candidate
        // set until the next sweep, even after being replaced
        let at_start = selected.clone();
        for slot in 0..selected.len() {
            let fixed: Vec<usize> = selected
                .iter()
                .enumerate()
                .filter(|&(t, _)| t != slot)
                .map(|(_, &i)| i)
                .collect();
            let candidates = candidates_excluding(n, &[&at_start[..], &selected[..]].concat());
            let h = hyperplane_through_points(&select_rows(space, &fixed))?;
            let scores: Vec<f64> = candidates
                .iter()
                .map(|&i| {
                    let dist = point_manifold_distance(&row_vec(space, i), &h);
                    match scoring {
                        Scoring::Ird => ratio(representativeness[i], dist),
                        Scoring::Id => -dist,
                    }
                })
                .collect();
            let previous = selected[slot];
            let chosen = match argmin(scores.iter().copied()) {
                // every candidate lies on the hyperplane: keep the current sample
                Some(k) if scores[k] == f64::INFINITY => previous,
                Some(k) => candidates[k],
                None => previous,
            };
            selected[slot] = chosen;
            steps.push(ReplacementStep {
                phase: Phase::Core,
                sweep: sweeps,
                slot,
                fixed,
                candidates,
                previous,
                chosen,
            });
        }
        sweeps += 1;
        if history.contains(&selected) {
            repeated = true;
            break;
        }
        history.push(&selected);
    }
    Ok(Refinement {
        selected,
        history,
        sweeps,
        repeated,
    })
}

fn candidates_excluding(n: usize, excluded: &[usize]) -> Vec<usize> {
    let excluded: BTreeSet<usize> = excluded.iter().copied().collect();
    (0..n).filter(|i| !excluded.contains(i)).collect()
}

/// Scores every candidate for a core slot given the `d` fixed samples and
/// returns the winner (lowest score, lowest index on ties). Mostly useful to
/// inspect single replacement steps.
pub fn best_core_replacement(
    space: &DMatrix<f64>,
    fixed: &[usize],
    candidates: &[usize],
    scoring: Scoring,
) -> Result<Option<usize>> {
    let h = hyperplane_through_points(&select_rows(space, fixed))?;
    let scores = candidates.iter().map(|&i| {
        let x = row_vec(space, i);
        match scoring {
            Scoring::Ird => ird_objective(&x, space, &h),
            Scoring::Id => -point_manifold_distance(&x, &h),
        }
    });
    Ok(argmin(scores).map(|k| candidates[k]))
}

fn initialize<R: Rng + ?Sized>(space: &DMatrix<f64>, m: usize, init: IrdInit, rng: &mut R) -> Result<Vec<usize>> {
    match init {
        IrdInit::Rd => rd_indices(space, m, rng),
        IrdInit::Gsx => Ok(gsx_indices(space, m)),
    }
}

fn finish_core_selection(
    case: IrdCase,
    scoring: Scoring,
    refinement: Refinement,
    steps: Vec<ReplacementStep>,
) -> IrdRun {
    let mut selection = Selection::new(refinement.selected, scoring.label());
    selection.note("case", case.label());
    selection.note("core_sweeps", refinement.sweeps);
    selection.note("core_repeated", refinement.repeated);
    IrdRun {
        case,
        selection,
        core_history: refinement.history,
        extra_history: SelectionHistory::new(),
        core_sweeps: refinement.sweeps,
        extra_sweeps: 0,
        steps,
        clusters: Vec::new(),
    }
}

fn all_indices_run(case: IrdCase, scoring: Scoring, n: usize) -> IrdRun {
    let mut selection = Selection::new((0..n).collect(), scoring.label());
    selection.note("case", case.label());
    selection.note("pool_exhausted", true);
    IrdRun {
        case,
        selection,
        core_history: SelectionHistory::new(),
        extra_history: SelectionHistory::new(),
        core_sweeps: 0,
        extra_sweeps: 0,
        steps: Vec::new(),
        clusters: Vec::new(),
    }
}

/// IRD for exactly `M = d + 1` samples.
///
/// A pool with no more than `d + 1` rows is returned whole.
pub fn ird_case_equal<R: Rng + ?Sized>(
    pool: &DMatrix<f64>,
    config: &IrdConfig,
    rng: &mut R,
) -> Result<IrdRun> {
    case_equal(pool, config, Scoring::Ird, rng)
}

fn case_equal<R: Rng + ?Sized>(
    pool: &DMatrix<f64>,
    config: &IrdConfig,
    scoring: Scoring,
    rng: &mut R,
) -> Result<IrdRun> {
    let (n, d) = pool.shape();
    if n <= d + 1 {
        return Ok(all_indices_run(IrdCase::Equal, scoring, n));
    }
    let init = initialize(pool, d + 1, config.init, rng)?;
    let mut steps = Vec::new();
    let refinement = refine_core(pool, init, config.c_max, scoring, &mut steps)?;
    Ok(finish_core_selection(IrdCase::Equal, scoring, refinement, steps))
}

/// IRD for `2 <= M < d + 1`: refine in the space of the leading `M - 1`
/// principal component scores of the pool.
pub fn ird_case_less<R: Rng + ?Sized>(
    pool: &DMatrix<f64>,
    m: usize,
    config: &IrdConfig,
    rng: &mut R,
) -> Result<IrdRun> {
    case_less(pool, m, config, Scoring::Ird, rng)
}

fn case_less<R: Rng + ?Sized>(
    pool: &DMatrix<f64>,
    m: usize,
    config: &IrdConfig,
    scoring: Scoring,
    rng: &mut R,
) -> Result<IrdRun> {
    let (n, d) = pool.shape();
    if m < 2 {
        return Err(Error::invalid("IRD needs at least 2 samples"));
    }
    if m >= d + 1 {
        return Err(Error::invalid(format!(
            "case M < d + 1 called with M = {m}, d = {d}"
        )));
    }
    if n <= m {
        return Err(Error::invalid(format!(
            "pool of {n} is too small to select {m} by PCA scores"
        )));
    }
    let pca = pca_fit(pool, m - 1)?;
    let scores = pca.transform(pool)?;
    let init = initialize(&scores, m, config.init, rng)?;
    let mut steps = Vec::new();
    let refinement = refine_core(&scores, init, config.c_max, scoring, &mut steps)?;
    let mut run = finish_core_selection(IrdCase::Less, scoring, refinement, steps);
    run.selection.note("pca_components", m - 1);
    Ok(run)
}

/// IRD for `M > d + 1`: refine `d + 1` core samples, then one sample per
/// k-means cluster of the remaining pool, each slot maximizing [`rd_score`]
/// within its own cluster.
pub fn ird_case_greater<R: Rng + ?Sized>(
    pool: &DMatrix<f64>,
    m: usize,
    config: &IrdConfig,
    rng: &mut R,
) -> Result<IrdRun> {
    case_greater(pool, m, config, Scoring::Ird, rng)
}

fn case_greater<R: Rng + ?Sized>(
    pool: &DMatrix<f64>,
    m: usize,
    config: &IrdConfig,
    scoring: Scoring,
    rng: &mut R,
) -> Result<IrdRun> {
    let (n, d) = pool.shape();
    if m <= d + 1 {
        return Err(Error::invalid(format!(
            "case M > d + 1 called with M = {m}, d = {d}"
        )));
    }
    check_budget(n, m)?;

    let mut run = case_equal(pool, config, scoring, rng)?;
    let core = run.selection.indices.clone();

    let rest = candidates_excluding(n, &core);
    let k = m - d - 1;
    let clustering = kmeans(&select_rows(pool, &rest), k, rng, KMEANS_MAX_ITER)?;
    let clusters: Vec<Vec<usize>> = clustering
        .members()
        .into_iter()
        .map(|members| members.into_iter().map(|i| rest[i]).collect())
        .collect();

    let mut selected = core.clone();
    for (c, members) in clusters.iter().enumerate() {
        selected.push(closest_member(pool, members, &row_vec(&clustering.centroids, c)));
    }

    let mut history = SelectionHistory::new();
    history.push(&selected);
    let mut sweeps = 0;
    let mut repeated = false;
    while sweeps < config.c_max {
        for (c, members) in clusters.iter().enumerate() {
            let slot = d + 1 + c;
            let others: Vec<usize> = selected
                .iter()
                .enumerate()
                .filter(|&(t, _)| t != slot)
                .map(|(_, &i)| i)
                .collect();
            let scores = members.iter().map(|&i| match scoring {
                Scoring::Ird => rd_score(i, members, &others, pool),
                Scoring::Id => diversity(i, &others, pool),
            });
            let best = argmax(scores).expect("non-empty cluster");
            let previous = selected[slot];
            selected[slot] = members[best];
            run.steps.push(ReplacementStep {
                phase: Phase::Extra,
                sweep: sweeps,
                slot,
                fixed: others,
                candidates: members.clone(),
                previous,
                chosen: members[best],
            });
        }
        sweeps += 1;
        if history.contains(&selected) {
            repeated = true;
            break;
        }
        history.push(&selected);
    }

    run.case = IrdCase::Greater;
    run.selection.indices = selected;
    run.selection.note("case", IrdCase::Greater.label());
    run.selection.note("extra_sweeps", sweeps);
    run.selection.note("extra_repeated", repeated);
    run.extra_history = history;
    run.extra_sweeps = sweeps;
    run.clusters = clusters;
    Ok(run)
}

/// Dispatches on `M` versus `d + 1` and returns the full run record.
pub fn run_ird<R: Rng + ?Sized>(
    pool: &DMatrix<f64>,
    m: usize,
    config: &IrdConfig,
    scoring: Scoring,
    rng: &mut R,
) -> Result<IrdRun> {
    let (n, d) = pool.shape();
    if m < 2 {
        return Err(Error::invalid("IRD needs at least 2 samples"));
    }
    check_budget(n, m)?;
    if m == d + 1 {
        case_equal(pool, config, scoring, rng)
    } else if m < d + 1 {
        if n == m {
            return Ok(all_indices_run(IrdCase::Less, scoring, n));
        }
        case_less(pool, m, config, scoring, rng)
    } else {
        case_greater(pool, m, config, scoring, rng)
    }
}

/// Informativeness-representativeness-diversity selection of `M` samples.
pub fn select_ird<R: Rng + ?Sized>(
    pool: &DMatrix<f64>,
    m: usize,
    config: &IrdConfig,
    rng: &mut R,
) -> Result<Selection> {
    Ok(run_ird(pool, m, config, Scoring::Ird, rng)?.selection)
}

/// The ID ablation: same control flow as [`select_ird`] but core slots
/// maximize the hyperplane distance alone and cluster slots maximize the
/// diversity alone.
pub fn select_id<R: Rng + ?Sized>(
    pool: &DMatrix<f64>,
    m: usize,
    config: &IrdConfig,
    rng: &mut R,
) -> Result<Selection> {
    Ok(run_ird(pool, m, config, Scoring::Id, rng)?.selection)
}
