//! Numerical kernels shared by the selectors: PCA, Lloyd's k-means,
//! hyperplanes through `d` points in `R^d`, and distance helpers.

use nalgebra::{DMatrix, DVector, RowDVector};
use rand::Rng;

use crate::error::{Error, Result};

/// Principal component model of a data matrix.
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub mean: DVector<f64>,
    /// `k x d`, orthonormal rows, ordered by decreasing variance.
    pub components: DMatrix<f64>,
    /// Population variance of the scores along each component.
    pub variances: DVector<f64>,
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.components.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.components.ncols()
    }

    /// Projects the mean-centered rows of `x` onto the components.
    pub fn transform(&self, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if x.ncols() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: x.ncols(),
            });
        }
        let centered = center_rows(x, &self.mean);
        Ok(centered * self.components.transpose())
    }

    /// Maps scores back to the input space.
    pub fn inverse_transform(&self, scores: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if scores.ncols() != self.n_components() {
            return Err(Error::DimensionMismatch {
                expected: self.n_components(),
                actual: scores.ncols(),
            });
        }
        let mut x = scores * &self.components;
        for mut row in x.row_iter_mut() {
            row += self.mean.transpose();
        }
        Ok(x)
    }
}

fn center_rows(x: &DMatrix<f64>, mean: &DVector<f64>) -> DMatrix<f64> {
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    centered
}

fn column_means(x: &DMatrix<f64>) -> DVector<f64> {
    let n = x.nrows() as f64;
    DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.sum() / n))
}

/// Fits a `k`-component PCA by SVD of the mean-centered data.
///
/// Component signs are fixed so that each component's largest-magnitude
/// coordinate is positive.
pub fn pca_fit(x: &DMatrix<f64>, k: usize) -> Result<PcaModel> {
    let (n, d) = x.shape();
    if n < 2 || k == 0 || k > (n - 1).min(d) {
        return Err(Error::invalid(format!(
            "PCA with {k} components needs 1 <= k <= min(n-1, d) = {}",
            n.saturating_sub(1).min(d)
        )));
    }
    let mean = column_means(x);
    let centered = center_rows(x, &mean);
    let svd = centered.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("SVD did not return right singular vectors".into()))?;

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .total_cmp(&svd.singular_values[a])
            .then(a.cmp(&b))
    });

    let mut components = DMatrix::zeros(k, d);
    let mut variances = DVector::zeros(k);
    for (r, &src) in order.iter().take(k).enumerate() {
        let mut row: RowDVector<f64> = v_t.row(src).into_owned();
        let lead = largest_magnitude(row.iter());
        if row[lead] < 0.0 {
            row.neg_mut();
        }
        components.set_row(r, &row);
        variances[r] = svd.singular_values[src].powi(2) / n as f64;
    }

    Ok(PcaModel {
        mean,
        components,
        variances,
    })
}

pub fn pca_transform(model: &PcaModel, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    model.transform(x)
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    /// `k x d`
    pub centroids: DMatrix<f64>,
    pub assignments: Vec<usize>,
    pub inertia: f64,
    pub iterations: usize,
    /// Inertia after every Lloyd iteration.
    pub inertia_trace: Vec<f64>,
}

impl KMeansResult {
    pub fn k(&self) -> usize {
        self.centroids.nrows()
    }

    /// Point indices of each cluster, ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.k()];
        for (i, &c) in self.assignments.iter().enumerate() {
            members[c].push(i);
        }
        members
    }
}

pub const KMEANS_MAX_ITER: usize = 300;

/// Lloyd's k-means.
///
/// Centroids are seeded with k-means++ from `rng`.
/// Iterates until the assignment stops changing or `max_iter` is reached. An
/// emptied cluster takes over the point farthest from its current centroid.
pub fn kmeans<R: Rng + ?Sized>(
    x: &DMatrix<f64>,
    k: usize,
    rng: &mut R,
    max_iter: usize,
) -> Result<KMeansResult> {
    let (n, d) = x.shape();
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "k-means needs 1 <= k <= n = {n}, got k = {k}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::invalid("k-means needs max_iter >= 1"));
    }

    let seeds = kmeans_plus_plus_seeds(x, k, rng);
    let mut centroids = DMatrix::from_fn(k, d, |c, j| x[(seeds[c], j)]);
    let mut assignments: Vec<usize> = Vec::new();
    let mut inertia_trace = Vec::new();
    let mut iterations = 0;

    while iterations < max_iter {
        iterations += 1;
        let mut next: Vec<usize> = (0..n).map(|i| nearest_centroid(x, i, &centroids)).collect();
        repair_empty_clusters(x, &centroids, &mut next, k);

        centroids = cluster_means(x, &next, k);
        inertia_trace.push(inertia(x, &centroids, &next));
        let converged = next == assignments;
        assignments = next;
        if converged {
            break;
        }
    }

    let inertia = *inertia_trace.last().expect("at least one iteration");
    Ok(KMeansResult {
        centroids,
        assignments,
        inertia,
        iterations,
        inertia_trace,
    })
}

fn nearest_centroid(x: &DMatrix<f64>, i: usize, centroids: &DMatrix<f64>) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for c in 0..centroids.nrows() {
        let dist = (x.row(i) - centroids.row(c)).norm_squared();
        if dist < best_dist {
            best_dist = dist;
            best = c;
        }
    }
    best
}

fn repair_empty_clusters(x: &DMatrix<f64>, centroids: &DMatrix<f64>, assignments: &mut [usize], k: usize) {
    let mut sizes = vec![0usize; k];
    for &c in assignments.iter() {
        sizes[c] += 1;
    }
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut donor = None;
        let mut farthest = f64::NEG_INFINITY;
        for (i, &c) in assignments.iter().enumerate() {
            if sizes[c] < 2 {
                continue;
            }
            let dist = (x.row(i) - centroids.row(c)).norm_squared();
            if dist > farthest {
                farthest = dist;
                donor = Some(i);
            }
        }
        // k <= n guarantees a cluster with two or more members
        let i = donor.expect("k <= n leaves a non-singleton cluster");
        sizes[assignments[i]] -= 1;
        assignments[i] = empty;
        sizes[empty] = 1;
    }
}

fn cluster_means(x: &DMatrix<f64>, assignments: &[usize], k: usize) -> DMatrix<f64> {
    let mut sums = DMatrix::zeros(k, x.ncols());
    let mut counts = vec![0usize; k];
    for (i, &c) in assignments.iter().enumerate() {
        let mut row = sums.row_mut(c);
        row += x.row(i);
        counts[c] += 1;
    }
    for (c, &count) in counts.iter().enumerate() {
        let mut row = sums.row_mut(c);
        row /= count as f64;
    }
    sums
}

fn inertia(x: &DMatrix<f64>, centroids: &DMatrix<f64>, assignments: &[usize]) -> f64 {
    assignments
        .iter()
        .enumerate()
        .map(|(i, &c)| (x.row(i) - centroids.row(c)).norm_squared())
        .sum()
}

/// The affine hyperplane `{x : x . w + b = 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub w: DVector<f64>,
    pub b: f64,
}

impl Hyperplane {
    pub fn dim(&self) -> usize {
        self.w.len()
    }
}

/// Hyperplane through the `d` rows of a `d x d` matrix.
///
/// Solves `[P | 1] [w; b] = 0` for a unit-norm `w` via the right singular
/// vector of the smallest singular value. Affinely dependent points have a
/// larger null space; any unit null vector is returned in that case. The sign
/// is fixed so the largest-magnitude entry of `w` is positive.
pub fn hyperplane_through_points(points: &DMatrix<f64>) -> Result<Hyperplane> {
    let d = points.ncols();
    if points.nrows() != d || d == 0 {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: points.nrows(),
        });
    }

    // Pad with a zero row so the SVD is square and yields all d+1 right
    // singular vectors, including the null direction.
    let system = DMatrix::from_fn(d + 1, d + 1, |i, j| {
        if i == d {
            0.0
        } else if j == d {
            1.0
        } else {
            points[(i, j)]
        }
    });
    let svd = system.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("SVD did not return right singular vectors".into()))?;
    let smallest = svd.singular_values.imin();
    let null = v_t.row(smallest);

    let mut w = DVector::from_iterator(d, null.iter().take(d).copied());
    let mut b = null[d];
    let norm = w.norm();
    if norm < 1e-12 {
        return Err(Error::Numerical("hyperplane normal vanished".into()));
    }
    w /= norm;
    b /= norm;
    if w[largest_magnitude(w.iter())] < 0.0 {
        w.neg_mut();
        b = -b;
    }
    Ok(Hyperplane { w, b })
}

/// Unsigned distance from `x` to the hyperplane: `|x . w + b| / |w|`.
pub fn point_manifold_distance(x: &[f64], h: &Hyperplane) -> f64 {
    let dot: f64 = x.iter().zip(h.w.iter()).map(|(a, b)| a * b).sum();
    (dot + h.b).abs() / h.w.norm()
}

/// Root of the mean squared distance from `x` to the rows of `data`.
pub fn mean_sq_distance_root(x: &[f64], data: &DMatrix<f64>) -> f64 {
    let total: f64 = (0..data.nrows()).map(|i| sq_dist_to_row(x, data, i)).sum();
    (total / data.nrows() as f64).sqrt()
}

pub fn sq_dist_to_row(x: &[f64], data: &DMatrix<f64>, i: usize) -> f64 {
    x.iter()
        .enumerate()
        .map(|(j, v)| (v - data[(i, j)]).powi(2))
        .sum()
}

pub fn sq_dist_rows(data: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    (0..data.ncols())
        .map(|j| (data[(a, j)] - data[(b, j)]).powi(2))
        .sum()
}

pub fn row_vec(data: &DMatrix<f64>, i: usize) -> Vec<f64> {
    data.row(i).iter().copied().collect()
}

/// k-means++ seeding: the first seed uniformly, each next one with
/// probability proportional to its squared distance to the nearest seed.
/// Falls back to a uniform pick among unused rows once every row coincides
/// with a seed.
fn kmeans_plus_plus_seeds<R: Rng + ?Sized>(x: &DMatrix<f64>, k: usize, rng: &mut R) -> Vec<usize> {
    let n = x.nrows();
    let mut seeds = vec![rng.gen_range(0..n)];
    let mut used = vec![false; n];
    used[seeds[0]] = true;
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist_rows(x, i, seeds[0])).collect();
    while seeds.len() < k {
        let total: f64 = (0..n).filter(|&i| !used[i]).map(|i| nearest[i]).sum();
        let pick = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for i in (0..n).filter(|&i| !used[i]) {
                acc += nearest[i];
                if nearest[i] > 0.0 {
                    pick = Some(i);
                    if target < acc {
                        break;
                    }
                }
            }
            pick.expect("positive total has a positive entry")
        } else {
            let free: Vec<usize> = (0..n).filter(|&i| !used[i]).collect();
            free[rng.gen_range(0..free.len())]
        };
        used[pick] = true;
        seeds.push(pick);
        for (i, v) in nearest.iter_mut().enumerate() {
            *v = v.min(sq_dist_rows(x, i, pick));
        }
    }
    seeds
}

/// Position of the largest absolute value, first one on ties.
fn largest_magnitude<'a>(values: impl Iterator<Item = &'a f64>) -> usize {
    let mut best = 0;
    let mut best_abs = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v.abs() > best_abs {
            best_abs = v.abs();
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn pca_on_a_line() {
        let x = DMatrix::from_fn(6, 2, |i, _| i as f64);
        let model = pca_fit(&x, 1).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((model.components[(0, 0)] - s).abs() < 1e-12);
        assert!((model.components[(0, 1)] - s).abs() < 1e-12);
        // second direction carries nothing
        let full = pca_fit(&x, 2).unwrap();
        assert!(full.variances[1].abs() < 1e-12);
    }

    #[test]
    fn full_rank_pca_is_a_rotation() {
        let x = DMatrix::from_fn(12, 3, |i, j| ((i * 5 + j * 7) % 13) as f64 + (i * j) as f64 * 0.1);
        let model = pca_fit(&x, 3).unwrap();
        let z = model.transform(&x).unwrap();
        for a in 0..12 {
            for b in 0..12 {
                assert!((sq_dist_rows(&x, a, b).sqrt() - sq_dist_rows(&z, a, b).sqrt()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn pca_mean_maps_to_origin() {
        let x = DMatrix::from_fn(10, 4, |i, j| (i as f64).sin() * (j + 1) as f64 + j as f64);
        let model = pca_fit(&x, 2).unwrap();
        let mean_row = DMatrix::from_row_slice(1, 4, model.mean.as_slice());
        assert!(model.transform(&mean_row).unwrap().amax() < 1e-12);
    }

    #[test]
    fn pca_scores_reproduce_variances() {
        let x = DMatrix::from_fn(30, 4, |i, j| ((i * 31 + j * 17) % 23) as f64 / (j + 1) as f64);
        let model = pca_fit(&x, 3).unwrap();
        let z = model.transform(&x).unwrap();
        for (c, col) in z.column_iter().enumerate() {
            let mean = col.sum() / 30.0;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 30.0;
            assert!((var - model.variances[c]).abs() < 1e-6);
        }
        assert!(model.variances.as_slice().windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn pca_projection_of_single_point() {
        let model = PcaModel {
            mean: DVector::zeros(2),
            components: DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            variances: DVector::from_element(1, 1.0),
        };
        let x = DMatrix::from_row_slice(1, 2, &[3.0, 4.0]);
        assert_eq!(pca_transform(&model, &x).unwrap()[(0, 0)], 3.0);
        assert!(pca_transform(&model, &DMatrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn pca_rejects_bad_k() {
        let x = DMatrix::from_fn(4, 3, |i, j| (i + j) as f64);
        assert!(pca_fit(&x, 0).is_err());
        assert!(pca_fit(&x, 4).is_err());
        let tall = DMatrix::from_fn(3, 5, |i, j| (i * j) as f64);
        assert!(pca_fit(&tall, 3).is_err());
        assert!(pca_fit(&tall, 2).is_ok());
    }

    #[test]
    fn pca_reconstructs_low_rank_data() {
        // rank-2 data embedded in 5 dimensions
        let basis = DMatrix::from_row_slice(2, 5, &[1.0, 2.0, 0.0, -1.0, 0.5, 0.0, 1.0, 1.0, 3.0, -2.0]);
        let coef = DMatrix::from_fn(20, 2, |i, j| ((i * 3 + j * 11) % 7) as f64 - 3.0 + 0.1 * i as f64);
        let x = coef * basis;
        let model = pca_fit(&x, 2).unwrap();
        let back = model.inverse_transform(&model.transform(&x).unwrap()).unwrap();
        assert!((back - x).amax() < 1e-8);
    }

    #[test]
    fn kmeans_two_obvious_groups() {
        let x = DMatrix::from_column_slice(4, 1, &[0.0, 0.1, 10.0, 10.1]);
        let res = kmeans(&x, 2, &mut rng(3), KMEANS_MAX_ITER).unwrap();
        let mut c: Vec<f64> = res.centroids.iter().copied().collect();
        c.sort_by(f64::total_cmp);
        assert!((c[0] - 0.05).abs() < 1e-12 && (c[1] - 10.05).abs() < 1e-12);
    }

    #[test]
    fn kmeans_two_groups_matches_best_partition() {
        // exhaustive check over all 2-partitions of the four points
        let pts = [0.0, 0.1, 10.0, 10.1];
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << 4) - 1 {
            let cost = |want: u32| {
                let grp: Vec<f64> = (0..4).filter(|i| (mask >> i) & 1 == want).map(|i| pts[i]).collect();
                let m = grp.iter().sum::<f64>() / grp.len() as f64;
                grp.iter().map(|v| (v - m).powi(2)).sum::<f64>()
            };
            best = best.min(cost(0) + cost(1));
        }
        let x = DMatrix::from_column_slice(4, 1, &pts);
        for seed in 0..10 {
            let res = kmeans(&x, 2, &mut rng(seed), KMEANS_MAX_ITER).unwrap();
            assert!((res.inertia - best).abs() < 1e-12);
        }
    }

    #[test]
    fn kmeans_saturated_and_single() {
        let x = DMatrix::from_fn(5, 2, |i, j| (i * 3 + j) as f64);
        let res = kmeans(&x, 5, &mut rng(1), KMEANS_MAX_ITER).unwrap();
        assert_eq!(res.inertia, 0.0);
        let res = kmeans(&x, 1, &mut rng(1), KMEANS_MAX_ITER).unwrap();
        assert!((res.centroids[(0, 0)] - 6.0).abs() < 1e-12);
        assert!((res.centroids[(0, 1)] - 7.0).abs() < 1e-12);
        assert!(kmeans(&x, 6, &mut rng(1), KMEANS_MAX_ITER).is_err());
        assert!(kmeans(&x, 0, &mut rng(1), KMEANS_MAX_ITER).is_err());
    }

    #[test]
    fn kmeans_repairs_empty_clusters_on_duplicates() {
        let x = DMatrix::from_column_slice(6, 1, &[1.0, 1.0, 1.0, 1.0, 2.0, 2.0]);
        let res = kmeans(&x, 4, &mut rng(0), KMEANS_MAX_ITER).unwrap();
        assert!(res.members().iter().all(|m| !m.is_empty()));
    }

    #[test]
    fn hyperplane_examples() {
        let h = hyperplane_through_points(&DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0])).unwrap();
        assert!((h.w[0]).abs() < 1e-12 && (h.w[1] - 1.0).abs() < 1e-12 && h.b.abs() < 1e-12);

        let h = hyperplane_through_points(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert!((h.w[0] - s).abs() < 1e-12 && (h.w[1] - s).abs() < 1e-12);
        assert!((h.b + s).abs() < 1e-12);

        let h = hyperplane_through_points(&DMatrix::identity(3, 3)).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!(h.w.iter().all(|v| (v - s).abs() < 1e-12));
        assert!((h.b + s).abs() < 1e-12);
    }

    #[test]
    fn hyperplane_in_one_dimension_is_a_point() {
        let h = hyperplane_through_points(&DMatrix::from_element(1, 1, 2.5)).unwrap();
        assert!((point_manifold_distance(&[4.0], &h) - 1.5).abs() < 1e-12);
        assert!((point_manifold_distance(&[-1.0], &h) - 3.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_points_still_give_a_plane() {
        // three collinear points in 3-D: infinitely many planes contain them
        let p = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
        let h = hyperplane_through_points(&p).unwrap();
        assert!((h.w.norm() - 1.0).abs() < 1e-12);
        for t in 0..3 {
            assert!(point_manifold_distance(&row_vec(&p, t), &h) < 1e-9);
        }
        // duplicated point
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let h = hyperplane_through_points(&p).unwrap();
        assert!(point_manifold_distance(&[1.0, 1.0], &h) < 1e-9);
    }

    #[test]
    fn manifold_distance_examples() {
        let axis = Hyperplane { w: DVector::from_vec(vec![0.0, 1.0]), b: 0.0 };
        assert_eq!(point_manifold_distance(&[2.0, 3.0], &axis), 3.0);
        assert_eq!(point_manifold_distance(&[5.0, 0.0], &axis), 0.0);
        let slanted = Hyperplane { w: DVector::from_vec(vec![3.0, 4.0]), b: 0.0 };
        assert!((point_manifold_distance(&[1.0, 1.0], &slanted) - 1.4).abs() < 1e-12);
    }

    #[test]
    fn mean_sq_distance_root_examples() {
        let one = DMatrix::from_row_slice(1, 2, &[1.0, 2.0]);
        assert_eq!(mean_sq_distance_root(&[1.0, 2.0], &one), 0.0);
        let pair = DMatrix::from_column_slice(2, 1, &[-1.0, 1.0]);
        assert_eq!(mean_sq_distance_root(&[0.0], &pair), 1.0);
        let three = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        assert!((mean_sq_distance_root(&[0.0], &three) - (14.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn hyperplane_passes_through_its_points(
            d in 1usize..6,
            data in proptest::collection::vec(-10.0f64..10.0, 36),
        ) {
            let p = DMatrix::from_fn(d, d, |i, j| data[i * 6 + j]);
            let h = hyperplane_through_points(&p).unwrap();
            for t in 0..d {
                let r: f64 = p.row(t).iter().zip(h.w.iter()).map(|(a, b)| a * b).sum::<f64>() + h.b;
                prop_assert!(r.abs() <= 1e-6);
            }
        }
    }

    proptest! {
        #[test]
        fn distance_is_scale_invariant(
            w in proptest::collection::vec(-5.0f64..5.0, 3),
            b in -5.0f64..5.0,
            x in proptest::collection::vec(-5.0f64..5.0, 3),
            c in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0],
        ) {
            prop_assume!(w.iter().map(|v| v * v).sum::<f64>() > 1e-6);
            let h = Hyperplane { w: DVector::from_vec(w.clone()), b };
            let hc = Hyperplane { w: DVector::from_vec(w.iter().map(|v| v * c).collect()), b: b * c };
            let (a, s) = (point_manifold_distance(&x, &h), point_manifold_distance(&x, &hc));
            prop_assert!((a - s).abs() <= 1e-9 * (1.0 + a));
        }

        #[test]
        fn kmeans_inertia_never_increases(
            data in proptest::collection::vec(-10.0f64..10.0, 20..80),
            k in 1usize..6,
            seed in any::<u64>(),
        ) {
            let n = data.len() / 2;
            prop_assume!(k <= n);
            let x = DMatrix::from_fn(n, 2, |i, j| data[2 * i + j]);
            let res = kmeans(&x, k, &mut rng(seed), KMEANS_MAX_ITER).unwrap();
            for w in res.inertia_trace.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9);
            }
            let direct: f64 = (0..n).map(|i| (x.row(i) - res.centroids.row(res.assignments[i])).norm_squared()).sum();
            prop_assert!((direct - res.inertia).abs() < 1e-6);
            prop_assert!(res.members().iter().all(|m| !m.is_empty()));
            prop_assert!(res.assignments.iter().all(|&a| a < k));
        }
    }
}
