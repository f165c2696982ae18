//! k-means clustering and the adjusted Rand index.
//!
//! Small, deterministic implementations used by the evaluation harness:
//! k-means with k-means++ seeding and multiple restarts, and ARI for
//! comparing recovered partitions against ground truth.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::mat::DenseMatrix;
use crate::util::derive_seed;

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("k must be in 1..=n_points (k={k}, n={n})")]
    BadK { k: usize, n: usize },
    #[error("label vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
}

/// Result of a k-means run.
#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centers: DenseMatrix,
    pub inertia: f64,
}

const KMEANS_RESTARTS: usize = 10;
const KMEANS_MAX_ITERS: usize = 100;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means with k-means++ initialization, `KMEANS_RESTARTS` restarts and at
/// most `KMEANS_MAX_ITERS` Lloyd iterations per restart. Deterministic for a
/// fixed seed. Returns the restart with the lowest inertia.
pub fn kmeans(points: &DenseMatrix, k: usize, seed: u64) -> Result<KMeansResult, ClusterError> {
    let n = points.rows();
    if n == 0 {
        return Err(ClusterError::Empty);
    }
    if k == 0 || k > n {
        return Err(ClusterError::BadK { k, n });
    }
    let mut best: Option<KMeansResult> = None;
    for restart in 0..KMEANS_RESTARTS {
        let run = kmeans_once(points, k, derive_seed(seed, restart as u64));
        if best.as_ref().map_or(true, |b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.unwrap())
}

fn kmeans_once(points: &DenseMatrix, k: usize, seed: u64) -> KMeansResult {
    let n = points.rows();
    let dim = points.cols();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);

    // k-means++ seeding
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let first = rng.gen_range(0..n);
    centers.push(points.row(first).to_vec());
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let idx = if total <= 0.0 {
            rng.gen_range(0..n)
        } else {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                target -= w;
                if target <= 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        centers.push(points.row(idx).to_vec());
        let c = centers.last().unwrap();
        for i in 0..n {
            let d = sq_dist(points.row(i), c);
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }

    let mut labels = vec![0usize; n];
    let mut inertia = f64::INFINITY;
    for _ in 0..KMEANS_MAX_ITERS {
        // assign
        let mut new_inertia = 0.0;
        for i in 0..n {
            let mut best_j = 0;
            let mut best_d = f64::INFINITY;
            for (j, c) in centers.iter().enumerate() {
                let d = sq_dist(points.row(i), c);
                if d < best_d {
                    best_d = d;
                    best_j = j;
                }
            }
            labels[i] = best_j;
            new_inertia += best_d;
        }
        // update
        let mut sums = vec![vec![0.0f64; dim]; k];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            let row = points.row(i);
            for (s, &x) in sums[labels[i]].iter_mut().zip(row) {
                *s += x;
            }
        }
        for j in 0..k {
            if counts[j] == 0 {
                // re-seed empty cluster at the point farthest from its center
                let far = (0..n)
                    .max_by(|&a, &b| {
                        sq_dist(points.row(a), &centers[labels[a]])
                            .partial_cmp(&sq_dist(points.row(b), &centers[labels[b]]))
                            .unwrap()
                    })
                    .unwrap();
                centers[j] = points.row(far).to_vec();
            } else {
                for (c, s) in centers[j].iter_mut().zip(&sums[j]) {
                    *c = s / counts[j] as f64;
                }
            }
        }
        if (inertia - new_inertia).abs() <= 1e-12 * (1.0 + inertia.abs()) {
            inertia = new_inertia;
            break;
        }
        inertia = new_inertia;
    }

    let mut center_mat = DenseMatrix::zeros(k, dim);
    for (j, c) in centers.iter().enumerate() {
        for (col, &x) in c.iter().enumerate() {
            center_mat.set(j, col, x);
        }
    }
    KMeansResult { labels, centers: center_mat, inertia }
}

/// Adjusted Rand index between two labelings of the same points.
///
/// Returns 1.0 when both partitions place all points in a single cluster
/// (the correction term is degenerate there but the partitions agree).
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64, ClusterError> {
    if a.len() != b.len() {
        return Err(ClusterError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(ClusterError::Empty);
    }
    let ka = a.iter().copied().max().unwrap() + 1;
    let kb = b.iter().copied().max().unwrap() + 1;
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let choose2 = |m: u64| -> f64 { (m as f64) * (m as f64 - 1.0) / 2.0 };
    let mut sum_ij = 0.0;
    let mut row_sums = vec![0u64; ka];
    let mut col_sums = vec![0u64; kb];
    for i in 0..ka {
        for j in 0..kb {
            sum_ij += choose2(table[i][j]);
            row_sums[i] += table[i][j];
            col_sums[j] += table[i][j];
        }
    }
    let sum_a: f64 = row_sums.iter().map(|&m| choose2(m)).sum();
    let sum_b: f64 = col_sums.iter().map(|&m| choose2(m)).sum();
    let total = choose2(a.len() as u64);
    let expected = sum_a * sum_b / total.max(1.0);
    let max_index = 0.5 * (sum_a + sum_b);
    if (max_index - expected).abs() <= f64::EPSILON * max_index.max(1.0) {
        // both partitions trivial (all-one-cluster or all-singletons agreeing)
        return Ok(1.0);
    }
    Ok((sum_ij - expected) / (max_index - expected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::random_dense;

    #[test]
    fn ari_identical_labels_is_one() {
        let labels = vec![0, 0, 1, 1, 2, 2];
        assert!((adjusted_rand_index(&labels, &labels).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ari_permuted_labels_is_one() {
        let a = vec![0, 0, 1, 1, 2, 2];
        let b = vec![2, 2, 0, 0, 1, 1];
        assert!((adjusted_rand_index(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ari_single_cluster_convention() {
        let a = vec![0, 0, 0, 0];
        let b = vec![0, 0, 0, 0];
        assert_eq!(adjusted_rand_index(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn ari_random_labels_near_zero() {
        use rand::Rng;
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let a: Vec<usize> = (0..2000).map(|_| rng.gen_range(0..3)).collect();
        let b: Vec<usize> = (0..2000).map(|_| rng.gen_range(0..3)).collect();
        let ari = adjusted_rand_index(&a, &b).unwrap();
        assert!(ari.abs() < 0.05, "ari = {ari}");
    }

    #[test]
    fn ari_length_mismatch_errors() {
        assert!(adjusted_rand_index(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn kmeans_separates_clear_blobs() {
        // three well-separated Gaussian blobs in 2D
        let centers = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0)];
        let mut data = Vec::new();
        let mut truth = Vec::new();
        let noise = random_dense(90, 2, 11);
        for i in 0..90 {
            let c = i / 30;
            data.push(centers[c].0 + 0.3 * noise.get(i, 0));
            data.push(centers[c].1 + 0.3 * noise.get(i, 1));
            truth.push(c);
        }
        let points = DenseMatrix::from_row_major(90, 2, data).unwrap();
        let result = kmeans(&points, 3, 5).unwrap();
        let ari = adjusted_rand_index(&result.labels, &truth).unwrap();
        assert!(ari > 0.99, "ari = {ari}");
    }

    #[test]
    fn kmeans_deterministic() {
        let points = random_dense(50, 3, 2);
        let a = kmeans(&points, 4, 9).unwrap();
        let b = kmeans(&points, 4, 9).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.inertia.to_bits(), b.inertia.to_bits());
    }

    #[test]
    fn kmeans_bad_k_errors() {
        let points = random_dense(5, 2, 1);
        assert!(kmeans(&points, 0, 0).is_err());
        assert!(kmeans(&points, 6, 0).is_err());
    }

    #[test]
    fn kmeans_k_equals_n_gives_zero_inertia() {
        let points = random_dense(6, 2, 3);
        let r = kmeans(&points, 6, 0).unwrap();
        assert!(r.inertia < 1e-18);
    }
}
