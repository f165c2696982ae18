//! Generative model for dynamic attributed networks: a dynamic
//! stochastic block model with Gaussian node covariates, plus exact mean
//! (noise-free) matrix construction.
//!
//! Nodes draw one of a fixed set of latent-state trajectories; edges at
//! time t are Bernoulli in the states at t and covariates are Gaussian
//! around per-state mean rows.

use crate::mat::{DenseMatrix, SparseMatrix};
use crate::util::derive_seed;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("latent state {state} out of range (K = {k})")]
    StateOutOfRange { state: usize, k: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("alpha {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
}

/// One latent-state trajectory with its assignment probability.
/// States are 0-based indices into B and D.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub probability: f64,
    pub states: Vec<usize>,
}

/// Parameters of the attributed dynamic latent position model,
/// specialized to Bernoulli edges and Gaussian covariates.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    /// Number of latent states.
    pub k: usize,
    /// K x K symmetric edge probability matrix.
    pub b: DenseMatrix,
    /// K x p mean attribute matrix.
    pub d: DenseMatrix,
    /// Covariate noise standard deviation.
    pub sigma: f64,
    /// Sparsity factor; edge probability is rho * B.
    pub rho: f64,
    /// Network/covariate mixing weight.
    pub alpha: f64,
    pub trajectories: Vec<Trajectory>,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.b.rows() != self.k || self.b.cols() != self.k {
            return Err(ModelError::InvalidSpec(format!(
                "B must be {k}x{k}",
                k = self.k
            )));
        }
        if self.d.rows() != self.k {
            return Err(ModelError::InvalidSpec(format!(
                "D must have {} rows",
                self.k
            )));
        }
        for i in 0..self.k {
            for j in 0..self.k {
                let v = self.b.get(i, j);
                if !(0.0..=1.0).contains(&v) {
                    return Err(ModelError::InvalidSpec(format!(
                        "B[{i}][{j}] = {v} outside [0,1]"
                    )));
                }
                if (v - self.b.get(j, i)).abs() > 1e-15 {
                    return Err(ModelError::InvalidSpec("B not symmetric".into()));
                }
            }
        }
        if self.sigma < 0.0 {
            return Err(ModelError::InvalidSpec("sigma < 0".into()));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(ModelError::InvalidSpec("rho outside (0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(ModelError::AlphaOutOfRange(self.alpha));
        }
        if self.trajectories.is_empty() {
            return Err(ModelError::InvalidSpec("no trajectories".into()));
        }
        let t_len = self.trajectories[0].states.len();
        let mut psum = 0.0;
        for traj in &self.trajectories {
            if traj.states.len() != t_len {
                return Err(ModelError::InvalidSpec(
                    "trajectory lengths differ".into(),
                ));
            }
            for &s in &traj.states {
                if s >= self.k {
                    return Err(ModelError::StateOutOfRange { state: s, k: self.k });
                }
            }
            psum += traj.probability;
        }
        if (psum - 1.0).abs() > 1e-9 {
            return Err(ModelError::InvalidSpec(format!(
                "trajectory probabilities sum to {psum}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn intervals(&self) -> usize {
        self.trajectories[0].states.len()
    }

    pub fn covariate_dim(&self) -> usize {
        self.d.cols()
    }
}

/// Per-node latent state per interval: z[i][t].
#[derive(Debug, Clone)]
pub struct LatentAssignment {
    pub z: Vec<Vec<usize>>,
    /// Index of the trajectory each node drew.
    pub trajectory_of: Vec<usize>,
}

impl LatentAssignment {
    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn intervals(&self) -> usize {
        self.z.first().map(|r| r.len()).unwrap_or(0)
    }

    /// Latent states of all nodes at interval t.
    pub fn states_at(&self, t: usize) -> Vec<usize> {
        self.z.iter().map(|row| row[t]).collect()
    }

    /// Distinct states present at interval t, ascending.
    pub fn distinct_states_at(&self, t: usize) -> Vec<usize> {
        let mut s: Vec<usize> = self.states_at(t);
        s.sort_unstable();
        s.dedup();
        s
    }
}

/// T sparse symmetric adjacency snapshots plus T dense covariate
/// snapshots over a shared node set.
#[derive(Debug, Clone)]
pub struct DynamicAttributedNetwork {
    pub adjacency: Vec<SparseMatrix>,
    pub covariates: Vec<DenseMatrix>,
}

impl DynamicAttributedNetwork {
    pub fn new(
        adjacency: Vec<SparseMatrix>,
        covariates: Vec<DenseMatrix>,
    ) -> Result<Self, ModelError> {
        if adjacency.is_empty() || adjacency.len() != covariates.len() {
            return Err(ModelError::DimensionMismatch(
                "adjacency/covariate snapshot counts differ or are empty".into(),
            ));
        }
        let n = adjacency[0].rows();
        let p = covariates[0].cols();
        for (t, a) in adjacency.iter().enumerate() {
            if a.rows() != n || a.cols() != n {
                return Err(ModelError::DimensionMismatch(format!(
                    "adjacency at interval {t} is not {n}x{n}"
                )));
            }
        }
        for (t, c) in covariates.iter().enumerate() {
            if c.rows() != n || c.cols() != p {
                return Err(ModelError::DimensionMismatch(format!(
                    "covariates at interval {t} are not {n}x{p}"
                )));
            }
        }
        Ok(DynamicAttributedNetwork {
            adjacency,
            covariates,
        })
    }

    pub fn intervals(&self) -> usize {
        self.adjacency.len()
    }

    pub fn n(&self) -> usize {
        self.adjacency[0].rows()
    }

    pub fn p(&self) -> usize {
        self.covariates[0].cols()
    }
}

/// Draw one trajectory per node according to the assignment
/// probabilities.
pub fn sample_assignments(
    spec: &ModelSpec,
    n: usize,
    seed: u64,
) -> Result<LatentAssignment, ModelError> {
    spec.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut z = Vec::with_capacity(n);
    let mut trajectory_of = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = spec.trajectories.len() - 1;
        for (idx, traj) in spec.trajectories.iter().enumerate() {
            acc += traj.probability;
            if u < acc {
                chosen = idx;
                break;
            }
        }
        trajectory_of.push(chosen);
        z.push(spec.trajectories[chosen].states.clone());
    }
    Ok(LatentAssignment { z, trajectory_of })
}

/// Sample a symmetric 0/1 adjacency snapshot with edge probability
/// rho * B over the given states. Diagonal is zero; each (i, j) pair is
/// drawn once and mirrored.
pub fn sample_adjacency(
    spec: &ModelSpec,
    z_t: &[usize],
    seed: u64,
) -> Result<SparseMatrix, ModelError> {
    let n = z_t.len();
    for &s in z_t {
        if s >= spec.k {
            return Err(ModelError::StateOutOfRange { state: s, k: spec.k });
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut trips = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let prob = spec.rho * spec.b.get(z_t[i], z_t[j]);
            if rng.gen::<f64>() < prob {
                trips.push((i, j, 1.0));
                trips.push((j, i, 1.0));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, &trips)
        .map_err(|e| ModelError::DimensionMismatch(e.to_string()))
}

/// Sample Gaussian covariates: row i = D[z_t[i]] + sigma * noise.
pub fn sample_covariates(
    spec: &ModelSpec,
    z_t: &[usize],
    seed: u64,
) -> Result<DenseMatrix, ModelError> {
    let n = z_t.len();
    let p = spec.covariate_dim();
    for &s in z_t {
        if s >= spec.k {
            return Err(ModelError::StateOutOfRange { state: s, k: spec.k });
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut m = DenseMatrix::zeros(n, p);
    for i in 0..n {
        let mean_row = spec.d.row(z_t[i]);
        let row = m.row_mut(i);
        for l in 0..p {
            let noise: f64 = rng.sample(StandardNormal);
            row[l] = mean_row[l] + spec.sigma * noise;
        }
    }
    Ok(m)
}

/// Sample a full dynamic attributed network conditioned on a latent
/// assignment. Covariates carry the rho^{1/2} model scaling so sampled
/// snapshots and exact mean matrices agree for all rho.
pub fn sample_network(
    spec: &ModelSpec,
    z: &LatentAssignment,
    seed: u64,
) -> Result<DynamicAttributedNetwork, ModelError> {
    let t_count = spec.intervals();
    let mut adjacency = Vec::with_capacity(t_count);
    let mut covariates = Vec::with_capacity(t_count);
    let sqrt_rho = spec.rho.sqrt();
    for t in 0..t_count {
        let z_t = z.states_at(t);
        let a = sample_adjacency(spec, &z_t, derive_seed(seed, 2 * t as u64))?;
        let mut c = sample_covariates(spec, &z_t, derive_seed(seed, 2 * t as u64 + 1))?;
        if sqrt_rho != 1.0 {
            c = c.scale(sqrt_rho);
        }
        adjacency.push(a);
        covariates.push(c);
    }
    DynamicAttributedNetwork::new(adjacency, covariates)
}

/// Augmented adjacency matrix for one interval:
///
/// ```text
/// [ (1-a) A    a C ]
/// [ a C^T      0   ]
/// ```
///
/// Exactly symmetric by construction (mirrored entries are the same
/// product).
pub fn build_augmented(
    a_t: &SparseMatrix,
    c_t: &DenseMatrix,
    alpha: f64,
) -> Result<SparseMatrix, ModelError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ModelError::AlphaOutOfRange(alpha));
    }
    let n = a_t.rows();
    if a_t.cols() != n {
        return Err(ModelError::DimensionMismatch("adjacency not square".into()));
    }
    if c_t.rows() != n {
        return Err(ModelError::DimensionMismatch(format!(
            "covariate rows {} != n {}",
            c_t.rows(),
            n
        )));
    }
    let p = c_t.cols();
    let total = n + p;
    let beta = 1.0 - alpha;

    let mut trips: Vec<(usize, usize, f64)> =
        Vec::with_capacity(a_t.nnz() + 2 * n * p);
    if beta != 0.0 {
        for i in 0..n {
            for (j, v) in a_t.row_entries(i) {
                trips.push((i, j, beta * v));
            }
        }
    }
    if alpha != 0.0 {
        for i in 0..n {
            let row = c_t.row(i);
            for (l, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    let w = alpha * v;
                    trips.push((i, n + l, w));
                    trips.push((n + l, i, w));
                }
            }
        }
    }
    SparseMatrix::from_triplets(total, total, &trips)
        .map_err(|e| ModelError::DimensionMismatch(e.to_string()))
}

/// Exact augmented mean matrix for one interval. The network block is
/// (1-a) rho B_{z_i z_j}, the covariate blocks a rho^{1/2} D_{z_i l}.
/// With `zero_diagonal` the network diagonal is zeroed to match the
/// sampling convention; without it the matrix is exactly low rank, which
/// the noise-free embedding requires.
pub fn mean_augmented_t(
    spec: &ModelSpec,
    z_t: &[usize],
    zero_diagonal: bool,
) -> Result<DenseMatrix, ModelError> {
    let n = z_t.len();
    let p = spec.covariate_dim();
    for &s in z_t {
        if s >= spec.k {
            return Err(ModelError::StateOutOfRange { state: s, k: spec.k });
        }
    }
    let total = n + p;
    let beta = (1.0 - spec.alpha) * spec.rho;
    let gamma = spec.alpha * spec.rho.sqrt();
    let mut m = DenseMatrix::zeros(total, total);
    for i in 0..n {
        for j in 0..n {
            if zero_diagonal && i == j {
                continue;
            }
            m.set(i, j, beta * spec.b.get(z_t[i], z_t[j]));
        }
        for l in 0..p {
            let v = gamma * spec.d.get(z_t[i], l);
            m.set(i, n + l, v);
            m.set(n + l, i, v);
        }
    }
    Ok(m)
}

/// Unfolded exact mean matrix P_C: the horizontal concatenation of the
/// per-interval augmented means, shape (n+p) x T(n+p).
pub fn mean_unfolded(
    spec: &ModelSpec,
    z: &LatentAssignment,
    zero_diagonal: bool,
) -> Result<DenseMatrix, ModelError> {
    let t_count = spec.intervals();
    let n = z.n();
    let p = spec.covariate_dim();
    let total = n + p;
    let mut out = DenseMatrix::zeros(total, t_count * total);
    for t in 0..t_count {
        let block = mean_augmented_t(spec, &z.states_at(t), zero_diagonal)?;
        for i in 0..total {
            let src = block.row(i);
            let dst = &mut out.row_mut(i)[t * total..(t + 1) * total];
            dst.copy_from_slice(src);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svd::dense_svd_oracle;

    fn simple_spec(k: usize, b: Vec<f64>, d: Vec<f64>, p: usize, trajs: Vec<(f64, Vec<usize>)>) -> ModelSpec {
        ModelSpec {
            k,
            b: DenseMatrix::from_row_major(k, k, b).unwrap(),
            d: DenseMatrix::from_row_major(k, p, d).unwrap(),
            sigma: 1.0,
            rho: 1.0,
            alpha: 0.5,
            trajectories: trajs
                .into_iter()
                .map(|(probability, states)| Trajectory {
                    probability,
                    states,
                })
                .collect(),
        }
    }

    #[test]
    fn single_trajectory_all_rows_identical() {
        let spec = simple_spec(2, vec![0.5, 0.2, 0.2, 0.5], vec![1.0, 0.0], 1, vec![(1.0, vec![0, 1, 0])]);
        let z = sample_assignments(&spec, 5, 1).unwrap();
        for row in &z.z {
            assert_eq!(row, &vec![0, 1, 0]);
        }
    }

    #[test]
    fn assignment_counts_near_equal() {
        let spec = simple_spec(
            3,
            vec![0.5; 9],
            vec![0.0, 1.0, 2.0],
            1,
            vec![(1.0 / 3.0, vec![0]), (1.0 / 3.0, vec![1]), (1.0 / 3.0, vec![2])],
        );
        let z = sample_assignments(&spec, 3000, 7).unwrap();
        let mut counts = [0usize; 3];
        for &t in &z.trajectory_of {
            counts[t] += 1;
        }
        for c in counts {
            assert!((c as i64 - 1000).abs() <= 200, "count {c}");
        }
    }

    #[test]
    fn assignments_deterministic() {
        let spec = simple_spec(
            2,
            vec![0.5, 0.2, 0.2, 0.5],
            vec![1.0, 0.0],
            1,
            vec![(0.5, vec![0, 0]), (0.5, vec![1, 1])],
        );
        let a = sample_assignments(&spec, 50, 9).unwrap();
        let b = sample_assignments(&spec, 50, 9).unwrap();
        assert_eq!(a.z, b.z);
    }

    #[test]
    fn adjacency_complete_and_empty() {
        let mut spec = simple_spec(1, vec![1.0], vec![0.0], 1, vec![(1.0, vec![0])]);
        let z = vec![0usize; 6];
        let a = sample_adjacency(&spec, &z, 3).unwrap();
        assert_eq!(a.nnz(), 6 * 5); // complete graph, both directions
        spec.b = DenseMatrix::from_row_major(1, 1, vec![0.0]).unwrap();
        let a = sample_adjacency(&spec, &z, 3).unwrap();
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn adjacency_density_matches_probability() {
        let spec = simple_spec(1, vec![0.5], vec![0.0], 1, vec![(1.0, vec![0])]);
        let n = 1000;
        let z = vec![0usize; n];
        let a = sample_adjacency(&spec, &z, 11).unwrap();
        let density = a.nnz() as f64 / (n * (n - 1)) as f64;
        assert!((density - 0.5).abs() < 0.01, "density {density}");
    }

    #[test]
    fn adjacency_symmetric_zero_diagonal() {
        let spec = simple_spec(
            2,
            vec![0.7, 0.3, 0.3, 0.7],
            vec![0.0, 0.0],
            1,
            vec![(1.0, vec![0])],
        );
        let z: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let a = sample_adjacency(&spec, &z, 5).unwrap();
        for (i, j, v) in a.to_triplets() {
            assert_ne!(i, j);
            assert_eq!(v, 1.0);
            let mirrored = a.row_entries(j).any(|(jj, _)| jj == i);
            assert!(mirrored);
        }
    }

    #[test]
    fn covariates_noiseless() {
        let mut spec = simple_spec(
            2,
            vec![0.5, 0.2, 0.2, 0.5],
            vec![1.0, 2.0, 3.0, 4.0],
            2,
            vec![(1.0, vec![0])],
        );
        spec.sigma = 0.0;
        let c = sample_covariates(&spec, &[0, 1, 0], 2).unwrap();
        assert_eq!(c.rows(), 3);
        assert_eq!(c.cols(), 2);
        assert_eq!(c.row(0), &[1.0, 2.0]);
        assert_eq!(c.row(1), &[3.0, 4.0]);
        assert_eq!(c.row(2), &[1.0, 2.0]);
    }

    #[test]
    fn covariate_column_means_clt() {
        let spec = simple_spec(1, vec![0.5], vec![2.0, -1.0], 2, vec![(1.0, vec![0])]);
        let n = 5000;
        let z = vec![0usize; n];
        let c = sample_covariates(&spec, &z, 13).unwrap();
        for l in 0..2 {
            let mean: f64 = (0..n).map(|i| c.get(i, l)).sum::<f64>() / n as f64;
            let target = spec.d.get(0, l);
            assert!((mean - target).abs() < 0.06, "col {l}: {mean} vs {target}");
        }
    }

    #[test]
    fn augmented_block_formula_hand_computed() {
        // A = [[0,1],[1,0]], C = [[2],[3]], alpha = 0.5
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let c = DenseMatrix::from_row_major(2, 1, vec![2.0, 3.0]).unwrap();
        let m = build_augmented(&a, &c, 0.5).unwrap().to_dense();
        let expect = [
            [0.0, 0.5, 1.0],
            [0.5, 0.0, 1.5],
            [1.0, 1.5, 0.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((m.get(i, j) - expect[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn augmented_alpha_extremes() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let c = DenseMatrix::from_row_major(2, 1, vec![2.0, 3.0]).unwrap();
        // alpha = 0: reduces to the plain adjacency, covariate blocks vanish
        let m0 = build_augmented(&a, &c, 0.0).unwrap();
        assert_eq!(m0.nnz(), a.nnz());
        let d0 = m0.to_dense();
        assert_eq!(d0.get(0, 1), 1.0);
        assert_eq!(d0.get(0, 2), 0.0);
        // alpha = 1: network block zero, covariate blocks equal C
        let m1 = build_augmented(&a, &c, 1.0).unwrap().to_dense();
        assert_eq!(m1.get(0, 1), 0.0);
        assert_eq!(m1.get(0, 2), 2.0);
        assert_eq!(m1.get(2, 1), 3.0);
    }

    #[test]
    fn augmented_exactly_symmetric() {
        let a = crate::util::random_sparse(10, 10, 0.3, 21);
        // symmetrize
        let mut trips = a.to_triplets();
        let extra: Vec<_> = trips.iter().map(|&(i, j, v)| (j, i, v)).collect();
        trips.extend(extra);
        let a = SparseMatrix::from_triplets(10, 10, &trips).unwrap();
        let c = crate::util::random_dense(10, 3, 22);
        let m = build_augmented(&a, &c, 0.3).unwrap().to_dense();
        for i in 0..13 {
            for j in 0..13 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
    }

    #[test]
    fn augmented_alpha_out_of_range() {
        let a = SparseMatrix::from_triplets(2, 2, &[]).unwrap();
        let c = DenseMatrix::zeros(2, 1);
        assert!(build_augmented(&a, &c, 1.5).is_err());
    }

    #[test]
    fn mean_single_community_direct_substitution() {
        let spec = ModelSpec {
            k: 1,
            b: DenseMatrix::from_row_major(1, 1, vec![0.4]).unwrap(),
            d: DenseMatrix::from_row_major(1, 1, vec![2.0]).unwrap(),
            sigma: 1.0,
            rho: 1.0,
            alpha: 0.5,
            trajectories: vec![Trajectory {
                probability: 1.0,
                states: vec![0],
            }],
        };
        let z = vec![0usize; 3];
        let m = mean_augmented_t(&spec, &z, true).unwrap();
        assert_eq!(m.get(0, 1), 0.5 * 0.4);
        assert_eq!(m.get(0, 0), 0.0); // zeroed diagonal
        assert_eq!(m.get(0, 3), 0.5 * 2.0);
        assert_eq!(m.get(3, 0), 0.5 * 2.0);
        assert_eq!(m.get(3, 3), 0.0);
    }

    #[test]
    fn mean_alpha_zero_covariate_blocks_vanish() {
        let mut spec = simple_spec(
            2,
            vec![0.5, 0.2, 0.2, 0.5],
            vec![1.0, 3.0],
            1,
            vec![(1.0, vec![0])],
        );
        spec.alpha = 0.0;
        let m = mean_augmented_t(&spec, &[0, 1], false).unwrap();
        assert_eq!(m.get(0, 2), 0.0);
        assert_eq!(m.get(2, 0), 0.0);
    }

    #[test]
    fn synthetic_mean_rank_matches_structure() {
        // scaled-down version of the simulated experiment: same B and the
        // same D row pattern (mu1, mu1, mu2), fewer nodes/covariates
        let (p0, p1) = (0.5, 0.3);
        let mu1 = [0.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        let mu2 = [0.0, 0.0, 0.0, 0.0, 1.0, 1.0];
        let mut d_rows = Vec::new();
        d_rows.extend_from_slice(&mu1);
        d_rows.extend_from_slice(&mu1);
        d_rows.extend_from_slice(&mu2);
        let spec = ModelSpec {
            k: 3,
            b: DenseMatrix::from_row_major(
                3,
                3,
                vec![p1, p0, p0, p0, p0, p0, p0, p0, p0],
            )
            .unwrap(),
            d: DenseMatrix::from_row_major(3, 6, d_rows).unwrap(),
            sigma: 1.0,
            rho: 1.0,
            alpha: 0.2,
            trajectories: vec![
                Trajectory { probability: 1.0 / 3.0, states: vec![0, 0, 1, 1, 0] },
                Trajectory { probability: 1.0 / 3.0, states: vec![1, 1, 1, 1, 1] },
                Trajectory { probability: 1.0 / 3.0, states: vec![2, 2, 1, 1, 2] },
            ],
        };
        let z = sample_assignments(&spec, 30, 3).unwrap();
        let p_c = mean_unfolded(&spec, &z, false).unwrap();
        let r = dense_svd_oracle(&p_c).unwrap();
        let count = r.s.iter().filter(|&&s| s > 1e-10).count();
        // node rows span one direction per trajectory (3); covariate rows
        // add rank(D) = 2 more, so the unfolded mean has rank 5
        assert_eq!(count, 3 + 2);
    }

    #[test]
    fn empirical_adjacency_mean_converges_to_model_mean() {
        let spec = simple_spec(
            2,
            vec![0.6, 0.2, 0.2, 0.4],
            vec![0.0, 0.0],
            1,
            vec![(1.0, vec![0])],
        );
        let z: Vec<usize> = (0..30).map(|i| i % 2).collect();
        let n = z.len();
        let reps = 200;
        let mut acc = DenseMatrix::zeros(n, n);
        for r in 0..reps {
            let a = sample_adjacency(&spec, &z, derive_seed(77, r)).unwrap();
            for (i, j, v) in a.to_triplets() {
                acc.set(i, j, acc.get(i, j) + v);
            }
        }
        let mean = mean_augmented_t(&spec, &z, true).unwrap();
        let beta = 1.0 - spec.alpha;
        for i in 0..n {
            for j in 0..n {
                let p = mean.get(i, j) / beta;
                let emp = acc.get(i, j) / reps as f64;
                let se = (p * (1.0 - p) / reps as f64).sqrt();
                assert!(
                    (emp - p).abs() <= 4.0 * se + 1e-12,
                    "entry ({i},{j}): emp {emp} vs p {p}"
                );
            }
        }
    }
}
