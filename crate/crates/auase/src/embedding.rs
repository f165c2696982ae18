//! Attribute-augmented unfolded spectral embedding.
//!
//! The pipeline: for each interval build the symmetric augmented matrix
//! combining the adjacency and covariate blocks, concatenate the augmented
//! matrices horizontally, take a d-truncated SVD of the unfolded matrix, and
//! read the per-interval node embeddings out of the right singular vectors.
//! With `alpha = 0` the covariates are ignored and the procedure reduces to
//! plain unfolded adjacency spectral embedding.

use thiserror::Error;

use crate::mat::{DenseMatrix, LinearOp, SparseMatrix};
use crate::model::{build_augmented, DynamicAttributedNetwork, ModelError};
use crate::svd::{truncated_svd, SvdError, SvdOptions, SvdResult};

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("alpha must lie in [0, 1], got {0}")]
    BadAlpha(f64),
    #[error("embedding dimension must be in 1..={max}, got {d}")]
    BadDimension { d: usize, max: usize },
    #[error("network has no intervals")]
    Empty,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Svd(#[from] SvdError),
}

/// A time series of node embeddings sharing one latent space.
#[derive(Debug, Clone)]
pub struct EmbeddingSequence {
    blocks: Vec<DenseMatrix>,
    pub singular_values: Vec<f64>,
    pub alpha: f64,
    pub degree_corrected: bool,
    n: usize,
    d: usize,
}

impl EmbeddingSequence {
    /// Assemble a sequence from pre-computed blocks. All blocks must be
    /// n x d; used by diagnostics that build embeddings interval by interval.
    pub fn from_blocks(
        blocks: Vec<DenseMatrix>,
        singular_values: Vec<f64>,
        alpha: f64,
        n: usize,
        d: usize,
    ) -> EmbeddingSequence {
        assert!(blocks.iter().all(|b| b.rows() == n && b.cols() == d));
        EmbeddingSequence { blocks, singular_values, alpha, degree_corrected: false, n, d }
    }

    pub fn intervals(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Embedding block for interval `t` (n x d).
    pub fn block(&self, t: usize) -> &DenseMatrix {
        &self.blocks[t]
    }

    /// All blocks stacked vertically into a (T*n) x d matrix, interval-major.
    pub fn stacked(&self) -> DenseMatrix {
        let refs: Vec<&DenseMatrix> = self.blocks.iter().collect();
        DenseMatrix::vstack(&refs).expect("blocks share dimensions")
    }

    /// Project every row onto the unit sphere. Rows with norm below 1e-12
    /// are left untouched.
    pub fn degree_correct(&self) -> EmbeddingSequence {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let mut out = b.clone();
                for i in 0..out.rows() {
                    let norm: f64 = out.row(i).iter().map(|x| x * x).sum::<f64>().sqrt();
                    if norm > 1e-12 {
                        for x in out.row_mut(i) {
                            *x /= norm;
                        }
                    }
                }
                out
            })
            .collect();
        EmbeddingSequence { blocks, degree_corrected: true, ..self.clone() }
    }
}

/// Horizontally concatenate the per-interval augmented matrices into the
/// (n+p) x T(n+p) unfolded matrix.
pub fn unfold(network: &DynamicAttributedNetwork, alpha: f64) -> Result<SparseMatrix, EmbedError> {
    if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
        return Err(EmbedError::BadAlpha(alpha));
    }
    let t_max = network.intervals();
    if t_max == 0 {
        return Err(EmbedError::Empty);
    }
    let mut parts = Vec::with_capacity(t_max);
    for t in 0..t_max {
        parts.push(build_augmented(&network.adjacency[t], &network.covariates[t], alpha)?);
    }
    let refs: Vec<&SparseMatrix> = parts.iter().collect();
    Ok(SparseMatrix::hconcat(&refs).expect("augmented blocks share row count"))
}

/// Attribute-augmented unfolded adjacency spectral embedding.
///
/// Returns one n x d block per interval, all expressed in a common latent
/// space, together with the top-d singular values of the unfolded matrix.
pub fn auase(
    network: &DynamicAttributedNetwork,
    d: usize,
    alpha: f64,
    opts: &SvdOptions,
) -> Result<EmbeddingSequence, EmbedError> {
    let unfolded = unfold(network, alpha)?;
    let n = network.n();
    sequence_from_op(&unfolded, n, network.intervals(), d, alpha, opts)
}

/// Unfolded adjacency spectral embedding: [`auase`] with `alpha = 0`.
pub fn uase(
    network: &DynamicAttributedNetwork,
    d: usize,
    opts: &SvdOptions,
) -> Result<EmbeddingSequence, EmbedError> {
    auase(network, d, 0.0, opts)
}

/// Embed any unfolded operator whose columns decompose into `intervals`
/// groups of equal width, keeping the first `n` rows of each right-factor
/// block. This is how both sampled networks and noise-free mean matrices are
/// embedded, so the two share every numerical code path after unfolding.
pub fn sequence_from_op<M: LinearOp>(
    op: &M,
    n: usize,
    intervals: usize,
    d: usize,
    alpha: f64,
    opts: &SvdOptions,
) -> Result<EmbeddingSequence, EmbedError> {
    if intervals == 0 {
        return Err(EmbedError::Empty);
    }
    let max_d = op.op_rows().min(op.op_cols());
    if d == 0 || d > max_d {
        return Err(EmbedError::BadDimension { d, max: max_d });
    }
    let result = truncated_svd(op, d, opts)?;
    Ok(sequence_from_svd(&result, n, intervals, alpha))
}

/// Build the embedding sequence from an already-computed SVD of the unfolded
/// matrix: block t is rows [t*(n+p), t*(n+p)+n) of V * S^{1/2}.
pub fn sequence_from_svd(
    svd: &SvdResult,
    n: usize,
    intervals: usize,
    alpha: f64,
) -> EmbeddingSequence {
    let d = svd.s.len();
    let block_rows = svd.v.rows() / intervals;
    let sqrt_s: Vec<f64> = svd.s.iter().map(|&s| s.max(0.0).sqrt()).collect();
    let mut blocks = Vec::with_capacity(intervals);
    for t in 0..intervals {
        let mut block = DenseMatrix::zeros(n, d);
        for i in 0..n {
            let src = svd.v.row(t * block_rows + i);
            for j in 0..d {
                block.set(i, j, src[j] * sqrt_s[j]);
            }
        }
        blocks.push(block);
    }
    EmbeddingSequence {
        blocks,
        singular_values: svd.s.clone(),
        alpha,
        degree_corrected: false,
        n,
        d,
    }
}

/// Zhu-Ghodsi profile-likelihood elbow selection on a descending sequence of
/// singular values. Models the values as two Gaussian groups with a shared
/// variance and returns the split size maximizing the profile log-likelihood.
/// Ties go to the smallest dimension; a constant sequence returns 1.
pub fn zhu_ghodsi(values: &[f64]) -> usize {
    let m = values.len();
    if m <= 1 {
        return m;
    }
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread <= f64::EPSILON * values[0].abs().max(1.0) {
        return 1;
    }
    let mut best_q = 1;
    let mut best_ll = f64::NEG_INFINITY;
    for q in 1..m {
        let (head, tail) = values.split_at(q);
        let mu1 = mean(head);
        let mu2 = mean(tail);
        let ss: f64 = head.iter().map(|x| (x - mu1) * (x - mu1)).sum::<f64>()
            + tail.iter().map(|x| (x - mu2) * (x - mu2)).sum::<f64>();
        let var = (ss / m as f64).max(1e-300);
        let ll = -0.5 * m as f64 * (var.ln() + 1.0);
        if ll > best_ll + 1e-12 {
            best_ll = ll;
            best_q = q;
        }
    }
    best_q
}

/// Pick an embedding dimension for an unfolded operator: compute the top
/// `d_max` singular values (default min(100, rank bound)) and apply
/// [`zhu_ghodsi`].
pub fn select_dimension<M: LinearOp>(
    op: &M,
    d_max: Option<usize>,
    opts: &SvdOptions,
) -> Result<usize, EmbedError> {
    let bound = op.op_rows().min(op.op_cols());
    let d_max = d_max.unwrap_or_else(|| bound.min(100));
    if d_max == 0 || d_max > bound {
        return Err(EmbedError::BadDimension { d: d_max, max: bound });
    }
    let result = truncated_svd(op, d_max, opts)?;
    Ok(zhu_ghodsi(&result.s))
}
