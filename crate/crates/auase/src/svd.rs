//! Truncated singular value decomposition.
//!
//! `truncated_svd` is a randomized subspace iteration: Gaussian range
//! finder with oversampling, alternating power steps with
//! re-orthonormalization, and a small dense factorization of the
//! projected matrix. Given the same seed and input it is bit-for-bit
//! deterministic.
//!
//! `dense_svd_oracle` is a one-sided Jacobi SVD kept deliberately
//! independent of the randomized path; it exists to cross-check the
//! randomized results and for small dense factorizations (Procrustes,
//! PCA).

use crate::mat::{DenseMatrix, LinearOp};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SvdError {
    #[error("rank {d} out of range for {rows}x{cols} matrix")]
    RankOutOfRange { d: usize, rows: usize, cols: usize },
    #[error("dense oracle size cap exceeded: {rows}x{cols} (max 512)")]
    OracleSizeCap { rows: usize, cols: usize },
}

/// Options for the randomized truncated SVD.
#[derive(Debug, Clone)]
pub struct SvdOptions {
    /// Extra sketch columns beyond the requested rank.
    pub oversampling: usize,
    /// Power iteration budget.
    pub power_iterations: usize,
    /// PRNG seed (ChaCha20) for the Gaussian sketch.
    pub seed: u64,
    /// Relative stopping tolerance on the top-d singular value estimates.
    pub tolerance: f64,
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions {
            oversampling: 10,
            power_iterations: 4,
            seed: 0,
            tolerance: 1e-10,
        }
    }
}

/// Result of a (truncated or full) SVD: M ~ U diag(S) V^T.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub v: DenseMatrix,
    /// Power iterations actually performed.
    pub iterations: usize,
    /// Last relative change of the top-d singular value estimates
    /// (0 for the dense oracle).
    pub residual: f64,
    /// Whether the stopping tolerance was met within the budget.
    pub converged: bool,
}

/// d-truncated SVD of a sparse (or dense) operator by randomized
/// subspace iteration.
pub fn truncated_svd<M: LinearOp>(
    m: &M,
    d: usize,
    opts: &SvdOptions,
) -> Result<SvdResult, SvdError> {
    let (rows, cols) = (m.op_rows(), m.op_cols());
    let min_dim = rows.min(cols);
    if d == 0 || d > min_dim {
        return Err(SvdError::RankOutOfRange { d, rows, cols });
    }
    let ell = (d + opts.oversampling).min(min_dim);
    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);

    let mut sketch = DenseMatrix::zeros(cols, ell);
    for i in 0..cols {
        for j in 0..ell {
            sketch.set(i, j, rng.sample::<f64, _>(StandardNormal));
        }
    }

    let frob = m.op_frobenius_norm();
    let mut q = m.apply(&sketch);
    orthonormalize(&mut q, &mut rng);

    let mut prev_sigma: Option<Vec<f64>> = None;
    let mut iterations = 0usize;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut z = m.apply_t(&q);

    loop {
        // Ritz estimates of the top singular values from the projection.
        let sigma = gram_singular_values(&z, d);
        // Sketch residual ||M - QQ^T M||_F; exact-rank inputs are captured
        // after a single projection and need no power steps.
        let captured = z.frobenius_norm();
        let tail_sq = (frob * frob - captured * captured).max(0.0);
        if tail_sq.sqrt() <= opts.tolerance * frob.max(f64::MIN_POSITIVE) {
            residual = 0.0;
            converged = true;
            break;
        }
        if let Some(prev) = &prev_sigma {
            let scale = sigma[0].max(f64::MIN_POSITIVE);
            residual = sigma
                .iter()
                .zip(prev)
                .map(|(a, b)| (a - b).abs() / scale)
                .fold(0.0, f64::max);
            if residual < opts.tolerance {
                converged = true;
                break;
            }
        }
        if iterations >= opts.power_iterations {
            break;
        }
        prev_sigma = Some(sigma);
        orthonormalize(&mut z, &mut rng);
        q = m.apply(&z);
        orthonormalize(&mut q, &mut rng);
        z = m.apply_t(&q);
        iterations += 1;
    }

    // Rayleigh-Ritz on the converged subspace: M ~ Q (Q^T M) = Q Z^T.
    let gram = z.t_matmul(&z).expect("gram");
    let (lambda, vecs) = jacobi_eigen_sym(&gram);
    let sig_max = lambda[0].max(0.0).sqrt();
    let zero_tol = sig_max * 1e-14;

    let mut s = Vec::with_capacity(d);
    let mut u = DenseMatrix::zeros(rows, d);
    let mut v = DenseMatrix::zeros(cols, d);
    // U = Q * vecs, V = Z * vecs * Sigma^{-1}
    for k in 0..d {
        let sigma_k = lambda[k].max(0.0).sqrt();
        s.push(sigma_k);
        for i in 0..rows {
            let mut acc = 0.0;
            for j in 0..ell {
                acc += q.get(i, j) * vecs.get(j, k);
            }
            u.set(i, k, acc);
        }
        if sigma_k > zero_tol {
            let inv = 1.0 / sigma_k;
            for i in 0..cols {
                let mut acc = 0.0;
                for j in 0..ell {
                    acc += z.get(i, j) * vecs.get(j, k);
                }
                v.set(i, k, acc * inv);
            }
        }
    }
    fill_null_columns(&mut v, zero_tol, &mut rng);
    sign_normalize(&mut u, &mut v);

    Ok(SvdResult {
        u,
        s,
        v,
        iterations,
        residual: if residual.is_finite() { residual } else { 0.0 },
        converged,
    })
}

/// Full economy SVD of a small dense matrix by one-sided Jacobi.
/// Independent of the randomized path; used as a test oracle and for
/// small factorizations.
pub fn dense_svd_oracle(m: &DenseMatrix) -> Result<SvdResult, SvdError> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows > 512 || cols > 512 {
        return Err(SvdError::OracleSizeCap { rows, cols });
    }
    let transposed = rows < cols;
    let a0 = if transposed { m.transpose() } else { m.clone() };
    let (mr, nc) = (a0.rows(), a0.cols());

    // Work on columns of A; accumulate right rotations into V.
    let mut a = a0;
    let mut v = DenseMatrix::identity(nc);
    let eps = 1e-15;
    for _sweep in 0..64 {
        let mut rotated = false;
        for p in 0..nc {
            for q_col in (p + 1)..nc {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..mr {
                    let x = a.get(i, p);
                    let y = a.get(i, q_col);
                    app += x * x;
                    aqq += y * y;
                    apq += x * y;
                }
                if apq.abs() <= eps * (app * aqq).sqrt() || apq == 0.0 {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..mr {
                    let x = a.get(i, p);
                    let y = a.get(i, q_col);
                    a.set(i, p, c * x - s * y);
                    a.set(i, q_col, s * x + c * y);
                }
                for i in 0..nc {
                    let x = v.get(i, p);
                    let y = v.get(i, q_col);
                    v.set(i, p, c * x - s * y);
                    v.set(i, q_col, s * x + c * y);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values.
    let mut order: Vec<(f64, usize)> = (0..nc)
        .map(|j| {
            let nrm = (0..mr).map(|i| a.get(i, j).powi(2)).sum::<f64>().sqrt();
            (nrm, j)
        })
        .collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));

    let sig_max = order.first().map(|x| x.0).unwrap_or(0.0);
    let zero_tol = sig_max * 1e-14;
    let mut s = Vec::with_capacity(nc);
    let mut u_mat = DenseMatrix::zeros(mr, nc);
    let mut v_mat = DenseMatrix::zeros(nc, nc);
    for (k, &(sigma, j)) in order.iter().enumerate() {
        s.push(sigma);
        for i in 0..nc {
            v_mat.set(i, k, v.get(i, j));
        }
        if sigma > zero_tol {
            let inv = 1.0 / sigma;
            for i in 0..mr {
                u_mat.set(i, k, a.get(i, j) * inv);
            }
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(0x6f7261636c65);
    fill_null_columns(&mut u_mat, zero_tol, &mut rng);

    let (mut uu, mut vv) = if transposed { (v_mat, u_mat) } else { (u_mat, v_mat) };
    sign_normalize(&mut uu, &mut vv);
    Ok(SvdResult {
        u: uu,
        s,
        v: vv,
        iterations: 0,
        residual: 0.0,
        converged: true,
    })
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. Columns
/// that vanish (rank deficiency) are replaced by fresh random directions
/// so the basis stays full width.
fn orthonormalize(m: &mut DenseMatrix, rng: &mut ChaCha20Rng) {
    let (rows, cols) = (m.rows(), m.cols());
    for j in 0..cols {
        let mut col: Vec<f64> = (0..rows).map(|i| m.get(i, j)).collect();
        let orig_norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _pass in 0..2 {
            for k in 0..j {
                let mut dot = 0.0;
                for i in 0..rows {
                    dot += m.get(i, k) * col[i];
                }
                for i in 0..rows {
                    col[i] -= dot * m.get(i, k);
                }
            }
        }
        let mut norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut guard = 0;
        while norm <= orig_norm.max(1.0) * 1e-13 && guard < 32 {
            for c in col.iter_mut() {
                *c = rng.sample::<f64, _>(StandardNormal);
            }
            for _pass in 0..2 {
                for k in 0..j {
                    let mut dot = 0.0;
                    for i in 0..rows {
                        dot += m.get(i, k) * col[i];
                    }
                    for i in 0..rows {
                        col[i] -= dot * m.get(i, k);
                    }
                }
            }
            norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            guard += 1;
        }
        let inv = 1.0 / norm;
        for i in 0..rows {
            m.set(i, j, col[i] * inv);
        }
    }
}

/// Top-d singular value estimates of Z from the eigenvalues of Z^T Z.
fn gram_singular_values(z: &DenseMatrix, d: usize) -> Vec<f64> {
    let gram = z.t_matmul(z).expect("gram");
    let (lambda, _) = jacobi_eigen_sym(&gram);
    lambda.iter().take(d).map(|l| l.max(0.0).sqrt()).collect()
}

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix.
/// Returns eigenvalues in descending order with matching eigenvector
/// columns.
pub fn jacobi_eigen_sym(a: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let n = a.rows();
    debug_assert_eq!(n, a.cols());
    let mut m = a.clone();
    let mut v = DenseMatrix::identity(n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.get(p, q).powi(2);
            }
        }
        let scale: f64 = (0..n).map(|i| m.get(i, i).abs()).fold(0.0, f64::max);
        if off.sqrt() <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let x = m.get(i, p);
                    let y = m.get(i, q);
                    m.set(i, p, c * x - s * y);
                    m.set(i, q, s * x + c * y);
                }
                for i in 0..n {
                    let x = m.get(p, i);
                    let y = m.get(q, i);
                    m.set(p, i, c * x - s * y);
                    m.set(q, i, s * x + c * y);
                }
                for i in 0..n {
                    let x = v.get(i, p);
                    let y = v.get(i, q);
                    v.set(i, p, c * x - s * y);
                    v.set(i, q, s * x + c * y);
                }
            }
        }
    }
    let mut order: Vec<(f64, usize)> = (0..n).map(|i| (m.get(i, i), i)).collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));
    let lambda: Vec<f64> = order.iter().map(|x| x.0).collect();
    let mut vecs = DenseMatrix::zeros(n, n);
    for (k, &(_, j)) in order.iter().enumerate() {
        for i in 0..n {
            vecs.set(i, k, v.get(i, j));
        }
    }
    (lambda, vecs)
}

/// Replace columns associated with (numerically) zero singular values by
/// an orthonormal completion so U^T U = V^T V = I still holds.
fn fill_null_columns(m: &mut DenseMatrix, _zero_tol: f64, rng: &mut ChaCha20Rng) {
    let (rows, cols) = (m.rows(), m.cols());
    for j in 0..cols {
        let norm: f64 = (0..rows).map(|i| m.get(i, j).powi(2)).sum::<f64>().sqrt();
        if norm > 0.5 {
            continue; // unit column already
        }
        let mut col = vec![0.0; rows];
        let mut ok = false;
        let mut guard = 0;
        while !ok && guard < 64 {
            for c in col.iter_mut() {
                *c = rng.sample::<f64, _>(StandardNormal);
            }
            for _pass in 0..2 {
                for k in 0..cols {
                    if k == j {
                        continue;
                    }
                    let knorm: f64 =
                        (0..rows).map(|i| m.get(i, k).powi(2)).sum::<f64>().sqrt();
                    if knorm < 0.5 {
                        continue;
                    }
                    let mut dot = 0.0;
                    for i in 0..rows {
                        dot += m.get(i, k) * col[i];
                    }
                    for i in 0..rows {
                        col[i] -= dot * m.get(i, k);
                    }
                }
            }
            let nrm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            if nrm > 1e-6 {
                for c in col.iter_mut() {
                    *c /= nrm;
                }
                ok = true;
            }
            guard += 1;
        }
        for i in 0..rows {
            m.set(i, j, col[i]);
        }
    }
}

/// Flip each (u, v) column pair so the largest-magnitude entry of the U
/// column is positive.
fn sign_normalize(u: &mut DenseMatrix, v: &mut DenseMatrix) {
    let d = u.cols().min(v.cols());
    for k in 0..d {
        let mut best = 0.0f64;
        let mut best_val = 0.0f64;
        for i in 0..u.rows() {
            let x = u.get(i, k);
            if x.abs() > best {
                best = x.abs();
                best_val = x;
            }
        }
        if best_val < 0.0 {
            for i in 0..u.rows() {
                u.set(i, k, -u.get(i, k));
            }
            for i in 0..v.rows() {
                v.set(i, k, -v.get(i, k));
            }
        }
    }
}

/// ||b^T b - I||_F, the orthonormality defect of a column block.
pub fn orthonormality_defect(b: &DenseMatrix) -> f64 {
    let g = b.t_matmul(b).expect("gram");
    let mut ss = 0.0;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            ss += (g.get(i, j) - target).powi(2);
        }
    }
    ss.sqrt()
}

/// Dense reconstruction residual ||M - U diag(S) V^T||_F. Small inputs only.
pub fn reconstruction_residual(m: &DenseMatrix, r: &SvdResult) -> f64 {
    let d = r.s.len();
    let mut recon = DenseMatrix::zeros(m.rows(), m.cols());
    for k in 0..d {
        let sk = r.s[k];
        for i in 0..m.rows() {
            let uik = r.u.get(i, k) * sk;
            for j in 0..m.cols() {
                recon.set(i, j, recon.get(i, j) + uik * r.v.get(j, k));
            }
        }
    }
    crate::mat::frobenius_diff(m, &recon).expect("shape")
}
