//! Seeded random matrix helpers and seed derivation.
//!
//! All randomness in the crate flows through ChaCha20 seeded explicitly,
//! so every run is reproducible across platforms.

use crate::mat::{DenseMatrix, SparseMatrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// Derive an independent stream seed (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random sparse matrix with standard normal entries at the given density.
pub fn random_sparse(rows: usize, cols: usize, density: f64, seed: u64) -> SparseMatrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut trips = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen::<f64>() < density {
                trips.push((i, j, rng.sample::<f64, _>(StandardNormal)));
            }
        }
    }
    SparseMatrix::from_triplets(rows, cols, &trips).expect("in-range triplets")
}

/// Random dense matrix with standard normal entries.
pub fn random_dense(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let data = (0..rows * cols)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    DenseMatrix::from_row_major(rows, cols, data).expect("finite data")
}

/// Random orthogonal matrix via Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal(n: usize, seed: u64) -> DenseMatrix {
    let g = random_dense(n, n, seed);
    let mut q = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut col: Vec<f64> = (0..n).map(|i| g.get(i, j)).collect();
        for k in 0..j {
            let dot: f64 = (0..n).map(|i| q.get(i, k) * col[i]).sum();
            for i in 0..n {
                col[i] -= dot * q.get(i, k);
            }
        }
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        for i in 0..n {
            q.set(i, j, col[i] / norm);
        }
    }
    q
}
