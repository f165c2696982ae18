//! Minimal sparse/dense matrix kernels.
//!
//! Sparse matrices are stored in CSR form with sorted column indices per
//! row. Duplicate triplets are summed at construction and explicit zeros
//! are dropped, so the representation is canonical. All matrices are
//! immutable after construction.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MatError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index out of range: ({row}, {col}) in {rows}x{cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("empty block list")]
    EmptyBlockList,
    #[error("non-finite value at ({0}, {1})")]
    NonFinite(usize, usize),
}

/// Dense row-major matrix of f64.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, MatError> {
        if data.len() != rows * cols {
            return Err(MatError::DimensionMismatch(format!(
                "data length {} != {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(MatError::NonFinite(k / cols.max(1), k % cols.max(1)));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// self * other, plain triple loop; intended for small factors.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix, MatError> {
        if self.cols != other.rows {
            return Err(MatError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// self^T * other.
    pub fn t_matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix, MatError> {
        if self.rows != other.rows {
            return Err(MatError::DimensionMismatch(format!(
                "{}x{}^T * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            for i in 0..self.cols {
                let a = self.data[k * self.cols + i];
                if a == 0.0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix, MatError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatError::DimensionMismatch(format!(
                "{}x{} - {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Vertically stack matrices sharing a column count.
    pub fn vstack(blocks: &[&DenseMatrix]) -> Result<DenseMatrix, MatError> {
        if blocks.is_empty() {
            return Err(MatError::EmptyBlockList);
        }
        let cols = blocks[0].cols;
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(MatError::DimensionMismatch(
                "vstack column mismatch".into(),
            ));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            data.extend_from_slice(&b.data);
        }
        Ok(DenseMatrix { rows, cols, data })
    }
}

/// ||A - B||_F.
pub fn frobenius_diff(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64, MatError> {
    Ok(a.sub(b)?.frobenius_norm())
}

/// Sparse matrix in CSR form. Column indices within each row are strictly
/// increasing; no explicit zeros are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Build from (row, col, value) triplets. Duplicates are summed,
    /// zeros dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, MatError> {
        for &(r, c, _) in triplets {
            if r >= rows || c >= cols {
                return Err(MatError::IndexOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut indptr = vec![0usize; rows + 1];
        let mut indices = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut iter = sorted.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            if v != 0.0 {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
            }
        }
        for i in 0..rows {
            indptr[i + 1] += indptr[i];
        }
        Ok(SparseMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }

    /// Build CSR directly from per-row dense slices, dropping zeros.
    /// Avoids the triplet detour for nearly-dense rows.
    pub fn from_dense_rows<'a, I>(rows: usize, cols: usize, row_iter: I) -> Self
    where
        I: Iterator<Item = &'a [f64]>,
    {
        let mut indptr = Vec::with_capacity(rows + 1);
        indptr.push(0usize);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for row in row_iter {
            debug_assert_eq!(row.len(), cols);
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        debug_assert_eq!(indptr.len(), rows + 1);
        SparseMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        Self::from_dense_rows(m.rows(), m.cols(), (0..m.rows()).map(|i| m.row(i)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_entries(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.indptr[i];
        let hi = self.indptr[i + 1];
        self.indices[lo..hi]
            .iter()
            .copied()
            .zip(self.values[lo..hi].iter().copied())
    }

    pub fn to_triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.rows {
            for (j, v) in self.row_entries(i) {
                out.push((i, j, v));
            }
        }
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, v) in self.row_entries(i) {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn scale(&self, c: f64) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// y = M x.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>, MatError> {
        if x.len() != self.cols {
            return Err(MatError::DimensionMismatch(format!(
                "spmv: vector length {} != cols {}",
                x.len(),
                self.cols
            )));
        }
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for (j, v) in self.row_entries(i) {
                acc += v * x[j];
            }
            y[i] = acc;
        }
        Ok(y)
    }

    /// y = M^T x.
    pub fn spmv_t(&self, x: &[f64]) -> Result<Vec<f64>, MatError> {
        if x.len() != self.rows {
            return Err(MatError::DimensionMismatch(format!(
                "spmv_t: vector length {} != rows {}",
                x.len(),
                self.rows
            )));
        }
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for (j, v) in self.row_entries(i) {
                y[j] += v * xi;
            }
        }
        Ok(y)
    }

    /// Y = M X for a dense X with few columns; column k of Y is spmv on
    /// column k of X. Accumulates row-major so identical input columns
    /// produce bit-identical output columns.
    pub fn spmm(&self, x: &DenseMatrix) -> Result<DenseMatrix, MatError> {
        if x.rows() != self.cols {
            return Err(MatError::DimensionMismatch(format!(
                "spmm: {} != cols {}",
                x.rows(),
                self.cols
            )));
        }
        let k = x.cols();
        let mut y = DenseMatrix::zeros(self.rows, k);
        for i in 0..self.rows {
            let yr = y.row_mut(i);
            for (j, v) in self.row_entries(i) {
                let xr = x.row(j);
                for c in 0..k {
                    yr[c] += v * xr[c];
                }
            }
        }
        Ok(y)
    }

    /// Y = M^T X.
    pub fn spmm_t(&self, x: &DenseMatrix) -> Result<DenseMatrix, MatError> {
        if x.rows() != self.rows {
            return Err(MatError::DimensionMismatch(format!(
                "spmm_t: {} != rows {}",
                x.rows(),
                self.rows
            )));
        }
        let k = x.cols();
        let mut y = DenseMatrix::zeros(self.cols, k);
        for i in 0..self.rows {
            let xr = x.row(i);
            for (j, v) in self.row_entries(i) {
                let yr = y.row_mut(j);
                for c in 0..k {
                    yr[c] += v * xr[c];
                }
            }
        }
        Ok(y)
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.cols + 1];
        for &j in &self.indices {
            counts[j + 1] += 1;
        }
        for j in 0..self.cols {
            counts[j + 1] += counts[j];
        }
        let mut indptr = counts.clone();
        let mut indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.rows {
            for (j, v) in self.row_entries(i) {
                let pos = indptr[j];
                indices[pos] = i;
                values[pos] = v;
                indptr[j] += 1;
            }
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            indptr: counts,
            indices,
            values,
        }
    }

    /// Horizontal concatenation of blocks sharing a row count.
    pub fn hconcat(blocks: &[&SparseMatrix]) -> Result<SparseMatrix, MatError> {
        if blocks.is_empty() {
            return Err(MatError::EmptyBlockList);
        }
        let rows = blocks[0].rows;
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(MatError::DimensionMismatch(
                "hconcat row count mismatch".into(),
            ));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let nnz = blocks.iter().map(|b| b.nnz()).sum();
        let mut indptr = Vec::with_capacity(rows + 1);
        indptr.push(0usize);
        let mut indices = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for i in 0..rows {
            let mut offset = 0usize;
            for b in blocks {
                for (j, v) in b.row_entries(i) {
                    indices.push(offset + j);
                    values.push(v);
                }
                offset += b.cols;
            }
            indptr.push(indices.len());
        }
        Ok(SparseMatrix {
            rows,
            cols,
            indptr,
            indices,
            values,
        })
    }
}

/// Matrix-vector products needed by the truncated SVD; implemented by
/// both storage formats so the embedding pipeline can run on exact mean
/// matrices without sparsifying them.
pub trait LinearOp {
    fn op_rows(&self) -> usize;
    fn op_cols(&self) -> usize;
    /// Y = M X.
    fn apply(&self, x: &DenseMatrix) -> DenseMatrix;
    /// Y = M^T X.
    fn apply_t(&self, x: &DenseMatrix) -> DenseMatrix;
    fn op_frobenius_norm(&self) -> f64;
}

impl LinearOp for SparseMatrix {
    fn op_rows(&self) -> usize {
        self.rows
    }
    fn op_cols(&self) -> usize {
        self.cols
    }
    fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        self.spmm(x).expect("spmm dimension mismatch")
    }
    fn apply_t(&self, x: &DenseMatrix) -> DenseMatrix {
        self.spmm_t(x).expect("spmm_t dimension mismatch")
    }
    fn op_frobenius_norm(&self) -> f64 {
        self.frobenius_norm()
    }
}

impl LinearOp for DenseMatrix {
    fn op_rows(&self) -> usize {
        self.rows
    }
    fn op_cols(&self) -> usize {
        self.cols
    }
    fn apply(&self, x: &DenseMatrix) -> DenseMatrix {
        self.matmul(x).expect("matmul dimension mismatch")
    }
    fn apply_t(&self, x: &DenseMatrix) -> DenseMatrix {
        self.t_matmul(x).expect("t_matmul dimension mismatch")
    }
    fn op_frobenius_norm(&self) -> f64 {
        self.frobenius_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sparse_identity(n: usize) -> SparseMatrix {
        let trips: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        SparseMatrix::from_triplets(n, n, &trips).unwrap()
    }

    #[test]
    fn spmv_identity() {
        let m = sparse_identity(3);
        assert_eq!(m.spmv(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn spmv_zero_matrix() {
        let m = SparseMatrix::from_triplets(2, 2, &[]).unwrap();
        assert_eq!(m.spmv(&[5.0, 7.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let m = sparse_identity(3);
        assert!(m.spmv(&[1.0, 2.0]).is_err());
        assert!(m.spmv_t(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn spmv_matches_dense_oracle() {
        // random-ish 4x4 against a dense matvec written out longhand
        let trips = [
            (0, 1, 2.5),
            (1, 0, -1.0),
            (1, 3, 4.0),
            (2, 2, 0.5),
            (3, 0, 3.0),
            (3, 3, -2.0),
        ];
        let m = SparseMatrix::from_triplets(4, 4, &trips).unwrap();
        let x = [1.0, -2.0, 3.0, 0.5];
        let d = m.to_dense();
        let mut expect = vec![0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                expect[i] += d.get(i, j) * x[j];
            }
        }
        let y = m.spmv(&x).unwrap();
        for i in 0..4 {
            assert!((y[i] - expect[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn spmv_t_identity() {
        let m = sparse_identity(3);
        assert_eq!(m.spmv_t(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn spmv_t_hand_computed() {
        // [[2,3]]^T * [4] = [8, 12]
        let m = SparseMatrix::from_triplets(1, 2, &[(0, 0, 2.0), (0, 1, 3.0)]).unwrap();
        assert_eq!(m.spmv_t(&[4.0]).unwrap(), vec![8.0, 12.0]);
    }

    #[test]
    fn spmv_t_matches_dense_transpose_oracle() {
        let trips = [
            (0, 0, 1.5),
            (0, 2, -2.0),
            (1, 1, 3.0),
            (2, 0, 0.25),
            (3, 2, 1.0),
            (4, 1, -0.5),
        ];
        let m = SparseMatrix::from_triplets(5, 3, &trips).unwrap();
        let x = [1.0, 2.0, -1.0, 0.5, 4.0];
        let dt = m.to_dense().transpose();
        let mut expect = vec![0.0; 3];
        for i in 0..3 {
            for j in 0..5 {
                expect[i] += dt.get(i, j) * x[j];
            }
        }
        let y = m.spmv_t(&x).unwrap();
        for i in 0..3 {
            assert!((y[i] - expect[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn hconcat_identities() {
        let i2 = sparse_identity(2);
        let m = SparseMatrix::hconcat(&[&i2, &i2]).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.cols(), 4);
        let trips = m.to_triplets();
        assert_eq!(
            trips,
            vec![(0, 0, 1.0), (0, 2, 1.0), (1, 1, 1.0), (1, 3, 1.0)]
        );
    }

    #[test]
    fn hconcat_single_block_identity() {
        let m = SparseMatrix::from_triplets(3, 2, &[(0, 1, 2.0), (2, 0, -1.0)]).unwrap();
        let c = SparseMatrix::hconcat(&[&m]).unwrap();
        assert_eq!(c, m);
    }

    #[test]
    fn hconcat_matches_dense_oracle() {
        let a = SparseMatrix::from_triplets(3, 2, &[(0, 0, 1.0), (1, 1, 2.0), (2, 0, 3.0)]).unwrap();
        let b = SparseMatrix::from_triplets(3, 2, &[(0, 1, -1.0), (2, 1, 4.0)]).unwrap();
        let c = SparseMatrix::hconcat(&[&a, &b]).unwrap();
        let (da, db, dc) = (a.to_dense(), b.to_dense(), c.to_dense());
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(dc.get(i, j), da.get(i, j));
                assert_eq!(dc.get(i, j + 2), db.get(i, j));
            }
        }
        assert_eq!(c.nnz(), a.nnz() + b.nnz());
    }

    #[test]
    fn hconcat_errors() {
        assert_eq!(
            SparseMatrix::hconcat(&[]).unwrap_err(),
            MatError::EmptyBlockList
        );
        let a = sparse_identity(2);
        let b = sparse_identity(3);
        assert!(SparseMatrix::hconcat(&[&a, &b]).is_err());
    }

    #[test]
    fn frobenius_diff_cases() {
        let a = DenseMatrix::from_row_major(2, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(frobenius_diff(&a, &a).unwrap(), 0.0);
        let z = DenseMatrix::zeros(2, 2);
        assert_eq!(frobenius_diff(&a, &z).unwrap(), 1.0);
        assert!(frobenius_diff(&a, &DenseMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn frobenius_diff_matches_scalar_oracle() {
        let a = DenseMatrix::from_row_major(3, 3, vec![1.0, -2.0, 0.5, 3.0, 0.0, 1.5, -1.0, 2.0, 4.0])
            .unwrap();
        let b = DenseMatrix::from_row_major(3, 3, vec![0.5, 1.0, -0.5, 2.0, 2.0, 1.0, 0.0, -2.0, 3.0])
            .unwrap();
        let mut ss = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let d = a.get(i, j) - b.get(i, j);
                ss += d * d;
            }
        }
        assert!((frobenius_diff(&a, &b).unwrap() - ss.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn duplicates_summed_zeros_dropped() {
        let m = SparseMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 1.0), (0, 0, 2.0), (1, 1, 5.0), (1, 1, -5.0), (1, 0, 0.0)],
        )
        .unwrap();
        assert_eq!(m.to_triplets(), vec![(0, 0, 3.0)]);
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn out_of_range_triplet_rejected() {
        assert!(SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn transpose_roundtrip() {
        let trips = [(0, 1, 2.0), (1, 0, -1.0), (2, 2, 3.0), (0, 2, 0.5)];
        let m = SparseMatrix::from_triplets(3, 3, &trips).unwrap();
        let tt = m.transpose().transpose();
        assert_eq!(m, tt);
    }

    proptest! {
        #[test]
        fn prop_spmv_t_equals_transpose_spmv(
            trips in proptest::collection::vec((0usize..50, 0usize..50, -10.0f64..10.0), 0..200),
            seedvec in proptest::collection::vec(-5.0f64..5.0, 50),
        ) {
            let m = SparseMatrix::from_triplets(50, 50, &trips).unwrap();
            let a = m.spmv_t(&seedvec).unwrap();
            let b = m.transpose().spmv(&seedvec).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn prop_triplet_roundtrip(
            trips in proptest::collection::vec((0usize..20, 0usize..20, 1.0f64..10.0), 0..100),
        ) {
            let m = SparseMatrix::from_triplets(20, 20, &trips).unwrap();
            let m2 = SparseMatrix::from_triplets(20, 20, &m.to_triplets()).unwrap();
            prop_assert_eq!(m, m2);
        }

        #[test]
        fn prop_hconcat_preserves_nnz(
            t1 in proptest::collection::vec((0usize..10, 0usize..5, 1.0f64..10.0), 0..30),
            t2 in proptest::collection::vec((0usize..10, 0usize..7, 1.0f64..10.0), 0..30),
        ) {
            let a = SparseMatrix::from_triplets(10, 5, &t1).unwrap();
            let b = SparseMatrix::from_triplets(10, 7, &t2).unwrap();
            let c = SparseMatrix::hconcat(&[&a, &b]).unwrap();
            prop_assert_eq!(c.nnz(), a.nnz() + b.nnz());
        }
    }
}
