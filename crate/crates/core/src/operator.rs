//! Sparse real matrices and the symmetric (Hermitian) operators built from them.
//!
//! Every Hamiltonian in this crate has real matrix elements in the chosen
//! basis, so operators store `f64` entries and act on complex amplitudes.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// General real sparse matrix in coalesced, row-major sorted triplet form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    /// Build from arbitrary triplets; duplicates are summed, exact zeros dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= rows {
                return Err(Error::DimensionMismatch { expected: rows, found: r + 1 });
            }
            if c >= cols {
                return Err(Error::DimensionMismatch { expected: cols, found: c + 1 });
            }
            entries.push((r, c, v));
        }
        Ok(Self::coalesce(rows, cols, entries))
    }

    fn coalesce(rows: usize, cols: usize, mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match out.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => out.push((r, c, v)),
            }
        }
        out.retain(|e| e.2 != 0.0);
        Self { rows, cols, entries: out }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::coalesce(n, n, values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(row, col), |&(r, c, _)| (r, c))
            .map(|i| self.entries[i].2)
            .unwrap_or(0.0)
    }

    pub fn transpose(&self) -> Self {
        Self::coalesce(
            self.cols,
            self.rows,
            self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::coalesce(
            self.rows,
            self.cols,
            self.entries.iter().map(|&(r, c, v)| (r, c, v * factor)).collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Self::coalesce(self.rows, self.cols, entries))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.cols });
        }
        Ok(())
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let row_start = other.row_offsets();
        let mut entries = Vec::new();
        for &(r, k, a) in &self.entries {
            for &(_, c, b) in &other.entries[row_start[k]..row_start[k + 1]] {
                entries.push((r, c, a * b));
            }
        }
        Ok(Self::coalesce(self.rows, other.cols, entries))
    }

    /// Kronecker product `self ⊗ other`; the left factor is the slow index.
    pub fn kron(&self, other: &Self) -> Self {
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        for &(r1, c1, a) in &self.entries {
            for &(r2, c2, b) in &other.entries {
                entries.push((r1 * other.rows + r2, c1 * other.cols + c2, a * b));
            }
        }
        Self::coalesce(self.rows * other.rows, self.cols * other.cols, entries)
    }

    fn row_offsets(&self) -> Vec<usize> {
        let mut offsets = vec![0usize; self.rows + 1];
        for &(r, _, _) in &self.entries {
            offsets[r + 1] += 1;
        }
        for i in 0..self.rows {
            offsets[i + 1] += offsets[i];
        }
        offsets
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// Convert to a symmetric operator, rejecting asymmetry above `tol`.
    pub fn into_hermitian(self, tol: f64) -> Result<HermitianOperator> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        for &(r, c, v) in &self.entries {
            if r < c {
                let defect = (v - self.get(c, r)).abs();
                if defect > tol {
                    return Err(Error::NotHermitian { row: r, col: c, defect });
                }
            } else if r > c && self.get(c, r) == 0.0 && v.abs() > tol {
                return Err(Error::NotHermitian { row: c, col: r, defect: v.abs() });
            }
        }
        HermitianOperator::from_upper(
            self.rows,
            self.entries.into_iter().filter(|&(r, c, _)| r <= c),
        )
    }
}

/// Real symmetric operator stored as its upper triangle, with a compressed
/// full-row layout kept alongside for fast products.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    dim: usize,
    upper: Vec<(usize, usize, f64)>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl PartialEq for HermitianOperator {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.upper == other.upper
    }
}

impl HermitianOperator {
    /// Build from upper-triangle triplets (`col >= row`). Duplicates are
    /// coalesced by summation; the lower triangle is implied.
    pub fn from_upper(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut upper = Vec::new();
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(Error::DimensionMismatch { expected: dim, found: r.max(c) + 1 });
            }
            if c < r {
                return Err(Error::invalid("triplet", format!("({r}, {c}) lies below the diagonal")));
            }
            upper.push((r, c, v));
        }
        let upper = SparseMatrix::coalesce(dim, dim, upper).entries;

        let mut counts = vec![0usize; dim + 1];
        for &(r, c, _) in &upper {
            counts[r + 1] += 1;
            if r != c {
                counts[c + 1] += 1;
            }
        }
        for i in 0..dim {
            counts[i + 1] += counts[i];
        }
        let nnz = counts[dim];
        let mut fill = counts.clone();
        let mut col_idx = vec![0usize; nnz];
        let mut values = vec![0.0; nnz];
        for &(r, c, v) in &upper {
            col_idx[fill[r]] = c;
            values[fill[r]] = v;
            fill[r] += 1;
            if r != c {
                col_idx[fill[c]] = r;
                values[fill[c]] = v;
                fill[c] += 1;
            }
        }
        Ok(Self { dim, upper, row_ptr: counts, col_idx, values })
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_upper(dim, std::iter::empty()).expect("empty operator is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored upper-triangle entries `(row, col, value)` with `col >= row`.
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.upper
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (r, c) = if row <= col { (row, col) } else { (col, row) };
        self.upper
            .binary_search_by_key(&(r, c), |&(a, b, _)| (a, b))
            .map(|i| self.upper[i].2)
            .unwrap_or(0.0)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for &(r, c, v) in &self.upper {
            if r == c {
                d[r] = v;
            }
        }
        d
    }

    /// Column indices and values of one row of the full (symmetric) matrix.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn matvec_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (i, out) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += x[self.col_idx[k]] * self.values[k];
            }
            *out = acc;
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    /// `⟨x|H|x⟩` (real for a symmetric operator).
    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        let hx = self.matvec(x);
        x.iter().zip(&hx).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Largest absolute row sum, an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Self::from_upper(self.dim, self.upper.iter().chain(&other.upper).copied())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_upper(self.dim, self.upper.iter().map(|&(r, c, v)| (r, c, v * factor)))
            .expect("scaling preserves structure")
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        let mut entries = Vec::with_capacity(2 * self.upper.len());
        for &(r, c, v) in &self.upper {
            entries.push((r, c, v));
            if r != c {
                entries.push((c, r, v));
            }
        }
        SparseMatrix::coalesce(self.dim, self.dim, entries)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.upper {
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
        m
    }

    /// Restriction onto the basis states listed in `indices` (in that order).
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        let mut position = vec![usize::MAX; self.dim];
        for (new, &old) in indices.iter().enumerate() {
            if old >= self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: old + 1 });
            }
            position[old] = new;
        }
        let entries = self.upper.iter().filter_map(|&(r, c, v)| {
            let (a, b) = (position[r], position[c]);
            (a != usize::MAX && b != usize::MAX).then(|| (a.min(b), a.max(b), v))
        });
        Self::from_upper(indices.len(), entries)
    }

    /// Connected component of the coupling graph that contains the given
    /// basis states; the span of these states is invariant under the
    /// dynamics. Returned indices are sorted ascending.
    pub fn reachable_from(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut seen = vec![false; self.dim];
        let mut stack: Vec<usize> = Vec::new();
        for s in seeds {
            if s < self.dim && !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(i) = stack.pop() {
            for (j, v) in self.row(i) {
                if v != 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.iter().enumerate().filter_map(|(i, &s)| s.then_some(i)).collect()
    }
}

/// Dense commutator `[A, B]` for validation of small operators.
pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let h = HermitianOperator::from_upper(3, [(0, 1, 1.0), (0, 1, 0.5), (2, 2, -1.0)]).unwrap();
        assert_eq!(h.get(0, 1), 1.5);
        assert_eq!(h.get(1, 0), 1.5);
        assert_eq!(h.diagonal(), vec![0.0, 0.0, -1.0]);
    }

    #[test]
    fn rejects_lower_and_out_of_range() {
        assert!(HermitianOperator::from_upper(2, [(1, 0, 1.0)]).is_err());
        assert!(HermitianOperator::from_upper(2, [(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn asymmetric_sparse_is_rejected() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 1, 1.0)]).unwrap();
        assert!(matches!(a.clone().into_hermitian(1e-12), Err(Error::NotHermitian { .. })));
        let sym = a.add(&a.transpose()).unwrap().into_hermitian(1e-12).unwrap();
        assert_eq!(sym.get(1, 0), 1.0);
    }

    #[test]
    fn kron_matches_dense() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 1, 2.0), (1, 1, 1.0)]).unwrap();
        let b = SparseMatrix::from_triplets(2, 2, [(0, 0, 3.0), (1, 0, -1.0)]).unwrap();
        let k = a.kron(&b).to_dense();
        let expected = a.to_dense().kronecker(&b.to_dense());
        assert_eq!(k, expected);
    }

    #[test]
    fn matmul_matches_dense() {
        let a = SparseMatrix::from_triplets(2, 3, [(0, 1, 2.0), (1, 2, 1.0), (0, 0, 1.0)]).unwrap();
        let b = SparseMatrix::from_triplets(3, 2, [(1, 0, 3.0), (2, 1, -1.0), (0, 1, 4.0)]).unwrap();
        assert_eq!(a.matmul(&b).unwrap().to_dense(), a.to_dense() * b.to_dense());
    }

    #[test]
    fn matvec_uses_both_triangles() {
        let h = HermitianOperator::from_upper(2, [(0, 1, 2.0), (0, 0, 1.0)]).unwrap();
        let x = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let y = h.matvec(&x);
        assert_eq!(y[0], Complex64::new(1.0, 2.0));
        assert_eq!(y[1], Complex64::new(2.0, 0.0));
    }

    #[test]
    fn reachable_and_restrict() {
        // two blocks: {0, 2} and {1, 3}
        let h = HermitianOperator::from_upper(4, [(0, 2, 1.0), (1, 3, 2.0), (1, 1, 5.0)]).unwrap();
        assert_eq!(h.reachable_from([2]), vec![0, 2]);
        let r = h.restrict(&[1, 3]).unwrap();
        assert_eq!(r.get(0, 1), 2.0);
        assert_eq!(r.get(0, 0), 5.0);
    }
}
