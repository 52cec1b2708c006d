//! Symmetric matrix containers shared by assembly, the eigensolvers and the
//! spherical-cap discretizations.

use alloc::vec;
use alloc::vec::Vec;

/// Symmetric sparse matrix in CSR layout.
///
/// Both triangles are stored so that a product is a single pass over the
/// rows. Column indices within a row are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    order: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Zero matrix with the given structure. `rows[i]` lists the columns of
    /// row `i`; it is sorted and deduplicated here.
    pub fn from_pattern(order: usize, rows: Vec<Vec<usize>>) -> Self {
        assert_eq!(rows.len(), order, "one column list per row");
        let mut row_offsets = Vec::with_capacity(order + 1);
        let mut col_indices = Vec::new();
        row_offsets.push(0);
        for mut cols in rows {
            cols.sort_unstable();
            cols.dedup();
            debug_assert!(cols.last().map_or(true, |&c| c < order));
            col_indices.extend_from_slice(&cols);
            row_offsets.push(col_indices.len());
        }
        let nnz = col_indices.len();
        Self {
            order,
            row_offsets,
            col_indices,
            values: vec![0.0; nnz],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates in
    /// input order. Triplets are taken literally; the caller supplies both
    /// triangles.
    pub fn from_triplets(order: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows = vec![Vec::new(); order];
        for &(i, j, _) in triplets {
            rows[i].push(j);
        }
        let mut m = Self::from_pattern(order, rows);
        for &(i, j, v) in triplets {
            m.add(i, j, v);
        }
        m
    }

    /// Dense row-major input, mainly for tests. Exact zeros are dropped except
    /// on the diagonal.
    pub fn from_dense(order: usize, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), order * order);
        let rows = (0..order)
            .map(|i| {
                (0..order)
                    .filter(|&j| i == j || dense[i * order + j] != 0.0)
                    .collect()
            })
            .collect();
        let mut m = Self::from_pattern(order, rows);
        for i in 0..order {
            for j in 0..order {
                if i == j || dense[i * order + j] != 0.0 {
                    m.add(i, j, dense[i * order + j]);
                }
            }
        }
        m
    }

    pub fn identity(order: usize) -> Self {
        Self::diagonal_matrix(&vec![1.0; order])
    }

    pub fn diagonal_matrix(diag: &[f64]) -> Self {
        let order = diag.len();
        Self {
            order,
            row_offsets: (0..=order).collect(),
            col_indices: (0..order).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Columns and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let start = self.row_offsets[i];
        let cols = &self.col_indices[start..self.row_offsets[i + 1]];
        cols.binary_search(&j).ok().map(|p| start + p)
    }

    /// Entry `(i, j)`, zero outside the pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |p| self.values[p])
    }

    /// Accumulates into an entry of the pattern.
    ///
    /// # Panics
    /// If `(i, j)` is not part of the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let p = self
            .position(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside the sparsity pattern"));
        self.values[p] += v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.order).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.order);
        assert_eq!(y.len(), self.order);
        for i in 0..self.order {
            let (cols, vals) = self.row(i);
            let mut s = 0.0;
            for (&c, &v) in cols.iter().zip(vals) {
                s += v * x[c];
            }
            y[i] = s;
        }
    }

    /// Quadratic form `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.order];
        self.matvec(x, &mut y);
        y.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Largest `|A_ij − A_ji|` over the stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.order {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                worst = worst.max(libm::fabs(v - self.get(j, i)));
            }
        }
        worst
    }

    /// `self + alpha * other`; both matrices must share one pattern.
    pub fn add_scaled(&self, alpha: f64, other: &Self) -> Self {
        assert!(
            self.order == other.order
                && self.row_offsets == other.row_offsets
                && self.col_indices == other.col_indices,
            "add_scaled needs identical sparsity patterns"
        );
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + alpha * b)
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }

    /// Row-sum lumped diagonal matrix.
    pub fn lumped(&self) -> Self {
        let diag: Vec<f64> = (0..self.order).map(|i| self.row(i).1.iter().sum()).collect();
        Self::diagonal_matrix(&diag)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.order)
            .map(|i| self.row(i).1.iter().map(|v| libm::fabs(*v)).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Lower-triangle entries `(i, j, v)` with `j ≤ i`, in row order.
    pub fn lower_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.order).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter()
                .zip(vals)
                .filter(move |(&j, _)| j <= i)
                .map(move |(&j, &v)| (i, j, v))
        })
    }
}

/// Symmetric banded matrix; only the diagonal and `bandwidth` sub-diagonals
/// are stored, row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSymMatrix {
    order: usize,
    bandwidth: usize,
    // row i holds A[i][i - d] at i * (bandwidth + 1) + d
    data: Vec<f64>,
}

impl BandedSymMatrix {
    pub fn zeros(order: usize, bandwidth: usize) -> Self {
        Self {
            order,
            bandwidth,
            data: vec![0.0; order * (bandwidth + 1)],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order, 0);
        for i in 0..order {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Symmetric Toeplitz matrix with `diag` on the diagonal and `off[d-1]`
    /// on the d-th off-diagonals.
    pub fn toeplitz(order: usize, diag: f64, off: &[f64]) -> Self {
        let mut m = Self::zeros(order, off.len());
        for i in 0..order {
            m.set(i, i, diag);
            for (d, &v) in off.iter().enumerate() {
                if i > d {
                    m.set(i, i - d - 1, v);
                }
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let d = r - c;
        (d <= self.bandwidth).then(|| r * (self.bandwidth + 1) + d)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Sets `(i, j)` and, implicitly, `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside the band"));
        self.data[s] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside the band"));
        self.data[s] += v;
    }

    /// Lower band of row `i` as `(first column, values from first..=i)`.
    pub fn lower_row(&self, i: usize) -> (usize, Vec<f64>) {
        let first = i.saturating_sub(self.bandwidth);
        let vals = (first..=i).map(|j| self.get(i, j)).collect();
        (first, vals)
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.order);
        assert_eq!(y.len(), self.order);
        let bw = self.bandwidth;
        for v in y.iter_mut() {
            *v = 0.0;
        }
        for i in 0..self.order {
            let row = &self.data[i * (bw + 1)..(i + 1) * (bw + 1)];
            y[i] += row[0] * x[i];
            for d in 1..=bw.min(i) {
                let a = row[d];
                y[i] += a * x[i - d];
                y[i - d] += a * x[i];
            }
        }
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.order)
            .map(|i| {
                let lo = i.saturating_sub(self.bandwidth);
                let hi = (i + self.bandwidth).min(self.order - 1);
                (lo..=hi).map(|j| libm::fabs(self.get(i, j))).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_sparse(&self) -> SparseSymMatrix {
        let n = self.order;
        let bw = self.bandwidth;
        let rows = (0..n)
            .map(|i| (i.saturating_sub(bw)..=(i + bw).min(n.saturating_sub(1))).collect())
            .collect();
        let mut m = SparseSymMatrix::from_pattern(n, rows);
        for i in 0..n {
            for j in i.saturating_sub(bw)..=(i + bw).min(n - 1) {
                m.add(i, j, self.get(i, j));
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let m = SparseSymMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (0, 0, 3.0)]);
        assert_eq!(m.get(0, 0), 4.0);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.nnz(), 3);
    }

    #[test]
    fn banded_matvec_matches_sparse() {
        let b = BandedSymMatrix::toeplitz(7, 6.0, &[-4.0, 1.0]);
        let s = b.to_sparse();
        let x: Vec<f64> = (0..7).map(|i| (i as f64).sin()).collect();
        let mut y1 = vec![0.0; 7];
        let mut y2 = vec![0.0; 7];
        b.matvec(&x, &mut y1);
        s.matvec(&x, &mut y2);
        for (a, c) in y1.iter().zip(&y2) {
            assert!((a - c).abs() < 1e-14);
        }
        assert_eq!(s.max_asymmetry(), 0.0);
    }

    #[test]
    fn lumping_preserves_row_sums() {
        let m = SparseSymMatrix::from_dense(2, &[2.0, 1.0, 1.0, 2.0]);
        assert_eq!(m.lumped().diagonal(), vec![3.0, 3.0]);
    }
}
