//! Symmetric matrices stored as the compressed rows of their lower triangle.

use serde::Serialize;

/// Row `i` holds the columns `j ≤ i` in ascending order; the diagonal is
/// always stored and always last.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds from per-row `(column, value)` lists of the strict lower
    /// triangle plus the diagonal values.
    pub(crate) fn from_rows(rows: Vec<Vec<(usize, f64)>>, diagonal: &[f64]) -> Self {
        let n = rows.len();
        assert_eq!(diagonal.len(), n);
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let total: usize = rows.iter().map(Vec::len).sum::<usize>() + n;
        let mut col_idx = Vec::with_capacity(total);
        let mut values = Vec::with_capacity(total);
        for (i, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            for (j, v) in row {
                assert!(j < i, "entry ({i}, {j}) is not strictly lower");
                col_idx.push(j);
                values.push(v);
            }
            col_idx.push(i);
            values.push(diagonal[i]);
            row_ptr.push(col_idx.len());
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Lower triangle of a dense symmetric matrix; off-diagonal zeros are
    /// dropped.
    pub fn from_dense(a: &[Vec<f64>]) -> Self {
        let n = a.len();
        let rows = (0..n)
            .map(|i| {
                assert_eq!(a[i].len(), n, "matrix must be square");
                (0..i)
                    .filter(|&j| a[i][j] != 0.0)
                    .map(|j| (j, a[i][j]))
                    .collect()
            })
            .collect();
        let diag: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
        Self::from_rows(rows, &diag)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Stored entries of the lower triangle, diagonal included.
    pub fn nnz_lower(&self) -> usize {
        self.values.len()
    }

    /// Structural nonzeros of the full matrix.
    pub fn nnz(&self) -> usize {
        2 * self.values.len() - self.n
    }

    /// Fraction of structurally nonzero entries of the full matrix.
    pub fn density(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.nnz() as f64 / (self.n as f64 * self.n as f64)
    }

    /// Columns and values of row `i` of the lower triangle.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.values[self.row_ptr[i + 1] - 1])
            .collect()
    }

    /// Entry `(i, j)`; `None` when structurally absent.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (i, j) = if j > i { (j, i) } else { (i, j) };
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j];
                if j != i {
                    y[j] += v * x[i];
                }
            }
            y[i] += acc;
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        a
    }
}
