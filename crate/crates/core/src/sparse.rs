//! Minimal compressed-sparse-row storage shared by the count and weighted matrices.

use rayon::prelude::*;

/// CSR matrix. Column indices within a row are strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr<T> {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<T>,
}

impl<T: Copy> Csr<T> {
    pub fn empty(n_rows: usize, n_cols: usize) -> Self {
        Csr {
            n_rows,
            n_cols,
            indptr: vec![0; n_rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from `(row, col, value)` triplets already sorted by `(row, col)` with no duplicates.
    pub fn from_sorted_triplets<I>(n_rows: usize, n_cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, T)>,
    {
        let mut indptr = vec![0usize; n_rows + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut last: Option<(u32, u32)> = None;
        for (r, c, v) in triplets {
            debug_assert!(last.is_none_or(|l| l < (r, c)), "triplets must be sorted and unique");
            debug_assert!((r as usize) < n_rows && (c as usize) < n_cols);
            last = Some((r, c));
            indptr[r as usize + 1] += 1;
            indices.push(c);
            values.push(v);
        }
        for i in 0..n_rows {
            indptr[i + 1] += indptr[i];
        }
        Csr {
            n_rows,
            n_cols,
            indptr,
            indices,
            values,
        }
    }

    /// Checks structural invariants; used when loading untrusted data.
    pub fn from_raw_parts(
        n_rows: usize,
        n_cols: usize,
        indptr: Vec<usize>,
        indices: Vec<u32>,
        values: Vec<T>,
    ) -> std::result::Result<Self, String> {
        if indptr.len() != n_rows + 1 || indptr[0] != 0 {
            return Err("bad row pointer array".into());
        }
        if indices.len() != values.len() || *indptr.last().unwrap() != indices.len() {
            return Err("row pointers disagree with entry count".into());
        }
        for r in 0..n_rows {
            let (a, b) = (indptr[r], indptr[r + 1]);
            if a > b {
                return Err(format!("row pointers decrease at row {r}"));
            }
            let row = &indices[a..b];
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("unsorted column indices in row {r}"));
            }
            if row.last().is_some_and(|&c| c as usize >= n_cols) {
                return Err(format!("column index out of range in row {r}"));
            }
        }
        Ok(Csr {
            n_rows,
            n_cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn row(&self, r: usize) -> (&[u32], &[T]) {
        let (a, b) = (self.indptr[r], self.indptr[r + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, r: usize, c: u32) -> Option<T> {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).ok().map(|i| vals[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32, T)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    /// Applies `f(row, col, value)` to every entry, dropping entries for which it returns `None`.
    pub fn filter_map<U, F>(&self, f: F) -> Csr<U>
    where
        U: Copy + Send,
        T: Sync,
        F: Fn(usize, u32, T) -> Option<U> + Sync,
    {
        let rows: Vec<(Vec<u32>, Vec<U>)> = (0..self.n_rows)
            .into_par_iter()
            .map(|r| {
                let (cols, vals) = self.row(r);
                let mut oc = Vec::new();
                let mut ov = Vec::new();
                for (&c, &v) in cols.iter().zip(vals) {
                    if let Some(u) = f(r, c, v) {
                        oc.push(c);
                        ov.push(u);
                    }
                }
                (oc, ov)
            })
            .collect();
        let mut indptr = Vec::with_capacity(self.n_rows + 1);
        indptr.push(0);
        let total: usize = rows.iter().map(|(c, _)| c.len()).sum();
        let mut indices = Vec::with_capacity(total);
        let mut values = Vec::with_capacity(total);
        for (c, v) in rows {
            indices.extend(c);
            values.extend(v);
            indptr.push(indices.len());
        }
        Csr {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            indptr,
            indices,
            values,
        }
    }
}

impl Csr<f64> {
    /// `self * x` for a dense column-major block `x` (`n_cols × width`), written to `out` (`n_rows × width`, column-major).
    pub(crate) fn mul_dense(&self, x: &[f64], width: usize, out: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols * width);
        assert_eq!(out.len(), self.n_rows * width);
        // row-major scratch so rows can be filled in parallel
        let mut rm = vec![0.0; self.n_rows * width];
        rm.par_chunks_mut(width.max(1)).enumerate().for_each(|(r, acc)| {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let c = c as usize;
                for (j, a) in acc.iter_mut().enumerate() {
                    *a += v * x[j * self.n_cols + c];
                }
            }
        });
        for r in 0..self.n_rows {
            for j in 0..width {
                out[j * self.n_rows + r] = rm[r * width + j];
            }
        }
    }

    /// `selfᵀ * y` for a dense column-major block `y` (`n_rows × width`), written to `out` (`n_cols × width`).
    pub(crate) fn tmul_dense(&self, y: &[f64], width: usize, out: &mut [f64]) {
        assert_eq!(y.len(), self.n_rows * width);
        assert_eq!(out.len(), self.n_cols * width);
        out.par_chunks_mut(self.n_cols.max(1)).enumerate().for_each(|(j, col)| {
            col.iter_mut().for_each(|v| *v = 0.0);
            let yj = &y[j * self.n_rows..(j + 1) * self.n_rows];
            for (r, &yr) in yj.iter().enumerate() {
                if yr == 0.0 {
                    continue;
                }
                let (cols, vals) = self.row(r);
                for (&c, &v) in cols.iter().zip(vals) {
                    col[c as usize] += v * yr;
                }
            }
        });
    }

    pub fn row_norm(&self, r: usize) -> f64 {
        self.row(r).1.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}
