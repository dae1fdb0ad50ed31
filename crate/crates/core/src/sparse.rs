//! Compressed sparse row storage for stencil operators.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Scalar> CsrMatrix<T> {
    /// Builds an `n x n` matrix from triplets; duplicates are summed and
    /// columns within a row end up sorted.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet ({i}, {j}) outside {n}x{n}");
            rows[i].push((j, v));
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let mut last: Option<usize> = None;
            for (j, v) in row {
                if last == Some(j) {
                    let top = vals.len() - 1;
                    vals[top] = vals[top] + v;
                } else {
                    cols.push(j);
                    vals.push(v);
                    last = Some(j);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.n * self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                out[i * self.n + j] = v;
            }
        }
        out
    }

    /// Largest j - i over stored entries with |i - j| taken both ways.
    pub fn bandwidth(&self) -> usize {
        (0..self.n)
            .flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j)))
            .max()
            .unwrap_or(0)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }
}
