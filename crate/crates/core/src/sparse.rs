//! Square compressed-sparse-row matrices for co-occurrence counts and PPMI.

use std::collections::BTreeMap;

/// Square CSR matrix with sorted column indices per row and no stored
/// duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    dim: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<T>,
}

impl<T: Copy> CsrMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        CsrMatrix {
            dim,
            indptr: vec![0; dim + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from triplets that are already sorted by (row, col) with no
    /// duplicates. Panics if an index is out of range.
    pub fn from_sorted_triplets(dim: usize, triplets: impl IntoIterator<Item = (u32, u32, T)>) -> Self {
        let mut indptr = vec![0usize; dim + 1];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for (r, c, v) in triplets {
            assert!((r as usize) < dim && (c as usize) < dim, "triplet index out of range");
            indptr[r as usize + 1] += 1;
            indices.push(c);
            values.push(v);
        }
        for i in 0..dim {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            dim,
            indptr,
            indices,
            values,
        }
    }

    pub fn from_map(dim: usize, map: &BTreeMap<(u32, u32), T>) -> Self {
        Self::from_sorted_triplets(dim, map.iter().map(|(&(r, c), &v)| (r, c, v)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[T]) {
        let (s, e) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[s..e], &self.values[s..e])
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&(j as u32)).ok().map(|k| vals[k])
    }

    /// Iterates stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (u32, u32, T)> + '_ {
        (0..self.dim).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&c, &v)| (i as u32, c, v))
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Applies `f` to each stored value, dropping entries where it returns `None`.
    pub fn filter_map<U: Copy>(&self, mut f: impl FnMut(u32, u32, T) -> Option<U>) -> CsrMatrix<U> {
        CsrMatrix::from_sorted_triplets(
            self.dim,
            self.triplets().filter_map(|(r, c, v)| f(r, c, v).map(|u| (r, c, u))),
        )
    }
}

impl<T: Copy + PartialEq> CsrMatrix<T> {
    pub fn is_symmetric(&self) -> bool {
        self.triplets()
            .all(|(r, c, v)| self.get(c as usize, r as usize) == Some(v))
    }
}

impl<T> CsrMatrix<T>
where
    T: Copy + Into<f64>,
{
    pub fn frobenius_sq(&self) -> f64 {
        self.values
            .iter()
            .map(|&v| {
                let x: f64 = v.into();
                x * x
            })
            .sum()
    }

    pub fn to_dense(&self) -> ndarray::Array2<f64> {
        let mut out = ndarray::Array2::zeros((self.dim, self.dim));
        for (r, c, v) in self.triplets() {
            out[[r as usize, c as usize]] = v.into();
        }
        out
    }
}
