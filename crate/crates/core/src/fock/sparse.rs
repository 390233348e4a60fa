//! Minimal compressed-sparse-row matrix.

use nalgebra::DMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        CsrMatrix { n_rows, n_cols, indptr: vec![0; n_rows + 1], indices: Vec::new(), data: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        CsrMatrix { n_rows: n, n_cols: n, indptr: (0..=n).collect(), indices: (0..n).collect(), data: d.to_vec() }
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(n_rows: usize, n_cols: usize, mut trip: Vec<(usize, usize, f64)>) -> Self {
        trip.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; n_rows + 1];
        let mut indices: Vec<usize> = Vec::with_capacity(trip.len());
        let mut data: Vec<f64> = Vec::with_capacity(trip.len());
        let mut rows: Vec<usize> = Vec::with_capacity(trip.len());
        for (r, c, v) in trip {
            debug_assert!(r < n_rows && c < n_cols);
            if let (Some(&lr), Some(&lc)) = (rows.last(), indices.last()) {
                if lr == r && lc == c {
                    *data.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            indices.push(c);
            data.push(v);
        }
        let (mut ri, mut ci, mut di) = (Vec::new(), Vec::new(), Vec::new());
        for idx in 0..data.len() {
            if data[idx] != 0.0 {
                ri.push(rows[idx]);
                ci.push(indices[idx]);
                di.push(data[idx]);
            }
        }
        for &r in &ri {
            indptr[r + 1] += 1;
        }
        for r in 0..n_rows {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix { n_rows, n_cols, indptr, indices: ci, data: di }
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut t = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != 0.0 {
                    t.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t)
    }

    pub fn nrows(&self) -> usize {
        self.n_rows
    }
    pub fn ncols(&self) -> usize {
        self.n_cols
    }
    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.indptr[r], self.indptr[r + 1]);
        self.indices[a..b].iter().copied().zip(self.data[a..b].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (a, b) = (self.indptr[r], self.indptr[r + 1]);
        match self.indices[a..b].binary_search(&c) {
            Ok(k) => self.data[a + k],
            Err(_) => 0.0,
        }
    }

    /// `y = A x`
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n_cols);
        for (r, yr) in y.iter_mut().enumerate().take(self.n_rows) {
            let mut s = 0.0;
            for k in self.indptr[r]..self.indptr[r + 1] {
                s += self.data[k] * x[self.indices[k]];
            }
            *yr = s;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.matvec_into(x, &mut y);
        y
    }

    /// `y = Aᵀ x`
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_cols];
        for (r, &xr) in x.iter().enumerate().take(self.n_rows) {
            for k in self.indptr[r]..self.indptr[r + 1] {
                y[self.indices[k]] += self.data[k] * xr;
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.n_cols, self.n_rows, self.triplets().map(|(r, c, v)| (c, r, v)).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = self.clone();
        m.data.iter_mut().for_each(|v| *v *= s);
        m
    }

    /// `self + s·other`
    pub fn add_scaled(&self, other: &CsrMatrix, s: f64) -> Self {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let t = self.triplets().chain(other.triplets().map(|(r, c, v)| (r, c, s * v))).collect();
        Self::from_triplets(self.n_rows, self.n_cols, t)
    }

    pub fn matmul(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.n_cols, other.n_rows);
        let mut t = Vec::new();
        for r in 0..self.n_rows {
            for (k, v) in self.row(r) {
                for (c, w) in other.row(k) {
                    t.push((r, c, v * w));
                }
            }
        }
        Self::from_triplets(self.n_rows, other.n_cols, t)
    }

    /// `AB − BA`
    pub fn commutator(&self, other: &CsrMatrix) -> Self {
        self.matmul(other).add_scaled(&other.matmul(self), -1.0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_rows, self.n_cols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// One-norm (max column sum).
    pub fn norm1(&self) -> f64 {
        let mut col = vec![0.0; self.n_cols];
        for (_, c, v) in self.triplets() {
            col[c] += v.abs();
        }
        col.into_iter().fold(0.0, f64::max)
    }

    /// Max deviation from `A = sign·Aᵀ` (sign = +1 symmetric, −1 antisymmetric).
    pub fn symmetry_defect(&self, sign: f64) -> f64 {
        self.triplets()
            .map(|(r, c, v)| (v - sign * self.get(c, r)).abs())
            .fold(0.0, f64::max)
    }

    /// Quadratic form `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n_rows)
            .map(|r| x[r] * self.row(r).map(|(c, v)| v * y[c]).sum::<f64>())
            .sum()
    }
}
