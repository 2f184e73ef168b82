//! Square nonnegative integer matrices used by the separator and pushdown
//! certificate checkers.

use super::{BracketLabel, Instance};

/// Hard cap on matrix dimension. Entries are bounded by `n^2` at the format
/// level, so every product computed by the checkers fits in a `u64` as long
/// as `n <= 2^12` (worst intermediate value is `n * n^2 * n = n^4 < 2^48`).
pub const MAX_DIM: usize = 1 << 12;

/// An `n x n` matrix of nonnegative integers. A boolean matrix is represented
/// as a `NatMatrix` with entries in `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatMatrix {
    n: usize,
    data: Vec<u64>,
}

impl NatMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_DIM, "matrix dimension {n} exceeds {MAX_DIM}");
        NatMatrix { n, data: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(n: usize, rows: Vec<u64>) -> Self {
        assert!(n <= MAX_DIM, "matrix dimension {n} exceeds {MAX_DIM}");
        assert_eq!(rows.len(), n * n);
        NatMatrix { n, data: rows }
    }

    /// Adjacency matrix of the instance restricted to edges with the given
    /// label. Rows and columns are 0-indexed; vertex `v` maps to index `v-1`.
    pub fn adjacency(instance: &Instance, label: BracketLabel) -> Self {
        let n = instance.n() as usize;
        let mut m = Self::zeros(n);
        for e in instance.edges() {
            if e.label == label {
                m.data[(e.from as usize - 1) * n + (e.to as usize - 1)] = 1;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn is_boolean(&self) -> bool {
        self.data.iter().all(|&x| x <= 1)
    }

    pub fn max_entry(&self) -> u64 {
        self.data.iter().copied().max().unwrap_or(0)
    }

    /// Entrywise `bool(N)`: every nonzero entry replaced by 1.
    pub fn to_bool(&self) -> Self {
        NatMatrix {
            n: self.n,
            data: self.data.iter().map(|&x| u64::from(x != 0)).collect(),
        }
    }

    /// Exact cubic product. Panics on dimension mismatch; the `MAX_DIM` guard
    /// on construction keeps the arithmetic inside `u64`.
    pub fn mul(&self, other: &NatMatrix) -> Self {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Matrix-vector product, used by the Freivalds probes.
    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.n, v.len(), "matrix/vector dimension mismatch");
        let n = self.n;
        let mut out = vec![0u64; n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            out[i] = row.iter().zip(v).map(|(&a, &x)| a * x).sum();
        }
        out
    }

    /// Entrywise comparison; returns the first position `(i, j)` (0-indexed)
    /// where `self[i,j] > other[i,j]`, or `None` when `self <= other`.
    pub fn leq_violation(&self, other: &NatMatrix) -> Option<(usize, usize)> {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) > other.get(i, j) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// First position where the two matrices differ, or `None` when equal.
    pub fn neq_witness(&self, other: &NatMatrix) -> Option<(usize, usize)> {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) != other.get(i, j) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}
