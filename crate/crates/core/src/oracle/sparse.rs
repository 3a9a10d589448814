use nalgebra::DMatrix;
use num_complex::Complex64;

/// Sparse complex operator stored as row-sorted triplets with merged duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOp {
    pub fn zero(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn from_triplets(dim: usize, mut entries: Vec<(usize, usize, Complex64)>) -> Self {
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|e| e.2 != Complex64::new(0.0, 0.0));
        Self { dim, entries: merged }
    }

    /// Operator mapping each basis column to at most one basis row.
    pub fn from_columns<F>(dim: usize, mut f: F) -> Self
    where
        F: FnMut(usize) -> Option<(usize, Complex64)>,
    {
        let entries = (0..dim).filter_map(|j| f(j).map(|(i, v)| (i, j, v))).collect();
        Self::from_triplets(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.entries.iter().map(|&(i, j, v)| (j, i, v.conj())).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_triplets(self.dim, self.entries.iter().map(|&(i, j, v)| (i, j, v * s)).collect())
    }

    pub fn add(&self, other: &SparseOp) -> Self {
        let mut e = self.entries.clone();
        e.extend_from_slice(&other.entries);
        Self::from_triplets(self.dim, e)
    }

    pub fn mul(&self, other: &SparseOp) -> Self {
        let mut by_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); self.dim];
        for &(k, j, v) in &other.entries {
            by_row[k].push((j, v));
        }
        let mut e = Vec::new();
        for &(i, k, a) in &self.entries {
            for &(j, b) in &by_row[k] {
                e.push((i, j, a * b));
            }
        }
        Self::from_triplets(self.dim, e)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    /// `out = self * m` for row-major dense `m` (`dim x dim`); `out` is overwritten.
    pub fn apply_dense(&self, m: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        out.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for &(i, j, v) in &self.entries {
            let src = &m[j * d..(j + 1) * d];
            let dst = &mut out[i * d..(i + 1) * d];
            for (o, s) in dst.iter_mut().zip(src) {
                *o += v * s;
            }
        }
    }

    /// `Tr(self * m)` for row-major dense `m`.
    pub fn trace_with(&self, m: &[Complex64]) -> Complex64 {
        self.entries.iter().map(|&(i, j, v)| v * m[j * self.dim + i]).sum()
    }

    pub fn max_hermitian_deviation(&self) -> f64 {
        let d = self.to_dense();
        (&d - d.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_matches_dense() {
        let a = SparseOp::from_triplets(3, vec![(0, 1, c(1.0, 2.0)), (2, 0, c(-1.0, 0.5)), (0, 1, c(1.0, 0.0))]);
        let b = SparseOp::from_triplets(3, vec![(1, 2, c(0.0, 1.0)), (0, 0, c(3.0, 0.0))]);
        assert_eq!(a.mul(&b).to_dense(), a.to_dense() * b.to_dense());
        assert_eq!(a.adjoint().to_dense(), a.to_dense().adjoint());
    }

    #[test]
    fn apply_dense_row_major() {
        let a = SparseOp::from_triplets(2, vec![(0, 1, c(2.0, 0.0))]);
        let m = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        let mut out = [c(0.0, 0.0); 4];
        a.apply_dense(&m, &mut out);
        assert_eq!(out, [c(6.0, 0.0), c(8.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(a.trace_with(&m), c(6.0, 0.0));
    }
}
