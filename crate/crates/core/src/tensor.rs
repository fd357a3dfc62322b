//! Dense multi-index tensor values at a point.
//!
//! Storage is row-major over `(dim)^degree` entries; 2n <= 8 is the
//! supported regime so the largest rank-4 tensor has 4096 entries.

use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variance {
    Co,
    Contra,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorValue {
    dim: usize,
    variance: Vec<Variance>,
    data: Vec<f64>,
}

impl TensorValue {
    pub fn zeros(dim: usize, variance: Vec<Variance>) -> Self {
        let len = dim.pow(variance.len() as u32);
        TensorValue {
            dim,
            variance,
            data: vec![0.0; len],
        }
    }

    pub fn from_fn2(
        dim: usize,
        variance: [Variance; 2],
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut t = Self::zeros(dim, variance.to_vec());
        for i in 0..dim {
            for j in 0..dim {
                t.data[i * dim + j] = f(i, j);
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.variance.len()
    }

    pub fn variance(&self) -> &[Variance] {
        &self.variance
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.variance.len());
        let mut o = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            o = o * self.dim + i;
        }
        o
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Max-norm of the component-wise difference.
    pub fn max_diff(&self, other: &TensorValue) -> f64 {
        debug_assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Rank-2 view as a matrix (row = first index).
    pub fn to_matrix(&self) -> DMatrix<f64> {
        assert_eq!(self.degree(), 2);
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.data[i * self.dim + j])
    }

    pub fn from_matrix(m: &DMatrix<f64>, variance: [Variance; 2]) -> Self {
        Self::from_fn2(m.nrows(), variance, |i, j| m[(i, j)])
    }

    /// Symmetry defect of a rank-2 tensor: `max_ij |T_ij - T_ji|`.
    pub fn symmetry_residual(&self) -> f64 {
        assert_eq!(self.degree(), 2);
        let mut r: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..i {
                r = r.max((self.get(&[i, j]) - self.get(&[j, i])).abs());
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank2_roundtrip() {
        let t = TensorValue::from_fn2(3, [Variance::Co, Variance::Co], |i, j| {
            (i * 3 + j) as f64
        });
        assert_eq!(t.get(&[1, 2]), 5.0);
        let m = t.to_matrix();
        assert_eq!(m[(2, 1)], 7.0);
        let back = TensorValue::from_matrix(&m, [Variance::Co, Variance::Co]);
        assert_eq!(t, back);
    }

    #[test]
    fn symmetry_residual_detects_asymmetry() {
        let mut t = TensorValue::zeros(2, vec![Variance::Co, Variance::Co]);
        t.set(&[0, 1], 1.0);
        t.set(&[1, 0], 0.25);
        assert!((t.symmetry_residual() - 0.75).abs() < 1e-15);
    }
}
