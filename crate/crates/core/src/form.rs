//! Fully antisymmetric covariant tensors (differential form values) at a
//! point.
//!
//! Components are stored only on strictly increasing multi-indices, in
//! lexicographic order; access with arbitrary index order resolves the
//! permutation sign, so antisymmetry is exact by storage discipline. The
//! wedge product uses the standard alternating (shuffle) sign convention:
//! for 1-forms, `(a ∧ b)(X, Y) = a(X) b(Y) − a(Y) b(X)`.

use crate::tensor::TensorValue;
use nalgebra::{DMatrix, DVector};

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: usize = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Lexicographic rank of a strictly increasing multi-index among all
/// `C(dim, k)` of them.
fn combo_rank(dim: usize, combo: &[usize]) -> usize {
    let k = combo.len();
    let mut rank = 0;
    let mut prev = 0;
    for (j, &c) in combo.iter().enumerate() {
        for v in prev..c {
            rank += binomial(dim - 1 - v, k - 1 - j);
        }
        prev = c + 1;
    }
    rank
}

/// All strictly increasing multi-indices of length `k` over `0..dim`, in
/// lexicographic (canonical) order.
pub fn combos(dim: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(dim, k));
    let mut cur: Vec<usize> = (0..k).collect();
    if k > dim {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < dim - (k - i) {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormValue {
    dim: usize,
    degree: usize,
    /// Canonical components, one per increasing multi-index, lex order.
    data: Vec<f64>,
}

impl FormValue {
    pub fn zeros(dim: usize, degree: usize) -> Self {
        FormValue {
            dim,
            degree,
            data: vec![0.0; binomial(dim, degree)],
        }
    }

    pub fn from_canonical(dim: usize, degree: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), binomial(dim, degree));
        FormValue { dim, degree, data }
    }

    /// 1-form from its covector components.
    pub fn one_form(components: &[f64]) -> Self {
        FormValue {
            dim: components.len(),
            degree: 1,
            data: components.to_vec(),
        }
    }

    /// Antisymmetrization of a rank-2 covariant tensor:
    /// `A_ij = (T_ij - T_ji) / 2` stored on `i < j`.
    pub fn antisymmetrize_rank2(t: &TensorValue) -> Self {
        assert_eq!(t.degree(), 2);
        let dim = t.dim();
        let mut f = FormValue::zeros(dim, 2);
        for i in 0..dim {
            for j in i + 1..dim {
                let v = 0.5 * (t.get(&[i, j]) - t.get(&[j, i]));
                f.set(&[i, j], v);
            }
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Canonical component slice (lex order over increasing multi-indices).
    pub fn canonical(&self) -> &[f64] {
        &self.data
    }

    /// Component on an arbitrary index tuple; repeated indices give 0, any
    /// order is resolved to the canonical one with the permutation sign.
    pub fn component(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.degree);
        let mut sorted = idx.to_vec();
        // insertion sort, counting swaps for the permutation sign
        let mut swaps = 0usize;
        for i in 1..sorted.len() {
            let mut j = i;
            while j > 0 && sorted[j - 1] > sorted[j] {
                sorted.swap(j - 1, j);
                swaps += 1;
                j -= 1;
            }
        }
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return 0.0;
            }
        }
        let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
        sign * self.data[combo_rank(self.dim, &sorted)]
    }

    /// Set the component on a strictly increasing multi-index.
    pub fn set(&mut self, idx: &[usize], v: f64) {
        assert!(idx.windows(2).all(|w| w[0] < w[1]), "index not increasing");
        let r = combo_rank(self.dim, idx);
        self.data[r] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_diff(&self, other: &FormValue) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scaled(&self, s: f64) -> FormValue {
        FormValue {
            dim: self.dim,
            degree: self.degree,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn sub(&self, other: &FormValue) -> FormValue {
        assert_eq!(self.data.len(), other.data.len());
        FormValue {
            dim: self.dim,
            degree: self.degree,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Wedge product with the shuffle-sign convention.
    pub fn wedge(&self, other: &FormValue) -> FormValue {
        assert_eq!(self.dim, other.dim);
        let (p, q) = (self.degree, other.degree);
        let mut out = FormValue::zeros(self.dim, p + q);
        for combo in combos(self.dim, p + q) {
            let mut acc = 0.0;
            // every p-subset of the combo, via bitmask over its positions
            for mask in 0u32..(1 << (p + q)) {
                if mask.count_ones() as usize != p {
                    continue;
                }
                let mut left = Vec::with_capacity(p);
                let mut right = Vec::with_capacity(q);
                for (pos, &ix) in combo.iter().enumerate() {
                    if mask & (1 << pos) != 0 {
                        left.push(ix);
                    } else {
                        right.push(ix);
                    }
                }
                // shuffle sign: inversions between left and right positions
                let mut inv = 0usize;
                for &l in &left {
                    for &r in &right {
                        if l > r {
                            inv += 1;
                        }
                    }
                }
                let sign = if inv % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * self.component(&left) * other.component(&right);
            }
            out.set(&combo, acc);
        }
        out
    }

    /// Full antisymmetric matrix of a 2-form.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        assert_eq!(self.degree, 2);
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.component(&[i, j]))
    }

    /// Canonical components as a column vector (used by linear solves).
    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.data)
    }
}
