//! Envelope (skyline) `L D L^T` factorization for sparse symmetric matrices.
//!
//! Every system the time-marching schemes solve is symmetric with a constant
//! matrix, so it is factored once and back-solved at every step. The channel is
//! long and thin; numbering the unknowns column by column across its height
//! keeps the envelope narrow, and the envelope holds all fill-in.
//!
//! No pivoting is performed. Symmetric saddle-point matrices factor stably as
//! long as each pressure unknown is numbered after the velocity unknowns it
//! couples to (see [`crate::fem::FsiDofMap`]); a vanishing pivot is reported as
//! [`FsiError::Factorization`].

use crate::error::{FsiError, Result};
use crate::scalar::{dot, Scalar};

/// Lower triangle of a symmetric matrix in row-envelope storage, then its factors.
#[derive(Debug, Clone)]
pub struct SkylineMatrix<T> {
    n: usize,
    /// First stored column of each row.
    first: Vec<usize>,
    /// Start of each row in `vals`; row `i` holds columns `first[i]..=i`.
    ptr: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Scalar> SkylineMatrix<T> {
    /// Assembles from a generator that emits `(row, col, value)` entries of the
    /// lower triangle (`row >= col`). The generator runs twice: once for the
    /// envelope, once for the values. Duplicates are summed in emission order.
    pub fn assemble<F>(n: usize, mut emit: F) -> Self
    where
        F: FnMut(&mut dyn FnMut(usize, usize, T)),
    {
        let mut first: Vec<usize> = (0..n).collect();
        emit(&mut |r, c, _| {
            debug_assert!(r >= c && r < n);
            if c < first[r] {
                first[r] = c;
            }
        });
        let mut ptr = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        for (i, &f) in first.iter().enumerate() {
            ptr.push(acc);
            acc += i - f + 1;
        }
        ptr.push(acc);
        let mut vals = vec![T::zero(); acc];
        emit(&mut |r, c, v| {
            vals[ptr[r] + c - first[r]] += v;
        });
        SkylineMatrix { n, first, ptr, vals }
    }

    /// From a full symmetric dense matrix (test and oracle helper).
    pub fn from_dense(a: &[Vec<T>]) -> Self {
        let n = a.len();
        Self::assemble(n, |e| {
            for (i, row) in a.iter().enumerate() {
                for (j, &v) in row.iter().enumerate().take(i + 1) {
                    if v != T::zero() || i == j {
                        e(i, j, v);
                    }
                }
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored entries (envelope size including the diagonal).
    pub fn envelope_size(&self) -> usize {
        self.vals.len()
    }

    pub fn max_row_width(&self) -> usize {
        (0..self.n).map(|i| i - self.first[i] + 1).max().unwrap_or(0)
    }

    /// Factors in place into unit-lower `L` and diagonal `D`.
    pub fn factor(mut self) -> Result<LdltFactor<T>> {
        let n = self.n;
        let mut diag = vec![T::zero(); n];
        let tiny = T::epsilon() * T::lit(1e3);
        for i in 0..n {
            let fi = self.first[i];
            let pi = self.ptr[i];
            let width = i - fi;
            let scale = self.vals[pi..=pi + width].iter().fold(T::zero(), |m, v| m.max(v.abs()));
            // row i currently holds a_ij; overwrite with t_ij = l_ij d_j
            for j in fi..i {
                let fj = self.first[j];
                let k0 = fi.max(fj);
                let s = if k0 < j {
                    let (head, tail) = self.vals.split_at(pi);
                    let row_j = &head[self.ptr[j] + (k0 - fj)..self.ptr[j] + (j - fj)];
                    let row_i = &tail[k0 - fi..j - fi];
                    dot(row_i, row_j)
                } else {
                    T::zero()
                };
                self.vals[pi + j - fi] -= s;
            }
            let mut d = self.vals[pi + width];
            for j in fi..i {
                let t = self.vals[pi + j - fi];
                let l = t / diag[j];
                d -= t * l;
                self.vals[pi + j - fi] = l;
            }
            if !d.is_finite() || d.abs() <= tiny * scale.max(T::min_positive_value()) {
                return Err(FsiError::Factorization { row: i, n, value: d.to_f64_() });
            }
            self.vals[pi + width] = T::one();
            diag[i] = d;
        }
        Ok(LdltFactor { lower: self, diag })
    }
}

/// `A = L D L^T` ready for repeated back-substitution.
#[derive(Debug, Clone)]
pub struct LdltFactor<T> {
    lower: SkylineMatrix<T>,
    diag: Vec<T>,
}

impl<T: Scalar> LdltFactor<T> {
    pub fn dim(&self) -> usize {
        self.lower.n
    }

    pub fn envelope_size(&self) -> usize {
        self.lower.envelope_size()
    }

    /// Number of negative pivots (the inertia's negative count).
    pub fn negative_pivots(&self) -> usize {
        self.diag.iter().filter(|d| **d < T::zero()).count()
    }

    pub fn solve_in_place(&self, x: &mut [T]) {
        let m = &self.lower;
        assert_eq!(x.len(), m.n);
        for i in 0..m.n {
            let fi = m.first[i];
            if fi < i {
                let row = &m.vals[m.ptr[i]..m.ptr[i] + (i - fi)];
                let s = dot(row, &x[fi..i]);
                x[i] -= s;
            }
        }
        for (xi, &d) in x.iter_mut().zip(&self.diag) {
            *xi /= d;
        }
        for i in (0..m.n).rev() {
            let fi = m.first[i];
            if fi < i {
                let xi = x[i];
                let row = &m.vals[m.ptr[i]..m.ptr[i] + (i - fi)];
                for (xk, &l) in x[fi..i].iter_mut().zip(row) {
                    *xk -= l * xi;
                }
            }
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
