//! Exact rational linear algebra: Gaussian elimination with
//! first-in-basis-order pivoting, kernels, images, and solving. Pivoting is
//! deterministic so cohomology representatives and reports are reproducible.

use crate::scalar::Scalar;

/// A dense matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Reduced row echelon form; returns the pivot column of each pivot row.
    /// Column pivots are chosen left to right (first in basis order).
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.at(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self.at(row, col).inv();
            for c in col..self.cols {
                let v = self.at(row, c) * &inv;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let f = self.at(r, col).clone();
                    for c in col..self.cols {
                        let v = self.at(r, c) - &(self.at(row, c) * &f);
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// A basis of the kernel (right null space), as rows. Deterministic:
    /// free columns in ascending order, pivot entries back-substituted.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -m.at(prow, free);
            }
            basis.push(v);
        }
        basis
    }

    /// A basis of the column space expressed in the original columns:
    /// returns the pivot column indices (first-in-order spanning set).
    pub fn image_pivot_columns(&self) -> Vec<usize> {
        let mut m = self.clone();
        m.rref()
    }

    /// Solves `self * x = b`; `None` when inconsistent. Free variables are
    /// set to zero, so the solution is deterministic.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zero(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the augmented column
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            x[pcol] = aug.at(prow, self.cols).clone();
        }
        Some(x)
    }
}

/// Row-reduces `vectors` and returns an independent spanning subset's
/// indices, chosen greedily in input order.
pub fn independent_subset(vectors: &[Vec<Scalar>], dim: usize) -> Vec<usize> {
    let mut basis: Vec<Vec<Scalar>> = Vec::new();
    let mut chosen = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        reduce_against(&mut w, &basis);
        if w.iter().any(|c| !c.is_zero()) {
            normalize_leading(&mut w);
            basis.push(w);
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        }
    }
    chosen
}

/// Reduces `w` against echelonized `basis` rows (each with leading 1).
pub fn reduce_against(w: &mut [Scalar], basis: &[Vec<Scalar>]) {
    for b in basis {
        let lead = b.iter().position(|c| !c.is_zero()).expect("nonzero row");
        if !w[lead].is_zero() {
            let f = w[lead].clone();
            for (wc, bc) in w.iter_mut().zip(b.iter()) {
                *wc -= &(&f * bc);
            }
        }
    }
}

fn normalize_leading(w: &mut [Scalar]) {
    let lead = w.iter().position(|c| !c.is_zero()).expect("nonzero row");
    let inv = w[lead].inv();
    for c in w.iter_mut() {
        *c *= &inv;
    }
}

/// An echelonized subspace supporting incremental insertion and exact
/// membership tests.
#[derive(Debug, Clone, Default)]
pub struct Subspace {
    /// Echelon rows with leading coefficient 1, sorted by leading index.
    rows: Vec<Vec<Scalar>>,
}

impl Subspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Inserts a vector; returns true when it enlarged the space.
    pub fn insert(&mut self, v: Vec<Scalar>) -> bool {
        let mut w = v;
        reduce_against(&mut w, &self.rows);
        if w.iter().all(|c| c.is_zero()) {
            return false;
        }
        let lead = w.iter().position(|c| !c.is_zero()).unwrap();
        let inv = w[lead].inv();
        for c in w.iter_mut() {
            *c *= &inv;
        }
        // Keep rows sorted by leading index for determinism.
        let pos = self
            .rows
            .iter()
            .position(|r| r.iter().position(|c| !c.is_zero()).unwrap() > lead)
            .unwrap_or(self.rows.len());
        self.rows.insert(pos, w);
        true
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let mut w = v.to_vec();
        reduce_against(&mut w, &self.rows);
        w.iter().all(|c| c.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn rref_rank_kernel() {
        let mut m = Matrix::zero(2, 3);
        m.set(0, 0, s(1));
        m.set(0, 1, s(2));
        m.set(0, 2, s(3));
        m.set(1, 0, s(2));
        m.set(1, 1, s(4));
        m.set(1, 2, s(6));
        assert_eq!(m.rank(), 1);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            // check m v = 0
            for r in 0..m.rows {
                let dot = (0..m.cols).fold(Scalar::zero(), |acc, c| acc + (m.at(r, c) * &v[c]));
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn solve_consistent_and_not() {
        let mut m = Matrix::zero(2, 2);
        m.set(0, 0, s(2));
        m.set(1, 1, s(3));
        let x = m.solve(&[s(4), s(9)]).unwrap();
        assert_eq!(x, vec![s(2), s(3)]);

        let mut sing = Matrix::zero(2, 1);
        sing.set(0, 0, s(1));
        sing.set(1, 0, s(1));
        assert!(sing.solve(&[s(1), s(2)]).is_none());
        assert!(sing.solve(&[s(5), s(5)]).is_some());
    }

    #[test]
    fn subspace_membership() {
        let mut sp = Subspace::new();
        sp.insert(vec![s(1), s(1), s(0)]);
        sp.insert(vec![s(0), s(2), s(2)]);
        assert_eq!(sp.dim(), 2);
        assert!(sp.contains(&[s(1), s(3), s(2)]));
        assert!(!sp.contains(&[s(0), s(0), s(1)]));
        sp.insert(vec![s(2), s(2), s(0)]);
        assert_eq!(sp.dim(), 2);
    }
}
