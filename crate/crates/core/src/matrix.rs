//! Dense exact linear algebra over any [`Field`].
//!
//! Fraction-free performance is not a concern at the sizes we use
//! (witness matrices up to ~25x25), so everything is plain Gaussian
//! elimination with exact division.

use crate::field::Field;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Debug)]
pub struct Mat<K> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<K>,
}

impl<K: Field> Mat<K> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![K::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = K::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<K>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> K) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn at(&self, i: usize, j: usize) -> &K {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut K {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[K] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<K> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Mat<K> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn mul(&self, rhs: &Mat<K>) -> Mat<K> {
        assert_eq!(self.cols, rhs.rows);
        Mat::from_fn(self.rows, rhs.cols, |i, j| {
            let mut s = K::zero();
            for k in 0..self.cols {
                s = s + self.at(i, k).clone() * rhs.at(k, j).clone();
            }
            s
        })
    }

    pub fn mul_vec(&self, v: &[K]) -> Vec<K> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut s = K::zero();
                for k in 0..self.cols {
                    s = s + self.at(i, k).clone() * v[k].clone();
                }
                s
            })
            .collect()
    }

    /// Submatrix by explicit row/column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Mat<K> {
        Mat::from_fn(rows.len(), cols.len(), |i, j| {
            self.at(rows[i], cols[j]).clone()
        })
    }

    /// Determinant by Gaussian elimination with row pivoting.
    pub fn det(&self) -> K {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = K::one();
        for p in 0..n {
            let pivot = match (p..n).find(|&r| !a.at(r, p).is_zero()) {
                Some(r) => r,
                None => return K::zero(),
            };
            if pivot != p {
                a.swap_rows(p, pivot);
                det = -det;
            }
            let pv = a.at(p, p).clone();
            det = det * pv.clone();
            let pv_inv = pv.inv().expect("nonzero pivot");
            for r in p + 1..n {
                if a.at(r, p).is_zero() {
                    continue;
                }
                let factor = a.at(r, p).clone() * pv_inv.clone();
                for c in p..n {
                    let v = a.at(r, c).clone() - factor.clone() * a.at(p, c).clone();
                    *a.at_mut(r, c) = v;
                }
            }
        }
        det
    }

    /// Reduced row echelon form; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let pivot = match (row..self.rows).find(|&r| !self.at(r, col).is_zero()) {
                Some(r) => r,
                None => continue,
            };
            self.swap_rows(row, pivot);
            let inv = self.at(row, col).clone().inv().expect("nonzero pivot");
            for c in col..self.cols {
                let v = self.at(row, c).clone() * inv.clone();
                *self.at_mut(row, c) = v;
            }
            for r in 0..self.rows {
                if r == row || self.at(r, col).is_zero() {
                    continue;
                }
                let f = self.at(r, col).clone();
                for c in col..self.cols {
                    let v = self.at(r, c).clone() - f.clone() * self.at(row, c).clone();
                    *self.at_mut(r, c) = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        a.rref().len()
    }

    /// Basis for the right nullspace (kernel), one `Vec<K>` per basis vector.
    pub fn nullspace(&self) -> Vec<Vec<K>> {
        let mut a = self.clone();
        let pivots = a.rref();
        let mut basis = Vec::new();
        let mut pivot_of_col = vec![None; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            pivot_of_col[c] = Some(r);
        }
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![K::zero(); self.cols];
            v[free] = K::one();
            for (c, p) in pivot_of_col.iter().enumerate() {
                if let Some(r) = p {
                    v[c] = -a.at(*r, free).clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Mat<K>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Mat::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.at(i, j).clone()
            } else if j - n == i {
                K::one()
            } else {
                K::zero()
            }
        });
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| aug.at(i, n + j).clone()))
    }

    /// Solve `self * x = b`; `None` when inconsistent or underdetermined.
    pub fn solve(&self, b: &[K]) -> Option<Vec<K>> {
        assert_eq!(self.rows, b.len());
        let mut aug = Mat::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        if pivots.len() < self.cols {
            return None; // underdetermined
        }
        Some((0..self.cols).map(|i| aug.at(i, self.cols).clone()).collect())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            let ai = a * self.cols + c;
            let bi = b * self.cols + c;
            self.data.swap(ai, bi);
        }
    }
}
