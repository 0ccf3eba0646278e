//! Dense matrices over exact rationals.
//!
//! Shapes are explicit everywhere; a 0xN or Nx0 matrix is a legal value and
//! behaves correctly under multiplication and stacking. All eliminations use
//! the first non-zero pivot in column order, so results are deterministic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    d: Vec<Q>,
}

impl std::fmt::Debug for QMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "QMat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl QMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, d: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Q::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut m = QMat::zero(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                *m.at_mut(r, c) = f(r, c);
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        QMat::from_fn(r, c, |i, j| q(rows[i][j]))
    }

    pub fn at(&self, r: usize, c: usize) -> &Q {
        &self.d[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Q {
        &mut self.d[r * self.cols + c]
    }

    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> QMat {
        QMat::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn mul(&self, rhs: &QMat) -> QMat {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut out = QMat::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.at(k, c);
                    if !b.is_zero() {
                        *out.at_mut(r, c) += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMat::from_fn(self.rows, self.cols, |r, c| self.at(r, c) + rhs.at(r, c))
    }

    pub fn sub(&self, rhs: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMat::from_fn(self.rows, self.cols, |r, c| self.at(r, c) - rhs.at(r, c))
    }

    pub fn neg(&self) -> QMat {
        QMat::from_fn(self.rows, self.cols, |r, c| -self.at(r, c).clone())
    }

    pub fn scale(&self, s: &Q) -> QMat {
        QMat::from_fn(self.rows, self.cols, |r, c| self.at(r, c) * s)
    }

    /// [self | rhs] side by side.
    pub fn hstack(&self, rhs: &QMat) -> QMat {
        assert_eq!(self.rows, rhs.rows);
        QMat::from_fn(self.rows, self.cols + rhs.cols, |r, c| {
            if c < self.cols { self.at(r, c).clone() } else { rhs.at(r, c - self.cols).clone() }
        })
    }

    /// [self; rhs] on top of each other.
    pub fn vstack(&self, rhs: &QMat) -> QMat {
        assert_eq!(self.cols, rhs.cols);
        QMat::from_fn(self.rows + rhs.rows, self.cols, |r, c| {
            if r < self.rows { self.at(r, c).clone() } else { rhs.at(r - self.rows, c).clone() }
        })
    }

    /// Block diagonal [self 0; 0 rhs].
    pub fn block_diag(&self, rhs: &QMat) -> QMat {
        QMat::from_fn(self.rows + rhs.rows, self.cols + rhs.cols, |r, c| {
            if r < self.rows && c < self.cols {
                self.at(r, c).clone()
            } else if r >= self.rows && c >= self.cols {
                rhs.at(r - self.rows, c - self.cols).clone()
            } else {
                Q::zero()
            }
        })
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> QMat {
        QMat::from_fn(rows, cols, |r, c| self.at(r0 + r, c0 + c).clone())
    }

    pub fn col(&self, c: usize) -> QMat {
        self.submatrix(0, c, self.rows, 1)
    }

    /// Reduced row echelon form; returns the pivot columns.
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
            if p != row {
                for c in 0..self.cols {
                    let a = self.at(p, c).clone();
                    let b = self.at(row, c).clone();
                    *self.at_mut(p, c) = b;
                    *self.at_mut(row, c) = a;
                }
            }
            let inv = self.at(row, col).clone().recip();
            for c in 0..self.cols {
                let v = self.at(row, c) * &inv;
                *self.at_mut(row, c) = v;
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero() {
                    let f = self.at(r, col).clone();
                    for c in 0..self.cols {
                        let v = self.at(r, c) - &(self.at(row, c) * &f);
                        *self.at_mut(r, c) = v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel, as columns of the returned matrix.
    /// Deterministic: free columns in increasing order, pivot entries filled
    /// from the reduced echelon form.
    pub fn nullspace(&self) -> QMat {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = QMat::zero(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            *out.at_mut(fc, k) = Q::one();
            for (prow, &pc) in pivots.iter().enumerate() {
                *out.at_mut(pc, k) = -m.at(prow, fc).clone();
            }
        }
        out
    }

    /// One solution x of self * x = b (columns of b solved independently),
    /// or None if any column is inconsistent.
    pub fn solve(&self, b: &QMat) -> Option<QMat> {
        assert_eq!(self.rows, b.rows);
        let mut aug = self.hstack(b);
        let pivots = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = QMat::zero(self.cols, b.cols);
        for (prow, &pc) in pivots.iter().enumerate() {
            for c in 0..b.cols {
                *x.at_mut(pc, c) = aug.at(prow, self.cols + c).clone();
            }
        }
        Some(x)
    }

    /// Writes the columns of `v` in terms of the columns of `basis`,
    /// returning the coefficient matrix, or None if not in the span.
    pub fn in_span(basis: &QMat, v: &QMat) -> Option<QMat> {
        basis.solve(v)
    }
}

/// Flattens a matrix into a single column, row-major.
pub fn vec_of(m: &QMat) -> QMat {
    QMat::from_fn(m.rows * m.cols, 1, |r, _| m.at(r / m.cols, r % m.cols).clone())
}

/// Inverse of `vec_of` for known shape.
pub fn mat_of(v: &QMat, rows: usize, cols: usize) -> QMat {
    assert_eq!(v.rows, rows * cols);
    assert_eq!(v.cols, 1);
    QMat::from_fn(rows, cols, |r, c| v.at(r * cols + c, 0).clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_nullspace() {
        let m = QMat::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.cols, 1);
        assert!(m.mul(&ns).is_zero());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = QMat::from_i64(&[&[1, 1], &[0, 1]]);
        let b = QMat::from_i64(&[&[3], &[1]]);
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul(&x), b);

        let a2 = QMat::from_i64(&[&[1, 1], &[2, 2]]);
        let b2 = QMat::from_i64(&[&[1], &[3]]);
        assert!(a2.solve(&b2).is_none());
    }

    #[test]
    fn empty_shapes() {
        let a = QMat::zero(0, 3);
        let b = QMat::zero(3, 2);
        let c = a.mul(&b);
        assert_eq!((c.rows, c.cols), (0, 2));
        assert_eq!(QMat::zero(2, 0).rank(), 0);
        assert_eq!(QMat::zero(0, 4).nullspace().cols, 4);
    }

    #[test]
    fn vec_mat_roundtrip() {
        let m = QMat::from_i64(&[&[1, 2], &[3, 4], &[5, 6]]);
        assert_eq!(mat_of(&vec_of(&m), 3, 2), m);
    }
}
