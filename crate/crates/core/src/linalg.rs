//! Dense complex matrices, stored row-major.
//!
//! Only what the model needs: products, adjoints, a Cholesky inverse for the
//! small `K x K` Gram matrix, and trace/Frobenius helpers. Diagonal matrices
//! are kept as vectors and applied by scaling rows or columns.

use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Wraps row-major `data`; its length must be `rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                op: "ComplexMatrix::new",
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: alloc::vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Square matrix with `d` on the diagonal.
    pub fn from_diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `self * other`.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension {
                op: "matmul",
                expected: (self.cols, other.cols),
                found: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                for (d, &b) in dst.iter_mut().zip(other.row(l)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * other^H`, without forming the adjoint.
    pub fn mul_adjoint(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension {
                op: "mul_adjoint",
                expected: (other.rows, self.cols),
                found: other.shape(),
            });
        }
        Ok(Self::from_fn(self.rows, other.rows, |i, j| {
            self.row(i)
                .iter()
                .zip(other.row(j))
                .fold(ZERO, |acc, (&a, &b)| acc + a * b.conj())
        }))
    }

    /// Gram matrix `self * self^H`, filled from its upper triangle.
    pub fn gram(&self) -> ComplexMatrix {
        let n = self.rows;
        let mut g = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .fold(ZERO, |acc, (&a, &b)| acc + a * b.conj());
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
            g[(i, i)].im = 0.0;
        }
        g
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, c: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    /// `self * diag(d)`.
    pub fn scale_columns(&self, d: &[Complex64]) -> Result<ComplexMatrix> {
        if d.len() != self.cols {
            return Err(Error::Dimension {
                op: "scale_columns",
                expected: (self.cols, 1),
                found: (d.len(), 1),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[j]))
    }

    /// `diag(d) * self`.
    pub fn scale_rows(&self, d: &[Complex64]) -> Result<ComplexMatrix> {
        if d.len() != self.rows {
            return Err(Error::Dimension {
                op: "scale_rows",
                expected: (self.rows, 1),
                found: (d.len(), 1),
            });
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[i]))
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension {
                op: "sub",
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Sum of diagonal entries. Requires a square matrix.
    pub fn trace(&self) -> Result<Complex64> {
        if self.rows != self.cols {
            return Err(Error::Dimension {
                op: "trace",
                expected: (self.rows, self.rows),
                found: self.shape(),
            });
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    /// Squared Frobenius norm, `tr(A A^H)`.
    pub fn fro2(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Inverse of a Hermitian positive-definite matrix by Cholesky factorisation.
    ///
    /// Fails with [`Error::Singular`] when a pivot is not safely positive, which
    /// is how a rank-deficient channel estimate shows up.
    pub fn invert_hermitian_posdef(&self) -> Result<ComplexMatrix> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::Dimension {
                op: "invert_hermitian_posdef",
                expected: (n, n),
                found: self.shape(),
            });
        }
        let scale = self.data.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Singular("Gram matrix"));
        }
        for i in 0..n {
            for j in i..n {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > 1e-10 * scale {
                    return Err(Error::Parameter("matrix is not Hermitian"));
                }
            }
        }

        // lower factor L with G = L L^H
        let mut l = Self::zeros(n, n);
        let floor = scale * n as f64 * f64::EPSILON;
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for p in 0..j {
                d -= l[(j, p)].norm_sqr();
            }
            if !(d > floor) {
                return Err(Error::Singular("Gram matrix"));
            }
            let djj = libm::sqrt(d);
            l[(j, j)] = Complex64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for p in 0..j {
                    s -= l[(i, p)] * l[(j, p)].conj();
                }
                l[(i, j)] = s / djj;
            }
        }

        // L^{-1} by forward substitution, then G^{-1} = L^{-H} L^{-1}
        let mut linv = Self::zeros(n, n);
        for c in 0..n {
            for i in c..n {
                let mut s = if i == c { ONE } else { ZERO };
                for p in c..i {
                    s -= l[(i, p)] * linv[(p, c)];
                }
                linv[(i, c)] = s / l[(i, i)].re;
            }
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = ZERO;
                for p in j..n {
                    s += linv[(p, i)].conj() * linv[(p, j)];
                }
                inv[(i, j)] = s;
                inv[(j, i)] = s.conj();
            }
            inv[(i, i)].im = 0.0;
        }
        Ok(inv)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Returns `(tr(A), ||A||_F^2)`.
pub fn trace_frobenius(a: &ComplexMatrix) -> Result<(Complex64, f64)> {
    Ok((a.trace()?, a.fro2()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_product() {
        let a = ComplexMatrix::new(1, 1, alloc::vec![c(2.0, 1.0)]).unwrap();
        let b = ComplexMatrix::new(1, 1, alloc::vec![c(3.0, -1.0)]).unwrap();
        assert_eq!(a.matmul(&b).unwrap()[(0, 0)], c(7.0, 1.0));
    }

    #[test]
    fn dimension_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::Dimension { .. })));
        assert!(a.trace().is_err());
        assert!(ComplexMatrix::new(2, 2, alloc::vec![ONE]).is_err());
    }

    #[test]
    fn diagonal_inverse() {
        let g = ComplexMatrix::from_diagonal(&[c(2.0, 0.0), c(4.0, 0.0)]);
        let inv = g.invert_hermitian_posdef().unwrap();
        let want = ComplexMatrix::from_diagonal(&[c(0.5, 0.0), c(0.25, 0.0)]);
        assert!(inv.sub(&want).unwrap().fro2() < 1e-30);
        let i = ComplexMatrix::identity(3);
        assert_eq!(i.invert_hermitian_posdef().unwrap(), i);
    }

    #[test]
    fn singular_is_reported() {
        let g = ComplexMatrix::from_diagonal(&[ONE, ZERO]);
        assert!(matches!(g.invert_hermitian_posdef(), Err(Error::Singular(_))));
        let not_herm = ComplexMatrix::new(2, 2, alloc::vec![ONE, ONE, ZERO, ONE]).unwrap();
        assert!(matches!(not_herm.invert_hermitian_posdef(), Err(Error::Parameter(_))));
    }

    #[test]
    fn trace_and_norm() {
        let (t, f) = trace_frobenius(&ComplexMatrix::identity(5)).unwrap();
        assert_eq!((t, f), (c(5.0, 0.0), 5.0));
        let (t, f) = trace_frobenius(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!((t, f), (ZERO, 0.0));
    }
}
