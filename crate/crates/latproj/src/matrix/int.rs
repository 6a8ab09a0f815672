use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Dense matrix over arbitrary-precision integers. Used wherever exactness
/// matters: coefficient matrices, unimodular transforms, minor gcds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} integer matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&v| BigInt::from(v)).collect();
        IntMatrix::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn get_i64(&self, i: usize, j: usize) -> i64 {
        self.get(i, j).to_i64().expect("entry fits in i64")
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row_vec(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn neg(&self) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "integer matrix product shape mismatch");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(l, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn hstack(&self, rhs: &IntMatrix) -> Self {
        assert_eq!(self.rows, rhs.rows);
        let mut out = IntMatrix::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..rhs.cols {
                out.set(i, self.cols + j, rhs.get(i, j).clone());
            }
        }
        out
    }

    pub fn vstack(&self, rhs: &IntMatrix) -> Self {
        assert_eq!(self.cols, rhs.cols);
        let mut data = self.data.clone();
        data.extend(rhs.data.iter().cloned());
        IntMatrix {
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        }
    }

    /// Columns `keep` in order, as a new matrix.
    pub fn select_columns(&self, keep: &[usize]) -> Self {
        let mut out = IntMatrix::zeros(self.rows, keep.len());
        for i in 0..self.rows {
            for (jj, &j) in keep.iter().enumerate() {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn to_real(&self) -> RealMatrix {
        let data: Vec<f64> = self
            .data
            .iter()
            .map(|v| v.to_f64().expect("finite conversion"))
            .collect();
        RealMatrix::new(self.rows, self.cols, data).expect("finite integer matrix")
    }

    /// Exact determinant via Bareiss fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.rows == self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 1 {
            return self.get(0, 0).clone();
        }
        let mut a: Vec<BigInt> = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for col in 0..n - 1 {
            if a[col * n + col].is_zero() {
                // find a row to swap in
                let mut piv = None;
                for r in col + 1..n {
                    if !a[r * n + col].is_zero() {
                        piv = Some(r);
                        break;
                    }
                }
                match piv {
                    Some(r) => {
                        for j in 0..n {
                            a.swap(col * n + j, r * n + j);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for r in col + 1..n {
                for j in col + 1..n {
                    let num = &a[r * n + j] * &a[col * n + col]
                        - &a[r * n + col] * &a[col * n + j];
                    a[r * n + j] = &num / &prev; // exact by Bareiss
                }
                a[r * n + col] = BigInt::zero();
            }
            prev = a[col * n + col].clone();
        }
        sign * a[n * n - 1].clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }

    /// Solves L X = B exactly where L is lower triangular with unit
    /// diagonal; forward substitution needs no division.
    pub fn solve_unit_lower(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        let n = self.rows;
        if self.cols != n || rhs.rows != n {
            return Err(Error::DimensionMismatch(
                "unit-lower solve shape mismatch".into(),
            ));
        }
        for i in 0..n {
            if !self.get(i, i).is_one() {
                return Err(Error::NotTriangular);
            }
            for j in i + 1..n {
                if !self.get(i, j).is_zero() {
                    return Err(Error::NotTriangular);
                }
            }
        }
        let mut x = IntMatrix::zeros(n, rhs.cols);
        for j in 0..rhs.cols {
            for i in 0..n {
                let mut s = rhs.get(i, j).clone();
                for l in 0..i {
                    s -= self.get(i, l) * x.get(l, j);
                }
                x.set(i, j, s);
            }
        }
        Ok(x)
    }
}
