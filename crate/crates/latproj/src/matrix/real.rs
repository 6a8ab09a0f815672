use crate::error::{Error, Result};
use crate::matrix::{IntMatrix, PIVOT_REL};
use num_bigint::BigInt;
use num_traits::FromPrimitive;

/// Row-major dense matrix over f64. Constructors reject non-finite entries;
/// all downstream code may assume finiteness.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        RealMatrix::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RealMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<f64> {
        self.row(i).to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = RealMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, rhs: &RealMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = RealMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a == 0.0 {
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

    pub fn add(&self, rhs: &RealMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, rhs: &RealMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        RealMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// G * G^T.
    pub fn gram(&self) -> Self {
        self.mul(&self.transpose())
    }

    /// Entrywise infinity norm, max |a_ij|.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn hstack(&self, rhs: &RealMatrix) -> Self {
        assert_eq!(self.rows, rhs.rows);
        let mut out = RealMatrix::zeros(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..rhs.cols {
                out.set(i, self.cols + j, rhs.get(i, j));
            }
        }
        out
    }

    pub fn vstack(&self, rhs: &RealMatrix) -> Self {
        assert_eq!(self.cols, rhs.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        RealMatrix {
            rows: self.rows + rhs.rows,
            cols: self.cols,
            data,
        }
    }

    /// Submatrix with rows r0..r1 and columns c0..c1 (half-open).
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        assert!(r0 < r1 && r1 <= self.rows && c0 < c1 && c1 <= self.cols);
        let mut out = RealMatrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out.set(i - r0, j - c0, self.get(i, j));
            }
        }
        out
    }

    pub fn approx_eq(&self, rhs: &RealMatrix, tol: f64) -> bool {
        self.rows == rhs.rows && self.cols == rhs.cols && self.sub(rhs).max_norm() <= tol
    }

    /// Determinant by LU with partial pivoting. Square only.
    pub fn det(&self) -> f64 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].abs();
            for r in col + 1..n {
                let v = a[r * n + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return 0.0;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
            }
        }
        det
    }

    /// Solves A X = B with partial pivoting; A must be square and
    /// well-conditioned relative to the pivot threshold.
    pub fn solve(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        assert!(self.is_square(), "solve needs a square matrix");
        assert_eq!(self.rows, rhs.rows, "solve shape mismatch");
        let n = self.rows;
        let m = rhs.cols;
        let mut a = self.data.clone();
        let mut b = rhs.data.clone();
        let scale = self.max_norm().max(1.0);
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].abs();
            for r in col + 1..n {
                let v = a[r * n + col].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best <= PIVOT_REL * scale {
                return Err(Error::SingularSystem(format!(
                    "pivot {:e} below threshold at column {}",
                    best, col
                )));
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                for j in 0..m {
                    b.swap(col * m + j, piv * m + j);
                }
            }
            let p = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
                for j in 0..m {
                    b[r * m + j] -= f * b[col * m + j];
                }
            }
        }
        // back substitution
        let mut x = vec![0.0; n * m];
        for j in 0..m {
            for i in (0..n).rev() {
                let mut s = b[i * m + j];
                for l in i + 1..n {
                    s -= a[i * n + l] * x[l * m + j];
                }
                x[i * m + j] = s / a[i * n + i];
            }
        }
        RealMatrix::new(n, m, x)
    }

    pub fn inverse(&self) -> Result<RealMatrix> {
        self.solve(&RealMatrix::identity(self.rows))
    }

    /// Numerical row rank via Gram-Schmidt with a relative pivot threshold.
    pub fn row_rank(&self) -> usize {
        let scale = self.max_norm().max(1.0);
        let tol = PIVOT_REL * scale;
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for i in 0..self.rows {
            let mut v = self.row_vec(i);
            for b in &basis {
                let nb: f64 = b.iter().map(|x| x * x).sum();
                let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                let c = d / nb;
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > tol {
                basis.push(v);
            }
        }
        basis.len()
    }
}

/// Entrywise floor into exact integers. Finite f64 floors are exactly
/// representable, so the conversion is lossless.
pub fn floor_entrywise(m: &RealMatrix) -> IntMatrix {
    let mut out = IntMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let f = m.get(i, j).floor();
            out.set(i, j, BigInt::from_f64(f).expect("finite floor"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constructor_rejects_nan_and_shape_mismatch() {
        assert!(matches!(
            RealMatrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFiniteEntry)
        ));
        assert!(matches!(
            RealMatrix::new(1, 2, vec![1.0, f64::INFINITY]),
            Err(Error::NonFiniteEntry)
        ));
        assert!(RealMatrix::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn product_and_transpose_agree_with_hand_values() {
        let a = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = RealMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let ab = a.mul(&b);
        assert_eq!(ab.to_rows(), vec![vec![2.0, 1.0], vec![4.0, 3.0]]);
        assert_eq!(a.transpose().get(0, 1), 3.0);
    }

    #[test]
    fn det_matches_cofactor_expansion_on_3x3() {
        let a = RealMatrix::from_rows(&[
            vec![2.0, 0.0, 1.0],
            vec![1.0, 3.0, -1.0],
            vec![0.0, 1.0, 4.0],
        ])
        .unwrap();
        // cofactor expansion by hand: 2*(12+1) - 0 + 1*(1-0) = 27
        assert!((a.det() - 27.0).abs() < 1e-12);
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = RealMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = RealMatrix::from_rows(&[vec![1.0], vec![-2.0]]).unwrap();
        let b = a.mul(&x);
        let got = a.solve(&b).unwrap();
        assert!(got.approx_eq(&x, 1e-12));
    }

    #[test]
    fn solve_rejects_singular() {
        let a = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let b = RealMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        assert!(matches!(a.solve(&b), Err(Error::SingularSystem(_))));
    }

    #[test]
    fn floor_entrywise_handles_negatives_and_integers() {
        let m = RealMatrix::from_rows(&[vec![1.9, -0.1], vec![-3.0, 2.0]]).unwrap();
        let f = floor_entrywise(&m);
        assert_eq!(f.get_i64(0, 0), 1);
        assert_eq!(f.get_i64(0, 1), -1);
        assert_eq!(f.get_i64(1, 0), -3);
        assert_eq!(f.get_i64(1, 1), 2);
    }

    #[test]
    fn row_rank_detects_dependence() {
        let m = RealMatrix::from_rows(&[
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
            vec![1.0, 1.0, 2.0],
        ])
        .unwrap();
        assert_eq!(m.row_rank(), 2);
        assert_eq!(RealMatrix::identity(3).row_rank(), 3);
    }

    proptest! {
        #[test]
        fn floor_is_idempotent_on_integer_matrices(vals in proptest::collection::vec(-1000i64..1000, 6)) {
            let m = RealMatrix::new(2, 3, vals.iter().map(|&v| v as f64).collect()).unwrap();
            let f = floor_entrywise(&m);
            prop_assert!(f.to_real().approx_eq(&m, 0.0));
            let again = floor_entrywise(&f.to_real());
            prop_assert_eq!(f, again);
        }

        #[test]
        fn solve_then_multiply_roundtrips(seed in proptest::collection::vec(-5.0f64..5.0, 9),
                                          rhs in proptest::collection::vec(-5.0f64..5.0, 3)) {
            let mut a = RealMatrix::new(3, 3, seed).unwrap();
            for i in 0..3 { a.set(i, i, a.get(i, i) + 10.0); } // diagonally dominant
            let b = RealMatrix::new(3, 1, rhs).unwrap();
            let x = a.solve(&b).unwrap();
            prop_assert!(a.mul(&x).approx_eq(&b, 1e-8));
        }
    }
}
