use crate::error::{Error, Result};
use crate::matrix::{RealMatrix, PIVOT_REL};

/// G = R * Q with R upper triangular (strictly positive diagonal) and Q
/// orthogonal.
#[derive(Debug, Clone)]
pub struct RqResult {
    pub r: RealMatrix,
    pub q: RealMatrix,
}

/// RQ factorization of a square matrix: Gram-Schmidt on the rows starting
/// from the last one. Sign flips are absorbed into Q so that diag(R) > 0.
pub fn rq_factorize(g: &RealMatrix) -> Result<RqResult> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch(
            "rq factorization needs a square matrix".into(),
        ));
    }
    let n = g.rows();
    let tol = PIVOT_REL * g.max_norm().max(1.0);
    let mut q = RealMatrix::zeros(n, n);
    let mut r = RealMatrix::zeros(n, n);
    for i in (0..n).rev() {
        let mut u = g.row_vec(i);
        for j in i + 1..n {
            let c: f64 = g.row(i).iter().zip(q.row(j)).map(|(a, b)| a * b).sum();
            r.set(i, j, c);
            for (x, y) in u.iter_mut().zip(q.row(j)) {
                *x -= c * y;
            }
        }
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= tol {
            return Err(Error::SingularMatrix(format!(
                "row {} is dependent on the rows below it",
                i
            )));
        }
        r.set(i, i, norm);
        for (j, x) in u.iter().enumerate() {
            q.set(i, j, x / norm);
        }
    }
    Ok(RqResult { r, q })
}

/// G = L * Q with L lower triangular m x m (strictly positive diagonal) and
/// Q having orthonormal rows; plain row Gram-Schmidt from the first row.
/// Requires full row rank, m <= n.
pub fn lq_factorize(g: &RealMatrix) -> Result<(RealMatrix, RealMatrix)> {
    let m = g.rows();
    let n = g.cols();
    if m > n {
        return Err(Error::DimensionMismatch(
            "lq factorization needs rows <= cols".into(),
        ));
    }
    let tol = PIVOT_REL * g.max_norm().max(1.0);
    let mut q = RealMatrix::zeros(m, n);
    let mut l = RealMatrix::zeros(m, m);
    for i in 0..m {
        let mut u = g.row_vec(i);
        for j in 0..i {
            let c: f64 = g.row(i).iter().zip(q.row(j)).map(|(a, b)| a * b).sum();
            l.set(i, j, c);
            for (x, y) in u.iter_mut().zip(q.row(j)) {
                *x -= c * y;
            }
        }
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= tol {
            return Err(Error::SingularMatrix(format!(
                "row {} is dependent on the rows above it",
                i
            )));
        }
        l.set(i, i, norm);
        for (j, x) in u.iter().enumerate() {
            q.set(i, j, x / norm);
        }
    }
    Ok((l, q))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Orientation {
    Upper,
    Lower,
}

fn orientation(t: &RealMatrix) -> Result<Orientation> {
    let tol = PIVOT_REL * t.max_norm().max(1.0);
    let mut below = 0.0f64;
    let mut above = 0.0f64;
    for i in 0..t.rows() {
        for j in 0..t.cols() {
            if i > j {
                below = below.max(t.get(i, j).abs());
            } else if i < j {
                above = above.max(t.get(i, j).abs());
            }
        }
    }
    if below <= tol {
        Ok(Orientation::Upper)
    } else if above <= tol {
        Ok(Orientation::Lower)
    } else {
        Err(Error::NotTriangular)
    }
}

/// Inverse of a triangular matrix by substitution; the result has the same
/// orientation as the input.
pub fn inverse_triangular(t: &RealMatrix) -> Result<RealMatrix> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch(
            "triangular inverse needs a square matrix".into(),
        ));
    }
    let n = t.rows();
    let tol = PIVOT_REL * t.max_norm().max(1.0);
    for i in 0..n {
        if t.get(i, i).abs() <= tol {
            return Err(Error::SingularMatrix(format!(
                "zero diagonal entry at {}",
                i
            )));
        }
    }
    let orient = orientation(t)?;
    let mut inv = RealMatrix::zeros(n, n);
    match orient {
        Orientation::Upper => {
            // solve T x_col = e_col, back substitution; x stays upper.
            for col in 0..n {
                for i in (0..=col).rev() {
                    let mut s = if i == col { 1.0 } else { 0.0 };
                    for l in i + 1..=col {
                        s -= t.get(i, l) * inv.get(l, col);
                    }
                    inv.set(i, col, s / t.get(i, i));
                }
            }
        }
        Orientation::Lower => {
            for col in 0..n {
                for i in col..n {
                    let mut s = if i == col { 1.0 } else { 0.0 };
                    for l in col..i {
                        s -= t.get(i, l) * inv.get(l, col);
                    }
                    inv.set(i, col, s / t.get(i, i));
                }
            }
        }
    }
    Ok(inv)
}

/// det([V; W] [V; W]^T) computed blockwise as
/// det(V V^T) * det(W W^T - W V^T (V V^T)^{-1} V W^T).
pub fn block_det_gram(v: &RealMatrix, w: &RealMatrix) -> Result<f64> {
    if v.cols() != w.cols() {
        return Err(Error::DimensionMismatch(
            "block rows must share the ambient dimension".into(),
        ));
    }
    let vvt = v.gram();
    let det_vvt = vvt.det();
    let wvt = w.mul(&v.transpose());
    // (V V^T)^{-1} V W^T via a solve
    let x = vvt.solve(&wvt.transpose())?;
    let schur = w.gram().sub(&wvt.mul(&x));
    Ok(det_vvt * schur.det())
}
