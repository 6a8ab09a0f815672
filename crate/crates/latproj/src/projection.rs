//! Projections of a lattice onto the orthogonal complement of a primitive
//! set of lattice vectors, plus the exact machinery those projections need:
//! completing a primitive set to a basis and checking the projection's
//! determinant and duality identities.

use crate::error::{Error, Result};
use crate::lattice::{primitive_check, Lattice};
use crate::matrix::{inverse_triangular, rq_factorize, IntMatrix, RealMatrix};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Upper-triangular form of a full-dimensional lattice generator:
/// G = [[g1, g2], [0, g3]] * q with g1 (k x k) and g3 ((n-k) x (n-k)) upper
/// triangular with positive diagonals and q orthogonal. `q` maps results
/// computed in the triangular frame back to the original coordinates
/// (rows transform as v = v_triangular * q).
#[derive(Debug, Clone)]
pub struct TriangularSplit {
    pub g1: RealMatrix,
    pub g2: RealMatrix,
    pub g3: RealMatrix,
    pub q: RealMatrix,
    k: usize,
    n: usize,
}

impl TriangularSplit {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Reassembles the upper-triangular generator [[g1, g2], [0, g3]].
    pub fn r(&self) -> RealMatrix {
        let top = self.g1.hstack(&self.g2);
        let bottom = RealMatrix::zeros(self.n - self.k, self.k).hstack(&self.g3);
        top.vstack(&bottom)
    }
}

/// RQ-factorizes the generator of a full-dimensional lattice and cuts the
/// triangular factor into the k / n-k blocks.
pub fn triangular_split(lattice: &Lattice, k: usize) -> Result<TriangularSplit> {
    if !lattice.is_full_dimensional() {
        return Err(Error::DimensionMismatch(
            "triangular split needs a full-dimensional lattice".into(),
        ));
    }
    let n = lattice.dim();
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!(
            "split index k={} must satisfy 1 <= k <= {}",
            k,
            n - 1
        )));
    }
    let rq = rq_factorize(lattice.generator())?;
    Ok(TriangularSplit {
        g1: rq.r.block(0, k, 0, k),
        g2: rq.r.block(0, k, k, n),
        g3: rq.r.block(k, n, k, n),
        q: rq.q,
        k,
        n,
    })
}

/// Extends a primitive k x m integer coefficient matrix to a unimodular
/// m x m matrix and returns the added rows U, so that stacking [A; U] has
/// determinant +-1. Exact integer column reduction: A is brought to
/// [I_k | 0] by elementary column operations while the inverse operations
/// accumulate on an identity; the completion is read off the accumulated
/// inverse.
pub fn complete_to_basis(a: &IntMatrix) -> Result<IntMatrix> {
    let k = a.rows();
    let m = a.cols();
    if k >= m {
        return Err(Error::DimensionMismatch(format!(
            "cannot extend {} rows inside rank {}",
            k, m
        )));
    }
    let mut work = a.clone();
    let mut cinv = IntMatrix::identity(m);

    // column op: col_dst += t * col_src on work; inverse row op on cinv
    let add_col = |work: &mut IntMatrix, cinv: &mut IntMatrix, src: usize, dst: usize, t: &num_bigint::BigInt| {
        for r in 0..k {
            let v = work.get(r, dst) + t * work.get(r, src);
            work.set(r, dst, v);
        }
        for c in 0..m {
            let v = cinv.get(src, c) - t * cinv.get(dst, c);
            cinv.set(src, c, v);
        }
    };
    let swap_cols = |work: &mut IntMatrix, cinv: &mut IntMatrix, i: usize, j: usize| {
        for r in 0..k {
            let vi = work.get(r, i).clone();
            let vj = work.get(r, j).clone();
            work.set(r, i, vj);
            work.set(r, j, vi);
        }
        for c in 0..m {
            let vi = cinv.get(i, c).clone();
            let vj = cinv.get(j, c).clone();
            cinv.set(i, c, vj);
            cinv.set(j, c, vi);
        }
    };
    let negate_col = |work: &mut IntMatrix, cinv: &mut IntMatrix, i: usize| {
        for r in 0..k {
            let v = -work.get(r, i);
            work.set(r, i, v);
        }
        for c in 0..m {
            let v = -cinv.get(i, c);
            cinv.set(i, c, v);
        }
    };

    // Euclidean column reduction to [H | 0], H lower triangular
    for r in 0..k {
        loop {
            // smallest nonzero entry in row r among columns r..m
            let mut piv: Option<usize> = None;
            for c in r..m {
                if !work.get(r, c).is_zero()
                    && piv.is_none_or(|p| work.get(r, c).abs() < work.get(r, p).abs())
                {
                    piv = Some(c);
                }
            }
            let piv = match piv {
                Some(p) => p,
                None => return Err(Error::NotPrimitive(num_bigint::BigInt::zero())),
            };
            if piv != r {
                swap_cols(&mut work, &mut cinv, r, piv);
            }
            let mut done = true;
            for c in r + 1..m {
                if work.get(r, c).is_zero() {
                    continue;
                }
                let q = work.get(r, c).div_floor(work.get(r, r));
                if !q.is_zero() {
                    add_col(&mut work, &mut cinv, r, c, &(-q));
                }
                if !work.get(r, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
    }
    // primitivity shows up as a unit diagonal; anything else is the minor gcd
    let mut diag_gcd = num_bigint::BigInt::one();
    for r in 0..k {
        diag_gcd *= work.get(r, r).abs();
    }
    if !diag_gcd.is_one() {
        return Err(Error::NotPrimitive(diag_gcd));
    }
    for r in 0..k {
        if work.get(r, r).is_negative() {
            negate_col(&mut work, &mut cinv, r);
        }
    }
    // clear the below-diagonal part of H
    for r in 1..k {
        for c in 0..r {
            let t = -work.get(r, c);
            if !t.is_zero() {
                add_col(&mut work, &mut cinv, r, c, &t);
            }
        }
    }
    // now work == [I_k | 0] and A equals the first k rows of cinv
    debug_assert!({
        let mut ok = true;
        for r in 0..k {
            for c in 0..m {
                let expect = if r == c {
                    num_bigint::BigInt::one()
                } else {
                    num_bigint::BigInt::zero()
                };
                ok &= *work.get(r, c) == expect;
                ok &= *cinv.get(r, c) == *a.get(r, c);
            }
        }
        ok
    });
    let mut u = IntMatrix::zeros(m - k, m);
    for r in k..m {
        for c in 0..m {
            u.set(r - k, c, cinv.get(r, c).clone());
        }
    }
    Ok(u)
}

/// A projection of `lattice` onto the orthogonal complement of the span of
/// the primitive rows `v`, together with the exact data that certifies it.
#[derive(Debug, Clone)]
pub struct ProjectionSpec {
    /// The primitive vectors being projected out (k x n).
    pub v: RealMatrix,
    /// Exact integer coordinates of `v` in the lattice basis (k x m).
    pub a_coeff: IntMatrix,
    /// Basis completion used to generate the projection ((m-k) x m).
    pub u: IntMatrix,
    /// Orthogonal projector onto span(v)^perp (n x n).
    pub p: RealMatrix,
    /// The projected lattice, rank m-k in the original ambient space.
    pub projected: Lattice,
}

/// Projects `lattice` onto span(vs)^perp. `vs` must be a primitive set of
/// lattice vectors and `u` must complete its coefficient matrix to a basis;
/// the projected lattice is generated by the images of the completion.
pub fn project(lattice: &Lattice, vs: &RealMatrix, u: &IntMatrix) -> Result<ProjectionSpec> {
    let k = vs.rows();
    let m = lattice.dim();
    if vs.cols() != lattice.ambient_dim() {
        return Err(Error::DimensionMismatch(
            "vectors do not live in the lattice's ambient space".into(),
        ));
    }
    if k == 0 || k >= m {
        return Err(Error::InvalidInput(format!(
            "projection rank k={} must satisfy 1 <= k <= {}",
            k,
            m.saturating_sub(1)
        )));
    }
    if u.rows() != m - k || u.cols() != m {
        return Err(Error::DimensionMismatch(format!(
            "extension must be {}x{}, got {}x{}",
            m - k,
            m,
            u.rows(),
            u.cols()
        )));
    }
    let cert = primitive_check(lattice, vs)?;
    if !cert.is_primitive() {
        return Err(Error::NotPrimitive(cert.minor_gcd));
    }
    let stacked = cert.coefficient_matrix.vstack(u);
    let det = stacked.det();
    if !det.abs().is_one() {
        return Err(Error::BadExtension(det));
    }
    // P = I - V^T (V V^T)^{-1} V
    let vvt = vs.gram();
    let x = vvt.solve(vs)?; // (V V^T)^{-1} V
    let p = RealMatrix::identity(vs.cols()).sub(&vs.transpose().mul(&x));
    let gv = u.to_real().mul(lattice.generator()).mul(&p);
    let projected = Lattice::new(gv)?;
    Ok(ProjectionSpec {
        v: vs.clone(),
        a_coeff: cert.coefficient_matrix,
        u: u.clone(),
        p,
        projected,
    })
}

/// Both sides of the projection determinant identity: the projected
/// lattice's determinant on the left, det(lattice) / det(V V^T) on the
/// right. They agree for any valid projection.
pub fn discriminant_identity(lattice: &Lattice, spec: &ProjectionSpec) -> (f64, f64) {
    let lhs = spec.projected.det();
    let rhs = lattice.det() / spec.v.gram().det();
    (lhs, rhs)
}

/// Generator of the dual of the projected lattice, written directly from
/// the triangular split and the integer block a_hat (k x (n-k)) that fixes
/// V = [g1 | g2 + a_hat * g3]:
///
///   M = [ -g3^{-T} vhat^T g1^{-T} | g3^{-T} ],  vhat = g2 + a_hat * g3.
///
/// The rows of M live in span(V)^perp (triangular frame) and pair
/// integrally with the lattice.
pub fn dual_projection_lattice(split: &TriangularSplit, a_hat: &IntMatrix) -> Result<Lattice> {
    let k = split.k();
    let n = split.n();
    if a_hat.rows() != k || a_hat.cols() != n - k {
        return Err(Error::DimensionMismatch(format!(
            "a_hat must be {}x{}, got {}x{}",
            k,
            n - k,
            a_hat.rows(),
            a_hat.cols()
        )));
    }
    let g1_inv_t = inverse_triangular(&split.g1)?.transpose();
    let g3_inv_t = inverse_triangular(&split.g3)?.transpose();
    let vhat = split.g2.add(&a_hat.to_real().mul(&split.g3));
    let left = g3_inv_t.mul(&vhat.transpose()).mul(&g1_inv_t).scale(-1.0);
    Lattice::new(left.hstack(&g3_inv_t))
}

/// Outcome of checking that the directly-written dual generator and the
/// project-then-dualize route produce the same lattice.
#[derive(Debug, Clone)]
pub struct DualityReport {
    pub lattices_equal: bool,
    /// det of the direct dual construction.
    pub det_direct: f64,
    /// det(V V^T) / det(lattice): what the dual determinant must equal.
    pub det_expected: f64,
    /// max |<m_i, v_j>| over rows of the direct dual and rows of V.
    pub orthogonality_error: f64,
}

impl DualityReport {
    pub fn passes(&self, tol: f64) -> bool {
        let rel = (self.det_direct - self.det_expected).abs()
            / self.det_expected.abs().max(1.0);
        self.lattices_equal && rel <= tol && self.orthogonality_error <= tol
    }
}

/// Cross-checks the two routes to the dual of a projection for a
/// full-dimensional lattice in upper-triangular form: the direct generator
/// from `dual_projection_lattice` against projecting out
/// V = [g1 | g2 + a_hat * g3] and dualizing the result.
pub fn duality_crosscheck(lattice: &Lattice, a_hat: &IntMatrix) -> Result<DualityReport> {
    let k = a_hat.rows();
    let split = triangular_split(lattice, k)?;
    if !split.q.approx_eq(&RealMatrix::identity(split.n()), 1e-9) {
        return Err(Error::InvalidInput(
            "duality crosscheck expects an upper-triangular generator".into(),
        ));
    }
    let direct = dual_projection_lattice(&split, a_hat)?;

    let vhat = split.g2.add(&a_hat.to_real().mul(&split.g3));
    let v = split.g1.hstack(&vhat);
    let a_coeff = IntMatrix::identity(k).hstack(a_hat);
    let u = complete_to_basis(&a_coeff)?;
    let spec = project(lattice, &v, &u)?;
    let via_projection = spec.projected.dual()?;

    let lattices_equal = direct.sublattice_equal(&via_projection)?;
    let det_expected = v.gram().det() / lattice.det();
    let pairing = direct.generator().mul(&v.transpose());
    Ok(DualityReport {
        lattices_equal,
        det_direct: direct.det(),
        det_expected,
        orthogonality_error: pairing.max_norm(),
    })
}
