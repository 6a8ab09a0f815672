//! Searches for a primitive set V in a full-dimensional source lattice such
//! that projecting the source onto span(V)^perp approximates a prescribed
//! lower-dimensional target lattice, up to similarity, with error O(1/w) in
//! the dual Gram as the integer refinement parameter w grows.
//!
//! The construction works on the dual side: the target's dual is put into
//! lower-triangular form L*, extended by zero columns, and a floored integer
//! perturbation of w * [L* | 0] is assembled that generates exactly the dual
//! of a projection of the source. The integer block that makes this work is
//! recovered exactly and determines V.

use crate::error::{Error, Result};
use crate::lattice::{primitive_check, Lattice};
use crate::matrix::{floor_entrywise, inverse_triangular, lq_factorize, IntMatrix, RealMatrix};
use crate::projection::{triangular_split, TriangularSplit};
use num_traits::{One, Signed};

/// Target lattice in the canonical dual-side form used by the construction:
/// `l_star` is the lower-triangular generator of the target's dual, and
/// `l_bar_1` / `l_bar_2` re-partition [l_star | 0] after the k-th column.
#[derive(Debug, Clone)]
pub struct TargetSpec {
    pub l_star: RealMatrix,
    pub l_bar_1: RealMatrix,
    pub l_bar_2: RealMatrix,
    k: usize,
    n: usize,
    pub warnings: Vec<String>,
}

impl TargetSpec {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Gram matrix of the target's dual in canonical form, L* L*^T.
    pub fn dual_gram(&self) -> RealMatrix {
        self.l_star.gram()
    }
}

/// Canonicalizes a target of rank n-k for use inside an n-dimensional
/// source: dualizes, lower-triangularizes the dual generator (LQ with
/// positive diagonal), and builds the [l_star | 0] partitions.
pub fn make_target(target: &Lattice, k: usize, n: usize) -> Result<TargetSpec> {
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!(
            "k={} must satisfy 1 <= k <= {}",
            k,
            n.saturating_sub(1)
        )));
    }
    if target.dim() != n - k {
        return Err(Error::DimensionMismatch(format!(
            "target rank {} does not equal n-k = {}",
            target.dim(),
            n - k
        )));
    }
    let dual = target.dual()?;
    let (l_star, _q) = lq_factorize(dual.generator())?;
    let m = n - k;
    let l_bar = l_star.hstack(&RealMatrix::zeros(m, k));
    let l_bar_1 = l_bar.block(0, m, 0, k);
    let l_bar_2 = l_bar.block(0, m, k, n);

    let mut warnings = Vec::new();
    if let Ok(inv) = inverse_triangular(&l_star) {
        let cond_est = l_star.max_norm() * inv.max_norm() * m as f64;
        if cond_est > 1e8 {
            warnings.push(format!(
                "target canonical form is ill-conditioned (estimate {:.2e}); \
                 floors may be unstable",
                cond_est
            ));
        }
    }
    Ok(TargetSpec {
        l_star,
        l_bar_1,
        l_bar_2,
        k,
        n,
        warnings,
    })
}

fn check_shapes(target: &TargetSpec, split: &TriangularSplit) -> Result<()> {
    if target.k() != split.k() || target.n() != split.n() {
        return Err(Error::DimensionMismatch(format!(
            "target partition ({}, {}) does not match split ({}, {})",
            target.k(),
            target.n(),
            split.k(),
            split.n()
        )));
    }
    Ok(())
}

/// The unimodular correction H_w = floor(w * l_bar_2 * g3^T) + I. The
/// floored product is strictly lower triangular by construction, so H_w is
/// unit lower triangular and has determinant one exactly.
pub fn build_hw(target: &TargetSpec, split: &TriangularSplit, w: u64) -> Result<IntMatrix> {
    check_shapes(target, split)?;
    if w == 0 {
        return Err(Error::InvalidInput("w must be at least 1".into()));
    }
    let product = target.l_bar_2.scale(w as f64).mul(&split.g3.transpose());
    let mut h = floor_entrywise(&product);
    let m = h.rows();
    for i in 0..m {
        let v = h.get(i, i) + num_bigint::BigInt::one();
        h.set(i, i, v);
    }
    for i in 0..m {
        debug_assert!(h.get(i, i).is_one(), "H_w diagonal must stay unit");
        for j in i + 1..m {
            debug_assert!(
                num_traits::Zero::is_zero(h.get(i, j)),
                "H_w must be lower triangular"
            );
        }
    }
    Ok(h)
}

/// One refinement step on the dual side. Returns the dual generator
/// l_w_star ((n-k) x n), the exact integer block a_hat (k x (n-k)) that
/// identifies the projection, and H_w.
pub fn build_lw(
    target: &TargetSpec,
    split: &TriangularSplit,
    w: u64,
) -> Result<(RealMatrix, IntMatrix, IntMatrix)> {
    let h_w = build_hw(target, split, w)?;
    let hw_real = h_w.to_real();
    let g1_inv_t = inverse_triangular(&split.g1)?.transpose();
    let g3_inv_t = inverse_triangular(&split.g3)?.transpose();
    let shift = hw_real.mul(&g3_inv_t).mul(&split.g2.transpose()); // (n-k) x k
    let y = target
        .l_bar_1
        .scale(w as f64)
        .mul(&split.g1.transpose())
        .add(&shift);
    let f = floor_entrywise(&y);
    let lw1 = f.to_real().sub(&shift).mul(&g1_inv_t);
    let lw2 = hw_real.mul(&g3_inv_t);
    let l_w_star = lw1.hstack(&lw2);
    // a_hat^T = -H_w^{-1} F, exact because H_w is unit lower triangular
    let a_hat = h_w.solve_unit_lower(&f)?.neg().transpose();
    Ok((l_w_star, a_hat, h_w))
}

/// Lifts the integer block back to the primitive set it encodes:
/// V = [g1 | g2 + a_hat * g3] mapped to the source's original coordinates.
pub fn recover_v(split: &TriangularSplit, a_hat: &IntMatrix) -> Result<RealMatrix> {
    if a_hat.rows() != split.k() || a_hat.cols() != split.n() - split.k() {
        return Err(Error::DimensionMismatch(format!(
            "a_hat must be {}x{}, got {}x{}",
            split.k(),
            split.n() - split.k(),
            a_hat.rows(),
            a_hat.cols()
        )));
    }
    let vhat = split.g2.add(&a_hat.to_real().mul(&split.g3));
    Ok(split.g1.hstack(&vhat).mul(&split.q))
}

/// Result of one approximation step at a fixed w.
#[derive(Debug, Clone)]
pub struct ApproximationResult {
    pub w: u64,
    /// Scale relating the projection's dual Gram to the target's: c = 1/w^2.
    pub c: f64,
    pub h_w: IntMatrix,
    pub l_w_star: RealMatrix,
    /// Integer block identifying the projection (k x (n-k)).
    pub a_hat: IntMatrix,
    /// Coordinates of V in the source basis, [I_k | a_hat].
    pub a_coeff: IntMatrix,
    /// The primitive set, rows in the source's original coordinates.
    pub v: RealMatrix,
    /// max |L* L*^T - c * L_w* L_w*^T|: dual-side Gram error.
    pub gram_error: f64,
    /// max |(L* L*^T)^{-1} - w^2 * (L_w* L_w*^T)^{-1}|: primal-side error.
    pub primal_error: f64,
    pub v_maxnorm: f64,
    pub warnings: Vec<String>,
}

/// Runs the construction once: canonicalizes the target, builds the floored
/// dual generator at refinement w, recovers V, and verifies membership and
/// primitivity of V in the source lattice exactly.
pub fn approximate(source: &Lattice, target: &Lattice, k: usize, w: u64) -> Result<ApproximationResult> {
    if !source.is_full_dimensional() {
        return Err(Error::DimensionMismatch(
            "source lattice must be full-dimensional".into(),
        ));
    }
    let n = source.dim();
    let split = triangular_split(source, k)?;
    let target_spec = make_target(target, k, n)?;
    let (l_w_star, a_hat, h_w) = build_lw(&target_spec, &split, w)?;
    if !h_w.det().abs().is_one() {
        return Err(Error::InvalidInput(
            "internal: H_w lost unimodularity".into(),
        ));
    }
    let v = recover_v(&split, &a_hat)?;
    let a_coeff = IntMatrix::identity(k).hstack(&a_hat);

    // V must consist of lattice vectors with exactly these coordinates, and
    // the set must be primitive (it is, by the identity block).
    let cert = primitive_check(source, &v).map_err(|e| match e {
        Error::NotLatticeVector(msg) => Error::MembershipFailure(msg),
        other => other,
    })?;
    if cert.coefficient_matrix != a_coeff {
        return Err(Error::MembershipFailure(
            "recovered coordinates disagree with the construction".into(),
        ));
    }
    if !cert.is_primitive() {
        return Err(Error::NotPrimitive(cert.minor_gcd));
    }

    let c = 1.0 / (w as f64 * w as f64);
    let dual_gram = target_spec.dual_gram();
    let approx_dual_gram = l_w_star.gram();
    let gram_error = dual_gram.sub(&approx_dual_gram.scale(c)).max_norm();
    let primal_error = dual_gram
        .inverse()?
        .sub(&approx_dual_gram.inverse()?.scale(1.0 / c))
        .max_norm();

    Ok(ApproximationResult {
        w,
        c,
        h_w,
        l_w_star,
        a_hat,
        a_coeff,
        v: v.clone(),
        gram_error,
        primal_error,
        v_maxnorm: v.max_norm(),
        warnings: target_spec.warnings.clone(),
    })
}

/// A sweep over increasing w values plus the fitted log-log slope of
/// gram_error against |V|_inf.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub results: Vec<ApproximationResult>,
    pub slope: Option<f64>,
}

pub fn convergence_sweep(
    source: &Lattice,
    target: &Lattice,
    k: usize,
    w_list: &[u64],
) -> Result<SweepOutcome> {
    if w_list.is_empty() {
        return Err(Error::InvalidInput("w list must not be empty".into()));
    }
    if w_list.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidInput(
            "w list must be strictly increasing".into(),
        ));
    }
    let mut results = Vec::with_capacity(w_list.len());
    for &w in w_list {
        results.push(approximate(source, target, k, w)?);
    }
    let xs: Vec<f64> = results.iter().map(|r| r.v_maxnorm).collect();
    let ys: Vec<f64> = results.iter().map(|r| r.gram_error).collect();
    let slope = fit_loglog_slope(&xs, &ys);
    Ok(SweepOutcome { results, slope })
}

/// Least-squares slope of log(y) against log(x), ignoring non-positive
/// pairs. None when fewer than two usable points remain or x is constant.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in &pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 1e-30 {
        return None;
    }
    Some(sxy / sxx)
}

/// Integer-only shortcut for a standard-cubic source (generator I_n) when
/// k < n/2: the coefficient matrix is built directly from the floored
/// target data, A = V = [I_k | -(H_w^{-1} floor(w l_bar_1))^T] with
/// H_w = floor(w l_bar_2) + I. Produces exactly the pipeline's a_coeff.
pub fn zn_fast_path(target: &TargetSpec, w: u64) -> Result<IntMatrix> {
    if w == 0 {
        return Err(Error::InvalidInput("w must be at least 1".into()));
    }
    let k = target.k();
    let n = target.n();
    if 2 * k >= n {
        return Err(Error::InvalidInput(format!(
            "fast path requires k < n/2, got k={} n={}",
            k, n
        )));
    }
    let f = floor_entrywise(&target.l_bar_1.scale(w as f64));
    let mut h = floor_entrywise(&target.l_bar_2.scale(w as f64));
    for i in 0..h.rows() {
        let v = h.get(i, i) + num_bigint::BigInt::one();
        h.set(i, i, v);
    }
    let a_hat = h.solve_unit_lower(&f)?.neg().transpose();
    Ok(IntMatrix::identity(k).hstack(&a_hat))
}

/// Entrywise shortcut for a rectangular source diag(c): every block of the
/// dual-side generator reduces to scalar floors,
/// lw1[i][j] = floor(w l1[i][j] c_j) / c_j and lw2 = (H_w)[i][j] / c_{k+j}.
/// Matches the general pipeline's l_w_star.
pub fn rect_fast_path(target: &TargetSpec, c: &[f64], w: u64) -> Result<RealMatrix> {
    if w == 0 {
        return Err(Error::InvalidInput("w must be at least 1".into()));
    }
    let k = target.k();
    let n = target.n();
    let m = n - k;
    if c.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "need {} side lengths, got {}",
            n,
            c.len()
        )));
    }
    if c.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidInput("side lengths must be positive".into()));
    }
    let mut out = RealMatrix::zeros(m, n);
    // H_w for the diagonal split: floor((w * l2[i][j]) * c_{k+j}), +1 on the
    // diagonal. Scaling by w before the column weight keeps the scalar
    // operations in the same order as the matrix pipeline.
    let mut h = vec![vec![0.0f64; m]; m];
    for i in 0..m {
        for j in 0..m {
            let scaled = target.l_bar_2.get(i, j) * w as f64;
            h[i][j] = (scaled * c[k + j]).floor();
            if i == j {
                h[i][j] += 1.0;
            }
        }
    }
    for i in 0..m {
        for j in 0..k {
            let scaled = target.l_bar_1.get(i, j) * w as f64;
            let floored = (scaled * c[j]).floor();
            out.set(i, j, floored * (1.0 / c[j]));
        }
        for j in 0..m {
            out.set(i, k + j, h[i][j] * (1.0 / c[k + j]));
        }
    }
    Ok(out)
}
