//! Exact shortest-vector search by branch-and-bound enumeration over the
//! Cholesky factor of the Gram matrix, after a light basis reduction pass.
//! Intended for small diagnostic dimensions; enumeration refuses to run
//! above a configurable cap.

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::RealMatrix;
use std::sync::Once;

/// Enumeration runs up to this rank unless overridden.
pub const DEFAULT_MAX_DIM: usize = 8;
/// Hard ceiling for the override; beyond this the search tree is no longer
/// a diagnostic tool.
pub const HARD_MAX_DIM: usize = 10;
/// Environment variable raising the cap (clamped to [`HARD_MAX_DIM`]).
pub const MAX_DIM_ENV: &str = "LATPROJ_MAX_SVP_DIM";

static SLOW_WARNING: Once = Once::new();

/// Current enumeration rank cap: `LATPROJ_MAX_SVP_DIM` when set to a valid
/// positive integer (clamped to 10), otherwise 8.
pub fn enumeration_cap() -> usize {
    match std::env::var(MAX_DIM_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(v) if v >= 1 => v.min(HARD_MAX_DIM),
            _ => DEFAULT_MAX_DIM,
        },
        Err(_) => DEFAULT_MAX_DIM,
    }
}

/// A shortest nonzero lattice vector.
#[derive(Debug, Clone)]
pub struct SvpResult {
    /// Squared Euclidean norm of the vector.
    pub norm_sq: f64,
    /// The vector itself, in ambient coordinates.
    pub vector: Vec<f64>,
    /// Integer coordinates with respect to the lattice's generator rows.
    pub coords: Vec<i64>,
    /// Search-tree nodes visited by the enumeration.
    pub node_count: u64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular L with L L^T = a; fails when a is not positive definite.
fn cholesky(a: &RealMatrix) -> Result<RealMatrix> {
    let m = a.rows();
    let scale = a.max_norm().max(1.0);
    let mut l = RealMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for t in 0..j {
                s -= l.get(i, t) * l.get(j, t);
            }
            if i == j {
                if s <= scale * 1e-14 {
                    return Err(Error::SingularMatrix(
                        "Gram matrix is not positive definite".into(),
                    ));
                }
                l.set(i, i, s.sqrt());
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    Ok(l)
}

fn row_sub(b: &mut Vec<Vec<f64>>, t: &mut Vec<Vec<i64>>, i: usize, j: usize, q: i64) {
    let qf = q as f64;
    for c in 0..b[i].len() {
        b[i][c] -= qf * b[j][c];
    }
    for c in 0..t[i].len() {
        t[i][c] -= q * t[j][c];
    }
}

/// Gram-Schmidt data for the current rows: squared star norms and the mu
/// coefficients. Recomputed from scratch; ranks here are tiny.
fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = b.len();
    let dim = b[0].len();
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut mu = vec![vec![0.0f64; m]; m];
    let mut norms = vec![0.0f64; m];
    for i in 0..m {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &bstar[j]) / norms[j];
            for c in 0..dim {
                v[c] -= mu[i][j] * bstar[j][c];
            }
        }
        mu[i][i] = 1.0;
        norms[i] = dot(&v, &v);
        bstar.push(v);
    }
    (norms, mu)
}

/// Lenstra-Lenstra-Lovasz reduction (delta = 0.99). Wildly unbalanced
/// bases — long, nearly dependent rows hiding a short vector — come out
/// with bounded skew, which is what both the enumeration bound and the
/// determinant of the reduced Gram need to stay numerically meaningful.
fn lll_reduce(b: &mut Vec<Vec<f64>>, t: &mut Vec<Vec<i64>>) {
    const DELTA: f64 = 0.99;
    let m = b.len();
    let mut k = 1;
    // iteration valve: floating-point mu values could in principle cycle
    let mut budget = 100_000usize;
    while k < m && budget > 0 {
        budget -= 1;
        let (_, mut mu) = gram_schmidt(b);
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                row_sub(b, t, k, j, q as i64);
                for l in 0..=j {
                    mu[k][l] -= q * mu[j][l];
                }
            }
        }
        let (norms, mu) = gram_schmidt(b);
        if norms[k] >= (DELTA - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            t.swap(k, k - 1);
            k = k.max(2) - 1;
        }
    }
}

/// Gauss-Lagrange reduction for rank two; ends with |<b0,b1>| at most
/// half of |b0|^2 and |b0| <= |b1|.
fn lagrange_reduce(b: &mut Vec<Vec<f64>>, t: &mut Vec<Vec<i64>>) {
    for _ in 0..64 {
        if dot(&b[0], &b[0]) > dot(&b[1], &b[1]) {
            b.swap(0, 1);
            t.swap(0, 1);
        }
        let q = (dot(&b[1], &b[0]) / dot(&b[0], &b[0])).round();
        if q == 0.0 {
            return;
        }
        row_sub(b, t, 1, 0, q as i64);
    }
}

/// Reduced generator rows plus the unimodular transform that produced them
/// (reduced = transform * original).
fn reduced_rows(lattice: &Lattice) -> (Vec<Vec<f64>>, Vec<Vec<i64>>) {
    let m = lattice.dim();
    let mut b = lattice.generator().to_rows();
    let mut t: Vec<Vec<i64>> = (0..m)
        .map(|i| (0..m).map(|j| i64::from(i == j)).collect())
        .collect();
    if m == 2 {
        lagrange_reduce(&mut b, &mut t);
    } else if m > 2 {
        lll_reduce(&mut b, &mut t);
    }
    (b, t)
}

struct Search<'a> {
    chol: &'a RealMatrix,
    m: usize,
    alpha: Vec<i64>,
    best: Vec<i64>,
    best_norm: f64,
    nodes: u64,
}

impl Search<'_> {
    fn bound(&self) -> f64 {
        self.best_norm * (1.0 + 1e-12)
    }

    /// Depth-first over coordinates alpha[m-1] down to alpha[0]; `level` is
    /// the number of coordinates still unassigned.
    fn dfs(&mut self, level: usize, partial: f64) {
        let j = level - 1;
        let mut s = 0.0;
        for i in j + 1..self.m {
            s += self.alpha[i] as f64 * self.chol.get(i, j);
        }
        let ljj = self.chol.get(j, j);
        let r = (self.bound() - partial).max(0.0).sqrt();
        let mut lo = ((-r - s) / ljj).ceil() as i64 - 1;
        let hi = ((r - s) / ljj).floor() as i64 + 1;
        if j + 1 == self.m {
            // the search is symmetric under negation; keep the top
            // coordinate non-negative
            lo = lo.max(0);
        }
        for a in lo..=hi {
            let c = a as f64 * ljj + s;
            let contrib = c * c;
            if partial + contrib > self.bound() {
                continue;
            }
            self.nodes += 1;
            self.alpha[j] = a;
            if j == 0 {
                let norm = partial + contrib;
                if self.alpha.iter().any(|&x| x != 0) && norm < self.best_norm {
                    self.best_norm = norm;
                    self.best.copy_from_slice(&self.alpha);
                }
            } else {
                self.dfs(level - 1, partial + contrib);
            }
        }
    }
}

/// Finds a shortest nonzero vector of the lattice by exact enumeration.
/// Fails with a dimension error when the rank exceeds [`enumeration_cap`].
pub fn shortest_vector(lattice: &Lattice) -> Result<SvpResult> {
    let m = lattice.dim();
    let cap = enumeration_cap();
    if m > cap {
        return Err(Error::DimensionTooLarge(m, cap));
    }
    if m > DEFAULT_MAX_DIM {
        SLOW_WARNING.call_once(|| {
            eprintln!(
                "warning: enumerating in rank {} (above {}); this may be slow",
                m, DEFAULT_MAX_DIM
            );
        });
    }

    let (b, t) = reduced_rows(lattice);
    let reduced = RealMatrix::from_rows(&b)?;
    let gram = reduced.gram();
    let chol = cholesky(&gram)?;

    // a shortest basis row seeds the radius, so the search always has a
    // candidate to return
    let mut seed_idx = 0;
    for i in 1..m {
        if gram.get(i, i) < gram.get(seed_idx, seed_idx) {
            seed_idx = i;
        }
    }
    let mut search = Search {
        chol: &chol,
        m,
        alpha: vec![0; m],
        best: (0..m).map(|i| i64::from(i == seed_idx)).collect(),
        best_norm: gram.get(seed_idx, seed_idx) * (1.0 + 1e-9),
        nodes: 0,
    };
    search.dfs(m, 0.0);

    // map back through the reduction transform to the original basis
    let coords: Vec<i64> = (0..m)
        .map(|j| (0..m).map(|i| search.best[i] * t[i][j]).sum())
        .collect();
    let gen = lattice.generator();
    let ambient = lattice.ambient_dim();
    let mut vector = vec![0.0f64; ambient];
    for (i, &ci) in coords.iter().enumerate() {
        for c in 0..ambient {
            vector[c] += ci as f64 * gen.get(i, c);
        }
    }
    let norm_sq = dot(&vector, &vector);
    Ok(SvpResult {
        norm_sq,
        vector,
        coords,
        node_count: search.nodes,
    })
}

/// Center density delta = (lambda/2)^m / sqrt(det), with lambda the minimal
/// vector length and m the rank. Invariant under scaling and rotation.
pub fn center_density(lattice: &Lattice) -> Result<f64> {
    let sv = shortest_vector(lattice)?;
    let m = lattice.dim() as i32;
    // a skewed generator can lose the determinant entirely to cancellation;
    // the reduced basis spans the same lattice and computes it stably
    let (b, _) = reduced_rows(lattice);
    let det = RealMatrix::from_rows(&b)?.gram().det();
    Ok((sv.norm_sq.sqrt() / 2.0).powi(m) / det.sqrt())
}

/// Absolute difference of center densities of two lattices of equal rank.
pub fn density_gap(a: &Lattice, b: &Lattice) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "center densities compare only at equal rank ({} vs {})",
            a.dim(),
            b.dim()
        )));
    }
    Ok((center_density(a)? - center_density(b)?).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn hexagonal() -> Lattice {
        Lattice::from_rows(&[vec![1.0, 0.0], vec![0.5, 0.75f64.sqrt()]]).unwrap()
    }

    #[test]
    fn cubic_shortest_is_a_unit_vector() {
        let r = shortest_vector(&Lattice::standard(4)).unwrap();
        assert!((r.norm_sq - 1.0).abs() < 1e-12);
        assert_eq!(r.coords.iter().map(|c| c.abs()).sum::<i64>(), 1);
        assert!(r.node_count > 0);
    }

    #[test]
    fn hexagonal_minimum_and_density() {
        let hex = hexagonal();
        let r = shortest_vector(&hex).unwrap();
        assert!((r.norm_sq - 1.0).abs() < 1e-12);
        // delta = 1 / (2 sqrt(3))
        let d = center_density(&hex).unwrap();
        assert!((d - 0.5 / 3.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn checkerboard_d4_density() {
        let d4 = Lattice::from_rows(&[
            vec![1.0, -1.0, 0.0, 0.0],
            vec![0.0, 1.0, -1.0, 0.0],
            vec![0.0, 0.0, 1.0, -1.0],
            vec![0.0, 0.0, 1.0, 1.0],
        ])
        .unwrap();
        let r = shortest_vector(&d4).unwrap();
        assert!((r.norm_sq - 2.0).abs() < 1e-12);
        assert!((center_density(&d4).unwrap() - 0.125).abs() < 1e-12);
    }

    #[test]
    fn lagrange_handles_a_skewed_plane() {
        // rows are long and nearly parallel but the determinant is 1, so
        // this is Z^2 in disguise and the minimum is a unit vector
        let l = Lattice::from_rows(&[vec![101.0, 100.0], vec![102.0, 101.0]]).unwrap();
        let r = shortest_vector(&l).unwrap();
        assert!((r.norm_sq - 1.0).abs() < 1e-9, "norm_sq {}", r.norm_sq);
        let rebuilt: Vec<f64> = (0..2)
            .map(|c| (0..2)
                .map(|i| r.coords[i] as f64 * l.generator().get(i, c))
                .sum())
            .collect();
        assert!((rebuilt[0] - r.vector[0]).abs() < 1e-9);
        assert!((rebuilt[1] - r.vector[1]).abs() < 1e-9);
    }

    #[test]
    fn vector_matches_coords_times_generator() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..10 {
            let mut rows = Vec::new();
            for i in 0..3 {
                let mut row = vec![0.0f64; 3];
                for (j, r) in row.iter_mut().enumerate() {
                    *r = if i == j {
                        rng.random_range(0.8..1.3)
                    } else {
                        rng.random_range(-0.25..0.25)
                    };
                }
                rows.push(row);
            }
            let l = Lattice::from_rows(&rows).unwrap();
            let r = shortest_vector(&l).unwrap();
            for c in 0..3 {
                let want: f64 = (0..3)
                    .map(|i| r.coords[i] as f64 * l.generator().get(i, c))
                    .sum();
                assert!((want - r.vector[c]).abs() < 1e-9);
            }
            // the result is a lattice vector
            assert!(l.membership(&r.vector).unwrap().is_some());
        }
    }

    fn brute_force_min(l: &Lattice, radius: i64) -> f64 {
        let m = l.dim();
        let gen = l.generator();
        let mut best = f64::INFINITY;
        let side = (2 * radius + 1) as usize;
        for idx in 0..side.pow(m as u32) {
            let mut rem = idx;
            let mut alpha = vec![0i64; m];
            for a in alpha.iter_mut() {
                *a = (rem % side) as i64 - radius;
                rem /= side;
            }
            if alpha.iter().all(|&x| x == 0) {
                continue;
            }
            let mut norm = 0.0;
            for c in 0..gen.cols() {
                let x: f64 = (0..m).map(|i| alpha[i] as f64 * gen.get(i, c)).sum();
                norm += x * x;
            }
            best = best.min(norm);
        }
        best
    }

    #[test]
    fn enumeration_agrees_with_brute_force() {
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        for case in 0..10 {
            let m = 3 + (case % 2);
            let mut rows = Vec::new();
            for i in 0..m {
                let mut row = vec![0.0f64; m];
                for (j, r) in row.iter_mut().enumerate() {
                    *r = if i == j {
                        rng.random_range(0.8..1.3)
                    } else {
                        rng.random_range(-0.25..0.25)
                    };
                }
                rows.push(row);
            }
            let l = Lattice::from_rows(&rows).unwrap();
            let fast = shortest_vector(&l).unwrap().norm_sq;
            let slow = brute_force_min(&l, 5);
            assert!((fast - slow).abs() <= 1e-9 * slow.max(1.0));
        }
    }

    #[test]
    fn cap_respects_environment_and_rejects_large_ranks() {
        // default cap
        std::env::remove_var(MAX_DIM_ENV);
        assert_eq!(enumeration_cap(), 8);
        match shortest_vector(&Lattice::standard(9)) {
            Err(Error::DimensionTooLarge(9, 8)) => {}
            other => panic!("expected a dimension error, got {:?}", other.map(|r| r.norm_sq)),
        }
        // override, clamped
        std::env::set_var(MAX_DIM_ENV, "10");
        assert_eq!(enumeration_cap(), 10);
        let r = shortest_vector(&Lattice::standard(9)).unwrap();
        assert!((r.norm_sq - 1.0).abs() < 1e-12);
        std::env::set_var(MAX_DIM_ENV, "99");
        assert_eq!(enumeration_cap(), 10);
        std::env::set_var(MAX_DIM_ENV, "bogus");
        assert_eq!(enumeration_cap(), 8);
        std::env::remove_var(MAX_DIM_ENV);
    }

    #[test]
    fn density_gap_needs_equal_ranks() {
        let z2 = Lattice::standard(2);
        let z3 = Lattice::standard(3);
        assert!(density_gap(&z2, &z3).is_err());
        assert_eq!(density_gap(&z2, &z2).unwrap(), 0.0);
        // similar lattices have equal center density
        let scaled = Lattice::from_rows(&[vec![2.5, 0.0], vec![0.0, 2.5]]).unwrap();
        assert!(density_gap(&z2, &scaled).unwrap() < 1e-15);
    }

    proptest! {
        // the reported minimum never exceeds the shortest basis row, and
        // negating the answer gives the same norm (sanity of symmetry
        // pruning)
        #[test]
        fn minimum_bounded_by_rows(seed in 0u64..500) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let mut rows = Vec::new();
            for i in 0..3 {
                let mut row = vec![0.0f64; 3];
                for (j, r) in row.iter_mut().enumerate() {
                    *r = if i == j {
                        rng.random_range(0.9..1.4)
                    } else {
                        rng.random_range(-0.3..0.3)
                    };
                }
                rows.push(row);
            }
            let l = Lattice::from_rows(&rows).unwrap();
            let res = shortest_vector(&l).unwrap();
            let min_row = (0..3)
                .map(|i| l.gram().get(i, i))
                .fold(f64::INFINITY, f64::min);
            prop_assert!(res.norm_sq <= min_row * (1.0 + 1e-9));
            prop_assert!(res.norm_sq > 1e-9);
        }
    }
}
