//! Dense matrices: `RealMatrix` over f64 for the geometry, `IntMatrix` over
//! arbitrary-precision integers for coefficient bookkeeping where exactness
//! is load-bearing (primitivity certificates, unimodular transforms).

mod factor;
mod int;
mod real;

pub use factor::{block_det_gram, inverse_triangular, lq_factorize, rq_factorize, RqResult};
pub use int::IntMatrix;
pub use real::{floor_entrywise, RealMatrix};

/// Relative pivot threshold: anything below `PIVOT_REL * scale` is treated
/// as a zero pivot.
pub const PIVOT_REL: f64 = 1e-12;

/// Relative tolerance for approximate equality of real quantities.
pub const EQ_REL: f64 = 1e-9;

/// Relative tolerance used when rounding membership coordinates back to
/// integers is verified against the original vector.
pub const MEMBERSHIP_REL: f64 = 1e-7;

/// Lexicographic k-subsets of {0, .., m-1}; small m only.
pub(crate) fn index_combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
