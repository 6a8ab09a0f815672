//! Point lattices given by a full-row-rank generator matrix (rows are basis
//! vectors). The determinant convention throughout is det(G G^T), i.e. the
//! squared covolume, so taking duals inverts it exactly.

use crate::error::{Error, Result};
use crate::matrix::{index_combinations, IntMatrix, RealMatrix, MEMBERSHIP_REL};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone)]
pub struct Lattice {
    generator: RealMatrix,
    gram: RealMatrix,
    det: f64,
}

impl Lattice {
    /// Validates full row rank and caches the Gram matrix and determinant.
    pub fn new(generator: RealMatrix) -> Result<Self> {
        let m = generator.rows();
        if generator.cols() < m {
            return Err(Error::DimensionMismatch(format!(
                "{} rows need an ambient dimension of at least {}",
                m,
                generator.rows()
            )));
        }
        if generator.row_rank() < m {
            return Err(Error::SingularMatrix(
                "generator rows are linearly dependent".into(),
            ));
        }
        let gram = generator.gram();
        let det = gram.det();
        if !(det > 0.0) {
            return Err(Error::SingularMatrix(format!(
                "Gram determinant {:e} is not positive",
                det
            )));
        }
        Ok(Lattice {
            generator,
            gram,
            det,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Lattice::new(RealMatrix::from_rows(rows)?)
    }

    /// Z^n with the identity generator.
    pub fn standard(n: usize) -> Self {
        Lattice::new(RealMatrix::identity(n)).expect("identity is a basis")
    }

    pub fn generator(&self) -> &RealMatrix {
        &self.generator
    }

    pub fn gram(&self) -> &RealMatrix {
        &self.gram
    }

    /// det(G G^T); squared covolume.
    pub fn det(&self) -> f64 {
        self.det
    }

    /// Lattice dimension (rank), not the ambient dimension.
    pub fn dim(&self) -> usize {
        self.generator.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.generator.cols()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    /// Dual lattice, generated by (G G^T)^{-1} G. For a non-square generator
    /// this is the dual inside the row span; determinants satisfy
    /// det(L) * det(L*) = 1 either way.
    pub fn dual(&self) -> Result<Lattice> {
        let d = self.gram.solve(&self.generator)?;
        Lattice::new(d)
    }

    /// Integer coordinates of `x` in this basis, or None if `x` is not a
    /// lattice vector. Coordinates are solved in the least-squares sense,
    /// rounded, and verified entrywise against `tol * max(1, |x|_inf)`.
    pub fn membership(&self, x: &[f64]) -> Result<Option<Vec<BigInt>>> {
        self.membership_with_tol(x, MEMBERSHIP_REL)
    }

    pub fn membership_with_tol(&self, x: &[f64], tol: f64) -> Result<Option<Vec<BigInt>>> {
        if x.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} does not match ambient dimension {}",
                x.len(),
                self.ambient_dim()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        // alpha = x G^T (G G^T)^{-1}, solved as (G G^T) alpha^T = G x^T
        let xs = RealMatrix::new(1, x.len(), x.to_vec())?;
        let rhs = self.generator.mul(&xs.transpose());
        let alpha = self.gram.solve(&rhs)?;
        let mut coords = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let a = alpha.get(i, 0);
            let r = a.round();
            if !r.is_finite() {
                return Err(Error::NonFiniteEntry);
            }
            coords.push(BigInt::from_f64(r).expect("finite rounded coordinate"));
        }
        // verify the rounded combination reproduces x
        let xinf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let bound = tol * xinf.max(1.0);
        for j in 0..self.ambient_dim() {
            let mut s = 0.0;
            for (i, c) in coords.iter().enumerate() {
                s += c.to_f64().expect("coordinate fits f64") * self.generator.get(i, j);
            }
            if (s - x[j]).abs() > bound {
                return Ok(None);
            }
        }
        Ok(Some(coords))
    }

    /// True when both lattices have the same span and mutually contain each
    /// other's generators.
    pub fn sublattice_equal(&self, other: &Lattice) -> Result<bool> {
        self.sublattice_equal_with_tol(other, MEMBERSHIP_REL)
    }

    pub fn sublattice_equal_with_tol(&self, other: &Lattice, tol: f64) -> Result<bool> {
        if self.dim() != other.dim() || self.ambient_dim() != other.ambient_dim() {
            return Ok(false);
        }
        for i in 0..other.dim() {
            if self
                .membership_with_tol(other.generator.row(i), tol)?
                .is_none()
            {
                return Ok(false);
            }
        }
        for i in 0..self.dim() {
            if other
                .membership_with_tol(self.generator.row(i), tol)?
                .is_none()
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Exact witness that a set of lattice vectors is (or is not) extendable to
/// a basis: the gcd of all maximal minors of its integer coefficient matrix.
#[derive(Debug, Clone)]
pub struct PrimitiveCertificate {
    pub coefficient_matrix: IntMatrix,
    pub minor_gcd: BigInt,
}

impl PrimitiveCertificate {
    pub fn is_primitive(&self) -> bool {
        self.minor_gcd == BigInt::from(1)
    }
}

/// Certifies primitivity of `vs` (rows) in `lattice`: recovers integer
/// coordinates by membership, then takes the gcd of all k x k minors of the
/// coefficient matrix, computed exactly.
pub fn primitive_check(lattice: &Lattice, vs: &RealMatrix) -> Result<PrimitiveCertificate> {
    let k = vs.rows();
    let m = lattice.dim();
    if k > m {
        return Err(Error::DimensionMismatch(format!(
            "{} vectors cannot be primitive in a rank-{} lattice",
            k, m
        )));
    }
    let mut coeff = IntMatrix::zeros(k, m);
    for i in 0..k {
        match lattice.membership(vs.row(i))? {
            Some(coords) => {
                for (j, c) in coords.into_iter().enumerate() {
                    coeff.set(i, j, c);
                }
            }
            None => {
                return Err(Error::NotLatticeVector(format!(
                    "row {} has no integer coordinates",
                    i
                )))
            }
        }
    }
    let gcd = minor_gcd(&coeff);
    if gcd.is_zero() {
        return Err(Error::NotPrimitive(BigInt::zero()));
    }
    Ok(PrimitiveCertificate {
        coefficient_matrix: coeff,
        minor_gcd: gcd,
    })
}

/// gcd of all maximal (k x k) minors of a k x m integer matrix, k <= m.
pub fn minor_gcd(coeff: &IntMatrix) -> BigInt {
    let k = coeff.rows();
    let m = coeff.cols();
    let mut g = BigInt::zero();
    for cols in index_combinations(m, k) {
        let minor = coeff.select_columns(&cols).det();
        g = g.gcd(&minor);
        if g == BigInt::from(1) {
            break;
        }
    }
    g.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hexagonal() -> Lattice {
        Lattice::from_rows(&[vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]).unwrap()
    }

    #[test]
    fn constructor_rejects_dependent_rows() {
        assert!(matches!(
            Lattice::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]),
            Err(Error::SingularMatrix(_))
        ));
    }

    #[test]
    fn gram_and_det_of_hexagonal() {
        let hex = hexagonal();
        let expected =
            RealMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        assert!(hex.gram().approx_eq(&expected, 1e-15));
        assert!((hex.det() - 0.75).abs() < 1e-12);
    }

    // Dual of the hexagonal lattice: Gram determinants multiply to 1 and
    // the squared covolume is 4/3.
    #[test]
    fn dual_hexagonal_det_is_reciprocal() {
        let hex = hexagonal();
        let dual = hex.dual().unwrap();
        assert!((dual.det() - 4.0 / 3.0).abs() < 1e-12);
        assert!((dual.det() * hex.det() - 1.0).abs() < 1e-12);
        // dual of the dual is the original lattice again
        let back = dual.dual().unwrap();
        assert!(back.sublattice_equal(&hex).unwrap());
    }

    #[test]
    fn dual_of_non_full_rank_lattice_stays_in_span() {
        // rank-2 lattice in ambient 3
        let l = Lattice::from_rows(&[vec![1.0, -1.0, 0.0], vec![0.0, 1.0, -1.0]]).unwrap();
        let d = l.dual().unwrap();
        assert!((l.det() * d.det() - 1.0).abs() < 1e-9);
        // every dual generator is orthogonal to nothing in the span: check
        // pairing with the primal generators is integral (here: identity-ish)
        let pair = d.generator().mul(&l.generator().transpose());
        assert!(pair.approx_eq(&RealMatrix::identity(2), 1e-9));
    }

    #[test]
    fn membership_hexagonal_hand_case() {
        let hex = hexagonal();
        let coords = hex
            .membership(&[1.5, 3f64.sqrt() / 2.0])
            .unwrap()
            .expect("lattice vector");
        assert_eq!(coords[0], BigInt::from(1));
        assert_eq!(coords[1], BigInt::from(1));
        assert!(hex.membership(&[0.5, 0.5]).unwrap().is_none());
    }

    #[test]
    fn membership_requires_scale_relative_accuracy() {
        let z2 = Lattice::standard(2);
        assert!(z2.membership(&[0.5, 0.0]).unwrap().is_none());
        assert!(z2.membership(&[1e9, -3.0]).unwrap().is_some());
        let zero = z2.membership(&[0.0, 0.0]).unwrap().unwrap();
        assert!(zero.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn sublattice_equal_is_basis_independent() {
        let a = Lattice::standard(2);
        let b = Lattice::from_rows(&[vec![1.0, 0.0], vec![3.0, 1.0]]).unwrap();
        assert!(a.sublattice_equal(&b).unwrap());
        let c = Lattice::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(!a.sublattice_equal(&c).unwrap());
    }

    #[test]
    fn primitive_check_hand_cases() {
        let z3 = Lattice::standard(3);
        let ones = RealMatrix::from_rows(&[vec![1.0, 1.0, 1.0]]).unwrap();
        let cert = primitive_check(&z3, &ones).unwrap();
        assert!(cert.is_primitive());
        assert_eq!(cert.minor_gcd, BigInt::from(1));

        let z2 = Lattice::standard(2);
        let doubled = RealMatrix::from_rows(&[vec![2.0, 4.0]]).unwrap();
        let cert = primitive_check(&z2, &doubled).unwrap();
        assert!(!cert.is_primitive());
        assert_eq!(cert.minor_gcd, BigInt::from(2));

        let z4 = Lattice::standard(4);
        let pair = RealMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(primitive_check(&z4, &pair).unwrap().is_primitive());
    }

    #[test]
    fn primitive_check_rejects_non_members_and_dependence() {
        let z2 = Lattice::standard(2);
        let outside = RealMatrix::from_rows(&[vec![0.5, 0.5]]).unwrap();
        assert!(matches!(
            primitive_check(&z2, &outside),
            Err(Error::NotLatticeVector(_))
        ));
        let dependent =
            RealMatrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert!(matches!(
            primitive_check(&z2, &dependent),
            Err(Error::NotPrimitive(_))
        ));
    }

    proptest! {
        // coordinates with |alpha_i| <= 100 round-trip through membership
        #[test]
        fn membership_roundtrip(alpha in proptest::collection::vec(-100i64..=100, 2)) {
            let hex = hexagonal();
            let x: Vec<f64> = (0..2)
                .map(|j| (0..2).map(|i| alpha[i] as f64 * hex.generator().get(i, j)).sum())
                .collect();
            let coords = hex.membership(&x).unwrap().expect("exact combination");
            prop_assert_eq!(coords[0].to_i64().unwrap(), alpha[0]);
            prop_assert_eq!(coords[1].to_i64().unwrap(), alpha[1]);
        }

        // any subset of rows of a unimodular matrix is primitive
        #[test]
        fn basis_rows_are_primitive(shift in -3i64..=3) {
            let u = IntMatrix::from_i64_rows(&[
                vec![1, shift, 0],
                vec![0, 1, shift],
                vec![0, 0, 1],
            ]).unwrap();
            let z3 = Lattice::standard(3);
            let rows = u.to_real().block(0, 2, 0, 3);
            let cert = primitive_check(&z3, &rows).unwrap();
            prop_assert!(cert.is_primitive());
        }
    }
}
