//! Lattice serialization and the builtin source/target registry.
//!
//! Lattices travel as JSON objects with a `name`, a `generator` given as
//! rows of decimals, and an optional `exact` field carrying the same rows
//! as rational strings ("p/q"); when `exact` is present it wins. Builtin
//! families are addressed by short spec strings such as `Zn:4` or `hex`.

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::RealMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Spec strings accepted by [`parse_source_spec`].
pub const BUILTIN_HELP: &str = "Zn:<n>, rect:<c1,c2,...>, hex, An*:<n>, Dn:<n>";

const MAX_BUILTIN_DIM: usize = 64;
const MAX_RATIONAL_LEN: usize = 256;
const MAX_W_LIST_LEN: usize = 10_000;

/// On-disk form of a lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub name: String,
    pub generator: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<Vec<String>>>,
}

impl LatticeFile {
    pub fn from_lattice(name: &str, lattice: &Lattice) -> Self {
        LatticeFile {
            name: name.to_string(),
            generator: lattice.generator().to_rows(),
            exact: None,
        }
    }

    pub fn to_lattice(&self) -> Result<Lattice> {
        let rows = self.generator.len();
        if rows == 0 {
            return Err(Error::Parse("generator must have at least one row".into()));
        }
        let cols = self.generator[0].len();
        if cols == 0 || self.generator.iter().any(|r| r.len() != cols) {
            return Err(Error::Parse(
                "generator rows must be non-empty and of equal length".into(),
            ));
        }
        let data = match &self.exact {
            None => self.generator.clone(),
            Some(exact) => {
                if exact.len() != rows || exact.iter().any(|r| r.len() != cols) {
                    return Err(Error::Parse(
                        "exact rows must match the generator's shape".into(),
                    ));
                }
                exact
                    .iter()
                    .map(|row| row.iter().map(|s| parse_rational(s)).collect())
                    .collect::<Result<Vec<Vec<f64>>>>()?
            }
        };
        let gen = RealMatrix::from_rows(&data)?;
        Lattice::new(gen)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("lattice files always serialize");
        s.push('\n');
        s
    }
}

/// Parses the JSON form; errors are reported as parse failures.
pub fn parse_lattice_json(bytes: &[u8]) -> Result<LatticeFile> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse(format!("lattice file: {}", e)))
}

/// Parses "p/q" (or a plain integer) into the nearest f64.
pub fn parse_rational(s: &str) -> Result<f64> {
    let t = s.trim();
    if t.is_empty() || t.len() > MAX_RATIONAL_LEN {
        return Err(Error::Parse(format!("bad rational {:?}", s)));
    }
    let (p, q) = match t.split_once('/') {
        None => (t, "1"),
        Some((a, b)) => (a, b),
    };
    let p: BigInt = p
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {:?}", s)))?;
    let q: BigInt = q
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {:?}", s)))?;
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {:?}", s)));
    }
    let value = BigRational::new(p, q)
        .to_f64()
        .ok_or_else(|| Error::Parse(format!("rational {:?} is out of range", s)))?;
    if !value.is_finite() {
        return Err(Error::Parse(format!("rational {:?} is out of range", s)));
    }
    Ok(value)
}

/// Comma-separated list of refinement parameters. Range and monotonicity
/// are the caller's concern; this only parses.
pub fn parse_w_list(s: &str) -> Result<Vec<u64>> {
    let items: Vec<&str> = s.split(',').map(str::trim).collect();
    if items.is_empty() || items.iter().any(|t| t.is_empty()) {
        return Err(Error::Parse("empty entry in w list".into()));
    }
    if items.len() > MAX_W_LIST_LEN {
        return Err(Error::Parse("w list is too long".into()));
    }
    items
        .iter()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad w value {:?}", t)))
        })
        .collect()
}

fn parse_dim(rest: &str, family: &str, min: usize) -> Result<usize> {
    let n: usize = rest
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad dimension {:?} for {}", rest, family)))?;
    if n < min || n > MAX_BUILTIN_DIM {
        return Err(Error::Parse(format!(
            "{} dimension must be in {}..={}, got {}",
            family, min, MAX_BUILTIN_DIM, n
        )));
    }
    Ok(n)
}

/// Builtin lattice families.
pub mod builtin {
    use super::*;

    /// The integer lattice Z^n.
    pub fn zn(n: usize) -> Result<Lattice> {
        if n == 0 || n > MAX_BUILTIN_DIM {
            return Err(Error::Parse(format!("bad cubic dimension {}", n)));
        }
        Ok(Lattice::standard(n))
    }

    /// Rectangular lattice diag(c1, ..., cn), all sides positive.
    pub fn rect(sides: &[f64]) -> Result<Lattice> {
        if sides.is_empty() || sides.len() > MAX_BUILTIN_DIM {
            return Err(Error::Parse("rect needs between 1 and 64 sides".into()));
        }
        if sides.iter().any(|&c| !c.is_finite() || c <= 0.0) {
            return Err(Error::Parse("rect sides must be positive".into()));
        }
        let n = sides.len();
        let mut g = RealMatrix::zeros(n, n);
        for (i, &c) in sides.iter().enumerate() {
            g.set(i, i, c);
        }
        Lattice::new(g)
    }

    /// The hexagonal lattice, presented by the basis dual to
    /// [[1, 0], [1/2, sqrt(3)/2]] (so its own dual comes out in that
    /// canonical unit form).
    pub fn hex() -> Result<Lattice> {
        let s = 1.0 / 3.0f64.sqrt();
        Lattice::from_rows(&[vec![1.0, -s], vec![0.0, 2.0 * s]])
    }

    /// The dual of the root lattice A_n, generated by the rows
    /// e_{i+1} - (1,...,1)/(n+1) inside the sum-zero hyperplane of R^{n+1}.
    pub fn an_star(n: usize) -> Result<Lattice> {
        if n == 0 || n > MAX_BUILTIN_DIM {
            return Err(Error::Parse(format!("bad An* dimension {}", n)));
        }
        let c = 1.0 / (n + 1) as f64;
        let mut g = RealMatrix::zeros(n, n + 1);
        for i in 0..n {
            for j in 0..n + 1 {
                g.set(i, j, if j == i + 1 { 1.0 - c } else { -c });
            }
        }
        Lattice::new(g)
    }

    /// The checkerboard lattice D_n: integer vectors with even coordinate
    /// sum, n >= 2.
    pub fn dn(n: usize) -> Result<Lattice> {
        if n < 2 || n > MAX_BUILTIN_DIM {
            return Err(Error::Parse(format!("bad Dn dimension {}", n)));
        }
        let mut g = RealMatrix::zeros(n, n);
        for i in 0..n - 1 {
            g.set(i, i, 1.0);
            g.set(i, i + 1, -1.0);
        }
        g.set(n - 1, n - 2, 1.0);
        g.set(n - 1, n - 1, 1.0);
        Lattice::new(g)
    }
}

/// Recognizes builtin spec strings. `Ok(None)` means the string is not a
/// builtin and should be treated as a file path; a malformed builtin spec
/// is an error.
pub fn parse_source_spec(spec: &str) -> Result<Option<Lattice>> {
    let s = spec.trim();
    if s == "hex" {
        return builtin::hex().map(Some);
    }
    if let Some(rest) = s.strip_prefix("Zn:") {
        return builtin::zn(parse_dim(rest, "Zn", 1)?).map(Some);
    }
    if let Some(rest) = s.strip_prefix("An*:") {
        return builtin::an_star(parse_dim(rest, "An*", 1)?).map(Some);
    }
    if let Some(rest) = s.strip_prefix("Dn:") {
        return builtin::dn(parse_dim(rest, "Dn", 2)?).map(Some);
    }
    if let Some(rest) = s.strip_prefix("rect:") {
        let sides: Vec<f64> = rest
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad rect side {:?}", t)))
            })
            .collect::<Result<_>>()?;
        return builtin::rect(&sides).map(Some);
    }
    Ok(None)
}

/// Resolves a CLI lattice argument: builtin spec first, file path second.
pub fn load_lattice(spec: &str) -> Result<Lattice> {
    if let Some(l) = parse_source_spec(spec)? {
        return Ok(l);
    }
    let bytes = std::fs::read(Path::new(spec))?;
    parse_lattice_json(&bytes)?.to_lattice()
}
