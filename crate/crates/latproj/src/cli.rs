//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 a precondition
//! was violated (bad ranks, non-primitive vectors, w = 0, ...), 3 the input
//! could not be parsed or read.

use crate::approximation::{approximate, convergence_sweep, fit_loglog_slope, ApproximationResult};
use crate::error::{Error, Result};
use crate::io::{load_lattice, parse_w_list};
use crate::lattice::{primitive_check, Lattice};
use crate::matrix::{IntMatrix, RealMatrix};
use crate::projection::{
    complete_to_basis, discriminant_identity, duality_crosscheck, project, triangular_split,
};
use crate::svp::{center_density, density_gap, shortest_vector};
use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "latproj",
    version,
    about = "Approximate a target lattice by projections of a source lattice",
    after_help = format!(
        "Lattice arguments accept a builtin spec or a path to a JSON file.\nBuiltins: {}",
        crate::io::BUILTIN_HELP
    )
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find a primitive set V whose orthogonal-complement projection
    /// approximates the target at refinement w
    Approximate {
        /// Source lattice (builtin spec or JSON file)
        #[arg(long)]
        source: String,
        /// Target lattice of rank n-k
        #[arg(long)]
        target: String,
        /// Number of vectors projected out
        #[arg(long)]
        k: usize,
        /// Refinement parameter, at least 1
        #[arg(long)]
        w: u64,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the approximation over an increasing list of w values and
    /// report convergence as CSV
    Sweep {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        k: usize,
        /// Comma-separated, strictly increasing, at least three values
        #[arg(long = "w-list", value_name = "W1,W2,...")]
        w_list: String,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the projection identities, either on explicitly given lattice
    /// vectors or on seeded random instances
    Verify {
        #[arg(long)]
        source: String,
        /// Restrict the random suite to this k
        #[arg(long)]
        k: Option<usize>,
        /// A lattice vector as comma-separated coordinates; repeat to pass
        /// several (they form the set V)
        #[arg(long = "vector", value_name = "X1,X2,...")]
        vectors: Vec<String>,
        /// Seed for the random suite
        #[arg(long)]
        seed: Option<u64>,
        /// Relative tolerance for the checks
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Shortest nonzero vector by exact enumeration
    Svp {
        #[arg(long)]
        source: String,
    },
    /// Center density of a lattice, optionally compared with a second one
    Density {
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: Option<String>,
    },
}

/// Parses arguments and executes; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Approximate {
            source,
            target,
            k,
            w,
            out,
        } => cmd_approximate(&source, &target, k, w, out.as_deref()),
        Command::Sweep {
            source,
            target,
            k,
            w_list,
            out,
        } => cmd_sweep(&source, &target, k, &w_list, out.as_deref()),
        Command::Verify {
            source,
            k,
            vectors,
            seed,
            tolerance,
        } => cmd_verify(&source, k, &vectors, seed.unwrap_or(7), tolerance.unwrap_or(1e-8)),
        Command::Svp { source } => cmd_svp(&source),
        Command::Density { source, target } => cmd_density(&source, target.as_deref()),
    }
}

/// C-style scientific notation with 12 fractional digits and a signed,
/// at-least-two-digit exponent ("7.500000000000e+01").
pub fn fmt_e12(x: f64) -> String {
    let s = format!("{:.12e}", x);
    let (mant, exp) = s.split_once('e').expect("always has an exponent");
    let e: i32 = exp.parse().expect("exponent is an integer");
    format!("{}e{}{:02}", mant, if e < 0 { '-' } else { '+' }, e.abs())
}

fn write_out(out: Option<&std::path::Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(Error::from),
        None => {
            print!("{}", content);
            Ok(())
        }
    }
}

fn int_matrix_strings(m: &IntMatrix) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect())
        .collect()
}

fn projection_of(source: &Lattice, r: &ApproximationResult) -> Result<Lattice> {
    let u = complete_to_basis(&r.a_coeff)?;
    Ok(project(source, &r.v, &u)?.projected)
}

fn report_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {}", w);
    }
}

fn cmd_approximate(
    source_spec: &str,
    target_spec: &str,
    k: usize,
    w: u64,
    out: Option<&std::path::Path>,
) -> Result<i32> {
    let source = load_lattice(source_spec)?;
    let target = load_lattice(target_spec)?;
    let r = approximate(&source, &target, k, w)?;
    report_warnings(&r.warnings);
    let projected = projection_of(&source, &r)?;
    let report = serde_json::json!({
        "source": source_spec,
        "target": target_spec,
        "k": k,
        "w": w,
        "c": r.c,
        "v": r.v.to_rows(),
        "a_coeff": int_matrix_strings(&r.a_coeff),
        "h_w": int_matrix_strings(&r.h_w),
        "h_w_det": r.h_w.det().to_string(),
        "l_w_star": r.l_w_star.to_rows(),
        "projection_gram": projected.gram().to_rows(),
        "projection_det": projected.det(),
        "gram_error": r.gram_error,
        "primal_error": r.primal_error,
        "v_maxnorm": r.v_maxnorm,
    });
    let mut text =
        serde_json::to_string_pretty(&report).expect("report serialization cannot fail");
    text.push('\n');
    write_out(out, &text)?;
    Ok(0)
}

fn opt_e12(x: Option<f64>) -> String {
    match x {
        Some(v) => fmt_e12(v),
        None => "NA".to_string(),
    }
}

fn try_density(l: &Lattice) -> Result<Option<f64>> {
    match center_density(l) {
        Ok(d) => Ok(Some(d)),
        Err(Error::DimensionTooLarge(_, _)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn cmd_sweep(
    source_spec: &str,
    target_spec: &str,
    k: usize,
    w_list: &str,
    out: Option<&std::path::Path>,
) -> Result<i32> {
    let source = load_lattice(source_spec)?;
    let target = load_lattice(target_spec)?;
    let ws = parse_w_list(w_list)?;
    if ws.len() < 3 {
        return Err(Error::InvalidInput(
            "sweep needs at least three w values".into(),
        ));
    }
    let sweep = convergence_sweep(&source, &target, k, &ws)?;
    if let Some(first) = sweep.results.first() {
        report_warnings(&first.warnings);
    }

    let target_density = try_density(&target)?;
    let mut csv = String::from("w,gram_error,primal_error,V_maxnorm,density_gap,slope_so_far\n");
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for r in &sweep.results {
        let gap = match target_density {
            Some(td) => try_density(&projection_of(&source, r)?)?.map(|pd| (pd - td).abs()),
            None => None,
        };
        xs.push(r.v_maxnorm);
        ys.push(r.gram_error);
        let slope = if xs.len() >= 2 {
            fit_loglog_slope(&xs, &ys)
        } else {
            None
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.w,
            fmt_e12(r.gram_error),
            fmt_e12(r.primal_error),
            fmt_e12(r.v_maxnorm),
            opt_e12(gap),
            opt_e12(slope),
        ));
    }
    write_out(out, &csv)?;
    Ok(0)
}

fn parse_vector(s: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad coordinate {:?}", t)))
        })
        .collect::<Result<_>>()?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parse("coordinates must be finite".into()));
    }
    Ok(v)
}

struct CheckLine {
    label: String,
    passed: bool,
    detail: String,
}

impl CheckLine {
    fn print(&self) {
        println!(
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.label,
            self.detail
        );
    }
}

/// Determinant identity of a projection: det of the projected lattice
/// against det(L) / det(V V^T).
fn check_discriminant(source: &Lattice, a: &IntMatrix, label: &str, tol: f64) -> Result<CheckLine> {
    let v = a.to_real().mul(source.generator());
    let u = complete_to_basis(a)?;
    let spec = project(source, &v, &u)?;
    let (lhs, rhs) = discriminant_identity(source, &spec);
    let rel = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
    Ok(CheckLine {
        label: format!("discriminant identity {}", label),
        passed: rel <= tol,
        detail: format!("{} vs {} (rel err {:.3e})", lhs, rhs, rel),
    })
}

/// Dual-of-projection identity, checked in a rotated frame where the set's
/// coordinates become [I | 0]: the directly-written dual generator must
/// equal the dual of the projected lattice, with the predicted determinant.
fn check_dual_route(
    source: &Lattice,
    a: &IntMatrix,
    label: &str,
    tol: f64,
) -> Result<Option<CheckLine>> {
    if !source.is_full_dimensional() {
        return Ok(None);
    }
    let k = a.rows();
    let m = a.cols();
    let u = complete_to_basis(a)?;
    let rebased = Lattice::new(a.vstack(&u).to_real().mul(source.generator()))?;
    let split = triangular_split(&rebased, k)?;
    let tri = Lattice::new(split.r())?;
    let report = duality_crosscheck(&tri, &IntMatrix::zeros(k, m - k))?;
    Ok(Some(CheckLine {
        label: format!("dual of projection {}", label),
        passed: report.passes(tol),
        detail: format!(
            "dets {} vs {}, orthogonality {:.3e}, generators {}",
            report.det_direct,
            report.det_expected,
            report.orthogonality_error,
            if report.lattices_equal {
                "match"
            } else {
                "differ"
            }
        ),
    }))
}

fn random_primitive_coeffs(rng: &mut ChaCha12Rng, k: usize, m: usize) -> IntMatrix {
    // a few elementary row operations on I_m keep it unimodular; the first
    // k rows of a unimodular matrix are always primitive
    let mut u = IntMatrix::identity(m);
    for _ in 0..2 * m + 2 {
        let i = rng.random_range(0..m);
        let mut j = rng.random_range(0..m);
        if i == j {
            j = (j + 1) % m;
        }
        let t = rng.random_range(-1i64..=1);
        if t != 0 {
            for c in 0..m {
                let v = u.get(i, c) + BigInt::from(t) * u.get(j, c);
                u.set(i, c, v);
            }
        }
        if rng.random_range(0..4usize) == 0 {
            for c in 0..m {
                let a = u.get(i, c).clone();
                let b = u.get(j, c).clone();
                u.set(i, c, b);
                u.set(j, c, a);
            }
        }
    }
    let mut a = IntMatrix::zeros(k, m);
    for i in 0..k {
        for c in 0..m {
            a.set(i, c, u.get(i, c).clone());
        }
    }
    a
}

fn cmd_verify(
    source_spec: &str,
    k: Option<usize>,
    vectors: &[String],
    seed: u64,
    tol: f64,
) -> Result<i32> {
    let source = load_lattice(source_spec)?;
    let m = source.dim();
    let mut lines: Vec<CheckLine> = Vec::new();

    if !vectors.is_empty() {
        let rows: Vec<Vec<f64>> = vectors
            .iter()
            .map(|s| parse_vector(s))
            .collect::<Result<_>>()?;
        let vs = RealMatrix::from_rows(&rows)?;
        if vs.rows() >= m {
            return Err(Error::InvalidInput(format!(
                "{} vectors leave nothing to project in a rank-{} lattice",
                vs.rows(),
                m
            )));
        }
        let cert = primitive_check(&source, &vs)?;
        if !cert.is_primitive() {
            return Err(Error::NotPrimitive(cert.minor_gcd));
        }
        println!("set is primitive (minor gcd 1)");
        let a = cert.coefficient_matrix;
        lines.push(check_discriminant(&source, &a, "(given set)", tol)?);
        match check_dual_route(&source, &a, "(given set)", tol)? {
            Some(line) => lines.push(line),
            None => println!("skipping the dual-route check: the source is not full-dimensional"),
        }
    } else {
        if let Some(kk) = k {
            if kk == 0 || kk >= m {
                return Err(Error::InvalidInput(format!(
                    "k={} must satisfy 1 <= k <= {}",
                    kk,
                    m - 1
                )));
            }
        }
        let ks: Vec<usize> = match k {
            Some(kk) => vec![kk],
            None => (1..m).collect(),
        };
        println!(
            "random verification suite: seed {}, tolerance {:.1e}",
            seed, tol
        );
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        for &kk in &ks {
            for inst in 0..5 {
                let a = random_primitive_coeffs(&mut rng, kk, m);
                let label = format!("k={} instance {}", kk, inst);
                lines.push(check_discriminant(&source, &a, &label, tol)?);
                if let Some(line) = check_dual_route(&source, &a, &label, tol)? {
                    lines.push(line);
                }
            }
        }
    }

    let mut failed = 0usize;
    for line in &lines {
        line.print();
        if !line.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("all {} checks passed", lines.len());
        Ok(0)
    } else {
        println!("{} of {} checks failed", failed, lines.len());
        Ok(1)
    }
}

fn cmd_svp(source_spec: &str) -> Result<i32> {
    let source = load_lattice(source_spec)?;
    let r = shortest_vector(&source)?;
    println!("rank: {}", source.dim());
    println!("norm_sq: {}", fmt_e12(r.norm_sq));
    println!(
        "vector: [{}]",
        r.vector
            .iter()
            .map(|x| fmt_e12(*x))
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!(
        "coords: [{}]",
        r.coords
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!("nodes: {}", r.node_count);
    println!("center_density: {}", fmt_e12(center_density(&source)?));
    Ok(0)
}

fn cmd_density(source_spec: &str, target_spec: Option<&str>) -> Result<i32> {
    let source = load_lattice(source_spec)?;
    println!("source_density: {}", fmt_e12(center_density(&source)?));
    if let Some(t) = target_spec {
        let target = load_lattice(t)?;
        println!("target_density: {}", fmt_e12(center_density(&target)?));
        println!("density_gap: {}", fmt_e12(density_gap(&source, &target)?));
    }
    Ok(0)
}
