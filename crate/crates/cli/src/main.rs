use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use majorize::field::{
    approx_hull_membership, continuation_ds_probe, demo_counterexamples, exact_mixture_field_2x2,
    pointwise_majorization_check, tracial_field_refuter, DemoReport, MatrixField,
};
use majorize::finite::{
    birkhoff_decompose, chain_links, decide_joint_majorization, mixture_from_ds, t_transform_mixture,
    tracial_refuter, unistochastic3_check, Certificate, Construction, DoublyStochastic,
};
use majorize::io;
use majorize::linalg::AbelianFamily;
use majorize::{Error, Tolerances};

/// Sampled hyperplane-max functions tried before declaring no refutation.
const REFUTER_TRIALS: usize = 1000;

/// Stored and recomputed residuals must agree this closely.
const VERIFY_MATCH: f64 = 1e-12;

#[derive(Parser)]
#[command(name = "majorize", version, about = "Joint majorization of commuting Hermitian families")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative feasibility slack for witness searches.
    #[arg(long, global = true)]
    feas_tol: Option<f64>,
    /// Largest residual accepted for an exact certificate.
    #[arg(long, global = true)]
    cert_tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Birkhoff,
    Ttransform,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether A is jointly majorized by B.
    Check { a: PathBuf, b: PathBuf },
    /// Build a unitary-mixture certificate for A ≺ B, or re-verify one.
    Certify {
        a: PathBuf,
        b: PathBuf,
        /// Birkhoff decomposition of the witness, or a T-transform chain (m = 1).
        #[arg(long, value_enum, default_value = "birkhoff")]
        method: Method,
        /// Write the certificate here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Recompute the residual of an existing certificate.
        #[arg(long, value_name = "CERT")]
        verify: Option<PathBuf>,
    },
    /// Pointwise check of two fields on the same grid.
    FieldCheck {
        a: PathBuf,
        b: PathBuf,
        /// Also follow witnesses along the grid and report their jumps.
        #[arg(long)]
        continuation: bool,
    },
    /// Build an approximate field certificate, or re-verify one.
    FieldCertify {
        a: PathBuf,
        b: PathBuf,
        /// Target accuracy; the residual is at most 4ε.
        #[arg(long, required_unless_present_any = ["verify", "witness"])]
        epsilon: Option<f64>,
        /// Certify n = 2 fields exactly from this witness field.
        #[arg(long, value_name = "DSFIELD", conflicts_with = "epsilon")]
        witness: Option<PathBuf>,
        /// Write the certificate here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Recompute the residual of an existing certificate.
        #[arg(long, value_name = "CERT")]
        verify: Option<PathBuf>,
    },
    /// Birkhoff decomposition of a doubly stochastic matrix.
    DecomposeDs { x: PathBuf },
    /// Decide whether a 3×3 doubly stochastic matrix is unistochastic.
    Unistochastic3 { x: PathBuf },
    /// Run a bundled counterexample: prop31, prop33 or cor34.
    Demo {
        name: String,
        /// Grid spacing on [−1, 1].
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Directory for report.json and series.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Process outcome apart from errors.
enum Verdict {
    Yes,
    No,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Verdict::Yes) => ExitCode::SUCCESS,
        Ok(Verdict::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Verdict> {
    let mut tol = Tolerances::default();
    if let Some(f) = cli.feas_tol {
        ensure_positive("--feas-tol", f)?;
        tol.feasibility = f;
    }
    if let Some(c) = cli.cert_tol {
        ensure_positive("--cert-tol", c)?;
        tol.cert = c;
    }
    let seed = cli.seed;
    match cli.command {
        Command::Check { a, b } => check(&read_family(&a, &tol)?, &read_family(&b, &tol)?, seed, &tol),
        Command::Certify {
            a,
            b,
            method,
            out,
            verify,
        } => {
            let (a, b) = (read_family(&a, &tol)?, read_family(&b, &tol)?);
            match verify {
                Some(path) => verify_certificate(&a, &b, &path, &tol),
                None => certify(&a, &b, method, out.as_deref(), seed, &tol),
            }
        }
        Command::FieldCheck { a, b, continuation } => {
            field_check(&read_field(&a, &tol)?, &read_field(&b, &tol)?, continuation, seed, &tol)
        }
        Command::FieldCertify {
            a,
            b,
            epsilon,
            witness,
            out,
            verify,
        } => {
            let (a, b) = (read_field(&a, &tol)?, read_field(&b, &tol)?);
            if let Some(path) = verify {
                return verify_field_certificate(&a, &b, &path, &tol);
            }
            let cert = match (witness, epsilon) {
                (Some(path), _) => {
                    let x = io::parse_ds_field(&read(&path)?).with_context(|| path.display().to_string())?;
                    let mixture = exact_mixture_field_2x2(&a, &b, &x, None, seed, &tol)?;
                    let residual = mixture.max_residual(&a, &b)?;
                    io::FieldCertificate {
                        mixture,
                        residual,
                        epsilon: None,
                    }
                }
                (None, Some(eps)) => match approx_hull_membership(&a, &b, eps, seed, &tol) {
                    Ok(c) => io::FieldCertificate {
                        mixture: c.mixture,
                        residual: c.residual,
                        epsilon: Some(eps),
                    },
                    Err(Error::NotPointwiseMajorized { points }) => {
                        println!("not pointwise majorized at {} point(s)", points.len());
                        for p in points {
                            println!("  x = {:?}", a.space().point(p));
                        }
                        return Ok(Verdict::No);
                    }
                    Err(e) => return Err(e.into()),
                },
                (None, None) => bail!("--epsilon or --witness is required"),
            };
            emit(&io::encode_field_certificate(&cert), out.as_deref())?;
            let bound = field_bound(&cert, &tol);
            eprintln!("residual: {:e} (bound {:e})", cert.residual, bound);
            Ok(verdict(cert.residual <= bound))
        }
        Command::DecomposeDs { x } => {
            let x = read_ds(&x)?;
            for term in birkhoff_decompose(&x)? {
                println!("{:.12} {:?}", term.weight, term.permutation.perm());
            }
            Ok(Verdict::Yes)
        }
        Command::Unistochastic3 { x } => {
            let x = read_ds(&x)?;
            let uni = unistochastic3_check(&x)?;
            println!("unistochastic: {uni}");
            for (r, s) in [(0, 1), (0, 2), (1, 2)] {
                let [l0, l1, l2] = chain_links(&x, r, s);
                println!("  rows {r},{s}: links {l0:.12} {l1:.12} {l2:.12}");
            }
            Ok(verdict(uni))
        }
        Command::Demo { name, step, out } => {
            let report = demo_counterexamples(&name, step, seed, &tol)?;
            print_demo(&report);
            if let Some(dir) = out {
                write_demo(&report, &dir)?;
            }
            Ok(Verdict::Yes)
        }
    }
}

fn ensure_positive(flag: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("{flag} must be a positive number, got {v}");
    }
    Ok(())
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Yes
    } else {
        Verdict::No
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_family(path: &Path, tol: &Tolerances) -> Result<AbelianFamily> {
    io::parse_family_with(&read(path)?, tol).with_context(|| path.display().to_string())
}

fn read_field(path: &Path, tol: &Tolerances) -> Result<MatrixField> {
    io::parse_field_with(&read(path)?, tol).with_context(|| path.display().to_string())
}

fn read_ds(path: &Path) -> Result<DoublyStochastic> {
    io::parse_ds(&read(path)?).with_context(|| path.display().to_string())
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_rows(x: &DoublyStochastic) {
    for row in x.rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.12}")).collect();
        println!("  {}", cells.join(" "));
    }
}

fn check(a: &AbelianFamily, b: &AbelianFamily, seed: u64, tol: &Tolerances) -> Result<Verdict> {
    let decision = decide_joint_majorization(a, b, seed, tol)?;
    println!("majorized: {}", decision.majorized);
    match &decision.witness {
        Some(x) => {
            println!("witness:");
            print_rows(x);
        }
        None => report_refutation(a, b, seed)?,
    }
    Ok(verdict(decision.majorized))
}

fn report_refutation(a: &AbelianFamily, b: &AbelianFamily, seed: u64) -> Result<()> {
    if let Some(g) = tracial_refuter(a, b, REFUTER_TRIALS, seed)? {
        println!("refuting function: {}", serde_json::to_string(&g)?);
    }
    Ok(())
}

fn certify(
    a: &AbelianFamily,
    b: &AbelianFamily,
    method: Method,
    out: Option<&Path>,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let decision = decide_joint_majorization(a, b, seed, tol)?;
    let Some(x) = &decision.witness else {
        println!("majorized: false");
        report_refutation(a, b, seed)?;
        return Ok(Verdict::No);
    };
    let (mixture, construction) = match method {
        Method::Birkhoff => (mixture_from_ds(x, &decision.eigen_a, &decision.eigen_b)?, Construction::Birkhoff),
        Method::Ttransform => (
            t_transform_mixture(&decision.eigen_a, &decision.eigen_b)?.mixture,
            Construction::TTransform,
        ),
    };
    let residual = mixture.residual(a, b)?;
    let cert = Certificate {
        mixture,
        residual,
        construction,
    };
    emit(&io::encode_certificate(&cert), out)?;
    eprintln!("residual: {residual:e}");
    Ok(verdict(residual <= tol.cert))
}

fn verify_certificate(a: &AbelianFamily, b: &AbelianFamily, path: &Path, tol: &Tolerances) -> Result<Verdict> {
    let cert = io::parse_certificate(&read(path)?).with_context(|| path.display().to_string())?;
    let residual = cert.mixture.residual(a, b)?;
    let diff = (residual - cert.residual).abs();
    println!("residual: {residual:e} (stored {:e}, difference {diff:e})", cert.residual);
    Ok(verdict(residual <= tol.cert && diff <= VERIFY_MATCH))
}

fn field_bound(cert: &io::FieldCertificate, tol: &Tolerances) -> f64 {
    cert.epsilon.map_or(tol.cert, |e| 4.0 * e)
}

fn verify_field_certificate(a: &MatrixField, b: &MatrixField, path: &Path, tol: &Tolerances) -> Result<Verdict> {
    let cert = io::parse_field_certificate(&read(path)?).with_context(|| path.display().to_string())?;
    let residual = cert.mixture.max_residual(a, b)?;
    let diff = (residual - cert.residual).abs();
    let bound = field_bound(&cert, tol);
    println!(
        "residual: {residual:e} (stored {:e}, difference {diff:e}, bound {bound:e})",
        cert.residual
    );
    Ok(verdict(residual <= bound && diff <= VERIFY_MATCH))
}

fn field_check(a: &MatrixField, b: &MatrixField, continuation: bool, seed: u64, tol: &Tolerances) -> Result<Verdict> {
    let check = pointwise_majorization_check(a, b, seed, tol)?;
    for p in 0..a.len() {
        let ok = !check.failures.contains(&p);
        println!("x = {:?}: {}", a.space().point(p), if ok { "majorized" } else { "not majorized" });
    }
    println!(
        "pointwise: {} of {} points majorized",
        a.len() - check.failures.len(),
        a.len()
    );
    if !check.majorized {
        if let Some((p, g)) = tracial_field_refuter(a, b, REFUTER_TRIALS, seed)? {
            println!(
                "refuting function at x = {:?}: {}",
                a.space().point(p),
                serde_json::to_string(&g)?
            );
        }
        return Ok(Verdict::No);
    }
    if continuation {
        let report = continuation_ds_probe(a, b, seed, tol)?;
        let (l, r) = report.jump_location;
        println!(
            "continuation (heuristic): max jump {:.9} between x = {:?} and x = {:?}",
            report.max_jump,
            a.space().point(l),
            a.space().point(r)
        );
    }
    Ok(Verdict::Yes)
}

fn print_demo(r: &DemoReport) {
    println!("demo {}: {} points, step {}", r.name, r.points, r.step);
    println!(
        "pointwise: {}",
        if r.pointwise_majorized {
            "majorized at every point".to_string()
        } else {
            format!("fails at {} point(s)", r.pointwise_failures.len())
        }
    );
    if let Some(j) = &r.continuation {
        println!(
            "continuation ({}): max_jump {:.9} between x = {} and x = {}",
            j.evidence, j.max_jump, j.left_x, j.right_x
        );
    }
    if let Some(valid) = r.ds_valid_everywhere {
        println!("doubly stochastic at every point: {valid}");
    }
    if let Some(ex) = &r.unistochastic_exceptions {
        println!("unistochastic at non-degenerate points: {}", ex.len());
    }
    if let Some(ap) = &r.approx {
        println!(
            "approximate certificate: epsilon {} residual {:e} bound {} cells {} terms {}",
            ap.epsilon, ap.residual, ap.bound, ap.cells, ap.terms
        );
    }
}

fn write_demo(r: &DemoReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut json = serde_json::to_string_pretty(r)?;
    json.push('\n');
    fs::write(dir.join("report.json"), json)?;
    let mut w = csv::Writer::from_path(dir.join("series.csv"))?;
    for row in &r.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
