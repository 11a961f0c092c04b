//! Command-line harness: generators, single-method runs with trace CSVs,
//! region rasterization, the cross-method experiment suite.
//!
//! Exit codes: 0 success, 2 a hypothesis warning was raised, 3 a run
//! errored, 4 bad input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use oproots::harness::{self, GeneratorKind, GeneratorSpec, SuiteConfig};
use oproots::iterations::{self, IterationConfig, ScalarFamily, Window};
use oproots::matrix::{multiply, CMatrix};
use oproots::powers;
use oproots::sign;
use oproots::spectral::{self, RegionSpec};
use oproots::trace::IterationTrace;
use oproots::{mean, Error};

const EXIT_WARN: u8 = 2;
const EXIT_RUN_ERROR: u8 = 3;
const EXIT_BAD_INPUT: u8 = 4;

#[derive(Parser)]
#[command(name = "oproots", version, about = "Iterative operator roots, sign, and means")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Operator sign function of a matrix.
    Sign {
        #[arg(long = "in")]
        input: PathBuf,
        /// direct | newton
        #[arg(long, default_value = "direct")]
        method: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = 100)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Square root of a matrix.
    Sqrt {
        #[arg(long = "in")]
        input: PathBuf,
        /// newton | binomial | visser | halley | schur | riesz | sign | regularized
        #[arg(long, default_value = "newton")]
        method: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = 200)]
        max_iter: usize,
        /// Visser step parameter (X0 = I/t).
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// identity | half (X0 = (a+1)/2)
        #[arg(long, default_value = "identity")]
        x0: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Principal p-th root of a matrix.
    Root {
        #[arg(short)]
        p: usize,
        #[arg(long = "in")]
        input: PathBuf,
        /// newton | halley | sign | schur
        #[arg(long, default_value = "newton")]
        method: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = 200)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Geometric mean of two accretive matrices.
    Mean {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "in2")]
        input2: PathBuf,
        /// direct | integral
        #[arg(long, default_value = "direct")]
        method: String,
        /// Also evaluate the identity suite (symmetry, inversion,
        /// congruence, scaling) with a seeded congruence factor.
        #[arg(long)]
        identities: bool,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Region membership of W(a), or rasterize a scalar convergence region.
    Region {
        /// RegionSpec JSON file for the membership mode.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// binomial-q | newton-sqrt-f | newton-pth-q | halley-q (raster mode)
        #[arg(long)]
        family: Option<String>,
        #[arg(short, default_value_t = 3)]
        p: usize,
        #[arg(long = "re-min", default_value_t = -3.2)]
        re_min: f64,
        #[arg(long = "re-max", default_value_t = 1.6)]
        re_max: f64,
        #[arg(long = "im-min", default_value_t = -2.4)]
        im_min: f64,
        #[arg(long = "im-max", default_value_t = 2.4)]
        im_max: f64,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
        #[arg(long = "max-iter", default_value_t = 1000)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the experiment suite from a config file (or the default suite).
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a matrix with prescribed properties.
    Gen {
        /// accretive | contraction | diag | jordan | fixed
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_3)]
        theta: f64,
        #[arg(long, default_value_t = 0.15)]
        margin: f64,
        #[arg(long, default_value_t = 0.9)]
        radius: f64,
        #[arg(long = "lambda-re", default_value_t = 0.0)]
        lambda_re: f64,
        #[arg(long = "lambda-im", default_value_t = 0.0)]
        lambda_im: f64,
        /// Fixed-instance name (e12, e12-m3, riccati-pair, nonunique-pair,
        /// agh-pair).
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::BadInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_BAD_INPUT)
        }
        Err(CliError::Run(e)) => {
            eprintln!("run error: {e}");
            ExitCode::from(EXIT_RUN_ERROR)
        }
    }
}

enum CliError {
    BadInput(String),
    Run(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BadInput(m) => CliError::BadInput(m),
            other => CliError::Run(other),
        }
    }
}

type CliResult = Result<u8, CliError>;

fn read_matrix(path: &Path) -> Result<CMatrix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))
}

fn write_out(dir: &Option<PathBuf>, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = dir {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::BadInput(format!("{}: {e}", dir.display())))?;
        let path = dir.join(name);
        fs::write(&path, bytes)
            .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn write_matrix(dir: &Option<PathBuf>, name: &str, m: &CMatrix) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(m).map_err(|e| CliError::BadInput(e.to_string()))?;
    write_out(dir, name, json.as_bytes())
}

fn write_trace(dir: &Option<PathBuf>, name: &str, trace: &IterationTrace) -> Result<(), CliError> {
    write_out(dir, name, trace.to_csv().as_bytes())
}

fn exit_for(trace: &IterationTrace) -> u8 {
    if trace.warnings.is_empty() {
        0
    } else {
        EXIT_WARN
    }
}

fn dispatch(cmd: Cmd) -> CliResult {
    match cmd {
        Cmd::Sign {
            input,
            method,
            tol,
            max_iter,
            out,
        } => cmd_sign(&input, &method, tol, max_iter, &out),
        Cmd::Sqrt {
            input,
            method,
            tol,
            max_iter,
            t,
            x0,
            out,
        } => cmd_sqrt(&input, &method, tol, max_iter, t, &x0, &out),
        Cmd::Root {
            p,
            input,
            method,
            tol,
            max_iter,
            out,
        } => cmd_root(p, &input, &method, tol, max_iter, &out),
        Cmd::Mean {
            input,
            input2,
            method,
            identities,
            seed,
            out,
        } => cmd_mean(&input, &input2, &method, identities, seed, &out),
        Cmd::Region {
            spec,
            input,
            family,
            p,
            re_min,
            re_max,
            im_min,
            im_max,
            resolution,
            max_iter,
            out,
        } => cmd_region(
            spec, input, family, p, re_min, re_max, im_min, im_max, resolution, max_iter, &out,
        ),
        Cmd::Suite { config, seed, out } => cmd_suite(&config, seed, &out),
        Cmd::Gen {
            kind,
            n,
            seed,
            theta,
            margin,
            radius,
            lambda_re,
            lambda_im,
            name,
            out,
        } => cmd_gen(
            &kind, n, seed, theta, margin, radius, lambda_re, lambda_im, &name, &out,
        ),
    }
}

fn cmd_sign(
    input: &Path,
    method: &str,
    tol: f64,
    max_iter: usize,
    out: &Option<PathBuf>,
) -> CliResult {
    let a = read_matrix(input)?;
    let result = match method {
        "direct" => sign::sign_direct(&a)?,
        "newton" => sign::sign_newton(&a, tol, max_iter)?,
        other => {
            return Err(CliError::BadInput(format!(
                "unknown sign method '{other}' (direct | newton)"
            )))
        }
    };
    let id = CMatrix::identity(a.n());
    let involution = (&(&result.s * &result.s) - &id).op_norm2()?;
    let polar = (&(&result.s * &result.n_factor) - &a).op_norm2()?;
    println!("sign({}x{} input) via {method}", a.n(), a.n());
    println!("  ||S^2 - 1||      = {involution:.3e}");
    println!("  ||S N - a||      = {polar:.3e}");
    println!("  trace(E+)        = {:.6}", result.e_plus.trace().re);
    if a.n() == 1 {
        // Scalar arctan check: sign(a) = (2/pi) lim_t atan(t a).
        let z = a.at(0, 0);
        let t = 1e8;
        let atan_value = (t * z).atan() * (2.0 / std::f64::consts::PI);
        println!(
            "  (2/pi) atan(t a) = {:.6}{:+.6}i at t = 1e8 (sign = {:.6})",
            atan_value.re,
            atan_value.im,
            result.s.at(0, 0).re
        );
    }
    write_matrix(out, "sign.json", &result.s)?;
    let mut code = 0;
    if let Some(trace) = &result.trace {
        println!(
            "  newton: {} steps, converged = {}",
            trace.steps.len().saturating_sub(1),
            trace.converged
        );
        write_trace(out, "sign_trace.csv", trace)?;
        code = exit_for(trace);
    }
    Ok(code)
}

fn cmd_sqrt(
    input: &Path,
    method: &str,
    tol: f64,
    max_iter: usize,
    t: f64,
    x0: &str,
    out: &Option<PathBuf>,
) -> CliResult {
    let a = read_matrix(input)?;
    let mut cfg = IterationConfig {
        tol,
        max_iter,
        ..IterationConfig::default()
    };
    cfg.x0 = match x0 {
        "identity" => iterations::StartValue::Identity,
        "half" => iterations::StartValue::HalfAPlusI,
        other => {
            return Err(CliError::BadInput(format!(
                "unknown start '{other}' (identity | half)"
            )))
        }
    };
    let (value, residual, trace): (CMatrix, f64, Option<IterationTrace>) = match method {
        "newton" => {
            let (res, trace) = iterations::newton_sqrt(&a, &cfg)?;
            (res.value, res.residual, Some(trace))
        }
        "binomial" => {
            let id = CMatrix::identity(a.n());
            let b = &id - &a;
            let (x, trace) = iterations::binomial_method(&b, &cfg)?;
            let root = &id - &x;
            let residual = (&(&root * &root) - &a).op_norm2()?;
            (root, residual, Some(trace))
        }
        "visser" => {
            let run = iterations::visser_method(&a, t, &cfg)?;
            (run.result.value, run.result.residual, Some(run.trace))
        }
        "halley" => {
            let run = iterations::halley_pth_root(&a, 2, &cfg)?;
            (run.result.value, run.result.residual, Some(run.trace))
        }
        "schur" => {
            let res = powers::principal_power(&a, 0.5)?;
            (res.value, res.residual, None)
        }
        "riesz" => {
            let neg = powers::riesz_negative_power(&a, 0.5)?;
            let root = multiply(&a, &neg.value)?;
            let residual = (&(&root * &root) - &a).op_norm2()?;
            (root, residual, None)
        }
        "sign" => {
            let res = sign::pth_root_via_sign(&a, 2)?;
            (res.value, res.residual, None)
        }
        "regularized" => {
            // Experimental variant: trace only, nothing asserted.
            let trace = iterations::regularized_newton_sqrt_experiment(&a, tol, max_iter)?;
            println!(
                "regularized experiment: {} steps, converged = {}, last residual = {:.3e}",
                trace.steps.len().saturating_sub(1),
                trace.converged,
                trace.last_residual().unwrap_or(f64::NAN)
            );
            write_trace(out, "sqrt_trace.csv", &trace)?;
            return Ok(0);
        }
        other => {
            return Err(CliError::BadInput(format!(
                "unknown sqrt method '{other}' (newton | binomial | visser | halley | schur | riesz | sign | regularized)"
            )))
        }
    };
    println!("sqrt via {method}: residual {residual:.3e}");
    write_matrix(out, "sqrt.json", &value)?;
    let mut code = 0;
    if let Some(trace) = &trace {
        println!(
            "  {} steps, converged = {}",
            trace.steps.len().saturating_sub(1),
            trace.converged
        );
        write_trace(out, "sqrt_trace.csv", trace)?;
        code = exit_for(trace);
    }
    Ok(code)
}

fn cmd_root(
    p: usize,
    input: &Path,
    method: &str,
    tol: f64,
    max_iter: usize,
    out: &Option<PathBuf>,
) -> CliResult {
    let a = read_matrix(input)?;
    let cfg = IterationConfig {
        tol,
        max_iter,
        p,
        ..IterationConfig::default()
    };
    let (value, residual, trace): (CMatrix, f64, Option<IterationTrace>) = match method {
        "newton" => {
            let run = iterations::newton_pth_root(&a, p, &cfg)?;
            if let Some(delta) = run.delta {
                println!("  delta = ||1 - a X_1^-p|| = {delta:.6e}");
            }
            (run.result.value, run.result.residual, Some(run.trace))
        }
        "halley" => {
            let run = iterations::halley_pth_root(&a, p, &cfg)?;
            (run.result.value, run.result.residual, Some(run.trace))
        }
        "sign" => {
            let res = sign::pth_root_via_sign(&a, p)?;
            (res.value, res.residual, None)
        }
        "schur" => {
            let res = powers::principal_power(&a, 1.0 / p as f64)?;
            (res.value, res.residual, None)
        }
        other => {
            return Err(CliError::BadInput(format!(
                "unknown root method '{other}' (newton | halley | sign | schur)"
            )))
        }
    };
    println!("{p}-th root via {method}: residual {residual:.3e}");
    write_matrix(out, "root.json", &value)?;
    let mut code = 0;
    if let Some(trace) = &trace {
        println!(
            "  {} steps, converged = {}",
            trace.steps.len().saturating_sub(1),
            trace.converged
        );
        write_trace(out, "root_trace.csv", trace)?;
        code = exit_for(trace);
    }
    Ok(code)
}

fn cmd_mean(
    input: &Path,
    input2: &Path,
    method: &str,
    identities: bool,
    seed: u64,
    out: &Option<PathBuf>,
) -> CliResult {
    let a = read_matrix(input)?;
    let b = read_matrix(input2)?;
    let result = match method {
        "direct" => mean::geometric_mean(&a, &b)?,
        "integral" => mean::mean_integral(&a, &b)?,
        other => {
            return Err(CliError::BadInput(format!(
                "unknown mean method '{other}' (direct | integral)"
            )))
        }
    };
    println!("geometric mean via {method}: route {:?}", result.route);
    if let Some(r) = result.riccati_residual {
        println!("  ||G a^-1 G - b|| = {r:.3e}");
    }
    if let Some(s) = result.sector_angle {
        println!("  sector angle of W(G) = {s:.6}");
    }
    write_matrix(out, "mean.json", &result.g)?;
    if identities {
        let spec = GeneratorSpec {
            kind: GeneratorKind::DiagonalPlusSimilarity {
                radius_min: 0.5,
                radius_max: 1.5,
                axis_margin: 0.05,
            },
            n: a.n(),
            seed,
        };
        let c = harness::generate(&spec)?;
        let checks = mean::mean_identities(&a, &b, &c, 4.0, 9.0)?;
        for ch in &checks {
            println!("  {:<14} rel dev {:.3e}", ch.identity, ch.rel_dev);
        }
        let json =
            serde_json::to_string_pretty(&checks).map_err(|e| CliError::BadInput(e.to_string()))?;
        write_out(out, "identities.json", json.as_bytes())?;
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_region(
    spec: Option<PathBuf>,
    input: Option<PathBuf>,
    family: Option<String>,
    p: usize,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    resolution: usize,
    max_iter: usize,
    out: &Option<PathBuf>,
) -> CliResult {
    if let Some(family) = family {
        let family = match family.as_str() {
            "binomial-q" => ScalarFamily::BinomialQ,
            "newton-sqrt-f" => ScalarFamily::NewtonSqrtF,
            "newton-pth-q" => ScalarFamily::NewtonPthQ(p as u32),
            "halley-q" => ScalarFamily::HalleyQ(p as u32),
            other => {
                return Err(CliError::BadInput(format!(
                    "unknown family '{other}' (binomial-q | newton-sqrt-f | newton-pth-q | halley-q)"
                )))
            }
        };
        let window = Window {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        let grid = iterations::rasterize_convergence_region(family, window, resolution, max_iter)?;
        let converged = grid
            .verdicts
            .iter()
            .filter(|v| **v == iterations::PixelVerdict::Converged)
            .count();
        println!(
            "rasterized {resolution}x{resolution}: {} converged pixels ({:.1}%)",
            converged,
            100.0 * converged as f64 / grid.verdicts.len() as f64
        );
        write_out(out, "region.pgm", &grid.to_pgm())?;
        let sidecar = serde_json::json!({
            "family": family,
            "window": window,
            "resolution": resolution,
            "max_iter": max_iter,
        });
        write_out(out, "region.json", sidecar.to_string().as_bytes())?;
        return Ok(0);
    }
    let (spec_path, input_path) = match (spec, input) {
        (Some(s), Some(i)) => (s, i),
        _ => {
            return Err(CliError::BadInput(
                "region needs either --family (raster) or --spec with --in (membership)".into(),
            ))
        }
    };
    let text = fs::read_to_string(&spec_path)
        .map_err(|e| CliError::BadInput(format!("{}: {e}", spec_path.display())))?;
    let region: RegionSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::BadInput(format!("{}: {e}", spec_path.display())))?;
    let a = read_matrix(&input_path)?;
    let inside = spectral::range_in_region(&a, &region)?;
    println!("numerical range inside region: {inside}");
    Ok(if inside { 0 } else { EXIT_WARN })
}

fn cmd_suite(config: &Option<PathBuf>, seed: Option<u64>, out: &Path) -> CliResult {
    let mut config = match config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<SuiteConfig>(&text)
                .map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?
        }
        None => SuiteConfig::default_suite(),
    };
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    let report = harness::run_suite(&config)?;
    fs::create_dir_all(out).map_err(|e| CliError::BadInput(format!("{}: {e}", out.display())))?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::BadInput(e.to_string()))?;
    fs::write(out.join("report.json"), &json)
        .map_err(|e| CliError::BadInput(e.to_string()))?;
    // Wall-clock goes to a sidecar so the report itself stays reproducible.
    let timings = serde_json::to_string_pretty(&report.wall_clock_ms)
        .map_err(|e| CliError::BadInput(e.to_string()))?;
    fs::write(out.join("timings.json"), timings)
        .map_err(|e| CliError::BadInput(e.to_string()))?;
    for run in &report.runs {
        if let Some(trace) = &run.trace {
            let name = format!("run{:04}_trace.csv", run.id);
            fs::write(out.join(name), trace.to_csv())
                .map_err(|e| CliError::BadInput(e.to_string()))?;
        }
    }
    let s = &report.summary;
    println!(
        "suite: {} runs, {} certified, {} warned, {} errored, {} bound violations",
        s.total, s.certified, s.hypothesis_warned, s.errored, s.bound_violations
    );
    println!("wrote {}", out.join("report.json").display());
    Ok(if s.errored > 0 {
        EXIT_RUN_ERROR
    } else if s.hypothesis_warned > 0 {
        EXIT_WARN
    } else {
        0
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    kind: &str,
    n: usize,
    seed: u64,
    theta: f64,
    margin: f64,
    radius: f64,
    lambda_re: f64,
    lambda_im: f64,
    name: &Option<String>,
    out: &Option<PathBuf>,
) -> CliResult {
    let kind = match kind {
        "accretive" => GeneratorKind::RandomAccretive { theta, margin },
        "contraction" => GeneratorKind::ContractionBall { radius },
        "diag" => GeneratorKind::DiagonalPlusSimilarity {
            radius_min: 0.3,
            radius_max: 2.5,
            axis_margin: margin,
        },
        "jordan" => GeneratorKind::JordanBlock {
            lambda_re,
            lambda_im,
            size: n,
        },
        "fixed" => GeneratorKind::FixedInstance {
            name: name
                .clone()
                .ok_or_else(|| CliError::BadInput("--kind fixed needs --name".into()))?,
        },
        other => {
            return Err(CliError::BadInput(format!(
                "unknown generator '{other}' (accretive | contraction | diag | jordan | fixed)"
            )))
        }
    };
    let spec = GeneratorSpec { kind, n, seed };
    let matrices = harness::generate_all(&spec)?;
    if matrices.len() == 1 {
        println!("generated one {}x{} matrix", matrices[0].n(), matrices[0].n());
        match out {
            Some(_) => write_matrix(out, "matrix.json", &matrices[0])?,
            None => println!(
                "{}",
                serde_json::to_string(&matrices[0]).map_err(|e| CliError::BadInput(e.to_string()))?
            ),
        }
    } else {
        println!("generated a pair of {0}x{0} matrices", matrices[0].n());
        match out {
            Some(_) => {
                write_matrix(out, "matrix_a.json", &matrices[0])?;
                write_matrix(out, "matrix_b.json", &matrices[1])?;
            }
            None => {
                for m in &matrices {
                    println!(
                        "{}",
                        serde_json::to_string(m).map_err(|e| CliError::BadInput(e.to_string()))?
                    );
                }
            }
        }
    }
    Ok(0)
}

// Keeps Complex64 in the imports for the scalar arctan check.
#[allow(dead_code)]
fn _complex_used(z: Complex64) -> Complex64 {
    z
}
