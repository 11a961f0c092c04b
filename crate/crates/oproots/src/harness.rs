//! Matrix generators with prescribed spectral properties, the experiment
//! suite runner over (generator x method x tolerance), and its
//! deterministic serialized report.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iterations::{self, IterationConfig};
use crate::matrix::CMatrix;
use crate::powers;
use crate::schur;
use crate::sign;
use crate::spectral;
use crate::tol;
use crate::trace::IterationTrace;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// Random diagonal spectrum conjugated by a bounded similarity.
    DiagonalPlusSimilarity {
        radius_min: f64,
        radius_max: f64,
        /// Keep every eigenvalue at least this far from the imaginary axis.
        axis_margin: f64,
    },
    /// Eigenvalue arguments inside [-theta + margin, theta - margin],
    /// verified a posteriori on the numerical range.
    RandomAccretive { theta: f64, margin: f64 },
    /// `a = 1 - r u` with `||u|| <= 1`.
    ContractionBall { radius: f64 },
    JordanBlock {
        lambda_re: f64,
        lambda_im: f64,
        size: usize,
    },
    FixedInstance { name: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub n: usize,
    pub seed: u64,
}

/// Derive the seed of run number `counter` from a master seed.
pub fn derive_seed(master: u64, counter: u64) -> u64 {
    let mut state = master ^ counter.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn unit(rng: &mut ChaCha20Rng) -> f64 {
    rng.random::<f64>()
}

fn random_complex(rng: &mut ChaCha20Rng) -> Complex64 {
    Complex64::new(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0)
}

fn random_matrix(rng: &mut ChaCha20Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, |_, _| random_complex(rng))
}

/// Random similarity with condition number at most `kappa_cap`.
fn random_similarity(rng: &mut ChaCha20Rng, n: usize, kappa_cap: f64) -> Result<CMatrix> {
    for _ in 0..tol::GENERATOR_RETRIES {
        let r = random_matrix(rng, n);
        let scale = r.op_norm2()?.max(1e-300);
        let v = &CMatrix::identity(n) + &r.scale_re(0.35 / scale);
        let inv = match v.inverse() {
            Ok(m) => m,
            Err(_) => continue,
        };
        if v.op_norm2()? * inv.op_norm2()? <= kappa_cap {
            return Ok(v);
        }
    }
    Err(Error::GenerationExhausted(tol::GENERATOR_RETRIES))
}

/// Generate the matrix (or matrix pair, for the fixed paired instances)
/// described by the spec. Deterministic in (spec, seed).
pub fn generate_all(spec: &GeneratorSpec) -> Result<Vec<CMatrix>> {
    if spec.n > 200 {
        return Err(Error::PreconditionFailed(format!(
            "generators are desk scale (n <= 200), got {}",
            spec.n
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    match &spec.kind {
        GeneratorKind::DiagonalPlusSimilarity {
            radius_min,
            radius_max,
            axis_margin,
        } => {
            let n = spec.n;
            for _ in 0..tol::GENERATOR_RETRIES {
                let mut diag = Vec::with_capacity(n);
                for _ in 0..n {
                    let mut lambda = Complex64::new(0.0, 0.0);
                    for _ in 0..tol::GENERATOR_RETRIES {
                        let r = radius_min + (radius_max - radius_min) * unit(&mut rng);
                        let phi = std::f64::consts::PI * (2.0 * unit(&mut rng) - 1.0);
                        lambda = Complex64::from_polar(r, phi);
                        if lambda.re.abs() >= *axis_margin {
                            break;
                        }
                    }
                    if lambda.re.abs() < *axis_margin {
                        return Err(Error::GenerationExhausted(tol::GENERATOR_RETRIES));
                    }
                    diag.push(lambda);
                }
                let v = random_similarity(&mut rng, n, 20.0)?;
                let d = CMatrix::from_diag(&diag);
                let a = &(&v * &d) * &v.inverse()?;
                // The similarity can push eigenvalue approximations around;
                // re-verify the axis distance on the assembled matrix.
                let dec = schur::eig(&a)?;
                if dec.values.iter().all(|z| z.re.abs() >= 0.5 * axis_margin) {
                    return Ok(vec![a]);
                }
            }
            Err(Error::GenerationExhausted(tol::GENERATOR_RETRIES))
        }
        GeneratorKind::RandomAccretive { theta, margin } => {
            if *margin >= *theta {
                return Err(Error::BadInput(format!(
                    "accretive generator needs margin < theta, got {margin} >= {theta}"
                )));
            }
            let n = spec.n;
            for _ in 0..tol::GENERATOR_RETRIES {
                let diag: Vec<Complex64> = (0..n)
                    .map(|_| {
                        let r = 0.3 + 2.2 * unit(&mut rng);
                        let phi = (theta - margin) * (2.0 * unit(&mut rng) - 1.0);
                        Complex64::from_polar(r, phi)
                    })
                    .collect();
                let v = random_similarity(&mut rng, n, 20.0)?;
                let d = CMatrix::from_diag(&diag);
                let a = &(&v * &d) * &v.inverse()?;
                // Conjugation can grow W(a) past the eigenvalue sector.
                if let Some(angle) = spectral::sector_angle_of(&a)? {
                    if angle <= *theta {
                        return Ok(vec![a]);
                    }
                }
            }
            Err(Error::GenerationExhausted(tol::GENERATOR_RETRIES))
        }
        GeneratorKind::ContractionBall { radius } => {
            let n = spec.n;
            let u = random_matrix(&mut rng, n);
            let scale = u.op_norm2()?.max(1e-300);
            let shrink = unit(&mut rng);
            let a = &CMatrix::identity(n) - &u.scale_re(radius * shrink / scale);
            Ok(vec![a])
        }
        GeneratorKind::JordanBlock {
            lambda_re,
            lambda_im,
            size,
        } => {
            let s = *size;
            let lambda = Complex64::new(*lambda_re, *lambda_im);
            let mut m = CMatrix::zeros(s);
            for i in 0..s {
                m.set(i, i, lambda);
                if i + 1 < s {
                    m.set(i, i + 1, Complex64::new(1.0, 0.0));
                }
            }
            Ok(vec![m])
        }
        GeneratorKind::FixedInstance { name } => fixed_instance(name),
    }
}

/// First (or only) matrix of the generated instance.
pub fn generate(spec: &GeneratorSpec) -> Result<CMatrix> {
    Ok(generate_all(spec)?.remove(0))
}

/// The concrete matrices the theory singles out, by name.
pub fn fixed_instance(name: &str) -> Result<Vec<CMatrix>> {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match name {
        "e12" | "e12-m2" => {
            let mut m = CMatrix::zeros(2);
            m.set(0, 1, one);
            Ok(vec![m])
        }
        "e12-m3" => {
            let mut m = CMatrix::zeros(3);
            m.set(0, 1, one);
            Ok(vec![m])
        }
        "riccati-pair" => {
            let b = CMatrix::from_rows(&[
                vec![one, one],
                vec![Complex64::new(-2.0, 0.0), Complex64::new(1.0 / 3.0, 0.0)],
            ])?;
            let a = b.inverse()?;
            Ok(vec![a, b])
        }
        "nonunique-pair" => Ok(vec![
            CMatrix::from_diag(&[i, Complex64::new(2.0, 0.0)]),
            CMatrix::from_diag(&[i, Complex64::new(0.5, 0.0)]),
        ]),
        "agh-pair" => Ok(vec![
            CMatrix::from_diag(&[Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0)]),
            CMatrix::from_diag(&[Complex64::new(1.0, -1.0), Complex64::new(1.0, 1.0)]),
        ]),
        other => Err(Error::BadInput(format!("unknown fixed instance '{other}'"))),
    }
}

// ---- Suite runner ----------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum MethodSpec {
    SignNewton,
    NewtonSqrt,
    Binomial,
    Visser { t: f64 },
    NewtonPth { p: usize },
    HalleyPth { p: usize },
    PthViaSign { p: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorTemplate {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub master_seed: u64,
    pub seeds_per_case: usize,
    pub generators: Vec<GeneratorTemplate>,
    pub methods: Vec<MethodSpec>,
    pub tolerances: Vec<f64>,
    pub max_iter: usize,
}

impl SuiteConfig {
    /// The default desk-scale suite.
    pub fn default_suite() -> Self {
        Self {
            master_seed: 7,
            seeds_per_case: 50,
            generators: vec![
                GeneratorTemplate {
                    kind: GeneratorKind::RandomAccretive {
                        theta: std::f64::consts::FRAC_PI_3,
                        margin: 0.15,
                    },
                    n: 6,
                },
                GeneratorTemplate {
                    kind: GeneratorKind::ContractionBall { radius: 0.9 },
                    n: 6,
                },
                GeneratorTemplate {
                    kind: GeneratorKind::DiagonalPlusSimilarity {
                        radius_min: 0.3,
                        radius_max: 2.5,
                        axis_margin: 0.05,
                    },
                    n: 8,
                },
            ],
            methods: vec![
                MethodSpec::SignNewton,
                MethodSpec::NewtonSqrt,
                MethodSpec::Binomial,
                MethodSpec::Visser { t: 1.0 },
                MethodSpec::NewtonPth { p: 3 },
                MethodSpec::HalleyPth { p: 3 },
            ],
            tolerances: vec![tol::DEFAULT_TOL],
            max_iter: tol::DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunState {
    Certified,
    HypothesisWarned,
    Errored,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub id: usize,
    pub generator: GeneratorSpec,
    pub method: MethodSpec,
    pub tol: f64,
    pub state: RunState,
    pub steps: usize,
    pub final_residual: Option<f64>,
    pub fitted_order: Option<f64>,
    /// Converged but failed the residual/principality certificate.
    pub bound_violation: bool,
    pub error: Option<String>,
    pub warnings: Vec<String>,
    /// Full trace, written to per-run CSV files by the harness consumer;
    /// not part of the serialized report.
    #[serde(skip)]
    pub trace: Option<IterationTrace>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub certified: usize,
    pub hypothesis_warned: usize,
    pub errored: usize,
    pub bound_violations: usize,
    pub max_certified_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: SuiteConfig,
    pub runs: Vec<RunRecord>,
    pub summary: SuiteSummary,
    /// Wall clock per run id, kept out of the deterministic report and
    /// emitted as a separate timing sidecar.
    #[serde(skip)]
    pub wall_clock_ms: Vec<(usize, f64)>,
}

/// Execute the configured cross-product. Per-run failures are captured in
/// the report; nothing aborts the suite.
pub fn run_suite(config: &SuiteConfig) -> Result<ExperimentReport> {
    let mut runs = Vec::new();
    let mut wall_clock = Vec::new();
    let mut counter = 0u64;
    for template in &config.generators {
        for method in &config.methods {
            for &tol_run in &config.tolerances {
                for _ in 0..config.seeds_per_case {
                    let seed = derive_seed(config.master_seed, counter);
                    counter += 1;
                    let id = runs.len();
                    let spec = GeneratorSpec {
                        kind: template.kind.clone(),
                        n: template.n,
                        seed,
                    };
                    let started = std::time::Instant::now();
                    let record = run_one(id, &spec, method, tol_run, config.max_iter);
                    wall_clock.push((id, started.elapsed().as_secs_f64() * 1e3));
                    runs.push(record);
                }
            }
        }
    }
    let summary = summarize(&runs);
    Ok(ExperimentReport {
        config: config.clone(),
        runs,
        summary,
        wall_clock_ms: wall_clock,
    })
}

fn summarize(runs: &[RunRecord]) -> SuiteSummary {
    let certified = runs.iter().filter(|r| r.state == RunState::Certified).count();
    let warned = runs
        .iter()
        .filter(|r| r.state == RunState::HypothesisWarned)
        .count();
    let errored = runs.iter().filter(|r| r.state == RunState::Errored).count();
    let bound_violations = runs.iter().filter(|r| r.bound_violation).count();
    let max_certified_residual = runs
        .iter()
        .filter(|r| r.state == RunState::Certified)
        .filter_map(|r| r.final_residual)
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |m| m.max(v)))
        });
    SuiteSummary {
        total: runs.len(),
        certified,
        hypothesis_warned: warned,
        errored,
        bound_violations,
        max_certified_residual,
    }
}

struct RunOutcome {
    trace: Option<IterationTrace>,
    residual: Option<f64>,
    /// The certified principality check, when the method produces a root.
    principal_ok: Option<bool>,
    input_scale: f64,
}

fn run_one(
    id: usize,
    spec: &GeneratorSpec,
    method: &MethodSpec,
    tol_run: f64,
    max_iter: usize,
) -> RunRecord {
    let base = RunRecord {
        id,
        generator: spec.clone(),
        method: method.clone(),
        tol: tol_run,
        state: RunState::Errored,
        steps: 0,
        final_residual: None,
        fitted_order: None,
        bound_violation: false,
        error: None,
        warnings: Vec::new(),
        trace: None,
    };
    let a = match generate(spec) {
        Ok(a) => a,
        Err(e) => {
            let mut rec = base;
            rec.error = Some(format!("generator: {e}"));
            return rec;
        }
    };
    match execute_method(&a, method, tol_run, max_iter) {
        Ok(outcome) => {
            let mut rec = base;
            let warnings = outcome
                .trace
                .as_ref()
                .map(|t| t.warnings.clone())
                .unwrap_or_default();
            let converged = outcome.trace.as_ref().map_or(true, |t| t.converged);
            rec.steps = outcome
                .trace
                .as_ref()
                .map_or(0, |t| t.steps.len().saturating_sub(1));
            rec.final_residual = outcome.residual;
            rec.fitted_order = outcome
                .trace
                .as_ref()
                .and_then(|t| t.fitted_order(outcome.input_scale.max(1.0)));
            let residual_ok = outcome
                .residual
                .map_or(false, |r| r <= 10.0 * tol_run * outcome.input_scale.max(1.0));
            let principal_ok = outcome.principal_ok.unwrap_or(true);
            rec.bound_violation = converged && !(residual_ok && principal_ok);
            rec.state = if !converged || rec.bound_violation {
                RunState::Errored
            } else if warnings.is_empty() {
                RunState::Certified
            } else {
                RunState::HypothesisWarned
            };
            if !converged {
                rec.error = Some("did not converge".into());
            }
            rec.warnings = warnings;
            rec.trace = outcome.trace;
            rec
        }
        Err(e) => {
            let mut rec = base;
            rec.trace = e.trace().cloned();
            rec.steps = rec
                .trace
                .as_ref()
                .map_or(0, |t| t.steps.len().saturating_sub(1));
            rec.error = Some(e.to_string());
            rec
        }
    }
}

fn execute_method(
    a: &CMatrix,
    method: &MethodSpec,
    tol_run: f64,
    max_iter: usize,
) -> Result<RunOutcome> {
    let mut cfg = IterationConfig {
        tol: tol_run,
        max_iter,
        ..IterationConfig::default()
    };
    let scale = a.op_norm2()?;
    let sector_cap = |p: usize| std::f64::consts::PI / p as f64 + 1e-6;
    match method {
        MethodSpec::SignNewton => {
            let r = sign::sign_newton(a, tol_run, max_iter)?;
            let id = CMatrix::identity(a.n());
            let residual = (&(&r.s * &r.s) - &id).op_norm2()?;
            Ok(RunOutcome {
                trace: r.trace,
                residual: Some(residual),
                principal_ok: None,
                input_scale: 1.0 + r.s.op_norm2()?.powi(2),
            })
        }
        MethodSpec::NewtonSqrt => {
            let (res, trace) = iterations::newton_sqrt(a, &cfg)?;
            Ok(RunOutcome {
                trace: Some(trace),
                residual: Some(res.residual),
                principal_ok: Some(res.sector_check <= sector_cap(2)),
                input_scale: scale,
            })
        }
        MethodSpec::Binomial => {
            let (x, trace) = iterations::binomial_method(a, &cfg)?;
            let id = CMatrix::identity(a.n());
            let root = &id - &x;
            let residual = trace.last_residual();
            let principal = powers::max_spectrum_arg(&root)? <= sector_cap(2);
            Ok(RunOutcome {
                trace: Some(trace),
                residual,
                principal_ok: Some(principal),
                input_scale: 1.0 + scale,
            })
        }
        MethodSpec::Visser { t } => {
            let run = iterations::visser_method(a, *t, &cfg)?;
            Ok(RunOutcome {
                trace: Some(run.trace),
                residual: Some(run.result.residual),
                principal_ok: Some(run.result.sector_check <= sector_cap(2)),
                input_scale: scale,
            })
        }
        MethodSpec::NewtonPth { p } => {
            cfg.p = *p;
            let run = iterations::newton_pth_root(a, *p, &cfg)?;
            Ok(RunOutcome {
                trace: Some(run.trace),
                residual: Some(run.result.residual),
                principal_ok: Some(run.result.sector_check <= sector_cap(*p)),
                input_scale: scale,
            })
        }
        MethodSpec::HalleyPth { p } => {
            cfg.p = *p;
            let run = iterations::halley_pth_root(a, *p, &cfg)?;
            Ok(RunOutcome {
                trace: Some(run.trace),
                residual: Some(run.result.residual),
                principal_ok: Some(run.result.sector_check <= sector_cap(*p)),
                input_scale: scale,
            })
        }
        MethodSpec::PthViaSign { p } => {
            let res = sign::pth_root_via_sign(a, *p)?;
            Ok(RunOutcome {
                trace: None,
                residual: Some(res.residual),
                principal_ok: Some(res.sector_check <= sector_cap(*p)),
                input_scale: scale,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jordan_block_instance() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::JordanBlock {
                lambda_re: 0.0,
                lambda_im: 0.0,
                size: 2,
            },
            n: 2,
            seed: 1,
        };
        let m = generate(&spec).unwrap();
        assert_eq!(m.n(), 2);
        assert!((m.at(0, 1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(m.at(0, 0).norm() < 1e-15);
    }

    #[test]
    fn fixed_instances_resolve() {
        let agh = fixed_instance("agh-pair").unwrap();
        assert_eq!(agh.len(), 2);
        assert!((agh[0].at(0, 0) - Complex64::new(1.0, 1.0)).norm() < 1e-15);
        assert!(fixed_instance("nope").is_err());
        assert_eq!(fixed_instance("riccati-pair").unwrap().len(), 2);
    }

    #[test]
    fn accretive_generator_is_deterministic_and_sectorial() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::RandomAccretive {
                theta: std::f64::consts::FRAC_PI_3,
                margin: 0.1,
            },
            n: 5,
            seed: 42,
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert!((&a - &b).frobenius_norm() == 0.0, "determinism");
        let angle = spectral::sector_angle_of(&a).unwrap().unwrap();
        assert!(angle <= std::f64::consts::FRAC_PI_3 + 1e-12);
    }

    #[test]
    fn contraction_generator_stays_in_ball() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::ContractionBall { radius: 0.9 },
            n: 6,
            seed: 3,
        };
        let a = generate(&spec).unwrap();
        let dist = (&CMatrix::identity(6) - &a).op_norm2().unwrap();
        assert!(dist <= 0.9 + 1e-12);
    }

    #[test]
    fn tiny_suite_runs_and_serializes() {
        let config = SuiteConfig {
            master_seed: 11,
            seeds_per_case: 2,
            generators: vec![GeneratorTemplate {
                kind: GeneratorKind::RandomAccretive {
                    theta: std::f64::consts::FRAC_PI_4,
                    margin: 0.1,
                },
                n: 4,
            }],
            methods: vec![MethodSpec::NewtonSqrt, MethodSpec::HalleyPth { p: 3 }],
            tolerances: vec![1e-10],
            max_iter: 100,
        };
        let report = run_suite(&config).unwrap();
        assert_eq!(report.runs.len(), 4);
        assert_eq!(report.summary.errored, 0, "{:?}", report.runs);
        assert_eq!(report.summary.bound_violations, 0);
        // Lossless round-trip of the serialized report.
        let json = serde_json::to_string_pretty(&report).unwrap();
        let back: ExperimentReport = serde_json::from_str(&json).unwrap();
        let again = serde_json::to_string_pretty(&back).unwrap();
        assert_eq!(json, again);
    }

    #[test]
    fn empty_method_list_gives_empty_report() {
        let config = SuiteConfig {
            master_seed: 1,
            seeds_per_case: 5,
            generators: vec![],
            methods: vec![],
            tolerances: vec![1e-10],
            max_iter: 50,
        };
        let report = run_suite(&config).unwrap();
        assert_eq!(report.summary.total, 0);
    }

    #[test]
    fn suite_is_deterministic() {
        let mut config = SuiteConfig::default_suite();
        config.seeds_per_case = 2;
        config.generators.truncate(1);
        config.methods = vec![MethodSpec::NewtonSqrt, MethodSpec::SignNewton];
        let r1 = run_suite(&config).unwrap();
        let r2 = run_suite(&config).unwrap();
        let j1 = serde_json::to_string(&r1).unwrap();
        let j2 = serde_json::to_string(&r2).unwrap();
        assert_eq!(j1, j2);
    }
}
