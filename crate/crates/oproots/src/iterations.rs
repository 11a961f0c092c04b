//! Root iterations: Newton's square root in both regimes, the binomial and
//! Visser schemes, Newton and Halley p-th roots with their error-series
//! analysis, the scalar dynamics behind them, and the convergence-region
//! rasterizer.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{multiply, CMatrix};
use crate::powers::{self, RootMethod, RootResult};
use crate::schur;
use crate::spectral::{self, RegionSpec};
use crate::tol;
use crate::trace::{IterationTrace, StopReason};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IterMethod {
    NewtonSqrt,
    Binomial,
    Visser,
    NewtonPth,
    HalleyPth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartValue {
    Identity,
    HalfAPlusI,
    Custom(CMatrix),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationConfig {
    pub method: IterMethod,
    /// Root order for the p-th methods.
    pub p: usize,
    pub x0: StartValue,
    pub tol: f64,
    pub max_iter: usize,
    /// The t in X_0 = (1/t) I for the Visser scheme.
    pub visser_t: f64,
    /// Constant used in the functional-calculus bound checks; 12 by
    /// default, 2 for exploratory runs.
    pub crouzeix_k: f64,
    /// Turn on the per-step accretivity chain checks for the invertible
    /// accretive Newton regime (costly; off by default).
    pub verify_accretive_chain: bool,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            method: IterMethod::NewtonSqrt,
            p: 2,
            x0: StartValue::Identity,
            tol: tol::DEFAULT_TOL,
            max_iter: tol::DEFAULT_MAX_ITER,
            visser_t: 1.0,
            crouzeix_k: tol::CROUZEIX_K,
            verify_accretive_chain: false,
        }
    }
}

impl IterationConfig {
    fn start_matrix(&self, a: &CMatrix) -> CMatrix {
        match &self.x0 {
            StartValue::Identity => CMatrix::identity(a.n()),
            StartValue::HalfAPlusI => a.add_scaled_identity(Complex64::new(1.0, 0.0)).scale_re(0.5),
            StartValue::Custom(m) => m.clone(),
        }
    }
}

fn reference_root(a: &CMatrix, alpha: f64) -> Option<CMatrix> {
    powers::principal_power_value(a, alpha).ok()
}

fn certify(value: CMatrix, a: &CMatrix, p: usize, method: RootMethod) -> Result<RootResult> {
    let residual = (&value.powi(p) - a).op_norm2()?;
    let sector_check = powers::max_spectrum_arg(&value)?;
    Ok(RootResult {
        value,
        method,
        residual,
        sector_check,
    })
}

// ---- Newton's method for the square root ------------------------------------

/// Newton square root `X_{k+1} = (X_k + X_k^{-1} a) / 2` under either the
/// invertible-commuting hypothesis or the sectorial-numerical-range one.
pub fn newton_sqrt(a: &CMatrix, cfg: &IterationConfig) -> Result<(RootResult, IterationTrace)> {
    newton_sqrt_observed(a, cfg, |_, _| {})
}

pub fn newton_sqrt_observed(
    a: &CMatrix,
    cfg: &IterationConfig,
    obs: impl FnMut(usize, &CMatrix),
) -> Result<(RootResult, IterationTrace)> {
    let x0 = cfg.start_matrix(a);
    let dec = schur::eig(a)?;
    let threshold = tol::SINGULAR_PIVOT_REL * a.frobenius_norm();
    let invertible = dec.values.iter().all(|z| z.norm() >= threshold);
    let off_cut = dec
        .values
        .iter()
        .all(|z| powers::branch_cut_distance(*z) >= tol::BRANCH_CUT_DIST);

    let mut invertible_ok = false;
    if invertible && off_cut {
        match &cfg.x0 {
            StartValue::Identity | StartValue::HalfAPlusI => invertible_ok = true,
            StartValue::Custom(m) => {
                let comm = (&multiply(m, a)? - &multiply(a, m)?).op_norm2()?;
                let scale = m.op_norm2()? * a.op_norm2()?;
                if comm <= 1e-10 * scale.max(1e-300) {
                    let half_inv = powers::principal_power_value(a, -0.5)?;
                    let d = multiply(&half_inv, m)?;
                    let ddec = schur::eig(&d)?;
                    invertible_ok = ddec.values.iter().all(|z| z.re > 0.0);
                }
            }
        }
    }
    let mut accretive_ok = false;
    let mut sector_angle = None;
    if !invertible_ok {
        if matches!(cfg.x0, StartValue::Identity | StartValue::HalfAPlusI) {
            let report = spectral::classify(a)?;
            sector_angle = report.sector_angle;
            accretive_ok = report.sector_angle.is_some();
        }
    }
    if !invertible_ok && !accretive_ok {
        return Err(Error::PreconditionFailed(
            "newton sqrt needs an invertible commuting start or a sectorial numerical range"
                .into(),
        ));
    }
    let _ = sector_angle;

    let reference = if off_cut {
        reference_root(a, 0.5)
    } else {
        None
    };

    let chain_c = if cfg.verify_accretive_chain && invertible && off_cut {
        Some(powers::principal_power_value(a, 0.5)?)
    } else {
        None
    };

    let (x, mut trace) = newton_sqrt_raw(
        a,
        &x0,
        cfg.tol,
        cfg.max_iter,
        reference.as_ref(),
        obs,
    )?;
    if let Some(c) = chain_c {
        verify_accretive_chain(a, &x0, &c, trace.steps.len().saturating_sub(1), &mut trace)?;
    }
    let result = certify(x, a, 2, RootMethod::NewtonSqrt)?;
    Ok((result, trace))
}

/// The bare Newton loop, shared with the semisimple dichotomy check which
/// must run without the precondition gate.
pub(crate) fn newton_sqrt_raw(
    a: &CMatrix,
    x0: &CMatrix,
    tol_run: f64,
    max_iter: usize,
    reference: Option<&CMatrix>,
    mut obs: impl FnMut(usize, &CMatrix),
) -> Result<(CMatrix, IterationTrace)> {
    let id = CMatrix::identity(a.n());
    let a_norm = a.op_norm2()?;
    let cap = 1e12 * (1.0 + a_norm);
    let mut x = x0.clone();
    let mut trace = IterationTrace::new();
    let mut seen_floor = false;
    let mut rises = 0usize;
    let mut prev_rel = f64::INFINITY;
    obs(0, &x);
    for k in 0..=max_iter {
        let norm_x = x.op_norm2()?;
        if norm_x > cap {
            trace.stop = StopReason::Divergence;
            return Err(Error::Diverged {
                step: k,
                trace: Box::new(trace),
            });
        }
        let err = match reference {
            Some(r) => Some((&x - r).op_norm2()?),
            None => None,
        };
        let residual = (&multiply(&x, &x)? - a).op_norm2()?;
        if residual <= tol_run * a_norm.max(1e-300) {
            trace.push(k, norm_x, None, err, residual);
            trace.converged = true;
            trace.stop = StopReason::ResidualTol;
            return Ok((x, trace));
        }
        let lu = match x.lu() {
            Ok(lu) => lu,
            Err(_) => {
                trace.push(k, norm_x, None, err, residual);
                return Err(Error::SingularIterate {
                    step: k,
                    trace: Box::new(trace),
                });
            }
        };
        let norm_inv = lu.solve_mat(&id)?.op_norm2()?;
        trace.push(k, norm_x, Some(norm_inv), err, residual);
        if k == max_iter {
            break;
        }
        let z = lu.solve_mat(a)?;
        let next = (&x + &z).scale_re(0.5);
        let rel = (&next - &x).op_norm2()? / norm_x.max(1e-300);
        if rel < 1e-6 {
            seen_floor = true;
        }
        if seen_floor {
            if rel > prev_rel {
                rises += 1;
            } else {
                rises = 0;
            }
            if rises >= 2 {
                x = next;
                obs(k + 1, &x);
                let residual = (&multiply(&x, &x)? - a).op_norm2()?;
                trace.converged = residual <= (tol_run * 1e3) * a_norm.max(1e-300);
                trace.stop = StopReason::Stagnation;
                return Ok((x, trace));
            }
        }
        prev_rel = rel;
        x = next;
        obs(k + 1, &x);
    }
    trace.stop = StopReason::MaxIter;
    Err(Error::MaxIter {
        max_iter,
        trace: Box::new(trace),
    })
}

/// Re-run the iterates and check the accretivity chain of the invertible
/// accretive regime: X_k accretive, X_k^{-2} a accretive, and
/// W(X_k^{-1} a^{1/2}) inside the quarter-plane sector.
fn verify_accretive_chain(
    a: &CMatrix,
    x0: &CMatrix,
    c: &CMatrix,
    steps: usize,
    trace: &mut IterationTrace,
) -> Result<()> {
    let mut x = x0.clone();
    for k in 0..=steps {
        let margin_x = spectral::accretive_margin(&x)?;
        if margin_x < -tol::STRICT_MARGIN {
            trace
                .warnings
                .push(format!("X_{k} not accretive: margin {margin_x:.3e}"));
        }
        let lu = match x.lu() {
            Ok(lu) => lu,
            Err(_) => break,
        };
        let xinv_a = lu.solve_mat(a)?;
        let xinv2_a = lu.solve_mat(&xinv_a)?;
        let margin_xa = spectral::accretive_margin(&xinv2_a)?;
        if margin_xa < -tol::STRICT_MARGIN {
            trace
                .warnings
                .push(format!("X_{k}^-2 a not accretive: margin {margin_xa:.3e}"));
        }
        let xc = lu.solve_mat(c)?;
        let range = spectral::numerical_range(&xc, tol::REGION_ANGLES)?;
        let sector = RegionSpec::Sector {
            theta: std::f64::consts::FRAC_PI_4 + 1e-6,
        };
        if !spectral::hull_in_region(&range, &sector) {
            trace
                .warnings
                .push(format!("W(X_{k}^-1 a^(1/2)) escapes the pi/4 sector"));
        }
        if k == steps {
            break;
        }
        let z = lu.solve_mat(a)?;
        x = (&x + &z).scale_re(0.5);
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SemisimpleVerdict {
    /// Eigenvalue 0 is semisimple: rank(a) = rank(a^2).
    pub semisimple_at_zero: bool,
    /// Newton from (a+1)/2 reached the residual tolerance.
    pub converged: bool,
    pub has_negative_eigenvalue: bool,
    /// Convergence iff semisimple, among instances without strictly
    /// negative eigenvalues.
    pub consistent: bool,
}

/// The matrix dichotomy: Newton's square root from `X_0 = (a+1)/2`
/// converges exactly when 0 is at worst a semisimple eigenvalue.
pub fn newton_sqrt_semisimple_check(a: &CMatrix) -> Result<SemisimpleVerdict> {
    let n = a.n();
    if n > 20 {
        return Err(Error::PreconditionFailed(format!(
            "semisimple check is desk scale (n <= 20), got {n}"
        )));
    }
    let scale = a.op_norm2()?;
    let rank_threshold = 1e-8 * scale.max(1e-300);
    let rank_a = numerical_rank(a, rank_threshold)?;
    let a2 = multiply(a, a)?;
    let rank_a2 = numerical_rank(&a2, rank_threshold)?;
    let semisimple = rank_a == rank_a2;

    let dec = schur::eig(a)?;
    let has_negative = dec
        .values
        .iter()
        .any(|z| z.re < -1e-10 && z.im.abs() <= 1e-10 * scale.max(1.0));

    let x0 = a.add_scaled_identity(Complex64::new(1.0, 0.0)).scale_re(0.5);
    let outcome = newton_sqrt_raw(a, &x0, tol::DEFAULT_TOL, 150, None, |_, _| {});
    let converged = match outcome {
        Ok((_, trace)) => trace.converged,
        Err(_) => false,
    };
    let consistent = has_negative || (converged == semisimple);
    Ok(SemisimpleVerdict {
        semisimple_at_zero: semisimple,
        converged,
        has_negative_eigenvalue: has_negative,
        consistent,
    })
}

/// Rank by singular-value counting at the given threshold, with the
/// ambiguity gate: straddling values within a factor 10 of each other
/// across the threshold are refused.
fn numerical_rank(a: &CMatrix, threshold: f64) -> Result<usize> {
    let gram = multiply(&a.adjoint(), a)?;
    let dec = schur::eig(&gram)?;
    let mut svals: Vec<f64> = dec.values.iter().map(|z| z.re.max(0.0).sqrt()).collect();
    svals.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let rank = svals.iter().filter(|&&s| s > threshold).count();
    if rank > 0 && rank < svals.len() {
        let kept = svals[rank - 1];
        let dropped = svals[rank];
        if dropped > 0.0 && kept / dropped < 10.0 {
            return Err(Error::RankAmbiguous(kept / dropped));
        }
    }
    Ok(rank)
}

// ---- Binomial and Visser schemes ---------------------------------------------

/// Binomial iteration `X_{n+1} = (b + X_n^2)/2` from `X_0 = 0`; converges
/// to `1 - (1-b)^{1/2}` when W(b) stays in the cardioid/disk union. A
/// hypothesis violation is recorded as a warning and the run proceeds.
pub fn binomial_method(b: &CMatrix, cfg: &IterationConfig) -> Result<(CMatrix, IterationTrace)> {
    let n = b.n();
    let id = CMatrix::identity(n);
    let region_ok = spectral::range_in_region(b, &RegionSpec::DiskUnion)?;
    let one_minus_b = &id - b;
    let reference = reference_root(&one_minus_b, 0.5).map(|r| &id - &r);
    let scale = one_minus_b.op_norm2()?.max(1.0);

    let mut trace = IterationTrace::new();
    if !region_ok {
        trace
            .warnings
            .push("W(b) escapes the cardioid/unit-disk union".into());
    }
    let mut x = CMatrix::zeros(n);
    let mut seen_floor = false;
    let mut rises = 0usize;
    let mut prev_step = f64::INFINITY;
    for k in 0..=cfg.max_iter {
        let norm_x = x.op_norm2()?;
        let err = match &reference {
            Some(r) => Some((&x - r).op_norm2()?),
            None => None,
        };
        let limit_resid = (&multiply(&(&id - &x), &(&id - &x))? - &one_minus_b).op_norm2()?;
        trace.push(k, norm_x, None, err, limit_resid);
        if limit_resid <= cfg.tol * scale {
            trace.converged = true;
            trace.stop = StopReason::ResidualTol;
            return Ok((x, trace));
        }
        if norm_x > 1e8 {
            trace.stop = StopReason::Divergence;
            return Err(Error::Diverged {
                step: k,
                trace: Box::new(trace),
            });
        }
        if k == cfg.max_iter {
            break;
        }
        let next = (&multiply(&x, &x)? + b).scale_re(0.5);
        let step = (&next - &x).op_norm2()?;
        if step < 1e-6 * norm_x.max(1.0) {
            seen_floor = true;
        }
        if seen_floor {
            if step > prev_step {
                rises += 1;
            } else {
                rises = 0;
            }
            if rises >= 2 {
                x = next;
                let resid = (&multiply(&(&id - &x), &(&id - &x))? - &one_minus_b).op_norm2()?;
                trace.converged = resid <= (cfg.tol * 1e3) * scale;
                trace.stop = StopReason::Stagnation;
                return Ok((x, trace));
            }
        }
        prev_step = step;
        x = next;
    }
    trace.stop = StopReason::MaxIter;
    Err(Error::MaxIter {
        max_iter: cfg.max_iter,
        trace: Box::new(trace),
    })
}

#[derive(Debug, Clone)]
pub struct VisserRun {
    pub result: RootResult,
    pub trace: IterationTrace,
    /// Largest stepwise deviation between the direct recurrence and the
    /// substituted binomial iterates.
    pub max_substitution_dev: f64,
}

/// Visser iteration `X_{k+1} = X_k + (t/2)(a - X_k^2)` from `X_0 = (1/t) I`,
/// run in lockstep with the binomial method on `b = 1 - t^2 a`, whose
/// iterates must reproduce it exactly through `X_k = (1/t)(1 - B_k)`.
pub fn visser_method(a: &CMatrix, t: f64, cfg: &IterationConfig) -> Result<VisserRun> {
    if t <= 0.0 {
        return Err(Error::PreconditionFailed(format!(
            "visser needs t > 0, got {t}"
        )));
    }
    let n = a.n();
    let id = CMatrix::identity(n);
    let b = &id - &a.scale_re(t * t);
    let region_ok = spectral::range_in_region(&b, &RegionSpec::DiskUnion)?;
    let reference = reference_root(a, 0.5);
    let a_norm = a.op_norm2()?;

    let mut trace = IterationTrace::new();
    if !region_ok {
        trace
            .warnings
            .push("W(1 - t^2 a) escapes the cardioid/unit-disk union".into());
    }
    let mut x = id.scale_re(1.0 / t);
    let mut bin = CMatrix::zeros(n);
    let mut max_dev = 0.0f64;
    let mut converged = false;
    let mut k_stop = cfg.max_iter;
    for k in 0..=cfg.max_iter {
        let norm_x = x.op_norm2()?;
        let err = match &reference {
            Some(r) => Some((&x - r).op_norm2()?),
            None => None,
        };
        let residual = (&multiply(&x, &x)? - a).op_norm2()?;
        trace.push(k, norm_x, None, err, residual);
        let substituted = (&id - &bin).scale_re(1.0 / t);
        let dev = (&x - &substituted).op_norm2()?;
        max_dev = max_dev.max(dev);
        if dev > 1e-10 * norm_x.max(1.0) {
            trace
                .warnings
                .push(format!("substitution identity off by {dev:.3e} at step {k}"));
        }
        if residual <= cfg.tol * a_norm.max(1e-300) {
            converged = true;
            k_stop = k;
            break;
        }
        if norm_x > 1e8 * (1.0 + a_norm) {
            trace.stop = StopReason::Divergence;
            return Err(Error::Diverged {
                step: k,
                trace: Box::new(trace),
            });
        }
        if k == cfg.max_iter {
            break;
        }
        let correction = (&(a - &multiply(&x, &x)?)).scale_re(t / 2.0);
        x = &x + &correction;
        bin = (&multiply(&bin, &bin)? + &b).scale_re(0.5);
    }
    let _ = k_stop;
    if !converged {
        trace.stop = StopReason::MaxIter;
        return Err(Error::MaxIter {
            max_iter: cfg.max_iter,
            trace: Box::new(trace),
        });
    }
    trace.converged = true;
    trace.stop = StopReason::ResidualTol;
    let result = certify(x, a, 2, RootMethod::Visser)?;
    Ok(VisserRun {
        result,
        trace,
        max_substitution_dev: max_dev,
    })
}

// ---- Newton and Halley p-th roots ---------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PthHypothesis {
    /// W(a) inside the Newton convergence region D.
    RegionD,
    /// ||1 - a|| < 1 (ball hypothesis).
    BanachBall,
    /// Neither verified; the run proceeds with a warning.
    Unverified,
}

#[derive(Debug, Clone)]
pub struct NewtonPthRun {
    pub result: RootResult,
    pub trace: IterationTrace,
    pub hypothesis: PthHypothesis,
    /// `delta = ||1 - a X_1^{-p}||` when started from the identity.
    pub delta: Option<f64>,
    /// `||1 - a X_k^{-p}||` per step.
    pub id_residuals: Vec<f64>,
}

/// Newton's p-th root `X_{k+1} = X_k ((p-1) I + X_k^{-p} a) / p` from the
/// identity.
pub fn newton_pth_root(a: &CMatrix, p: usize, cfg: &IterationConfig) -> Result<NewtonPthRun> {
    if p < 2 {
        return Err(Error::PreconditionFailed(format!(
            "newton pth root needs p >= 2, got {p}"
        )));
    }
    let n = a.n();
    let id = CMatrix::identity(n);
    let hypothesis = if spectral::range_in_region(a, &RegionSpec::NewtonD { epsilon: 0.0 })? {
        PthHypothesis::RegionD
    } else if (&id - a).op_norm2()? < 1.0 {
        PthHypothesis::BanachBall
    } else {
        PthHypothesis::Unverified
    };
    let mut iterates: Vec<CMatrix> = Vec::new();
    let (x, mut trace) = newton_pth_steps(a, p, &id, cfg.tol, cfg.max_iter, |_, m| {
        iterates.push(m.clone())
    })?;
    if hypothesis == PthHypothesis::Unverified {
        trace
            .warnings
            .push("neither the region-D nor the ball hypothesis verified".into());
    }
    let mut id_residuals = Vec::with_capacity(iterates.len());
    for m in &iterates {
        let mp = m.powi(p);
        let r = match mp.lu() {
            Ok(lu) => (&lu.solve_mat(a)? - &id).op_norm2()?,
            Err(_) => f64::INFINITY,
        };
        id_residuals.push(r);
    }
    let delta = id_residuals.get(1).copied();
    let result = certify(x, a, p, RootMethod::NewtonPth)?;
    Ok(NewtonPthRun {
        result,
        trace,
        hypothesis,
        delta,
        id_residuals,
    })
}

/// Bare Newton p-th loop with an iterate observer (called with X_0 as well).
pub(crate) fn newton_pth_steps(
    a: &CMatrix,
    p: usize,
    x0: &CMatrix,
    tol_run: f64,
    max_iter: usize,
    mut obs: impl FnMut(usize, &CMatrix),
) -> Result<(CMatrix, IterationTrace)> {
    let a_norm = a.op_norm2()?;
    let cap = 1e10 * (1.0 + a_norm);
    let mut x = x0.clone();
    let mut trace = IterationTrace::new();
    let reference = reference_root(a, 1.0 / p as f64);
    obs(0, &x);
    for k in 0..=max_iter {
        let norm_x = x.op_norm2()?;
        if norm_x > cap || !norm_x.is_finite() {
            trace.stop = StopReason::Divergence;
            return Err(Error::Diverged {
                step: k,
                trace: Box::new(trace),
            });
        }
        let err = match &reference {
            Some(r) => Some((&x - r).op_norm2()?),
            None => None,
        };
        let xp = x.powi(p);
        let residual = (&xp - a).op_norm2()?;
        trace.push(k, norm_x, None, err, residual);
        if residual <= tol_run * a_norm.max(1e-300) {
            trace.converged = true;
            trace.stop = StopReason::ResidualTol;
            return Ok((x, trace));
        }
        if k == max_iter {
            break;
        }
        let lu = match xp.lu() {
            Ok(lu) => lu,
            Err(_) => {
                return Err(Error::SingularIterate {
                    step: k,
                    trace: Box::new(trace),
                });
            }
        };
        let w = lu.solve_mat(a)?;
        let inner = w.add_scaled_identity(Complex64::new(p as f64 - 1.0, 0.0));
        x = multiply(&x, &inner)?.scale_re(1.0 / p as f64);
        obs(k + 1, &x);
    }
    trace.stop = StopReason::MaxIter;
    Err(Error::MaxIter {
        max_iter,
        trace: Box::new(trace),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaReport {
    /// `||1 - a X_1^{-p}||` computed directly.
    pub delta: f64,
    /// Coefficients c_2..c_M of the expansion of `1 - z ((p-1+z)/p)^{-p}`
    /// in powers of (1-z).
    pub coefficients: Vec<f64>,
    /// Deviation between the direct matrix and the truncated series.
    pub series_deviation: f64,
    pub coefficients_positive: bool,
    /// Partial sums of the c_i stay below 1 (they telescope to 1).
    pub partial_sums_below_one: bool,
}

/// Direct-vs-series check of the contraction factor delta from the ball
/// hypothesis. The c_i come from the binomial series `b_j = C(p+j-1, j)/p^j`
/// through `c_i = b_{i-1} - b_i`, an expansion independent of the matrix
/// route.
pub fn newton_pth_delta(a: &CMatrix, p: usize) -> Result<DeltaReport> {
    const M: usize = 40;
    let n = a.n();
    let id = CMatrix::identity(n);
    let one_minus_a = &id - a;
    let beta = one_minus_a.op_norm2()?;
    if beta >= 1.0 {
        return Err(Error::PreconditionFailed(format!(
            "ball hypothesis ||1 - a|| < 1 fails: {beta}"
        )));
    }
    let tail = beta.powi(M as i32) / (1.0 - beta);
    if tail > 1e-10 {
        return Err(Error::SeriesTruncation(tail));
    }
    // Direct delta.
    let x1 = a
        .add_scaled_identity(Complex64::new(p as f64 - 1.0, 0.0))
        .scale_re(1.0 / p as f64);
    let direct = &id - &x1.powi(p).lu()?.solve_mat(a)?;
    let delta = direct.op_norm2()?;
    // Series coefficients: b_j = C(p+j-1, j) / p^j, c_i = b_{i-1} - b_i.
    let mut b = vec![1.0f64; M + 1];
    for j in 1..=M {
        b[j] = b[j - 1] * (p as f64 + j as f64 - 1.0) / (j as f64 * p as f64);
    }
    let mut coefficients = Vec::with_capacity(M - 1);
    for i in 2..=M {
        coefficients.push(b[i - 1] - b[i]);
    }
    let coefficients_positive = coefficients.iter().all(|&c| c > 0.0);
    let mut partial = 0.0;
    let mut partial_sums_below_one = true;
    for &c in &coefficients {
        partial += c;
        if partial >= 1.0 + 1e-10 {
            partial_sums_below_one = false;
        }
    }
    // Truncated matrix series.
    let mut series = CMatrix::zeros(n);
    let mut pow = multiply(&one_minus_a, &one_minus_a)?;
    for (idx, &c) in coefficients.iter().enumerate() {
        series = &series + &pow.scale_re(c);
        if idx + 1 < coefficients.len() {
            pow = multiply(&pow, &one_minus_a)?;
        }
    }
    let series_deviation = (&direct - &series).op_norm2()?;
    Ok(DeltaReport {
        delta,
        coefficients,
        series_deviation,
        coefficients_positive,
        partial_sums_below_one,
    })
}

#[derive(Debug, Clone)]
pub struct HalleyRun {
    pub result: RootResult,
    pub trace: IterationTrace,
    /// Largest commutation drift `||X Z - Z X||` across the steps.
    pub max_commutation_drift: f64,
}

/// Halley's p-th root: each step solves
/// `((p+1) X^p + (p-1) a) Z = (p-1) X^p + (p+1) a` and sets `X <- X Z`.
/// Requires strict accretivity.
pub fn halley_pth_root(a: &CMatrix, p: usize, cfg: &IterationConfig) -> Result<HalleyRun> {
    if p < 2 {
        return Err(Error::PreconditionFailed(format!(
            "halley needs p >= 2, got {p}"
        )));
    }
    let margin = spectral::accretive_margin(a)?;
    if margin < 1e-6 {
        return Err(Error::PreconditionFailed(format!(
            "halley needs a strictly accretive input (margin {margin:.3e})"
        )));
    }
    let n = a.n();
    let a_norm = a.op_norm2()?;
    let reference = reference_root(a, 1.0 / p as f64);
    let mut x = CMatrix::identity(n);
    let mut trace = IterationTrace::new();
    let mut max_drift = 0.0f64;
    for k in 0..=cfg.max_iter {
        let norm_x = x.op_norm2()?;
        let err = match &reference {
            Some(r) => Some((&x - r).op_norm2()?),
            None => None,
        };
        let xp = x.powi(p);
        let residual = (&xp - a).op_norm2()?;
        trace.push(k, norm_x, None, err, residual);
        if residual <= cfg.tol * a_norm.max(1e-300) {
            trace.converged = true;
            trace.stop = StopReason::ResidualTol;
            let result = certify(x, a, p, RootMethod::HalleyPth)?;
            return Ok(HalleyRun {
                result,
                trace,
                max_commutation_drift: max_drift,
            });
        }
        if k == cfg.max_iter {
            break;
        }
        let num = &xp.scale_re(p as f64 - 1.0) + &a.scale_re(p as f64 + 1.0);
        let den = &xp.scale_re(p as f64 + 1.0) + &a.scale_re(p as f64 - 1.0);
        let lu = match den.lu() {
            Ok(lu) => lu,
            Err(_) => {
                return Err(Error::SingularIterate {
                    step: k,
                    trace: Box::new(trace),
                });
            }
        };
        let z = lu.solve_mat(&num)?;
        let drift = (&multiply(&x, &z)? - &multiply(&z, &x)?).op_norm2()?;
        max_drift = max_drift.max(drift);
        if drift > 1e-8 * (norm_x * z.op_norm2()?).max(1.0) {
            trace
                .warnings
                .push(format!("commutation drift {drift:.3e} at step {k}"));
        }
        x = multiply(&x, &z)?;
    }
    trace.stop = StopReason::MaxIter;
    Err(Error::MaxIter {
        max_iter: cfg.max_iter,
        trace: Box::new(trace),
    })
}

/// The conjectured regularized square-root variant
/// `X_{k+1} = (X_k + X_k^{-1}(a + 3^{-k}))/2`; an experiment that only
/// produces a trace and asserts nothing.
pub fn regularized_newton_sqrt_experiment(
    a: &CMatrix,
    tol_run: f64,
    max_iter: usize,
) -> Result<IterationTrace> {
    let n = a.n();
    let a_norm = a.op_norm2()?;
    let mut x = CMatrix::identity(n);
    let mut trace = IterationTrace::new();
    let mut shift = 1.0f64;
    for k in 0..=max_iter {
        let norm_x = x.op_norm2()?;
        let residual = (&multiply(&x, &x)? - a).op_norm2()?;
        let inv = x.lu().ok().map(|lu| lu.solve_mat(&CMatrix::identity(n)));
        let norm_inv = match &inv {
            Some(Ok(m)) => Some(m.op_norm2()?),
            _ => None,
        };
        trace.push(k, norm_x, norm_inv, None, residual);
        if residual <= tol_run * a_norm.max(1e-300) {
            trace.converged = true;
            trace.stop = StopReason::ResidualTol;
            break;
        }
        if k == max_iter || norm_x > 1e10 * (1.0 + a_norm) {
            trace.stop = if k == max_iter {
                StopReason::MaxIter
            } else {
                StopReason::Divergence
            };
            break;
        }
        let lu = match x.lu() {
            Ok(lu) => lu,
            Err(_) => {
                trace.stop = StopReason::Divergence;
                break;
            }
        };
        let shifted = a.add_scaled_identity(Complex64::new(shift, 0.0));
        let z = lu.solve_mat(&shifted)?;
        x = (&x + &z).scale_re(0.5);
        shift /= 3.0;
    }
    Ok(trace)
}

// ---- Scalar dynamics -----------------------------------------------------------

/// Supremum of `h(t) = t k(t)^{2^n} / (1 - k(t)^{2^n})` on (0, 1] with
/// `k(t) = (t-1)/(t+1)`: a dense log grid plus golden-section refinement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupremumReport {
    pub supremum: f64,
    pub argmax_t: f64,
    /// The grid maximum sits at the smallest grid point (the t -> 0 limit).
    pub max_at_grid_start: bool,
    /// h is nonincreasing across the grid.
    pub monotone_on_grid: bool,
}

pub fn scalar_supremum(n: u32) -> Result<SupremumReport> {
    if !(1..=20).contains(&n) {
        return Err(Error::PreconditionFailed(format!(
            "scalar supremum needs 1 <= n <= 20, got {n}"
        )));
    }
    let h = |t: f64| -> f64 {
        // k(t)^(2^n) = exp(2^n ln((1-t)/(1+t))), an even power.
        let l = (2f64.powi(n as i32)) * ((-t).ln_1p() - t.ln_1p());
        let w = l.exp();
        if w >= 1.0 {
            return 0.0;
        }
        t * w / (-l.exp_m1())
    };
    let grid = 1_000_000usize;
    let mut best = f64::NEG_INFINITY;
    let mut best_j = 0usize;
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    for j in 0..grid {
        let expo = -12.0 * (1.0 - j as f64 / (grid - 1) as f64);
        let t = 10f64.powf(expo);
        let v = h(t);
        if v > best {
            best = v;
            best_j = j;
        }
        if v > prev * (1.0 + 1e-12) {
            monotone = false;
        }
        prev = v;
    }
    let t_of = |j: usize| 10f64.powf(-12.0 * (1.0 - j as f64 / (grid - 1) as f64));
    let (mut lo, mut hi) = (
        t_of(best_j.saturating_sub(1)),
        t_of((best_j + 1).min(grid - 1)),
    );
    let golden = 0.5 * (3.0 - 5f64.sqrt());
    for _ in 0..80 {
        let t1 = lo + golden * (hi - lo);
        let t2 = hi - golden * (hi - lo);
        if h(t1) > h(t2) {
            hi = t2;
        } else {
            lo = t1;
        }
    }
    let refined_t = 0.5 * (lo + hi);
    let refined = h(refined_t);
    let (supremum, argmax_t) = if refined > best {
        (refined, refined_t)
    } else {
        (best, t_of(best_j))
    };
    Ok(SupremumReport {
        supremum,
        argmax_t,
        max_at_grid_start: best_j == 0,
        monotone_on_grid: monotone,
    })
}

/// The error function `f_n(z) = 2 z G^{2^n} / (1 - G^{2^n})` of the Newton
/// square-root analysis, with `G = (1-z)/(1+z)`; `f_n(0) = 2^{-n}`.
pub fn scalar_error_f(z: Complex64, n: u32) -> Complex64 {
    if z.norm() == 0.0 {
        return Complex64::new(0.5f64.powi(n as i32), 0.0);
    }
    let w = cayley_power(z, n);
    2.0 * z * w / (Complex64::new(1.0, 0.0) - w)
}

/// The inverse-iterate growth function
/// `g_n(z) = (2/(1+z)) (1+G^{2^n})^{-1} prod_{k<n} (1+G^{2^k})`;
/// `g_n(0) = 2^n`.
pub fn scalar_error_g(z: Complex64, n: u32) -> Complex64 {
    if z.norm() == 0.0 {
        return Complex64::new(2f64.powi(n as i32), 0.0);
    }
    let one = Complex64::new(1.0, 0.0);
    let g0 = (one - z) / (one + z);
    let mut prod = Complex64::new(1.0, 0.0);
    let mut w = g0;
    for _ in 0..n {
        prod *= one + w;
        w = w * w;
    }
    (2.0 / (one + z)) * prod / (one + w)
}

/// `G^{2^n}` with `G = (1-z)/(1+z)`, via the logarithm so huge dyadic
/// exponents neither overflow nor lose the phase.
fn cayley_power(z: Complex64, n: u32) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let g = (one - z) / (one + z);
    let gn = g.norm();
    if gn == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let e = 2f64.powi(n as i32);
    let log_mag = e * gn.ln();
    if log_mag < -745.0 {
        return Complex64::new(0.0, 0.0);
    }
    let phase = (e * g.arg()).rem_euclid(2.0 * std::f64::consts::PI);
    Complex64::from_polar(log_mag.exp(), phase)
}

// ---- Convergence-region rasterizer ----------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarFamily {
    BinomialQ,
    NewtonSqrtF,
    NewtonPthQ(u32),
    HalleyQ(u32),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PixelVerdict {
    Converged,
    Diverged,
    Undecided,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RasterGrid {
    pub family: ScalarFamily,
    pub window: Window,
    pub resolution: usize,
    pub max_iter: usize,
    /// Row-major verdicts, row 0 at im_max.
    pub verdicts: Vec<PixelVerdict>,
}

impl RasterGrid {
    pub fn at(&self, ix: usize, iy: usize) -> PixelVerdict {
        self.verdicts[iy * self.resolution + ix]
    }

    /// Binary PGM, verdict-coded: converged 255, undecided 128, diverged 0.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.resolution, self.resolution).into_bytes();
        out.extend(self.verdicts.iter().map(|v| match v {
            PixelVerdict::Converged => 255u8,
            PixelVerdict::Undecided => 128u8,
            PixelVerdict::Diverged => 0u8,
        }));
        out
    }
}

/// Run the family's scalar recurrence at one point.
pub fn scalar_verdict(family: ScalarFamily, z: Complex64, max_iter: usize) -> PixelVerdict {
    let tol_hit = |x: Complex64, expected: Complex64| -> bool {
        (x - expected).norm() <= 1e-8 * (1.0 + expected.norm())
    };
    let escape = 1e6;
    let one = Complex64::new(1.0, 0.0);
    match family {
        ScalarFamily::BinomialQ => {
            let expected = one - (one - z).sqrt();
            let mut q = Complex64::new(0.0, 0.0);
            for _ in 0..max_iter {
                if tol_hit(q, expected) {
                    return PixelVerdict::Converged;
                }
                if q.norm() > escape || !q.re.is_finite() {
                    return PixelVerdict::Diverged;
                }
                q = 0.5 * (z + q * q);
            }
            PixelVerdict::Undecided
        }
        ScalarFamily::NewtonSqrtF => {
            let expected = z.sqrt();
            let mut x = one;
            for _ in 0..max_iter {
                if tol_hit(x, expected) {
                    return PixelVerdict::Converged;
                }
                if x.norm() > escape || x.norm() == 0.0 || !x.re.is_finite() {
                    return PixelVerdict::Diverged;
                }
                x = 0.5 * (x + z / x);
            }
            PixelVerdict::Undecided
        }
        ScalarFamily::NewtonPthQ(p) => {
            let expected = z.powf(1.0 / p as f64);
            let pf = p as f64;
            let mut x = one;
            for _ in 0..max_iter {
                if tol_hit(x, expected) {
                    return PixelVerdict::Converged;
                }
                if x.norm() > escape || x.norm() == 0.0 || !x.re.is_finite() {
                    return PixelVerdict::Diverged;
                }
                x = ((pf - 1.0) * x + z / x.powu(p - 1)) / pf;
            }
            PixelVerdict::Undecided
        }
        ScalarFamily::HalleyQ(p) => {
            let expected = z.powf(1.0 / p as f64);
            let pf = p as f64;
            let mut x = one;
            for _ in 0..max_iter {
                if tol_hit(x, expected) {
                    return PixelVerdict::Converged;
                }
                if x.norm() > escape || !x.re.is_finite() {
                    return PixelVerdict::Diverged;
                }
                let xp = x.powu(p);
                let den = (pf + 1.0) * xp + (pf - 1.0) * z;
                if den.norm() == 0.0 {
                    return PixelVerdict::Diverged;
                }
                x = x * ((pf - 1.0) * xp + (pf + 1.0) * z) / den;
            }
            PixelVerdict::Undecided
        }
    }
}

/// Escape/convergence classification per pixel over a window.
pub fn rasterize_convergence_region(
    family: ScalarFamily,
    window: Window,
    resolution: usize,
    max_iter: usize,
) -> Result<RasterGrid> {
    if resolution == 0 || resolution > 4096 {
        return Err(Error::PreconditionFailed(format!(
            "resolution must be in 1..=4096, got {resolution}"
        )));
    }
    let mut verdicts = Vec::with_capacity(resolution * resolution);
    for iy in 0..resolution {
        let im = window.im_max
            - (window.im_max - window.im_min) * ((iy as f64 + 0.5) / resolution as f64);
        for ix in 0..resolution {
            let re = window.re_min
                + (window.re_max - window.re_min) * ((ix as f64 + 0.5) / resolution as f64);
            verdicts.push(scalar_verdict(family, Complex64::new(re, im), max_iter));
        }
    }
    Ok(RasterGrid {
        family,
        window,
        resolution,
        max_iter,
        verdicts,
    })
}

/// First step index from which the bound holds through the end of the
/// error sequence.
pub fn bound_onset(errs: &[Option<f64>], bound: impl Fn(usize) -> f64) -> Option<usize> {
    let mut onset = None;
    for (k, err) in errs.iter().enumerate() {
        match err {
            Some(e) if *e <= bound(k) => {
                if onset.is_none() {
                    onset = Some(k);
                }
            }
            Some(_) => onset = None,
            None => return None,
        }
    }
    onset
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> IterationConfig {
        IterationConfig::default()
    }

    #[test]
    fn newton_sqrt_scalar_hand_iteration() {
        let a = CMatrix::scalar(c(4.0, 0.0));
        let mut iterates = Vec::new();
        let (res, trace) = newton_sqrt_observed(&a, &cfg(), |_, x| iterates.push(x.at(0, 0)))
            .unwrap();
        assert!((iterates[1] - c(2.5, 0.0)).norm() < 1e-15);
        assert!((iterates[2] - c(2.05, 0.0)).norm() < 1e-15);
        assert!((res.value.at(0, 0) - c(2.0, 0.0)).norm() < 1e-10);
        assert!(trace.converged);
    }

    #[test]
    fn newton_sqrt_identity_fixed_point() {
        let a = CMatrix::identity(3);
        let (res, trace) = newton_sqrt(&a, &cfg()).unwrap();
        assert!((&res.value - &a).op_norm2().unwrap() < 1e-14);
        assert_eq!(trace.steps.len(), 1);
    }

    #[test]
    fn newton_sqrt_rejects_nilpotent() {
        let e12 = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert!(matches!(
            newton_sqrt(&e12, &cfg()),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn semisimple_dichotomy_fixed_instances() {
        // diag(0,4): semisimple, converges to diag(0,2).
        let a = CMatrix::from_diag(&[c(0.0, 0.0), c(4.0, 0.0)]);
        let v = newton_sqrt_semisimple_check(&a).unwrap();
        assert!(v.semisimple_at_zero && v.converged && v.consistent);

        // E12: defective at 0, no convergence.
        let e12 = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let v = newton_sqrt_semisimple_check(&e12).unwrap();
        assert!(!v.semisimple_at_zero && !v.converged && v.consistent);

        // E12 + [3]: still defective at 0.
        let mut m3 = CMatrix::zeros(3);
        m3.set(0, 1, c(1.0, 0.0));
        m3.set(2, 2, c(3.0, 0.0));
        let v = newton_sqrt_semisimple_check(&m3).unwrap();
        assert!(!v.semisimple_at_zero && !v.converged && v.consistent);
    }

    #[test]
    fn binomial_zero_and_scalar_cusp() {
        let b = CMatrix::zeros(2);
        let (x, trace) = binomial_method(&b, &cfg()).unwrap();
        assert!(x.op_norm2().unwrap() < 1e-12);
        assert!(trace.converged);

        // b = 1 sits at the cusp: slow but monotone toward 1.
        let b = CMatrix::scalar(c(1.0, 0.0));
        let mut slow = cfg();
        slow.tol = 1e-4;
        slow.max_iter = 20000;
        let (x, trace) = binomial_method(&b, &slow).unwrap();
        assert!((x.at(0, 0) - c(1.0, 0.0)).norm() < 2e-2);
        assert!(trace.converged);
    }

    #[test]
    fn binomial_matches_schur_root_on_contraction() {
        let b = CMatrix::from_diag(&[c(0.5, 0.0), c(-0.3, 0.2)]);
        let (x, trace) = binomial_method(&b, &cfg()).unwrap();
        let id = CMatrix::identity(2);
        let want = &id - &powers::principal_power_value(&(&id - &b), 0.5).unwrap();
        assert!((&x - &want).op_norm2().unwrap() < 1e-8);
        // Monotone error to reference on a contraction input.
        let errs: Vec<f64> = trace.steps.iter().filter_map(|s| s.err_ref).collect();
        for w in errs.windows(2) {
            assert!(w[1] <= w[0] + 1e-13);
        }
    }

    #[test]
    fn visser_fixed_point_and_scalar() {
        let a = CMatrix::identity(2);
        let run = visser_method(&a, 1.0, &cfg()).unwrap();
        assert!((&run.result.value - &a).op_norm2().unwrap() < 1e-12);
        assert!(run.max_substitution_dev < 1e-12);

        // a = 1.5, t = 0.8: |1 - t^2 a| = 0.04 <= 1.
        let a = CMatrix::scalar(c(1.5, 0.0));
        let run = visser_method(&a, 0.8, &cfg()).unwrap();
        assert!((run.result.value.at(0, 0) - c(1.5f64.sqrt(), 0.0)).norm() < 1e-9);
        assert!(run.max_substitution_dev < 1e-10);
        assert!(run.trace.warnings.is_empty());
    }

    #[test]
    fn newton_pth_scalar_hand_iteration() {
        // a = 8, p = 3: X1 = 10/3.
        let a = CMatrix::scalar(c(8.0, 0.0));
        let mut iterates = Vec::new();
        let (x, trace) = newton_pth_steps(&a, 3, &CMatrix::identity(1), 1e-12, 100, |_, m| {
            iterates.push(m.at(0, 0))
        })
        .unwrap();
        assert!((iterates[1] - c(10.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!((x.at(0, 0) - c(2.0, 0.0)).norm() < 1e-9);
        assert!(trace.converged);
    }

    #[test]
    fn newton_pth_region_instance() {
        // 1 + 0.5i is inside D via |z - 1| <= 1.
        let a = CMatrix::scalar(c(1.0, 0.5));
        let run = newton_pth_root(&a, 3, &cfg()).unwrap();
        assert_eq!(run.hypothesis, PthHypothesis::RegionD);
        let want = c(1.0, 0.5).powf(1.0 / 3.0);
        assert!((run.result.value.at(0, 0) - want).norm() < 1e-9);
    }

    #[test]
    fn delta_report_values() {
        // Scalar a = 0.5, p = 2: X1 = 0.75, delta = |1 - 0.5 / 0.5625|.
        let a = CMatrix::scalar(c(0.5, 0.0));
        let rep = newton_pth_delta(&a, 2).unwrap();
        assert!((rep.delta - (1.0 - 0.5 / 0.5625)).abs() < 1e-12);
        assert!(rep.coefficients_positive && rep.partial_sums_below_one);
        assert!(rep.series_deviation < 1e-10);
        // p = 2: c_i = (i-1)/2^i.
        assert!((rep.coefficients[0] - 0.25).abs() < 1e-15);
        assert!((rep.coefficients[1] - 0.25).abs() < 1e-15);
        assert!((rep.coefficients[2] - 3.0 / 16.0).abs() < 1e-15);

        // a = 1: delta = 0 and the series vanishes.
        let one = CMatrix::scalar(c(1.0, 0.0));
        let rep = newton_pth_delta(&one, 3).unwrap();
        assert!(rep.delta < 1e-14 && rep.series_deviation < 1e-14);
    }

    #[test]
    fn halley_scalar_hand_iteration() {
        // a = 8, p = 3: X1 = 34/20 = 1.7.
        let a = CMatrix::scalar(c(8.0, 0.0));
        let run = halley_pth_root(&a, 3, &cfg()).unwrap();
        let first_err = run.trace.steps[1].norm_x;
        assert!((first_err - 1.7).abs() < 1e-12);
        assert!((run.result.value.at(0, 0) - c(2.0, 0.0)).norm() < 1e-10);
        assert!(run.max_commutation_drift < 1e-8);
    }

    #[test]
    fn halley_identity_fixed_point() {
        let a = CMatrix::identity(2);
        let run = halley_pth_root(&a, 5, &cfg()).unwrap();
        assert_eq!(run.trace.steps.len(), 1);
        assert!((&run.result.value - &a).op_norm2().unwrap() < 1e-14);
    }

    #[test]
    fn supremum_matches_closed_form() {
        for n in [1u32, 3] {
            let rep = scalar_supremum(n).unwrap();
            let want = 0.5f64.powi(n as i32 + 1);
            assert!(
                (rep.supremum - want).abs() <= 1e-9,
                "n = {n}: sup {} vs {want}",
                rep.supremum
            );
            assert!(rep.max_at_grid_start);
            assert!(rep.monotone_on_grid);
        }
    }

    #[test]
    fn scalar_error_function_values() {
        for n in [1u32, 4, 10] {
            let f0 = scalar_error_f(c(0.0, 0.0), n);
            assert!((f0.re - 0.5f64.powi(n as i32)).abs() < 1e-15);
            let g0 = scalar_error_g(c(0.0, 0.0), n);
            assert!((g0.re - 2f64.powi(n as i32)).abs() < 1e-15);
            // f_n(1) = 0 since the Cayley factor vanishes.
            assert!(scalar_error_f(c(1.0, 0.0), n).norm() < 1e-15);
        }
        // Continuity at 0: small real z approaches the limit value.
        let f = scalar_error_f(c(1e-9, 0.0), 5);
        assert!((f.re - 0.5f64.powi(5)).abs() < 1e-6);
        let g = scalar_error_g(c(1e-9, 0.0), 5);
        assert!((g.re - 32.0).abs() < 1e-5);
    }

    #[test]
    fn raster_fixed_points() {
        assert_eq!(
            scalar_verdict(ScalarFamily::BinomialQ, c(0.0, 0.0), 100),
            PixelVerdict::Converged
        );
        assert_eq!(
            scalar_verdict(ScalarFamily::BinomialQ, c(4.1, 0.0), 2000),
            PixelVerdict::Diverged
        );
        assert_eq!(
            scalar_verdict(ScalarFamily::NewtonPthQ(3), c(1.2, 0.1), 500),
            PixelVerdict::Converged
        );
    }

    #[test]
    fn raster_grid_and_pgm() {
        let window = Window {
            re_min: -1.0,
            re_max: 1.0,
            im_min: -1.0,
            im_max: 1.0,
        };
        let grid = rasterize_convergence_region(ScalarFamily::NewtonSqrtF, window, 16, 200)
            .unwrap();
        assert_eq!(grid.verdicts.len(), 256);
        let pgm = grid.to_pgm();
        assert!(pgm.starts_with(b"P5\n16 16\n255\n"));
        assert_eq!(pgm.len(), b"P5\n16 16\n255\n".len() + 256);
    }
}
