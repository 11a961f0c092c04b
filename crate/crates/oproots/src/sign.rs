//! The operator sign function `sign(a) = a (a^2)^{-1/2}` for spectra off
//! the imaginary axis: direct evaluation, the Newton iteration
//! `X_{k+1} = (X_k + X_k^{-1})/2` with its closed-form iterates, block
//! constructions, the sign-based Sylvester solver, and the sign-based
//! p-th root through a block companion matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::iterations;
use crate::matrix::{multiply, CMatrix};
use crate::powers::{self, RootMethod, RootResult};
use crate::schur;
use crate::spectral;
use crate::tol;
use crate::trace::{IterationTrace, StopReason};

/// Sign of an operator together with its spectral idempotents and the
/// factor `N = (a^2)^{1/2}` from the polar-like splitting `a = S N`.
#[derive(Debug, Clone)]
pub struct SignResult {
    pub s: CMatrix,
    pub e_plus: CMatrix,
    pub e_minus: CMatrix,
    pub n_factor: CMatrix,
    /// Present when computed by the Newton iteration.
    pub trace: Option<IterationTrace>,
    /// The first Newton iterates X_1, X_2, X_3, kept for the closed-form
    /// identity checks.
    pub early_iterates: Vec<CMatrix>,
}

fn check_off_imaginary_axis(a: &CMatrix) -> Result<Vec<Complex64>> {
    let dec = schur::eig(a)?;
    for &z in &dec.values {
        if z.re.abs() < tol::IMAG_AXIS_DIST {
            return Err(Error::ImaginarySpectrum(z));
        }
    }
    Ok(dec.values)
}

fn idempotents(n: usize, s: &CMatrix) -> (CMatrix, CMatrix) {
    let id = CMatrix::identity(n);
    let e_plus = (&id + s).scale_re(0.5);
    let e_minus = (&id - s).scale_re(0.5);
    (e_plus, e_minus)
}

/// Sign by the defining formula `S = a (a^2)^{-1/2}`.
pub fn sign_direct(a: &CMatrix) -> Result<SignResult> {
    check_off_imaginary_axis(a)?;
    let a2 = multiply(a, a)?;
    let s = multiply(a, &powers::principal_power_value(&a2, -0.5)?)?;
    let n_factor = powers::principal_power_value(&a2, 0.5)?;
    let (e_plus, e_minus) = idempotents(a.n(), &s);
    Ok(SignResult {
        s,
        e_plus,
        e_minus,
        n_factor,
        trace: None,
        early_iterates: Vec::new(),
    })
}

/// Newton iteration for the sign, `X_0 = a`, with the direct route as the
/// error reference in the trace.
pub fn sign_newton(a: &CMatrix, tol_step: f64, max_iter: usize) -> Result<SignResult> {
    let reference = sign_direct(a)?;
    let (s, trace, early) = sign_newton_core(a, tol_step, max_iter, Some(&reference.s))?;
    let (e_plus, e_minus) = idempotents(a.n(), &s);
    Ok(SignResult {
        s,
        e_plus,
        e_minus,
        n_factor: reference.n_factor,
        trace: Some(trace),
        early_iterates: early,
    })
}

/// The raw Newton loop; used directly where no reference is wanted (block
/// companion matrices, Sylvester blocks).
pub(crate) fn sign_newton_core(
    a: &CMatrix,
    tol_step: f64,
    max_iter: usize,
    reference: Option<&CMatrix>,
) -> Result<(CMatrix, IterationTrace, Vec<CMatrix>)> {
    check_off_imaginary_axis(a)?;
    let n = a.n();
    let id = CMatrix::identity(n);
    let scale_cap = 1e12 * (1.0 + a.op_norm2()?);
    let mut x = a.clone();
    let mut trace = IterationTrace::new();
    let mut early: Vec<CMatrix> = Vec::new();
    let mut seen_floor = false;
    let mut rises = 0usize;
    let mut prev_rel = f64::INFINITY;
    for k in 0..=max_iter {
        let norm_x = x.op_norm2()?;
        if norm_x > scale_cap {
            trace.stop = StopReason::Divergence;
            return Err(Error::Diverged {
                step: k,
                trace: Box::new(trace),
            });
        }
        let err = match reference {
            Some(s) => Some((&x - s).op_norm2()?),
            None => None,
        };
        let residual = (&multiply(&x, &x)? - &id).op_norm2()?;
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
        let x_inv = lu.solve_mat(&id)?;
        let norm_inv = x_inv.op_norm2()?;
        trace.push(k, norm_x, Some(norm_inv), err, residual);
        if k == max_iter {
            break;
        }
        let next = (&x + &x_inv).scale_re(0.5);
        let rel = (&next - &x).op_norm2()? / norm_x.max(1e-300);
        if early.len() < 3 {
            early.push(next.clone());
        }
        if rel <= tol_step {
            x = next;
            let norm_x = x.op_norm2()?;
            let err = match reference {
                Some(s) => Some((&x - s).op_norm2()?),
                None => None,
            };
            let residual = (&multiply(&x, &x)? - &id).op_norm2()?;
            trace.push(k + 1, norm_x, None, err, residual);
            trace.converged = true;
            trace.stop = StopReason::ResidualTol;
            return Ok((x, trace, early));
        }
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
                // Floating-point floor: the step size stopped shrinking.
                x = next;
                trace.converged =
                    (&multiply(&x, &x)? - &id).op_norm2()? <= 1e-6 * (1.0 + norm_x * norm_x);
                trace.stop = StopReason::Stagnation;
                return Ok((x, trace, early));
            }
        }
        prev_rel = rel;
        x = next;
    }
    trace.stop = StopReason::MaxIter;
    Err(Error::MaxIter {
        max_iter,
        trace: Box::new(trace),
    })
}

/// Sign of the antidiagonal block matrix `[[0, a], [b, 0]]`.
pub fn sign_block(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(a.n(), b.n()));
    }
    let n = a.n();
    let ba = multiply(b, a)?;
    let dec = schur::eig(&ba)?;
    for &z in &dec.values {
        if powers::branch_cut_distance(z) < tol::BRANCH_CUT_DIST {
            return Err(Error::NegativeSpectrum(z));
        }
    }
    let mut m = CMatrix::zeros(2 * n);
    m.set_block(0, n, a);
    m.set_block(n, 0, b);
    Ok(sign_direct(&m)?.s)
}

/// Solution of `a x - x b = y` read off the sign of `[[a, y], [0, b]]`.
#[derive(Debug, Clone)]
pub struct SylvesterSolution {
    pub x: CMatrix,
    /// `||a x - x b - y||`.
    pub residual: f64,
}

/// Sign-based Sylvester solver. Requires the spectra of `a` and `-b` to
/// lie strictly on the same open side of the imaginary axis; both
/// orientations are accepted and the extraction sign follows suit.
pub fn sylvester_solve(a: &CMatrix, b: &CMatrix, y: &CMatrix) -> Result<SylvesterSolution> {
    let n = a.n();
    if b.n() != n || y.n() != n {
        return Err(Error::DimensionMismatch(n, b.n().max(y.n())));
    }
    let side = |m: &CMatrix| -> Result<i32> {
        let values = check_off_imaginary_axis(m)?;
        let pos = values.iter().filter(|z| z.re > 0.0).count();
        if pos == values.len() {
            Ok(1)
        } else if pos == 0 {
            Ok(-1)
        } else {
            Ok(0)
        }
    };
    let sa = side(a)?;
    let sb = side(b)?;
    if sa == 0 || sb == 0 || sa == sb {
        return Err(Error::SpectraNotSeparated);
    }
    let mut m = CMatrix::zeros(2 * n);
    m.set_block(0, 0, a);
    m.set_block(0, n, y);
    m.set_block(n, n, b);
    let s = sign_direct(&m)?.s;
    let x = s.block(0, n, n).scale_re(0.5 * sa as f64);
    let residual = (&(&multiply(a, &x)? - &multiply(&x, b)?) - y).op_norm2()?;
    Ok(SylvesterSolution { x, residual })
}

/// `1 + 2 sum_{k=1}^{floor(p/4)} cos(2 pi k / p)`, the scaling factor of
/// the companion-matrix root extraction.
pub fn sigma_factor(p: usize) -> f64 {
    let r = p / 4;
    let mut sigma = 1.0;
    for k in 1..=r {
        sigma += 2.0 * (2.0 * std::f64::consts::PI * k as f64 / p as f64).cos();
    }
    sigma
}

/// Square root through the sign of `[[0, a], [I, 0]]`, whose 1-2 block is
/// `a^{1/2}`. Stays inside the sign-function machinery so the companion
/// route remains independent of the triangular power route.
fn sign_sqrt(a: &CMatrix) -> Result<CMatrix> {
    let n = a.n();
    let mut m = CMatrix::zeros(2 * n);
    m.set_block(0, n, a);
    m.set_block(n, 0, &CMatrix::identity(n));
    let (s, _, _) = sign_newton_core(&m, 1e-13, 120, None)?;
    Ok(s.block(0, n, n))
}

/// Principal p-th root through the sign of a block companion matrix:
/// odd p is doubled (squaring `a`), multiples of 4 are halved (taking
/// square roots of `a`) until p = 2 mod 4, then `a^{1/p}` is the scaled
/// 1-2 block of `sign(C)` with `a` in the top-right corner of C.
pub fn pth_root_via_sign(a: &CMatrix, p: usize) -> Result<RootResult> {
    if p < 2 {
        return Err(Error::PreconditionFailed(format!(
            "pth root needs p >= 2, got {p}"
        )));
    }
    let n = a.n();
    let dec = schur::eig(a)?;
    let threshold = tol::SINGULAR_PIVOT_REL * a.frobenius_norm();
    let mut max_arg = 0.0f64;
    for &z in &dec.values {
        if z.norm() < threshold {
            return Err(Error::Singular {
                pivot: z.norm(),
                threshold,
            });
        }
        if powers::branch_cut_distance(z) < tol::BRANCH_CUT_DIST {
            return Err(Error::NegativeSpectrum(z));
        }
        max_arg = max_arg.max(z.im.atan2(z.re).abs());
    }
    let mut p_cur = p;
    let mut a_cur = a.clone();
    let mut rounds = 0usize;
    if p_cur % 2 == 1 {
        // Doubling squares the spectrum; valid only when no argument
        // crosses pi/2, otherwise the squared matrix loses the branch.
        if max_arg >= std::f64::consts::FRAC_PI_2 - 1e-9 {
            return Err(Error::PreconditionFailed(
                "odd p needs the spectrum inside the open right half-plane".into(),
            ));
        }
        a_cur = multiply(&a_cur, &a_cur)?;
        p_cur *= 2;
        rounds += 1;
    }
    while p_cur % 4 == 0 {
        if rounds >= 10 {
            return Err(Error::PreprocessingOverflow(10));
        }
        a_cur = sign_sqrt(&a_cur)?;
        p_cur /= 2;
        rounds += 1;
    }
    debug_assert_eq!(p_cur % 4, 2);

    let m = p_cur;
    let mut companion = CMatrix::zeros(m * n);
    let id = CMatrix::identity(n);
    for i in 1..m {
        companion.set_block(i * n, (i - 1) * n, &id);
    }
    companion.set_block(0, (m - 1) * n, &a_cur);
    let (s, _, _) = sign_newton_core(&companion, 1e-13, 120, None)?;
    let v = s.block(0, n, n);
    let value = v.scale_re(m as f64 / (2.0 * sigma_factor(m)));

    let residual = powers::root_residual(&value, a, 1.0 / p as f64)?;
    let sector_check = powers::max_spectrum_arg(&value)?;
    Ok(RootResult {
        value,
        method: RootMethod::SignCompanion,
        residual,
        sector_check,
    })
}

/// Newton's p-th root for `e^{i theta} a` started at `e^{i theta/p} I`,
/// compared step by step against the rotation of the baseline run from the
/// identity. The trace's err column holds the relative stepwise deviation.
pub fn rotated_newton_start(a: &CMatrix, theta: f64, p: usize) -> Result<IterationTrace> {
    spectral::rotation_path_clear(a, theta, 32)?;
    let n = a.n();
    let id = CMatrix::identity(n);
    let mut baseline: Vec<CMatrix> = Vec::new();
    let (_, _base_trace) = iterations::newton_pth_steps(
        a,
        p,
        &id,
        tol::DEFAULT_TOL,
        tol::DEFAULT_MAX_ITER,
        |_, x| baseline.push(x.clone()),
    )?;
    let omega = Complex64::from_polar(1.0, theta / p as f64);
    let rotated_input = a.scale(Complex64::from_polar(1.0, theta));
    let x0 = id.scale(omega);
    let mut devs: Vec<f64> = Vec::new();
    let (limit, mut trace) = iterations::newton_pth_steps(
        &rotated_input,
        p,
        &x0,
        tol::DEFAULT_TOL,
        tol::DEFAULT_MAX_ITER,
        |k, y| {
            if k < baseline.len() {
                let expected = baseline[k].scale(omega);
                let scale = expected.op_norm2().unwrap_or(1.0).max(1e-300);
                let dev = (y - &expected).op_norm2().unwrap_or(f64::INFINITY) / scale;
                devs.push(dev);
            }
        },
    )?;
    for (step, dev) in trace.steps.iter_mut().zip(&devs) {
        step.err_ref = Some(*dev);
    }
    // Certify the limit against the rotated principal root.
    let expected_limit = powers::principal_power_value(a, 1.0 / p as f64)?.scale(omega);
    let limit_dev =
        (&limit - &expected_limit).op_norm2()? / expected_limit.op_norm2()?.max(1e-300);
    if limit_dev > 1e-7 {
        trace
            .warnings
            .push(format!("rotated limit off by {limit_dev:.3e} relative"));
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sign_of_real_diagonal() {
        let a = CMatrix::from_diag(&[c(2.0, 0.0), c(-3.0, 0.0)]);
        let r = sign_direct(&a).unwrap();
        let want = CMatrix::from_diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!((&r.s - &want).op_norm2().unwrap() < 1e-12);
        let eplus_want = CMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((&r.e_plus - &eplus_want).op_norm2().unwrap() < 1e-12);
    }

    #[test]
    fn right_half_plane_spectrum_gives_identity() {
        let a = CMatrix::from_rows(&[vec![c(2.0, 1.0), c(0.5, 0.0)], vec![c(0.0, 0.3), c(1.0, -2.0)]])
            .unwrap();
        let r = sign_direct(&a).unwrap();
        assert!((&r.s - &CMatrix::identity(2)).op_norm2().unwrap() < 1e-10);
    }

    #[test]
    fn similarity_covariance() {
        let v = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.4, 0.1)], vec![c(-0.2, 0.0), c(1.1, 0.0)]])
            .unwrap();
        let d = CMatrix::from_diag(&[c(1.0, 2.0), c(-3.0, 1.0)]);
        let vinv = v.inverse().unwrap();
        let a = multiply(&multiply(&v, &d).unwrap(), &vinv).unwrap();
        let got = sign_direct(&a).unwrap().s;
        let sd = CMatrix::from_diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let want = multiply(&multiply(&v, &sd).unwrap(), &vinv).unwrap();
        assert!((&got - &want).op_norm2().unwrap() < 1e-10);
    }

    #[test]
    fn imaginary_spectrum_rejected() {
        let a = CMatrix::from_diag(&[c(0.0, 1.0), c(1.0, 0.0)]);
        assert!(matches!(
            sign_direct(&a),
            Err(Error::ImaginarySpectrum(_))
        ));
    }

    #[test]
    fn newton_fixed_point_and_scalar_run() {
        let a = CMatrix::from_diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let r = sign_newton(&a, 1e-12, 50).unwrap();
        assert!((&r.s - &a).op_norm2().unwrap() < 1e-14);
        let t = r.trace.unwrap();
        assert!(t.converged);

        // Scalar 3: X1 = 5/3, X2 = 17/15, limit 1.
        let a = CMatrix::scalar(c(3.0, 0.0));
        let r = sign_newton(&a, 1e-14, 60).unwrap();
        assert!((r.early_iterates[0].at(0, 0) - c(5.0 / 3.0, 0.0)).norm() < 1e-14);
        assert!((r.early_iterates[1].at(0, 0) - c(17.0 / 15.0, 0.0)).norm() < 1e-14);
        assert!((r.s.at(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn newton_matches_direct_and_closed_form() {
        let a = CMatrix::from_rows(&[
            vec![c(1.5, 0.4), c(0.3, -0.2)],
            vec![c(0.1, 0.0), c(-2.0, 0.7)],
        ])
        .unwrap();
        let direct = sign_direct(&a).unwrap();
        let newton = sign_newton(&a, 1e-13, 80).unwrap();
        assert!((&newton.s - &direct.s).op_norm2().unwrap() < 1e-8);

        // Closed form X_k = (1 - G^{2^k})^{-1} (1 + G^{2^k}) S, G = kappa(N).
        let id = CMatrix::identity(2);
        let n_factor = &direct.n_factor;
        let g0 = multiply(
            &(n_factor - &id),
            &(n_factor + &id).inverse().unwrap(),
        )
        .unwrap();
        let mut gpow = multiply(&g0, &g0).unwrap(); // G^{2^1}
        for (k, xk) in newton.early_iterates.iter().enumerate() {
            let closed = multiply(
                &(&id - &gpow).inverse().unwrap(),
                &multiply(&(&id + &gpow), &direct.s).unwrap(),
            )
            .unwrap();
            let scale = closed.op_norm2().unwrap();
            assert!(
                (xk - &closed).op_norm2().unwrap() <= 1e-6 * scale,
                "closed form mismatch at k = {}",
                k + 1
            );
            gpow = multiply(&gpow, &gpow).unwrap();
        }
    }

    #[test]
    fn block_sign_structure() {
        // a = b = I: sign([[0,I],[I,0]]) = [[0,I],[I,0]].
        let i2 = CMatrix::identity(2);
        let s = sign_block(&i2, &i2).unwrap();
        assert!((s.block(0, 2, 2).op_norm2().unwrap() - 1.0).abs() < 1e-10);
        assert!(s.block(0, 0, 2).op_norm2().unwrap() < 1e-10);

        // b = I, a = diag(4,9): top-right diag(2,3), bottom-left diag(1/2,1/3).
        let a = CMatrix::from_diag(&[c(4.0, 0.0), c(9.0, 0.0)]);
        let s = sign_block(&a, &i2).unwrap();
        let tr = s.block(0, 2, 2);
        let bl = s.block(2, 0, 2);
        let want_tr = CMatrix::from_diag(&[c(2.0, 0.0), c(3.0, 0.0)]);
        let want_bl = CMatrix::from_diag(&[c(0.5, 0.0), c(1.0 / 3.0, 0.0)]);
        assert!((&tr - &want_tr).op_norm2().unwrap() < 1e-9);
        assert!((&bl - &want_bl).op_norm2().unwrap() < 1e-9);
    }

    #[test]
    fn sylvester_scalar_and_matrix_cases() {
        // a = -1, b = 1, y = 2: -x - x = 2 so x = -1.
        let a = CMatrix::scalar(c(-1.0, 0.0));
        let b = CMatrix::scalar(c(1.0, 0.0));
        let y = CMatrix::scalar(c(2.0, 0.0));
        let sol = sylvester_solve(&a, &b, &y).unwrap();
        assert!((sol.x.at(0, 0) - c(-1.0, 0.0)).norm() < 1e-10);
        assert!(sol.residual < 1e-10);

        // a = -I, b = I: x = -y/2; both orientations work.
        let i2 = CMatrix::identity(2);
        let minus = i2.scale_re(-1.0);
        let y = CMatrix::from_rows(&[vec![c(1.0, 2.0), c(0.0, -1.0)], vec![c(3.0, 0.0), c(0.5, 0.5)]])
            .unwrap();
        let sol = sylvester_solve(&minus, &i2, &y).unwrap();
        assert!((&sol.x - &y.scale_re(-0.5)).op_norm2().unwrap() < 1e-10);
        let sol2 = sylvester_solve(&i2.scale_re(2.0), &minus, &y).unwrap();
        // 2x + x = y
        assert!((&sol2.x - &y.scale_re(1.0 / 3.0)).op_norm2().unwrap() < 1e-10);
    }

    #[test]
    fn sylvester_rejects_mixed_spectra() {
        let a = CMatrix::from_diag(&[c(-1.0, 0.0), c(2.0, 0.0)]);
        let b2 = CMatrix::from_diag(&[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            sylvester_solve(&a, &b2, &b2),
            Err(Error::SpectraNotSeparated)
        ));
    }

    #[test]
    fn sigma_values() {
        assert!((sigma_factor(2) - 1.0).abs() < 1e-15);
        assert!((sigma_factor(4) - 1.0).abs() < 1e-15); // 1 + 2cos(pi/2)
        assert!((sigma_factor(6) - 2.0).abs() < 1e-14); // 1 + 2cos(pi/3)
    }

    #[test]
    fn companion_root_p2() {
        let a = CMatrix::from_diag(&[c(4.0, 0.0), c(9.0, 0.0)]);
        let r = pth_root_via_sign(&a, 2).unwrap();
        let want = CMatrix::from_diag(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert!((&r.value - &want).op_norm2().unwrap() < 1e-9);
        assert!(r.residual < 1e-8);
    }

    #[test]
    fn companion_root_odd_p_through_doubling() {
        // p = 3, a = 8: preprocess to p = 6, a = 64, sigma = 2, root 2.
        let a = CMatrix::scalar(c(8.0, 0.0));
        let r = pth_root_via_sign(&a, 3).unwrap();
        assert!((r.value.at(0, 0) - c(2.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn companion_root_p4_through_halving() {
        let a = CMatrix::scalar(c(16.0, 0.0));
        let r = pth_root_via_sign(&a, 4).unwrap();
        assert!((r.value.at(0, 0) - c(2.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn rotated_start_tracks_baseline() {
        let a = CMatrix::from_diag(&[c(1.0, 0.2), c(2.0, -0.3)]);
        let trace = rotated_newton_start(&a, std::f64::consts::FRAC_PI_3, 3).unwrap();
        assert!(trace.converged);
        for step in &trace.steps {
            if let Some(dev) = step.err_ref {
                assert!(dev <= 1e-9, "stepwise deviation {dev}");
            }
        }
        assert!(trace.warnings.is_empty(), "{:?}", trace.warnings);
    }
}
