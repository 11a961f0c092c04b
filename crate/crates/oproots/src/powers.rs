//! Principal fractional powers by two general routes: scalar functional
//! calculus on the Schur triangular factor (Parlett-style recurrence with a
//! 2x2 Sylvester block fallback for clustered eigenvalues), and the
//! resolvent-integral quadrature
//! `x^{-a} = sin(pi a)/pi * integral of t^{-a} (t + x)^{-1} dt`.
//! Constructed-instance eigen oracles live in the tests.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{multiply, CMatrix};
use crate::schur;
use crate::spectral;
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootMethod {
    EigenOracle,
    RieszQuadrature,
    SchurTriangular,
    NewtonSqrt,
    Binomial,
    Visser,
    NewtonPth,
    HalleyPth,
    SignCompanion,
}

/// A computed root / fractional power together with its certificates.
#[derive(Debug, Clone)]
pub struct RootResult {
    pub value: CMatrix,
    pub method: RootMethod,
    /// `||value^p - x||` when the exponent is 1/p for integer p; for other
    /// exponents, the deviation of `value * x^{-alpha}`-style consistency.
    pub residual: f64,
    /// max |arg| over the spectrum of `value`.
    pub sector_check: f64,
}

/// Distance from an eigenvalue to the branch cut (-inf, 0].
pub fn branch_cut_distance(z: Complex64) -> f64 {
    if z.re <= 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

fn check_spectrum_off_cut(values: &[Complex64]) -> Result<()> {
    for &z in values {
        if branch_cut_distance(z) < tol::BRANCH_CUT_DIST {
            return Err(Error::NegativeSpectrum(z));
        }
    }
    Ok(())
}

/// Principal power `x^alpha` for `alpha` in (-1,1) \ {0}, evaluated on the
/// Schur triangular factor.
pub fn principal_power(x: &CMatrix, alpha: f64) -> Result<RootResult> {
    let value = principal_power_value(x, alpha)?;
    finish_root(value, x, alpha, RootMethod::SchurTriangular)
}

/// The Schur-route power without the residual/sector certificates.
pub fn principal_power_value(x: &CMatrix, alpha: f64) -> Result<CMatrix> {
    if !(alpha > -1.0 && alpha < 1.0) || alpha == 0.0 {
        return Err(Error::PreconditionFailed(format!(
            "exponent must lie in (-1,1) minus 0, got {alpha}"
        )));
    }
    let (q, t) = schur::schur(x)?;
    let diag = t.diag();
    if alpha < 0.0 {
        let threshold = tol::SINGULAR_PIVOT_REL * x.frobenius_norm();
        for &z in &diag {
            if z.norm() < threshold {
                return Err(Error::Singular {
                    pivot: z.norm(),
                    threshold,
                });
            }
        }
    }
    check_spectrum_off_cut(&diag)?;
    let ft = triangular_power(&t, alpha)?;
    multiply(&multiply(&q, &ft)?, &q.adjoint())
}

fn finish_root(value: CMatrix, x: &CMatrix, alpha: f64, method: RootMethod) -> Result<RootResult> {
    let residual = root_residual(&value, x, alpha)?;
    let sector_check = max_spectrum_arg(&value)?;
    Ok(RootResult {
        value,
        method,
        residual,
        sector_check,
    })
}

pub fn max_spectrum_arg(m: &CMatrix) -> Result<f64> {
    let dec = schur::eig(m)?;
    Ok(dec
        .values
        .iter()
        .filter(|z| z.norm() > 0.0)
        .map(|z| z.im.atan2(z.re).abs())
        .fold(0.0, f64::max))
}

/// Power-identity residual: `||v^p - x||` for alpha = 1/p, `||v^|p| x - 1||`
/// for alpha = -1/|p|; otherwise the round-trip `||x^alpha x^-alpha - 1||`
/// via a second triangular evaluation.
pub fn root_residual(value: &CMatrix, x: &CMatrix, alpha: f64) -> Result<f64> {
    let q = 1.0 / alpha;
    if (q - q.round()).abs() < 1e-9 && q.round() != 0.0 {
        let p = q.round() as i64;
        if p > 0 {
            let pow = value.powi(p as usize);
            return (&pow - x).op_norm2();
        } else {
            let pow = value.powi((-p) as usize);
            let prod = multiply(&pow, x)?;
            return (&prod - &CMatrix::identity(x.n())).op_norm2();
        }
    }
    let other = principal_power_value(x, -alpha)?;
    let prod = multiply(value, &other)?;
    (&prod - &CMatrix::identity(x.n())).op_norm2()
}

// ---- Triangular evaluation --------------------------------------------------

/// Evaluate the principal power on an upper-triangular factor by the block
/// Parlett recurrence. Runs of adjacent eigenvalues closer than the cluster
/// gap form atomic blocks; pairs use the exact divided difference, longer
/// runs a Taylor expansion about the cluster mean, and the coupling blocks
/// come from small Sylvester solves.
fn triangular_power(t: &CMatrix, alpha: f64) -> Result<CMatrix> {
    let n = t.n();
    let diag = t.diag();
    let scale = diag.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);

    // Maximal runs of adjacent clustered eigenvalues.
    let mut blocks: Vec<(usize, usize)> = Vec::new(); // (start, len)
    let mut i = 0;
    while i < n {
        let mut len = 1;
        while i + len < n && (diag[i + len] - diag[i + len - 1]).norm() < tol::CLUSTER_GAP * scale
        {
            len += 1;
        }
        blocks.push((i, len));
        i += len;
    }

    let mut f = CMatrix::zeros(n);
    // Diagonal blocks.
    for &(s, len) in &blocks {
        match len {
            1 => f.set(s, s, diag[s].powf(alpha)),
            2 => {
                let l1 = diag[s];
                let l2 = diag[s + 1];
                f.set(s, s, l1.powf(alpha));
                f.set(s + 1, s + 1, l2.powf(alpha));
                let dd = power_divided_difference(l1, l2, alpha);
                f.set(s, s + 1, t.at(s, s + 1) * dd);
            }
            _ => {
                let atom = atomic_power_block(t, s, len, alpha)?;
                f.set_block(s, s, &atom);
            }
        }
    }
    // Superdiagonal block sweep.
    let nb = blocks.len();
    for d in 1..nb {
        for bi in 0..(nb - d) {
            let bj = bi + d;
            let (is, il) = blocks[bi];
            let (js, jl) = blocks[bj];
            // RHS = F_II T_IJ - T_IJ F_JJ + sum over K strictly between.
            let mut rhs = vec![Complex64::new(0.0, 0.0); il * jl];
            for r in 0..il {
                for c in 0..jl {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..il {
                        acc += f.at(is + r, is + k) * t.at(is + k, js + c);
                    }
                    for k in 0..jl {
                        acc -= t.at(is + r, js + k) * f.at(js + k, js + c);
                    }
                    rhs[r * jl + c] = acc;
                }
            }
            for bk in (bi + 1)..bj {
                let (ks, kl) = blocks[bk];
                for r in 0..il {
                    for c in 0..jl {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..kl {
                            acc += f.at(is + r, ks + k) * t.at(ks + k, js + c)
                                - t.at(is + r, ks + k) * f.at(ks + k, js + c);
                        }
                        rhs[r * jl + c] += acc;
                    }
                }
            }
            // Solve T_II X - X T_JJ = RHS as a Kronecker system.
            let x = solve_small_sylvester(t, is, il, js, jl, &rhs)?;
            for r in 0..il {
                for c in 0..jl {
                    f.set(is + r, js + c, x[r * jl + c]);
                }
            }
        }
    }
    Ok(f)
}

/// Taylor evaluation of the power on an atomic triangular block whose
/// eigenvalues all sit within the cluster gap: expand about the mean; the
/// strictly triangular part makes the series settle after the block size.
fn atomic_power_block(t: &CMatrix, start: usize, len: usize, alpha: f64) -> Result<CMatrix> {
    let block = t.block(start, start, len);
    let mut mu = Complex64::new(0.0, 0.0);
    for i in 0..len {
        mu += block.at(i, i);
    }
    mu /= len as f64;
    let shifted = block.add_scaled_identity(-mu);
    let mut acc = CMatrix::identity(len).scale(mu.powf(alpha));
    let mut pow = CMatrix::identity(len);
    let mut coeff = mu.powf(alpha);
    let mut settled = 0usize;
    for m in 1..=80 {
        pow = multiply(&pow, &shifted)?;
        // c_m = c_{m-1} * (alpha - m + 1) / (m * mu).
        coeff = coeff * Complex64::new(alpha - m as f64 + 1.0, 0.0) / (mu * m as f64);
        let term = pow.scale(coeff);
        let tn = term.frobenius_norm();
        acc = &acc + &term;
        if tn <= 1e-18 * acc.frobenius_norm().max(1e-300) {
            settled += 1;
            if settled >= 2 {
                return Ok(acc);
            }
        } else {
            settled = 0;
        }
    }
    Err(Error::PreconditionFailed(
        "clustered triangular block did not settle under the power series".into(),
    ))
}

/// Solve `A X - X B = RHS` for the small diagonal blocks of the Parlett
/// sweep via the vectorized linear system. A singular operator with a
/// negligible right-hand side (decoupled equal clusters) yields zero.
fn solve_small_sylvester(
    t: &CMatrix,
    is: usize,
    il: usize,
    js: usize,
    jl: usize,
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let dim = il * jl;
    let mut m = CMatrix::zeros(dim);
    for r in 0..il {
        for c in 0..jl {
            let row = r * jl + c;
            for k in 0..il {
                let cur = m.at(row, k * jl + c) + t.at(is + r, is + k);
                m.set(row, k * jl + c, cur);
            }
            for l in 0..jl {
                let cur = m.at(row, r * jl + l) - t.at(js + l, js + c);
                m.set(row, r * jl + l, cur);
            }
        }
    }
    match m.lu() {
        Ok(lu) => Ok(lu.solve_vec(rhs)),
        Err(_) => {
            let rhs_scale = rhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if rhs_scale <= 1e-13 * t.frobenius_norm().max(1.0) {
                Ok(vec![Complex64::new(0.0, 0.0); dim])
            } else {
                Err(Error::PreconditionFailed(
                    "clustered eigenvalues are not adjacent in the Schur factor".into(),
                ))
            }
        }
    }
}

/// Stable first divided difference of `z^alpha` between two (possibly
/// nearly equal) points off the branch cut.
fn power_divided_difference(l1: Complex64, l2: Complex64, alpha: f64) -> Complex64 {
    let diff = l1 - l2;
    let sep = l1.norm() + l2.norm();
    if diff.norm() > 1e-6 * sep {
        return (l1.powf(alpha) - l2.powf(alpha)) / diff;
    }
    if diff.norm() == 0.0 {
        return alpha * l2.powf(alpha - 1.0);
    }
    // l1^a - l2^a = l2^a * expm1(a * log1p((l1-l2)/l2)).
    let u = diff / l2;
    let w = alpha * ln_1p_small(u);
    l2.powf(alpha) * expm1_small(w) / diff
}

fn ln_1p_small(u: Complex64) -> Complex64 {
    if u.norm() > 0.25 {
        return (Complex64::new(1.0, 0.0) + u).ln();
    }
    // Alternating series; |u| <= 0.25 converges far past f64 precision.
    let mut term = u;
    let mut acc = u;
    for k in 2..30 {
        term *= -u;
        acc += term / (k as f64);
        if term.norm() < 1e-20 * acc.norm().max(1e-300) {
            break;
        }
    }
    acc
}

fn expm1_small(w: Complex64) -> Complex64 {
    if w.norm() > 0.25 {
        return w.exp() - 1.0;
    }
    let mut term = w;
    let mut acc = w;
    let mut fact = 1.0;
    for k in 2..30 {
        fact *= k as f64;
        term *= w;
        acc += term / fact;
        if term.norm() / fact < 1e-20 * acc.norm().max(1e-300) {
            break;
        }
    }
    acc
}

// ---- Resolvent-integral route ------------------------------------------------

/// Negative fractional power by the resolvent integral, substituted
/// `t = e^s` and truncated at |s| <= 40 with analytic tail corrections;
/// Simpson refinement until successive levels agree to 1e-9 relative.
pub fn riesz_negative_power(x: &CMatrix, alpha: f64) -> Result<RootResult> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::PreconditionFailed(format!(
            "riesz route needs alpha in (0,1), got {alpha}"
        )));
    }
    let n = x.n();
    let dec = schur::eig(x)?;
    check_spectrum_off_cut(&dec.values)?;
    let x_inv = x.inverse()?;
    let ref_scale = x_inv.op_norm2()?.powf(alpha);

    let s_max = tol::QUAD_TRUNC;
    let integrand = |s: f64| -> Result<CMatrix> {
        let shifted = x.add_scaled_identity(Complex64::new(s.exp(), 0.0));
        let inv = shifted.inverse()?;
        Ok(inv.scale_re(((1.0 - alpha) * s).exp()))
    };

    let mut panels = 64usize;
    let mut prev: Option<CMatrix> = None;
    let mut core = None;
    for _level in 0..tol::QUAD_MAX_LEVELS {
        let cur = simpson(&integrand, -s_max, s_max, panels)?;
        if let Some(p) = &prev {
            let diff = (&cur - p).op_norm2()?;
            if diff < tol::QUAD_TOL * ref_scale.max(1e-300) {
                core = Some(cur);
                break;
            }
        }
        prev = Some(cur);
        panels *= 2;
    }
    let core = match core {
        Some(c) => c,
        None => return Err(Error::QuadratureStall(tol::QUAD_MAX_LEVELS)),
    };

    // Tail corrections. Upper: expand (e^s + x)^-1 in powers of e^-s x;
    // lower: in powers of e^s x^-1. Three terms leave O(e^{-40(3+alpha)}).
    let mut tail = CMatrix::zeros(n);
    let mut xk = CMatrix::identity(n);
    for k in 0..3 {
        let coeff = (-s_max * (alpha + k as f64)).exp() / (alpha + k as f64);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        tail = &tail + &xk.scale_re(sign * coeff);
        xk = multiply(&xk, x)?;
    }
    let mut xik = x_inv.clone();
    for k in 0..3 {
        let m = k as f64 + 1.0;
        let coeff = (-s_max * (m - alpha)).exp() / (m - alpha);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        tail = &tail + &xik.scale_re(sign * coeff);
        xik = multiply(&xik, &x_inv)?;
    }

    let total = (&core + &tail).scale_re((std::f64::consts::PI * alpha).sin() / std::f64::consts::PI);
    finish_root(total, x, -alpha, RootMethod::RieszQuadrature)
}

fn simpson(f: &impl Fn(f64) -> Result<CMatrix>, a: f64, b: f64, panels: usize) -> Result<CMatrix> {
    let h = (b - a) / panels as f64;
    let mut acc = f(a)?;
    acc = &acc + &f(b)?;
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        let g = f(a + h * i as f64)?;
        acc = &acc + &g.scale_re(w);
    }
    Ok(acc.scale_re(h / 3.0))
}

// ---- Identities from the root theory ----------------------------------------

#[derive(Debug, Clone)]
pub struct RotationIdentity {
    pub lhs: CMatrix,
    pub rhs: CMatrix,
    pub agree: bool,
    pub deviation: f64,
}

/// `(e^{i theta} x)^s` against `e^{i s theta} x^s`, with the rotated-range
/// precondition checked at 32 sampled rotations.
pub fn rotation_identity(x: &CMatrix, theta: f64, s: f64) -> Result<RotationIdentity> {
    spectral::rotation_path_clear(x, theta, 32)?;
    let lhs = principal_power(&x.scale(Complex64::from_polar(1.0, theta)), s)?.value;
    let rhs = principal_power(x, s)?
        .value
        .scale(Complex64::from_polar(1.0, s * theta));
    let deviation = (&lhs - &rhs).op_norm2()?;
    let agree = deviation <= 1e-8 * rhs.op_norm2()?.max(1e-300);
    Ok(RotationIdentity {
        lhs,
        rhs,
        agree,
        deviation,
    })
}

#[derive(Debug, Clone)]
pub struct ArgumentShrink {
    pub before: (f64, f64),
    pub after: (f64, f64),
    pub verdict: bool,
}

/// Argument interval of W(a^s) against `s` times the interval of W(a).
pub fn argument_shrink(a: &CMatrix, s: f64) -> Result<ArgumentShrink> {
    if !(0.0 < s && s < 1.0) {
        return Err(Error::PreconditionFailed(format!(
            "argument shrink needs s in (0,1), got {s}"
        )));
    }
    let range = spectral::numerical_range(a, tol::DEFAULT_ANGLES)?;
    let before = range.argument_interval().ok_or_else(|| {
        Error::PreconditionFailed("W(a) has strictly negative numbers".into())
    })?;
    let powered = principal_power(a, s)?.value;
    let range_s = spectral::numerical_range(&powered, tol::DEFAULT_ANGLES)?;
    let after = range_s.argument_interval().ok_or_else(|| {
        Error::PreconditionFailed("W(a^s) has strictly negative numbers".into())
    })?;
    let verdict = after.0 >= s * before.0 - 1e-6 && after.1 <= s * before.1 + 1e-6;
    Ok(ArgumentShrink {
        before,
        after,
        verdict,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct HolderEstimate {
    /// `||a^t - b^t||`.
    pub lhs: f64,
    /// `||a - b||^t`.
    pub rhs: f64,
    /// lhs / rhs; a running estimate of the unquantified constant.
    pub ratio: f64,
}

/// The Holder-type root bound `||a^t - b^t|| <= K ||a - b||^t` monitored
/// as a ratio; K is never asserted.
pub fn root_holder(a: &CMatrix, b: &CMatrix, t: f64) -> Result<HolderEstimate> {
    if !(0.0 < t && t <= 1.0) {
        return Err(Error::PreconditionFailed(format!(
            "holder exponent must be in (0,1], got {t}"
        )));
    }
    for (name, m) in [("a", a), ("b", b)] {
        if spectral::type_m_constant(m).finite().is_none() {
            return Err(Error::PreconditionFailed(format!("{name} is not type M")));
        }
    }
    let lhs = if t == 1.0 {
        (a - b).op_norm2()?
    } else {
        let at = principal_power(a, t)?.value;
        let bt = principal_power(b, t)?.value;
        (&at - &bt).op_norm2()?
    };
    let rhs = (a - b).op_norm2()?.powf(t);
    let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(HolderEstimate { lhs, rhs, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_square_root() {
        let a = CMatrix::from_diag(&[c(4.0, 0.0), c(9.0, 0.0)]);
        let r = principal_power(&a, 0.5).unwrap();
        let want = CMatrix::from_diag(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert!((&r.value - &want).frobenius_norm() < 1e-12);
        assert!(r.residual < 1e-12);
        assert!(r.sector_check < 1e-12);
    }

    #[test]
    fn scalar_principal_branch() {
        let a = CMatrix::scalar(c(0.0, 1.0));
        let r = principal_power(&a, 0.5).unwrap();
        let want = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!((r.value.at(0, 0) - want).norm() < 1e-14);
    }

    #[test]
    fn constructed_cube_root_matches_eigen_oracle() {
        // V diag(1+i, 3) V^-1 with a fixed well-conditioned V.
        let v = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.5, 0.2)], vec![c(-0.3, 0.1), c(1.0, 0.0)]])
            .unwrap();
        let d = CMatrix::from_diag(&[c(1.0, 1.0), c(3.0, 0.0)]);
        let vinv = v.inverse().unwrap();
        let a = multiply(&multiply(&v, &d).unwrap(), &vinv).unwrap();
        let got = principal_power(&a, 1.0 / 3.0).unwrap().value;
        let droot = CMatrix::from_diag(&[c(1.0, 1.0).powf(1.0 / 3.0), c(3.0, 0.0).powf(1.0 / 3.0)]);
        let want = multiply(&multiply(&v, &droot).unwrap(), &vinv).unwrap();
        assert!((&got - &want).op_norm2().unwrap() < 1e-10);
    }

    #[test]
    fn repeated_eigenvalue_block() {
        // [[1,1],[0,1]]^(1/2) = [[1, 1/2],[0, 1]]: exercises the clustered
        // 2x2 path.
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]])
            .unwrap();
        let r = principal_power(&a, 0.5).unwrap();
        assert!((r.value.at(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((r.value.at(0, 1) - c(0.5, 0.0)).norm() < 1e-12);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn negative_axis_rejected() {
        let a = CMatrix::from_diag(&[c(-1.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(
            principal_power(&a, 0.5),
            Err(Error::NegativeSpectrum(_))
        ));
        let zero = CMatrix::from_diag(&[c(0.0, 0.0), c(4.0, 0.0)]);
        assert!(principal_power(&zero, 0.5).is_err());
    }

    #[test]
    fn riesz_scalar_and_diagonal() {
        let a = CMatrix::scalar(c(4.0, 0.0));
        let r = riesz_negative_power(&a, 0.5).unwrap();
        assert!((r.value.at(0, 0) - c(0.5, 0.0)).norm() < 1e-9);

        let d = CMatrix::from_diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let r = riesz_negative_power(&d, 0.5).unwrap();
        assert!((r.value.at(0, 0) - c(1.0, 0.0)).norm() < 1e-9);
        assert!((r.value.at(1, 1) - c(1.0 / 2.0f64.sqrt(), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn riesz_agrees_with_schur_route() {
        let a = CMatrix::from_rows(&[
            vec![c(2.0, 0.3), c(0.4, -0.1)],
            vec![c(-0.2, 0.1), c(1.5, 0.2)],
        ])
        .unwrap();
        for alpha in [0.25, 0.5, 0.75] {
            let riesz = riesz_negative_power(&a, alpha).unwrap().value;
            let schur_route = principal_power(&a, -alpha).unwrap().value;
            let scale = schur_route.op_norm2().unwrap();
            assert!(
                (&riesz - &schur_route).op_norm2().unwrap() <= 1e-6 * scale,
                "alpha = {alpha}"
            );
        }
    }

    #[test]
    fn rotation_identity_cases() {
        let x = CMatrix::identity(2);
        let r = rotation_identity(&x, std::f64::consts::FRAC_PI_2, 0.5).unwrap();
        assert!(r.agree);
        let want = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!((r.lhs.at(0, 0) - want).norm() < 1e-10);

        let x = CMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let r = rotation_identity(&x, -std::f64::consts::FRAC_PI_4, 0.5).unwrap();
        assert!(r.agree, "deviation {}", r.deviation);

        // theta = 0 agrees trivially.
        let r = rotation_identity(&x, 0.0, 0.5).unwrap();
        assert!(r.agree && r.deviation < 1e-14);
    }

    #[test]
    fn argument_shrink_normal_case() {
        let third = std::f64::consts::FRAC_PI_3;
        let a = CMatrix::from_diag(&[
            Complex64::from_polar(1.0, third),
            Complex64::from_polar(1.0, -third),
        ]);
        let r = argument_shrink(&a, 0.5).unwrap();
        assert!(r.verdict);
        assert!(r.after.1 <= third / 2.0 + 1e-6);
        assert!(r.after.0 >= -third / 2.0 - 1e-6);
    }

    #[test]
    fn holder_scalar_example() {
        let a = CMatrix::scalar(c(4.0, 0.0));
        let b = CMatrix::scalar(c(1.0, 0.0));
        let h = root_holder(&a, &b, 0.5).unwrap();
        assert!((h.lhs - 1.0).abs() < 1e-10);
        assert!((h.rhs - 3f64.sqrt()).abs() < 1e-12);
        assert!((h.ratio - 1.0 / 3f64.sqrt()).abs() < 1e-9);
        let same = root_holder(&a, &a, 0.5).unwrap();
        assert!(same.lhs < 1e-12);
    }

    #[test]
    fn inverse_root_commutes() {
        let a = CMatrix::from_rows(&[
            vec![c(3.0, 0.5), c(0.2, 0.0)],
            vec![c(0.1, -0.1), c(2.0, 0.0)],
        ])
        .unwrap();
        let neg = principal_power(&a, -0.5).unwrap().value;
        let pos_inv = principal_power(&a, 0.5).unwrap().value.inverse().unwrap();
        let scale = a.inverse().unwrap().op_norm2().unwrap().sqrt();
        assert!((&neg - &pos_inv).op_norm2().unwrap() <= 1e-8 * scale);
    }
}
