//! The geometric mean `a # b = a^{1/2} (a^{-1/2} b a^{-1/2})^{1/2} a^{1/2}`
//! of accretive matrices: the direct formula, the symmetric resolvent
//! integral for its inverse, the epsilon-regularized limit definition, the
//! identity suite, and the fixed counterexample battery.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{multiply, solve, CMatrix};
use crate::powers;
use crate::schur;
use crate::spectral::{self, TypeMBound};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeanRoute {
    Direct,
    IntegralQuadrature,
    /// Number of epsilon rungs consumed before the ladder settled.
    EpsilonLimit(usize),
}

#[derive(Debug, Clone)]
pub struct MeanResult {
    pub g: CMatrix,
    pub route: MeanRoute,
    /// `||G a^{-1} G - b||` when `a` is invertible.
    pub riccati_residual: Option<f64>,
    /// Sector angle of W(G), when W(G) fits in a sector.
    pub sector_angle: Option<f64>,
    /// Deviation of the dual formula `b^{1/2}(b^{-1/2} a b^{-1/2})^{1/2} b^{1/2}`
    /// when both strict routes apply; a cross-check, never averaged in.
    pub dual_deviation: Option<f64>,
    /// Richardson extrapolation of the epsilon ladder (logged only; the
    /// returned G is the last unextrapolated iterate).
    pub extrapolated_hint: Option<CMatrix>,
}

/// The bare formula `a^{1/2} (a^{-1/2} b a^{-1/2})^{1/2} a^{1/2}` with no
/// route selection: fails with `NegativeSpectrum` when the inner matrix
/// touches the branch cut.
pub fn mean_direct_raw(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(a.n(), b.n()));
    }
    let half = powers::principal_power_value(a, 0.5)?;
    let half_inv = powers::principal_power_value(a, -0.5)?;
    let inner = multiply(&multiply(&half_inv, b)?, &half_inv)?;
    let root = powers::principal_power_value(&inner, 0.5)?;
    multiply(&multiply(&half, &root)?, &half)
}

fn invertible(m: &CMatrix) -> Result<bool> {
    let dec = schur::eig(m)?;
    let threshold = tol::SINGULAR_PIVOT_REL * m.frobenius_norm();
    Ok(dec.values.iter().all(|z| z.norm() >= threshold))
}

/// Smallest branch-cut distance over the spectrum of the inner matrix
/// `a^{-1/2} b a^{-1/2}`.
fn inner_cut_distance(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let half_inv = powers::principal_power_value(a, -0.5)?;
    let inner = multiply(&multiply(&half_inv, b)?, &half_inv)?;
    let dec = schur::eig(&inner)?;
    Ok(dec
        .values
        .iter()
        .map(|&z| powers::branch_cut_distance(z))
        .fold(f64::INFINITY, f64::min))
}

/// Geometric mean with route selection: the direct formula under the
/// strict hypotheses, otherwise the epsilon-regularized limit
/// `lim a # (b + eps)`. Near-branch-cut inner matrices force the limit
/// route even when the strict hypotheses nominally hold.
pub fn geometric_mean(a: &CMatrix, b: &CMatrix) -> Result<MeanResult> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(a.n(), b.n()));
    }
    let margin_a = spectral::accretive_margin(a)?;
    let margin_b = spectral::accretive_margin(b)?;
    if margin_a < -1e-10 || margin_b < -1e-10 {
        return Err(Error::HypothesisFailed(format!(
            "both operators must be accretive (margins {margin_a:.3e}, {margin_b:.3e})"
        )));
    }
    let strict_a = margin_a > tol::STRICT_MARGIN;
    let strict_b = margin_b > tol::STRICT_MARGIN;
    let a_invertible = invertible(a)?;
    if !strict_a && !a_invertible {
        return Err(Error::HypothesisFailed(
            "need a strictly accretive or at least invertible".into(),
        ));
    }

    let direct_applies = strict_a || (a_invertible && strict_b);
    let mut route = MeanRoute::Direct;
    let mut extrapolated_hint = None;
    let g = if direct_applies && inner_cut_distance(a, b)? >= 1e-8 {
        mean_direct_raw(a, b)?
    } else {
        let (g, rungs, hint) = epsilon_ladder(a, b)?;
        route = MeanRoute::EpsilonLimit(rungs);
        extrapolated_hint = hint;
        g
    };

    let riccati_residual = if a_invertible {
        Some(riccati_residual(a, b, &g)?)
    } else {
        None
    };
    let sector_angle = spectral::sector_angle_of(&g)?;
    let dual_deviation = if strict_a && strict_b && route == MeanRoute::Direct {
        let dual = mean_direct_raw(b, a)?;
        Some((&g - &dual).op_norm2()? / g.op_norm2()?.max(1e-300))
    } else {
        None
    };
    Ok(MeanResult {
        g,
        route,
        riccati_residual,
        sector_angle,
        dual_deviation,
        extrapolated_hint,
    })
}

fn riccati_residual(a: &CMatrix, b: &CMatrix, g: &CMatrix) -> Result<f64> {
    let x = solve(a, g)?; // a^{-1} g
    (&multiply(g, &x)? - b).op_norm2()
}

/// `a # (b + eps)` down a geometric epsilon schedule until successive
/// iterates settle; returns the last iterate, the rung count, and the
/// Richardson extrapolation as a logged hint.
fn epsilon_ladder(a: &CMatrix, b: &CMatrix) -> Result<(CMatrix, usize, Option<CMatrix>)> {
    let mut prev: Option<(f64, CMatrix)> = None;
    for j in 0..tol::EPS_MAX_RUNGS {
        let eps = tol::EPS_SCHEDULE_START * 0.5f64.powi(j as i32);
        let regularized = b.add_scaled_identity(Complex64::new(eps, 0.0));
        let g = match mean_direct_raw(a, &regularized) {
            Ok(g) => g,
            Err(Error::NegativeSpectrum(_)) if prev.is_some() => {
                // The inner matrix reached the cut gate before the iterates
                // settled; the remaining gap is genuinely out of reach.
                return Err(Error::EpsilonStall);
            }
            Err(e) => return Err(e),
        };
        if let Some((eps_prev, g_prev)) = &prev {
            let diff = (&g - g_prev).op_norm2()?;
            if diff <= tol::EPS_STOP * (1.0 + g.op_norm2()?) {
                // G(eps) ~ G + C sqrt(eps): extrapolate for the log.
                let se = eps.sqrt();
                let sp = eps_prev.sqrt();
                let hint = &g - &(g_prev - &g).scale_re(se / (sp - se));
                return Ok((g, j + 1, Some(hint)));
            }
        }
        prev = Some((eps, g));
    }
    Err(Error::EpsilonStall)
}

/// Experimental doubly-regularized mean `lim (a+eps) # (b+eps)` for merely
/// accretive pairs; returns the last iterate and the ladder's successive
/// differences. Nothing is asserted about it.
pub fn mean_experimental_double(a: &CMatrix, b: &CMatrix) -> Result<(CMatrix, Vec<f64>)> {
    let mut diffs = Vec::new();
    let mut prev: Option<CMatrix> = None;
    let mut last = None;
    for j in 0..24 {
        let eps = tol::EPS_SCHEDULE_START * 0.5f64.powi(j);
        let ra = a.add_scaled_identity(Complex64::new(eps, 0.0));
        let rb = b.add_scaled_identity(Complex64::new(eps, 0.0));
        let g = match mean_direct_raw(&ra, &rb) {
            Ok(g) => g,
            Err(_) => break,
        };
        if let Some(p) = &prev {
            diffs.push((&g - p).op_norm2()?);
        }
        prev = Some(g.clone());
        last = Some(g);
    }
    match last {
        Some(g) => Ok((g, diffs)),
        None => Err(Error::EpsilonStall),
    }
}

/// The symmetric resolvent-integral route:
/// `G^{-1} = (2/pi) integral (t a + b/t)^{-1} dt/t`, substituted `t = e^s`.
pub fn mean_integral(a: &CMatrix, b: &CMatrix) -> Result<MeanResult> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch(a.n(), b.n()));
    }
    let margin_a = spectral::accretive_margin(a)?;
    let margin_b = spectral::accretive_margin(b)?;
    if margin_a <= tol::STRICT_MARGIN || margin_b <= tol::STRICT_MARGIN {
        return Err(Error::PreconditionFailed(format!(
            "integral route needs strictly accretive operators (margins {margin_a:.3e}, {margin_b:.3e})"
        )));
    }
    let s_max = tol::QUAD_TRUNC;
    // Integrand decays like e^{-|s|}, so the |s| <= 40 truncation error is
    // around 1e-17 of the inverse norms and needs no tail correction.
    let integrand = |s: f64| -> Result<CMatrix> {
        let m = &a.scale_re(s.exp()) + &b.scale_re((-s).exp());
        m.inverse()
    };
    let mut panels = 64usize;
    let mut prev: Option<CMatrix> = None;
    for _ in 0..tol::QUAD_MAX_LEVELS {
        let cur = simpson(&integrand, -s_max, s_max, panels)?;
        if let Some(p) = &prev {
            let diff = (&cur - p).op_norm2()?;
            if diff <= tol::QUAD_TOL * cur.op_norm2()?.max(1e-300) {
                let g_inv = cur.scale_re(2.0 / std::f64::consts::PI);
                let g = g_inv.inverse()?;
                let riccati = riccati_residual(a, b, &g)?;
                let sector_angle = spectral::sector_angle_of(&g)?;
                return Ok(MeanResult {
                    g,
                    route: MeanRoute::IntegralQuadrature,
                    riccati_residual: Some(riccati),
                    sector_angle,
                    dual_deviation: None,
                    extrapolated_hint: None,
                });
            }
        }
        prev = Some(cur);
        panels *= 2;
    }
    Err(Error::QuadratureStall(tol::QUAD_MAX_LEVELS))
}

fn simpson(f: &impl Fn(f64) -> Result<CMatrix>, a: f64, b: f64, panels: usize) -> Result<CMatrix> {
    let h = (b - a) / panels as f64;
    let mut acc = f(a)?;
    acc = &acc + &f(b)?;
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc = &acc + &f(a + h * i as f64)?.scale_re(w);
    }
    Ok(acc.scale_re(h / 3.0))
}

/// One line of the identity report JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: String,
    #[serde(rename = "lhsNorm")]
    pub lhs_norm: f64,
    #[serde(rename = "rhsNorm")]
    pub rhs_norm: f64,
    #[serde(rename = "relDev")]
    pub rel_dev: f64,
}

fn check(identity: &str, lhs: &CMatrix, rhs: &CMatrix) -> Result<IdentityCheck> {
    let lhs_norm = lhs.op_norm2()?;
    let rhs_norm = rhs.op_norm2()?;
    let rel_dev = (lhs - rhs).op_norm2()? / lhs_norm.max(rhs_norm).max(1e-300);
    Ok(IdentityCheck {
        identity: identity.to_string(),
        lhs_norm,
        rhs_norm,
        rel_dev,
    })
}

/// Evaluate both sides of the mean identity suite: symmetry, inversion,
/// congruence, positive scaling, and (under strict accretivity) the
/// plus-inverse collapse.
pub fn mean_identities(
    a: &CMatrix,
    b: &CMatrix,
    c: &CMatrix,
    s: f64,
    t: f64,
) -> Result<Vec<IdentityCheck>> {
    if s <= 0.0 || t <= 0.0 {
        return Err(Error::PreconditionFailed(format!(
            "scaling factors must be positive, got {s}, {t}"
        )));
    }
    let g = geometric_mean(a, b)?.g;
    let mut out = Vec::new();

    let ba = geometric_mean(b, a)?.g;
    out.push(check("symmetry", &g, &ba)?);

    let ginv = g.inverse()?;
    let inv_mean = geometric_mean(&a.inverse()?, &b.inverse()?)?.g;
    out.push(check("inversion", &ginv, &inv_mean)?);

    let cs = c.adjoint();
    let lhs = multiply(&multiply(&cs, &g)?, c)?;
    let ca = multiply(&multiply(&cs, a)?, c)?;
    let cb = multiply(&multiply(&cs, b)?, c)?;
    let rhs = geometric_mean(&ca, &cb)?.g;
    out.push(check("congruence", &lhs, &rhs)?);

    let scaled = geometric_mean(&a.scale_re(s), &b.scale_re(t))?.g;
    let expected = g.scale_re((s * t).sqrt());
    out.push(check("scaling", &scaled, &expected)?);

    let margin_a = spectral::accretive_margin(a)?;
    let margin_b = spectral::accretive_margin(b)?;
    if margin_a > tol::STRICT_MARGIN && margin_b > tol::STRICT_MARGIN {
        let sum = a + b;
        let inv_sum = (&a.inverse()? + &b.inverse()?).inverse()?;
        let lhs = geometric_mean(&sum, &inv_sum)?.g;
        out.push(check("plus-inverse", &lhs, &g)?);
    }
    Ok(out)
}

/// `(c* b c)^{1/2}` computed as `c* ((c c*)^{-1} # b) c`.
pub fn congruence_sqrt(b: &CMatrix, c: &CMatrix) -> Result<CMatrix> {
    let w = multiply(c, &c.adjoint())?.inverse()?;
    let g = geometric_mean(&w, b)?.g;
    multiply(&multiply(&c.adjoint(), &g)?, c)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TypeMInnerReport {
    pub constant: TypeMBound,
    /// `||a^{1/2}||^2 / margin`, the proof's bound.
    pub bound: f64,
    pub within: bool,
    pub margin: f64,
}

/// Type-M constant of the inner matrix `a^{-1/2} b a^{-1/2}` against the
/// bound `||a^{1/2}||^2 / margin`.
pub fn type_m_inner(a: &CMatrix, b: &CMatrix) -> Result<TypeMInnerReport> {
    let margin = spectral::accretive_margin(a)?;
    if margin <= tol::STRICT_MARGIN {
        return Err(Error::PreconditionFailed(format!(
            "inner type-M needs strictly accretive a (margin {margin:.3e})"
        )));
    }
    let margin_b = spectral::accretive_margin(b)?;
    if margin_b < -1e-10 {
        return Err(Error::PreconditionFailed(format!(
            "b must be accretive (margin {margin_b:.3e})"
        )));
    }
    let half = powers::principal_power_value(a, 0.5)?;
    let half_inv = powers::principal_power_value(a, -0.5)?;
    let inner = multiply(&multiply(&half_inv, b)?, &half_inv)?;
    let constant = spectral::type_m_constant(&inner);
    let bound = half.op_norm2()?.powi(2) / margin;
    let within = match constant {
        TypeMBound::Finite(m) => m <= bound * (1.0 + 1e-3),
        TypeMBound::Unbounded => false,
    };
    Ok(TypeMInnerReport {
        constant,
        bound,
        within,
        margin,
    })
}

// ---- Fixed counterexample battery ---------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleReport {
    /// (i) strictly accretive pair whose inner matrix has strictly
    /// negative numbers in its numerical range.
    pub negative_inner_found: bool,
    pub negative_inner_min_real: f64,
    /// (ii) two distinct accretive solutions of z a^{-1} z = b.
    pub nonunique_residuals: (f64, f64),
    pub nonunique_margins: (f64, f64),
    pub nonunique_distance: f64,
    /// (iii) arithmetic/geometric/harmonic means of the conjugate pair.
    pub agh_arithmetic_dev: f64,
    pub agh_geometric_dev: f64,
    pub agh_harmonic_dev: f64,
    pub agh_reversed: bool,
    /// (iv) the scalar pair where the direct formula hits the cut while
    /// the epsilon limit still exists.
    pub scalar_direct_fails: bool,
    pub scalar_limit_dev: f64,
    pub scalar_limit_riccati: f64,
}

/// Fixed instances where the positive-definite intuition breaks down;
/// every pathology is verified numerically.
pub fn mean_counterexamples() -> Result<CounterexampleReport> {
    let c0 = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);

    // (i) b = [[1,1],[-2,1/3]], a = b^{-1}: W(a^{-1/2} b a^{-1/2}) meets the
    // strictly negative axis although both are strictly accretive.
    let b = CMatrix::from_rows(&[
        vec![one, one],
        vec![Complex64::new(-2.0, 0.0), Complex64::new(1.0 / 3.0, 0.0)],
    ])?;
    let a = b.inverse()?;
    debug_assert!(spectral::accretive_margin(&a)? > 0.0);
    debug_assert!(spectral::accretive_margin(&b)? > 0.0);
    let half_inv = powers::principal_power_value(&a, -0.5)?;
    let inner = multiply(&multiply(&half_inv, &b)?, &half_inv)?;
    let range = spectral::numerical_range(&inner, tol::DEFAULT_ANGLES)?;
    let negative_inner_found = range.meets_negative_axis();
    let negative_inner_min_real = range.real_axis_interval().map(|(lo, _)| lo).unwrap_or(0.0);

    // (ii) a = diag(i, 2), b = diag(i, 1/2): z = diag(+-i, 1) both solve
    // z a^{-1} z = b and both are accretive.
    let a2 = CMatrix::from_diag(&[i, Complex64::new(2.0, 0.0)]);
    let b2 = CMatrix::from_diag(&[i, Complex64::new(0.5, 0.0)]);
    let z1 = CMatrix::from_diag(&[i, one]);
    let z2 = CMatrix::from_diag(&[-i, one]);
    let res1 = riccati_residual(&a2, &b2, &z1)?;
    let res2 = riccati_residual(&a2, &b2, &z2)?;
    let m1 = spectral::accretive_margin(&z1)?;
    let m2 = spectral::accretive_margin(&z2)?;
    let dist = (&z1 - &z2).op_norm2()?;

    // (iii) a = diag(1+i, 1-i), b = diag(1-i, 1+i): the three means come
    // out as I, sqrt(2) I, 2 I, reversing the usual ordering.
    let a3 = CMatrix::from_diag(&[Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0)]);
    let b3 = CMatrix::from_diag(&[Complex64::new(1.0, -1.0), Complex64::new(1.0, 1.0)]);
    let id = CMatrix::identity(2);
    let arithmetic = (&a3 + &b3).scale_re(0.5);
    let geometric = geometric_mean(&a3, &b3)?.g;
    let harmonic = (&a3.inverse()? + &b3.inverse()?).inverse()?.scale_re(2.0);
    let agh_arithmetic_dev = (&arithmetic - &id).op_norm2()?;
    let agh_geometric_dev = (&geometric - &id.scale_re(2f64.sqrt())).op_norm2()?;
    let agh_harmonic_dev = (&harmonic - &id.scale_re(2.0)).op_norm2()?;
    let ga = geometric.at(0, 0).re;
    let agh_reversed = 1.0 < ga && ga < harmonic.at(0, 0).re;

    // (iv) b = a^{-1} = i as scalars: the direct inner matrix is -1, but
    // the epsilon limit exists and solves the Riccati equation.
    let a4 = CMatrix::scalar(-i);
    let b4 = CMatrix::scalar(i);
    let scalar_direct_fails = matches!(
        mean_direct_raw(&a4, &b4),
        Err(Error::NegativeSpectrum(_))
    );
    let limit = geometric_mean(&a4, &b4)?;
    let scalar_limit_dev = (limit.g.at(0, 0) - one).norm();
    let scalar_limit_riccati = limit.riccati_residual.unwrap_or(f64::INFINITY);
    let _ = c0;

    Ok(CounterexampleReport {
        negative_inner_found,
        negative_inner_min_real,
        nonunique_residuals: (res1, res2),
        nonunique_margins: (m1, m2),
        nonunique_distance: dist,
        agh_arithmetic_dev,
        agh_geometric_dev,
        agh_harmonic_dev,
        agh_reversed,
        scalar_direct_fails,
        scalar_limit_dev,
        scalar_limit_riccati,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn commuting_diagonal_mean() {
        // a = diag(4,9), b = I: a # b = a^{1/2}.
        let a = CMatrix::from_diag(&[c(4.0, 0.0), c(9.0, 0.0)]);
        let b = CMatrix::identity(2);
        let r = geometric_mean(&a, &b).unwrap();
        let want = CMatrix::from_diag(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert!((&r.g - &want).op_norm2().unwrap() < 1e-10);
        assert_eq!(r.route, MeanRoute::Direct);
        assert!(r.riccati_residual.unwrap() < 1e-10);
    }

    #[test]
    fn conjugate_pair_gives_sqrt_two() {
        let a = CMatrix::from_diag(&[c(1.0, 1.0), c(1.0, -1.0)]);
        let b = CMatrix::from_diag(&[c(1.0, -1.0), c(1.0, 1.0)]);
        let r = geometric_mean(&a, &b).unwrap();
        let want = CMatrix::identity(2).scale_re(2f64.sqrt());
        assert!((&r.g - &want).op_norm2().unwrap() < 1e-10);
    }

    #[test]
    fn integral_route_matches_direct() {
        let a = CMatrix::from_rows(&[vec![c(2.0, 0.3), c(0.4, 0.1)], vec![c(-0.1, 0.2), c(1.5, -0.2)]])
            .unwrap();
        let b = CMatrix::from_rows(&[vec![c(1.2, -0.1), c(0.2, 0.0)], vec![c(0.1, 0.1), c(2.5, 0.4)]])
            .unwrap();
        assert!(spectral::accretive_margin(&a).unwrap() > 0.0);
        assert!(spectral::accretive_margin(&b).unwrap() > 0.0);
        let direct = geometric_mean(&a, &b).unwrap();
        let integral = mean_integral(&a, &b).unwrap();
        let scale = direct.g.op_norm2().unwrap();
        assert!(
            (&direct.g - &integral.g).op_norm2().unwrap() <= 1e-6 * scale,
            "integral vs direct"
        );
        assert!(integral.riccati_residual.unwrap() < 1e-7 * b.op_norm2().unwrap());
    }

    #[test]
    fn integral_scalars() {
        // a = b = I: G = I; scalars 4, 9: G = 6.
        let i1 = CMatrix::identity(1);
        let r = mean_integral(&i1, &i1).unwrap();
        assert!((r.g.at(0, 0) - c(1.0, 0.0)).norm() < 1e-9);
        let r = mean_integral(&CMatrix::scalar(c(4.0, 0.0)), &CMatrix::scalar(c(9.0, 0.0)))
            .unwrap();
        assert!((r.g.at(0, 0) - c(6.0, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn identity_suite_on_strict_pair() {
        let a = CMatrix::from_rows(&[vec![c(2.0, 0.2), c(0.3, -0.1)], vec![c(0.2, 0.1), c(1.8, 0.3)]])
            .unwrap();
        let b = CMatrix::from_rows(&[vec![c(1.4, -0.3), c(0.1, 0.2)], vec![c(-0.2, 0.1), c(2.2, 0.1)]])
            .unwrap();
        let cmat = CMatrix::from_rows(&[vec![c(1.0, 0.4), c(0.3, 0.0)], vec![c(-0.1, 0.2), c(0.9, -0.2)]])
            .unwrap();
        let checks = mean_identities(&a, &b, &cmat, 4.0, 9.0).unwrap();
        assert_eq!(checks.len(), 5);
        for ch in &checks {
            assert!(ch.rel_dev <= 1e-6, "{} deviates by {}", ch.identity, ch.rel_dev);
        }
        // Scaling spot value: (4I) # (9I) = 6I.
        let i2 = CMatrix::identity(2);
        let scaled = geometric_mean(&i2.scale_re(4.0), &i2.scale_re(9.0)).unwrap();
        assert!((&scaled.g - &i2.scale_re(6.0)).op_norm2().unwrap() < 1e-9);
    }

    #[test]
    fn congruence_sqrt_matches_schur_route() {
        let b = CMatrix::from_rows(&[vec![c(1.5, 0.2), c(0.3, 0.1)], vec![c(0.0, -0.1), c(2.0, 0.0)]])
            .unwrap();
        let cmat = CMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.5, 0.3)], vec![c(0.0, 0.2), c(1.0, 0.0)]])
            .unwrap();
        let got = congruence_sqrt(&b, &cmat).unwrap();
        let cbc = multiply(&multiply(&cmat.adjoint(), &b).unwrap(), &cmat).unwrap();
        let want = powers::principal_power_value(&cbc, 0.5).unwrap();
        let scale = want.op_norm2().unwrap();
        assert!((&got - &want).op_norm2().unwrap() <= 1e-6 * scale);
        // c = I reduces to b^{1/2}; c = diag(2,1), b = I gives (c* c)^{1/2}.
        let id = CMatrix::identity(2);
        let sqrt_b = congruence_sqrt(&b, &id).unwrap();
        let want_b = powers::principal_power_value(&b, 0.5).unwrap();
        assert!((&sqrt_b - &want_b).op_norm2().unwrap() <= 1e-8 * scale);
        let cdiag = CMatrix::from_diag(&[c(2.0, 0.0), c(1.0, 0.0)]);
        let got = congruence_sqrt(&id, &cdiag).unwrap();
        assert!((&got - &cdiag).op_norm2().unwrap() < 1e-9);
    }

    #[test]
    fn type_m_inner_bound_cases() {
        // a = I reduces to the type-M constant of b, at most 1 for
        // accretive b.
        let b = CMatrix::from_diag(&[c(0.0, 1.0), c(2.0, 0.0)]);
        let rep = type_m_inner(&CMatrix::identity(2), &b).unwrap();
        assert!(rep.within);
        if let TypeMBound::Finite(m) = rep.constant {
            assert!(m <= 1.0 + 1e-6);
        } else {
            panic!("expected finite constant");
        }
        // Scaling: a = 2I doubles the bound's numerator and margin alike.
        let rep2 = type_m_inner(&CMatrix::identity(2).scale_re(2.0), &b).unwrap();
        assert!(rep2.within);
        assert!((rep2.bound - rep.bound).abs() < 1e-9);
    }

    #[test]
    fn counterexample_battery() {
        let rep = mean_counterexamples().unwrap();
        assert!(rep.negative_inner_found);
        assert!(rep.negative_inner_min_real < -1e-3);
        assert!(rep.nonunique_residuals.0 < 1e-12 && rep.nonunique_residuals.1 < 1e-12);
        assert!(rep.nonunique_margins.0 > -1e-10 && rep.nonunique_margins.1 > -1e-10);
        assert!(rep.nonunique_distance > 1.0);
        assert!(rep.agh_arithmetic_dev < 1e-12);
        assert!(rep.agh_geometric_dev < 1e-9);
        assert!(rep.agh_harmonic_dev < 1e-12);
        assert!(rep.agh_reversed);
        assert!(rep.scalar_direct_fails);
        assert!(rep.scalar_limit_dev < 1e-6);
        assert!(rep.scalar_limit_riccati < 1e-6);
    }

    #[test]
    fn epsilon_route_on_rotationally_accretive_pair() {
        // Non-strict accretive pair where the ladder converges linearly.
        let a = CMatrix::scalar(c(0.0, -1.0));
        let b = CMatrix::scalar(c(0.0, 1.0));
        let r = geometric_mean(&a, &b).unwrap();
        assert!(matches!(r.route, MeanRoute::EpsilonLimit(_)));
        assert!((r.g.at(0, 0) - c(1.0, 0.0)).norm() < 1e-6);
        assert!(r.extrapolated_hint.is_some());
    }
}
