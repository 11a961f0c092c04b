//! Complex Schur decomposition (Householder Hessenberg reduction followed
//! by shifted QR with deflation), the eigenstructure oracle built on it,
//! and the norm report.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::tol;

/// Eigenvalues plus the unitary Schur factors they came from.
///
/// `vectors` is populated only on request and only when the eigenvector
/// matrix is well conditioned; defective inputs (nontrivial Jordan
/// blocks) report `None`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Sorted by descending real part, then descending imaginary part.
    pub values: Vec<Complex64>,
    pub vectors: Option<CMatrix>,
    pub schur_q: CMatrix,
    pub schur_t: CMatrix,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NormReport {
    pub operator_norm2: f64,
    pub frobenius: f64,
    pub spectral_radius: f64,
}

/// Complex Schur form `a = Q T Q*` with unitary Q and upper-triangular T.
/// The diagonal is reordered (descending real part, then imaginary part),
/// which also makes clustered eigenvalues adjacent for the triangular
/// function evaluation.
pub fn schur(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = a.n();
    let mut t = a.clone();
    let mut q = CMatrix::identity(n);
    if n > 2 {
        hessenberg(&mut t, &mut q);
    }
    qr_iterate(&mut t, &mut q)?;
    reorder_schur(&mut t, &mut q);
    // Clean rounding dust strictly below the diagonal.
    for i in 0..n {
        for j in 0..i {
            t.set(i, j, Complex64::new(0.0, 0.0));
        }
    }
    Ok((q, t))
}

fn eig_before(a: Complex64, b: Complex64) -> bool {
    a.re > b.re || (a.re == b.re && a.im >= b.im)
}

/// Bubble the triangular diagonal into the canonical order by unitary
/// swaps of adjacent eigenvalues.
fn reorder_schur(t: &mut CMatrix, q: &mut CMatrix) {
    let n = t.n();
    if n < 2 {
        return;
    }
    loop {
        let mut swapped = false;
        for i in 0..n - 1 {
            let l1 = t.at(i, i);
            let l2 = t.at(i + 1, i + 1);
            if !eig_before(l1, l2) {
                swap_adjacent(t, q, i);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
}

/// Exchange the diagonal entries at positions i and i+1 of a triangular
/// factor by the unitary rotation built from the eigenvector of the
/// trailing eigenvalue of the 2x2 block.
fn swap_adjacent(t: &mut CMatrix, q: &mut CMatrix, i: usize) {
    let n = t.n();
    let l1 = t.at(i, i);
    let l2 = t.at(i + 1, i + 1);
    let t12 = t.at(i, i + 1);
    let v0 = t12;
    let v1 = l2 - l1;
    let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    if norm == 0.0 {
        return; // identical eigenvalues with no coupling: nothing to move
    }
    let a = v0 / norm;
    let b = v1 / norm;
    // G = [[a, -conj(b)], [b, conj(a)]]; apply T <- G* T G, Q <- Q G.
    for col in 0..n {
        let x = t.at(i, col);
        let y = t.at(i + 1, col);
        t.set(i, col, a.conj() * x + b.conj() * y);
        t.set(i + 1, col, -b * x + a * y);
    }
    for row in 0..n {
        let x = t.at(row, i);
        let y = t.at(row, i + 1);
        t.set(row, i, a * x + b * y);
        t.set(row, i + 1, -b.conj() * x + a.conj() * y);
    }
    for row in 0..n {
        let x = q.at(row, i);
        let y = q.at(row, i + 1);
        q.set(row, i, a * x + b * y);
        q.set(row, i + 1, -b.conj() * x + a.conj() * y);
    }
    t.set(i + 1, i, Complex64::new(0.0, 0.0));
    // The diagonal carries the exchanged eigenvalues up to rounding; pin
    // them exactly so ordering decisions stay consistent.
    t.set(i, i, l2);
    t.set(i + 1, i + 1, l1);
}

/// Eigenvalues via Schur; eigenvectors not computed.
pub fn eig(a: &CMatrix) -> Result<EigenDecomposition> {
    let (q, t) = schur(a)?;
    let mut values = t.diag();
    sort_eigenvalues(&mut values);
    Ok(EigenDecomposition {
        values,
        vectors: None,
        schur_q: q,
        schur_t: t,
    })
}

/// Like [`eig`] but also extracts right eigenvectors, refusing (with
/// `vectors: None`) when the eigenvector matrix condition exceeds 1e8.
pub fn eig_with_vectors(a: &CMatrix) -> Result<EigenDecomposition> {
    let (q, t) = schur(a)?;
    let n = a.n();
    let vectors = (|| {
        let mut v = CMatrix::zeros(n);
        for j in 0..n {
            let col = schur_eigvec(&t, j);
            let full = rotate(&q, &col);
            for i in 0..n {
                v.set(i, j, full[i]);
            }
        }
        let cond = v.op_norm2().ok()? * v.inverse().ok()?.op_norm2().ok()?;
        if cond > tol::EIGVEC_COND_CAP {
            None
        } else {
            Some(v)
        }
    })();
    let mut values = t.diag();
    sort_eigenvalues(&mut values);
    Ok(EigenDecomposition {
        values,
        vectors,
        schur_q: q,
        schur_t: t,
    })
}

/// Operator 2-norm, Frobenius norm, spectral radius.
pub fn norms(a: &CMatrix) -> Result<NormReport> {
    let operator_norm2 = a.op_norm2()?;
    let frobenius = a.frobenius_norm();
    let spectral_radius = eig(a)?
        .values
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(NormReport {
        operator_norm2,
        frobenius,
        spectral_radius,
    })
}

pub(crate) fn sort_eigenvalues(values: &mut [Complex64]) {
    values.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
}

/// Eigenvector of upper-triangular `t` for the eigenvalue at diagonal
/// index `j`, by back substitution in the leading block.
fn schur_eigvec(t: &CMatrix, j: usize) -> Vec<Complex64> {
    let n = t.n();
    let lambda = t.at(j, j);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    y[j] = Complex64::new(1.0, 0.0);
    let scale = t.frobenius_norm().max(1.0);
    for i in (0..j).rev() {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (i + 1)..=j {
            acc += t.at(i, k) * y[k];
        }
        let mut denom = t.at(i, i) - lambda;
        // Repeated eigenvalue: nudge the denominator LAPACK-style so the
        // solve stays finite; the conditioning gate downstream decides
        // whether the resulting basis is usable.
        if denom.norm() < f64::EPSILON * scale {
            denom = Complex64::new(f64::EPSILON * scale, 0.0);
        }
        y[i] = -acc / denom;
    }
    let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in y.iter_mut() {
        *z /= norm;
    }
    y
}

fn rotate(q: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    q.matvec(v)
}

// ---- Hessenberg reduction --------------------------------------------------

fn hessenberg(t: &mut CMatrix, q: &mut CMatrix) {
    let n = t.n();
    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k below the subdiagonal.
        let m = n - k - 1;
        let mut v: Vec<Complex64> = (0..m).map(|i| t.at(k + 1 + i, k)).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm < f64::EPSILON * xnorm {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // t <- P t with P = I - 2 v v* acting on rows k+1..n.
        for j in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..m {
                dot += v[i].conj() * t.at(k + 1 + i, j);
            }
            let dot = dot * 2.0;
            for i in 0..m {
                let cur = t.at(k + 1 + i, j);
                t.set(k + 1 + i, j, cur - v[i] * dot);
            }
        }
        // t <- t P on columns k+1..n.
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for l in 0..m {
                dot += t.at(i, k + 1 + l) * v[l];
            }
            let dot = dot * 2.0;
            for l in 0..m {
                let cur = t.at(i, k + 1 + l);
                t.set(i, k + 1 + l, cur - dot * v[l].conj());
            }
        }
        // q <- q P.
        for i in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for l in 0..m {
                dot += q.at(i, k + 1 + l) * v[l];
            }
            let dot = dot * 2.0;
            for l in 0..m {
                let cur = q.at(i, k + 1 + l);
                q.set(i, k + 1 + l, cur - dot * v[l].conj());
            }
        }
        // Entries below the subdiagonal of column k are now zero.
        for i in (k + 2)..n {
            t.set(i, k, Complex64::new(0.0, 0.0));
        }
    }
}

// ---- Shifted QR with deflation ---------------------------------------------

fn qr_iterate(t: &mut CMatrix, q: &mut CMatrix) -> Result<()> {
    let n = t.n();
    if n <= 1 {
        return Ok(());
    }
    let cap = tol::QR_SWEEP_FACTOR * n;
    let fro = t.frobenius_norm();
    let mut hi = n - 1;
    let mut window_iters = 0usize;
    let mut total = 0usize;
    loop {
        // Deflate negligible subdiagonals in the leading block.
        for i in 0..hi {
            let sub = t.at(i + 1, i).norm();
            if sub == 0.0 {
                continue;
            }
            let mut thresh = f64::EPSILON * (t.at(i, i).norm() + t.at(i + 1, i + 1).norm());
            if thresh == 0.0 {
                thresh = f64::EPSILON * fro;
            }
            if sub <= thresh {
                t.set(i + 1, i, Complex64::new(0.0, 0.0));
            }
        }
        if t.at(hi, hi - 1).norm() == 0.0 {
            if hi == 1 {
                return Ok(());
            }
            hi -= 1;
            window_iters = 0;
            continue;
        }
        let mut lo = hi;
        while lo > 0 && t.at(lo, lo - 1).norm() != 0.0 {
            lo -= 1;
        }
        total += 1;
        if total > cap {
            return Err(Error::NoConvergence(cap));
        }
        window_iters += 1;
        let mu = if window_iters % 20 == 0 {
            // Exceptional shift to break limit cycles; the complex offset
            // also breaks conjugate-symmetric spectra.
            t.at(hi, hi) + t.at(hi, hi - 1).norm() * Complex64::new(0.75, 0.34)
        } else {
            wilkinson_shift(t, hi)
        };
        qr_step(t, q, lo, hi, mu);
    }
}

fn wilkinson_shift(t: &CMatrix, hi: usize) -> Complex64 {
    let a = t.at(hi - 1, hi - 1);
    let b = t.at(hi - 1, hi);
    let c = t.at(hi, hi - 1);
    let d = t.at(hi, hi);
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let l1 = (a + d) * 0.5 + disc;
    let l2 = (a + d) * 0.5 - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit single-shift QR step on the active window `[lo, hi]`.
fn qr_step(t: &mut CMatrix, q: &mut CMatrix, lo: usize, hi: usize, mu: Complex64) {
    let n = t.n();
    for i in lo..=hi {
        let v = t.at(i, i) - mu;
        t.set(i, i, v);
    }
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
    // Left sweep: triangularize the shifted window.
    for j in lo..hi {
        let f = t.at(j, j);
        let g = t.at(j + 1, j);
        let (c, s) = givens(f, g);
        rotations.push((c, s));
        for col in j..n {
            let x = t.at(j, col);
            let y = t.at(j + 1, col);
            t.set(j, col, c * x + s * y);
            t.set(j + 1, col, -s.conj() * x + c * y);
        }
        t.set(j + 1, j, Complex64::new(0.0, 0.0));
    }
    // Right sweep: multiply by the adjoint rotations, restoring Hessenberg.
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let j = lo + idx;
        let top = (j + 1).min(hi);
        for row in 0..=top {
            let x = t.at(row, j);
            let y = t.at(row, j + 1);
            t.set(row, j, c * x + s.conj() * y);
            t.set(row, j + 1, -s * x + c * y);
        }
        for row in 0..n {
            let x = q.at(row, j);
            let y = q.at(row, j + 1);
            q.set(row, j, c * x + s.conj() * y);
            q.set(row, j + 1, -s * x + c * y);
        }
    }
    for i in lo..=hi {
        let v = t.at(i, i) + mu;
        t.set(i, i, v);
    }
}

/// Complex Givens rotation: returns (c, s) with c real, such that
/// [c s; -conj(s) c] maps (f, g) to (r, 0).
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let fn_ = f.norm();
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let d = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / d;
    let s = (f / fn_) * g.conj() / d;
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::multiply;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn schur_residuals(a: &CMatrix) -> (f64, f64) {
        let dec = eig(a).unwrap();
        let n = a.n();
        let q = &dec.schur_q;
        let t = &dec.schur_t;
        let qtq = multiply(&multiply(q, t).unwrap(), &q.adjoint()).unwrap();
        let unitary = (&multiply(&q.adjoint(), q).unwrap() - &CMatrix::identity(n)).frobenius_norm();
        let backward = (&qtq - a).frobenius_norm();
        (unitary, backward)
    }

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let a = CMatrix::from_diag(&[c(1.0, 1.0), c(2.0, 0.0)]);
        let dec = eig(&a).unwrap();
        assert!((dec.values[0] - c(2.0, 0.0)).norm() < 1e-12);
        assert!((dec.values[1] - c(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn jordan_block_is_defective() {
        let a = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let dec = eig_with_vectors(&a).unwrap();
        assert!(dec.values.iter().all(|z| z.norm() < 1e-12));
        assert!(dec.vectors.is_none(), "Jordan block must refuse eigenvectors");
    }

    #[test]
    fn constructed_similarity_instance() {
        // V diag(4,9) V^-1 for a fixed rotation V: eigenvalues known by
        // construction.
        let th = 0.7f64;
        let v = CMatrix::from_rows(&[
            vec![c(th.cos(), 0.0), c(-th.sin(), 0.0)],
            vec![c(th.sin(), 0.0), c(th.cos(), 0.0)],
        ])
        .unwrap();
        let d = CMatrix::from_diag(&[c(4.0, 0.0), c(9.0, 0.0)]);
        let a = multiply(&multiply(&v, &d).unwrap(), &v.inverse().unwrap()).unwrap();
        let dec = eig(&a).unwrap();
        assert!((dec.values[0] - c(9.0, 0.0)).norm() < 1e-9);
        assert!((dec.values[1] - c(4.0, 0.0)).norm() < 1e-9);
        let (unitary, backward) = schur_residuals(&a);
        assert!(unitary < 1e-10 * 2.0);
        assert!(backward < 1e-9 * a.frobenius_norm());
    }

    #[test]
    fn random_matrix_schur_invariants() {
        // Deterministic pseudo-random dense matrix, n = 12.
        let n = 12;
        let mut state = 42u64;
        let a = CMatrix::from_fn(n, |_, _| {
            let x = crate::matrix::splitmix64(&mut state);
            let y = crate::matrix::splitmix64(&mut state);
            c(
                (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5,
                (y >> 11) as f64 / (1u64 << 53) as f64 - 0.5,
            )
        });
        let (unitary, backward) = schur_residuals(&a);
        assert!(unitary < 1e-10 * n as f64, "unitary residual {unitary}");
        assert!(
            backward < 1e-9 * a.frobenius_norm(),
            "backward residual {backward}"
        );
        // Eigenvalue multiset equals the diagonal of T.
        let dec = eig(&a).unwrap();
        let mut diag = dec.schur_t.diag();
        sort_eigenvalues(&mut diag);
        for (u, v) in dec.values.iter().zip(&diag) {
            assert!((u - v).norm() <= 1e-9 * a.frobenius_norm());
        }
    }

    #[test]
    fn norms_report() {
        let a = CMatrix::from_diag(&[c(3.0, 0.0), c(0.0, -4.0)]);
        let r = norms(&a).unwrap();
        assert!((r.operator_norm2 - 4.0).abs() < 1e-9);
        assert!((r.spectral_radius - 4.0).abs() < 1e-12);
        let e12 = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let r = norms(&e12).unwrap();
        assert!((r.operator_norm2 - 1.0).abs() < 1e-9);
        assert!(r.spectral_radius < 1e-12);
    }
}
