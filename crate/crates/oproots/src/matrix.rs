//! Dense complex square matrices: arithmetic, LU with partial pivoting,
//! Frobenius and operator norms, and the row-major JSON format
//! `{"n": int, "re": [[..]], "im": [[..]]}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tol;

/// Dense square complex matrix, the carrier for every operator in the crate.
///
/// Immutable by convention after construction; all operations return fresh
/// values, so instances are safe to share across threads.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Build from row-major data. Rejects wrong lengths and non-finite
    /// entries.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(n * n, data.len()));
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, z) in diag.iter().enumerate() {
            m.data[i * n + i] = *z;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Ragged {
                    row: i,
                    got: row.len(),
                    expected: n,
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(n, data)
    }

    /// 1x1 matrix holding a scalar.
    pub fn scalar(z: Complex64) -> Self {
        Self { n: 1, data: vec![z] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self.at(i, i)).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.diag().into_iter().sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.at(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.at(j, i))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `self + c * I`.
    pub fn add_scaled_identity(&self, c: Complex64) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            let v = m.at(i, i) + c;
            m.set(i, i, v);
        }
        m
    }

    /// Hermitian part (self + self*) / 2.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        Self::from_fn(self.n, |i, j| 0.5 * (self.at(i, j) + adj.at(i, j)))
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            let row = &self.data[i * n..(i + 1) * n];
            for (a, x) in row.iter().zip(v) {
                acc += a * x;
            }
            out[i] = acc;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Operator 2-norm via power iteration on `a* a`, relative tolerance
    /// 1e-12, cap 10000 steps. Deterministic start vector.
    pub fn op_norm2(&self) -> Result<f64> {
        let n = self.n;
        if n == 0 {
            return Ok(0.0);
        }
        let fro = self.frobenius_norm();
        if fro == 0.0 {
            return Ok(0.0);
        }
        // Fixed pseudo-random start so repeated calls agree bit for bit.
        let mut state = 0x9e37_79b9_7f4a_7c15u64 ^ (n as u64);
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| {
                let a = splitmix64(&mut state);
                let b = splitmix64(&mut state);
                Complex64::new(to_unit(a) - 0.5, to_unit(b) - 0.5)
            })
            .collect();
        normalize(&mut v);
        let adj = self.adjoint();
        let mut rho_prev = -1.0;
        for _ in 0..tol::POWER_ITER_CAP {
            let w = self.matvec(&v);
            let rho: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            if rho == 0.0 {
                // v fell into the kernel; restart deterministically shifted.
                let a = splitmix64(&mut state);
                v[0] += Complex64::new(to_unit(a), 1.0);
                normalize(&mut v);
                continue;
            }
            let mut u = adj.matvec(&w);
            normalize(&mut u);
            v = u.clone();
            if rho_prev >= 0.0 && (rho - rho_prev).abs() <= tol::POWER_ITER_TOL * rho {
                return Ok(rho.sqrt());
            }
            rho_prev = rho;
            u.clear();
        }
        // Clustered singular values stall the ratio test; fall back to a
        // Jacobi eigensolve of a* a, which does not care about gaps.
        let gram = &self.adjoint() * self;
        hermitian_max_eigenvalue(&gram)
            .map(|lam| lam.max(0.0).sqrt())
            .ok_or(Error::NoConvergence(tol::POWER_ITER_CAP))
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<Lu> {
        Lu::factor(self)
    }

    /// `self^-1` via LU; errors with `Singular` below the pivot threshold.
    pub fn inverse(&self) -> Result<CMatrix> {
        self.lu()?.solve_mat(&CMatrix::identity(self.n))
    }

    /// Integer matrix power by repeated multiplication, `p >= 0`.
    pub fn powi(&self, p: usize) -> CMatrix {
        let mut acc = CMatrix::identity(self.n);
        for _ in 0..p {
            acc = &acc * self;
        }
        acc
    }

    pub fn is_square_of(&self, n: usize) -> bool {
        self.n == n
    }

    /// Copy a square block `src` into position with top-left corner (i0, j0).
    pub fn set_block(&mut self, i0: usize, j0: usize, src: &CMatrix) {
        for i in 0..src.n {
            for j in 0..src.n {
                self.set(i0 + i, j0 + j, src.at(i, j));
            }
        }
    }

    /// Extract the square block of the given size at (i0, j0).
    pub fn block(&self, i0: usize, j0: usize, size: usize) -> CMatrix {
        CMatrix::from_fn(size, |i, j| self.at(i0 + i, j0 + j))
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self.at(i, j);
                write!(f, "{:+.4e}{:+.4e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Matrix product with the dimension check from the operation contract.
pub fn multiply(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(a.n, b.n));
    }
    Ok(mul_unchecked(a, b))
}

/// `a^-1`; thin wrapper kept for symmetry with `multiply`.
pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    a.inverse()
}

fn mul_unchecked(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.n;
    let mut out = CMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a.data[i * n + k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            let brow = &b.data[k * n..(k + 1) * n];
            let orow = &mut out.data[i * n..(i + 1) * n];
            for (o, bv) in orow.iter_mut().zip(brow) {
                *o += aik * bv;
            }
        }
    }
    out
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        mul_unchecked(self, rhs)
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        CMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

/// LU factors of a square matrix, PA = LU packed in one array.
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    piv: Vec<usize>,
}

impl Lu {
    fn factor(a: &CMatrix) -> Result<Self> {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let threshold = tol::SINGULAR_PIVOT_REL * a.frobenius_norm();
        for k in 0..n {
            // Partial pivot: largest magnitude in column k at or below row k.
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in (k + 1)..n {
                let m = lu[i * n + k].norm();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best < threshold || best == 0.0 {
                return Err(Error::Singular {
                    pivot: best,
                    threshold,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let m = lu[i * n + k] / pivot;
                lu[i * n + k] = m;
                for j in (k + 1)..n {
                    let t = lu[k * n + j];
                    lu[i * n + j] -= m * t;
                }
            }
        }
        Ok(Self { n, lu, piv })
    }

    /// Solve `A x = b` for a single right-hand side.
    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= self.lu[i * n + j] * x[j];
            }
            x[i] = acc / self.lu[i * n + i];
        }
        x
    }

    /// Solve `A X = B` column by column.
    pub fn solve_mat(&self, b: &CMatrix) -> Result<CMatrix> {
        if b.n != self.n {
            return Err(Error::DimensionMismatch(self.n, b.n));
        }
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = b.at(i, j);
            }
            let x = self.solve_vec(&col);
            for i in 0..n {
                out.set(i, j, x[i]);
            }
        }
        Ok(out)
    }
}

/// `a \ b`, i.e. `a^-1 b`, without forming the inverse.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    a.lu()?.solve_mat(b)
}

/// Largest eigenvalue of a Hermitian matrix by cyclic complex Jacobi
/// rotations; eigenvalues only. Used as the gap-insensitive fallback for
/// the operator norm.
fn hermitian_max_eigenvalue(m: &CMatrix) -> Option<f64> {
    let n = m.n;
    let mut a = m.data.clone();
    let fro: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if fro == 0.0 {
        return Some(0.0);
    }
    let idx = |i: usize, j: usize| i * n + j;
    for _sweep in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[idx(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-14 * fro {
            return Some((0..n).map(|i| a[idx(i, i)].re).fold(f64::NEG_INFINITY, f64::max));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[idx(p, q)];
                let bn = b.norm();
                if bn <= 1e-300 {
                    continue;
                }
                let app = a[idx(p, p)].re;
                let aqq = a[idx(q, q)].re;
                let tau = (aqq - app) / (2.0 * bn);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = (b / bn) * (t * c);
                // Rows p, q of U* A, with U = [[c, s], [-conj(s), c]].
                for j in 0..n {
                    let x = a[idx(p, j)];
                    let y = a[idx(q, j)];
                    a[idx(p, j)] = c * x - s * y;
                    a[idx(q, j)] = s.conj() * x + c * y;
                }
                // Columns p, q of (U* A) U.
                for i in 0..n {
                    let x = a[idx(i, p)];
                    let y = a[idx(i, q)];
                    a[idx(i, p)] = c * x - s.conj() * y;
                    a[idx(i, q)] = s * x + c * y;
                }
            }
        }
    }
    None
}

pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 / (1u64 << 53) as f64
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

// ---- JSON format ----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let re = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j).re).collect())
            .collect();
        let im = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j).im).collect())
            .collect();
        MatrixJson { n: self.n, re, im }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.re.len() != raw.n || raw.im.len() != raw.n {
            return Err(D::Error::custom(format!(
                "expected {} rows, got re: {}, im: {}",
                raw.n,
                raw.re.len(),
                raw.im.len()
            )));
        }
        let mut data = Vec::with_capacity(raw.n * raw.n);
        for i in 0..raw.n {
            if raw.re[i].len() != raw.n || raw.im[i].len() != raw.n {
                return Err(D::Error::custom(format!(
                    "ragged row {i}: re has {}, im has {}, expected {}",
                    raw.re[i].len(),
                    raw.im[i].len(),
                    raw.n
                )));
            }
            for j in 0..raw.n {
                data.push(Complex64::new(raw.re[i][j], raw.im[i][j]));
            }
        }
        CMatrix::new(raw.n, data).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_multiplication() {
        let a = CMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(-0.5, 0.0)],
            vec![c(0.0, 1.0), c(3.0, -1.0)],
        ])
        .unwrap();
        let i = CMatrix::identity(2);
        let prod = multiply(&i, &a).unwrap();
        assert!((&prod - &a).frobenius_norm() < 1e-15);
    }

    #[test]
    fn diagonal_product() {
        let a = CMatrix::from_diag(&[c(2.0, 0.0), c(3.0, 0.0)]);
        let b = CMatrix::from_diag(&[c(5.0, 0.0), c(7.0, 0.0)]);
        let p = multiply(&a, &b).unwrap();
        let want = CMatrix::from_diag(&[c(10.0, 0.0), c(21.0, 0.0)]);
        assert!((&p - &want).frobenius_norm() < 1e-14);
    }

    #[test]
    fn nilpotent_square_is_zero() {
        // E12 in M2: the introduction's example of a matrix with no square root.
        let e12 = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let sq = multiply(&e12, &e12).unwrap();
        assert_eq!(sq.frobenius_norm(), 0.0);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = CMatrix::identity(2);
        let b = CMatrix::identity(3);
        assert!(matches!(
            multiply(&a, &b),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn inverse_of_diagonal() {
        let a = CMatrix::from_diag(&[c(2.0, 0.0), c(4.0, 0.0)]);
        let inv = a.inverse().unwrap();
        let want = CMatrix::from_diag(&[c(0.5, 0.0), c(0.25, 0.0)]);
        assert!((&inv - &want).frobenius_norm() < 1e-14);
    }

    #[test]
    fn inverse_residual_on_remark_matrix() {
        // 2x2 from the geometric-mean remark; checked against the cofactor
        // formula: inv([[a,b],[c,d]]) = [[d,-b],[-c,a]] / (ad - bc).
        let m = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(-2.0, 0.0), c(1.0 / 3.0, 0.0)],
        ])
        .unwrap();
        let det = c(1.0, 0.0) * c(1.0 / 3.0, 0.0) - c(1.0, 0.0) * c(-2.0, 0.0);
        let cofactor = CMatrix::from_rows(&[
            vec![c(1.0 / 3.0, 0.0) / det, c(-1.0, 0.0) / det],
            vec![c(2.0, 0.0) / det, c(1.0, 0.0) / det],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        assert!((&inv - &cofactor).frobenius_norm() < 1e-14);
        let resid = &multiply(&m, &inv).unwrap() - &CMatrix::identity(2);
        assert!(resid.frobenius_norm() < 1e-14);
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]])
            .unwrap();
        assert!(matches!(a.inverse(), Err(Error::Singular { .. })));
    }

    #[test]
    fn op_norm_of_fixed_cases() {
        let a = CMatrix::from_diag(&[c(3.0, 0.0), c(0.0, -4.0)]);
        assert!((a.op_norm2().unwrap() - 4.0).abs() < 1e-10);
        let e12 = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert!((e12.op_norm2().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn json_round_trip_and_ragged_rejection() {
        let a = CMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(-0.5, 0.25)],
            vec![c(0.0, 1.0), c(3.0, -1.0)],
        ])
        .unwrap();
        let s = serde_json::to_string(&a).unwrap();
        let back: CMatrix = serde_json::from_str(&s).unwrap();
        assert!((&a - &back).frobenius_norm() == 0.0);

        let ragged = r#"{"n":2,"re":[[1.0,2.0],[3.0]],"im":[[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<CMatrix>(ragged).is_err());
        let nonfinite = r#"{"n":1,"re":[[1e999]],"im":[[0]]}"#;
        assert!(serde_json::from_str::<CMatrix>(nonfinite).is_err());
    }
}
