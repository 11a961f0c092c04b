//! Numerical range (field of values) via support-function sweep, operator
//! classification (accretive / sectorial / type M / unit-ball classes), and
//! scalar convergence-region predicates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::schur;
use crate::tol;

/// Sampled support function of W(a) at one angle.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RangeSample {
    pub theta: f64,
    /// Top eigenvalue of the Hermitian part of `e^{-i theta} a`.
    pub support: f64,
    /// `<a v, v>` for the corresponding top eigenvector `v`.
    pub boundary: (f64, f64),
}

/// Support-function samples and the convex hull of the boundary points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NumericalRange {
    pub samples: Vec<RangeSample>,
    /// Counterclockwise hull vertices.
    pub hull: Vec<(f64, f64)>,
    pub contains_zero: bool,
    /// Signed distance from 0 to the hull boundary; positive inside.
    pub zero_margin: f64,
}

impl NumericalRange {
    pub fn hull_points(&self) -> Vec<Complex64> {
        self.hull.iter().map(|&(x, y)| Complex64::new(x, y)).collect()
    }

    /// Smallest real part over the hull.
    pub fn min_re(&self) -> f64 {
        self.hull
            .iter()
            .map(|&(x, _)| x)
            .fold(f64::INFINITY, f64::min)
    }

    /// Does the hull meet the open negative real axis?
    pub fn meets_negative_axis(&self) -> bool {
        let scale = self.scale();
        let cut = real_axis_section(&self.hull, scale);
        match cut {
            Some((lo, _)) => lo < -1e-12 * scale.max(1.0),
            None => false,
        }
    }

    /// Interval cut out of the real axis by the hull, when they meet.
    pub fn real_axis_interval(&self) -> Option<(f64, f64)> {
        real_axis_section(&self.hull, self.scale())
    }

    /// Distance from a point to the hull (0 when inside).
    pub fn distance_from(&self, z: Complex64) -> f64 {
        let p = (z.re, z.im);
        if self.hull.is_empty() {
            return f64::INFINITY;
        }
        if point_in_hull(&self.hull, p, 0.0) {
            return 0.0;
        }
        hull_boundary_distance(&self.hull, p)
    }

    /// Interval of arguments over nonzero hull vertices (atan2 branch).
    /// `None` when the hull meets the strictly negative axis, where a
    /// single-branch interval stops being meaningful.
    pub fn argument_interval(&self) -> Option<(f64, f64)> {
        if self.meets_negative_axis() {
            return None;
        }
        let scale = self.scale();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut any = false;
        for &(x, y) in &self.hull {
            if (x * x + y * y).sqrt() <= 1e-12 * scale.max(1.0) {
                continue;
            }
            let arg = y.atan2(x);
            lo = lo.min(arg);
            hi = hi.max(arg);
            any = true;
        }
        if any {
            Some((lo, hi))
        } else {
            Some((0.0, 0.0))
        }
    }

    fn scale(&self) -> f64 {
        self.hull
            .iter()
            .map(|&(x, y)| (x * x + y * y).sqrt())
            .fold(0.0, f64::max)
    }
}

/// Classification of an operator into the paper's classes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectorReport {
    pub accretive: bool,
    pub strictly_accretive: bool,
    /// min Re over the hull of W(a); the margin behind both flags.
    pub accretive_margin: f64,
    /// Smallest theta with W(a) inside S_theta, when one exists.
    pub sector_angle: Option<f64>,
    pub argument_interval: Option<(f64, f64)>,
    pub type_m: TypeMBound,
    /// ||1 - a|| <= 1.
    pub in_fa: bool,
    /// Some t > 0 has ||1 - t a|| <= 1.
    pub in_cone_ca: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TypeMBound {
    Finite(f64),
    Unbounded,
}

impl TypeMBound {
    pub fn finite(&self) -> Option<f64> {
        match self {
            TypeMBound::Finite(m) => Some(*m),
            TypeMBound::Unbounded => None,
        }
    }
}

/// Scalar convergence regions used as iteration hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RegionSpec {
    HalfPlane,
    Sector { theta: f64 },
    Cardioid,
    UnitDisk,
    #[serde(rename = "newtonD")]
    NewtonD { epsilon: f64 },
    DiskUnion,
}

/// Support-function sweep: for each angle, the top eigenpair of the
/// Hermitian part of `e^{-i theta} a` gives a support value and a boundary
/// point `<a v, v>`; the hull of those points approximates W(a).
pub fn numerical_range(a: &CMatrix, n_angles: usize) -> Result<NumericalRange> {
    if n_angles < 8 {
        return Err(Error::PreconditionFailed(format!(
            "numerical range needs at least 8 angles, got {n_angles}"
        )));
    }
    let n = a.n();
    let mut samples = Vec::with_capacity(n_angles);
    let mut points = Vec::with_capacity(n_angles);
    for k in 0..n_angles {
        let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n_angles as f64);
        let rot = Complex64::from_polar(1.0, -theta);
        let h = a.scale(rot).hermitian_part();
        let dec = schur::eig(&h)?;
        // For the (normal) Hermitian part, Schur columns are eigenvectors;
        // pick the column whose diagonal entry has the largest real part.
        let mut best = 0usize;
        let mut best_re = f64::NEG_INFINITY;
        for i in 0..n {
            let re = dec.schur_t.at(i, i).re;
            if re > best_re {
                best_re = re;
                best = i;
            }
        }
        let v: Vec<Complex64> = (0..n).map(|i| dec.schur_q.at(i, best)).collect();
        let av = a.matvec(&v);
        let mut rayleigh = Complex64::new(0.0, 0.0);
        for i in 0..n {
            rayleigh += v[i].conj() * av[i];
        }
        samples.push(RangeSample {
            theta,
            support: best_re,
            boundary: (rayleigh.re, rayleigh.im),
        });
        points.push((rayleigh.re, rayleigh.im));
    }
    let hull = convex_hull(&points);
    let scale = hull
        .iter()
        .map(|&(x, y)| (x * x + y * y).sqrt())
        .fold(0.0, f64::max);
    let inside = point_in_hull(&hull, (0.0, 0.0), 1e-12 * scale.max(1.0));
    let boundary_dist = if hull.is_empty() {
        f64::INFINITY
    } else {
        hull_boundary_distance(&hull, (0.0, 0.0))
    };
    let zero_margin = if inside { boundary_dist } else { -boundary_dist };
    Ok(NumericalRange {
        samples,
        hull,
        contains_zero: inside,
        zero_margin,
    })
}

/// Classify `a`: accretivity with margin, sector angle, argument interval,
/// type-M constant on a log grid, and unit-ball class membership.
pub fn classify(a: &CMatrix) -> Result<SectorReport> {
    let range = numerical_range(a, tol::DEFAULT_ANGLES)?;
    classify_from_range(a, &range)
}

pub fn classify_from_range(a: &CMatrix, range: &NumericalRange) -> Result<SectorReport> {
    let margin = range.min_re();
    let accretive = margin >= -tol::STRICT_MARGIN;
    let strictly = margin > tol::STRICT_MARGIN;

    let sector_angle = sector_angle_from_range(range);

    let type_m = type_m_constant(a);
    let in_fa = {
        let resid = &CMatrix::identity(a.n()) - a;
        resid.op_norm2()? <= 1.0 + 1e-12
    };
    let in_cone_ca = in_fa || cone_membership(a)?;

    Ok(SectorReport {
        accretive,
        strictly_accretive: strictly,
        accretive_margin: margin,
        sector_angle,
        argument_interval: range.argument_interval(),
        type_m,
        in_fa,
        in_cone_ca,
    })
}

/// Smallest theta with the hull inside S_theta; `None` when the hull
/// meets the strictly negative axis or surrounds the origin.
pub fn sector_angle_from_range(range: &NumericalRange) -> Option<f64> {
    let meets_negative = range.meets_negative_axis();
    let zero_interior = range.contains_zero && range.zero_margin > tol::STRICT_MARGIN;
    if meets_negative || zero_interior {
        return None;
    }
    let scale = range
        .hull
        .iter()
        .map(|&(x, y)| (x * x + y * y).sqrt())
        .fold(0.0, f64::max);
    let mut max_arg = 0.0f64;
    for &(x, y) in &range.hull {
        if (x * x + y * y).sqrt() <= 1e-12 * scale.max(1.0) {
            continue;
        }
        max_arg = max_arg.max(y.atan2(x).abs());
    }
    Some(max_arg)
}

/// Sector angle of W(m) with the default sweep.
pub fn sector_angle_of(m: &CMatrix) -> Result<Option<f64>> {
    let range = numerical_range(m, tol::DEFAULT_ANGLES)?;
    Ok(sector_angle_from_range(&range))
}

/// Cheap accretivity margin: smallest eigenvalue of the Hermitian part,
/// which equals min Re W(a).
pub fn accretive_margin(a: &CMatrix) -> Result<f64> {
    let h = a.hermitian_part();
    let dec = schur::eig(&h)?;
    Ok(dec
        .values
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min))
}

/// Max over a log grid of `t ||(t + a)^-1||`, 25 points per decade over
/// t in [1e-6, 1e6]. The upper cutoff is safe because the bound is
/// automatic past 2||a||; a singular resolvent on the grid, or a max that
/// is still climbing at the small-t end, reports `Unbounded`.
pub fn type_m_constant(a: &CMatrix) -> TypeMBound {
    let per_decade = 25usize;
    let decades = 12i32; // 1e-6 .. 1e6
    let total = per_decade * decades as usize + 1;
    let mut values = Vec::with_capacity(total);
    for j in 0..total {
        let exp = -6.0 + (j as f64) / (per_decade as f64);
        let t = 10f64.powf(exp);
        let shifted = a.add_scaled_identity(Complex64::new(t, 0.0));
        let inv = match shifted.inverse() {
            Ok(m) => m,
            Err(_) => return TypeMBound::Unbounded,
        };
        let nrm = match inv.op_norm2() {
            Ok(v) => v,
            Err(_) => return TypeMBound::Unbounded,
        };
        values.push(t * nrm);
    }
    let (argmax, &max) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    // Still climbing into the small-t end of the grid: no finite constant
    // in sight. (At the large-t end the value tends to 1 automatically.)
    if argmax == 0 && values.len() > 1 && values[0] > values[1] * (1.0 + 1e-3) {
        return TypeMBound::Unbounded;
    }
    TypeMBound::Finite(max)
}

/// Search for t > 0 with ||1 - t a|| <= 1; the objective is convex in t.
fn cone_membership(a: &CMatrix) -> Result<bool> {
    let id = CMatrix::identity(a.n());
    let scale = a.op_norm2()?;
    if scale == 0.0 {
        return Ok(true); // a = 0: ||1 - t*0|| = 1 for every t
    }
    let phi = |t: f64| -> Result<f64> { (&id - &a.scale_re(t)).op_norm2() };
    // Coarse log grid to bracket the minimum, then golden-section refine.
    let mut best_t = 1.0 / scale;
    let mut best = f64::INFINITY;
    for j in -40..=40 {
        let t = (1.0 / scale) * 10f64.powf(j as f64 / 10.0);
        let v = phi(t)?;
        if v < best {
            best = v;
            best_t = t;
        }
        if v <= 1.0 + tol::STRICT_MARGIN {
            return Ok(true);
        }
    }
    let (mut lo, mut hi) = (best_t / 10.0_f64.powf(0.1), best_t * 10.0_f64.powf(0.1));
    let golden = 0.5 * (3.0 - 5f64.sqrt());
    for _ in 0..60 {
        let t1 = lo + golden * (hi - lo);
        let t2 = hi - golden * (hi - lo);
        if phi(t1)? < phi(t2)? {
            hi = t2;
        } else {
            lo = t1;
        }
    }
    Ok(phi(0.5 * (lo + hi))? <= 1.0 + tol::STRICT_MARGIN)
}

/// Membership of a scalar in a convergence region.
pub fn in_region(z: Complex64, region: &RegionSpec) -> bool {
    match region {
        RegionSpec::HalfPlane => z.re > 0.0,
        RegionSpec::Sector { theta } => z.norm() == 0.0 || z.im.atan2(z.re).abs() <= *theta,
        RegionSpec::UnitDisk => z.norm() <= 1.0,
        RegionSpec::Cardioid => in_cardioid(z),
        RegionSpec::NewtonD { epsilon } => {
            z.re > 0.0 && (z.norm() <= 1.0 + epsilon || (z - 1.0).norm() <= 1.0)
        }
        RegionSpec::DiskUnion => z.norm() <= 1.0 || in_cardioid(z),
    }
}

/// Open cardioid `{2w - w^2 : |w| < 1}`: membership via the principal
/// square root, `|1 - sqrt(1 - z)| < 1`.
fn in_cardioid(z: Complex64) -> bool {
    let w = Complex64::new(1.0, 0.0) - (Complex64::new(1.0, 0.0) - z).sqrt();
    w.norm() < 1.0
}

/// Conservative region check: every hull vertex of W(a) satisfies the
/// scalar predicate. Uses a 64-angle sweep when no range is supplied.
pub fn range_in_region(a: &CMatrix, region: &RegionSpec) -> Result<bool> {
    let range = numerical_range(a, tol::DEFAULT_ANGLES.max(tol::REGION_ANGLES))?;
    Ok(hull_in_region(&range, region))
}

pub fn hull_in_region(range: &NumericalRange, region: &RegionSpec) -> bool {
    range
        .hull_points()
        .iter()
        .all(|&z| in_region(z, region))
}

/// Check that `W(e^{i rho} x)` stays clear of the strictly negative axis
/// for `rho` sampled along `[0, theta]`.
pub fn rotation_path_clear(x: &CMatrix, theta: f64, samples: usize) -> Result<()> {
    for k in 0..=samples {
        let rho = theta * (k as f64) / (samples as f64);
        let rotated = x.scale(Complex64::from_polar(1.0, rho));
        let range = numerical_range(&rotated, tol::REGION_ANGLES)?;
        if range.meets_negative_axis() {
            return Err(Error::PreconditionFailed(format!(
                "W(e^(i rho) x) meets the negative axis at rho = {rho}"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateNormCheck {
    /// ||1 - t a||.
    pub lhs: f64,
    /// ||1 - a||.
    pub rhs: f64,
    /// Both hypotheses hold: lhs <= 1 and 0 not in W(a).
    pub hypothesis: bool,
    /// The implication itself (vacuously true when the hypothesis fails).
    pub verdict: bool,
}

/// The contraction-improvement implication: if `||1 - t a|| <= 1` for some
/// t > 1 and 0 is not in W(a), then `||1 - a|| < 1`.
pub fn state_norm_check(a: &CMatrix, t: f64) -> Result<StateNormCheck> {
    if t <= 1.0 {
        return Err(Error::PreconditionFailed(format!(
            "state norm check needs t > 1, got {t}"
        )));
    }
    let id = CMatrix::identity(a.n());
    let lhs = (&id - &a.scale_re(t)).op_norm2()?;
    let rhs = (&id - a).op_norm2()?;
    let range = numerical_range(a, tol::DEFAULT_ANGLES)?;
    let hypothesis = lhs <= 1.0 + 1e-12 && !range.contains_zero;
    let verdict = !hypothesis || rhs < 1.0;
    Ok(StateNormCheck {
        lhs,
        rhs,
        hypothesis,
        verdict,
    })
}

// ---- Convex hull and polygon helpers ---------------------------------------

/// Andrew's monotone chain; returns counterclockwise vertices without
/// duplicates. Collinear points are dropped.
pub fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let scale = points
        .iter()
        .map(|&(x, y)| (x * x + y * y).sqrt())
        .fold(0.0, f64::max);
    let tol_pt = 1e-14 * scale.max(1.0);
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (a.0 - b.0).abs() <= tol_pt && (a.1 - b.1).abs() <= tol_pt);
    if pts.len() <= 2 {
        return pts;
    }
    let area_tol = tol_pt * scale.max(1.0);
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| -> f64 {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= area_tol
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= area_tol
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.is_empty() {
        // All points collinear within tolerance: keep the extremes.
        vec![pts[0], pts[pts.len() - 1]]
    } else {
        lower
    }
}

/// Point-in-convex-polygon with tolerance; handles degenerate hulls.
pub fn point_in_hull(hull: &[(f64, f64)], p: (f64, f64), tolerance: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => {
            let d = ((p.0 - hull[0].0).powi(2) + (p.1 - hull[0].1).powi(2)).sqrt();
            d <= tolerance
        }
        2 => segment_distance(hull[0], hull[1], p) <= tolerance,
        _ => {
            let m = hull.len();
            for i in 0..m {
                let a = hull[i];
                let b = hull[(i + 1) % m];
                let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                if cross < -tolerance {
                    return false;
                }
            }
            true
        }
    }
}

/// Distance from a point to the hull boundary.
pub fn hull_boundary_distance(hull: &[(f64, f64)], p: (f64, f64)) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => ((p.0 - hull[0].0).powi(2) + (p.1 - hull[0].1).powi(2)).sqrt(),
        _ => {
            let m = hull.len();
            let mut best = f64::INFINITY;
            for i in 0..m {
                let a = hull[i];
                let b = hull[(i + 1) % m];
                best = best.min(segment_distance(a, b, p));
            }
            best
        }
    }
}

fn segment_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}

/// Intersection of the hull with the real axis, as an interval, when the
/// hull crosses or touches it.
fn real_axis_section(hull: &[(f64, f64)], scale: f64) -> Option<(f64, f64)> {
    let tol_im = 1e-10 * scale.max(1.0);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut any = false;
    let m = hull.len();
    for i in 0..m {
        let (x, y) = hull[i];
        if y.abs() <= tol_im {
            lo = lo.min(x);
            hi = hi.max(x);
            any = true;
        }
        if m >= 2 {
            let (x2, y2) = hull[(i + 1) % m];
            if (y < -tol_im && y2 > tol_im) || (y > tol_im && y2 < -tol_im) {
                let t = -y / (y2 - y);
                let xc = x + t * (x2 - x);
                lo = lo.min(xc);
                hi = hi.max(xc);
                any = true;
            }
        }
        if m == 1 {
            break;
        }
    }
    if any {
        Some((lo, hi))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normal_matrix_hull_is_segment() {
        // diag(1, i): W is the segment from 1 to i.
        let a = CMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let r = numerical_range(&a, 64).unwrap();
        for &(x, y) in &r.hull {
            assert!((x + y - 1.0).abs() < 1e-8, "({x},{y}) off the segment");
            assert!((-1e-8..=1.0 + 1e-8).contains(&x));
        }
    }

    #[test]
    fn jordan_block_hull_is_half_disk() {
        // Classical field of values of E12: the disk of radius 1/2.
        let a = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        let r = numerical_range(&a, 256).unwrap();
        for &(x, y) in &r.hull {
            let rad = (x * x + y * y).sqrt();
            assert!((rad - 0.5).abs() < 1e-3, "radius {rad}");
        }
        assert!(r.contains_zero);
        // Oracle: dense sampling of <a v, v> over deterministic unit vectors
        // stays inside the 1e-3-inflated hull.
        let mut state = 7u64;
        for _ in 0..2000 {
            let mut v = [c(0.0, 0.0); 2];
            for entry in v.iter_mut() {
                let x = crate::matrix::splitmix64(&mut state);
                let y = crate::matrix::splitmix64(&mut state);
                *entry = c(
                    (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5,
                    (y >> 11) as f64 / (1u64 << 53) as f64 - 0.5,
                );
            }
            let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            if norm == 0.0 {
                continue;
            }
            let v = [v[0] / norm, v[1] / norm];
            let av = a.matvec(&v);
            let ray = v[0].conj() * av[0] + v[1].conj() * av[1];
            assert!(point_in_hull(&r.hull, (ray.re, ray.im), 1e-3));
        }
    }

    #[test]
    fn hermitian_hull_degenerates_to_real_segment() {
        let a = CMatrix::from_diag(&[c(-1.0, 0.0), c(2.0, 0.0)]);
        let r = numerical_range(&a, 64).unwrap();
        for &(x, y) in &r.hull {
            assert!(y.abs() < 1e-8);
            assert!((-1.0 - 1e-8..=2.0 + 1e-8).contains(&x));
        }
        let xs: Vec<f64> = r.hull.iter().map(|p| p.0).collect();
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((lo + 1.0).abs() < 1e-8 && (hi - 2.0).abs() < 1e-8);
    }

    #[test]
    fn classify_identity() {
        let a = CMatrix::identity(3);
        let rep = classify(&a).unwrap();
        assert!(rep.accretive && rep.strictly_accretive);
        assert!(rep.sector_angle.unwrap() < 1e-9);
        assert!(rep.in_fa && rep.in_cone_ca);
        let m = rep.type_m.finite().expect("finite type M");
        assert!((m - 1.0).abs() < 1e-6, "type M constant {m}");
    }

    #[test]
    fn classify_skew_diagonal() {
        // diag(i, -i): accretive but not strictly, sector angle pi/2.
        let a = CMatrix::from_diag(&[c(0.0, 1.0), c(0.0, -1.0)]);
        let rep = classify(&a).unwrap();
        assert!(rep.accretive && !rep.strictly_accretive);
        let angle = rep.sector_angle.expect("sector angle");
        assert!((angle - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn type_m_with_negative_numerical_range() {
        // Invertible, -1 in the 1-1 entry, spectrum off the negative axis:
        // type M holds while min Re W(a) < 0.
        let a = CMatrix::from_rows(&[vec![c(-1.0, 0.0), c(5.0, 0.0)], vec![c(-2.0, 0.0), c(4.0, 0.0)]])
            .unwrap();
        let rep = classify(&a).unwrap();
        assert!(rep.accretive_margin < 0.0);
        assert!(rep.type_m.finite().is_some());
    }

    #[test]
    fn jordan_block_type_m_unbounded() {
        // Nilpotent: t ||(t+a)^-1|| ~ 1/t as t -> 0.
        let a = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert_eq!(type_m_constant(&a), TypeMBound::Unbounded);
    }

    #[test]
    fn region_membership_fixed_points() {
        assert!(in_region(c(1.0, 0.5), &RegionSpec::NewtonD { epsilon: 0.0 }));
        assert!(!in_region(c(-0.5, 0.0), &RegionSpec::HalfPlane));
        assert!(in_region(c(0.5, 0.0), &RegionSpec::Cardioid));
        assert!(in_region(c(0.9, 0.0), &RegionSpec::Cardioid));
        // The cusp z = 1 sits on the boundary of the open cardioid.
        assert!(!in_region(c(1.0, 0.0), &RegionSpec::Cardioid));
        assert!(in_region(c(1.0, 0.0), &RegionSpec::DiskUnion));
    }

    #[test]
    fn cardioid_matches_parametric_oracle() {
        // Points produced as 2w - w^2 with |w| < 1 are members; points whose
        // both square-root preimages lie outside the closed disk are not.
        let mut state = 99u64;
        let mut unit = || {
            let x = crate::matrix::splitmix64(&mut state);
            (x >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let r = 0.999 * unit();
            let phi = 2.0 * std::f64::consts::PI * unit();
            let w = Complex64::from_polar(r, phi);
            let z = 2.0 * w - w * w;
            assert!(in_cardioid(z), "z = {z} from w = {w} should be inside");
        }
        let mut outside = 0;
        while outside < 500 {
            let r = 1.001 + 2.0 * unit();
            let phi = 2.0 * std::f64::consts::PI * unit();
            let u = Complex64::from_polar(r, phi);
            let one = Complex64::new(1.0, 0.0);
            if (one - u).norm() >= 1.0 && (one + u).norm() >= 1.0 {
                let z = one - u * u;
                assert!(!in_cardioid(z), "z = {z} from u = {u} should be outside");
                outside += 1;
            }
        }
        // The specific point -0.1 = 2w - w^2 for w = 1 - sqrt(1.1), |w| < 1.
        assert!(in_cardioid(c(-0.1, 0.0)));
    }

    #[test]
    fn contraction_range_in_unit_disk() {
        let a = CMatrix::from_diag(&[c(0.3, 0.2), c(-0.4, 0.1)]);
        assert!(range_in_region(&a, &RegionSpec::UnitDisk).unwrap());
        let b = CMatrix::from_diag(&[c(0.5, 0.0), c(0.9, 0.0)]);
        assert!(range_in_region(&b, &RegionSpec::Cardioid).unwrap());
        let h = CMatrix::from_diag(&[c(2.0, 0.01)]);
        assert!(range_in_region(&h, &RegionSpec::HalfPlane).unwrap());
    }

    #[test]
    fn state_norm_check_scalar_cases() {
        // a = (1/t) * 1 with t = 2.
        let a = CMatrix::identity(1).scale_re(0.5);
        let r = state_norm_check(&a, 2.0).unwrap();
        assert!(r.lhs < 1e-12 && (r.rhs - 0.5).abs() < 1e-12 && r.verdict);
        let i = CMatrix::identity(2);
        let r = state_norm_check(&i, 1.5).unwrap();
        assert!(r.hypothesis && r.verdict);
    }
}
