//! Per-step iteration records shared by the sign and root iterations,
//! plus the CSV schema `k, norm_Xk, norm_Xk_inv, err_ref, residual` and
//! the convergence-order fit used by the bound checks.

use serde::{Deserialize, Serialize};

/// One row of an iteration trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStep {
    pub k: usize,
    pub norm_x: f64,
    /// Norm of the iterate's inverse, when the step computes one.
    pub norm_x_inv: Option<f64>,
    /// Distance to the reference solution, when one is available.
    pub err_ref: Option<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    ResidualTol,
    Stagnation,
    MaxIter,
    Divergence,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationTrace {
    pub steps: Vec<TraceStep>,
    pub converged: bool,
    pub stop: StopReason,
    /// Hypothesis violations and other non-fatal flags raised during the run.
    pub warnings: Vec<String>,
}

impl IterationTrace {
    pub fn new() -> Self {
        Self {
            steps: Vec::new(),
            converged: false,
            stop: StopReason::MaxIter,
            warnings: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        k: usize,
        norm_x: f64,
        norm_x_inv: Option<f64>,
        err_ref: Option<f64>,
        residual: f64,
    ) {
        self.steps.push(TraceStep {
            k,
            norm_x,
            norm_x_inv,
            err_ref,
            residual,
        });
    }

    pub fn last_residual(&self) -> Option<f64> {
        self.steps.last().map(|s| s.residual)
    }

    /// CSV with header `k,norm_Xk,norm_Xk_inv,err_ref,residual`; missing
    /// entries are left empty. Fixed-precision floats keep the output
    /// byte-reproducible.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,norm_Xk,norm_Xk_inv,err_ref,residual\n");
        for s in &self.steps {
            let inv = s
                .norm_x_inv
                .map(|v| format!("{v:.12e}"))
                .unwrap_or_default();
            let err = s.err_ref.map(|v| format!("{v:.12e}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{:.12e},{},{},{:.12e}\n",
                s.k, s.norm_x, inv, err, s.residual
            ));
        }
        out
    }

    /// Errors-to-reference from the superlinear phase of the trace, as
    /// consecutive pairs (err_k, err_{k+1}).
    pub fn superlinear_pairs(&self, scale: f64) -> Vec<(f64, f64)> {
        let errs: Vec<Option<f64>> = self.steps.iter().map(|s| s.err_ref).collect();
        let upper = 0.1 * scale;
        let floor = 1e-13 * scale;
        let mut pairs = Vec::new();
        for w in errs.windows(2) {
            if let (Some(e0), Some(e1)) = (w[0], w[1]) {
                if e0 < upper && e0 > floor && e1 > floor && e1 < e0 {
                    pairs.push((e0, e1));
                }
            }
        }
        pairs
    }

    /// Least-squares slope of log err_{k+1} against log err_k over the
    /// superlinear phase; None when fewer than two usable pairs exist.
    pub fn fitted_order(&self, scale: f64) -> Option<f64> {
        let pairs = self.superlinear_pairs(scale);
        if pairs.len() < 2 {
            return None;
        }
        let pts: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (a.ln(), b.ln())).collect();
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() < 1e-12 {
            return None;
        }
        Some((n * sxy - sx * sy) / denom)
    }
}

impl Default for IterationTrace {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_columns_and_missing_fields() {
        let mut t = IterationTrace::new();
        t.push(0, 1.0, None, None, 0.5);
        t.push(1, 1.5, Some(2.0), Some(0.1), 0.25);
        let csv = t.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "k,norm_Xk,norm_Xk_inv,err_ref,residual");
        let row0 = lines.next().unwrap();
        assert!(row0.starts_with("0,"));
        assert_eq!(row0.split(',').count(), 5);
        assert!(row0.contains(",,"));
    }

    #[test]
    fn quadratic_sequence_fits_order_two() {
        let mut t = IterationTrace::new();
        // err_{k+1} = err_k^2
        let mut e = 1e-2f64;
        for k in 0..5 {
            t.push(k, 1.0, None, Some(e), e);
            e = e * e;
        }
        let order = t.fitted_order(1.0).unwrap();
        assert!((order - 2.0).abs() < 0.05, "order {order}");
    }
}
