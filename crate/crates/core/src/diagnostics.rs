//! Post-run convergence checks.

use crate::error::{Error, Result};
use crate::solver::TraceRecord;
use crate::Matrix;

/// Growth allowed between consecutive `h_diff` values in the tail.
pub const TAIL_SLACK: f64 = 1.05;
/// Fraction of the trace treated as the tail.
pub const TAIL_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub iterations: usize,
    pub final_r1: f64,
    pub final_r2: f64,
    pub final_dz: f64,
    pub final_h_diff: f64,
    pub first_h_diff: f64,
    pub monotone_tail: bool,
    /// `||Z - Z0||_F / ||Z0||_F` when a planted solution was supplied.
    pub gt_distance: Option<f64>,
}

impl ConvergenceReport {
    pub fn h_diff_decreased(&self) -> bool {
        self.final_h_diff < self.first_h_diff
    }
}

pub fn convergence_report(
    trace: &[TraceRecord],
    z_final: &Matrix,
    ground_truth: Option<&Matrix>,
) -> Result<ConvergenceReport> {
    let (first, last) = match (trace.first(), trace.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::InvalidInput("empty trace".into())),
    };
    let n = trace.len();
    let tail = ((n as f64) * TAIL_FRACTION).ceil() as usize;
    let start = n.saturating_sub(tail).max(1);
    let monotone_tail = (start..n).all(|k| trace[k].h_diff <= TAIL_SLACK * trace[k - 1].h_diff);

    let gt_distance = match ground_truth {
        Some(z0) => {
            if z0.shape() != z_final.shape() {
                return Err(Error::InvalidInput("ground truth shape differs from solution".into()));
            }
            let denom = z0.norm();
            Some(if denom > 0.0 {
                (z_final - z0).norm() / denom
            } else {
                z_final.norm()
            })
        }
        None => None,
    };

    Ok(ConvergenceReport {
        iterations: n,
        final_r1: last.r1,
        final_r2: last.r2,
        final_dz: last.dz,
        final_h_diff: last.h_diff,
        first_h_diff: first.h_diff,
        monotone_tail,
        gt_distance,
    })
}
