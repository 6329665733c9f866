//! Stokes-pressure estimate: `‖∇p_S‖² ≤ β‖Δu‖² + C‖∇u‖²` over samples.

use serde::Serialize;

use super::fit::constrained_beta_fit;
use super::sampling::SampleSpec;
use crate::error::Result;
use crate::grid::{Grid2D, VectorField};
use crate::pressure::{stokes_pressure, StokesRatioData};
use crate::solvers::NeumannPlan;

/// Fit is reported only with at least this many samples.
pub const MIN_FIT_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleRow {
    pub index: usize,
    pub grad_ps_sq: f64,
    pub lap_u_sq: f64,
    pub grad_u_sq: f64,
    /// `‖∇p_S‖² / ‖Δu‖²`; NaN for skipped samples.
    pub ratio: f64,
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub beta_hat: f64,
    pub c_hat: f64,
    /// Largest ratio, only for divergence-free samples.
    pub max_ratio: Option<f64>,
    pub samples: usize,
    pub skipped: usize,
    pub nx: usize,
    pub ny: usize,
    /// At least [`MIN_FIT_SAMPLES`] samples entered the fit.
    pub reportable: bool,
}

#[derive(Debug, Clone)]
pub struct StokesStudy {
    pub rows: Vec<SampleRow>,
    pub fit: FitResult,
}

/// Runs the study with the fast Neumann solver.
pub fn verify_stokes_estimate(spec: &SampleSpec, grid: Grid2D) -> Result<StokesStudy> {
    let plan = NeumannPlan::new(grid);
    verify_stokes_estimate_with(spec, grid, |u| Ok(stokes_pressure(&plan, u)?.ratio_data))
}

/// Runs the study with a caller-supplied Stokes-pressure evaluation.
pub fn verify_stokes_estimate_with(
    spec: &SampleSpec,
    grid: Grid2D,
    mut evaluate: impl FnMut(&VectorField) -> Result<StokesRatioData>,
) -> Result<StokesStudy> {
    let mut rows = Vec::with_capacity(spec.count);
    for index in 0..spec.count {
        let u = spec.sample(grid, index);
        let d = evaluate(&u)?;
        let skipped = !(d.lap_u_sq > 0.0);
        rows.push(SampleRow {
            index,
            grad_ps_sq: d.grad_ps_sq,
            lap_u_sq: d.lap_u_sq,
            grad_u_sq: d.grad_u_sq,
            ratio: if skipped { f64::NAN } else { d.grad_ps_sq / d.lap_u_sq },
            skipped,
        });
    }
    let used: Vec<&SampleRow> = rows.iter().filter(|r| !r.skipped).collect();
    let r: Vec<f64> = used.iter().map(|row| row.ratio).collect();
    let s: Vec<f64> = used.iter().map(|row| row.grad_u_sq / row.lap_u_sq).collect();
    let (beta_hat, c_hat) = constrained_beta_fit(&r, &s).unwrap_or((f64::NAN, f64::NAN));
    let max_ratio = if spec.divergence_free {
        r.iter().copied().reduce(f64::max)
    } else {
        None
    };
    let fit = FitResult {
        beta_hat,
        c_hat,
        max_ratio,
        samples: used.len(),
        skipped: rows.len() - used.len(),
        nx: grid.nx(),
        ny: grid.ny(),
        reportable: used.len() >= MIN_FIT_SAMPLES,
    };
    Ok(StokesStudy { rows, fit })
}
