//! Manufactured-solution convergence study.

use serde::Serialize;

use super::fit::log_log_slope;
use crate::error::{Error, Result};
use crate::grid::{Grid2D, VectorField};
use crate::presets::{mms, ForcingPreset};
use crate::timestep::{average_forcing_over, SimState, Stepper};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRow {
    pub n: usize,
    pub dt: f64,
    /// Discrete L² error of the velocity at the final time.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceResult {
    pub spatial: Vec<ErrorRow>,
    pub temporal: Vec<ErrorRow>,
    /// `−d log e / d log h`.
    pub spatial_order: Option<f64>,
    /// `d log e / d log Δt`.
    pub temporal_order: Option<f64>,
    pub t_final: f64,
    pub nu: f64,
}

/// Velocity error at `t_final` of one manufactured run.
///
/// When `t_final` is not a multiple of `dt` the last step is shortened.
pub fn manufactured_error(n: usize, dt: f64, nu: f64, t_final: f64) -> Result<f64> {
    let grid = Grid2D::square(n)?;
    let stepper = Stepper::new(grid, nu, dt)?;
    let forcing = ForcingPreset::Manufactured.sampler(nu);
    let ratio = t_final / dt;
    let full = if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
        ratio.round() as usize
    } else {
        ratio.floor() as usize
    };
    let mut state = SimState {
        u: VectorField::from_fn(grid, |x, y| mms::velocity(x, y, 0.0)),
        t: 0.0,
        n: 0,
    };
    let mut t = 0.0;
    for k in 0..full {
        t = k as f64 * dt;
        let f = average_forcing_over(&forcing, grid, t, dt)?;
        state = stepper.step(&state, &f)?.state;
        t = (k + 1) as f64 * dt;
    }
    let rest = t_final - t;
    if rest > 1e-12 * dt {
        let last = Stepper::new(grid, nu, rest)?;
        let f = average_forcing_over(&forcing, grid, t, rest)?;
        state = last.step(&state, &f)?.state;
    }
    let exact = VectorField::from_fn(grid, |x, y| mms::velocity(x, y, t_final));
    Ok(state.u.sub(&exact)?.norm_sq().sqrt())
}

pub fn convergence_study(
    nu: f64,
    grids: &[usize],
    spatial_dt: f64,
    temporal_dts: &[f64],
    temporal_n: usize,
    t_final: f64,
) -> Result<ConvergenceResult> {
    if grids.len() < 2 || temporal_dts.len() < 2 {
        return Err(Error::invalid("grids/dts", "need at least two entries each"));
    }
    let spatial = grids
        .iter()
        .map(|&n| Ok(ErrorRow { n, dt: spatial_dt, error: manufactured_error(n, spatial_dt, nu, t_final)? }))
        .collect::<Result<Vec<_>>>()?;
    let temporal = temporal_dts
        .iter()
        .map(|&dt| Ok(ErrorRow { n: temporal_n, dt, error: manufactured_error(temporal_n, dt, nu, t_final)? }))
        .collect::<Result<Vec<_>>>()?;
    let h: Vec<f64> = spatial.iter().map(|r| 1.0 / r.n as f64).collect();
    let e: Vec<f64> = spatial.iter().map(|r| r.error).collect();
    let dts: Vec<f64> = temporal.iter().map(|r| r.dt).collect();
    let et: Vec<f64> = temporal.iter().map(|r| r.error).collect();
    Ok(ConvergenceResult {
        spatial_order: log_log_slope(&h, &e),
        temporal_order: log_log_slope(&dts, &et),
        spatial,
        temporal,
        t_final,
        nu,
    })
}
