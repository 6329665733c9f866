//! Stability sweep: the same run at time steps spanning several decades.

use serde::Serialize;

use crate::config::SimConfig;
use crate::error::Result;
use crate::timestep::run;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityRow {
    pub dt: f64,
    pub steps: usize,
    /// `sup_k ‖∇u^k‖²` over the computed steps.
    pub sup_grad_u_sq: f64,
    /// `Σ_k ‖Δu^k‖² Δt`.
    pub sum_lap_dt: f64,
    pub final_energy: f64,
    pub blew_up: bool,
    pub blow_up_step: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityTable {
    pub rows: Vec<StabilityRow>,
    /// `max dt / min dt ≥ 1000`.
    pub spans_three_decades: bool,
}

impl StabilityTable {
    pub fn blow_ups(&self) -> usize {
        self.rows.iter().filter(|r| r.blew_up).count()
    }

    /// `(max − min) / min` of the sup column.
    pub fn sup_spread(&self) -> f64 {
        let sups = self.rows.iter().map(|r| r.sup_grad_u_sq);
        let max = sups.clone().fold(f64::NEG_INFINITY, f64::max);
        let min = sups.fold(f64::INFINITY, f64::min);
        if max == 0.0 {
            0.0
        } else {
            (max - min) / min
        }
    }
}

/// Runs `base` once per time step in `dts`, each to `base.t_end`.
pub fn stability_sweep(base: &SimConfig, dts: &[f64]) -> Result<StabilityTable> {
    let mut rows = Vec::with_capacity(dts.len());
    for &dt in dts {
        let mut cfg = base.clone();
        cfg.dt = dt;
        cfg.snapshot_every = 0;
        let out = run(&cfg)?;
        let sup_grad_u_sq = out.series.iter().map(|d| d.grad_u_sq).fold(0.0, f64::max);
        let sum_lap_dt = out.series.iter().map(|d| d.lap_u_sq * dt).sum();
        rows.push(StabilityRow {
            dt,
            steps: out.series.len() - 1,
            sup_grad_u_sq,
            sum_lap_dt,
            final_energy: out.series.last().map_or(0.0, |d| d.energy),
            blew_up: out.blow_up.is_some(),
            blow_up_step: out.blow_up.map(|b| b.step),
        });
    }
    let max = dts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = dts.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(StabilityTable {
        rows,
        spans_three_decades: max / min >= 1e3 * (1.0 - 1e-12),
    })
}
