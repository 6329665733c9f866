//! Lid-driven cavity run to a steady state.

use serde::Serialize;

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::grid::{Grid2D, ScalarField, VectorField};
use crate::ops::div_h;
use crate::presets::{BoundaryPreset, ForcingPreset, InitialPreset};
use crate::timestep::{average_forcing, step_count, Simulation, StepDiagnostics};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CavityResult {
    pub steady: bool,
    pub steps: usize,
    pub t: f64,
    /// `‖u^{n+1} − u^n‖ / Δt` at the last step.
    pub change_rate: f64,
    pub energy: f64,
    /// `max |div_h u|` over interior nodes.
    pub max_div_interior: f64,
    /// `max |div_h u|` over all nodes, lid corners included.
    pub max_div_all: f64,
    /// `(y, u1)` along `x = 1/2`.
    pub vertical_centerline: Vec<(f64, f64)>,
    /// `(x, u2)` along `y = 1/2`.
    pub horizontal_centerline: Vec<(f64, f64)>,
    pub series: Vec<StepDiagnostics>,
    #[serde(skip)]
    pub velocity: VectorField,
}

/// Linear interpolation of `f` along the line `x = 1/2` (or `y = 1/2`).
fn centerline(f: &ScalarField, vertical: bool) -> Vec<(f64, f64)> {
    let grid = *f.grid();
    let (n_across, n_along) = if vertical { (grid.nx(), grid.ny()) } else { (grid.ny(), grid.nx()) };
    let pos = 0.5 * n_across as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n_across);
    let w = pos - lo as f64;
    (0..=n_along)
        .map(|k| {
            let at = |m: usize| if vertical { f.get(m, k) } else { f.get(k, m) };
            let coord = if vertical { grid.y(k) } else { grid.x(k) };
            (coord, (1.0 - w) * at(lo) + w * at(hi))
        })
        .collect()
}

/// Runs the lid preset from rest until `‖u^{n+1} − u^n‖/Δt ≤ steady_tol`
/// or `t_max`.
pub fn lid_driven_cavity(speed: f64, nu: f64, grid: Grid2D, dt: f64, t_max: f64, steady_tol: f64) -> Result<CavityResult> {
    let cfg = SimConfig {
        grid,
        nu,
        dt,
        t_end: t_max,
        forcing: ForcingPreset::Zero,
        initial: InitialPreset::Zero,
        bc: BoundaryPreset::Lid { speed },
        snapshot_every: 0,
        ..SimConfig::default()
    };
    let sim = Simulation::new(&cfg)?;
    let stepper = sim.stepper();
    let forcing = cfg.forcing.sampler(nu);
    let mut state = sim.initial_state()?;
    let mut series = vec![stepper.diagnostics(&state.u, 0, 0.0, None)];
    let max_steps = step_count(t_max, dt);
    let mut change_rate = f64::INFINITY;
    let mut steady = false;
    for n in 0..max_steps {
        let f = average_forcing(&forcing, grid, n, dt)?;
        let data = sim.inhomogeneous_data(n);
        let out = match &data {
            Some(d) => stepper.step_nonhomogeneous(&state, &f, d)?,
            None => stepper.step(&state, &f)?,
        };
        change_rate = out.state.u.sub(&state.u)?.norm_sq().sqrt() / dt;
        series.push(out.diag);
        state = out.state;
        if change_rate <= steady_tol {
            steady = true;
            break;
        }
    }
    if !state.u.is_finite() {
        return Err(Error::BlowUp { step: state.n, t: state.t });
    }
    let div = div_h(&state.u);
    Ok(CavityResult {
        steady,
        steps: state.n,
        t: state.t,
        change_rate,
        energy: state.u.norm_sq(),
        max_div_interior: div.interior_max_abs(),
        max_div_all: div.max_abs(),
        vertical_centerline: centerline(&state.u.u1, true),
        horizontal_centerline: centerline(&state.u.u2, false),
        series,
        velocity: state.u,
    })
}

/// Relative L² difference of two centerline profiles, compared at the
/// coarse profile's points (the fine grid must be a refinement).
pub fn profile_difference(coarse: &[(f64, f64)], fine: &[(f64, f64)]) -> Option<f64> {
    let n = coarse.len() - 1;
    let m = fine.len() - 1;
    if n == 0 || !m.is_multiple_of(n) {
        return None;
    }
    let stride = m / n;
    let (mut diff, mut norm) = (0.0, 0.0);
    for (k, &(_, a)) in coarse.iter().enumerate() {
        let b = fine[k * stride].1;
        diff += (a - b).powi(2);
        norm += b * b;
    }
    if norm == 0.0 {
        return Some(diff.sqrt());
    }
    Some((diff / norm).sqrt())
}
