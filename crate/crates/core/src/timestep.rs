//! Time stepping: implicit viscosity, explicit convection and pressure.
//!
//! One step solves, per velocity component,
//!
//! ```text
//!   (I − νΔt Δ_h) u^{n+1} = u^n + Δt (f^n − u^n·∇u^n − ∇p_E^n − ν∇p_S^n − ∇p_gh^n)
//! ```
//!
//! with `u^{n+1} = g(t_{n+1})` on the boundary.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::grid::{BoundaryData, BoundaryKind, Grid2D, ScalarField, VectorField};
use crate::ops::{advect, div_h, grad_norm_sq, interior_lap_norm_sq};
use crate::pressure::{euler_pressure, inhomogeneous_pressure, stokes_pressure, PressureParts, StokesRatioData};
use crate::solvers::EllipticPlans;

/// `‖∇u‖²` above which a run counts as blown up.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

type ForcingFn = dyn Fn(f64, f64, f64) -> [f64; 2] + Send + Sync;

/// A forcing `f(x, y, t)` and the rule for averaging it over a step.
#[derive(Clone)]
pub struct ForcingSampler {
    f: Arc<ForcingFn>,
    steady: bool,
}

impl std::fmt::Debug for ForcingSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ForcingSampler").field("steady", &self.steady).finish()
    }
}

impl ForcingSampler {
    /// Time-independent forcing; the interval average is the field itself.
    pub fn steady(f: impl Fn(f64, f64) -> [f64; 2] + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(move |x, y, _| f(x, y)),
            steady: true,
        }
    }

    /// Averaged over each step by 3-point Gauss quadrature.
    pub fn unsteady(f: impl Fn(f64, f64, f64) -> [f64; 2] + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            steady: false,
        }
    }

    pub fn sample(&self, grid: Grid2D, t: f64) -> VectorField {
        VectorField::from_fn(grid, |x, y| (self.f)(x, y, t))
    }
}

/// `f^n = (1/Δt) ∫_{nΔt}^{(n+1)Δt} f dt`.
pub fn average_forcing(sampler: &ForcingSampler, grid: Grid2D, n: usize, dt: f64) -> Result<VectorField> {
    average_forcing_over(sampler, grid, n as f64 * dt, dt)
}

/// Average of `f` over `[t0, t0 + dt]`.
pub fn average_forcing_over(sampler: &ForcingSampler, grid: Grid2D, t0: f64, dt: f64) -> Result<VectorField> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "must be > 0"));
    }
    let mid = t0 + 0.5 * dt;
    if sampler.steady {
        return Ok(sampler.sample(grid, mid));
    }
    let off = 0.5 * dt * (0.6f64).sqrt();
    let f = &sampler.f;
    Ok(VectorField::from_fn(grid, |x, y| {
        let (a, b, c) = (f(x, y, mid - off), f(x, y, mid), f(x, y, mid + off));
        [
            (5.0 * (a[0] + c[0]) + 8.0 * b[0]) / 18.0,
            (5.0 * (a[1] + c[1]) + 8.0 * b[1]) / 18.0,
        ]
    }))
}

#[derive(Debug, Clone)]
pub struct SimState {
    pub u: VectorField,
    pub t: f64,
    pub n: usize,
}

/// One row of the diagnostics series.
///
/// Velocity norms describe `u^n`. The pressure columns describe the
/// pressure that produced `u^n`, i.e. evaluated at `u^{n−1}`, and are zero
/// in the initial row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    pub grad_u_sq: f64,
    pub lap_u_sq: f64,
    pub div_u_sq: f64,
    pub grad_ps_sq: f64,
    pub grad_pe_sq: f64,
    pub stokes_ratio: f64,
    pub compat_corr: f64,
}

impl StepDiagnostics {
    pub fn is_finite(&self) -> bool {
        [
            self.energy,
            self.grad_u_sq,
            self.lap_u_sq,
            self.div_u_sq,
            self.grad_ps_sq,
            self.grad_pe_sq,
            self.stokes_ratio,
            self.compat_corr,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Divergence source and boundary-flux data for the nonhomogeneous step.
#[derive(Debug, Clone)]
pub struct InhomogeneousData {
    pub h: ScalarField,
    pub dt_h: ScalarField,
    /// `∂t(n·g)` at `t_n`.
    pub dt_ng: BoundaryData,
    /// Velocity boundary data at `t_{n+1}`.
    pub g_next: [BoundaryData; 2],
}

/// Everything the explicit part of a step needs, evaluated at `u^n`.
#[derive(Debug, Clone)]
pub struct StepPressure {
    pub parts: PressureParts,
    /// `f − u·∇u − ∇p_E − ν∇p_S − ∇p_gh`.
    pub explicit: VectorField,
    pub ratio: StokesRatioData,
    pub grad_pe_sq: f64,
    /// Largest compatibility constant applied by any of the solves.
    pub correction: f64,
    /// False when `∫∂t h` and `∮∂t(n·g)` disagree beyond tolerance.
    pub compatible: bool,
}

#[derive(Debug, Clone)]
pub struct StepOutput {
    pub state: SimState,
    pub diag: StepDiagnostics,
    pub compatible: bool,
}

/// Fixed `(grid, ν, Δt)` with prebuilt solver plans.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid2D,
    nu: f64,
    dt: f64,
    plans: EllipticPlans,
}

impl Stepper {
    pub fn new(grid: Grid2D, nu: f64, dt: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::invalid("nu", "must be > 0"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid("dt", "must be > 0"));
        }
        Ok(Self {
            grid,
            nu,
            dt,
            plans: EllipticPlans::new(grid),
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn plans(&self) -> &EllipticPlans {
        &self.plans
    }

    /// Pressure parts and explicit acceleration at `u`.
    pub fn pressure(&self, u: &VectorField, f: &VectorField, gh: Option<&InhomogeneousData>) -> Result<StepPressure> {
        let neumann = &self.plans.neumann;
        let euler = euler_pressure(neumann, u, f)?;
        let stokes = stokes_pressure(neumann, u)?;
        let mut explicit = f
            .sub(&advect(u))?
            .sub(&euler.grad)?
            .add_scaled(-self.nu, &stokes.potential.grad)?;
        let mut correction = euler.correction.abs().max(stokes.potential.correction.abs());
        let mut compatible = true;
        let gh_potential = match gh {
            Some(d) => {
                let p = inhomogeneous_pressure(neumann, &d.dt_h, &d.h, &d.dt_ng, self.nu)?;
                compatible = p.compatible;
                correction = correction.max(p.potential.correction.abs());
                if p.potential.grad.max_abs() > 0.0 {
                    explicit = explicit.sub(&p.potential.grad)?;
                }
                Some(p.potential)
            }
            None => None,
        };
        let parts = PressureParts::assemble(self.nu, &euler, &stokes.potential, gh_potential.as_ref())?;
        Ok(StepPressure {
            parts,
            explicit,
            ratio: stokes.ratio_data,
            grad_pe_sq: euler.grad.norm_sq(),
            correction,
            compatible,
        })
    }

    /// Implicit viscous solve from `state` with a precomputed explicit part.
    pub fn advance(&self, state: &SimState, pressure: &StepPressure, g_next: &[BoundaryData; 2]) -> Result<StepOutput> {
        let rhs = state.u.add_scaled(self.dt, &pressure.explicit)?;
        let alpha = self.nu * self.dt;
        let dirichlet = &self.plans.dirichlet;
        let u = VectorField::new(
            dirichlet.solve_helmholtz(alpha, &rhs.u1, &g_next[0])?,
            dirichlet.solve_helmholtz(alpha, &rhs.u2, &g_next[1])?,
        )?;
        let n = state.n + 1;
        let t = n as f64 * self.dt;
        let diag = self.diagnostics(&u, n, t, Some(pressure));
        if !u.is_finite() || !diag.is_finite() || diag.grad_u_sq > BLOW_UP_THRESHOLD {
            return Err(Error::BlowUp { step: n, t });
        }
        Ok(StepOutput {
            state: SimState { u, t, n },
            diag,
            compatible: pressure.compatible,
        })
    }

    /// Homogeneous step: `u = 0` on Γ.
    pub fn step(&self, state: &SimState, f_n: &VectorField) -> Result<StepOutput> {
        let pressure = self.pressure(&state.u, f_n, None)?;
        let zero = BoundaryData::zeros(self.grid, BoundaryKind::Dirichlet);
        self.advance(state, &pressure, &[zero.clone(), zero])
    }

    /// Step with boundary data `g` and divergence source `h`.
    pub fn step_nonhomogeneous(&self, state: &SimState, f_n: &VectorField, data: &InhomogeneousData) -> Result<StepOutput> {
        let pressure = self.pressure(&state.u, f_n, Some(data))?;
        self.advance(state, &pressure, &data.g_next)
    }

    pub fn diagnostics(&self, u: &VectorField, step: usize, t: f64, pressure: Option<&StepPressure>) -> StepDiagnostics {
        let div = div_h(u);
        let (grad_ps_sq, grad_pe_sq, stokes_ratio, compat_corr) = match pressure {
            Some(p) => (p.ratio.grad_ps_sq, p.grad_pe_sq, p.ratio.ratio(), p.correction),
            None => (0.0, 0.0, 0.0, 0.0),
        };
        StepDiagnostics {
            step,
            t,
            energy: u.norm_sq(),
            grad_u_sq: grad_norm_sq(u),
            lap_u_sq: interior_lap_norm_sq(u),
            div_u_sq: crate::grid::inner_product(&div, &div).expect("same grid"),
            grad_ps_sq,
            grad_pe_sq,
            stokes_ratio,
            compat_corr,
        }
    }
}

/// Number of steps needed to reach `t_end`.
pub fn step_count(t_end: f64, dt: f64) -> usize {
    if t_end <= 0.0 {
        0
    } else {
        (t_end / dt - 1e-9).ceil() as usize
    }
}

/// State handed to the snapshot observer.
pub struct Snapshot<'a> {
    pub step: usize,
    pub t: f64,
    pub u: &'a VectorField,
    pub parts: &'a PressureParts,
    pub nu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowUpReport {
    pub step: usize,
    pub t: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: Vec<StepDiagnostics>,
    pub final_state: SimState,
    pub blow_up: Option<BlowUpReport>,
    /// Steps whose divergence and flux data were flagged incompatible.
    pub incompatible_steps: usize,
}

/// Config-driven simulation: stepper plus presets.
pub struct Simulation {
    cfg: SimConfig,
    stepper: Stepper,
    forcing: ForcingSampler,
}

impl Simulation {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            stepper: Stepper::new(cfg.grid, cfg.nu, cfg.dt)?,
            forcing: cfg.forcing.sampler(cfg.nu),
            cfg: cfg.clone(),
        })
    }

    pub fn stepper(&self) -> &Stepper {
        &self.stepper
    }

    pub fn initial_state(&self) -> Result<SimState> {
        let grid = self.cfg.grid;
        let mut u = self.cfg.initial.field(grid);
        let [g1, g2] = self.cfg.bc.velocity(grid, 0.0);
        g1.write_into(&mut u.u1)?;
        g2.write_into(&mut u.u2)?;
        Ok(SimState { u, t: 0.0, n: 0 })
    }

    /// Divergence and flux data for step `n`; `None` for no-slip walls.
    pub fn inhomogeneous_data(&self, n: usize) -> Option<InhomogeneousData> {
        if self.cfg.bc.is_homogeneous() {
            return None;
        }
        let grid = self.cfg.grid;
        let t = n as f64 * self.cfg.dt;
        let src = self.cfg.bc.divergence(grid, t);
        Some(InhomogeneousData {
            h: src.h,
            dt_h: src.dt_h,
            dt_ng: self.cfg.bc.dt_normal_flux(grid, t),
            g_next: self.cfg.bc.velocity(grid, (n + 1) as f64 * self.cfg.dt),
        })
    }

    /// Runs to `t_end`, calling `observer` at every snapshot step. A blow-up
    /// ends the run early and is reported in the output, not as an error.
    pub fn run(&self, mut observer: impl FnMut(&Snapshot<'_>) -> Result<()>) -> Result<RunOutput> {
        let cfg = &self.cfg;
        let grid = cfg.grid;
        let steps = step_count(cfg.t_end, cfg.dt);
        let mut state = self.initial_state()?;
        let mut series = vec![self.stepper.diagnostics(&state.u, 0, 0.0, None)];
        let mut incompatible_steps = 0;
        let snap_due = |n: usize| cfg.snapshot_every > 0 && n.is_multiple_of(cfg.snapshot_every);
        for n in 0..steps {
            let f_n = average_forcing(&self.forcing, grid, n, cfg.dt)?;
            let data = self.inhomogeneous_data(n);
            let pressure = self.stepper.pressure(&state.u, &f_n, data.as_ref())?;
            if snap_due(n) {
                observer(&Snapshot {
                    step: n,
                    t: state.t,
                    u: &state.u,
                    parts: &pressure.parts,
                    nu: cfg.nu,
                })?;
            }
            let g_next = match &data {
                Some(d) => d.g_next.clone(),
                None => {
                    let z = BoundaryData::zeros(grid, BoundaryKind::Dirichlet);
                    [z.clone(), z]
                }
            };
            match self.stepper.advance(&state, &pressure, &g_next) {
                Ok(out) => {
                    if !out.compatible {
                        incompatible_steps += 1;
                    }
                    series.push(out.diag);
                    state = out.state;
                }
                Err(Error::BlowUp { step, t }) => {
                    return Ok(RunOutput {
                        series,
                        final_state: state,
                        blow_up: Some(BlowUpReport { step, t }),
                        incompatible_steps,
                    });
                }
                Err(e) => return Err(e),
            }
        }
        if snap_due(steps) {
            let f_n = average_forcing(&self.forcing, grid, steps, cfg.dt)?;
            let data = self.inhomogeneous_data(steps);
            let pressure = self.stepper.pressure(&state.u, &f_n, data.as_ref())?;
            observer(&Snapshot {
                step: steps,
                t: state.t,
                u: &state.u,
                parts: &pressure.parts,
                nu: cfg.nu,
            })?;
        }
        Ok(RunOutput {
            series,
            final_state: state,
            blow_up: None,
            incompatible_steps,
        })
    }
}

/// [`Simulation::run`] without snapshots.
pub fn run(cfg: &SimConfig) -> Result<RunOutput> {
    Simulation::new(cfg)?.run(|_| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::{cavity_mode, BoundaryPreset, ForcingPreset, InitialPreset};
    use crate::Side;

    #[test]
    fn steady_forcing_is_returned_exactly() {
        let grid = Grid2D::square(8).unwrap();
        let s = ForcingSampler::steady(|x, y| [0.1 + x, y * 0.3]);
        let f = average_forcing(&s, grid, 7, 0.013).unwrap();
        assert_eq!(f.u1.get(3, 2), 0.1 + grid.x(3));
        assert_eq!(f.u2.get(3, 2), grid.y(2) * 0.3);
    }

    #[test]
    fn gauss_average_is_exact_for_linear_and_sine() {
        let grid = Grid2D::square(8).unwrap();
        let lin = ForcingSampler::unsteady(|_, _, t| [t, 0.0]);
        let f = average_forcing(&lin, grid, 4, 0.25).unwrap();
        assert!((f.u1.get(1, 1) - 4.5 * 0.25).abs() < 1e-15);
        assert_eq!(f.u2.max_abs(), 0.0);
        let sine = ForcingSampler::unsteady(|_, _, t| [t.sin(), 0.0]);
        let f = average_forcing(&sine, grid, 0, 0.1).unwrap();
        let exact = (1.0 - 0.1f64.cos()) / 0.1;
        assert!((f.u1.get(0, 0) - exact).abs() < 1e-10);
        assert!((exact - 0.0499583).abs() < 1e-7);
        assert!(average_forcing(&sine, grid, 0, 0.0).is_err());
    }

    #[test]
    fn zero_data_stays_zero() {
        let grid = Grid2D::square(16).unwrap();
        let stepper = Stepper::new(grid, 1.0, 1e-2).unwrap();
        let mut state = SimState {
            u: VectorField::zeros(grid),
            t: 0.0,
            n: 0,
        };
        let f = VectorField::zeros(grid);
        for _ in 0..5 {
            let out = stepper.step(&state, &f).unwrap();
            assert_eq!(out.state.u.max_abs(), 0.0);
            assert_eq!(out.diag.energy, 0.0);
            state = out.state;
        }
        assert_eq!(state.n, 5);
        assert!((state.t - 0.05).abs() < 1e-15);
    }

    #[test]
    fn small_solenoidal_field_loses_energy() {
        let grid = Grid2D::square(16).unwrap();
        let stepper = Stepper::new(grid, 1.0, 1e-2).unwrap();
        let f = VectorField::zeros(grid);
        for eps in [1e-1, 1e-3] {
            let u = VectorField::from_fn(grid, |x, y| {
                let [a, b] = cavity_mode(x, y);
                [eps * a, eps * b]
            });
            let e0 = u.norm_sq();
            let out = stepper.step(&SimState { u, t: 0.0, n: 0 }, &f).unwrap();
            assert!(out.diag.energy < e0);
        }
    }

    #[test]
    fn large_implicit_coefficient_contracts() {
        let grid = Grid2D::square(16).unwrap();
        let u = VectorField::from_fn(grid, cavity_mode);
        let f = VectorField::zeros(grid);
        let e0 = u.norm_sq();
        // the explicit Stokes pressure keeps the large-dt limit away from zero
        for dt in [1e-2, 1.0, 1e2, 1e6] {
            let stepper = Stepper::new(grid, 1.0, dt).unwrap();
            let out = stepper.step(&SimState { u: u.clone(), t: 0.0, n: 0 }, &f).unwrap();
            assert!(out.state.u.norm_sq() < e0, "dt {dt}");
        }
    }

    #[test]
    fn nonhomogeneous_step_with_zero_data_matches_homogeneous() {
        let grid = Grid2D::square(16).unwrap();
        let stepper = Stepper::new(grid, 0.5, 1e-2).unwrap();
        let u = VectorField::from_fn(grid, cavity_mode);
        let f = VectorField::from_fn(grid, |x, y| [x * y, 1.0 - y]);
        let state = SimState { u, t: 0.0, n: 0 };
        let a = stepper.step(&state, &f).unwrap();
        let z = BoundaryData::zeros(grid, BoundaryKind::Dirichlet);
        let data = InhomogeneousData {
            h: ScalarField::zeros(grid),
            dt_h: ScalarField::zeros(grid),
            dt_ng: BoundaryData::zeros(grid, BoundaryKind::Neumann),
            g_next: [z.clone(), z],
        };
        let b = stepper.step_nonhomogeneous(&state, &f, &data).unwrap();
        assert_eq!(a.state.u.u1.values(), b.state.u.u1.values());
        assert_eq!(a.state.u.u2.values(), b.state.u.u2.values());
        assert_eq!(a.diag, b.diag);
    }

    #[test]
    fn lid_step_sets_boundary_and_has_no_inhomogeneous_pressure() {
        let grid = Grid2D::square(16).unwrap();
        let mut cfg = SimConfig::default();
        cfg.grid = grid;
        cfg.bc = BoundaryPreset::Lid { speed: 1.5 };
        cfg.dt = 1e-2;
        cfg.t_end = 0.02;
        let sim = Simulation::new(&cfg).unwrap();
        let state = sim.initial_state().unwrap();
        let data = sim.inhomogeneous_data(0).unwrap();
        let f = VectorField::zeros(grid);
        let p = sim.stepper().pressure(&state.u, &f, Some(&data)).unwrap();
        assert_eq!(p.parts.p_gh.max_abs(), 0.0);
        let out = sim.stepper().step_nonhomogeneous(&state, &f, &data).unwrap();
        let u = &out.state.u;
        for k in 0..=16 {
            let (i, j) = grid.side_node(Side::Top, k);
            let expected = if k == 0 || k == 16 { 0.0 } else { 1.5 };
            assert_eq!(u.u1.get(i, j), expected);
            assert_eq!(u.u2.get(i, j), 0.0);
            for side in [Side::Left, Side::Right, Side::Bottom] {
                let (i, j) = grid.side_node(side, k);
                if j < 16 {
                    assert_eq!(u.u1.get(i, j), 0.0);
                }
                assert_eq!(u.u2.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn run_series_shape_and_determinism() {
        let mut cfg = SimConfig::default();
        cfg.grid = Grid2D::square(16).unwrap();
        cfg.t_end = 0.0;
        assert_eq!(run(&cfg).unwrap().series.len(), 1);

        cfg.t_end = 0.1;
        cfg.dt = 1e-3;
        let zero = run(&cfg).unwrap();
        assert_eq!(zero.series.len(), 101);
        assert!(zero.series.iter().all(|d| d.energy == 0.0 && d.grad_u_sq == 0.0 && d.compat_corr == 0.0));

        cfg.initial = InitialPreset::Vortex { amplitude: 1.0 };
        cfg.forcing = ForcingPreset::Constant { f1: 0.3, f2: -0.1 };
        cfg.t_end = 0.02;
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a.series, b.series);
        assert!(a.series.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn snapshots_follow_cadence() {
        let mut cfg = SimConfig::default();
        cfg.grid = Grid2D::square(8).unwrap();
        cfg.dt = 0.1;
        cfg.t_end = 0.5;
        cfg.snapshot_every = 2;
        let mut seen = vec![];
        Simulation::new(&cfg)
            .unwrap()
            .run(|s| {
                seen.push(s.step);
                Ok(())
            })
            .unwrap();
        assert_eq!(seen, vec![0, 2, 4]);
        cfg.t_end = 0.4;
        seen.clear();
        Simulation::new(&cfg)
            .unwrap()
            .run(|s| {
                seen.push(s.step);
                Ok(())
            })
            .unwrap();
        assert_eq!(seen, vec![0, 2, 4]);
    }
}
