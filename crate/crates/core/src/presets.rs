//! Initial fields, forcing and boundary data selectable from a config.

use std::f64::consts::PI;

use crate::grid::{BoundaryData, BoundaryKind, Grid2D, ScalarField, Side, VectorField};
use crate::timestep::ForcingSampler;

/// `(sin²πx sin2πy, −sin2πx sin²πy)`: divergence-free, zero on Γ together
/// with its stream function's gradient.
pub fn cavity_mode(x: f64, y: f64) -> [f64; 2] {
    let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
    [sx * sx * (2.0 * PI * y).sin(), -(2.0 * PI * x).sin() * sy * sy]
}

/// C² ramp from 0 at the walls to 1 beyond `width`.
pub fn wall_taper(y: f64, width: f64) -> f64 {
    let d = y.min(1.0 - y).max(0.0);
    if d >= width {
        return 1.0;
    }
    let s = d / width;
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

pub const TAPER_WIDTH: f64 = 0.125;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialPreset {
    Zero,
    /// `amplitude · cavity_mode`.
    Vortex { amplitude: f64 },
    /// `(a/π sin πx · T(y), 0)` with the wall taper `T`; its divergence is
    /// `a cos πx · T(y)`.
    DivergenceMode { amplitude: f64 },
    /// The manufactured solution at `t = 0`.
    Manufactured,
}

impl InitialPreset {
    pub fn name(&self) -> &'static str {
        match self {
            InitialPreset::Zero => "zero",
            InitialPreset::Vortex { .. } => "vortex",
            InitialPreset::DivergenceMode { .. } => "divergence-mode",
            InitialPreset::Manufactured => "manufactured",
        }
    }

    /// Interior values; boundary nodes are overwritten with `g(0)` by the
    /// caller.
    pub fn field(&self, grid: Grid2D) -> VectorField {
        match *self {
            InitialPreset::Zero => VectorField::zeros(grid),
            InitialPreset::Vortex { amplitude } => VectorField::from_fn(grid, |x, y| {
                let [a, b] = cavity_mode(x, y);
                [amplitude * a, amplitude * b]
            }),
            InitialPreset::DivergenceMode { amplitude } => VectorField::from_fn(grid, |x, y| {
                [amplitude / PI * (PI * x).sin() * wall_taper(y, TAPER_WIDTH), 0.0]
            }),
            InitialPreset::Manufactured => VectorField::from_fn(grid, |x, y| mms::velocity(x, y, 0.0)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForcingPreset {
    Zero,
    Constant { f1: f64, f2: f64 },
    /// Forcing that makes [`mms::velocity`] an exact solution.
    Manufactured,
}

impl ForcingPreset {
    pub fn name(&self) -> &'static str {
        match self {
            ForcingPreset::Zero => "zero",
            ForcingPreset::Constant { .. } => "constant",
            ForcingPreset::Manufactured => "manufactured",
        }
    }

    pub fn sampler(&self, nu: f64) -> ForcingSampler {
        match *self {
            ForcingPreset::Zero => ForcingSampler::steady(|_, _| [0.0, 0.0]),
            ForcingPreset::Constant { f1, f2 } => ForcingSampler::steady(move |_, _| [f1, f2]),
            ForcingPreset::Manufactured => ForcingSampler::unsteady(move |x, y, t| mms::forcing(x, y, t, nu)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryPreset {
    /// `u = 0` on Γ.
    Homogeneous,
    /// `u = (speed, 0)` on the top side, zero elsewhere; corners belong to
    /// the fixed walls.
    Lid { speed: f64 },
    /// `u = 0` on Γ with prescribed divergence `h = rate · t · cos πx`.
    Manufactured { rate: f64 },
}

/// Divergence source and its time derivative at one instant.
#[derive(Debug, Clone)]
pub struct DivergenceSource {
    pub h: ScalarField,
    pub dt_h: ScalarField,
}

impl BoundaryPreset {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryPreset::Homogeneous => "homogeneous",
            BoundaryPreset::Lid { .. } => "lid",
            BoundaryPreset::Manufactured { .. } => "manufactured",
        }
    }

    /// True when the homogeneous algorithm applies unchanged.
    pub fn is_homogeneous(&self) -> bool {
        matches!(self, BoundaryPreset::Homogeneous)
    }

    /// Dirichlet data for `(u1, u2)` at time `t`.
    pub fn velocity(&self, grid: Grid2D, _t: f64) -> [BoundaryData; 2] {
        let zero = BoundaryData::zeros(grid, BoundaryKind::Dirichlet);
        match *self {
            BoundaryPreset::Homogeneous | BoundaryPreset::Manufactured { .. } => [zero.clone(), zero],
            BoundaryPreset::Lid { speed } => {
                let mut u1 = zero.clone();
                let top = u1.side_mut(Side::Top);
                let last = top.len() - 1;
                for v in &mut top[1..last] {
                    *v = speed;
                }
                [u1, zero]
            }
        }
    }

    pub fn divergence(&self, grid: Grid2D, t: f64) -> DivergenceSource {
        match *self {
            BoundaryPreset::Manufactured { rate } => DivergenceSource {
                h: ScalarField::from_fn(grid, |x, _| rate * t * (PI * x).cos()),
                dt_h: ScalarField::from_fn(grid, |x, _| rate * (PI * x).cos()),
            },
            _ => DivergenceSource {
                h: ScalarField::zeros(grid),
                dt_h: ScalarField::zeros(grid),
            },
        }
    }

    /// `∂t(n·g)`; every preset here is steady in time.
    pub fn dt_normal_flux(&self, grid: Grid2D, _t: f64) -> BoundaryData {
        BoundaryData::zeros(grid, BoundaryKind::Neumann)
    }
}

/// Manufactured solution `u* = ψ(t) U`, `p* = ψ(t) cos πx cos πy` with
/// `ψ = 1 + t/2` and `U` the cavity mode.
pub mod mms {
    use super::*;

    pub fn psi(t: f64) -> f64 {
        1.0 + 0.5 * t
    }

    pub fn velocity(x: f64, y: f64, t: f64) -> [f64; 2] {
        let [a, b] = cavity_mode(x, y);
        [psi(t) * a, psi(t) * b]
    }

    pub fn pressure(x: f64, y: f64, t: f64) -> f64 {
        psi(t) * (PI * x).cos() * (PI * y).cos()
    }

    /// `∂t u* + u*·∇u* + ∇p* − νΔu*`.
    pub fn forcing(x: f64, y: f64, t: f64, nu: f64) -> [f64; 2] {
        let (s, c) = ((PI * x).sin(), (PI * x).cos());
        let (sy, cy) = ((PI * y).sin(), (PI * y).cos());
        let (s2x, c2x) = ((2.0 * PI * x).sin(), (2.0 * PI * x).cos());
        let (s2y, c2y) = ((2.0 * PI * y).sin(), (2.0 * PI * y).cos());
        let pi2 = PI * PI;

        let u1 = s * s * s2y;
        let u2 = -s2x * sy * sy;
        let u1x = PI * s2x * s2y;
        let u1y = 2.0 * PI * s * s * c2y;
        let u2x = -2.0 * PI * c2x * sy * sy;
        let u2y = -PI * s2x * s2y;
        let lap1 = 2.0 * pi2 * c2x * s2y - 4.0 * pi2 * s * s * s2y;
        let lap2 = 4.0 * pi2 * s2x * sy * sy - 2.0 * pi2 * s2x * c2y;

        let (ps, dps) = (psi(t), 0.5);
        [
            dps * u1 + ps * ps * (u1 * u1x + u2 * u1y) - ps * PI * s * cy - nu * ps * lap1,
            dps * u2 + ps * ps * (u1 * u2x + u2 * u2y) - ps * PI * c * sy - nu * ps * lap2,
        ]
    }
}
