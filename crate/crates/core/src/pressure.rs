//! Pressure parts: Helmholtz projection, Euler pressure, Stokes pressure and
//! the pressure driven by boundary flux and prescribed divergence.
//!
//! Every part is the zero-mean solution of a Neumann problem; the constant
//! added by the solver to restore compatibility is carried along.

use crate::error::Result;
use crate::grid::{BoundaryData, ScalarField, VectorField};
use crate::ops::{advect, div_h, grad_h, grad_norm_sq, interior_lap_norm_sq, normal_trace, stokes_neumann_data};
use crate::solvers::NeumannPlan;

/// Tolerance on `∫∂t h − ∮∂t(n·g)` above which the data are flagged.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

/// A zero-mean potential, its gradient and the compatibility constant.
#[derive(Debug, Clone)]
pub struct Potential {
    pub p: ScalarField,
    pub grad: VectorField,
    pub correction: f64,
}

impl Potential {
    fn zero(grid: crate::grid::Grid2D) -> Self {
        Self {
            p: ScalarField::zeros(grid),
            grad: VectorField::zeros(grid),
            correction: 0.0,
        }
    }
}

/// `a = grad_part + sol_part` with `grad_part = ∇_h φ`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub phi: ScalarField,
    pub grad_part: VectorField,
    pub sol_part: VectorField,
    pub correction: f64,
}

pub fn helmholtz_decompose(plan: &NeumannPlan, a: &VectorField) -> Result<Decomposition> {
    let sol = plan.solve(&div_h(a), &normal_trace(a))?;
    let grad_part = grad_h(&sol.p);
    let sol_part = a.sub(&grad_part)?;
    Ok(Decomposition {
        phi: sol.p,
        grad_part,
        sol_part,
        correction: sol.correction,
    })
}

/// `p_E` with `∇p_E = (I − P)(f − u·∇u)`.
pub fn euler_pressure(plan: &NeumannPlan, u: &VectorField, f: &VectorField) -> Result<Potential> {
    let d = helmholtz_decompose(plan, &f.sub(&advect(u))?)?;
    Ok(Potential {
        p: d.phi,
        grad: d.grad_part,
        correction: d.correction,
    })
}

/// The three squared norms compared by the Stokes-pressure estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesRatioData {
    pub grad_ps_sq: f64,
    /// `‖Δ_h u‖²` over interior nodes.
    pub lap_u_sq: f64,
    pub grad_u_sq: f64,
}

impl StokesRatioData {
    /// `‖∇p_S‖² / ‖Δu‖²`, or 0 when `Δu` vanishes.
    pub fn ratio(&self) -> f64 {
        if self.lap_u_sq > 0.0 {
            self.grad_ps_sq / self.lap_u_sq
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct StokesPressure {
    pub potential: Potential,
    pub ratio_data: StokesRatioData,
}

/// Harmonic `p_S` with `n·∇p_S = n·(Δ − ∇div)u`.
pub fn stokes_pressure(plan: &NeumannPlan, u: &VectorField) -> Result<StokesPressure> {
    let grid = *plan.grid();
    let data = stokes_neumann_data(u);
    let potential = if data.max_abs() == 0.0 {
        Potential::zero(grid)
    } else {
        let sol = plan.solve(&ScalarField::zeros(grid), &data)?;
        Potential {
            grad: grad_h(&sol.p),
            p: sol.p,
            correction: sol.correction,
        }
    };
    let ratio_data = StokesRatioData {
        grad_ps_sq: potential.grad.norm_sq(),
        lap_u_sq: interior_lap_norm_sq(u),
        grad_u_sq: grad_norm_sq(u),
    };
    Ok(StokesPressure { potential, ratio_data })
}

#[derive(Debug, Clone)]
pub struct InhomogeneousPressure {
    pub potential: Potential,
    /// `∫∂t h − ∮∂t(n·g)`.
    pub mismatch: f64,
    pub compatible: bool,
}

/// `p_gh` solving `Δp = −∂t h + νΔh`, `n·∇p = ν n·∇h − ∂t(n·g)`.
///
/// The `ν h` part is taken exactly, `p_gh = ν(h − h̄) + q`, and only `q`
/// goes through the Neumann solver; on the grid this is the weak form
/// of the problem with trapezoidal quadrature.
pub fn inhomogeneous_pressure(
    plan: &NeumannPlan,
    dt_h: &ScalarField,
    h: &ScalarField,
    dt_ng: &BoundaryData,
    nu: f64,
) -> Result<InhomogeneousPressure> {
    let grid = *plan.grid();
    grid.ensure_same(dt_h.grid())?;
    grid.ensure_same(h.grid())?;
    let mismatch = dt_h.mean() - dt_ng.boundary_integral();
    if dt_h.max_abs() == 0.0 && dt_ng.max_abs() == 0.0 && (nu == 0.0 || h.max_abs() == 0.0) {
        return Ok(InhomogeneousPressure {
            potential: Potential::zero(grid),
            mismatch,
            compatible: true,
        });
    }
    let q = plan.solve(&dt_h.scaled(-1.0), &dt_ng.scaled(-1.0))?;
    let p = q.p.add_scaled(nu, &h.minus_mean())?;
    Ok(InhomogeneousPressure {
        potential: Potential {
            grad: grad_h(&p),
            p,
            correction: q.correction,
        },
        mismatch,
        compatible: mismatch.abs() <= COMPATIBILITY_TOL,
    })
}

/// `p = p_E + ν p_S + p_gh` and its gradient.
#[derive(Debug, Clone)]
pub struct PressureParts {
    pub p_e: ScalarField,
    pub p_s: ScalarField,
    pub p_gh: ScalarField,
    pub grad_p_total: VectorField,
}

impl PressureParts {
    pub fn assemble(nu: f64, euler: &Potential, stokes: &Potential, gh: Option<&Potential>) -> Result<Self> {
        let grid = *euler.p.grid();
        let mut grad = euler.grad.add_scaled(nu, &stokes.grad)?;
        let p_gh = match gh {
            Some(g) => {
                grad = grad.add_scaled(1.0, &g.grad)?;
                g.p.clone()
            }
            None => ScalarField::zeros(grid),
        };
        Ok(Self {
            p_e: euler.p.clone(),
            p_s: stokes.p.clone(),
            p_gh,
            grad_p_total: grad,
        })
    }

    pub fn total(&self, nu: f64) -> Result<ScalarField> {
        self.p_e.add_scaled(nu, &self.p_s)?.add_scaled(1.0, &self.p_gh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{BoundaryKind, Grid2D};
    use crate::oracle::{boundary_load, mass_apply, stiffness_apply, DenseNeumann};
    use std::f64::consts::PI;

    fn cavity_mode(grid: Grid2D, amp: f64) -> VectorField {
        VectorField::from_fn(grid, |x, y| {
            let (sx, sy) = ((PI * x).sin(), (PI * y).sin());
            [amp * sx * sx * (2.0 * PI * y).sin(), -amp * (2.0 * PI * x).sin() * sy * sy]
        })
    }

    #[test]
    fn zero_field_has_zero_parts() {
        let grid = Grid2D::square(16).unwrap();
        let plan = NeumannPlan::new(grid);
        let z = VectorField::zeros(grid);
        let d = helmholtz_decompose(&plan, &z).unwrap();
        assert_eq!(d.grad_part.max_abs(), 0.0);
        assert_eq!(d.sol_part.max_abs(), 0.0);
        assert_eq!(euler_pressure(&plan, &z, &z).unwrap().p.max_abs(), 0.0);
        assert_eq!(stokes_pressure(&plan, &z).unwrap().potential.p.max_abs(), 0.0);
    }

    #[test]
    fn projection_annihilates_gradients() {
        let sol_norm = |n: usize| {
            let grid = Grid2D::square(n).unwrap();
            let phi = ScalarField::from_fn(grid, |x, y| (PI * x).sin() * (2.0 * PI * y).cos() + x * y);
            let d = helmholtz_decompose(&NeumannPlan::new(grid), &grad_h(&phi)).unwrap();
            d.sol_part.norm_sq().sqrt()
        };
        let ratio = sol_norm(32) / sol_norm(64);
        assert!(ratio > 3.5, "ratio {ratio}");
    }

    #[test]
    fn projection_keeps_solenoidal_fields() {
        let grad_norm = |n: usize| {
            let grid = Grid2D::square(n).unwrap();
            let d = helmholtz_decompose(&NeumannPlan::new(grid), &cavity_mode(grid, 1.0)).unwrap();
            d.grad_part.norm_sq().sqrt()
        };
        let ratio = grad_norm(32) / grad_norm(64);
        assert!(ratio > 3.5, "ratio {ratio}");
    }

    #[test]
    fn euler_pressure_of_gradient_forcing() {
        let err = |n: usize| {
            let grid = Grid2D::square(n).unwrap();
            let phi = |x: f64, y: f64| (PI * x).cos() * (PI * y).cos() + x * x * y;
            let f = grad_h(&ScalarField::from_fn(grid, phi));
            let pe = euler_pressure(&NeumannPlan::new(grid), &VectorField::zeros(grid), &f).unwrap();
            pe.p.sub(&ScalarField::from_fn(grid, phi).minus_mean()).unwrap().max_abs()
        };
        let ratio = err(32) / err(64);
        assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn euler_pressure_matches_dense_oracle() {
        let grid = Grid2D::square(32).unwrap();
        let u = cavity_mode(grid, 1.0);
        let fast = euler_pressure(&NeumannPlan::new(grid), &u, &VectorField::zeros(grid)).unwrap();
        let a = advect(&u).scaled(-1.0);
        let dense = DenseNeumann::new(grid).unwrap().solve(&div_h(&a), &normal_trace(&a)).unwrap();
        assert!(fast.p.sub(&dense.p).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn stokes_pressure_ignores_interior_fields() {
        let grid = Grid2D::square(32).unwrap();
        let bump = |t: f64| {
            if (0.25..=0.75).contains(&t) {
                (2.0 * PI * (t - 0.25)).sin().powi(4)
            } else {
                0.0
            }
        };
        let u = VectorField::from_fn(grid, |x, y| [bump(x) * bump(y), -bump(x) * bump(y) * y]);
        let sp = stokes_pressure(&NeumannPlan::new(grid), &u).unwrap();
        assert!(sp.potential.p.max_abs() <= 1e-12);
    }

    #[test]
    fn stokes_pressure_is_discretely_harmonic_and_dominated() {
        let grid = Grid2D::square(32).unwrap();
        let u = cavity_mode(grid, 1.0);
        let sp = stokes_pressure(&NeumannPlan::new(grid), &u).unwrap();
        let lap = crate::ops::lap_h(&sp.potential.p);
        let h = grid.hx();
        assert!(lap.interior_max_abs() <= 1e-8 * sp.potential.p.max_abs() / (h * h));
        assert!(sp.ratio_data.ratio() <= 1.0 + 10.0 * h * h, "{:?}", sp.ratio_data);
        assert!(sp.ratio_data.ratio() > 0.0);
    }

    #[test]
    fn stokes_ratio_matches_dense_fixture() {
        // dense LU solve of the same Neumann problem, n = 32
        const DENSE_RATIO: f64 = 8.543379676071976e-2;
        let grid = Grid2D::square(32).unwrap();
        let u = VectorField::from_fn(grid, |x, y| {
            [
                (PI * x).sin().powi(2) * (2.0 * PI * y).sin(),
                -(2.0 * PI * x).sin() * (PI * y).sin().powi(2),
            ]
        });
        let r = stokes_pressure(&NeumannPlan::new(grid), &u).unwrap().ratio_data.ratio();
        assert!((r / DENSE_RATIO - 1.0).abs() < 1e-10, "{r}");
        assert!(r <= 1.0);
    }

    #[test]
    fn inhomogeneous_pressure_vanishes_for_static_data() {
        let grid = Grid2D::square(16).unwrap();
        let plan = NeumannPlan::new(grid);
        let z = ScalarField::zeros(grid);
        let zb = BoundaryData::zeros(grid, BoundaryKind::Neumann);
        let a = inhomogeneous_pressure(&plan, &z, &z, &zb, 0.3).unwrap();
        assert_eq!(a.potential.p.max_abs(), 0.0);
        assert!(a.compatible);
        let h = ScalarField::from_fn(grid, |x, y| x * y);
        let b = inhomogeneous_pressure(&plan, &z, &h, &zb, 0.0).unwrap();
        assert_eq!(b.potential.grad.max_abs(), 0.0);
    }

    #[test]
    fn inhomogeneous_pressure_matches_weak_form_oracle() {
        let grid = Grid2D::square(32).unwrap();
        let (t, nu) = (0.4, 0.7);
        let h = ScalarField::from_fn(grid, |x, _| t * (PI * x).cos());
        let dt_h = ScalarField::from_fn(grid, |x, _| (PI * x).cos());
        // flux derivative with the same boundary integral as ∂t h
        let dt_ng = BoundaryData::from_fn(grid, BoundaryKind::Neumann, |side, x, _| match side {
            crate::grid::Side::Bottom => 0.5 * (PI * x).sin(),
            _ => 0.0,
        });
        let dt_ng = dt_ng.shifted((dt_h.mean() - dt_ng.boundary_integral()) / 4.0);
        let fast = inhomogeneous_pressure(&NeumannPlan::new(grid), &dt_h, &h, &dt_ng, nu).unwrap();
        assert!(fast.compatible, "mismatch {}", fast.mismatch);

        // K p = ν K h + M ∂t h − G ∂t(n·g)
        let kh = stiffness_apply(&h);
        let mh = mass_apply(&dt_h);
        let gl = boundary_load(&dt_ng);
        let load: Vec<f64> = (0..grid.node_count()).map(|k| nu * kh[k] + mh[k] - gl[k]).collect();
        let (dense, lambda) = DenseNeumann::new(grid).unwrap().solve_load(&load).unwrap();
        assert!(fast.potential.p.sub(&dense).unwrap().max_abs() < 1e-8);
        assert!(lambda.abs() < 1e-10);
    }

    #[test]
    fn inhomogeneous_pressure_flags_incompatible_data() {
        let grid = Grid2D::square(16).unwrap();
        let dt_h = ScalarField::constant(grid, 1.0);
        let zb = BoundaryData::zeros(grid, BoundaryKind::Neumann);
        let r = inhomogeneous_pressure(&NeumannPlan::new(grid), &dt_h, &ScalarField::zeros(grid), &zb, 1.0).unwrap();
        assert!(!r.compatible);
        assert!((r.mismatch - 1.0).abs() < 1e-12);
    }
}
