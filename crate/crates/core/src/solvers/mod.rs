//! Direct trigonometric solvers for the two elliptic problems each time step
//! needs: a Dirichlet Helmholtz/Poisson problem on interior nodes and a
//! Neumann Poisson problem on all nodes.
//!
//! Both diagonalize the 5-point Laplacian exactly, so their output is exact
//! to round-off for the discrete system. The transforms are applied as dense
//! separable matrix products, which at the grid sizes used here (≤ 129 nodes
//! per direction) is fast and free of FFT bookkeeping.

mod dirichlet;
mod neumann;
mod transform;

pub use dirichlet::DirichletPlan;
pub use neumann::{NeumannPlan, NeumannSolution};

use crate::grid::Grid2D;

/// Both plans for one grid.
#[derive(Debug, Clone)]
pub struct EllipticPlans {
    pub dirichlet: DirichletPlan,
    pub neumann: NeumannPlan,
}

impl EllipticPlans {
    pub fn new(grid: Grid2D) -> Self {
        Self {
            dirichlet: DirichletPlan::new(grid),
            neumann: NeumannPlan::new(grid),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        self.neumann.grid()
    }
}

/// `(4/h²) sin²(kπ/2n)`, i.e. `(2/h²)(1 − cos(kπ/n))` without cancellation.
pub(crate) fn laplacian_eigenvalue(k: usize, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let s = (std::f64::consts::PI * k as f64 / (2.0 * n as f64)).sin();
    4.0 * s * s / (h * h)
}
