use ndarray::Array2;

use super::laplacian_eigenvalue;
use super::transform::{Transform1D, Transform2D};
use crate::error::Result;
use crate::grid::{BoundaryData, Grid2D, ScalarField, Side};

/// Cosine-transform plan for the Neumann problem `Δ_h p = rhs`,
/// `n·∇p = g`, discretized on all nodes with ghost-node reflection.
#[derive(Debug, Clone)]
pub struct NeumannPlan {
    grid: Grid2D,
    eig_x: Vec<f64>,
    eig_y: Vec<f64>,
    transform: Transform2D,
}

/// Zero-mean Neumann solution and the constant that had to be added to the
/// source to make the discrete problem solvable.
#[derive(Debug, Clone)]
pub struct NeumannSolution {
    pub p: ScalarField,
    /// `c = (∮g − ∫rhs) / |Ω|`; the solved problem is `Δ_h p = rhs + c`.
    pub correction: f64,
}

impl NeumannPlan {
    pub fn new(grid: Grid2D) -> Self {
        let eig_x = (0..=grid.nx()).map(|k| laplacian_eigenvalue(k, grid.nx())).collect();
        let eig_y = (0..=grid.ny()).map(|k| laplacian_eigenvalue(k, grid.ny())).collect();
        let transform = Transform2D::new(Transform1D::cosine(grid.nx()), Transform1D::cosine(grid.ny()));
        Self {
            grid,
            eig_x,
            eig_y,
            transform,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// Eigenvalue of `−Δ_h` (ghost-reflected) for mode `(i, j)`,
    /// `0 ≤ i ≤ nx`, `0 ≤ j ≤ ny`. Only `(0, 0)` is zero.
    pub fn eigenvalue(&self, i: usize, j: usize) -> f64 {
        self.eig_x[i] + self.eig_y[j]
    }

    /// Solves `Δ_h p = rhs + c` with outward normal derivative `g`.
    ///
    /// The ghost value left of node `(0, j)` is `p(1, j) + 2 hx g_left(j)`
    /// (and likewise on the other sides), which moves `−2g/h` into the
    /// boundary rows of the source. The constant `c` restores the discrete
    /// compatibility `∫(rhs + c) = ∮g`, and the constant mode of the
    /// solution is set to zero, so `p` has zero trapezoidal mean.
    pub fn solve(&self, rhs: &ScalarField, g: &BoundaryData) -> Result<NeumannSolution> {
        self.grid.ensure_same(rhs.grid())?;
        self.grid.ensure_same(g.grid())?;
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let (hx, hy) = (self.grid.hx(), self.grid.hy());

        // |Ω| = 1
        let correction = g.boundary_integral() - rhs.mean();

        let mut b = Array2::from_shape_vec((ny + 1, nx + 1), rhs.values().to_vec())
            .expect("field shape matches grid");
        b.mapv_inplace(|v| v + correction);
        let (left, right) = (g.side(Side::Left), g.side(Side::Right));
        let (bottom, top) = (g.side(Side::Bottom), g.side(Side::Top));
        for j in 0..=ny {
            b[[j, 0]] -= 2.0 * left[j] / hx;
            b[[j, nx]] -= 2.0 * right[j] / hx;
        }
        for i in 0..=nx {
            b[[0, i]] -= 2.0 * bottom[i] / hy;
            b[[ny, i]] -= 2.0 * top[i] / hy;
        }

        let mut coeffs = self.transform.forward(b.view());
        for ((j, i), c) in coeffs.indexed_iter_mut() {
            if i == 0 && j == 0 {
                *c = 0.0;
            } else {
                *c /= -(self.eig_x[i] + self.eig_y[j]);
            }
        }
        let p = self.transform.inverse(coeffs.view());
        let p = ScalarField::from_values(self.grid, p.into_raw_vec_and_offset().0)?;
        Ok(NeumannSolution { p, correction })
    }
}
