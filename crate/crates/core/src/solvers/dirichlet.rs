use ndarray::Array2;

use super::laplacian_eigenvalue;
use super::transform::{Transform1D, Transform2D};
use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Grid2D, ScalarField, Side};

/// Sine-transform plan for Dirichlet problems on the interior nodes.
#[derive(Debug, Clone)]
pub struct DirichletPlan {
    grid: Grid2D,
    eig_x: Vec<f64>,
    eig_y: Vec<f64>,
    transform: Transform2D,
}

impl DirichletPlan {
    pub fn new(grid: Grid2D) -> Self {
        let eig_x = (1..grid.nx()).map(|k| laplacian_eigenvalue(k, grid.nx())).collect();
        let eig_y = (1..grid.ny()).map(|k| laplacian_eigenvalue(k, grid.ny())).collect();
        let transform = Transform2D::new(Transform1D::sine(grid.nx()), Transform1D::sine(grid.ny()));
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

    /// Eigenvalue of `−Δ_h` for the interior mode `(i, j)`, `1 ≤ i < nx`,
    /// `1 ≤ j < ny`.
    pub fn eigenvalue(&self, i: usize, j: usize) -> f64 {
        self.eig_x[i - 1] + self.eig_y[j - 1]
    }

    /// Solves `(I − αΔ_h) v = rhs` at interior nodes with `v = g` on the
    /// boundary. `alpha = 0` is read as the plain Poisson problem
    /// `−Δ_h v = rhs`.
    ///
    /// `rhs` is only read at interior nodes. Corner nodes of the result take
    /// the bottom/top values of `g`.
    pub fn solve_helmholtz(&self, alpha: f64, rhs: &ScalarField, g: &BoundaryData) -> Result<ScalarField> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::invalid("alpha", format!("must be finite and >= 0, got {alpha}")));
        }
        self.grid.ensure_same(rhs.grid())?;
        self.grid.ensure_same(g.grid())?;

        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let (hx, hy) = (self.grid.hx(), self.grid.hy());
        // coefficient in front of −Δ_h
        let stiff = if alpha > 0.0 { alpha } else { 1.0 };
        let mass = if alpha > 0.0 { 1.0 } else { 0.0 };
        let (cx, cy) = (stiff / (hx * hx), stiff / (hy * hy));

        let mut b = Array2::from_shape_fn((ny - 1, nx - 1), |(j, i)| rhs.get(i + 1, j + 1));
        let (left, right) = (g.side(Side::Left), g.side(Side::Right));
        let (bottom, top) = (g.side(Side::Bottom), g.side(Side::Top));
        for j in 1..ny {
            b[[j - 1, 0]] += cx * left[j];
            b[[j - 1, nx - 2]] += cx * right[j];
        }
        for i in 1..nx {
            b[[0, i - 1]] += cy * bottom[i];
            b[[ny - 2, i - 1]] += cy * top[i];
        }

        let mut coeffs = self.transform.forward(b.view());
        for ((j, i), c) in coeffs.indexed_iter_mut() {
            *c /= mass + stiff * (self.eig_x[i] + self.eig_y[j]);
        }
        let interior = self.transform.inverse(coeffs.view());

        let mut v = ScalarField::zeros(self.grid);
        for ((j, i), &val) in interior.indexed_iter() {
            v.set(i + 1, j + 1, val);
        }
        g.write_into(&mut v)?;
        Ok(v)
    }

    /// Plain Dirichlet Poisson solve `−Δ_h v = rhs`, `v = g` on the boundary.
    pub fn solve_poisson(&self, rhs: &ScalarField, g: &BoundaryData) -> Result<ScalarField> {
        self.solve_helmholtz(0.0, rhs, g)
    }
}
