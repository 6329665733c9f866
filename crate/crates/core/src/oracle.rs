//! Dense reference solvers for grids up to 32 cells per direction.
//!
//! Each system is assembled entry by entry and factorized with LU; nothing
//! here shares code with the transform solvers. The Neumann oracle is
//! assembled from the weak form with vertex (trapezoidal) quadrature,
//!
//! ```text
//!   K p + λ w = −M rhs + G(g),   wᵀ p = 0,
//! ```
//!
//! where `K` is the bilinear-element stiffness matrix, `M = diag(w)` the
//! lumped mass, `G` the trapezoidal boundary load and `λ` the multiplier
//! that absorbs incompatible data.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::{BoundaryData, Grid2D, ScalarField, Side};
use crate::solvers::NeumannSolution;

pub const MAX_ORACLE_CELLS: usize = 32;

fn check_size(grid: &Grid2D) -> Result<()> {
    if grid.nx() > MAX_ORACLE_CELLS || grid.ny() > MAX_ORACLE_CELLS {
        return Err(Error::OracleGridTooLarge {
            nx: grid.nx(),
            ny: grid.ny(),
            max: MAX_ORACLE_CELLS,
        });
    }
    Ok(())
}

/// Problem description accepted by [`dense_oracle_solve`].
#[derive(Debug, Clone)]
pub enum OracleProblem<'a> {
    /// `(I − αΔ_h)v = rhs` (`−Δ_h v = rhs` for `α = 0`), `v = g` on Γ.
    Dirichlet {
        alpha: f64,
        rhs: &'a ScalarField,
        g: &'a BoundaryData,
    },
    /// `Δ_h p = rhs` with outward normal derivative `g`, zero mean.
    Neumann { rhs: &'a ScalarField, g: &'a BoundaryData },
}

/// One-shot dense solve of either problem.
pub fn dense_oracle_solve(problem: &OracleProblem<'_>) -> Result<ScalarField> {
    match *problem {
        OracleProblem::Dirichlet { alpha, rhs, g } => DenseDirichlet::new(*rhs.grid(), alpha)?.solve(rhs, g),
        OracleProblem::Neumann { rhs, g } => Ok(DenseNeumann::new(*rhs.grid())?.solve(rhs, g)?.p),
    }
}

/// Factorized interior Dirichlet system.
pub struct DenseDirichlet {
    grid: Grid2D,
    alpha: f64,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl DenseDirichlet {
    pub fn new(grid: Grid2D, alpha: f64) -> Result<Self> {
        check_size(&grid)?;
        if !(alpha >= 0.0) {
            return Err(Error::invalid("alpha", "must be >= 0"));
        }
        let (mx, my) = (grid.nx() - 1, grid.ny() - 1);
        let n = mx * my;
        let (sx, sy) = (1.0 / (grid.hx() * grid.hx()), 1.0 / (grid.hy() * grid.hy()));
        let (mass, stiff) = if alpha > 0.0 { (1.0, alpha) } else { (0.0, 1.0) };
        let at = |i: usize, j: usize| (j - 1) * mx + (i - 1);
        let mut a = DMatrix::<f64>::zeros(n, n);
        for j in 1..=my {
            for i in 1..=mx {
                let r = at(i, j);
                a[(r, r)] = mass + stiff * 2.0 * (sx + sy);
                if i > 1 {
                    a[(r, at(i - 1, j))] = -stiff * sx;
                }
                if i < mx {
                    a[(r, at(i + 1, j))] = -stiff * sx;
                }
                if j > 1 {
                    a[(r, at(i, j - 1))] = -stiff * sy;
                }
                if j < my {
                    a[(r, at(i, j + 1))] = -stiff * sy;
                }
            }
        }
        Ok(Self {
            grid,
            alpha,
            lu: a.lu(),
        })
    }

    pub fn solve(&self, rhs: &ScalarField, g: &BoundaryData) -> Result<ScalarField> {
        self.grid.ensure_same(rhs.grid())?;
        let grid = self.grid;
        let (nx, ny) = (grid.nx(), grid.ny());
        let (mx, my) = (nx - 1, ny - 1);
        let stiff = if self.alpha > 0.0 { self.alpha } else { 1.0 };
        let (sx, sy) = (1.0 / (grid.hx() * grid.hx()), 1.0 / (grid.hy() * grid.hy()));
        let mut b = DVector::<f64>::zeros(mx * my);
        for j in 1..ny {
            for i in 1..nx {
                let mut v = rhs.get(i, j);
                if i == 1 {
                    v += stiff * sx * g.side(Side::Left)[j];
                }
                if i == nx - 1 {
                    v += stiff * sx * g.side(Side::Right)[j];
                }
                if j == 1 {
                    v += stiff * sy * g.side(Side::Bottom)[i];
                }
                if j == ny - 1 {
                    v += stiff * sy * g.side(Side::Top)[i];
                }
                b[(j - 1) * mx + (i - 1)] = v;
            }
        }
        let x = self.lu.solve(&b).ok_or(Error::SingularSystem)?;
        let mut out = ScalarField::zeros(grid);
        for j in 1..ny {
            for i in 1..nx {
                out.set(i, j, x[(j - 1) * mx + (i - 1)]);
            }
        }
        g.write_into(&mut out)?;
        Ok(out)
    }
}

/// Factorized bordered weak-form Neumann system.
pub struct DenseNeumann {
    grid: Grid2D,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl DenseNeumann {
    pub fn new(grid: Grid2D) -> Result<Self> {
        check_size(&grid)?;
        let n = grid.node_count();
        let k = stiffness_matrix(&grid);
        let mut a = DMatrix::<f64>::zeros(n + 1, n + 1);
        a.view_mut((0, 0), (n, n)).copy_from(&k);
        for j in 0..=grid.ny() {
            for i in 0..=grid.nx() {
                let w = lumped_mass(&grid, i, j);
                let r = grid.idx(i, j);
                a[(r, n)] = w;
                a[(n, r)] = w;
            }
        }
        Ok(Self { grid, lu: a.lu() })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// Solves `K p + λ w = load`, `wᵀp = 0`; returns `(p, λ)`.
    pub fn solve_load(&self, load: &[f64]) -> Result<(ScalarField, f64)> {
        let n = self.grid.node_count();
        if load.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: load.len(),
            });
        }
        let mut b = DVector::<f64>::zeros(n + 1);
        b.rows_mut(0, n).copy_from_slice(load);
        let x = self.lu.solve(&b).ok_or(Error::SingularSystem)?;
        let p = ScalarField::from_values(self.grid, x.rows(0, n).iter().copied().collect())?;
        Ok((p, x[n]))
    }

    /// Strong-form entry point: `Δ_h p = rhs`, `n·∇p = g`. The returned
    /// correction is the Lagrange multiplier.
    pub fn solve(&self, rhs: &ScalarField, g: &BoundaryData) -> Result<NeumannSolution> {
        self.grid.ensure_same(rhs.grid())?;
        self.grid.ensure_same(g.grid())?;
        let mass = mass_apply(rhs);
        let bl = boundary_load(g);
        let load: Vec<f64> = mass.iter().zip(&bl).map(|(m, b)| -m + b).collect();
        let (p, lambda) = self.solve_load(&load)?;
        Ok(NeumannSolution { p, correction: lambda })
    }
}

fn lumped_mass(grid: &Grid2D, i: usize, j: usize) -> f64 {
    // each adjacent cell contributes a quarter of its area
    let cells_x = if i == 0 || i == grid.nx() { 1.0 } else { 2.0 };
    let cells_y = if j == 0 || j == grid.ny() { 1.0 } else { 2.0 };
    cells_x * cells_y * grid.hx() * grid.hy() / 4.0
}

/// Bilinear-element stiffness with vertex quadrature, assembled cell by
/// cell. Each cell adds half an edge coupling on each of its four edges.
pub fn stiffness_matrix(grid: &Grid2D) -> DMatrix<f64> {
    let n = grid.node_count();
    let mut k = DMatrix::<f64>::zeros(n, n);
    let kx = 0.5 * grid.hy() / grid.hx();
    let ky = 0.5 * grid.hx() / grid.hy();
    let mut couple = |a: usize, b: usize, w: f64| {
        k[(a, a)] += w;
        k[(b, b)] += w;
        k[(a, b)] -= w;
        k[(b, a)] -= w;
    };
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let (sw, se) = (grid.idx(i, j), grid.idx(i + 1, j));
            let (nw, ne) = (grid.idx(i, j + 1), grid.idx(i + 1, j + 1));
            couple(sw, se, kx);
            couple(nw, ne, kx);
            couple(sw, nw, ky);
            couple(se, ne, ky);
        }
    }
    k
}

/// `K v` for a nodal field, via the dense stiffness matrix.
pub fn stiffness_apply(v: &ScalarField) -> Vec<f64> {
    let k = stiffness_matrix(v.grid());
    let x = DVector::from_column_slice(v.values());
    (k * x).iter().copied().collect()
}

/// `M v` with the lumped mass.
pub fn mass_apply(v: &ScalarField) -> Vec<f64> {
    let grid = *v.grid();
    let mut out = vec![0.0; grid.node_count()];
    for j in 0..=grid.ny() {
        for i in 0..=grid.nx() {
            out[grid.idx(i, j)] = lumped_mass(&grid, i, j) * v.get(i, j);
        }
    }
    out
}

/// Trapezoidal boundary load `∮ g φ_k` for each nodal basis function,
/// accumulated edge segment by edge segment.
pub fn boundary_load(g: &BoundaryData) -> Vec<f64> {
    let grid = *g.grid();
    let mut out = vec![0.0; grid.node_count()];
    for side in Side::ALL {
        let h = grid.side_spacing(side);
        let vals = g.side(side);
        for k in 0..vals.len() - 1 {
            let (i0, j0) = grid.side_node(side, k);
            let (i1, j1) = grid.side_node(side, k + 1);
            out[grid.idx(i0, j0)] += 0.5 * h * vals[k];
            out[grid.idx(i1, j1)] += 0.5 * h * vals[k + 1];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::BoundaryKind;

    #[test]
    fn rejects_large_grids() {
        let g = Grid2D::square(33).unwrap();
        assert!(matches!(DenseNeumann::new(g), Err(Error::OracleGridTooLarge { .. })));
        assert!(DenseDirichlet::new(g, 0.1).is_err());
    }

    #[test]
    fn stiffness_annihilates_constants_and_is_symmetric() {
        let g = Grid2D::new(8, 10).unwrap();
        let k = stiffness_matrix(&g);
        let ones = DVector::from_element(g.node_count(), 1.0);
        assert!((&k * ones).amax() < 1e-12);
        assert!((&k - k.transpose()).amax() < 1e-15);
    }

    #[test]
    fn lumped_mass_sums_to_area() {
        let g = Grid2D::new(9, 13).unwrap();
        let total: f64 = mass_apply(&ScalarField::constant(g, 1.0)).iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        let bl: f64 = boundary_load(&BoundaryData::zeros(g, BoundaryKind::Neumann).shifted(1.0))
            .iter()
            .sum();
        assert!((bl - 4.0).abs() < 1e-14);
    }

    fn noise(grid: Grid2D, seed: u64) -> (ScalarField, BoundaryData) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..grid.node_count()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let rhs = ScalarField::from_values(grid, vals).unwrap();
        let mut g = BoundaryData::zeros(grid, BoundaryKind::Neumann);
        for side in Side::ALL {
            g.side_mut(side).iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
        }
        (rhs, g)
    }

    #[test]
    fn dirichlet_agrees_with_fast_solver() {
        let grid = Grid2D::new(12, 9).unwrap();
        let (rhs, g) = noise(grid, 3);
        let plan = crate::solvers::DirichletPlan::new(grid);
        for alpha in [0.0, 1e-3, 0.7] {
            let fast = plan.solve_helmholtz(alpha, &rhs, &g).unwrap();
            let dense = dense_oracle_solve(&OracleProblem::Dirichlet { alpha, rhs: &rhs, g: &g }).unwrap();
            assert!(fast.sub(&dense).unwrap().max_abs() < 1e-10);
        }
    }

    #[test]
    fn neumann_agrees_with_fast_solver_including_correction() {
        let grid = Grid2D::new(10, 14).unwrap();
        let (rhs, g) = noise(grid, 5);
        let fast = crate::solvers::NeumannPlan::new(grid).solve(&rhs, &g).unwrap();
        let dense = DenseNeumann::new(grid).unwrap().solve(&rhs, &g).unwrap();
        assert!(fast.p.sub(&dense.p).unwrap().max_abs() < 1e-10);
        assert!((fast.correction - dense.correction).abs() < 1e-10);
        assert!(fast.correction.abs() > 0.1);
    }
}
