//! Incompressible Navier-Stokes on the unit square with the pressure split
//! into an Euler part (convection and forcing), a Stokes part (viscosity)
//! and an inhomogeneous part (boundary flux and prescribed divergence).
//!
//! The time stepper is implicit only in viscosity; both pressure parts and
//! convection are explicit, so a step costs two Neumann Poisson solves and
//! two Dirichlet Helmholtz solves on a collocated node grid.

pub mod config;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod io;
pub mod ops;
pub mod oracle;
pub mod presets;
pub mod pressure;
pub mod solvers;
pub mod timestep;

pub use error::{Error, Result};
pub use grid::{inner_product, norms, BoundaryData, BoundaryKind, Grid2D, Norms, ScalarField, Side, VectorField};
