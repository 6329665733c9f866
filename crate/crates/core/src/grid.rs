//! Node-based uniform grid on the unit square and the nodal field types
//! every other module works with.
//!
//! Nodes sit at `(i*hx, j*hy)` for `0 <= i <= nx`, `0 <= j <= ny`; values are
//! stored row-major with `j` outer and `i` inner. All integrals use the
//! trapezoidal rule: weight `hx*hy` at interior nodes, halved once per
//! boundary direction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops;

/// Smallest admissible cell count per direction.
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < MIN_CELLS || ny < MIN_CELLS {
            return Err(Error::GridTooCoarse { nx, ny });
        }
        Ok(Self { nx, ny })
    }

    /// Square grid with `n` cells per direction.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        1.0 / self.nx as f64
    }

    #[inline]
    pub fn hy(&self) -> f64 {
        1.0 / self.ny as f64
    }

    /// Nodes per row (`nx + 1`).
    #[inline]
    pub fn row_len(&self) -> usize {
        self.nx + 1
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        i as f64 / self.nx as f64
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        j as f64 / self.ny as f64
    }

    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx || j == self.ny
    }

    /// Trapezoidal quadrature weight of node `(i, j)`.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let wx = if i == 0 || i == self.nx { 0.5 } else { 1.0 };
        let wy = if j == 0 || j == self.ny { 0.5 } else { 1.0 };
        wx * wy * self.hx() * self.hy()
    }

    /// Number of nodes along a side, corners included.
    pub fn side_len(&self, side: Side) -> usize {
        match side {
            Side::Left | Side::Right => self.ny + 1,
            Side::Bottom | Side::Top => self.nx + 1,
        }
    }

    /// Grid index of the `k`-th node along `side` (bottom-to-top for the
    /// vertical sides, left-to-right for the horizontal ones).
    pub fn side_node(&self, side: Side, k: usize) -> (usize, usize) {
        match side {
            Side::Left => (0, k),
            Side::Right => (self.nx, k),
            Side::Bottom => (k, 0),
            Side::Top => (k, self.ny),
        }
    }

    /// Spacing along `side`.
    pub fn side_spacing(&self, side: Side) -> f64 {
        match side {
            Side::Left | Side::Right => self.hy(),
            Side::Bottom | Side::Top => self.hx(),
        }
    }

    fn describe(&self) -> String {
        format!("{}x{}", self.nx, self.ny)
    }

    pub(crate) fn ensure_same(&self, other: &Grid2D) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch {
                left: self.describe(),
                right: other.describe(),
            });
        }
        Ok(())
    }
}

/// The four sides of the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    /// Outward unit normal.
    pub fn normal(self) -> [f64; 2] {
        match self {
            Side::Left => [-1.0, 0.0],
            Side::Right => [1.0, 0.0],
            Side::Bottom => [0.0, -1.0],
            Side::Top => [0.0, 1.0],
        }
    }
}

/// Nodal values of a scalar quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid2D,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.node_count()],
        }
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.node_count()],
        }
    }

    pub fn from_values(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::LengthMismatch {
                expected: grid.node_count(),
                actual: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.node_count());
        for j in 0..=grid.ny() {
            let y = grid.y(j);
            for i in 0..=grid.nx() {
                values.push(f(grid.x(i), y));
            }
        }
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.idx(i, j);
        self.values[k] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &ScalarField) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + s * b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.add_scaled(-1.0, other)
    }

    /// Trapezoidal mean over the unit square.
    pub fn mean(&self) -> f64 {
        let mut acc = 0.0;
        for j in 0..=self.grid.ny() {
            for i in 0..=self.grid.nx() {
                acc += self.grid.weight(i, j) * self.get(i, j);
            }
        }
        acc
    }

    pub fn minus_mean(&self) -> Self {
        let m = self.mean();
        self.map(|v| v - m)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max-norm over interior nodes only.
    pub fn interior_max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for j in 1..self.grid.ny() {
            for i in 1..self.grid.nx() {
                m = m.max(self.get(i, j).abs());
            }
        }
        m
    }

    /// Trapezoidal L2 norm.
    pub fn l2_norm(&self) -> f64 {
        inner_product_unchecked(self, self).sqrt()
    }

    /// Squared L2 norm over interior nodes with uniform weight `hx*hy`.
    pub fn interior_norm_sq(&self) -> f64 {
        let w = self.grid.hx() * self.grid.hy();
        let mut acc = 0.0;
        for j in 1..self.grid.ny() {
            for i in 1..self.grid.nx() {
                let v = self.get(i, j);
                acc += v * v;
            }
        }
        w * acc
    }
}

/// Nodal values of a two-component vector quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub u1: ScalarField,
    pub u2: ScalarField,
}

impl VectorField {
    pub fn new(u1: ScalarField, u2: ScalarField) -> Result<Self> {
        u1.grid.ensure_same(&u2.grid)?;
        Ok(Self { u1, u2 })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            u1: ScalarField::zeros(grid),
            u2: ScalarField::zeros(grid),
        }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let mut u1 = ScalarField::zeros(grid);
        let mut u2 = ScalarField::zeros(grid);
        for j in 0..=grid.ny() {
            for i in 0..=grid.nx() {
                let [a, b] = f(grid.x(i), grid.y(j));
                u1.set(i, j, a);
                u2.set(i, j, b);
            }
        }
        Self { u1, u2 }
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D {
        self.u1.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u1.is_finite() && self.u2.is_finite()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            u1: self.u1.scaled(s),
            u2: self.u2.scaled(s),
        }
    }

    pub fn add_scaled(&self, s: f64, other: &VectorField) -> Result<Self> {
        Ok(Self {
            u1: self.u1.add_scaled(s, &other.u1)?,
            u2: self.u2.add_scaled(s, &other.u2)?,
        })
    }

    pub fn sub(&self, other: &VectorField) -> Result<Self> {
        self.add_scaled(-1.0, other)
    }

    /// Squared trapezoidal L2 norm, summed over components.
    pub fn norm_sq(&self) -> f64 {
        inner_product_unchecked(&self.u1, &self.u1) + inner_product_unchecked(&self.u2, &self.u2)
    }

    pub fn max_abs(&self) -> f64 {
        self.u1.max_abs().max(self.u2.max_abs())
    }

    /// Trapezoidal inner product summed over components.
    pub fn dot(&self, other: &VectorField) -> Result<f64> {
        Ok(inner_product(&self.u1, &other.u1)? + inner_product(&self.u2, &other.u2)?)
    }
}

/// Whether boundary values are a trace (Dirichlet) or an outward normal
/// derivative (Neumann).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

/// Per-side nodal values of a scalar on the boundary. Each side carries its
/// corner nodes; a corner therefore appears once on each adjacent side and
/// the two entries need not agree.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    grid: Grid2D,
    kind: BoundaryKind,
    left: Vec<f64>,
    right: Vec<f64>,
    bottom: Vec<f64>,
    top: Vec<f64>,
}

impl BoundaryData {
    pub fn zeros(grid: Grid2D, kind: BoundaryKind) -> Self {
        Self {
            grid,
            kind,
            left: vec![0.0; grid.ny() + 1],
            right: vec![0.0; grid.ny() + 1],
            bottom: vec![0.0; grid.nx() + 1],
            top: vec![0.0; grid.nx() + 1],
        }
    }

    /// Builds data by evaluating `f(side, x, y)` at each side's nodes.
    pub fn from_fn(grid: Grid2D, kind: BoundaryKind, f: impl Fn(Side, f64, f64) -> f64) -> Self {
        let mut data = Self::zeros(grid, kind);
        for side in Side::ALL {
            for k in 0..grid.side_len(side) {
                let (i, j) = grid.side_node(side, k);
                data.side_mut(side)[k] = f(side, grid.x(i), grid.y(j));
            }
        }
        data
    }

    /// Dirichlet trace of a nodal field.
    pub fn trace(field: &ScalarField) -> Self {
        let grid = *field.grid();
        let mut data = Self::zeros(grid, BoundaryKind::Dirichlet);
        for side in Side::ALL {
            for k in 0..grid.side_len(side) {
                let (i, j) = grid.side_node(side, k);
                data.side_mut(side)[k] = field.get(i, j);
            }
        }
        data
    }

    pub fn from_sides(
        grid: Grid2D,
        kind: BoundaryKind,
        left: Vec<f64>,
        right: Vec<f64>,
        bottom: Vec<f64>,
        top: Vec<f64>,
    ) -> Result<Self> {
        for (len, expected) in [
            (left.len(), grid.ny() + 1),
            (right.len(), grid.ny() + 1),
            (bottom.len(), grid.nx() + 1),
            (top.len(), grid.nx() + 1),
        ] {
            if len != expected {
                return Err(Error::LengthMismatch {
                    expected,
                    actual: len,
                });
            }
        }
        Ok(Self {
            grid,
            kind,
            left,
            right,
            bottom,
            top,
        })
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    #[inline]
    pub fn kind(&self) -> BoundaryKind {
        self.kind
    }

    pub fn side(&self, side: Side) -> &[f64] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
            Side::Bottom => &self.bottom,
            Side::Top => &self.top,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut [f64] {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
            Side::Bottom => &mut self.bottom,
            Side::Top => &mut self.top,
        }
    }

    /// True for the first and last entry of each side.
    pub fn is_corner(&self, side: Side, k: usize) -> bool {
        k == 0 || k + 1 == self.grid.side_len(side)
    }

    /// Trapezoidal boundary integral, each side integrated separately.
    /// For Neumann data this is the compatibility mean `∮ g` times the
    /// perimeter.
    pub fn boundary_integral(&self) -> f64 {
        let mut acc = 0.0;
        for side in Side::ALL {
            let h = self.grid.side_spacing(side);
            let vals = self.side(side);
            let last = vals.len() - 1;
            for (k, v) in vals.iter().enumerate() {
                let w = if k == 0 || k == last { 0.5 } else { 1.0 };
                acc += w * h * v;
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        Side::ALL
            .iter()
            .flat_map(|&s| self.side(s).iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for side in Side::ALL {
            out.side_mut(side).iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    /// Adds `c` to every entry.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        for side in Side::ALL {
            out.side_mut(side).iter_mut().for_each(|v| *v += c);
        }
        out
    }

    /// Subtracts the perimeter mean so the boundary integral vanishes.
    pub fn mean_corrected(&self) -> Self {
        // the unit square has perimeter 4
        self.shifted(-self.boundary_integral() / 4.0)
    }

    pub fn add_scaled(&self, s: f64, other: &BoundaryData) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let mut out = self.clone();
        for side in Side::ALL {
            for (a, b) in out.side_mut(side).iter_mut().zip(other.side(side)) {
                *a += s * b;
            }
        }
        Ok(out)
    }

    /// Writes the data into the boundary nodes of `field`. Corner nodes take
    /// the bottom/top values.
    pub fn write_into(&self, field: &mut ScalarField) -> Result<()> {
        self.grid.ensure_same(field.grid())?;
        for side in [Side::Left, Side::Right, Side::Bottom, Side::Top] {
            for (k, &v) in self.side(side).iter().enumerate() {
                let (i, j) = self.grid.side_node(side, k);
                field.set(i, j, v);
            }
        }
        Ok(())
    }
}

fn inner_product_unchecked(a: &ScalarField, b: &ScalarField) -> f64 {
    let g = a.grid;
    let (nx, ny) = (g.nx(), g.ny());
    let row = g.row_len();
    let mut acc = 0.0;
    for j in 0..=ny {
        let wy = if j == 0 || j == ny { 0.5 } else { 1.0 };
        let base = j * row;
        let mut racc = 0.5 * (a.values[base] * b.values[base] + a.values[base + nx] * b.values[base + nx]);
        for i in 1..nx {
            racc += a.values[base + i] * b.values[base + i];
        }
        acc += wy * racc;
    }
    acc * g.hx() * g.hy()
}

/// Trapezoidal approximation of `∫ a b` over the unit square.
pub fn inner_product(a: &ScalarField, b: &ScalarField) -> Result<f64> {
    a.grid.ensure_same(&b.grid)?;
    Ok(inner_product_unchecked(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub h1_semi: f64,
    pub max_div: f64,
}

/// L2 norm, H1 seminorm (via the nodal gradient) and max-norm of the
/// discrete divergence.
pub fn norms(u: &VectorField) -> Norms {
    Norms {
        l2: u.norm_sq().sqrt(),
        h1_semi: ops::grad_norm_sq(u).sqrt(),
        max_div: ops::div_h(u).max_abs(),
    }
}
