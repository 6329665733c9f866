//! Second-order finite-difference operators on the nodal grid.
//!
//! First derivatives are centered at interior nodes and use the 3-point
//! one-sided stencil on the boundary; second derivatives are the 3-point
//! centered stencil inside and the 4-point one-sided stencil on the
//! boundary. Every operator is exact on quadratics (first derivatives) or
//! cubics (second derivatives).

use crate::grid::{BoundaryData, BoundaryKind, Grid2D, ScalarField, Side, VectorField};

#[derive(Clone, Copy)]
enum Axis {
    X,
    Y,
}

/// Applies a 1D stencil along `axis`. `inner` gets `(prev, cur, next)`;
/// `edge` gets the four nodes nearest to an end, ordered from the boundary
/// inwards, and its value is multiplied by `last_sign` at the far end.
fn along(
    p: &ScalarField,
    axis: Axis,
    inner: impl Fn(f64, f64, f64) -> f64,
    edge: impl Fn([f64; 4]) -> f64,
    last_sign: f64,
) -> ScalarField {
    let g = *p.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let v = p.values();
    let mut out = vec![0.0; g.node_count()];
    let row = g.row_len();
    match axis {
        Axis::X => {
            for j in 0..=ny {
                let b = j * row;
                out[b] = edge([v[b], v[b + 1], v[b + 2], v[b + 3]]);
                for i in 1..nx {
                    out[b + i] = inner(v[b + i - 1], v[b + i], v[b + i + 1]);
                }
                let e = b + nx;
                out[e] = last_sign * edge([v[e], v[e - 1], v[e - 2], v[e - 3]]);
            }
        }
        Axis::Y => {
            for i in 0..=nx {
                out[i] = edge([v[i], v[i + row], v[i + 2 * row], v[i + 3 * row]]);
                let e = ny * row + i;
                out[e] = last_sign * edge([v[e], v[e - row], v[e - 2 * row], v[e - 3 * row]]);
            }
            for j in 1..ny {
                let b = j * row;
                for i in 0..=nx {
                    out[b + i] = inner(v[b + i - row], v[b + i], v[b + i + row]);
                }
            }
        }
    }
    ScalarField::from_values(g, out).expect("length preserved")
}

fn first_derivative(p: &ScalarField, axis: Axis) -> ScalarField {
    let h = match axis {
        Axis::X => p.grid().hx(),
        Axis::Y => p.grid().hy(),
    };
    let c = 0.5 / h;
    along(
        p,
        axis,
        |a, _, b| c * (b - a),
        |[f0, f1, f2, _]| c * (-3.0 * f0 + 4.0 * f1 - f2),
        -1.0,
    )
}

fn second_derivative(p: &ScalarField, axis: Axis) -> ScalarField {
    let h = match axis {
        Axis::X => p.grid().hx(),
        Axis::Y => p.grid().hy(),
    };
    let c = 1.0 / (h * h);
    along(
        p,
        axis,
        |a, m, b| c * (a - 2.0 * m + b),
        |[f0, f1, f2, f3]| c * (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3),
        1.0,
    )
}

pub fn d_dx(p: &ScalarField) -> ScalarField {
    first_derivative(p, Axis::X)
}

pub fn d_dy(p: &ScalarField) -> ScalarField {
    first_derivative(p, Axis::Y)
}

pub fn grad_h(p: &ScalarField) -> VectorField {
    VectorField {
        u1: d_dx(p),
        u2: d_dy(p),
    }
}

pub fn div_h(u: &VectorField) -> ScalarField {
    let mut out = d_dx(&u.u1);
    for (o, v) in out.values_mut().iter_mut().zip(d_dy(&u.u2).values()) {
        *o += v;
    }
    out
}

/// Five-point Laplacian inside; one-sided second differences in the normal
/// direction (both directions at corners) on the boundary.
pub fn lap_h(p: &ScalarField) -> ScalarField {
    let mut out = second_derivative(p, Axis::X);
    for (o, v) in out.values_mut().iter_mut().zip(second_derivative(p, Axis::Y).values()) {
        *o += v;
    }
    out
}

pub fn lap_h_vec(u: &VectorField) -> VectorField {
    VectorField {
        u1: lap_h(&u.u1),
        u2: lap_h(&u.u2),
    }
}

/// Centered convection `(u·∇)u` at every node.
pub fn advect(u: &VectorField) -> VectorField {
    let comp = |c: &ScalarField| {
        let dx = d_dx(c);
        let dy = d_dy(c);
        let vals = u
            .u1
            .values()
            .iter()
            .zip(u.u2.values())
            .zip(dx.values().iter().zip(dy.values()))
            .map(|((a, b), (px, py))| a * px + b * py)
            .collect();
        ScalarField::from_values(*c.grid(), vals).expect("length preserved")
    };
    VectorField {
        u1: comp(&u.u1),
        u2: comp(&u.u2),
    }
}

/// `ω = ∂x u2 − ∂y u1`.
pub fn vorticity(u: &VectorField) -> ScalarField {
    let mut out = d_dx(&u.u2);
    for (o, v) in out.values_mut().iter_mut().zip(d_dy(&u.u1).values()) {
        *o -= v;
    }
    out
}

/// Squared H1 seminorm `Σ_k ‖∇_h u_k‖²`.
pub fn grad_norm_sq(u: &VectorField) -> f64 {
    grad_h(&u.u1).norm_sq() + grad_h(&u.u2).norm_sq()
}

/// `‖Δ_h u‖²` restricted to interior nodes.
pub fn interior_lap_norm_sq(u: &VectorField) -> f64 {
    lap_h(&u.u1).interior_norm_sq() + lap_h(&u.u2).interior_norm_sq()
}

/// Outward normal component `n·a` on each side. Corner entries use the
/// normal of the side they are stored on.
pub fn normal_trace(a: &VectorField) -> BoundaryData {
    let grid = *a.grid();
    let mut data = BoundaryData::zeros(grid, BoundaryKind::Neumann);
    for side in Side::ALL {
        let [n1, n2] = side.normal();
        for k in 0..grid.side_len(side) {
            let (i, j) = grid.side_node(side, k);
            data.side_mut(side)[k] = n1 * a.u1.get(i, j) + n2 * a.u2.get(i, j);
        }
    }
    data
}

/// Outward normal derivative `n·∇_h p` on each side.
pub fn normal_derivative(p: &ScalarField) -> BoundaryData {
    normal_trace(&grad_h(p))
}

/// Neumann data of the Stokes pressure, `n·(Δ − ∇div)u` on the boundary.
///
/// Uses the planar identity `(Δ − ∇div)u = (−∂y ω, ∂x ω)`, so the data is
/// minus the tangential derivative of the vorticity along each side. The
/// tangential derivative is centered along the side; corner entries copy
/// the neighbouring value. The result is shifted to zero boundary mean.
pub fn stokes_neumann_data(u: &VectorField) -> BoundaryData {
    let grid = *u.grid();
    let w = vorticity(u);
    let mut data = BoundaryData::zeros(grid, BoundaryKind::Neumann);
    for side in Side::ALL {
        let h = grid.side_spacing(side);
        // g = -τ·∇ω with τ = (-n2, n1); along the side's own parameter
        // direction this is ±∂ω/∂s.
        let sign = match side {
            Side::Left | Side::Top => 1.0,
            Side::Right | Side::Bottom => -1.0,
        };
        let len = grid.side_len(side);
        let omega: Vec<f64> = (0..len)
            .map(|k| {
                let (i, j) = grid.side_node(side, k);
                w.get(i, j)
            })
            .collect();
        let vals = data.side_mut(side);
        for k in 1..len - 1 {
            vals[k] = sign * (omega[k + 1] - omega[k - 1]) / (2.0 * h);
        }
        vals[0] = vals[1];
        vals[len - 1] = vals[len - 2];
    }
    data.mean_corrected()
}

/// Trapezoidal sum of `f(i, j)` over the nodes where it returns a value.
/// Used by diagnostics that restrict integrals to sub-regions.
pub fn weighted_sum(grid: &Grid2D, mut f: impl FnMut(usize, usize) -> Option<f64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..=grid.ny() {
        for i in 0..=grid.nx() {
            if let Some(v) = f(i, j) {
                acc += grid.weight(i, j) * v;
            }
        }
    }
    acc
}
