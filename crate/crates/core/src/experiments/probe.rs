//! Neumann-to-Dirichlet probe: in the boundary strip `Ω_s = {Φ ≤ s}` of a
//! harmonic function, compare the full gradient with its normal part.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{BoundaryData, BoundaryKind, Grid2D, ScalarField, Side};
use crate::ops::grad_h;
use crate::solvers::NeumannPlan;

/// Nodes of `Ω_s` with the side whose normal is used there.
///
/// `Φ` is the distance to the nearest side; ties go to the first of left,
/// right, bottom, top. Nodes within `2h` of a corner in both directions are
/// left out.
pub fn strip_nodes(grid: &Grid2D, s: f64) -> Vec<(usize, usize, Side)> {
    let (hx, hy) = (grid.hx(), grid.hy());
    let mut out = Vec::new();
    for j in 0..=grid.ny() {
        for i in 0..=grid.nx() {
            let (x, y) = (grid.x(i), grid.y(j));
            let near_x = x < 2.0 * hx - 1e-12 || 1.0 - x < 2.0 * hx - 1e-12;
            let near_y = y < 2.0 * hy - 1e-12 || 1.0 - y < 2.0 * hy - 1e-12;
            if near_x && near_y {
                continue;
            }
            let dists = [(x, Side::Left), (1.0 - x, Side::Right), (y, Side::Bottom), (1.0 - y, Side::Top)];
            let mut best = dists[0];
            for d in &dists[1..] {
                if d.0 < best.0 {
                    best = *d;
                }
            }
            if best.0 <= s + 1e-12 {
                out.push((i, j, best.1));
            }
        }
    }
    out
}

/// `∫_{Ω_s} |∇p|² / ∫_{Ω_s} |n·∇p|²` with trapezoidal weights; `None`
/// when the normal part vanishes.
pub fn probe_ratio(p: &ScalarField, s: f64) -> Option<f64> {
    let grid = *p.grid();
    let g = grad_h(p);
    let (mut full, mut normal) = (0.0, 0.0);
    for (i, j, side) in strip_nodes(&grid, s) {
        let w = grid.weight(i, j);
        let (a, b) = (g.u1.get(i, j), g.u2.get(i, j));
        let [n1, n2] = side.normal();
        full += w * (a * a + b * b);
        normal += w * (n1 * a + n2 * b).powi(2);
    }
    if normal > 0.0 {
        Some(full / normal)
    } else {
        None
    }
}

/// Zero-mean Neumann data `Σ_k (a_k cos kπξ + b_k sin kπξ)/k` per side,
/// `ξ` the side coordinate. Independent of the grid for a given seed.
pub fn random_flux(grid: Grid2D, seed: u64, index: usize, modes: usize) -> BoundaryData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let mut coeffs = [[(0.0, 0.0); 16]; 4];
    let modes = modes.clamp(1, 16);
    for side in coeffs.iter_mut() {
        for c in side.iter_mut().take(modes) {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            *c = (a, b);
        }
    }
    let g = BoundaryData::from_fn(grid, BoundaryKind::Neumann, |side, x, y| {
        let (k_side, xi) = match side {
            Side::Left => (0, y),
            Side::Right => (1, y),
            Side::Bottom => (2, x),
            Side::Top => (3, x),
        };
        (1..=modes)
            .map(|k| {
                let (a, b) = coeffs[k_side][k - 1];
                let arg = k as f64 * std::f64::consts::PI * xi;
                (a * arg.cos() + b * arg.sin()) / k as f64
            })
            .sum()
    });
    g.mean_corrected()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub s: f64,
    pub nx: usize,
    pub ny: usize,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

pub fn probe_neumann_to_dirichlet(s: f64, samples: usize, grid: Grid2D, seed: u64, modes: usize) -> Result<ProbeResult> {
    let h = grid.hx().max(grid.hy());
    if !(s > 2.0 * h && s < 0.25) {
        return Err(Error::invalid("s", format!("must lie in (2h, 0.25) = ({}, 0.25), got {s}", 2.0 * h)));
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "must be >= 1"));
    }
    let plan = NeumannPlan::new(grid);
    let zero = ScalarField::zeros(grid);
    let mut ratios = Vec::with_capacity(samples);
    for index in 0..samples {
        let g = random_flux(grid, seed, index, modes);
        let p = plan.solve(&zero, &g)?.p;
        ratios.push(probe_ratio(&p, s).unwrap_or(f64::NAN));
    }
    let finite: Vec<f64> = ratios.iter().copied().filter(|r| r.is_finite()).collect();
    let max_ratio = finite.iter().copied().fold(f64::NAN, f64::max);
    let mean_ratio = finite.iter().sum::<f64>() / finite.len() as f64;
    Ok(ProbeResult {
        s,
        nx: grid.nx(),
        ny: grid.ny(),
        ratios,
        max_ratio,
        mean_ratio,
    })
}
