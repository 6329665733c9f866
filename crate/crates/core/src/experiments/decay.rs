//! Diffusive decay of the velocity divergence.

use serde::Serialize;

use super::fit::line_fit;
use crate::config::SimConfig;
use crate::error::Result;
use crate::grid::Grid2D;
use crate::presets::{BoundaryPreset, ForcingPreset, InitialPreset};
use crate::timestep::run;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayResult {
    /// `−d/dt log‖div u‖` fitted over the window; `None` if the
    /// divergence vanishes there.
    pub rate_hat: Option<f64>,
    pub times: Vec<f64>,
    pub div_norms: Vec<f64>,
    pub window: [f64; 2],
    pub nu: f64,
}

impl DecayResult {
    pub fn max_div_norm(&self) -> f64 {
        self.div_norms.iter().copied().fold(0.0, f64::max)
    }
}

/// Starts from `(a/π sin πx · T(y), 0)`, runs with `f = 0` and no-slip
/// walls to the end of `window`, and fits the decay rate of `‖div_h u‖`.
pub fn divergence_decay(amplitude: f64, grid: Grid2D, nu: f64, dt: f64, window: [f64; 2]) -> Result<DecayResult> {
    let cfg = SimConfig {
        grid,
        nu,
        dt,
        t_end: window[1],
        forcing: ForcingPreset::Zero,
        initial: InitialPreset::DivergenceMode { amplitude },
        bc: BoundaryPreset::Homogeneous,
        snapshot_every: 0,
        ..SimConfig::default()
    };
    let out = run(&cfg)?;
    let times: Vec<f64> = out.series.iter().map(|d| d.t).collect();
    let div_norms: Vec<f64> = out.series.iter().map(|d| d.div_u_sq.sqrt()).collect();
    let eps = 1e-9 * dt;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (t, d) in times.iter().zip(&div_norms) {
        if *t >= window[0] - eps && *t <= window[1] + eps {
            if !(*d > 0.0) {
                x.clear();
                break;
            }
            x.push(*t);
            y.push(d.ln());
        }
    }
    let rate_hat = line_fit(&x, &y).map(|(_, slope)| -slope);
    Ok(DecayResult {
        rate_hat,
        times,
        div_norms,
        window,
        nu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitude_has_no_divergence() {
        let r = divergence_decay(0.0, Grid2D::square(16).unwrap(), 1.0, 1e-2, [0.05, 0.2]).unwrap();
        assert!(r.max_div_norm() <= 1e-12);
        assert!(r.rate_hat.is_none());
    }

    #[test]
    fn coarse_grid_rate_is_near_heat_equation_rate() {
        let r = divergence_decay(1e-3, Grid2D::square(32).unwrap(), 1.0, 1e-3, [0.05, 0.3]).unwrap();
        let rate = r.rate_hat.unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((rate / pi2 - 1.0).abs() < 0.15, "rate {rate}");
    }
}
