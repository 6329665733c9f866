use ndarray::{Array2, ArrayView2};
use std::f64::consts::PI;

/// Forward and inverse 1D transform matrices for one direction.
#[derive(Debug, Clone)]
pub(crate) struct Transform1D {
    /// coefficients = forward · values
    pub forward: Array2<f64>,
    /// values = inverse · coefficients
    pub inverse: Array2<f64>,
}

/// `cos(π·m/n)` with the argument reduced mod `2n` first.
fn cos_pi_ratio(m: usize, n: usize) -> f64 {
    (PI * (m % (2 * n)) as f64 / n as f64).cos()
}

fn sin_pi_ratio(m: usize, n: usize) -> f64 {
    (PI * (m % (2 * n)) as f64 / n as f64).sin()
}

impl Transform1D {
    /// DST-I on the `n - 1` interior nodes: modes `sin(kπi/n)`, `1 ≤ k < n`.
    pub fn sine(n: usize) -> Self {
        let m = n - 1;
        let forward = Array2::from_shape_fn((m, m), |(k, i)| sin_pi_ratio((k + 1) * (i + 1), n));
        let scale = 2.0 / n as f64;
        let inverse = Array2::from_shape_fn((m, m), |(i, k)| scale * sin_pi_ratio((k + 1) * (i + 1), n));
        Self { forward, inverse }
    }

    /// DCT-I on all `n + 1` nodes: modes `cos(kπi/n)`, `0 ≤ k ≤ n`,
    /// orthogonal under the trapezoidal weights.
    pub fn cosine(n: usize) -> Self {
        let weight = |i: usize| if i == 0 || i == n { 0.5 } else { 1.0 };
        let mode_norm = |k: usize| if k == 0 || k == n { n as f64 } else { 0.5 * n as f64 };
        let forward = Array2::from_shape_fn((n + 1, n + 1), |(k, i)| {
            weight(i) * cos_pi_ratio(k * i, n) / mode_norm(k)
        });
        let inverse = Array2::from_shape_fn((n + 1, n + 1), |(i, k)| cos_pi_ratio(k * i, n));
        Self { forward, inverse }
    }
}

/// Separable 2D transform; arrays are indexed `[j, i]` (row = y).
#[derive(Debug, Clone)]
pub(crate) struct Transform2D {
    y: Transform1D,
    x_forward_t: Array2<f64>,
    x_inverse_t: Array2<f64>,
}

impl Transform2D {
    pub fn new(x: Transform1D, y: Transform1D) -> Self {
        let x_forward_t = x.forward.t().to_owned();
        let x_inverse_t = x.inverse.t().to_owned();
        Self {
            y,
            x_forward_t,
            x_inverse_t,
        }
    }

    pub fn forward(&self, values: ArrayView2<f64>) -> Array2<f64> {
        self.y.forward.dot(&values).dot(&self.x_forward_t)
    }

    pub fn inverse(&self, coeffs: ArrayView2<f64>) -> Array2<f64> {
        self.y.inverse.dot(&coeffs).dot(&self.x_inverse_t)
    }
}
