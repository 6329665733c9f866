//! Random velocity fields vanishing on the boundary.
//!
//! Sample `i` of a spec draws from its own ChaCha stream, so any sample
//! can be regenerated alone and the order of generation does not matter.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::grid::{Grid2D, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFamily {
    /// Double sine series; stream function `sin πx sin πy · Σ a sin kπx sin lπy`.
    RandomSineSeries,
    /// Stream function `P(x) P(y) · Σ b cos kπx cos lπy` with
    /// `P(t) = 4t²(1−t)²`.
    StreamFunction,
    /// Supported in `[1/4, 3/4]²`.
    InteriorBump,
}

impl SampleFamily {
    pub fn name(&self) -> &'static str {
        match self {
            SampleFamily::RandomSineSeries => "random-sine-series",
            SampleFamily::StreamFunction => "stream-function",
            SampleFamily::InteriorBump => "interior-bump",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "random-sine-series" => Some(SampleFamily::RandomSineSeries),
            "stream-function" => Some(SampleFamily::StreamFunction),
            "interior-bump" => Some(SampleFamily::InteriorBump),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpec {
    pub family: SampleFamily,
    /// Modes per direction.
    pub modes: usize,
    /// Mode `(k, l)` has amplitude `N(0,1) · (k² + l²)^(−exponent/2)`.
    pub amplitude_exponent: f64,
    pub seed: u64,
    pub divergence_free: bool,
    pub count: usize,
}

/// A scalar profile `value, derivative` in one variable.
type Profile = fn(f64, usize) -> (f64, f64);

fn sine_profile(t: f64, k: usize) -> (f64, f64) {
    let kf = k as f64;
    let (s, c) = ((PI * t).sin(), (PI * t).cos());
    let (sk, ck) = ((kf * PI * t).sin(), (kf * PI * t).cos());
    (s * sk, PI * c * sk + kf * PI * s * ck)
}

fn poly_profile(t: f64, k: usize) -> (f64, f64) {
    let kf = (k - 1) as f64;
    let p = 4.0 * t * t * (1.0 - t) * (1.0 - t);
    let dp = 8.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
    let (c, dc) = ((kf * PI * t).cos(), -kf * PI * (kf * PI * t).sin());
    (p * c, dp * c + p * dc)
}

fn bump_profile(t: f64, k: usize) -> (f64, f64) {
    if !(0.25..=0.75).contains(&t) {
        return (0.0, 0.0);
    }
    let a = 2.0 * PI * (t - 0.25);
    let (b, db) = (a.sin().powi(4), 8.0 * PI * a.sin().powi(3) * a.cos());
    let kf = k as f64;
    let (s, ds) = ((kf * PI * t).sin(), kf * PI * (kf * PI * t).cos());
    (b * s, db * s + b * ds)
}

impl SampleSpec {
    fn profile(&self) -> Profile {
        match self.family {
            SampleFamily::RandomSineSeries => sine_profile,
            SampleFamily::StreamFunction => poly_profile,
            SampleFamily::InteriorBump => bump_profile,
        }
    }

    fn coefficients(&self, rng: &mut ChaCha8Rng) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.modes * self.modes);
        for l in 1..=self.modes {
            for k in 1..=self.modes {
                let z: f64 = StandardNormal.sample(rng);
                let decay = ((k * k + l * l) as f64).powf(-0.5 * self.amplitude_exponent);
                out.push((k, l, z * decay));
            }
        }
        out
    }

    /// Sample `index`, normalized to unit discrete L² norm.
    pub fn sample(&self, grid: Grid2D, index: usize) -> VectorField {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let profile = self.profile();
        let u = if self.divergence_free {
            // u = (∂yψ, −∂xψ)
            let coeffs = self.coefficients(&mut rng);
            VectorField::from_fn(grid, |x, y| {
                let (mut a, mut b) = (0.0, 0.0);
                for &(k, l, c) in &coeffs {
                    let (fx, dfx) = profile(x, k);
                    let (fy, dfy) = profile(y, l);
                    a += c * fx * dfy;
                    b -= c * dfx * fy;
                }
                [a, b]
            })
        } else {
            let c1 = self.coefficients(&mut rng);
            let c2 = self.coefficients(&mut rng);
            VectorField::from_fn(grid, |x, y| {
                let eval = |coeffs: &[(usize, usize, f64)]| {
                    coeffs.iter().map(|&(k, l, c)| c * profile(x, k).0 * profile(y, l).0).sum::<f64>()
                };
                [eval(&c1), eval(&c2)]
            })
        };
        let norm = u.norm_sq().sqrt();
        if norm > 0.0 {
            u.scaled(1.0 / norm)
        } else {
            u
        }
    }
}
