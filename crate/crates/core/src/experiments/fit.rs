//! Small least-squares fits used by the studies.

/// Ordinary least-squares line `y ≈ a + b x`; returns `(a, b)`.
pub fn line_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

/// Slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    line_fit(&lx, &ly).map(|(_, b)| b)
}

/// Minimizes `Σ (r_i − β − C s_i)²` over `β ∈ [0, 1]`, `C ≥ 0`.
///
/// The objective is a convex quadratic, so the minimizer is either the
/// unconstrained one or lies on an edge or corner of the feasible set;
/// every candidate is evaluated and the best feasible one kept.
pub fn constrained_beta_fit(r: &[f64], s: &[f64]) -> Option<(f64, f64)> {
    let n = r.len();
    if n == 0 || s.len() != n {
        return None;
    }
    let nf = n as f64;
    let (sr, ss) = (r.iter().sum::<f64>(), s.iter().sum::<f64>());
    let srs: f64 = r.iter().zip(s).map(|(a, b)| a * b).sum();
    let sss: f64 = s.iter().map(|b| b * b).sum();
    let cost = |beta: f64, c: f64| -> f64 { r.iter().zip(s).map(|(ri, si)| (ri - beta - c * si).powi(2)).sum() };

    let mut candidates = Vec::new();
    let det = nf * sss - ss * ss;
    if det.abs() > 1e-14 * (nf * sss).max(1.0) {
        candidates.push(((sss * sr - ss * srs) / det, (nf * srs - ss * sr) / det));
    }
    // C fixed at 0: β is the mean, clamped
    candidates.push(((sr / nf).clamp(0.0, 1.0), 0.0));
    // β fixed at an end: C from the residual, clamped
    for beta in [0.0, 1.0] {
        let c = if sss > 0.0 { ((srs - beta * ss) / sss).max(0.0) } else { 0.0 };
        candidates.push((beta, c));
    }
    candidates
        .into_iter()
        .filter(|&(b, c)| (0.0..=1.0).contains(&b) && c >= 0.0 && b.is_finite() && c.is_finite())
        .map(|(b, c)| (cost(b, c), b, c))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, b, c)| (b, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_recovers_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let (a, b) = line_fit(&x, &y).unwrap();
        assert!((a - 2.0).abs() < 1e-14 && (b + 0.5).abs() < 1e-14);
        assert!(line_fit(&[1.0], &[1.0]).is_none());
        assert!((log_log_slope(&[1.0, 2.0, 4.0], &[1.0, 4.0, 16.0]).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn beta_fit_interior_solution() {
        let s = [0.1, 0.5, 0.9, 0.2, 0.7];
        let r: Vec<f64> = s.iter().map(|v| 0.4 + 0.3 * v).collect();
        let (b, c) = constrained_beta_fit(&r, &s).unwrap();
        assert!((b - 0.4).abs() < 1e-12 && (c - 0.3).abs() < 1e-12);
    }

    #[test]
    fn beta_fit_respects_bounds() {
        let s = [0.1, 0.5, 0.9];
        // unconstrained slope is negative
        let r: Vec<f64> = s.iter().map(|v| 0.5 - 0.2 * v).collect();
        let (b, c) = constrained_beta_fit(&r, &s).unwrap();
        assert_eq!(c, 0.0);
        assert!((b - r.iter().sum::<f64>() / 3.0).abs() < 1e-12);
        // unconstrained intercept above one
        let r: Vec<f64> = s.iter().map(|v| 1.5 + 0.1 * v).collect();
        let (b, _) = constrained_beta_fit(&r, &s).unwrap();
        assert_eq!(b, 1.0);
    }
}
