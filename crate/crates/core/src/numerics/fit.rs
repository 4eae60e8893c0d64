//! Small least-squares fits: a fixed-frequency cosine (for the Melnikov
//! amplitude) and a log-linear line (for separatrix decay rates).

use crate::error::{Result, RingError};

/// Result of fitting v ≈ C cos(ντ + phase).
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct CosineFit {
    /// Non-negative amplitude.
    pub c: f64,
    /// Phase in radians, in (−π, π].
    pub phase: f64,
    /// Root-mean-square misfit.
    pub rms_residual: f64,
}

/// Least-squares fit of samples (τ_i, v_i) to C cos(ντ + φ) at a fixed
/// angular frequency ν, via the linear basis {cos ντ, sin ντ}.
pub fn fit_cosine(samples: &[(f64, f64)], nu: f64) -> Result<CosineFit> {
    if samples.len() < 8 {
        return Err(RingError::Domain(format!(
            "cosine fit needs at least 8 samples, got {}",
            samples.len()
        )));
    }
    if !(nu > 0.0) {
        return Err(RingError::Domain(format!(
            "cosine fit frequency must be positive, got {nu}"
        )));
    }
    let (tau_min, tau_max) = samples.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &(t, _)| {
        (lo.min(t), hi.max(t))
    });
    let period = 2.0 * std::f64::consts::PI / nu;
    if tau_max - tau_min < period * (1.0 - 1e-9) {
        return Err(RingError::Domain(format!(
            "cosine fit samples must span a full period {period:.6e}, got span {:.6e}",
            tau_max - tau_min
        )));
    }
    // Normal equations for v ≈ a·cos ντ + b·sin ντ.
    let (mut scc, mut scs, mut sss, mut scv, mut ssv) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(tau, v) in samples {
        let c = (nu * tau).cos();
        let s = (nu * tau).sin();
        scc += c * c;
        scs += c * s;
        sss += s * s;
        scv += c * v;
        ssv += s * v;
    }
    let det = scc * sss - scs * scs;
    if det.abs() < 1e-12 * (scc * sss).abs().max(1.0) {
        return Err(RingError::Degenerate(
            "cosine fit design matrix is singular (degenerate sample abscissae)".into(),
        ));
    }
    let a = (scv * sss - ssv * scs) / det;
    let b = (ssv * scc - scv * scs) / det;
    let mut ss_res = 0.0;
    for &(tau, v) in samples {
        let model = a * (nu * tau).cos() + b * (nu * tau).sin();
        ss_res += (v - model) * (v - model);
    }
    // a cos + b sin = C cos(ντ + φ) with C = hypot(a, b), φ = atan2(−b, a).
    Ok(CosineFit {
        c: a.hypot(b),
        phase: (-b).atan2(a),
        rms_residual: (ss_res / samples.len() as f64).sqrt(),
    })
}

/// Result of an ordinary least-squares line fit.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination R².
    pub r_squared: f64,
}

/// Ordinary least-squares line through (x_i, y_i).
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(RingError::Degenerate(format!(
            "line fit needs two matched samples at minimum, got {} x {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys.iter()) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(RingError::Degenerate(
            "line fit abscissae are all equal".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = (syy - slope * sxy).max(0.0);
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
    })
}
