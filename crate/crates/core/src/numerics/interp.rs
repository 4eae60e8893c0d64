//! Cubic Hermite interpolation of sampled trajectories.
//!
//! The ODE trajectories used downstream (separatrix traces, oscillating ring
//! orbits) store the exact field value alongside each sample, so piecewise
//! cubic Hermite interpolation with those slopes reproduces the solution to
//! O(h⁴) — the sample spacing is chosen by the callers so the interpolation
//! error stays below their tolerance (1e-8 for the Melnikov trace).

use crate::error::{Result, RingError};

/// Piecewise-cubic Hermite interpolant of an N-dimensional time series with
/// known derivatives at the samples.
#[derive(Debug, Clone)]
pub struct CubicHermite<const N: usize> {
    t: Vec<f64>,
    y: Vec<[f64; N]>,
    dy: Vec<[f64; N]>,
}

impl<const N: usize> CubicHermite<N> {
    /// Build from samples (t_i, y_i, ẏ_i). Times must be strictly monotone
    /// (either direction).
    pub fn new(t: Vec<f64>, y: Vec<[f64; N]>, dy: Vec<[f64; N]>) -> Result<Self> {
        if t.len() < 2 || t.len() != y.len() || t.len() != dy.len() {
            return Err(RingError::Degenerate(format!(
                "hermite interpolant needs >= 2 matched samples, got t:{} y:{} dy:{}",
                t.len(),
                y.len(),
                dy.len()
            )));
        }
        let increasing = t[1] > t[0];
        for w in t.windows(2) {
            if (increasing && w[1] <= w[0]) || (!increasing && w[1] >= w[0]) {
                return Err(RingError::Degenerate(
                    "hermite sample times must be strictly monotone".into(),
                ));
            }
        }
        let mut out = Self { t, y, dy };
        if !increasing {
            out.t.reverse();
            out.y.reverse();
            out.dy.reverse();
        }
        Ok(out)
    }

    pub fn t_min(&self) -> f64 {
        self.t[0]
    }

    pub fn t_max(&self) -> f64 {
        *self.t.last().unwrap()
    }

    /// Interpolated state at time `t` (must lie within the sampled range, up
    /// to a relative slack of 1e-9 at the ends).
    pub fn eval(&self, t: f64) -> Result<[f64; N]> {
        let (lo, hi) = (self.t_min(), self.t_max());
        let slack = 1e-9 * (hi - lo).abs().max(1.0);
        if t < lo - slack || t > hi + slack {
            return Err(RingError::Range(format!(
                "interpolation time {t} outside sampled range [{lo}, {hi}]"
            )));
        }
        let t = t.clamp(lo, hi);
        // Binary search for the segment with t_i <= t <= t_{i+1}.
        let idx = match self
            .t
            .binary_search_by(|probe| probe.partial_cmp(&t).unwrap())
        {
            Ok(i) => i.min(self.t.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.t.len() - 2),
        };
        let h = self.t[idx + 1] - self.t[idx];
        let u = (t - self.t[idx]) / h;
        // Hermite basis.
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = h00 * self.y[idx][i]
                + h10 * h * self.dy[idx][i]
                + h01 * self.y[idx + 1][i]
                + h11 * h * self.dy[idx + 1][i];
        }
        Ok(out)
    }
}
