//! Fixed-step classical Runge–Kutta integration.
//!
//! The laboratory integrates Hamiltonian fields whose evaluations can fail
//! (filament-core singularities), so the integrator propagates `Result`s from
//! the field and converts a mid-trajectory failure into a recorded abort
//! carrying the last good state — partial trajectories are data here
//! (streamline portraits record per-seed core hits), not exceptions.

use crate::error::{Result, RingError};

/// Fixed-step integrator configuration.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IntegratorSpec {
    /// RK4 step (default 1e-4; must not exceed 1e-2).
    pub step: f64,
    /// Safety cap on the total integration time of open-ended loops.
    pub max_time: f64,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        Self {
            step: 1e-4,
            max_time: 100.0,
        }
    }
}

impl IntegratorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step <= 1e-2) {
            return Err(RingError::Domain(format!(
                "integrator step must lie in (0, 1e-2], got {}",
                self.step
            )));
        }
        if !(self.max_time > 0.0) {
            return Err(RingError::Domain(format!(
                "integrator max_time must be positive, got {}",
                self.max_time
            )));
        }
        Ok(())
    }

    pub fn with_step(step: f64) -> Self {
        Self {
            step,
            ..Self::default()
        }
    }
}

/// Why and where an integration stopped early.
#[derive(Debug, Clone)]
pub struct AbortInfo<const N: usize> {
    /// Last time at which the state was still good.
    pub t: f64,
    /// Last good state.
    pub y: [f64; N],
    /// The field error that triggered the abort.
    pub error: RingError,
}

/// A sampled trajectory. `abort` is `Some` when the field raised an error
/// mid-run; the stored samples then end at the last good step.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub abort: Option<AbortInfo<N>>,
}

impl<const N: usize> Trajectory<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.t.last().unwrap(), *self.y.last().unwrap())
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// One classical RK4 step of size `h` from (t, y).
pub fn rk4_step<const N: usize, F>(f: &mut F, t: f64, y: &[f64; N], h: f64) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let k1 = f(t, y)?;
    let mut y2 = *y;
    for i in 0..N {
        y2[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = f(t + 0.5 * h, &y2)?;
    for i in 0..N {
        y2[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = f(t + 0.5 * h, &y2)?;
    for i in 0..N {
        y2[i] = y[i] + h * k3[i];
    }
    let k4 = f(t + h, &y2)?;
    let mut out = *y;
    for i in 0..N {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Integrate ẏ = f(t, y) from t0 to t1 (either direction) with fixed RK4
/// steps of magnitude `spec.step`, storing every `store_every`-th sample
/// (plus the endpoints). A field failure ends the run early and is recorded
/// in [`Trajectory::abort`].
pub fn rk4_integrate<const N: usize, F>(
    mut f: F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    spec: &IntegratorSpec,
    store_every: usize,
) -> Trajectory<N>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let store_every = store_every.max(1);
    let span = t1 - t0;
    let n_steps = (span.abs() / spec.step).ceil() as usize;
    let mut traj = Trajectory {
        t: Vec::with_capacity(n_steps / store_every + 2),
        y: Vec::with_capacity(n_steps / store_every + 2),
        abort: None,
    };
    traj.t.push(t0);
    traj.y.push(y0);
    if n_steps == 0 {
        return traj;
    }
    let h = span / n_steps as f64;
    let mut t = t0;
    let mut y = y0;
    for k in 1..=n_steps {
        match rk4_step(&mut f, t, &y, h) {
            Ok(next) => {
                y = next;
                // Exact endpoint, and drift-free uniform interior times.
                t = if k == n_steps {
                    t1
                } else {
                    t0 + span * (k as f64 / n_steps as f64)
                };
                if k % store_every == 0 || k == n_steps {
                    traj.t.push(t);
                    traj.y.push(y);
                }
            }
            Err(err) => {
                if *traj.t.last().unwrap() != t {
                    traj.t.push(t);
                    traj.y.push(y);
                }
                traj.abort = Some(AbortInfo { t, y, error: err });
                break;
            }
        }
    }
    traj
}
