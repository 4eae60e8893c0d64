//! Slightly oscillating ring pairs.
//!
//! A stationary pair whose reduced relative dynamics is elliptic supports
//! small periodic oscillations. This module provides the closed-form
//! oscillation mode at frequency ν with amplitude ratio A/B, its nonlinear
//! counterpart obtained by integrating the full interaction field from the
//! same initial state, the first-order time-periodic correction `𝓗₁` that
//! the motion induces in the particle stream function, and the oscillating
//! axial stagnation points.
//!
//! The closed-form motion with amplitude μ and phase φ is
//!
//! ```text
//! s₁(t) = ŝ₁ + μ sin(νt + φ)        x₁(t) = ξ̂ + μ cos(νt + φ)
//! s₂(t) = ŝ₂ − (μ/κ) sin(νt + φ)   x₂(t) = ξ̂ + μ (A/B) cos(νt + φ)
//! ```
//!
//! so the weighted area G = s₁ + κ s₂ is constant by construction and the
//! axial sway of the two rings is locked at the ratio A/B.
//!
//! The closed-form mode and the exact interaction field are distinct linear
//! systems: [`pair_linearization`] measures the exact reduced linearization
//! at the equilibrium, which can be elliptic (a linear center with closed
//! trial orbits, found by [`center_manifold_seed`]) or hyperbolic (a saddle,
//! in which case nearby trial orbits diverge and the seed search reports the
//! measured growth rate instead of closing).

use std::f64::consts::PI;

use crate::equilibria::{stagnation_offset, EquilibriumConfig};
use crate::error::{Result, RingError};
use crate::numerics::interp::CubicHermite;
use crate::numerics::ode::IntegratorSpec;
use crate::numerics::quad::{sigma_all_moments, QuadratureSpec};
use crate::params::{ModelParams, ParticleState, RingPairState, KAPPA_1};
use crate::ring_dynamics::{RingSystem, RingTrajectory};

/// Absolute 4-D closure tolerance for a bisected center-manifold orbit: the
/// trial orbit must return to its seed within this Euclidean distance after
/// one measured period.
pub const ORBIT_CLOSURE_TOL: f64 = 1e-8;

/// Bisection iteration cap for the center-manifold seed search.
const SEED_MAX_ITER: usize = 200;

/// How the oscillating ring state is produced.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum OscillationMode {
    /// Closed-form oscillation at frequency ν with sway ratio A/B.
    #[default]
    Analytic,
    /// Direct integration of the full interaction field from the closed-form
    /// state at t = 0: the nonlinear evolution of the same initial state.
    /// Each evaluation integrates from t = 0, so it is far more expensive
    /// than the analytic mode, and it drifts away from the closed-form mode
    /// at a rate set by the exact reduced linearization (which need not be
    /// elliptic even when ν is real).
    Integrated,
}

/// Amplitude, mode, and phase of a small ring-pair oscillation.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct OscillationSpec {
    /// Signed amplitude μ of the `s₁` oscillation; |μ| must not exceed the
    /// configuration's safe bound ε*.
    pub mu: f64,
    pub mode: OscillationMode,
    /// Phase offset φ in radians (the oscillation argument is νt + φ).
    pub phase: f64,
}

impl Default for OscillationSpec {
    fn default() -> Self {
        Self {
            mu: 0.0,
            mode: OscillationMode::Analytic,
            phase: 0.0,
        }
    }
}

impl OscillationSpec {
    /// Analytic-mode oscillation with amplitude `mu` and zero phase.
    pub fn analytic(mu: f64) -> Self {
        Self {
            mu,
            ..Self::default()
        }
    }

    /// Check |μ| against the configuration's amplitude bound ε*.
    pub fn validate_against(&self, config: &EquilibriumConfig) -> Result<()> {
        if !self.mu.is_finite() || self.mu.abs() > config.eps_star {
            return Err(RingError::Domain(format!(
                "oscillation amplitude {} exceeds the safe bound ε* = {:.6e} of the {} configuration",
                self.mu, config.eps_star, config.type_tag
            )));
        }
        Ok(())
    }
}

/// Ring-pair state at time `t` under a small oscillation about `config`.
///
/// μ = 0 returns the stationary state for every `t`. Analytic mode evaluates
/// the closed-form motion; integrated mode integrates the full interaction
/// field from the closed-form state at t = 0 (phase included) to `t`, in
/// either time direction, using the default σ-quadrature.
pub fn ring_motion(
    t: f64,
    config: &EquilibriumConfig,
    spec: &OscillationSpec,
    params: &ModelParams,
) -> Result<RingPairState> {
    spec.validate_against(config)?;
    if spec.mu == 0.0 {
        return Ok(config.state());
    }
    match spec.mode {
        OscillationMode::Analytic => analytic_ring_state(t, config, spec, params),
        OscillationMode::Integrated => {
            let nu = config.nu()?;
            let seed = analytic_ring_state(0.0, config, spec, params)?;
            integrate_to(&seed, t, nu, config, params, &QuadratureSpec::default())
        }
    }
}

/// Closed-form linearized ring motion.
fn analytic_ring_state(
    t: f64,
    config: &EquilibriumConfig,
    spec: &OscillationSpec,
    params: &ModelParams,
) -> Result<RingPairState> {
    let nu = config.nu()?;
    let ratio = config.amp_ratio()?;
    let theta = nu * t + spec.phase;
    let (sin_t, cos_t) = theta.sin_cos();
    let ds = spec.mu * sin_t;
    Ok(RingPairState {
        s1: config.s1_hat + ds,
        s2: config.s2_hat - ds / params.kappa,
        x1: config.xi_hat + spec.mu * cos_t,
        x2: config.xi_hat + spec.mu * ratio * cos_t,
    })
}

/// Integrate the ring dynamics from `seed` (taken at t = 0) to time `t`,
/// in either time direction, returning only the final state.
fn integrate_to(
    seed: &RingPairState,
    t: f64,
    nu: f64,
    config: &EquilibriumConfig,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<RingPairState> {
    if t == 0.0 {
        return Ok(*seed);
    }
    let system =
        RingSystem::with_orientation(*params, config.orientation)?.with_quadrature(*quad)?;
    let step = oscillation_step(nu);
    let direction = t.signum();
    let span = t.abs();
    let ispec = IntegratorSpec {
        step,
        max_time: span + step,
    };
    // Reverse time by integrating dy/dτ = sgn(t)·f(y) over τ ∈ [0, |t|].
    let traj = crate::numerics::ode::rk4_integrate(
        |_tau, y: &[f64; 4]| {
            let v = system.velocity(&RingPairState::from_array(*y))?;
            Ok([
                direction * v[0],
                direction * v[1],
                direction * v[2],
                direction * v[3],
            ])
        },
        seed.as_array(),
        0.0,
        span,
        &ispec,
        usize::MAX,
    );
    if let Some(abort) = traj.abort {
        return Err(abort.error);
    }
    Ok(RingPairState::from_array(*traj.y.last().expect("non-empty trajectory")))
}

/// Integration step for oscillating-ring trajectories: a few thousand steps
/// per period, capped by the integrator's step bound.
fn oscillation_step(nu: f64) -> f64 {
    ((2.0 * PI / nu) / 4096.0).min(1e-2)
}

/// Exact linearization of the ring-pair dynamics at an equilibrium,
/// restricted to the relative plane that the conserved weighted area leaves
/// free: δs₁ with δs₂ = −δs₁/κ, and the axial offset w = x₁ − x₂ with the
/// common translation removed. The reduced system is
///
/// ```text
/// δṡ₁ = p·w,   ẇ = q·δs₁,   λ² = p·q,
/// ```
///
/// so λ² < 0 is a linear center with frequency √(−λ²) and λ² > 0 a saddle
/// with growth rate √λ². The sign of λ² is a property of the interaction
/// field itself and is independent of the closed-form mode coefficients.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct PairLinearization {
    /// p = ∂ṡ₁/∂x₁ at the equilibrium (the relative-offset coupling in δṡ₁).
    pub ds1_dx: f64,
    /// q = area-constrained s₁-derivative of the relative axial velocity
    /// ẋ₁ − ẋ₂.
    pub dw_ds1: f64,
    /// λ² = p·q of the reduced two-by-two system.
    pub lambda_sq: f64,
}

impl PairLinearization {
    /// True when the reduced linearization is a linear center (λ² < 0).
    pub fn is_elliptic(&self) -> bool {
        self.lambda_sq < 0.0
    }

    /// Oscillation frequency √(−λ²) of an elliptic reduced linearization.
    pub fn frequency(&self) -> Option<f64> {
        (self.lambda_sq < 0.0).then(|| (-self.lambda_sq).sqrt())
    }

    /// Exponential growth rate √λ² of a hyperbolic reduced linearization.
    pub fn growth_rate(&self) -> Option<f64> {
        (self.lambda_sq > 0.0).then(|| self.lambda_sq.sqrt())
    }
}

/// Measure the reduced linearization of the ring-pair dynamics at the
/// equilibrium of `config` by central finite differences of the interaction
/// field, with per-component steps `1e-7 · max(|component|, 1e-3)`.
pub fn pair_linearization(
    config: &EquilibriumConfig,
    params: &ModelParams,
) -> Result<PairLinearization> {
    pair_linearization_quad(config, params, &QuadratureSpec::default())
}

fn pair_linearization_quad(
    config: &EquilibriumConfig,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<PairLinearization> {
    let system =
        RingSystem::with_orientation(*params, config.orientation)?.with_quadrature(*quad)?;
    let base = config.state().as_array();
    let column = |j: usize| -> Result<[f64; 4]> {
        let h = 1e-7 * base[j].abs().max(1e-3);
        let mut up = base;
        let mut dn = base;
        up[j] += h;
        dn[j] -= h;
        let vu = system.velocity(&RingPairState::from_array(up))?;
        let vd = system.velocity(&RingPairState::from_array(dn))?;
        Ok([
            (vu[0] - vd[0]) / (2.0 * h),
            (vu[1] - vd[1]) / (2.0 * h),
            (vu[2] - vd[2]) / (2.0 * h),
            (vu[3] - vd[3]) / (2.0 * h),
        ])
    };
    let by_s1 = column(0)?;
    let by_s2 = column(1)?;
    let by_x1 = column(2)?;
    let p = by_x1[0];
    let q = (by_s1[2] - by_s1[3]) - (by_s2[2] - by_s2[3]) / params.kappa;
    Ok(PairLinearization {
        ds1_dx: p,
        dw_ds1: q,
        lambda_sq: p * q,
    })
}

/// Period, closure, and geometry of one trial ring orbit.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct OrbitDiagnostics {
    /// Measured period: first return of s₁ through ŝ₁ in the starting
    /// direction.
    pub period: f64,
    /// Euclidean distance in (s₁, s₂, x₁, x₂) between the seed and the state
    /// one measured period later.
    pub closure: f64,
    /// Net drift of the mean axial position ½(x₁+x₂) over one period.
    pub drift: f64,
    /// Peak-to-peak span of each component over one period.
    pub spans: [f64; 4],
}

/// Integrate one trial orbit from `seed` and measure its period, closure,
/// and drift. The period is located as the first crossing of s₁ = ŝ₁ in the
/// same direction as at the seed, after half an estimated period.
pub fn closed_orbit_trial(
    seed: &RingPairState,
    config: &EquilibriumConfig,
    params: &ModelParams,
) -> Result<(OrbitDiagnostics, RingTrajectory)> {
    orbit_trial(seed, config, params, &QuadratureSpec::default())
}

fn orbit_trial(
    seed: &RingPairState,
    config: &EquilibriumConfig,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<(OrbitDiagnostics, RingTrajectory)> {
    let lin = pair_linearization_quad(config, params, quad)?;
    let rate = lin.lambda_sq.abs().sqrt();
    if rate == 0.0 {
        return Err(RingError::Degenerate(format!(
            "reduced linearization of the {} ring pair is degenerate (λ² = 0)",
            config.type_tag
        )));
    }
    let period_est = 2.0 * PI / rate;
    let system =
        RingSystem::with_orientation(*params, config.orientation)?.with_quadrature(*quad)?;
    let step = oscillation_step(rate);
    let ispec = IntegratorSpec {
        step,
        max_time: 1.4 * period_est,
    };
    let traj = system.integrate(seed, (0.0, 1.35 * period_est), &ispec, 1)?;
    if let Some(abort) = &traj.abort {
        if let Some(growth) = lin.growth_rate() {
            return Err(RingError::Convergence {
                what: format!(
                    "trial ring orbit (integration stopped at t = {:.4}: the ring-pair \
                     equilibrium is linearly hyperbolic, growth rate {growth:.6})",
                    abort.t
                ),
                iterations: traj.t.len(),
                residual: growth,
            });
        }
        return Err(abort.error.clone());
    }

    // Starting direction of s₁ determines which crossings count.
    let v0 = system.velocity(seed)?;
    let upward = v0[0] >= 0.0;
    let s1_ref = config.s1_hat;
    let mut crossing: Option<(usize, f64)> = None;
    for i in 0..traj.t.len() - 1 {
        if traj.t[i] < 0.5 * period_est {
            continue;
        }
        let a = traj.states[i].s1 - s1_ref;
        let b = traj.states[i + 1].s1 - s1_ref;
        let crosses = if upward { a <= 0.0 && b > 0.0 } else { a >= 0.0 && b < 0.0 };
        if crosses {
            let va = system.velocity(&traj.states[i])?;
            let vb = system.velocity(&traj.states[i + 1])?;
            let seg = CubicHermite::new(
                vec![traj.t[i], traj.t[i + 1]],
                vec![traj.states[i].as_array(), traj.states[i + 1].as_array()],
                vec![va, vb],
            )?;
            let t_cross = refine_crossing(&seg, traj.t[i], traj.t[i + 1], s1_ref, upward)?;
            crossing = Some((i, t_cross));
            break;
        }
    }
    let Some((idx, period)) = crossing else {
        let detail = match lin.growth_rate() {
            Some(growth) => format!(
                "the ring-pair equilibrium is linearly hyperbolic (growth rate {growth:.6}), \
                 so trial orbits diverge instead of returning"
            ),
            None => format!(
                "no s₁ return within 1.35 estimated periods (reduced frequency {rate:.6})"
            ),
        };
        return Err(RingError::Convergence {
            what: format!("trial ring orbit period: {detail}"),
            iterations: traj.t.len(),
            residual: (traj.states.last().unwrap().s1 - s1_ref).abs(),
        });
    };

    // State at the measured period via the same local Hermite segment.
    let va = system.velocity(&traj.states[idx])?;
    let vb = system.velocity(&traj.states[idx + 1])?;
    let seg = CubicHermite::new(
        vec![traj.t[idx], traj.t[idx + 1]],
        vec![traj.states[idx].as_array(), traj.states[idx + 1].as_array()],
        vec![va, vb],
    )?;
    let state_p = seg.eval(period)?;

    let y0 = seed.as_array();
    let mut closure_sq = 0.0;
    for i in 0..4 {
        let d = state_p[i] - y0[i];
        closure_sq += d * d;
    }
    let drift = 0.5 * (state_p[2] + state_p[3]) - 0.5 * (y0[2] + y0[3]);

    let mut lo = y0;
    let mut hi = y0;
    for (k, st) in traj.states.iter().enumerate() {
        if traj.t[k] > period {
            break;
        }
        let y = st.as_array();
        for i in 0..4 {
            lo[i] = lo[i].min(y[i]);
            hi[i] = hi[i].max(y[i]);
        }
    }
    let spans = [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2], hi[3] - lo[3]];

    Ok((
        OrbitDiagnostics {
            period,
            closure: closure_sq.sqrt(),
            drift,
            spans,
        },
        traj,
    ))
}

/// Locate the s₁-crossing time inside one Hermite segment by bisection.
fn refine_crossing(
    seg: &CubicHermite<4>,
    t_lo: f64,
    t_hi: f64,
    s1_ref: f64,
    upward: bool,
) -> Result<f64> {
    let f = |t: f64| -> Result<f64> {
        let v = seg.eval(t)?[0] - s1_ref;
        Ok(if upward { v } else { -v })
    };
    let mut a = t_lo;
    let mut b = t_hi;
    let fa = f(a)?;
    if fa > 0.0 {
        // The left node already sits past the reference (it was ≤ 0 on the
        // raw samples, so this can only be roundoff); keep the node time.
        return Ok(a);
    }
    for _ in 0..80 {
        let mid = 0.5 * (a + b);
        if f(mid)? <= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Initial ring state on a closed orbit of the full interaction field at
/// amplitude μ.
///
/// The seed holds `s₁(0) = ŝ₁`, `s₂(0) = ŝ₂`, `x₁(0) = ξ̂ + μ` fixed and
/// bisects the sway `x₂(0) − ξ̂` inside the window `±|μ|/2` about the ring
/// plane (which keeps the relative offset x₁ − x₂ bounded away from the
/// degenerate pure-translation seed) until the integrated trial orbit closes
/// on itself within [`ORBIT_CLOSURE_TOL`] after one measured period. The
/// bisection scalar is the net drift of the mean axial position per period.
///
/// Closed orbits only exist when the exact reduced linearization at the
/// equilibrium is elliptic; at a hyperbolic equilibrium every nearby trial
/// orbit diverges, and the search reports the measured growth rate instead.
pub fn center_manifold_seed(
    config: &EquilibriumConfig,
    params: &ModelParams,
    mu: f64,
) -> Result<RingPairState> {
    if !mu.is_finite() || mu.abs() > config.eps_star {
        return Err(RingError::Domain(format!(
            "oscillation amplitude {} exceeds the safe bound ε* = {:.6e} of the {} configuration",
            mu, config.eps_star, config.type_tag
        )));
    }
    if mu == 0.0 {
        return Ok(config.state());
    }
    let quad = QuadratureSpec::default();
    let lin = pair_linearization_quad(config, params, &quad)?;
    if let Some(growth) = lin.growth_rate() {
        return Err(RingError::Convergence {
            what: format!(
                "center-manifold seed for the {} configuration: the ring-pair equilibrium \
                 is linearly hyperbolic (growth rate {growth:.6}), so trial ring orbits \
                 diverge instead of closing and no nearby closed orbit exists",
                config.type_tag
            ),
            iterations: 0,
            residual: growth,
        });
    }
    let half_window = 0.5 * mu.abs();
    let seed_with = |sway: f64| RingPairState {
        s1: config.s1_hat,
        s2: config.s2_hat,
        x1: config.xi_hat + mu,
        x2: config.xi_hat + sway,
    };

    let mut lo = -half_window;
    let mut hi = half_window;
    let (diag_lo, _) = orbit_trial(&seed_with(lo), config, params, &quad)?;
    if diag_lo.closure < ORBIT_CLOSURE_TOL {
        return Ok(seed_with(lo));
    }
    let (diag_hi, _) = orbit_trial(&seed_with(hi), config, params, &quad)?;
    if diag_hi.closure < ORBIT_CLOSURE_TOL {
        return Ok(seed_with(hi));
    }
    let mut f_lo = diag_lo.drift;
    let f_hi = diag_hi.drift;
    if f_lo.signum() == f_hi.signum() {
        return Err(RingError::Convergence {
            what: format!(
                "center-manifold seed: per-period drift does not change sign across the \
                 ±|μ|/2 sway window (drift {f_lo:.3e} .. {f_hi:.3e})"
            ),
            iterations: 2,
            residual: f_lo.abs().min(f_hi.abs()),
        });
    }

    let mut best_closure = diag_lo.closure.min(diag_hi.closure);
    for it in 0..SEED_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let (diag, _) = orbit_trial(&seed_with(mid), config, params, &quad)?;
        if diag.closure < ORBIT_CLOSURE_TOL {
            return Ok(seed_with(mid));
        }
        best_closure = best_closure.min(diag.closure);
        if diag.drift.signum() == f_lo.signum() {
            lo = mid;
            f_lo = diag.drift;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mu.abs() {
            return Err(RingError::Convergence {
                what: format!(
                    "center-manifold seed: sway window collapsed after {it} bisections \
                     without orbit closure below {ORBIT_CLOSURE_TOL:.1e}"
                ),
                iterations: it,
                residual: best_closure,
            });
        }
    }
    Err(RingError::Convergence {
        what: format!(
            "center-manifold seed: no orbit closure below {ORBIT_CLOSURE_TOL:.1e} \
             within {SEED_MAX_ITER} bisections"
        ),
        iterations: SEED_MAX_ITER,
        residual: best_closure,
    })
}

/// First-order time-periodic correction `𝓗₁(s, x, t)` to the particle stream
/// function induced by the oscillating ring pair (unit amplitude; the
/// physical correction is μ·𝓗₁).
///
/// With Δ_k = (r − r̂_k)² + (x − ξ̂)² + 4 r r̂_k sin²σ and
/// W_k = r(r − r̂_k) + (x − ξ̂)² + 2 r r̂_k sin²σ,
///
/// ```text
/// 𝓗₁ = 2r Σ_k ς_k (1/r̂_k) ∫ W_k cos2σ Δ_k^{−3/2} dσ · sin νt
///    − 4r (x−ξ̂) Σ_k w_k r̂_k ∫ cos2σ Δ_k^{−3/2} dσ · cos νt
/// ```
///
/// with ς = (−1, +1) and w = (1, κ·A/B). The cos-term vanishes identically
/// in the ring plane x = ξ̂, and `𝓗₁ ≡ 0` on the axis.
pub fn h1_perturbation(
    p: &ParticleState,
    t: f64,
    config: &EquilibriumConfig,
    params: &ModelParams,
) -> Result<f64> {
    if !(p.s.is_finite() && p.x.is_finite()) || p.s < 0.0 {
        return Err(RingError::Domain(format!(
            "particle state (s = {}, x = {}) outside the meridian half-plane",
            p.s, p.x
        )));
    }
    if p.s == 0.0 {
        return Ok(0.0);
    }
    let nu = config.nu()?;
    let ratio = config.amp_ratio()?;
    let quad = QuadratureSpec::default();
    let r = p.s.sqrt();
    let dx = p.x - config.xi_hat;

    let mut sin_sum = 0.0;
    let mut cos_sum = 0.0;
    for (rh, sgn_k, w_k) in [
        (config.r1_hat, -1.0, KAPPA_1),
        (config.r2_hat, 1.0, params.kappa * ratio),
    ] {
        let m = sigma_all_moments(r, rh, dx, &quad)?.three_halves;
        // ∫ W cos2σ Δ^{−3/2} = (r(r−r̂) + dx²)·m1 + r r̂·(m1 − m2),
        // using 2 sin²σ cos2σ = cos2σ − cos²2σ.
        let w_int = (r * (r - rh) + dx * dx) * m.m1 + r * rh * (m.m1 - m.m2);
        sin_sum += sgn_k * w_int / rh;
        cos_sum += w_k * rh * m.m1;
    }
    let (sin_t, cos_t) = (nu * t).sin_cos();
    Ok(2.0 * r * sin_sum * sin_t - 4.0 * r * dx * cos_sum * cos_t)
}

/// Axial stagnation points at one instant of the oscillation.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct StagnationSample {
    pub t: f64,
    pub x_minus: f64,
    pub x_plus: f64,
}

/// Track the two axial stagnation points over `t_grid` as the rings move.
///
/// On the axis the advection balance is closed-form:
/// `ẋ(0, x) = −α + π Σ_k κ_k s_k(t) / (s_k(t) + (x − x_k(t))²)^{3/2}`,
/// and each sample solves that balance on both sides of the ring plane.
/// μ = 0 delegates to the stationary stagnation solve, so the samples agree
/// exactly with the equilibrium values. Integrated mode requires an
/// ascending non-negative grid and advances a single ring trajectory,
/// started from the closed-form state at t = 0, incrementally across it.
pub fn stagnation_trace(
    config: &EquilibriumConfig,
    params: &ModelParams,
    spec: &OscillationSpec,
    t_grid: &[f64],
) -> Result<Vec<StagnationSample>> {
    spec.validate_against(config)?;
    if t_grid.is_empty() {
        return Err(RingError::Domain(
            "stagnation trace needs a non-empty time grid".into(),
        ));
    }
    if spec.mu == 0.0 {
        let st = stagnation_offset(config.r1_hat, config.r2_hat, config.xi_hat, params)?;
        return Ok(t_grid
            .iter()
            .map(|&t| StagnationSample {
                t,
                x_minus: st.x_minus,
                x_plus: st.x_plus,
            })
            .collect());
    }
    match spec.mode {
        OscillationMode::Analytic => t_grid
            .iter()
            .map(|&t| {
                let rings = analytic_ring_state(t, config, spec, params)?;
                stagnation_pair(&rings, config, params, t)
            })
            .collect(),
        OscillationMode::Integrated => {
            let ascending = t_grid.windows(2).all(|w| w[1] > w[0]);
            if !ascending || t_grid[0] < 0.0 {
                return Err(RingError::Domain(
                    "integrated stagnation trace needs a strictly ascending grid of \
                     non-negative times"
                        .into(),
                ));
            }
            let nu = config.nu()?;
            let quad = QuadratureSpec::default();
            let system = RingSystem::with_orientation(*params, config.orientation)?
                .with_quadrature(quad)?;
            let step = oscillation_step(nu);
            // The closed-form state at t = 0 carries the phase offset.
            let mut state = analytic_ring_state(0.0, config, spec, params)?;
            let mut t_prev = 0.0;
            let mut out = Vec::with_capacity(t_grid.len());
            for &t in t_grid {
                state = advance_state(&system, &state, t - t_prev, step)?;
                t_prev = t;
                out.push(stagnation_pair(&state, config, params, t)?);
            }
            Ok(out)
        }
    }
}

/// Advance a ring state by `span ≥ 0` with fixed RK4 substeps of size ≤ `h`.
fn advance_state(
    system: &RingSystem,
    state: &RingPairState,
    span: f64,
    h: f64,
) -> Result<RingPairState> {
    if span == 0.0 {
        return Ok(*state);
    }
    let n = (span / h).ceil().max(1.0) as usize;
    let dt = span / n as f64;
    let mut y = state.as_array();
    let mut f =
        |_t: f64, y: &[f64; 4]| -> Result<[f64; 4]> { system.velocity(&RingPairState::from_array(*y)) };
    let mut t = 0.0;
    for _ in 0..n {
        y = crate::numerics::ode::rk4_step(&mut f, t, &y, dt)?;
        t += dt;
    }
    Ok(RingPairState::from_array(y))
}

/// Axis advection balance `−α + π Σ κ_k s_k/(s_k + (x−x_k)²)^{3/2}` and its
/// x-derivative for instantaneous ring positions.
fn axis_balance(rings: &RingPairState, params: &ModelParams, x: f64) -> (f64, f64) {
    let mut g = -params.alpha;
    let mut dg = 0.0;
    for (sk, xk, kk) in [
        (rings.s1, rings.x1, KAPPA_1),
        (rings.s2, rings.x2, params.kappa),
    ] {
        let dxk = x - xk;
        let den = sk + dxk * dxk;
        let den32 = den * den.sqrt();
        g += PI * kk * sk / den32;
        dg += -3.0 * PI * kk * sk * dxk / (den32 * den);
    }
    (g, dg)
}

/// Solve the axis balance on both sides of the ring plane at one instant.
fn stagnation_pair(
    rings: &RingPairState,
    config: &EquilibriumConfig,
    params: &ModelParams,
    t: f64,
) -> Result<StagnationSample> {
    let center = 0.5 * (rings.x1 + rings.x2);
    let (g_center, _) = axis_balance(rings, params, center);
    if g_center <= 0.0 {
        return Err(RingError::Degenerate(format!(
            "no axial stagnation at t = {t:.6}: axis upwash {g_center:.6e} does not exceed \
             the swirl advection between the rings"
        )));
    }
    let scale = rings.r1().max(rings.r2()).max(config.eta);
    let x_plus = axis_root(rings, params, center, scale, 1.0, t)?;
    let x_minus = axis_root(rings, params, center, scale, -1.0, t)?;
    if !(x_minus < config.xi_hat && config.xi_hat < x_plus) {
        return Err(RingError::Degenerate(format!(
            "axial stagnation points ({x_minus:.6}, {x_plus:.6}) at t = {t:.6} do not straddle \
             the ring plane ξ̂ = {}",
            config.xi_hat
        )));
    }
    Ok(StagnationSample { t, x_minus, x_plus })
}

/// Bracket and solve one axis-balance root on the `side` of `center`.
fn axis_root(
    rings: &RingPairState,
    params: &ModelParams,
    center: f64,
    scale: f64,
    side: f64,
    t: f64,
) -> Result<f64> {
    let g = |x: f64| axis_balance(rings, params, x).0;
    let mut span = scale;
    let mut tries = 0;
    while g(center + side * span) > 0.0 {
        span *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(RingError::Convergence {
                what: format!("axial stagnation bracket at t = {t:.6} (side {side:+})"),
                iterations: tries,
                residual: g(center + side * span).abs(),
            });
        }
    }
    let (lo, hi) = if side > 0.0 {
        (center, center + span)
    } else {
        (center - span, center)
    };
    let seed = crate::numerics::root::bisect(g, lo, hi, 1e-11 * params.alpha.max(1.0))?.x;
    let polished = crate::numerics::root::newton(
        |x| axis_balance(rings, params, x),
        seed,
        1e-13 * params.alpha.max(1.0),
    )?;
    Ok(polished.x)
}
