//! Passive-particle kinematics in the meridian field of a coaxial ring pair.
//!
//! A passive particle at `(s, x)` (s = r² ≥ 0) is advected by the stream
//! function of the two rings plus the ambient swirl: `ṡ = ∂𝓗/∂x`,
//! `ẋ = −∂𝓗/∂s`.  The axis `s = 0` is invariant — the radial rate carries a
//! factor `r`, so axis particles slide along the axis under a closed-form
//! axial speed.  [`particle_velocity`] evaluates the field through the
//! σ-moment quadrature, [`stream_hamiltonian`] evaluates 𝓗 itself through
//! the closed elliptic kernel, and [`advect_particle`] integrates particles
//! against stationary rings ([`RingSource::Fixed`]), an interpolated ring
//! trajectory ([`RingSource::Path`]), or the closed-form ring oscillation
//! ([`RingSource::Oscillation`]) — either in the direct 2-variable
//! formulation or as the full coupled 6-variable system.
//!
//! When the stagnation structure of a stationary pair closes, the invariant
//! manifolds organise the portrait: the upper separatrix joins the leading
//! axis point `(0, x₊)` to the trailing one `(0, x₋)` over the rings, the
//! lower branch runs between them along the axis, and a figure-eight pair of
//! homoclinic loops hangs off the interior stagnation point `(ŝ, ξ̂)`.
//! [`trace_separatrices`] follows all four branches from analytic
//! eigendirection seeds and reports measured decay rates and stream levels;
//! [`streamline_portrait`] assembles seeded streamlines, the separatrices,
//! and the classified stagnation points into one plottable bundle.  At small
//! swirl the recirculation region opens (the branches run off axially
//! instead of reconnecting); the tracers report that as a convergence error
//! and the portrait records it while still returning the streamlines.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::equilibria::{
    classify_fixed_points, swirl_factor, EquilibriumConfig, FixedPoint, FixedPointKind,
};
use crate::error::{Result, RingError};
use crate::numerics::fit::fit_line;
use crate::numerics::interp::CubicHermite;
use crate::numerics::ode::{rk4_integrate, rk4_step, IntegratorSpec, Trajectory};
use crate::numerics::quad::{cos2_half_closed, min_delta, sigma_all_moments, QuadratureSpec};
use crate::numerics::root::bisect;
use crate::oscillation::{ring_motion, OscillationMode, OscillationSpec};
use crate::params::{ModelParams, ParticleState, RingPairState, KAPPA_1};
use crate::ring_dynamics::{RingSystem, RingTrajectory};

/// Squared meridian distance to a ring core below which the field is
/// treated as singular and evaluation stops.
pub const NEAR_CORE_SQ: f64 = 1e-10;

/// Default seed distance from a stagnation point along its eigendirection.
const SEED_OFFSET: f64 = 1e-7;
/// Default reconnection distance: a branch ends when it comes this close
/// (in the `(s, x)` plane) to its target stagnation point.
const RECONNECT_DIST: f64 = 1e-5;
/// Fixed step of the separatrix tracer.
const TRACE_STEP: f64 = 2e-4;
/// Default time budget for one separatrix branch.
const TRACE_MAX_TIME: f64 = 30.0;
/// A homoclinic branch must first leave this ball around the interior
/// stagnation point before its return can end the trace.
const HOMOCLINIC_ARM_DIST: f64 = 1e-2;
/// Minimum sample count for the end-segment decay fit.
const DECAY_FIT_MIN_SAMPLES: usize = 8;

// ---------------------------------------------------------------------------
// Field evaluation
// ---------------------------------------------------------------------------

fn validate_particle(p: &ParticleState) -> Result<()> {
    if !p.s.is_finite() || !p.x.is_finite() {
        return Err(RingError::Domain(format!(
            "particle state must be finite, got (s = {}, x = {})",
            p.s, p.x
        )));
    }
    if p.s < 0.0 {
        return Err(RingError::Domain(format!(
            "squared radial coordinate must be non-negative, got s = {}",
            p.s
        )));
    }
    Ok(())
}

fn ring_terms(rings: &RingPairState, params: &ModelParams) -> [(f64, f64, f64); 2] {
    [
        (rings.s1, rings.x1, KAPPA_1),
        (rings.s2, rings.x2, params.kappa),
    ]
}

fn near_core_check(r: f64, x: f64, rings: &RingPairState, context: &str) -> Result<()> {
    let d = min_delta(r, rings.r1(), x - rings.x1).min(min_delta(r, rings.r2(), x - rings.x2));
    if d < NEAR_CORE_SQ {
        return Err(RingError::Singularity {
            context: format!("{context} at (s = {:.6e}, x = {:.6})", r * r, x),
            min_delta: d,
        });
    }
    Ok(())
}

/// Closed-form axial particle speed on the axis `s = 0`.
fn axis_axial_speed(x: f64, rings: &RingPairState, params: &ModelParams) -> f64 {
    // The swirl profile equals 1 on the axis.
    let mut u = -params.alpha;
    for (sk, xk, kk) in ring_terms(rings, params) {
        let dx = x - xk;
        let q = sk + dx * dx;
        u += PI * kk * sk / (q * q.sqrt());
    }
    u
}

/// Primitive of the swirl profile: `∫₀ˢ (1 + a₁u + a₂u²) du`.
fn swirl_primitive(params: &ModelParams, s: f64) -> f64 {
    s * (1.0 + s * (params.a1 / 2.0 + s * params.a2 / 3.0))
}

/// Meridian velocity `(ṡ, ẋ)` of a passive particle in the field of the
/// given rings.
///
/// On the axis the radial rate vanishes identically and the axial speed
/// takes its closed form; off the axis both components are evaluated
/// through the σ-moment quadrature of the ring kernels.  Evaluation closer
/// to a ring core than [`NEAR_CORE_SQ`] (squared meridian distance) is a
/// singularity error.
pub fn particle_velocity(
    p: &ParticleState,
    rings: &RingPairState,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<[f64; 2]> {
    validate_particle(p)?;
    if p.s == 0.0 {
        return Ok([0.0, axis_axial_speed(p.x, rings, params)]);
    }
    let r = p.r();
    near_core_check(r, p.x, rings, "particle velocity")?;
    let mut s_dot = 0.0;
    let mut x_dot = -params.alpha * swirl_factor(params, p.s);
    for (sk, xk, kk) in ring_terms(rings, params) {
        let rk = sk.sqrt();
        let dx = p.x - xk;
        let m = sigma_all_moments(r, rk, dx, quad)?.three_halves;
        s_dot += 4.0 * r * kk * rk * dx * m.m1;
        x_dot += 2.0 * kk * rk * (rk * m.m0 - r * m.m1);
    }
    Ok([s_dot, x_dot])
}

/// Which Hamiltonian of the particle–ring hierarchy to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamVariant {
    /// Stream function of the particle in the instantaneous ring field.
    Full,
    /// The same stream function with the rings at a stationary pair; the
    /// formula is identical, the variant records the caller's intent and
    /// keeps call sites self-documenting.
    Unperturbed,
    /// Piecewise Hamiltonian of the coupled 6-variable state: the ring-pair
    /// interaction Hamiltonian of `rings` plus the particle stream function.
    Coupled,
}

/// Stream Hamiltonian of a passive particle, in closed elliptic form.
///
/// The particle part is `α F(s) − Σ_k 4 r κ_k r_k ∫₀^{π/2} cos2σ Δ_k^{-1/2} dσ`
/// with `F` the swirl-profile primitive; every term carries the factor `r`,
/// so the axis value is exactly zero.  The [`StreamVariant::Coupled`] form
/// adds the ring-pair interaction Hamiltonian evaluated at `rings`.
pub fn stream_hamiltonian(
    p: &ParticleState,
    rings: &RingPairState,
    params: &ModelParams,
    variant: StreamVariant,
) -> Result<f64> {
    validate_particle(p)?;
    let stream = if p.s == 0.0 {
        0.0
    } else {
        let r = p.r();
        near_core_check(r, p.x, rings, "stream function")?;
        let mut h = params.alpha * swirl_primitive(params, p.s);
        for (sk, xk, kk) in ring_terms(rings, params) {
            let rk = sk.sqrt();
            h -= 4.0 * r * kk * rk * cos2_half_closed(r, rk, p.x - xk)?;
        }
        h
    };
    match variant {
        StreamVariant::Full | StreamVariant::Unperturbed => Ok(stream),
        StreamVariant::Coupled => {
            Ok(stream + crate::ring_dynamics::hamiltonian(rings, params)?)
        }
    }
}

// ---------------------------------------------------------------------------
// Ring sources
// ---------------------------------------------------------------------------

/// A ring trajectory packaged for dense lookup: cubic Hermite interpolation
/// through the stored samples, with node velocities recomputed from the
/// interaction field at the trajectory's frozen orientation.
#[derive(Debug, Clone)]
pub struct RingPath {
    hermite: CubicHermite<4>,
}

impl RingPath {
    /// Build from an integrated ring trajectory.  An aborted trajectory
    /// still yields a path over its stored span.
    pub fn from_trajectory(traj: &RingTrajectory, params: &ModelParams) -> Result<Self> {
        if traj.states.len() < 2 {
            return Err(RingError::Degenerate(format!(
                "a ring path needs at least two stored samples, got {}",
                traj.states.len()
            )));
        }
        let sys = RingSystem::with_orientation(*params, traj.orientation)?;
        let mut y = Vec::with_capacity(traj.states.len());
        let mut dy = Vec::with_capacity(traj.states.len());
        for state in &traj.states {
            y.push(state.as_array());
            dy.push(sys.velocity(state)?);
        }
        Ok(Self {
            hermite: CubicHermite::new(traj.t.clone(), y, dy)?,
        })
    }

    pub fn t_min(&self) -> f64 {
        self.hermite.t_min()
    }

    pub fn t_max(&self) -> f64 {
        self.hermite.t_max()
    }

    /// Interpolated ring state at `t`; a range error outside the stored span.
    pub fn state_at(&self, t: f64) -> Result<RingPairState> {
        Ok(RingPairState::from_array(self.hermite.eval(t)?))
    }
}

/// Where the rings driving an advection come from.
#[derive(Debug, Clone)]
pub enum RingSource<'a> {
    /// Stationary rings.
    Fixed(RingPairState),
    /// A precomputed, interpolated ring trajectory.
    Path(&'a RingPath),
    /// The closed-form small oscillation about a stationary pair.
    Oscillation {
        config: &'a EquilibriumConfig,
        spec: OscillationSpec,
    },
}

impl RingSource<'_> {
    /// Ring state at time `t`.
    pub fn state_at(&self, t: f64, params: &ModelParams) -> Result<RingPairState> {
        match self {
            RingSource::Fixed(state) => Ok(*state),
            RingSource::Path(path) => path.state_at(t),
            RingSource::Oscillation { config, spec } => {
                if spec.mode == OscillationMode::Integrated {
                    return Err(RingError::Domain(
                        "integrated ring motion re-integrates the interaction field from \
                         t = 0 at every lookup and cannot back an advection source; \
                         integrate the rings once and advect against a ring path instead"
                            .into(),
                    ));
                }
                ring_motion(t, config, spec, params)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Advection
// ---------------------------------------------------------------------------

/// Which formulation advects the particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdvectionMode {
    /// Integrate `(s, x)` against the supplied ring motion.
    Direct,
    /// Integrate the full 6-variable system (rings and particle together)
    /// from the source's rings at the initial time; the ring source is only
    /// consulted for that initial state.
    Coupled,
}

/// Why an advection run ended early.
#[derive(Debug)]
pub struct ParticleAbort {
    /// Last time with a good state.
    pub t: f64,
    /// Last good particle state.
    pub state: ParticleState,
    /// The field error that stopped the run.
    pub error: RingError,
}

/// A sampled particle path.  `abort` is `Some` when the field raised an
/// error mid-run (typically a near-core singularity); the samples then end
/// at the last good step.
#[derive(Debug)]
pub struct ParticleTrajectory {
    pub t: Vec<f64>,
    pub states: Vec<ParticleState>,
    pub abort: Option<ParticleAbort>,
}

impl ParticleTrajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last(&self) -> (f64, ParticleState) {
        (*self.t.last().unwrap(), *self.states.last().unwrap())
    }
}

fn particle_from_pair(y: &[f64; 2]) -> ParticleState {
    ParticleState::new(y[0].max(0.0), y[1])
}

fn trajectory_from_direct(traj: Trajectory<2>) -> ParticleTrajectory {
    ParticleTrajectory {
        t: traj.t,
        states: traj.y.iter().map(particle_from_pair).collect(),
        abort: traj.abort.map(|a| ParticleAbort {
            t: a.t,
            state: particle_from_pair(&a.y),
            error: a.error,
        }),
    }
}

/// Advect a passive particle over `t_span` against the given ring source.
///
/// Direct mode integrates the 2-variable field with the rings looked up per
/// evaluation; coupled mode integrates rings and particle as one 6-variable
/// system seeded from the source at the initial time and returns the
/// particle components.  Both describe the same kinematics and agree to
/// integration accuracy when the source path was produced by the same ring
/// field.  A particle seeded on the axis stays on it exactly.  Field
/// singularities do not fail the call: they end the run early and are
/// recorded on the returned trajectory.
pub fn advect_particle(
    p0: &ParticleState,
    mode: AdvectionMode,
    source: &RingSource,
    t_span: (f64, f64),
    spec: &IntegratorSpec,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<ParticleTrajectory> {
    validate_particle(p0)?;
    spec.validate()?;
    let (t0, t1) = t_span;
    if !t0.is_finite() || !t1.is_finite() {
        return Err(RingError::Domain(format!(
            "advection span must be finite, got ({t0}, {t1})"
        )));
    }
    match mode {
        AdvectionMode::Direct => {
            let rhs = |t: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
                let rings = source.state_at(t, params)?;
                particle_velocity(&particle_from_pair(y), &rings, params, quad)
            };
            Ok(trajectory_from_direct(rk4_integrate(
                rhs,
                [p0.s, p0.x],
                t0,
                t1,
                spec,
                1,
            )))
        }
        AdvectionMode::Coupled => {
            let rings0 = source.state_at(t0, params)?;
            let sys =
                RingSystem::from_initial(*params, &rings0).with_quadrature(*quad)?;
            let rhs = |_t: f64, y: &[f64; 6]| -> Result<[f64; 6]> {
                let rings = RingPairState::new(y[0], y[1], y[2], y[3]);
                let rv = sys.velocity(&rings)?;
                let pv = particle_velocity(
                    &ParticleState::new(y[4].max(0.0), y[5]),
                    &rings,
                    params,
                    quad,
                )?;
                Ok([rv[0], rv[1], rv[2], rv[3], pv[0], pv[1]])
            };
            let y0 = [rings0.s1, rings0.s2, rings0.x1, rings0.x2, p0.s, p0.x];
            let traj = rk4_integrate(rhs, y0, t0, t1, spec, 1);
            Ok(ParticleTrajectory {
                t: traj.t,
                states: traj
                    .y
                    .iter()
                    .map(|y| ParticleState::new(y[4].max(0.0), y[5]))
                    .collect(),
                abort: traj.abort.map(|a| ParticleAbort {
                    t: a.t,
                    state: ParticleState::new(a.y[4].max(0.0), a.y[5]),
                    error: a.error,
                }),
            })
        }
    }
}

/// First same-direction return of a fixed-ring streamline to the section
/// `x = ξ̂`.
#[derive(Debug, Clone)]
pub struct OrbitReturn {
    /// Time of the return crossing: the streamline's period.
    pub period: f64,
    /// Interpolated state at the return crossing.
    pub state: ParticleState,
    /// Distance between the return crossing and the seed.
    pub miss: f64,
    /// Smallest squared radial coordinate visited over the period.
    pub s_min: f64,
}

/// Detect a closed fixed-ring streamline through `p0` by its first return
/// to the symmetry section `x = ξ̂` crossing in the same axial direction as
/// the seed's velocity.  A convergence error when no such return happens
/// within `spec.max_time`.
pub fn orbit_return(
    p0: &ParticleState,
    config: &EquilibriumConfig,
    params: &ModelParams,
    quad: &QuadratureSpec,
    spec: &IntegratorSpec,
) -> Result<OrbitReturn> {
    let rings = config.state();
    let dir0 = particle_velocity(p0, &rings, params, quad)?[1];
    if dir0 == 0.0 {
        return Err(RingError::Degenerate(format!(
            "the seed (s = {}, x = {}) has no axial velocity; the section \
             crossing direction is undefined",
            p0.s, p0.x
        )));
    }
    let source = RingSource::Fixed(rings);
    let traj = advect_particle(
        p0,
        AdvectionMode::Direct,
        &source,
        (0.0, spec.max_time),
        spec,
        params,
        quad,
    )?;
    if let Some(abort) = traj.abort {
        return Err(abort.error);
    }
    let xi = config.xi_hat;
    let mut armed = false;
    let mut s_min = p0.s;
    for i in 1..traj.len() {
        s_min = s_min.min(traj.states[i].s);
        let f_prev = traj.states[i - 1].x - xi;
        let f_here = traj.states[i].x - xi;
        if !armed {
            if f_here.abs() > 1e-6 {
                armed = true;
            }
            continue;
        }
        let crossed = (dir0 > 0.0 && f_prev < 0.0 && f_here >= 0.0)
            || (dir0 < 0.0 && f_prev > 0.0 && f_here <= 0.0);
        if crossed {
            let w = f_prev / (f_prev - f_here);
            let t_cross = traj.t[i - 1] + w * (traj.t[i] - traj.t[i - 1]);
            let s_cross = traj.states[i - 1].s + w * (traj.states[i].s - traj.states[i - 1].s);
            let x_cross = traj.states[i - 1].x + w * (traj.states[i].x - traj.states[i - 1].x);
            let state = ParticleState::new(s_cross.max(0.0), x_cross);
            let miss = ((state.s - p0.s).powi(2) + (state.x - p0.x).powi(2)).sqrt();
            return Ok(OrbitReturn {
                period: t_cross,
                state,
                miss,
                s_min: s_min.max(0.0),
            });
        }
    }
    let (t_end, last) = traj.last();
    let residual = ((last.s - p0.s).powi(2) + (last.x - p0.x).powi(2)).sqrt();
    Err(RingError::Convergence {
        what: format!(
            "closed-orbit return to the section x = {xi:.6}: no same-direction \
             crossing within t = {t_end:.3}"
        ),
        iterations: traj.len(),
        residual,
    })
}

// ---------------------------------------------------------------------------
// Separatrix tracing
// ---------------------------------------------------------------------------

/// Which invariant-manifold branch a trace follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparatrixBranch {
    /// Over the rings from `(0, x₊)` to `(0, x₋)`.
    Upper,
    /// Along the axis between the stagnation points.
    Lower,
    /// Homoclinic loop around the outer ring core.
    HomoclinicPlus,
    /// Homoclinic loop around the inner ring core.
    HomoclinicMinus,
}

impl SeparatrixBranch {
    pub const ALL: [SeparatrixBranch; 4] = [
        SeparatrixBranch::Upper,
        SeparatrixBranch::Lower,
        SeparatrixBranch::HomoclinicPlus,
        SeparatrixBranch::HomoclinicMinus,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SeparatrixBranch::Upper => "upper",
            SeparatrixBranch::Lower => "lower",
            SeparatrixBranch::HomoclinicPlus => "homoclinic_plus",
            SeparatrixBranch::HomoclinicMinus => "homoclinic_minus",
        }
    }
}

/// A traced separatrix branch.  Times are centered so that `t = 0` is the
/// crossing of the symmetry section `x = ξ̂`; the stored velocities make the
/// trace densely interpolable through [`SeparatrixTrace::interpolant`].
#[derive(Debug, Clone)]
pub struct SeparatrixTrace {
    pub branch: SeparatrixBranch,
    pub t: Vec<f64>,
    pub states: Vec<ParticleState>,
    /// Field velocities `(ṡ, ẋ)` at the samples.
    pub velocities: Vec<[f64; 2]>,
    /// Positive decay rate ϰ of the end-segment approach to the target
    /// stagnation point, from a log-linear fit.
    pub decay_rate: f64,
    /// Coefficient of determination of that fit.
    pub decay_r_squared: f64,
    /// Mean stream level along the trace.
    pub level: f64,
    /// Max − min of the stream level along the trace.
    pub level_spread: f64,
}

impl SeparatrixTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Cubic Hermite interpolant of the trace in centered time.
    pub fn interpolant(&self) -> Result<CubicHermite<2>> {
        CubicHermite::new(
            self.t.clone(),
            self.states.iter().map(|p| p.as_array()).collect(),
            self.velocities.clone(),
        )
    }
}

/// Tunable knobs of the separatrix tracer.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TraceSettings {
    /// Seed distance from the stagnation point along its eigendirection.
    pub offset: f64,
    /// Fixed integrator step.
    pub step: f64,
    /// Time budget per branch.
    pub max_time: f64,
    /// Reconnection distance ending the trace.
    pub stop_dist: f64,
}

impl Default for TraceSettings {
    fn default() -> Self {
        Self {
            offset: SEED_OFFSET,
            step: TRACE_STEP,
            max_time: TRACE_MAX_TIME,
            stop_dist: RECONNECT_DIST,
        }
    }
}

impl TraceSettings {
    /// Per-branch defaults.  The homoclinic loops pass close to a ring
    /// core, where the field's curvature makes fixed-step level drift the
    /// accuracy limit: an off-level trace misses the reconnection ball by
    /// `√(2 δ𝓗/|𝓗''|)`, so those branches run at a finer step.
    pub(crate) fn for_branch(branch: SeparatrixBranch) -> Self {
        let step = match branch {
            SeparatrixBranch::Upper | SeparatrixBranch::Lower => TRACE_STEP,
            SeparatrixBranch::HomoclinicPlus | SeparatrixBranch::HomoclinicMinus => 5e-5,
        };
        Self {
            step,
            ..Self::default()
        }
    }
}

struct RawTrace {
    t: Vec<f64>,
    states: Vec<ParticleState>,
    velocities: Vec<[f64; 2]>,
}

struct BranchSetup {
    seed: ParticleState,
    target: ParticleState,
    arm_dist: f64,
}

fn branch_setup(
    branch: SeparatrixBranch,
    config: &EquilibriumConfig,
    params: &ModelParams,
    quad: &QuadratureSpec,
    offset: f64,
) -> Result<BranchSetup> {
    let fixed = classify_fixed_points(config, params, quad)?;
    let find = |kind: FixedPointKind, x: f64| -> Result<FixedPoint> {
        fixed
            .iter()
            .find(|fp| fp.kind == kind && (fp.x - x).abs() <= 1e-12 * (1.0 + x.abs()))
            .cloned()
            .ok_or_else(|| {
                RingError::Degenerate(format!(
                    "no classified stagnation point of kind {kind:?} at x = {x}"
                ))
            })
    };
    match branch {
        SeparatrixBranch::Upper => {
            let plus = find(FixedPointKind::AxisSaddle, config.x_plus)?;
            let slope = plus.tangent_slope.ok_or_else(|| {
                RingError::Degenerate("the leading axis point has no off-axis tangent".into())
            })?;
            // Point the eigendirection (slope, 1) in (s, x) into s > 0.
            let norm = slope.hypot(1.0);
            let (ds, dx) = if slope >= 0.0 {
                (slope / norm, 1.0 / norm)
            } else {
                (-slope / norm, -1.0 / norm)
            };
            Ok(BranchSetup {
                seed: ParticleState::new(offset * ds, config.x_plus + offset * dx),
                target: ParticleState::new(0.0, config.x_minus),
                arm_dist: 0.0,
            })
        }
        SeparatrixBranch::Lower => {
            // Seed just inside the axis segment, on the upstream side of
            // the axial flow between the stagnation points.
            let axis_flow = axis_axial_speed(config.xi_hat, &config.state(), params);
            if axis_flow == 0.0 {
                return Err(RingError::Degenerate(
                    "the axial flow vanishes at the ring plane; the lower branch \
                     direction is undefined"
                        .into(),
                ));
            }
            let (from, to) = if axis_flow > 0.0 {
                (config.x_minus, config.x_plus)
            } else {
                (config.x_plus, config.x_minus)
            };
            let dir = (to - from).signum();
            Ok(BranchSetup {
                seed: ParticleState::new(0.0, from + offset * dir),
                target: ParticleState::new(0.0, to),
                arm_dist: 0.0,
            })
        }
        SeparatrixBranch::HomoclinicPlus | SeparatrixBranch::HomoclinicMinus => {
            let interior = find(FixedPointKind::InteriorSaddle, config.xi_hat)?;
            let m = interior.tangent_slope.ok_or_else(|| {
                RingError::Degenerate(
                    "the interior stagnation point is elliptic: no homoclinic loop \
                     hangs off it"
                        .into(),
                )
            })?;
            let norm = m.hypot(1.0);
            let sign = if branch == SeparatrixBranch::HomoclinicPlus {
                1.0
            } else {
                -1.0
            };
            Ok(BranchSetup {
                seed: ParticleState::new(
                    config.s_hat + sign * offset * m / norm,
                    config.xi_hat + sign * offset / norm,
                ),
                target: ParticleState::new(config.s_hat, config.xi_hat),
                arm_dist: HOMOCLINIC_ARM_DIST,
            })
        }
    }
}

fn trace_raw(
    branch: SeparatrixBranch,
    setup: &BranchSetup,
    config: &EquilibriumConfig,
    params: &ModelParams,
    quad: &QuadratureSpec,
    settings: &TraceSettings,
) -> Result<RawTrace> {
    let rings = config.state();
    let escape_halfwidth = 1.5 * (config.x_plus - config.xi_hat) + config.eta;
    let mut rhs = |_t: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
        particle_velocity(&particle_from_pair(y), &rings, params, quad)
    };
    let n_max = (settings.max_time / settings.step).ceil() as usize;
    let mut raw = RawTrace {
        t: Vec::with_capacity(n_max / 4),
        states: Vec::with_capacity(n_max / 4),
        velocities: Vec::with_capacity(n_max / 4),
    };
    let mut y = [setup.seed.s, setup.seed.x];
    let mut armed = setup.arm_dist == 0.0;
    for k in 0..=n_max {
        let t = k as f64 * settings.step;
        let p = particle_from_pair(&y);
        let v = rhs(t, &y)?;
        raw.t.push(t);
        raw.states.push(p);
        raw.velocities.push(v);
        let dist = (p.s - setup.target.s).hypot(p.x - setup.target.x);
        if armed {
            if dist <= settings.stop_dist {
                return Ok(raw);
            }
        } else if dist > setup.arm_dist {
            armed = true;
        }
        if (p.x - config.xi_hat).abs() > escape_halfwidth {
            return Err(RingError::Convergence {
                what: format!(
                    "{} separatrix branch: the trace escapes axially \
                     (|x − ξ̂| > {escape_halfwidth:.4}) instead of reconnecting; \
                     the recirculation region is open",
                    branch.as_str()
                ),
                iterations: k,
                residual: dist,
            });
        }
        y = rk4_step(&mut rhs, t, &y, settings.step)?;
    }
    let last = raw.states.last().unwrap();
    let dist = (last.s - setup.target.s).hypot(last.x - setup.target.x);
    Err(RingError::Convergence {
        what: format!(
            "{} separatrix branch: no reconnection to (s = {:.6}, x = {:.6}) \
             within t = {}",
            branch.as_str(),
            setup.target.s,
            setup.target.x,
            settings.max_time
        ),
        iterations: n_max,
        residual: dist,
    })
}

/// Locate the crossing of `x = ξ̂` and return the crossing time in raw
/// trace time.  The first stored sign change is the crossing: every branch
/// reaches the section exactly once away from its seed.
fn section_crossing_time(raw: &RawTrace, xi: f64) -> Result<f64> {
    for i in 1..raw.t.len() {
        let f_prev = raw.states[i - 1].x - xi;
        let f_here = raw.states[i].x - xi;
        if f_prev == 0.0 {
            continue;
        }
        if f_prev.signum() != f_here.signum() {
            let local = CubicHermite::new(
                vec![raw.t[i - 1], raw.t[i]],
                vec![raw.states[i - 1].as_array(), raw.states[i].as_array()],
                vec![raw.velocities[i - 1], raw.velocities[i]],
            )?;
            let root = bisect(
                |t| local.eval(t).map_or(f64::NAN, |y| y[1] - xi),
                raw.t[i - 1],
                raw.t[i],
                1e-14,
            )?;
            return Ok(root.x);
        }
    }
    Err(RingError::Degenerate(
        "the traced branch never crosses the symmetry section x = ξ̂".into(),
    ))
}

fn decay_fit(
    raw: &RawTrace,
    t_center: f64,
    target: &ParticleState,
    eta: f64,
    stop_dist: f64,
) -> Result<(f64, f64)> {
    let lo = 3.0 * stop_dist;
    let hi = 0.02 * eta;
    let mut ts = Vec::new();
    let mut lnd = Vec::new();
    for i in 0..raw.t.len() {
        let t = raw.t[i] - t_center;
        if t <= 0.0 {
            continue;
        }
        let d = (raw.states[i].s - target.s).hypot(raw.states[i].x - target.x);
        if d >= lo && d <= hi {
            ts.push(t);
            lnd.push(d.ln());
        }
    }
    if ts.len() < DECAY_FIT_MIN_SAMPLES {
        return Err(RingError::Degenerate(format!(
            "decay window [{lo:.3e}, {hi:.3e}] holds only {} samples; cannot \
             fit the approach rate",
            ts.len()
        )));
    }
    let fit = fit_line(&ts, &lnd)?;
    Ok((-fit.slope, fit.r_squared))
}

fn assemble_trace(
    branch: SeparatrixBranch,
    raw: RawTrace,
    setup: &BranchSetup,
    config: &EquilibriumConfig,
    params: &ModelParams,
    settings: &TraceSettings,
) -> Result<SeparatrixTrace> {
    let t_center = section_crossing_time(&raw, config.xi_hat)?;
    let (decay_rate, decay_r_squared) =
        decay_fit(&raw, t_center, &setup.target, config.eta, settings.stop_dist)?;

    // Stream level along the trace, sampled sparsely.
    let rings = config.state();
    let mut level_min = f64::INFINITY;
    let mut level_max = f64::NEG_INFINITY;
    let mut level_sum = 0.0;
    let mut level_n = 0usize;
    let stride = (raw.t.len() / 400).max(1);
    let mut i = 0;
    while i < raw.t.len() {
        let h = stream_hamiltonian(&raw.states[i], &rings, params, StreamVariant::Unperturbed)?;
        level_min = level_min.min(h);
        level_max = level_max.max(h);
        level_sum += h;
        level_n += 1;
        i += stride;
    }

    Ok(SeparatrixTrace {
        branch,
        t: raw.t.iter().map(|t| t - t_center).collect(),
        states: raw.states,
        velocities: raw.velocities,
        decay_rate,
        decay_r_squared,
        level: level_sum / level_n as f64,
        level_spread: level_max - level_min,
    })
}

pub(crate) fn trace_separatrix_with(
    branch: SeparatrixBranch,
    config: &EquilibriumConfig,
    params: &ModelParams,
    quad: &QuadratureSpec,
    settings: &TraceSettings,
) -> Result<SeparatrixTrace> {
    let setup = branch_setup(branch, config, params, quad, settings.offset)?;
    let raw = trace_raw(branch, &setup, config, params, quad, settings)?;
    assemble_trace(branch, raw, &setup, config, params, settings)
}

/// Trace one separatrix branch of a stationary pair from its analytic
/// eigendirection seed until it reconnects to its target stagnation point.
///
/// A branch that escapes axially (open recirculation region) or exhausts
/// its time budget is a convergence error naming the branch.
pub fn trace_separatrix(
    branch: SeparatrixBranch,
    config: &EquilibriumConfig,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<SeparatrixTrace> {
    trace_separatrix_with(branch, config, params, quad, &TraceSettings::for_branch(branch))
}

/// Trace all four separatrix branches, sequentially, in the order
/// [`SeparatrixBranch::ALL`].
pub fn trace_separatrices(
    config: &EquilibriumConfig,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<Vec<SeparatrixTrace>> {
    SeparatrixBranch::ALL
        .iter()
        .map(|b| trace_separatrix(*b, config, params, quad))
        .collect()
}

// ---------------------------------------------------------------------------
// Streamline portraits
// ---------------------------------------------------------------------------

/// Seed grid and integration knobs of a streamline portrait.
#[derive(Debug, Clone, Copy)]
pub struct PortraitGrid {
    /// Seed counts along x and s.
    pub nx: usize,
    pub ns: usize,
    /// Axial span; defaults to `[x₋ − η, x₊ + η]`.
    pub x_span: Option<(f64, f64)>,
    /// Squared-radius span; defaults to `[0, 4 ŝ₂]`.
    pub s_span: Option<(f64, f64)>,
    /// Integrator step.
    pub step: f64,
    /// Advection horizon per seed.
    pub horizon: f64,
    /// Keep every n-th sample of each streamline.
    pub store_every: usize,
}

impl Default for PortraitGrid {
    fn default() -> Self {
        Self {
            nx: 20,
            ns: 20,
            x_span: None,
            s_span: None,
            step: 1e-3,
            horizon: 6.0,
            store_every: 10,
        }
    }
}

/// One seeded fixed-ring streamline.  `abort` records a singular or failed
/// run; its samples still hold whatever was integrated.
#[derive(Debug)]
pub struct Streamline {
    pub seed: ParticleState,
    pub t: Vec<f64>,
    pub states: Vec<ParticleState>,
    pub abort: Option<String>,
}

/// Everything needed to plot the meridian flow of a stationary pair.
#[derive(Debug)]
pub struct PortraitBundle {
    pub streamlines: Vec<Streamline>,
    /// Successfully traced separatrix branches.
    pub separatrices: Vec<SeparatrixTrace>,
    /// Messages from branches that failed to reconnect (open recirculation
    /// region, exhausted budget); empty when all four closed.
    pub separatrix_errors: Vec<String>,
    /// Classified stagnation points of the particle flow.
    pub fixed_points: Vec<FixedPoint>,
}

/// Build a streamline portrait of a stationary pair: a grid of fixed-ring
/// streamlines (advected concurrently), the four separatrix branches
/// (traced sequentially, failures recorded rather than fatal), and the
/// classified stagnation points.
pub fn streamline_portrait(
    config: &EquilibriumConfig,
    params: &ModelParams,
    quad: &QuadratureSpec,
    grid: &PortraitGrid,
) -> Result<PortraitBundle> {
    if grid.nx < 2 || grid.ns < 2 {
        return Err(RingError::Domain(format!(
            "portrait grid needs at least 2 seeds per direction, got {} x {}",
            grid.nx, grid.ns
        )));
    }
    if !(grid.horizon.is_finite() && grid.horizon > 0.0) {
        return Err(RingError::Domain(format!(
            "portrait horizon must be positive and finite, got {}",
            grid.horizon
        )));
    }
    let (x_lo, x_hi) = grid
        .x_span
        .unwrap_or((config.x_minus - config.eta, config.x_plus + config.eta));
    let (s_lo, s_hi) = grid.s_span.unwrap_or((0.0, 4.0 * config.s2_hat));
    if !(x_lo < x_hi) || !(s_lo < s_hi) || s_lo < 0.0 {
        return Err(RingError::Domain(format!(
            "portrait spans must be ordered and s non-negative, got \
             x in [{x_lo}, {x_hi}], s in [{s_lo}, {s_hi}]"
        )));
    }
    let spec = IntegratorSpec {
        step: grid.step,
        max_time: grid.horizon,
    };
    spec.validate()?;

    let mut seeds = Vec::with_capacity(grid.nx * grid.ns);
    for is in 0..grid.ns {
        let s = s_lo + (s_hi - s_lo) * is as f64 / (grid.ns - 1) as f64;
        for ix in 0..grid.nx {
            let x = x_lo + (x_hi - x_lo) * ix as f64 / (grid.nx - 1) as f64;
            seeds.push(ParticleState::new(s, x));
        }
    }

    let rings = config.state();
    let stride = grid.store_every.max(1);
    let streamlines: Vec<Streamline> = seeds
        .par_iter()
        .map(|p0| {
            match advect_particle(
                p0,
                AdvectionMode::Direct,
                &RingSource::Fixed(rings),
                (0.0, grid.horizon),
                &spec,
                params,
                quad,
            ) {
                Ok(traj) => {
                    let n = traj.len();
                    let keep: Vec<usize> = (0..n)
                        .filter(|i| i % stride == 0 || *i == n - 1)
                        .collect();
                    Streamline {
                        seed: *p0,
                        t: keep.iter().map(|&i| traj.t[i]).collect(),
                        states: keep.iter().map(|&i| traj.states[i]).collect(),
                        abort: traj.abort.map(|a| a.error.to_string()),
                    }
                }
                Err(err) => Streamline {
                    seed: *p0,
                    t: Vec::new(),
                    states: Vec::new(),
                    abort: Some(err.to_string()),
                },
            }
        })
        .collect();

    let mut separatrices = Vec::new();
    let mut separatrix_errors = Vec::new();
    for branch in SeparatrixBranch::ALL {
        match trace_separatrix(branch, config, params, quad) {
            Ok(trace) => separatrices.push(trace),
            Err(err) => separatrix_errors.push(err.to_string()),
        }
    }

    Ok(PortraitBundle {
        streamlines,
        separatrices,
        separatrix_errors,
        fixed_points: classify_fixed_points(config, params, quad)?,
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::resolve_equilibrium;
    use crate::params::EquilibriumType;
    use crate::ring_dynamics::integrate_rings;

    fn type_i_alpha5() -> (ModelParams, EquilibriumConfig) {
        let params = ModelParams::new(5.0, 1.5).unwrap();
        let config = resolve_equilibrium(
            &params,
            EquilibriumType::I,
            0.0,
            &QuadratureSpec::default(),
        )
        .unwrap();
        (params, config)
    }

    #[test]
    fn velocity_probe_matches_the_moment_kernels() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let v = particle_velocity(
            &ParticleState::new(0.5, 0.2),
            &config.state(),
            &params,
            &quad,
        )
        .unwrap();
        assert!(
            (v[0] / 4.30378517330988 - 1.0).abs() < 1e-9,
            "radial rate {}",
            v[0]
        );
        assert!(
            (v[1] / 0.930805979147019 - 1.0).abs() < 1e-9,
            "axial rate {}",
            v[1]
        );
    }

    #[test]
    fn axis_velocity_takes_the_closed_form() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let rings = config.state();
        let v = particle_velocity(&ParticleState::new(0.0, 0.3), &rings, &params, &quad).unwrap();
        assert_eq!(v[0], 0.0);
        assert!(
            (v[1] / 2.47707602549787 - 1.0).abs() < 1e-10,
            "axis speed {}",
            v[1]
        );
        // Both axis stagnation points are stationary.
        for x in [config.x_plus, config.x_minus] {
            let v = particle_velocity(&ParticleState::new(0.0, x), &rings, &params, &quad)
                .unwrap();
            assert_eq!(v[0], 0.0);
            assert!(v[1].abs() < 1e-8, "residual axis speed {} at x = {x}", v[1]);
        }
    }

    #[test]
    fn fixed_ring_field_has_mirror_parity() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let rings = config.state();
        let xi = config.xi_hat;
        for (s, x) in [(0.3, 0.1), (0.8, 0.25), (1.4, 0.4), (0.05, 0.02), (2.3, 0.6)] {
            let here =
                particle_velocity(&ParticleState::new(s, xi + x), &rings, &params, &quad)
                    .unwrap();
            let mirrored =
                particle_velocity(&ParticleState::new(s, xi - x), &rings, &params, &quad)
                    .unwrap();
            assert!(
                (here[0] + mirrored[0]).abs() <= 1e-12 * here[0].abs().max(1e-12),
                "radial rate not odd at (s, x) = ({s}, {x})"
            );
            assert!(
                (here[1] - mirrored[1]).abs() <= 1e-12 * here[1].abs().max(1e-12),
                "axial rate not even at (s, x) = ({s}, {x})"
            );
        }
    }

    #[test]
    fn invalid_states_are_rejected() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let rings = config.state();
        assert!(matches!(
            particle_velocity(&ParticleState::new(-0.1, 0.0), &rings, &params, &quad),
            Err(RingError::Domain(_))
        ));
        assert!(matches!(
            particle_velocity(&ParticleState::new(f64::NAN, 0.0), &rings, &params, &quad),
            Err(RingError::Domain(_))
        ));
        // A state within the near-core exclusion of the outer ring.
        let r_near = config.r2_hat + 1e-6;
        let near = ParticleState::new(r_near * r_near, config.xi_hat);
        assert!(matches!(
            particle_velocity(&near, &rings, &params, &quad),
            Err(RingError::Singularity { .. })
        ));
        assert!(matches!(
            stream_hamiltonian(&near, &rings, &params, StreamVariant::Full),
            Err(RingError::Singularity { .. })
        ));
    }

    #[test]
    fn stream_probe_matches_and_vanishes_on_the_axis() {
        let (params, config) = type_i_alpha5();
        let rings = config.state();
        let h = stream_hamiltonian(
            &ParticleState::new(0.5, 0.2),
            &rings,
            &params,
            StreamVariant::Unperturbed,
        )
        .unwrap();
        assert!(
            (h / -0.421427275793207 - 1.0).abs() < 1e-9,
            "stream level {h}"
        );
        for x in [-0.7, 0.0, 0.3, config.x_plus] {
            let h0 = stream_hamiltonian(
                &ParticleState::new(0.0, x),
                &rings,
                &params,
                StreamVariant::Full,
            )
            .unwrap();
            assert_eq!(h0, 0.0, "axis stream level at x = {x}");
        }
    }

    #[test]
    fn coupled_variant_adds_the_ring_pair_hamiltonian() {
        let (params, config) = type_i_alpha5();
        let mut rings = config.state();
        rings.s1 *= 1.03;
        rings.x2 += 0.01;
        let p = ParticleState::new(0.4, 0.15);
        let full = stream_hamiltonian(&p, &rings, &params, StreamVariant::Full).unwrap();
        let coupled = stream_hamiltonian(&p, &rings, &params, StreamVariant::Coupled).unwrap();
        let pair = crate::ring_dynamics::hamiltonian(&rings, &params).unwrap();
        assert!(
            ((coupled - full) - pair).abs() <= 1e-12 * pair.abs(),
            "coupled − full = {}, pair = {pair}",
            coupled - full
        );
    }

    #[test]
    fn stream_level_is_conserved_along_a_streamline() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let rings = config.state();
        let spec = IntegratorSpec {
            step: 2e-4,
            max_time: 5.0,
        };
        let traj = advect_particle(
            &ParticleState::new(0.5, 0.2),
            AdvectionMode::Direct,
            &RingSource::Fixed(rings),
            (0.0, 5.0),
            &spec,
            &params,
            &quad,
        )
        .unwrap();
        assert!(traj.abort.is_none());
        let h0 = stream_hamiltonian(&traj.states[0], &rings, &params, StreamVariant::Unperturbed)
            .unwrap();
        let mut worst = 0.0f64;
        for i in (0..traj.len()).step_by(100) {
            let h = stream_hamiltonian(
                &traj.states[i],
                &rings,
                &params,
                StreamVariant::Unperturbed,
            )
            .unwrap();
            worst = worst.max((h - h0).abs());
        }
        assert!(
            worst <= 1e-7 * h0.abs(),
            "stream drift {worst} on level {h0}"
        );
    }

    #[test]
    fn advection_matches_the_reference_point() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let spec = IntegratorSpec {
            step: 2e-4,
            max_time: 1.0,
        };
        let traj = advect_particle(
            &ParticleState::new(0.5, 0.2),
            AdvectionMode::Direct,
            &RingSource::Fixed(config.state()),
            (0.0, 1.0),
            &spec,
            &params,
            &quad,
        )
        .unwrap();
        let (t_end, end) = traj.last();
        assert_eq!(t_end, 1.0);
        assert!(
            (end.s - 0.144102627673).abs() < 1e-7,
            "s(1) = {}",
            end.s
        );
        assert!(
            (end.x - 0.138019074895).abs() < 1e-7,
            "x(1) = {}",
            end.x
        );
    }

    #[test]
    fn axis_seeds_stay_on_the_axis_exactly() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let spec = IntegratorSpec {
            step: 1e-3,
            max_time: 1.0,
        };
        let traj = advect_particle(
            &ParticleState::new(0.0, 0.1),
            AdvectionMode::Direct,
            &RingSource::Fixed(config.state()),
            (0.0, 1.0),
            &spec,
            &params,
            &quad,
        )
        .unwrap();
        assert!(traj.abort.is_none());
        for p in &traj.states {
            assert_eq!(p.s, 0.0);
        }
        let (_, end) = traj.last();
        assert!((end.x - 0.1).abs() > 1e-3, "axis particle never moved");
    }

    #[test]
    fn ring_path_reproduces_the_ring_trajectory() {
        let (params, config) = type_i_alpha5();
        let mut state0 = config.state();
        state0.s1 *= 1.02;
        state0.s2 *= 0.99;
        let spec = IntegratorSpec {
            step: 1e-3,
            max_time: 1.0,
        };
        let coarse = RingSystem::from_initial(params, &state0)
            .integrate(&state0, (0.0, 1.0), &spec, 5)
            .unwrap();
        let dense = integrate_rings(&state0, &params, (0.0, 1.0), &spec).unwrap();
        let path = RingPath::from_trajectory(&coarse, &params).unwrap();
        let mut worst = 0.0f64;
        for (i, &t) in dense.t.iter().enumerate() {
            let interp = path.state_at(t).unwrap().as_array();
            let exact = dense.states[i].as_array();
            for j in 0..4 {
                worst = worst.max((interp[j] - exact[j]).abs());
            }
        }
        assert!(worst < 1e-8, "interpolation error {worst}");
        assert!(path.state_at(1.5).is_err(), "no range guard on the path");
    }

    #[test]
    fn oscillation_source_is_closed_form_only() {
        let (params, config) = type_i_alpha5();
        let analytic = RingSource::Oscillation {
            config: &config,
            spec: OscillationSpec::analytic(1e-3),
        };
        let direct = ring_motion(0.3, &config, &OscillationSpec::analytic(1e-3), &params)
            .unwrap();
        let looked_up = analytic.state_at(0.3, &params).unwrap();
        assert_eq!(looked_up.as_array(), direct.as_array());

        let integrated = RingSource::Oscillation {
            config: &config,
            spec: OscillationSpec {
                mu: 1e-3,
                mode: OscillationMode::Integrated,
                phase: 0.0,
            },
        };
        assert!(matches!(
            integrated.state_at(0.3, &params),
            Err(RingError::Domain(_))
        ));
    }

    #[test]
    fn coupled_and_direct_advection_agree() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let mut rings0 = config.state();
        rings0.s1 *= 1.02;
        rings0.x2 -= 0.005;
        let spec = IntegratorSpec {
            step: 5e-4,
            max_time: 5.0,
        };
        let ring_traj = integrate_rings(&rings0, &params, (0.0, 5.0), &spec).unwrap();
        assert!(ring_traj.abort.is_none());
        let path = RingPath::from_trajectory(&ring_traj, &params).unwrap();
        let p0 = ParticleState::new(0.5, 0.2);
        let direct = advect_particle(
            &p0,
            AdvectionMode::Direct,
            &RingSource::Path(&path),
            (0.0, 5.0),
            &spec,
            &params,
            &quad,
        )
        .unwrap();
        let coupled = advect_particle(
            &p0,
            AdvectionMode::Coupled,
            &RingSource::Fixed(rings0),
            (0.0, 5.0),
            &spec,
            &params,
            &quad,
        )
        .unwrap();
        assert!(direct.abort.is_none() && coupled.abort.is_none());
        assert_eq!(direct.len(), coupled.len());
        let mut worst = 0.0f64;
        for i in (0..direct.len()).step_by(50) {
            worst = worst.max((direct.states[i].s - coupled.states[i].s).abs());
            worst = worst.max((direct.states[i].x - coupled.states[i].x).abs());
        }
        assert!(worst < 1e-6, "direct/coupled split {worst}");
    }

    #[test]
    fn closed_orbit_returns_to_its_seed() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let spec = IntegratorSpec {
            step: 1e-3,
            max_time: 5.0,
        };
        let ret = orbit_return(
            &ParticleState::new(0.6, 0.0),
            &config,
            &params,
            &quad,
            &spec,
        )
        .unwrap();
        assert!(ret.miss < 1e-4, "return miss {}", ret.miss);
        assert!(
            ret.period > 0.1 && ret.period < 5.0,
            "period {}",
            ret.period
        );
    }

    #[test]
    fn circulating_orbit_encloses_the_figure_eight() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let spec = IntegratorSpec {
            step: 2e-4,
            max_time: 8.0,
        };
        let ret = orbit_return(
            &ParticleState::new(1.25, 0.0),
            &config,
            &params,
            &quad,
            &spec,
        )
        .unwrap();
        assert!(ret.miss < 1e-4, "return miss {}", ret.miss);
        // Enclosing both homoclinic lobes forces the orbit below the lower
        // loop's section crossing on the way around.
        assert!(
            ret.s_min > 0.0 && ret.s_min < 0.0314762110142,
            "minimum squared radius {}",
            ret.s_min
        );
    }

    #[test]
    fn upper_separatrix_reconnects_with_the_frozen_profile() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let trace =
            trace_separatrix(SeparatrixBranch::Upper, &config, &params, &quad).unwrap();
        let curve = trace.interpolant().unwrap();

        // Apex: the section crossing lands on the zero level set of the
        // stream function above the rings.
        let apex = curve.eval(0.0).unwrap()[0];
        assert!(
            (apex / 1.27407491013 - 1.0).abs() < 1e-6,
            "apex squared radius {apex}"
        );

        // Trailing-side profile one time unit past the apex.
        let at_one = curve.eval(1.0).unwrap();
        assert!(
            (at_one[0] / 3.2711841541e-5 - 1.0).abs() < 1e-4,
            "s_u(1) = {}",
            at_one[0]
        );
        assert!(
            (at_one[1] + 0.452181827199).abs() < 1e-7,
            "x_u(1) = {}",
            at_one[1]
        );

        // Mirror symmetry of the centered trace.
        for t in [0.25, 0.5, 1.0] {
            let fwd = curve.eval(t).unwrap()[0];
            let bwd = curve.eval(-t).unwrap()[0];
            assert!(
                (fwd - bwd).abs() < 1e-5,
                "asymmetry {} at t = {t}",
                fwd - bwd
            );
        }

        // The branch moves monotonically from the leading point to the
        // trailing one.
        assert!(trace.velocities.iter().all(|v| v[1] < 0.0));

        // Level: the branch lives on the zero level set.
        assert!(trace.level.abs() < 1e-6, "level {}", trace.level);
        assert!(
            trace.level_spread < 1e-6,
            "level spread {}",
            trace.level_spread
        );

        // The measured approach rate is the axis contraction rate.
        let rate = crate::equilibria::axis_saddle_rate(
            config.r1_hat,
            config.r2_hat,
            config.eta,
            params.kappa,
        );
        assert!(
            (trace.decay_rate / rate - 1.0).abs() < 0.02,
            "decay {} vs axis rate {rate}",
            trace.decay_rate
        );
        assert!(
            trace.decay_r_squared > 0.99,
            "decay fit R² {}",
            trace.decay_r_squared
        );
    }

    #[test]
    fn separatrix_seeding_is_robust_to_offset_changes() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let apex_for = |offset: f64| {
            let settings = TraceSettings {
                offset,
                ..TraceSettings::default()
            };
            let trace = trace_separatrix_with(
                SeparatrixBranch::Upper,
                &config,
                &params,
                &quad,
                &settings,
            )
            .unwrap();
            trace.interpolant().unwrap().eval(0.0).unwrap()[0]
        };
        let reference = apex_for(1e-7);
        for offset in [5e-8, 2e-7] {
            let apex = apex_for(offset);
            assert!(
                (apex - reference).abs() < 1e-5,
                "apex moved by {} at offset {offset}",
                apex - reference
            );
        }
    }

    #[test]
    fn lower_separatrix_traverses_the_axis() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let trace =
            trace_separatrix(SeparatrixBranch::Lower, &config, &params, &quad).unwrap();
        assert!(trace.states.iter().all(|p| p.s == 0.0));
        let duration = trace.t.last().unwrap() - trace.t.first().unwrap();
        assert!(
            (duration / 2.1422186 - 1.0).abs() < 2e-4,
            "traverse time {duration}"
        );
        let rate = crate::equilibria::axis_saddle_rate(
            config.r1_hat,
            config.r2_hat,
            config.eta,
            params.kappa,
        );
        assert!(
            (trace.decay_rate / rate - 1.0).abs() < 0.01,
            "axis decay {} vs rate {rate}",
            trace.decay_rate
        );
        assert_eq!(trace.level, 0.0);
        assert_eq!(trace.level_spread, 0.0);
    }

    #[test]
    fn homoclinic_loops_close_on_the_frozen_level() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let plus =
            trace_separatrix(SeparatrixBranch::HomoclinicPlus, &config, &params, &quad)
                .unwrap();
        let minus =
            trace_separatrix(SeparatrixBranch::HomoclinicMinus, &config, &params, &quad)
                .unwrap();

        let s_top = plus.interpolant().unwrap().eval(0.0).unwrap()[0];
        let s_bot = minus.interpolant().unwrap().eval(0.0).unwrap()[0];
        assert!(
            (s_top / 1.23125924494 - 1.0).abs() < 1e-5,
            "outer loop crossing {s_top}"
        );
        assert!(
            (s_bot / 0.0314762110142 - 1.0).abs() < 1e-5,
            "inner loop crossing {s_bot}"
        );

        for trace in [&plus, &minus] {
            assert!(
                (trace.level / -0.526187741744 - 1.0).abs() < 1e-6,
                "{} level {}",
                trace.branch.as_str(),
                trace.level
            );
            assert!(
                trace.level_spread < 1e-6,
                "{} level spread {}",
                trace.branch.as_str(),
                trace.level_spread
            );
            assert!(
                (trace.decay_rate / 14.981319452077765 - 1.0).abs() < 0.05,
                "{} decay rate {}",
                trace.branch.as_str(),
                trace.decay_rate
            );
            assert!(trace.decay_r_squared > 0.99);
        }
    }

    #[test]
    fn portrait_resolves_the_cycle_and_the_loops() {
        let (params, config) = type_i_alpha5();
        let quad = QuadratureSpec::default();
        let grid = PortraitGrid {
            nx: 6,
            ns: 6,
            step: 1e-3,
            horizon: 2.0,
            store_every: 20,
            ..PortraitGrid::default()
        };
        let bundle = streamline_portrait(&config, &params, &quad, &grid).unwrap();
        assert_eq!(bundle.streamlines.len(), 36);
        assert_eq!(bundle.separatrices.len(), 4);
        assert!(
            bundle.separatrix_errors.is_empty(),
            "unexpected separatrix failures: {:?}",
            bundle.separatrix_errors
        );
        let count = |kind: FixedPointKind| {
            bundle
                .fixed_points
                .iter()
                .filter(|fp| fp.kind == kind)
                .count()
        };
        assert_eq!(count(FixedPointKind::AxisSaddle), 2);
        assert_eq!(count(FixedPointKind::InteriorSaddle), 1);
        assert_eq!(count(FixedPointKind::SingularCenter), 2);
        let healthy = bundle
            .streamlines
            .iter()
            .filter(|line| line.abort.is_none() && line.states.len() >= 2)
            .count();
        assert!(healthy >= 30, "only {healthy} healthy streamlines");
    }

    #[test]
    fn weak_swirl_opens_the_recirculation_region() {
        let params = ModelParams::new(0.1, 1.5).unwrap();
        let quad = QuadratureSpec::default();
        let config =
            resolve_equilibrium(&params, EquilibriumType::I, 0.0, &quad).unwrap();
        let rings = config.state();
        let level_at = |s: f64, x: f64| {
            stream_hamiltonian(
                &ParticleState::new(s, x),
                &rings,
                &params,
                StreamVariant::Unperturbed,
            )
            .unwrap()
        };

        // The interior-saddle level is positive here and its level set
        // extends past the leading stagnation point: the loops do not
        // close and the branches run off axially.
        let level = level_at(config.s_hat, config.xi_hat);
        assert!(
            (level / 43.6939024065 - 1.0).abs() < 1e-6,
            "interior level {level}"
        );

        // A root of the level set well beyond the leading point.
        let x_probe = 1.2 * config.eta;
        let f = |s: f64| level_at(s, x_probe) - level;
        let mut bracket = None;
        let mut prev = (1.0, f(1.0));
        for k in 1..=200 {
            let s = 1.0 * (config.s_hat / 1.0).powf(k as f64 / 200.0);
            let val = f(s);
            if prev.1 * val < 0.0 {
                bracket = Some((prev.0, s));
                break;
            }
            prev = (s, val);
        }
        let (lo, hi) = bracket.expect("no level-set wing beyond the leading point");
        let root = bisect(f, lo, hi, 1e-9).unwrap().x;
        assert!(
            (root / 1482.064538 - 1.0).abs() < 1e-4,
            "wing radius {root}"
        );

        // The upper branch trace reports the open region instead of
        // reconnecting.
        let settings = TraceSettings {
            max_time: 2.0,
            ..TraceSettings::default()
        };
        let err = trace_separatrix_with(
            SeparatrixBranch::Upper,
            &config,
            &params,
            &quad,
            &settings,
        )
        .unwrap_err();
        assert!(matches!(err, RingError::Convergence { .. }), "{err}");

        // The closed-swirl case has no such wing.
        let (params5, config5) = type_i_alpha5();
        let rings5 = config5.state();
        let level5 = stream_hamiltonian(
            &ParticleState::new(config5.s_hat, config5.xi_hat),
            &rings5,
            &params5,
            StreamVariant::Unperturbed,
        )
        .unwrap();
        for fac in [1.2, 2.0, 4.0] {
            let x_probe = fac * config5.eta;
            let mut prev_val = f64::NAN;
            let mut found = false;
            for k in 0..=200 {
                let s = 1e-6 * (4.0 * 1.27946409119 / 1e-6_f64).powf(k as f64 / 200.0);
                let val = stream_hamiltonian(
                    &ParticleState::new(s, x_probe),
                    &rings5,
                    &params5,
                    StreamVariant::Unperturbed,
                )
                .unwrap()
                    - level5;
                if prev_val.is_finite() && prev_val * val < 0.0 {
                    found = true;
                    break;
                }
                prev_val = val;
            }
            assert!(!found, "unexpected level-set wing at x = {x_probe}");
        }
    }
}
