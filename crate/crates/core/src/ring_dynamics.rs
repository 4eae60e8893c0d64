//! Equations of motion of the coaxial ring pair in a swirling ambient flow.
//!
//! State is (s₁, s₂, x₁, x₂) with s_k = r_k² the squared ring radii and x_k
//! the axial positions. Each ring moves under three influences: the ambient
//! swirl's axial stream −α(1 + a₁s + a₂s²), its own curvature-driven
//! self-induction (κ_k/2r_k)[ln(χ r_k) − γ], and the mutual induction of the
//! other ring, expressed through σ-integrals of the inverse separation kernel
//! Δ(σ) = (r₁−r₂)² + (x₁−x₂)² + 4r₁r₂ sin²σ.
//!
//! The flow is Hamiltonian with respect to the weighted bracket
//! ṡ_k = κ_k⁻¹ ∂H/∂x_k, ẋ_k = −κ_k⁻¹ ∂H/∂s_k, and carries two conserved
//! quantities: the energy [`RingSystem::hamiltonian`] and the weighted area
//! (Casimir) G = Σ κ_k s_k, whose conservation this module makes exact at the
//! right-hand-side level.

use crate::error::{Result, RingError};
use crate::numerics::ode::{rk4_integrate, AbortInfo, IntegratorSpec};
use crate::numerics::quad::{sigma_all_moments, QuadratureSpec};
use crate::params::{ModelParams, RingPairState, KAPPA_1};

/// The ring-pair dynamical system with a frozen interaction orientation.
///
/// The mutual-induction integrals enter every equation with a sign that
/// depends on which ring is the radially outer one. The sign is frozen from
/// the initial arrangement (`+1` when r₁ ≥ r₂, `−1` otherwise) rather than
/// re-evaluated per state, which keeps the vector field smooth along
/// trajectories and makes all four stationary arrangements solvable.
#[derive(Debug, Clone)]
pub struct RingSystem {
    params: ModelParams,
    orientation: f64,
    quad: QuadratureSpec,
}

/// An integrated ring-pair trajectory with conservation diagnostics.
///
/// `h` and `g` sample the energy and the weighted-area invariant at the
/// stored times; `h_drift` and `g_drift` are the maximal relative departures
/// from their initial values. `abort` is populated when the vector field
/// failed mid-run (core collision), in which case the samples end at the
/// last good state.
#[derive(Debug, Clone)]
pub struct RingTrajectory {
    pub t: Vec<f64>,
    pub states: Vec<RingPairState>,
    pub h: Vec<f64>,
    pub g: Vec<f64>,
    pub h_drift: f64,
    pub g_drift: f64,
    pub orientation: f64,
    pub abort: Option<AbortInfo<4>>,
}

impl RingSystem {
    /// System with the interaction orientation frozen from `state0`:
    /// `+1` when r₁ ≥ r₂ (first ring outside or tied), `−1` otherwise.
    pub fn from_initial(params: ModelParams, state0: &RingPairState) -> Self {
        let orientation = if state0.r1() >= state0.r2() { 1.0 } else { -1.0 };
        Self {
            params,
            orientation,
            quad: QuadratureSpec::default(),
        }
    }

    /// System with an explicitly chosen interaction orientation (±1).
    pub fn with_orientation(params: ModelParams, orientation: f64) -> Result<Self> {
        if orientation != 1.0 && orientation != -1.0 {
            return Err(RingError::Domain(format!(
                "interaction orientation must be +1 or -1, got {orientation}"
            )));
        }
        Ok(Self {
            params,
            orientation,
            quad: QuadratureSpec::default(),
        })
    }

    /// Replace the quadrature settings (builder style).
    pub fn with_quadrature(mut self, quad: QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        self.quad = quad;
        Ok(self)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    fn radii(&self, state: &RingPairState) -> Result<(f64, f64)> {
        for (k, s) in [(1usize, state.s1), (2usize, state.s2)] {
            if !(s > 0.0) || !s.is_finite() {
                return Err(RingError::Singularity {
                    context: format!("ring {k} collapsed to the axis (s{k} = {s})"),
                    min_delta: s,
                });
            }
        }
        Ok((state.r1(), state.r2()))
    }

    /// Phase-space velocity (ṡ₁, ṡ₂, ẋ₁, ẋ₂).
    ///
    /// The two radial-transfer terms are computed from one shared flux so
    /// that κ₁ṡ₁ + κ₂ṡ₂ cancels exactly in floating point.
    pub fn velocity(&self, state: &RingPairState) -> Result<[f64; 4]> {
        let (r1, r2) = self.radii(state)?;
        let p = &self.params;
        let dx = state.x1 - state.x2;
        let m = sigma_all_moments(r1, r2, dx, &self.quad)?.three_halves;
        // Mutual-induction axial weights ∫(r_b − r_a cos2σ)Δ^{−3/2}dσ; the
        // moments are symmetric under r₁ ↔ r₂, so one geometry serves both.
        let ind12 = r2 * m.m0 - r1 * m.m1;
        let ind21 = r1 * m.m0 - r2 * m.m1;
        let flux = 4.0 * r1 * r2 * dx * m.m1;
        let sd1 = self.orientation * (p.kappa * flux);
        let sd2 = -self.orientation * flux;
        let xd1 = -p.alpha * (1.0 + p.a1 * state.s1 + p.a2 * state.s1 * state.s1)
            + p.reduced_speed(KAPPA_1, r1)
            + self.orientation * 2.0 * p.kappa * r2 * ind12;
        let xd2 = -p.alpha * (1.0 + p.a1 * state.s2 + p.a2 * state.s2 * state.s2)
            + p.reduced_speed(p.kappa, r2)
            + self.orientation * 2.0 * r1 * ind21;
        Ok([sd1, sd2, xd1, xd2])
    }

    /// Interaction + self-induction part of the energy (the swirl-free
    /// Hamiltonian):
    ///
    /// H₀ = −{ Σ κ_k² r_k [ln(χ r_k) − (1+γ)] + ς κ₁κ₂ · 4r₁r₂ ∫cos2σ Δ^{−1/2} dσ }.
    ///
    /// The interaction integral is evaluated through its closed form in the
    /// complete elliptic integrals, 2(r₊+r₋)[K(λ)−E(λ)] with
    /// r±² = (r₁±r₂)² + (x₁−x₂)² and modulus λ = (r₊−r₋)/(r₊+r₋).
    pub fn hamiltonian_unperturbed(&self, state: &RingPairState) -> Result<f64> {
        let (r1, r2) = self.radii(state)?;
        let p = &self.params;
        let dx = state.x1 - state.x2;
        let d0 = crate::numerics::quad::min_delta(r1, r2, dx);
        if d0 < self.quad.split_threshold {
            return Err(RingError::Singularity {
                context: format!(
                    "ring cores coincide at r1={r1:.6e}, r2={r2:.6e}, dx={dx:.6e}"
                ),
                min_delta: d0,
            });
        }
        let g = p.gamma_const;
        let self1 = r1 * ((p.chi * r1).ln() - (1.0 + g));
        let self2 = p.kappa * p.kappa * r2 * ((p.chi * r2).ln() - (1.0 + g));
        let rp = ((r1 + r2) * (r1 + r2) + dx * dx).sqrt();
        let rm = ((r1 - r2) * (r1 - r2) + dx * dx).sqrt();
        let lambda = (rp - rm) / (rp + rm);
        let (kk, ee) = crate::numerics::elliptic::elliptic_ke(lambda)?;
        let interaction = p.kappa * 2.0 * (rp + rm) * (kk - ee);
        Ok(-(self1 + self2 + self.orientation * interaction))
    }

    /// Full energy: the ambient-swirl potential plus [`Self::hamiltonian_unperturbed`]:
    ///
    /// H = α Σ κ_k (s_k + a₁ s_k²/2 + a₂ s_k³/3) + H₀.
    pub fn hamiltonian(&self, state: &RingPairState) -> Result<f64> {
        Ok(self.swirl_potential(state) + self.hamiltonian_unperturbed(state)?)
    }

    /// The swirl part of the energy (zero when α → 0 is taken outside the
    /// validated parameter range; exposed so H = swirl + H₀ is testable).
    pub fn swirl_potential(&self, state: &RingPairState) -> f64 {
        let p = &self.params;
        let term = |s: f64| s + p.a1 * s * s / 2.0 + p.a2 * s * s * s / 3.0;
        p.alpha * (KAPPA_1 * term(state.s1) + p.kappa * term(state.s2))
    }

    /// Weighted-area invariant (Casimir) G = κ₁ s₁ + κ₂ s₂.
    pub fn invariant_g(&self, state: &RingPairState) -> f64 {
        KAPPA_1 * state.s1 + self.params.kappa * state.s2
    }

    /// RK4 trajectory over `t_span` with conservation diagnostics attached.
    /// A mid-run singularity (core collision) ends the trajectory early and
    /// is recorded in [`RingTrajectory::abort`].
    pub fn integrate(
        &self,
        state0: &RingPairState,
        t_span: (f64, f64),
        spec: &IntegratorSpec,
        store_every: usize,
    ) -> Result<RingTrajectory> {
        spec.validate()?;
        // Surface a bad initial state as an error, not an empty trajectory.
        self.velocity(state0)?;
        let traj = rk4_integrate(
            |_t, y: &[f64; 4]| self.velocity(&RingPairState::from_array(*y)),
            state0.as_array(),
            t_span.0,
            t_span.1,
            spec,
            store_every,
        );
        let states: Vec<RingPairState> =
            traj.y.iter().map(|&y| RingPairState::from_array(y)).collect();
        let h: Vec<f64> = states
            .iter()
            .map(|st| self.hamiltonian(st).unwrap_or(f64::NAN))
            .collect();
        let g: Vec<f64> = states.iter().map(|st| self.invariant_g(st)).collect();
        let h_drift = relative_drift(&h);
        let g_drift = relative_drift(&g);
        Ok(RingTrajectory {
            t: traj.t,
            states,
            h,
            g,
            h_drift,
            g_drift,
            orientation: self.orientation,
            abort: traj.abort,
        })
    }
}

fn relative_drift(series: &[f64]) -> f64 {
    let first = series[0];
    let scale = first.abs().max(f64::MIN_POSITIVE);
    series
        .iter()
        .map(|v| (v - first).abs() / scale)
        .fold(0.0, f64::max)
}

/// Phase-space velocity with the interaction orientation taken from the
/// state itself. See [`RingSystem::velocity`].
pub fn ring_velocity(state: &RingPairState, params: &ModelParams) -> Result<[f64; 4]> {
    RingSystem::from_initial(*params, state).velocity(state)
}

/// Full energy at `state`, orientation taken from the state. See
/// [`RingSystem::hamiltonian`].
pub fn hamiltonian(state: &RingPairState, params: &ModelParams) -> Result<f64> {
    RingSystem::from_initial(*params, state).hamiltonian(state)
}

/// Swirl-free part of the energy, orientation taken from the state. See
/// [`RingSystem::hamiltonian_unperturbed`].
pub fn hamiltonian_unperturbed(state: &RingPairState, params: &ModelParams) -> Result<f64> {
    RingSystem::from_initial(*params, state).hamiltonian_unperturbed(state)
}

/// Weighted-area invariant G = κ₁s₁ + κ₂s₂.
pub fn invariant_g(state: &RingPairState, params: &ModelParams) -> f64 {
    KAPPA_1 * state.s1 + params.kappa * state.s2
}

/// Integrate the ring pair from `state0` with the orientation frozen from
/// `state0`. See [`RingSystem::integrate`].
pub fn integrate_rings(
    state0: &RingPairState,
    params: &ModelParams,
    t_span: (f64, f64),
    spec: &IntegratorSpec,
) -> Result<RingTrajectory> {
    RingSystem::from_initial(*params, state0).integrate(state0, t_span, spec, 1)
}

/// Reconstruct the azimuthal angle of a swirl-advected ring from its sampled
/// squared radius: θ(t) = θ₀ + Ω ∫₀ᵗ (1 + b₁ s(τ) + b₂ s(τ)²) dτ by the
/// trapezoidal rule on the sample grid. With b₁ = b₂ = 0 the result is
/// θ₀ + Ω·t exactly.
///
/// `params.omega` must be set; `t` and `s` must have equal nonzero lengths.
pub fn azimuth_history(
    theta0: f64,
    t: &[f64],
    s: &[f64],
    params: &ModelParams,
) -> Result<Vec<f64>> {
    let omega = params.omega.ok_or_else(|| {
        RingError::Domain("azimuth reconstruction needs the swirl rate Omega set".into())
    })?;
    if t.len() != s.len() || t.is_empty() {
        return Err(RingError::Domain(format!(
            "time and radius histories must have equal nonzero lengths, got {} and {}",
            t.len(),
            s.len()
        )));
    }
    if params.b1 == 0.0 && params.b2 == 0.0 {
        return Ok(t.iter().map(|&ti| theta0 + omega * (ti - t[0])).collect());
    }
    let rate = |s: f64| 1.0 + params.b1 * s + params.b2 * s * s;
    let mut theta = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    theta.push(theta0);
    for i in 1..t.len() {
        acc += 0.5 * (t[i] - t[i - 1]) * (rate(s[i]) + rate(s[i - 1]));
        theta.push(theta0 + omega * acc);
    }
    Ok(theta)
}
