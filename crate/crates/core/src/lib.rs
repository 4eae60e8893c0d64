//! # ringlab-core
//!
//! Numerical core of the **ringlab** laboratory: the Hamiltonian dynamics of
//! two coaxial vortex rings in a swirling ambient flow, the kinematics of
//! passively advected particles in the meridian half-plane, stationary ring
//! configurations and their stability, small-oscillation expansions, Melnikov
//! analysis of the perturbed heteroclinic cycle, and stroboscopic Poincaré
//! maps — the machinery of axisymmetric vortex-breakdown ("bubble") studies.
//!
//! Layering:
//!
//! * [`numerics`] — elliptic integrals, σ-kernels, RK4, root finding, fits;
//! * [`ring_dynamics`] — the two-ring Hamiltonian system;
//! * [`equilibria`] — stationary configurations, stagnation points,
//!   Jacobians, oscillation coefficients, fixed-point classification;
//! * [`kinematics`] — particle advection, stream functions, separatrices;
//! * [`oscillation`] — slightly varying rings and the first-order
//!   perturbation Hamiltonian;
//! * [`melnikov`] — the Melnikov function along the upper separatrix;
//! * [`poincare`] — stroboscopic maps, section clouds, map fixed points.
//!
//! All state types are plain `f64` records; every operation is a pure
//! function of its inputs, so values are freely shareable across threads.

pub mod equilibria;
pub mod error;
pub mod kinematics;
pub mod numerics;
pub mod oscillation;
pub mod params;
pub mod ring_dynamics;

pub use equilibria::{
    axis_saddle_rate, classify_fixed_points, resolve_equilibrium, CenterCoefficients,
    EquilibriumConfig, FixedPoint, FixedPointKind,
};
pub use kinematics::{
    advect_particle, orbit_return, particle_velocity, stream_hamiltonian, streamline_portrait,
    trace_separatrices, trace_separatrix, AdvectionMode, OrbitReturn, ParticleAbort,
    ParticleTrajectory, PortraitBundle, PortraitGrid, RingPath, RingSource, SeparatrixBranch,
    SeparatrixTrace, StreamVariant, Streamline,
};
pub use error::{Result, RingError};
pub use numerics::{IntegratorSpec, QuadratureSpec};
pub use oscillation::{
    center_manifold_seed, closed_orbit_trial, h1_perturbation, pair_linearization, ring_motion,
    stagnation_trace, OrbitDiagnostics, OscillationMode, OscillationSpec, PairLinearization,
    StagnationSample,
};
pub use params::{core_gamma, EquilibriumType, ModelParams, ParticleState, RingPairState, KAPPA_1};
pub use ring_dynamics::{RingSystem, RingTrajectory};
