//! Stationary ring-pair configurations and their local structure.
//!
//! A stationary pair is an equal-height configuration `(ŝ₁, ŝ₂, ξ̂, ξ̂)` in
//! which each ring's self-induced translation plus the induction of its
//! partner exactly balances the ambient swirl advection.  Each ring sits on
//! either the small or the large branch of the single-ring balance, giving
//! four configuration types (see [`EquilibriumType`]).
//!
//! This module solves the single-ring balance ([`solve_reduced_radii`]), the
//! coupled pair balance ([`solve_radii`]), locates the stagnation points of
//! the flow the stationary pair induces on a passive particle
//! ([`stagnation_offset`] on the axis, [`interior_saddle`] between the
//! rings), linearizes the ring equations about arbitrary states
//! ([`ring_jacobian`]), derives the frequency and amplitude coefficients of
//! the small ring oscillation about the stationary pair
//! ([`center_coefficients`]), and classifies the fixed points of the induced
//! particle flow ([`classify_fixed_points`]).  [`resolve_equilibrium`]
//! bundles the whole pipeline into one [`EquilibriumConfig`].

use std::f64::consts::PI;

use crate::error::{Result, RingError};
use crate::numerics::quad::{sigma_all_moments, QuadratureSpec};
use crate::numerics::root::{bisect, newton, picard};
use crate::params::{EquilibriumType, ModelParams, RingPairState, KAPPA_1};

/// Swirl profile factor `1 + a₁ s + a₂ s²` multiplying the advection speed.
pub(crate) fn swirl_factor(params: &ModelParams, s: f64) -> f64 {
    1.0 + params.a1 * s + params.a2 * s * s
}

/// Derivative of the swirl profile factor with respect to `s`.
pub(crate) fn swirl_factor_ds(params: &ModelParams, s: f64) -> f64 {
    params.a1 + 2.0 * params.a2 * s
}

/// `∂/∂s` of the self-induced speed `κ_k/(2r)·(ln(χr) − γ)` at `r = √s`.
fn reduced_speed_ds(params: &ModelParams, kk: f64, r: f64) -> f64 {
    -(kk / (4.0 * r * r * r)) * ((params.chi * r).ln() - params.gamma_const - 1.0)
}

// ---------------------------------------------------------------------------
// Reduced (single-ring) radii
// ---------------------------------------------------------------------------

/// The four roots of the single-ring balance `κ_k/(2r)·(ln(χr) − γ) = α`:
/// for each ring strength there is one root below the speed maximum at
/// `ρ = e^{γ+1}/χ` and one above it.
#[derive(Debug, Clone, Copy)]
pub struct ReducedRoots {
    /// Small-branch radius of ring 1 (strength `κ₁ = 1`).
    pub r1_small: f64,
    /// Large-branch radius of ring 1.
    pub r1_large: f64,
    /// Small-branch radius of ring 2 (strength `κ`).
    pub r2_small: f64,
    /// Large-branch radius of ring 2.
    pub r2_large: f64,
}

impl ReducedRoots {
    /// Roots in the order `[r̃₁ₐ, r̃₁ᵦ, r̃₂ₐ, r̃₂ᵦ]` (small then large per ring).
    pub fn as_array(&self) -> [f64; 4] {
        [self.r1_small, self.r1_large, self.r2_small, self.r2_large]
    }
}

/// Residual of the single-ring balance, `κ_k/(2r)·(ln(χr) − γ) − α`.
fn reduced_residual(params: &ModelParams, kk: f64, r: f64) -> f64 {
    params.reduced_speed(kk, r) - params.alpha
}

/// One root of the single-ring balance on the requested branch.
///
/// A plain fixed-point iteration (the balance solved for the `r` in the
/// logarithm on the large branch, for the `r` in the prefactor on the small
/// branch) is contractive on its branch; a bracketed bisection backs it up,
/// and a Newton polish takes the residual to roundoff.
fn reduced_root(params: &ModelParams, kk: f64, large: bool) -> Result<f64> {
    let alpha = params.alpha;
    let chi = params.chi;
    let gamma = params.gamma_const;

    let start = if large {
        let map = |r: f64| kk * ((chi * r).ln() - gamma) / (2.0 * alpha);
        match picard(map, params.rho(), 1.0, 1e-13) {
            Ok(root) => root.x,
            Err(_) => {
                // Expand the upper end until the residual turns negative.
                let mut hi = 4.0 * params.rho();
                let mut tries = 0;
                while reduced_residual(params, kk, hi) > 0.0 {
                    hi *= 2.0;
                    tries += 1;
                    if tries > 300 {
                        return Err(RingError::Convergence {
                            what: "large-branch bracket for the single-ring balance".into(),
                            iterations: tries,
                            residual: reduced_residual(params, kk, hi).abs(),
                        });
                    }
                }
                bisect(|r| reduced_residual(params, kk, r), params.rho(), hi, 1e-12)?.x
            }
        }
    } else {
        let map = |r: f64| (gamma + 2.0 * alpha * r / kk).exp() / chi;
        match picard(map, params.r_floor(), 1.0, 1e-13) {
            Ok(root) => root.x,
            Err(_) => {
                let lo = params.r_floor() * (1.0 + 1e-12);
                bisect(|r| reduced_residual(params, kk, r), lo, params.rho(), 1e-12)?.x
            }
        }
    };

    // Flat tolerance: the balance terms are O(α) with roundoff near ε·α,
    // so 10⁻¹³ is reachable across the whole admissible window.
    let polished = newton(
        |r| {
            (
                reduced_residual(params, kk, r),
                reduced_speed_ds(params, kk, r) * 2.0 * r,
            )
        },
        start,
        1e-13,
    )?;
    Ok(polished.x)
}

/// Solve the single-ring balance for both rings and both branches.
///
/// Requires `0 < α < (2ρ)⁻¹`, the window in which the weaker ring still has
/// two balance radii; outside it the configuration types are undefined.
pub fn solve_reduced_radii(params: &ModelParams) -> Result<ReducedRoots> {
    let alpha_max = params.alpha_max();
    if !(params.alpha > 0.0 && params.alpha < alpha_max) {
        return Err(RingError::Domain(format!(
            "swirl strength alpha={} outside the stationary-pair window (0, {alpha_max:.6})",
            params.alpha
        )));
    }
    Ok(ReducedRoots {
        r1_small: reduced_root(params, KAPPA_1, false)?,
        r1_large: reduced_root(params, KAPPA_1, true)?,
        r2_small: reduced_root(params, params.kappa, false)?,
        r2_large: reduced_root(params, params.kappa, true)?,
    })
}

// ---------------------------------------------------------------------------
// Coupled equal-height radii
// ---------------------------------------------------------------------------

/// Interaction orientation sign frozen by each configuration type.
///
/// Matches `sgn(r̂₁ − r̂₂)` of the solved pair: types I and III put ring 1
/// inside ring 2, types II and IV the reverse.
pub fn orientation_for(type_tag: EquilibriumType) -> f64 {
    match type_tag {
        EquilibriumType::I | EquilibriumType::III => -1.0,
        EquilibriumType::II | EquilibriumType::IV => 1.0,
    }
}

/// Mutual-induction axial speeds `(T₁, T₂)` of an equal-height pair.
fn interaction_terms(
    r1: f64,
    r2: f64,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let m = sigma_all_moments(r1, r2, 0.0, quad)?;
    let t1 = 2.0 * params.kappa * r2 * (r2 * m.three_halves.m0 - r1 * m.three_halves.m1);
    let t2 = 2.0 * r1 * (r1 * m.three_halves.m0 - r2 * m.three_halves.m1);
    Ok((t1, t2))
}

/// Axial-velocity residuals of the equal-height pair at radii `(r1, r2)`.
fn coupled_residuals(
    r1: f64,
    r2: f64,
    sigma: f64,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<[f64; 2]> {
    let (t1, t2) = interaction_terms(r1, r2, params, quad)?;
    let f1 = -params.alpha * swirl_factor(params, r1 * r1)
        + params.reduced_speed(KAPPA_1, r1)
        + sigma * t1;
    let f2 = -params.alpha * swirl_factor(params, r2 * r2)
        + params.reduced_speed(params.kappa, r2)
        + sigma * t2;
    Ok([f1, f2])
}

/// Solve the coupled equal-height balance for the requested configuration
/// type, returning the ring radii `(r̂₁, r̂₂)`.
///
/// A damped fixed-point sweep (each ring updated through the form of the
/// single-ring balance matching its branch, with the partner's induction
/// folded into the advection) provides the basin, and a 2-D Newton polish
/// drives both residuals below `10⁻¹²·max(1, α)`.
pub fn solve_radii(params: &ModelParams, type_tag: EquilibriumType) -> Result<(f64, f64)> {
    let reduced = solve_reduced_radii(params)?;
    let sigma = orientation_for(type_tag);
    let quad = QuadratureSpec::default();
    let kappa = params.kappa;
    let gamma = params.gamma_const;
    let chi = params.chi;

    let seeds = match type_tag {
        EquilibriumType::I => (reduced.r1_large, reduced.r2_large),
        EquilibriumType::II => (reduced.r1_large, reduced.r2_small),
        EquilibriumType::III => (1.0e-3, 1.0),
        EquilibriumType::IV => (2.0 * reduced.r1_small, 0.5 * reduced.r2_small),
    };
    // `true` = large branch (solve for the r in the logarithm),
    // `false` = small branch (solve for the r in the exponential form).
    let branch = match type_tag {
        EquilibriumType::I => [true, true],
        EquilibriumType::II => [true, false],
        EquilibriumType::III => [false, true],
        EquilibriumType::IV => [false, false],
    };

    let (mut r1, mut r2) = seeds;
    let damping = 0.5;
    let mut sweeps = 0usize;
    for _ in 0..500 {
        sweeps += 1;
        let (t1, t2) = interaction_terms(r1, r2, params, &quad)?;
        let strengths = [KAPPA_1, kappa];
        let radii = [r1, r2];
        let drives = [t1, t2];
        let mut next = [0.0f64; 2];
        let mut poisoned = false;
        for k in 0..2 {
            let kk = strengths[k];
            let r = radii[k];
            let drive = params.alpha * swirl_factor(params, r * r) - sigma * drives[k];
            let update = if branch[k] {
                kk * ((chi * r).ln() - gamma) / (2.0 * drive)
            } else {
                (gamma + 2.0 * r * drive / kk).exp() / chi
            };
            if !update.is_finite() || update <= 0.0 {
                poisoned = true;
                break;
            }
            next[k] = (1.0 - damping) * r + damping * update;
        }
        if poisoned {
            // Hand the seeds straight to the Newton polish below.
            r1 = seeds.0;
            r2 = seeds.1;
            break;
        }
        let change = ((next[0] - r1) / r1).abs().max(((next[1] - r2) / r2).abs());
        r1 = next[0];
        r2 = next[1];
        if change < 1e-13 {
            break;
        }
    }

    // 2-D Newton polish with a central finite-difference Jacobian.
    let scale = params.alpha.max(1.0);
    let mut x = [r1, r2];
    let mut res = coupled_residuals(x[0], x[1], sigma, params, &quad)?;
    let mut iterations = sweeps;
    for _ in 0..50 {
        let worst = res[0].abs().max(res[1].abs());
        if worst < 1e-12 * scale {
            break;
        }
        iterations += 1;
        let mut jac = [[0.0f64; 2]; 2];
        for (col, jcol) in jac.iter_mut().enumerate() {
            let h = 1e-7 * x[col];
            let mut hi = x;
            let mut lo = x;
            hi[col] += h;
            lo[col] -= h;
            let fh = coupled_residuals(hi[0], hi[1], sigma, params, &quad)?;
            let fl = coupled_residuals(lo[0], lo[1], sigma, params, &quad)?;
            jcol[0] = (fh[0] - fl[0]) / (2.0 * h);
            jcol[1] = (fh[1] - fl[1]) / (2.0 * h);
        }
        // jac[col][row] above; solve J·δ = res with J[row][col] layout.
        let (a, b, c, d) = (jac[0][0], jac[1][0], jac[0][1], jac[1][1]);
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return Err(RingError::Convergence {
                what: format!("coupled stationary radii for configuration {type_tag} (singular Newton step)"),
                iterations,
                residual: worst,
            });
        }
        let mut d1 = (res[0] * d - b * res[1]) / det;
        let mut d2 = (a * res[1] - res[0] * c) / det;
        // Trust region: never step more than half a radius at once.
        d1 = d1.clamp(-0.5 * x[0], 0.5 * x[0]);
        d2 = d2.clamp(-0.5 * x[1], 0.5 * x[1]);
        x[0] -= d1;
        x[1] -= d2;
        res = coupled_residuals(x[0], x[1], sigma, params, &quad)?;
    }

    let worst = res[0].abs().max(res[1].abs());
    if !(worst < 1e-10 * scale) {
        return Err(RingError::Convergence {
            what: format!(
                "coupled stationary radii for configuration {type_tag} (alpha={}, kappa={})",
                params.alpha, params.kappa
            ),
            iterations,
            residual: worst,
        });
    }
    Ok((x[0], x[1]))
}

// ---------------------------------------------------------------------------
// Stagnation points of the induced particle flow
// ---------------------------------------------------------------------------

/// Axial stagnation points of the flow a stationary pair induces on the
/// symmetry axis: the bubble's rear and forward points `x± = ξ̂ ± η`.
#[derive(Debug, Clone, Copy)]
pub struct StagnationPoints {
    /// Offset `η > 0` of each stagnation point from the ring plane.
    pub eta: f64,
    /// Downstream stagnation point `ξ̂ + η`.
    pub x_plus: f64,
    /// Upstream stagnation point `ξ̂ − η`.
    pub x_minus: f64,
}

/// Axial velocity induced at offset `u` from the plane of an equal-height
/// pair, evaluated on the axis (`s = 0`).
fn axis_velocity(r1_hat: f64, r2_hat: f64, u: f64, params: &ModelParams) -> f64 {
    let term = |rh: f64, kk: f64| {
        let q = rh * rh + u * u;
        kk * rh * rh / (q * q.sqrt())
    };
    -params.alpha + PI * (term(r1_hat, KAPPA_1) + term(r2_hat, params.kappa))
}

/// Locate the axial stagnation points of the flow induced by an equal-height
/// pair at radii `(r̂₁, r̂₂)` in the plane `x = ξ̂`.
///
/// Fails with a degenerate-input error when the upwash at the ring plane
/// does not exceed the swirl advection: the recirculation bubble then does
/// not reach the axis and no stagnation points exist.
pub fn stagnation_offset(
    r1_hat: f64,
    r2_hat: f64,
    xi_hat: f64,
    params: &ModelParams,
) -> Result<StagnationPoints> {
    if !(r1_hat > 0.0 && r2_hat > 0.0) {
        return Err(RingError::Domain(format!(
            "stagnation search needs positive ring radii, got ({r1_hat}, {r2_hat})"
        )));
    }
    let at_plane = axis_velocity(r1_hat, r2_hat, 0.0, params);
    if at_plane <= 0.0 {
        return Err(RingError::Degenerate(format!(
            "axis upwash {at_plane:.6e} at the ring plane does not exceed the swirl advection; \
             no axial stagnation points"
        )));
    }

    let scale = params.alpha.max(1.0);
    let mut hi = r1_hat.max(r2_hat);
    let mut tries = 0;
    while axis_velocity(r1_hat, r2_hat, hi, params) > 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 300 {
            return Err(RingError::Convergence {
                what: "axial stagnation bracket".into(),
                iterations: tries,
                residual: axis_velocity(r1_hat, r2_hat, hi, params).abs(),
            });
        }
    }
    let seed = bisect(
        |u| axis_velocity(r1_hat, r2_hat, u, params),
        0.0,
        hi,
        1e-13 * scale,
    )?
    .x;
    let derivative = |u: f64| {
        let term = |rh: f64, kk: f64| {
            let q = rh * rh + u * u;
            kk * rh * rh * u / (q * q * q.sqrt())
        };
        -3.0 * PI * (term(r1_hat, KAPPA_1) + term(r2_hat, params.kappa))
    };
    let root = newton(
        |u| (axis_velocity(r1_hat, r2_hat, u, params), derivative(u)),
        seed,
        1e-14 * scale,
    )?;
    let eta = root.x;
    let residual = axis_velocity(r1_hat, r2_hat, eta, params).abs();
    if !(residual < 1e-12 * scale) {
        return Err(RingError::Convergence {
            what: "axial stagnation offset".into(),
            iterations: root.iterations,
            residual,
        });
    }
    Ok(StagnationPoints {
        eta,
        x_plus: xi_hat + eta,
        x_minus: xi_hat - eta,
    })
}

// ---------------------------------------------------------------------------
// Interior stagnation radius
// ---------------------------------------------------------------------------

/// Axial particle velocity in the ring plane at radius `r`, induced by an
/// equal-height pair at radii `(r̂₁, r̂₂)` (evaluated with quadrature `quad`).
fn plane_axial_velocity(
    r: f64,
    r1_hat: f64,
    r2_hat: f64,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let mut total = -params.alpha * swirl_factor(params, r * r);
    for (rh, kk) in [(r1_hat, KAPPA_1), (r2_hat, params.kappa)] {
        let m = sigma_all_moments(r, rh, 0.0, quad)?;
        total += 2.0 * kk * rh * (rh * m.three_halves.m0 - r * m.three_halves.m1);
    }
    Ok(total)
}

/// Locate the stagnation radius of the induced particle flow strictly
/// between the two ring radii, returning it as `ŝ = r̂²`.
///
/// The axial velocity diverges with opposite signs at the two filaments, so
/// the root is bracketed between the sorted radii with a relative inset of
/// `10⁻⁶` of their gap.  Within the bracket the kernel separation can drop
/// to the square of that inset, so the search runs with a proportionally
/// tightened near-singular threshold; the graded panels of the quadrature
/// keep the evaluation accurate there.
pub fn interior_saddle(
    r1_hat: f64,
    r2_hat: f64,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(r1_hat > 0.0 && r2_hat > 0.0 && r1_hat != r2_hat) {
        return Err(RingError::Domain(format!(
            "interior stagnation search needs distinct positive radii, got ({r1_hat}, {r2_hat})"
        )));
    }
    let lo_r = r1_hat.min(r2_hat);
    let hi_r = r1_hat.max(r2_hat);
    let span = hi_r - lo_r;
    let inset = 1e-6 * span;
    let tight = QuadratureSpec {
        order: quad.order,
        split_threshold: quad.split_threshold.min(0.25 * inset * inset),
    };
    let f = |r: f64| {
        plane_axial_velocity(r, r1_hat, r2_hat, params, &tight).unwrap_or(f64::NAN)
    };
    // The velocity slope grows like the inverse cube of the filament
    // distance, so a residual bound would be scale-dependent; bisection to
    // a machine-width interval pins the radius itself to full precision.
    let root = bisect(f, lo_r + inset, hi_r - inset, 0.0)?;
    if !root.x.is_finite() || !f(root.x).is_finite() {
        return Err(RingError::Convergence {
            what: "interior stagnation radius".into(),
            iterations: root.iterations,
            residual: f64::NAN,
        });
    }
    Ok(root.x * root.x)
}

// ---------------------------------------------------------------------------
// Linearization of the ring equations
// ---------------------------------------------------------------------------

/// Linearization of the ring equations at a state, with its spectrum.
#[derive(Debug, Clone)]
pub struct RingJacobian {
    /// `∂(ṡ₁, ṡ₂, ẋ₁, ẋ₂)/∂(s₁, s₂, x₁, x₂)`, rows = equations.
    pub matrix: [[f64; 4]; 4],
    /// Eigenvalues as `(re, im)` pairs, sorted by real then imaginary part.
    pub eigenvalues: [(f64, f64); 4],
}

/// Analytic Jacobian of the ring equations at `state` with the interaction
/// orientation `orientation` (±1), including its eigenvalues.
///
/// All interaction derivatives reduce to the degree-≤2 angular moments of
/// the 3/2 and 5/2 kernels, so one fused quadrature pass supplies every
/// entry.  The spectrum of the (trace-free, Hamiltonian) matrix is obtained
/// from its biquadratic characteristic polynomial.
pub fn ring_jacobian(
    state: &RingPairState,
    orientation: f64,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<RingJacobian> {
    if orientation != 1.0 && orientation != -1.0 {
        return Err(RingError::Domain(format!(
            "interaction orientation must be +1 or -1, got {orientation}"
        )));
    }
    if !(state.s1 > 0.0 && state.s2 > 0.0) {
        return Err(RingError::Singularity {
            context: "ring linearization at non-positive squared radius".into(),
            min_delta: state.s1.min(state.s2),
        });
    }
    let (s1, s2) = (state.s1, state.s2);
    let r1 = s1.sqrt();
    let r2 = s2.sqrt();
    let d = state.x1 - state.x2;
    let kappa = params.kappa;
    let sg = orientation;

    let m = sigma_all_moments(r1, r2, d, quad)?;
    let (m03, m13) = (m.three_halves.m0, m.three_halves.m1);
    let (m05, m15, m25) = (m.five_halves.m0, m.five_halves.m1, m.five_halves.m2);

    // Radial-transfer flux F = 4 r₁ r₂ d ∫cos2σ·Δ^{-3/2}; its radius
    // derivatives collapse to degree-≤2 moments of the 5/2 kernel because
    // ∂Δ/∂r₁ = 2(r₁ − r₂ cos2σ).
    let dm13_dr1 = -3.0 * (r1 * m15 - r2 * m25);
    let dm13_dr2 = -3.0 * (r2 * m15 - r1 * m25);
    let dm13_dd = -3.0 * d * m15;
    let df_dr1 = 4.0 * d * (r2 * m13 + r1 * r2 * dm13_dr1);
    let df_dr2 = 4.0 * d * (r1 * m13 + r1 * r2 * dm13_dr2);
    let df_dd = 4.0 * r1 * r2 * (m13 + d * dm13_dd);

    // ṡ₁ = ς·κ·F, ṡ₂ = −ς·F; ∂/∂s = ∂/∂r / (2r).
    let j00 = sg * kappa * df_dr1 / (2.0 * r1);
    let j01 = sg * kappa * df_dr2 / (2.0 * r2);
    let j02 = sg * kappa * df_dd;

    // Mutual-induction integrals and their derivatives.
    let ind12 = r2 * m03 - r1 * m13;
    let ind21 = r1 * m03 - r2 * m13;
    let cross = r1 * r2 * m05 - (r1 * r1 + r2 * r2) * m15 + r1 * r2 * m25;
    let dind12_dr1 = -m13 - 3.0 * cross;
    let dind12_dr2 = m03 - 3.0 * (r2 * r2 * m05 - 2.0 * r1 * r2 * m15 + r1 * r1 * m25);
    let dind21_dr1 = m03 - 3.0 * (r1 * r1 * m05 - 2.0 * r1 * r2 * m15 + r2 * r2 * m25);
    let dind21_dr2 = -m13 - 3.0 * cross;
    let dind12_dd = -3.0 * d * (r2 * m05 - r1 * m15);
    let dind21_dd = -3.0 * d * (r1 * m05 - r2 * m15);

    // ẋ₁ = −α·(1 + a₁s₁ + a₂s₁²) + κ₁/(2r₁)·(ln(χr₁) − γ) + ς·2κ·r₂·ind12.
    let j20 = -params.alpha * swirl_factor_ds(params, s1)
        + reduced_speed_ds(params, KAPPA_1, r1)
        + sg * kappa * r2 * dind12_dr1 / r1;
    let j21 = sg * kappa * (ind12 + r2 * dind12_dr2) / r2;
    let j22 = sg * 2.0 * kappa * r2 * dind12_dd;

    // ẋ₂ = −α·(1 + a₁s₂ + a₂s₂²) + κ/(2r₂)·(ln(χr₂) − γ) + ς·2·r₁·ind21.
    let j30 = sg * (ind21 + r1 * dind21_dr1) / r1;
    let j31 = -params.alpha * swirl_factor_ds(params, s2)
        + reduced_speed_ds(params, kappa, r2)
        + sg * r1 * dind21_dr2 / r2;
    let j32 = sg * 2.0 * r1 * dind21_dd;

    let matrix = [
        [j00, j01, j02, -j02],
        [-j00 / kappa, -j01 / kappa, -j02 / kappa, j02 / kappa],
        [j20, j21, j22, -j22],
        [j30, j31, j32, -j32],
    ];
    let eigenvalues = hamiltonian_spectrum(&matrix);
    Ok(RingJacobian { matrix, eigenvalues })
}

fn mat_mul4(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn trace4(a: &[[f64; 4]; 4]) -> f64 {
    a[0][0] + a[1][1] + a[2][2] + a[3][3]
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn det4(a: &[[f64; 4]; 4]) -> f64 {
    let minor = |col: usize| {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            let mut jj = 0;
            for j in 0..4 {
                if j == col {
                    continue;
                }
                row[jj] = a[i + 1][j];
                jj += 1;
            }
        }
        det3(m)
    };
    a[0][0] * minor(0) - a[0][1] * minor(1) + a[0][2] * minor(2) - a[0][3] * minor(3)
}

/// Spectrum of a trace-free Hamiltonian 4×4 matrix via its biquadratic
/// characteristic polynomial `λ⁴ + e₂λ² + e₄`.
fn hamiltonian_spectrum(matrix: &[[f64; 4]; 4]) -> [(f64, f64); 4] {
    let tr = trace4(matrix);
    let sq = mat_mul4(matrix, matrix);
    let e2 = 0.5 * (tr * tr - trace4(&sq));
    let e4 = det4(matrix);

    let mut eigen: [(f64, f64); 4];
    let disc = e2 * e2 - 4.0 * e4;
    if disc >= 0.0 {
        let sd = disc.sqrt();
        let q = if e2 >= 0.0 {
            -0.5 * (e2 + sd)
        } else {
            -0.5 * (e2 - sd)
        };
        let (mu1, mu2) = if q != 0.0 { (q, e4 / q) } else { (0.0, -e2) };
        let pair = |mu: f64| -> [(f64, f64); 2] {
            if mu >= 0.0 {
                let s = mu.sqrt();
                [(s, 0.0), (-s, 0.0)]
            } else {
                let s = (-mu).sqrt();
                [(0.0, s), (0.0, -s)]
            }
        };
        let [a, b] = pair(mu1);
        let [c, d] = pair(mu2);
        eigen = [a, b, c, d];
    } else {
        // Complex quartet ±(m ± n i) from the complex square roots of μ.
        let re = -0.5 * e2;
        let im = 0.5 * (-disc).sqrt();
        let modulus = re.hypot(im);
        let m = (0.5 * (modulus + re)).sqrt();
        let n = im / (2.0 * m);
        eigen = [(m, n), (m, -n), (-m, n), (-m, -n)];
    }
    eigen.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.partial_cmp(&b.1).unwrap())
    });
    eigen
}

// ---------------------------------------------------------------------------
// Center coefficients of the small ring oscillation
// ---------------------------------------------------------------------------

/// Where the oscillation frequency came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterSource {
    /// The closed-form frequency formula had a positive radicand.
    Formula,
    /// The formula radicand was non-positive; the frequency was taken from
    /// the imaginary eigenvalue pair of the ring linearization instead.
    SpectrumFallback,
}

/// Frequency and amplitude coefficients of the small ring oscillation about
/// a stationary pair, with cross-check diagnostics.
#[derive(Debug, Clone)]
pub struct CenterCoefficients {
    /// Oscillation frequency ν.
    pub nu: f64,
    /// Axial amplitude coefficient A = ν² + B.
    pub a_coeff: f64,
    /// Axial amplitude coefficient B.
    pub b_coeff: f64,
    /// Amplitude ratio A/B of the outer to the inner ring's axial sway.
    pub amp_ratio: f64,
    /// Radicand of the closed-form frequency formula (may be negative).
    pub nu_sq_formula: f64,
    /// Frequency of the imaginary eigenvalue pair of the linearization,
    /// when that pair is imaginary.
    pub eigen_frequency: Option<f64>,
    /// Magnitude of the real eigenvalue pair of the linearization, when
    /// that pair is real (recorded as a disagreement with the formula).
    pub eigen_growth: Option<f64>,
    /// Which of the two sources produced `nu`.
    pub source: CenterSource,
    /// Human-readable note whenever formula and spectrum disagree or a
    /// fallback was taken.
    pub warning: Option<String>,
}

/// Frequency and amplitude coefficients of the small oscillation about the
/// stationary pair at radii `(r̂₁, r̂₂)` with the given orientation.
///
/// The coefficients come from the closed-form linearization of the axial
/// ring equations in the equal-height plane; the spectrum of the full ring
/// Jacobian is computed alongside as a cross-check.  When the two disagree
/// the formula value is kept and the disagreement is reported in `warning`;
/// when the formula radicand is non-positive but the spectrum still has an
/// imaginary pair, that pair supplies the frequency (`SpectrumFallback`).
/// When neither source yields a frequency the configuration has no center
/// subspace and an error is returned.
pub fn center_coefficients(
    r1_hat: f64,
    r2_hat: f64,
    orientation: f64,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<CenterCoefficients> {
    if !(r1_hat > 0.0 && r2_hat > 0.0) {
        return Err(RingError::Domain(format!(
            "center coefficients need positive radii, got ({r1_hat}, {r2_hat})"
        )));
    }
    let (r1, r2) = (r1_hat, r2_hat);
    let (s1, s2) = (r1 * r1, r2 * r2);
    let kappa = params.kappa;
    let chi = params.chi;
    let gamma = params.gamma_const;

    let m = sigma_all_moments(r1, r2, 0.0, quad)?;
    let (m03, m13) = (m.three_halves.m0, m.three_halves.m1);
    let (m05, m15, m25) = (m.five_halves.m0, m.five_halves.m1, m.five_halves.m2);

    // Entries of the equal-height axial linearization (∂ẋ_i/∂s_j).
    let cross = r1 * r2 * m05 - (r1 * r1 + r2 * r2) * m15 + r1 * r2 * m25;
    let a = -params.alpha * swirl_factor_ds(params, s1)
        - (1.0 / (4.0 * r1 * r1 * r1)) * ((chi * r1).ln() - gamma - 1.0)
        - (kappa * r2 / r1) * (m13 + 3.0 * cross);
    let b = (kappa / r2)
        * (2.0 * r2 * m03
            - r1 * m13
            - 3.0 * r2 * (r2 * r2 * m05 - 2.0 * r1 * r2 * m15 + r1 * r1 * m25));
    let c = (1.0 / r1)
        * (2.0 * r1 * m03
            - r2 * m13
            - 3.0 * r1 * (r1 * r1 * m05 - 2.0 * r1 * r2 * m15 + r2 * r2 * m25));
    let d = -params.alpha * swirl_factor_ds(params, s2)
        - (kappa / (4.0 * r2 * r2 * r2)) * ((chi * r2).ln() - gamma - 1.0)
        - (r1 / r2) * (m13 + 3.0 * cross);
    let q = 4.0 * r1 * r2 * m13;

    let nu_sq = q * ((b - d) - kappa * (a - c));
    let b_coeff = -q * (b - kappa * a);

    // Spectrum of the full ring linearization at the stationary state.
    let state = RingPairState {
        s1,
        s2,
        x1: 0.0,
        x2: 0.0,
    };
    let jac = ring_jacobian(&state, orientation, params, quad)?;
    let (lead_re, lead_im) = jac
        .eigenvalues
        .iter()
        .copied()
        .max_by(|p, q| p.0.hypot(p.1).partial_cmp(&q.0.hypot(q.1)).unwrap())
        .unwrap();
    let lead_mod = lead_re.hypot(lead_im);
    let eigen_imag = lead_mod > 0.0 && lead_re.abs() < 1e-6 * lead_mod;
    let eigen_real = lead_mod > 0.0 && lead_im.abs() < 1e-6 * lead_mod;
    let eigen_frequency = eigen_imag.then(|| lead_im.abs());
    let eigen_growth = eigen_real.then(|| lead_re.abs());

    let (nu, source, warning) = if nu_sq > 0.0 {
        let nu = nu_sq.sqrt();
        let warning = if let Some(growth) = eigen_growth {
            Some(format!(
                "ring linearization spectrum carries a real pair ±{growth:.6} while the \
                 frequency formula gives {nu:.6}; keeping the formula value"
            ))
        } else if let Some(freq) = eigen_frequency {
            let rel = (freq - nu).abs() / nu.max(f64::MIN_POSITIVE);
            (rel > 1e-6).then(|| {
                format!(
                    "spectrum frequency {freq:.8} differs from formula frequency {nu:.8} \
                     by {rel:.2e} (relative)"
                )
            })
        } else {
            Some(
                "ring linearization spectrum is a complex quartet; keeping the formula frequency"
                    .to_string(),
            )
        };
        (nu, CenterSource::Formula, warning)
    } else if let Some(freq) = eigen_frequency {
        (
            freq,
            CenterSource::SpectrumFallback,
            Some(format!(
                "frequency formula radicand {nu_sq:.6e} is not positive; using the imaginary \
                 pair ±{freq:.6}i of the ring linearization spectrum instead"
            )),
        )
    } else {
        let spectrum = jac
            .eigenvalues
            .iter()
            .map(|(re, im)| format!("{re:.4}{im:+.4}i"))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(RingError::NoCenter(format!(
            "frequency radicand {nu_sq:.3e} is not positive and the ring linearization \
             spectrum [{spectrum}] has no imaginary pair"
        )));
    };

    let a_coeff = nu * nu + b_coeff;
    let (amp_ratio, warning) = if b_coeff.abs() > 1e-12 * a_coeff.abs().max(nu * nu).max(1.0) {
        (a_coeff / b_coeff, warning)
    } else {
        // Degenerate denominator: take the sway ratio from the eigenvector
        // of the axial mode of the full linearization instead.
        let num = jac.matrix[3][0] - jac.matrix[3][1] / kappa;
        let den = jac.matrix[2][0] - jac.matrix[2][1] / kappa;
        if den == 0.0 {
            return Err(RingError::Degenerate(
                "axial sway ratio undefined: both amplitude denominators vanish".into(),
            ));
        }
        let note = "amplitude coefficient B vanished; sway ratio taken from the axial \
                    eigenvector of the ring linearization"
            .to_string();
        let combined = match warning {
            Some(w) => Some(format!("{w}; {note}")),
            None => Some(note),
        };
        (num / den, combined)
    };

    Ok(CenterCoefficients {
        nu,
        a_coeff,
        b_coeff,
        amp_ratio,
        nu_sq_formula: nu_sq,
        eigen_frequency,
        eigen_growth,
        source,
        warning,
    })
}

// ---------------------------------------------------------------------------
// Fixed points of the induced particle flow
// ---------------------------------------------------------------------------

/// Kind of a fixed point of the particle flow induced by a stationary pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointKind {
    /// Hyperbolic point on the symmetry axis (`x₊` or `x₋`).
    AxisSaddle,
    /// Hyperbolic point between the ring radii in the ring plane.
    InteriorSaddle,
    /// Ring core: the linearization is singular there, the local flow
    /// winds around the filament.
    SingularCenter,
}

/// A classified fixed point of the induced particle flow.
#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub kind: FixedPointKind,
    /// Squared radial coordinate of the point.
    pub s: f64,
    /// Axial coordinate of the point.
    pub x: f64,
    /// Eigenvalues of the local linearization as `(re, im)` pairs;
    /// `None` at the singular ring cores.
    pub eigenvalues: Option<[(f64, f64); 2]>,
    /// Slope `ds/dx` of the off-axis invariant manifold, where defined.
    pub tangent_slope: Option<f64>,
}

/// Strength-weighted axis sums `(S₂, S₄)` controlling the axis-point
/// linearization: `S₂ = Σ κ_k r̂_k²/(r̂_k²+η²)^{5/2}`,
/// `S₄ = Σ κ_k r̂_k⁴/(r̂_k²+η²)^{7/2}`.
pub fn axis_strength_sums(r1_hat: f64, r2_hat: f64, eta: f64, kappa: f64) -> (f64, f64) {
    let mut s2 = 0.0;
    let mut s4 = 0.0;
    for (rh, kk) in [(r1_hat, KAPPA_1), (r2_hat, kappa)] {
        let q = rh * rh + eta * eta;
        s2 += kk * rh * rh / (q * q * q.sqrt());
        s4 += kk * rh * rh * rh * rh / (q * q * q * q.sqrt());
    }
    (s2, s4)
}

/// Expansion rate `3πηS₂` of the axis stagnation points: the magnitude of
/// the real eigenvalue pair of the linearization at `x±`.
pub fn axis_saddle_rate(r1_hat: f64, r2_hat: f64, eta: f64, kappa: f64) -> f64 {
    let (s2, _) = axis_strength_sums(r1_hat, r2_hat, eta, kappa);
    3.0 * PI * eta * s2
}

/// Classify the fixed points of the particle flow induced by a stationary
/// pair: the two axis points, the interior stagnation point, and the two
/// singular ring cores.
///
/// The axis-point linearization is lower-triangular in `(s, x)` with closed
/// entries `∂ṡ/∂s = ±3πηS₂` and `∂ẋ/∂s = −3πS₂ + (15π/4)S₄`, so the
/// eigenvalues and separatrix tangents are analytic.  The interior point's
/// linearization is anti-diagonal by the reflection symmetry of the flow
/// through the ring plane; its entries reduce to angular moments.
pub fn classify_fixed_points(
    config: &EquilibriumConfig,
    params: &ModelParams,
    quad: &QuadratureSpec,
) -> Result<Vec<FixedPoint>> {
    let (s2_sum, s4_sum) =
        axis_strength_sums(config.r1_hat, config.r2_hat, config.eta, params.kappa);
    let rate = 3.0 * PI * config.eta * s2_sum;
    let dpsi_ds_axis = -3.0 * PI * s2_sum + (15.0 * PI / 4.0) * s4_sum;
    let slope_plus = 2.0 * rate / dpsi_ds_axis;
    let axis_eigen = [(rate, 0.0), (-rate, 0.0)];

    let p_plus = FixedPoint {
        kind: FixedPointKind::AxisSaddle,
        s: 0.0,
        x: config.x_plus,
        eigenvalues: Some(axis_eigen),
        tangent_slope: Some(slope_plus),
    };
    let p_minus = FixedPoint {
        kind: FixedPointKind::AxisSaddle,
        s: 0.0,
        x: config.x_minus,
        eigenvalues: Some(axis_eigen),
        tangent_slope: Some(-slope_plus),
    };

    // Interior stagnation point: ∂ẋ/∂s and ∂ṡ/∂x from angular moments.
    let r = config.s_hat.sqrt();
    let mut dphi_dx = 0.0;
    let mut dpsi_ds = -params.alpha * swirl_factor_ds(params, config.s_hat);
    for (rh, kk) in [(config.r1_hat, KAPPA_1), (config.r2_hat, params.kappa)] {
        let m = sigma_all_moments(r, rh, 0.0, quad)?;
        dphi_dx += 4.0 * r * kk * rh * m.three_halves.m1;
        let cross = r * rh * m.five_halves.m0 - (r * r + rh * rh) * m.five_halves.m1
            + r * rh * m.five_halves.m2;
        dpsi_ds += (kk * rh / r) * (-m.three_halves.m1 - 3.0 * cross);
    }
    let product = dphi_dx * dpsi_ds;
    let (interior_eigen, interior_slope) = if product >= 0.0 {
        let lam = product.sqrt();
        (
            [(lam, 0.0), (-lam, 0.0)],
            Some((dphi_dx / dpsi_ds).sqrt()),
        )
    } else {
        let lam = (-product).sqrt();
        ([(0.0, lam), (0.0, -lam)], None)
    };
    let interior = FixedPoint {
        kind: FixedPointKind::InteriorSaddle,
        s: config.s_hat,
        x: config.xi_hat,
        eigenvalues: Some(interior_eigen),
        tangent_slope: interior_slope,
    };

    let core = |s: f64| FixedPoint {
        kind: FixedPointKind::SingularCenter,
        s,
        x: config.xi_hat,
        eigenvalues: None,
        tangent_slope: None,
    };

    Ok(vec![
        p_plus,
        p_minus,
        interior,
        core(config.s1_hat),
        core(config.s2_hat),
    ])
}

// ---------------------------------------------------------------------------
// Full equilibrium resolution
// ---------------------------------------------------------------------------

/// A fully resolved stationary pair: radii, stagnation structure, and the
/// oscillation coefficients where a center subspace exists.
#[derive(Debug, Clone)]
pub struct EquilibriumConfig {
    /// Branch pattern of the configuration.
    pub type_tag: EquilibriumType,
    /// Interaction orientation `sgn(r̂₁ − r̂₂)` frozen by the type.
    pub orientation: f64,
    /// Axial position of the ring plane.
    pub xi_hat: f64,
    /// Ring radii.
    pub r1_hat: f64,
    pub r2_hat: f64,
    /// Squared ring radii.
    pub s1_hat: f64,
    pub s2_hat: f64,
    /// Axis stagnation offset and the stagnation points `ξ̂ ± η`.
    pub eta: f64,
    pub x_plus: f64,
    pub x_minus: f64,
    /// Squared radius of the interior stagnation point in the ring plane.
    pub s_hat: f64,
    /// Half the distance from `ŝ` to the nearer ring core in `s`:
    /// a safe amplitude bound for perturbations around the saddle.
    pub eps_star: f64,
    /// Value of the conserved weighted area `s₁ + κ s₂` at the pair.
    pub a_hat: f64,
    /// Oscillation coefficients; `None` when the configuration has no
    /// center subspace (no oscillation frequency exists).
    pub center: Option<CenterCoefficients>,
}

impl EquilibriumConfig {
    /// The stationary ring state `(ŝ₁, ŝ₂, ξ̂, ξ̂)`.
    pub fn state(&self) -> RingPairState {
        RingPairState {
            s1: self.s1_hat,
            s2: self.s2_hat,
            x1: self.xi_hat,
            x2: self.xi_hat,
        }
    }

    /// Oscillation frequency, or a no-center error for types without one.
    pub fn nu(&self) -> Result<f64> {
        self.center.as_ref().map(|c| c.nu).ok_or_else(|| {
            RingError::NoCenter(format!(
                "configuration {} has no oscillation frequency",
                self.type_tag
            ))
        })
    }

    /// Axial sway ratio A/B, or a no-center error for types without one.
    pub fn amp_ratio(&self) -> Result<f64> {
        self.center.as_ref().map(|c| c.amp_ratio).ok_or_else(|| {
            RingError::NoCenter(format!(
                "configuration {} has no oscillation coefficients",
                self.type_tag
            ))
        })
    }

    /// Expansion rate `3πηS₂` of the axis stagnation points.
    pub fn axis_rate(&self, params: &ModelParams) -> f64 {
        axis_saddle_rate(self.r1_hat, self.r2_hat, self.eta, params.kappa)
    }
}

/// Resolve the full stationary-pair configuration of the requested type in
/// the plane `x = ξ̂`: radii, stagnation structure, amplitude bound, and
/// oscillation coefficients (where a center subspace exists).
pub fn resolve_equilibrium(
    params: &ModelParams,
    type_tag: EquilibriumType,
    xi_hat: f64,
    quad: &QuadratureSpec,
) -> Result<EquilibriumConfig> {
    let orientation = orientation_for(type_tag);
    let (r1_hat, r2_hat) = solve_radii(params, type_tag)?;
    let stag = stagnation_offset(r1_hat, r2_hat, xi_hat, params)?;
    let s_hat = interior_saddle(r1_hat, r2_hat, params, quad)?;
    let (s1_hat, s2_hat) = (r1_hat * r1_hat, r2_hat * r2_hat);
    let lo = s1_hat.min(s2_hat);
    let hi = s1_hat.max(s2_hat);
    let eps_star = 0.5 * (s_hat - lo).min(hi - s_hat);
    let a_hat = s1_hat + params.kappa * s2_hat;
    let center = match center_coefficients(r1_hat, r2_hat, orientation, params, quad) {
        Ok(c) => Some(c),
        Err(RingError::NoCenter(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(EquilibriumConfig {
        type_tag,
        orientation,
        xi_hat,
        r1_hat,
        r2_hat,
        s1_hat,
        s2_hat,
        eta: stag.eta,
        x_plus: stag.x_plus,
        x_minus: stag.x_minus,
        s_hat,
        eps_star,
        a_hat,
        center,
    })
}
