//! Shared model types: physical parameters, phase-space states, and the
//! configuration-type tag for the four stationary ring arrangements.

use crate::error::{Result, RingError};
use crate::numerics::quad::gl_unit_rule;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

/// Strength of the first ring; the model is normalized so only the ratio
/// κ = κ₂/κ₁ ≥ 1 remains free.
pub const KAPPA_1: f64 = 1.0;

/// Core smoothing constant γ of the desingularized self-induction law, for a
/// Gaussian vorticity core: γ = ½(1 + ln 2 + ∫₀^∞ e^{−u} ln u du).
///
/// Computed once from the integral definition (series on [0,1], composite
/// Gauss–Legendre on [1,∞)) and cached; ≈ 0.5580.
pub fn core_gamma() -> f64 {
    static CORE_GAMMA: OnceLock<f64> = OnceLock::new();
    *CORE_GAMMA.get_or_init(|| {
        // ∫₀¹ e^{−u} ln u du = −Σ_{n≥0} (−1)ⁿ / (n! (n+1)²)
        // from term-wise integration of the exponential series.
        let mut head = 0.0f64;
        let mut inv_fact = 1.0f64;
        for n in 0..30usize {
            if n > 0 {
                inv_fact /= n as f64;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let np1 = (n + 1) as f64;
            head -= sign * inv_fact / (np1 * np1);
        }
        // ∫₁^∞ e^{−u} ln u du on graded panels; e^{−42} ≈ 6e-19 truncates the tail.
        let rule = gl_unit_rule(96);
        let mut tail = 0.0f64;
        for win in [(1.0, 6.0), (6.0, 14.0), (14.0, 26.0), (26.0, 42.0)] {
            let (a, b) = win;
            let span = b - a;
            for (&xi, &wi) in rule.nodes.iter().zip(rule.weights.iter()) {
                let u = a + span * xi;
                tail += span * wi * (-u).exp() * u.ln();
            }
        }
        0.5 * (1.0 + std::f64::consts::LN_2 + head + tail)
    })
}

/// Physical and ambient-flow parameters of the two-ring model.
///
/// The ambient swirl advects with axial speed −α(1 + a₁s + a₂s²) and rotates
/// with angular rate Ω(1 + b₁s + b₂s²); the default profile coefficients are
/// zero (uniform swirl). χ is the inverse core scale of the desingularization
/// (core radius δ = 8/χ) and γ the matching core constant.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelParams {
    /// Axial swirl speed, α > 0.
    pub alpha: f64,
    /// Ring-strength ratio κ ≥ 1 (first ring normalized to strength 1).
    pub kappa: f64,
    /// Inverse core scale, χ > 8 (default 1000).
    pub chi: f64,
    /// Core constant of the self-induction law (from [`core_gamma`]).
    pub gamma_const: f64,
    /// Swirl angular rate Ω; `None` resolves to the configuration's
    /// oscillation frequency ν downstream (the resonant convention).
    pub omega: Option<f64>,
    /// Default oscillation amplitude μ (0 = steady rings).
    pub mu: f64,
    /// Axial swirl profile coefficients (quadratic in s), default 0.
    pub a1: f64,
    pub a2: f64,
    /// Angular swirl profile coefficients (quadratic in s), default 0.
    pub b1: f64,
    pub b2: f64,
}

impl ModelParams {
    /// Standard parameter set at the default inverse core scale χ = 1000.
    pub fn new(alpha: f64, kappa: f64) -> Result<Self> {
        Self::with_chi(alpha, kappa, 1000.0)
    }

    /// Parameter set with an explicit inverse core scale.
    pub fn with_chi(alpha: f64, kappa: f64, chi: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(RingError::Domain(format!(
                "alpha must be positive and finite, got {alpha}"
            )));
        }
        if !kappa.is_finite() || kappa < 1.0 {
            return Err(RingError::Domain(format!(
                "kappa must satisfy kappa >= 1 (second ring is the stronger one), got {kappa}"
            )));
        }
        if !chi.is_finite() || chi <= 8.0 {
            return Err(RingError::Domain(format!(
                "chi must exceed 8 (core radius 8/chi below the ring scale), got {chi}"
            )));
        }
        Ok(Self {
            alpha,
            kappa,
            chi,
            gamma_const: core_gamma(),
            omega: None,
            mu: 0.0,
            a1: 0.0,
            a2: 0.0,
            b1: 0.0,
            b2: 0.0,
        })
    }

    /// Ring strength of ring k ∈ {1, 2}.
    pub fn strength(&self, k: usize) -> f64 {
        match k {
            1 => KAPPA_1,
            2 => self.kappa,
            _ => panic!("ring index must be 1 or 2, got {k}"),
        }
    }

    /// Radius ρ at which the reduced self-induction speed ψ(r) peaks:
    /// ρ = e^{γ+1}/χ.
    pub fn rho(&self) -> f64 {
        (self.gamma_const + 1.0).exp() / self.chi
    }

    /// Radius r₀ = e^γ/χ below which the reduced speed is negative;
    /// all reduced roots live above it.
    pub fn r_floor(&self) -> f64 {
        self.gamma_const.exp() / self.chi
    }

    /// Largest admissible swirl speed: ψ(ρ) = 1/(2ρ). Reduced roots exist
    /// (for both ring strengths, since κ ≥ 1) exactly when α < 1/(2ρ).
    pub fn alpha_max(&self) -> f64 {
        0.5 / self.rho()
    }

    /// Desingularized core radius δ = 8/χ.
    pub fn core_delta(&self) -> f64 {
        8.0 / self.chi
    }

    /// Reduced self-induction axial speed of an isolated ring of strength kk:
    /// ψ_kk(r) = kk/(2r)·[ln(χr) − γ].
    pub fn reduced_speed(&self, kk: f64, r: f64) -> f64 {
        kk / (2.0 * r) * ((self.chi * r).ln() - self.gamma_const)
    }
}

/// Phase point of the two-ring system: squared radii and axial positions.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RingPairState {
    pub s1: f64,
    pub s2: f64,
    pub x1: f64,
    pub x2: f64,
}

impl RingPairState {
    pub fn new(s1: f64, s2: f64, x1: f64, x2: f64) -> Self {
        Self { s1, s2, x1, x2 }
    }

    /// Radius of the first ring.
    pub fn r1(&self) -> f64 {
        self.s1.sqrt()
    }

    /// Radius of the second ring.
    pub fn r2(&self) -> f64 {
        self.s2.sqrt()
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.s1, self.s2, self.x1, self.x2]
    }

    pub fn from_array(y: [f64; 4]) -> Self {
        Self {
            s1: y[0],
            s2: y[1],
            x1: y[2],
            x2: y[3],
        }
    }

    /// Squared distance between the two filament intersection points in the
    /// meridian half-plane, (r₁−r₂)² + (x₁−x₂)².
    pub fn pair_separation_sq(&self) -> f64 {
        let dr = self.r1() - self.r2();
        let dx = self.x1 - self.x2;
        dr * dr + dx * dx
    }
}

/// Phase point of a passively advected particle in the meridian half-plane:
/// squared radial coordinate s = r² ≥ 0 and axial coordinate x.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ParticleState {
    pub s: f64,
    pub x: f64,
}

impl ParticleState {
    pub fn new(s: f64, x: f64) -> Self {
        Self { s, x }
    }

    pub fn r(&self) -> f64 {
        self.s.sqrt()
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.s, self.x]
    }

    pub fn from_array(y: [f64; 2]) -> Self {
        Self { s: y[0], x: y[1] }
    }
}

/// The four stationary arrangements of the ring pair, labeled by which
/// reduced-root branch each ring sits on (large/large, large/small,
/// small/large, small/small).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum EquilibriumType {
    I,
    II,
    III,
    IV,
}

impl EquilibriumType {
    pub const ALL: [EquilibriumType; 4] = [
        EquilibriumType::I,
        EquilibriumType::II,
        EquilibriumType::III,
        EquilibriumType::IV,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EquilibriumType::I => "I",
            EquilibriumType::II => "II",
            EquilibriumType::III => "III",
            EquilibriumType::IV => "IV",
        }
    }
}

impl fmt::Display for EquilibriumType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EquilibriumType {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(EquilibriumType::I),
            "II" | "2" => Ok(EquilibriumType::II),
            "III" | "3" => Ok(EquilibriumType::III),
            "IV" | "4" => Ok(EquilibriumType::IV),
            other => Err(RingError::Domain(format!(
                "unknown configuration type {other:?}; expected I, II, III, or IV"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_constant_matches_reference() {
        // Independent high-precision evaluation of the defining integral.
        assert!(
            (core_gamma() - 0.557_965_757_829_206_2).abs() < 1e-13,
            "core gamma = {}",
            core_gamma()
        );
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(5.0, 1.5).is_ok());
        assert!(ModelParams::new(-1.0, 1.5).is_err());
        assert!(ModelParams::new(5.0, 0.5).is_err());
        assert!(ModelParams::with_chi(5.0, 1.5, 4.0).is_err());
    }

    #[test]
    fn reduced_speed_peaks_at_rho() {
        let p = ModelParams::new(5.0, 1.5).unwrap();
        let rho = p.rho();
        let peak = p.reduced_speed(1.0, rho);
        assert!((peak - p.alpha_max()).abs() < 1e-12 * peak);
        // ψ is maximal at ρ.
        assert!(p.reduced_speed(1.0, rho * 1.01) < peak);
        assert!(p.reduced_speed(1.0, rho * 0.99) < peak);
        // and zero at the floor radius.
        assert!(p.reduced_speed(1.0, p.r_floor()).abs() < 1e-12);
    }

    #[test]
    fn type_tag_round_trips() {
        for t in EquilibriumType::ALL {
            assert_eq!(t.as_str().parse::<EquilibriumType>().unwrap(), t);
        }
        assert!("V".parse::<EquilibriumType>().is_err());
        assert_eq!("ii".parse::<EquilibriumType>().unwrap(), EquilibriumType::II);
    }

    #[test]
    fn state_conversions() {
        let st = RingPairState::new(0.25, 1.0, 0.1, -0.2);
        assert_eq!(RingPairState::from_array(st.as_array()), st);
        assert!((st.r1() - 0.5).abs() < 1e-15);
        let p = ParticleState::new(0.49, 0.3);
        assert!((p.r() - 0.7).abs() < 1e-15);
        assert_eq!(ParticleState::from_array(p.as_array()), p);
    }
}
