//! Complete elliptic integrals K(λ) and E(λ) by the arithmetic–geometric
//! mean, in the **modulus** convention:
//!
//! K(λ) = ∫₀^{π/2} (1 − λ² sin²θ)^{−1/2} dθ,
//! E(λ) = ∫₀^{π/2} (1 − λ² sin²θ)^{1/2} dθ.
//!
//! AGM iteration (DLMF 19.8): a₀ = 1, b₀ = √(1−λ²), c₀ = λ,
//! a_{n+1} = (a_n+b_n)/2, b_{n+1} = √(a_n b_n), c_{n+1} = (a_n−b_n)/2;
//! then K = π/(2 a_∞) and E = K·(1 − Σ_n 2^{n−1} c_n²).

use crate::error::{Result, RingError};
use std::f64::consts::FRAC_PI_2;

/// Complete elliptic integrals (K(λ), E(λ)) for modulus 0 ≤ λ < 1,
/// accurate to full double precision (the AGM converges quadratically).
pub fn elliptic_ke(lambda: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(RingError::Domain(format!(
            "elliptic modulus must satisfy 0 <= lambda < 1, got {lambda}"
        )));
    }
    let mut a = 1.0f64;
    let mut b = (1.0 - lambda * lambda).sqrt();
    let mut c = lambda;
    let mut c_sum = 0.5 * c * c; // Σ 2^{n-1} c_n², n = 0 term
    let mut pow2 = 0.5;
    // Terminate at rounding level. Both exits matter: once a and b agree to
    // an ulp, c can freeze at ±ulp/2 while pow2 keeps doubling, so letting
    // the loop spin would amplify pure noise into the E sum. The iteration
    // cap alone bounds any residual noise term by 2²⁴·(ε·a)² ≈ 1e-24.
    for _ in 0..24 {
        if c.abs() < f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if an == a && bn == b {
            break;
        }
        c = 0.5 * (a - b);
        a = an;
        b = bn;
        pow2 *= 2.0;
        c_sum += pow2 * c * c;
    }
    let k = FRAC_PI_2 / a;
    let e = k * (1.0 - c_sum);
    Ok((k, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_zero_gives_half_pi() {
        let (k, e) = elliptic_ke(0.0).unwrap();
        assert!((k - FRAC_PI_2).abs() < 1e-15);
        assert!((e - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn half_modulus_matches_reference() {
        // Frozen from an independent arbitrary-precision evaluation.
        let (k, e) = elliptic_ke(0.5).unwrap();
        assert!((k - 1.685750354812596).abs() < 1e-13, "K = {k}");
        assert!((e - 1.467462209339427).abs() < 1e-13, "E = {e}");
    }

    #[test]
    fn near_unit_modulus_is_finite() {
        let (k, e) = elliptic_ke(1.0 - 1e-12).unwrap();
        assert!(k.is_finite() && k > 10.0, "K = {k}");
        assert!((e - 1.0).abs() < 1e-6, "E = {e}");
    }

    #[test]
    fn stuck_iteration_modulus_stays_full_precision() {
        // At this modulus a−b lands at −1 ulp mid-iteration; a naive loop
        // freezes there while the 2ⁿ weights grow, corrupting E at ~1e-13.
        // Reference values from arbitrary-precision evaluation.
        let (k, e) = elliptic_ke(0.402973219432047058).unwrap();
        assert!((k - 1.6411415783991708545).abs() < 4e-16, "K = {k:.17e}");
        assert!((e - 1.504940925606397001).abs() < 4e-16, "E = {e:.17e}");
        assert!(
            (k - e - 0.13620065279277385343).abs() < 4e-16,
            "K-E = {:.17e}",
            k - e
        );
    }

    #[test]
    fn domain_is_enforced() {
        assert!(elliptic_ke(1.0).is_err());
        assert!(elliptic_ke(-0.1).is_err());
        assert!(elliptic_ke(f64::NAN).is_err());
    }

    #[test]
    fn agm_matches_direct_quadrature() {
        // Adaptive-free check: order-192 Gauss–Legendre of the definitions is
        // effectively exact for these modest moduli.
        let rule = crate::numerics::quad::gl_unit_rule(192);
        for lam in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
            let (mut qk, mut qe) = (0.0, 0.0);
            for (&xi, &wi) in rule.nodes.iter().zip(rule.weights.iter()) {
                let theta = FRAC_PI_2 * xi;
                let s = theta.sin();
                let root = (1.0 - lam * lam * s * s).sqrt();
                qk += FRAC_PI_2 * wi / root;
                qe += FRAC_PI_2 * wi * root;
            }
            let (k, e) = elliptic_ke(lam).unwrap();
            assert!((k - qk).abs() < 1e-10 * qk, "K({lam}): {k} vs {qk}");
            assert!((e - qe).abs() < 1e-10 * qe, "E({lam}): {e} vs {qe}");
        }
    }
}
