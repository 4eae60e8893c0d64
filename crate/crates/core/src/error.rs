//! Error taxonomy shared by every module of the crate.
//!
//! The variants map onto the three failure classes the CLI distinguishes:
//! configuration problems ([`RingError::Domain`], [`RingError::Degenerate`]),
//! iterative schemes that fail to converge ([`RingError::Convergence`]), and
//! runtime singularities of the vortex kernels ([`RingError::Singularity`],
//! [`RingError::Range`]).

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, RingError>;

/// Everything that can go wrong inside the numerical core.
#[derive(Debug, Clone, thiserror::Error)]
pub enum RingError {
    /// Input outside the mathematical domain of an operation
    /// (negative radius, modulus ≥ 1, amplitude above its bound, …).
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative scheme exhausted its budget without meeting tolerance.
    #[error("convergence failure in {what}: {iterations} iterations, residual {residual:.3e}")]
    Convergence {
        what: String,
        iterations: usize,
        residual: f64,
    },

    /// A vortex-kernel evaluation came closer to a filament core than the
    /// configured threshold; the integrand is effectively singular there.
    #[error("singularity in {context}: min kernel separation {min_delta:.3e}")]
    Singularity { context: String, min_delta: f64 },

    /// Evaluation outside the stored range of a sampled object
    /// (trajectory interpolation, trace lookup).
    #[error("range error: {0}")]
    Range(String),

    /// Structurally degenerate input (coincident rings, empty sample set,
    /// vanishing denominator in a coefficient formula).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The requested stationary configuration has no center subspace:
    /// the frequency formula has a negative radicand and the spectrum of
    /// the ring Jacobian carries no pure imaginary pair either.
    #[error("no center subspace: {0}")]
    NoCenter(String),
}

impl RingError {
    /// Process exit code the CLI maps this error onto:
    /// 1 = configuration, 2 = convergence, 3 = singularity/runtime.
    pub fn exit_code(&self) -> i32 {
        match self {
            RingError::Domain(_) | RingError::Degenerate(_) => 1,
            RingError::Convergence { .. } | RingError::NoCenter(_) => 2,
            RingError::Singularity { .. } | RingError::Range(_) => 3,
        }
    }

    /// Short machine-readable tag for manifests and error records.
    pub fn kind(&self) -> &'static str {
        match self {
            RingError::Domain(_) => "domain",
            RingError::Convergence { .. } => "convergence",
            RingError::Singularity { .. } => "singularity",
            RingError::Range(_) => "range",
            RingError::Degenerate(_) => "degenerate",
            RingError::NoCenter(_) => "no_center",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_partition_the_taxonomy() {
        assert_eq!(RingError::Domain("x".into()).exit_code(), 1);
        assert_eq!(RingError::Degenerate("x".into()).exit_code(), 1);
        assert_eq!(
            RingError::Convergence {
                what: "x".into(),
                iterations: 3,
                residual: 1.0
            }
            .exit_code(),
            2
        );
        assert_eq!(RingError::NoCenter("x".into()).exit_code(), 2);
        assert_eq!(
            RingError::Singularity {
                context: "x".into(),
                min_delta: 0.0
            }
            .exit_code(),
            3
        );
        assert_eq!(RingError::Range("x".into()).exit_code(), 3);
    }

    #[test]
    fn display_is_informative() {
        let e = RingError::Convergence {
            what: "coupled radii".into(),
            iterations: 42,
            residual: 1.5e-3,
        };
        let s = e.to_string();
        assert!(s.contains("coupled radii"));
        assert!(s.contains("42"));
    }
}
