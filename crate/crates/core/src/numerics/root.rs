//! Scalar root finding: bracketed bisection, Newton, and damped Picard
//! (fixed-point) iteration, plus a method-dispatching facade.

use crate::error::{Result, RingError};

/// Default absolute tolerance on residuals / iterate changes.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Iteration cap for Picard fixed-point schemes.
pub const PICARD_MAX_ITER: usize = 10_000;
/// Iteration cap for bisection (interval shrinks by 2^-n).
pub const BISECT_MAX_ITER: usize = 200;
/// Iteration cap for Newton.
pub const NEWTON_MAX_ITER: usize = 100;

/// A converged root/fixed point with its diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    /// |f(x)| for residual-based methods, |x_{n+1} − x_n| for Picard.
    pub residual: f64,
    pub iterations: usize,
}

/// Bracketed bisection on [lo, hi]; requires a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<Root> {
    if !(lo < hi) {
        return Err(RingError::Domain(format!(
            "bisection bracket must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(RingError::Convergence {
            what: format!("bisection bracket [{lo}, {hi}] (no sign change)"),
            iterations: 0,
            residual: fa.abs().min(fb.abs()),
        });
    }
    for it in 1..=BISECT_MAX_ITER {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 || (b - a) < tol.max(f64::EPSILON * mid.abs() * 4.0) || fm.abs() < tol {
            return Ok(Root {
                x: mid,
                residual: fm.abs(),
                iterations: it,
            });
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let mid = 0.5 * (a + b);
    Ok(Root {
        x: mid,
        residual: f(mid).abs(),
        iterations: BISECT_MAX_ITER,
    })
}

/// Newton iteration from a seed; `f_df` returns (f, f′).
pub fn newton(f_df: impl Fn(f64) -> (f64, f64), seed: f64, tol: f64) -> Result<Root> {
    let mut x = seed;
    for it in 1..=NEWTON_MAX_ITER {
        let (fx, dfx) = f_df(x);
        if fx.abs() < tol {
            return Ok(Root {
                x,
                residual: fx.abs(),
                iterations: it,
            });
        }
        if dfx == 0.0 || !dfx.is_finite() {
            return Err(RingError::Convergence {
                what: format!("newton derivative degenerate at x={x}"),
                iterations: it,
                residual: fx.abs(),
            });
        }
        let step = fx / dfx;
        x -= step;
        if !x.is_finite() {
            return Err(RingError::Convergence {
                what: "newton iterate diverged".into(),
                iterations: it,
                residual: fx.abs(),
            });
        }
        if step.abs() < tol.max(f64::EPSILON * x.abs()) {
            let (fx, _) = f_df(x);
            return Ok(Root {
                x,
                residual: fx.abs(),
                iterations: it,
            });
        }
    }
    let (fx, _) = f_df(x);
    Err(RingError::Convergence {
        what: "newton".into(),
        iterations: NEWTON_MAX_ITER,
        residual: fx.abs(),
    })
}

/// Damped Picard iteration x ← (1−ω)x + ω·g(x) from a seed; converges to a
/// fixed point of `map` when the damped map is contractive. `damping` = 1
/// gives the plain iteration.
pub fn picard(map: impl Fn(f64) -> f64, seed: f64, damping: f64, tol: f64) -> Result<Root> {
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(RingError::Domain(format!(
            "picard damping must lie in (0, 1], got {damping}"
        )));
    }
    let mut x = seed;
    for it in 1..=PICARD_MAX_ITER {
        let gx = map(x);
        if !gx.is_finite() {
            return Err(RingError::Convergence {
                what: format!("picard map returned non-finite value at x={x}"),
                iterations: it,
                residual: f64::INFINITY,
            });
        }
        let next = (1.0 - damping) * x + damping * gx;
        let change = (next - x).abs();
        x = next;
        if change < tol.max(f64::EPSILON * x.abs() * 4.0) {
            return Ok(Root {
                x,
                residual: change,
                iterations: it,
            });
        }
    }
    Err(RingError::Convergence {
        what: "picard".into(),
        iterations: PICARD_MAX_ITER,
        residual: (map(x) - x).abs(),
    })
}

/// Problem description for the [`find_root`] facade.
pub enum RootProblem<'a> {
    /// Bracketed residual problem.
    Bisection {
        f: &'a dyn Fn(f64) -> f64,
        lo: f64,
        hi: f64,
    },
    /// Seeded Newton problem; the closure returns (f, f′).
    Newton {
        f_df: &'a dyn Fn(f64) -> (f64, f64),
        seed: f64,
    },
    /// Seeded fixed-point problem with damping factor ω ∈ (0, 1].
    Picard {
        map: &'a dyn Fn(f64) -> f64,
        seed: f64,
        damping: f64,
    },
}

/// Dispatching facade over the three root-finding methods.
pub fn find_root(problem: RootProblem<'_>, tol: f64) -> Result<Root> {
    match problem {
        RootProblem::Bisection { f, lo, hi } => bisect(f, lo, hi, tol),
        RootProblem::Newton { f_df, seed } => newton(f_df, seed, tol),
        RootProblem::Picard { map, seed, damping } => picard(map, seed, damping, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 1.0, 2.0, 1e-14).unwrap();
        assert!((r.x - std::f64::consts::SQRT_2).abs() < 1e-12, "x = {}", r.x);
        assert!(r.iterations > 0);
    }

    #[test]
    fn bisection_requires_sign_change() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn newton_finds_origin_of_identity() {
        let r = newton(|x| (x, 1.0), 1.0, 1e-14).unwrap();
        assert!(r.x.abs() < 1e-14);
    }

    #[test]
    fn newton_quadratic() {
        let r = newton(|x| (x * x - 2.0, 2.0 * x), 1.0, 1e-14).unwrap();
        assert!((r.x - std::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn picard_cosine_fixed_point() {
        // The Dottie number: cos x* = x*.
        let r = picard(|x| x.cos(), 1.0, 1.0, 1e-14).unwrap();
        assert!((r.x - 0.739_085_133_215_160_6).abs() < 1e-12, "x = {}", r.x);
    }

    #[test]
    fn picard_rejects_bad_damping() {
        assert!(picard(|x| x, 0.0, 0.0, 1e-12).is_err());
        assert!(picard(|x| x, 0.0, 1.5, 1e-12).is_err());
    }

    #[test]
    fn facade_dispatches() {
        let f = |x: f64| x * x - 2.0;
        let r = find_root(
            RootProblem::Bisection {
                f: &f,
                lo: 1.0,
                hi: 2.0,
            },
            1e-13,
        )
        .unwrap();
        assert!((r.x - std::f64::consts::SQRT_2).abs() < 1e-11);
    }
}
