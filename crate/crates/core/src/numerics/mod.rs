//! Shared numerical kernels: complete elliptic integrals, the σ-quadrature
//! kernels behind every velocity/Hamiltonian evaluation, fixed-step RK4
//! integration, root finding, interpolation, and least-squares fits.

pub mod elliptic;
pub mod fit;
pub mod interp;
pub mod ode;
pub mod quad;
pub mod root;

pub use elliptic::elliptic_ke;
pub use fit::{fit_cosine, fit_line, CosineFit, LineFit};
pub use interp::CubicHermite;
pub use ode::{rk4_integrate, rk4_step, AbortInfo, IntegratorSpec, Trajectory};
pub use quad::{
    sigma_all_moments, sigma_kernel, sigma_moments, KernelPower, KernelWeight, PowerMoments,
    QuadratureSpec, SigmaMoments,
};
pub use root::{bisect, find_root, newton, picard, Root, RootProblem};
