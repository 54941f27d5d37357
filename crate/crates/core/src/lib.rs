//! A compactly supported, infinitely smooth radial basis function
//!
//! ```text
//! Φ(x) = exp(−α (1 + tan(π/2 ‖x‖²))²)   for ‖x‖ < 1,   0 otherwise
//! ```
//!
//! together with the machinery needed to use it with confidence:
//!
//! * [`kernel`]: stable evaluation of the profile φ, the multivariate kernel
//!   and the derivatives of `t ↦ φ(√t)`.
//! * [`sympoly`]: exact integer polynomials in `(α, u)` and the recurrence
//!   generating the derivative polynomials `F_j`.
//! * [`positivity`]: Sturm-sequence certificates that `F_j(α, ·) ≥ 0` on
//!   `[0, ∞)`, per-dimension reports of the sign conditions and bisection for
//!   the smallest admissible shape parameter.
//! * [`interp`]: sparse scattered-data interpolation built on the kernel.

pub mod kernel;
pub mod positivity;
pub mod rational;
pub mod sympoly;
pub mod univariate;

pub mod interp;

pub use interp::{
    assemble, cholesky, evaluate, fill_distance, fit, min_eig_estimate, wendland_c2, BoxDomain,
    InterpError, Interpolant, PointSet, SparseSymMatrix,
};
pub use kernel::{phi, phi_nd, phi_sqrt_deriv, KernelError, KernelParams, ProfileValue};
pub use positivity::{
    check_dimension, find_alpha_min, grid_prescreen, sturm_nonneg_on_ray, AlphaInterval,
    DimensionReport, Method, SignCertificate, Verdict,
};
pub use sympoly::{f_next, f_seed, f_sequence, BivarPoly, LeadingTerm};
pub use univariate::UniPoly;
