//! Evaluation of the radial profile
//!
//! ```text
//! φ(t) = exp(−α (1 + tan(π/2 · t²))²)   0 ≤ t < 1
//! φ(t) = 0                              t ≥ 1
//! ```
//!
//! and of the derivatives of `t ↦ φ(√t)`, which take the closed form
//! `e^{−α(1+u)²} (−1)^j α (π/2)^j (1+u²) F_j(α, u)` with `u = tan(π/2 · t)`.
//!
//! Note the two substitutions: the profile uses `u = tan(π/2 · t²)` while the
//! derivative formula works in the variable of `φ(√t)` and uses
//! `u = tan(π/2 · t)`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sympoly::BivarPoly;

/// Largest exponent `E` for which `exp(−E)` is still a nonzero double
/// (the smallest subnormal is `exp(−745.1332…)`).
pub const EXP_UNDERFLOW: f64 = 745.133_219_101_941_1;

/// Below this value of `1 − t²` the tangent is evaluated as a cotangent of the
/// complementary angle.
const COT_SWITCH: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("domain error: {0}")]
    Domain(String),
}

fn domain<T>(msg: impl Into<String>) -> Result<T, KernelError> {
    Err(KernelError::Domain(msg.into()))
}

/// Shape parameter `alpha` and support radius `delta`; the interpolation
/// kernel is `x ↦ φ(‖x‖ / delta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    alpha: f64,
    delta: f64,
}

impl KernelParams {
    pub fn new(alpha: f64, delta: f64) -> Result<Self, KernelError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return domain(format!("alpha must be positive and finite, got {alpha}"));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return domain(format!("delta must be positive and finite, got {delta}"));
        }
        Ok(Self { alpha, delta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Value of the profile; `underflowed` marks results flushed to zero because
/// the true value lies below the smallest subnormal double.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValue {
    pub value: f64,
    pub underflowed: bool,
}

fn check_alpha(alpha: f64) -> Result<(), KernelError> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        domain(format!("alpha must be positive and finite, got {alpha}"))
    }
}

/// `tan(π/2 · t²)` for `0 ≤ t < 1`, switching to the cotangent of the
/// complement close to the pole.
fn tan_of_square(t: f64) -> f64 {
    let complement = (1.0 - t) * (1.0 + t);
    if complement < COT_SWITCH {
        1.0 / (FRAC_PI_2 * complement).tan()
    } else {
        (FRAC_PI_2 * t * t).tan()
    }
}

/// Profile value without argument checks. `t` must be nonnegative and
/// `alpha` positive.
pub(crate) fn profile_unchecked(t: f64, alpha: f64) -> ProfileValue {
    if t >= 1.0 {
        return ProfileValue {
            value: 0.0,
            underflowed: false,
        };
    }
    let u = tan_of_square(t);
    let exponent = alpha * (1.0 + u) * (1.0 + u);
    if !(exponent <= EXP_UNDERFLOW) {
        return ProfileValue {
            value: 0.0,
            underflowed: true,
        };
    }
    let value = (-exponent).exp();
    ProfileValue {
        value,
        underflowed: value == 0.0,
    }
}

/// The radial profile φ(t).
pub fn phi(t: f64, alpha: f64) -> Result<ProfileValue, KernelError> {
    if !(t.is_finite() && t >= 0.0) {
        return domain(format!("t must be finite and nonnegative, got {t}"));
    }
    check_alpha(alpha)?;
    Ok(profile_unchecked(t, alpha))
}

/// The multivariate kernel `φ(‖x‖ / δ)`.
pub fn phi_nd(x: &[f64], params: &KernelParams) -> Result<f64, KernelError> {
    if x.is_empty() {
        return domain("empty point");
    }
    if x.iter().any(|c| !c.is_finite()) {
        return domain("non-finite coordinate");
    }
    let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(profile_unchecked(norm / params.delta, params.alpha).value)
}

/// The `j`-th derivative of `t ↦ φ(√t)` at `t ∈ (0, 1)`, assembled from the
/// derivative polynomial `fj = F_j`.
pub fn phi_sqrt_deriv(t: f64, alpha: f64, j: u32, fj: &BivarPoly) -> Result<f64, KernelError> {
    if !(t > 0.0 && t < 1.0) {
        return domain(format!("t must lie in (0, 1), got {t}"));
    }
    check_alpha(alpha)?;
    if j == 0 {
        return domain("derivative order must be at least 1");
    }
    let (deg_alpha, deg_u) = (fj.degree_alpha(), fj.degree_u());
    if deg_alpha != Some(j - 1) || deg_u != Some(3 * (j - 1) + 1) {
        return domain(format!(
            "polynomial with degrees ({deg_alpha:?}, {deg_u:?}) is not F_{j}"
        ));
    }

    let u = (FRAC_PI_2 * t).tan();
    let f = fj.eval_f64(alpha, u);
    if f == 0.0 {
        return Ok(0.0);
    }
    let sign = if (j % 2 == 1) ^ (f < 0.0) { -1.0 } else { 1.0 };
    let exponent = alpha * (1.0 + u) * (1.0 + u);
    let scale = alpha * FRAC_PI_2.powi(j as i32) * (1.0 + u * u);
    let direct = (-exponent).exp() * scale * f.abs();
    if direct.is_normal() {
        return Ok(sign * direct);
    }
    let log_mag = -exponent + scale.ln() + f.abs().ln();
    Ok(sign * log_mag.exp())
}
