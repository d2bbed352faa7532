//! Degrading, pinching Bouc-Wen hysteresis in the Baber-Noori form.
//!
//! A story with drift u and elastic stiffness k carries the restoring
//! force F = α·k·u + (1−α)·k·z, where the hysteretic displacement z
//! follows
//!
//! ```text
//! ż = h(z, ė) · [ A·u̇ − ν(e)·( β·|u̇|·|z|^{n−1}·z + γ·u̇·|z|^n ) ] / η(e)
//! ė = (1−α)·z·u̇
//! ```
//!
//! with dissipation-driven degradation of strength, ν(e) = 1 + δ_ν·e, and
//! stiffness, η(e) = 1 + δ_η·e, and a pinching multiplier
//!
//! ```text
//! h = 1 − ζ₁(e) · exp( −(z·sgn(u̇) − q·z_u)² / ζ₂(e)² )
//! ζ₁ = ζ_s·(1 − e^{−p·e})          (pinching severity)
//! ζ₂ = (ψ + δ_ψ·e)·(λ + ζ₁)        (pinching spread)
//! z_u = [1 / (ν·(β + γ))]^{1/n}    (ultimate hysteretic displacement)
//! ```
//!
//! The energy tracker e is the dissipated hysteretic work per unit story
//! stiffness (units of length²), so all δ coefficients are rates per unit
//! of that quantity. At e = 0 the pinching multiplier is 1 and z tracks u
//! for small amplitudes, giving an elastic tangent of k.

use crate::{cast, Scalar};

use super::ValidationError;

/// Parameters of one story's hysteresis law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoucWenParams<T> {
    /// Pinching growth exponent.
    pub p: T,
    /// Initial pinching spread.
    pub psi: T,
    /// Pinching spread base factor.
    pub lambda: T,
    /// Pinching offset as a fraction of the ultimate hysteretic displacement.
    pub q: T,
    /// Transition sharpness; larger is closer to bilinear.
    pub n: T,
    /// Post-yield to elastic stiffness ratio.
    pub alpha: T,
    /// Softening shape coefficient (per length^n).
    pub beta: T,
    /// Hardening/softening shape coefficient (per length^n).
    pub gamma: T,
    /// Hysteretic amplitude scale.
    pub a_amp: T,
    /// Asymptotic pinching severity.
    pub zeta_s: T,
    /// Pinching-spread degradation rate.
    pub delta_psi: T,
    /// Strength degradation rate.
    pub delta_nu: T,
    /// Stiffness degradation rate.
    pub delta_eta: T,
}

impl<T: Scalar> BoucWenParams<T> {
    /// Degrading steel-frame calibration used by the bundled example
    /// model: moderate pinching, slow energy-driven degradation, 4%
    /// post-yield stiffness.
    pub fn degrading_example() -> Self {
        Self {
            p: cast(2.0),
            psi: cast(0.05),
            lambda: cast(0.5),
            q: cast(0.25),
            n: cast(1.0),
            alpha: cast(0.04),
            beta: cast(280.0),
            gamma: cast(160.0),
            a_amp: cast(1.0),
            zeta_s: cast(0.99),
            delta_psi: cast(0.005),
            delta_nu: cast(0.002),
            delta_eta: cast(0.001),
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let bad = |msg: String| Err(ValidationError::BadHysteresis(msg));
        if !(self.n >= T::one()) {
            return bad(format!("n must be >= 1, got {}", self.n));
        }
        if !(self.a_amp > T::zero()) {
            return bad(format!("A must be positive, got {}", self.a_amp));
        }
        if !(self.alpha > T::zero() && self.alpha <= T::one()) {
            return bad(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if !(self.beta + self.gamma > T::zero()) {
            return bad(format!(
                "beta + gamma must be positive (softening), got {}",
                self.beta + self.gamma
            ));
        }
        let nonneg = [
            ("p", self.p),
            ("psi", self.psi),
            ("lambda", self.lambda),
            ("q", self.q),
            ("zeta_s", self.zeta_s),
            ("delta_psi", self.delta_psi),
            ("delta_nu", self.delta_nu),
            ("delta_eta", self.delta_eta),
        ];
        for (name, v) in nonneg {
            if !(v >= T::zero()) || !v.is_finite() {
                return bad(format!("{name} must be nonnegative, got {v}"));
            }
        }
        if !(self.zeta_s < T::one()) {
            return bad(format!("zeta_s must be < 1, got {}", self.zeta_s));
        }
        Ok(())
    }
}

/// Evolving hysteretic state of one story.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoucWenState<T> {
    /// Hysteretic displacement z (length units).
    pub z: T,
    /// Dissipated hysteretic work per unit stiffness (length²).
    pub energy: T,
}

/// Time derivatives of the hysteretic state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoucWenRates<T> {
    pub dz: T,
    pub denergy: T,
}

/// Evaluates the rate law. The rate vanishes with the drift velocity, and
/// the state must be finite.
pub fn bouc_wen_rate<T: Scalar>(
    state: BoucWenState<T>,
    drift_velocity: T,
    params: &BoucWenParams<T>,
) -> Result<BoucWenRates<T>, ValidationError> {
    if !state.z.is_finite() || !state.energy.is_finite() || !drift_velocity.is_finite() {
        return Err(ValidationError::NonFiniteState);
    }
    let e = state.energy;
    let z = state.z;
    let v = drift_velocity;

    let nu = T::one() + params.delta_nu * e;
    let eta = T::one() + params.delta_eta * e;

    let z_abs = z.abs();
    // |z|^{n-1}·z and |z|^n, well-defined at z = 0 for n >= 1.
    let zn_signed = if z_abs == T::zero() {
        T::zero()
    } else {
        z_abs.powf(params.n - T::one()) * z
    };
    let zn = z_abs.powf(params.n);

    let core = params.a_amp * v - nu * (params.beta * v.abs() * zn_signed + params.gamma * v * zn);

    // Pinching multiplier; h = 1 exactly until dissipation accrues.
    let zeta1 = params.zeta_s * (T::one() - (-params.p * e).exp());
    let h = if zeta1 > T::zero() {
        let zeta2 = (params.psi + params.delta_psi * e) * (params.lambda + zeta1);
        if zeta2 > T::zero() {
            let z_u = (T::one() / (nu * (params.beta + params.gamma)))
                .powf(T::one() / params.n);
            let arg = z * v.signum_or_zero() - params.q * z_u;
            T::one() - zeta1 * (-(arg * arg) / (zeta2 * zeta2)).exp()
        } else {
            T::one() - zeta1
        }
    } else {
        T::one()
    };

    Ok(BoucWenRates {
        dz: h * core / eta,
        denergy: (T::one() - params.alpha) * z * v,
    })
}

trait SignumOrZero {
    fn signum_or_zero(self) -> Self;
}

impl<T: Scalar> SignumOrZero for T {
    /// `signum` with 0 at 0 (`Float::signum(0.0)` is 1).
    fn signum_or_zero(self) -> Self {
        if self == T::zero() {
            T::zero()
        } else {
            self.signum()
        }
    }
}
