//! Linear SDOF base-excitation response by the piecewise-exact method.
//!
//! Relative coordinates, unit mass:
//!
//! ```text
//! ẍ + 2ζω ẋ + ω² x = −a_g(t),    ω = 2π/T
//! ```
//!
//! Within each sample interval the ground acceleration is taken affine in
//! time, for which the ODE has a closed-form solution; the update below
//! evaluates it exactly at the nodes. The scheme has no stability limit
//! and its only error is the piecewise-linear rendering of the input, so
//! one step per sample is exact for piecewise-linear excitation at any
//! period, including periods far below the sample interval.
//!
//! The reported absolute acceleration is ẍ + a_g = −(2ζω ẋ + ω² x),
//! in the input's units (g in, g out; displacement then carries g·s²).

use super::SpectraError;
use crate::signal::AccelTimeSeries;
use crate::{cast, Scalar};

/// Relative displacement/velocity and absolute acceleration histories,
/// one value per input sample, zero initial conditions.
#[derive(Debug, Clone)]
pub struct SdofResponse<T> {
    pub disp: Vec<T>,
    pub vel: Vec<T>,
    pub abs_acc: Vec<T>,
}

/// Precomputed exact-update coefficients for one (period, damping, dt).
pub(crate) struct SdofStepper<T> {
    omega: T,
    two_zeta_omega: T,
    omega_d: T,
    exp_c: T, // e^{-ζω dt} cos(ω_d dt)
    exp_s: T, // e^{-ζω dt} sin(ω_d dt)
    dt: T,
}

impl<T: Scalar> SdofStepper<T> {
    pub(crate) fn new(period: T, zeta: T, dt: T) -> Result<Self, SpectraError> {
        if !(period > T::zero()) || !period.is_finite() {
            return Err(SpectraError::BadPeriod(format!("{period}")));
        }
        if !(zeta >= T::zero() && zeta < T::one()) {
            return Err(SpectraError::BadDamping(format!("{zeta}")));
        }
        let omega = cast::<T>(2.0) * T::PI() / period;
        let omega_d = omega * (T::one() - zeta * zeta).sqrt();
        let e = (-zeta * omega * dt).exp();
        Ok(Self {
            omega,
            two_zeta_omega: cast::<T>(2.0) * zeta * omega,
            omega_d,
            exp_c: e * (omega_d * dt).cos(),
            exp_s: e * (omega_d * dt).sin(),
            dt,
        })
    }

    /// Advances (x, v) across one interval with ground acceleration going
    /// linearly from `a0` to `a1`; returns the state at the interval end.
    #[inline]
    pub(crate) fn step(&self, x0: T, v0: T, a0: T, a1: T) -> (T, T) {
        let w2 = self.omega * self.omega;
        let zeta_omega = self.two_zeta_omega / cast::<T>(2.0);
        // Forcing p(τ) = α + βτ with p = −a_g.
        let alpha = -a0;
        let beta = -(a1 - a0) / self.dt;
        // Particular solution x_p(τ) = xp0 + vp·τ.
        let vp = beta / w2;
        let xp0 = alpha / w2 - self.two_zeta_omega * vp / w2;
        let c1 = x0 - xp0;
        let c2 = (v0 - vp + zeta_omega * c1) / self.omega_d;
        let x1 = c1 * self.exp_c + c2 * self.exp_s + xp0 + vp * self.dt;
        let v1 = (self.omega_d * c2 - zeta_omega * c1) * self.exp_c
            - (self.omega_d * c1 + zeta_omega * c2) * self.exp_s
            + vp;
        (x1, v1)
    }

    /// Absolute acceleration from the state: −(2ζω v + ω² x).
    #[inline]
    pub(crate) fn abs_acc(&self, x: T, v: T) -> T {
        -(self.two_zeta_omega * v + self.omega * self.omega * x)
    }
}

/// Full response history of a damped linear SDOF under base excitation.
pub fn sdof_response<T: Scalar>(
    ground: &AccelTimeSeries<T>,
    period: T,
    damping_ratio: T,
) -> Result<SdofResponse<T>, SpectraError> {
    let stepper = SdofStepper::new(period, damping_ratio, ground.dt())?;
    let n = ground.len();
    let mut disp = Vec::with_capacity(n);
    let mut vel = Vec::with_capacity(n);
    let mut abs_acc = Vec::with_capacity(n);
    let mut x = T::zero();
    let mut v = T::zero();
    disp.push(x);
    vel.push(v);
    abs_acc.push(stepper.abs_acc(x, v));
    let samples = ground.samples();
    for i in 1..n {
        let (x1, v1) = stepper.step(x, v, samples[i - 1], samples[i]);
        x = x1;
        v = v1;
        disp.push(x);
        vel.push(v);
        abs_acc.push(stepper.abs_acc(x, v));
    }
    Ok(SdofResponse { disp, vel, abs_acc })
}

/// Absolute-acceleration history ẍ + a_g of the damped oscillator, g.
pub fn sdof_absolute_accel<T: Scalar>(
    ground: &AccelTimeSeries<T>,
    period: T,
    damping_ratio: T,
) -> Result<Vec<T>, SpectraError> {
    Ok(sdof_response(ground, period, damping_ratio)?.abs_acc)
}
