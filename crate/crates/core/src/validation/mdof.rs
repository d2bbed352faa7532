//! Shear-building simulation with per-story Bouc-Wen hysteresis.
//!
//! Floors are lumped masses in a chain; story i (1-based from the ground)
//! connects floor i to floor i−1 with restoring force
//! F_i = α_i·k_i·d_i + (1−α_i)·k_i·z_i over drift d_i = u_i − u_{i−1}.
//! With Rayleigh damping C = a·M + b·K (K the initial elastic stiffness)
//! and ground acceleration a_g, the relative-coordinate equations are
//!
//! ```text
//! M ü + C u̇ + F(d, z) = −M·1·a_g
//! ```
//!
//! The augmented state [u, v, z, e, E_damp, E_in, E_story] is integrated
//! with an adaptive Runge-Kutta scheme; the ground record is rendered
//! piecewise linear, and the state is recorded at every sample instant.
//! The trailing energy accumulators make the balance
//!
//! ```text
//! E_kin(t) + E_damp(t) + E_story(t) = E_in(t)
//! ```
//!
//! checkable to integration accuracy; E_story contains both recoverable
//! strain energy and hysteretic dissipation.

use crate::signal::AccelTimeSeries;
use crate::{cast, Scalar};

use super::bouc_wen::{bouc_wen_rate, BoucWenParams, BoucWenState};
use super::ode::{integrate_to, OdeOptions};
use super::ValidationError;

/// Standard gravity, m/s² per g.
pub const GRAVITY: f64 = 9.80665;

/// Lumped-mass shear building with degrading hysteretic stories.
/// Units: kg, N/m, m; Rayleigh a in 1/s, b in s.
#[derive(Debug, Clone, PartialEq)]
pub struct MdofModel<T> {
    masses: Vec<T>,
    stiffnesses: Vec<T>,
    heights: Vec<T>,
    hysteresis: Vec<BoucWenParams<T>>,
    rayleigh_a: T,
    rayleigh_b: T,
}

impl<T: Scalar> MdofModel<T> {
    pub fn new(
        masses: Vec<T>,
        stiffnesses: Vec<T>,
        heights: Vec<T>,
        hysteresis: Vec<BoucWenParams<T>>,
        rayleigh_a: T,
        rayleigh_b: T,
    ) -> Result<Self, ValidationError> {
        let n = masses.len();
        if n == 0 {
            return Err(ValidationError::BadModel("at least one story".into()));
        }
        if stiffnesses.len() != n || heights.len() != n || hysteresis.len() != n {
            return Err(ValidationError::BadModel(format!(
                "per-story arrays must all have length {n}"
            )));
        }
        for (name, arr) in [("mass", &masses), ("stiffness", &stiffnesses), ("height", &heights)] {
            if let Some(v) = arr.iter().find(|v| !(**v > T::zero()) || !v.is_finite()) {
                return Err(ValidationError::BadModel(format!(
                    "{name} values must be positive, got {v}"
                )));
            }
        }
        if !(rayleigh_a >= T::zero()) || !(rayleigh_b >= T::zero()) {
            return Err(ValidationError::BadModel(
                "Rayleigh coefficients must be nonnegative".into(),
            ));
        }
        for params in &hysteresis {
            params.validate()?;
        }
        Ok(Self {
            masses,
            stiffnesses,
            heights,
            hysteresis,
            rayleigh_a,
            rayleigh_b,
        })
    }

    /// Same hysteresis parameters for every story.
    pub fn uniform_hysteresis(
        masses: Vec<T>,
        stiffnesses: Vec<T>,
        heights: Vec<T>,
        params: BoucWenParams<T>,
        rayleigh_a: T,
        rayleigh_b: T,
    ) -> Result<Self, ValidationError> {
        let n = masses.len();
        Self::new(
            masses,
            stiffnesses,
            heights,
            vec![params; n],
            rayleigh_a,
            rayleigh_b,
        )
    }

    pub fn n_stories(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn stiffnesses(&self) -> &[T] {
        &self.stiffnesses
    }

    pub fn heights(&self) -> &[T] {
        &self.heights
    }

    pub fn hysteresis(&self) -> &[BoucWenParams<T>] {
        &self.hysteresis
    }

    pub fn rayleigh(&self) -> (T, T) {
        (self.rayleigh_a, self.rayleigh_b)
    }

    /// Damping-force product (C·v)_i with C = a·M + b·K, K tridiagonal
    /// from the story stiffnesses.
    fn damping_force(&self, v: &[T], out: &mut [T]) {
        let n = self.n_stories();
        for i in 0..n {
            let v_below = if i == 0 { T::zero() } else { v[i - 1] };
            let mut kv = self.stiffnesses[i] * (v[i] - v_below);
            if i + 1 < n {
                kv -= self.stiffnesses[i + 1] * (v[i + 1] - v[i]);
            }
            out[i] = self.rayleigh_a * self.masses[i] * v[i] + self.rayleigh_b * kv;
        }
    }
}

/// Integrator settings for [`mdof_simulate`].
pub type SimulationOptions<T> = OdeOptions<T>;

/// Per-floor response histories and energy accumulators, one entry per
/// ground-motion sample.
#[derive(Debug, Clone)]
pub struct MdofResponse<T> {
    /// displacements[story][sample], relative to the ground, m.
    pub displacements: Vec<Vec<T>>,
    /// velocities[story][sample], m/s.
    pub velocities: Vec<Vec<T>>,
    /// Hysteretic displacement histories z, m.
    pub hysteretic: Vec<Vec<T>>,
    /// Viscous-damping work history, J.
    pub energy_damping: Vec<T>,
    /// Input work history −Σ mᵢ·a_g·u̇ᵢ integrated, J.
    pub energy_input: Vec<T>,
    /// Story (strain + hysteretic) work history, J.
    pub energy_story: Vec<T>,
    /// Kinetic energy at each sample, J.
    pub energy_kinetic: Vec<T>,
    pub dt: T,
}

impl<T: Scalar> MdofResponse<T> {
    /// Peak absolute balance residual |E_kin + E_damp + E_story − E_in|
    /// as a fraction of the peak input energy.
    pub fn energy_residual(&self) -> T {
        let peak_in = self
            .energy_input
            .iter()
            .fold(T::zero(), |m, &e| m.max(e.abs()));
        if peak_in == T::zero() {
            return T::zero();
        }
        let mut worst = T::zero();
        for i in 0..self.energy_input.len() {
            let r = (self.energy_kinetic[i] + self.energy_damping[i] + self.energy_story[i]
                - self.energy_input[i])
                .abs();
            worst = worst.max(r);
        }
        worst / peak_in
    }
}

/// Integrates the model under a ground motion given in g units.
pub fn mdof_simulate<T: Scalar>(
    model: &MdofModel<T>,
    ground: &AccelTimeSeries<T>,
    options: &SimulationOptions<T>,
) -> Result<MdofResponse<T>, ValidationError> {
    let n = model.n_stories();
    let n_samples = ground.len();
    let dt = ground.dt();
    let gravity: T = cast(GRAVITY);

    // State: [u(n), v(n), z(n), e(n), E_damp, E_in, E_story].
    let dim = 4 * n + 3;
    let mut y = vec![T::zero(); dim];

    let mut displacements = vec![Vec::with_capacity(n_samples); n];
    let mut velocities = vec![Vec::with_capacity(n_samples); n];
    let mut hysteretic = vec![Vec::with_capacity(n_samples); n];
    let mut energy_damping = Vec::with_capacity(n_samples);
    let mut energy_input = Vec::with_capacity(n_samples);
    let mut energy_story = Vec::with_capacity(n_samples);
    let mut energy_kinetic = Vec::with_capacity(n_samples);

    let record =
        |y: &[T],
         displacements: &mut Vec<Vec<T>>,
         velocities: &mut Vec<Vec<T>>,
         hysteretic: &mut Vec<Vec<T>>,
         energy_damping: &mut Vec<T>,
         energy_input: &mut Vec<T>,
         energy_story: &mut Vec<T>,
         energy_kinetic: &mut Vec<T>| {
            for i in 0..n {
                displacements[i].push(y[i]);
                velocities[i].push(y[n + i]);
                hysteretic[i].push(y[2 * n + i]);
            }
            energy_damping.push(y[4 * n]);
            energy_input.push(y[4 * n + 1]);
            energy_story.push(y[4 * n + 2]);
            let half: T = cast(0.5);
            let kin = model
                .masses
                .iter()
                .zip(&y[n..2 * n])
                .map(|(&m, &v)| half * m * v * v)
                .sum();
            energy_kinetic.push(kin);
        };

    record(
        &y,
        &mut displacements,
        &mut velocities,
        &mut hysteretic,
        &mut energy_damping,
        &mut energy_input,
        &mut energy_story,
        &mut energy_kinetic,
    );

    let samples = ground.samples();
    let mut rate_err: Option<ValidationError> = None;
    for j in 1..n_samples {
        let a0 = samples[j - 1] * gravity;
        let a1 = samples[j] * gravity;
        let t0 = dt * cast::<T>((j - 1) as f64);
        let t1 = dt * cast::<T>(j as f64);
        let slope = (a1 - a0) / dt;
        let rate_err_cell = std::cell::RefCell::new(None::<ValidationError>);
        let rhs = |t: T, y: &[T], dy: &mut [T]| {
            let ag = a0 + slope * (t - t0);
            let u = &y[..n];
            let v = &y[n..2 * n];
            let z = &y[2 * n..3 * n];
            let e = &y[3 * n..4 * n];

            // u̇ = v
            dy[..n].copy_from_slice(v);

            // Damping forces into dy[n..2n] as scratch, then finish v̇.
            {
                let (_, rest) = dy.split_at_mut(n);
                model.damping_force(v, &mut rest[..n]);
            }
            let mut e_damp_rate = T::zero();
            let mut e_in_rate = T::zero();
            let mut e_story_rate = T::zero();
            for i in 0..n {
                let d = u[i] - if i == 0 { T::zero() } else { u[i - 1] };
                let d_rate = v[i] - if i == 0 { T::zero() } else { v[i - 1] };
                let params = &model.hysteresis[i];
                let force_i = params.alpha * model.stiffnesses[i] * d
                    + (T::one() - params.alpha) * model.stiffnesses[i] * z[i];
                let force_above = if i + 1 < n {
                    let d_up = u[i + 1] - u[i];
                    let p_up = &model.hysteresis[i + 1];
                    p_up.alpha * model.stiffnesses[i + 1] * d_up
                        + (T::one() - p_up.alpha) * model.stiffnesses[i + 1] * z[i + 1]
                } else {
                    T::zero()
                };
                let damping = dy[n + i];
                e_damp_rate += v[i] * damping;
                e_in_rate -= model.masses[i] * ag * v[i];
                e_story_rate += force_i * d_rate;

                dy[n + i] =
                    (-model.masses[i] * ag - damping - force_i + force_above) / model.masses[i];

                match bouc_wen_rate(
                    BoucWenState {
                        z: z[i],
                        energy: e[i],
                    },
                    d_rate,
                    params,
                ) {
                    Ok(rates) => {
                        dy[2 * n + i] = rates.dz;
                        dy[3 * n + i] = rates.denergy;
                    }
                    Err(err) => {
                        *rate_err_cell.borrow_mut() = Some(err);
                        dy[2 * n + i] = T::zero();
                        dy[3 * n + i] = T::zero();
                    }
                }
            }
            dy[4 * n] = e_damp_rate;
            dy[4 * n + 1] = e_in_rate;
            dy[4 * n + 2] = e_story_rate;
        };
        integrate_to(&rhs, t0, t1, &mut y, options)?;
        if let Some(err) = rate_err_cell.into_inner() {
            rate_err = Some(err);
        }
        if let Some(err) = rate_err.take() {
            return Err(err);
        }
        record(
            &y,
            &mut displacements,
            &mut velocities,
            &mut hysteretic,
            &mut energy_damping,
            &mut energy_input,
            &mut energy_story,
            &mut energy_kinetic,
        );
    }

    Ok(MdofResponse {
        displacements,
        velocities,
        hysteretic,
        energy_damping,
        energy_input,
        energy_story,
        energy_kinetic,
        dt,
    })
}
