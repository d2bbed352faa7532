//! Particle swarm optimizer with damped inertia, an optional constriction
//! mode, and fly-back constraint handling.
//!
//! Velocity update for particle i:
//!
//! ```text
//! v' = ω v + c1 r1 (pbest − x) + c2 r2 (gbest − x)
//! x' = x + v'
//! ```
//!
//! with r1, r2 fresh uniform draws. In constriction mode the whole right
//! side is multiplied by K = 2 / |2 − φ − √(φ² − 4φ)|, φ = c1 + c2 > 4,
//! which guarantees convergence without velocity clamping. The inertia
//! weight decays geometrically, ω ← ξ·ω, after every iteration.
//!
//! A move that leaves the search box is discarded and the update repeated
//! with fresh random draws in the same iteration (fly-back); after
//! `max_retries` failures the particle stays put with zeroed velocity.
//! Out-of-box positions are never evaluated.
//!
//! Reproducibility: every random draw comes from a counter-mode generator
//! substream keyed by (master seed, particle index), and objective
//! evaluations are pure, so results are bit-identical for a fixed seed no
//! matter how evaluations are scheduled across threads.

pub mod seeding;

pub use seeding::{bounds_from_seeding, Seeding};

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{cast, Scalar};

#[derive(Debug, Error)]
pub enum PsoError {
    #[error("swarm needs at least 2 particles, got {0}")]
    TooFewParticles(usize),
    #[error("inertia damping factor must satisfy 0 < xi <= 1, got {0}")]
    BadXi(String),
    #[error("acceleration constants must be nonnegative and finite, got c1={0}, c2={1}")]
    BadAcceleration(String, String),
    #[error("inertia weight must be nonnegative and finite, got {0}")]
    BadOmega(String),
    #[error("constriction requires phi = c1 + c2 > 4, got phi = {0}")]
    PhiOutOfRange(String),
    #[error("bounds must satisfy lower < upper componentwise (violated at index {0})")]
    BadBounds(usize),
    #[error("bounds dimension {bounds} does not match seeding dimension {seeding}")]
    DimensionMismatch { bounds: usize, seeding: usize },
    #[error("seeding: {0}")]
    BadSeeding(String),
}

/// Velocity-update flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Inertia-weight update with configured ω.
    Plain,
    /// Constriction-coefficient update; ω is derived from c1 + c2.
    Constriction,
}

/// How many uniform draws feed one velocity update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RandomGranularity {
    /// One (r1, r2) pair per particle per update.
    Scalar,
    /// Fresh (r1, r2) per vector component.
    Component,
}

/// Componentwise search box.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> Bounds<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self, PsoError> {
        if lower.len() != upper.len() {
            return Err(PsoError::DimensionMismatch {
                bounds: lower.len(),
                seeding: upper.len(),
            });
        }
        for (i, (lo, up)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < up) || !lo.is_finite() || !up.is_finite() {
                return Err(PsoError::BadBounds(i));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Symmetric box `[-half_width, half_width]` in every dimension.
    pub fn symmetric(dim: usize, half_width: T) -> Result<Self, PsoError> {
        Self::new(vec![-half_width; dim], vec![half_width; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(xi, (lo, up))| xi >= lo && xi <= up)
    }

    pub fn clip(&self, x: &mut [T]) {
        for (xi, (lo, up)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            if *xi < *lo {
                *xi = *lo;
            } else if *xi > *up {
                *xi = *up;
            }
        }
    }
}

/// Swarm parameters. `omega` is the initial inertia weight and `xi` its
/// per-iteration decay; in constriction mode `omega` is ignored and the
/// multiplier K takes its place.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig<T> {
    pub n_pop: usize,
    pub omega: T,
    pub xi: T,
    pub c1: T,
    pub c2: T,
    pub mode: Mode,
    pub max_iters: usize,
    pub max_retries: usize,
    pub granularity: RandomGranularity,
    pub seed: u64,
}

impl<T: Scalar> SwarmConfig<T> {
    /// Inertia-weight defaults: 400 particles, ω = 0.8 undamped, c1 = c2 = 1.
    pub fn defaults(seed: u64) -> Self {
        Self {
            n_pop: 400,
            omega: cast(0.8),
            xi: T::one(),
            c1: T::one(),
            c2: T::one(),
            mode: Mode::Plain,
            max_iters: 100,
            max_retries: 50,
            granularity: RandomGranularity::Scalar,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), PsoError> {
        if self.n_pop < 2 {
            return Err(PsoError::TooFewParticles(self.n_pop));
        }
        if !(self.xi > T::zero() && self.xi <= T::one()) {
            return Err(PsoError::BadXi(format!("{}", self.xi)));
        }
        if !(self.c1 >= T::zero()) || !(self.c2 >= T::zero())
            || !self.c1.is_finite() || !self.c2.is_finite()
        {
            return Err(PsoError::BadAcceleration(
                format!("{}", self.c1),
                format!("{}", self.c2),
            ));
        }
        if !(self.omega >= T::zero()) || !self.omega.is_finite() {
            return Err(PsoError::BadOmega(format!("{}", self.omega)));
        }
        if self.mode == Mode::Constriction {
            cca_multiplier(self.c1, self.c2)?;
        }
        Ok(())
    }

    /// Initial inertia weight actually applied: ω in plain mode, K in
    /// constriction mode.
    fn initial_inertia(&self) -> Result<T, PsoError> {
        match self.mode {
            Mode::Plain => Ok(self.omega),
            Mode::Constriction => cca_multiplier(self.c1, self.c2),
        }
    }

    /// Attraction coefficients actually applied: (c1, c2) in plain mode,
    /// (K·c1, K·c2) in constriction mode.
    fn attraction(&self) -> Result<(T, T), PsoError> {
        match self.mode {
            Mode::Plain => Ok((self.c1, self.c2)),
            Mode::Constriction => {
                let k = cca_multiplier(self.c1, self.c2)?;
                Ok((k * self.c1, k * self.c2))
            }
        }
    }
}

/// Constriction multiplier K = 2 / |2 − φ − √(φ² − 4φ)| for φ = c1 + c2;
/// requires φ > 4 strictly (K(4.1) ≈ 0.729).
pub fn cca_multiplier<T: Scalar>(c1: T, c2: T) -> Result<T, PsoError> {
    let phi = c1 + c2;
    let four = cast::<T>(4.0);
    if !(phi > four) || !phi.is_finite() {
        return Err(PsoError::PhiOutOfRange(format!("{phi}")));
    }
    let two = cast::<T>(2.0);
    let disc = (phi * phi - four * phi).sqrt();
    Ok(two / (two - phi - disc).abs())
}

/// One step of geometric inertia decay: ω ← ξ·ω.
pub fn damp_inertia<T: Scalar>(omega_prev: T, xi: T) -> T {
    xi * omega_prev
}

/// Swarm member: current state plus its best visited point.
#[derive(Debug, Clone)]
pub struct Particle<T> {
    pub position: Vec<T>,
    pub velocity: Vec<T>,
    pub pbest_position: Vec<T>,
    pub pbest_value: T,
}

/// Per-iteration convergence record. `iteration` 0 is the evaluation of
/// the initial swarm; `evaluations` counts objective calls so far.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct IterationRecord<T> {
    pub iteration: usize,
    pub gbest_value: T,
    pub omega: T,
    pub evaluations: u64,
    pub elapsed_s: f64,
}

/// Best-so-far trajectory; the `gbest_value` sequence never increases.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct ConvergenceLog<T> {
    pub records: Vec<IterationRecord<T>>,
}

impl<T> Default for ConvergenceLog<T> {
    fn default() -> Self {
        Self {
            records: Vec::new(),
        }
    }
}

/// Outcome of a swarm run.
#[derive(Debug, Clone)]
pub struct RunResult<T> {
    pub best_position: Vec<T>,
    pub best_value: T,
    pub log: ConvergenceLog<T>,
}

struct UpdateCoeffs<T> {
    inertia: T,
    a1: T,
    a2: T,
}

/// Computes a tentative new velocity with fresh random draws.
// Four slices walk in lockstep and the per-component draw order is part of
// the reproducibility contract; the indexed loop keeps both obvious.
#[allow(clippy::needless_range_loop)]
pub fn velocity_update<T: Scalar, R: Rng>(
    particle: &Particle<T>,
    gbest_position: &[T],
    inertia: T,
    a1: T,
    a2: T,
    granularity: RandomGranularity,
    rng: &mut R,
) -> Vec<T> {
    let dim = particle.position.len();
    let mut velocity = Vec::with_capacity(dim);
    match granularity {
        RandomGranularity::Scalar => {
            let r1: T = cast(rng.random::<f64>());
            let r2: T = cast(rng.random::<f64>());
            for i in 0..dim {
                velocity.push(
                    inertia * particle.velocity[i]
                        + a1 * r1 * (particle.pbest_position[i] - particle.position[i])
                        + a2 * r2 * (gbest_position[i] - particle.position[i]),
                );
            }
        }
        RandomGranularity::Component => {
            for i in 0..dim {
                let r1: T = cast(rng.random::<f64>());
                let r2: T = cast(rng.random::<f64>());
                velocity.push(
                    inertia * particle.velocity[i]
                        + a1 * r1 * (particle.pbest_position[i] - particle.position[i])
                        + a2 * r2 * (gbest_position[i] - particle.position[i]),
                );
            }
        }
    }
    velocity
}

/// Fly-back move: retries the velocity update with fresh draws until the
/// tentative position lands inside the box, up to `max_retries`; then the
/// particle keeps its position with zeroed velocity. Every retry starts
/// from the particle's original velocity, only the random pair changes.
/// The returned position is always inside the box.
#[allow(clippy::too_many_arguments)]
pub fn move_particle<T: Scalar, R: Rng>(
    particle: &Particle<T>,
    gbest_position: &[T],
    inertia: T,
    a1: T,
    a2: T,
    bounds: &Bounds<T>,
    granularity: RandomGranularity,
    rng: &mut R,
    max_retries: usize,
) -> (Vec<T>, Vec<T>) {
    for _ in 0..=max_retries {
        let velocity = velocity_update(particle, gbest_position, inertia, a1, a2, granularity, rng);
        let tentative: Vec<T> = particle
            .position
            .iter()
            .zip(&velocity)
            .map(|(&x, &v)| x + v)
            .collect();
        if bounds.contains(&tentative) {
            return (tentative, velocity);
        }
    }
    (particle.position.clone(), vec![T::zero(); particle.position.len()])
}

/// Runs the swarm: seed and evaluate the initial population, then iterate
/// move → evaluate → update bests until the iteration budget is spent.
/// Every particle is evaluated exactly once per iteration, so the total
/// evaluation count is n_pop · (max_iters + 1). `pbest`/`gbest` replace
/// only on strict improvement (first-found wins ties).
pub fn run<T, F>(
    objective: F,
    config: &SwarmConfig<T>,
    bounds: &Bounds<T>,
    seeding: &Seeding<T>,
) -> Result<RunResult<T>, PsoError>
where
    T: Scalar,
    F: Fn(&[T]) -> T + Sync,
{
    config.validate()?;
    seeding.check_dim(bounds.dim())?;
    let start = Instant::now();

    // Stream 0 seeds the swarm; stream 1 + i belongs to particle i.
    let mut init_rng = ChaCha8Rng::seed_from_u64(config.seed);
    init_rng.set_stream(0);
    let mut positions = seeding.sample(config.n_pop, bounds, &mut init_rng)?;
    for p in &mut positions {
        bounds.clip(p);
    }
    let mut particle_rngs: Vec<ChaCha8Rng> = (0..config.n_pop)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(1 + i as u64);
            rng
        })
        .collect();

    let values: Vec<T> = positions.par_iter().map(|p| objective(p)).collect();
    let mut evaluations = config.n_pop as u64;

    let mut particles: Vec<Particle<T>> = positions
        .into_iter()
        .zip(&values)
        .map(|(position, &value)| Particle {
            velocity: vec![T::zero(); position.len()],
            pbest_position: position.clone(),
            pbest_value: value,
            position,
        })
        .collect();

    let mut gbest_idx = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[gbest_idx] {
            gbest_idx = i;
        }
    }
    let mut gbest_position = particles[gbest_idx].position.clone();
    let mut gbest_value = particles[gbest_idx].pbest_value;

    let mut inertia = config.initial_inertia()?;
    let (a1, a2) = config.attraction()?;

    let mut log = ConvergenceLog::default();
    log.records.push(IterationRecord {
        iteration: 0,
        gbest_value,
        omega: inertia,
        evaluations,
        elapsed_s: start.elapsed().as_secs_f64(),
    });

    for iteration in 1..=config.max_iters {
        let coeffs = UpdateCoeffs { inertia, a1, a2 };
        // Moves are sequential per particle (cheap); evaluations fan out.
        let mut new_positions: Vec<Vec<T>> = Vec::with_capacity(config.n_pop);
        for (particle, rng) in particles.iter_mut().zip(&mut particle_rngs) {
            let (position, velocity) = move_particle(
                particle,
                &gbest_position,
                coeffs.inertia,
                coeffs.a1,
                coeffs.a2,
                bounds,
                config.granularity,
                rng,
                config.max_retries,
            );
            particle.velocity = velocity;
            new_positions.push(position);
        }
        let new_values: Vec<T> = new_positions.par_iter().map(|p| objective(p)).collect();
        evaluations += config.n_pop as u64;

        for ((particle, position), &value) in
            particles.iter_mut().zip(new_positions).zip(&new_values)
        {
            particle.position = position;
            if value < particle.pbest_value {
                particle.pbest_value = value;
                particle.pbest_position = particle.position.clone();
            }
        }
        for particle in &particles {
            if particle.pbest_value < gbest_value {
                gbest_value = particle.pbest_value;
                gbest_position = particle.pbest_position.clone();
            }
        }

        log.records.push(IterationRecord {
            iteration,
            gbest_value,
            omega: inertia,
            evaluations,
            elapsed_s: start.elapsed().as_secs_f64(),
        });
        inertia = damp_inertia(inertia, config.xi);
    }

    Ok(RunResult {
        best_position: gbest_position,
        best_value: gbest_value,
        log,
    })
}
