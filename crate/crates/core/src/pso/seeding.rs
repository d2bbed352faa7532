//! Initial-swarm distributions. A swarm can start from independent
//! uniforms over the box, from a multivariate normal with an explicit
//! covariance, or from the span of an ensemble of reference vectors
//! (typically encoded recorded motions), which is a normal draw under the
//! ensemble's second-moment matrix without ever forming it.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{Bounds, PsoError};
use crate::{cast, Scalar};

/// Eigenvalues may dip this far below zero (relative to the largest) and
/// still count as a rounding artifact of a positive-semidefinite matrix.
const PSD_SLACK: f64 = 1e-8;

/// Initial-position distribution.
#[derive(Debug, Clone)]
pub enum Seeding<T> {
    /// Independent uniform over the search box.
    Uniform,
    /// Multivariate normal N(mean, covariance); `factor` satisfies
    /// factor·factorᵀ = covariance.
    Gaussian { mean: Vec<T>, factor: DMatrix<f64> },
    /// Zero-mean normal whose covariance is the ensemble second moment
    /// (1/K)·Σ mᵢmᵢᵀ; a draw is (1/√K)·Σ zₖ·mₖ with zₖ standard normal.
    Ensemble { members: Vec<Vec<T>> },
}

impl<T: Scalar> Seeding<T> {
    pub fn uniform() -> Self {
        Seeding::Uniform
    }

    /// Validates symmetry and positive semidefiniteness, then stores the
    /// square root of the covariance for sampling.
    pub fn gaussian(mean: Vec<T>, covariance_rows: &[Vec<f64>]) -> Result<Self, PsoError> {
        let dim = mean.len();
        if covariance_rows.len() != dim || covariance_rows.iter().any(|r| r.len() != dim) {
            return Err(PsoError::BadSeeding(format!(
                "covariance must be {dim}x{dim} to match the mean"
            )));
        }
        let cov = DMatrix::from_fn(dim, dim, |i, j| covariance_rows[i][j]);
        let scale = cov.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        let asym = (&cov - cov.transpose()).abs().max();
        if asym > 1e-9 * scale {
            return Err(PsoError::BadSeeding(
                "covariance matrix is not symmetric".into(),
            ));
        }
        let sym = (&cov + cov.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let lambda_max = eig.eigenvalues.iter().fold(0.0_f64, |m, &v| m.max(v));
        let slack = PSD_SLACK * lambda_max.max(1.0);
        if eig.eigenvalues.iter().any(|&l| l < -slack) {
            return Err(PsoError::BadSeeding(
                "covariance matrix is not positive semidefinite".into(),
            ));
        }
        let sqrt_vals = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
        let factor = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals);
        Ok(Seeding::Gaussian { mean, factor })
    }

    /// Ensemble seeding from one or more equal-length reference vectors.
    pub fn ensemble(members: Vec<Vec<T>>) -> Result<Self, PsoError> {
        if members.is_empty() {
            return Err(PsoError::BadSeeding("ensemble has no members".into()));
        }
        let dim = members[0].len();
        if dim == 0 || members.iter().any(|m| m.len() != dim) {
            return Err(PsoError::BadSeeding(
                "ensemble members must share one nonzero length".into(),
            ));
        }
        Ok(Seeding::Ensemble { members })
    }

    /// Decision-space dimension, when the seeding fixes one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Seeding::Uniform => None,
            Seeding::Gaussian { mean, .. } => Some(mean.len()),
            Seeding::Ensemble { members } => Some(members[0].len()),
        }
    }

    pub(crate) fn check_dim(&self, bounds_dim: usize) -> Result<(), PsoError> {
        match self.dim() {
            Some(d) if d != bounds_dim => Err(PsoError::DimensionMismatch {
                bounds: bounds_dim,
                seeding: d,
            }),
            _ => Ok(()),
        }
    }

    /// Componentwise variance of the distribution, if it fixes one.
    pub fn variances(&self) -> Option<Vec<f64>> {
        match self {
            Seeding::Uniform => None,
            Seeding::Gaussian { factor, .. } => Some(
                (0..factor.nrows())
                    .map(|i| factor.row(i).iter().map(|v| v * v).sum())
                    .collect(),
            ),
            Seeding::Ensemble { members } => {
                let dim = members[0].len();
                let k = members.len() as f64;
                Some(
                    (0..dim)
                        .map(|i| {
                            members
                                .iter()
                                .map(|m| {
                                    let v = m[i].to_f64().unwrap();
                                    v * v
                                })
                                .sum::<f64>()
                                / k
                        })
                        .collect(),
                )
            }
        }
    }

    /// Distribution mean (zero for uniform and ensemble seeding).
    pub fn mean(&self, dim: usize) -> Vec<f64> {
        match self {
            Seeding::Gaussian { mean, .. } => {
                mean.iter().map(|m| m.to_f64().unwrap()).collect()
            }
            _ => vec![0.0; dim],
        }
    }

    /// Draws `n_pop` positions; the caller clips them into the box.
    pub fn sample<R: Rng>(
        &self,
        n_pop: usize,
        bounds: &Bounds<T>,
        rng: &mut R,
    ) -> Result<Vec<Vec<T>>, PsoError> {
        let dim = bounds.dim();
        let mut positions = Vec::with_capacity(n_pop);
        match self {
            Seeding::Uniform => {
                for _ in 0..n_pop {
                    let x: Vec<T> = (0..dim)
                        .map(|i| {
                            let r: T = cast(rng.random::<f64>());
                            bounds.lower()[i] + r * (bounds.upper()[i] - bounds.lower()[i])
                        })
                        .collect();
                    positions.push(x);
                }
            }
            Seeding::Gaussian { mean, factor } => {
                for _ in 0..n_pop {
                    let z = DMatrix::from_fn(dim, 1, |_, _| rng.sample::<f64, _>(StandardNormal));
                    let dev = factor * z;
                    let x: Vec<T> = mean
                        .iter()
                        .enumerate()
                        .map(|(i, &m)| m + cast::<T>(dev[(i, 0)]))
                        .collect();
                    positions.push(x);
                }
            }
            Seeding::Ensemble { members } => {
                let scale: T = cast(1.0 / (members.len() as f64).sqrt());
                for _ in 0..n_pop {
                    let mut x = vec![T::zero(); dim];
                    for member in members {
                        let z: T = cast(rng.sample::<f64, _>(StandardNormal));
                        for (xi, &mi) in x.iter_mut().zip(member) {
                            *xi += z * mi;
                        }
                    }
                    for xi in &mut x {
                        *xi *= scale;
                    }
                    positions.push(x);
                }
            }
        }
        Ok(positions)
    }
}

/// Box spanning `mean ± k_sigma·σ` per dimension, the search region a
/// correlated seeding justifies. Degenerate dimensions (σ = 0) get a hair
/// of width so the box stays well-formed; clipping keeps samples at the
/// mean there. Uniform seeding carries no scale, so it is rejected here
/// and the box must be given explicitly.
pub fn bounds_from_seeding<T: Scalar>(
    seeding: &Seeding<T>,
    k_sigma: T,
) -> Result<Bounds<T>, PsoError> {
    if !(k_sigma > T::zero()) {
        return Err(PsoError::BadSeeding(format!(
            "sigma multiplier must be positive, got {k_sigma}"
        )));
    }
    let variances = seeding.variances().ok_or_else(|| {
        PsoError::BadSeeding("uniform seeding needs explicit bounds".into())
    })?;
    let dim = variances.len();
    let mean = seeding.mean(dim);
    let k = k_sigma.to_f64().unwrap();
    let mut lower = Vec::with_capacity(dim);
    let mut upper = Vec::with_capacity(dim);
    for (m, var) in mean.iter().zip(&variances) {
        let half = (k * var.sqrt()).max(1e-9 * m.abs().max(1.0));
        lower.push(cast::<T>(m - half));
        upper.push(cast::<T>(m + half));
    }
    Bounds::new(lower, upper)
}
