//! Modal analysis of the elastic shear building and a linear
//! modal-superposition solver, the independent reference for small
//! (near-elastic) excitations.
//!
//! The generalized eigenproblem K·φ = ω²·M·φ is solved in symmetric form
//! M^{-1/2}·K·M^{-1/2}; with Rayleigh damping C = a·M + b·K each mode
//! decouples with damping ratio ζ_i = a/(2ω_i) + b·ω_i/2, so each modal
//! coordinate is a damped SDOF under −Γ_i·a_g solved by the same
//! piecewise-exact update used for spectra.

use nalgebra::DMatrix;

use crate::signal::AccelTimeSeries;
use crate::spectra::sdof::sdof_response;
use crate::{cast, Scalar};

use super::mdof::{MdofModel, GRAVITY};
use super::ValidationError;

/// Elastic modal properties, modes ordered by descending period.
#[derive(Debug, Clone)]
pub struct ModalInfo {
    /// Natural periods, seconds, descending.
    pub periods: Vec<f64>,
    /// Effective modal mass as a percentage of total; sums to 100.
    pub participation_pct: Vec<f64>,
    /// Mass-normalized mode shapes (φᵀ·M·φ = 1), one per mode.
    pub shapes: Vec<Vec<f64>>,
}

fn stiffness_matrix(stiffnesses: &[f64]) -> DMatrix<f64> {
    let n = stiffnesses.len();
    DMatrix::from_fn(n, n, |i, j| {
        let mut v = 0.0;
        if i == j {
            v += stiffnesses[i];
            if i + 1 < n {
                v += stiffnesses[i + 1];
            }
        } else if j == i + 1 {
            v -= stiffnesses[j];
        } else if i == j + 1 {
            v -= stiffnesses[i];
        }
        v
    })
}

/// Solves the undamped eigenproblem of (K, M).
pub fn natural_periods<T: Scalar>(model: &MdofModel<T>) -> Result<ModalInfo, ValidationError> {
    let masses: Vec<f64> = model.masses().iter().map(|m| m.to_f64().unwrap()).collect();
    let stiffnesses: Vec<f64> = model
        .stiffnesses()
        .iter()
        .map(|k| k.to_f64().unwrap())
        .collect();
    let n = masses.len();
    if masses.iter().any(|&m| !(m > 0.0)) {
        return Err(ValidationError::BadModel(
            "singular mass matrix: masses must be positive".into(),
        ));
    }
    let k = stiffness_matrix(&stiffnesses);
    let inv_sqrt_m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0 / masses[i].sqrt()
        } else {
            0.0
        }
    });
    let sym = &inv_sqrt_m * k * &inv_sqrt_m;
    let sym = (&sym + sym.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    // Ascending ω² gives descending periods.
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
    });

    let total_mass: f64 = masses.iter().sum();
    let mut periods = Vec::with_capacity(n);
    let mut participation_pct = Vec::with_capacity(n);
    let mut shapes = Vec::with_capacity(n);
    for &idx in &order {
        let lambda = eig.eigenvalues[idx];
        if !(lambda > 0.0) {
            return Err(ValidationError::BadModel(format!(
                "non-positive eigenvalue {lambda}; stiffness matrix is not positive definite"
            )));
        }
        let omega = lambda.sqrt();
        periods.push(2.0 * std::f64::consts::PI / omega);
        // φ = M^{-1/2}·ψ with ψ unit norm is already mass-normalized.
        let phi: Vec<f64> = (0..n)
            .map(|i| eig.eigenvectors[(i, idx)] / masses[i].sqrt())
            .collect();
        let gamma: f64 = phi.iter().zip(&masses).map(|(p, m)| p * m).sum();
        participation_pct.push(100.0 * gamma * gamma / total_mass);
        shapes.push(phi);
    }
    Ok(ModalInfo {
        periods,
        participation_pct,
        shapes,
    })
}

/// Linear elastic response by modal superposition: per-floor displacement
/// histories (m) under a ground motion in g units. Rayleigh damping
/// decouples exactly, so this is an independent oracle for the nonlinear
/// simulator in its near-elastic regime.
pub fn linear_modal_response<T: Scalar>(
    model: &MdofModel<T>,
    ground: &AccelTimeSeries<T>,
) -> Result<Vec<Vec<f64>>, ValidationError> {
    let info = natural_periods(model)?;
    let masses: Vec<f64> = model.masses().iter().map(|m| m.to_f64().unwrap()).collect();
    let (a, b) = model.rayleigh();
    let (a, b) = (a.to_f64().unwrap(), b.to_f64().unwrap());
    let n = masses.len();
    let n_samples = ground.len();

    // Work in f64 regardless of T for a stable reference.
    let samples64: Vec<f64> = ground
        .samples()
        .iter()
        .map(|s| s.to_f64().unwrap())
        .collect();
    let ground64 = AccelTimeSeries::new(samples64, ground.dt().to_f64().unwrap())
        .map_err(|e| ValidationError::BadGround(e.to_string()))?;

    let mut displacements = vec![vec![0.0_f64; n_samples]; n];
    for (mode, period) in info.periods.iter().enumerate() {
        let omega = 2.0 * std::f64::consts::PI / period;
        let zeta = a / (2.0 * omega) + b * omega / 2.0;
        if zeta >= 1.0 {
            return Err(ValidationError::BadModel(format!(
                "mode {mode} is overdamped (zeta = {zeta:.3}); the modal oracle assumes zeta < 1"
            )));
        }
        let phi = &info.shapes[mode];
        let gamma: f64 = phi.iter().zip(&masses).map(|(p, m)| p * m).sum();
        // Modal SDOF in g input units; convert to meters via G.
        let resp = sdof_response(&ground64, *period, zeta)
            .map_err(ValidationError::Spectra)?;
        let scale = gamma * GRAVITY;
        for (i, phi_i) in phi.iter().enumerate() {
            let weight = phi_i * scale;
            for (t, q) in resp.disp.iter().enumerate() {
                displacements[i][t] += weight * q;
            }
        }
    }
    Ok(displacements)
}

/// Casts the f64 reference histories into `T` for comparisons.
pub fn to_scalar_histories<T: Scalar>(histories: &[Vec<f64>]) -> Vec<Vec<T>> {
    histories
        .iter()
        .map(|row| row.iter().map(|&v| cast::<T>(v)).collect())
        .collect()
}
