//! Nonlinear structural response simulation for assessing generated
//! excitations: a shear-building model with degrading Bouc-Wen story
//! hysteresis and Rayleigh damping, plus the supporting pieces (modal
//! analysis, a linear reference solver, intensity scaling, and demand
//! extraction).

pub mod bouc_wen;
pub mod edp;
pub mod mdof;
pub mod modal;
mod ode;

pub use bouc_wen::{bouc_wen_rate, BoucWenParams, BoucWenRates, BoucWenState};
pub use edp::{extract_edps, scale_to_intensity, EdpReport};
pub use mdof::{mdof_simulate, MdofModel, MdofResponse, SimulationOptions};
pub use modal::{linear_modal_response, natural_periods, ModalInfo};
pub use ode::OdeOptions;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ValidationError {
    #[error("hysteresis parameters: {0}")]
    BadHysteresis(String),
    #[error("model: {0}")]
    BadModel(String),
    #[error("non-finite state encountered in the hysteretic rate law")]
    NonFiniteState,
    #[error("integration failed to converge at t = {t} s (step shrank to {h})")]
    StepFailure { t: f64, h: f64 },
    #[error("ground motion: {0}")]
    BadGround(String),
    #[error("spectral ordinate at T1 = {t1} s is zero; cannot scale to a target intensity")]
    ZeroOrdinate { t1: f64 },
    #[error("scaling: {0}")]
    BadScaling(String),
    #[error("histories: {0}")]
    BadHistories(String),
    #[error(transparent)]
    Spectra(#[from] crate::spectra::SpectraError),
}
