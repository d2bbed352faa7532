//! Target spectra: a spectral shape over period and an intensifying
//! profile over time. The target grid is their separable product
//! S_aT(t, T) = g(t) · S_target(T), with g(0) = 0 and g(target_time) = 1.

use super::{PeriodGrid, SpectraError, SpectrumGrid, TimeGrid};
use crate::{cast, Scalar};

/// Code-style design spectrum parameters: short-period and one-second
/// design accelerations plus the long-period transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignSpectrumParams<T> {
    pub s_ds: T,
    pub s_d1: T,
    pub t_l: T,
}

impl<T: Scalar> DesignSpectrumParams<T> {
    pub fn new(s_ds: T, s_d1: T, t_l: T) -> Result<Self, SpectraError> {
        let all_finite = s_ds.is_finite() && s_d1.is_finite() && t_l.is_finite();
        if !all_finite || !(s_ds > T::zero()) || !(s_d1 > T::zero()) || !(t_l > T::zero()) {
            return Err(SpectraError::BadDesignParams(
                "S_DS, S_D1, T_L must all be positive".into(),
            ));
        }
        let t_s = s_d1 / s_ds;
        if !(t_l > t_s) {
            return Err(SpectraError::BadDesignParams(format!(
                "T_L = {t_l} must exceed T_s = S_D1/S_DS = {t_s}"
            )));
        }
        Ok(Self { s_ds, s_d1, t_l })
    }

    /// Plateau start `T_0 = 0.2·S_D1/S_DS`.
    pub fn t_0(&self) -> T {
        cast::<T>(0.2) * self.s_d1 / self.s_ds
    }

    /// Plateau end `T_s = S_D1/S_DS`.
    pub fn t_s(&self) -> T {
        self.s_d1 / self.s_ds
    }
}

/// Piecewise design spectral acceleration (g): linear rise from 0.4·S_DS
/// at T = 0 to the S_DS plateau on [T_0, T_s], then S_D1/T decay up to
/// T_L, then S_D1·T_L/T² beyond. Continuous at every corner.
pub fn design_spectrum<T: Scalar>(
    params: &DesignSpectrumParams<T>,
    period: T,
) -> Result<T, SpectraError> {
    if !(period >= T::zero()) || !period.is_finite() {
        return Err(SpectraError::BadPeriod(format!("{period}")));
    }
    let t_0 = params.t_0();
    let t_s = params.t_s();
    let sa = if period < t_0 {
        params.s_ds * (cast::<T>(0.4) + cast::<T>(0.6) * period / t_0)
    } else if period <= t_s {
        params.s_ds
    } else if period <= params.t_l {
        params.s_d1 / period
    } else {
        params.s_d1 * params.t_l / (period * period)
    };
    Ok(sa)
}

/// Spectral shape the excitation should grow toward.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetShape<T> {
    /// Constant ordinate at every period.
    Flat { level: T },
    /// Code-style design spectrum.
    Design(DesignSpectrumParams<T>),
}

impl<T: Scalar> TargetShape<T> {
    pub fn ordinate(&self, period: T) -> Result<T, SpectraError> {
        match self {
            TargetShape::Flat { level } => Ok(*level),
            TargetShape::Design(params) => design_spectrum(params, period),
        }
    }
}

/// Dimensionless intensifying profile g(t); grows from 0 and reaches 1 at
/// the target time (and keeps growing past it for the linear profile).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntensifyingProfile {
    Linear,
}

impl IntensifyingProfile {
    pub fn value<T: Scalar>(&self, t: T, target_time: T) -> T {
        match self {
            IntensifyingProfile::Linear => t / target_time,
        }
    }
}

/// Full target definition: shape × profile with the normalization time.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec<T> {
    shape: TargetShape<T>,
    profile: IntensifyingProfile,
    target_time: T,
}

impl<T: Scalar> TargetSpec<T> {
    pub fn new(
        shape: TargetShape<T>,
        profile: IntensifyingProfile,
        target_time: T,
    ) -> Result<Self, SpectraError> {
        if !(target_time > T::zero()) || !target_time.is_finite() {
            return Err(SpectraError::BadTargetSpec(format!(
                "target_time must be positive, got {target_time}"
            )));
        }
        if let TargetShape::Flat { level } = shape {
            if !(level >= T::zero()) || !level.is_finite() {
                return Err(SpectraError::BadTargetSpec(format!(
                    "flat level must be nonnegative, got {level}"
                )));
            }
        }
        Ok(Self {
            shape,
            profile,
            target_time,
        })
    }

    pub fn shape(&self) -> &TargetShape<T> {
        &self.shape
    }

    pub fn profile(&self) -> IntensifyingProfile {
        self.profile
    }

    pub fn target_time(&self) -> T {
        self.target_time
    }

    /// Separable target grid: entry (i, j) = g(t_j) · shape(T_i).
    pub fn target_grid(
        &self,
        periods: &PeriodGrid<T>,
        times: &TimeGrid<T>,
    ) -> Result<SpectrumGrid<T>, SpectraError> {
        let ordinates: Vec<T> = periods
            .periods()
            .iter()
            .map(|&p| self.shape.ordinate(p))
            .collect::<Result<_, _>>()?;
        let gains: Vec<T> = times
            .times()
            .iter()
            .map(|&t| self.profile.value(t, self.target_time))
            .collect();
        let mut values = Vec::with_capacity(periods.len() * times.len());
        for &sa in &ordinates {
            for &g in &gains {
                values.push(g * sa);
            }
        }
        SpectrumGrid::new(values, periods.clone(), times.clone())
    }
}
