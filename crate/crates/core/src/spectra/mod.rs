//! Linear response spectra over (period, time) grids.
//!
//! The central quantity is the running spectrum S_a(t, T): the peak
//! absolute acceleration of a damped linear oscillator of period T over
//! [0, t]. An intensifying target S_aT(t, T) = g(t) · S_target(T) defines
//! the matching goal, and the synthesis objective is the sum of squared
//! differences between the two grids.

pub mod objective;
pub mod sdof;
pub mod target;

pub use objective::{objective, objective_checked, running_spectrum, zero_signal_objective};
pub use sdof::{sdof_absolute_accel, sdof_response, SdofResponse};
pub use target::{design_spectrum, DesignSpectrumParams, IntensifyingProfile, TargetShape, TargetSpec};

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::{cast, Scalar};

/// Default damping ratio for spectral ordinates.
pub const DEFAULT_DAMPING: f64 = 0.05;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("period must be positive and finite, got {0}")]
    BadPeriod(String),
    #[error("damping ratio must satisfy 0 <= zeta < 1, got {0}")]
    BadDamping(String),
    #[error("period grid must be non-empty and strictly increasing")]
    BadPeriodGrid,
    #[error("time grid must be non-empty, uniformly spaced, and nonnegative")]
    BadTimeGrid,
    #[error("time grid extends to {t_last} s but the ground motion ends at {duration} s")]
    TimesBeyondDuration { t_last: f64, duration: f64 },
    #[error("grid dimensions mismatch: {0}")]
    GridMismatch(String),
    #[error("spectral values must be nonnegative and finite")]
    NegativeValue,
    #[error("design spectrum: {0}")]
    BadDesignParams(String),
    #[error("target spec: {0}")]
    BadTargetSpec(String),
    #[error("row {row}: {msg}")]
    Malformed { row: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Strictly increasing vibration periods, seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodGrid<T> {
    periods: Vec<T>,
}

impl<T: Scalar> PeriodGrid<T> {
    pub fn new(periods: Vec<T>) -> Result<Self, SpectraError> {
        if periods.is_empty() {
            return Err(SpectraError::BadPeriodGrid);
        }
        for w in periods.windows(2) {
            if !(w[0] < w[1]) {
                return Err(SpectraError::BadPeriodGrid);
            }
        }
        if !(periods[0] > T::zero()) || !periods.iter().all(|p| p.is_finite()) {
            return Err(SpectraError::BadPeriodGrid);
        }
        Ok(Self { periods })
    }

    /// `n` periods logarithmically spaced on `[t_min, t_max]`, endpoints
    /// exact.
    pub fn log_spaced(n: usize, t_min: T, t_max: T) -> Result<Self, SpectraError> {
        if n < 2 || !(t_min > T::zero()) || !(t_max > t_min) {
            return Err(SpectraError::BadPeriodGrid);
        }
        let ratio = (t_max / t_min).ln();
        let denom = cast::<T>((n - 1) as f64);
        let mut periods: Vec<T> = (0..n)
            .map(|i| t_min * (ratio * cast::<T>(i as f64) / denom).exp())
            .collect();
        periods[0] = t_min;
        periods[n - 1] = t_max;
        Self::new(periods)
    }

    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn periods(&self) -> &[T] {
        &self.periods
    }
}

/// Uniformly spaced sampling instants, seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    times: Vec<T>,
}

impl<T: Scalar> TimeGrid<T> {
    /// Validates uniform spacing within 1e-9 s.
    pub fn new(times: Vec<T>) -> Result<Self, SpectraError> {
        if times.is_empty() || !(times[0] >= T::zero()) {
            return Err(SpectraError::BadTimeGrid);
        }
        if times.len() >= 2 {
            let dt = times[1] - times[0];
            if !(dt > T::zero()) {
                return Err(SpectraError::BadTimeGrid);
            }
            let tol = cast::<T>(1e-9);
            for w in times.windows(2) {
                if ((w[1] - w[0]) - dt).abs() > tol {
                    return Err(SpectraError::BadTimeGrid);
                }
            }
        }
        Ok(Self { times })
    }

    /// `n` instants `j·dt` for `j = 0..n`: every sample time, starting at
    /// zero.
    pub fn sample_instants(n: usize, dt: T) -> Result<Self, SpectraError> {
        if n == 0 || !(dt > T::zero()) {
            return Err(SpectraError::BadTimeGrid);
        }
        Self::new((0..n).map(|j| dt * cast::<T>(j as f64)).collect())
    }

    /// `n` instants `(j+1)·duration/n`: evenly spans `(0, duration]`,
    /// ending exactly at `duration`.
    pub fn spanning(duration: T, n: usize) -> Result<Self, SpectraError> {
        if n == 0 || !(duration > T::zero()) {
            return Err(SpectraError::BadTimeGrid);
        }
        let step = duration / cast::<T>(n as f64);
        let mut times: Vec<T> = (0..n).map(|j| step * cast::<T>((j + 1) as f64)).collect();
        times[n - 1] = duration;
        Self::new(times)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn last(&self) -> T {
        *self.times.last().unwrap()
    }
}

/// Spectral accelerations (g) over periods × times, row per period.
/// Response grids are cumulative maxima, so rows never decrease in time;
/// target grids are separable products.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid<T> {
    values: Vec<T>, // row-major, len = periods.len() * times.len()
    periods: PeriodGrid<T>,
    times: TimeGrid<T>,
}

impl<T: Scalar> SpectrumGrid<T> {
    pub fn new(
        values: Vec<T>,
        periods: PeriodGrid<T>,
        times: TimeGrid<T>,
    ) -> Result<Self, SpectraError> {
        if values.len() != periods.len() * times.len() {
            return Err(SpectraError::GridMismatch(format!(
                "{} values for {} periods x {} times",
                values.len(),
                periods.len(),
                times.len()
            )));
        }
        if !values.iter().all(|v| v.is_finite() && *v >= T::zero()) {
            return Err(SpectraError::NegativeValue);
        }
        Ok(Self {
            values,
            periods,
            times,
        })
    }

    pub fn n_periods(&self) -> usize {
        self.periods.len()
    }

    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    pub fn period_grid(&self) -> &PeriodGrid<T> {
        &self.periods
    }

    pub fn time_grid(&self) -> &TimeGrid<T> {
        &self.times
    }

    pub fn value(&self, period_idx: usize, time_idx: usize) -> T {
        self.values[period_idx * self.times.len() + time_idx]
    }

    pub fn row(&self, period_idx: usize) -> &[T] {
        let n = self.times.len();
        &self.values[period_idx * n..(period_idx + 1) * n]
    }

    /// Column at a time index, one value per period.
    pub fn column(&self, time_idx: usize) -> Vec<T> {
        (0..self.periods.len())
            .map(|i| self.value(i, time_idx))
            .collect()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Writes a grid CSV: header row of times (first cell `period_s`),
    /// then one row per period with the period in its first column.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<(), SpectraError> {
        write!(writer, "period_s")?;
        for t in self.times.times() {
            write!(writer, ",{t}")?;
        }
        writeln!(writer)?;
        for (i, p) in self.periods.periods().iter().enumerate() {
            write!(writer, "{p}")?;
            for v in self.row(i) {
                write!(writer, ",{v}")?;
            }
            writeln!(writer)?;
        }
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<(), SpectraError> {
        let mut file = File::create(path)?;
        self.write_csv(&mut file)?;
        file.flush()?;
        Ok(())
    }

    /// Reads the format written by [`write_csv`](Self::write_csv).
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, SpectraError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(reader);
        let mut records = rdr.records();
        let header = records
            .next()
            .ok_or(SpectraError::BadTimeGrid)?
            .map_err(SpectraError::Csv)?;
        let mut times = Vec::new();
        for cell in header.iter().skip(1) {
            let t: T = cell.trim().parse().map_err(|e| SpectraError::Malformed {
                row: 1,
                msg: format!("bad time {cell:?}: {e}"),
            })?;
            times.push(t);
        }
        let times = TimeGrid::new(times)?;
        let mut periods = Vec::new();
        let mut values = Vec::new();
        for (i, record) in records.enumerate() {
            let row = i + 2;
            let record = record.map_err(SpectraError::Csv)?;
            if record.len() != times.len() + 1 {
                return Err(SpectraError::Malformed {
                    row,
                    msg: format!("expected {} columns, got {}", times.len() + 1, record.len()),
                });
            }
            let p: T = record[0].trim().parse().map_err(|e| SpectraError::Malformed {
                row,
                msg: format!("bad period {:?}: {e}", &record[0]),
            })?;
            periods.push(p);
            for cell in record.iter().skip(1) {
                let v: T = cell.trim().parse().map_err(|e| SpectraError::Malformed {
                    row,
                    msg: format!("bad value {cell:?}: {e}"),
                })?;
                values.push(v);
            }
        }
        Self::new(values, PeriodGrid::new(periods)?, times)
    }

    pub fn read_csv_path(path: &Path) -> Result<Self, SpectraError> {
        Self::read_csv(File::open(path)?)
    }
}
