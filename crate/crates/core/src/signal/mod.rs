//! Accelerogram representation and its reduced wavelet parameterization.
//!
//! [`AccelTimeSeries`] holds a uniformly sampled ground acceleration history
//! in g units. [`wavelet`] provides periodized orthogonal Daubechies
//! transforms over power-of-two lengths; [`coding`] maps between a full
//! coefficient set and the reduced decision vector the optimizer works in
//! (inactive bands pinned to zero).

mod coding;
pub mod wavelet;

pub use coding::{decode, decode_values, encode, Band, BandLayout, DecisionVector};
pub use wavelet::{dwt_forward, dwt_inverse, Wavelet, WaveletCoeffs};

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::{cast, Scalar};

/// Spacing jitter tolerated when reading accelerogram files, in seconds.
pub const DT_TOLERANCE_S: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("accelerogram must contain at least one sample")]
    Empty,
    #[error("sample interval must be positive and finite, got {0}")]
    BadDt(String),
    #[error("length {len} is not a power of two; the dyadic wavelet decomposition requires one")]
    NotPowerOfTwo { len: usize },
    #[error("requested {levels} decomposition levels but length {len} supports at most {max}")]
    LevelsTooDeep { levels: usize, len: usize, max: usize },
    #[error("coefficient band sizes are inconsistent with a dyadic decomposition of length {expected}")]
    BandStructure { expected: usize },
    #[error("decision vector has {got} values but the layout defines {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("series length {got} does not match layout signal length {expected}")]
    SignalLength { expected: usize, got: usize },
    #[error("unknown wavelet {0:?}; supported: haar, db1..db10")]
    UnknownWavelet(String),
    #[error("row {row}: non-uniform sample spacing (expected {expected} s, got {got} s)")]
    NonUniformDt { row: usize, expected: f64, got: f64 },
    #[error("row {row}: {msg}")]
    Malformed { row: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Uniformly sampled ground acceleration history, in g units.
#[derive(Debug, Clone, PartialEq)]
pub struct AccelTimeSeries<T> {
    samples: Vec<T>,
    dt: T,
}

impl<T: Scalar> AccelTimeSeries<T> {
    pub fn new(samples: Vec<T>, dt: T) -> Result<Self, SignalError> {
        if samples.is_empty() {
            return Err(SignalError::Empty);
        }
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(SignalError::BadDt(format!("{dt}")));
        }
        Ok(Self { samples, dt })
    }

    pub fn zeros(len: usize, dt: T) -> Result<Self, SignalError> {
        Self::new(vec![T::zero(); len], dt)
    }

    // Never empty by construction, so no `is_empty`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn duration(&self) -> T {
        self.dt * cast::<T>(self.samples.len() as f64)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    /// Pointwise scaling; the response of a linear oscillator scales with it.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            samples: self.samples.iter().map(|&s| s * factor).collect(),
            dt: self.dt,
        }
    }

    /// Reads a two-column `time_s,accel_g` CSV with one header line.
    /// Sample spacing must be uniform within [`DT_TOLERANCE_S`].
    pub fn read_csv<R: Read>(reader: R) -> Result<Self, SignalError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let mut times = Vec::new();
        let mut samples = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let row = i + 2; // 1-based, after the header
            let record = record?;
            if record.len() < 2 {
                return Err(SignalError::Malformed {
                    row,
                    msg: format!("expected 2 columns, got {}", record.len()),
                });
            }
            let t: f64 = record[0].trim().parse().map_err(|e| SignalError::Malformed {
                row,
                msg: format!("bad time {:?}: {e}", &record[0]),
            })?;
            let a: T = record[1].trim().parse().map_err(|e| SignalError::Malformed {
                row,
                msg: format!("bad acceleration {:?}: {e}", &record[1]),
            })?;
            times.push(t);
            samples.push(a);
        }
        if samples.is_empty() {
            return Err(SignalError::Empty);
        }
        let dt = if times.len() >= 2 { times[1] - times[0] } else { 0.01 };
        if !(dt > 0.0) {
            return Err(SignalError::BadDt(format!("{dt}")));
        }
        for (i, w) in times.windows(2).enumerate() {
            let step = w[1] - w[0];
            if (step - dt).abs() > DT_TOLERANCE_S {
                return Err(SignalError::NonUniformDt {
                    row: i + 3,
                    expected: dt,
                    got: step,
                });
            }
        }
        Self::new(samples, cast(dt))
    }

    pub fn read_csv_path(path: &Path) -> Result<Self, SignalError> {
        Self::read_csv(File::open(path)?)
    }

    /// Writes the `time_s,accel_g` format read back by [`read_csv`]
    /// (shortest round-trip float formatting, lossless for `f32`/`f64`).
    ///
    /// [`read_csv`]: Self::read_csv
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<(), SignalError> {
        writeln!(writer, "time_s,accel_g")?;
        let dt = self.dt.to_f64().unwrap();
        for (i, s) in self.samples.iter().enumerate() {
            writeln!(writer, "{},{s}", i as f64 * dt)?;
        }
        Ok(())
    }

    pub fn write_csv_path(&self, path: &Path) -> Result<(), SignalError> {
        let mut file = File::create(path)?;
        self.write_csv(&mut file)?;
        file.flush()?;
        Ok(())
    }
}

pub(crate) fn require_power_of_two(len: usize) -> Result<(), SignalError> {
    if len < 2 || !len.is_power_of_two() {
        Err(SignalError::NotPowerOfTwo { len })
    } else {
        Ok(())
    }
}
