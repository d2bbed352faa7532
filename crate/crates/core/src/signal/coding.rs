//! Reduction of a full wavelet coefficient set to the decision variables
//! the optimizer searches over. A [`BandLayout`] marks which bands are
//! active; encoding projects a signal onto the active coefficients and
//! decoding embeds them back with inactive bands pinned to zero. Both are
//! linear, and because the transform is orthonormal, encode∘decode is the
//! identity on decision vectors and decode∘encode an orthogonal projection.

use std::fmt;
use std::str::FromStr;

use super::wavelet::{dwt_forward, dwt_inverse, max_levels, Wavelet, WaveletCoeffs};
use super::{require_power_of_two, AccelTimeSeries, SignalError};
use crate::Scalar;

/// One band of a dyadic decomposition. Detail level 1 is the finest
/// (half the signal length); the approximation is the coarsest band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Band {
    Approximation,
    Detail { level: usize },
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Band::Approximation => write!(f, "approx"),
            Band::Detail { level } => write!(f, "d{level}"),
        }
    }
}

impl FromStr for Band {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "approx" || lower == "a" {
            return Ok(Band::Approximation);
        }
        lower
            .strip_prefix('d')
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&level| level >= 1)
            .map(|level| Band::Detail { level })
            .ok_or_else(|| format!("unknown band {s:?}; expected \"approx\" or \"d<level>\""))
    }
}

/// Which coefficient bands of a full-depth decomposition are decision
/// variables. Active bands are ordered coarsest first; every inactive
/// band is held at zero during reconstruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandLayout {
    signal_length: usize,
    levels: usize,
    active: Vec<Band>,
    n_vars: usize,
}

impl BandLayout {
    /// Layout over a full-depth decomposition with an explicit active set.
    pub fn new(signal_length: usize, active_bands: &[Band]) -> Result<Self, SignalError> {
        require_power_of_two(signal_length)?;
        let levels = max_levels(signal_length);
        let mut active = active_bands.to_vec();
        active.sort();
        active.dedup();
        for band in &active {
            if let Band::Detail { level } = band {
                if *level < 1 || *level > levels {
                    return Err(SignalError::LevelsTooDeep {
                        levels: *level,
                        len: signal_length,
                        max: levels,
                    });
                }
            }
        }
        // Coarsest-first order: approximation, then details deep to shallow.
        active.sort_by_key(|band| match band {
            Band::Approximation => 0,
            Band::Detail { level } => levels + 1 - level,
        });
        let n_vars = active
            .iter()
            .map(|&band| band_len(signal_length, levels, band))
            .sum();
        Ok(Self {
            signal_length,
            levels,
            active,
            n_vars,
        })
    }

    /// Full-depth layout that drops the `dropped_finest` highest-frequency
    /// detail bands and keeps everything else.
    pub fn drop_finest(signal_length: usize, dropped_finest: usize) -> Result<Self, SignalError> {
        require_power_of_two(signal_length)?;
        let levels = max_levels(signal_length);
        if dropped_finest > levels {
            return Err(SignalError::LevelsTooDeep {
                levels: dropped_finest,
                len: signal_length,
                max: levels,
            });
        }
        let mut active = vec![Band::Approximation];
        for level in (dropped_finest + 1..=levels).rev() {
            active.push(Band::Detail { level });
        }
        Self::new(signal_length, &active)
    }

    /// Default reduction: drop the two finest detail bands, keeping a
    /// quarter of the coefficients (512 of 2048, 128 of 512).
    pub fn default_for(signal_length: usize) -> Result<Self, SignalError> {
        Self::drop_finest(signal_length, 2)
    }

    pub fn signal_length(&self) -> usize {
        self.signal_length
    }

    /// Decomposition depth (always the maximum for the signal length).
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn active_bands(&self) -> &[Band] {
        &self.active
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn band_len(&self, band: Band) -> usize {
        band_len(self.signal_length, self.levels, band)
    }
}

fn band_len(signal_length: usize, levels: usize, band: Band) -> usize {
    match band {
        Band::Approximation => signal_length >> levels,
        Band::Detail { level } => signal_length >> level,
    }
}

/// Active-band wavelet coefficients: the optimizer's search coordinates.
/// Values follow the layout's coarsest-first band order.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVector<T> {
    values: Vec<T>,
    layout: BandLayout,
}

impl<T: Scalar> DecisionVector<T> {
    pub fn new(values: Vec<T>, layout: BandLayout) -> Result<Self, SignalError> {
        if values.len() != layout.n_vars() {
            return Err(SignalError::VectorLength {
                expected: layout.n_vars(),
                got: values.len(),
            });
        }
        Ok(Self { values, layout })
    }

    pub fn zeros(layout: BandLayout) -> Self {
        Self {
            values: vec![T::zero(); layout.n_vars()],
            layout,
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn layout(&self) -> &BandLayout {
        &self.layout
    }
}

/// Projects a signal onto the active bands (lossy: inactive-band content
/// is discarded).
pub fn encode<T: Scalar>(
    series: &AccelTimeSeries<T>,
    layout: &BandLayout,
    wavelet: Wavelet,
) -> Result<DecisionVector<T>, SignalError> {
    if series.len() != layout.signal_length() {
        return Err(SignalError::SignalLength {
            expected: layout.signal_length(),
            got: series.len(),
        });
    }
    let coeffs = dwt_forward(series, wavelet, layout.levels())?;
    let mut values = Vec::with_capacity(layout.n_vars());
    for &band in layout.active_bands() {
        match band {
            Band::Approximation => values.extend_from_slice(coeffs.approx()),
            Band::Detail { level } => values.extend_from_slice(coeffs.detail(level)),
        }
    }
    DecisionVector::new(values, layout.clone())
}

/// Embeds decision values into a full coefficient set (inactive bands
/// zero) and reconstructs the accelerogram. Linear in the vector.
pub fn decode<T: Scalar>(
    vector: &DecisionVector<T>,
    wavelet: Wavelet,
    dt: T,
) -> Result<AccelTimeSeries<T>, SignalError> {
    decode_values(vector.values(), vector.layout(), wavelet, dt)
}

/// [`decode`] for a raw value slice, the optimizer-facing entry point.
pub fn decode_values<T: Scalar>(
    values: &[T],
    layout: &BandLayout,
    wavelet: Wavelet,
    dt: T,
) -> Result<AccelTimeSeries<T>, SignalError> {
    if values.len() != layout.n_vars() {
        return Err(SignalError::VectorLength {
            expected: layout.n_vars(),
            got: values.len(),
        });
    }
    let mut coeffs = WaveletCoeffs::zeros(layout.signal_length(), layout.levels(), dt)?;
    let mut offset = 0;
    for &band in layout.active_bands() {
        let len = layout.band_len(band);
        let chunk = &values[offset..offset + len];
        match band {
            Band::Approximation => coeffs.approx_mut().copy_from_slice(chunk),
            Band::Detail { level } => coeffs.detail_mut(level).copy_from_slice(chunk),
        }
        offset += len;
    }
    dwt_inverse(&coeffs, wavelet)
}
