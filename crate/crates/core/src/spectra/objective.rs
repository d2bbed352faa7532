//! Running spectra and the spectral-mismatch objective.
//!
//! The running spectrum is computed in one pass per period: the oscillator
//! history is integrated once and its running peak recorded at each grid
//! instant, so a full grid costs O(periods × samples) rather than
//! O(periods × samples²). Periods are independent and evaluated in
//! parallel; rows are written by index, so the result does not depend on
//! scheduling.

use rayon::prelude::*;

use super::sdof::sdof_absolute_accel;
use super::{PeriodGrid, SpectraError, SpectrumGrid, TimeGrid};
use crate::signal::AccelTimeSeries;
use crate::Scalar;

/// Maps each grid instant to the nearest sample index.
fn time_indices<T: Scalar>(
    ground: &AccelTimeSeries<T>,
    times: &TimeGrid<T>,
) -> Result<Vec<usize>, SpectraError> {
    let dt = ground.dt().to_f64().unwrap();
    let n = ground.len();
    let duration = ground.duration().to_f64().unwrap();
    let t_last = times.last().to_f64().unwrap();
    if t_last > duration * (1.0 + 1e-9) {
        return Err(SpectraError::TimesBeyondDuration {
            t_last,
            duration,
        });
    }
    Ok(times
        .times()
        .iter()
        .map(|t| {
            let idx = (t.to_f64().unwrap() / dt).round() as usize;
            idx.min(n - 1)
        })
        .collect())
}

/// Grid of running peak absolute accelerations: entry (i, j) is
/// max |ẍ + a_g| of the period-T_i oscillator over [0, t_j]. Rows are
/// cumulative maxima by construction.
pub fn running_spectrum<T: Scalar>(
    ground: &AccelTimeSeries<T>,
    periods: &PeriodGrid<T>,
    times: &TimeGrid<T>,
    damping_ratio: T,
) -> Result<SpectrumGrid<T>, SpectraError> {
    let indices = time_indices(ground, times)?;
    let rows: Vec<Vec<T>> = periods
        .periods()
        .par_iter()
        .map(|&period| -> Result<Vec<T>, SpectraError> {
            let abs_acc = sdof_absolute_accel(ground, period, damping_ratio)?;
            let mut row = Vec::with_capacity(indices.len());
            let mut peak = T::zero();
            let mut upto = 0; // samples [0, upto) already folded into peak
            for &idx in &indices {
                while upto <= idx {
                    let a = abs_acc[upto].abs();
                    if a > peak {
                        peak = a;
                    }
                    upto += 1;
                }
                row.push(peak);
            }
            Ok(row)
        })
        .collect::<Result<_, _>>()?;
    let mut values = Vec::with_capacity(periods.len() * times.len());
    for row in rows {
        values.extend_from_slice(&row);
    }
    SpectrumGrid::new(values, periods.clone(), times.clone())
}

/// Sum of squared differences between the running spectrum of `ground`
/// and the target grid, over the target's own (period, time) grid.
pub fn objective<T: Scalar>(
    ground: &AccelTimeSeries<T>,
    target: &SpectrumGrid<T>,
    damping_ratio: T,
) -> Result<T, SpectraError> {
    let response = running_spectrum(
        ground,
        target.period_grid(),
        target.time_grid(),
        damping_ratio,
    )?;
    Ok(mismatch_sum(&response, target))
}

/// [`objective`] with the evaluation grids passed explicitly; rejects
/// grids that differ from the ones the target was built on.
pub fn objective_checked<T: Scalar>(
    ground: &AccelTimeSeries<T>,
    target: &SpectrumGrid<T>,
    periods: &PeriodGrid<T>,
    times: &TimeGrid<T>,
    damping_ratio: T,
) -> Result<T, SpectraError> {
    if periods != target.period_grid() || times != target.time_grid() {
        return Err(SpectraError::GridMismatch(
            "evaluation grids differ from the target's grids".into(),
        ));
    }
    objective(ground, target, damping_ratio)
}

/// Objective of the identically-zero signal: the full target energy
/// Σ S_aT², the natural normalizer for convergence checks.
pub fn zero_signal_objective<T: Scalar>(target: &SpectrumGrid<T>) -> T {
    target.values().iter().map(|&v| v * v).sum()
}

/// Entrywise Σ (response − target)²; grids must agree, which holds by
/// construction when the response is computed on the target's grids.
fn mismatch_sum<T: Scalar>(response: &SpectrumGrid<T>, target: &SpectrumGrid<T>) -> T {
    response
        .values()
        .iter()
        .zip(target.values())
        .map(|(&r, &t)| {
            let d = r - t;
            d * d
        })
        .sum()
}
