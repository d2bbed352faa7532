//! Intensity scaling and engineering demand parameter extraction.

use crate::signal::AccelTimeSeries;
use crate::spectra::sdof::sdof_absolute_accel;
use crate::{cast, Scalar};

use super::ValidationError;

/// Scales a record so its full-duration spectral acceleration at `t1`
/// equals `target_sa` (g); returns the scaled record and the factor.
/// Linear in the signal, so the scaled ordinate is exact to rounding.
pub fn scale_to_intensity<T: Scalar>(
    series: &AccelTimeSeries<T>,
    t1: T,
    target_sa: T,
    damping_ratio: T,
) -> Result<(AccelTimeSeries<T>, T), ValidationError> {
    if !(target_sa > T::zero()) || !target_sa.is_finite() {
        return Err(ValidationError::BadScaling(format!(
            "target spectral acceleration must be positive, got {target_sa}"
        )));
    }
    let abs_acc = sdof_absolute_accel(series, t1, damping_ratio)?;
    let ordinate = abs_acc
        .iter()
        .fold(T::zero(), |m, &a| m.max(a.abs()));
    if ordinate == T::zero() {
        return Err(ValidationError::ZeroOrdinate {
            t1: t1.to_f64().unwrap(),
        });
    }
    let factor = target_sa / ordinate;
    Ok((series.scaled(factor), factor))
}

/// Peak story drifts and roof displacement of one simulated input.
#[derive(Debug, Clone)]
pub struct EdpReport<T> {
    pub input_id: String,
    /// Peak |u_i − u_{i−1}| / h_i per story, percent.
    pub drift_ratios_pct: Vec<T>,
    /// Peak |u_top|, same length units as the histories.
    pub roof_disp: T,
}

/// Extracts demand peaks from per-floor displacement histories (bottom
/// floor first; u_0 = ground = 0).
pub fn extract_edps<T: Scalar>(
    displacements: &[Vec<T>],
    story_heights: &[T],
    input_id: impl Into<String>,
) -> Result<EdpReport<T>, ValidationError> {
    let n = displacements.len();
    if n == 0 {
        return Err(ValidationError::BadHistories("no floors".into()));
    }
    if story_heights.len() != n {
        return Err(ValidationError::BadHistories(format!(
            "{} heights for {} floors",
            story_heights.len(),
            n
        )));
    }
    let len = displacements[0].len();
    if len == 0 || displacements.iter().any(|h| h.len() != len) {
        return Err(ValidationError::BadHistories(
            "displacement histories must share one nonzero length".into(),
        ));
    }
    let hundred: T = cast(100.0);
    let mut drift_ratios_pct = Vec::with_capacity(n);
    for i in 0..n {
        let row = &displacements[i];
        let peak = if i == 0 {
            row.iter().fold(T::zero(), |m, &u| m.max(u.abs()))
        } else {
            row.iter()
                .zip(&displacements[i - 1])
                .fold(T::zero(), |m, (&u, &b)| m.max((u - b).abs()))
        };
        drift_ratios_pct.push(hundred * peak / story_heights[i]);
    }
    let roof_disp = displacements[n - 1]
        .iter()
        .fold(T::zero(), |m, &u| m.max(u.abs()));
    Ok(EdpReport {
        input_id: input_id.into(),
        drift_ratios_pct,
        roof_disp,
    })
}
