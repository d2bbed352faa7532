//! Adaptive explicit Runge-Kutta integration (Dormand-Prince 5(4)) for
//! the nonlinear structural state equations. Error per step is controlled
//! against `atol + rtol·|y|` componentwise; the step shrinks on rejection
//! and the integration reports the failing time if the step collapses.

use crate::{cast, Scalar};

use super::ValidationError;

/// Integration tolerances and step limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Hard cap on the step size, seconds.
    pub max_step: T,
}

impl<T: Scalar> Default for OdeOptions<T> {
    fn default() -> Self {
        Self {
            rtol: cast(1e-6),
            atol: cast(1e-9),
            max_step: cast(0.01),
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

/// Advances `y` from `t0` to `t1` under `rhs(t, y, dy)`.
pub(crate) fn integrate_to<T, F>(
    rhs: &F,
    t0: T,
    t1: T,
    y: &mut [T],
    opts: &OdeOptions<T>,
) -> Result<(), ValidationError>
where
    T: Scalar,
    F: Fn(T, &[T], &mut [T]),
{
    let n = y.len();
    let span = t1 - t0;
    if !(span > T::zero()) {
        return Ok(());
    }
    let h_min = cast::<T>(1e-13) * span.max(T::one());
    let mut t = t0;
    let mut h = opts.max_step.min(span);
    let mut k = vec![vec![T::zero(); n]; 7];
    let mut y_stage = vec![T::zero(); n];
    let mut y_new = vec![T::zero(); n];

    while t < t1 {
        let remaining = t1 - t;
        if h > remaining {
            h = remaining;
        }

        rhs(t, y, &mut k[0]);
        for stage in 0..6 {
            for i in 0..n {
                let mut acc = T::zero();
                for (j, row) in A[stage].iter().enumerate().take(stage + 1) {
                    acc += cast::<T>(*row) * k[j][i];
                }
                y_stage[i] = y[i] + h * acc;
            }
            rhs(t + h * cast::<T>(C[stage]), &y_stage, &mut k[stage + 1]);
        }

        let mut err_sq = T::zero();
        for i in 0..n {
            let mut y5 = T::zero();
            let mut y4 = T::zero();
            for s in 0..7 {
                y5 += cast::<T>(B5[s]) * k[s][i];
                y4 += cast::<T>(B4[s]) * k[s][i];
            }
            y_new[i] = y[i] + h * y5;
            let e = h * (y5 - y4);
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            let r = e / scale;
            err_sq += r * r;
        }
        let err = (err_sq / cast::<T>(n as f64)).sqrt();

        if err <= T::one() {
            t += h;
            y.copy_from_slice(&y_new);
        } else if h <= h_min {
            return Err(ValidationError::StepFailure {
                t: t.to_f64().unwrap(),
                h: h.to_f64().unwrap(),
            });
        }
        // Classic controller with safety factor 0.9, growth capped at 5x.
        let factor = if err > T::zero() {
            cast::<T>(0.9) * err.powf(cast::<T>(-0.2))
        } else {
            cast::<T>(5.0)
        };
        let factor = factor.max(cast::<T>(0.2)).min(cast::<T>(5.0));
        h = (h * factor).min(opts.max_step).max(h_min);
    }
    Ok(())
}
