//! Periodized orthogonal Daubechies wavelet transforms.
//!
//! Analysis correlates the signal with the scaling filter `lo` and the
//! quadrature-mirror filter `hi[m] = (-1)^m · lo[L-1-m]`, stepping by two
//! with circular indexing:
//!
//! ```text
//! a[k] = Σ_m lo[m] · x[(2k + m) mod n]      (approximation)
//! d[k] = Σ_m hi[m] · x[(2k + m) mod n]      (detail)
//! ```
//!
//! For even `n` the wrapped analysis matrix stays exactly orthonormal no
//! matter how often the filter wraps, because aliased autocorrelation lags
//! `2k + j·n` are all even and the Daubechies double-shift orthogonality
//! kills every one of them. Synthesis is therefore the transpose, giving
//! perfect reconstruction and energy preservation to rounding error at
//! every level down to band length 2.
//!
//! `DbN` has `N` vanishing moments and `2N` taps; `db1` is the Haar pair.

use std::fmt;
use std::str::FromStr;

use crate::{cast, Scalar};

use super::{require_power_of_two, AccelTimeSeries, SignalError};

const DB1: [f64; 2] = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
const DB2: [f64; 4] = [
    0.48296291314453416,
    0.8365163037378079,
    0.2241438680420134,
    -0.12940952255126037,
];
const DB3: [f64; 6] = [
    0.33267055295008263,
    0.8068915093110925,
    0.45987750211849154,
    -0.13501102001025458,
    -0.08544127388202666,
    0.03522629188570953,
];
const DB4: [f64; 8] = [
    0.2303778133088965,
    0.7148465705529157,
    0.6308807679298589,
    -0.027983769416859854,
    -0.18703481171909309,
    0.030841381835560764,
    0.0328830116668852,
    -0.010597401785069032,
];
const DB5: [f64; 10] = [
    0.16010239797419293,
    0.6038292697971896,
    0.7243085284377729,
    0.13842814590132074,
    -0.24229488706638203,
    -0.032244869584638375,
    0.07757149384004572,
    -0.006241490212798274,
    -0.012580751999081999,
    0.0033357252854737712,
];
const DB6: [f64; 12] = [
    0.11154074335010947,
    0.49462389039845306,
    0.7511339080210954,
    0.31525035170919763,
    -0.22626469396543983,
    -0.12976686756726194,
    0.09750160558732304,
    0.027522865530305727,
    -0.03158203931748603,
    0.0005538422011614961,
    0.004777257510945511,
    -0.0010773010853084796,
];
const DB7: [f64; 14] = [
    0.07785205408500918,
    0.3965393194819173,
    0.7291320908462351,
    0.4697822874051931,
    -0.14390600392856498,
    -0.22403618499387498,
    0.07130921926683026,
    0.08061260915108308,
    -0.03802993693501441,
    -0.01657454163066688,
    0.01255099855609984,
    0.0004295779729213665,
    -0.0018016407040474908,
    0.00035371379997452024,
];
const DB8: [f64; 16] = [
    0.05441584224310401,
    0.31287159091429995,
    0.6756307362972898,
    0.5853546836542067,
    -0.015829105256349306,
    -0.2840155429615469,
    0.0004724845739132828,
    0.12874742662047847,
    -0.017369301001807547,
    -0.044088253930794755,
    0.013981027917398282,
    0.008746094047405777,
    -0.004870352993451574,
    -0.00039174037337694705,
    0.0006754494064505693,
    -0.00011747678412476953,
];
const DB9: [f64; 18] = [
    0.038077947363878345,
    0.24383467461259034,
    0.6048231236901112,
    0.6572880780513005,
    0.13319738582500756,
    -0.2932737832791749,
    -0.09684078322297646,
    0.14854074933810638,
    0.03072568147933338,
    -0.06763282906132997,
    0.00025094711483145197,
    0.022361662123679096,
    -0.004723204757751397,
    -0.00428150368246343,
    0.0018476468830562265,
    0.00023038576352319597,
    -0.0002519631889427101,
    3.93473203162716e-5,
];
const DB10: [f64; 20] = [
    0.026670057900555554,
    0.1881768000776915,
    0.5272011889317256,
    0.6884590394536035,
    0.2811723436605775,
    -0.24984642432731538,
    -0.19594627437737705,
    0.12736934033579325,
    0.09305736460357235,
    -0.07139414716639708,
    -0.029457536821875813,
    0.033212674059341,
    0.0036065535669561697,
    -0.010733175483330575,
    0.001395351747052901,
    0.001992405295185056,
    -0.0006858566949597116,
    -0.00011646685512928545,
    9.358867032006959e-5,
    -1.3264202894521244e-5,
];

/// Orthogonal Daubechies wavelet of a given order (vanishing moments).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Wavelet {
    order: u8,
}

impl Wavelet {
    /// Haar wavelet, `db1`; the only member with hand-checkable filters.
    pub const HAAR: Wavelet = Wavelet { order: 1 };

    pub fn daubechies(order: u8) -> Result<Self, SignalError> {
        if (1..=10).contains(&order) {
            Ok(Self { order })
        } else {
            Err(SignalError::UnknownWavelet(format!("db{order}")))
        }
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    /// Scaling (low-pass) filter taps, sum √2, unit norm.
    pub fn lo(&self) -> &'static [f64] {
        match self.order {
            1 => &DB1,
            2 => &DB2,
            3 => &DB3,
            4 => &DB4,
            5 => &DB5,
            6 => &DB6,
            7 => &DB7,
            8 => &DB8,
            9 => &DB9,
            10 => &DB10,
            _ => unreachable!("order validated at construction"),
        }
    }

    /// Wavelet (high-pass) filter by the quadrature-mirror relation.
    pub fn hi(&self) -> Vec<f64> {
        let lo = self.lo();
        let len = lo.len();
        (0..len)
            .map(|m| {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * lo[len - 1 - m]
            })
            .collect()
    }

    fn filters<T: Scalar>(&self) -> (Vec<T>, Vec<T>) {
        let lo: Vec<T> = self.lo().iter().map(|&h| cast(h)).collect();
        let hi: Vec<T> = self.hi().iter().map(|&h| cast(h)).collect();
        (lo, hi)
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "db{}", self.order)
    }
}

impl FromStr for Wavelet {
    type Err = SignalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "haar" {
            return Ok(Self::HAAR);
        }
        lower
            .strip_prefix("db")
            .and_then(|d| d.parse::<u8>().ok())
            .map(Wavelet::daubechies)
            .unwrap_or_else(|| Err(SignalError::UnknownWavelet(s.to_string())))
    }
}

/// Full multilevel coefficient set of a dyadic decomposition.
///
/// `detail(1)` is the finest band (length `n/2`); `detail(levels)` and the
/// approximation are the coarsest (length `n / 2^levels` each).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletCoeffs<T> {
    /// Coarsest approximation band.
    approx: Vec<T>,
    /// Detail bands ordered coarsest first.
    details: Vec<Vec<T>>,
    signal_length: usize,
    dt: T,
}

impl<T: Scalar> WaveletCoeffs<T> {
    /// All-zero coefficient set for a given decomposition shape.
    pub fn zeros(signal_length: usize, levels: usize, dt: T) -> Result<Self, SignalError> {
        require_power_of_two(signal_length)?;
        check_levels(signal_length, levels)?;
        let coarsest = signal_length >> levels;
        let details = (0..levels)
            .map(|i| vec![T::zero(); coarsest << i])
            .collect();
        Ok(Self {
            approx: vec![T::zero(); coarsest],
            details,
            signal_length,
            dt,
        })
    }

    pub fn levels(&self) -> usize {
        self.details.len()
    }

    pub fn signal_length(&self) -> usize {
        self.signal_length
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn approx(&self) -> &[T] {
        &self.approx
    }

    pub fn approx_mut(&mut self) -> &mut [T] {
        &mut self.approx
    }

    /// Detail band at `level`; 1 is the finest, `levels()` the coarsest.
    pub fn detail(&self, level: usize) -> &[T] {
        assert!((1..=self.levels()).contains(&level), "level out of range");
        &self.details[self.levels() - level]
    }

    pub fn detail_mut(&mut self, level: usize) -> &mut [T] {
        assert!((1..=self.levels()).contains(&level), "level out of range");
        let idx = self.levels() - level;
        &mut self.details[idx]
    }

    /// Coefficients flattened coarsest band first (approximation, then
    /// details from coarsest to finest).
    pub fn flatten(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.signal_length);
        out.extend_from_slice(&self.approx);
        for band in &self.details {
            out.extend_from_slice(band);
        }
        out
    }

    /// Signal energy carried by the coefficients (orthonormal transform).
    pub fn energy(&self) -> T {
        let mut e: T = self.approx.iter().map(|&c| c * c).sum();
        for band in &self.details {
            e += band.iter().map(|&c| c * c).sum();
        }
        e
    }

    fn check_structure(&self) -> Result<(), SignalError> {
        let err = || SignalError::BandStructure {
            expected: self.signal_length,
        };
        require_power_of_two(self.signal_length)?;
        let levels = self.details.len();
        check_levels(self.signal_length, levels)?;
        let coarsest = self.signal_length >> levels;
        if self.approx.len() != coarsest {
            return Err(err());
        }
        for (i, band) in self.details.iter().enumerate() {
            if band.len() != coarsest << i {
                return Err(err());
            }
        }
        Ok(())
    }
}

fn check_levels(len: usize, levels: usize) -> Result<(), SignalError> {
    let max = len.trailing_zeros() as usize;
    if levels == 0 || levels > max {
        return Err(SignalError::LevelsTooDeep { levels, len, max });
    }
    Ok(())
}

/// Maximum decomposition depth for a power-of-two length.
pub fn max_levels(len: usize) -> usize {
    len.trailing_zeros() as usize
}

/// One analysis step: splits `x` (even length) into half-length
/// approximation and detail bands by periodized correlation.
fn analyze_step<T: Scalar>(x: &[T], lo: &[T], hi: &[T]) -> (Vec<T>, Vec<T>) {
    let n = x.len();
    let half = n / 2;
    let mut a = vec![T::zero(); half];
    let mut d = vec![T::zero(); half];
    for k in 0..half {
        let mut sa = T::zero();
        let mut sd = T::zero();
        for (m, (&l, &h)) in lo.iter().zip(hi).enumerate() {
            let xv = x[(2 * k + m) % n];
            sa += l * xv;
            sd += h * xv;
        }
        a[k] = sa;
        d[k] = sd;
    }
    (a, d)
}

/// One synthesis step, the exact transpose of [`analyze_step`].
fn synthesize_step<T: Scalar>(a: &[T], d: &[T], lo: &[T], hi: &[T]) -> Vec<T> {
    let half = a.len();
    let n = half * 2;
    let mut x = vec![T::zero(); n];
    for k in 0..half {
        for (m, (&l, &h)) in lo.iter().zip(hi).enumerate() {
            x[(2 * k + m) % n] += l * a[k] + h * d[k];
        }
    }
    x
}

/// Multilevel forward transform; recurses on the approximation band.
pub fn dwt_forward<T: Scalar>(
    series: &AccelTimeSeries<T>,
    wavelet: Wavelet,
    levels: usize,
) -> Result<WaveletCoeffs<T>, SignalError> {
    require_power_of_two(series.len())?;
    check_levels(series.len(), levels)?;
    let (lo, hi) = wavelet.filters::<T>();
    let mut current = series.samples().to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d) = analyze_step(&current, &lo, &hi);
        details.push(d);
        current = a;
    }
    details.reverse(); // store coarsest first
    Ok(WaveletCoeffs {
        approx: current,
        details,
        signal_length: series.len(),
        dt: series.dt(),
    })
}

/// Multilevel inverse transform; exact reconstruction up to rounding.
pub fn dwt_inverse<T: Scalar>(
    coeffs: &WaveletCoeffs<T>,
    wavelet: Wavelet,
) -> Result<AccelTimeSeries<T>, SignalError> {
    coeffs.check_structure()?;
    let (lo, hi) = wavelet.filters::<T>();
    let mut current = coeffs.approx.clone();
    for band in &coeffs.details {
        current = synthesize_step(&current, band, &lo, &hi);
    }
    AccelTimeSeries::new(current, coeffs.dt)
}
