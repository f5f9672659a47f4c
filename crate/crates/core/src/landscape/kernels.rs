//! Auditory-scale helpers: the ERB-rate map and the Plomp–Levelt interference kernel.

use crate::error::{Error, Result};

/// Separation (ERB-rate units) at which the interference kernel peaks.
pub const PL_PEAK_ERB: f64 = 0.25;

/// Ratio of the fast to the slow decay rate in the exponential-difference kernel.
const PL_RATE_RATIO: f64 = 4.0;

/// ERB-rate of a frequency in Hz: `21.4·log10(0.00437·f + 1)`.
pub fn erb_rate(f: f64) -> Result<f64> {
    if f.is_nan() || f < 0.0 {
        return Err(Error::Domain(format!("erb_rate needs f >= 0, got {f}")));
    }
    Ok(erb_rate_unchecked(f))
}

#[inline]
pub(crate) fn erb_rate_unchecked(f: f64) -> f64 {
    21.4 * (0.00437 * f + 1.0).log10()
}

/// Inverse of [`erb_rate`].
pub fn erb_rate_to_hz(z: f64) -> f64 {
    (10f64.powf(z / 21.4) - 1.0) / 0.00437
}

/// Slow decay rate `p` placing the kernel maximum at [`PL_PEAK_ERB`].
fn pl_slow_rate() -> f64 {
    PL_RATE_RATIO.ln() / ((PL_RATE_RATIO - 1.0) * PL_PEAK_ERB)
}

fn pl_unnormalized(d: f64, p: f64) -> f64 {
    (-p * d).exp() - (-PL_RATE_RATIO * p * d).exp()
}

/// Plomp–Levelt interference weight for a separation of `d` ERB-rate units.
///
/// `g(d) = n·(e^(−p·d) − e^(−4p·d))`, zero at `d = 0`, peaking at exactly 1
/// for `d = 0.25` and decaying to zero for wide separations. Negative input is
/// treated as its magnitude.
#[inline]
pub fn pl_kernel(d: f64) -> f64 {
    let p = pl_slow_rate();
    let d = d.abs();
    pl_unnormalized(d, p) / pl_unnormalized(PL_PEAK_ERB, p)
}

/// Table-free kernel evaluator with the constants hoisted out.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PlKernel {
    p: f64,
    q: f64,
    norm: f64,
}

impl PlKernel {
    pub(crate) fn new() -> Self {
        let p = pl_slow_rate();
        Self {
            p,
            q: PL_RATE_RATIO * p,
            norm: 1.0 / pl_unnormalized(PL_PEAK_ERB, p),
        }
    }

    #[inline]
    pub(crate) fn eval(&self, d: f64) -> f64 {
        let d = d.abs();
        self.norm * ((-self.p * d).exp() - (-self.q * d).exp())
    }
}
