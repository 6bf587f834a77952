//! Gauss hypergeometric function with `a = b = 1`.

use core::f64::consts::PI;

#[allow(unused_imports)]
use crate::math::FloatExt;
use crate::{Error, Result};

/// Above this argument the power series is replaced by the `1 - z`
/// connection formula.
pub const SERIES_Z_MAX: f64 = 0.95;

const MAX_TERMS: usize = 1_000_000;
const REL_STOP: f64 = 1e-14;

/// `₂F₁(1, 1; c; z)` for `c > 0` and `0 ≤ z < 1`.
///
/// With `a = b = 1` the k-th series term is `z^k k! / (c)_k`, so consecutive
/// terms satisfy `t_{k+1} = t_k · z (k + 1) / (c + k)`. Every term is
/// positive, which makes the function increasing in `z`.
///
/// For `c ∈ (0, 1)` and `z > 0.95` the series needs ~`1/(1-z)` terms; there we
/// switch to
///
/// ```text
/// ₂F₁(1,1;c;z) = (c-1)/(c-2) · ₂F₁(1,1;3-c;1-z) + π(1-c)/sin(πc) · (1-z)^{c-2} z^{1-c}
/// ```
///
/// which is DLMF 15.8.4 with both gamma-ratio prefactors reduced in closed
/// form and `₂F₁(c-1, c-1; c-1; w) = (1-w)^{1-c}`.
pub fn hyp2f1_11c(c: f64, z: f64) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Domain("hypergeometric parameter c must be positive"));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain("hypergeometric argument must lie in [0, 1)"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if c == 1.0 {
        return Ok(1.0 / (1.0 - z));
    }
    if z > SERIES_Z_MAX && c < 1.0 {
        return hyp2f1_11c_reflected(c, z);
    }
    hyp2f1_11c_series(c, z)
}

/// Direct power series, capped at 10⁶ terms.
pub fn hyp2f1_11c_series(c: f64, z: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= z * (kf + 1.0) / (c + kf);
        sum += term;
        if term.abs() < REL_STOP * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::SeriesNotConverged {
        partial: sum,
        terms: MAX_TERMS,
    })
}

fn hyp2f1_11c_reflected(c: f64, z: f64) -> Result<f64> {
    let w = 1.0 - z;
    // 3 - c > 2 so this series converges quickly for w < 0.05.
    let regular = (c - 1.0) / (c - 2.0) * hyp2f1_11c_series(3.0 - c, w)?;
    let singular = PI * (1.0 - c) / (PI * c).sin() * w.powf(c - 2.0) * z.powf(1.0 - c);
    Ok(regular + singular)
}
