//! Error function, its inverse, and the normal CDF.
//!
//! `erf`/`erfc` are the fdlibm rational evaluations re-exported from
//! `libm` (< 1 ulp on the range we use). The inverse starts from a
//! rational approximation in `w = -ln(1 - y^2)` and takes two Newton
//! steps on `erf`, which drives the residual below 1e-12 over (-1, 1).

use crate::{Error, Result};

pub use libm::{erf, erfc};

use std::f64::consts::FRAC_2_SQRT_PI;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn erf_inverse_seed(y: f64) -> f64 {
    let w = -(1.0 - y * y).ln();
    let p = if w < 5.0 {
        let w = w - 2.5;
        let mut p = 2.810_226_36e-8;
        p = 3.432_739_39e-7 + p * w;
        p = -3.523_387_7e-6 + p * w;
        p = -4.391_506_54e-6 + p * w;
        p = 2.185_808_7e-4 + p * w;
        p = -1.253_725_03e-3 + p * w;
        p = -4.177_681_64e-3 + p * w;
        p = 0.246_640_727 + p * w;
        1.501_409_41 + p * w
    } else {
        let w = w.sqrt() - 3.0;
        let mut p = -2.002_142_57e-4;
        p = 1.009_505_58e-4 + p * w;
        p = 1.349_343_22e-3 + p * w;
        p = -3.673_428_44e-3 + p * w;
        p = 5.739_507_73e-3 + p * w;
        p = -7.622_461_3e-3 + p * w;
        p = 9.438_870_47e-3 + p * w;
        p = 1.001_674_06 + p * w;
        2.832_976_82 + p * w
    };
    p * y
}

/// Inverse error function: the `x` with `erf(x) = y`, `|y| < 1`.
pub fn erf_inverse(y: f64) -> Result<f64> {
    if !y.is_finite() || y.abs() >= 1.0 {
        return Err(Error::Range(format!(
            "erf_inverse requires |y| < 1, got {y}"
        )));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let mut x = erf_inverse_seed(y);
    for _ in 0..2 {
        let err = erf(x) - y;
        let deriv = FRAC_2_SQRT_PI * (-x * x).exp();
        if deriv == 0.0 {
            break;
        }
        x -= err / deriv;
    }
    Ok(x)
}
