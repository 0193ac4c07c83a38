//! Gaussian approximation of the capacity distribution: outage
//! probability, outage-capacity quantiles, and the finite-SNR
//! diversity-multiplexing tradeoff.

use crate::asymptotics::{capacity_stats, CapacityStats, Snr};
use crate::special;
use crate::spectra::AspectRatios;
use crate::{Error, Result};

pub use crate::special::{erf, erf_inverse, erfc};

/// Finite antenna and scatterer counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelGeometry {
    r: usize,
    s: usize,
    t: usize,
}

impl ChannelGeometry {
    pub fn new(receive: usize, scatterers: usize, transmit: usize) -> Result<Self> {
        if receive == 0 || scatterers == 0 || transmit == 0 {
            return Err(Error::Range(format!(
                "geometry counts must be >= 1, got R={receive}, S={scatterers}, T={transmit}"
            )));
        }
        Ok(Self {
            r: receive,
            s: scatterers,
            t: transmit,
        })
    }

    pub fn receive(&self) -> usize {
        self.r
    }

    pub fn scatterers(&self) -> usize {
        self.s
    }

    pub fn transmit(&self) -> usize {
        self.t
    }

    /// `min(R, S, T)`, the rank bound of the channel.
    pub fn n_min(&self) -> usize {
        self.r.min(self.s).min(self.t)
    }

    /// Limiting ratios `rho = S/R`, `zeta = T/S`.
    pub fn ratios(&self) -> Result<AspectRatios> {
        AspectRatios::new(self.s as f64 / self.r as f64, self.t as f64 / self.s as f64)
    }
}

/// One point of the finite-SNR diversity-multiplexing tradeoff.
#[derive(Debug, Clone, Copy)]
pub struct DmtPoint {
    /// Multiplexing gain in `[0, n_min]`.
    pub m: f64,
    /// Linear SNR the point was evaluated at.
    pub gamma: f64,
    /// `K(m, gamma) = (n - m)/(sqrt(2) n) * mu_I / sigma_I`.
    pub k_value: f64,
    /// Diversity gain, `-d log P_out / d log gamma` of the Gaussian model.
    pub d: f64,
}

fn check_stats(stats: &CapacityStats) -> Result<f64> {
    if stats.sigma_sq.is_nan() || stats.sigma_sq <= 0.0 {
        return Err(Error::Range(format!(
            "degenerate variance {}; outage statistics need sigma^2 > 0",
            stats.sigma_sq
        )));
    }
    Ok(stats.sigma_sq.sqrt())
}

/// Outage probability at a target rate (nats):
/// `F_I(r) ~ (1 + erf((r - mu_I)/(sigma_I sqrt(2))))/2`.
pub fn outage_probability(rate: f64, stats: &CapacityStats) -> Result<f64> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(Error::Range(format!(
            "rate must be finite and nonnegative, got {rate}"
        )));
    }
    let sigma = check_stats(stats)?;
    Ok(0.5 * (1.0 + special::erf((rate - stats.mu_total) / (sigma * std::f64::consts::SQRT_2))))
}

/// Outage capacity (nats) at a target outage probability:
/// `mu_I + sigma_I sqrt(2) erf^{-1}(2 P_out - 1)`.
pub fn outage_capacity(p_out: f64, stats: &CapacityStats) -> Result<f64> {
    if !(p_out > 0.0 && p_out < 1.0) {
        return Err(Error::Range(format!(
            "outage probability must lie in (0, 1), got {p_out}"
        )));
    }
    let sigma = check_stats(stats)?;
    Ok(stats.mu_total + sigma * std::f64::consts::SQRT_2 * special::erf_inverse(2.0 * p_out - 1.0)?)
}

/// Rate (nats) at multiplexing gain `m`: `r = m mu_I / n`, `n = min(R, S, T)`.
pub fn multiplexing_rate(m: f64, geometry: &ChannelGeometry, stats: &CapacityStats) -> Result<f64> {
    let n = geometry.n_min() as f64;
    if !(m.is_finite() && (0.0..=n).contains(&m)) {
        return Err(Error::Range(format!(
            "multiplexing gain must lie in [0, {n}], got {m}"
        )));
    }
    Ok(m * stats.mu_total / n)
}

fn k_value(m: f64, n: f64, stats: &CapacityStats) -> Result<f64> {
    let sigma = check_stats(stats)?;
    Ok((n - m) / (std::f64::consts::SQRT_2 * n) * stats.mu_total / sigma)
}

/// Finite-SNR diversity gain at multiplexing gain `m` for an `R = T`
/// geometry, from the Gaussian outage model:
/// `d = (2 gamma / sqrt(pi)) exp(-K^2) / (1 + erf(-K)) * dK/dgamma`.
///
/// `dK/dgamma` is a central difference in `log gamma` (relative step 1e-4)
/// with one Richardson refinement.
pub fn finite_snr_dmt(m: f64, geometry: &ChannelGeometry, snr: Snr) -> Result<DmtPoint> {
    let n = geometry.n_min() as f64;
    if !(m.is_finite() && (0.0..=n).contains(&m)) {
        return Err(Error::Range(format!(
            "multiplexing gain must lie in [0, {n}], got {m}"
        )));
    }
    let gamma = snr.linear();
    let stats = capacity_stats(geometry, snr)?;
    let k0 = k_value(m, n, &stats)?;

    let k_at = |lng: f64| -> Result<f64> {
        let s = capacity_stats(geometry, Snr::from_linear(lng.exp())?)?;
        k_value(m, n, &s)
    };
    let w = gamma.ln();
    let h = 1e-4;
    let d1 = (k_at(w + h)? - k_at(w - h)?) / (2.0 * h);
    let d2 = (k_at(w + 0.5 * h)? - k_at(w - 0.5 * h)?) / h;
    let dk_dlog = (4.0 * d2 - d1) / 3.0;
    let dk_dgamma = dk_dlog / gamma;

    let d = 2.0 * gamma / std::f64::consts::PI.sqrt() * (-k0 * k0).exp()
        / (1.0 + special::erf(-k0))
        * dk_dgamma;
    Ok(DmtPoint {
        m,
        gamma,
        k_value: k0,
        d,
    })
}
