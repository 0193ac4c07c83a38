//! Outage statistics of Rayleigh product MIMO channels.
//!
//! The channel is `H = Psi† Theta / sqrt(R S)` with independent complex
//! Gaussian factors; this crate computes the asymptotic mean and variance
//! of the capacity `log det(I + gamma H H†)`, the Gaussian outage
//! probability and its quantiles, and the finite-SNR diversity-multiplexing
//! tradeoff.  Two independent verification engines back the analytics: a
//! deterministic Monte Carlo channel simulator and an exact enumeration of
//! non-crossing disc/annular permutations.
//!
//! ```
//! use rayprod_core::asymptotics::{capacity_stats, Snr};
//! use rayprod_core::outage::{outage_capacity, outage_probability, ChannelGeometry};
//!
//! let geometry = ChannelGeometry::new(4, 8, 4)?;
//! let stats = capacity_stats(&geometry, Snr::from_db(15.0)?)?;
//! let cap = outage_capacity(0.01, &stats)?;
//! assert!((outage_probability(cap, &stats)? - 0.01).abs() < 1e-10);
//! # Ok::<(), rayprod_core::Error>(())
//! ```

pub mod asymptotics;
pub mod cubic;
pub mod error;
pub mod freecombinatorics;
pub mod montecarlo;
pub mod numeric;
pub mod outage;
pub mod special;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64;
