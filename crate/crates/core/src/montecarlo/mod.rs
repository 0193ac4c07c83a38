//! Finite-dimensional channel simulation: sampling `H = Psi† Theta / sqrt(RS)`,
//! capacities, empirical statistics, spectral histograms, and Gaussianity
//! diagnostics.
//!
//! Determinism contract: a sample's capacity depends only on
//! `(seed, sample_index, geometry, gamma)`; samples are merged in index
//! order and summaries use pairwise summation, so results are independent
//! of the worker count.

pub mod rng;

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::asymptotics::Snr;
use crate::numeric::central_moments;
use crate::outage::ChannelGeometry;
use crate::special::normal_cdf;
use crate::{Error, Result};

use rng::CounterRng;

const TAG_THETA: u64 = 0;
const TAG_PSI: u64 = 1;
const TAG_RAYLEIGH: u64 = 2;

/// Identifies one channel draw within a seeded experiment.
#[derive(Debug, Clone, Copy)]
pub struct RandomStream {
    pub seed: u64,
    pub sample_index: u64,
}

/// A realized channel matrix (R x T) with its geometry.
#[derive(Debug, Clone)]
pub struct ChannelMatrix {
    entries: DMatrix<Complex64>,
    geometry: ChannelGeometry,
}

impl ChannelMatrix {
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn geometry(&self) -> &ChannelGeometry {
        &self.geometry
    }

    /// `Q = H H†`, Hermitian R x R.
    pub fn gram(&self) -> DMatrix<Complex64> {
        &self.entries * self.entries.adjoint()
    }
}

fn fill_gaussian(rows: usize, cols: usize, mut rng: CounterRng) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.next_complex_gaussian())
}

/// Draw `H = Psi† Theta / sqrt(R S)` with `Theta` S x T and `Psi` S x R,
/// all entries independent standard complex Gaussian.
pub fn sample_channel(geometry: &ChannelGeometry, stream: &RandomStream) -> ChannelMatrix {
    let (r, s, t) = (
        geometry.receive(),
        geometry.scatterers(),
        geometry.transmit(),
    );
    // row-major fill order: entry (i, j) uses counter pair at i * cols + j
    let theta = fill_gaussian(s, t, CounterRng::new(stream.seed, stream.sample_index, TAG_THETA));
    let psi = fill_gaussian(s, r, CounterRng::new(stream.seed, stream.sample_index, TAG_PSI));
    let scale = 1.0 / ((r * s) as f64).sqrt();
    ChannelMatrix {
        entries: psi.adjoint() * theta * Complex64::new(scale, 0.0),
        geometry: *geometry,
    }
}

fn check_snr_positive(snr: Snr) -> Result<f64> {
    let gamma = snr.linear();
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Range(format!("gamma must be positive, got {gamma}")));
    }
    Ok(gamma)
}

/// Instantaneous capacity `log det(I_R + gamma H H†)` in nats via a
/// Cholesky factorization of the shifted Gram matrix.
pub fn capacity_sample(h: &ChannelMatrix, snr: Snr) -> Result<f64> {
    let gamma = check_snr_positive(snr)?;
    let r = h.geometry.receive();
    let mut m = h.gram() * Complex64::new(gamma, 0.0);
    for i in 0..r {
        m[(i, i)] += Complex64::new(1.0, 0.0);
    }
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::Numeric("Cholesky factorization failed (non-finite entries?)".into()))?;
    let mut logdet = 0.0;
    for i in 0..r {
        logdet += chol.l()[(i, i)].re.ln();
    }
    Ok(2.0 * logdet)
}

/// Eigenvalues of `Q = H H†`, ascending.
pub fn gram_eigenvalues(h: &ChannelMatrix) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::new(h.gram());
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("eigensolver produced non-finite values".into()));
    }
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Capacity through the eigenvalue route, `sum log(1 + gamma lambda_i)`.
pub fn capacity_sample_eigen(h: &ChannelMatrix, snr: Snr) -> Result<f64> {
    let gamma = check_snr_positive(snr)?;
    Ok(gram_eigenvalues(h)?
        .iter()
        .map(|&l| (1.0 + gamma * l.max(0.0)).ln())
        .sum())
}

/// Capacity draws with frozen summary statistics.
#[derive(Debug, Clone)]
pub struct CapacitySampleSet {
    pub samples: Vec<f64>,
    pub geometry: ChannelGeometry,
    pub gamma: Snr,
    pub seed: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl CapacitySampleSet {
    /// Assemble a set from raw draws, computing the summary fields.
    pub fn from_samples(
        samples: Vec<f64>,
        geometry: ChannelGeometry,
        gamma: Snr,
        seed: u64,
    ) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Range(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        let n = samples.len() as f64;
        let (mean, m2, m3, m4) = central_moments(&samples);
        let variance = m2 * n / (n - 1.0);
        let (skewness, excess_kurtosis) = if m2 > 0.0 {
            (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
        } else {
            (0.0, 0.0)
        };
        Ok(Self {
            samples,
            geometry,
            gamma,
            seed,
            mean,
            variance,
            skewness,
            excess_kurtosis,
        })
    }

    /// Fraction of samples at or below the rate.
    pub fn empirical_cdf(&self, rate: f64) -> f64 {
        self.samples.iter().filter(|&&c| c <= rate).count() as f64 / self.samples.len() as f64
    }

    /// Empirical p-quantile (nearest-rank on a sorted copy).
    pub fn empirical_quantile(&self, p: f64) -> f64 {
        let mut sorted = self.samples.clone();
        sorted.sort_by(f64::total_cmp);
        let idx = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
        sorted[idx - 1]
    }
}

/// Draw `num_samples` independent channels and collect capacities.
/// Deterministic in `(geometry, gamma, num_samples, seed)` regardless of
/// the rayon worker count.
pub fn run_simulation(
    geometry: &ChannelGeometry,
    snr: Snr,
    num_samples: usize,
    seed: u64,
) -> Result<CapacitySampleSet> {
    check_snr_positive(snr)?;
    if num_samples < 2 {
        return Err(Error::Range(format!(
            "need at least 2 samples, got {num_samples}"
        )));
    }
    let samples: Vec<f64> = (0..num_samples as u64)
        .into_par_iter()
        .map(|i| {
            let h = sample_channel(
                geometry,
                &RandomStream {
                    seed,
                    sample_index: i,
                },
            );
            capacity_sample(&h, snr)
        })
        .collect::<Result<Vec<f64>>>()?;
    CapacitySampleSet::from_samples(samples, *geometry, snr, seed)
}

/// Companion oracle: a conventional R x T Rayleigh channel with i.i.d.
/// CN(0, 1/R) entries (the S -> infinity limit of the product channel),
/// capacity `log det(I + gamma H H†)`.
pub fn run_rayleigh_simulation(
    receive: usize,
    transmit: usize,
    snr: Snr,
    num_samples: usize,
    seed: u64,
) -> Result<CapacitySampleSet> {
    check_snr_positive(snr)?;
    if num_samples < 2 {
        return Err(Error::Range(format!(
            "need at least 2 samples, got {num_samples}"
        )));
    }
    let geometry = ChannelGeometry::new(receive, 1, transmit)?;
    let scale = 1.0 / (receive as f64).sqrt();
    let samples: Vec<f64> = (0..num_samples as u64)
        .into_par_iter()
        .map(|i| {
            let g = fill_gaussian(receive, transmit, CounterRng::new(seed, i, TAG_RAYLEIGH));
            let h = ChannelMatrix {
                entries: g * Complex64::new(scale, 0.0),
                geometry,
            };
            capacity_sample(&h, snr)
        })
        .collect::<Result<Vec<f64>>>()?;
    CapacitySampleSet::from_samples(samples, geometry, snr, seed)
}

/// Per-draw `Tr(H H†) = ||Theta† Psi||_F^2 / (R S)`, without forming `H`.
/// Used for trace-fluctuation cross-checks at large dimension.
pub fn gram_trace_samples(geometry: &ChannelGeometry, num_samples: usize, seed: u64) -> Vec<f64> {
    let (r, s, t) = (
        geometry.receive(),
        geometry.scatterers(),
        geometry.transmit(),
    );
    (0..num_samples as u64)
        .into_par_iter()
        .map(|i| {
            let theta = fill_gaussian(s, t, CounterRng::new(seed, i, TAG_THETA));
            let psi = fill_gaussian(s, r, CounterRng::new(seed, i, TAG_PSI));
            let cross = theta.adjoint() * psi;
            cross.iter().map(|z| z.norm_sqr()).sum::<f64>() / (r * s) as f64
        })
        .collect()
}

/// Pooled eigenvalue histogram of `Q = H H†` over a batch of draws.
#[derive(Debug, Clone)]
pub struct EsdHistogram {
    /// `bins + 1` increasing edges.
    pub bin_edges: Vec<f64>,
    /// Nonnegative masses summing to 1.
    pub masses: Vec<f64>,
}

impl EsdHistogram {
    pub fn bin_midpoints(&self) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect()
    }

    /// Histogram mean via bin midpoints.
    pub fn mean(&self) -> f64 {
        self.bin_midpoints()
            .iter()
            .zip(&self.masses)
            .map(|(x, m)| x * m)
            .sum()
    }

    /// Cauchy transform of the histogram measure at a real point off the
    /// sampled range.
    pub fn cauchy_transform(&self, z: f64) -> f64 {
        self.bin_midpoints()
            .iter()
            .zip(&self.masses)
            .map(|(x, m)| m / (z - x))
            .sum()
    }
}

/// Pool the eigenvalues of every draw in the batch into a histogram with
/// `bins` equal-width bins spanning the observed range.
pub fn empirical_esd(batch: &[ChannelMatrix], bins: usize) -> Result<EsdHistogram> {
    if batch.is_empty() {
        return Err(Error::Range("need at least one channel draw".into()));
    }
    if bins == 0 {
        return Err(Error::Range("need at least one bin".into()));
    }
    let mut eigenvalues = Vec::new();
    for h in batch {
        eigenvalues.extend(gram_eigenvalues(h)?);
    }
    let lo = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // half-open bins [e_k, e_{k+1}) with the top edge padded so the
    // maximum lands inside the last bin
    let span = (hi - lo).max(1e-12);
    let top = hi + 1e-9 * span;
    let width = (top - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in &eigenvalues {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let total = eigenvalues.len() as f64;
    Ok(EsdHistogram {
        bin_edges: (0..=bins).map(|k| lo + k as f64 * width).collect(),
        masses: counts.iter().map(|&c| c as f64 / total).collect(),
    })
}

/// Empirical normality summary of a capacity sample set.
#[derive(Debug, Clone, Copy)]
pub struct NormalityReport {
    /// Kolmogorov-Smirnov sup-distance of the standardized samples against
    /// the standard normal CDF, with mean and stdev estimated from the
    /// same sample (Lilliefors-style; the raw statistic, not a p-value).
    pub ks_statistic: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// Standardize the samples and measure their distance to Gaussianity.
pub fn normality_diagnostics(set: &CapacitySampleSet) -> Result<NormalityReport> {
    if set.samples.len() < 1000 {
        return Err(Error::Range(format!(
            "normality diagnostics need at least 1000 samples, got {}",
            set.samples.len()
        )));
    }
    let sd = set.variance.sqrt();
    if sd.is_nan() || sd <= 0.0 {
        return Err(Error::Range("degenerate sample: zero standard deviation".into()));
    }
    let mut standardized: Vec<f64> = set.samples.iter().map(|&c| (c - set.mean) / sd).collect();
    standardized.sort_by(f64::total_cmp);
    let n = standardized.len() as f64;
    let mut ks = 0.0f64;
    for (i, &x) in standardized.iter().enumerate() {
        let phi = normal_cdf(x);
        let upper = (i as f64 + 1.0) / n - phi;
        let lower = phi - i as f64 / n;
        ks = ks.max(upper.max(lower));
    }
    Ok(NormalityReport {
        ks_statistic: ks,
        skewness: set.skewness,
        excess_kurtosis: set.excess_kurtosis,
    })
}

/// Raw-sample dump: header comments with the run parameters, then one
/// capacity value (nats) per line.
pub fn write_samples<W: Write>(set: &CapacitySampleSet, out: &mut W) -> std::io::Result<()> {
    writeln!(
        out,
        "# R={} S={} T={}",
        set.geometry.receive(),
        set.geometry.scatterers(),
        set.geometry.transmit()
    )?;
    writeln!(out, "# gamma={} snr_db={}", set.gamma.linear(), set.gamma.db())?;
    writeln!(out, "# seed={}", set.seed)?;
    writeln!(out, "# samples={}", set.samples.len())?;
    for v in &set.samples {
        writeln!(out, "{v}")?;
    }
    Ok(())
}
