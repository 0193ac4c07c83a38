//! Cross-oracle validation suites behind the `validate` subcommand:
//! combinatorics against series extraction, closed-form variance against
//! the contour integral, and closed forms against Monte Carlo.

use rayprod_core::asymptotics::{
    capacity_stats, capacity_variance, variance_cubic_roots, variance_numeric_contour,
    ContourSpec, Snr,
};
use rayprod_core::cubic;
use rayprod_core::freecombinatorics::{
    free_cumulants, moments_from_cubic_series, moments_from_cumulants, rational,
};
use rayprod_core::montecarlo::run_simulation;
use rayprod_core::outage::ChannelGeometry;
use rayprod_core::spectra::{r_transform_coefficients_numeric, AspectRatios};

pub struct CheckRow {
    pub name: String,
    pub metric: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn row(name: impl Into<String>, metric: f64, tolerance: f64) -> CheckRow {
    CheckRow {
        name: name.into(),
        metric,
        tolerance,
        pass: metric.is_finite() && metric <= tolerance,
    }
}

/// Exact moment route comparison plus annular-vs-series coefficients.
fn combinatorics_checks(rows: &mut Vec<CheckRow>) -> anyhow::Result<()> {
    let rho = rational(2, 3);
    let zeta = rational(5, 4);
    let cums = free_cumulants(rho.clone(), zeta.clone(), 6, 4)?;
    let via_cumulants = moments_from_cumulants(&cums)?;
    let via_series = moments_from_cubic_series(rho, zeta, 6)?;
    let exact_equal = (0..=6).all(|n| via_cumulants.first_order(n) == via_series.first_order(n));
    rows.push(row(
        "moments enumeration vs cubic series (exact rational, n<=6)",
        if exact_equal { 0.0 } else { 1.0 },
        0.0,
    ));

    for &zeta in &[0.5f64, 1.0] {
        let cums = free_cumulants(1.0, zeta, 6, 6)?;
        let coeffs = r_transform_coefficients_numeric(zeta, 6, 64)?;
        let mut worst = 0.0f64;
        for (&(m, n), &num) in &coeffs {
            let want = *cums.second_order(m, n);
            worst = worst.max((num - want).abs() / (1.0 + want.abs()));
        }
        rows.push(row(
            format!("second-order R coefficients vs annular sums (zeta={zeta})"),
            worst,
            1e-9,
        ));
    }
    Ok(())
}

/// Closed-form variance against the double contour integral.
fn contour_checks(rows: &mut Vec<CheckRow>) -> anyhow::Result<()> {
    for &zeta in &[0.5f64, 1.0, 2.0] {
        for &gamma in &[1.0f64, 10.0] {
            let snr = Snr::from_linear(gamma)?;
            let exact = capacity_variance(zeta, snr)?;
            let ratios = AspectRatios::new(1.0 / zeta, zeta)?;
            let spec = ContourSpec::auto(&ratios, snr)?;
            let numeric = variance_numeric_contour(&ratios, snr, &spec)?;
            rows.push(row(
                format!("contour vs closed-form variance (zeta={zeta}, gamma={gamma})"),
                (numeric - exact).abs() / exact.abs(),
                1e-4,
            ));
        }
    }
    Ok(())
}

/// Cardano expressions against the generic solver on a parameter grid.
fn cardano_checks(rows: &mut Vec<CheckRow>) -> anyhow::Result<()> {
    let mut worst_roots = 0.0f64;
    let mut worst_product = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let zeta = 10f64.powf(-0.6 + 1.2 * i as f64 / 9.0);
            let gamma = 10f64.powf(-2.0 + 5.0 * j as f64 / 9.0);
            let roots = variance_cubic_roots(zeta, Snr::from_linear(gamma)?)?;
            let cardano = [roots.t1, roots.t2, roots.t3];
            let generic = [
                rayprod_core::Complex64::new(roots.omega_r, 0.0),
                roots.omega_plus,
                roots.omega_minus,
            ];
            worst_roots = worst_roots.max(cubic::multiset_distance(&cardano, &generic));
            let prod = roots.omega_r * roots.omega_plus * roots.omega_minus;
            worst_product = worst_product.max((prod + gamma).norm() / gamma);
        }
    }
    rows.push(row(
        "Cardano vs generic cubic roots (100-point grid)",
        worst_roots,
        1e-8,
    ));
    rows.push(row(
        "root product identity omega_r omega_+ omega_- = -gamma",
        worst_product,
        1e-8,
    ));
    Ok(())
}

/// Closed forms against Monte Carlo at the reference geometries.
fn monte_carlo_checks(rows: &mut Vec<CheckRow>, samples: usize, seed: u64) -> anyhow::Result<()> {
    let snr = Snr::from_db(10.0)?;
    for &(r, s, t) in &[(4usize, 4usize, 4usize), (8, 8, 8)] {
        let geometry = ChannelGeometry::new(r, s, t)?;
        let stats = capacity_stats(&geometry, snr)?;
        let set = run_simulation(&geometry, snr, samples, seed)?;
        rows.push(row(
            format!("MC mean vs asymptotic mean ({r},{s},{t}) at 10 dB"),
            (set.mean - stats.mu_total).abs() / stats.mu_total,
            0.03,
        ));
        rows.push(row(
            format!("MC variance vs asymptotic variance ({r},{s},{t}) at 10 dB"),
            (set.variance - stats.sigma_sq).abs() / stats.sigma_sq,
            0.07,
        ));
    }
    Ok(())
}

/// Run every suite; the process should exit nonzero iff any row failed.
pub fn run_all(samples: usize, seed: u64) -> anyhow::Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    combinatorics_checks(&mut rows)?;
    contour_checks(&mut rows)?;
    cardano_checks(&mut rows)?;
    monte_carlo_checks(&mut rows, samples, seed)?;
    Ok(rows)
}
