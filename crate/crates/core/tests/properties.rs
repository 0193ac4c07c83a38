//! Property-based invariants over randomized inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use rayprod_core::asymptotics::{capacity_stats, Snr};
use rayprod_core::montecarlo::{
    capacity_sample, capacity_sample_eigen, sample_channel, RandomStream,
};
use rayprod_core::outage::{outage_capacity, outage_probability, ChannelGeometry};
use rayprod_core::spectra::{
    mp_cauchy, q_cauchy, q_cauchy_inverse, q_support_right_edge, AspectRatios,
};

const RATIO_TABLE: [(f64, f64); 4] = [(1.0, 1.0), (2.0, 0.5), (0.5, 2.0), (1.5, 0.8)];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Both transforms map the upper half-plane into the lower one.
    #[test]
    fn herglotz_property(
        re in -5.0f64..20.0,
        im in 1e-3f64..10.0,
        idx in 0usize..RATIO_TABLE.len(),
    ) {
        let (rho, zeta) = RATIO_TABLE[idx];
        let ratios = AspectRatios::new(rho, zeta).unwrap();
        let z = Complex64::new(re, im);
        let gq = q_cauchy(z, &ratios).unwrap();
        prop_assert!(gq.im < 0.0, "q_cauchy({z}) = {gq}");
        let gp = mp_cauchy(z, zeta).unwrap();
        prop_assert!(gp.im < 0.0, "mp_cauchy({z}) = {gp}");
    }

    /// Inverse composition on the real axis right of the support edge
    /// (equal-antenna case).
    #[test]
    fn q_inverse_round_trip(offset in 1e-3f64..40.0, zi in 0usize..3) {
        let zeta = [0.5f64, 1.0, 2.0][zi];
        let ratios = AspectRatios::new(1.0 / zeta, zeta).unwrap();
        let edge = q_support_right_edge(&ratios).unwrap();
        let z = edge + 1e-3 + offset;
        let t = q_cauchy(Complex64::new(z, 0.0), &ratios).unwrap().re;
        let back = q_cauchy_inverse(t, zeta).unwrap();
        prop_assert!(
            (back - z).abs() <= 1e-9 * z.abs(),
            "zeta={zeta} z={z} back={back}"
        );
    }

    /// Quantile and CDF are mutual inverses, and the quantile offset is
    /// odd under p -> 1 - p.
    #[test]
    fn outage_round_trip(p in 0.001f64..0.999) {
        let geometry = ChannelGeometry::new(4, 4, 4).unwrap();
        let stats = capacity_stats(&geometry, Snr::from_db(10.0).unwrap()).unwrap();
        let cap = outage_capacity(p, &stats).unwrap();
        let back = outage_probability(cap, &stats).unwrap();
        prop_assert!((back - p).abs() <= 1e-10);
        let lo = outage_capacity(p, &stats).unwrap() - stats.mu_total;
        let hi = outage_capacity(1.0 - p, &stats).unwrap() - stats.mu_total;
        prop_assert!((lo + hi).abs() <= 1e-10);
    }

    /// Cholesky and eigenvalue capacity routes agree on random draws.
    #[test]
    fn capacity_routes_agree(
        seed in any::<u64>(),
        sample_index in 0u64..1000,
        dims in (1usize..6, 1usize..6, 1usize..6),
        snr_db in -10.0f64..20.0,
    ) {
        let geometry = ChannelGeometry::new(dims.0, dims.1, dims.2).unwrap();
        let h = sample_channel(&geometry, &RandomStream { seed, sample_index });
        let snr = Snr::from_db(snr_db).unwrap();
        let a = capacity_sample(&h, snr).unwrap();
        let b = capacity_sample_eigen(&h, snr).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()));
    }
}
