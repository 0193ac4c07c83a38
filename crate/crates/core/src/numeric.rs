//! Summation helpers with a fixed reduction order.
//!
//! Summaries and quadrature sums must not depend on how work was split
//! across threads, so every reduction funnels through the serial pairwise
//! routines below.

use num_complex::Complex64;

const PAIRWISE_LEAF: usize = 64;

/// Pairwise summation of a real slice. Error grows like O(log n) ulps.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise summation of a complex slice.
pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    if values.len() <= PAIRWISE_LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_complex(&values[..mid]) + pairwise_sum_complex(&values[mid..])
}

/// Pairwise mean.
pub fn mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

/// Central moments (2nd..4th) about the pairwise mean, normalized by n.
pub fn central_moments(values: &[f64]) -> (f64, f64, f64, f64) {
    let m = mean(values);
    let n = values.len() as f64;
    let p2: Vec<f64> = values.iter().map(|v| (v - m) * (v - m)).collect();
    let p3: Vec<f64> = values.iter().map(|v| (v - m) * (v - m) * (v - m)).collect();
    let p4: Vec<f64> = values
        .iter()
        .map(|v| {
            let d = v - m;
            d * d * d * d
        })
        .collect();
    (
        m,
        pairwise_sum(&p2) / n,
        pairwise_sum(&p3) / n,
        pairwise_sum(&p4) / n,
    )
}
