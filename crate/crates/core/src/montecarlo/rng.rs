//! Counter-based random number generation.
//!
//! Every matrix entry is a pure function of `(seed, sample_index,
//! matrix_tag, counter)`, so sample `i` is bit-identical no matter how the
//! sample range was split across workers.  The mixer is the splitmix64
//! finalizer; complex Gaussians come out of a polar Box-Muller transform
//! with variance 1/2 per real component.

use num_complex::Complex64;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^= x >> 31;
    x
}

/// Deterministic stream for one matrix draw of one sample.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64, sample_index: u64, matrix_tag: u64) -> Self {
        let key = mix(seed ^ mix(sample_index ^ mix(matrix_tag.wrapping_add(GAMMA))));
        Self { key, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform draw in the half-open interval (0, 1], safe to pass to `ln`.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard complex Gaussian (unit total variance):
    /// `sqrt(-ln u1) * exp(2 pi i u2)`.
    #[inline]
    pub fn next_complex_gaussian(&mut self) -> Complex64 {
        let u1 = self.next_unit();
        let u2 = self.next_unit();
        let radius = (-u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        Complex64::new(radius * angle.cos(), radius * angle.sin())
    }
}
