//! Exact combinatorics behind the first- and second-order free cumulants:
//! non-crossing disc and annular permutations, cumulant tables, and
//! moment extraction straight from the resolvent cubic.
//!
//! Everything here is exhaustive over small symmetric groups and exact in
//! integer or rational arithmetic; it serves as the independent oracle for
//! the analytic transforms in [`crate::spectra`].

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Hard cap for exhaustive scans over `S_n` (8! = 40320 permutations).
pub const MAX_ENUMERATION_ORDER: usize = 8;

/// A permutation of `{1, .., n}`, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    /// Build from a 1-based mapping table: `mapping[i]` is the image of `i+1`.
    pub fn from_one_based(mapping: &[usize]) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &v in mapping {
            if v < 1 || v > n || seen[v - 1] {
                return Err(Error::Range(format!("{mapping:?} is not a bijection")));
            }
            seen[v - 1] = true;
        }
        Ok(Self {
            map: mapping.iter().map(|&v| v - 1).collect(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    /// Forward cycle `(1, 2, .., n)`.
    pub fn full_cycle(n: usize) -> Self {
        Self {
            map: (0..n).map(|i| (i + 1) % n).collect(),
        }
    }

    /// Two forward cycles `(1, .., m)(m+1, .., m+n)`.
    pub fn two_cycles(m: usize, n: usize) -> Self {
        let mut map = Vec::with_capacity(m + n);
        map.extend((0..m).map(|i| (i + 1) % m));
        map.extend((0..n).map(|i| m + (i + 1) % n));
        Self { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Image of the 1-based point `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.map[i - 1] + 1
    }

    /// 1-based mapping table.
    pub fn one_based(&self) -> Vec<usize> {
        self.map.iter().map(|&v| v + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Self { map: inv }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            map: other.map.iter().map(|&v| self.map[v]).collect(),
        }
    }

    /// Orbit decomposition, cycles listed by smallest element, 1-based.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.map.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i + 1);
                i = self.map[i];
            }
            out.push(cycle);
        }
        out
    }

    /// Number of orbits `#(tau)`.
    pub fn orbit_count(&self) -> usize {
        let n = self.map.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.map[i];
            }
        }
        count
    }

    /// True if some orbit meets both `{1..m}` and `{m+1..m+n}`.
    pub fn connects_across(&self, m: usize) -> bool {
        self.orbits()
            .iter()
            .any(|orb| orb.iter().any(|&e| e <= m) && orb.iter().any(|&e| e > m))
    }
}

/// In-place lexicographic successor; false once the last permutation is hit.
fn next_permutation(map: &mut [usize]) -> bool {
    let n = map.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && map[i - 1] >= map[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while map[j] <= map[i - 1] {
        j -= 1;
    }
    map.swap(i - 1, j);
    map[i..].reverse();
    true
}

fn for_each_permutation(n: usize, mut f: impl FnMut(&Permutation)) {
    let mut map: Vec<usize> = (0..n).collect();
    loop {
        f(&Permutation { map: map.clone() });
        if !next_permutation(&mut map) {
            break;
        }
    }
}

fn check_order(total: usize) -> Result<()> {
    if total == 0 || total > MAX_ENUMERATION_ORDER {
        return Err(Error::Size(format!(
            "exhaustive enumeration supports orders 1..={MAX_ENUMERATION_ORDER}, got {total}"
        )));
    }
    Ok(())
}

/// Non-crossing disc permutations of `{1..n}`: the permutations achieving
/// `#(tau) + #(tau^{-1} eta) = n + 1` with `eta = (1, .., n)`. Lexicographic
/// by mapping table; the count is the n-th Catalan number.
pub fn enumerate_nc_disc(n: usize) -> Result<Vec<Permutation>> {
    check_order(n)?;
    let eta = Permutation::full_cycle(n);
    let mut out = Vec::new();
    for_each_permutation(n, |tau| {
        if tau.orbit_count() + tau.inverse().compose(&eta).orbit_count() == n + 1 {
            out.push(tau.clone());
        }
    });
    Ok(out)
}

/// Non-crossing `(m, n)`-annular permutations: the `(m, n)`-connected
/// permutations of `S_{m+n}` achieving `#(tau) + #(tau^{-1} eta_0) = m + n`
/// with `eta_0 = (1, .., m)(m+1, .., m+n)`.
pub fn enumerate_nc_annular(m: usize, n: usize) -> Result<Vec<Permutation>> {
    if m == 0 || n == 0 {
        return Err(Error::Size("annular orders require m, n >= 1".into()));
    }
    check_order(m + n)?;
    let eta0 = Permutation::two_cycles(m, n);
    let mut out = Vec::new();
    for_each_permutation(m + n, |tau| {
        if tau.connects_across(m)
            && tau.orbit_count() + tau.inverse().compose(&eta0).orbit_count() == m + n
        {
            out.push(tau.clone());
        }
    });
    Ok(out)
}

/// Histogram of non-crossing disc permutations of order `n` by orbit count;
/// entry `k-1` counts permutations with `k` orbits.
pub fn disc_orbit_profile(n: usize) -> Result<Vec<u64>> {
    let mut profile = vec![0u64; n];
    for tau in enumerate_nc_disc(n)? {
        profile[tau.orbit_count() - 1] += 1;
    }
    Ok(profile)
}

/// Histogram of non-crossing `(m, n)`-annular permutations by orbit count.
pub fn annular_orbit_profile(m: usize, n: usize) -> Result<Vec<u64>> {
    let mut profile = vec![0u64; m + n];
    for tau in enumerate_nc_annular(m, n)? {
        profile[tau.orbit_count() - 1] += 1;
    }
    Ok(profile)
}

/// Scalar abstraction so cumulant and moment tables can be evaluated both
/// in f64 and in exact rational arithmetic.
pub trait Scalar:
    Clone
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + PartialEq
{
    fn from_u64(v: u64) -> Self;
}

impl Scalar for f64 {
    fn from_u64(v: u64) -> Self {
        v as f64
    }
}

impl Scalar for BigRational {
    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

fn power<T: Scalar>(base: &T, exp: usize) -> T {
    let mut acc = T::one();
    for _ in 0..exp {
        acc = acc * base.clone();
    }
    acc
}

/// First- and second-order free cumulants of the limiting squared-channel
/// spectrum: `kappa_n = rho * sum zeta^{#(tau)}` over non-crossing disc
/// permutations and `kappa_{m,n} = sum zeta^{#(tau)}` over non-crossing
/// annular permutations.
#[derive(Debug, Clone)]
pub struct CumulantTable<T: Scalar> {
    pub rho: T,
    pub zeta: T,
    /// `first[n-1]` is `kappa_n`, `n = 1..=n_max`.
    pub first: Vec<T>,
    /// `kappa_{m,n}` for `m, n >= 1`, `m + n <= m_max`.
    pub second: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> CumulantTable<T> {
    pub fn first_order(&self, n: usize) -> &T {
        &self.first[n - 1]
    }

    pub fn second_order(&self, m: usize, n: usize) -> &T {
        &self.second[&(m, n)]
    }
}

/// Moment tables derived from the cumulants or from the resolvent cubic.
#[derive(Debug, Clone)]
pub struct MomentTable<T: Scalar> {
    /// `first[n]` is `alpha_n` with `alpha_0 = 1`.
    pub first: Vec<T>,
    /// Second-order entries assembled from orbit products of the
    /// Marchenko-Pastur cumulant sequence (all equal to `zeta`, second
    /// order zero), i.e. the annular sums themselves.
    pub second: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> MomentTable<T> {
    pub fn first_order(&self, n: usize) -> &T {
        &self.first[n]
    }
}

/// Cumulants up to `kappa_{n_max}` and `kappa_{m,n}` with `m + n <= m_max`.
pub fn free_cumulants<T: Scalar>(rho: T, zeta: T, n_max: usize, m_max: usize) -> Result<CumulantTable<T>> {
    check_order(n_max)?;
    check_order(m_max.max(2))?;
    let mut first = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let profile = disc_orbit_profile(n)?;
        let mut acc = T::zero();
        for (k, &count) in profile.iter().enumerate() {
            if count > 0 {
                acc = acc + T::from_u64(count) * power(&zeta, k + 1);
            }
        }
        first.push(rho.clone() * acc);
    }
    let mut second = BTreeMap::new();
    for m in 1..m_max {
        for n in 1..=(m_max - m) {
            let profile = annular_orbit_profile(m, n)?;
            let mut acc = T::zero();
            for (k, &count) in profile.iter().enumerate() {
                if count > 0 {
                    acc = acc + T::from_u64(count) * power(&zeta, k + 1);
                }
            }
            second.insert((m, n), acc);
        }
    }
    Ok(CumulantTable {
        rho,
        zeta,
        first,
        second,
    })
}

/// Moments from cumulants.
///
/// First order is the non-crossing moment-cumulant sum
/// `alpha_n = sum over non-crossing partitions of prod kappa_{|block|}`,
/// with the blocks realized as orbits of non-crossing disc permutations.
/// Second order applies the same orbit-product machinery to the annular
/// permutations with the building-block cumulant sequence `c_k = zeta`,
/// `c_{m,n} = 0`, which collapses to the annular `zeta^{#}` sums.
pub fn moments_from_cumulants<T: Scalar>(table: &CumulantTable<T>) -> Result<MomentTable<T>> {
    let n_max = table.first.len();
    let mut first = Vec::with_capacity(n_max + 1);
    first.push(T::one());
    for n in 1..=n_max {
        let mut acc = T::zero();
        for tau in enumerate_nc_disc(n)? {
            let mut prod = T::one();
            for orbit in tau.orbits() {
                prod = prod * table.first[orbit.len() - 1].clone();
            }
            acc = acc + prod;
        }
        first.push(acc);
    }
    let mut second = BTreeMap::new();
    for &(m, n) in table.second.keys() {
        let mut acc = T::zero();
        for tau in enumerate_nc_annular(m, n)? {
            let mut prod = T::one();
            for _orbit in tau.orbits() {
                prod = prod * table.zeta.clone();
            }
            acc = acc + prod;
        }
        second.insert((m, n), acc);
    }
    Ok(MomentTable { first, second })
}

/// First-order moments straight from the resolvent cubic.
///
/// Writing `A(z) = z G(z) = 1 + sum alpha_n z^{-n}` turns the cubic into
/// `A^3 + p A^2 + q A = rho z (A - 1)` with `p = rho zeta + rho - 2` and
/// `q = (rho zeta - 1)(rho - 1)`; matching powers of `z` gives the exact
/// recursion solved here. Independent of the enumeration route.
pub fn moments_from_cubic_series<T: Scalar>(rho: T, zeta: T, n_max: usize) -> Result<MomentTable<T>> {
    if n_max > 10 {
        return Err(Error::Size(format!(
            "series extraction supports n_max <= 10, got {n_max}"
        )));
    }
    if rho.is_zero() {
        return Err(Error::Range("rho must be nonzero".into()));
    }
    let two = T::from_u64(2);
    let p = rho.clone() * zeta.clone() + rho.clone() - two;
    let q = (rho.clone() * zeta.clone() - T::one()) * (rho.clone() - T::one());

    // alpha[0] = 1; alpha_{m+1} = (conv3(m) + p conv2(m) + q alpha_m) / rho
    let mut alpha: Vec<T> = vec![T::one()];
    for m in 0..n_max {
        let mut conv3 = T::zero();
        for i in 0..=m {
            for j in 0..=(m - i) {
                let k = m - i - j;
                conv3 = conv3 + alpha[i].clone() * alpha[j].clone() * alpha[k].clone();
            }
        }
        let mut conv2 = T::zero();
        for i in 0..=m {
            conv2 = conv2 + alpha[i].clone() * alpha[m - i].clone();
        }
        let lhs = conv3 + p.clone() * conv2 + q.clone() * alpha[m].clone();
        alpha.push(lhs / rho.clone());
    }
    Ok(MomentTable {
        first: alpha,
        second: BTreeMap::new(),
    })
}

/// Comparison of the analytic second-order R-transform against the annular
/// enumeration, coefficient by coefficient.
#[derive(Debug, Clone)]
pub struct SecondOrderReport {
    /// Mixed deviation `|numeric - kappa| / (1 + |kappa|)` per `(m, n)`.
    pub deviations: BTreeMap<(usize, usize), f64>,
    pub max_deviation: f64,
}

/// Expand the second-order R-transform numerically on a polydisk and
/// compare every coefficient with `m + n <= m_max` against the annular
/// `zeta^{#}` sums.
pub fn verify_second_order_series(
    ratios: &crate::spectra::AspectRatios,
    m_max: usize,
) -> Result<SecondOrderReport> {
    if m_max > 7 {
        return Err(Error::Size(format!(
            "series verification supports m_max <= 7, got {m_max}"
        )));
    }
    let zeta = ratios.zeta();
    let cums = free_cumulants(ratios.rho(), zeta, 1, m_max)?;
    let numeric = crate::spectra::r_transform_coefficients_numeric(zeta, m_max, 64)?;
    let mut deviations = BTreeMap::new();
    let mut max_deviation = 0.0f64;
    for (&(m, n), &num) in &numeric {
        let want = *cums.second_order(m, n);
        let dev = (num - want).abs() / (1.0 + want.abs());
        max_deviation = max_deviation.max(dev);
        deviations.insert((m, n), dev);
    }
    Ok(SecondOrderReport {
        deviations,
        max_deviation,
    })
}

/// Exact-rational convenience constructors.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Catalan number, for cross-checking enumeration counts.
pub fn catalan(n: usize) -> u64 {
    let mut c: u128 = 1;
    for i in 0..n as u128 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c as u64
}

/// Standardness in the disc sense: every orbit, read from its minimum,
/// is increasing.
pub fn is_standard_disc(tau: &Permutation) -> bool {
    tau.orbits().iter().all(|orbit| {
        let mut rotated = orbit.clone();
        let min_pos = rotated
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| v)
            .map(|(i, _)| i)
            .unwrap();
        rotated.rotate_left(min_pos);
        rotated.windows(2).all(|w| w[0] < w[1])
    })
}

fn cyclically_increasing(seq: &[usize]) -> bool {
    if seq.len() <= 1 {
        return true;
    }
    (0..seq.len()).any(|r| {
        let mut rot = seq.to_vec();
        rot.rotate_left(r);
        rot.windows(2).all(|w| w[0] < w[1])
    })
}

/// Standardness in the `(m, n)`-annular sense: single-circle orbits are
/// cyclically sortable; mixed orbits split (after rotation) into a block
/// of external points followed by a block of internal points, each
/// cyclically sortable.
pub fn is_standard_annular(tau: &Permutation, m: usize) -> bool {
    tau.orbits().iter().all(|orbit| {
        let on_both = orbit.iter().any(|&e| e <= m) && orbit.iter().any(|&e| e > m);
        if !on_both {
            return cyclically_increasing(orbit);
        }
        (0..orbit.len()).any(|r| {
            let mut rot = orbit.clone();
            rot.rotate_left(r);
            let split = rot.iter().position(|&e| e > m).unwrap_or(rot.len());
            rot[split..].iter().all(|&e| e > m)
                && cyclically_increasing(&rot[..split])
                && cyclically_increasing(&rot[split..])
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0), 1);
        assert_eq!(catalan(3), 5);
        assert_eq!(catalan(4), 14);
        assert_eq!(catalan(8), 1430);
    }

    #[test]
    fn disc_counts_are_catalan() {
        for n in 1..=8 {
            let perms = enumerate_nc_disc(n).unwrap();
            assert_eq!(perms.len() as u64, catalan(n), "n = {n}");
            for tau in &perms {
                assert!(is_standard_disc(tau));
                assert_eq!(
                    tau.orbit_count()
                        + tau
                            .inverse()
                            .compose(&Permutation::full_cycle(n))
                            .orbit_count(),
                    n + 1
                );
            }
        }
    }

    #[test]
    fn disc_order_one_is_identity() {
        let perms = enumerate_nc_disc(1).unwrap();
        assert_eq!(perms.len(), 1);
        assert_eq!(perms[0], Permutation::identity(1));
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let perms = enumerate_nc_disc(4).unwrap();
        let tables: Vec<Vec<usize>> = perms.iter().map(|p| p.one_based()).collect();
        let mut sorted = tables.clone();
        sorted.sort();
        assert_eq!(tables, sorted);
    }

    #[test]
    fn annular_one_one_is_the_transposition() {
        let perms = enumerate_nc_annular(1, 1).unwrap();
        assert_eq!(perms.len(), 1);
        assert_eq!(perms[0], Permutation::from_one_based(&[2, 1]).unwrap());
    }

    #[test]
    fn annular_two_one_matches_hand_enumeration() {
        // Connected permutations of S_3 achieving the annular equality:
        // (13), (23), (123), (132).
        let perms = enumerate_nc_annular(2, 1).unwrap();
        let tables: Vec<Vec<usize>> = perms.iter().map(|p| p.one_based()).collect();
        let expected: Vec<Vec<usize>> = vec![
            vec![1, 3, 2], // (23)
            vec![2, 3, 1], // (123)
            vec![3, 1, 2], // (132)
            vec![3, 2, 1], // (13)
        ];
        assert_eq!(tables, expected);
        for tau in &perms {
            assert!(is_standard_annular(tau, 2));
        }
    }

    #[test]
    fn disconnected_permutations_are_excluded() {
        let id = Permutation::identity(2);
        assert!(!id.connects_across(1));
        assert!(!enumerate_nc_annular(1, 1).unwrap().contains(&id));
        // (12)(3) is disconnected for (2,1)
        let t12 = Permutation::from_one_based(&[2, 1, 3]).unwrap();
        assert!(!t12.connects_across(2));
        assert!(!enumerate_nc_annular(2, 1).unwrap().contains(&t12));
    }

    #[test]
    fn size_caps_are_enforced() {
        assert!(enumerate_nc_disc(9).is_err());
        assert!(enumerate_nc_disc(0).is_err());
        assert!(enumerate_nc_annular(5, 4).is_err());
        assert!(enumerate_nc_annular(0, 3).is_err());
    }

    #[test]
    fn cumulants_match_closed_forms() {
        let t = free_cumulants(0.5f64, 2.0f64, 3, 3).unwrap();
        // kappa_1 = rho zeta, kappa_2 = rho (zeta + zeta^2), kappa_{1,1} = zeta
        assert!((t.first_order(1) - 0.5 * 2.0).abs() < 1e-15);
        assert!((t.first_order(2) - 0.5 * (2.0 + 4.0)).abs() < 1e-15);
        assert!((t.second_order(1, 1) - 2.0).abs() < 1e-15);
        // kappa_{2,1} = 2 zeta + 2 zeta^2 from the four annular permutations
        assert!((t.second_order(2, 1) - (2.0 * 2.0 + 2.0 * 4.0)).abs() < 1e-15);
    }

    #[test]
    fn moments_match_cumulant_sums() {
        let t = free_cumulants(0.75f64, 1.25f64, 4, 4).unwrap();
        let m = moments_from_cumulants(&t).unwrap();
        let (rho, zeta) = (0.75, 1.25);
        assert!((m.first_order(1) - rho * zeta).abs() < 1e-14);
        let alpha2 = rho * zeta + rho * zeta * zeta + rho * rho * zeta * zeta;
        assert!((m.first_order(2) - alpha2).abs() < 1e-13);
        // second order table equals the cumulant table entries
        for (key, v) in &m.second {
            assert!((v - t.second[key]).abs() < 1e-13);
        }
    }

    #[test]
    fn series_recursion_reproduces_alpha_one_two() {
        let m = moments_from_cubic_series(2.0f64, 0.5f64, 4).unwrap();
        assert!((m.first_order(0) - 1.0).abs() == 0.0);
        assert!((m.first_order(1) - 1.0).abs() < 1e-14); // rho zeta = 1
        let alpha2 = 1.0 + 2.0 * 0.25 + 1.0; // rho zeta + rho zeta^2 + (rho zeta)^2
        assert!((m.first_order(2) - alpha2).abs() < 1e-13);
    }

    #[test]
    fn exact_routes_agree_for_all_small_orders() {
        let rho = rational(2, 3);
        let zeta = rational(5, 4);
        let cum = free_cumulants(rho.clone(), zeta.clone(), 6, 4).unwrap();
        let via_cumulants = moments_from_cumulants(&cum).unwrap();
        let via_series = moments_from_cubic_series(rho, zeta, 6).unwrap();
        for n in 0..=6 {
            assert_eq!(
                via_cumulants.first_order(n),
                via_series.first_order(n),
                "alpha_{n} differs"
            );
        }
    }

    #[test]
    fn second_order_series_report() {
        use crate::spectra::AspectRatios;
        for &zeta in &[0.5f64, 1.0] {
            let ratios = AspectRatios::new(1.0 / zeta, zeta).unwrap();
            let report = verify_second_order_series(&ratios, 4).unwrap();
            assert!(
                report.max_deviation <= 1e-9,
                "zeta={zeta}: {report:?}"
            );
            assert!(report.deviations[&(1, 1)] <= 1e-9);
        }
        // symmetric coefficients extracted on asymmetric radii still agree
        let ratios = AspectRatios::new(1.0, 1.0).unwrap();
        let coeffs = crate::spectra::r_transform_coefficients_numeric(1.0, 4, 64).unwrap();
        for (&(m, n), &v) in &coeffs {
            assert!((v - coeffs[&(n, m)]).abs() <= 1e-9 * (1.0 + v.abs()), "({m},{n})");
        }
        assert!(verify_second_order_series(&ratios, 8).is_err());
    }

    #[test]
    fn kappa_is_rho_times_mp_moment() {
        // kappa_n = rho * beta_n with beta_n the MP(zeta) moments:
        // beta_1 = zeta, beta_2 = zeta + zeta^2, beta_3 = zeta + 3 zeta^2 + zeta^3.
        let zeta = 1.75f64;
        let rho = 0.4f64;
        let t = free_cumulants(rho, zeta, 3, 2).unwrap();
        let beta = [
            zeta,
            zeta + zeta * zeta,
            zeta + 3.0 * zeta * zeta + zeta * zeta * zeta,
        ];
        for (n, b) in beta.iter().enumerate() {
            assert!((t.first_order(n + 1) - rho * b).abs() < 1e-13);
        }
    }
}
