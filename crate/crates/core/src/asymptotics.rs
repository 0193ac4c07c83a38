//! Asymptotic capacity statistics: the closed-form mean and variance in
//! the equal-antenna regime, their Cardano root expressions, high-SNR
//! approximations, and a contour-integral evaluation of the variance that
//! also covers unequal antenna counts.

use num_complex::Complex64;

use crate::cubic;
use crate::numeric::pairwise_sum_complex;
use crate::outage::ChannelGeometry;
use crate::spectra::{
    self, mp_cauchy, mp_cauchy_prime, q_cauchy, q_cauchy_derivative, AspectRatios,
};
use crate::{Error, Result};

/// Signal-to-noise ratio per receive antenna, stored on the linear scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snr {
    gamma: f64,
}

impl Snr {
    pub fn from_linear(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Range(format!(
                "SNR must be positive and finite, got {gamma}"
            )));
        }
        Ok(Self { gamma })
    }

    pub fn from_db(db: f64) -> Result<Self> {
        if !db.is_finite() {
            return Err(Error::Range(format!("SNR in dB must be finite, got {db}")));
        }
        Self::from_linear(10f64.powf(db / 10.0))
    }

    pub fn linear(&self) -> f64 {
        self.gamma
    }

    pub fn db(&self) -> f64 {
        10.0 * self.gamma.log10()
    }
}

/// Root `g` of the mean-capacity cubic together with the capacity per
/// receive antenna it evaluates to.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticSolution {
    pub g: f64,
    pub mu_per_antenna: f64,
}

fn mean_cubic(rho: f64, gamma: f64, g: f64) -> f64 {
    g * g * g - (1.0 - rho) * g * g + rho / gamma * (g - 1.0)
}

fn mean_side_condition(rho: f64, g: f64) -> bool {
    // (1 - g) / (g (g + rho - 1)) >= 0 without the division
    (1.0 - g) * g * (g + rho - 1.0) >= -1e-12 * (1.0 + g.abs().powi(3))
}

fn mean_real_roots(rho: f64, gamma: f64) -> Vec<f64> {
    let roots = cubic::solve_real(1.0, -(1.0 - rho), rho / gamma, -rho / gamma);
    let mut out: Vec<f64> = roots
        .iter()
        .filter(|r| r.im.abs() <= 1e-9 * (1.0 + r.norm()))
        .map(|r| r.re)
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

fn pick_mean_root(rho: f64, gamma: f64) -> Result<f64> {
    let candidates: Vec<f64> = mean_real_roots(rho, gamma)
        .into_iter()
        .filter(|&g| mean_side_condition(rho, g))
        .collect();
    match candidates.len() {
        1 => return Ok(candidates[0]),
        0 => {
            return Err(Error::RootSelection(format!(
                "no real root satisfies the side condition at rho={rho}, gamma={gamma}"
            )))
        }
        _ => {}
    }
    // Several admissible roots: follow the branch that is continuous with
    // the zero-SNR limit g -> 1, tracked along a log-SNR homotopy.
    let start = gamma.min(1e-8);
    let steps = 200;
    let mut g = 1.0 - start; // g = 1 - gamma + O(gamma^2) at small gamma
    for k in 0..=steps {
        let gk = start * (gamma / start).powf(k as f64 / steps as f64);
        let roots = mean_real_roots(rho, gk);
        g = roots
            .into_iter()
            .min_by(|a, b| (a - g).abs().total_cmp(&(b - g).abs()))
            .ok_or_else(|| Error::RootSelection("homotopy lost all real roots".into()))?;
    }
    if !mean_side_condition(rho, g) {
        return Err(Error::RootSelection(
            "homotopy branch violates the side condition".into(),
        ));
    }
    Ok(g)
}

/// Asymptotic capacity per receive antenna in nats for `R = T`:
/// `mu/R = log(1/g + gamma/rho (g + rho - 1)) - rho log(1 + (g-1)/rho) - 2(1-g)`
/// with `g` the admissible root of
/// `g^3 - (1-rho) g^2 + rho/gamma (g - 1) = 0`.
pub fn mean_capacity_per_antenna(rho: f64, snr: Snr) -> Result<AsymptoticSolution> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Range(format!("rho must be positive, got {rho}")));
    }
    let gamma = snr.linear();
    let g = pick_mean_root(rho, gamma)?;
    let residual = mean_cubic(rho, gamma, g).abs();
    if residual > 1e-10 * (1.0 + 1.0 / gamma) {
        return Err(Error::RootSelection(format!(
            "mean cubic residual {residual:.3e} too large"
        )));
    }
    let mu = (1.0 / g + gamma / rho * (g + rho - 1.0)).ln()
        - rho * (1.0 + (g - 1.0) / rho).ln()
        - 2.0 * (1.0 - g);
    Ok(AsymptoticSolution {
        g,
        mu_per_antenna: mu,
    })
}

/// Roots of the variance cubic `t^3 - 2 t^2 + (1 - gamma + gamma zeta) t + gamma = 0`.
///
/// `t1..t3` carry the raw Cardano expressions (principal square and cube
/// roots); `omega_r`, `omega_plus`, `omega_minus` come from the generic
/// polished solver, with `omega_r` the unique real non-positive root.  The
/// two routes are cross-checked as multisets on construction.
#[derive(Debug, Clone, Copy)]
pub struct CubicRoots {
    pub t1: Complex64,
    pub t2: Complex64,
    pub t3: Complex64,
    pub u_value: Complex64,
    pub omega_r: f64,
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
}

fn cardano_roots(zeta: f64, gamma: f64) -> (Complex64, [Complex64; 3]) {
    let a = 1.0 + 4.5 * gamma + 9.0 * gamma * zeta;
    let b = 3.0 * gamma * zeta - 3.0 * gamma - 1.0;
    let b3 = b * b * b;
    let disc = b3 + a * a;
    // u^3 = sqrt(b^3 + a^2) - a, written to avoid cancellation when the
    // square root is real and close to a
    let u3 = if disc >= 0.0 {
        Complex64::new(b3 / (disc.sqrt() + a), 0.0)
    } else {
        Complex64::new(-a, (-disc).sqrt())
    };
    let u = u3.cbrt();
    let e_plus = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
    let e_minus = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_3);
    let two_thirds = Complex64::new(2.0 / 3.0, 0.0);
    let bb = Complex64::new(b, 0.0);
    let t1 = two_thirds - bb / (3.0 * u) + u / 3.0;
    let t2 = two_thirds + e_plus * bb / (3.0 * u) - e_minus * u / 3.0;
    let t3 = two_thirds + e_minus * bb / (3.0 * u) - e_plus * u / 3.0;
    (u, [t1, t2, t3])
}

/// Solve the variance cubic for a given `zeta` and SNR.
pub fn variance_cubic_roots(zeta: f64, snr: Snr) -> Result<CubicRoots> {
    if !(zeta.is_finite() && zeta > 0.0) {
        return Err(Error::Range(format!("zeta must be positive, got {zeta}")));
    }
    let gamma = snr.linear();
    let c1 = 1.0 - gamma + gamma * zeta;
    let solved = cubic::solve_real(1.0, -2.0, c1, gamma);
    let (u, cardano) = cardano_roots(zeta, gamma);

    let dist = cubic::multiset_distance(&solved, &cardano);
    if dist > 1e-8 * (1.0 + solved.iter().map(|r| r.norm()).fold(0.0, f64::max)) {
        return Err(Error::Numeric(format!(
            "Cardano and generic cubic roots disagree by {dist:.3e}"
        )));
    }
    for r in solved.iter().chain(cardano.iter()) {
        let res = cubic::eval(
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(c1, 0.0),
            Complex64::new(gamma, 0.0),
            *r,
        )
        .norm();
        if res > 1e-10 * (1.0 + gamma) {
            return Err(Error::Numeric(format!("cubic residual {res:.3e}")));
        }
    }

    // the cubic has exactly one real root <= 0 (value at 0 is gamma > 0,
    // product of roots is -gamma)
    let mut real_neg: Vec<f64> = solved
        .iter()
        .filter(|r| r.im == 0.0 && r.re <= 1e-12)
        .map(|r| r.re)
        .collect();
    real_neg.sort_by(f64::total_cmp);
    if real_neg.len() != 1 {
        return Err(Error::RootSelection(format!(
            "expected one real non-positive root, found {}",
            real_neg.len()
        )));
    }
    let omega_r = real_neg[0].min(0.0);
    let mut others: Vec<Complex64> = solved
        .iter()
        .copied()
        .filter(|r| (r.re - omega_r).abs() > 0.0 || r.im != 0.0)
        .collect();
    if others.len() != 2 {
        // omega_r may coincide bitwise with another real root; fall back to
        // removing a single instance
        others.clear();
        let mut removed = false;
        for r in &solved {
            if !removed && r.im == 0.0 && r.re == omega_r {
                removed = true;
            } else {
                others.push(*r);
            }
        }
    }
    others.sort_by(|x, y| y.im.total_cmp(&x.im).then(y.re.total_cmp(&x.re)));
    let (omega_plus, omega_minus) = (others[0], others[1]);

    let prod = omega_r * omega_plus * omega_minus;
    if (prod.re + gamma).abs() > 1e-8 * gamma || prod.im.abs() > 1e-8 * gamma {
        return Err(Error::Numeric(format!(
            "root product {prod} violates omega_r omega_+ omega_- = -gamma"
        )));
    }

    Ok(CubicRoots {
        t1: cardano[0],
        t2: cardano[1],
        t3: cardano[2],
        u_value: u,
        omega_r,
        omega_plus,
        omega_minus,
    })
}

fn variance_from_omega(gamma: f64, omega_r: f64) -> Result<f64> {
    let denom = gamma - omega_r * omega_r * (2.0 * omega_r - 2.0);
    if denom <= 0.0 {
        return Err(Error::Domain(format!(
            "variance denominator {denom:.3e} must be positive"
        )));
    }
    let arg = gamma * (omega_r - 1.0) * (omega_r - 1.0) / denom;
    if arg <= 0.0 {
        return Err(Error::Domain(format!(
            "variance log argument {arg:.3e} must be positive"
        )));
    }
    let sigma_sq = arg.ln();
    if sigma_sq < -1e-12 {
        return Err(Error::Domain(format!(
            "negative variance {sigma_sq:.3e}: wrong root selected"
        )));
    }
    Ok(sigma_sq.max(0.0))
}

/// Asymptotic capacity variance in nats^2 for `R = T`:
/// `sigma^2 = log[ gamma (omega_r - 1)^2 / (gamma - omega_r^2 (2 omega_r - 2)) ]`.
pub fn capacity_variance(zeta: f64, snr: Snr) -> Result<f64> {
    let roots = variance_cubic_roots(zeta, snr)?;
    variance_from_omega(snr.linear(), roots.omega_r)
}

/// High-SNR variance via the approximated real root
/// `omega_r ~ 1/(1 - zeta)` for `zeta > 1` and
/// `omega_r ~ 2/3 - sqrt((1 - zeta) gamma)` for `zeta < 1`.
///
/// Intended for `gamma >= 1e3`; smaller values still evaluate but the
/// approximation error is O(gamma^{-1/2}).
pub fn variance_high_snr(zeta: f64, snr: Snr) -> Result<f64> {
    if !(zeta.is_finite() && zeta > 0.0) {
        return Err(Error::Range(format!("zeta must be positive, got {zeta}")));
    }
    if zeta == 1.0 {
        return Err(Error::Range(
            "zeta = 1 is singular in the high-SNR expansion; use capacity_variance".into(),
        ));
    }
    let gamma = snr.linear();
    let omega_r = if zeta > 1.0 {
        1.0 / (1.0 - zeta)
    } else {
        2.0 / 3.0 - ((1.0 - zeta) * gamma).sqrt()
    };
    variance_from_omega(gamma, omega_r)
}

/// Mean and variance bundle for a finite geometry in the `R = T` regime,
/// with `mu_total = R * (mu/R)` evaluated at `rho = S/R` and the variance
/// at `zeta = T/S`.
#[derive(Debug, Clone, Copy)]
pub struct CapacityStats {
    pub mu_total: f64,
    pub sigma_sq: f64,
    pub geometry: ChannelGeometry,
    pub gamma: Snr,
}

/// Closed-form asymptotic statistics for an `R = T` geometry.
pub fn capacity_stats(geometry: &ChannelGeometry, snr: Snr) -> Result<CapacityStats> {
    if geometry.receive() != geometry.transmit() {
        return Err(Error::Constraint(format!(
            "closed-form statistics require R = T, got R={}, T={}",
            geometry.receive(),
            geometry.transmit()
        )));
    }
    let ratios = geometry.ratios()?;
    let mean = mean_capacity_per_antenna(ratios.rho(), snr)?;
    let sigma_sq = capacity_variance(ratios.zeta(), snr)?;
    Ok(CapacityStats {
        mu_total: geometry.receive() as f64 * mean.mu_per_antenna,
        sigma_sq,
        geometry: *geometry,
        gamma: snr,
    })
}

/// Contour placement for the double contour integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    /// Real-axis crossing in `(-1/gamma, 0)` of the outer contour.
    pub left_crossing: f64,
    /// Real-axis crossing right of the support edge of the outer contour.
    pub right_crossing: f64,
    /// Quadrature points per contour (at least 256).
    pub nodes: usize,
    pub shape: ContourShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourShape {
    Rectangle,
    Ellipse,
}

impl ContourSpec {
    /// Default placement: left crossing halfway to the `-1/gamma` pole,
    /// right crossing 50% beyond the support edge.
    pub fn auto(ratios: &AspectRatios, snr: Snr) -> Result<Self> {
        let edge = spectra::q_support_right_edge(ratios)?;
        Ok(Self {
            left_crossing: -0.5 / snr.linear(),
            right_crossing: 1.5 * edge + 1.0,
            nodes: 2048,
            shape: ContourShape::Ellipse,
        })
    }

    fn validate(&self, gamma: f64, edge: f64) -> Result<()> {
        if self.nodes < 256 {
            return Err(Error::Contour(format!(
                "need at least 256 nodes, got {}",
                self.nodes
            )));
        }
        if !(self.left_crossing > -1.0 / gamma && self.left_crossing < 0.0) {
            return Err(Error::Contour(format!(
                "left crossing {} must lie in (-1/gamma, 0) = ({}, 0)",
                self.left_crossing,
                -1.0 / gamma
            )));
        }
        if self.right_crossing <= edge {
            return Err(Error::Contour(format!(
                "right crossing {} must exceed the support edge {edge:.6}",
                self.right_crossing
            )));
        }
        Ok(())
    }
}

/// Node and `dz` weight pairs for a positively oriented closed contour
/// crossing the real axis at `left` and `right`.
fn contour_nodes(
    left: f64,
    right: f64,
    nodes: usize,
    shape: ContourShape,
) -> Vec<(Complex64, Complex64)> {
    match shape {
        ContourShape::Ellipse => {
            let c = 0.5 * (left + right);
            let a = 0.5 * (right - left);
            let b = 0.5 * a;
            let mut out = Vec::with_capacity(nodes);
            let dt = 2.0 * std::f64::consts::PI / nodes as f64;
            for k in 0..nodes {
                let t = k as f64 * dt;
                let z = Complex64::new(c + a * t.cos(), b * t.sin());
                let dz = Complex64::new(-a * t.sin(), b * t.cos()) * dt;
                out.push((z, dz));
            }
            out
        }
        ContourShape::Rectangle => {
            let h = 0.25 * (right - left);
            let corners = [
                Complex64::new(right, -h),
                Complex64::new(right, h),
                Complex64::new(left, h),
                Complex64::new(left, -h),
            ];
            let mut out = Vec::new();
            for side in 0..4 {
                let z0 = corners[side];
                let z1 = corners[(side + 1) % 4];
                // composite Simpson per side; odd point count
                let n = ((nodes / 4) | 1).max(5);
                let dz = (z1 - z0) / (n - 1) as f64;
                for i in 0..n {
                    let z = z0 + dz * i as f64;
                    let w = if i == 0 || i == n - 1 {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    out.push((z, dz * (w / 3.0)));
                }
            }
            out
        }
    }
}

/// Composed transform `G(x) = G_P(1/G_Q(x))` and its derivative.
fn composed_g(x: Complex64, ratios: &AspectRatios) -> Result<(Complex64, Complex64)> {
    let gq = q_cauchy(x, ratios)?;
    let gqp = q_cauchy_derivative(x, ratios)?;
    let u = 1.0 / gq;
    let g = mp_cauchy(u, ratios.zeta())?;
    let gp = mp_cauchy_prime(u, ratios.zeta())? * (-gqp / (gq * gq));
    Ok((g, gp))
}

/// Capacity variance by the double contour integral
/// `sigma^2 = -(1/4 pi^2) oint oint phi(x) phi(y) G'(x) G'(y) / (G(x) - G(y))^2 dx dy`
/// with `phi(x) = log(1 + gamma x)` and `G = G_P(1/G_Q(.))`.  The inner
/// contour is the supplied one shrunk towards the support by a factor 1.5
/// on both margins.  This is the only variance route for `R != T`.
pub fn variance_numeric_contour(
    ratios: &AspectRatios,
    snr: Snr,
    spec: &ContourSpec,
) -> Result<f64> {
    let gamma = snr.linear();
    let edge = spectra::q_support_right_edge(ratios)?;
    spec.validate(gamma, edge)?;

    let outer = contour_nodes(
        spec.left_crossing,
        spec.right_crossing,
        spec.nodes,
        spec.shape,
    );
    let inner = contour_nodes(
        spec.left_crossing / 1.5,
        edge + (spec.right_crossing - edge) / 1.5,
        spec.nodes,
        spec.shape,
    );

    let weighted = |nodeset: &[(Complex64, Complex64)]| -> Result<Vec<(Complex64, Complex64)>> {
        let mut out = Vec::with_capacity(nodeset.len());
        for &(z, dz) in nodeset {
            let (g, gp) = composed_g(z, ratios)?;
            let phi = (1.0 + gamma * z).ln();
            out.push((g, phi * gp * dz));
        }
        Ok(out)
    };
    let xs = weighted(&inner)?;
    let ys = weighted(&outer)?;

    let mut row_sums = Vec::with_capacity(xs.len());
    let mut row = vec![Complex64::default(); ys.len()];
    for &(gx, ax) in &xs {
        for (cell, &(gy, ay)) in row.iter_mut().zip(&ys) {
            let dg = gx - gy;
            *cell = ax * ay / (dg * dg);
        }
        row_sums.push(pairwise_sum_complex(&row));
    }
    let total = pairwise_sum_complex(&row_sums);
    let sigma_sq = -(total / (4.0 * std::f64::consts::PI * std::f64::consts::PI));

    if sigma_sq.im.abs() > 1e-6 * (1.0 + sigma_sq.re.abs()) {
        return Err(Error::Numeric(format!(
            "contour variance has a non-negligible imaginary part: {sigma_sq}"
        )));
    }
    Ok(sigma_sq.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snr(gamma: f64) -> Snr {
        Snr::from_linear(gamma).unwrap()
    }

    #[test]
    fn snr_db_round_trip() {
        let s = Snr::from_db(10.0).unwrap();
        assert!((s.linear() - 10.0).abs() < 1e-12);
        assert!((s.db() - 10.0).abs() < 1e-12);
        assert!(Snr::from_linear(0.0).is_err());
        assert!(Snr::from_linear(-1.0).is_err());
    }

    #[test]
    fn mean_capacity_vanishes_at_zero_snr() {
        let sol = mean_capacity_per_antenna(1.0, snr(1e-9)).unwrap();
        assert!(sol.mu_per_antenna.abs() <= 1e-8);
        assert!((sol.g - 1.0).abs() < 1e-6);
    }

    #[test]
    fn mean_cubic_residual_and_side_condition() {
        for &rho in &[0.5f64, 1.0, 2.0, 8.0] {
            for &gamma in &[0.1f64, 1.0, 10.0, 100.0] {
                let sol = mean_capacity_per_antenna(rho, snr(gamma)).unwrap();
                assert!(mean_cubic(rho, gamma, sol.g).abs() <= 1e-10 * (1.0 + 1.0 / gamma));
                assert!(mean_side_condition(rho, sol.g));
                assert!(sol.mu_per_antenna >= 0.0, "rho={rho} gamma={gamma}");
            }
        }
    }

    #[test]
    fn variance_roots_zero_snr_limit() {
        let roots = variance_cubic_roots(1.0, snr(1e-10)).unwrap();
        assert!(roots.omega_r <= 0.0 && roots.omega_r > -1e-9);
        let mut near_one = 0;
        for t in [roots.t1, roots.t2, roots.t3] {
            if (t - Complex64::new(1.0, 0.0)).norm() < 1e-4 {
                near_one += 1;
            }
        }
        assert_eq!(near_one, 2);
    }

    #[test]
    fn variance_roots_product_identity_on_grid() {
        for &zeta in &[0.25f64, 0.5, 1.0, 2.0, 4.0] {
            for &gamma in &[0.01f64, 0.1, 1.0, 10.0, 100.0, 1000.0] {
                let roots = variance_cubic_roots(zeta, snr(gamma)).unwrap();
                let prod = roots.omega_r * roots.omega_plus * roots.omega_minus;
                assert!(
                    (prod.re + gamma).abs() <= 1e-8 * gamma && prod.im.abs() <= 1e-8 * gamma,
                    "zeta={zeta} gamma={gamma}"
                );
                // omega_r appears among the Cardano roots
                let present = [roots.t1, roots.t2, roots.t3]
                    .iter()
                    .any(|t| (t - Complex64::new(roots.omega_r, 0.0)).norm() < 1e-9 * (1.0 + gamma));
                assert!(present, "zeta={zeta} gamma={gamma}");
            }
        }
    }

    #[test]
    fn cardano_residuals_hold_over_wide_grid() {
        for i in 0..12 {
            for j in 0..15 {
                let zeta = 10f64.powf(-0.7 + 1.4 * i as f64 / 11.0);
                let gamma = 10f64.powf(-3.0 + 9.0 * j as f64 / 14.0);
                // construction fails if any raw Cardano residual exceeds
                // 1e-10 (1 + gamma)
                variance_cubic_roots(zeta, snr(gamma)).unwrap();
            }
        }
    }

    #[test]
    fn variance_at_reference_point() {
        let roots = variance_cubic_roots(1.0, snr(10.0)).unwrap();
        assert!(roots.omega_r < 0.0);
        let v = capacity_variance(1.0, snr(10.0)).unwrap();
        assert!(v > 0.0 && v.is_finite());
    }

    #[test]
    fn variance_zero_snr_limit() {
        let v = capacity_variance(1.0, snr(1e-9)).unwrap();
        assert!(v <= 1e-6);
    }

    #[test]
    fn variance_monotone_in_snr() {
        let mut prev = -1.0;
        for k in 0..=60 {
            let gamma = 10f64.powf(-3.0 + 6.0 * k as f64 / 60.0);
            let v = capacity_variance(1.0, snr(gamma)).unwrap();
            assert!(v >= prev, "gamma={gamma}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn high_snr_root_approximations() {
        // zeta > 1: omega_r -> 1/(1 - zeta)
        let roots = variance_cubic_roots(2.0, snr(1e6)).unwrap();
        assert!((roots.omega_r - (-1.0)).abs() <= 1e-2);
        // zeta < 1: omega_r -> 2/3 - sqrt((1 - zeta) gamma)
        let roots = variance_cubic_roots(0.5, snr(1e6)).unwrap();
        let approx = 2.0 / 3.0 - (0.5 * 1e6f64).sqrt();
        assert!((roots.omega_r - approx).abs() <= 1e-2 * roots.omega_r.abs());
        // the variance built from the approximate root is close to exact
        let exact = capacity_variance(2.0, snr(1e6)).unwrap();
        let approx_v = variance_high_snr(2.0, snr(1e6)).unwrap();
        assert!((approx_v - exact).abs() <= 1e-2 * exact);
        assert!(variance_high_snr(1.0, snr(1e6)).is_err());
    }

    #[test]
    fn variance_peaks_at_unit_zeta() {
        let gamma = snr(1e4);
        let at_one = capacity_variance(1.0, gamma).unwrap();
        for &zeta in &[0.25f64, 0.5, 2.0, 4.0] {
            assert!(capacity_variance(zeta, gamma).unwrap() < at_one, "zeta={zeta}");
        }
    }

    #[test]
    fn contour_matches_closed_form_square_case() {
        let ratios = AspectRatios::new(1.0, 1.0).unwrap();
        let s = snr(1.0);
        let spec = ContourSpec::auto(&ratios, s).unwrap();
        let numeric = variance_numeric_contour(&ratios, s, &spec).unwrap();
        let exact = capacity_variance(1.0, s).unwrap();
        assert!(
            (numeric - exact).abs() <= 1e-4 * exact.abs(),
            "{numeric} vs {exact}"
        );
    }

    #[test]
    fn contour_invariant_under_refinement_and_shape() {
        let ratios = AspectRatios::new(2.0, 0.5).unwrap();
        let s = snr(5.0);
        let base = ContourSpec::auto(&ratios, s).unwrap();
        let v1 = variance_numeric_contour(&ratios, s, &base).unwrap();
        let doubled = ContourSpec {
            nodes: base.nodes * 2,
            ..base
        };
        let v2 = variance_numeric_contour(&ratios, s, &doubled).unwrap();
        assert!((v1 - v2).abs() <= 1e-5 * v1.abs(), "{v1} vs {v2}");
        let rect = ContourSpec {
            shape: ContourShape::Rectangle,
            ..base
        };
        let v3 = variance_numeric_contour(&ratios, s, &rect).unwrap();
        assert!((v1 - v3).abs() <= 1e-5 * v1.abs(), "{v1} vs {v3}");
    }

    #[test]
    fn contour_rejects_bad_placement() {
        let ratios = AspectRatios::new(1.0, 1.0).unwrap();
        let s = snr(1.0);
        let edge = spectra::q_support_right_edge(&ratios).unwrap();
        let bad_left = ContourSpec {
            left_crossing: -2.0,
            right_crossing: edge + 1.0,
            nodes: 512,
            shape: ContourShape::Ellipse,
        };
        assert!(matches!(
            variance_numeric_contour(&ratios, s, &bad_left),
            Err(Error::Contour(_))
        ));
        let bad_right = ContourSpec {
            left_crossing: -0.25,
            right_crossing: edge * 0.5,
            nodes: 512,
            shape: ContourShape::Ellipse,
        };
        assert!(variance_numeric_contour(&ratios, s, &bad_right).is_err());
        let few_nodes = ContourSpec {
            left_crossing: -0.25,
            right_crossing: edge + 1.0,
            nodes: 128,
            shape: ContourShape::Ellipse,
        };
        assert!(variance_numeric_contour(&ratios, s, &few_nodes).is_err());
    }
}
