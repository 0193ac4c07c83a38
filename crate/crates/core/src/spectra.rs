//! First- and second-order Cauchy transforms of the limiting spectral
//! distribution of `Q = H H†` for the Rayleigh product ensemble, plus the
//! Marchenko-Pastur transforms of the inner Wishart factor.
//!
//! Branch selection.  The Marchenko-Pastur transform solves the quadratic
//! `z G^2 - (z + 1 - zeta) G + 1 = 0`; for nonreal `z` the physical root is
//! the one with the larger `Im(1/G) * sign(Im z)`: the reciprocal transform
//! of a probability measure satisfies `Im(1/G(z)) >= Im(z)` while the two
//! reciprocals sum to exactly `Im(z)`, so the test picks a unique root.  The
//! resolvent of `Q` solves a cubic whose three branches mix both roots of
//! the inner quadratic; the physical branch is recognized through the
//! subordination identity `z = (1 - rho) u + rho u^2 G_P(u)`, `u = 1/G`,
//! evaluated with the correctly-branched `G_P` (the cubic is that identity
//! with `G_P` replaced by either quadratic root, which is where the
//! spurious branches come from).

use num_complex::Complex64;

use crate::cubic;
use crate::numeric::pairwise_sum_complex;
use crate::{Error, Result};

/// Limiting dimension ratios `rho = S/R`, `zeta = T/S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AspectRatios {
    rho: f64,
    zeta: f64,
}

impl AspectRatios {
    pub fn new(rho: f64, zeta: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0 && zeta.is_finite() && zeta > 0.0) {
            return Err(Error::Range(format!(
                "aspect ratios must be positive and finite, got rho={rho}, zeta={zeta}"
            )));
        }
        Ok(Self { rho, zeta })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// True in the equal-antenna regime `R = T`, i.e. `rho * zeta = 1`,
    /// which the closed-form mean and variance require.
    pub fn square_case(&self) -> bool {
        (self.rho * self.zeta - 1.0).abs() <= 1e-12
    }
}

/// Closed interval enclosing a limiting spectral support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportInterval {
    pub left: f64,
    pub right: f64,
}

impl SupportInterval {
    pub fn new(left: f64, right: f64) -> Result<Self> {
        if !(0.0 <= left && left <= right && right.is_finite()) {
            return Err(Error::Range(format!(
                "invalid support interval [{left}, {right}]"
            )));
        }
        Ok(Self { left, right })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.left <= x && x <= self.right
    }
}

/// Bulk support `[(1 - sqrt(zeta))^2, (1 + sqrt(zeta))^2]` of the
/// Marchenko-Pastur law with ratio `zeta`.
pub fn mp_support(zeta: f64) -> SupportInterval {
    let s = zeta.sqrt();
    SupportInterval {
        left: (1.0 - s) * (1.0 - s),
        right: (1.0 + s) * (1.0 + s),
    }
}

fn check_zeta(zeta: f64) -> Result<()> {
    if !(zeta.is_finite() && zeta > 0.0) {
        return Err(Error::Range(format!("zeta must be positive, got {zeta}")));
    }
    Ok(())
}

fn check_finite(z: Complex64, name: &str) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Range(format!("{name} must be finite, got {z}")));
    }
    Ok(())
}

fn polish_mp_root(z: Complex64, zeta: f64, mut g: Complex64) -> Complex64 {
    // One Newton step on z G^2 - (z + 1 - zeta) G + 1 restores the digits
    // lost to cancellation at large |z|.
    let lin = z + 1.0 - zeta;
    for _ in 0..2 {
        let f = z * g * g - lin * g + 1.0;
        let fp = 2.0 * z * g - lin;
        if fp.norm() < 1e-300 {
            break;
        }
        g -= f / fp;
    }
    g
}

/// Cauchy transform of the Marchenko-Pastur law with ratio `zeta`,
/// `G_P(z) = 1/2 + (1 - zeta)/(2z) - sqrt(1/4 - (1 + zeta)/(2z) + (1 - zeta)^2/(4 z^2))`,
/// on the branch with `z G_P(z) -> 1` at infinity and `Im G_P < 0` on the
/// upper half-plane.
pub fn mp_cauchy(z: Complex64, zeta: f64) -> Result<Complex64> {
    check_zeta(zeta)?;
    check_finite(z, "z")?;
    if z.norm() == 0.0 {
        return if zeta != 1.0 {
            Err(Error::Pole("G_P has a pole at z = 0 for zeta != 1".into()))
        } else {
            Err(Error::Domain("z = 0 lies on the support edge".into()))
        };
    }

    let half = Complex64::new(0.5, 0.0);
    let a = half + (1.0 - zeta) / (2.0 * z);
    let radicand = Complex64::new(0.25, 0.0) - (1.0 + zeta) / (2.0 * z)
        + (1.0 - zeta) * (1.0 - zeta) / (4.0 * z * z);
    let w = radicand.sqrt();

    let g = if z.im != 0.0 {
        // pick the root with the larger Im(1/G) * sign(Im z)
        let (g1, g2) = (a - w, a + w);
        let score = |g: Complex64| (1.0 / g).im * z.im.signum();
        if score(g1) >= score(g2) {
            g1
        } else {
            g2
        }
    } else {
        let x = z.re;
        let support = mp_support(zeta);
        if support.contains(x) {
            return Err(Error::Domain(format!(
                "z = {x} lies inside the spectral support [{}, {}]",
                support.left, support.right
            )));
        }
        // Real axis, off support: both roots are real.  Right of the bulk
        // and left of zero the transform is `a - w`; in the gap
        // (0, left edge) it is `a + w` (for zeta < 1 that branch carries
        // the (1 - zeta)/z atom pole, for zeta > 1 it tends to 1/(1 - zeta)).
        if x > support.right || x < 0.0 {
            a - w
        } else {
            a + w
        }
    };
    Ok(polish_mp_root(z, zeta, g))
}

/// Derivative of the Marchenko-Pastur Cauchy transform, by implicit
/// differentiation of its quadratic.
pub fn mp_cauchy_prime(z: Complex64, zeta: f64) -> Result<Complex64> {
    let g = mp_cauchy(z, zeta)?;
    let denom = 2.0 * z * g - (z + 1.0 - zeta);
    if denom.norm() <= 1e-12 * (1.0 + z.norm()) {
        return Err(Error::Domain(
            "derivative is singular at the support edge".into(),
        ));
    }
    Ok((g - g * g) / denom)
}

/// Functional inverse of the Marchenko-Pastur transform,
/// `G_P^{-1}(t) = 1/t + zeta/(1 - t)`.
pub fn mp_cauchy_inverse(t: Complex64, zeta: f64) -> Result<Complex64> {
    check_zeta(zeta)?;
    check_finite(t, "t")?;
    let tol = 1e-14;
    if t.norm() <= tol {
        return Err(Error::Pole("G_P^{-1} has a pole at t = 0".into()));
    }
    if (t - 1.0).norm() <= tol {
        return Err(Error::Pole("G_P^{-1} has a pole at t = 1".into()));
    }
    Ok(1.0 / t + zeta / (1.0 - t))
}

/// Coefficients of the resolvent cubic
/// `z^2 G^3 + (rho zeta + rho - 2) z G^2 + ((rho zeta - 1)(rho - 1) - rho z) G + rho = 0`.
fn q_cubic_coefficients(z: Complex64, ratios: &AspectRatios) -> [Complex64; 4] {
    let (rho, zeta) = (ratios.rho, ratios.zeta);
    let p = rho * zeta + rho - 2.0;
    let q = (rho * zeta - 1.0) * (rho - 1.0);
    [
        z * z,
        p * z,
        Complex64::new(q, 0.0) - rho * z,
        Complex64::new(rho, 0.0),
    ]
}

/// Subordination defect `|z - (1 - rho) u - rho u^2 G_P(u)|`, `u = 1/g`,
/// normalized by `1 + |z|`.  Vanishes exactly on the physical branch.
fn subordination_defect(z: Complex64, g: Complex64, ratios: &AspectRatios) -> f64 {
    if g.norm() < 1e-300 {
        return f64::INFINITY;
    }
    let u = 1.0 / g;
    match mp_cauchy(u, ratios.zeta) {
        Ok(gp) => {
            let rhs = (1.0 - ratios.rho) * u + ratios.rho * u * u * gp;
            (z - rhs).norm() / (1.0 + z.norm())
        }
        Err(_) => f64::INFINITY,
    }
}

fn q_cauchy_root(z: Complex64, ratios: &AspectRatios) -> Result<Complex64> {
    let [a, b, c, d] = q_cubic_coefficients(z, ratios);
    let roots = cubic::solve(a, b, c, d);

    let mut best: Option<(f64, Complex64)> = None;
    for &g in &roots {
        // reciprocal-Herglotz necessary condition off the real axis
        if z.im != 0.0 {
            let u = 1.0 / g;
            if u.im * z.im.signum() < z.im.abs() * 0.5 {
                continue;
            }
        }
        let defect = subordination_defect(z, g, ratios);
        if best.is_none_or(|(d0, _)| defect < d0) {
            best = Some((defect, g));
        }
    }

    let (defect, g) = best.ok_or_else(|| {
        Error::BranchSelection(format!("no admissible root at z = {z} (near the support?)"))
    })?;
    if defect > 1e-6 {
        return Err(Error::BranchSelection(format!(
            "subordination defect {defect:.3e} at z = {z}; point is inside or too close to the support"
        )));
    }
    // the selected root must not sit strictly on the wrong half-plane side
    if z.im != 0.0 && g.im * z.im.signum() > 1e-14 * (1.0 + g.norm()) {
        return Err(Error::BranchSelection(format!(
            "selected root violates the half-plane condition at z = {z}"
        )));
    }
    Ok(g)
}

/// Cauchy transform `G_Q(z)` of the limiting spectrum of `Q = H H†`.
///
/// Real arguments must satisfy `z < 0` or `z > lambda_r` (the right support
/// edge); nonreal arguments anywhere off the support are accepted.
pub fn q_cauchy(z: Complex64, ratios: &AspectRatios) -> Result<Complex64> {
    check_finite(z, "z")?;
    if z.im == 0.0 {
        let x = z.re;
        if x >= 0.0 {
            let edge = q_support_right_edge(ratios)?;
            if x <= edge {
                return Err(Error::Domain(format!(
                    "real z = {x} must lie left of 0 or right of the support edge {edge:.6}"
                )));
            }
        }
    }
    q_cauchy_root(z, ratios)
}

/// `dG_Q/dz` by implicit differentiation of the resolvent cubic.
pub fn q_cauchy_derivative(z: Complex64, ratios: &AspectRatios) -> Result<Complex64> {
    let g = q_cauchy(z, ratios)?;
    let [a, b, c, _] = q_cubic_coefficients(z, ratios);
    let (rho, zeta) = (ratios.rho, ratios.zeta);
    let p = rho * zeta + rho - 2.0;
    // F_z = 2 z G^3 + p G^2 - rho G, F_G = 3 z^2 G^2 + 2 p z G + c
    let f_z = 2.0 * z * g * g * g + p * g * g - rho * g;
    let f_g = 3.0 * a * g * g + 2.0 * b * g + c;
    if f_g.norm() <= 1e-10 * (1.0 + z.norm() * z.norm()) {
        return Err(Error::Domain(
            "resolvent derivative singular: support edge".into(),
        ));
    }
    Ok(-f_z / f_g)
}

/// `d^2 G_Q/dz^2` by differentiating the implicit relation twice.
pub fn q_cauchy_second_derivative(z: Complex64, ratios: &AspectRatios) -> Result<Complex64> {
    let g = q_cauchy(z, ratios)?;
    let gp = q_cauchy_derivative(z, ratios)?;
    let [a, b, c, _] = q_cubic_coefficients(z, ratios);
    let (rho, zeta) = (ratios.rho, ratios.zeta);
    let p = rho * zeta + rho - 2.0;
    let f_g = 3.0 * a * g * g + 2.0 * b * g + c;
    let f_zz = 2.0 * g * g * g;
    let f_zg = 6.0 * z * g * g + 2.0 * p * g - rho;
    let f_gg = 6.0 * a * g + 2.0 * b;
    Ok(-(f_zz + 2.0 * f_zg * gp + f_gg * gp * gp) / f_g)
}

/// Functional inverse of `G_Q` in the equal-antenna case,
/// `G_Q^{-1}(t) = [1 - (1 - zeta) t - sqrt(1 + (1 - zeta)^2 t^2 - 2 (1 + zeta) t)] / (2 zeta t^2)`,
/// the minus branch enforcing `z G_Q(z) -> 1`.
pub fn q_cauchy_inverse(t: f64, zeta: f64) -> Result<f64> {
    check_zeta(zeta)?;
    if !t.is_finite() {
        return Err(Error::Range(format!("t must be finite, got {t}")));
    }
    if t == 0.0 {
        return Err(Error::Pole("G_Q^{-1} has a pole at t = 0".into()));
    }
    let radicand = 1.0 + (1.0 - zeta) * (1.0 - zeta) * t * t - 2.0 * (1.0 + zeta) * t;
    if radicand < 0.0 {
        return Err(Error::Domain(format!(
            "t = {t} lies in the image of the support (negative radicand {radicand:.3e})"
        )));
    }
    Ok((1.0 - (1.0 - zeta) * t - radicand.sqrt()) / (2.0 * zeta * t * t))
}

/// Discriminant of the resolvent cubic in `G` at real `z`.
fn q_cubic_discriminant(z: f64, ratios: &AspectRatios) -> f64 {
    let (rho, zeta) = (ratios.rho, ratios.zeta);
    let a = z * z;
    let b = (rho * zeta + rho - 2.0) * z;
    let c = (rho * zeta - 1.0) * (rho - 1.0) - rho * z;
    let d = rho;
    18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c
        - 4.0 * a * c * c * c
        - 27.0 * a * a * d * d
}

/// Right end-point `lambda_r` of the bulk support of `Q`, located as the
/// largest real zero of the resolvent-cubic discriminant (three distinct
/// real branches outside the bulk, one real branch inside), bracketed by a
/// geometric scan and refined by bisection.
pub fn q_support_right_edge(ratios: &AspectRatios) -> Result<f64> {
    let (rho, zeta) = (ratios.rho, ratios.zeta);
    let mut hi = mp_support(zeta).right * (rho * zeta).max(1.0);
    let mut tries = 0;
    while q_cubic_discriminant(hi, ratios) <= 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::Numeric(
                "could not find a point right of the support".into(),
            ));
        }
    }
    // walk down a geometric grid until the discriminant flips sign
    let lo_limit = hi * 1e-12;
    let steps = 2000;
    let ratio = (lo_limit / hi).powf(1.0 / steps as f64);
    let mut upper = hi;
    let mut lower = None;
    let mut x = hi;
    for _ in 0..steps {
        let next = x * ratio;
        if q_cubic_discriminant(next, ratios) < 0.0 {
            upper = x;
            lower = Some(next);
            break;
        }
        x = next;
    }
    let mut lo = lower.ok_or_else(|| {
        Error::Numeric("discriminant never changes sign; support edge not bracketed".into())
    })?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + upper);
        if q_cubic_discriminant(mid, ratios) < 0.0 {
            lo = mid;
        } else {
            upper = mid;
        }
        if (upper - lo) <= 1e-14 * upper {
            break;
        }
    }
    Ok(0.5 * (lo + upper))
}

/// Conservative enclosure `[0, lambda_r]` of the support of `Q` (the bulk
/// plus any atom at zero).
pub fn q_support_enclosure(ratios: &AspectRatios) -> Result<SupportInterval> {
    SupportInterval::new(0.0, q_support_right_edge(ratios)?)
}

fn check_r_transform_point(v: Complex64, zeta: f64, name: &str) -> Result<()> {
    check_finite(v, name)?;
    if v.norm() < 1e-300 {
        return Err(Error::Pole(format!("{name} = 0 is a pole")));
    }
    let inv = 1.0 / v;
    if inv.im == 0.0 && mp_support(zeta).contains(inv.re) {
        return Err(Error::Domain(format!(
            "1/{name} lies on the Marchenko-Pastur support"
        )));
    }
    Ok(())
}

/// `W(x) = G_P(1/x)` and its derivative in `x`.
fn mp_composed(x: Complex64, zeta: f64) -> Result<(Complex64, Complex64)> {
    let inv = 1.0 / x;
    let w = mp_cauchy(inv, zeta)?;
    let wp = -mp_cauchy_prime(inv, zeta)? / (x * x);
    Ok((w, wp))
}

fn r_transform_off_diagonal(x: Complex64, y: Complex64, zeta: f64) -> Result<Complex64> {
    let (wx, wpx) = mp_composed(x, zeta)?;
    let (wy, wpy) = mp_composed(y, zeta)?;
    let dw = wx - wy;
    if dw.norm() < 1e-300 {
        return Err(Error::Numeric(
            "coincident transform values in the fluctuation kernel".into(),
        ));
    }
    let dxy = x - y;
    Ok(wpx * wpy / (dw * dw) - 1.0 / (dxy * dxy))
}

/// Two-point Richardson limit onto the diagonal of a symmetric kernel:
/// the symmetric offsets make the error even in `h`, so combining `h` and
/// `h/2` cancels the leading `h^2` term.  The offset balances the `h^2`
/// truncation against the `1/h^3`-amplified rounding of the cancelling
/// `1/(x - y)^2` pair; much smaller offsets drown the limit in roundoff.
fn diagonal_limit(
    x: Complex64,
    mut eval: impl FnMut(Complex64, Complex64) -> Result<Complex64>,
) -> Result<Complex64> {
    let h = 1e-2 * x;
    let l_h = eval(x - 0.5 * h, x + 0.5 * h)?;
    let l_h2 = eval(x - 0.25 * h, x + 0.25 * h)?;
    Ok((4.0 * l_h2 - l_h) / 3.0)
}

fn is_diagonal(x: Complex64, y: Complex64) -> bool {
    (x - y).norm() <= 1e-8 * (1.0 + x.norm())
}

/// Second-order R-transform of `Q`,
/// `R(x, y) = W'(x) W'(y) / (W(x) - W(y))^2 - 1/(x - y)^2` with
/// `W(x) = G_P(1/x)`.  Symmetric; the diagonal is a removable singularity
/// evaluated by a Richardson limit with offset `1e-5 |x|`.
pub fn second_order_r_transform(x: Complex64, y: Complex64, zeta: f64) -> Result<Complex64> {
    check_zeta(zeta)?;
    check_r_transform_point(x, zeta, "x")?;
    check_r_transform_point(y, zeta, "y")?;
    if is_diagonal(x, y) {
        return diagonal_limit(x, |a, b| r_transform_off_diagonal(a, b, zeta));
    }
    r_transform_off_diagonal(x, y, zeta)
}

fn second_order_log_term_off_diagonal(
    x: Complex64,
    y: Complex64,
    ratios: &AspectRatios,
) -> Result<Complex64> {
    let gx = q_cauchy(x, ratios)?;
    let gy = q_cauchy(y, ratios)?;
    let gpx = q_cauchy_derivative(x, ratios)?;
    let gpy = q_cauchy_derivative(y, ratios)?;
    let dg = gx - gy;
    let dxy = x - y;
    if dg.norm() < 1e-300 {
        return Err(Error::Numeric("coincident resolvent values".into()));
    }
    Ok(gpx * gpy / (dg * dg) - 1.0 / (dxy * dxy))
}

/// The Wishart-shaped part of the second-order Cauchy transform: the mixed
/// partial `d^2/dx dy log[(G_Q(x) - G_Q(y)) / (x - y)]`, which evaluates in
/// closed form to `G'(x) G'(y)/(G(x) - G(y))^2 - 1/(x - y)^2`.  With the
/// R-transform term deleted this is exactly the covariance kernel of a
/// Wishart-type ensemble.
pub fn second_order_log_term(x: Complex64, y: Complex64, ratios: &AspectRatios) -> Result<Complex64> {
    if is_diagonal(x, y) {
        return diagonal_limit(x, |a, b| second_order_log_term_off_diagonal(a, b, ratios));
    }
    second_order_log_term_off_diagonal(x, y, ratios)
}

fn second_order_cauchy_off_diagonal(
    x: Complex64,
    y: Complex64,
    ratios: &AspectRatios,
) -> Result<Complex64> {
    let gx = q_cauchy(x, ratios)?;
    let gy = q_cauchy(y, ratios)?;
    let gpx = q_cauchy_derivative(x, ratios)?;
    let gpy = q_cauchy_derivative(y, ratios)?;
    let r = second_order_r_transform(gx, gy, ratios.zeta)?;
    let dg = gx - gy;
    let dxy = x - y;
    Ok(gpx * gpy * (r + 1.0 / (dg * dg)) - 1.0 / (dxy * dxy))
}

/// Second-order Cauchy transform
/// `G_Q(x, y) = G'(x) G'(y) R(G(x), G(y)) + d^2/dxdy log[(G(x) - G(y))/(x - y)]`,
/// the limiting covariance of scaled resolvents.  Symmetric in `(x, y)`;
/// diagonal by the same Richardson limit as the R-transform.
pub fn second_order_cauchy(x: Complex64, y: Complex64, ratios: &AspectRatios) -> Result<Complex64> {
    check_finite(x, "x")?;
    check_finite(y, "y")?;
    if is_diagonal(x, y) {
        return diagonal_limit(x, |a, b| second_order_cauchy_off_diagonal(a, b, ratios));
    }
    second_order_cauchy_off_diagonal(x, y, ratios)
}

/// Laurent coefficients (free moments) `alpha_0..alpha_n_max` of `G_Q` at
/// infinity, extracted on a circle of radius `10 (1 + lambda_r)` by
/// discrete Fourier summation.
pub fn q_moments_numeric(ratios: &AspectRatios, n_max: usize, nodes: usize) -> Result<Vec<f64>> {
    let radius = 10.0 * (1.0 + q_support_right_edge(ratios)?);
    laurent_moments(n_max, nodes, radius, |z| q_cauchy(z, ratios))
}

/// Laurent coefficients of the Marchenko-Pastur transform at infinity.
pub fn mp_moments_numeric(zeta: f64, n_max: usize, nodes: usize) -> Result<Vec<f64>> {
    check_zeta(zeta)?;
    let radius = 10.0 * (1.0 + mp_support(zeta).right);
    laurent_moments(n_max, nodes, radius, |z| mp_cauchy(z, zeta))
}

fn laurent_moments(
    n_max: usize,
    nodes: usize,
    radius: f64,
    mut f: impl FnMut(Complex64) -> Result<Complex64>,
) -> Result<Vec<f64>> {
    if nodes < 4 * (n_max + 2) {
        return Err(Error::Range(format!(
            "need at least {} nodes for {} coefficients",
            4 * (n_max + 2),
            n_max + 1
        )));
    }
    let mut values = Vec::with_capacity(nodes);
    for k in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / nodes as f64;
        let z = Complex64::from_polar(radius, theta);
        values.push((f(z)?, theta));
    }
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let terms: Vec<Complex64> = values
            .iter()
            .map(|&(g, theta)| g * Complex64::from_polar(1.0, (n as f64 + 1.0) * theta))
            .collect();
        let c = pairwise_sum_complex(&terms) / nodes as f64;
        out.push(c.re * radius.powi(n as i32 + 1));
    }
    Ok(out)
}

/// Second-order moment `alpha_{m,n}` of `Q` extracted numerically from the
/// second-order Cauchy transform on a two-radius torus (distinct radii keep
/// the `1/(x - y)^2` cancellations bounded).
pub fn q_second_order_moment_numeric(
    ratios: &AspectRatios,
    m: usize,
    n: usize,
    nodes: usize,
) -> Result<f64> {
    let edge = q_support_right_edge(ratios)?;
    let r1 = 12.0 * (1.0 + edge);
    let r2 = 7.0 * (1.0 + edge);
    let mut acc = Vec::with_capacity(nodes * nodes);
    for a in 0..nodes {
        let theta = 2.0 * std::f64::consts::PI * a as f64 / nodes as f64;
        let x = Complex64::from_polar(r1, theta);
        for b in 0..nodes {
            let phi = 2.0 * std::f64::consts::PI * b as f64 / nodes as f64;
            let y = Complex64::from_polar(r2, phi);
            let g2 = second_order_cauchy(x, y, ratios)?;
            let phase =
                Complex64::from_polar(1.0, (m as f64 + 1.0) * theta + (n as f64 + 1.0) * phi);
            acc.push(g2 * phase);
        }
    }
    let c = pairwise_sum_complex(&acc) / (nodes * nodes) as f64;
    Ok(c.re * r1.powi(m as i32 + 1) * r2.powi(n as i32 + 1))
}

/// Coefficients `kappa_{m,n}` of the second-order R-transform extracted on
/// a small two-radius polydisk, for cross-checking against the annular
/// enumeration.  Returns entries for all `m, n >= 1`, `m + n <= max_order`.
pub fn r_transform_coefficients_numeric(
    zeta: f64,
    max_order: usize,
    nodes: usize,
) -> Result<std::collections::BTreeMap<(usize, usize), f64>> {
    check_zeta(zeta)?;
    // radii inside the convergence bidisk |x| < 1/(1 + sqrt(zeta))^2,
    // distinct so the kernel cancellations stay bounded
    let rmax = 1.0 / mp_support(zeta).right;
    let r1 = 0.5 * rmax;
    let r2 = 0.3 * rmax;
    let mut grid = vec![vec![Complex64::default(); nodes]; nodes];
    for (a, row) in grid.iter_mut().enumerate() {
        let theta = 2.0 * std::f64::consts::PI * a as f64 / nodes as f64;
        let x = Complex64::from_polar(r1, theta);
        for (b, cell) in row.iter_mut().enumerate() {
            let phi = 2.0 * std::f64::consts::PI * b as f64 / nodes as f64;
            let y = Complex64::from_polar(r2, phi);
            *cell = second_order_r_transform(x, y, zeta)?;
        }
    }
    let mut out = std::collections::BTreeMap::new();
    for m in 1..max_order {
        for n in 1..=(max_order - m) {
            let mut acc = Vec::with_capacity(nodes * nodes);
            for (a, row) in grid.iter().enumerate() {
                let theta = 2.0 * std::f64::consts::PI * a as f64 / nodes as f64;
                for (b, &val) in row.iter().enumerate() {
                    let phi = 2.0 * std::f64::consts::PI * b as f64 / nodes as f64;
                    let phase = Complex64::from_polar(
                        1.0,
                        -((m as f64 - 1.0) * theta + (n as f64 - 1.0) * phi),
                    );
                    acc.push(val * phase);
                }
            }
            let c = pairwise_sum_complex(&acc) / (nodes * nodes) as f64;
            out.insert(
                (m, n),
                c.re / (r1.powi(m as i32 - 1) * r2.powi(n as i32 - 1)),
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecombinatorics;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Quadrature oracle: integrate 1/(z - t) against the MP density
    /// sqrt((t - a)(b - t))/(2 pi t) on [a, b] plus the atom max(0, 1 - zeta)
    /// at zero, using the edge-flattening substitution t = c + s sin(u).
    fn mp_cauchy_quadrature(z: Complex64, zeta: f64) -> Complex64 {
        let sup = mp_support(zeta);
        let (a, b) = (sup.left, sup.right);
        let c = 0.5 * (a + b);
        let s = 0.5 * (b - a);
        let n = 200_000usize;
        let mut acc = Complex64::default();
        for k in 0..n {
            let u = -std::f64::consts::FRAC_PI_2
                + std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            let t = c + s * u.sin();
            // density * dt = [s cos(u) / (2 pi t)] * s cos(u) du
            let w = s * s * u.cos() * u.cos() / (2.0 * std::f64::consts::PI * t);
            acc += w / (z - t);
        }
        acc *= std::f64::consts::PI / n as f64;
        if zeta < 1.0 {
            acc += (1.0 - zeta) / z;
        }
        acc
    }

    #[test]
    fn mp_cauchy_matches_quadrature_off_support() {
        for &zeta in &[0.5f64, 1.0, 2.0] {
            for &z in &[cx(8.0, 0.0), cx(-2.0, 0.0), cx(1.0, 2.0), cx(-0.5, -1.0)] {
                let got = mp_cauchy(z, zeta).unwrap();
                let want = mp_cauchy_quadrature(z, zeta);
                assert!(
                    (got - want).norm() < 2e-5,
                    "zeta={zeta} z={z}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn mp_cauchy_in_the_gap_left_of_the_bulk() {
        // 0 < z < (1 - sqrt(zeta))^2, both atom (zeta < 1) and pole-free
        // (zeta > 1) cases against the quadrature oracle.
        for &(zeta, z) in &[(4.0f64, 0.5f64), (4.0, 0.9), (0.25, 0.1), (0.25, 0.2)] {
            let got = mp_cauchy(cx(z, 0.0), zeta).unwrap();
            let want = mp_cauchy_quadrature(cx(z, 0.0), zeta);
            assert!(
                (got - want).norm() < 2e-4 * (1.0 + got.norm()),
                "zeta={zeta} z={z}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn mp_cauchy_large_argument_normalization() {
        let z = cx(1e6, 0.0);
        let g = mp_cauchy(z, 1.0).unwrap();
        assert!((z * g - 1.0).norm() <= 1e-5);
    }

    #[test]
    fn mp_cauchy_real_right_of_support_is_in_zero_half() {
        for &z in &[4.5f64, 6.0, 10.0, 100.0] {
            let g = mp_cauchy(cx(z, 0.0), 1.0).unwrap();
            assert!(g.im.abs() < 1e-14);
            assert!(g.re > 0.0 && g.re < 0.5, "z={z} g={g}");
        }
    }

    #[test]
    fn mp_cauchy_series_matches_enumeration_moments() {
        // beta_n = sum over non-crossing disc permutations of zeta^{#}.
        for &zeta in &[0.5f64, 1.0, 1.5] {
            let num = mp_moments_numeric(zeta, 4, 4096).unwrap();
            assert!((num[0] - 1.0).abs() < 1e-10);
            for (n, &value) in num.iter().enumerate().skip(1) {
                let profile = freecombinatorics::disc_orbit_profile(n).unwrap();
                let beta: f64 = profile
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| c as f64 * zeta.powi(k as i32 + 1))
                    .sum();
                assert!(
                    (value - beta).abs() < 1e-9 * (1.0 + beta),
                    "zeta={zeta} n={n}: {value} vs {beta}"
                );
            }
        }
    }

    #[test]
    fn mp_cauchy_rejects_support_and_zero() {
        assert!(matches!(
            mp_cauchy(cx(2.0, 0.0), 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(mp_cauchy(cx(0.0, 0.0), 2.0), Err(Error::Pole(_))));
        assert!(matches!(
            mp_cauchy(cx(0.0, 0.0), 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn mp_inverse_direct_value_and_poles() {
        let v = mp_cauchy_inverse(cx(-1.0, 0.0), 1.0).unwrap();
        assert!((v - cx(-0.5, 0.0)).norm() < 1e-15);
        assert!(matches!(
            mp_cauchy_inverse(cx(0.0, 0.0), 1.0),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            mp_cauchy_inverse(cx(1.0, 0.0), 0.5),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn mp_inverse_round_trip() {
        let z0 = cx(5.0, 0.0);
        let t = mp_cauchy(z0, 0.5).unwrap();
        let back = mp_cauchy_inverse(t, 0.5).unwrap();
        assert!((back - z0).norm() < 1e-10);
    }

    #[test]
    fn mp_prime_matches_finite_difference() {
        let zeta = 0.75;
        for &z in &[cx(7.0, 0.0), cx(2.0, 1.5), cx(-3.0, 0.2)] {
            let h = 1e-6;
            let fd = (mp_cauchy(z + h, zeta).unwrap() - mp_cauchy(z - h, zeta).unwrap())
                / (2.0 * h);
            let an = mp_cauchy_prime(z, zeta).unwrap();
            assert!((fd - an).norm() < 1e-7 * (1.0 + an.norm()));
        }
    }

    #[test]
    fn q_cauchy_large_argument_normalization() {
        let ratios = AspectRatios::new(1.0, 1.0).unwrap();
        let z = cx(1e6, 0.0);
        let g = q_cauchy(z, &ratios).unwrap();
        assert!((z * g - 1.0).norm() <= 1e-5);
    }

    #[test]
    fn q_cauchy_residual_is_tiny() {
        let ratios = AspectRatios::new(2.0, 0.5).unwrap();
        for &z in &[cx(9.0, 0.0), cx(-4.0, 0.0), cx(3.0, 3.0), cx(0.5, -2.0)] {
            let g = q_cauchy(z, &ratios).unwrap();
            let [a, b, c, d] = q_cubic_coefficients(z, &ratios);
            let res = cubic::eval(a, b, c, d, g).norm();
            assert!(res <= 1e-10 * (1.0 + z.norm() * z.norm()), "z={z} res={res}");
        }
    }

    #[test]
    fn q_cauchy_herglotz_on_a_grid() {
        let ratios = AspectRatios::new(0.5, 2.0).unwrap();
        for i in 0..10 {
            for j in 1..6 {
                let z = cx(-4.0 + i as f64, 0.3 * j as f64);
                let g = q_cauchy(z, &ratios).unwrap();
                assert!(g.im < 0.0, "z={z} g={g}");
                let gm = mp_cauchy(z, 2.0).unwrap();
                assert!(gm.im < 0.0);
            }
        }
    }

    #[test]
    fn q_cauchy_real_branch_is_positive_decreasing_right_of_edge() {
        let ratios = AspectRatios::new(1.0, 1.0).unwrap();
        let edge = q_support_right_edge(&ratios).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let z = edge + 0.2 + 0.5 * k as f64;
            let g = q_cauchy(cx(z, 0.0), &ratios).unwrap();
            assert!(g.im.abs() < 1e-12);
            assert!(g.re > 0.0 && g.re < prev);
            prev = g.re;
        }
    }

    #[test]
    fn q_cauchy_moments_match_free_cumulants() {
        // alpha_1 = rho zeta, alpha_2 = kappa_2 + kappa_1^2.
        let (rho, zeta) = (1.5f64, 0.8f64);
        let ratios = AspectRatios::new(rho, zeta).unwrap();
        let num = q_moments_numeric(&ratios, 3, 4096).unwrap();
        assert!((num[0] - 1.0).abs() < 1e-9);
        assert!((num[1] - rho * zeta).abs() < 1e-9);
        let alpha2 = rho * zeta + rho * zeta * zeta + rho * rho * zeta * zeta;
        assert!((num[2] - alpha2).abs() < 1e-8 * (1.0 + alpha2));
        // and the full enumeration route for n = 3
        let cums = freecombinatorics::free_cumulants(rho, zeta, 3, 2).unwrap();
        let moments = freecombinatorics::moments_from_cumulants(&cums).unwrap();
        assert!((num[3] - moments.first_order(3)).abs() < 1e-7 * (1.0 + moments.first_order(3)));
    }

    #[test]
    fn q_cauchy_rejects_points_inside_the_support() {
        let ratios = AspectRatios::new(1.0, 1.0).unwrap();
        assert!(q_cauchy(cx(1.0, 0.0), &ratios).is_err());
        assert!(q_cauchy(cx(6.74, 0.0), &ratios).is_err());
        assert!(q_cauchy(cx(0.0, 0.0), &ratios).is_err());
    }

    #[test]
    fn q_derivative_matches_finite_difference() {
        let ratios = AspectRatios::new(1.0, 1.0).unwrap();
        let z = cx(30.0, 0.0);
        let h = 1e-5;
        let fd =
            (q_cauchy(z + h, &ratios).unwrap() - q_cauchy(z - h, &ratios).unwrap()) / (2.0 * h);
        let an = q_cauchy_derivative(z, &ratios).unwrap();
        assert!((fd - an).norm() <= 1e-6 * an.norm());
        // large |z|: derivative ~ -1/z^2
        let big = cx(1e5, 0.0);
        let d = q_cauchy_derivative(big, &ratios).unwrap();
        assert!((d + 1.0 / (big * big)).norm() < 1e-3 / (big.norm() * big.norm()));
    }

    #[test]
    fn q_second_derivative_matches_finite_difference() {
        let ratios = AspectRatios::new(0.8, 1.2).unwrap();
        let z = cx(12.0, 1.0);
        let h = 1e-4;
        let fd = (q_cauchy_derivative(z + h, &ratios).unwrap()
            - q_cauchy_derivative(z - h, &ratios).unwrap())
            / (2.0 * h);
        let an = q_cauchy_second_derivative(z, &ratios).unwrap();
        assert!((fd - an).norm() <= 1e-5 * (1.0 + an.norm()));
    }

    #[test]
    fn q_derivative_finite_in_upper_half_plane() {
        let ratios = AspectRatios::new(1.0, 1.0).unwrap();
        let d = q_cauchy_derivative(cx(2.0, 0.5), &ratios).unwrap();
        assert!(d.re.is_finite() && d.im.is_finite());
    }

    #[test]
    fn q_inverse_round_trip_and_domain() {
        let t = q_cauchy(cx(9.0, 0.0), &AspectRatios::new(1.0, 1.0).unwrap())
            .unwrap()
            .re;
        let back = q_cauchy_inverse(t, 1.0).unwrap();
        assert!((back - 9.0).abs() < 1e-9);
        assert!(matches!(q_cauchy_inverse(0.0, 1.0), Err(Error::Pole(_))));
        // radicand 1 - 4t turns negative past the branch point t = 1/4
        assert!(q_cauchy_inverse(0.3, 1.0).is_err());
        // small t behaves like 1/t
        let z = q_cauchy_inverse(1e-6, 1.0).unwrap();
        assert!(z > 1e5);
    }

    #[test]
    fn q_support_edge_known_value() {
        // rho = zeta = 1: discriminant z^4 (4 z - 27), edge exactly 27/4.
        let ratios = AspectRatios::new(1.0, 1.0).unwrap();
        let edge = q_support_right_edge(&ratios).unwrap();
        assert!((edge - 6.75).abs() < 1e-9, "edge = {edge}");
        let enc = q_support_enclosure(&ratios).unwrap();
        assert_eq!(enc.left, 0.0);
        assert!((enc.right - 6.75).abs() < 1e-9);
    }

    #[test]
    fn r_transform_symmetry_and_pole() {
        let zeta = 1.0;
        let pairs = [
            (cx(0.05, 0.01), cx(-0.07, 0.02)),
            (cx(0.1, 0.0), cx(0.02, -0.03)),
        ];
        for &(x, y) in &pairs {
            let rxy = second_order_r_transform(x, y, zeta).unwrap();
            let ryx = second_order_r_transform(y, x, zeta).unwrap();
            assert!((rxy - ryx).norm() < 1e-10 * (1.0 + rxy.norm()));
        }
        assert!(matches!(
            second_order_r_transform(cx(0.0, 0.0), cx(0.1, 0.0), zeta),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn r_transform_diagonal_limit_is_consistent() {
        let zeta = 0.6;
        let x = cx(0.08, 0.0);
        let diag = second_order_r_transform(x, x, zeta).unwrap();
        let off = second_order_r_transform(x * 1.02, x * 0.98, zeta).unwrap();
        assert!(
            (diag - off).norm() < 1e-2 * (1.0 + diag.norm()),
            "diag {diag} vs off {off}"
        );
    }

    #[test]
    fn r_transform_leading_coefficient_is_zeta() {
        for &zeta in &[0.5f64, 1.0, 2.0] {
            let coeffs = r_transform_coefficients_numeric(zeta, 2, 32).unwrap();
            assert!(
                (coeffs[&(1, 1)] - zeta).abs() < 1e-9 * (1.0 + zeta),
                "zeta={zeta}: {}",
                coeffs[&(1, 1)]
            );
        }
    }

    #[test]
    fn second_order_cauchy_symmetry() {
        let ratios = AspectRatios::new(1.0, 1.0).unwrap();
        let (x, y) = (cx(9.0, 1.0), cx(-3.0, -0.5));
        let gxy = second_order_cauchy(x, y, &ratios).unwrap();
        let gyx = second_order_cauchy(y, x, &ratios).unwrap();
        assert!((gxy - gyx).norm() < 1e-10 * (1.0 + gxy.norm()));
    }

    #[test]
    fn log_term_alone_has_the_wishart_kernel_shape() {
        let ratios = AspectRatios::new(1.0, 1.0).unwrap();
        let (x, y) = (cx(8.0, 0.5), cx(10.0, -0.25));
        let term = second_order_log_term(x, y, &ratios).unwrap();
        let gx = q_cauchy(x, &ratios).unwrap();
        let gy = q_cauchy(y, &ratios).unwrap();
        let gpx = q_cauchy_derivative(x, &ratios).unwrap();
        let gpy = q_cauchy_derivative(y, &ratios).unwrap();
        let expect = gpx * gpy / ((gx - gy) * (gx - gy)) - 1.0 / ((x - y) * (x - y));
        assert!((term - expect).norm() < 1e-12 * (1.0 + expect.norm()));
    }
}
