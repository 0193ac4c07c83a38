//! Closed-form complex cubic solver with one Newton polish per root.
//!
//! Used for the resolvent cubic of the limiting spectral distribution and
//! for the mean/variance cubics of the asymptotic capacity statistics.

use num_complex::Complex64;

/// Evaluate `a z^3 + b z^2 + c z + d`.
pub fn eval(a: Complex64, b: Complex64, c: Complex64, d: Complex64, z: Complex64) -> Complex64 {
    ((a * z + b) * z + c) * z + d
}

/// Evaluate the derivative `3 a z^2 + 2 b z + c`.
pub fn eval_prime(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Complex64 {
    (3.0 * a * z + 2.0 * b) * z + c
}

fn newton_polish(
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    mut z: Complex64,
) -> Complex64 {
    for _ in 0..2 {
        let f = eval(a, b, c, d, z);
        let fp = eval_prime(a, b, c, z);
        if fp.norm() < 1e-300 {
            break;
        }
        let step = f / fp;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
    }
    z
}

/// All three roots of `a z^3 + b z^2 + c z + d = 0` with complex
/// coefficients, `a != 0`. Cardano in depressed form, the cube-root pair
/// chosen to avoid cancellation, then a Newton polish on each root.
pub fn solve(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> [Complex64; 3] {
    let shift = b / (3.0 * a);
    // w^3 + p w + q = 0 with z = w - shift
    let p = c / a - shift * shift * 3.0;
    let q = eval(a, b, c, d, -shift) / a;

    let half_q = 0.5 * q;
    let disc = half_q * half_q + (p / 3.0).powu(3);
    let s = disc.sqrt();
    // pick the larger-magnitude cube-root argument
    let u3 = if (-half_q + s).norm() >= (-half_q - s).norm() {
        -half_q + s
    } else {
        -half_q - s
    };

    let omega = Complex64::new(-0.5, 0.75f64.sqrt());
    let roots = if u3.norm() < 1e-280 {
        // p and q both ~ 0: triple root at the shift point
        [-shift, -shift, -shift]
    } else {
        let u = u3.cbrt();
        let mut out = [Complex64::default(); 3];
        let mut uk = u;
        for r in &mut out {
            *r = uk - p / (3.0 * uk) - shift;
            uk *= omega;
        }
        out
    };

    [
        newton_polish(a, b, c, d, roots[0]),
        newton_polish(a, b, c, d, roots[1]),
        newton_polish(a, b, c, d, roots[2]),
    ]
}

/// Roots of a cubic with real coefficients. Roots whose imaginary part is
/// negligible against the coefficient scale are snapped onto the real axis
/// and re-polished there.
pub fn solve_real(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 3] {
    let cx = |v: f64| Complex64::new(v, 0.0);
    let mut roots = solve(cx(a), cx(b), cx(c), cx(d));
    for r in &mut roots {
        if r.im.abs() <= 1e-9 * (1.0 + r.norm()) {
            let mut x = r.re;
            for _ in 0..3 {
                let f = ((a * x + b) * x + c) * x + d;
                let fp = (3.0 * a * x + 2.0 * b) * x + c;
                if fp.abs() < 1e-300 {
                    break;
                }
                x -= f / fp;
            }
            // keep the snap only if it actually is a real root
            let fx = ((a * x + b) * x + c) * x + d;
            let scale = a.abs() * x.abs().powi(3) + b.abs() * x * x + c.abs() * x.abs() + d.abs();
            if fx.abs() <= 1e-9 * (1.0 + scale) {
                *r = cx(x);
            }
        }
    }
    roots
}

/// Maximum over the best pairing of `|x_i - y_{sigma(i)}|` for two root
/// triples, i.e. the multiset distance.
pub fn multiset_distance(xs: &[Complex64; 3], ys: &[Complex64; 3]) -> f64 {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    PERMS
        .iter()
        .map(|p| {
            (0..3)
                .map(|i| (xs[i] - ys[p[i]]).norm())
                .fold(0.0f64, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}
