//! Fresnel cosine integral `C(x) = ∫₀ˣ cos(π u² / 2) du`.
//!
//! Power series for `|x| <= 2`; above that the continued fraction of the
//! complementary error function (modified Lentz), which converges quickly
//! once `π x²` is moderately large.

use std::f64::consts::PI;

use num_complex::Complex64;

const SERIES_LIMIT: f64 = 2.0;
const EPS: f64 = 1e-16;
const MAX_ITER: usize = 200;
const TINY: f64 = 1e-300;

pub fn fresnel_c(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_infinite() {
        return 0.5f64.copysign(x);
    }
    let ax = x.abs();
    let c = if ax <= SERIES_LIMIT {
        series(ax)
    } else {
        continued_fraction(ax).re
    };
    c.copysign(x)
}

/// `C(x) = x Σ (-1)^n s^{2n} / ((2n)! (4n + 1))`, `s = π x² / 2`
fn series(x: f64) -> f64 {
    let s = 0.5 * PI * x * x;
    let mut power = x;
    let mut sum = x;
    for n in 1..MAX_ITER {
        let k = (2 * n) as f64;
        power *= -s * s / ((k - 1.0) * k);
        let term = power / (2.0 * k + 1.0);
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    sum
}

/// Returns `C(x) + i S(x)` for `x > 0`.
fn continued_fraction(x: f64) -> Complex64 {
    let pix2 = PI * x * x;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0;
    for _ in 1..MAX_ITER {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += 4.0;
        d = (d * a + b).inv();
        cc = b + cc.inv() * a;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    Complex64::new(0.5, 0.5)
        * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 0.5 * pix2) * h)
}
