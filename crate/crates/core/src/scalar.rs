//! Scalar gamma-family functions on the complex plane.
//!
//! Lanczos approximation (g = 7, nine coefficients) for `Re z >= 1/2`, reflection
//! through `sin(pi z)` below that. The reciprocal gamma is entire and returns an
//! exact zero at the non-positive integers.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// True when `z` is exactly one of 0, -1, -2, ...
pub fn is_gamma_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Distance from `z` to the nearest pole of the gamma function.
pub fn pole_distance(z: C64) -> f64 {
    let k = z.re.round().min(0.0);
    (z - C64::new(k, 0.0)).norm()
}

/// `sin(pi z)` with the real part reduced first, so integers give exact zeros.
pub fn sinpi(z: C64) -> C64 {
    let n = z.re.round();
    let r = z.re - n;
    let sign = if (n as i64).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let (s, c) = (PI * r).sin_cos();
    let y = PI * z.im;
    C64::new(sign * s * y.cosh(), sign * c * y.sinh())
}

fn lanczos_series(zm1: C64) -> C64 {
    let mut acc = C64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &p) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += p / (zm1 + i as f64);
    }
    acc
}

/// Log-gamma valid for `Re z >= 1/2` (principal branch of each factor).
fn ln_gamma_right(z: C64) -> C64 {
    let zm1 = z - 1.0;
    let t = zm1 + LANCZOS_G + 0.5;
    (zm1 + 0.5) * t.ln() - t + lanczos_series(zm1).ln() + LN_SQRT_2PI
}

/// Gamma function. `None` at the poles.
pub fn gamma(z: C64) -> Option<C64> {
    if is_gamma_pole(z) {
        return None;
    }
    if z.re < 0.5 {
        // reflection: Γ(z) Γ(1-z) = π / sin(πz)
        let g = gamma(1.0 - z)?;
        Some(PI / (sinpi(z) * g))
    } else {
        Some(ln_gamma_right(z).exp())
    }
}

/// Logarithm of the gamma function, on some branch. Only `exp` of the result is
/// meaningful across branch cuts. `None` at the poles.
pub fn ln_gamma(z: C64) -> Option<C64> {
    if is_gamma_pole(z) {
        return None;
    }
    if z.re < 0.5 {
        Some(C64::new(PI.ln(), 0.0) - sinpi(z).ln() - ln_gamma_right(1.0 - z))
    } else {
        Some(ln_gamma_right(z))
    }
}

/// Reciprocal gamma function, entire.
pub fn rgamma(z: C64) -> C64 {
    if is_gamma_pole(z) {
        return C64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        sinpi(z) * ln_gamma_right(1.0 - z).exp() / PI
    } else {
        (-ln_gamma_right(z)).exp()
    }
}

/// `ln(1/Γ(z))`, or `None` where `1/Γ(z)` vanishes.
pub fn ln_rgamma(z: C64) -> Option<C64> {
    ln_gamma(z).map(|l| -l)
}

/// Real log-gamma for `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma_right(C64::new(x, 0.0)).re
}

/// Real beta function `B(a, b)` for `a, b > 0`.
pub fn beta_real(a: f64, b: f64) -> f64 {
    (ln_gamma_real(a) + ln_gamma_real(b) - ln_gamma_real(a + b)).exp()
}

/// Natural log of `n!`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma_real(n as f64 + 1.0)
    }
}
