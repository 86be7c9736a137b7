//! Scalar analytic functions that can be lifted to matrices.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::scalar;

/// Number of sample points on the Cauchy circle used for Taylor coefficients.
const CAUCHY_POINTS: usize = 64;

/// A scalar function analytic on a neighbourhood of the spectrum it is applied to.
///
/// The Schur-Parlett path needs Taylor coefficients around cluster centres. The
/// default implementation gets them from the trapezoid rule on a circle of the
/// given radius, which is spectrally accurate for analytic integrands.
pub trait AnalyticFn {
    /// `None` when the function is undefined at `z`.
    fn value(&self, z: C64) -> Option<C64>;

    /// Distance from `z` to the nearest singularity.
    fn analytic_radius(&self, _z: C64) -> f64 {
        f64::INFINITY
    }

    /// Taylor coefficients `c_0..c_{count-1}` of the expansion around `center`.
    fn taylor(&self, center: C64, radius: f64, count: usize) -> Option<Vec<C64>> {
        cauchy_taylor(|z| self.value(z), center, radius, count)
    }
}

/// Taylor coefficients from samples on the circle `|z - center| = radius`.
pub fn cauchy_taylor(
    f: impl Fn(C64) -> Option<C64>,
    center: C64,
    radius: f64,
    count: usize,
) -> Option<Vec<C64>> {
    assert!(
        count < CAUCHY_POINTS,
        "too many Taylor coefficients requested"
    );
    let samples = (0..CAUCHY_POINTS)
        .map(|j| {
            let w = C64::from_polar(1.0, 2.0 * PI * j as f64 / CAUCHY_POINTS as f64);
            f(center + radius * w)
        })
        .collect::<Option<Vec<_>>>()?;
    let coeffs = (0..count)
        .map(|k| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, s) in samples.iter().enumerate() {
                let angle = -2.0 * PI * ((j * k) % CAUCHY_POINTS) as f64 / CAUCHY_POINTS as f64;
                acc += s * C64::from_polar(1.0, angle);
            }
            acc / (CAUCHY_POINTS as f64 * radius.powi(k as i32))
        })
        .collect();
    Some(coeffs)
}

/// Wraps any entire scalar function given as a closure.
pub struct Entire<F>(pub F);

impl<F: Fn(C64) -> C64> AnalyticFn for Entire<F> {
    fn value(&self, z: C64) -> Option<C64> {
        Some((self.0)(z))
    }
}

/// `z -> exp(rate * z)`. With `rate = ln t` this is `z -> t^z`.
#[derive(Debug, Clone, Copy)]
pub struct ExpScaled {
    pub rate: C64,
}

impl AnalyticFn for ExpScaled {
    fn value(&self, z: C64) -> Option<C64> {
        Some((self.rate * z).exp())
    }

    fn taylor(&self, center: C64, _radius: f64, count: usize) -> Option<Vec<C64>> {
        let mut c = (self.rate * center).exp();
        let mut out = Vec::with_capacity(count);
        for k in 0..count {
            out.push(c);
            c = c * self.rate / (k as f64 + 1.0);
        }
        Some(out)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Gamma;

impl AnalyticFn for Gamma {
    fn value(&self, z: C64) -> Option<C64> {
        scalar::gamma(z)
    }

    fn analytic_radius(&self, z: C64) -> f64 {
        scalar::pole_distance(z)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReciprocalGamma;

impl AnalyticFn for ReciprocalGamma {
    fn value(&self, z: C64) -> Option<C64> {
        Some(scalar::rgamma(z))
    }
}

/// `z -> exp(-shift) / Γ(z)`, used to keep reciprocal gammas of large
/// arguments inside the floating-point range.
#[derive(Debug, Clone, Copy)]
pub struct ScaledReciprocalGamma {
    pub shift: f64,
}

impl AnalyticFn for ScaledReciprocalGamma {
    fn value(&self, z: C64) -> Option<C64> {
        if z.norm() < 30.0 {
            Some(scalar::rgamma(z) * (-self.shift).exp())
        } else {
            Some(match scalar::ln_rgamma(z) {
                Some(l) => (l - self.shift).exp(),
                None => C64::new(0.0, 0.0),
            })
        }
    }
}
