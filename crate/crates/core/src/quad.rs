//! Gauss-Jacobi rules on (0, 1) and composite rules for endpoint-singular
//! matrix integrands.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matcore::{self, CMatrix, ExpScaled, SpectralDecomposition};
use crate::scalar;

/// Gauss rule for the weight `t^a (1-t)^b` on (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiQuadRule {
    pub exponent_left: f64,
    pub exponent_right: f64,
    /// Ascending, inside (0, 1).
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl JacobiQuadRule {
    /// `Σ w_k f(t_k)`, summed in node order.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    /// Matrix-valued version of [`integrate`](Self::integrate).
    pub fn integrate_matrix(
        &self,
        mut f: impl FnMut(f64) -> Result<CMatrix>,
    ) -> Result<Option<CMatrix>> {
        let mut acc: Option<CMatrix> = None;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(t)? * C64::new(w, 0.0);
            acc = Some(match acc {
                Some(a) => a + v,
                None => v,
            });
        }
        Ok(acc)
    }
}

/// Golub-Welsch construction of the `n`-point Gauss rule for `t^a (1-t)^b`.
///
/// On `[-1, 1]` with `x = 2t - 1` the weight is `(1-x)^b (1+x)^a`, i.e. the
/// Jacobi weight with `alpha = b`, `beta = a`.
pub fn jacobi_rule(a: f64, b: f64, n: usize) -> Result<JacobiQuadRule> {
    if !(a > -1.0) || !(b > -1.0) {
        return Err(Error::Domain(format!(
            "Jacobi exponents must exceed -1, got ({a}, {b})"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Jacobi rule needs at least one node".into(),
        ));
    }
    let (al, be) = (b, a);
    let ab = al + be;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        jac[(k, k)] = if k == 0 {
            (be - al) / (ab + 2.0)
        } else {
            (be * be - al * al) / (s * (s + 2.0))
        };
        if k + 1 < n {
            let m = kf + 1.0;
            let s = 2.0 * m + ab;
            let b2 = if k == 0 {
                4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * m * (m + al) * (m + be) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = b2.sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let mu0 = scalar::beta_real(a + 1.0, b + 1.0);
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let x = eig.eigenvalues[k];
            let v0 = eig.eigenvectors[(0, k)];
            (0.5 * (1.0 + x), mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(JacobiQuadRule {
        exponent_left: a,
        exponent_right: b,
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Gauss-Legendre rule mapped to `[lo, hi]` as (node, weight) pairs.
pub(crate) fn legendre_on(rule: &JacobiQuadRule, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let h = hi - lo;
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| (lo + h * t, h * w))
        .collect()
}

/// Ratio between consecutive geometric panel boundaries.
pub(crate) const GRADE: f64 = 0.25;
const LEVELS: usize = 12;
const BETA_PANEL_NODES: usize = 24;
/// Sample count of the polynomial fit on the innermost panels.
const FIT_POINTS: usize = 8;

/// `t^M` for a fixed matrix `M`, reusing one decomposition for every `t`.
pub(crate) struct PowerMap {
    decomposition: SpectralDecomposition,
}

impl PowerMap {
    pub(crate) fn new(m: &CMatrix) -> Result<Self> {
        Ok(Self {
            decomposition: matcore::decompose(m, matcore::DEFAULT_COND_THRESHOLD)?,
        })
    }

    pub(crate) fn at(&self, t: f64) -> Result<CMatrix> {
        self.decomposition.apply(&ExpScaled {
            rate: C64::new(t.ln(), 0.0),
        })
    }
}

/// Coefficients `b_k` with `f(s) ≈ Σ b_k (s/h)^k` on `[0, h]`, from samples at
/// Chebyshev points.
fn poly_fit(mut f: impl FnMut(f64) -> Result<CMatrix>, h: f64) -> Result<Vec<CMatrix>> {
    let m = FIT_POINTS;
    let u: Vec<f64> = (0..m)
        .map(|j| 0.5 * (1.0 - (std::f64::consts::PI * (j as f64 + 0.5) / m as f64).cos()))
        .collect();
    let vander = DMatrix::<f64>::from_fn(m, m, |j, k| u[j].powi(k as i32));
    let vinv = vander
        .try_inverse()
        .ok_or_else(|| Error::Numeric("singular fit matrix".into()))?;
    let samples = u.iter().map(|&x| f(h * x)).collect::<Result<Vec<_>>>()?;
    Ok((0..m)
        .map(|k| {
            samples
                .iter()
                .enumerate()
                .fold(samples[0].map(|_| C64::new(0.0, 0.0)), |acc, (j, v)| {
                    acc + v * C64::new(vinv[(k, j)], 0.0)
                })
        })
        .collect())
}

/// `∫_0^h L(s) s^{M−I} R(s) ds` for smooth `L`, `R` given by their fits.
fn endpoint_panel(
    left: &[CMatrix],
    m: &CMatrix,
    right: Option<&[CMatrix]>,
    h: f64,
) -> Result<CMatrix> {
    let r = m.nrows();
    let id = matcore::identity(r);
    let hm = PowerMap::new(m)?.at(h)?;
    let one = [id.clone()];
    let right = right.unwrap_or(&one);
    // ∫_0^h (s/h)^j s^{M−I} ds = (M + jI)⁻¹ h^M
    let span = left.len() + right.len() - 1;
    let mut g = Vec::with_capacity(span);
    for j in 0..span {
        g.push(matcore::inverse(&(m + &id * C64::new(j as f64, 0.0)))? * &hm);
    }
    let mut total = CMatrix::zeros(r, r);
    for (k, a) in left.iter().enumerate() {
        for (l, b) in right.iter().enumerate() {
            total += a * &g[k + l] * b;
        }
    }
    Ok(total)
}

/// `∫_0^1 F(t) t^{C−I} (1−t)^{E−I} dt` for smooth `F` and positive stable `C`, `E`
/// (no commutation assumed).
///
/// `[h, 1−h]` is covered by geometrically graded panels toward both ends, each
/// with `panel_nodes` Gauss-Legendre points. On `[0, h]` and `[1−h, 1]` the smooth
/// factors are replaced by polynomial fits and the powers integrated exactly.
pub(crate) fn graded_kernel_integral(
    mut f: impl FnMut(f64) -> Result<CMatrix>,
    c: &CMatrix,
    e: &CMatrix,
    panel_nodes: usize,
) -> Result<CMatrix> {
    let r = c.nrows();
    let id = matcore::identity(r);
    let left = PowerMap::new(&(c - &id))?;
    let right = PowerMap::new(&(e - &id))?;
    let gl = jacobi_rule(0.0, 0.0, panel_nodes)?;

    let mut total = CMatrix::zeros(r, r);
    let mut hi = 0.5;
    for _ in 0..LEVELS {
        let lo = hi * GRADE;
        for (s, w) in legendre_on(&gl, lo, hi) {
            let w = C64::new(w, 0.0);
            total += f(s)? * left.at(s)? * right.at(1.0 - s)? * w;
            let t = 1.0 - s;
            total += f(t)? * left.at(t)? * right.at(s)? * w;
        }
        hi = lo;
    }
    let h = hi;

    let near_zero_l = poly_fit(&mut f, h)?;
    let near_zero_r = poly_fit(|s| right.at(1.0 - s), h)?;
    total += endpoint_panel(&near_zero_l, c, Some(&near_zero_r), h)?;
    let near_one = poly_fit(|s| Ok(f(1.0 - s)? * left.at(1.0 - s)?), h)?;
    total += endpoint_panel(&near_one, e, None, h)?;
    Ok(total)
}

/// `∫_0^1 t^{A-I} (1-t)^{B-I} dt` for positive stable `A`, `B` (not necessarily
/// commuting).
pub fn beta_quadrature(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let id = matcore::identity(a.nrows());
    graded_kernel_integral(|_| Ok(id.clone()), a, b, BETA_PANEL_NODES)
}
