//! Gamma, reciprocal gamma, Pochhammer and beta functions of a matrix.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::matcore::{
    self, commutator_rel, CMatrix, Gamma, ReciprocalGamma, ScaledReciprocalGamma,
    SpectralDecomposition, DEFAULT_COND_THRESHOLD,
};
use crate::{quad, scalar};

/// Eigenvalues closer than this to 0, -1, -2, ... count as gamma poles.
pub const POLE_TOL: f64 = 1e-12;

/// Extreme real parts of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBounds {
    /// `max Re λ`
    pub alpha: f64,
    /// `min Re λ`
    pub beta: f64,
}

impl SpectralBounds {
    pub fn is_positive_stable(&self) -> bool {
        self.beta > 0.0
    }
}

pub fn spectral_bounds(a: &CMatrix) -> Result<SpectralBounds> {
    let ev = matcore::eigenvalues(a)?;
    let alpha = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let beta = ev.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    Ok(SpectralBounds { alpha, beta })
}

pub fn is_positive_stable(a: &CMatrix) -> Result<bool> {
    Ok(spectral_bounds(a)?.is_positive_stable())
}

/// Precondition error unless `‖xy − yx‖_F ≤ tol ‖x‖_F ‖y‖_F`.
pub fn require_commuting(x: &CMatrix, y: &CMatrix, tol: f64, what: &str) -> Result<()> {
    let c = commutator_rel(x, y);
    if c <= tol {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{what} must commute (relative commutator {c:.3e} > {tol:.1e})"
        )))
    }
}

fn pole_check(d: &SpectralDecomposition) -> Result<()> {
    for z in d.eigenvalues() {
        if scalar::pole_distance(z) <= POLE_TOL {
            return Err(Error::Domain(format!("gamma has a pole at eigenvalue {z}")));
        }
    }
    Ok(())
}

/// `Γ(A)`. Fails when an eigenvalue sits on a pole.
pub fn gamma_m(a: &CMatrix) -> Result<CMatrix> {
    let d = matcore::decompose(a, DEFAULT_COND_THRESHOLD)?;
    pole_check(&d)?;
    d.apply(&Gamma)
}

/// `Γ⁻¹(A)`, defined for every `A`.
pub fn rgamma_m(a: &CMatrix) -> Result<CMatrix> {
    matcore::matfun(a, &ReciprocalGamma)
}

/// `Γ⁻¹(A) = M e^{s}` with `M` normalized to unit Frobenius norm (or zero).
///
/// The scale comes from the largest `|1/Γ(λ)|` over the spectrum, so neither
/// huge nor tiny values leave the floating-point range.
pub fn rgamma_scaled(a: &CMatrix) -> Result<(CMatrix, f64)> {
    let d = matcore::decompose(a, DEFAULT_COND_THRESHOLD)?;
    let shift = d
        .eigenvalues()
        .into_iter()
        .filter_map(|z| scalar::ln_rgamma(z).map(|l| l.re))
        .fold(f64::NEG_INFINITY, f64::max);
    let shift = if shift.is_finite() { shift } else { 0.0 };
    let m = d.apply(&ScaledReciprocalGamma { shift })?;
    let nrm = matcore::fro_norm(&m);
    if !nrm.is_finite() {
        return Err(Error::Numeric(format!(
            "reciprocal gamma overflowed for a matrix with spectrum {:?}",
            d.eigenvalues()
        )));
    }
    if nrm == 0.0 {
        return Ok((m, 0.0));
    }
    Ok((m / C64::new(nrm, 0.0), shift + nrm.ln()))
}

/// `(A)_n = A (A+I) ... (A+(n-1)I)`, `(A)_0 = I`.
pub fn pochhammer(a: &CMatrix, n: usize) -> CMatrix {
    let r = a.nrows();
    let mut p = matcore::identity(r);
    for k in 0..n {
        p *= a + matcore::scalar_matrix(r, C64::new(k as f64, 0.0));
    }
    p
}

/// How `beta_m` evaluates the integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaPath {
    /// `Γ(A) Γ(B) Γ⁻¹(A+B)`, requires `AB = BA`.
    GammaProduct,
    /// Direct quadrature of `∫_0^1 t^{A-I} (1-t)^{B-I} dt`.
    Quadrature,
}

/// `𝔅(A, B)`.
pub fn beta_m(a: &CMatrix, b: &CMatrix, path: BetaPath) -> Result<CMatrix> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension("beta arguments differ in size".into()));
    }
    for (name, m) in [("A", a), ("B", b)] {
        let sb = spectral_bounds(m)?;
        if !sb.is_positive_stable() {
            return Err(Error::Domain(format!(
                "{name} is not positive stable (min Re eigenvalue {})",
                sb.beta
            )));
        }
    }
    match path {
        BetaPath::GammaProduct => {
            require_commuting(a, b, matcore::DEFAULT_TOL, "A and B")?;
            let sum = a + b;
            Ok(gamma_m(a)? * gamma_m(b)? * rgamma_m(&sum)?)
        }
        BetaPath::Quadrature => quad::beta_quadrature(a, b),
    }
}
