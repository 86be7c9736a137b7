//! Dense complex matrices and scalar-to-matrix functional calculus.
//!
//! `f(M)` is evaluated through the eigendecomposition `V diag(f(λ)) V⁻¹` when the
//! eigenvector basis is well conditioned, and through a block Schur-Parlett
//! recurrence otherwise (defective or nearly defective inputs).

mod analytic;
mod parlett;

pub use analytic::{
    cauchy_taylor, AnalyticFn, Entire, ExpScaled, Gamma, ReciprocalGamma, ScaledReciprocalGamma,
};

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Square complex dense matrix.
pub type CMatrix = DMatrix<C64>;

/// Eigenvector condition number above which the Schur path is used.
pub const DEFAULT_COND_THRESHOLD: f64 = 1e6;

/// Default relative tolerance for matrix equality and residual checks.
pub const DEFAULT_TOL: f64 = 1e-10;

pub fn identity(r: usize) -> CMatrix {
    CMatrix::identity(r, r)
}

/// `c·I` of size `r`.
pub fn scalar_matrix(r: usize, c: C64) -> CMatrix {
    CMatrix::identity(r, r) * c
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| C64::new(v, 0.0)),
    ))
}

/// Complex diagonal matrix.
pub fn diag_c(values: &[C64]) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_column_slice(values))
}

/// Real matrix from row-major data.
pub fn real_matrix(rows: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_iterator(
        rows,
        data.len() / rows,
        // from_iterator is column-major
        (0..data.len()).map(|k| {
            let (col, row) = (k / rows, k % rows);
            C64::new(data[row * (data.len() / rows) + col], 0.0)
        }),
    )
}

pub fn fro_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral norm, computed from the largest singular value.
pub fn two_norm_estimate(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.iter().all(|z| z.norm() == 0.0) {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Smallest singular value.
pub fn min_singular_value(m: &CMatrix) -> f64 {
    m.clone().singular_values().min()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `‖x − y‖_F ≤ tol · max(1, ‖x‖_F)`
pub fn approx_eq(x: &CMatrix, y: &CMatrix, tol: f64) -> bool {
    x.shape() == y.shape() && fro_norm(&(x - y)) <= tol * fro_norm(x).max(1.0)
}

/// `‖x − y‖_F / max(1, ‖x‖_F)`
pub fn rel_residual(x: &CMatrix, y: &CMatrix) -> f64 {
    fro_norm(&(x - y)) / fro_norm(x).max(1.0)
}

/// `‖xy − yx‖_F / (‖x‖_F ‖y‖_F)`, zero when either factor vanishes.
pub fn commutator_rel(x: &CMatrix, y: &CMatrix) -> f64 {
    let denom = fro_norm(x) * fro_norm(y);
    if denom == 0.0 {
        return 0.0;
    }
    fro_norm(&(x * y - y * x)) / denom
}

pub fn commutes(x: &CMatrix, y: &CMatrix, tol: f64) -> bool {
    commutator_rel(x, y) <= tol
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    m.clone()
        .try_inverse()
        .filter(is_finite)
        .ok_or_else(|| Error::Numeric("matrix is singular".into()))
}

/// Eigenstructure of a square matrix in one of two forms.
#[derive(Debug, Clone)]
pub enum SpectralDecomposition {
    /// `M = V diag(λ) V⁻¹` with a well-conditioned `V`.
    Diagonalizable {
        v: CMatrix,
        eigenvalues: Vec<C64>,
        v_inv: CMatrix,
        cond: f64,
    },
    /// Complex Schur form `M = Q T Q^H`. `cond` is the eigenvector condition
    /// estimate that ruled out the diagonal path (possibly infinite).
    Triangular { q: CMatrix, t: CMatrix, cond: f64 },
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> Vec<C64> {
        match self {
            Self::Diagonalizable { eigenvalues, .. } => eigenvalues.clone(),
            Self::Triangular { t, .. } => t.diagonal().iter().copied().collect(),
        }
    }

    pub fn condition(&self) -> f64 {
        match self {
            Self::Diagonalizable { cond, .. } | Self::Triangular { cond, .. } => *cond,
        }
    }

    pub fn is_diagonalizable(&self) -> bool {
        matches!(self, Self::Diagonalizable { .. })
    }

    /// Rebuilds the matrix from its factors.
    pub fn reconstruct(&self) -> CMatrix {
        match self {
            Self::Diagonalizable {
                v,
                eigenvalues,
                v_inv,
                ..
            } => v * diag_c(eigenvalues) * v_inv,
            Self::Triangular { q, t, .. } => q * t * q.adjoint(),
        }
    }

    /// Applies `f` to the decomposed matrix.
    pub fn apply(&self, f: &dyn AnalyticFn) -> Result<CMatrix> {
        match self {
            Self::Diagonalizable {
                v,
                eigenvalues,
                v_inv,
                ..
            } => {
                let fl = eigenvalues
                    .iter()
                    .map(|&z| {
                        f.value(z).ok_or_else(|| {
                            Error::Domain(format!("function undefined at eigenvalue {z}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(v * diag_c(&fl) * v_inv)
            }
            Self::Triangular { q, t, .. } => parlett::schur_parlett(q, t, f),
        }
    }
}

fn is_upper_triangular(m: &CMatrix) -> bool {
    (0..m.nrows()).all(|i| (0..i).all(|j| m[(i, j)] == C64::new(0.0, 0.0)))
}

fn schur_pair(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = m.nrows();
    if is_upper_triangular(m) {
        return Ok((identity(n), m.clone()));
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or_else(|| {
        Error::Eigen(format!(
            "Schur iteration did not converge for the {n}x{n} matrix {m}"
        ))
    })?;
    let (q, mut t) = schur.unpack();
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    let scale = fro_norm(m).max(f64::MIN_POSITIVE);
    if fro_norm(&(&q * &t * q.adjoint() - m)) > 1e-10 * scale {
        return Err(Error::Eigen(format!(
            "Schur factors fail to reconstruct the {n}x{n} matrix {m}"
        )));
    }
    Ok((q, t))
}

/// Eigenvectors of an upper triangular matrix by back substitution, one unit
/// column per diagonal entry. Nearly defective pairs produce huge entries,
/// which the caller sees as a large condition number.
fn triangular_eigenvectors(t: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let smin = (f64::EPSILON * fro_norm(t)).max(f64::MIN_POSITIVE);
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in i + 1..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = C64::new(smin, 0.0);
            }
            y[(i, k)] = (-s).fdiv(d);
        }
        let nrm = y.column(k).norm();
        if nrm.is_finite() && nrm > 0.0 {
            y.column_mut(k).unscale_mut(nrm);
        }
    }
    y
}

/// Eigen- or Schur decomposition of `m`.
///
/// Returns the diagonalizable kind when the eigenvector matrix has condition
/// below `cond_threshold` and reconstructs `m` to `1e-10` relative accuracy;
/// the triangular Schur kind otherwise.
pub fn decompose(m: &CMatrix, cond_threshold: f64) -> Result<SpectralDecomposition> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !is_finite(m) {
        return Err(Error::Numeric(format!(
            "matrix has non-finite entries: {m}"
        )));
    }
    let (q, t) = schur_pair(m)?;
    let y = triangular_eigenvectors(&t);
    let v = &q * y;
    let cond = if is_finite(&v) {
        let sv = v.clone().singular_values();
        let smin = sv.min();
        if smin > 0.0 {
            sv.max() / smin
        } else {
            f64::INFINITY
        }
    } else {
        f64::INFINITY
    };
    if cond < cond_threshold {
        if let Ok(v_inv) = inverse(&v) {
            let eigenvalues: Vec<C64> = t.diagonal().iter().copied().collect();
            let rebuilt = &v * diag_c(&eigenvalues) * &v_inv;
            let scale = fro_norm(m).max(f64::MIN_POSITIVE);
            if fro_norm(&(rebuilt - m)) <= 1e-10 * scale {
                return Ok(SpectralDecomposition::Diagonalizable {
                    v,
                    eigenvalues,
                    v_inv,
                    cond,
                });
            }
        }
    }
    Ok(SpectralDecomposition::Triangular { q, t, cond })
}

/// `f(m)` with the default decomposition policy.
pub fn matfun(m: &CMatrix, f: &dyn AnalyticFn) -> Result<CMatrix> {
    decompose(m, DEFAULT_COND_THRESHOLD)?.apply(f)
}

/// Eigenvalues of `m`.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    Ok(schur_pair(m)?.1.diagonal().iter().copied().collect())
}

/// `t^A = exp((ln t) A)` for real `t > 0`.
pub fn matpow_base(t: f64, a: &CMatrix) -> Result<CMatrix> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "matrix power base must be positive, got {t}"
        )));
    }
    if t == 1.0 {
        return Ok(identity(a.nrows()));
    }
    matfun(
        a,
        &ExpScaled {
            rate: C64::new(t.ln(), 0.0),
        },
    )
}

pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    matfun(
        a,
        &ExpScaled {
            rate: C64::new(1.0, 0.0),
        },
    )
}
