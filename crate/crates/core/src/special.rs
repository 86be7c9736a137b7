//! Classical functions and polynomials written as parameter sets of the one
//! series, with outer factors and a change of variable.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gammakit::{gamma_m, pochhammer};
use crate::matcore::{identity, scalar_matrix, CMatrix};
use crate::scalar;
use crate::series::{self, EvalResult, ParameterSet, SeriesOptions};

/// Change of variable applied to the user argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ArgumentMap {
    Identity,
    /// `z = scale·x + offset`
    Affine {
        scale: f64,
        offset: f64,
    },
    /// `z = x^k`
    Power(u32),
}

impl ArgumentMap {
    pub fn apply(&self, x: C64) -> C64 {
        match *self {
            Self::Identity => x,
            Self::Affine { scale, offset } => x * scale + offset,
            Self::Power(k) => x.powu(k),
        }
    }
}

impl fmt::Display for ArgumentMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "z = x"),
            Self::Affine { scale, offset } => write!(f, "z = {scale}*x + {offset}"),
            Self::Power(k) => write!(f, "z = x^{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecialForm {
    pub params: ParameterSet,
    pub pre_factor: CMatrix,
    pub post_factor: CMatrix,
    pub argument_map: ArgumentMap,
    pub label: String,
}

impl SpecialForm {
    fn plain(params: ParameterSet, label: &str) -> Self {
        let id = identity(params.dim());
        Self {
            params,
            pre_factor: id.clone(),
            post_factor: id,
            argument_map: ArgumentMap::Identity,
            label: label.to_string(),
        }
    }

    /// `pre · R(map(x)) · post`, diagnostics from the underlying evaluation.
    pub fn evaluate(&self, x: C64, opts: &SeriesOptions) -> Result<EvalResult> {
        let z = self.argument_map.apply(x);
        let mut r = series::eval(&self.params, z, opts)?;
        r.value = &self.pre_factor * r.value * &self.post_factor;
        Ok(r)
    }
}

fn infer_dim(mats: &[&[CMatrix]]) -> Result<usize> {
    mats.iter()
        .flat_map(|m| m.iter())
        .map(|m| m.nrows())
        .next()
        .ok_or_else(|| {
            Error::InvalidArgument("cannot infer the matrix size from empty parameter lists".into())
        })
}

/// `Σ (C₁)ₙ…(C_{p−1})ₙ (D₁)ₙ⁻¹…(D_q)ₙ⁻¹ zⁿ/n!`
pub fn hypergeometric_pfq(c: &[CMatrix], d: &[CMatrix]) -> Result<SpecialForm> {
    let r = infer_dim(&[c, d])?;
    let mut cs = c.to_vec();
    cs.push(identity(r));
    let p = ParameterSet::new(identity(r), identity(r), cs, d.to_vec())?;
    Ok(SpecialForm::plain(p, "hypergeometric"))
}

/// `₂F₁(A₁, A₂; C; z)`
pub fn hyp2f1(a1: &CMatrix, a2: &CMatrix, c: &CMatrix) -> Result<SpecialForm> {
    let mut f = hypergeometric_pfq(&[a1.clone(), a2.clone()], std::slice::from_ref(c))?;
    f.label = "hyp2f1".into();
    Ok(f)
}

/// `₁F₁(A₁; C; z)`
pub fn hyp1f1(a1: &CMatrix, c: &CMatrix) -> Result<SpecialForm> {
    let mut f = hypergeometric_pfq(std::slice::from_ref(a1), std::slice::from_ref(c))?;
    f.label = "hyp1f1".into();
    Ok(f)
}

/// `Σ Γ⁻¹(nA+B) (C₁)ₙ…(C_{p−1})ₙ (D₁)ₙ⁻¹…(D_q)ₙ⁻¹ zⁿ`
pub fn m_series(a: &CMatrix, b: &CMatrix, c: &[CMatrix], d: &[CMatrix]) -> Result<SpecialForm> {
    let mut cs = c.to_vec();
    cs.push(identity(a.nrows()));
    let p = ParameterSet::new(a.clone(), b.clone(), cs, d.to_vec())?;
    Ok(SpecialForm::plain(p, "m_series"))
}

/// `E_A(z) = Σ Γ⁻¹(nA+I) zⁿ`
pub fn mittag_leffler(a: &CMatrix) -> Result<SpecialForm> {
    let r = a.nrows();
    let p = ParameterSet::new(a.clone(), identity(r), vec![identity(r)], vec![])?;
    Ok(SpecialForm::plain(p, "mittag_leffler"))
}

/// `E_{A,B}(z) = Σ Γ⁻¹(nA+B) zⁿ`
pub fn mittag_leffler_2(a: &CMatrix, b: &CMatrix) -> Result<SpecialForm> {
    let p = ParameterSet::new(a.clone(), b.clone(), vec![identity(a.nrows())], vec![])?;
    Ok(SpecialForm::plain(p, "mittag_leffler_2"))
}

/// `E^C_{A,B}(z) = Σ Γ⁻¹(nA+B) (C)ₙ zⁿ/n!`
pub fn mittag_leffler_3(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> Result<SpecialForm> {
    let p = ParameterSet::new(a.clone(), b.clone(), vec![c.clone()], vec![])?;
    Ok(SpecialForm::plain(p, "mittag_leffler_3"))
}

/// `E^{C,D}_{A,B}(z) = Σ Γ⁻¹(nA+B) (C)ₙ (D)ₙ⁻¹ zⁿ`
pub fn mittag_leffler_4(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> Result<SpecialForm> {
    let p = ParameterSet::new(
        a.clone(),
        b.clone(),
        vec![c.clone(), identity(a.nrows())],
        vec![d.clone()],
    )?;
    Ok(SpecialForm::plain(p, "mittag_leffler_4"))
}

/// `J_A^B(z) = Σ Γ⁻¹(nA+B+I) (−z)ⁿ/n!`
pub fn bessel_maitland(a: &CMatrix, b: &CMatrix) -> Result<SpecialForm> {
    let r = a.nrows();
    let p = ParameterSet::new(a.clone(), b + identity(r), vec![], vec![])?;
    let mut f = SpecialForm::plain(p, "bessel_maitland");
    f.argument_map = ArgumentMap::Affine {
        scale: -1.0,
        offset: 0.0,
    };
    Ok(f)
}

fn kf(k: usize) -> C64 {
    C64::new(k as f64, 0.0)
}

/// `P_k^{(A,C)}(x) = (−1)^k/k! ₂R₁(A+C+(k+1)I, −kI; C+I | 0, C+I; (1+x)/2) Γ(C+(k+1)I)`
pub fn jacobi_poly(a: &CMatrix, c: &CMatrix, k: usize) -> Result<SpecialForm> {
    let r = a.nrows();
    let id = identity(r);
    let p = ParameterSet::new(
        CMatrix::zeros(r, r),
        c + &id,
        vec![
            a + c + scalar_matrix(r, kf(k + 1)),
            scalar_matrix(r, -kf(k)),
        ],
        vec![c + &id],
    )?;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let pre = scalar_matrix(r, C64::new(sign * (-scalar::ln_factorial(k)).exp(), 0.0));
    Ok(SpecialForm {
        post_factor: gamma_m(&(c + scalar_matrix(r, kf(k + 1))))?,
        params: p,
        pre_factor: pre,
        argument_map: ArgumentMap::Affine {
            scale: 0.5,
            offset: 0.5,
        },
        label: "jacobi".into(),
    })
}

const HALF_DOWN: ArgumentMap = ArgumentMap::Affine {
    scale: -0.5,
    offset: 0.5,
};

/// `P_k(x, D) = ₂R₁((k+1)I, −kI; D | 0, I; (1−x)/2)`
pub fn legendre_poly(d: &CMatrix, k: usize) -> Result<SpecialForm> {
    let r = d.nrows();
    let p = ParameterSet::new(
        CMatrix::zeros(r, r),
        identity(r),
        vec![scalar_matrix(r, kf(k + 1)), scalar_matrix(r, -kf(k))],
        vec![d.clone()],
    )?;
    let mut f = SpecialForm::plain(p, "legendre");
    f.argument_map = HALF_DOWN;
    Ok(f)
}

/// `C_k^D(x) = (2D)_k/k! ₂R₁(2D+kI, −kI; D+½I | 0, I; (1−x)/2)`
pub fn gegenbauer_poly(d: &CMatrix, k: usize) -> Result<SpecialForm> {
    let r = d.nrows();
    let two_d = d * C64::new(2.0, 0.0);
    let p = ParameterSet::new(
        CMatrix::zeros(r, r),
        identity(r),
        vec![&two_d + scalar_matrix(r, kf(k)), scalar_matrix(r, -kf(k))],
        vec![d + scalar_matrix(r, C64::new(0.5, 0.0))],
    )?;
    let pre = pochhammer(&two_d, k) * C64::new((-scalar::ln_factorial(k)).exp(), 0.0);
    let mut f = SpecialForm::plain(p, "gegenbauer");
    f.pre_factor = pre;
    f.argument_map = HALF_DOWN;
    Ok(f)
}

/// `Z^C_m(x; k) = Γ(C+(km+1)I)/m! ₁R₀(−mI | kI, C+I; x^k)`
pub fn konhauser_poly(c: &CMatrix, k: u32, m: usize) -> Result<SpecialForm> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "Konhauser index k must be >= 1".into(),
        ));
    }
    let r = c.nrows();
    let id = identity(r);
    let p = ParameterSet::new(
        scalar_matrix(r, C64::new(k as f64, 0.0)),
        c + &id,
        vec![scalar_matrix(r, -kf(m))],
        vec![],
    )?;
    let g = gamma_m(&(c + scalar_matrix(r, C64::new((k as usize * m + 1) as f64, 0.0))))?;
    let mut f = SpecialForm::plain(p, "konhauser");
    f.pre_factor = g * C64::new((-scalar::ln_factorial(m)).exp(), 0.0);
    f.argument_map = ArgumentMap::Power(k);
    Ok(f)
}

/// `L^C_m(x) = Z^C_m(x; 1)`
pub fn laguerre_poly(c: &CMatrix, m: usize) -> Result<SpecialForm> {
    let mut f = konhauser_poly(c, 1, m)?;
    f.label = "laguerre".into();
    Ok(f)
}

/// Names accepted by [`build_named`].
pub const NAMES: [&str; 15] = [
    "pfq",
    "hyp2f1",
    "hyp1f1",
    "m_series",
    "mittag_leffler",
    "mittag_leffler_2",
    "mittag_leffler_3",
    "mittag_leffler_4",
    "bessel_maitland",
    "jacobi",
    "legendre",
    "gegenbauer",
    "konhauser",
    "laguerre",
    "wiman",
];

fn nth<'a>(list: &'a [CMatrix], i: usize, what: &str, name: &str) -> Result<&'a CMatrix> {
    list.get(i).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "{name} needs {what}{} in the parameter file",
            i + 1
        ))
    })
}

/// Builds a named form from the matrices of a parameter file. Which fields are
/// read depends on the name:
///
/// | name | reads |
/// |------|-------|
/// | `pfq` | C, D |
/// | `hyp2f1` | C1, C2, D1 |
/// | `hyp1f1` | C1, D1 |
/// | `m_series` | A, B, C, D |
/// | `mittag_leffler` | A |
/// | `mittag_leffler_2`, `wiman` | A, B |
/// | `mittag_leffler_3` | A, B, C1 |
/// | `mittag_leffler_4` | A, B, C1, D1 |
/// | `bessel_maitland` | A, B |
/// | `jacobi` | A, C1, degree |
/// | `legendre`, `gegenbauer` | D1, degree |
/// | `konhauser` | C1, degree, k |
/// | `laguerre` | C1, degree |
pub fn build_named(
    name: &str,
    src: &ParameterSet,
    degree: Option<usize>,
    konhauser_k: u32,
) -> Result<SpecialForm> {
    let deg = || degree.ok_or_else(|| Error::InvalidArgument(format!("{name} needs a degree")));
    let (a, b, c, d) = (&src.a, &src.b, &src.c[..], &src.d[..]);
    match name {
        "pfq" => hypergeometric_pfq(c, d),
        "hyp2f1" => hyp2f1(
            nth(c, 0, "C", name)?,
            nth(c, 1, "C", name)?,
            nth(d, 0, "D", name)?,
        ),
        "hyp1f1" => hyp1f1(nth(c, 0, "C", name)?, nth(d, 0, "D", name)?),
        "m_series" => m_series(a, b, c, d),
        "mittag_leffler" => mittag_leffler(a),
        "mittag_leffler_2" | "wiman" => mittag_leffler_2(a, b),
        "mittag_leffler_3" => mittag_leffler_3(a, b, nth(c, 0, "C", name)?),
        "mittag_leffler_4" => mittag_leffler_4(a, b, nth(c, 0, "C", name)?, nth(d, 0, "D", name)?),
        "bessel_maitland" => bessel_maitland(a, b),
        "jacobi" => jacobi_poly(a, nth(c, 0, "C", name)?, deg()?),
        "legendre" => legendre_poly(nth(d, 0, "D", name)?, deg()?),
        "gegenbauer" => gegenbauer_poly(nth(d, 0, "D", name)?, deg()?),
        "konhauser" => konhauser_poly(nth(c, 0, "C", name)?, konhauser_k, deg()?),
        "laguerre" => laguerre_poly(nth(c, 0, "C", name)?, deg()?),
        _ => Err(Error::InvalidArgument(format!(
            "unknown special function '{name}' (known: {})",
            NAMES.join(", ")
        ))),
    }
}
