//! Contiguous relations and differential formulas, each checked numerically
//! by evaluating both sides independently.
//!
//! Left-hand sides come from term-wise differentiation of the series; right-hand
//! sides from evaluations of shifted parameter sets.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gammakit::{self, pochhammer};
use crate::matcore::{self, commutator_rel, fro_norm, identity, scalar_matrix, CMatrix};
use crate::series::{self, accumulate, shift, ParameterSet, SeriesOptions, Shift};

/// What to do when a commutation or stability hypothesis fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum HypothesisMode {
    /// Return a precondition error.
    #[default]
    Strict,
    /// Evaluate anyway and flag the report.
    Probe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IdentityId {
    /// `(θ + C_i) R = C_i R(C_i+)`
    ThetaCi(usize),
    /// `θR + R(D_j − I) = R(D_j−)(D_j − I)`
    ThetaDj(usize),
    /// `C_i R − R(D_j − I) = C_i R(C_i+) − R(D_j−)(D_j − I)`
    Bilateral(usize, usize),
    /// `(C_1 − C_i) R = C_1 R(C_1+) − C_i R(C_i+)`
    SimpleCi(usize),
    /// `C_1 R − R(D_j − I) = C_1 R(C_1+) − R(D_j−)(D_j − I)`
    SimpleDj(usize),
    /// r-th derivative in closed form.
    DerivR { order: usize },
    /// r-th derivative of `R z^{D_j − I}`.
    DerivWeightDj { j: usize, order: usize },
    /// `(z² d/dz)^r` applied to `z^{C_i − (r−1)I} R`.
    DerivWeightCi { i: usize, order: usize },
    /// `zA R' = R(A, B − I) − (B − I) R`
    ZADeriv,
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ThetaCi(i) => write!(f, "theta_c{i}"),
            Self::ThetaDj(j) => write!(f, "theta_d{j}"),
            Self::Bilateral(i, j) => write!(f, "bilateral_c{i}_d{j}"),
            Self::SimpleCi(i) => write!(f, "simple_c{i}"),
            Self::SimpleDj(j) => write!(f, "simple_d{j}"),
            Self::DerivR { order } => write!(f, "deriv_r{order}"),
            Self::DerivWeightDj { j, order } => write!(f, "deriv_weight_d{j}_r{order}"),
            Self::DerivWeightCi { i, order } => write!(f, "deriv_weight_c{i}_r{order}"),
            Self::ZADeriv => write!(f, "za_deriv"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub id: IdentityId,
    pub z: C64,
    pub lhs: CMatrix,
    pub rhs: CMatrix,
    /// `‖lhs − rhs‖_F / max(1, ‖lhs‖_F)`
    pub residual: f64,
    pub hypotheses_met: bool,
    /// Descriptions of the hypotheses that failed (empty when met).
    pub unmet: Vec<String>,
}

impl IdentityReport {
    fn new(id: IdentityId, z: C64, lhs: CMatrix, rhs: CMatrix, unmet: Vec<String>) -> Result<Self> {
        if !matcore::is_finite(&lhs) || !matcore::is_finite(&rhs) {
            return Err(Error::Numeric(format!("{id} at z = {z}: non-finite side")));
        }
        Ok(Self {
            id,
            z,
            residual: matcore::rel_residual(&lhs, &rhs),
            lhs,
            rhs,
            hypotheses_met: unmet.is_empty(),
            unmet,
        })
    }
}

/// Collects failed hypotheses for one check.
struct Hypotheses<'a> {
    tol: f64,
    params: &'a ParameterSet,
    unmet: Vec<String>,
}

impl<'a> Hypotheses<'a> {
    fn new(params: &'a ParameterSet, opts: &SeriesOptions) -> Self {
        Self {
            tol: opts.commutator_tol,
            params,
            unmet: Vec::new(),
        }
    }

    fn commute(&mut self, x: &CMatrix, xn: &str, y: &CMatrix, yn: &str) {
        let c = commutator_rel(x, y);
        if c > self.tol {
            self.unmet.push(format!(
                "{xn}{yn} != {yn}{xn} (relative commutator {c:.3e})"
            ));
        }
    }

    /// `C_i` commutes with `A`, `B` and every `C_k`.
    fn c_family(&mut self, i: usize) {
        let ci = &self.params.c[i - 1];
        let name = format!("C{i}");
        self.commute(ci, &name, &self.params.a, "A");
        self.commute(ci, &name, &self.params.b, "B");
        for (k, ck) in self.params.c.iter().enumerate() {
            if k + 1 != i {
                self.commute(ci, &name, ck, &format!("C{}", k + 1));
            }
        }
    }

    /// `D_j` commutes with every `D_k`.
    fn d_family(&mut self, j: usize) {
        let dj = &self.params.d[j - 1];
        let name = format!("D{j}");
        for (k, dk) in self.params.d.iter().enumerate() {
            if k + 1 != j {
                self.commute(dj, &name, dk, &format!("D{}", k + 1));
            }
        }
    }

    fn positive_stable(&mut self, m: &CMatrix, name: &str) -> Result<()> {
        let sb = gammakit::spectral_bounds(m)?;
        if !sb.is_positive_stable() {
            self.unmet.push(format!(
                "{name} is not positive stable (min Re eigenvalue {})",
                sb.beta
            ));
        }
        Ok(())
    }

    fn finish(mut self, mode: HypothesisMode) -> Result<Vec<String>> {
        self.unmet.dedup();
        if mode == HypothesisMode::Strict && !self.unmet.is_empty() {
            return Err(Error::Precondition(self.unmet.join("; ")));
        }
        Ok(self.unmet)
    }
}

fn check_c_index(params: &ParameterSet, i: usize) -> Result<()> {
    if i == 0 || i > params.p() {
        return Err(Error::InvalidArgument(format!(
            "C index {i} out of range 1..={}",
            params.p()
        )));
    }
    Ok(())
}

fn check_d_index(params: &ParameterSet, j: usize) -> Result<()> {
    if j == 0 || j > params.q() {
        return Err(Error::InvalidArgument(format!(
            "D index {j} out of range 1..={}",
            params.q()
        )));
    }
    Ok(())
}

/// Positive real `z`, required wherever a matrix power of `z` appears.
fn positive_real(z: C64) -> Result<f64> {
    if z.im != 0.0 || !(z.re > 0.0) {
        return Err(Error::Domain(format!(
            "matrix powers of z need z on the positive real axis, got {z}"
        )));
    }
    Ok(z.re)
}

fn value(params: &ParameterSet, z: C64, opts: &SeriesOptions) -> Result<CMatrix> {
    Ok(series::eval(params, z, opts)?.value)
}

fn ln_falling(n: usize, r: usize) -> f64 {
    (n + 1 - r..=n).map(|k| (k as f64).ln()).sum()
}

/// `(θR)(z) = Σ n Tₙ(z)` with `θ = z d/dz`.
pub fn theta_r(params: &ParameterSet, z: C64, opts: &SeriesOptions) -> Result<CMatrix> {
    series::require_convergent(params, z, opts)?;
    let sum = accumulate(params, opts, |c| {
        if c.n == 0 {
            return Ok(None);
        }
        c.times_power((c.n as f64).ln(), z, c.n as i64).map(Some)
    })?;
    Ok(sum.value)
}

/// `(θ + C_i) R = C_i R(C_i+)`
pub fn check_theta_ci(
    i: usize,
    params: &ParameterSet,
    z: C64,
    opts: &SeriesOptions,
    mode: HypothesisMode,
) -> Result<IdentityReport> {
    check_c_index(params, i)?;
    let mut h = Hypotheses::new(params, opts);
    h.c_family(i);
    let unmet = h.finish(mode)?;
    let ci = &params.c[i - 1];
    let r = value(params, z, opts)?;
    let lhs = theta_r(params, z, opts)? + ci * &r;
    let rhs = ci * value(&shift(params, Shift::CiPlus(i))?, z, opts)?;
    IdentityReport::new(IdentityId::ThetaCi(i), z, lhs, rhs, unmet)
}

/// `θR + R(D_j − I) = R(D_j−)(D_j − I)`
pub fn check_theta_dj(
    j: usize,
    params: &ParameterSet,
    z: C64,
    opts: &SeriesOptions,
    mode: HypothesisMode,
) -> Result<IdentityReport> {
    check_d_index(params, j)?;
    let mut h = Hypotheses::new(params, opts);
    h.d_family(j);
    let unmet = h.finish(mode)?;
    let djm1 = &params.d[j - 1] - identity(params.dim());
    let r = value(params, z, opts)?;
    let lhs = theta_r(params, z, opts)? + &r * &djm1;
    let rhs = value(&shift(params, Shift::DjMinus(j))?, z, opts)? * &djm1;
    IdentityReport::new(IdentityId::ThetaDj(j), z, lhs, rhs, unmet)
}

fn bilateral_sides(
    i: usize,
    j: usize,
    params: &ParameterSet,
    z: C64,
    opts: &SeriesOptions,
) -> Result<(CMatrix, CMatrix)> {
    let ci = &params.c[i - 1];
    let djm1 = &params.d[j - 1] - identity(params.dim());
    let r = value(params, z, opts)?;
    let lhs = ci * &r - &r * &djm1;
    let rhs = ci * value(&shift(params, Shift::CiPlus(i))?, z, opts)?
        - value(&shift(params, Shift::DjMinus(j))?, z, opts)? * &djm1;
    Ok((lhs, rhs))
}

/// `C_i R − R(D_j − I) = C_i R(C_i+) − R(D_j−)(D_j − I)`
pub fn check_bilateral(
    i: usize,
    j: usize,
    params: &ParameterSet,
    z: C64,
    opts: &SeriesOptions,
    mode: HypothesisMode,
) -> Result<IdentityReport> {
    check_c_index(params, i)?;
    check_d_index(params, j)?;
    let mut h = Hypotheses::new(params, opts);
    h.c_family(i);
    h.d_family(j);
    let unmet = h.finish(mode)?;
    let (lhs, rhs) = bilateral_sides(i, j, params, z, opts)?;
    IdentityReport::new(IdentityId::Bilateral(i, j), z, lhs, rhs, unmet)
}

/// `(C_1 − C_i) R = C_1 R(C_1+) − C_i R(C_i+)` for `i ≥ 2`.
pub fn check_simple_ci(
    i: usize,
    params: &ParameterSet,
    z: C64,
    opts: &SeriesOptions,
    mode: HypothesisMode,
) -> Result<IdentityReport> {
    check_c_index(params, i)?;
    if i < 2 {
        return Err(Error::InvalidArgument(
            "the simple C relation compares C1 with C_i for i >= 2".into(),
        ));
    }
    let mut h = Hypotheses::new(params, opts);
    h.c_family(1);
    h.c_family(i);
    let unmet = h.finish(mode)?;
    let (c1, ci) = (&params.c[0], &params.c[i - 1]);
    let lhs = (c1 - ci) * value(params, z, opts)?;
    let rhs = c1 * value(&shift(params, Shift::CiPlus(1))?, z, opts)?
        - ci * value(&shift(params, Shift::CiPlus(i))?, z, opts)?;
    IdentityReport::new(IdentityId::SimpleCi(i), z, lhs, rhs, unmet)
}

/// `C_1 R − R(D_j − I) = C_1 R(C_1+) − R(D_j−)(D_j − I)`
pub fn check_simple_dj(
    j: usize,
    params: &ParameterSet,
    z: C64,
    opts: &SeriesOptions,
    mode: HypothesisMode,
) -> Result<IdentityReport> {
    check_c_index(params, 1)?;
    check_d_index(params, j)?;
    let mut h = Hypotheses::new(params, opts);
    h.c_family(1);
    h.d_family(j);
    let unmet = h.finish(mode)?;
    let (lhs, rhs) = bilateral_sides(1, j, params, z, opts)?;
    IdentityReport::new(IdentityId::SimpleDj(j), z, lhs, rhs, unmet)
}

/// `(d/dz)^r R` by term-wise differentiation.
pub fn derivative_termwise(
    params: &ParameterSet,
    z: C64,
    order: usize,
    opts: &SeriesOptions,
) -> Result<CMatrix> {
    let sum = accumulate(params, opts, |c| {
        if c.n < order {
            return Ok(None);
        }
        c.times_power(ln_falling(c.n, order), z, (c.n - order) as i64)
            .map(Some)
    })?;
    Ok(sum.value)
}

/// `(d/dz)^r R = (C₁)_r…(C_p)_r R(C+rI; D+rI | A, rA+B) (D₁)_r⁻¹…(D_q)_r⁻¹`
pub fn deriv_formula(
    params: &ParameterSet,
    z: C64,
    order: usize,
    opts: &SeriesOptions,
    mode: HypothesisMode,
) -> Result<IdentityReport> {
    if order == 0 {
        return Err(Error::InvalidArgument(
            "derivative order must be >= 1".into(),
        ));
    }
    let mut h = Hypotheses::new(params, opts);
    for i in 1..=params.p() {
        h.c_family(i);
    }
    for j in 1..=params.q() {
        h.d_family(j);
    }
    let unmet = h.finish(mode)?;
    let dim = params.dim();
    let rr = C64::new(order as f64, 0.0);
    let shifted = ParameterSet {
        a: params.a.clone(),
        b: &params.a * rr + &params.b,
        c: params
            .c
            .iter()
            .map(|c| c + scalar_matrix(dim, rr))
            .collect(),
        d: params
            .d
            .iter()
            .map(|d| d + scalar_matrix(dim, rr))
            .collect(),
    };
    let mut rhs = identity(dim);
    for c in &params.c {
        rhs *= pochhammer(c, order);
    }
    rhs *= value(&shifted, z, opts)?;
    for (j, d) in params.d.iter().enumerate() {
        let inv = matcore::inverse(&pochhammer(d, order))
            .map_err(|_| Error::Precondition(format!("(D{})_{order} is singular", j + 1)))?;
        rhs *= inv;
    }
    let lhs = derivative_termwise(params, z, order, opts)?;
    IdentityReport::new(IdentityId::DerivR { order }, z, lhs, rhs, unmet)
}

/// `(d/dz)^r (R z^{D_j−I}) = R(D_j − rI) (−1)^r z^{D_j−(r+1)I} (I − D_j)_r`
/// for real `z > 0`.
pub fn deriv_weighted_dj(
    params: &ParameterSet,
    z: C64,
    j: usize,
    order: usize,
    opts: &SeriesOptions,
    mode: HypothesisMode,
) -> Result<IdentityReport> {
    check_d_index(params, j)?;
    if order == 0 {
        return Err(Error::InvalidArgument(
            "derivative order must be >= 1".into(),
        ));
    }
    let x = positive_real(z)?;
    let mut h = Hypotheses::new(params, opts);
    h.d_family(j);
    let unmet = h.finish(mode)?;
    let dim = params.dim();
    let dj = &params.d[j - 1];
    let x_d = matcore::matpow_base(x, dj)?;

    let lhs = accumulate(params, opts, |c| {
        // Π_{s=1..r} (D_j + (n−s)I)
        let mut poly = identity(dim);
        for s in 1..=order {
            poly *= dj + scalar_matrix(dim, C64::new(c.n as f64 - s as f64, 0.0));
        }
        if fro_norm(&poly) == 0.0 {
            return Ok(None);
        }
        let k = c.n as i64 - 1 - order as i64;
        Ok(Some(c.times_power(0.0, z, k)? * poly * &x_d))
    })?
    .value;

    let rr = C64::new(order as f64, 0.0);
    let lowered = params.shift_d(j, -rr)?;
    let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
    let expo = dj - scalar_matrix(dim, rr + 1.0);
    let rhs = value(&lowered, z, opts)?
        * C64::new(sign, 0.0)
        * matcore::matpow_base(x, &expo)?
        * pochhammer(&(identity(dim) - dj), order);
    IdentityReport::new(IdentityId::DerivWeightDj { j, order }, z, lhs, rhs, unmet)
}

/// `(z² d/dz)^r (z^{C_i−(r−1)I} R) = (C_i)_r z^{C_i+rI} R(C_i + rI)` for real
/// `z > 0`. The displayed form holds for `r = 1`; higher orders are evaluated
/// as displayed and reported.
pub fn deriv_weighted_ci(
    params: &ParameterSet,
    z: C64,
    i: usize,
    order: usize,
    opts: &SeriesOptions,
    mode: HypothesisMode,
) -> Result<IdentityReport> {
    check_c_index(params, i)?;
    if order == 0 {
        return Err(Error::InvalidArgument(
            "derivative order must be >= 1".into(),
        ));
    }
    let x = positive_real(z)?;
    let mut h = Hypotheses::new(params, opts);
    h.c_family(i);
    let unmet = h.finish(mode)?;
    let dim = params.dim();
    let ci = &params.c[i - 1];
    let x_c = matcore::matpow_base(x, ci)?;

    // (z² d/dz) z^{M} = M z^{M+I}, applied r times to z^{C_i+(n−r+1)I}
    let lhs = accumulate(params, opts, |c| {
        let start = C64::new(c.n as f64 - order as f64 + 1.0, 0.0);
        let poly = pochhammer(&(ci + scalar_matrix(dim, start)), order);
        if fro_norm(&poly) == 0.0 {
            return Ok(None);
        }
        Ok(Some(poly * &x_c * c.times_power(0.0, z, c.n as i64 + 1)?))
    })?
    .value;

    let rr = C64::new(order as f64, 0.0);
    let raised = params.shift_c(i, rr)?;
    let rhs = pochhammer(ci, order)
        * matcore::matpow_base(x, &(ci + scalar_matrix(dim, rr)))?
        * value(&raised, z, opts)?;
    IdentityReport::new(IdentityId::DerivWeightCi { i, order }, z, lhs, rhs, unmet)
}

/// `zA (d/dz) R = R(A, B − I) − (B − I) R`, hypotheses `AB = BA`, `A` and
/// `B − I` positive stable.
pub fn check_za_deriv(
    params: &ParameterSet,
    z: C64,
    opts: &SeriesOptions,
    mode: HypothesisMode,
) -> Result<IdentityReport> {
    let id = identity(params.dim());
    let bm1 = &params.b - &id;
    let mut h = Hypotheses::new(params, opts);
    h.commute(&params.a, "A", &params.b, "B");
    h.positive_stable(&params.a, "A")?;
    h.positive_stable(&bm1, "B - I")?;
    let unmet = h.finish(mode)?;
    let lhs = &params.a * theta_r(params, z, opts)?;
    let rhs = value(&shift(params, Shift::BMinus)?, z, opts)? - &bm1 * value(params, z, opts)?;
    IdentityReport::new(IdentityId::ZADeriv, z, lhs, rhs, unmet)
}

/// Which checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IdentityKind {
    ThetaCi,
    ThetaDj,
    Bilateral,
    SimpleCi,
    SimpleDj,
    DerivR,
    DerivWeightDj,
    DerivWeightCi,
    ZADeriv,
}

impl IdentityKind {
    pub const ALL: [IdentityKind; 9] = [
        Self::ThetaCi,
        Self::ThetaDj,
        Self::Bilateral,
        Self::SimpleCi,
        Self::SimpleDj,
        Self::DerivR,
        Self::DerivWeightDj,
        Self::DerivWeightCi,
        Self::ZADeriv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ThetaCi => "theta_c",
            Self::ThetaDj => "theta_d",
            Self::Bilateral => "bilateral",
            Self::SimpleCi => "simple_c",
            Self::SimpleDj => "simple_d",
            Self::DerivR => "deriv",
            Self::DerivWeightDj => "deriv_weight_d",
            Self::DerivWeightCi => "deriv_weight_c",
            Self::ZADeriv => "za_deriv",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// True when the check multiplies by a matrix power of `z`.
    pub fn needs_positive_z(self) -> bool {
        matches!(self, Self::DerivWeightDj | Self::DerivWeightCi)
    }
}

/// Runs every applicable instance of the selected checks at `z`. Derivative
/// checks use `order`, except the weighted `C_i` form which only holds at
/// order 1. Instances whose indices do not exist for the given `p`, `q` are
/// skipped.
pub fn run_suite(
    params: &ParameterSet,
    z: C64,
    kinds: &[IdentityKind],
    order: usize,
    opts: &SeriesOptions,
    mode: HypothesisMode,
) -> Result<Vec<IdentityReport>> {
    let (p, q) = (params.p(), params.q());
    let mut out = Vec::new();
    for &kind in kinds {
        match kind {
            IdentityKind::ThetaCi => {
                for i in 1..=p {
                    out.push(check_theta_ci(i, params, z, opts, mode)?);
                }
            }
            IdentityKind::ThetaDj => {
                for j in 1..=q {
                    out.push(check_theta_dj(j, params, z, opts, mode)?);
                }
            }
            IdentityKind::Bilateral => {
                for i in 1..=p {
                    for j in 1..=q {
                        out.push(check_bilateral(i, j, params, z, opts, mode)?);
                    }
                }
            }
            IdentityKind::SimpleCi => {
                for i in 2..=p {
                    out.push(check_simple_ci(i, params, z, opts, mode)?);
                }
            }
            IdentityKind::SimpleDj => {
                if p >= 1 {
                    for j in 1..=q {
                        out.push(check_simple_dj(j, params, z, opts, mode)?);
                    }
                }
            }
            IdentityKind::DerivR => out.push(deriv_formula(params, z, order, opts, mode)?),
            IdentityKind::DerivWeightDj => {
                for j in 1..=q {
                    out.push(deriv_weighted_dj(params, z, j, order, opts, mode)?);
                }
            }
            IdentityKind::DerivWeightCi => {
                for i in 1..=p {
                    out.push(deriv_weighted_ci(params, z, i, 1, opts, mode)?);
                }
            }
            IdentityKind::ZADeriv => out.push(check_za_deriv(params, z, opts, mode)?),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::diag;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    const OPTS: SeriesOptions = SeriesOptions {
        rel_tol: 1e-12,
        max_terms: 500,
        commutator_tol: 1e-10,
        allow_divergent: false,
    };
    const STRICT: HypothesisMode = HypothesisMode::Strict;

    #[test]
    fn theta_of_exponential() {
        let p = ParameterSet::scalar(1.0, 1.0, &[1.0], &[]);
        let t = theta_r(&p, c(1.0), &OPTS).unwrap();
        assert!((t[(0, 0)].re - std::f64::consts::E).abs() < 1e-14);
        assert_eq!(theta_r(&p, c(0.0), &OPTS).unwrap()[(0, 0)], c(0.0));
    }

    #[test]
    fn scalar_examples_from_the_relations() {
        let r = check_theta_ci(
            1,
            &ParameterSet::scalar(1.0, 1.0, &[1.5], &[]),
            c(0.3),
            &OPTS,
            STRICT,
        );
        assert!(r.unwrap().residual <= 1e-10);
        let r = check_theta_dj(
            1,
            &ParameterSet::scalar(1.0, 1.0, &[2.0], &[3.0]),
            c(0.4),
            &OPTS,
            STRICT,
        );
        assert!(r.unwrap().residual <= 1e-10);
        let r = check_bilateral(
            1,
            1,
            &ParameterSet::scalar(1.0, 1.0, &[1.2], &[2.5]),
            c(0.5),
            &OPTS,
            STRICT,
        );
        assert!(r.unwrap().residual <= 1e-10);
        let r = check_simple_ci(
            2,
            &ParameterSet::scalar(1.0, 1.0, &[1.0, 2.0], &[3.0]),
            c(0.3),
            &OPTS,
            STRICT,
        );
        assert!(r.unwrap().residual <= 1e-10);
        let r = check_za_deriv(
            &ParameterSet::scalar(1.0, 2.0, &[1.0], &[]),
            c(0.4),
            &OPTS,
            STRICT,
        );
        assert!(r.unwrap().residual <= 1e-10);
        let r = deriv_weighted_dj(
            &ParameterSet::scalar(1.0, 1.0, &[1.5], &[2.5]),
            c(0.6),
            1,
            1,
            &OPTS,
            STRICT,
        );
        assert!(r.unwrap().residual <= 1e-9);
        let r = deriv_weighted_ci(
            &ParameterSet::scalar(1.0, 1.0, &[2.0], &[]),
            c(0.5),
            1,
            1,
            &OPTS,
            STRICT,
        );
        assert!(r.unwrap().residual <= 1e-9);
        let r = deriv_weighted_ci(
            &ParameterSet::scalar(1.0, 1.0, &[2.0], &[]),
            c(1e-3),
            1,
            1,
            &OPTS,
            STRICT,
        );
        assert!(r.unwrap().residual <= 1e-9);
    }

    #[test]
    fn exponential_derivative_closed_form() {
        let p = ParameterSet::scalar(1.0, 1.0, &[1.0], &[]);
        let r = deriv_formula(&p, c(0.7), 1, &OPTS, STRICT).unwrap();
        assert!((r.lhs[(0, 0)].re - 0.7f64.exp()).abs() < 1e-14);
        assert!(r.residual < 1e-13);
    }

    #[test]
    fn zero_argument_closed_forms() {
        let p = ParameterSet::new(
            diag(&[1.0, 2.0]),
            diag(&[3.0, 4.0]),
            vec![diag(&[1.5, 0.5])],
            vec![diag(&[2.0, 2.5])],
        )
        .unwrap();
        let g = gammakit::rgamma_m(&p.b).unwrap();
        let r = check_theta_ci(1, &p, c(0.0), &OPTS, STRICT).unwrap();
        assert!(fro_norm(&(&r.lhs - &p.c[0] * &g)) <= 1e-12);
        assert!(r.residual <= 1e-12);
        let r = check_theta_dj(1, &p, c(0.0), &OPTS, STRICT).unwrap();
        assert!(r.residual <= 1e-12);
        let r = check_za_deriv(&p, c(0.0), &OPTS, STRICT).unwrap();
        assert!(fro_norm(&r.lhs) == 0.0 && r.residual <= 1e-12);
        let r = deriv_formula(&p, c(0.0), 1, &OPTS, STRICT).unwrap();
        assert!(r.residual <= 1e-12);
    }

    #[test]
    fn identical_numerators_give_zero_simple_relation() {
        let p = ParameterSet::scalar(1.0, 1.0, &[1.3, 1.3], &[2.0]);
        let r = check_simple_ci(2, &p, c(0.4), &OPTS, STRICT).unwrap();
        assert_eq!(fro_norm(&r.lhs), 0.0);
        assert!(fro_norm(&r.rhs) <= 1e-15);
    }

    #[test]
    fn strict_and_probe_modes() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(2.0)]);
        let p = ParameterSet::new(a, diag(&[1.0, 1.5]), vec![diag(&[1.0, 2.0])], vec![]).unwrap();
        match check_theta_ci(1, &p, c(0.3), &OPTS, STRICT) {
            Err(Error::Precondition(msg)) => assert!(msg.contains("C1A"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let r = check_theta_ci(1, &p, c(0.3), &OPTS, HypothesisMode::Probe).unwrap();
        assert!(!r.hypotheses_met);
        assert!(!r.unmet.is_empty());
    }

    #[test]
    fn weighted_checks_need_positive_z() {
        let p = ParameterSet::scalar(1.0, 1.0, &[1.5], &[2.5]);
        assert!(matches!(
            deriv_weighted_dj(&p, c(-0.5), 1, 1, &OPTS, STRICT),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            deriv_weighted_ci(&p, C64::new(0.5, 0.1), 1, 1, &OPTS, STRICT),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn unit_denominator_weighted_derivative() {
        // D_j = I: the lowered set has D_j - I = 0, which cannot be summed
        let p = ParameterSet::scalar(1.0, 1.0, &[1.5], &[1.0]);
        assert!(matches!(
            deriv_weighted_dj(&p, c(0.6), 1, 1, &OPTS, STRICT),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn suite_names_round_trip() {
        for k in IdentityKind::ALL {
            assert_eq!(IdentityKind::parse(k.name()), Some(k));
        }
    }
}
