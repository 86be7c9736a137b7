//! Evaluation of `ₚR_q(A, B; z) = Σ Γ⁻¹(nA+B) (C₁)ₙ…(C_p)ₙ (D₁)ₙ⁻¹…(D_q)ₙ⁻¹ zⁿ/n!`
//! and the convergence classification of the series.
//!
//! Every factor of a term is carried as a unit-norm mantissa times `e^s`, so
//! Pochhammer products, reciprocal gammas and `zⁿ/n!` never leave the
//! floating-point range on their own even when their product is moderate.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gammakit::{self, spectral_bounds};
use crate::matcore::{self, fro_norm, CMatrix};

/// The matrices `(A, B, C₁..C_p, D₁..D_q)` of one series instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: Vec<CMatrix>,
    pub d: Vec<CMatrix>,
}

impl ParameterSet {
    /// Validates that all matrices are square, finite and of one size.
    pub fn new(a: CMatrix, b: CMatrix, c: Vec<CMatrix>, d: Vec<CMatrix>) -> Result<Self> {
        let r = a.nrows();
        if r == 0 {
            return Err(Error::Dimension(
                "parameter matrices must be non-empty".into(),
            ));
        }
        let named = std::iter::once(("A".to_string(), &a))
            .chain(std::iter::once(("B".to_string(), &b)))
            .chain(
                c.iter()
                    .enumerate()
                    .map(|(i, m)| (format!("C{}", i + 1), m)),
            )
            .chain(
                d.iter()
                    .enumerate()
                    .map(|(j, m)| (format!("D{}", j + 1), m)),
            );
        for (name, m) in named {
            if m.nrows() != r || m.ncols() != r {
                return Err(Error::Dimension(format!(
                    "{name} is {}x{}, expected {r}x{r}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if !matcore::is_finite(m) {
                return Err(Error::Numeric(format!("{name} has non-finite entries")));
            }
        }
        Ok(Self { a, b, c, d })
    }

    /// `r = 1` instance with real parameters.
    pub fn scalar(a: f64, b: f64, c: &[f64], d: &[f64]) -> Self {
        let m = |x: f64| CMatrix::from_element(1, 1, C64::new(x, 0.0));
        Self {
            a: m(a),
            b: m(b),
            c: c.iter().map(|&x| m(x)).collect(),
            d: d.iter().map(|&x| m(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn p(&self) -> usize {
        self.c.len()
    }

    pub fn q(&self) -> usize {
        self.d.len()
    }

    /// `S M S⁻¹` applied to every parameter.
    pub fn conjugate(&self, s: &CMatrix, s_inv: &CMatrix) -> Self {
        let f = |m: &CMatrix| s * m * s_inv;
        Self {
            a: f(&self.a),
            b: f(&self.b),
            c: self.c.iter().map(f).collect(),
            d: self.d.iter().map(f).collect(),
        }
    }

    pub fn with_a(&self, a: CMatrix) -> Self {
        Self { a, ..self.clone() }
    }

    pub fn with_b(&self, b: CMatrix) -> Self {
        Self { b, ..self.clone() }
    }

    /// Replaces `C_i` (1-based).
    pub fn with_c(&self, i: usize, m: CMatrix) -> Result<Self> {
        check_index(i, self.p(), "C")?;
        let mut out = self.clone();
        out.c[i - 1] = m;
        Ok(out)
    }

    /// Replaces `D_j` (1-based).
    pub fn with_d(&self, j: usize, m: CMatrix) -> Result<Self> {
        check_index(j, self.q(), "D")?;
        let mut out = self.clone();
        out.d[j - 1] = m;
        Ok(out)
    }

    /// `C_i + sI` (1-based).
    pub fn shift_c(&self, i: usize, s: C64) -> Result<Self> {
        check_index(i, self.p(), "C")?;
        let m = &self.c[i - 1] + matcore::scalar_matrix(self.dim(), s);
        self.with_c(i, m)
    }

    /// `D_j + sI` (1-based).
    pub fn shift_d(&self, j: usize, s: C64) -> Result<Self> {
        check_index(j, self.q(), "D")?;
        let m = &self.d[j - 1] + matcore::scalar_matrix(self.dim(), s);
        self.with_d(j, m)
    }
}

fn check_index(i: usize, len: usize, family: &str) -> Result<()> {
    if i == 0 || i > len {
        Err(Error::InvalidArgument(format!(
            "index {family}{i} out of range 1..={len}"
        )))
    } else {
        Ok(())
    }
}

/// One-parameter unit shifts. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    CiPlus(usize),
    CiMinus(usize),
    DjMinus(usize),
    BPlus,
    BMinus,
}

/// Returns a copy of `params` with exactly one parameter shifted by `±I`.
pub fn shift(params: &ParameterSet, which: Shift) -> Result<ParameterSet> {
    let one = C64::new(1.0, 0.0);
    let id = matcore::identity(params.dim());
    match which {
        Shift::CiPlus(i) => params.shift_c(i, one),
        Shift::CiMinus(i) => params.shift_c(i, -one),
        Shift::DjMinus(j) => params.shift_d(j, -one),
        Shift::BPlus => Ok(params.with_b(&params.b + id)),
        Shift::BMinus => Ok(params.with_b(&params.b - id)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    pub rel_tol: f64,
    pub max_terms: usize,
    pub commutator_tol: f64,
    /// Sum the series even when the classifier says it diverges.
    pub allow_divergent: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 500,
            commutator_tol: 1e-10,
            allow_divergent: false,
        }
    }
}

impl SeriesOptions {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_terms == 0 {
            return Err(Error::InvalidArgument(format!(
                "need rel_tol > 0 and max_terms >= 1, got {} and {}",
                self.rel_tol, self.max_terms
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictTag {
    AllFiniteZ,
    InsideUnitDisk,
    BoundaryAbsolute,
    BoundaryUndetermined,
    DivergesOutsideDisk,
    DivergesAllNonzero,
}

impl VerdictTag {
    pub fn diverges(self) -> bool {
        matches!(self, Self::DivergesOutsideDisk | Self::DivergesAllNonzero)
    }
}

impl fmt::Display for VerdictTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceVerdict {
    pub tag: VerdictTag,
    /// `Σβ(D_j) − Σα(C_i)`, reported for `p = q + 2`.
    pub margin: Option<f64>,
}

/// Distance from 1 within which `|z|` counts as on the unit circle.
const UNIT_CIRCLE_TOL: f64 = 1e-12;

/// `Σβ(D_j) − Σα(C_i)`.
pub fn margin(params: &ParameterSet) -> Result<f64> {
    let mut m = 0.0;
    for d in &params.d {
        m += spectral_bounds(d)?.beta;
    }
    for c in &params.c {
        m -= spectral_bounds(c)?.alpha;
    }
    Ok(m)
}

/// Region classification by `p`, `q`, `|z|` and, on the unit circle, the margin.
pub fn classify(params: &ParameterSet, z: C64) -> ConvergenceVerdict {
    let (p, q) = (params.p(), params.q());
    let az = z.norm();
    use VerdictTag::*;
    if p <= q + 1 {
        return ConvergenceVerdict {
            tag: AllFiniteZ,
            margin: None,
        };
    }
    if p > q + 2 {
        let tag = if az == 0.0 {
            AllFiniteZ
        } else {
            DivergesAllNonzero
        };
        return ConvergenceVerdict { tag, margin: None };
    }
    let m = margin(params).unwrap_or(f64::NAN);
    let tag = if (az - 1.0).abs() <= UNIT_CIRCLE_TOL {
        if m > 0.0 {
            BoundaryAbsolute
        } else {
            BoundaryUndetermined
        }
    } else if az < 1.0 {
        InsideUnitDisk
    } else {
        DivergesOutsideDisk
    };
    ConvergenceVerdict {
        tag,
        margin: Some(m),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub value: CMatrix,
    pub terms_used: usize,
    pub last_term_norm: f64,
    pub verdict: ConvergenceVerdict,
    pub terminated_polynomially: bool,
    /// `max_terms` was reached before the stopping rule was met.
    pub truncated: bool,
}

/// `e^{s}` times a unit-norm (or zero) matrix.
#[derive(Debug, Clone)]
pub(crate) struct Scaled {
    pub m: CMatrix,
    pub s: f64,
}

impl Scaled {
    fn normalized(m: CMatrix, s: f64) -> Self {
        let nrm = fro_norm(&m);
        if nrm == 0.0 || !nrm.is_finite() {
            Self { m, s }
        } else {
            Self {
                m: m / C64::new(nrm, 0.0),
                s: s + nrm.ln(),
            }
        }
    }

    fn is_zero(&self) -> bool {
        self.m.iter().all(|z| *z == C64::new(0.0, 0.0))
    }
}

/// Coefficient `Γ⁻¹(nA+B)(C₁)ₙ…(D_q)ₙ⁻¹ / n!` in scaled form.
#[derive(Debug, Clone)]
pub(crate) struct Coefficient {
    pub n: usize,
    pub m: CMatrix,
    pub s: f64,
}

impl Coefficient {
    /// `coefficient · e^{extra}` with an overflow check.
    pub fn times_exp(&self, extra: C64) -> Result<CMatrix> {
        scale_matrix(&self.m, C64::new(self.s, 0.0) + extra)
    }

    /// `coefficient · e^{extra} · w^{k}` for an integer power (`0^0 = 1`).
    pub fn times_power(&self, extra: f64, w: C64, k: i64) -> Result<CMatrix> {
        match log_power(w, k) {
            Some(l) => self.times_exp(l + extra),
            None => Ok(CMatrix::zeros(self.m.nrows(), self.m.ncols())),
        }
    }
}

/// `ln(w^k)`, or `None` when `w^k = 0`.
pub(crate) fn log_power(w: C64, k: i64) -> Option<C64> {
    if k == 0 {
        Some(C64::new(0.0, 0.0))
    } else if w == C64::new(0.0, 0.0) {
        None
    } else {
        Some(w.ln() * k as f64)
    }
}

pub(crate) fn scale_matrix(m: &CMatrix, log: C64) -> Result<CMatrix> {
    if m.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return Ok(m.clone());
    }
    let f = log.exp();
    if !f.re.is_finite() || !f.im.is_finite() {
        return Err(Error::Numeric(format!(
            "series term overflow (log magnitude {:.1})",
            log.re
        )));
    }
    Ok(m * f)
}

/// Ratio below which `D + kI` counts as singular.
const SINGULAR_RATIO: f64 = 1e-12;
/// Pochhammer products at or below this norm terminate the series.
const LN_POLY_ZERO: f64 = -690.775_527_898_213_7; // ln 1e-300

pub(crate) enum Step {
    Term(Coefficient),
    /// `Γ⁻¹(nA+B)` vanished exactly.
    GammaZero,
    /// A numerator Pochhammer product became zero.
    Terminated,
}

/// Produces the coefficients one `n` at a time through the recurrences
/// `(C)_{n+1} = (C)_n (C+nI)` and `(D)⁻¹_{n+1} = (D+nI)⁻¹ (D)⁻¹_n`.
pub(crate) struct CoefficientStream<'a> {
    params: &'a ParameterSet,
    n: usize,
    poch: Vec<Scaled>,
    dinv: Vec<Scaled>,
    ln_fact: f64,
}

impl<'a> CoefficientStream<'a> {
    pub fn new(params: &'a ParameterSet) -> Self {
        let id = matcore::identity(params.dim());
        let unit = || Scaled::normalized(id.clone(), 0.0);
        Self {
            params,
            n: 0,
            poch: params.c.iter().map(|_| unit()).collect(),
            dinv: params.d.iter().map(|_| unit()).collect(),
            ln_fact: 0.0,
        }
    }

    pub fn next_step(&mut self) -> Result<Step> {
        let n = self.n;
        let r = self.params.dim();
        if n >= 1 {
            let k = C64::new((n - 1) as f64, 0.0);
            for (c, pc) in self.params.c.iter().zip(self.poch.iter_mut()) {
                let next = &pc.m * (c + matcore::scalar_matrix(r, k));
                *pc = Scaled::normalized(next, pc.s);
                if pc.is_zero() || pc.s <= LN_POLY_ZERO {
                    return Ok(Step::Terminated);
                }
            }
            for (j, (d, qd)) in self.params.d.iter().zip(self.dinv.iter_mut()).enumerate() {
                let shifted = d + matcore::scalar_matrix(r, k);
                let inv = checked_inverse(&shifted).ok_or_else(|| {
                    Error::Precondition(format!("D{} + {}I is numerically singular", j + 1, n - 1))
                })?;
                *qd = Scaled::normalized(inv * &qd.m, qd.s);
            }
            self.ln_fact += (n as f64).ln();
        }
        self.n += 1;

        let arg = &self.params.a * C64::new(n as f64, 0.0) + &self.params.b;
        let (g, gs) = gammakit::rgamma_scaled(&arg)?;
        if g.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            return Ok(Step::GammaZero);
        }
        let mut m = g;
        let mut s = gs - self.ln_fact;
        for f in self.poch.iter().chain(self.dinv.iter()) {
            let prod = Scaled::normalized(m * &f.m, s + f.s);
            m = prod.m;
            s = prod.s;
        }
        Ok(Step::Term(Coefficient { n, m, s }))
    }
}

/// `M⁻¹` when `σ_min(M) > 1e-12 σ_max(M)`.
fn checked_inverse(m: &CMatrix) -> Option<CMatrix> {
    let sv = m.clone().singular_values();
    let (lo, hi) = (sv.min(), sv.max());
    if !(lo > SINGULAR_RATIO * hi) {
        return None;
    }
    matcore::inverse(m).ok()
}

/// Raw summation outcome before a verdict is attached.
#[derive(Debug, Clone)]
pub(crate) struct SeriesSum {
    pub value: CMatrix,
    pub terms_used: usize,
    pub last_term_norm: f64,
    pub terminated_polynomially: bool,
    pub truncated: bool,
}

/// Number of consecutive small terms that ends the summation.
const SMALL_RUN: usize = 3;

/// Sums `Σ term(c_n)` with the shared stopping rule. A closure result of
/// `None` marks a term that is zero by construction; it neither adds nor
/// counts toward the small-term run.
pub(crate) fn accumulate<F>(
    params: &ParameterSet,
    opts: &SeriesOptions,
    mut term: F,
) -> Result<SeriesSum>
where
    F: FnMut(&Coefficient) -> Result<Option<CMatrix>>,
{
    opts.validate()?;
    let r = params.dim();
    let a_is_zero = params.a.iter().all(|z| *z == C64::new(0.0, 0.0));
    let mut stream = CoefficientStream::new(params);
    let mut sum = CMatrix::zeros(r, r);
    let mut small = 0;
    let mut last = 0.0;
    let mut terms_used = 0;
    let mut terminated = false;
    let mut done = false;
    while terms_used < opts.max_terms {
        let step = stream.next_step()?;
        let t = match step {
            Step::Terminated => {
                terminated = true;
                done = true;
                break;
            }
            Step::GammaZero => {
                terms_used += 1;
                if a_is_zero {
                    Some(CMatrix::zeros(r, r))
                } else {
                    None
                }
            }
            Step::Term(c) => {
                terms_used += 1;
                term(&c)?
            }
        };
        let Some(t) = t else { continue };
        if !matcore::is_finite(&t) {
            return Err(Error::Numeric(format!(
                "non-finite series term at n = {}",
                terms_used - 1
            )));
        }
        sum += &t;
        last = fro_norm(&t);
        if last <= opts.rel_tol * fro_norm(&sum).max(1.0) {
            small += 1;
            if small >= SMALL_RUN {
                done = true;
                break;
            }
        } else {
            small = 0;
        }
    }
    if !matcore::is_finite(&sum) {
        return Err(Error::Numeric("series sum is not finite".into()));
    }
    Ok(SeriesSum {
        value: sum,
        terms_used,
        last_term_norm: last,
        terminated_polynomially: terminated,
        truncated: !done,
    })
}

pub(crate) fn require_convergent(
    params: &ParameterSet,
    z: C64,
    opts: &SeriesOptions,
) -> Result<ConvergenceVerdict> {
    let verdict = classify(params, z);
    if verdict.tag.diverges() && !opts.allow_divergent {
        return Err(Error::Domain(format!(
            "series diverges at z = {z} (p = {}, q = {}, {})",
            params.p(),
            params.q(),
            verdict.tag
        )));
    }
    Ok(verdict)
}

/// Sums the series at `z`.
pub fn eval(params: &ParameterSet, z: C64, opts: &SeriesOptions) -> Result<EvalResult> {
    let verdict = require_convergent(params, z, opts)?;
    opts.validate()?;
    if z == C64::new(0.0, 0.0) {
        let value = gammakit::rgamma_m(&params.b)?;
        return Ok(EvalResult {
            last_term_norm: fro_norm(&value),
            value,
            terms_used: 1,
            verdict,
            terminated_polynomially: false,
            truncated: false,
        });
    }
    let lz = z.ln();
    let sum = accumulate(params, opts, |c| c.times_exp(lz * c.n as f64).map(Some))?;
    Ok(EvalResult {
        value: sum.value,
        terms_used: sum.terms_used,
        last_term_norm: sum.last_term_norm,
        verdict,
        terminated_polynomially: sum.terminated_polynomially,
        truncated: sum.truncated,
    })
}

/// Taylor coefficients of the series stored once for evaluation at many
/// points with `|w| ≤ radius`.
#[derive(Debug, Clone)]
pub struct Expansion {
    coeffs: Vec<Option<(CMatrix, f64)>>,
    dim: usize,
    pub terminated_polynomially: bool,
    pub truncated: bool,
}

impl Expansion {
    pub fn new(params: &ParameterSet, radius: f64, opts: &SeriesOptions) -> Result<Self> {
        opts.validate()?;
        if !(radius >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "radius must be >= 0, got {radius}"
            )));
        }
        let r = params.dim();
        let a_is_zero = params.a.iter().all(|z| *z == C64::new(0.0, 0.0));
        let lr = if radius > 0.0 {
            radius.ln()
        } else {
            f64::NEG_INFINITY
        };
        // stricter than `eval`: the stored coefficients serve a whole disk
        let tol = opts.rel_tol * 1e-2;
        let mut stream = CoefficientStream::new(params);
        let mut coeffs = Vec::new();
        let mut peak: f64 = 1.0;
        let mut small = 0;
        let mut terminated = false;
        let mut done = false;
        while coeffs.len() < opts.max_terms {
            match stream.next_step()? {
                Step::Terminated => {
                    terminated = true;
                    done = true;
                    break;
                }
                Step::GammaZero => {
                    coeffs.push(None);
                    if a_is_zero {
                        small += 1;
                    }
                }
                Step::Term(c) => {
                    let size = if c.n == 0 {
                        c.s.exp()
                    } else {
                        (c.s + c.n as f64 * lr).exp()
                    };
                    coeffs.push(Some((c.m, c.s)));
                    if size <= tol * peak {
                        small += 1;
                    } else {
                        small = 0;
                    }
                    peak = peak.max(size);
                }
            }
            if small >= SMALL_RUN {
                done = true;
                break;
            }
        }
        Ok(Self {
            coeffs,
            dim: r,
            terminated_polynomially: terminated,
            truncated: !done,
        })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Σ c_n wⁿ` over the stored coefficients.
    pub fn eval(&self, w: C64) -> Result<CMatrix> {
        let mut sum = CMatrix::zeros(self.dim, self.dim);
        for (n, c) in self.coeffs.iter().enumerate() {
            let Some((m, s)) = c else { continue };
            if let Some(l) = log_power(w, n as i64) {
                sum += scale_matrix(m, C64::new(*s, 0.0) + l)?;
            }
        }
        if !matcore::is_finite(&sum) {
            return Err(Error::Numeric(format!(
                "expansion sum at w = {w} is not finite"
            )));
        }
        Ok(sum)
    }
}
