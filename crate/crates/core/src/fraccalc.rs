//! Riemann-Liouville fractional integral and derivative (lower limit 0) of the
//! weighted series `R(x) x^{D_j−I}`, in closed form and by direct quadrature.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gammakit::{self, gamma_m, rgamma_m};
use crate::matcore::{self, commutator_rel, fro_norm, identity, scalar_matrix, CMatrix};
use crate::quad::{jacobi_rule, legendre_on, GRADE};
use crate::scalar;
use crate::series::{self, ParameterSet, SeriesOptions};

/// Order `μ` with `Re μ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    pub mu: C64,
    /// `⌈Re μ⌉`
    pub n_ceil: usize,
}

impl FracOrder {
    pub fn new(mu: C64) -> Result<Self> {
        if !(mu.re > 0.0) || !mu.im.is_finite() {
            return Err(Error::Domain(format!(
                "fractional order needs Re mu > 0, got {mu}"
            )));
        }
        Ok(Self {
            mu,
            n_ceil: mu.re.ceil() as usize,
        })
    }

    pub fn real(mu: f64) -> Result<Self> {
        Self::new(C64::new(mu, 0.0))
    }
}

fn positive_x(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x must be a positive real, got {x}")));
    }
    Ok(())
}

/// `I^μ(x^{A−I}) = Γ(A) Γ⁻¹(A+μI) x^{A+(μ−1)I}` for positive stable `A`.
pub fn frac_int_monomial(a: &CMatrix, mu: FracOrder, x: f64) -> Result<CMatrix> {
    positive_x(x)?;
    let sb = gammakit::spectral_bounds(a)?;
    if !sb.is_positive_stable() {
        return Err(Error::Precondition(format!(
            "A must be positive stable (min Re eigenvalue {})",
            sb.beta
        )));
    }
    let r = a.nrows();
    let shifted = a + scalar_matrix(r, mu.mu);
    let power = matcore::matpow_base(x, &(a + scalar_matrix(r, mu.mu - 1.0)))?;
    Ok(gamma_m(a)? * rgamma_m(&shifted)? * power)
}

/// `R(x) x^{D_j−I}`.
pub fn weighted(params: &ParameterSet, j: usize, x: f64, opts: &SeriesOptions) -> Result<CMatrix> {
    positive_x(x)?;
    check_index(params, j)?;
    let dj = &params.d[j - 1];
    Ok(series::eval(params, C64::new(x, 0.0), opts)?.value
        * matcore::matpow_base(x, &(dj - identity(params.dim())))?)
}

fn check_index(params: &ParameterSet, j: usize) -> Result<()> {
    if j == 0 || j > params.q() {
        return Err(Error::InvalidArgument(format!(
            "D index {j} out of range 1..={}",
            params.q()
        )));
    }
    Ok(())
}

/// `D_j` commutes with the other denominators and is positive stable.
fn hypotheses(params: &ParameterSet, j: usize, opts: &SeriesOptions) -> Result<()> {
    check_index(params, j)?;
    let dj = &params.d[j - 1];
    let mut unmet = Vec::new();
    for (k, dk) in params.d.iter().enumerate() {
        let c = commutator_rel(dj, dk);
        if k + 1 != j && c > opts.commutator_tol {
            unmet.push(format!(
                "D{j} does not commute with D{} (relative commutator {c:.3e})",
                k + 1
            ));
        }
    }
    let sb = gammakit::spectral_bounds(dj)?;
    if !sb.is_positive_stable() {
        unmet.push(format!(
            "D{j} is not positive stable (min Re eigenvalue {})",
            sb.beta
        ));
    }
    if unmet.is_empty() {
        Ok(())
    } else {
        Err(Error::Precondition(unmet.join("; ")))
    }
}

/// `I^μ[R x^{D_j−I}] = R(D_j+μI)(x) x^{D_j+(μ−1)I} Γ(D_j) Γ⁻¹(D_j+μI)`
pub fn frac_integral(
    params: &ParameterSet,
    j: usize,
    mu: FracOrder,
    x: f64,
    opts: &SeriesOptions,
) -> Result<CMatrix> {
    positive_x(x)?;
    hypotheses(params, j, opts)?;
    let r = params.dim();
    let dj = &params.d[j - 1];
    let raised = params.shift_d(j, mu.mu)?;
    let value = series::eval(&raised, C64::new(x, 0.0), opts)?.value;
    let power = matcore::matpow_base(x, &(dj + scalar_matrix(r, mu.mu - 1.0)))?;
    Ok(value * power * gamma_m(dj)? * rgamma_m(&raised.d[j - 1])?)
}

/// `D^μ[R x^{D_j−I}] = R(D_j−μI)(x) x^{D_j−(μ+1)I} Γ(D_j) Γ⁻¹(D_j−μI)`
pub fn frac_derivative(
    params: &ParameterSet,
    j: usize,
    mu: FracOrder,
    x: f64,
    opts: &SeriesOptions,
) -> Result<CMatrix> {
    positive_x(x)?;
    hypotheses(params, j, opts)?;
    let r = params.dim();
    let dj = &params.d[j - 1];
    let lowered = params.shift_d(j, -mu.mu)?;
    let value = series::eval(&lowered, C64::new(x, 0.0), opts)?.value;
    let power = matcore::matpow_base(x, &(dj - scalar_matrix(r, mu.mu + 1.0)))?;
    Ok(value * power * gamma_m(dj)? * rgamma_m(&lowered.d[j - 1])?)
}

const ORACLE_LEVELS: usize = 40;
/// Relative node-doubling change accepted by the quadrature oracle.
pub const ORACLE_TOL: f64 = 1e-8;

fn rl_quad_once(
    f: &mut dyn FnMut(f64) -> Result<CMatrix>,
    mu: FracOrder,
    x: f64,
    n: usize,
) -> Result<CMatrix> {
    let m1 = mu.mu - 1.0;
    // u in (0, 1/2]: (1−u)^{μ−1} is smooth, f may be singular at 0
    let gl = jacobi_rule(0.0, 0.0, (n / 2).max(4))?;
    let mut acc: Option<CMatrix> = None;
    let mut add = |v: CMatrix| {
        acc = Some(match acc.take() {
            Some(a) => a + v,
            None => v,
        })
    };
    let mut hi = 0.5;
    let mut panels = Vec::with_capacity(ORACLE_LEVELS);
    for _ in 0..ORACLE_LEVELS {
        panels.push((hi * GRADE, hi));
        hi *= GRADE;
    }
    // smallest contributions first
    for &(lo, hi) in panels.iter().rev() {
        for (u, w) in legendre_on(&gl, lo, hi) {
            let k = (m1 * (1.0 - u).ln()).exp() * w;
            add(f(x * u)? * k);
        }
    }
    // u = 1 − v/2, v in (0, 1): (1−u)^{μ−1} du = (1/2)^μ v^{μ−1} dv
    let rule = jacobi_rule(mu.mu.re - 1.0, 0.0, n)?;
    let half = (-mu.mu * std::f64::consts::LN_2).exp();
    for (&v, &w) in rule.nodes.iter().zip(&rule.weights).rev() {
        let phase = (C64::new(0.0, mu.mu.im) * v.ln()).exp();
        add(f(x * (1.0 - 0.5 * v))? * (half * phase * w));
    }
    let total = acc.ok_or_else(|| Error::Numeric("empty quadrature".into()))?;
    let g = scalar::gamma(mu.mu)
        .ok_or_else(|| Error::Domain(format!("gamma pole at mu = {}", mu.mu)))?;
    Ok(total * ((mu.mu * x.ln()).exp() / g))
}

/// `(I^μ f)(x) = Γ(μ)⁻¹ ∫_0^x (x−t)^{μ−1} f(t) dt` by quadrature, with the
/// kernel singularity in the Jacobi weight. `f` may have an integrable
/// algebraic singularity at 0.
pub fn rl_quad_oracle(
    mut f: impl FnMut(f64) -> Result<CMatrix>,
    mu: FracOrder,
    x: f64,
    n_nodes: usize,
) -> Result<CMatrix> {
    positive_x(x)?;
    if n_nodes == 0 {
        return Err(Error::InvalidArgument("node count must be >= 1".into()));
    }
    let coarse = rl_quad_once(&mut f, mu, x, n_nodes)?;
    let fine = rl_quad_once(&mut f, mu, x, 2 * n_nodes)?;
    let change = fro_norm(&(&fine - &coarse)) / fro_norm(&fine).max(1e-300);
    if !(change <= ORACLE_TOL) {
        return Err(Error::Accuracy(format!(
            "fractional quadrature did not settle: {n_nodes} vs {} nodes differ by {change:.3e}",
            2 * n_nodes
        )));
    }
    Ok(fine)
}

/// `D^μ f = D^n I^{n−μ} f` with `n = ⌈Re μ⌉`, the outer derivative taken by a
/// five-point difference of [`rl_quad_oracle`]. Supports `n ≤ 2`.
pub fn rl_derivative_oracle(
    mut f: impl FnMut(f64) -> Result<CMatrix>,
    mu: FracOrder,
    x: f64,
    n_nodes: usize,
) -> Result<CMatrix> {
    positive_x(x)?;
    let n = mu.n_ceil;
    if n > 2 {
        return Err(Error::InvalidArgument(format!(
            "derivative oracle supports ceil(Re mu) <= 2, got {n}"
        )));
    }
    let rest = C64::new(n as f64, 0.0) - mu.mu;
    let integer = rest.re == 0.0;
    if integer && rest.im != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "order {} leaves a purely imaginary integral order",
            mu.mu
        )));
    }
    let mut g = |y: f64| -> Result<CMatrix> {
        if integer {
            f(y)
        } else {
            rl_quad_oracle(&mut f, FracOrder::new(rest)?, y, n_nodes)
        }
    };
    let h = (if n == 1 { 2e-3 } else { 1e-2 }) * x;
    let (m2, m1, p1, p2) = (g(x - 2.0 * h)?, g(x - h)?, g(x + h)?, g(x + 2.0 * h)?);
    Ok(if n == 1 {
        (m2 - m1 * C64::new(8.0, 0.0) + p1 * C64::new(8.0, 0.0) - p2) / C64::new(12.0 * h, 0.0)
    } else {
        let g0 = g(x)?;
        (-m2 + m1 * C64::new(16.0, 0.0) - g0 * C64::new(30.0, 0.0) + p1 * C64::new(16.0, 0.0) - p2)
            / C64::new(12.0 * h * h, 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::diag;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
        fro_norm(&(a - b)) / fro_norm(b)
    }

    #[test]
    fn order_validation() {
        let o = FracOrder::real(1.7).unwrap();
        assert_eq!(o.n_ceil, 2);
        assert_eq!(FracOrder::real(1.0).unwrap().n_ceil, 1);
        assert!(matches!(FracOrder::real(0.0), Err(Error::Domain(_))));
        assert!(matches!(
            FracOrder::new(C64::new(-0.5, 1.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn monomial_examples() {
        let one = FracOrder::real(1.0).unwrap();
        let v = frac_int_monomial(&identity(2), one, 2.0).unwrap();
        assert!(fro_norm(&(v - identity(2) * c(2.0))) < 1e-14);
        let a = CMatrix::from_element(1, 1, c(1.5));
        let v = frac_int_monomial(&a, FracOrder::real(0.5).unwrap(), 1.0).unwrap();
        assert!((v[(0, 0)].re - 0.886_226_925_452_758).abs() < 1e-14);
        let v = frac_int_monomial(&diag(&[1.0, 2.0]), one, 1.0).unwrap();
        assert!(fro_norm(&(v - diag(&[1.0, 0.5]))) < 1e-14);
        assert!(matches!(
            frac_int_monomial(&diag(&[1.0, -0.5]), one, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn oracle_examples() {
        let one = FracOrder::real(1.0).unwrap();
        let v = rl_quad_oracle(|_| Ok(identity(2)), one, 2.0, 16).unwrap();
        assert!(fro_norm(&(v - identity(2) * c(2.0))) < 1e-13);
        let v = rl_quad_oracle(|t| Ok(identity(2) * c(t)), one, 1.0, 16).unwrap();
        assert!(fro_norm(&(v - identity(2) * c(0.5))) < 1e-13);
        let half = FracOrder::real(0.5).unwrap();
        let v = rl_quad_oracle(|t| Ok(identity(1) * c(t.sqrt())), half, 1.0, 32).unwrap();
        assert!((v[(0, 0)].re - 0.886_226_925_452_758).abs() < 1e-10);
    }

    #[test]
    fn closed_forms_match_oracle() {
        let opts = SeriesOptions::default();
        let p = ParameterSet::new(
            diag(&[1.0, 1.3]),
            diag(&[1.0, 1.6]),
            vec![diag(&[1.2, 0.9])],
            vec![diag(&[2.0, 1.4])],
        )
        .unwrap();
        for mu in [0.5, 1.0, 1.7] {
            let o = FracOrder::real(mu).unwrap();
            let closed = frac_integral(&p, 1, o, 0.4, &opts).unwrap();
            let oracle = rl_quad_oracle(|t| weighted(&p, 1, t, &opts), o, 0.4, 32).unwrap();
            assert!(rel(&closed, &oracle) <= 1e-8, "mu={mu}");
        }
        for mu in [0.5, 1.0, 1.5] {
            let o = FracOrder::real(mu).unwrap();
            let closed = frac_derivative(&p, 1, o, 0.4, &opts).unwrap();
            let oracle = rl_derivative_oracle(|t| weighted(&p, 1, t, &opts), o, 0.4, 32).unwrap();
            assert!(rel(&closed, &oracle) <= 1e-6, "mu={mu}");
        }
    }

    #[test]
    fn integral_then_derivative_round_trip() {
        let opts = SeriesOptions::default();
        let p = ParameterSet::scalar(1.0, 1.0, &[1.2], &[2.0]);
        let o = FracOrder::real(0.6).unwrap();
        // D^μ applied to I^μ[R x^{D−I}], written as a weighted series in D+μ
        let raised = p.shift_d(1, o.mu).unwrap();
        let factor = gamma_m(&p.d[0]).unwrap() * rgamma_m(&raised.d[0]).unwrap();
        let back = frac_derivative(&raised, 1, o, 0.5, &opts).unwrap() * factor;
        let direct = weighted(&p, 1, 0.5, &opts).unwrap();
        assert!(rel(&back, &direct) <= 1e-12);
    }

    #[test]
    fn hypothesis_errors() {
        let opts = SeriesOptions::default();
        let o = FracOrder::real(0.5).unwrap();
        let p = ParameterSet::scalar(1.0, 1.0, &[1.2], &[-0.5]);
        assert!(matches!(
            frac_integral(&p, 1, o, 0.5, &opts),
            Err(Error::Precondition(_))
        ));
        let p = ParameterSet::scalar(1.0, 1.0, &[1.2], &[2.0]);
        assert!(matches!(
            frac_integral(&p, 1, o, -0.5, &opts),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            frac_integral(&p, 2, o, 0.5, &opts),
            Err(Error::InvalidArgument(_))
        ));
        // D − μ = 1 − 1 = 0 makes the lowered series singular
        let p = ParameterSet::scalar(1.0, 1.0, &[1.2], &[1.0]);
        match frac_derivative(&p, 1, FracOrder::real(1.0).unwrap(), 0.5, &opts) {
            Err(Error::Precondition(m)) => assert!(m.contains("D1 + 0I"), "{m}"),
            other => panic!("{other:?}"),
        }
    }
}
