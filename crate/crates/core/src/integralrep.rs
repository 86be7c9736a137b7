//! Euler-type integral representation, evaluated by Gauss-Jacobi quadrature
//! and used to cross-check the series.
//!
//! ```text
//! R(z) = ∫₀¹ R'(tz) t^{C_p−I} (1−t)^{D_q−C_p−I} dt · Γ(D_q) Γ⁻¹(C_p) Γ⁻¹(D_q−C_p)
//! ```
//!
//! where `R'` drops `C_p` and `D_q` from the parameter set.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gammakit::{self, gamma_m, rgamma_m};
use crate::matcore::{self, commutator_rel, fro_norm, CMatrix, SpectralDecomposition};
use crate::quad::graded_kernel_integral;
pub use crate::quad::{jacobi_rule, JacobiQuadRule};
use crate::relations::HypothesisMode;
use crate::series::{Expansion, ParameterSet, SeriesOptions};

/// Default node count for [`eval_integral`].
pub const DEFAULT_NODES: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralResult {
    /// Value from the doubled rule.
    pub value: CMatrix,
    /// Node count of the doubled rule (per kernel component).
    pub nodes_used: usize,
    /// Relative change between `n` and `2n` nodes.
    pub doubling_change: f64,
    /// True when the kernel split into scalar Jacobi weights per
    /// eigencomponent; false for the graded fallback.
    pub exact_weights: bool,
    pub hypotheses_met: bool,
    pub unmet: Vec<String>,
}

/// Kernel `t^{C−I}(1−t)^{E−I}` written as `Σ_g P_g t^{c_g−1}(1−t)^{e_g−1}`.
struct SplitKernel {
    parts: Vec<(C64, C64, CMatrix)>,
}

const MIX: [f64; 3] = [
    0.618_033_988_749_894_8,
    1.324_717_957_244_746,
    -0.377_964_473_009_227_2,
];

fn split_kernel(c: &CMatrix, e: &CMatrix) -> Option<SplitKernel> {
    let dim = c.nrows();
    for xi in MIX {
        let x = c + e * C64::new(xi, 0.0);
        let Ok(SpectralDecomposition::Diagonalizable { v, v_inv, .. }) =
            matcore::decompose(&x, matcore::DEFAULT_COND_THRESHOLD)
        else {
            continue;
        };
        let ct = &v_inv * c * &v;
        let et = &v_inv * e * &v;
        let off = |m: &CMatrix| {
            let mut s = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    if i != j {
                        s += m[(i, j)].norm_sqr();
                    }
                }
            }
            s.sqrt()
        };
        if off(&ct) > 1e-9 * fro_norm(&ct).max(1.0) || off(&et) > 1e-9 * fro_norm(&et).max(1.0) {
            continue;
        }
        let mut groups: Vec<(C64, C64, Vec<usize>)> = Vec::new();
        for k in 0..dim {
            let (ck, ek) = (ct[(k, k)], et[(k, k)]);
            let close = |a: C64, b: C64| (a - b).norm() <= 1e-12 * a.norm().max(1.0);
            match groups.iter_mut().find(|g| close(g.0, ck) && close(g.1, ek)) {
                Some(g) => g.2.push(k),
                None => groups.push((ck, ek, vec![k])),
            }
        }
        let parts = groups
            .into_iter()
            .map(|(ck, ek, idx)| {
                let mut sel = CMatrix::zeros(dim, dim);
                for k in idx {
                    sel[(k, k)] = C64::new(1.0, 0.0);
                }
                (ck, ek, &v * sel * &v_inv)
            })
            .collect();
        return Some(SplitKernel { parts });
    }
    None
}

fn inner_params(params: &ParameterSet) -> ParameterSet {
    ParameterSet {
        a: params.a.clone(),
        b: params.b.clone(),
        c: params.c[..params.p() - 1].to_vec(),
        d: params.d[..params.q() - 1].to_vec(),
    }
}

/// `∫₀¹ R'(tz) K(t) dt` with an `n`-node rule per kernel component.
fn kernel_integral(inner: &Expansion, z: C64, kernel: &Kernel, n: usize) -> Result<CMatrix> {
    match kernel {
        Kernel::Split(split) => {
            let mut total: Option<CMatrix> = None;
            for (c, e, proj) in &split.parts {
                let rule = jacobi_rule(c.re - 1.0, e.re - 1.0, n)?;
                let part = rule.integrate_matrix(|t| {
                    let phase =
                        (C64::new(0.0, c.im) * t.ln() + C64::new(0.0, e.im) * (1.0 - t).ln()).exp();
                    Ok(inner.eval(z * t)? * phase)
                })?;
                let Some(part) = part else { continue };
                let v = part * proj;
                total = Some(match total {
                    Some(t) => t + v,
                    None => v,
                });
            }
            total.ok_or_else(|| Error::Numeric("empty kernel".into()))
        }
        Kernel::Graded { c, e } => {
            let panel = (n / 4).clamp(8, 64);
            graded_kernel_integral(|t| inner.eval(z * t), c, e, panel)
        }
    }
}

enum Kernel {
    Split(SplitKernel),
    /// No common eigenbasis: graded panels with exact endpoint pieces, node
    /// count per panel derived from `n`.
    Graded {
        c: CMatrix,
        e: CMatrix,
    },
}

/// Integral representation at `z` with full diagnostics.
pub fn eval_integral_with(
    params: &ParameterSet,
    z: C64,
    n_nodes: usize,
    opts: &SeriesOptions,
    mode: HypothesisMode,
) -> Result<IntegralResult> {
    let (p, q) = (params.p(), params.q());
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument(format!(
            "integral representation needs p >= 1 and q >= 1, got p = {p}, q = {q}"
        )));
    }
    if n_nodes == 0 {
        return Err(Error::InvalidArgument("node count must be >= 1".into()));
    }
    let cp = &params.c[p - 1];
    let dq = &params.d[q - 1];
    let e = dq - cp;

    let mut unmet = Vec::new();
    let mut unstable = Vec::new();
    for (name, m) in [("C_p", cp), ("D_q", dq), ("D_q - C_p", &e)] {
        let sb = gammakit::spectral_bounds(m)?;
        if !sb.is_positive_stable() {
            unstable.push(format!(
                "{name} is not positive stable (min Re eigenvalue {})",
                sb.beta
            ));
        }
    }
    for (j, dj) in params.d.iter().enumerate() {
        let c = commutator_rel(cp, dj);
        if c > opts.commutator_tol {
            unmet.push(format!(
                "C_p does not commute with D{} (relative commutator {c:.3e})",
                j + 1
            ));
        }
    }
    if !(z.norm() < 1.0) {
        unmet.push(format!("|z| = {} is not below 1", z.norm()));
    }
    if !unstable.is_empty() {
        // the integral itself does not exist
        unstable.extend(unmet);
        return Err(Error::Precondition(unstable.join("; ")));
    }
    if mode == HypothesisMode::Strict && !unmet.is_empty() {
        return Err(Error::Precondition(unmet.join("; ")));
    }

    let inner = Expansion::new(&inner_params(params), z.norm(), opts)?;
    let kernel = match split_kernel(cp, &e) {
        Some(s) => Kernel::Split(s),
        None => Kernel::Graded {
            c: cp.clone(),
            e: e.clone(),
        },
    };
    let coarse = kernel_integral(&inner, z, &kernel, n_nodes)?;
    let fine = kernel_integral(&inner, z, &kernel, 2 * n_nodes)?;
    if !matcore::is_finite(&coarse) || !matcore::is_finite(&fine) {
        return Err(Error::Numeric("integral value is not finite".into()));
    }
    let change = fro_norm(&(&fine - &coarse)) / fro_norm(&fine).max(f64::MIN_POSITIVE);
    let allowed = (100.0 * opts.rel_tol).max(1e-10);
    if !(change <= allowed) {
        return Err(Error::Accuracy(format!(
            "quadrature did not settle: {n_nodes} vs {} nodes differ by {change:.3e} (allowed {allowed:.1e})",
            2 * n_nodes
        )));
    }
    let factor = gamma_m(dq)? * rgamma_m(cp)? * rgamma_m(&e)?;
    Ok(IntegralResult {
        value: fine * factor,
        nodes_used: 2 * n_nodes,
        doubling_change: change,
        exact_weights: matches!(kernel, Kernel::Split(_)),
        hypotheses_met: unmet.is_empty(),
        unmet,
    })
}

/// Integral representation at `z`, hypotheses enforced.
pub fn eval_integral(
    params: &ParameterSet,
    z: C64,
    n_nodes: usize,
    opts: &SeriesOptions,
) -> Result<CMatrix> {
    Ok(eval_integral_with(params, z, n_nodes, opts, HypothesisMode::Strict)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{diag, real_matrix};
    use crate::series;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
        fro_norm(&(a - b)) / fro_norm(b)
    }

    #[test]
    fn scalar_matches_series() {
        let p = ParameterSet::scalar(1.0, 1.0, &[1.5], &[3.0]);
        let opts = SeriesOptions::default();
        let i = eval_integral(&p, c(0.5), DEFAULT_NODES, &opts).unwrap();
        let s = series::eval(&p, c(0.5), &opts).unwrap().value;
        assert!(rel(&i, &s) <= 1e-8, "{i} {s}");
    }

    #[test]
    fn zero_argument_gives_reciprocal_gamma() {
        let p = ParameterSet::new(
            diag(&[1.0, 2.0]),
            diag(&[1.5, 2.5]),
            vec![diag(&[0.7, 1.2])],
            vec![diag(&[2.0, 1.9])],
        )
        .unwrap();
        let i = eval_integral(&p, c(0.0), 32, &SeriesOptions::default()).unwrap();
        let g = rgamma_m(&p.b).unwrap();
        assert!(rel(&i, &g) <= 1e-10);
    }

    #[test]
    fn diagonal_two_numerators() {
        let p = ParameterSet::new(
            diag(&[1.0, 1.5]),
            diag(&[1.0, 2.0]),
            vec![diag(&[0.8, 1.3]), diag(&[1.1, 0.6])],
            vec![diag(&[2.4, 1.9])],
        )
        .unwrap();
        let opts = SeriesOptions::default();
        let i = eval_integral(&p, c(0.4), DEFAULT_NODES, &opts).unwrap();
        let s = series::eval(&p, c(0.4), &opts).unwrap().value;
        assert!(rel(&i, &s) <= 1e-8);
    }

    #[test]
    fn jordan_kernel_uses_fallback() {
        // C_p with a Jordan block: no eigenbasis, worst-case exponents
        let cp = real_matrix(2, &[1.5, 1.0, 0.0, 1.5]);
        let dq = real_matrix(2, &[3.0, 0.5, 0.0, 3.0]);
        let p = ParameterSet::new(
            matcore::identity(2),
            matcore::identity(2),
            vec![cp],
            vec![dq],
        )
        .unwrap();
        let opts = SeriesOptions::default();
        let r =
            eval_integral_with(&p, c(0.3), DEFAULT_NODES, &opts, HypothesisMode::Strict).unwrap();
        assert!(!r.exact_weights);
        let s = series::eval(&p, c(0.3), &opts).unwrap().value;
        assert!(rel(&r.value, &s) <= 1e-8);
    }

    #[test]
    fn hypothesis_errors() {
        let opts = SeriesOptions::default();
        let p = ParameterSet::scalar(1.0, 1.0, &[1.5], &[3.0]);
        assert!(matches!(
            eval_integral(&p, c(1.2), 16, &opts),
            Err(Error::Precondition(m)) if m.contains("|z|")
        ));
        let p = ParameterSet::scalar(1.0, 1.0, &[2.0], &[1.5]);
        assert!(matches!(
            eval_integral(&p, c(0.2), 16, &opts),
            Err(Error::Precondition(m)) if m.contains("D_q - C_p")
        ));
        let p = ParameterSet::scalar(1.0, 1.0, &[], &[1.5]);
        assert!(matches!(
            eval_integral(&p, c(0.2), 16, &opts),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn noncommuting_probe_reports() {
        let p = ParameterSet::new(
            matcore::identity(2),
            matcore::identity(2),
            vec![real_matrix(2, &[1.0, 1.0, 0.0, 1.5])],
            vec![real_matrix(2, &[3.0, 0.0, 1.0, 3.5])],
        )
        .unwrap();
        let opts = SeriesOptions::default();
        assert!(matches!(
            eval_integral(&p, c(0.3), 64, &opts),
            Err(Error::Precondition(m)) if m.contains("D1")
        ));
        let r = eval_integral_with(&p, c(0.3), 64, &opts, HypothesisMode::Probe).unwrap();
        assert!(!r.hypotheses_met);
    }
}
