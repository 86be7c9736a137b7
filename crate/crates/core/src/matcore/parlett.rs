//! Block Schur-Parlett evaluation of `f(T)` for upper triangular `T`.
//!
//! Eigenvalues closer than [`CLUSTER_DELTA`] are grouped and moved next to each
//! other with Givens swaps; diagonal blocks are evaluated by a Taylor series
//! around the cluster mean and the off-diagonal blocks follow from the Parlett
//! recurrence, one triangular Sylvester solve per block.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::analytic::AnalyticFn;
use super::{fro_norm, CMatrix};
use crate::error::{Error, Result};

pub(crate) const CLUSTER_DELTA: f64 = 0.1;
const TAYLOR_TERMS: usize = 48;

/// Computes `Q f(T) Q^H` given the Schur pair `(Q, T)`.
pub(crate) fn schur_parlett(q: &CMatrix, t: &CMatrix, f: &dyn AnalyticFn) -> Result<CMatrix> {
    let n = t.nrows();
    let mut q = q.clone();
    let mut t = t.clone();

    let mut labels = cluster_labels(&t);
    reorder_clusters(&mut t, &mut q, &mut labels);

    // contiguous index ranges, one per cluster
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for k in 1..=n {
        if k == n || labels[k] != labels[start] {
            blocks.push((start, k));
            start = k;
        }
    }

    let mut fm = CMatrix::zeros(n, n);
    for &(lo, hi) in &blocks {
        let tb = t.view((lo, lo), (hi - lo, hi - lo)).into_owned();
        let fb = taylor_block(&tb, f)?;
        fm.view_mut((lo, lo), (hi - lo, hi - lo)).copy_from(&fb);
    }

    let nb = blocks.len();
    for d in 1..nb {
        for i in 0..nb - d {
            let j = i + d;
            let (ilo, ihi) = blocks[i];
            let (jlo, jhi) = blocks[j];
            let (mi, mj) = (ihi - ilo, jhi - jlo);
            let tii = t.view((ilo, ilo), (mi, mi));
            let tjj = t.view((jlo, jlo), (mj, mj));
            let tij = t.view((ilo, jlo), (mi, mj));
            let fii = fm.view((ilo, ilo), (mi, mi));
            let fjj = fm.view((jlo, jlo), (mj, mj));
            let mut rhs = fii * tij - tij * fjj;
            for &(klo, khi) in &blocks[i + 1..j] {
                let mk = khi - klo;
                rhs += fm.view((ilo, klo), (mi, mk)) * t.view((klo, jlo), (mk, mj))
                    - t.view((ilo, klo), (mi, mk)) * fm.view((klo, jlo), (mk, mj));
            }
            let x = solve_triangular_sylvester(&tii.into_owned(), &tjj.into_owned(), &rhs)?;
            fm.view_mut((ilo, jlo), (mi, mj)).copy_from(&x);
        }
    }

    Ok(&q * fm * q.adjoint())
}

fn cluster_labels(t: &CMatrix) -> Vec<usize> {
    let n = t.nrows();
    let mut labels: Vec<usize> = (0..n).collect();
    // union by smallest label, repeated until stable (n is small)
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in i + 1..n {
                if (t[(i, i)] - t[(j, j)]).norm() <= CLUSTER_DELTA && labels[i] != labels[j] {
                    let (keep, drop) = (labels[i].min(labels[j]), labels[i].max(labels[j]));
                    for l in labels.iter_mut() {
                        if *l == drop {
                            *l = keep;
                        }
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            return labels;
        }
    }
}

/// Bubble sort of the diagonal by cluster label using unitary adjacent swaps.
fn reorder_clusters(t: &mut CMatrix, q: &mut CMatrix, labels: &mut [usize]) {
    let n = labels.len();
    // order clusters by first appearance
    let mut first_seen: Vec<usize> = Vec::new();
    for &l in labels.iter() {
        if !first_seen.contains(&l) {
            first_seen.push(l);
        }
    }
    let rank = |l: usize| first_seen.iter().position(|&x| x == l).unwrap();
    let mut swapped = true;
    while swapped {
        swapped = false;
        for k in 0..n.saturating_sub(1) {
            if rank(labels[k]) > rank(labels[k + 1]) {
                swap_adjacent(t, q, k);
                labels.swap(k, k + 1);
                swapped = true;
            }
        }
    }
}

/// Exchanges the diagonal entries `k` and `k+1` of the triangular `t`,
/// updating `q` so that `q t q^H` is unchanged.
fn swap_adjacent(t: &mut CMatrix, q: &mut CMatrix, k: usize) {
    let n = t.nrows();
    let a = t[(k, k)];
    let b = t[(k + 1, k + 1)];
    let x0 = t[(k, k + 1)];
    let x1 = b - a;
    let nrm = (x0.norm_sqr() + x1.norm_sqr()).sqrt();
    if nrm == 0.0 {
        return;
    }
    let (g00, g10) = (x0 / nrm, x1 / nrm);
    let (g01, g11) = (-g10.conj(), g00.conj());
    // rows: t <- G^H t
    for c in 0..n {
        let (r0, r1) = (t[(k, c)], t[(k + 1, c)]);
        t[(k, c)] = g00.conj() * r0 + g10.conj() * r1;
        t[(k + 1, c)] = g01.conj() * r0 + g11.conj() * r1;
    }
    // columns: t <- t G, q <- q G
    for m in [&mut *t, &mut *q] {
        for r in 0..n {
            let (c0, c1) = (m[(r, k)], m[(r, k + 1)]);
            m[(r, k)] = c0 * g00 + c1 * g10;
            m[(r, k + 1)] = c0 * g01 + c1 * g11;
        }
    }
    t[(k + 1, k)] = C64::new(0.0, 0.0);
}

/// `f(T)` for a triangular block with clustered eigenvalues via a Taylor
/// expansion about the mean eigenvalue.
fn taylor_block(tb: &CMatrix, f: &dyn AnalyticFn) -> Result<CMatrix> {
    let m = tb.nrows();
    if m == 1 {
        let z = tb[(0, 0)];
        let v = f
            .value(z)
            .ok_or_else(|| Error::Domain(format!("function undefined at eigenvalue {z}")))?;
        return Ok(DMatrix::from_element(1, 1, v));
    }
    let strictly_upper_zero = (0..m).all(|i| (i + 1..m).all(|j| tb[(i, j)] == C64::new(0.0, 0.0)));
    if strictly_upper_zero {
        let mut out = CMatrix::zeros(m, m);
        for i in 0..m {
            let z = tb[(i, i)];
            out[(i, i)] = f
                .value(z)
                .ok_or_else(|| Error::Domain(format!("function undefined at eigenvalue {z}")))?;
        }
        return Ok(out);
    }
    let sigma = tb.diagonal().iter().sum::<C64>() / m as f64;
    let spread = tb
        .diagonal()
        .iter()
        .map(|z| (z - sigma).norm())
        .fold(0.0, f64::max);
    let limit = 0.5 * f.analytic_radius(sigma);
    let radius = (4.0 * spread).max(1.0).min(limit);
    if radius <= 1.2 * spread {
        return Err(Error::Domain(format!(
            "eigenvalue cluster around {sigma} is too close to a singularity of the function"
        )));
    }
    let coeffs = f.taylor(sigma, radius, TAYLOR_TERMS).ok_or_else(|| {
        Error::Domain(format!(
            "function undefined near eigenvalue cluster {sigma}"
        ))
    })?;

    let shifted = tb - CMatrix::identity(m, m) * sigma;
    let mut power = CMatrix::identity(m, m);
    let mut acc = CMatrix::zeros(m, m);
    let mut small_run = 0;
    for (k, ck) in coeffs.iter().enumerate() {
        let term = &power * *ck;
        acc += &term;
        if k + 1 >= m && fro_norm(&term) <= f64::EPSILON * fro_norm(&acc) {
            small_run += 1;
            if small_run >= 2 {
                break;
            }
        } else {
            small_run = 0;
        }
        power = &power * &shifted;
        if power.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            break;
        }
    }
    Ok(acc)
}

/// Solves `a x - x b = c` for upper triangular `a` and `b` with disjoint spectra.
fn solve_triangular_sylvester(a: &CMatrix, b: &CMatrix, c: &CMatrix) -> Result<CMatrix> {
    let (m, n) = (a.nrows(), b.nrows());
    let mut x = CMatrix::zeros(m, n);
    for col in 0..n {
        let mut rhs = c.column(col).into_owned();
        for l in 0..col {
            rhs += x.column(l) * b[(l, col)];
        }
        let shift = b[(col, col)];
        for i in (0..m).rev() {
            let mut s = rhs[i];
            for k in i + 1..m {
                s -= a[(i, k)] * x[(k, col)];
            }
            let d = a[(i, i)] - shift;
            if d.norm() == 0.0 {
                return Err(Error::Numeric(
                    "Sylvester solve hit coincident eigenvalues across clusters".into(),
                ));
            }
            x[(i, col)] = s.fdiv(d);
        }
    }
    Ok(x)
}
