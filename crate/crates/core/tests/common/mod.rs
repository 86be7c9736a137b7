#![allow(dead_code)]

use std::io::Write;

use matfn::matcore::{self, fro_norm, CMatrix};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    fro_norm(&(a - b)) / fro_norm(b).max(f64::MIN_POSITIVE)
}

/// One unbuffered line on stderr, visible even when test output is captured.
pub fn announce(line: &str) {
    let mut e = std::io::stderr().lock();
    let _ = writeln!(e, "{line}");
}

/// Random well-conditioned complex similarity `(S, S⁻¹)` with cond(S) < 100.
pub fn similarity(rng: &mut ChaCha8Rng, r: usize) -> (CMatrix, CMatrix) {
    loop {
        let s = CMatrix::from_fn(r, r, |i, j| {
            let base = if i == j { 1.0 } else { 0.0 };
            C64::new(base + rng.gen_range(-0.6..0.6), rng.gen_range(-0.3..0.3))
        });
        let sv = s.clone().singular_values();
        if sv.max() / sv.min() < 100.0 {
            let inv = s.clone().try_inverse().expect("well conditioned");
            return (s, inv);
        }
    }
}

/// `S diag(spectrum) S⁻¹`
pub fn with_spectrum(sim: &(CMatrix, CMatrix), spectrum: &[C64]) -> CMatrix {
    &sim.0 * matcore::diag_c(spectrum) * &sim.1
}

pub fn real_spectrum(rng: &mut ChaCha8Rng, r: usize, lo: f64, hi: f64) -> Vec<C64> {
    (0..r).map(|_| c(rng.gen_range(lo..hi))).collect()
}

/// Spectrum in `[lo, hi]` kept at least `gap` away from every integer.
pub fn off_integer_spectrum(
    rng: &mut ChaCha8Rng,
    r: usize,
    lo: f64,
    hi: f64,
    gap: f64,
) -> Vec<C64> {
    (0..r)
        .map(|_| loop {
            let x: f64 = rng.gen_range(lo..hi);
            if (x - x.round()).abs() >= gap {
                break c(x);
            }
        })
        .collect()
}

pub fn point_in_disk(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let r = radius * rng.gen_range(0.05f64..1.0).sqrt();
    C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `ln (x)_n` for `x > 0`.
fn ln_poch(x: f64, n: usize) -> f64 {
    ln_gamma(x + n as f64) - ln_gamma(x)
}

/// Scalar series summed term by term from closed-form log-gamma values
/// (positive real parameters only).
pub fn scalar_series(a: f64, b: f64, cs: &[f64], ds: &[f64], z: C64) -> C64 {
    let mut sum = C64::new(0.0, 0.0);
    let mut small = 0;
    for n in 0..20_000usize {
        let nf = n as f64;
        let arg = nf * a + b;
        assert!(arg > 0.0, "oracle needs positive gamma arguments");
        let mut l = -ln_gamma(arg) - ln_gamma(nf + 1.0);
        for &x in cs {
            l += ln_poch(x, n);
        }
        for &x in ds {
            l -= ln_poch(x, n);
        }
        let t = if n == 0 {
            C64::new(l.exp(), 0.0)
        } else if z == C64::new(0.0, 0.0) {
            C64::new(0.0, 0.0)
        } else {
            (z.ln() * nf + l).exp()
        };
        sum += t;
        if t.norm() <= 1e-19 * sum.norm().max(1e-300) {
            small += 1;
            if small >= 5 {
                break;
            }
        } else {
            small = 0;
        }
    }
    sum
}

/// Composite Gauss-Legendre on `[lo, hi]` with `panels` panels of 10 nodes.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        0.148_874_338_981_631_2,
        0.433_395_394_129_247_2,
        0.679_409_568_299_024_4,
        0.865_063_366_688_984_5,
        0.973_906_528_517_171_7,
    ];
    const W: [f64; 5] = [
        0.295_524_224_714_752_9,
        0.269_266_719_309_996_4,
        0.219_086_362_515_982_04,
        0.149_451_349_150_580_6,
        0.066_671_344_308_688_14,
    ];
    let h = (hi - lo) / panels as f64;
    let mut s = 0.0;
    for k in 0..panels {
        let mid = lo + (k as f64 + 0.5) * h;
        for i in 0..5 {
            let dx = 0.5 * h * X[i];
            s += W[i] * (f(mid - dx) + f(mid + dx));
        }
    }
    0.5 * h * s
}

/// `∫_0^x f` for integrands with an algebraic endpoint singularity at 0:
/// Gauss-Legendre on panels `[x/2^{k+1}, x/2^k]`, `k < 60`.
pub fn graded_legendre(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    (0..60)
        .map(|k| {
            let hi = x / 2f64.powi(k);
            gauss_legendre(&f, hi / 2.0, hi, 2)
        })
        .sum()
}
