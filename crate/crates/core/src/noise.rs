//! Gaussian detection noise and the noisy quantum Cramér-Rao bound (NQCRB).

use std::f64::consts::SQRT_2;
use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use libm::{erf, erfc};

use crate::metrology::{cfi, ProbDist};
use crate::{csv, Error, Result};

const UNDERFLOW: f64 = 1e-300;

/// Column-stochastic confusion matrix `Γ_{m,m′}`: the probability that true
/// outcome `m′` is recorded as `m`.
#[derive(Debug, Clone)]
pub struct NoiseKernel {
    sigma: f64,
    gamma: DMatrix<f64>,
}

impl NoiseKernel {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    /// `Γ v`
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        let mut out = vec![0.0; dim];
        for (j, &x) in v.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (o, g) in out.iter_mut().zip(self.gamma.column(j).iter()) {
                *o += g * x;
            }
        }
        out
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::NegativeSigma(sigma));
    }
    if sigma.is_infinite() {
        return Err(Error::param("sigma", "must be finite"));
    }
    Ok(())
}

/// Column `j` of `Γ(σ)` for `N` particles.
pub fn kernel_column(n_particles: usize, sigma: f64, j: usize) -> Result<Vec<f64>> {
    check_sigma(sigma)?;
    let dim = n_particles + 1;
    if j >= dim {
        return Err(Error::param("column", format!("{j} out of range for N = {n_particles}")));
    }
    let mut col = vec![0.0; dim];
    if sigma == 0.0 {
        col[j] = 1.0;
        return Ok(col);
    }
    let two_var = 2.0 * sigma * sigma;
    for (i, c) in col.iter_mut().enumerate() {
        let d = i as f64 - j as f64;
        *c = (-d * d / two_var).exp();
    }
    let total: f64 = col.iter().sum();
    for c in col.iter_mut() {
        *c /= total;
        if *c < UNDERFLOW {
            *c = 0.0;
        }
    }
    Ok(col)
}

/// `Γ_{m,m′} = e^{−(m−m′)²/2σ²} / Σ_m e^{−(m−m′)²/2σ²}`; `σ = 0` is the identity.
pub fn noise_kernel(n_particles: usize, sigma: f64) -> Result<NoiseKernel> {
    if n_particles == 0 {
        return Err(Error::InvalidDimension(0));
    }
    check_sigma(sigma)?;
    let dim = n_particles + 1;
    let mut gamma = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let col = kernel_column(n_particles, sigma, j)?;
        gamma.column_mut(j).copy_from_slice(&col);
    }
    Ok(NoiseKernel { sigma, gamma })
}

/// `p̃ = Γp`, `dp̃ = Γdp`.
pub fn apply_noise(d: &ProbDist, k: &NoiseKernel) -> Result<ProbDist> {
    if d.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: k.dim(),
            found: d.len(),
        });
    }
    Ok(ProbDist::trusted(k.apply(d.p()), k.apply(d.dp())))
}

/// Half the weight on each of `m = ±N/2` with `dp = ±√f0/2`.
pub fn make_popt(n_particles: usize, f0: f64) -> Result<ProbDist> {
    if n_particles == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if !(f0.is_finite() && f0 >= 0.0) {
        return Err(Error::param("f0", "must be finite and non-negative"));
    }
    let dim = n_particles + 1;
    let mut p = vec![0.0; dim];
    let mut dp = vec![0.0; dim];
    let h = f0.sqrt() / 2.0;
    p[0] = 0.5;
    p[dim - 1] = 0.5;
    dp[0] = -h;
    dp[dim - 1] = h;
    Ok(ProbDist::trusted(p, dp))
}

/// `cfi(Γ(σ) P_opt(N, f_q))`, evaluated from the two end columns of Γ so no
/// `(N+1)²` object is formed.
pub fn nqcrb_numeric(n_particles: usize, f_q: f64, sigma: f64) -> Result<f64> {
    let popt = make_popt(n_particles, f_q)?;
    let lo = kernel_column(n_particles, sigma, 0)?;
    let hi = kernel_column(n_particles, sigma, n_particles)?;
    let (a, b) = (popt.p()[0], popt.dp()[n_particles]);
    let p = lo.iter().zip(&hi).map(|(l, h)| a * l + a * h).collect();
    let dp = lo.iter().zip(&hi).map(|(l, h)| -b * l + b * h).collect();
    cfi(&ProbDist::trusted(p, dp))
}

/// `1 − 2 erf(α/2)/erf(α)`, accurate at both ends of the α range.
fn erf_ratio_complement(alpha: f64) -> f64 {
    let numerator = if alpha < 1.0 {
        // erf(α) − 2 erf(α/2) = 2/√π Σ_{k≥1} (−1)^k (1 − 4^{−k}) α^{2k+1} / (k!(2k+1))
        let a2 = alpha * alpha;
        let mut power = alpha;
        let mut fact = 1.0;
        let mut quarter = 1.0;
        let mut sum = 0.0;
        for k in 1..30 {
            power *= a2;
            fact *= k as f64;
            quarter *= 0.25;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (1.0 - quarter) * power / (fact * (2 * k + 1) as f64);
        }
        sum * 2.0 / std::f64::consts::PI.sqrt()
    } else {
        2.0 * erfc(alpha / 2.0) - erfc(alpha) - 1.0
    };
    numerator / erf(alpha)
}

/// `F_Q (1 − 2 erf(α/2)/erf(α))²` with `α = N/(√2 σ)`; `σ = 0` gives `F_Q`.
pub fn nqcrb_analytic(n_particles: usize, f_q: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if n_particles == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if sigma == 0.0 {
        return Ok(f_q);
    }
    let alpha = n_particles as f64 / (SQRT_2 * sigma);
    if alpha == 0.0 {
        return Ok(0.0);
    }
    if alpha > 40.0 {
        return Ok(f_q);
    }
    let c = erf_ratio_complement(alpha);
    Ok(f_q * c * c)
}

/// `F₀ erf(|b−a|/(2√2σ))²`, the noisy Fisher information of the best
/// two-outcome distribution on outcomes `a` and `b`.
pub fn two_point_cfi(f0: f64, a: f64, b: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    if a == b {
        return Err(Error::param("b", "the two outcomes must differ"));
    }
    if sigma == 0.0 {
        return Ok(f0);
    }
    let e = erf((b - a).abs() / (2.0 * SQRT_2 * sigma));
    Ok(f0 * e * e)
}

/// Numeric and analytic bound at one `(N, σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NqcrbResult {
    pub n_particles: usize,
    pub sigma: f64,
    pub f_q: f64,
    pub f_numeric: f64,
    pub f_analytic: f64,
}

pub fn nqcrb(n_particles: usize, f_q: f64, sigma: f64) -> Result<NqcrbResult> {
    Ok(NqcrbResult {
        n_particles,
        sigma,
        f_q,
        f_numeric: nqcrb_numeric(n_particles, f_q, sigma)?,
        f_analytic: nqcrb_analytic(n_particles, f_q, sigma)?,
    })
}

/// Logarithmic grid of `count` points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// Default `σ/N` grid for bound curves: 50 log-spaced points on `[10⁻², 1]`.
pub fn default_sigma_over_n_grid() -> Vec<f64> {
    log_grid(1e-2, 1.0, 50)
}

/// Bound at each `σ = (σ/N)·N`.
pub fn nqcrb_curve(n_particles: usize, f_q: f64, sigma_over_n: &[f64]) -> Result<Vec<NqcrbResult>> {
    sigma_over_n
        .par_iter()
        .map(|&s| nqcrb(n_particles, f_q, s * n_particles as f64))
        .collect()
}

/// CSV with header `sigma_over_n,f_numeric,f_analytic,f_q`.
pub fn write_nqcrb_csv<W: Write>(w: W, rows: &[NqcrbResult]) -> Result<()> {
    let table = rows
        .iter()
        .map(|r| [r.sigma / r.n_particles as f64, r.f_numeric, r.f_analytic, r.f_q]);
    csv::write_table(w, &csv::NQCRB_HEADER, table)
}

/// Parses a bound curve CSV into `[σ/N, f_numeric, f_analytic, f_q]` rows.
pub fn parse_nqcrb_csv(text: &str) -> Result<Vec<[f64; 4]>> {
    Ok(csv::parse_table(text, &csv::NQCRB_HEADER)?
        .into_iter()
        .map(|r| [r[0], r[1], r[2], r[3]])
        .collect())
}
