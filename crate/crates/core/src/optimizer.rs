//! Stochastic search over distributions of fixed noise-free Fisher
//! information `F₀`.
//!
//! A distribution `(p, dp)` is represented by amplitudes `v = √p` and
//! `v̇ = dp/(2√p)`, so that `F_C(0) = 4 v̇·v̇` and `Σp = v·v`. Applying the same
//! orthogonal matrix to `v` and `v̇` therefore preserves both normalisation
//! and `F_C(0)`, which is what the hill climb and the random sampler exploit.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::metrology::{cfi, hellinger, ProbDist, CFI_EPS};
use crate::noise::{apply_noise, make_popt, noise_kernel, nqcrb_numeric};
use crate::{csv, Error, Result};

/// Default upper bound of the proposal rotation angle (radians).
pub const DEFAULT_MAX_ANGLE: f64 = 0.1;

/// Amplitude representation `(v, v̇)` of a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudePair {
    v: Vec<f64>,
    vdot: Vec<f64>,
}

impl AmplitudePair {
    pub fn new(v: Vec<f64>, vdot: Vec<f64>) -> Result<Self> {
        if v.len() != vdot.len() {
            return Err(Error::DimensionMismatch {
                expected: v.len(),
                found: vdot.len(),
            });
        }
        if v.iter().chain(&vdot).any(|x| !x.is_finite()) {
            return Err(Error::InvalidDistribution("non-finite amplitude".into()));
        }
        let norm: f64 = v.iter().map(|x| x * x).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!("|v|² = {norm}")));
        }
        let dsum: f64 = v.iter().zip(&vdot).map(|(a, b)| 2.0 * a * b).sum();
        if dsum.abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!("Σdp = {dsum}")));
        }
        Ok(Self { v, vdot })
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn vdot(&self) -> &[f64] {
        &self.vdot
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Noise-free Fisher information `4 v̇·v̇`.
    pub fn f_zero(&self) -> f64 {
        4.0 * self.vdot.iter().map(|x| x * x).sum::<f64>()
    }

    /// `p = v²`, `dp = 2 v v̇`.
    pub fn to_dist(&self) -> ProbDist {
        let p = self.v.iter().map(|x| x * x).collect();
        let dp = self.v.iter().zip(&self.vdot).map(|(a, b)| 2.0 * a * b).collect();
        ProbDist::trusted(p, dp)
    }

    fn transform(&self, q: &DMatrix<f64>) -> AmplitudePair {
        let v = q * DVector::from_column_slice(&self.v);
        let vdot = q * DVector::from_column_slice(&self.vdot);
        AmplitudePair {
            v: v.iter().copied().collect(),
            vdot: vdot.iter().copied().collect(),
        }
    }
}

/// `v = √p`, `v̇ = dp/(2√p)`; outcomes with `p ≤ ε` get `v̇ = 0` and must have
/// a negligible derivative.
pub fn pair_from_dist(d: &ProbDist) -> Result<AmplitudePair> {
    let guard = CFI_EPS.sqrt();
    let mut v = Vec::with_capacity(d.len());
    let mut vdot = Vec::with_capacity(d.len());
    for (index, (&p, &dp)) in d.p().iter().zip(d.dp()).enumerate() {
        if p > CFI_EPS {
            let s = p.sqrt();
            v.push(s);
            vdot.push(dp / (2.0 * s));
        } else if dp.abs() > guard {
            return Err(Error::IllConditioned { index, p, dp });
        } else {
            v.push(p.max(0.0).sqrt());
            vdot.push(0.0);
        }
    }
    Ok(AmplitudePair { v, vdot })
}

/// Rotation by `theta` in the plane spanned by orthonormal `a`, `b`:
/// `x ↦ x + (cos θ − 1)((x·a)a + (x·b)b) + sin θ((x·a)b − (x·b)a)`.
#[derive(Debug, Clone)]
pub struct PlaneRotation {
    a: Vec<f64>,
    b: Vec<f64>,
    theta: f64,
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn normalize(x: &mut [f64]) -> f64 {
    let n = dot(x, x).sqrt();
    for c in x.iter_mut() {
        *c /= n;
    }
    n
}

impl PlaneRotation {
    /// Random plane from two Gaussian vectors orthonormalised by Gram–Schmidt
    /// and an angle uniform in `(0, max_angle]`.
    pub fn sample<R: Rng + ?Sized>(dim: usize, max_angle: f64, rng: &mut R) -> Result<Self> {
        if !(max_angle.is_finite() && max_angle > 0.0) {
            return Err(Error::param("max_angle", "must be finite and positive"));
        }
        if dim < 2 {
            return Err(Error::param("dim", "a rotation plane needs at least two dimensions"));
        }
        loop {
            let mut a: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let mut b: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            if normalize(&mut a) < 1e-12 {
                continue;
            }
            let c = dot(&a, &b);
            for (bi, ai) in b.iter_mut().zip(&a) {
                *bi -= c * ai;
            }
            if normalize(&mut b) < 1e-12 {
                continue;
            }
            let u: f64 = rng.random();
            let theta = max_angle * (1.0 - u);
            return Ok(Self { a, b, theta });
        }
    }

    pub fn with_angle(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn angle(&self) -> f64 {
        self.theta
    }

    pub fn rotate_vec(&self, x: &[f64]) -> Vec<f64> {
        let xa = dot(x, &self.a);
        let xb = dot(x, &self.b);
        let (s, c) = self.theta.sin_cos();
        let c1 = c - 1.0;
        x.iter()
            .zip(self.a.iter().zip(&self.b))
            .map(|(&xi, (&ai, &bi))| xi + c1 * (xa * ai + xb * bi) + s * (xa * bi - xb * ai))
            .collect()
    }

    pub fn rotate(&self, pair: &AmplitudePair) -> AmplitudePair {
        AmplitudePair {
            v: self.rotate_vec(&pair.v),
            vdot: self.rotate_vec(&pair.vdot),
        }
    }
}

/// Applies one random plane rotation (same rotation to `v` and `v̇`).
pub fn random_plane_rotation<R: Rng + ?Sized>(pair: &AmplitudePair, max_angle: f64, rng: &mut R) -> Result<AmplitudePair> {
    Ok(PlaneRotation::sample(pair.len(), max_angle, rng)?.rotate(pair))
}

/// One hill-climb iteration: the current (best) noisy CFI, the conserved
/// noise-free CFI and the Hellinger distance of the current distribution to
/// `P_opt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptTrace {
    pub iteration: usize,
    pub f_sigma: f64,
    pub f_zero: f64,
    pub d_h: f64,
    pub accepted: bool,
}

/// Rotate, rebuild, add noise, keep the proposal only if the noisy CFI
/// strictly increases. Returns the final distribution and one trace entry per
/// iteration (entry 0 is the start).
pub fn hill_climb(
    start: &ProbDist,
    sigma: f64,
    iterations: usize,
    max_angle: f64,
    seed: u64,
) -> Result<(ProbDist, Vec<OptTrace>)> {
    if iterations == 0 {
        return Err(Error::param("iterations", "must be at least 1"));
    }
    let n = start.n_particles();
    let kernel = noise_kernel(n, sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pair = pair_from_dist(start)?;
    let f0 = pair.f_zero();
    let popt = make_popt(n, f0)?;
    let noisy = |p: &AmplitudePair| -> Result<f64> { cfi(&apply_noise(&p.to_dist(), &kernel)?) };

    let mut best = noisy(&pair)?;
    let mut trace = Vec::with_capacity(iterations + 1);
    trace.push(OptTrace {
        iteration: 0,
        f_sigma: best,
        f_zero: f0,
        d_h: hellinger(&pair.to_dist(), &popt)?,
        accepted: true,
    });
    for it in 1..=iterations {
        let candidate = random_plane_rotation(&pair, max_angle, &mut rng)?;
        let f = noisy(&candidate)?;
        let accepted = f > best;
        if accepted {
            pair = candidate;
            best = f;
        }
        trace.push(OptTrace {
            iteration: it,
            f_sigma: best,
            f_zero: pair.f_zero(),
            d_h: hellinger(&pair.to_dist(), &popt)?,
            accepted,
        });
    }
    Ok((pair.to_dist(), trace))
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal folded into `Q`.
pub fn haar_orthogonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Random orthogonal transform of `P_opt(N, f0)`'s amplitude pair; the result
/// has noise-free CFI `f0`.
pub fn random_constrained_dist(n_particles: usize, f0: f64, seed: u64) -> Result<ProbDist> {
    let popt = make_popt(n_particles, f0)?;
    let pair = pair_from_dist(&popt)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = haar_orthogonal(n_particles + 1, &mut rng);
    Ok(pair.transform(&q).to_dist())
}

/// Noisy CFI of one random constrained distribution next to the NQCRB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertRow {
    pub seed: u64,
    pub f_sigma: f64,
    pub bound: f64,
}

impl CertRow {
    pub fn violates(&self, slack: f64) -> bool {
        self.f_sigma > self.bound + slack
    }
}

/// Evaluates seeds `first_seed..first_seed + count` in parallel; rows come
/// back in seed order.
pub fn certify_bound(n_particles: usize, f0: f64, sigma: f64, first_seed: u64, count: u64) -> Result<Vec<CertRow>> {
    let kernel = noise_kernel(n_particles, sigma)?;
    let bound = nqcrb_numeric(n_particles, f0, sigma)?;
    (first_seed..first_seed + count)
        .into_par_iter()
        .map(|seed| {
            let d = random_constrained_dist(n_particles, f0, seed)?;
            Ok(CertRow {
                seed,
                f_sigma: cfi(&apply_noise(&d, &kernel)?)?,
                bound,
            })
        })
        .collect()
}

/// Uniform probabilities with `dp ∝ m`, scaled to noise-free CFI `f0`.
pub fn start_uniform(n_particles: usize, f0: f64) -> Result<ProbDist> {
    let dim = n_particles + 1;
    let half = n_particles as f64 / 2.0;
    let m: Vec<f64> = (0..dim).map(|i| i as f64 - half).collect();
    let sum_m2: f64 = m.iter().map(|x| x * x).sum();
    let c = (f0 / (dim as f64 * sum_m2)).sqrt();
    ProbDist::new(vec![1.0 / dim as f64; dim], m.iter().map(|x| c * x).collect())
}

/// Half the weight on each of outcome indices `i < j`, `dp = ∓√f0/2`.
pub fn start_pair(n_particles: usize, f0: f64, i: usize, j: usize) -> Result<ProbDist> {
    let dim = n_particles + 1;
    if i >= j || j >= dim {
        return Err(Error::param("indices", format!("need i < j ≤ N, got {i}, {j}")));
    }
    let mut p = vec![0.0; dim];
    let mut dp = vec![0.0; dim];
    let h = f0.sqrt() / 2.0;
    p[i] = 0.5;
    p[j] = 0.5;
    dp[i] = -h;
    dp[j] = h;
    ProbDist::new(p, dp)
}

/// CSV with header `iteration,f_sigma,f_zero,d_h`, keeping every `stride`-th
/// entry and the last one.
pub fn write_trace_csv<W: Write>(w: W, trace: &[OptTrace], stride: usize) -> Result<()> {
    let stride = stride.max(1);
    let last = trace.len().saturating_sub(1);
    let rows = trace
        .iter()
        .enumerate()
        .filter(|(k, _)| k % stride == 0 || *k == last)
        .map(|(_, t)| {
            vec![
                t.iteration.to_string(),
                csv::fmt_num(t.f_sigma),
                csv::fmt_num(t.f_zero),
                csv::fmt_num(t.d_h),
            ]
        });
    csv::write_rows(w, &csv::TRACE_HEADER, rows)
}

/// CSV with header `seed,f_sigma,bound`.
pub fn write_cert_csv<W: Write>(w: W, rows: &[CertRow]) -> Result<()> {
    let rows = rows
        .iter()
        .map(|r| vec![r.seed.to_string(), csv::fmt_num(r.f_sigma), csv::fmt_num(r.bound)]);
    csv::write_rows(w, &csv::CERT_HEADER, rows)
}

fn parse_int<T: std::str::FromStr>(field: &str, line: usize) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: `{field}` is not a non-negative integer")))
}

pub fn parse_trace_csv(text: &str) -> Result<Vec<OptTrace>> {
    csv::parse_rows(text, &csv::TRACE_HEADER)?
        .into_iter()
        .enumerate()
        .map(|(k, f)| {
            let line = k + 2;
            Ok(OptTrace {
                iteration: parse_int(f[0], line)?,
                f_sigma: csv::parse_num(f[1], line)?,
                f_zero: csv::parse_num(f[2], line)?,
                d_h: csv::parse_num(f[3], line)?,
                accepted: false,
            })
        })
        .collect()
}

pub fn parse_cert_csv(text: &str) -> Result<Vec<CertRow>> {
    csv::parse_rows(text, &csv::CERT_HEADER)?
        .into_iter()
        .enumerate()
        .map(|(k, f)| {
            let line = k + 2;
            Ok(CertRow {
                seed: parse_int(f[0], line)?,
                f_sigma: csv::parse_num(f[1], line)?,
                bound: csv::parse_num(f[2], line)?,
            })
        })
        .collect()
}
