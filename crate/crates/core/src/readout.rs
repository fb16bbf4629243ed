//! Interaction-based readouts (IBRs): the unitary `U₂` applied after phase
//! encoding and before the Jz measurement.
//!
//! Provides the linear rotation, echo `U₁†`, the flip echoes `U_flip U₁†` and
//! `U′_flip U₁†`, the constructed optimum `U_p U₁†`, the location of `φ₀`
//! and φ-optimised Fisher information sweeps under detection noise.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metrology::{self, cfi, hellinger, optimal_phase_axis, PhaseAxis, ProbDist};
use crate::noise::{apply_noise, noise_kernel, nqcrb_numeric, NoiseKernel};
use crate::prep::{prep_unitary, prepare_state, PrepScheme, SchemeKind, DEFAULT_CHI_T0};
use crate::spin::{PureState, QuantumState, SpinOps, Unitary};
use crate::{csv, CMatrix, CVector, Error, Result, C64};

/// Lower end of every φ grid; avoids the degenerate derivative at φ = 0.
pub const PHI_OFFSET: f64 = 1e-5;
/// Points in the default `[δ, 2φ₀]` grid of echo-type readouts.
pub const ECHO_GRID_POINTS: usize = 201;
/// Points in the default `[δ, π]` grid of the linear readout.
pub const LINEAR_GRID_POINTS: usize = 629;
const PHI0_SCAN_STEP: f64 = 1e-3;
const GS_DROP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReadoutKind {
    /// Linear rotation `U_θ` only.
    #[serde(rename = "NONE_LINEAR")]
    NoneLinear,
    /// `U₁†`
    #[serde(rename = "ECHO")]
    Echo,
    /// `U_flip U₁†`
    #[serde(rename = "FLIP_ECHO")]
    FlipEcho,
    /// `U′_flip U₁†`
    #[serde(rename = "FLIP_PRIME_ECHO")]
    FlipPrimeEcho,
    /// `U_p U₁†`
    #[serde(rename = "OPTIMAL")]
    Optimal,
}

impl ReadoutKind {
    pub const ALL: [ReadoutKind; 5] = [
        ReadoutKind::NoneLinear,
        ReadoutKind::Echo,
        ReadoutKind::FlipEcho,
        ReadoutKind::FlipPrimeEcho,
        ReadoutKind::Optimal,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ReadoutKind::NoneLinear => "NONE_LINEAR",
            ReadoutKind::Echo => "ECHO",
            ReadoutKind::FlipEcho => "FLIP_ECHO",
            ReadoutKind::FlipPrimeEcho => "FLIP_PRIME_ECHO",
            ReadoutKind::Optimal => "OPTIMAL",
        }
    }
}

impl fmt::Display for ReadoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ReadoutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReadoutKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::Parse(format!("unknown readout `{s}`")))
    }
}

/// `e^{i·a·f(Ĵy)}` for a function of `Ĵy`, through the cached Jy eigenbasis.
fn jy_function(ops: &SpinOps, a: f64, f: impl Fn(f64) -> f64) -> Unitary {
    Unitary::trusted(ops.jy_eigen().map_spectrum(|l| C64::from_polar(1.0, a * f(l))))
}

/// `e^{iπ/2 Ĵy²} e^{iπ/2 Ĵz} e^{iπ/2 Ĵy²}` for even `N`; for odd `N`,
/// `e^{iπ/2 Ĵy(Ĵy+1)} e^{iθĴz} e^{iπ/2 Ĵy(Ĵy+1)}` with `θ = (π/2)(1 + 1/N)`.
///
/// For even `N` this maps `|m⟩ → |−m⟩` for even `m` and leaves odd `m` in
/// place, up to phases.
pub fn u_flip(n_particles: usize, ops: &SpinOps) -> Result<Unitary> {
    check_ops(n_particles, ops)?;
    let (outer, theta) = if n_particles.is_multiple_of(2) {
        (jy_function(ops, FRAC_PI_2, |l| l * l), FRAC_PI_2)
    } else {
        let theta = FRAC_PI_2 * (1.0 + 1.0 / n_particles as f64);
        (jy_function(ops, FRAC_PI_2, |l| l * (l + 1.0)), theta)
    };
    Ok(&(&outer * &ops.rotation_z(theta)) * &outer)
}

/// `e^{iπ/2 Ĵy²} e^{iπ/4 Ĵz} e^{iπ/2 Ĵy²}`, even `N` only.
pub fn u_flip_prime(n_particles: usize, ops: &SpinOps) -> Result<Unitary> {
    check_ops(n_particles, ops)?;
    if n_particles % 2 == 1 {
        return Err(Error::OddParticleNumber {
            what: "FLIP_PRIME_ECHO",
            n: n_particles,
        });
    }
    let outer = jy_function(ops, FRAC_PI_2, |l| l * l);
    Ok(&(&outer * &ops.rotation_z(FRAC_PI_4)) * &outer)
}

fn check_ops(n: usize, ops: &SpinOps) -> Result<()> {
    if ops.n_particles() != n {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: ops.dim(),
        });
    }
    Ok(())
}

fn top_state(dim: usize) -> PureState {
    PureState::basis(dim, dim - 1)
}

/// Smallest `φ > 0` with `|⟨ψ₁|e^{iĴnφ}|ψ₁⟩|² = ½`, `|ψ₁⟩ = U₁|N/2⟩`:
/// a scan in steps of 1e-3 over `(0, π]` followed by bisection.
pub fn find_phi0(u1: &Unitary, axis: &PhaseAxis) -> Result<f64> {
    if u1.dim() != axis.dim() {
        return Err(Error::DimensionMismatch {
            expected: axis.dim(),
            found: u1.dim(),
        });
    }
    let psi1 = u1.apply_pure(&top_state(u1.dim()))?;
    let eig = axis.eigen();
    let weights: Vec<f64> = eig.coordinates(psi1.amplitudes()).iter().map(|c| c.norm_sqr()).collect();
    let overlap = |phi: f64| -> f64 {
        let z: C64 = weights
            .iter()
            .zip(eig.values())
            .map(|(&w, &l)| C64::from_polar(w, l * phi))
            .sum();
        z.norm_sqr() - 0.5
    };

    let steps = (PI / PHI0_SCAN_STEP).floor() as usize;
    let mut grid: Vec<f64> = (1..=steps).map(|k| k as f64 * PHI0_SCAN_STEP).collect();
    if *grid.last().unwrap() < PI {
        grid.push(PI);
    }
    let mut prev = 0.0;
    for &phi in &grid {
        if overlap(phi) < 0.0 {
            let (mut lo, mut hi) = (prev, phi);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if overlap(mid) < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let pick = if overlap(lo).abs() <= overlap(hi).abs() { lo } else { hi };
            return Ok(pick);
        }
        prev = phi;
    }
    Err(Error::NoPhaseCrossing)
}

/// The constructed optimum `U_p U₁†`.
///
/// `U_p` sends `|N/2⟩ → |N/2⟩` and `|ψ′⟩ → |−N/2⟩`, where `|ψ′⟩` is the part
/// of `|ψ_b⟩ = U₁† e^{iĴnφ₀} U₁|N/2⟩` orthogonal to `|N/2⟩`. The remaining
/// basis comes from modified Gram–Schmidt over `|m⟩`, `m = −N/2+1..N/2−1` in
/// ascending order, then `|−N/2⟩` if still short, and is sent to the interior
/// `|m⟩` in ascending order.
pub fn u_opt(u1: &Unitary, axis: &PhaseAxis, ops: &SpinOps) -> Result<Unitary> {
    let dim = ops.dim();
    if u1.dim() != dim || axis.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: u1.dim(),
        });
    }
    let phi0 = find_phi0(u1, axis)?;
    let n = ops.n_particles();
    let psi0 = top_state(dim);
    let psi1 = u1.apply_pure(&psi0)?;
    let encoded = metrology::encode_phase(&psi1.into(), axis, phi0)?;
    let psi_b = u1.matrix().ad_mul(encoded.as_pure().expect("pure in, pure out").amplitudes());

    let mut prime = psi_b.clone();
    prime[n] = C64::new(0.0, 0.0);
    let norm = prime.norm();
    if norm < GS_DROP {
        return Err(Error::BasisDeficit { found: 1, needed: dim });
    }
    prime /= C64::new(norm, 0.0);

    let mut basis: Vec<CVector> = vec![psi0.amplitudes().clone(), prime];
    let candidates = (1..n).chain(std::iter::once(0));
    for k in candidates {
        if basis.len() == dim {
            break;
        }
        let mut e = CVector::zeros(dim);
        e[k] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&e);
                e -= b * c;
            }
        }
        let norm = e.norm();
        if norm >= GS_DROP {
            basis.push(e / C64::new(norm, 0.0));
        }
    }
    if basis.len() < dim {
        return Err(Error::BasisDeficit {
            found: basis.len(),
            needed: dim,
        });
    }

    let targets = std::iter::once(n).chain(std::iter::once(0)).chain(1..n);
    let mut up = CMatrix::zeros(dim, dim);
    for (row, v) in targets.zip(&basis) {
        for (col, z) in v.iter().enumerate() {
            up[(row, col)] = z.conj();
        }
    }
    let up = Unitary::new(up)?;
    Ok(&up * &u1.adjoint())
}

/// Everything derived from a preparation scheme that the readouts need: the
/// state, the `U₁` that echo-type readouts invert, the phase axis, `F_Q` and
/// `φ₀`.
///
/// For the QND mixed state `U₁` is the QPT sweep with `χt₀ = 20` and the axis
/// defaults to `ŷ`.
#[derive(Debug, Clone)]
pub struct Experiment {
    scheme: PrepScheme,
    ops: SpinOps,
    u1: Unitary,
    state: QuantumState,
    axis: PhaseAxis,
    f_q: f64,
    phi0: f64,
}

impl Experiment {
    pub fn new(scheme: &PrepScheme) -> Result<Self> {
        Self::build(scheme, None)
    }

    /// Uses `axis` instead of the covariance-optimal (or QND default) axis.
    pub fn with_axis(scheme: &PrepScheme, axis: [f64; 3]) -> Result<Self> {
        Self::build(scheme, Some(axis))
    }

    fn build(scheme: &PrepScheme, axis: Option<[f64; 3]>) -> Result<Self> {
        scheme.validate()?;
        let scheme = scheme.resolved();
        let ops = SpinOps::new(scheme.n)?;
        let state = prepare_state(&scheme, &ops)?;
        let u1 = if scheme.kind == SchemeKind::Qnd {
            let qpt = PrepScheme::new(SchemeKind::Qpt, scheme.n).with_chi_t0(DEFAULT_CHI_T0);
            prep_unitary(&qpt, &ops)?
        } else {
            prep_unitary(&scheme, &ops)?
        };
        let axis = match axis {
            Some(n) => PhaseAxis::new(n, &ops)?,
            None if scheme.kind == SchemeKind::Qnd => PhaseAxis::y(&ops),
            None => optimal_phase_axis(&state, &ops)?,
        };
        let f_q = metrology::qfi(&state, &axis)?;
        let phi0 = find_phi0(&u1, &axis)?;
        Ok(Self {
            scheme,
            ops,
            u1,
            state,
            axis,
            f_q,
            phi0,
        })
    }

    pub fn scheme(&self) -> &PrepScheme {
        &self.scheme
    }

    pub fn ops(&self) -> &SpinOps {
        &self.ops
    }

    pub fn n_particles(&self) -> usize {
        self.scheme.n
    }

    pub fn u1(&self) -> &Unitary {
        &self.u1
    }

    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    pub fn axis(&self) -> &PhaseAxis {
        &self.axis
    }

    pub fn f_q(&self) -> f64 {
        self.f_q
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    /// `U_θ = e^{iπ/2 Ĵy}` for OAT, CAT, TNT and CSS; identity otherwise.
    pub fn u_theta(&self) -> Unitary {
        match self.scheme.kind {
            SchemeKind::Oat | SchemeKind::Cat | SchemeKind::Tnt | SchemeKind::Css => {
                self.ops.rotation_y(FRAC_PI_2)
            }
            _ => Unitary::identity(self.ops.dim()),
        }
    }

    pub fn readout_unitary(&self, kind: ReadoutKind) -> Result<Unitary> {
        let n = self.n_particles();
        Ok(match kind {
            ReadoutKind::NoneLinear => self.u_theta(),
            ReadoutKind::Echo => self.u1.adjoint(),
            ReadoutKind::FlipEcho => &u_flip(n, &self.ops)? * &self.u1.adjoint(),
            ReadoutKind::FlipPrimeEcho => &u_flip_prime(n, &self.ops)? * &self.u1.adjoint(),
            ReadoutKind::Optimal => {
                if !self.scheme.kind.is_pure() {
                    return Err(Error::UnsupportedReadout {
                        readout: kind.id(),
                        scheme: self.scheme.kind.id(),
                    });
                }
                u_opt(&self.u1, &self.axis, &self.ops)?
            }
        })
    }

    /// Default φ grid: `[δ, 2φ₀]` for echo-type readouts, `[δ, π]` for the
    /// linear one. The first point of the evenly spaced grid (φ = 0) is
    /// replaced by `δ`.
    pub fn default_phi_grid(&self, kind: ReadoutKind) -> Vec<f64> {
        let (end, count) = match kind {
            ReadoutKind::NoneLinear => (PI, LINEAR_GRID_POINTS),
            _ => (2.0 * self.phi0, ECHO_GRID_POINTS),
        };
        let mut grid: Vec<f64> = (0..count).map(|k| end * k as f64 / (count - 1) as f64).collect();
        grid[0] = PHI_OFFSET;
        grid
    }

    pub fn scan(&self, readout: &Unitary) -> Result<PhaseScan> {
        PhaseScan::new(&self.state, &self.axis, readout)
    }
}

/// Precomputed evaluation of `φ ↦ (p, dp)` for a fixed state, axis and
/// readout: with `Ĵn = V diag(λ) V†`, the amplitudes are
/// `U₂V (e^{iλφ} ∘ V†ψ)`; mixed states sum over their eigencomponents.
#[derive(Debug, Clone)]
pub struct PhaseScan {
    lambda: Vec<f64>,
    a: CMatrix,
    components: Vec<(f64, CVector)>,
}

impl PhaseScan {
    pub fn new(state: &QuantumState, axis: &PhaseAxis, readout: &Unitary) -> Result<Self> {
        let dim = readout.dim();
        if state.dim() != dim || axis.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: state.dim(),
            });
        }
        let eig = axis.eigen();
        let a = readout.matrix() * eig.vectors();
        let components = match state {
            QuantumState::Pure(p) => vec![(1.0, eig.coordinates(p.amplitudes()))],
            QuantumState::Mixed(m) => m
                .spectral_components()?
                .into_iter()
                .filter(|(w, _)| *w > 1e-300)
                .map(|(w, v)| (w, eig.coordinates(v.amplitudes())))
                .collect(),
        };
        Ok(Self {
            lambda: eig.values().to_vec(),
            a,
            components,
        })
    }

    pub fn distribution(&self, phi: f64) -> ProbDist {
        let dim = self.lambda.len();
        let mut p = vec![0.0; dim];
        let mut dp = vec![0.0; dim];
        for (w, c) in &self.components {
            let phased = CVector::from_iterator(
                dim,
                c.iter().zip(&self.lambda).map(|(ck, &l)| ck * C64::from_polar(1.0, l * phi)),
            );
            let dphased = CVector::from_iterator(
                dim,
                phased.iter().zip(&self.lambda).map(|(z, &l)| z * C64::new(0.0, l)),
            );
            let amp = &self.a * phased;
            let damp = &self.a * dphased;
            for k in 0..dim {
                p[k] += w * amp[k].norm_sqr();
                dp[k] += w * 2.0 * (amp[k].conj() * damp[k]).re;
            }
        }
        ProbDist::trusted(p, dp)
    }
}

/// One `(scheme, readout, σ)` result of a φ-optimised sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub scheme: SchemeKind,
    pub readout: ReadoutKind,
    pub sigma: f64,
    pub phi_opt: f64,
    pub f_c: f64,
    pub f_n: f64,
    pub f_q: f64,
}

impl SweepRecord {
    /// `0 ≤ f_c ≤ f_n + 1e−6 f_q ≤ f_q + 2e−6 f_q`
    pub fn satisfies_bounds(&self) -> bool {
        let slack = 1e-6 * self.f_q;
        self.f_c >= 0.0 && self.f_c <= self.f_n + slack && self.f_n + slack <= self.f_q + 2.0 * slack
    }
}

fn noisy_cfi(scan: &PhaseScan, kernel: &NoiseKernel, sigma: f64, phi: f64) -> Result<f64> {
    let d = apply_noise(&scan.distribution(phi), kernel)?;
    cfi(&d).map_err(|e| Error::AtGridPoint {
        sigma,
        phi,
        source: Box::new(e),
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximisation of `f` on `[lo, hi]`.
fn golden_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..80 {
        if hi - lo < 1e-12 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Maximum over φ of the noisy classical Fisher information for each σ.
///
/// `phi_grid = None` uses [`Experiment::default_phi_grid`]. The grid argmax
/// is refined by golden-section search between its neighbours. Errors carry
/// the offending `(σ, φ)`.
pub fn cfi_sweep(
    exp: &Experiment,
    readout: ReadoutKind,
    sigmas: &[f64],
    phi_grid: Option<&[f64]>,
) -> Result<Vec<SweepRecord>> {
    let u2 = exp.readout_unitary(readout)?;
    let default_grid;
    let grid = match phi_grid {
        Some(g) => g,
        None => {
            default_grid = exp.default_phi_grid(readout);
            &default_grid
        }
    };
    if grid.is_empty() {
        return Err(Error::param("phi_grid", "must not be empty"));
    }
    if sigmas.is_empty() {
        return Err(Error::param("sigmas", "must not be empty"));
    }
    let scan = exp.scan(&u2)?;
    let dists: Vec<ProbDist> = grid.par_iter().map(|&phi| scan.distribution(phi)).collect();
    let n = exp.n_particles();

    sigmas
        .par_iter()
        .map(|&sigma| {
            let kernel = noise_kernel(n, sigma)?;
            let values = dists
                .par_iter()
                .zip(grid.par_iter())
                .map(|(d, &phi)| {
                    cfi(&apply_noise(d, &kernel)?).map_err(|e| Error::AtGridPoint {
                        sigma,
                        phi,
                        source: Box::new(e),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            let mut best = 0;
            for (k, v) in values.iter().enumerate() {
                if *v > values[best] {
                    best = k;
                }
            }
            let (mut phi_opt, mut f_c) = (grid[best], values[best]);
            if grid.len() > 1 {
                let lo = grid[best.saturating_sub(1)];
                let hi = grid[(best + 1).min(grid.len() - 1)];
                let (x, fx) = golden_max(lo.min(hi), lo.max(hi), |phi| noisy_cfi(&scan, &kernel, sigma, phi))?;
                if fx > f_c {
                    phi_opt = x;
                    f_c = fx;
                }
            }
            Ok(SweepRecord {
                scheme: exp.scheme().kind,
                readout,
                sigma,
                phi_opt,
                f_c,
                f_n: nqcrb_numeric(n, exp.f_q(), sigma)?,
                f_q: exp.f_q(),
            })
        })
        .collect()
}

/// Outcome distributions at `φ` and `φ + δφ` (noise applied) and their
/// Hellinger distance.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub readout: ReadoutKind,
    pub phi: f64,
    pub dphi: f64,
    pub sigma: f64,
    pub before: ProbDist,
    pub after: ProbDist,
    pub hellinger: f64,
}

pub fn snapshot(exp: &Experiment, readout: ReadoutKind, phi: f64, dphi: f64, sigma: f64) -> Result<Snapshot> {
    let scan = exp.scan(&exp.readout_unitary(readout)?)?;
    let kernel = noise_kernel(exp.n_particles(), sigma)?;
    let before = apply_noise(&scan.distribution(phi), &kernel)?;
    let after = apply_noise(&scan.distribution(phi + dphi), &kernel)?;
    let hellinger = hellinger(&before, &after)?;
    Ok(Snapshot {
        readout,
        phi,
        dphi,
        sigma,
        before,
        after,
        hellinger,
    })
}

/// CSV with header `scheme,readout,sigma,phi_opt,f_c,f_n,f_q`, rows sorted by
/// scheme id, readout id and σ.
pub fn write_sweep_csv<W: Write>(w: W, records: &[SweepRecord]) -> Result<()> {
    let mut sorted: Vec<&SweepRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.scheme
            .id()
            .cmp(b.scheme.id())
            .then(a.readout.id().cmp(b.readout.id()))
            .then(a.sigma.total_cmp(&b.sigma))
    });
    let rows = sorted.into_iter().map(|r| {
        vec![
            r.scheme.id().to_string(),
            r.readout.id().to_string(),
            csv::fmt_num(r.sigma),
            csv::fmt_num(r.phi_opt),
            csv::fmt_num(r.f_c),
            csv::fmt_num(r.f_n),
            csv::fmt_num(r.f_q),
        ]
    });
    csv::write_rows(w, &csv::SWEEP_HEADER, rows)
}

pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepRecord>> {
    csv::parse_rows(text, &csv::SWEEP_HEADER)?
        .into_iter()
        .enumerate()
        .map(|(k, f)| {
            let line = k + 2;
            Ok(SweepRecord {
                scheme: f[0].parse()?,
                readout: f[1].parse()?,
                sigma: csv::parse_num(f[2], line)?,
                phi_opt: csv::parse_num(f[3], line)?,
                f_c: csv::parse_num(f[4], line)?,
                f_n: csv::parse_num(f[5], line)?,
                f_q: csv::parse_num(f[6], line)?,
            })
        })
        .collect()
}
