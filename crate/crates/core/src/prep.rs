//! Input-state preparation: one-axis twisting (OAT), two-axis counter-twisting
//! (TACT), twist-and-turn (TNT), spin cat, adiabatic sweep to twin-Fock (QPT),
//! the Gaussian-weighted QND mixed state and the coherent spin state (CSS).

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Dyn, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spin::{expm_generator, MixedState, QuantumState, SpinOps, Unitary};
use crate::{CMatrix, Error, Result, C64};

pub const DEFAULT_R_OAT: f64 = 0.2;
pub const DEFAULT_R_TACT: f64 = 0.032;
pub const DEFAULT_R_TNT: f64 = 0.0715;
pub const DEFAULT_R_CAT: f64 = FRAC_PI_2;
pub const DEFAULT_CHI_T0: f64 = 20.0;
pub const DEFAULT_DELTA: f64 = 1.0;

const QPT_CHUNK: usize = 64;

/// Default number of midpoint steps for the QPT sweep.
pub fn default_qpt_steps(chi_t0: f64) -> usize {
    ((160.0 * chi_t0).ceil() as usize).max(200)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeKind {
    #[serde(rename = "OAT")]
    Oat,
    #[serde(rename = "TACT")]
    Tact,
    #[serde(rename = "TNT")]
    Tnt,
    #[serde(rename = "CAT")]
    Cat,
    #[serde(rename = "QPT")]
    Qpt,
    #[serde(rename = "QND")]
    Qnd,
    #[serde(rename = "CSS")]
    Css,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 7] = [
        SchemeKind::Oat,
        SchemeKind::Tact,
        SchemeKind::Tnt,
        SchemeKind::Cat,
        SchemeKind::Qpt,
        SchemeKind::Qnd,
        SchemeKind::Css,
    ];

    pub fn id(self) -> &'static str {
        match self {
            SchemeKind::Oat => "OAT",
            SchemeKind::Tact => "TACT",
            SchemeKind::Tnt => "TNT",
            SchemeKind::Cat => "CAT",
            SchemeKind::Qpt => "QPT",
            SchemeKind::Qnd => "QND",
            SchemeKind::Css => "CSS",
        }
    }

    fn takes_r(self) -> bool {
        matches!(self, SchemeKind::Oat | SchemeKind::Tact | SchemeKind::Tnt | SchemeKind::Cat)
    }

    /// Whether the scheme yields a pure state.
    pub fn is_pure(self) -> bool {
        self != SchemeKind::Qnd
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::Parse(format!("unknown scheme `{s}`")))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    kind: SchemeKind,
    n: i64,
    r: Option<f64>,
    chi_t0: Option<f64>,
    delta: Option<f64>,
    steps: Option<i64>,
}

/// A preparation scheme with its parameters.
///
/// Missing parameters take the standard defaults (`r` = 0.2 / 0.032 / 0.0715
/// / π/2 for OAT / TACT / TNT / CAT, `χt₀ = 20`, `Δ = 1`); [`PrepScheme::resolved`]
/// makes them explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScheme")]
pub struct PrepScheme {
    pub kind: SchemeKind,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_t0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

impl TryFrom<RawScheme> for PrepScheme {
    type Error = Error;

    fn try_from(raw: RawScheme) -> Result<Self> {
        if raw.n < 1 {
            return Err(Error::InvalidDimension(raw.n));
        }
        let steps = match raw.steps {
            Some(s) if s < 1 => return Err(Error::param("steps", format!("must be at least 1, got {s}"))),
            Some(s) => Some(s as usize),
            None => None,
        };
        let scheme = PrepScheme {
            kind: raw.kind,
            n: raw.n as usize,
            r: raw.r,
            chi_t0: raw.chi_t0,
            delta: raw.delta,
            steps,
        };
        scheme.validate()?;
        Ok(scheme)
    }
}

impl PrepScheme {
    /// Scheme with all parameters left at their defaults.
    pub fn new(kind: SchemeKind, n: usize) -> Self {
        Self {
            kind,
            n,
            r: None,
            chi_t0: None,
            delta: None,
            steps: None,
        }
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = Some(r);
        self
    }

    pub fn with_chi_t0(mut self, chi_t0: f64) -> Self {
        self.chi_t0 = Some(chi_t0);
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = Some(steps);
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidDimension(self.n as i64));
        }
        let kind = self.kind;
        if self.r.is_some() && !kind.takes_r() {
            return Err(Error::param("r", format!("not used by scheme {kind}")));
        }
        if self.chi_t0.is_some() && kind != SchemeKind::Qpt {
            return Err(Error::param("chi_t0", format!("not used by scheme {kind}")));
        }
        if self.steps.is_some() && kind != SchemeKind::Qpt {
            return Err(Error::param("steps", format!("not used by scheme {kind}")));
        }
        if self.delta.is_some() && kind != SchemeKind::Qnd {
            return Err(Error::param("delta", format!("not used by scheme {kind}")));
        }
        if let Some(r) = self.r {
            if !r.is_finite() {
                return Err(Error::param("r", "must be finite"));
            }
        }
        if let Some(c) = self.chi_t0 {
            if !(c.is_finite() && c >= 0.0) {
                return Err(Error::param("chi_t0", "must be finite and non-negative"));
            }
        }
        if let Some(d) = self.delta {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::param("delta", "must be finite and positive"));
            }
        }
        if self.steps == Some(0) {
            return Err(Error::param("steps", "must be at least 1"));
        }
        if matches!(kind, SchemeKind::Cat | SchemeKind::Qnd) && self.n % 2 == 1 {
            return Err(Error::OddParticleNumber {
                what: kind.id(),
                n: self.n,
            });
        }
        Ok(())
    }

    pub fn r(&self) -> f64 {
        self.r.unwrap_or(match self.kind {
            SchemeKind::Oat => DEFAULT_R_OAT,
            SchemeKind::Tact => DEFAULT_R_TACT,
            SchemeKind::Tnt => DEFAULT_R_TNT,
            SchemeKind::Cat => DEFAULT_R_CAT,
            _ => 0.0,
        })
    }

    pub fn chi_t0(&self) -> f64 {
        self.chi_t0.unwrap_or(DEFAULT_CHI_T0)
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(DEFAULT_DELTA)
    }

    pub fn steps(&self) -> usize {
        self.steps.unwrap_or_else(|| default_qpt_steps(self.chi_t0()))
    }

    /// Copy with every parameter used by the scheme written out explicitly.
    pub fn resolved(&self) -> PrepScheme {
        let mut out = PrepScheme::new(self.kind, self.n);
        match self.kind {
            k if k.takes_r() => out.r = Some(self.r()),
            SchemeKind::Qpt => {
                out.chi_t0 = Some(self.chi_t0());
                out.steps = Some(self.steps());
            }
            SchemeKind::Qnd => out.delta = Some(self.delta()),
            _ => {}
        }
        out
    }
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

/// The preparation unitary `U₁` with `|ψ₁⟩ = U₁|N/2⟩`.
pub fn prep_unitary(scheme: &PrepScheme, ops: &SpinOps) -> Result<Unitary> {
    scheme.validate()?;
    check_ops(scheme.n, ops)?;
    let half_pi_y = || ops.rotation_y(FRAC_PI_2);
    let jz2 = || ops.jz() * ops.jz();
    Ok(match scheme.kind {
        SchemeKind::Css => half_pi_y(),
        SchemeKind::Oat | SchemeKind::Cat => &expm_generator(&jz2(), scheme.r())? * &half_pi_y(),
        SchemeKind::Tact => {
            let h = ops.jx() * ops.jx() - ops.jy() * ops.jy();
            expm_generator(&h, scheme.r())?
        }
        SchemeKind::Tnt => {
            let h = jz2() - ops.jx() * C64::new(scheme.n as f64 / 2.0, 0.0);
            &expm_generator(&h, scheme.r())? * &half_pi_y()
        }
        SchemeKind::Qpt => &qpt_evolve(scheme.n, scheme.chi_t0(), scheme.steps(), ops)? * &half_pi_y(),
        SchemeKind::Qnd => return Err(Error::UnsupportedForUnitary("QND")),
    })
}

/// Midpoint product approximation of the time-ordered evolution under
/// `H(t) = χ(Ĵx cos²(πt/2t₀) + Ĵz² sin²(πt/2t₀))` for `t ∈ [0, t₀]`.
pub fn qpt_evolve(n_particles: usize, chi_t0: f64, steps: usize, ops: &SpinOps) -> Result<Unitary> {
    check_ops(n_particles, ops)?;
    if steps == 0 {
        return Err(Error::param("steps", "must be at least 1"));
    }
    if !chi_t0.is_finite() {
        return Err(Error::param("chi_t0", "must be finite"));
    }
    let dt = 1.0 / steps as f64;
    let dim = ops.dim();
    let jx = ops.jx().map(|z| z.re);
    let jz2 = DMatrix::from_diagonal(&DVector::from_iterator(dim, ops.m_values().iter().map(|m| m * m)));
    let step_eigen = |k: usize| {
        let s = (k as f64 + 0.5) * dt;
        let c = (PI * s / 2.0).cos().powi(2);
        SymmetricEigen::new(&jx * c + &jz2 * (1.0 - c))
    };
    // U ← V e^{−iχΔtΛ} Vᵀ U, with real V kept apart from the real and
    // imaginary parts of U.
    let mut re = DMatrix::<f64>::identity(dim, dim);
    let mut im = DMatrix::<f64>::zeros(dim, dim);
    let mut first = 0;
    while first < steps {
        let last = (first + QPT_CHUNK).min(steps);
        let chunk: Vec<SymmetricEigen<f64, Dyn>> = (first..last).into_par_iter().map(step_eigen).collect();
        for eig in chunk {
            let vt = eig.eigenvectors.transpose();
            let mut a = &vt * &re;
            let mut b = &vt * &im;
            for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
                let (sin, cos) = (-chi_t0 * dt * lambda).sin_cos();
                for j in 0..dim {
                    let (x, y) = (a[(k, j)], b[(k, j)]);
                    a[(k, j)] = cos * x - sin * y;
                    b[(k, j)] = sin * x + cos * y;
                }
            }
            re = &eig.eigenvectors * a;
            im = &eig.eigenvectors * b;
        }
        first = last;
    }
    let u = CMatrix::from_fn(dim, dim, |i, j| C64::new(re[(i, j)], im[(i, j)]));
    Ok(Unitary::trusted(u))
}

/// `ρ ∝ Σ_m e^{−m²/Δ²} |m⟩⟨m|`.
pub fn qnd_state(n_particles: usize, delta: f64, ops: &SpinOps) -> Result<MixedState> {
    check_ops(n_particles, ops)?;
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::param("delta", "must be finite and positive"));
    }
    if n_particles % 2 == 1 {
        return Err(Error::OddParticleNumber {
            what: "QND",
            n: n_particles,
        });
    }
    let weights: Vec<f64> = ops.m_values().iter().map(|m| (-(m * m) / (delta * delta)).exp()).collect();
    MixedState::from_diagonal(&weights)
}

/// `U₁|N/2⟩` for unitary schemes, the QND density matrix otherwise.
pub fn prepare_state(scheme: &PrepScheme, ops: &SpinOps) -> Result<QuantumState> {
    if scheme.kind == SchemeKind::Qnd {
        scheme.validate()?;
        return Ok(qnd_state(scheme.n, scheme.delta(), ops)?.into());
    }
    let u = prep_unitary(scheme, ops)?;
    Ok(u.apply_pure(&ops.top_state())?.into())
}
