//! Phase encoding `e^{iĴnφ}`, the covariance-optimal phase axis, outcome
//! distributions with analytic φ-derivatives, classical and quantum Fisher
//! information and the Hellinger distance.

use std::io::Write;
use std::sync::OnceLock;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use crate::linalg::HermitianEigen;
use crate::spin::{MixedState, PureState, QuantumState, SpinOps, Unitary};
use crate::{csv, CMatrix, CVector, Error, Result, C64};

/// Probability floor of the Fisher sum.
pub const CFI_EPS: f64 = 1e-12;
const AXIS_TIE: f64 = 1e-9;

/// Unit direction `n` and the generator `Ĵn = n·J`.
#[derive(Debug, Clone)]
pub struct PhaseAxis {
    n: [f64; 3],
    jn: CMatrix,
    eigen: OnceLock<HermitianEigen>,
}

impl PhaseAxis {
    /// Normalises `n`; rejects zero or non-finite directions.
    pub fn new(n: [f64; 3], ops: &SpinOps) -> Result<Self> {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::param("axis", "direction must be finite and non-zero"));
        }
        let unit = [n[0] / norm, n[1] / norm, n[2] / norm];
        Ok(Self {
            n: unit,
            jn: ops.along(unit),
            eigen: OnceLock::new(),
        })
    }

    pub fn x(ops: &SpinOps) -> Self {
        Self::new([1.0, 0.0, 0.0], ops).unwrap()
    }

    pub fn y(ops: &SpinOps) -> Self {
        Self::new([0.0, 1.0, 0.0], ops).unwrap()
    }

    pub fn z(ops: &SpinOps) -> Self {
        Self::new([0.0, 0.0, 1.0], ops).unwrap()
    }

    pub fn direction(&self) -> [f64; 3] {
        self.n
    }

    pub fn jn(&self) -> &CMatrix {
        &self.jn
    }

    pub fn dim(&self) -> usize {
        self.jn.nrows()
    }

    pub fn eigen(&self) -> &HermitianEigen {
        self.eigen
            .get_or_init(|| HermitianEigen::new(&self.jn).expect("n·J is Hermitian"))
    }

    /// `e^{iĴnφ}`
    pub fn encoder(&self, phi: f64) -> Unitary {
        Unitary::trusted(self.eigen().exp_i(phi))
    }
}

/// Outcome probabilities `p_m` and their φ-derivatives `dp_m`, indexed in
/// ascending `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDist {
    p: Vec<f64>,
    dp: Vec<f64>,
}

impl ProbDist {
    pub fn new(p: Vec<f64>, dp: Vec<f64>) -> Result<Self> {
        if p.len() != dp.len() {
            return Err(Error::DimensionMismatch {
                expected: p.len(),
                found: dp.len(),
            });
        }
        if p.len() < 2 {
            return Err(Error::InvalidDistribution("need at least two outcomes".into()));
        }
        if p.iter().chain(&dp).any(|x| !x.is_finite()) {
            return Err(Error::InvalidDistribution("non-finite entry".into()));
        }
        if let Some((i, &x)) = p.iter().enumerate().find(|(_, &x)| x < -1e-12) {
            return Err(Error::InvalidDistribution(format!("p[{i}] = {x} is negative")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        let dtotal: f64 = dp.iter().sum();
        if dtotal.abs() > 1e-10 {
            return Err(Error::InvalidDistribution(format!("derivatives sum to {dtotal}")));
        }
        Ok(Self { p, dp })
    }

    pub(crate) fn trusted(p: Vec<f64>, dp: Vec<f64>) -> Self {
        Self { p, dp }
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn dp(&self) -> &[f64] {
        &self.dp
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Particle number implied by the length.
    pub fn n_particles(&self) -> usize {
        self.p.len() - 1
    }

    pub fn m_values(&self) -> Vec<f64> {
        let half = self.n_particles() as f64 / 2.0;
        (0..self.len()).map(|i| i as f64 - half).collect()
    }

    /// CSV with header `m,p,dp`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let rows = self
            .m_values()
            .into_iter()
            .zip(self.p.iter().zip(&self.dp))
            .map(|(m, (&p, &dp))| [m, p, dp]);
        csv::write_table(w, &csv::DIST_HEADER, rows)
    }

    /// Parses the output of [`ProbDist::write_csv`]; the `m` column must run
    /// over `−N/2..N/2` in ascending order.
    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = csv::parse_table(text, &csv::DIST_HEADER)?;
        if rows.len() < 2 {
            return Err(Error::Parse("need at least two rows".into()));
        }
        let half = (rows.len() - 1) as f64 / 2.0;
        for (i, row) in rows.iter().enumerate() {
            if row[0] != i as f64 - half {
                return Err(Error::Parse(format!("row {}: expected m = {}", i + 1, i as f64 - half)));
            }
        }
        let p = rows.iter().map(|r| r[1]).collect();
        let dp = rows.iter().map(|r| r[2]).collect();
        ProbDist::new(p, dp)
    }
}

fn expectations(psi: &PureState, ops: &SpinOps) -> ([f64; 3], [CVector; 3]) {
    let a = psi.amplitudes();
    let applied = [ops.jx() * a, ops.jy() * a, ops.jz() * a];
    let mean = [
        a.dotc(&applied[0]).re,
        a.dotc(&applied[1]).re,
        a.dotc(&applied[2]).re,
    ];
    (mean, applied)
}

/// `Cov_kl = ½⟨ĴkĴl + ĴlĴk⟩ − ⟨Ĵk⟩⟨Ĵl⟩` for `k, l ∈ {x, y, z}`.
pub fn covariance(psi: &PureState, ops: &SpinOps) -> [[f64; 3]; 3] {
    let (mean, applied) = expectations(psi, ops);
    let mut cov = [[0.0; 3]; 3];
    for k in 0..3 {
        for l in k..3 {
            // ½⟨JkJl + JlJk⟩ = Re⟨Jk ψ|Jl ψ⟩
            let sym = applied[k].dotc(&applied[l]).re;
            cov[k][l] = sym - mean[k] * mean[l];
            cov[l][k] = cov[k][l];
        }
    }
    cov
}

/// Unit eigenvector of the covariance matrix with the largest eigenvalue.
///
/// Degenerate top eigenvalues (within 1e-9) resolve to the direction of the
/// top eigenspace with the largest `|n_z|`, then `|n_y|`, then `|n_x|`. The
/// first non-zero component is made positive. Mixed states have no default
/// axis and return [`Error::AxisRequired`].
pub fn optimal_phase_axis(s: &QuantumState, ops: &SpinOps) -> Result<PhaseAxis> {
    let psi = match s {
        QuantumState::Pure(p) => p,
        QuantumState::Mixed(_) => return Err(Error::AxisRequired),
    };
    if psi.dim() != ops.dim() {
        return Err(Error::DimensionMismatch {
            expected: ops.dim(),
            found: psi.dim(),
        });
    }
    let c = covariance(psi, ops);
    let eig = SymmetricEigen::new(Matrix3::from_fn(|i, j| c[i][j]));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let top = eig.eigenvalues[order[0]];

    let space: Vec<Vector3<f64>> = order
        .iter()
        .filter(|&&k| top - eig.eigenvalues[k] < AXIS_TIE)
        .map(|&k| eig.eigenvectors.column(k).into_owned())
        .collect();

    let mut n = space[0];
    if space.len() > 1 {
        for probe in [Vector3::z(), Vector3::y(), Vector3::x()] {
            let proj: Vector3<f64> = space.iter().map(|v| v * v.dot(&probe)).sum();
            if proj.norm() > 1e-6 {
                n = proj.normalize();
                break;
            }
        }
    }
    if let Some(first) = n.iter().find(|c| c.abs() > 1e-12) {
        if *first < 0.0 {
            n = -n;
        }
    }
    PhaseAxis::new([n[0], n[1], n[2]], ops)
}

/// `e^{iĴnφ}|ψ⟩` or `e^{iĴnφ} ρ e^{−iĴnφ}`.
pub fn encode_phase(s: &QuantumState, axis: &PhaseAxis, phi: f64) -> Result<QuantumState> {
    if s.dim() != axis.dim() {
        return Err(Error::DimensionMismatch {
            expected: axis.dim(),
            found: s.dim(),
        });
    }
    let eig = axis.eigen();
    Ok(match s {
        QuantumState::Pure(p) => {
            let mut c = eig.coordinates(p.amplitudes());
            for (ck, &l) in c.iter_mut().zip(eig.values()) {
                *ck *= C64::from_polar(1.0, l * phi);
            }
            QuantumState::Pure(PureState::trusted(eig.vectors() * c))
        }
        QuantumState::Mixed(_) => axis.encoder(phi).apply(s)?,
    })
}

/// `p_m = ⟨m|U₂ρU₂†|m⟩` and `dp_m = ⟨m|U₂ i[Ĵn, ρ] U₂†|m⟩` for an already
/// encoded state.
pub fn measurement_distribution(s: &QuantumState, readout: &Unitary, axis: &PhaseAxis) -> Result<ProbDist> {
    let dim = readout.dim();
    if s.dim() != dim || axis.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: if s.dim() != dim { s.dim() } else { axis.dim() },
        });
    }
    let u = readout.matrix();
    let i = C64::new(0.0, 1.0);
    match s {
        QuantumState::Pure(psi) => {
            let a = u * psi.amplitudes();
            let adot = u * (axis.jn() * psi.amplitudes() * i);
            Ok(pure_dist(&a, &adot))
        }
        QuantumState::Mixed(rho) => Ok(mixed_dist(rho, u, axis.jn())),
    }
}

pub(crate) fn pure_dist(a: &CVector, adot: &CVector) -> ProbDist {
    let p = a.iter().map(|z| z.norm_sqr()).collect();
    let dp = a.iter().zip(adot.iter()).map(|(z, w)| 2.0 * (z.conj() * w).re).collect();
    ProbDist::trusted(p, dp)
}

fn mixed_dist(rho: &MixedState, u: &CMatrix, jn: &CMatrix) -> ProbDist {
    let r = rho.rho();
    let comm = (jn * r - r * jn) * C64::new(0.0, 1.0);
    let diag_of = |m: &CMatrix| -> Vec<f64> {
        let rotated = u * m * u.adjoint();
        (0..rotated.nrows()).map(|k| rotated[(k, k)].re).collect()
    };
    ProbDist::trusted(diag_of(r), diag_of(&comm))
}

/// `F_C = Σ dp_m²/p_m` over outcomes with `p_m > ε`.
///
/// Outcomes with `p_m ≤ ε` must have `|dp_m| ≤ √ε`, otherwise the sum is
/// ill-conditioned and an error is returned.
pub fn cfi(d: &ProbDist) -> Result<f64> {
    let guard = CFI_EPS.sqrt();
    let mut total = 0.0;
    for (index, (&p, &dp)) in d.p.iter().zip(&d.dp).enumerate() {
        if p > CFI_EPS {
            total += dp * dp / p;
        } else if dp.abs() > guard {
            return Err(Error::IllConditioned { index, p, dp });
        }
    }
    Ok(total)
}

/// `4(⟨Ĵn²⟩ − ⟨Ĵn⟩²)`
pub fn qfi_pure(s: &PureState, axis: &PhaseAxis) -> f64 {
    let jpsi = axis.jn() * s.amplitudes();
    let mean = s.amplitudes().dotc(&jpsi).re;
    4.0 * (jpsi.norm_squared() - mean * mean)
}

/// `Σ_ij 2|⟨e_i|Ĵn|e_j⟩|² (λ_i − λ_j)²/(λ_i + λ_j)` over pairs with
/// `λ_i + λ_j > ε`.
pub fn qfi_mixed(rho: &MixedState, axis: &PhaseAxis) -> Result<f64> {
    let eig = HermitianEigen::new(rho.rho())?;
    let v = eig.vectors();
    let jn_e = v.adjoint() * axis.jn() * v;
    let lam = eig.values();
    let mut total = 0.0;
    for i in 0..lam.len() {
        for j in 0..lam.len() {
            let s = lam[i] + lam[j];
            if s > CFI_EPS {
                let d = lam[i] - lam[j];
                total += 2.0 * jn_e[(i, j)].norm_sqr() * d * d / s;
            }
        }
    }
    Ok(total)
}

pub fn qfi(s: &QuantumState, axis: &PhaseAxis) -> Result<f64> {
    match s {
        QuantumState::Pure(p) => Ok(qfi_pure(p, axis)),
        QuantumState::Mixed(m) => qfi_mixed(m, axis),
    }
}

/// `d_H = √(1 − Σ √(p_m q_m))`, clamped to `[0, 1]`.
pub fn hellinger(d1: &ProbDist, d2: &ProbDist) -> Result<f64> {
    if d1.len() != d2.len() {
        return Err(Error::DimensionMismatch {
            expected: d1.len(),
            found: d2.len(),
        });
    }
    let overlap: f64 = d1
        .p
        .iter()
        .zip(&d2.p)
        .map(|(&a, &b)| (a.max(0.0) * b.max(0.0)).sqrt())
        .sum();
    Ok((1.0 - overlap).clamp(0.0, 1.0).sqrt())
}
