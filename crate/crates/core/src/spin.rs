//! Collective-spin Hilbert space: angular-momentum operators for `N`
//! two-mode particles (total spin `j = N/2`), pure and mixed states,
//! unitaries generated by Hermitian operators, and Husimi Q data.

use std::f64::consts::PI;
use std::io::Write;
use std::ops::Mul;
use std::sync::OnceLock;

use crate::linalg::{self, HermitianEigen};
use crate::{CMatrix, CVector, Error, Result, C64};

const NORM_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-10;

/// Collective operators `Ĵx, Ĵy, Ĵz` in the ascending Jz basis.
#[derive(Debug, Clone)]
pub struct SpinOps {
    n: usize,
    m: Vec<f64>,
    jx: CMatrix,
    jy: CMatrix,
    jz: CMatrix,
    jy_eigen: OnceLock<HermitianEigen>,
}

impl SpinOps {
    /// Standard ladder construction: `Ĵ+|m⟩ = √(j(j+1) − m(m+1)) |m+1⟩`,
    /// `Ĵx = (Ĵ+ + Ĵ−)/2`, `Ĵy = (Ĵ+ − Ĵ−)/2i`.
    pub fn new(n_particles: usize) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let dim = n_particles + 1;
        let j = n_particles as f64 / 2.0;
        let m: Vec<f64> = (0..dim).map(|i| i as f64 - j).collect();

        let mut jp = CMatrix::zeros(dim, dim);
        for i in 0..n_particles {
            let c = (j * (j + 1.0) - m[i] * (m[i] + 1.0)).max(0.0).sqrt();
            jp[(i + 1, i)] = C64::new(c, 0.0);
        }
        let jm = jp.adjoint();
        let jx = (&jp + &jm) * C64::new(0.5, 0.0);
        let jy = (&jp - &jm) * C64::new(0.0, -0.5);
        let jz = CMatrix::from_diagonal(&CVector::from_iterator(
            dim,
            m.iter().map(|&x| C64::new(x, 0.0)),
        ));

        Ok(Self {
            n: n_particles,
            m,
            jx,
            jy,
            jz,
            jy_eigen: OnceLock::new(),
        })
    }

    pub fn n_particles(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Total spin `j = N/2`.
    pub fn j(&self) -> f64 {
        self.n as f64 / 2.0
    }

    /// Jz eigenvalue of each basis index.
    pub fn m_values(&self) -> &[f64] {
        &self.m
    }

    /// Basis index of Jz eigenvalue `m`, if `m` is on the ladder.
    pub fn index_of(&self, m: f64) -> Option<usize> {
        let idx = m + self.j();
        let rounded = idx.round();
        if (idx - rounded).abs() > 1e-9 || rounded < 0.0 || rounded > self.n as f64 {
            return None;
        }
        Some(rounded as usize)
    }

    pub fn jx(&self) -> &CMatrix {
        &self.jx
    }

    pub fn jy(&self) -> &CMatrix {
        &self.jy
    }

    pub fn jz(&self) -> &CMatrix {
        &self.jz
    }

    /// `n·J` for a (not necessarily normalised) direction.
    pub fn along(&self, n: [f64; 3]) -> CMatrix {
        &self.jx * C64::new(n[0], 0.0) + &self.jy * C64::new(n[1], 0.0) + &self.jz * C64::new(n[2], 0.0)
    }

    pub fn casimir(&self) -> CMatrix {
        &self.jx * &self.jx + &self.jy * &self.jy + &self.jz * &self.jz
    }

    /// `|m = N/2⟩`, the fully polarised reference state.
    pub fn top_state(&self) -> PureState {
        PureState::basis(self.dim(), self.n)
    }

    pub(crate) fn jy_eigen(&self) -> &HermitianEigen {
        self.jy_eigen
            .get_or_init(|| HermitianEigen::new(&self.jy).expect("Jy is Hermitian by construction"))
    }

    /// `exp(iθĴy)`
    pub fn rotation_y(&self, theta: f64) -> Unitary {
        Unitary::trusted(self.jy_eigen().exp_i(theta))
    }

    /// `exp(iθĴz)`, built directly from the diagonal.
    pub fn rotation_z(&self, theta: f64) -> Unitary {
        let diag = CVector::from_iterator(self.dim(), self.m.iter().map(|&m| C64::from_polar(1.0, theta * m)));
        Unitary::trusted(CMatrix::from_diagonal(&diag))
    }
}

/// Normalised state vector in the Jz basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    pub fn new(amps: CVector) -> Result<Self> {
        let norm2 = amps.norm_squared();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm2} is not 1")));
        }
        Ok(Self { amps })
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("cannot normalise a zero vector".into()));
        }
        Ok(Self { amps: amps / C64::new(norm, 0.0) })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = CVector::zeros(dim);
        amps[index] = C64::new(1.0, 0.0);
        Self { amps }
    }

    pub(crate) fn trusted(amps: CVector) -> Self {
        Self { amps }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn expectation(&self, op: &CMatrix) -> C64 {
        linalg::expectation(op, &self.amps)
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// Outcome probabilities `|⟨m|ψ⟩|²`.
    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn to_density(&self) -> MixedState {
        MixedState {
            rho: &self.amps * self.amps.adjoint(),
        }
    }
}

/// Density matrix in the Jz basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    rho: CMatrix,
}

impl MixedState {
    pub fn new(rho: CMatrix) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::DimensionMismatch {
                expected: rho.nrows(),
                found: rho.ncols(),
            });
        }
        let dev = linalg::hermitian_deviation(&rho);
        if dev > 1e-12 {
            return Err(Error::NotHermitian(dev));
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > 1e-12 || trace.im.abs() > 1e-12 {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let eig = HermitianEigen::new(&rho)?;
        if let Some(&low) = eig.values().first() {
            if low < -1e-10 {
                return Err(Error::InvalidState(format!("negative eigenvalue {low:.3e}")));
            }
        }
        Ok(Self { rho })
    }

    /// Diagonal state `Σ w_i |i⟩⟨i|` from non-negative weights normalised to 1.
    pub fn from_diagonal(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidState("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidState("weights sum to zero".into()));
        }
        let diag = CVector::from_iterator(weights.len(), weights.iter().map(|w| C64::new(w / total, 0.0)));
        Ok(Self {
            rho: CMatrix::from_diagonal(&diag),
        })
    }

    pub(crate) fn trusted(rho: CMatrix) -> Self {
        Self { rho }
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn purity(&self) -> f64 {
        // Tr[ρ²] = Σ |ρ_ij|² for Hermitian ρ
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn expectation(&self, op: &CMatrix) -> C64 {
        (&self.rho * op).trace()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).collect()
    }

    /// Eigen-decomposition of ρ as (weight, state) pairs.
    pub fn spectral_components(&self) -> Result<Vec<(f64, PureState)>> {
        let dim = self.dim();
        let diagonal = (0..dim).all(|j| (0..dim).all(|i| i == j || self.rho[(i, j)] == C64::new(0.0, 0.0)));
        if diagonal {
            return Ok((0..self.dim())
                .map(|i| (self.rho[(i, i)].re, PureState::basis(self.dim(), i)))
                .collect());
        }
        let eig = HermitianEigen::new(&self.rho)?;
        Ok(eig
            .values()
            .iter()
            .enumerate()
            .map(|(k, &w)| (w, PureState::trusted(eig.vectors().column(k).into_owned())))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(MixedState),
}

impl QuantumState {
    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(s) => s.dim(),
            QuantumState::Mixed(s) => s.dim(),
        }
    }

    pub fn expectation(&self, op: &CMatrix) -> C64 {
        match self {
            QuantumState::Pure(s) => s.expectation(op),
            QuantumState::Mixed(s) => s.expectation(op),
        }
    }

    pub fn density(&self) -> MixedState {
        match self {
            QuantumState::Pure(s) => s.to_density(),
            QuantumState::Mixed(s) => s.clone(),
        }
    }

    pub fn populations(&self) -> Vec<f64> {
        match self {
            QuantumState::Pure(s) => s.populations(),
            QuantumState::Mixed(s) => s.populations(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            QuantumState::Pure(s) => Some(s),
            QuantumState::Mixed(_) => None,
        }
    }
}

impl From<PureState> for QuantumState {
    fn from(s: PureState) -> Self {
        QuantumState::Pure(s)
    }
}

impl From<MixedState> for QuantumState {
    fn from(s: MixedState) -> Self {
        QuantumState::Mixed(s)
    }
}

/// Unitary matrix, `U†U = I` within 1e-10.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    u: CMatrix,
}

impl Unitary {
    pub fn new(u: CMatrix) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(Error::DimensionMismatch {
                expected: u.nrows(),
                found: u.ncols(),
            });
        }
        let dev = linalg::unitarity_deviation(&u);
        if dev.is_nan() || dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { u })
    }

    /// For matrices that are unitary by construction (spectral exponentials
    /// and their products).
    pub(crate) fn trusted(u: CMatrix) -> Self {
        Self { u }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            u: CMatrix::identity(dim, dim),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary { u: self.u.adjoint() }
    }

    pub fn deviation(&self) -> f64 {
        linalg::unitarity_deviation(&self.u)
    }

    pub fn apply_pure(&self, s: &PureState) -> Result<PureState> {
        check_dims(self.dim(), s.dim())?;
        Ok(PureState::trusted(&self.u * s.amplitudes()))
    }

    pub fn apply(&self, s: &QuantumState) -> Result<QuantumState> {
        apply(self, s)
    }
}

impl Mul<&Unitary> for &Unitary {
    type Output = Unitary;

    fn mul(self, rhs: &Unitary) -> Unitary {
        Unitary::trusted(&self.u * &rhs.u)
    }
}

impl Mul for Unitary {
    type Output = Unitary;

    fn mul(self, rhs: Unitary) -> Unitary {
        &self * &rhs
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `exp(i·scale·h)` through the eigendecomposition of `h`.
pub fn expm_generator(h: &CMatrix, scale: f64) -> Result<Unitary> {
    if !scale.is_finite() {
        return Err(Error::param("scale", "must be finite"));
    }
    let eig = HermitianEigen::new(h)?;
    Ok(Unitary::trusted(eig.exp_i(scale)))
}

/// `U|ψ⟩` for pure states, `UρU†` for mixed ones.
pub fn apply(u: &Unitary, s: &QuantumState) -> Result<QuantumState> {
    check_dims(u.dim(), s.dim())?;
    Ok(match s {
        QuantumState::Pure(p) => QuantumState::Pure(PureState::trusted(u.matrix() * p.amplitudes())),
        QuantumState::Mixed(m) => {
            QuantumState::Mixed(MixedState::trusted(u.matrix() * m.rho() * u.matrix().adjoint()))
        }
    })
}

/// Husimi Q function sampled on a (θ, φ) grid.
///
/// θ runs over `[0, π]` inclusive and φ over `[0, 2π)`; values are stored
/// row-major with θ as the slow index.
#[derive(Debug, Clone)]
pub struct HusimiField {
    thetas: Vec<f64>,
    phis: Vec<f64>,
    q: Vec<f64>,
}

impl HusimiField {
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn values(&self) -> &[f64] {
        &self.q
    }

    pub fn at(&self, i_theta: usize, i_phi: usize) -> f64 {
        self.q[i_theta * self.phis.len() + i_phi]
    }

    /// `∫ Q dΩ` by the trapezoid rule in θ and the periodic rectangle rule in φ.
    pub fn integral(&self) -> f64 {
        let n_theta = self.thetas.len();
        let d_theta = PI / (n_theta - 1) as f64;
        let d_phi = 2.0 * PI / self.phis.len() as f64;
        let mut total = 0.0;
        for (i, &theta) in self.thetas.iter().enumerate() {
            let edge = if i == 0 || i == n_theta - 1 { 0.5 } else { 1.0 };
            let row: f64 = (0..self.phis.len()).map(|k| self.at(i, k)).sum();
            total += edge * theta.sin() * row;
        }
        total * d_theta * d_phi
    }

    pub fn max(&self) -> f64 {
        self.q.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Grid points `(θ, φ, q)` whose value is within `rel_tol` of the maximum.
    pub fn peaks(&self, rel_tol: f64) -> Vec<(f64, f64, f64)> {
        let top = self.max();
        let mut out = Vec::new();
        for (i, &theta) in self.thetas.iter().enumerate() {
            for (k, &phi) in self.phis.iter().enumerate() {
                let q = self.at(i, k);
                if q >= top * (1.0 - rel_tol) {
                    out.push((theta, phi, q));
                }
            }
        }
        out
    }

    /// CSV with header `theta,phi,q`, row-major over the grid.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut rows = Vec::with_capacity(self.q.len());
        for (i, &theta) in self.thetas.iter().enumerate() {
            for (k, &phi) in self.phis.iter().enumerate() {
                rows.push(vec![theta, phi, self.at(i, k)]);
            }
        }
        crate::csv::write_table(w, &["theta", "phi", "q"], rows.iter().map(|r| r.as_slice()))
    }
}

/// `Q(θ,φ) = (N+1)/4π ⟨θ,φ|ρ|θ,φ⟩` with `|θ,φ⟩ = e^{iφĴz} e^{iθĴy} |N/2⟩`.
pub fn husimi_q(s: &QuantumState, ops: &SpinOps, n_theta: usize, n_phi: usize) -> Result<HusimiField> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::param("grid", "theta and phi counts must be at least 2"));
    }
    check_dims(ops.dim(), s.dim())?;
    let dim = ops.dim();
    let top = ops.top_state();
    let eig = ops.jy_eigen();
    let top_coords = eig.coordinates(top.amplitudes());

    let thetas: Vec<f64> = (0..n_theta).map(|i| PI * i as f64 / (n_theta - 1) as f64).collect();
    let phis: Vec<f64> = (0..n_phi).map(|k| 2.0 * PI * k as f64 / n_phi as f64).collect();
    let prefactor = (ops.n_particles() as f64 + 1.0) / (4.0 * PI);

    let mut q = Vec::with_capacity(n_theta * n_phi);
    for &theta in &thetas {
        // w = e^{iθJy}|N/2⟩
        let phased = CVector::from_iterator(
            dim,
            eig.values()
                .iter()
                .zip(top_coords.iter())
                .map(|(&l, &c)| c * C64::from_polar(1.0, theta * l)),
        );
        let w = eig.vectors() * phased;

        // ⟨θφ|ρ|θφ⟩ = Σ_d g_d e^{iφd}, g_d = Σ_j conj(w_j) ρ_{j,j+d} w_{j+d}
        let mut g = vec![C64::new(0.0, 0.0); dim];
        match s {
            QuantumState::Pure(p) => {
                let u: Vec<C64> = w.iter().zip(p.amplitudes().iter()).map(|(wj, pj)| wj.conj() * pj).collect();
                for (d, gd) in g.iter_mut().enumerate() {
                    *gd = (0..dim - d).map(|j| u[j] * u[j + d].conj()).sum();
                }
            }
            QuantumState::Mixed(m) => {
                let rho = m.rho();
                for (d, gd) in g.iter_mut().enumerate() {
                    *gd = (0..dim - d).map(|j| w[j].conj() * rho[(j, j + d)] * w[j + d]).sum();
                }
            }
        }

        for &phi in &phis {
            let mut acc = g[0].re;
            for (d, gd) in g.iter().enumerate().skip(1) {
                acc += 2.0 * (gd * C64::from_polar(1.0, phi * d as f64)).re;
            }
            q.push(prefactor * acc.max(0.0));
        }
    }

    Ok(HusimiField { thetas, phis, q })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_particles_rejected() {
        assert!(matches!(SpinOps::new(0), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn spin_half_jz() {
        let ops = SpinOps::new(1).unwrap();
        assert_eq!(ops.jz()[(0, 0)], C64::new(-0.5, 0.0));
        assert_eq!(ops.jz()[(1, 1)], C64::new(0.5, 0.0));
        assert_eq!(ops.jz()[(0, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn spin_one_commutator() {
        let ops = SpinOps::new(2).unwrap();
        for (k, m) in ops.m_values().iter().enumerate() {
            assert_eq!(ops.jz()[(k, k)].re, *m);
        }
        assert_eq!(ops.m_values(), &[-1.0, 0.0, 1.0]);
        let comm = ops.jx() * ops.jy() - ops.jy() * ops.jx();
        let target = ops.jz() * C64::new(0.0, 1.0);
        assert!(max_abs(&(comm - target)) < 1e-12);
    }

    #[test]
    fn casimir_n10() {
        let ops = SpinOps::new(10).unwrap();
        let c = ops.casimir() - CMatrix::identity(11, 11) * C64::new(30.0, 0.0);
        assert!(max_abs(&c) < 1e-10);
    }

    #[test]
    fn algebra_holds_up_to_sixty() {
        for n in 1..=60 {
            let ops = SpinOps::new(n).unwrap();
            let i = C64::new(0.0, 1.0);
            for (a, b, c) in [
                (ops.jx(), ops.jy(), ops.jz()),
                (ops.jy(), ops.jz(), ops.jx()),
                (ops.jz(), ops.jx(), ops.jy()),
            ] {
                assert!(linalg::hermitian_deviation(a) < 1e-12);
                let comm = a * b - b * a - c * i;
                assert!(max_abs(&comm) < 1e-10, "N={n}");
            }
            let j = ops.j();
            let cas = ops.casimir() - CMatrix::identity(n + 1, n + 1) * C64::new(j * (j + 1.0), 0.0);
            assert!(max_abs(&cas) < 1e-10, "N={n}");
        }
    }

    #[test]
    fn index_of_half_integer() {
        let ops = SpinOps::new(3).unwrap();
        assert_eq!(ops.index_of(-1.5), Some(0));
        assert_eq!(ops.index_of(1.5), Some(3));
        assert_eq!(ops.index_of(1.0), None);
        assert_eq!(ops.index_of(2.5), None);
    }

    #[test]
    fn expm_zero_scale_is_identity() {
        let ops = SpinOps::new(6).unwrap();
        let u = expm_generator(ops.jx(), 0.0).unwrap();
        assert!(linalg::max_abs_diff(u.matrix(), &CMatrix::identity(7, 7)) < 1e-12);
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(expm_generator(&h, 1.0), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn expm_diagonal_generator() {
        let ops = SpinOps::new(5).unwrap();
        let theta = 0.7;
        let u = expm_generator(ops.jz(), theta).unwrap();
        for (k, &m) in ops.m_values().iter().enumerate() {
            let out = u.apply_pure(&PureState::basis(6, k)).unwrap();
            let expected = C64::from_polar(1.0, theta * m);
            assert!((out.amplitudes()[k] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn apply_roundtrip_mixed() {
        let ops = SpinOps::new(4).unwrap();
        let u = expm_generator(&(ops.jx() * ops.jx()), 0.3).unwrap();
        let rho = MixedState::from_diagonal(&[0.1, 0.2, 0.3, 0.25, 0.15]).unwrap();
        let s = QuantumState::Mixed(rho.clone());
        let back = apply(&u.adjoint(), &apply(&u, &s).unwrap()).unwrap();
        match back {
            QuantumState::Mixed(m) => assert!(linalg::max_abs_diff(m.rho(), rho.rho()) < 1e-10),
            _ => unreachable!(),
        }
    }

    #[test]
    fn apply_dimension_mismatch() {
        let u = Unitary::identity(3);
        let s = QuantumState::Pure(PureState::basis(4, 0));
        assert!(matches!(apply(&u, &s), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn mixed_state_validation() {
        let mut rho = CMatrix::zeros(2, 2);
        rho[(0, 0)] = C64::new(1.2, 0.0);
        rho[(1, 1)] = C64::new(-0.2, 0.0);
        assert!(MixedState::new(rho).is_err());
        assert!(PureState::new(CVector::from_element(2, C64::new(1.0, 0.0))).is_err());
    }

    #[test]
    fn husimi_css_peaks_at_north_pole() {
        let ops = SpinOps::new(10).unwrap();
        let s = QuantumState::Pure(ops.top_state());
        let field = husimi_q(&s, &ops, 41, 80).unwrap();
        assert!(field.values().iter().all(|&q| q >= 0.0));
        let peaks = field.peaks(1e-12);
        assert!(peaks.iter().all(|&(theta, _, _)| theta == 0.0));
        // (N+1)/4π at the pole
        assert!((field.max() - 11.0 / (4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn husimi_grid_too_small() {
        let ops = SpinOps::new(2).unwrap();
        let s = QuantumState::Pure(ops.top_state());
        assert!(husimi_q(&s, &ops, 1, 10).is_err());
    }
}
