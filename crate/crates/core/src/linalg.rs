//! Dense complex linear-algebra helpers shared by the physics modules.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{CMatrix, CVector, Error, Result, C64};

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Largest elementwise `|h_ij - conj(h_ji)|`.
pub fn hermitian_deviation(h: &CMatrix) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest elementwise `|(U†U - I)_ij|`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let prod = u.adjoint() * u;
    let mut worst = 0.0f64;
    for j in 0..prod.ncols() {
        for i in 0..prod.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `⟨ψ|H|ψ⟩`
pub fn expectation(h: &CMatrix, psi: &CVector) -> C64 {
    psi.dotc(&(h * psi))
}

fn is_real(h: &CMatrix) -> bool {
    h.iter().all(|z| z.im == 0.0)
}

fn check_square(h: &CMatrix) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            found: h.ncols(),
        });
    }
    Ok(())
}

/// Spectral decomposition `H = V diag(λ) V†` of a Hermitian matrix, with
/// eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(h: &CMatrix) -> Result<Self> {
        check_square(h)?;
        let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let dev = hermitian_deviation(h);
        if dev > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(dev));
        }

        let (values, vectors) = if is_real(h) {
            // Real symmetric generators (Jx, Jz², Jy², the QPT Hamiltonian) take
            // the cheaper real path.
            let re = DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| {
                0.5 * (h[(i, j)].re + h[(j, i)].re)
            });
            let eig = SymmetricEigen::new(re);
            let vecs = eig.eigenvectors.map(|x| C64::new(x, 0.0));
            (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), vecs)
        } else {
            let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
            let eig = SymmetricEigen::new(sym);
            (eig.eigenvalues.iter().copied().collect::<Vec<_>>(), eig.eigenvectors)
        };

        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let sorted_values = order.iter().map(|&k| values[k]).collect();
        let sorted_vectors = CMatrix::from_fn(vectors.nrows(), vectors.ncols(), |i, j| {
            vectors[(i, order[j])]
        });
        Ok(Self {
            values: sorted_values,
            vectors: sorted_vectors,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column `k` is the eigenvector belonging to `values()[k]`.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(f(λ)) V†`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(i·scale·H)`
    pub fn exp_i(&self, scale: f64) -> CMatrix {
        self.map_spectrum(|lambda| C64::from_polar(1.0, scale * lambda))
    }

    /// Coordinates of `psi` in the eigenbasis, `V†ψ`.
    pub fn coordinates(&self, psi: &CVector) -> CVector {
        self.vectors.ad_mul(psi)
    }
}
