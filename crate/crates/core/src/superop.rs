//! Linear maps on column-major vectorized density matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::spectral::SpectralHamiltonian;

/// An `N^2 x N^2` matrix acting on `vec(rho)`, where element `(n, m)` of
/// `rho` sits at index `n + N m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    matrix: CMatrix,
    dim: usize,
}

impl Superoperator {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let size = linalg::ensure_square(&matrix)?;
        let dim = (size as f64).sqrt().round() as usize;
        if dim * dim != size {
            return Err(Error::parameter(format!(
                "superoperator size {size} is not the square of a Hilbert-space dimension"
            )));
        }
        Ok(Self { matrix, dim })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim * dim, dim * dim), dim }
    }

    /// `rho -> U rho U^dagger`, i.e. `conj(U) (x) U`.
    pub fn unitary_conjugation(u: &CMatrix) -> Result<Self> {
        let dim = linalg::ensure_square(u)?;
        Ok(Self { matrix: u.map(|z| z.conj()).kronecker(u), dim })
    }

    /// Conjugation by `exp(-i H duration / hbar)`, built in the input basis.
    pub fn hamiltonian_step(spec: &SpectralHamiltonian, hbar: f64, duration: f64) -> Result<Self> {
        let n = spec.dim();
        let phases = CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(0.0, -spec.eigenvalues()[r] * duration / hbar).exp()
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::unitary_conjugation(&spec.from_energy_basis(&phases))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `other` applied after `self`.
    pub fn then(&self, other: &Superoperator) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::Dimension { expected: self.dim, found: other.dim });
        }
        Ok(Self { matrix: &other.matrix * &self.matrix, dim: self.dim })
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.nrows() != self.dim || rho.ncols() != self.dim {
            return Err(Error::Dimension { expected: self.dim, found: rho.nrows() });
        }
        Ok(unvec(&(&self.matrix * vec(rho)), self.dim))
    }

    /// `vec(I)^dagger M = vec(I)^dagger` within `tol`.
    pub fn is_trace_preserving(&self, tol: f64) -> bool {
        let id = vec(&CMatrix::identity(self.dim, self.dim));
        let row = id.adjoint() * &self.matrix;
        row.iter().zip(id.iter()).all(|(a, b)| (a - b.conj()).norm() <= tol)
    }
}

pub fn vec(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvec(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}
