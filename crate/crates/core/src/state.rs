use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::spectral::SpectralHamiltonian;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Which basis the entries of a [`DensityMatrix`] are expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Input,
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateViolation {
    Hermiticity { residual: f64 },
    Trace { trace: f64 },
    Positivity { min_eigenvalue: f64 },
}

impl fmt::Display for StateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateViolation::Hermiticity { residual } => write!(f, "Hermiticity (residual {residual:e})"),
            StateViolation::Trace { trace } => write!(f, "unit trace (trace {trace})"),
            StateViolation::Positivity { min_eigenvalue } => {
                write!(f, "positivity (min eigenvalue {min_eigenvalue})")
            }
        }
    }
}

/// Every invariant a matrix fails, in the order Hermiticity, trace, positivity.
pub fn check_density_matrix(m: &CMatrix) -> Result<Vec<StateViolation>> {
    linalg::ensure_square(m)?;
    let mut violations = Vec::new();
    let residual = linalg::hermitian_residual(m);
    if residual > HERMITIAN_TOL {
        violations.push(StateViolation::Hermiticity { residual });
    }
    let trace = m.trace();
    if (trace - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
        violations.push(StateViolation::Trace { trace: trace.re });
    }
    let min_eigenvalue = linalg::min_hermitian_eigenvalue(m)?;
    if min_eigenvalue < -POSITIVITY_TOL {
        violations.push(StateViolation::Positivity { min_eigenvalue });
    }
    Ok(violations)
}

/// A Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    basis: Basis,
}

/// Validate `m` as a density matrix in the input basis.
pub fn validate_density_matrix(m: &CMatrix) -> Result<DensityMatrix> {
    DensityMatrix::with_basis(m.clone(), Basis::Input)
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        Self::with_basis(entries, Basis::Input)
    }

    pub fn with_basis(entries: CMatrix, basis: Basis) -> Result<Self> {
        let violations = check_density_matrix(&entries)?;
        if !violations.is_empty() {
            return Err(Error::InvalidState(violations));
        }
        Ok(Self { entries, basis })
    }

    /// `|psi><psi|` for the normalized `psi`.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::parameter("state vector must have a finite nonzero norm"));
        }
        let v = psi.unscale(norm);
        Ok(Self::trusted(&v * v.adjoint(), Basis::Input))
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let n = populations.len();
        let m = CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(populations[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(m)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self::trusted(CMatrix::identity(n, n).unscale(n as f64), Basis::Input)
    }

    /// Wrap entries produced by a positivity-preserving map; only Hermiticity
    /// is restored (exactly), the other invariants are the caller's guarantee.
    pub(crate) fn trusted(entries: CMatrix, basis: Basis) -> Self {
        Self { entries: linalg::hermitize(&entries), basis }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.entries[(n, m)]
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Re-run all invariant checks.
    pub fn violations(&self) -> Vec<StateViolation> {
        check_density_matrix(&self.entries).unwrap_or_default()
    }

    pub fn in_energy_basis(&self, spec: &SpectralHamiltonian) -> Result<Self> {
        spec.check_dim(&self.entries)?;
        Ok(match self.basis {
            Basis::Energy => self.clone(),
            Basis::Input => Self::trusted(spec.to_energy_basis(&self.entries), Basis::Energy),
        })
    }

    pub fn in_input_basis(&self, spec: &SpectralHamiltonian) -> Result<Self> {
        spec.check_dim(&self.entries)?;
        Ok(match self.basis {
            Basis::Input => self.clone(),
            Basis::Energy => Self::trusted(spec.from_energy_basis(&self.entries), Basis::Input),
        })
    }

    /// Express energy-basis `entries` in this state's basis.
    pub(crate) fn like(&self, energy_entries: CMatrix, spec: &SpectralHamiltonian) -> Self {
        match self.basis {
            Basis::Energy => Self::trusted(energy_entries, Basis::Energy),
            Basis::Input => Self::trusted(spec.from_energy_basis(&energy_entries), Basis::Input),
        }
    }
}
