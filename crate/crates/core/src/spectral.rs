//! Hamiltonians in spectral form and the Bohr frequencies they induce.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::params::DecoherenceParams;

const HERMITIAN_INPUT_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-12;
const DEGENERACY_TOL: f64 = 1e-12;

/// A Hamiltonian stored as its sorted spectrum plus the map from the input
/// basis to the energy basis.
///
/// When the Hamiltonian was given as a bare list of energies the energy basis
/// is a permutation of the input basis and no transform matrix is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralHamiltonian {
    eigenvalues: Vec<f64>,
    order: Vec<usize>,
    transform: Option<CMatrix>,
}

impl SpectralHamiltonian {
    /// Hamiltonian that is diagonal in the input basis with the given energies.
    pub fn from_eigenvalues(energies: &[f64]) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::parameter("at least one energy level is required"));
        }
        if let Some(bad) = energies.iter().find(|e| !e.is_finite()) {
            return Err(Error::parameter(format!("energies must be finite, got {bad}")));
        }
        let mut order: Vec<usize> = (0..energies.len()).collect();
        order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
        let eigenvalues = order.iter().map(|&k| energies[k]).collect();
        Ok(Self { eigenvalues, order, transform: None })
    }

    /// Hamiltonian `U diag(E) U^dagger`; `energies` must be non-decreasing and
    /// the columns of `transform` the matching orthonormal eigenvectors.
    pub fn from_transform(energies: Vec<f64>, transform: CMatrix) -> Result<Self> {
        let n = energies.len();
        if transform.nrows() != n || transform.ncols() != n {
            return Err(Error::Dimension { expected: n, found: transform.nrows() });
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::parameter("energies must be finite"));
        }
        if energies.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::parameter("energies must be sorted in non-decreasing order"));
        }
        let gram = transform.adjoint() * &transform;
        let residual = linalg::max_abs_diff(&gram, &CMatrix::identity(n, n));
        if residual > UNITARY_TOL {
            return Err(Error::Invariant { invariant: "unitarity of the energy-basis transform", residual });
        }
        Ok(Self { eigenvalues: energies, order: (0..n).collect(), transform: Some(transform) })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Energies in non-decreasing order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Input-basis index of each sorted level (identity when a transform is stored).
    pub fn input_order(&self) -> &[usize] {
        &self.order
    }

    pub fn basis_transform(&self) -> Option<&CMatrix> {
        self.transform.as_ref()
    }

    pub fn to_energy_basis(&self, m: &CMatrix) -> CMatrix {
        match &self.transform {
            Some(u) => u.adjoint() * m * u,
            None => {
                let n = self.dim();
                CMatrix::from_fn(n, n, |k, l| m[(self.order[k], self.order[l])])
            }
        }
    }

    pub fn from_energy_basis(&self, m: &CMatrix) -> CMatrix {
        match &self.transform {
            Some(u) => u * m * u.adjoint(),
            None => {
                let n = self.dim();
                let mut out = CMatrix::zeros(n, n);
                for k in 0..n {
                    for l in 0..n {
                        out[(self.order[k], self.order[l])] = m[(k, l)];
                    }
                }
                out
            }
        }
    }

    /// The Hamiltonian as a matrix in the input basis.
    pub fn matrix(&self) -> CMatrix {
        let n = self.dim();
        let diag = CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(self.eigenvalues[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        self.from_energy_basis(&diag)
    }

    pub(crate) fn check_dim(&self, m: &CMatrix) -> Result<()> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: m.nrows() });
        }
        Ok(())
    }
}

/// Diagonalize a Hermitian matrix into spectral form.
///
/// Exactly diagonal inputs skip the eigensolver so their energy basis is the
/// (sorted) input basis itself.
pub fn diagonalize_hamiltonian(h: &CMatrix) -> Result<SpectralHamiltonian> {
    let n = linalg::ensure_square(h)?;
    let scale = linalg::max_abs(h).max(1.0);
    let residual = linalg::hermitian_residual(h);
    if residual > HERMITIAN_INPUT_TOL * scale {
        return Err(Error::Invariant { invariant: "Hermiticity of the Hamiltonian", residual });
    }
    let off_diagonal_zero = (0..n).all(|r| (0..n).all(|c| r == c || h[(r, c)] == Complex64::new(0.0, 0.0)));
    if off_diagonal_zero {
        let energies: Vec<f64> = (0..n).map(|k| h[(k, k)].re).collect();
        return SpectralHamiltonian::from_eigenvalues(&energies);
    }
    let (energies, vectors) = linalg::hermitian_eigen(h)?;
    SpectralHamiltonian::from_transform(energies, vectors)
}

/// Antisymmetric matrix of Bohr frequencies `(E_n - E_m) / hbar`, indexed in
/// the energy basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyMatrix {
    omegas: RMatrix,
}

impl FrequencyMatrix {
    pub fn dim(&self) -> usize {
        self.omegas.nrows()
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.omegas[(n, m)]
    }

    pub fn as_matrix(&self) -> &RMatrix {
        &self.omegas
    }

    /// Distinct upper-triangle pairs `(n, m, omega)` with `n < m`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.dim();
        (0..n).flat_map(move |r| ((r + 1)..n).map(move |c| (r, c, self.omegas[(r, c)])))
    }
}

/// Levels closer than `1e-12 * max(1, max|E|)` are degenerate and get an exact
/// zero frequency.
pub fn bohr_frequencies(spec: &SpectralHamiltonian, params: &DecoherenceParams) -> FrequencyMatrix {
    frequencies_with_hbar(spec, params.hbar())
}

/// [`bohr_frequencies`] for an explicit action constant.
pub fn frequencies_with_hbar(spec: &SpectralHamiltonian, hbar: f64) -> FrequencyMatrix {
    let e = spec.eigenvalues();
    let n = e.len();
    let energy_scale = e.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
    let threshold = DEGENERACY_TOL * energy_scale;
    let mut omegas = RMatrix::zeros(n, n);
    for r in 0..n {
        for c in (r + 1)..n {
            let gap = e[r] - e[c];
            let w = if gap.abs() <= threshold { 0.0 } else { gap / hbar };
            omegas[(r, c)] = w;
            omegas[(c, r)] = -w;
        }
    }
    FrequencyMatrix { omegas }
}
