//! Dense complex matrix helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type CVector = DVector<Complex64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest elementwise deviation from Hermiticity, `max |m_ij - conj(m_ji)|`.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m^dagger) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub(crate) fn ensure_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension { expected: m.nrows(), found: m.ncols() });
    }
    if m.nrows() == 0 {
        return Err(Error::parameter("matrix must be non-empty"));
    }
    Ok(m.nrows())
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in non-decreasing
/// order; the columns of the returned matrix are the matching eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = ensure_square(m)?;
    let eig = SymmetricEigen::try_new(hermitize(m), 1e-15, 10_000)
        .ok_or_else(|| Error::numeric("Hermitian eigensolver did not converge"))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_hermitian_eigenvalue(m: &CMatrix) -> Result<f64> {
    let (values, _) = hermitian_eigen(m)?;
    Ok(values[0])
}

/// 2-norm condition number.
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Diagonalization `m = V diag(lambda) V^-1` of a general complex matrix.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: CVector,
    pub vectors: CMatrix,
    pub inverse: CMatrix,
    pub condition: f64,
}

impl Eigensystem {
    /// Rebuild `V diag(g(lambda)) V^-1`.
    pub fn map<F: Fn(Complex64) -> Complex64>(&self, g: F) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for c in 0..n {
            let w = g(self.values[c]);
            for r in 0..n {
                scaled[(r, c)] *= w;
            }
        }
        scaled * &self.inverse
    }
}

/// Eigenvalues and right eigenvectors via a complex Schur form followed by
/// back-substitution on the triangular factor.
///
/// Matrices whose eigenvector basis has condition number above `max_condition`
/// are rejected as numerically defective.
pub fn eigen_decompose(m: &CMatrix, max_condition: f64) -> Result<Eigensystem> {
    let n = ensure_square(m)?;
    let scale = max_abs(m).max(f64::MIN_POSITIVE);
    let schur = Schur::try_new(m.clone(), 1e-15, 100_000)
        .ok_or_else(|| Error::numeric("Schur decomposition did not converge"))?;
    let (q, t) = schur.unpack();

    let tiny = 1e-14 * scale;
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                acc += t[(i, j)] * y[(j, k)];
            }
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() <= tiny {
                if acc.norm() <= 1e-12 * scale {
                    // repeated eigenvalue with no coupling: independent direction
                    continue;
                }
                denom = Complex64::new(tiny, 0.0);
            }
            y[(i, k)] = -acc / denom;
        }
        let norm = y.column(k).norm();
        y.column_mut(k).unscale_mut(norm);
    }
    let vectors = q * y;
    let condition = condition_number(&vectors);
    if !(condition <= max_condition) {
        return Err(Error::numeric(format!(
            "matrix is not safely diagonalizable: eigenvector condition number {condition:e} exceeds {max_condition:e}"
        )));
    }
    let inverse = vectors
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::numeric("eigenvector matrix is singular"))?;
    let values = CVector::from_fn(n, |k, _| t[(k, k)]);
    Ok(Eigensystem { values, vectors, inverse, condition })
}
