//! Harmonic oscillator prepared in a coherent state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{damping_rate, frequency_shift, propagator_factor};
use crate::linalg::{CMatrix, CVector};
use crate::params::DecoherenceParams;
use crate::special::ln_factorial;
use crate::spectral::SpectralHamiltonian;
use crate::state::DensityMatrix;

/// Coherent state `|alpha0>` of an oscillator at angular frequency `omega`,
/// truncated to the lowest `dim` Fock states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorScenario {
    alpha0: Complex64,
    omega: f64,
    dim: usize,
}

impl OscillatorScenario {
    /// Largest truncation accepted; dense matrices beyond this are impractical.
    pub const MAX_DIM: usize = 4096;

    /// Smallest truncation that keeps the dropped Poisson tail below 1e-10.
    pub fn min_dim(alpha0: Complex64) -> usize {
        let a = alpha0.norm();
        (a * a + 10.0 * a + 20.0).ceil() as usize
    }

    pub fn new(alpha0: Complex64, omega: f64, dim: usize) -> Result<Self> {
        if !(alpha0.re.is_finite() && alpha0.im.is_finite()) {
            return Err(Error::parameter("coherent amplitude must be finite"));
        }
        if !omega.is_finite() {
            return Err(Error::parameter("oscillator frequency must be finite"));
        }
        let need = Self::min_dim(alpha0);
        if dim < need {
            return Err(Error::domain(format!(
                "truncation {dim} too small for |alpha| = {}: need at least {need} levels",
                alpha0.norm()
            )));
        }
        if dim > Self::MAX_DIM {
            return Err(Error::domain(format!(
                "truncation {dim} exceeds the limit of {} levels",
                Self::MAX_DIM
            )));
        }
        Ok(Self { alpha0, omega, dim })
    }

    pub fn with_min_dim(alpha0: Complex64, omega: f64) -> Result<Self> {
        Self::new(alpha0, omega, Self::min_dim(alpha0))
    }

    pub fn alpha0(&self) -> Complex64 {
        self.alpha0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Mean photon number `|alpha0|^2`.
    pub fn mean_photons(&self) -> f64 {
        self.alpha0.norm_sqr()
    }

    /// Untruncated Fock amplitude `e^{-|a|^2/2} a^n / sqrt(n!)`.
    fn amplitude(&self, n: usize) -> Complex64 {
        if self.alpha0.norm() == 0.0 {
            return if n == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        }
        let ln_mod = -0.5 * self.mean_photons() + n as f64 * self.alpha0.norm().ln() - 0.5 * ln_factorial(n as u64);
        Complex64::from_polar(ln_mod.exp(), n as f64 * self.alpha0.arg())
    }

    /// Renormalized truncated coherent state.
    pub fn initial_state(&self) -> Result<DensityMatrix> {
        let psi = CVector::from_fn(self.dim, |n, _| self.amplitude(n));
        DensityMatrix::pure(&psi)
    }

    /// `E_n = hbar omega n`; the zero-point offset does not affect any frequency.
    pub fn hamiltonian(&self, hbar: f64) -> Result<SpectralHamiltonian> {
        let energies: Vec<f64> = (0..self.dim).map(|n| hbar * self.omega * n as f64).collect();
        SpectralHamiltonian::from_eigenvalues(&energies)
    }

    /// Truncated annihilation operator, `a_{n-1, n} = sqrt(n)`.
    pub fn annihilation(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, self.dim, |r, c| {
            if c == r + 1 {
                Complex64::new((c as f64).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

/// `<a(t)> = alpha0 (1 + i omega tau1)^(-t / tau2)`: the amplitude decays at
/// the intrinsic linewidth while the photon number is conserved.
pub fn coherent_amplitude(sc: &OscillatorScenario, params: &DecoherenceParams, t: f64) -> Result<Complex64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    Ok(sc.alpha0 * propagator_factor(sc.omega, params, t))
}

/// Decay exponents of the first coherence after time `t`: ours,
/// `gamma(omega) t`, and the Poisson-kick model with interval `tau2`,
/// `(t / tau2)(1 - cos(omega tau2))`, which vanishes at `omega tau2 = 2 n pi`.
pub fn milburn_frozen_compare(omega: f64, params: &DecoherenceParams, t: f64) -> Result<(f64, f64)> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::domain("comparison needs a finite nonzero frequency"));
    }
    let ours = damping_rate(omega, params) * t;
    let half = (0.5 * omega * params.tau2()).sin();
    let milburn = (t / params.tau2()) * 2.0 * half * half;
    Ok((ours, milburn))
}

/// Fock-basis element `rho_nm(t)` of the averaged coherent state (untruncated
/// Poisson weights). Values below 1e-300 in modulus are returned as zero.
pub fn fock_matrix_decoherence(
    sc: &OscillatorScenario,
    params: &DecoherenceParams,
    t: f64,
    n: usize,
    m: usize,
) -> Result<Complex64> {
    if n >= sc.dim || m >= sc.dim {
        return Err(Error::Index { row: n, col: m, dim: sc.dim });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    let initial = sc.amplitude(n) * sc.amplitude(m).conj();
    if n == m {
        return Ok(initial);
    }
    let w = (n as f64 - m as f64) * sc.omega;
    let gamma = damping_rate(w, params);
    let nu = frequency_shift(w, params);
    let modulus = initial.norm() * (-gamma * t).exp();
    if modulus < 1e-300 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(Complex64::from_polar(modulus, initial.arg() - nu * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::propagate_closed_form;
    use crate::observables::expectation;

    fn params() -> DecoherenceParams {
        DecoherenceParams::new(0.1, 0.1).unwrap()
    }

    #[test]
    fn truncation_guard() {
        let a = Complex64::new(2.0, 0.0);
        assert_eq!(OscillatorScenario::min_dim(a), 44);
        assert!(matches!(OscillatorScenario::new(a, 1.0, 40), Err(Error::Domain(_))));
        let sc = OscillatorScenario::new(a, 1.0, 44).unwrap();
        let rho = sc.initial_state().unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn amplitude_at_zero_time() {
        let sc = OscillatorScenario::with_min_dim(Complex64::new(1.0, 0.5), 2.0).unwrap();
        assert_eq!(coherent_amplitude(&sc, &params(), 0.0).unwrap(), Complex64::new(1.0, 0.5));
    }

    #[test]
    fn amplitude_reference_example() {
        let sc = OscillatorScenario::with_min_dim(Complex64::new(2.0, 0.0), 1.0).unwrap();
        let a = coherent_amplitude(&sc, &params(), 1.0).unwrap();
        assert!((a.norm() - 2.0 * 0.951_465_687_606_748_8).abs() < 1e-12);
        assert!((a.arg() + 0.996_686_524_911_620_4).abs() < 1e-12);
    }

    #[test]
    fn amplitude_matches_matrix_propagation() {
        let sc = OscillatorScenario::with_min_dim(Complex64::new(2.0, 0.0), 1.0).unwrap();
        let spec = sc.hamiltonian(1.0).unwrap();
        let rho = propagate_closed_form(&sc.initial_state().unwrap(), &spec, &params(), 1.0).unwrap();
        let a = sc.annihilation();
        // <a> = Tr(rho a); split into Hermitian parts to use `expectation`
        let x = (&a + a.adjoint()).scale(0.5);
        let p = (&a - a.adjoint()) * Complex64::new(0.0, -0.5);
        let measured = Complex64::new(expectation(&rho, &x).unwrap(), expectation(&rho, &p).unwrap());
        let predicted = coherent_amplitude(&sc, &params(), 1.0).unwrap();
        assert!((measured - predicted).norm() < 1e-8);
    }

    #[test]
    fn amplitude_decays_monotonically() {
        let sc = OscillatorScenario::with_min_dim(Complex64::new(1.5, 0.0), 3.0).unwrap();
        let mut prev = f64::INFINITY;
        let mut t = 0.1;
        for _ in 0..15 {
            let m = coherent_amplitude(&sc, &params(), t).unwrap().norm();
            assert!(m < prev);
            prev = m;
            t *= 2.0;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn milburn_contrast() {
        let p = DecoherenceParams::new(1.0, 1.0).unwrap();
        let (ours, milburn) = milburn_frozen_compare(2.0 * std::f64::consts::PI, &p, 3.0).unwrap();
        assert!(milburn.abs() < 1e-12);
        let expected = (4.0 * std::f64::consts::PI.powi(2)).ln_1p() / 2.0;
        assert!((ours / 3.0 - expected).abs() < 1e-14);
        assert!((ours / 3.0 - 1.850_384_466_706_849).abs() < 1e-12);
        let (o, m) = milburn_frozen_compare(1e-9, &p, 1.0).unwrap();
        assert!(o < 1e-17 && m < 1e-17);
        assert!(milburn_frozen_compare(0.0, &p, 1.0).is_err());
    }

    #[test]
    fn fock_elements() {
        let sc = OscillatorScenario::with_min_dim(Complex64::new(2.0, 0.0), 1.0).unwrap();
        let nbar: f64 = 4.0;
        for n in 0..6usize {
            let v = fock_matrix_decoherence(&sc, &params(), 5.0, n, n).unwrap();
            let poisson = (-nbar).exp() * nbar.powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>();
            assert!((v.re - poisson).abs() < 1e-14 && v.im == 0.0);
        }
        assert!(fock_matrix_decoherence(&sc, &params(), 1.0, 99, 0).is_err());
    }

    #[test]
    fn fock_factor_matches_closed_form() {
        let sc = OscillatorScenario::with_min_dim(Complex64::new(2.0, 0.0), 1.0).unwrap();
        let spec = sc.hamiltonian(1.0).unwrap();
        let rho0 = sc.initial_state().unwrap();
        let rho = propagate_closed_form(&rho0, &spec, &params(), 1.0).unwrap();
        let propagated = rho.get(1, 0) / rho0.get(1, 0);
        let analytic = fock_matrix_decoherence(&sc, &params(), 1.0, 1, 0).unwrap()
            / fock_matrix_decoherence(&sc, &params(), 0.0, 1, 0).unwrap();
        assert!((propagated - analytic).norm() < 1e-12);
    }

    #[test]
    fn fock_coherence_underflows_to_zero() {
        let sc = OscillatorScenario::with_min_dim(Complex64::new(2.0, 0.0), 1.0).unwrap();
        let g10 = damping_rate(1.0, &params());
        let v = fock_matrix_decoherence(&sc, &params(), 1e3 / g10, 1, 0).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }
}
