//! Two-level systems crossing a field region: Larmor precession, Rabi
//! oscillation in a cavity Fock state, and an EPR pair.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{damping_rate, frequency_shift, propagate_closed_form};
use crate::linalg::{CMatrix, CVector};
use crate::observables::expectation;
use crate::params::DecoherenceParams;
use crate::spectral::{diagonalize_hamiltonian, SpectralHamiltonian};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoLevelKind {
    /// Spin precessing at the Larmor frequency `omega0`.
    SpinLarmor { omega0: f64 },
    /// Atom in a cavity holding `n_photons`, Rabi frequency `g sqrt(n + 1)`.
    RabiFock { g: f64, n_photons: u64 },
    /// Singlet pair; particle 1 precesses at `omega0` inside the field.
    EprSinglet { omega0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelScenario {
    kind: TwoLevelKind,
    length: f64,
    velocity: f64,
}

impl TwoLevelScenario {
    pub fn new(kind: TwoLevelKind, length: f64, velocity: f64) -> Result<Self> {
        let freq = match kind {
            TwoLevelKind::SpinLarmor { omega0 } | TwoLevelKind::EprSinglet { omega0 } => omega0,
            TwoLevelKind::RabiFock { g, .. } => {
                if !(g.is_finite() && g > 0.0) {
                    return Err(Error::parameter(format!("coupling g must be positive, got {g}")));
                }
                g
            }
        };
        if !freq.is_finite() {
            return Err(Error::parameter("splitting must be finite"));
        }
        if !(length.is_finite() && length > 0.0 && velocity.is_finite() && velocity > 0.0) {
            return Err(Error::parameter(format!(
                "transit needs positive L and v, got L = {length}, v = {velocity}"
            )));
        }
        Ok(Self { kind, length, velocity })
    }

    pub fn kind(&self) -> TwoLevelKind {
        self.kind
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    /// `L / v`.
    pub fn transit_time(&self) -> f64 {
        self.length / self.velocity
    }

    /// Level splitting as an angular frequency (`omega0`, or `g sqrt(n + 1)`).
    pub fn splitting(&self) -> f64 {
        match self.kind {
            TwoLevelKind::SpinLarmor { omega0 } | TwoLevelKind::EprSinglet { omega0 } => omega0,
            TwoLevelKind::RabiFock { g, n_photons } => g * ((n_photons + 1) as f64).sqrt(),
        }
    }

    /// Hamiltonian and initial state of the scenario.
    ///
    /// Spin: `H = (hbar omega0 / 2) sigma_z`, state `|+x>`. Rabi:
    /// `H = (hbar Omega / 2) sigma_x` in the bare `{|e>, |g>}` basis, state
    /// `|e>`. EPR: `H = (hbar omega0 / 2) sigma_z (x) 1` on
    /// `{|++>, |+->, |-+>, |-->}`, state `(|+-> - |-+>) / sqrt(2)`.
    pub fn system(&self, hbar: f64) -> Result<(SpectralHamiltonian, DensityMatrix)> {
        let half = 0.5 * hbar * self.splitting();
        let c = |re: f64| Complex64::new(re, 0.0);
        match self.kind {
            TwoLevelKind::SpinLarmor { .. } => {
                let spec = SpectralHamiltonian::from_eigenvalues(&[half, -half])?;
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let psi = CVector::from_vec(vec![c(s), c(s)]);
                Ok((spec, DensityMatrix::pure(&psi)?))
            }
            TwoLevelKind::RabiFock { .. } => {
                let h = CMatrix::from_row_slice(2, 2, &[c(0.0), c(half), c(half), c(0.0)]);
                let spec = diagonalize_hamiltonian(&h)?;
                let psi = CVector::from_vec(vec![c(1.0), c(0.0)]);
                Ok((spec, DensityMatrix::pure(&psi)?))
            }
            TwoLevelKind::EprSinglet { .. } => {
                let spec = SpectralHamiltonian::from_eigenvalues(&[half, half, -half, -half])?;
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let psi = CVector::from_vec(vec![c(0.0), c(s), c(-s), c(0.0)]);
                Ok((spec, DensityMatrix::pure(&psi)?))
            }
        }
    }

    /// Index pair of the coherence that carries the interference: `(0, 1)`
    /// for one spin, `(|+->, |-+>) = (1, 2)` for the pair.
    pub fn coherence_element(&self) -> (usize, usize) {
        match self.kind {
            TwoLevelKind::EprSinglet { .. } => (1, 2),
            _ => (0, 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelCoherence {
    pub gamma: f64,
    pub nu: f64,
    /// Surviving fraction `e^{-gamma L / v}` of the coherence after transit.
    pub survival: f64,
}

pub fn two_level_coherence(sc: &TwoLevelScenario, params: &DecoherenceParams) -> TwoLevelCoherence {
    let w = sc.splitting();
    let gamma = damping_rate(w, params);
    TwoLevelCoherence {
        gamma,
        nu: frequency_shift(w, params),
        survival: (-gamma * sc.transit_time()).exp(),
    }
}

fn sigma_z() -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]))
}

/// Population difference `d = P_e - P_g` of the Rabi scenario, from the
/// propagated density matrix.
pub fn rabi_population_difference(sc: &TwoLevelScenario, params: &DecoherenceParams, t: f64) -> Result<f64> {
    if !matches!(sc.kind, TwoLevelKind::RabiFock { .. }) {
        return Err(Error::parameter("population difference needs a rabi-fock scenario"));
    }
    let (spec, rho0) = sc.system(params.hbar())?;
    let rho = propagate_closed_form(&rho0, &spec, params, t)?;
    expectation(&rho, &sigma_z())
}

/// `gamma_n` for each photon number and the least-squares exponent `p` of
/// `gamma_n ~ (n + 1)^p`. The exponent needs at least two distinct `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RabiDamping {
    pub rows: Vec<(u64, f64)>,
    pub exponent: Option<f64>,
}

pub fn rabi_damping_vs_n(g: f64, n_list: &[u64], params: &DecoherenceParams) -> Result<RabiDamping> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::parameter(format!("coupling g must be positive, got {g}")));
    }
    let rows: Vec<(u64, f64)> = n_list
        .iter()
        .map(|&n| (n, damping_rate(g * ((n + 1) as f64).sqrt(), params)))
        .collect();
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(n, gm)| (((n + 1) as f64).ln(), gm.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = if sxx > 0.0 && pts.iter().all(|p| p.1.is_finite()) { Some(sxy / sxx) } else { None };
    Ok(RabiDamping { rows, exponent })
}
