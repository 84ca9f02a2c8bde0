//! Propagators for the gamma-averaged Liouville evolution.
//!
//! In the energy basis every propagator acts elementwise: coherence `(n, m)`
//! is multiplied by a factor depending only on the Bohr frequency `w_nm`.
//! The averaged evolution multiplies it by `(1 + i w tau1)^(-t / tau2)`,
//! which is `exp(-(gamma + i nu) t)` with
//!
//! ```text
//! gamma = ln(1 + w^2 tau1^2) / (2 tau2),    nu = atan(w tau1) / tau2.
//! ```

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, RMatrix, I};
use crate::params::DecoherenceParams;
use crate::quadrature::Tolerance;
use crate::spectral::{bohr_frequencies, frequencies_with_hbar, FrequencyMatrix, SpectralHamiltonian};
use crate::state::{Basis, DensityMatrix};
use crate::superop::{self, Superoperator};
use crate::waiting_time::{GammaLaw, DEFAULT_TAIL};

/// Decay rate of a coherence oscillating at `omega`.
pub fn damping_rate(omega: f64, params: &DecoherenceParams) -> f64 {
    let x = omega * params.tau1();
    0.5 * (x * x).ln_1p() / params.tau2()
}

/// Renormalized oscillation frequency of a coherence at `omega`.
pub fn frequency_shift(omega: f64, params: &DecoherenceParams) -> f64 {
    (omega * params.tau1()).atan() / params.tau2()
}

/// `(1 + i omega tau1)^(-t / tau2)` on the principal branch.
pub fn propagator_factor(omega: f64, params: &DecoherenceParams, t: f64) -> Complex64 {
    if omega == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let gamma = damping_rate(omega, params);
    let nu = frequency_shift(omega, params);
    Complex64::new(-gamma * t, -nu * t).exp()
}

/// Elementwise propagation factors at a fixed time, with the rates behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorFactor {
    pub factors: CMatrix,
    pub gamma: RMatrix,
    pub nu: RMatrix,
}

impl PropagatorFactor {
    pub fn new(freqs: &FrequencyMatrix, params: &DecoherenceParams, t: f64) -> Self {
        let n = freqs.dim();
        let gamma = RMatrix::from_fn(n, n, |r, c| damping_rate(freqs.get(r, c), params));
        let nu = RMatrix::from_fn(n, n, |r, c| frequency_shift(freqs.get(r, c), params));
        let factors = CMatrix::from_fn(n, n, |r, c| propagator_factor(freqs.get(r, c), params, t));
        Self { factors, gamma, nu }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("time must be finite and nonnegative, got {t}")));
    }
    Ok(())
}

fn scale_elements<F: Fn(usize, usize) -> Complex64>(m: &CMatrix, factor: F) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)] * factor(r, c))
}

/// Averaged state at time `t`: each energy-basis coherence times its
/// propagation factor. Populations are untouched and `t = 0` is the identity.
pub fn propagate_closed_form(
    rho0: &DensityMatrix,
    spec: &SpectralHamiltonian,
    params: &DecoherenceParams,
    t: f64,
) -> Result<DensityMatrix> {
    check_time(t)?;
    let energy = rho0.in_energy_basis(spec)?;
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let freqs = bohr_frequencies(spec, params);
    let out = scale_elements(energy.entries(), |r, c| {
        if r == c {
            Complex64::new(1.0, 0.0)
        } else {
            propagator_factor(freqs.get(r, c), params, t)
        }
    });
    Ok(rho0.like(out, spec))
}

/// Plain unitary evolution `exp(-iHt) rho exp(iHt)`, the limit of vanishing
/// event width and cronon.
pub fn propagate_unitary(rho0: &DensityMatrix, spec: &SpectralHamiltonian, hbar: f64, t: f64) -> Result<DensityMatrix> {
    let energy = rho0.in_energy_basis(spec)?;
    let e = spec.eigenvalues();
    let out = scale_elements(energy.entries(), |r, c| {
        if r == c {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, -(e[r] - e[c]) * t / hbar).exp()
        }
    });
    Ok(rho0.like(out, spec))
}

/// Averaged state from the defining integral over effective time,
/// `rho_nm(t) = int P(t, t') exp(-i w_nm t') dt' rho_nm(0)`, evaluated by
/// adaptive quadrature to absolute tolerance `tol` per factor.
///
/// Restricted to `t >= tau2`, where the gamma density is bounded.
pub fn propagate_quadrature(
    rho0: &DensityMatrix,
    spec: &SpectralHamiltonian,
    params: &DecoherenceParams,
    t: f64,
    tol: f64,
) -> Result<DensityMatrix> {
    check_time(t)?;
    if params.shape(t) < 1.0 {
        return Err(Error::domain(format!(
            "quadrature propagation needs t >= tau2 (t = {t}, tau2 = {})",
            params.tau2()
        )));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::parameter(format!("tolerance must be positive, got {tol}")));
    }
    let energy = rho0.in_energy_basis(spec)?;
    let freqs = bohr_frequencies(spec, params);
    let law = GammaLaw::at_time(t, params)?;
    let mut cache: HashMap<u64, Complex64> = HashMap::new();
    let mut out = energy.entries().clone();
    for (r, c, omega) in freqs.pairs() {
        if omega == 0.0 || energy.get(r, c) == Complex64::new(0.0, 0.0) {
            continue;
        }
        let factor = match cache.get(&omega.to_bits()) {
            Some(&f) => f,
            None => {
                let est = law.expect(
                    |x| Complex64::new(0.0, -omega * x).exp(),
                    Tolerance::absolute(0.5 * tol),
                    DEFAULT_TAIL,
                )?;
                cache.insert(omega.to_bits(), est.value);
                est.value
            }
        };
        out[(r, c)] *= factor;
        out[(c, r)] = out[(r, c)].conj();
    }
    Ok(rho0.like(out, spec))
}

/// One cronon of the finite-difference evolution:
/// `rho(t) = (1 + i tau1 L)^-1 rho(t - tau2)`.
pub fn finite_difference_step(
    rho_bar: &DensityMatrix,
    spec: &SpectralHamiltonian,
    params: &DecoherenceParams,
) -> Result<DensityMatrix> {
    let energy = rho_bar.in_energy_basis(spec)?;
    let freqs = bohr_frequencies(spec, params);
    let out = scale_elements(energy.entries(), |r, c| {
        let w = freqs.get(r, c);
        if w == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(1.0, w * params.tau1()).inv()
        }
    });
    Ok(rho_bar.like(out, spec))
}

fn elementwise_rhs<F>(
    entries: &CMatrix,
    basis: Basis,
    spec: &SpectralHamiltonian,
    params: &DecoherenceParams,
    coeff: F,
) -> Result<CMatrix>
where
    F: Fn(f64) -> Complex64,
{
    spec.check_dim(entries)?;
    let freqs = bohr_frequencies(spec, params);
    let energy = match basis {
        Basis::Energy => entries.clone(),
        Basis::Input => spec.to_energy_basis(entries),
    };
    let out = scale_elements(&energy, |r, c| {
        let w = freqs.get(r, c);
        if w == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            coeff(w)
        }
    });
    Ok(match basis {
        Basis::Energy => out,
        Basis::Input => spec.from_energy_basis(&out),
    })
}

/// Time derivative of the averaged state under the logarithmic generator,
/// `-(gamma_nm + i nu_nm) rho_nm`, in the basis of `rho`.
pub fn generator_apply(rho: &DensityMatrix, spec: &SpectralHamiltonian, params: &DecoherenceParams) -> Result<CMatrix> {
    generator_apply_entries(rho.entries(), rho.basis(), spec, params)
}

/// [`generator_apply`] on a bare matrix, for integrators whose intermediate
/// stages are not density matrices.
pub fn generator_apply_entries(
    entries: &CMatrix,
    basis: Basis,
    spec: &SpectralHamiltonian,
    params: &DecoherenceParams,
) -> Result<CMatrix> {
    elementwise_rhs(entries, basis, spec, params, |w| {
        -Complex64::new(damping_rate(w, params), frequency_shift(w, params))
    })
}

/// Right-hand side of the second-order phase-destroying master equation,
/// `-i (tau1 / tau2) L rho - (tau1^2 / 2 tau2) L^2 rho`. Only meaningful while
/// `|w tau1| << 1` for every Bohr frequency.
pub fn phase_destroying_rhs(rho: &DensityMatrix, spec: &SpectralHamiltonian, params: &DecoherenceParams) -> Result<CMatrix> {
    phase_destroying_rhs_entries(rho.entries(), rho.basis(), spec, params)
}

pub fn phase_destroying_rhs_entries(
    entries: &CMatrix,
    basis: Basis,
    spec: &SpectralHamiltonian,
    params: &DecoherenceParams,
) -> Result<CMatrix> {
    let r = params.tau1() / params.tau2();
    let a = params.tau1() * params.tau1() / (2.0 * params.tau2());
    elementwise_rhs(entries, basis, spec, params, |w| -(I * (w * r) + a * w * w))
}

/// Elementwise factor `exp[(t / tau)(exp(-i w tau) - 1)]` of Poisson-distributed
/// unitary kicks. Frequencies with `w tau = 2 n pi` are left untouched.
pub fn milburn_factor(omega: f64, tau: f64, t: f64) -> Complex64 {
    let phase = omega * tau;
    let half = (0.5 * phase).sin();
    let re = -2.0 * half * half;
    let im = -phase.sin();
    (Complex64::new(re, im) * (t / tau)).exp()
}

pub fn milburn_propagate(
    rho0: &DensityMatrix,
    spec: &SpectralHamiltonian,
    hbar: f64,
    tau: f64,
    t: f64,
) -> Result<DensityMatrix> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::domain(format!("Milburn interval must be positive, got {tau}")));
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::parameter(format!("hbar must be positive, got {hbar}")));
    }
    check_time(t)?;
    let energy = rho0.in_energy_basis(spec)?;
    let freqs = frequencies_with_hbar(spec, hbar);
    let out = scale_elements(energy.entries(), |r, c| {
        let w = freqs.get(r, c);
        if w == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            milburn_factor(w, tau, t)
        }
    });
    Ok(rho0.like(out, spec))
}

/// How a single-event map `M` is turned into a continuous-time semigroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapMode {
    /// `(I - ln M)^(-t / tau2)`: events at gamma-distributed effective times.
    Gamma,
    /// `exp[(t / tau2) ln M]`: one application of `M` per cronon.
    Regular,
}

const MAX_EIGENVECTOR_CONDITION: f64 = 1e8;

fn on_negative_axis(z: Complex64) -> bool {
    let tol = 1e-12 * z.norm().max(1.0);
    z.im.abs() <= tol && z.re <= tol
}

/// Propagate `rho0` with a semigroup built from the map `M` through its
/// principal logarithm.
pub fn map_semigroup_propagate(
    map: &Superoperator,
    rho0: &DensityMatrix,
    params: &DecoherenceParams,
    t: f64,
    mode: MapMode,
) -> Result<DensityMatrix> {
    check_time(t)?;
    if map.dim() != rho0.dim() {
        return Err(Error::Dimension { expected: rho0.dim(), found: map.dim() });
    }
    let eig = crate::linalg::eigen_decompose(map.matrix(), MAX_EIGENVECTOR_CONDITION)?;
    for &lambda in eig.values.iter() {
        if on_negative_axis(lambda) {
            return Err(Error::domain(format!(
                "map eigenvalue {lambda} lies on the branch cut of the principal logarithm"
            )));
        }
        if mode == MapMode::Gamma {
            let base = Complex64::new(1.0, 0.0) - lambda.ln();
            if on_negative_axis(base) {
                return Err(Error::domain(format!(
                    "map eigenvalue {lambda} puts 1 - ln(lambda) = {base} on the branch cut"
                )));
            }
        }
    }
    let s = params.shape(t);
    let propagator = match mode {
        MapMode::Regular => eig.map(|lambda| (lambda.ln() * s).exp()),
        MapMode::Gamma => eig.map(|lambda| ((Complex64::new(1.0, 0.0) - lambda.ln()).ln() * -s).exp()),
    };
    let out = superop::unvec(&(propagator * superop::vec(rho0.entries())), rho0.dim());
    DensityMatrix::with_basis(crate::linalg::hermitize(&out), rho0.basis())
}
