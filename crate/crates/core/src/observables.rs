//! Averaged expectation values and the cronon-scale time-energy inequality.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{propagate_closed_form, propagator_factor};
use crate::linalg::{self, CMatrix};
use crate::params::DecoherenceParams;
use crate::quadrature::Tolerance;
use crate::spectral::SpectralHamiltonian;
use crate::state::DensityMatrix;
use crate::waiting_time::GammaLaw;

const IMAG_RESIDUAL_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-10;
const TM_TOL: f64 = 1e-10;

pub(crate) fn check_observable(a: &CMatrix, dim: usize) -> Result<()> {
    if a.nrows() != dim || a.ncols() != dim {
        return Err(Error::Dimension { expected: dim, found: a.nrows() });
    }
    let residual = linalg::hermitian_residual(a);
    if residual > HERMITIAN_TOL * linalg::max_abs(a).max(1.0) {
        return Err(Error::Invariant { invariant: "Hermiticity of the observable", residual });
    }
    Ok(())
}

fn real_part(z: Complex64, scale: f64) -> Result<f64> {
    if z.im.abs() > IMAG_RESIDUAL_TOL * scale.max(1.0) {
        return Err(Error::numeric(format!(
            "trace expected to be real, imaginary residual {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

fn trace_product(rho: &CMatrix, a: &CMatrix) -> Complex64 {
    let n = rho.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            acc += rho[(r, c)] * a[(c, r)];
        }
    }
    acc
}

/// `Tr(rho A)`; `A` must be in the same basis as `rho`.
pub fn expectation(rho: &DensityMatrix, a: &CMatrix) -> Result<f64> {
    check_observable(a, rho.dim())?;
    real_part(trace_product(rho.entries(), a), linalg::max_abs(a))
}

/// `Tr(rho (A - <A>)^2)`.
pub fn variance(rho: &DensityMatrix, a: &CMatrix) -> Result<f64> {
    let mean = expectation(rho, a)?;
    let n = rho.dim();
    let shifted = a - CMatrix::identity(n, n) * Complex64::new(mean, 0.0);
    let sq = &shifted * &shifted;
    Ok(real_part(trace_product(rho.entries(), &sq), linalg::max_abs(&sq))?.max(0.0))
}

pub fn std_dev(rho: &DensityMatrix, a: &CMatrix) -> Result<f64> {
    Ok(variance(rho, a)?.sqrt())
}

/// Energy spread `sigma(H)` of `rho`, from the populations in the energy basis.
pub fn energy_spread(rho: &DensityMatrix, spec: &SpectralHamiltonian) -> Result<f64> {
    let energy = rho.in_energy_basis(spec)?;
    let e = spec.eigenvalues();
    let p: Vec<f64> = (0..e.len()).map(|k| energy.get(k, k).re).collect();
    let mean: f64 = p.iter().zip(e).map(|(p, e)| p * e).sum();
    let var: f64 = p.iter().zip(e).map(|(p, e)| p * (e - mean) * (e - mean)).sum();
    Ok(var.max(0.0).sqrt())
}

fn spread_is_zero(sigma: f64, spec: &SpectralHamiltonian) -> bool {
    let scale = spec.eigenvalues().iter().fold(1.0_f64, |acc, e| acc.max(e.abs()));
    sigma <= 1e-12 * scale
}

/// `Tr(rho(t) A)` for the averaged state at time `t`.
pub fn averaged_expectation(
    rho0: &DensityMatrix,
    spec: &SpectralHamiltonian,
    params: &DecoherenceParams,
    a: &CMatrix,
    t: f64,
) -> Result<f64> {
    expectation(&propagate_closed_form(rho0, spec, params, t)?, a)
}

/// Average of `exp(i omega t')` over the effective time: `(1 - i omega tau1)^(-t / tau2)`.
pub fn averaged_phase_factor(omega: f64, params: &DecoherenceParams, t: f64) -> Result<Complex64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    Ok(propagator_factor(-omega, params, t))
}

/// `int P(t, t') f(t') dt'` for a signal bounded by `bound` in magnitude on
/// the bulk of the law; `t >= tau2`.
pub fn averaged_signal<F>(f: F, bound: f64, t: f64, params: &DecoherenceParams, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let law = quadrature_law(t, params)?;
    let tail = (tol / (10.0 * bound.abs().max(1.0))).min(crate::waiting_time::DEFAULT_TAIL);
    Ok(law.expect(f, Tolerance::absolute(tol), tail)?.value)
}

fn quadrature_law(t: f64, params: &DecoherenceParams) -> Result<GammaLaw> {
    if !(t.is_finite() && params.shape(t) >= 1.0) {
        return Err(Error::domain(format!(
            "averaging by quadrature needs t >= tau2 (t = {t}, tau2 = {})",
            params.tau2()
        )));
    }
    GammaLaw::at_time(t, params)
}

/// A source of position probability densities `|psi(x, t')|^2`.
pub trait WavefunctionModel {
    fn density(&self, x: f64, t_prime: f64) -> f64;
}

impl<F: Fn(f64, f64) -> f64> WavefunctionModel for F {
    fn density(&self, x: f64, t_prime: f64) -> f64 {
        self(x, t_prime)
    }
}

/// Free minimum-uncertainty packet: Gaussian centred on `x0 + v t'` with
/// variance `sigma_x^2 + sigma_v^2 t'^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub x0: f64,
    pub velocity: f64,
    pub sigma_x: f64,
    pub sigma_v: f64,
}

impl WavefunctionModel for GaussianPacket {
    fn density(&self, x: f64, t_prime: f64) -> f64 {
        let var = self.sigma_x * self.sigma_x + self.sigma_v * self.sigma_v * t_prime * t_prime;
        let d = x - self.x0 - self.velocity * t_prime;
        (-0.5 * d * d / var).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
    }
}

/// Averaged position density `int P(t, t') |psi(x, t')|^2 dt'`.
pub fn averaged_position_density<M: WavefunctionModel + ?Sized>(
    model: &M,
    x: f64,
    t: f64,
    params: &DecoherenceParams,
    tol: f64,
) -> Result<f64> {
    let law = quadrature_law(t, params)?;
    let value = law
        .expect(|tp| model.density(x, tp), Tolerance::new(tol, tol), crate::waiting_time::DEFAULT_TAIL)?
        .value;
    Ok(value.max(0.0))
}

/// Both sides of the cronon-scale drift identity
/// `(A(t) - A(t - tau2)) / tau1 = -(i / hbar) Tr(rho(t) [A, H])`.
pub fn finite_difference_drift(
    rho0: &DensityMatrix,
    spec: &SpectralHamiltonian,
    params: &DecoherenceParams,
    a: &CMatrix,
    t: f64,
) -> Result<(f64, f64)> {
    check_observable(a, rho0.dim())?;
    if !(params.shape(t) >= 1.0) {
        return Err(Error::domain(format!("drift needs t >= tau2, got t = {t}")));
    }
    let now = propagate_closed_form(rho0, spec, params, t)?;
    let before = propagate_closed_form(rho0, spec, params, t - params.tau2())?;
    let lhs = (expectation(&now, a)? - expectation(&before, a)?) / params.tau1();
    Ok((lhs, commutator_drift(&now, spec, params, a)?))
}

/// `-(i / hbar) Tr(rho [A, H])`, evaluated in the energy basis.
fn commutator_drift(
    rho: &DensityMatrix,
    spec: &SpectralHamiltonian,
    params: &DecoherenceParams,
    a: &CMatrix,
) -> Result<f64> {
    let energy = rho.in_energy_basis(spec)?;
    let a_energy = match rho.basis() {
        crate::state::Basis::Input => spec.to_energy_basis(a),
        crate::state::Basis::Energy => a.clone(),
    };
    let e = spec.eigenvalues();
    let n = e.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        for l in 0..n {
            // [A, H]_kl = A_kl (E_l - E_k)
            acc += energy.get(l, k) * a_energy[(k, l)] * (e[l] - e[k]);
        }
    }
    let value = acc * Complex64::new(0.0, -1.0 / params.hbar());
    let scale = linalg::max_abs(a) * e.iter().fold(1.0_f64, |m, x| m.max(x.abs())) / params.hbar();
    real_part(value, scale)
}

/// Outcome of the time-energy inequality `|dA| / sigma(A) <= tau1 / tau_E`
/// over one cronon, with `tau_E = hbar / (2 sigma(H))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TmReport {
    pub delta_a_bar: f64,
    pub sigma_a: f64,
    pub sigma_h: f64,
    /// Infinite when `sigma_h` vanishes.
    pub tau_e: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub slack: f64,
    pub tau_e_infinite: bool,
    /// `sigma(A) = 0`: then `dA` itself must vanish and `lhs` is set to 0.
    pub sigma_a_degenerate: bool,
}

impl TmReport {
    /// Turn a violation into an error; violations indicate a numerical bug.
    pub fn into_result(self) -> Result<Self> {
        if self.satisfied {
            Ok(self)
        } else {
            Err(Error::numeric(format!(
                "time-energy inequality violated: lhs {} > rhs {}",
                self.lhs, self.rhs
            )))
        }
    }
}

/// Evaluate the inequality at time `t >= tau2`; all moments are taken on the
/// averaged state at `t`.
pub fn tm_check(
    rho0: &DensityMatrix,
    spec: &SpectralHamiltonian,
    params: &DecoherenceParams,
    a: &CMatrix,
    t: f64,
) -> Result<TmReport> {
    check_observable(a, rho0.dim())?;
    if !(params.shape(t) >= 1.0) {
        return Err(Error::domain(format!("inequality check needs t >= tau2, got t = {t}")));
    }
    let now = propagate_closed_form(rho0, spec, params, t)?;
    let before = propagate_closed_form(rho0, spec, params, t - params.tau2())?;
    let delta_a_bar = expectation(&now, a)? - expectation(&before, a)?;
    let sigma_a = std_dev(&now, a)?;
    let sigma_h = energy_spread(&now, spec)?;
    let tau_e_infinite = spread_is_zero(sigma_h, spec);
    let (tau_e, rhs) = if tau_e_infinite {
        (f64::INFINITY, 0.0)
    } else {
        (params.hbar() / (2.0 * sigma_h), 2.0 * params.tau1() * sigma_h / params.hbar())
    };
    let a_scale = linalg::max_abs(a).max(1.0);
    let sigma_a_degenerate = sigma_a <= 1e-12 * a_scale;
    let lhs = if sigma_a_degenerate {
        if delta_a_bar.abs() <= TM_TOL * a_scale {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        delta_a_bar.abs() / sigma_a
    };
    Ok(TmReport {
        delta_a_bar,
        sigma_a,
        sigma_h,
        tau_e,
        lhs,
        rhs,
        satisfied: lhs <= rhs + TM_TOL,
        slack: rhs - lhs,
        tau_e_infinite,
        sigma_a_degenerate,
    })
}

/// Largest event width for which no observable changes appreciably within a
/// cronon: `hbar / (2 sigma(H))`.
pub fn max_quasi_continuous_tau1(
    rho: &DensityMatrix,
    spec: &SpectralHamiltonian,
    params: &DecoherenceParams,
) -> Result<f64> {
    let sigma_h = energy_spread(rho, spec)?;
    if spread_is_zero(sigma_h, spec) {
        return Err(Error::domain("state has no energy spread, so tau1 is unbounded"));
    }
    Ok(params.hbar() / (2.0 * sigma_h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CVector;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    fn plus_state() -> DensityMatrix {
        DensityMatrix::new(CMatrix::from_element(2, 2, c(0.5, 0.0))).unwrap()
    }

    fn two_level() -> SpectralHamiltonian {
        SpectralHamiltonian::from_eigenvalues(&[0.0, 1.0]).unwrap()
    }

    #[test]
    fn expectation_basics() {
        let rho = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let a = CMatrix::from_row_slice(2, 2, &[c(2.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(expectation(&rho, &a).unwrap(), 2.5);
        assert_eq!(expectation(&plus_state(), &CMatrix::identity(2, 2)).unwrap(), 1.0);
        assert_eq!(expectation(&plus_state(), &sigma_x()).unwrap(), 1.0);
    }

    #[test]
    fn non_hermitian_observable_rejected() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(expectation(&plus_state(), &a), Err(Error::Invariant { .. })));
    }

    #[test]
    fn phase_factor_example() {
        let p = DecoherenceParams::new(0.1, 0.1).unwrap();
        let z = averaged_phase_factor(1.0, &p, 1.0).unwrap();
        assert!((z.norm() - 0.951_465_687_606_748_8).abs() < 1e-13);
        assert!((z.arg() - 0.996_686_524_911_620_4).abs() < 1e-13);
        assert_eq!(averaged_phase_factor(-1.0, &p, 1.0).unwrap(), z.conj());
        assert_eq!(averaged_phase_factor(0.0, &p, 3.0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn signal_constant_and_moment() {
        let p = DecoherenceParams::new(0.1, 0.5).unwrap();
        assert!((averaged_signal(|_| 3.0, 3.0, 5.0, &p, 1e-12).unwrap() - 3.0).abs() < 1e-10);
        assert!((averaged_signal(|x| x, 10.0, 5.0, &p, 1e-12).unwrap() - 1.0).abs() < 1e-10);
        assert!(averaged_signal(|x| x, 10.0, 0.2, &p, 1e-12).is_err());
    }

    #[test]
    fn static_density_passes_through() {
        let p = DecoherenceParams::new(0.1, 0.1).unwrap();
        let model = |x: f64, _t: f64| (-x * x).exp();
        let v = averaged_position_density(&model, 0.7, 2.0, &p, 1e-12).unwrap();
        assert!((v - (-0.49_f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn drift_identity_two_level() {
        let p = DecoherenceParams::new(0.1, 0.1).unwrap();
        let (lhs, rhs) = finite_difference_drift(&plus_state(), &two_level(), &p, &sigma_x(), 1.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
        let (l3, r3) = finite_difference_drift(&plus_state(), &two_level(), &p, &(sigma_x() * c(3.0, 0.0)), 1.0).unwrap();
        assert!((l3 - 3.0 * lhs).abs() < 1e-12 && (r3 - 3.0 * rhs).abs() < 1e-12);
        let h = two_level().matrix();
        let (lh, rh) = finite_difference_drift(&plus_state(), &two_level(), &p, &h, 1.0).unwrap();
        assert_eq!((lh, rh), (0.0, 0.0));
    }

    #[test]
    fn tm_with_hamiltonian_as_observable() {
        let p = DecoherenceParams::new(0.1, 0.2).unwrap();
        let spec = two_level();
        let r = tm_check(&plus_state(), &spec, &p, &spec.matrix(), 1.0).unwrap();
        assert_eq!(r.delta_a_bar, 0.0);
        assert!(r.satisfied);
        assert!((r.slack - p.tau1() / r.tau_e).abs() < 1e-15);
    }

    #[test]
    fn tm_eigenstate_flags_infinite_inner_time() {
        let p = DecoherenceParams::new(0.1, 0.2).unwrap();
        let rho = DensityMatrix::pure(&CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])).unwrap();
        let r = tm_check(&rho, &two_level(), &p, &sigma_x(), 1.0).unwrap();
        assert!(r.tau_e_infinite);
        assert_eq!(r.tau_e, f64::INFINITY);
        assert_eq!(r.delta_a_bar, 0.0);
        assert!(r.satisfied);
    }

    #[test]
    fn quasi_continuous_bound() {
        let p = DecoherenceParams::new(0.1, 0.2).unwrap();
        assert!((max_quasi_continuous_tau1(&plus_state(), &two_level(), &p).unwrap() - 1.0).abs() < 1e-15);
        let scaled = SpectralHamiltonian::from_eigenvalues(&[0.0, 4.0]).unwrap();
        assert!((max_quasi_continuous_tau1(&plus_state(), &scaled, &p).unwrap() - 0.25).abs() < 1e-15);
        let stationary = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        assert!(matches!(max_quasi_continuous_tau1(&stationary, &two_level(), &p), Err(Error::Domain(_))));
    }
}
