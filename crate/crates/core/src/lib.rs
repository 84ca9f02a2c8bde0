//! Intrinsic decoherence of finite-dimensional quantum systems.
//!
//! A density matrix evolves unitarily, but for a random effective time: after
//! an elapsed time `t` the system has undergone about `t / tau2` evolution
//! events of width `tau1`, and the effective time is gamma distributed. The
//! averaged state keeps all populations in the energy basis and damps each
//! coherence `(n, m)` at a rate fixed by its Bohr frequency.
//!
//! The crate provides the closed-form propagator together with two
//! independent oracles (quadrature of the defining integral and Monte-Carlo
//! sampling of the effective time), the finite-difference and master-equation
//! forms, the time-energy inequality machinery, and a set of physical
//! scenarios.
//!
//! ```
//! use decohere_core::evolution::propagate_closed_form;
//! use decohere_core::{CVector, Complex64, DecoherenceParams, DensityMatrix, SpectralHamiltonian};
//!
//! let p = DecoherenceParams::new(0.1, 0.1)?;
//! let spec = SpectralHamiltonian::from_eigenvalues(&[0.0, 1.0])?;
//! let psi = CVector::from_element(2, Complex64::new(0.5f64.sqrt(), 0.0));
//! let rho = propagate_closed_form(&DensityMatrix::pure(&psi)?, &spec, &p, 2.0)?;
//! // |rho_01| = 0.5 exp(-gamma t)
//! let gamma = 1.01f64.ln() / 0.2;
//! assert!((rho.get(0, 1).norm() - 0.5 * (-gamma * 2.0).exp()).abs() < 1e-12);
//! # Ok::<(), decohere_core::Error>(())
//! ```

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Tabulated constants keep their published digits.
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod evolution;
pub mod linalg;
pub mod models;
pub mod observables;
pub mod params;
pub mod quadrature;
pub mod series;
pub mod special;
pub mod spectral;
pub mod state;
pub mod superop;
pub mod trajectories;
pub mod waiting_time;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use evolution::{
    damping_rate, finite_difference_step, frequency_shift, generator_apply, map_semigroup_propagate,
    milburn_propagate, phase_destroying_rhs, propagate_closed_form, propagate_quadrature, propagate_unitary,
    MapMode, PropagatorFactor,
};
pub use linalg::{CMatrix, CVector, RMatrix};
pub use observables::{expectation, tm_check, TmReport};
pub use params::DecoherenceParams;
pub use series::TimeSeries;
pub use spectral::{bohr_frequencies, diagonalize_hamiltonian, FrequencyMatrix, SpectralHamiltonian};
pub use state::{validate_density_matrix, Basis, DensityMatrix};
pub use superop::Superoperator;
pub use trajectories::{McConfig, McEstimate};
pub use waiting_time::{gamma_moments, gamma_pdf, GammaLaw};

/// Library version written into output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
