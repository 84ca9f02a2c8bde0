#![allow(dead_code)]

use decohere_core::{diagonalize_hamiltonian, CMatrix, Complex64, DecoherenceParams, DensityMatrix, SpectralHamiltonian};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| Complex64::new(normal(rng), normal(rng)))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMatrix {
    let g = random_complex(rng, n);
    (&g + g.adjoint()).scale(0.5 * scale)
}

/// Random full-rank state `G G^dagger / Tr`.
pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let g = random_complex(rng, n);
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new(m / tr).expect("random state")
}

/// Hamiltonian whose largest Bohr frequency is `max_omega`.
pub fn random_spectrum(rng: &mut ChaCha8Rng, n: usize, max_omega: f64) -> SpectralHamiltonian {
    let h = random_hermitian(rng, n, 1.0);
    let spec = diagonalize_hamiltonian(&h).expect("hermitian");
    let e = spec.eigenvalues();
    let width = e[e.len() - 1] - e[0];
    diagonalize_hamiltonian(&h.scale(max_omega / width)).expect("hermitian")
}

/// `tau1 <= tau2`, both log-uniform in `[1e-3, 1]`.
pub fn random_params(rng: &mut ChaCha8Rng) -> DecoherenceParams {
    let a = 10f64.powf(rng.random_range(-3.0..0.0));
    let b = 10f64.powf(rng.random_range(-3.0..0.0));
    DecoherenceParams::new(a.min(b), a.max(b)).expect("ordered")
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
