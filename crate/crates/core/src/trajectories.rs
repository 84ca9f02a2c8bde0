//! Monte-Carlo realization of the averaged evolution: draw an effective
//! evolution time from the gamma law, evolve unitarily for that long, and
//! average over draws.
//!
//! Sample `i` under seed `s` always uses the ChaCha8 stream `i` of the key
//! derived from `s`, and partial statistics are merged in sample order, so
//! results are bit-identical for any number of worker threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::params::DecoherenceParams;
use crate::spectral::{bohr_frequencies, SpectralHamiltonian};
use crate::state::{Basis, DensityMatrix};
use crate::waiting_time::GammaLaw;

/// Generator description written into output metadata.
pub const RNG_DESCRIPTION: &str = "ChaCha8Rng (rand_chacha 0.9), key = seed_from_u64(seed), stream = sample index";

const BLOCK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the global rayon pool.
    pub worker_hint: usize,
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed, worker_hint: 0 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.worker_hint = workers;
        self
    }
}

/// Independent generator for sample `index`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Unit-scale gamma variate: Marsaglia-Tsang for `shape >= 1`, boosted by
/// `U^(1/shape)` below that. Shape 0 is the point mass at 0.
pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    match Gamma::new(shape, 1.0) {
        Ok(g) => g.sample(rng),
        Err(_) => 0.0,
    }
}

/// Draw an effective evolution time for elapsed time `t > 0`.
pub fn sample_effective_time<R: Rng + ?Sized>(rng: &mut R, t: f64, params: &DecoherenceParams) -> Result<f64> {
    let law = GammaLaw::at_time(t, params)?;
    Ok(law.scale() * sample_gamma(rng, law.shape()))
}

/// Running mean and summed squared deviation of complex samples.
#[derive(Debug, Clone)]
struct Moments {
    count: usize,
    mean: Vec<Complex64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(width: usize) -> Self {
        Self { count: 0, mean: vec![Complex64::new(0.0, 0.0); width], m2: vec![0.0; width] }
    }

    fn push(&mut self, values: &[Complex64]) {
        self.count += 1;
        let n = self.count as f64;
        for ((mean, m2), &x) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(values) {
            let delta = x - *mean;
            *mean += delta / n;
            *m2 += (delta.conj() * (x - *mean)).re;
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        for k in 0..self.mean.len() {
            let delta = other.mean[k] - self.mean[k];
            self.mean[k] += delta * (nb / n);
            self.m2[k] += other.m2[k] + delta.norm_sqr() * na * nb / n;
        }
        self.count += other.count;
    }

    fn standard_error(&self, k: usize) -> f64 {
        let n = self.count as f64;
        (self.m2[k] / (n - 1.0) / n).max(0.0).sqrt()
    }
}

fn run<F>(cfg: &McConfig, width: usize, per_sample: F) -> Result<Moments>
where
    F: Fn(&mut ChaCha8Rng, &mut [Complex64]) + Sync,
{
    if cfg.samples < 2 {
        return Err(Error::domain(format!("at least 2 samples are required, got {}", cfg.samples)));
    }
    let blocks = cfg.samples.div_ceil(BLOCK);
    let work = || {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut acc = Moments::new(width);
                let mut buf = vec![Complex64::new(0.0, 0.0); width];
                for i in (b * BLOCK)..((b + 1) * BLOCK).min(cfg.samples) {
                    let mut rng = sample_rng(cfg.seed, i as u64);
                    per_sample(&mut rng, &mut buf);
                    acc.push(&buf);
                }
                acc
            })
            .collect::<Vec<_>>()
    };
    let partials = if cfg.worker_hint > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.worker_hint)
            .build()
            .map_err(|e| Error::numeric(format!("could not start worker pool: {e}")))?
            .install(work)
    } else {
        work()
    };
    let mut total = Moments::new(width);
    for p in &partials {
        total.merge(p);
    }
    Ok(total)
}

/// Sample mean of the evolved density matrix with per-element standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub estimate: CMatrix,
    pub stderr: RMatrix,
    pub samples: usize,
}

/// Monte-Carlo estimate of the averaged state, in the basis of `rho0`.
pub fn mc_estimate_density(
    rho0: &DensityMatrix,
    spec: &SpectralHamiltonian,
    params: &DecoherenceParams,
    t: f64,
    cfg: &McConfig,
) -> Result<McEstimate> {
    let law = GammaLaw::at_time(t, params)?;
    let energy = rho0.in_energy_basis(spec)?;
    let freqs = bohr_frequencies(spec, params);
    let n = rho0.dim();
    let to_input = rho0.basis() == Basis::Input;
    let moments = run(cfg, n * n, |rng, out| {
        let t_prime = law.scale() * sample_gamma(rng, law.shape());
        let evolved = CMatrix::from_fn(n, n, |r, c| {
            let w = freqs.get(r, c);
            if w == 0.0 {
                energy.get(r, c)
            } else {
                energy.get(r, c) * Complex64::new(0.0, -w * t_prime).exp()
            }
        });
        let evolved = if to_input { spec.from_energy_basis(&evolved) } else { evolved };
        out.copy_from_slice(evolved.as_slice());
    })?;
    let raw = CMatrix::from_column_slice(n, n, &moments.mean);
    let stderr = RMatrix::from_fn(n, n, |r, c| moments.standard_error(r + n * c));
    Ok(McEstimate { estimate: linalg::hermitize(&raw), stderr, samples: cfg.samples })
}

/// Monte-Carlo estimate of a scalar with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McScalar {
    pub value: f64,
    pub stderr: f64,
}

/// Monte-Carlo estimate of `Tr(rho(t) A)` for Hermitian `A` given in the
/// basis of `rho0`.
pub fn mc_estimate_observable(
    rho0: &DensityMatrix,
    spec: &SpectralHamiltonian,
    params: &DecoherenceParams,
    a: &CMatrix,
    t: f64,
    cfg: &McConfig,
) -> Result<McScalar> {
    crate::observables::check_observable(a, rho0.dim())?;
    let law = GammaLaw::at_time(t, params)?;
    let energy = rho0.in_energy_basis(spec)?;
    let a_energy = match rho0.basis() {
        Basis::Input => spec.to_energy_basis(a),
        Basis::Energy => a.clone(),
    };
    let freqs = bohr_frequencies(spec, params);
    let n = rho0.dim();
    let stationary: f64 = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .filter(|&(r, c)| freqs.get(r, c) == 0.0)
        .map(|(r, c)| (energy.get(r, c) * a_energy[(c, r)]).re)
        .sum();
    let moving: Vec<(f64, Complex64)> = freqs
        .pairs()
        .filter(|&(_, _, w)| w != 0.0)
        .map(|(r, c, w)| (w, energy.get(r, c) * a_energy[(c, r)]))
        .collect();
    let moments = run(cfg, 1, |rng, out| {
        let t_prime = law.scale() * sample_gamma(rng, law.shape());
        // (r, c) and (c, r) terms are complex conjugates
        let oscillating: f64 = moving
            .iter()
            .map(|&(w, weight)| 2.0 * (weight * Complex64::new(0.0, -w * t_prime).exp()).re)
            .sum();
        out[0] = Complex64::new(stationary + oscillating, 0.0);
    })?;
    Ok(McScalar { value: moments.mean[0].re, stderr: moments.standard_error(0) })
}
