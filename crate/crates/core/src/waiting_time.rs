//! The gamma law of effective evolution time and the Poisson event law.
//!
//! After a time `t` the number of unitary evolution events is `t / tau2`
//! on average, each of width `tau1`; the total effective evolution time `t'`
//! is gamma distributed with shape `t / tau2` and scale `tau1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::DecoherenceParams;
use crate::quadrature::{self, Estimate, Integrand, Tolerance};
use crate::special::{gamma_p, gamma_q, ln_factorial, ln_gamma};

/// Upper-tail mass dropped when truncating the law for quadrature.
pub const DEFAULT_TAIL: f64 = 1e-14;
const MAX_PANELS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaLaw {
    shape: f64,
    scale: f64,
}

/// A density value; shapes below one diverge (integrably) at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PdfValue {
    Finite(f64),
    IntegrableSingularity,
}

impl PdfValue {
    pub fn value(self) -> f64 {
        match self {
            PdfValue::Finite(v) => v,
            PdfValue::IntegrableSingularity => f64::INFINITY,
        }
    }

    pub fn is_singular(self) -> bool {
        matches!(self, PdfValue::IntegrableSingularity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub sigma: f64,
}

impl Moments {
    pub fn relative_dispersion(&self) -> f64 {
        self.sigma / self.mean
    }
}

impl GammaLaw {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::domain(format!("gamma shape must be positive, got {shape}")));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::domain(format!("gamma scale must be positive, got {scale}")));
        }
        Ok(Self { shape, scale })
    }

    /// The law of effective time after elapsed time `t > 0`.
    pub fn at_time(t: f64, params: &DecoherenceParams) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::domain(format!(
                "elapsed time must be positive (t = 0 is a point mass at t' = 0), got {t}"
            )));
        }
        Self::new(params.shape(t), params.tau1())
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }

    pub fn pdf(&self, t_prime: f64) -> f64 {
        self.density(t_prime).value()
    }

    fn density(&self, t_prime: f64) -> PdfValue {
        if t_prime < 0.0 {
            return PdfValue::Finite(0.0);
        }
        if t_prime == 0.0 {
            return if self.shape < 1.0 {
                PdfValue::IntegrableSingularity
            } else if self.shape == 1.0 {
                PdfValue::Finite(1.0 / self.scale)
            } else {
                PdfValue::Finite(0.0)
            };
        }
        let x = t_prime / self.scale;
        let ln = (self.shape - 1.0) * x.ln() - x - ln_gamma(self.shape) - self.scale.ln();
        PdfValue::Finite(ln.exp())
    }

    pub fn cdf(&self, t_prime: f64) -> f64 {
        gamma_p(self.shape, t_prime / self.scale)
    }

    /// Interval outside which the law carries at most `tail` mass on each side.
    pub fn support(&self, tail: f64) -> (f64, f64) {
        let k = self.shape;
        let spread = k.sqrt().max(1.0);
        let mut hi = k + 10.0 * spread + 10.0;
        while gamma_q(k, hi) > tail {
            hi += 5.0 * spread;
        }
        let mut lo = 0.0;
        if k >= 1.0 {
            let candidate = k - 12.0 * spread;
            if candidate > 0.0 && gamma_p(k, candidate) <= tail {
                lo = candidate;
            }
        }
        (lo * self.scale, hi * self.scale)
    }

    fn break_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mean = self.mean();
        let sd = self.variance().sqrt();
        let mut breaks = vec![lo];
        for j in -8..=16 {
            let x = mean + j as f64 * 0.75 * sd;
            if x > lo && x < hi {
                breaks.push(x);
            }
        }
        breaks.push(hi);
        breaks
    }

    /// `E[f(t')]` by adaptive quadrature over the truncated support.
    ///
    /// For shapes below one the segment `[0, scale]` is integrated after the
    /// change of variables `t' = scale * u^(1/shape)`, which removes the
    /// singularity at the origin.
    pub fn expect<T, F>(&self, f: F, tol: Tolerance, tail: f64) -> Result<Estimate<T>>
    where
        T: Integrand,
        F: Fn(f64) -> T,
    {
        let (lo, hi) = self.support(tail);
        if self.shape >= 1.0 {
            let breaks = self.break_points(lo, hi);
            return quadrature::integrate(|x| f(x) * self.pdf(x), &breaks, tol, MAX_PANELS);
        }
        let half = Tolerance::new(0.5 * tol.abs, tol.rel);
        let k = self.shape;
        let norm = (-ln_gamma(k + 1.0)).exp();
        let head = quadrature::integrate(
            |u: f64| {
                let x = u.powf(1.0 / k);
                f(self.scale * x) * ((-x).exp() * norm)
            },
            &[0.0, 0.5, 1.0],
            half,
            MAX_PANELS,
        )?;
        let breaks = self.break_points(self.scale, hi);
        let body = quadrature::integrate(|x| f(x) * self.pdf(x), &breaks, half, MAX_PANELS)?;
        Ok(Estimate {
            value: head.value + body.value,
            error: head.error + body.error,
            evaluations: head.evaluations + body.evaluations,
        })
    }
}

/// Density of effective time `t_prime` after elapsed time `t`.
pub fn gamma_pdf(t_prime: f64, t: f64, params: &DecoherenceParams) -> Result<PdfValue> {
    if !(t_prime.is_finite() && t_prime >= 0.0) {
        return Err(Error::domain(format!("effective time must be nonnegative, got {t_prime}")));
    }
    Ok(GammaLaw::at_time(t, params)?.density(t_prime))
}

/// Mean effective time `t * tau1 / tau2` and its dispersion `sqrt(mean * tau1)`.
pub fn gamma_moments(t: f64, params: &DecoherenceParams) -> Result<Moments> {
    let law = GammaLaw::at_time(t, params)?;
    let mean = params.reduced_time(t);
    Ok(Moments { mean, sigma: (mean * law.scale()).sqrt() })
}

/// Gaussian surrogate of the gamma law, valid for many elapsed cronons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianApprox {
    pub mean: f64,
    pub sigma: f64,
}

impl GaussianApprox {
    pub fn pdf(&self, x: f64) -> f64 {
        let z = (x - self.mean) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * (2.0 * PI).sqrt())
    }
}

/// Requires strictly more than one elapsed cronon (`t / tau2 > 1`).
pub fn gaussian_approximation(t: f64, params: &DecoherenceParams) -> Result<GaussianApprox> {
    let shape = params.shape(t);
    if !(shape > 1.0) {
        return Err(Error::domain(format!(
            "Gaussian approximation needs t / tau2 > 1, got {shape}"
        )));
    }
    let m = gamma_moments(t, params)?;
    Ok(GaussianApprox { mean: m.mean, sigma: m.sigma })
}

/// Probability of `n` events by time `t` for events at mean interval `tau`.
pub fn milburn_poisson_pmf(n: u64, t: f64, tau: f64) -> Result<f64> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::domain(format!("event interval must be positive, got {tau}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let lambda = t / tau;
    Ok((-lambda + n as f64 * lambda.ln() - ln_factorial(n)).exp())
}
