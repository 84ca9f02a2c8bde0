//! Free Gaussian packet.

use crate::error::{Error, Result};
use crate::observables::{averaged_position_density, GaussianPacket};
use crate::params::DecoherenceParams;
use crate::quadrature::{integrate, Tolerance};
use crate::waiting_time::{GammaLaw, DEFAULT_TAIL};

/// Variance of the averaged position density of a packet at rest,
/// `sigma_t^2 = sigma_x^2 + sigma_v^2 (tbar^2 + tbar tau1)` with
/// `tbar = t tau1 / tau2`. The excess over the unitary width comes from the
/// variance of the effective time.
pub fn free_particle_spread(sigma_x: f64, sigma_v: f64, params: &DecoherenceParams, t: f64) -> Result<f64> {
    if !(sigma_x.is_finite() && sigma_x > 0.0) {
        return Err(Error::parameter(format!("sigma_x must be positive, got {sigma_x}")));
    }
    if !(sigma_v.is_finite() && sigma_v >= 0.0) {
        return Err(Error::parameter(format!("sigma_v must be nonnegative, got {sigma_v}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    let tbar = params.reduced_time(t);
    let var = sigma_x * sigma_x + sigma_v * sigma_v * (tbar * tbar + tbar * params.tau1());
    Ok(var)
}

/// Variance of the averaged density of a packet at rest, computed
/// by integrating `x^2` against the numerically averaged density. Independent
/// of [`free_particle_spread`]; used to cross-check it. Needs `t >= tau2`.
pub fn free_particle_spread_quadrature(
    sigma_x: f64,
    sigma_v: f64,
    params: &DecoherenceParams,
    t: f64,
    tol: f64,
) -> Result<f64> {
    let packet = GaussianPacket { x0: 0.0, velocity: 0.0, sigma_x, sigma_v };
    let law = GammaLaw::at_time(t, params)?;
    let (_, hi) = law.support(DEFAULT_TAIL);
    let widest = (sigma_x * sigma_x + sigma_v * sigma_v * hi * hi).sqrt();
    let narrowest = sigma_x;
    let edge = 12.0 * widest;
    // inner tolerance tighter than the outer one so the nesting noise stays below it
    let inner = tol * 1e-2;
    let mut breaks = vec![0.0];
    let mut x = narrowest;
    while x < edge {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.push(edge);
    let second = integrate(
        |x: f64| -> f64 {
            let p = averaged_position_density(&packet, x, t, params, inner).unwrap_or(f64::NAN);
            x * x * p
        },
        &breaks,
        Tolerance::new(0.0, tol),
        20_000,
    )?;
    if !second.value.is_finite() {
        return Err(Error::numeric("averaged density could not be evaluated"));
    }
    // density is even in x
    Ok(2.0 * second.value)
}
