//! Schrodinger cat: two Gaussian packets of width `sigma_x` centred at
//! `-D/2` and `+D/2`.
//!
//! The interference term oscillates at a position dependent frequency
//! `omega(x) = x D sigma_v / (2 sigma_x^3)`, so the averaged density loses its
//! fringes first far from the midpoint.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::evolution::{damping_rate, frequency_shift};
use crate::observables::WavefunctionModel;
use crate::params::DecoherenceParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatScenario {
    sigma_x: f64,
    sigma_v: f64,
    separation: f64,
    mass: f64,
    hbar: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::parameter(format!("{name} must be positive, got {v}")))
    }
}

impl CatScenario {
    pub fn new(sigma_x: f64, sigma_v: f64, separation: f64, mass: f64, hbar: f64) -> Result<Self> {
        Ok(Self {
            sigma_x: positive("sigma_x", sigma_x)?,
            sigma_v: positive("sigma_v", sigma_v)?,
            separation: positive("separation", separation)?,
            mass: positive("mass", mass)?,
            hbar: positive("hbar", hbar)?,
        })
    }

    /// Minimum-uncertainty packets: `sigma_v = hbar / (2 m sigma_x)`.
    pub fn minimum_uncertainty(sigma_x: f64, separation: f64, mass: f64, hbar: f64) -> Result<Self> {
        let sigma_x = positive("sigma_x", sigma_x)?;
        let mass = positive("mass", mass)?;
        let hbar = positive("hbar", hbar)?;
        Self::new(sigma_x, hbar / (2.0 * mass * sigma_x), separation, mass, hbar)
    }

    /// Minimum-uncertainty packets with kinetic energy scale `E = m sigma_v^2 / 2`
    /// held fixed, so heavier bodies get narrower packets.
    pub fn from_energy(energy: f64, separation: f64, mass: f64, hbar: f64) -> Result<Self> {
        let energy = positive("energy", energy)?;
        let mass = positive("mass", mass)?;
        let hbar = positive("hbar", hbar)?;
        let sigma_v = (2.0 * energy / mass).sqrt();
        Self::new(hbar / (2.0 * mass * sigma_v), sigma_v, separation, mass, hbar)
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x
    }

    pub fn sigma_v(&self) -> f64 {
        self.sigma_v
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Real Gaussian envelope of packet `j` (0 on the left, 1 on the right).
    pub fn envelope(&self, j: usize, x: f64) -> f64 {
        let centre = if j == 0 { -0.5 } else { 0.5 } * self.separation;
        let d = x - centre;
        (2.0 * PI * self.sigma_x * self.sigma_x).powf(-0.25) * (-d * d / (4.0 * self.sigma_x * self.sigma_x)).exp()
    }

    pub fn omega_at(&self, x: f64) -> f64 {
        x * self.separation * self.sigma_v / (2.0 * self.sigma_x.powi(3))
    }

    /// Decay rate of the fringes at `x`.
    pub fn interference_rate(&self, params: &DecoherenceParams, x: f64) -> f64 {
        damping_rate(self.omega_at(x), params)
    }

    /// Largest `|x|` at which the fringe contrast after time `t` is still at
    /// least `survival` (0 < survival < 1).
    pub fn coherent_half_width(&self, params: &DecoherenceParams, t: f64, survival: f64) -> Result<f64> {
        if !(survival > 0.0 && survival < 1.0) {
            return Err(Error::parameter(format!("survival must lie in (0, 1), got {survival}")));
        }
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::domain(format!("time must be positive, got {t}")));
        }
        // gamma(omega) t = -ln s  <=>  ln(1 + omega^2 tau1^2) = -2 tau2 ln(s) / t
        let rhs = -2.0 * params.tau2() * survival.ln() / t;
        let omega = rhs.exp_m1().sqrt() / params.tau1();
        Ok(omega * 2.0 * self.sigma_x.powi(3) / (self.separation * self.sigma_v))
    }

    /// Fringe term `psi_1 psi_2 e^{-gamma t} cos(nu t)` of the averaged density.
    pub fn interference_term(&self, params: &DecoherenceParams, x: f64, t: f64) -> f64 {
        let w = self.omega_at(x);
        let overlap = self.envelope(0, x) * self.envelope(1, x);
        if overlap == 0.0 {
            return 0.0;
        }
        overlap * (-damping_rate(w, params) * t).exp() * (frequency_shift(w, params) * t).cos()
    }
}

/// Averaged position density of the cat state at time `t`.
pub fn cat_density(sc: &CatScenario, params: &DecoherenceParams, x: f64, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    if !x.is_finite() {
        return Err(Error::domain("position must be finite"));
    }
    let (a, b) = (sc.envelope(0, x), sc.envelope(1, x));
    Ok(0.5 * (a * a + b * b) + sc.interference_term(params, x, t))
}

/// Unaveraged density at effective time `t'`, for numerical averaging.
impl WavefunctionModel for CatScenario {
    fn density(&self, x: f64, t_prime: f64) -> f64 {
        let (a, b) = (self.envelope(0, x), self.envelope(1, x));
        0.5 * (a * a + b * b) + a * b * (self.omega_at(x) * t_prime).cos()
    }
}
