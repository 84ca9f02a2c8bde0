use crate::error::{Error, Result};

/// The two characteristic times of the intrinsic decoherence law and the
/// action constant.
///
/// `tau1` is the width of a single evolution event and `tau2` the mean
/// interval between events (the cronon). The law requires `0 < tau1 <= tau2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceParams {
    tau1: f64,
    tau2: f64,
    hbar: f64,
}

impl DecoherenceParams {
    pub fn new(tau1: f64, tau2: f64) -> Result<Self> {
        Self::with_hbar(tau1, tau2, 1.0)
    }

    pub fn with_hbar(tau1: f64, tau2: f64, hbar: f64) -> Result<Self> {
        if !(tau1.is_finite() && tau1 > 0.0) {
            return Err(Error::parameter(format!("tau1 must be a positive finite time, got {tau1}")));
        }
        if !(tau2.is_finite() && tau2 > 0.0) {
            return Err(Error::parameter(format!("tau2 must be a positive finite time, got {tau2}")));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::parameter(format!("hbar must be a positive finite action, got {hbar}")));
        }
        if tau1 > tau2 {
            return Err(Error::parameter(format!(
                "tau1 <= tau2 required, got tau1 = {tau1} > tau2 = {tau2}"
            )));
        }
        Ok(Self { tau1, tau2, hbar })
    }

    /// Equal event width and cronon, `tau1 = tau2 = tau`.
    pub fn symmetric(tau: f64) -> Result<Self> {
        Self::new(tau, tau)
    }

    pub fn tau1(&self) -> f64 {
        self.tau1
    }

    pub fn tau2(&self) -> f64 {
        self.tau2
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Number of cronons elapsed at time `t`; the shape of the waiting-time law.
    pub fn shape(&self, t: f64) -> f64 {
        t / self.tau2
    }

    /// Mean effective evolution time `t * tau1 / tau2`.
    pub fn reduced_time(&self, t: f64) -> f64 {
        t * (self.tau1 / self.tau2)
    }
}
