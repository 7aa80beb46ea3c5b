use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical and policy constants shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Base-station intensity (atoms/m²).
    pub lambda: f64,
    /// Path-loss exponent, strictly above 2.
    pub beta: f64,
    /// Per-user transmit power; also the mean of every exponential gain.
    pub p: f64,
    /// Noise power.
    pub sigma2: f64,
    /// SINR threshold T.
    pub threshold: f64,
    /// Cooperation parameter ρ ∈ [0, 1].
    pub rho: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            beta: 4.0,
            p: 1.0,
            sigma2: 0.0,
            threshold: 0.8,
            rho: 0.5,
        }
    }
}

impl SystemParams {
    pub fn new(lambda: f64, beta: f64, p: f64, sigma2: f64, threshold: f64, rho: f64) -> Result<Self> {
        let params = Self {
            lambda,
            beta,
            p,
            sigma2,
            threshold,
            rho,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParams(format!("{what} = {v}")));
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return bad("lambda must be > 0", self.lambda);
        }
        if !(self.beta.is_finite() && self.beta > 2.0) {
            return bad("beta must be > 2", self.beta);
        }
        if !(self.p.is_finite() && self.p > 0.0) {
            return bad("p must be > 0", self.p);
        }
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            return bad("sigma2 must be >= 0", self.sigma2);
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return bad("threshold must be > 0", self.threshold);
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return bad("rho must lie in [0, 1]", self.rho);
        }
        Ok(())
    }

    pub fn with_rho(self, rho: f64) -> Self {
        Self { rho, ..self }
    }

    pub fn with_threshold(self, threshold: f64) -> Self {
        Self { threshold, ..self }
    }

    pub fn with_beta(self, beta: f64) -> Self {
        Self { beta, ..self }
    }

    pub fn with_sigma2(self, sigma2: f64) -> Self {
        Self { sigma2, ..self }
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_power(self, p: f64) -> Self {
        Self { p, ..self }
    }
}
