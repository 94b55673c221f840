//! Truncated Lévy noise: Lévy-stable core with exponentially damped tails.
//!
//! Per unit time the Hamiltonian is
//!
//! ```text
//! H(phi) = -(S2/2) lambda^(2-g) / (g (1-g))
//!          * [ (1-b)(lambda + i phi)^g + (1+b)(lambda - i phi)^g - 2 lambda^g ]
//! ```
//!
//! with `S2` the annualized variance, `g` the tail exponent, `lambda` the
//! cutoff and `b` the asymmetry. The density decays as
//! `exp(-lambda |x|) / |x|^(1+g) * (1 + b sign(x))`, so `b < 0` loads the
//! left tail and the skewness is `b (2-g) / (lambda sqrt(S2 t))`.
//! The law is re-centered so that the mean of `x` is `-S2 t / 2`, and horizons
//! add as i.i.d. increments: `H_t = t H`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CumulantSet, EcfModel, Strip};
use crate::error::{Result, RiskError};

/// Below this distance from `gamma = 1` the limiting form of the prefactor is used.
const GAMMA_ONE_BAND: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TldParams {
    /// Annualized variance `Sigma^2`.
    pub sigma2: f64,
    /// Tail exponent in (0, 2].
    pub gamma: f64,
    /// Exponential cutoff (inverse return units).
    pub lambda: f64,
    /// Asymmetry in [-1, 1].
    pub beta: f64,
}

impl TldParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(RiskError::InvalidParameter(m));
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return bad(format!("Sigma^2 must be positive, got {}", self.sigma2));
        }
        if !(self.gamma > 0.0 && self.gamma <= 2.0) {
            return bad(format!("gamma must lie in (0, 2], got {}", self.gamma));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.beta.abs() <= 1.0) {
            return bad(format!("beta must lie in [-1, 1], got {}", self.beta));
        }
        Ok(())
    }

    /// `E[exp(x)]` is finite only when the left tail decays faster than `e^x`.
    pub fn has_finite_es(&self) -> bool {
        self.lambda > 1.0
    }

    /// Skewness at horizon `t`.
    pub fn skewness(&self, t: f64) -> f64 {
        self.beta * (2.0 - self.gamma) / (self.lambda * (self.sigma2 * t).sqrt())
    }

    /// Excess kurtosis at horizon `t`.
    pub fn kurtosis(&self, t: f64) -> f64 {
        (2.0 - self.gamma) * (3.0 - self.gamma) / (self.lambda * self.lambda * self.sigma2 * t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TldModel {
    pub params: TldParams,
    pub mu: f64,
}

impl TldModel {
    pub fn new(params: TldParams, mu: f64) -> Result<Self> {
        params.validate()?;
        if !params.has_finite_es() {
            log::warn!(
                "TLD cutoff lambda = {} <= 1: expected shortfall is infinite",
                params.lambda
            );
        }
        Ok(Self { params, mu })
    }

    /// Per-year centered Hamiltonian `H'(phi)`.
    pub fn hamiltonian(&self, phi: Complex64) -> Complex64 {
        let TldParams {
            sigma2,
            gamma,
            lambda,
            beta,
        } = self.params;
        let i = Complex64::i();
        let up = lambda + i * phi;
        let dn = lambda - i * phi;

        // bracket with its linear part removed; the centering term restores
        // the mean, so only the non-linear part matters
        let core = if (gamma - 1.0).abs() < GAMMA_ONE_BAND {
            // limit of bracket / (1 - gamma) as gamma -> 1
            let l = lambda.ln();
            let b = (1.0 - beta) * up * up.ln() + (1.0 + beta) * dn * dn.ln()
                - 2.0 * lambda * l
                + 2.0 * i * beta * (l + 1.0) * phi;
            -b * lambda
        } else {
            let lg = lambda.powf(gamma);
            let slope = -2.0 * i * beta * gamma * lambda.powf(gamma - 1.0);
            let b = (1.0 - beta) * (gamma * up.ln()).exp() + (1.0 + beta) * (gamma * dn.ln()).exp()
                - 2.0 * lg
                - slope * phi;
            b * lambda.powf(2.0 - gamma) / (1.0 - gamma)
        };
        -0.5 * sigma2 / gamma * core - 0.5 * i * sigma2 * phi
    }
}

impl EcfModel for TldModel {
    fn log_ecf(&self, phi: Complex64, t: f64) -> Complex64 {
        t * self.hamiltonian(phi)
    }

    fn strip(&self, _t: f64) -> Strip {
        Strip {
            nu_minus: -self.params.lambda,
            nu_plus: self.params.lambda,
        }
    }

    fn cumulants(&self, t: f64) -> CumulantSet {
        let p = &self.params;
        let k2 = p.sigma2 * t;
        CumulantSet {
            t,
            k1: -0.5 * k2,
            k2,
            k3: p.beta * (2.0 - p.gamma) * k2 / p.lambda,
            k4: (2.0 - p.gamma) * (3.0 - p.gamma) * k2 / (p.lambda * p.lambda),
        }
    }

    fn drift(&self) -> f64 {
        self.mu
    }

    fn name(&self) -> &'static str {
        "tld"
    }
}
