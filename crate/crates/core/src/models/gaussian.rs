use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CumulantSet, EcfModel, Strip, STRIP_CAP};
use crate::error::{Result, RiskError};

/// Log-normal benchmark: centered log-return `x ~ N(-sigma2 t / 2, sigma2 t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianModel {
    /// Annualized variance.
    pub sigma2: f64,
    /// Annualized linear-return mean.
    pub mu: f64,
}

impl GaussianModel {
    pub fn new(sigma2: f64, mu: f64) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(RiskError::InvalidParameter(format!(
                "sigma2 must be positive, got {sigma2}"
            )));
        }
        Ok(Self { sigma2, mu })
    }
}

impl EcfModel for GaussianModel {
    fn log_ecf(&self, phi: Complex64, t: f64) -> Complex64 {
        let i = Complex64::i();
        -self.sigma2 * t * 0.5 * phi * (phi + i)
    }

    fn strip(&self, _t: f64) -> Strip {
        Strip {
            nu_minus: -STRIP_CAP,
            nu_plus: STRIP_CAP,
        }
    }

    fn cumulants(&self, t: f64) -> CumulantSet {
        CumulantSet {
            t,
            k1: -0.5 * self.sigma2 * t,
            k2: self.sigma2 * t,
            k3: 0.0,
            k4: 0.0,
        }
    }

    fn drift(&self) -> f64 {
        self.mu
    }

    fn name(&self) -> &'static str {
        "gaussian"
    }
}
