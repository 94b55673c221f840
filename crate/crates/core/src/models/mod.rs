//! Extended characteristic functions of the centered log-return law.
//!
//! Every model exposes `f(phi) = E[exp(i phi x)]` analytically continued to
//! a horizontal strip of the complex plane, together with closed-form
//! cumulants. The Fourier engine needs nothing else.

mod gaussian;
mod heston;
mod tld;

pub use gaussian::GaussianModel;
pub use heston::{heston_strip, HestonModel, HestonParams};
pub use tld::{TldModel, TldParams};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RiskError};

/// Imaginary-part bounds of the regularity strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub nu_minus: f64,
    pub nu_plus: f64,
}

impl Strip {
    pub fn contains(&self, nu: f64) -> bool {
        nu > self.nu_minus && nu < self.nu_plus
    }
}

/// Cap used in place of an infinite strip bound.
pub const STRIP_CAP: f64 = 1.0e6;

/// First four cumulants of the centered log-return at horizon `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulantSet {
    pub t: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
}

impl CumulantSet {
    pub fn skewness(&self) -> f64 {
        self.k3 / self.k2.powf(1.5)
    }

    pub fn kurtosis(&self) -> f64 {
        self.k4 / (self.k2 * self.k2)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.k1, self.k2, self.k3, self.k4]
    }
}

/// A return law known through its extended characteristic function.
pub trait EcfModel: Send + Sync {
    /// `H_t(phi) = ln f(phi)` at horizon `t` (years), without strip checks.
    fn log_ecf(&self, phi: Complex64, t: f64) -> Complex64;

    fn strip(&self, t: f64) -> Strip;

    fn cumulants(&self, t: f64) -> CumulantSet;

    /// Annualized linear-return mean used by the VaR/ES maps.
    fn drift(&self) -> f64;

    fn name(&self) -> &'static str;

    fn ecf(&self, phi: Complex64, t: f64) -> Complex64 {
        self.log_ecf(phi, t).exp()
    }

    /// `f(phi)` with the strip precondition enforced.
    fn evaluate(&self, phi: Complex64, t: f64) -> Result<Complex64> {
        if !(t > 0.0) {
            return Err(RiskError::InvalidParameter(format!(
                "horizon must be positive, got {t}"
            )));
        }
        let strip = self.strip(t);
        if !strip.contains(phi.im) {
            return Err(RiskError::OutsideStrip {
                phi: phi.to_string(),
                nu_minus: strip.nu_minus,
                nu_plus: strip.nu_plus,
            });
        }
        Ok(self.ecf(phi, t))
    }
}

/// Closed set of supported models, serializable with a `model` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum AnyModel {
    Gaussian(GaussianModel),
    Tld(TldModel),
    Heston(HestonModel),
}

impl AnyModel {
    fn inner(&self) -> &dyn EcfModel {
        match self {
            AnyModel::Gaussian(m) => m,
            AnyModel::Tld(m) => m,
            AnyModel::Heston(m) => m,
        }
    }
}

impl EcfModel for AnyModel {
    fn log_ecf(&self, phi: Complex64, t: f64) -> Complex64 {
        self.inner().log_ecf(phi, t)
    }

    fn strip(&self, t: f64) -> Strip {
        self.inner().strip(t)
    }

    fn cumulants(&self, t: f64) -> CumulantSet {
        self.inner().cumulants(t)
    }

    fn drift(&self) -> f64 {
        self.inner().drift()
    }

    fn name(&self) -> &'static str {
        self.inner().name()
    }
}

impl From<GaussianModel> for AnyModel {
    fn from(m: GaussianModel) -> Self {
        AnyModel::Gaussian(m)
    }
}

impl From<TldModel> for AnyModel {
    fn from(m: TldModel) -> Self {
        AnyModel::Tld(m)
    }
}

impl From<HestonModel> for AnyModel {
    fn from(m: HestonModel) -> Self {
        AnyModel::Heston(m)
    }
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub(crate) fn cexpm1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-5 {
        z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)))
    } else {
        // Re part via expm1, Im part via sin to keep precision when Re z ~ 0
        let em1 = z.re.exp_m1();
        let (s, c) = z.im.sin_cos();
        let half = (0.5 * z.im).sin();
        Complex64::new(em1 * c - 2.0 * half * half, (em1 + 1.0) * s)
    }
}

/// `ln(1 + z) / z`, equal to 1 at `z = 0`.
pub(crate) fn clog1p_over_z(z: Complex64) -> Complex64 {
    let w = Complex64::new(1.0, 0.0) + z;
    let d = w - 1.0;
    if d == Complex64::new(0.0, 0.0) {
        Complex64::new(1.0, 0.0)
    } else {
        w.ln() / d
    }
}
