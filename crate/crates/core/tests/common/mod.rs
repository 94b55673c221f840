#![allow(dead_code)]

use gft_risk::models::{GaussianModel, HestonModel, HestonParams, TldModel, TldParams};
use gft_risk::timeseries::DEFAULT_DT;
use statrs::distribution::{ContinuousCDF, Normal};

pub const DT: f64 = DEFAULT_DT;

/// Index parameter sets: mu, TLD (Sigma^2, gamma, lambda, beta), Heston (sigma^2, alpha, k, rho).
pub struct IndexParams {
    pub name: &'static str,
    pub mu: f64,
    pub tld: [f64; 4],
    pub heston: [f64; 4],
}

pub const INDICES: [IndexParams; 3] = [
    IndexParams {
        name: "DAX",
        mu: 0.1102,
        tld: [0.0464, 1.77, 10.74, -0.38],
        heston: [0.0471, 86.0, 4.67, -0.17],
    },
    IndexParams {
        name: "CAC",
        mu: 0.0747,
        tld: [0.0411, 1.84, 11.78, -0.21],
        heston: [0.0421, 330.0, 8.08, -0.06],
    },
    IndexParams {
        name: "SX5E",
        mu: 0.0873,
        tld: [0.0355, 1.78, 13.60, -0.33],
        heston: [0.0388, 287.0, 8.82, -0.12],
    },
];

impl IndexParams {
    pub fn heston_params(&self) -> HestonParams {
        let [sigma2, alpha, k, rho] = self.heston;
        HestonParams {
            sigma2,
            alpha,
            k,
            rho,
            mu: self.mu,
        }
    }

    pub fn heston(&self) -> HestonModel {
        HestonModel::new_quiet(self.heston_params()).unwrap()
    }

    pub fn tld_params(&self) -> TldParams {
        let [sigma2, gamma, lambda, beta] = self.tld;
        TldParams {
            sigma2,
            gamma,
            lambda,
            beta,
        }
    }

    pub fn tld(&self) -> TldModel {
        TldModel::new(self.tld_params(), self.mu).unwrap()
    }

    /// Normal benchmark with the TLD variance.
    pub fn gaussian(&self) -> GaussianModel {
        GaussianModel::new(self.tld[0], self.mu).unwrap()
    }
}

/// Closed-form `(VaR, ES)` of the log-normal law with annual variance
/// `sigma2` and linear drift `mu`.
pub fn gaussian_var_es(sigma2: f64, mu: f64, t: f64, pstar: f64) -> (f64, f64) {
    let n = Normal::new(0.0, 1.0).unwrap();
    let s = (sigma2 * t).sqrt();
    // x ~ N(-s^2/2, s^2); P(x < -L) = pstar
    let l = 0.5 * s * s - s * n.inverse_cdf(pstar);
    let var = -(mu * t - l).exp_m1();
    let tail = n.cdf((-l - 0.5 * s * s) / s);
    let es = 1.0 - (mu * t).exp() * tail / pstar;
    (var, es)
}
