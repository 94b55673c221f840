//! Heston stochastic volatility started from its stationary variance.
//!
//! `dS = mu S dt + sqrt(v) S dW1`, `dv = alpha (sigma2 - v) dt + k sqrt(v) dW2`,
//! `d<W1, W2> = rho dt`, `v(0) = sigma2`. The centered log-return obeys
//! `dX = -v/2 dt + sqrt(v) dW1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{cexpm1, clog1p_over_z, CumulantSet, EcfModel, Strip};
use crate::error::{Result, RiskError};

/// Below this value of `alpha t` the closed-form cumulants lose digits to
/// cancellation and the moment ODEs are integrated instead.
const SMALL_ALPHA_T: f64 = 0.05;

/// Grid size of the scan for zeros of `1 - g e^{-eta t}` on the imaginary axis.
const STRIP_SCAN_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HestonParams {
    /// Stationary variance level (per year).
    pub sigma2: f64,
    /// Mean-reversion rate (per year).
    pub alpha: f64,
    /// Volatility of variance.
    pub k: f64,
    /// Return/variance correlation.
    pub rho: f64,
    /// Annualized linear-return mean.
    pub mu: f64,
}

impl HestonParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(RiskError::InvalidParameter(m));
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return bad(format!("sigma2 must be positive, got {}", self.sigma2));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad(format!("k must be positive, got {}", self.k));
        }
        if !(self.rho > -1.0 && self.rho < 1.0) {
            return bad(format!("rho must lie in (-1, 1), got {}", self.rho));
        }
        Ok(())
    }

    /// `2 alpha sigma2 - k^2`; negative when the variance can touch zero.
    pub fn feller_indicator(&self) -> f64 {
        2.0 * self.alpha * self.sigma2 - self.k * self.k
    }

    pub fn satisfies_feller(&self) -> bool {
        self.feller_indicator() > 0.0
    }

    /// Zeros of `eta(i nu)`: `(nu_minus^a, nu_plus^a)`.
    pub fn eta_zeros(&self) -> (f64, f64) {
        let HestonParams { alpha, k, rho, .. } = *self;
        let b = 2.0 * alpha * rho - k;
        let disc = (b * b + 4.0 * alpha * alpha * (1.0 - rho * rho)).sqrt();
        let den = 2.0 * k * (1.0 - rho * rho);
        ((b - disc) / den, (b + disc) / den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HestonModel {
    pub params: HestonParams,
}

impl HestonModel {
    pub fn new(params: HestonParams) -> Result<Self> {
        params.validate()?;
        if !params.satisfies_feller() {
            log::warn!(
                "Feller condition violated: 2 alpha sigma2 - k^2 = {:.4}",
                params.feller_indicator()
            );
        }
        Ok(Self { params })
    }

    /// Like [`HestonModel::new`] without the Feller warning; used inside optimizers.
    pub fn new_quiet(params: HestonParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    /// `1 - g(i nu) e^{-eta(i nu) t}` for real `nu` inside the `eta` zeros.
    fn denominator_on_axis(&self, nu: f64, t: f64) -> f64 {
        let HestonParams { alpha, k, rho, .. } = self.params;
        let xi = alpha + rho * k * nu;
        let eta2 = xi * xi - k * k * nu * (1.0 + nu);
        let eta = eta2.max(0.0).sqrt();
        let g = (xi - eta) / (xi + eta);
        1.0 - g * (-eta * t).exp()
    }

    /// First zero of the denominator between 0 and `edge` (either sign),
    /// scanning outward from the origin and refining by bisection.
    fn scan_denominator(&self, edge: f64, t: f64) -> Option<f64> {
        let f = |nu: f64| self.denominator_on_axis(nu, t);
        let h = edge / STRIP_SCAN_POINTS as f64;
        let mut prev = f(0.0);
        for i in 1..STRIP_SCAN_POINTS {
            let nu = h * i as f64;
            let cur = f(nu);
            if cur.is_finite() && cur.signum() == prev.signum() && cur != 0.0 {
                prev = cur;
                continue;
            }
            let (mut a, mut b) = (nu - h, nu);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = f(m);
                if fm.is_finite() && fm.signum() == prev.signum() {
                    a = m;
                } else {
                    b = m;
                }
                if (b - a).abs() < 1e-14 * b.abs().max(1.0) {
                    break;
                }
            }
            return Some(0.5 * (a + b));
        }
        None
    }

    fn cumulants_closed_form(&self, t: f64) -> [f64; 4] {
        let HestonParams {
            sigma2: s2,
            alpha: a,
            k,
            rho: r,
            ..
        } = self.params;
        let e1 = (-a * t).exp();
        let e2 = e1 * e1;
        let e3 = e2 * e1;
        let e4 = e2 * e2;
        let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);
        let (k2, k3, k4) = (k * k, k * k * k, k * k * k * k);
        let r2 = r * r;
        let d = k - 2.0 * a * r;

        let c1 = -0.5 * s2 * t;

        let c2 = s2 / (8.0 * a3)
            * (-k2 * e2 + 4.0 * k * e1 * d + 2.0 * a * t * (4.0 * a2 + k2 - 4.0 * a * k * r)
                + k * (8.0 * a * r - 3.0 * k));

        let c3 = k * s2 / (8.0 * a.powi(5))
            * (k3 * e3 - 3.0 * a * k * e2 * (-k * t * d - 2.0 * (a - k * r))
                - 3.0
                    * e1
                    * (2.0 * a * k * t * d * d + 3.0 * k3 - 8.0 * a3 * r - 16.0 * a * k2 * r
                        + 8.0 * a2 * k * (1.0 + 2.0 * r2))
                + 3.0
                    * a
                    * t
                    * (-k3 + 8.0 * a3 * r + 6.0 * a * k2 * r - 4.0 * a2 * k * (1.0 + 2.0 * r2))
                + 8.0 * k3
                - 24.0 * a3 * r
                - 42.0 * a * k2 * r
                + 6.0 * a2 * k * (3.0 + 8.0 * r2));

        let c4 = 3.0 * k2 * s2 / (64.0 * a.powi(7))
            * (-3.0 * k4 * e4
                - 8.0 * k2 * e3 * (2.0 * a * k * t * d + 4.0 * a2 + k2 - 6.0 * a * k * r)
                - 4.0
                    * e2
                    * (4.0 * a2 * k2 * t * t * d * d
                        + 2.0
                            * a
                            * k
                            * t
                            * (k3 - 16.0 * a3 * r - 12.0 * a * k2 * r
                                + 4.0 * a2 * k * (3.0 + 4.0 * r2))
                        + 8.0 * a4
                        - 3.0 * k4
                        - 32.0 * a3 * k * r
                        + 8.0 * a * k3 * r
                        + 16.0 * a2 * k2 * r2)
                - 8.0
                    * e1
                    * (-2.0 * a2 * k * t * t * d * d * d
                        - 8.0
                            * a
                            * t
                            * (k4 - 7.0 * a * k3 * r + 4.0 * a4 * r2
                                - 8.0 * a3 * k * r * (1.0 + r2)
                                + a2 * k2 * (3.0 + 14.0 * r2))
                        - 9.0 * k4
                        + 70.0 * a * k3 * r
                        + 32.0 * a3 * k * r * (4.0 + 3.0 * r2)
                        - 16.0 * a4 * (1.0 + 4.0 * r2)
                        - 4.0 * a2 * k2 * (9.0 + 40.0 * r2))
                + 4.0
                    * a
                    * t
                    * (5.0 * k4 - 40.0 * a * k3 * r - 32.0 * a3 * k * r * (3.0 + 2.0 * r2)
                        + 16.0 * a4 * (1.0 + 4.0 * r2)
                        + 24.0 * a2 * k2 * (1.0 + 4.0 * r2))
                - 73.0 * k4
                + 544.0 * a * k3 * r
                + 128.0 * a3 * k * r * (7.0 + 6.0 * r2)
                - 32.0 * a4 * (3.0 + 16.0 * r2)
                - 64.0 * a2 * k2 * (4.0 + 19.0 * r2));

        [c1, c2, c3, c4]
    }

    /// Cumulants from the Taylor coefficients of the Riccati solution,
    /// integrated with classical RK4. Used where `alpha t` is small.
    fn cumulants_by_ode(&self, t: f64) -> [f64; 4] {
        let HestonParams {
            sigma2: s2,
            alpha: a,
            k,
            rho: r,
            ..
        } = self.params;
        let i = Complex64::i();
        // y = [d1..d4, c1..c4]: coefficients of phi^n in D and in C = int D
        let rhs = |y: &[Complex64; 8]| -> [Complex64; 8] {
            let d = &y[..4];
            let irk = i * r * k;
            let hk = 0.5 * k * k;
            let dd1 = -0.5 * i - a * d[0];
            let dd2 = -0.5 - a * d[1] + irk * d[0] + hk * d[0] * d[0];
            let dd3 = -a * d[2] + irk * d[1] + hk * 2.0 * d[0] * d[1];
            let dd4 = -a * d[3] + irk * d[2] + hk * (2.0 * d[0] * d[2] + d[1] * d[1]);
            [dd1, dd2, dd3, dd4, d[0], d[1], d[2], d[3]]
        };
        let steps = ((t * (a + k + 1.0) * 400.0).ceil() as usize).clamp(400, 200_000);
        let h = t / steps as f64;
        let mut y = [Complex64::new(0.0, 0.0); 8];
        let axpy = |y: &[Complex64; 8], s: f64, k: &[Complex64; 8]| {
            let mut o = *y;
            for j in 0..8 {
                o[j] += s * k[j];
            }
            o
        };
        for _ in 0..steps {
            let k1 = rhs(&y);
            let k2 = rhs(&axpy(&y, 0.5 * h, &k1));
            let k3 = rhs(&axpy(&y, 0.5 * h, &k2));
            let k4 = rhs(&axpy(&y, h, &k3));
            for j in 0..8 {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
        // k_n = (-i)^n n! H_n with H_n = s2 (alpha c_n + d_n)
        let mut out = [0.0; 4];
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 1.0;
        for n in 0..4 {
            pow *= -i;
            fact *= (n + 1) as f64;
            let hn = s2 * (a * y[4 + n] + y[n]);
            out[n] = (pow * fact * hn).re;
        }
        out
    }
}

/// Strip of regularity at horizon `t`.
pub fn heston_strip(params: &HestonParams, t: f64) -> Strip {
    let model = HestonModel { params: *params };
    model.strip(t)
}

impl EcfModel for HestonModel {
    fn log_ecf(&self, phi: Complex64, t: f64) -> Complex64 {
        let HestonParams {
            sigma2: s2,
            alpha: a,
            k,
            rho: r,
            ..
        } = self.params;
        let i = Complex64::i();
        let xi = a - i * r * k * phi;
        let w = phi * (i + phi);
        let eta = (xi * xi + k * k * w).sqrt();
        let sum = xi + eta;
        // (xi - eta) / k^2, free of cancellation
        let q = -w / sum;
        let g = k * k * q / sum;
        let em1 = cexpm1(-eta * t);
        let denom = 1.0 - g * (em1 + 1.0);
        // ln[(1 - g) / (1 - g e^{-eta t})] = ln(1 + z)
        let z = g * em1 / denom;
        let z_over_k2 = q / sum * em1 / denom;
        s2 * (a * q * t + 2.0 * a * z_over_k2 * clog1p_over_z(z) - q * em1 / denom)
    }

    fn strip(&self, t: f64) -> Strip {
        let (lo_a, hi_a) = self.params.eta_zeros();
        let hi = self.scan_denominator(hi_a, t).map_or(hi_a, |b| b.min(hi_a));
        let lo = self.scan_denominator(lo_a, t).map_or(lo_a, |b| b.max(lo_a));
        Strip {
            nu_minus: lo,
            nu_plus: hi,
        }
    }

    fn cumulants(&self, t: f64) -> CumulantSet {
        let c = if self.params.alpha * t < SMALL_ALPHA_T {
            self.cumulants_by_ode(t)
        } else {
            self.cumulants_closed_form(t)
        };
        CumulantSet {
            t,
            k1: c[0],
            k2: c[1],
            k3: c[2],
            k4: c[3],
        }
    }

    fn drift(&self) -> f64 {
        self.params.mu
    }

    fn name(&self) -> &'static str {
        "heston"
    }
}
