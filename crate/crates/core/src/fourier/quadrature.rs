//! Single-point risk numbers from the sine/cosine form of the damped integral,
//! evaluated by trapezoid panels that are halved until the estimate settles.

use num_complex::Complex64;
use rayon::prelude::*;

use super::interp::brent;
use super::{check_inputs, decay_frequency, Mode, RiskPoint, PSTAR_MAX, PSTAR_MIN};
use crate::error::{Result, RiskError};
use crate::models::EcfModel;

/// Default absolute tolerance on `I_nu`.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Root-finding tolerance on `L*`.
const ROOT_XTOL: f64 = 1e-12;

/// Each level halves the step; the first level uses 64 panels at most.
const MAX_LEVELS: usize = 18;

/// Trapezoid samples of `f(omega + i nu)` on `[0, omega_end]`, endpoint
/// weights folded in.
struct Panels {
    h: f64,
    omega: Vec<f64>,
    weighted: Vec<Complex64>,
}

impl Panels {
    fn build<M: EcfModel + ?Sized>(model: &M, t: f64, nu: f64, omega_end: f64, n: usize) -> Self {
        let h = omega_end / n as f64;
        let omega: Vec<f64> = (0..=n).map(|m| m as f64 * h).collect();
        let weighted = omega
            .par_iter()
            .enumerate()
            .map(|(m, &w)| {
                let f = model.ecf(Complex64::new(w, nu), t);
                if m == 0 || m == n {
                    0.5 * f
                } else {
                    f
                }
            })
            .collect();
        Self { h, omega, weighted }
    }

    /// `e^{-theta L} int_0^Omega [Re f cos(wL) - Im f sin(wL)] theta + ... dw`,
    /// written as the real part of the complex integrand.
    fn eval(&self, theta: f64, l: f64) -> f64 {
        let mut acc = 0.0;
        for (&w, &f) in self.omega.iter().zip(&self.weighted) {
            let (s, c) = (w * l).sin_cos();
            // Re[f e^{iwL} (theta + i w)] / (theta^2 + w^2)
            let re = f.re * c - f.im * s;
            let im = f.re * s + f.im * c;
            acc += (re * theta - im * w) / (theta * theta + w * w);
        }
        (-theta * l).exp() * self.h * acc
    }
}

fn converged_panels<M: EcfModel + ?Sized>(
    model: &M,
    t: f64,
    nu: f64,
    probes: &[(f64, f64)],
    tol: f64,
) -> Result<Panels> {
    let theta_max = probes.iter().map(|p| p.0).fold(nu, f64::max);
    let omega_end = decay_frequency(model, t, nu, nu, (tol * 1e-4).min(1e-13))?;
    let strip = model.strip(t);
    let rate = nu.min(strip.nu_plus - nu).min(theta_max);
    let h0 = (omega_end / 64.0).min(std::f64::consts::TAU * rate / 8.0);
    let mut n = (omega_end / h0).ceil() as usize;
    let mut prev: Option<Vec<f64>> = None;
    let mut settled = 0;
    for _ in 0..MAX_LEVELS {
        let panels = Panels::build(model, t, nu, omega_end, n);
        let vals: Vec<f64> = probes.iter().map(|&(th, l)| panels.eval(th, l)).collect();
        if let Some(p) = &prev {
            let change = p
                .iter()
                .zip(&vals)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if change < tol {
                settled += 1;
                if settled >= 2 {
                    return Ok(panels);
                }
            } else {
                settled = 0;
            }
        }
        prev = Some(vals);
        n *= 2;
    }
    Err(RiskError::NoConvergence(format!(
        "trapezoid panels did not settle to {tol:e} within {MAX_LEVELS} halvings"
    )))
}

/// `I_nu(L*, theta) = Re G_nu(L*, theta)`, so that `I_nu(L*, nu) / pi = P*`.
pub fn i_nu<M: EcfModel + ?Sized>(
    model: &M,
    t: f64,
    nu: f64,
    theta: f64,
    lstar: f64,
    tol: f64,
) -> Result<f64> {
    check_inputs(model, t, nu)?;
    if !(tol > 0.0) || !(theta > 0.0) || !lstar.is_finite() {
        return Err(RiskError::InvalidParameter(format!(
            "need tol > 0, theta > 0 and finite L*, got {tol}, {theta}, {lstar}"
        )));
    }
    let panels = converged_panels(model, t, nu, &[(theta, lstar)], tol)?;
    Ok(panels.eval(theta, lstar))
}

/// Root-find `I_nu(L*, nu) / pi = pstar`, then ES from the `nu + 1` integral.
pub fn risk_point<M: EcfModel + ?Sized>(
    model: &M,
    t: f64,
    nu: f64,
    pstar: f64,
    tol: f64,
) -> Result<RiskPoint> {
    check_inputs(model, t, nu)?;
    if !(PSTAR_MIN..=PSTAR_MAX).contains(&pstar) {
        return Err(RiskError::OutOfRange {
            pstar,
            lo: PSTAR_MIN,
            hi: PSTAR_MAX,
        });
    }
    let c = model.cumulants(t);
    let centre = -c.k1;
    let sd = c.k2.sqrt();
    let probes: Vec<(f64, f64)> = [centre, centre + 2.5 * sd, centre + 5.0 * sd]
        .iter()
        .flat_map(|&l| [(nu, l), (nu + 1.0, l)])
        .collect();
    let panels = converged_panels(model, t, nu, &probes, tol)?;
    let p_of = |l: f64| panels.eval(nu, l) / std::f64::consts::PI;

    let mut a = centre - 0.5 * sd;
    let mut step = sd;
    while p_of(a) <= pstar {
        a -= step;
        step *= 2.0;
        if step > 1e3 {
            return Err(RiskError::NoConvergence("could not bracket L* from below".into()));
        }
    }
    let mut b = centre + sd;
    let mut step = sd;
    while p_of(b) >= pstar {
        b += step;
        step *= 2.0;
        if step > 1e3 {
            return Err(RiskError::NoConvergence("could not bracket L* from above".into()));
        }
    }
    let lstar = brent(|l| p_of(l) - pstar, a, b, ROOT_XTOL, 200)?;
    let g0 = panels.eval(nu, lstar);
    let g1 = panels.eval(nu + 1.0, lstar);
    let mdt = model.drift() * t;
    Ok(RiskPoint {
        pstar,
        lstar,
        lambda_star: -(mdt - lstar).exp_m1(),
        estar: 1.0 - mdt.exp() * g1 / g0,
        method: Mode::Quadrature,
    })
}
