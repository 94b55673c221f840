//! GARCH(1,1) residual bootstrap.
//!
//! ```text
//! Y_t       = C + sigma_t z_t
//! sigma_t^2 = K + G sigma_{t-1}^2 + A (Y_{t-1} - C)^2
//! ```
//!
//! Innovations `z_t` are extracted from the data, resampled with replacement
//! and pushed back through the recursion, so replicas keep the volatility
//! clustering of the original series.

use std::io::Write;

use nalgebra::Matrix4;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::nelder_mead;
use crate::error::{Result, RiskError};
use crate::simulate::stream_rng;
use crate::timeseries::{quantile_sorted, sample_variance, sort_ascending, ReturnSeries};

/// Shortest series accepted by [`fit_garch`].
pub const MIN_GARCH_LENGTH: usize = 250;
/// Smallest number of replicas accepted by [`bootstrap_ci`].
pub const MIN_REPLICAS: usize = 100;
/// Largest tolerated fraction of failed replicas.
pub const MAX_FAILURE_RATE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    /// Mean return per interval.
    pub c: f64,
    /// Variance intercept.
    pub k: f64,
    /// Variance persistence.
    pub g: f64,
    /// Innovation load.
    pub a: f64,
}

impl GarchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.g >= 0.0 && self.a >= 0.0 && self.g + self.a < 1.0)
            || !self.c.is_finite()
        {
            return Err(RiskError::InvalidParameter(format!(
                "GARCH parameters must satisfy K > 0, G, A >= 0, G + A < 1: {self:?}"
            )));
        }
        Ok(())
    }

    pub fn unconditional_variance(&self) -> f64 {
        self.k / (1.0 - self.g - self.a)
    }

    fn next_variance(&self, var: f64, y: f64) -> f64 {
        let e = y - self.c;
        self.k + self.g * var + self.a * e * e
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchFit {
    pub params: GarchParams,
    /// Standard errors of `(C, K, G, A)`; NaN where the Hessian gives none.
    pub std_err: [f64; 4],
    pub log_likelihood: f64,
    pub warnings: Vec<String>,
}

/// 95% point of chi-square with two degrees of freedom.
const HOMOSKEDASTIC_LR_CRITICAL: f64 = 5.991;

/// Gaussian log-likelihood (up to the `2 pi` constant) with `sigma_1^2 = var0`.
fn log_likelihood_of(p: &GarchParams, y: &[f64], var0: f64) -> f64 {
    let mut var = var0;
    let mut ll = 0.0;
    for (t, &v) in y.iter().enumerate() {
        if t > 0 {
            var = p.next_variance(var, y[t - 1]);
        }
        if !(var > 0.0) {
            return f64::NEG_INFINITY;
        }
        let e = v - p.c;
        ll -= 0.5 * (var.ln() + e * e / var);
    }
    ll
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// Unconstrained coordinates: `C = m + u0 sd`, `K = var e^{u1}`,
/// `G = s w`, `A = s (1 - w)` with `s`, `w` logistic in `u2`, `u3`.
struct Transform {
    mean: f64,
    sd: f64,
    var: f64,
}

impl Transform {
    fn natural(&self, u: &[f64; 4]) -> GarchParams {
        let s = logistic(u[2]);
        let w = logistic(u[3]);
        GarchParams {
            c: self.mean + u[0] * self.sd,
            k: self.var * u[1].exp(),
            g: s * w,
            a: s * (1.0 - w),
        }
    }

    fn unconstrained(&self, persistence: f64, share: f64) -> [f64; 4] {
        [0.0, (1.0 - persistence).ln(), logit(persistence), logit(share)]
    }
}

/// Gaussian quasi-maximum likelihood with `sigma_1^2` the sample variance.
pub fn fit_garch(returns: &ReturnSeries) -> Result<GarchFit> {
    let y = returns.to_log();
    if y.len() < MIN_GARCH_LENGTH {
        return Err(RiskError::InsufficientData(format!(
            "GARCH fit needs at least {MIN_GARCH_LENGTH} returns, got {}",
            y.len()
        )));
    }
    let var = sample_variance(&y);
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    if !(var > 1e-20 * mean * mean) {
        return Err(RiskError::Degenerate("constant returns: zero variance".into()));
    }
    let tr = Transform {
        mean,
        sd: var.sqrt(),
        var,
    };
    let starts = [(0.05, 0.5), (0.5, 0.8), (0.9, 0.9), (0.97, 0.93)];
    let runs: Vec<_> = starts
        .par_iter()
        .map(|&(s, w)| {
            let f = |u: &[f64; 4]| {
                let v = -log_likelihood_of(&tr.natural(u), &y, var);
                if v.is_finite() {
                    v
                } else {
                    f64::INFINITY
                }
            };
            let r = nelder_mead(f, tr.unconstrained(s, w), 0.5, 1e-13, 6000);
            let r2 = nelder_mead(f, r.x, 0.1, 1e-13, 6000);
            if r2.value <= r.value {
                r2
            } else {
                r
            }
        })
        .collect();
    let best = runs
        .iter()
        .filter(|r| r.value.is_finite())
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| RiskError::NoConvergence("GARCH likelihood non-finite at every start".into()))?;
    let mut params = tr.natural(&best.x);
    let mut log_likelihood = -best.value;
    // With A = 0 the persistence is not identified (K + G var0 = var0 along a
    // whole ridge), so keep the constant-variance fit unless the likelihood
    // ratio rejects it
    let flat = GarchParams {
        c: mean,
        k: var * (n - 1.0) / n,
        g: 0.0,
        a: 0.0,
    };
    let flat_ll = log_likelihood_of(&flat, &y, var);
    if 2.0 * (log_likelihood - flat_ll) < HOMOSKEDASTIC_LR_CRITICAL {
        let std_err = [(flat.k / n).sqrt(), flat.k * (2.0 / n).sqrt(), f64::NAN, f64::NAN];
        return Ok(GarchFit {
            params: flat,
            std_err,
            log_likelihood: flat_ll,
            warnings: vec!["no volatility clustering detected; constant-variance fit kept".into()],
        });
    }
    if flat_ll > log_likelihood {
        params = flat;
        log_likelihood = flat_ll;
    }
    let mut warnings = Vec::new();
    if params.g + params.a > 0.999 {
        warnings.push(format!(
            "G + A = {:.5} is at the stationarity boundary",
            params.g + params.a
        ));
    }
    let std_err = garch_errors(&params, &y, var);
    Ok(GarchFit {
        params,
        std_err,
        log_likelihood,
        warnings,
    })
}

/// Inverse of the central-difference Hessian of the negative log-likelihood.
fn garch_errors(p: &GarchParams, y: &[f64], var0: f64) -> [f64; 4] {
    let x = [p.c, p.k, p.g, p.a];
    let h: Vec<f64> = x
        .iter()
        .map(|v| 1e-4 * v.abs().max(1e-3 * var0.sqrt()))
        .collect();
    let f = |x: &[f64; 4]| {
        -log_likelihood_of(
            &GarchParams {
                c: x[0],
                k: x[1],
                g: x[2],
                a: x[3],
            },
            y,
            var0,
        )
    };
    let f0 = f(&x);
    let mut hess = Matrix4::<f64>::zeros();
    for i in 0..4 {
        for j in i..4 {
            let shift = |si: f64, sj: f64| {
                let mut z = x;
                z[i] += si * h[i];
                z[j] += sj * h[j];
                f(&z)
            };
            let v = if i == j {
                (shift(1.0, 0.0) - 2.0 * f0 + shift(-1.0, 0.0)) / (h[i] * h[i])
            } else {
                (shift(1.0, 1.0) - shift(1.0, -1.0) - shift(-1.0, 1.0) + shift(-1.0, -1.0))
                    / (4.0 * h[i] * h[j])
            };
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    match hess.try_inverse() {
        Some(cov) => std::array::from_fn(|i| {
            let v = cov[(i, i)];
            if v > 0.0 {
                v.sqrt()
            } else {
                f64::NAN
            }
        }),
        None => [f64::NAN; 4],
    }
}

/// Conditional variances and standardized residuals `z_t = (Y_t - C) / sigma_t`.
pub fn extract_innovations(returns: &ReturnSeries, params: &GarchParams) -> Result<Vec<f64>> {
    params.validate()?;
    let y = returns.to_log();
    if y.is_empty() {
        return Err(RiskError::EmptyInput);
    }
    let var0 = sample_variance(&y);
    if !(var0 > 0.0) {
        return Err(RiskError::Degenerate(
            "constant returns: starting variance is zero".into(),
        ));
    }
    let mut var = var0;
    let mut z = Vec::with_capacity(y.len());
    for t in 0..y.len() {
        if t > 0 {
            var = params.next_variance(var, y[t - 1]);
        }
        if !(var > 0.0) {
            return Err(RiskError::Numerical(format!("GARCH variance vanished at t = {t}")));
        }
        z.push((y[t] - params.c) / var.sqrt());
    }
    Ok(z)
}

/// Runs the recursion forward from `var0` with the given innovations.
pub fn resimulate(params: &GarchParams, z: &[f64], var0: f64) -> Vec<f64> {
    let mut var = var0;
    let mut y: Vec<f64> = Vec::with_capacity(z.len());
    for (t, zt) in z.iter().enumerate() {
        if t > 0 {
            var = params.next_variance(var, y[t - 1]);
        }
        y.push(params.c + var.sqrt() * zt);
    }
    y
}

/// A replica of `length` log returns with innovations drawn with replacement,
/// started at the unconditional variance.
pub fn resample_series(
    params: &GarchParams,
    innovations: &[f64],
    length: usize,
    dt: f64,
    seed: u64,
) -> Result<ReturnSeries> {
    params.validate()?;
    if innovations.is_empty() {
        return Err(RiskError::EmptyInput);
    }
    let mut rng = stream_rng(seed, 0);
    let z: Vec<f64> = (0..length)
        .map(|_| innovations[rng.gen_range(0..innovations.len())])
        .collect();
    let y = resimulate(params, &z, params.unconditional_variance());
    ReturnSeries::from_log_returns(y, dt)
}

/// Fitted GARCH model plus innovations: everything needed to draw replicas.
#[derive(Debug, Clone)]
pub struct GarchBootstrap {
    pub fit: GarchFit,
    pub innovations: Vec<f64>,
    pub length: usize,
    pub dt: f64,
}

impl GarchBootstrap {
    pub fn from_returns(returns: &ReturnSeries) -> Result<Self> {
        let fit = fit_garch(returns)?;
        let innovations = extract_innovations(returns, &fit.params)?;
        Ok(Self {
            fit,
            innovations,
            length: returns.len(),
            dt: returns.dt,
        })
    }

    /// Replica `i`; its generator depends only on `(seed, i)`.
    pub fn replica(&self, seed: u64, i: usize) -> Result<ReturnSeries> {
        let mut rng = stream_rng(seed, i as u64);
        let z: Vec<f64> = (0..self.length)
            .map(|_| self.innovations[rng.gen_range(0..self.innovations.len())])
            .collect();
        let p = &self.fit.params;
        ReturnSeries::from_log_returns(resimulate(p, &z, p.unconditional_variance()), self.dt)
    }
}

/// Replica estimates of one statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapDistribution {
    pub label: String,
    /// `(replica index, value)` in index order.
    pub replicas: Vec<(usize, f64)>,
    pub failed: usize,
}

impl BootstrapDistribution {
    pub fn total(&self) -> usize {
        self.replicas.len() + self.failed
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "replica_index,value")?;
        for (i, v) in &self.replicas {
            writeln!(w, "{i},{v:.12e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub alpha: f64,
    pub distribution: BootstrapDistribution,
}

fn check_bootstrap_args(m_b: usize, alpha: f64) -> Result<()> {
    if m_b < MIN_REPLICAS {
        return Err(RiskError::InvalidParameter(format!(
            "at least {MIN_REPLICAS} replicas are required, got {m_b}"
        )));
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(RiskError::InvalidParameter(format!(
            "alpha must lie in (0, 0.5), got {alpha}"
        )));
    }
    Ok(())
}

/// Percentile intervals `[q_alpha, q_{1-alpha}]` for several statistics
/// computed together on each replica. A replica whose estimator fails is
/// dropped from every statistic.
pub fn bootstrap_many<F>(
    boot: &GarchBootstrap,
    labels: &[String],
    estimator: F,
    m_b: usize,
    alpha: f64,
    seed: u64,
) -> Result<Vec<ConfidenceInterval>>
where
    F: Fn(&ReturnSeries) -> Result<Vec<f64>> + Sync,
{
    check_bootstrap_args(m_b, alpha)?;
    let outcomes: Vec<Result<Vec<f64>>> = (0..m_b)
        .into_par_iter()
        .map(|i| {
            let r = boot.replica(seed, i)?;
            let v = estimator(&r)?;
            if v.len() != labels.len() || v.iter().any(|x| !x.is_finite()) {
                return Err(RiskError::Numerical(format!(
                    "replica {i}: estimator returned {} values, expected {} finite",
                    v.len(),
                    labels.len()
                )));
            }
            Ok(v)
        })
        .collect();
    let mut failed = 0;
    let mut ok: Vec<(usize, Vec<f64>)> = Vec::with_capacity(m_b);
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(v) => ok.push((i, v)),
            Err(e) => {
                log::warn!("replica {i} dropped: {e}");
                failed += 1;
            }
        }
    }
    if failed as f64 > MAX_FAILURE_RATE * m_b as f64 || ok.is_empty() {
        return Err(RiskError::TooManyFailures {
            failed,
            total: m_b,
        });
    }
    Ok(labels
        .iter()
        .enumerate()
        .map(|(s, label)| {
            let replicas: Vec<(usize, f64)> = ok.iter().map(|(i, v)| (*i, v[s])).collect();
            let sorted = sort_ascending(&replicas.iter().map(|r| r.1).collect::<Vec<_>>());
            ConfidenceInterval {
                lower: quantile_sorted(&sorted, alpha),
                upper: quantile_sorted(&sorted, 1.0 - alpha),
                alpha,
                distribution: BootstrapDistribution {
                    label: label.clone(),
                    replicas,
                    failed,
                },
            }
        })
        .collect())
}

/// Percentile interval of a single statistic.
pub fn bootstrap_ci<F>(
    boot: &GarchBootstrap,
    label: &str,
    estimator: F,
    m_b: usize,
    alpha: f64,
    seed: u64,
) -> Result<ConfidenceInterval>
where
    F: Fn(&ReturnSeries) -> Result<f64> + Sync,
{
    let mut v = bootstrap_many(
        boot,
        &[label.to_string()],
        |r| estimator(r).map(|x| vec![x]),
        m_b,
        alpha,
        seed,
    )?;
    Ok(v.remove(0))
}

/// GARCH path with Gaussian innovations, started at the unconditional variance.
pub fn simulate_garch(params: &GarchParams, n: usize, dt: f64, seed: u64) -> Result<ReturnSeries> {
    params.validate()?;
    let mut rng = stream_rng(seed, 0);
    let z: Vec<f64> = (0..n)
        .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
        .collect();
    ReturnSeries::from_log_returns(resimulate(params, &z, params.unconditional_variance()), dt)
}
