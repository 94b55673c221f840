//! Calibration of the TLD and Heston laws from the time scaling of the
//! empirical cumulants.

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RiskError};
use crate::models::{AnyModel, EcfModel, GaussianModel, HestonModel, HestonParams, TldModel, TldParams};
use crate::timeseries::{
    aggregate, default_bandwidth, empirical_cumulants, zero_return_density, CumulantEstimates,
    ReturnKind, ReturnSeries,
};

/// Horizons used by the scaling fits, in base intervals.
pub const DEFAULT_J_MAX: usize = 10;

/// Result of a weighted straight-line fit `y = a + b x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_err: f64,
    pub intercept_err: f64,
    pub chi2: f64,
    pub dof: usize,
}

/// Minimizes `sum ((y - a - b x) / e)^2` through the normal equations.
pub fn weighted_linear_fit(x: &[f64], y: &[f64], e: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if y.len() != n || e.len() != n {
        return Err(RiskError::InvalidInput("fit arrays differ in length".into()));
    }
    if n < 2 {
        return Err(RiskError::InsufficientData(format!(
            "a line needs at least two points, got {n}"
        )));
    }
    if e.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(RiskError::InvalidInput("fit errors must be positive".into()));
    }
    if n == 2 {
        log::warn!("straight-line fit through two points has no residual degrees of freedom");
    }
    let (mut s, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let w = 1.0 / (e[i] * e[i]);
        s += w;
        sx += w * x[i];
        sy += w * y[i];
        sxx += w * x[i] * x[i];
        sxy += w * x[i] * y[i];
    }
    let det = s * sxx - sx * sx;
    if !(det > 1e-12 * s * sxx) {
        return Err(RiskError::Degenerate("abscissae have zero spread".into()));
    }
    let slope = (s * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let chi2 = (0..n)
        .map(|i| ((y[i] - intercept - slope * x[i]) / e[i]).powi(2))
        .sum();
    Ok(LinearFit {
        slope,
        intercept,
        slope_err: (s / det).sqrt(),
        intercept_err: (sxx / det).sqrt(),
        chi2,
        dof: n - 2,
    })
}

/// Weighted least squares `y = b x` through the origin: `(b, err)`.
fn fit_through_origin(x: &[f64], y: &[f64], e: &[f64]) -> (f64, f64) {
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for i in 0..x.len() {
        let w = 1.0 / (e[i] * e[i]);
        sxx += w * x[i] * x[i];
        sxy += w * x[i] * y[i];
    }
    (sxy / sxx, 1.0 / sxx.sqrt())
}

/// Weighted mean of `y - slope x` with the slope held fixed: `(a, err)`.
fn fixed_slope_intercept(x: &[f64], y: &[f64], e: &[f64], slope: f64) -> (f64, f64) {
    let (mut s, mut sy) = (0.0, 0.0);
    for i in 0..x.len() {
        let w = 1.0 / (e[i] * e[i]);
        s += w;
        sy += w * (y[i] - slope * x[i]);
    }
    (sy / s, 1.0 / s.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    LogLog,
    Linear,
}

/// One observable against horizon, as used by a scaling fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSeries {
    pub name: String,
    pub transform: Transform,
    pub j: Vec<usize>,
    /// Horizons in years.
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub e: Vec<f64>,
}

impl ScalingSeries {
    pub fn new(
        name: &str,
        transform: Transform,
        j: Vec<usize>,
        t: Vec<f64>,
        y: Vec<f64>,
        e: Vec<f64>,
    ) -> Result<Self> {
        let n = j.len();
        if t.len() != n || y.len() != n || e.len() != n {
            return Err(RiskError::InvalidInput(format!(
                "scaling series '{name}' has misaligned arrays"
            )));
        }
        if j.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RiskError::InvalidInput(format!(
                "scaling series '{name}': horizons must increase"
            )));
        }
        if e.iter().any(|v| !(*v > 0.0)) {
            return Err(RiskError::InvalidInput(format!(
                "scaling series '{name}': errors must be positive"
            )));
        }
        Ok(Self {
            name: name.to_string(),
            transform,
            j,
            t,
            y,
            e,
        })
    }

    /// Abscissae and ordinates in the fit's coordinates, with transformed errors.
    fn coordinates(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        match self.transform {
            Transform::Linear => (self.t.clone(), self.y.clone(), self.e.clone()),
            Transform::LogLog => (
                self.t.iter().map(|v| v.ln()).collect(),
                self.y.iter().map(|v| v.abs().ln()).collect(),
                self.y.iter().zip(&self.e).map(|(y, e)| e / y.abs()).collect(),
            ),
        }
    }
}

/// A fitted value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

impl Estimate {
    fn new(value: f64, std_err: f64) -> Self {
        Self { value, std_err }
    }
}

/// Model-minus-data at one horizon and cumulant order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub j: usize,
    pub order: usize,
    pub empirical: f64,
    pub model: f64,
    pub eps: f64,
}

impl Residual {
    pub fn pull(&self) -> f64 {
        (self.model - self.empirical) / self.eps
    }
}

/// One simplex run of the Heston fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StartRecord {
    pub index: usize,
    /// `(alpha, k, rho)` at the start.
    pub initial: [f64; 3],
    pub initial_objective: f64,
    pub fitted: [f64; 3],
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub model: AnyModel,
    /// Named parameter estimates in model order.
    pub estimates: Vec<(String, Estimate)>,
    pub objective: f64,
    pub residuals: Vec<Residual>,
    pub starts: Vec<StartRecord>,
    pub scaling: Vec<ScalingSeries>,
    pub warnings: Vec<String>,
}

impl CalibrationResult {
    pub fn estimate(&self, name: &str) -> Option<Estimate> {
        self.estimates
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| *e)
    }
}

fn additive(returns: &ReturnSeries) -> ReturnSeries {
    match returns.kind {
        ReturnKind::CenteredLog => returns.clone(),
        _ => returns.to_centered_log(),
    }
}

/// Density at zero of the `j`-aggregated returns for `j = 1..=j_max`, with the
/// bin half-width growing as `sqrt(j)`.
pub fn zero_density_scaling(returns: &ReturnSeries, j_max: usize) -> Result<ScalingSeries> {
    let x = additive(returns);
    let h1 = default_bandwidth(&x);
    let mut js = Vec::new();
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    let mut es = Vec::new();
    for j in 1..=j_max {
        let agg = aggregate(&x, j)?;
        let d = zero_return_density(&agg, h1 * (j as f64).sqrt())?;
        if d.degenerate {
            return Err(RiskError::Degenerate(format!(
                "every return at horizon {j} falls in the zero bin"
            )));
        }
        js.push(j);
        ts.push(agg.dt);
        ys.push(d.value);
        es.push(d.std_err);
    }
    ScalingSeries::new("p0", Transform::LogLog, js, ts, ys, es)
}

/// Tail exponent from `ln p_t(0) = c - ln(t) / gamma`.
pub fn fit_gamma(returns: &ReturnSeries, j_max: usize) -> Result<Estimate> {
    let s = zero_density_scaling(returns, j_max)?;
    gamma_from_scaling(&s).map(|(g, _)| g)
}

fn gamma_from_scaling(s: &ScalingSeries) -> Result<(Estimate, Vec<String>)> {
    let (x, y, e) = s.coordinates();
    let fit = weighted_linear_fit(&x, &y, &e)?;
    if !(fit.slope < 0.0) {
        return Err(RiskError::Degenerate(format!(
            "p(0) does not decrease with horizon (slope {:.4})",
            fit.slope
        )));
    }
    let mut gamma = -1.0 / fit.slope;
    let err = fit.slope_err / (fit.slope * fit.slope);
    let mut warnings = Vec::new();
    if gamma > 2.0 {
        let w = format!("gamma estimate {gamma:.4} exceeds 2; clamped");
        log::warn!("{w}");
        warnings.push(w);
        gamma = 2.0;
    }
    Ok((Estimate::new(gamma, err), warnings))
}

fn cumulant_table(returns: &ReturnSeries, j_max: usize) -> Result<Vec<CumulantEstimates>> {
    empirical_cumulants(&additive(returns), j_max)
}

fn cumulant_scaling(cum: &[CumulantEstimates], order: usize) -> Result<ScalingSeries> {
    ScalingSeries::new(
        &format!("k{}", order + 1),
        Transform::Linear,
        cum.iter().map(|c| c.horizon_index).collect(),
        cum.iter().map(|c| c.horizon).collect(),
        cum.iter().map(|c| c.k[order]).collect(),
        cum.iter().map(|c| c.eps[order]).collect(),
    )
}

/// Standardized cumulant series with delta-method errors; horizons where the
/// value is not strictly positive (kurtosis) or non-zero (skewness) are dropped.
fn shape_scaling(cum: &[CumulantEstimates], skew: bool) -> Result<ScalingSeries> {
    let (mut js, mut ts, mut ys, mut es) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for c in cum {
        let [_, k2, k3, k4] = c.k;
        let [_, e2, e3, e4] = c.eps;
        let (v, e) = if skew {
            let v = k3 / k2.powf(1.5);
            let e = ((e3 / k2.powf(1.5)).powi(2) + (1.5 * k3 * e2 / k2.powf(2.5)).powi(2)).sqrt();
            (v, e)
        } else {
            let v = k4 / (k2 * k2);
            let e = ((e4 / (k2 * k2)).powi(2) + (2.0 * k4 * e2 / (k2 * k2 * k2)).powi(2)).sqrt();
            (v, e)
        };
        let keep = if skew { v != 0.0 } else { v > 0.0 };
        if keep && e > 0.0 {
            js.push(c.horizon_index);
            ts.push(c.horizon);
            ys.push(v);
            es.push(e);
        }
    }
    let name = if skew { "skewness" } else { "kurtosis" };
    if js.len() < 2 {
        return Err(RiskError::Degenerate(format!(
            "{name} is not usable at enough horizons for a scaling fit"
        )));
    }
    ScalingSeries::new(name, Transform::LogLog, js, ts, ys, es)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Log-normal benchmark: `Sigma^2` from the growth of the variance with horizon.
pub fn fit_gaussian(returns: &ReturnSeries, j_max: usize) -> Result<CalibrationResult> {
    let cum = cumulant_table(returns, j_max)?;
    let var = cumulant_scaling(&cum, 1)?;
    let (s2, s2_err) = fit_through_origin(&var.t, &var.y, &var.e);
    if !(s2 > 0.0) {
        return Err(RiskError::Degenerate("variance does not grow with horizon".into()));
    }
    let model = GaussianModel::new(s2, returns.mu)?;
    let residuals = residuals_of(&model, &cum);
    let objective = residuals.iter().map(|r| r.pull().powi(2)).sum();
    Ok(CalibrationResult {
        model: model.into(),
        estimates: vec![("sigma2".into(), Estimate::new(s2, s2_err))],
        objective,
        residuals,
        starts: Vec::new(),
        scaling: vec![var],
        warnings: Vec::new(),
    })
}

/// Step-by-step TLD fit: `gamma` from `p(0)`, `Sigma^2` from the variance,
/// `lambda` from the kurtosis and `beta` from the skewness scaling.
pub fn fit_tld(returns: &ReturnSeries, j_max: usize) -> Result<CalibrationResult> {
    let p0 = zero_density_scaling(returns, j_max)?;
    let (gamma, mut warnings) = gamma_from_scaling(&p0)?;
    let g = gamma.value;
    let cum = cumulant_table(returns, j_max)?;

    let var = cumulant_scaling(&cum, 1)?;
    let (s2, s2_err) = fit_through_origin(&var.t, &var.y, &var.e);
    if !(s2 > 0.0) {
        return Err(RiskError::Degenerate("variance does not grow with horizon".into()));
    }

    let kurt = shape_scaling(&cum, false)?;
    let (x, y, e) = kurt.coordinates();
    let (c_k, c_k_err) = fixed_slope_intercept(&x, &y, &e, -1.0);
    // kappa t = (2-g)(3-g) / (lambda^2 S2)
    if g >= 2.0 || c_k.exp() < 2.0 * c_k_err * c_k.exp() {
        return Err(RiskError::Degenerate(format!(
            "lambda unidentifiable: gamma = {g:.3}, kurtosis intercept {:.3e} +/- {:.1}%",
            c_k.exp(),
            100.0 * c_k_err
        )));
    }
    let shape = (2.0 - g) * (3.0 - g);
    let lambda = (shape / (s2 * c_k.exp())).sqrt();
    let dshape = 1.0 / (2.0 - g) + 1.0 / (3.0 - g);
    let lambda_err = 0.5
        * lambda
        * ((dshape * gamma.std_err).powi(2) + (s2_err / s2).powi(2) + c_k_err.powi(2)).sqrt();

    let skew = shape_scaling(&cum, true)?;
    let (x, y, e) = skew.coordinates();
    let (c_z, c_z_err) = fixed_slope_intercept(&x, &y, &e, -0.5);
    let sign = median(skew.y.clone()).signum();
    let mut beta = sign * c_z.exp() * lambda * s2.sqrt() / (2.0 - g);
    let beta_err = beta.abs()
        * (c_z_err.powi(2)
            + (lambda_err / lambda).powi(2)
            + (0.5 * s2_err / s2).powi(2)
            + (gamma.std_err / (2.0 - g)).powi(2))
        .sqrt();
    if beta.abs() > 1.0 {
        let w = format!("beta estimate {beta:.3} outside [-1, 1]; clamped");
        log::warn!("{w}");
        warnings.push(w);
        beta = beta.clamp(-1.0, 1.0);
    }

    let params = TldParams {
        sigma2: s2,
        gamma: g,
        lambda,
        beta,
    };
    let model = TldModel::new(params, returns.mu)?;
    if !params.has_finite_es() {
        warnings.push(format!("lambda = {lambda:.3} <= 1: expected shortfall is infinite"));
    }
    let residuals = residuals_of(&model, &cum);
    let objective = residuals.iter().map(|r| r.pull().powi(2)).sum();
    Ok(CalibrationResult {
        model: model.into(),
        estimates: vec![
            ("sigma2".into(), Estimate::new(s2, s2_err)),
            ("gamma".into(), gamma),
            ("lambda".into(), Estimate::new(lambda, lambda_err)),
            ("beta".into(), Estimate::new(beta, beta_err)),
        ],
        objective,
        residuals,
        starts: Vec::new(),
        scaling: vec![p0, var, kurt, skew],
        warnings,
    })
}

fn residuals_of<M: EcfModel>(model: &M, cum: &[CumulantEstimates]) -> Vec<Residual> {
    let mut out = Vec::with_capacity(3 * cum.len());
    for c in cum {
        let m = model.cumulants(c.horizon).as_array();
        for order in 1..4 {
            out.push(Residual {
                j: c.horizon_index,
                order: order + 1,
                empirical: c.k[order],
                model: m[order],
                eps: c.eps[order],
            });
        }
    }
    out
}

/// Deterministic multi-start points `(alpha, k, rho)`.
pub const HESTON_STARTS: [[f64; 3]; 8] = [
    [3.0, 1.0, -0.5],
    [10.0, 3.0, 0.0],
    [30.0, 3.0, -0.5],
    [100.0, 10.0, 0.0],
    [300.0, 10.0, -0.5],
    [1000.0, 30.0, 0.0],
    [100.0, 3.0, 0.5],
    [1000.0, 100.0, -0.5],
];

fn to_natural(u: &[f64; 3]) -> [f64; 3] {
    [u[0].exp(), u[1].exp(), u[2].tanh()]
}

fn to_unconstrained(p: &[f64; 3]) -> [f64; 3] {
    [p[0].ln(), p[1].ln(), p[2].atanh()]
}

struct HestonObjective<'a> {
    sigma2: f64,
    mu: f64,
    cum: &'a [CumulantEstimates],
}

impl HestonObjective<'_> {
    fn model(&self, p: &[f64; 3]) -> Option<HestonModel> {
        HestonModel::new_quiet(HestonParams {
            sigma2: self.sigma2,
            alpha: p[0],
            k: p[1],
            rho: p[2],
            mu: self.mu,
        })
        .ok()
    }

    fn residuals(&self, p: &[f64; 3]) -> Option<Vec<f64>> {
        let m = self.model(p)?;
        let mut r = Vec::with_capacity(3 * self.cum.len());
        for c in self.cum {
            let k = m.cumulants(c.horizon).as_array();
            for order in 1..4 {
                r.push((c.k[order] - k[order]) / c.eps[order]);
            }
        }
        r.iter().all(|v| v.is_finite()).then_some(r)
    }

    fn value(&self, p: &[f64; 3]) -> f64 {
        self.residuals(p)
            .map(|r| r.iter().map(|v| v * v).sum())
            .unwrap_or(f64::INFINITY)
    }
}

/// Outcome of [`nelder_mead`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexResult<const D: usize> {
    pub x: [f64; D],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Downhill simplex with standard coefficients; stops when the spread of the
/// simplex values falls below `ftol` (absolute plus relative).
pub fn nelder_mead<const D: usize, F: Fn(&[f64; D]) -> f64>(
    f: F,
    start: [f64; D],
    step: f64,
    ftol: f64,
    max_iter: usize,
) -> SimplexResult<D> {
    let mut pts: Vec<[f64; D]> = vec![start; D + 1];
    for (i, p) in pts.iter_mut().enumerate().skip(1) {
        p[i - 1] += step;
    }
    let mut vals: Vec<f64> = pts.iter().map(&f).collect();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let mut idx: Vec<usize> = (0..=D).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.iter().map(|&i| pts[i]).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        let (best, worst) = (vals[0], vals[D]);
        if best.is_finite() && (worst - best).abs() <= ftol * (1.0 + best.abs()) {
            converged = true;
            break;
        }
        let mut centroid = [0.0; D];
        for p in &pts[..D] {
            for k in 0..D {
                centroid[k] += p[k] / D as f64;
            }
        }
        let along = |c: f64| {
            let mut q = [0.0; D];
            for k in 0..D {
                q[k] = centroid[k] + c * (pts[D][k] - centroid[k]);
            }
            q
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                pts[D] = xe;
                vals[D] = fe;
            } else {
                pts[D] = xr;
                vals[D] = fr;
            }
        } else if fr < vals[D - 1] {
            pts[D] = xr;
            vals[D] = fr;
        } else {
            let (xc, fc) = if fr < vals[D] {
                let xc = along(-0.5);
                (xc, f(&xc))
            } else {
                let xc = along(0.5);
                (xc, f(&xc))
            };
            if fc < vals[D].min(fr) {
                pts[D] = xc;
                vals[D] = fc;
            } else {
                let b = pts[0];
                for i in 1..=D {
                    for k in 0..D {
                        pts[i][k] = b[k] + 0.5 * (pts[i][k] - b[k]);
                    }
                    vals[i] = f(&pts[i]);
                }
            }
        }
    }
    let (i, &value) = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    SimplexResult {
        x: pts[i],
        value,
        iterations,
        converged,
    }
}

/// Cumulant-matching Heston fit: `sigma2` from the drift of `k1`, then
/// `(alpha, k, rho)` minimizing the error-weighted misfit of `k2..k4`.
pub fn fit_heston(returns: &ReturnSeries, j_max: usize) -> Result<CalibrationResult> {
    let cum = cumulant_table(returns, j_max)?;
    let mean = cumulant_scaling(&cum, 0)?;
    let (slope, slope_err) = fit_through_origin(&mean.t, &mean.y, &mean.e);
    let sigma2 = -2.0 * slope;
    if !(sigma2 > 0.0) {
        return Err(RiskError::Degenerate(format!(
            "first cumulant does not drift downwards (slope {slope:.3e}); sigma2 not identifiable"
        )));
    }
    let obj = HestonObjective {
        sigma2,
        mu: returns.mu,
        cum: &cum,
    };

    let runs: Vec<StartRecord> = HESTON_STARTS
        .par_iter()
        .enumerate()
        .map(|(index, init)| {
            let u0 = to_unconstrained(init);
            let f = |u: &[f64; 3]| obj.value(&to_natural(u));
            let mut r = nelder_mead(f, u0, 0.5, 1e-12, 4000);
            // restart from the optimum to escape a collapsed simplex
            let r2 = nelder_mead(f, r.x, 0.1, 1e-12, 4000);
            if r2.value <= r.value {
                r = SimplexResult {
                    iterations: r.iterations + r2.iterations,
                    ..r2
                };
            }
            StartRecord {
                index,
                initial: *init,
                initial_objective: obj.value(init),
                fitted: to_natural(&r.x),
                objective: r.value,
                iterations: r.iterations,
                converged: r.converged && r.value.is_finite(),
            }
        })
        .collect();
    for r in &runs {
        log::info!(
            "start {}: ({:.3}, {:.3}, {:.3}) -> ({:.4}, {:.4}, {:.4}) objective {:.6e}{}",
            r.index,
            r.initial[0],
            r.initial[1],
            r.initial[2],
            r.fitted[0],
            r.fitted[1],
            r.fitted[2],
            r.objective,
            if r.converged { "" } else { " (not converged)" }
        );
    }
    let best = runs
        .iter()
        .filter(|r| r.objective.is_finite())
        .min_by(|a, b| a.objective.total_cmp(&b.objective).then(a.index.cmp(&b.index)))
        .ok_or_else(|| RiskError::NoConvergence("objective non-finite at every start".into()))?;
    if !runs.iter().any(|r| r.converged) {
        return Err(RiskError::NoConvergence(
            "no Heston multi-start converged".into(),
        ));
    }

    let p = best.fitted;
    let errs = heston_errors(&obj, &p);
    let model = HestonModel::new_quiet(HestonParams {
        sigma2,
        alpha: p[0],
        k: p[1],
        rho: p[2],
        mu: returns.mu,
    })?;
    let mut warnings = Vec::new();
    if !model.params.satisfies_feller() {
        warnings.push(format!(
            "Feller condition violated: 2 alpha sigma2 - k^2 = {:.4}",
            model.params.feller_indicator()
        ));
    }
    if errs.is_none() {
        warnings.push("parameter covariance singular at the optimum".into());
    }
    let errs = errs.unwrap_or([f64::NAN; 3]);
    let residuals = residuals_of(&model, &cum);
    Ok(CalibrationResult {
        model: model.into(),
        estimates: vec![
            ("sigma2".into(), Estimate::new(sigma2, 2.0 * slope_err)),
            ("alpha".into(), Estimate::new(p[0], errs[0])),
            ("k".into(), Estimate::new(p[1], errs[1])),
            ("rho".into(), Estimate::new(p[2], errs[2])),
        ],
        objective: best.objective,
        residuals,
        starts: runs.clone(),
        scaling: (0..4)
            .map(|o| cumulant_scaling(&cum, o))
            .collect::<Result<_>>()?,
        warnings,
    })
}

/// Standard errors from `(J^T J)^{-1}` with a central-difference Jacobian of
/// the weighted residuals in the natural parameters.
fn heston_errors(obj: &HestonObjective, p: &[f64; 3]) -> Option<[f64; 3]> {
    let base = obj.residuals(p)?;
    let m = base.len();
    let mut jac = vec![[0.0; 3]; m];
    for k in 0..3 {
        let h = if k == 2 {
            1e-5 * (1.0 - p[2].abs()).max(1e-3)
        } else {
            1e-5 * p[k]
        };
        let mut up = *p;
        let mut dn = *p;
        up[k] += h;
        dn[k] -= h;
        let ru = obj.residuals(&up)?;
        let rd = obj.residuals(&dn)?;
        for i in 0..m {
            jac[i][k] = (ru[i] - rd[i]) / (2.0 * h);
        }
    }
    let mut jtj = Matrix3::<f64>::zeros();
    for row in &jac {
        let v = Vector3::new(row[0], row[1], row[2]);
        jtj += v * v.transpose();
    }
    let cov = jtj.try_inverse()?;
    let e = [cov[(0, 0)], cov[(1, 1)], cov[(2, 2)]];
    e.iter().all(|v| *v > 0.0).then(|| e.map(f64::sqrt))
}
