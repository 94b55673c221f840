//! VaR and ES from the damped Fourier integral
//!
//! ```text
//! G_nu(L, theta) = e^{-theta L} int_0^inf f(w + i nu) / (theta - i w) e^{i w L} dw
//! P*  = Re G_nu(L*, nu) / pi
//! E*  = 1 - e^{mu t} Re G_nu(L*, nu + 1) / Re G_nu(L*, nu)
//! Λ*  = 1 - exp(mu t - L*)
//! ```
//!
//! `L*` is a threshold on the centered log-return: `P* = Prob(x < -L*)`.
//! The whole curve comes from two FFTs sharing one set of ECF samples; single
//! points can instead be obtained by adaptive quadrature.

mod interp;
mod quadrature;

pub use interp::{brent, MonotoneCubic};
pub use quadrature::{i_nu, DEFAULT_TOL as QUADRATURE_TOL};

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RiskError};
use crate::models::EcfModel;
use interp::{lagrange_uniform, LAGRANGE_NODES};

/// Default FFT size.
pub const DEFAULT_POINTS: usize = 1 << 16;
/// Smallest accepted FFT size.
pub const MIN_POINTS: usize = 1 << 10;
/// Integrand bound required at the truncation frequency.
pub const DECAY_TOL: f64 = 1e-12;
/// Curves are trimmed to this range of significance levels.
pub const PSTAR_MIN: f64 = 1e-4;
pub const PSTAR_MAX: f64 = 0.5;

/// Grid span in units of the slowest exponential decay of the periodized
/// integrand; `e^-45` is far below double precision.
const SPAN_DECAYS: f64 = 45.0;
/// Shortest span accepted when the decay criterion forces a finer L* step.
const MIN_SPAN_DECAYS: f64 = 32.0;
/// Span must also cover this many standard deviations of the return.
const SPAN_SDS: f64 = 40.0;

/// Discretization of the `omega` integral and of the matching `L*` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierGrid {
    pub n_points: usize,
    pub omega_max: f64,
    /// Midpoint of the `L*` grid.
    pub l_center: f64,
}

impl FourierGrid {
    pub fn new(n_points: usize, omega_max: f64, l_center: f64) -> Result<Self> {
        if n_points < MIN_POINTS || !n_points.is_power_of_two() {
            return Err(RiskError::InvalidParameter(format!(
                "n_points must be a power of two >= {MIN_POINTS}, got {n_points}"
            )));
        }
        if !(omega_max > 0.0 && omega_max.is_finite()) || !l_center.is_finite() {
            return Err(RiskError::InvalidParameter(format!(
                "bad grid: omega_max = {omega_max}, center = {l_center}"
            )));
        }
        Ok(Self {
            n_points,
            omega_max,
            l_center,
        })
    }

    /// Grid sized from the strip, the cumulants and the decay criterion.
    pub fn auto<M: EcfModel + ?Sized>(model: &M, t: f64, nu: f64, n_points: usize) -> Result<Self> {
        check_inputs(model, t, nu)?;
        let strip = model.strip(t);
        let c = model.cumulants(t);
        let sd = c.k2.sqrt();
        let rate = nu.min(strip.nu_plus - nu);
        let n = n_points as f64;
        let span = (SPAN_DECAYS / rate).max(SPAN_SDS * sd);
        let mut omega_max = TAU * n / span;
        let w_dec = decay_frequency(model, t, nu, nu, DECAY_TOL)?;
        if w_dec > omega_max {
            omega_max = w_dec;
            let span = TAU * n / omega_max;
            if span < MIN_SPAN_DECAYS / rate || span < SPAN_SDS * sd {
                return Err(RiskError::Numerical(format!(
                    "{n_points} points cannot both resolve the ECF decay (omega = {w_dec:.3e}) \
                     and span the return law; increase n_points"
                )));
            }
        }
        Self::new(n_points, omega_max, -c.k1)
    }

    pub fn d_omega(&self) -> f64 {
        self.omega_max / self.n_points as f64
    }

    pub fn d_l(&self) -> f64 {
        TAU / self.omega_max
    }

    pub fn l_min(&self) -> f64 {
        self.l_center - 0.5 * self.n_points as f64 * self.d_l()
    }

    pub fn lstar(&self) -> Vec<f64> {
        let (l0, dl) = (self.l_min(), self.d_l());
        (0..self.n_points).map(|j| l0 + dl * j as f64).collect()
    }
}

/// Evaluation method of a risk point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fft,
    Quadrature,
}

impl FromStr for Mode {
    type Err = RiskError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fft" => Ok(Mode::Fft),
            "quadrature" | "quad" => Ok(Mode::Quadrature),
            other => Err(RiskError::InvalidParameter(format!(
                "unknown mode '{other}' (expected fft or quadrature)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskPoint {
    pub pstar: f64,
    pub lstar: f64,
    pub lambda_star: f64,
    pub estar: f64,
    pub method: Mode,
}

/// `1` when the strip allows it comfortably, otherwise half the upper bound.
pub fn nu_default<M: EcfModel + ?Sized>(model: &M, t: f64) -> Result<f64> {
    let nu_plus = model.strip(t).nu_plus;
    if !(nu_plus > 0.0) {
        return Err(RiskError::InvalidParameter(format!(
            "strip upper bound must be positive, got {nu_plus}"
        )));
    }
    Ok(if nu_plus > 1.05 { 1.0 } else { 0.5 * nu_plus })
}

pub(crate) fn check_inputs<M: EcfModel + ?Sized>(model: &M, t: f64, nu: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(RiskError::InvalidParameter(format!(
            "horizon must be positive, got {t}"
        )));
    }
    let strip = model.strip(t);
    if !(nu > 0.0 && nu < strip.nu_plus) {
        return Err(RiskError::OutsideStrip {
            phi: format!("i{nu}"),
            nu_minus: 0.0,
            nu_plus: strip.nu_plus,
        });
    }
    Ok(())
}

/// Smallest doubling frequency past which `|f(w + i nu)| / |theta - i w|`
/// stays below `thresh`, refined by bisection.
pub(crate) fn decay_frequency<M: EcfModel + ?Sized>(
    model: &M,
    t: f64,
    nu: f64,
    theta: f64,
    thresh: f64,
) -> Result<f64> {
    let bound = |w: f64| model.ecf(Complex64::new(w, nu), t).norm() / theta.hypot(w);
    let below = |w: f64| {
        let b = bound(w);
        b.is_finite() && b < thresh
    };
    let mut w = 1.0;
    while !(below(w) && below(1.5 * w) && below(2.0 * w)) {
        w *= 2.0;
        if w > 1e10 {
            return Err(RiskError::Numerical(format!(
                "ECF does not decay below {thresh:e} along Im = {nu}"
            )));
        }
    }
    let (mut lo, mut hi) = (0.5 * w, w);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `f(m dw + i nu)` for `m = 0..N`.
fn ecf_samples<M: EcfModel + ?Sized>(
    model: &M,
    t: f64,
    nu: f64,
    grid: &FourierGrid,
) -> Result<Vec<Complex64>> {
    check_inputs(model, t, nu)?;
    let tail = model.ecf(Complex64::new(grid.omega_max, nu), t).norm() / nu.hypot(grid.omega_max);
    if !(tail < DECAY_TOL) {
        return Err(RiskError::Numerical(format!(
            "integrand not decayed at omega_max = {:.4e}: bound {tail:.3e}",
            grid.omega_max
        )));
    }
    let dw = grid.d_omega();
    let samples: Vec<Complex64> = (0..grid.n_points)
        .into_par_iter()
        .map(|m| model.ecf(Complex64::new(m as f64 * dw, nu), t))
        .collect();
    if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(RiskError::Numerical("non-finite ECF sample".into()));
    }
    Ok(samples)
}

/// Trapezoid rule with half weight at `w = 0`; taking the real part makes it
/// the full-line rule, which converges geometrically.
fn re_g_from_samples(samples: &[Complex64], theta: f64, grid: &FourierGrid) -> Vec<f64> {
    let n = grid.n_points;
    let dw = grid.d_omega();
    let l0 = grid.l_min();
    // phase m dw L0 = 2 pi m (L0 / span), reduced before scaling by 2 pi
    let ratio = l0 / (n as f64 * grid.d_l());
    let mut buf: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(m, &f)| {
            let w = m as f64 * dw;
            let turns = m as f64 * ratio;
            let phase = Complex64::from_polar(1.0, TAU * (turns - turns.round()));
            let weight = if m == 0 { 0.5 } else { 1.0 };
            weight * f / Complex64::new(theta, -w) * phase
        })
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(n).process(&mut buf);
    let dl = grid.d_l();
    buf.iter()
        .enumerate()
        .map(|(j, s)| (-theta * (l0 + dl * j as f64)).exp() * dw * s.re)
        .collect()
}

/// `Re G_nu(L*, theta)` on the grid's `L*` values.
pub fn g_sweep<M: EcfModel + ?Sized>(
    model: &M,
    t: f64,
    nu: f64,
    theta: f64,
    grid: &FourierGrid,
) -> Result<Vec<f64>> {
    if !(theta > 0.0) {
        return Err(RiskError::InvalidParameter(format!(
            "theta must be positive, got {theta}"
        )));
    }
    let samples = ecf_samples(model, t, nu, grid)?;
    Ok(re_g_from_samples(&samples, theta, grid))
}

/// Full-grid data behind a trimmed curve, kept for interpolation.
#[derive(Debug, Clone)]
struct Sweep {
    l_min: f64,
    dl: f64,
    g_nu: Vec<f64>,
    g_nu1: Vec<f64>,
    /// Trimmed `L*` and `P*` plus one neighbouring node on each side, so that
    /// the closed range `[1e-4, 0.5]` is bracketed.
    ext_l: Vec<f64>,
    ext_p: Vec<f64>,
    /// `L*` as a monotone function of `ln P*` over the extended range.
    inverse: MonotoneCubic,
}

/// VaR/ES as functions of `L*` on the sub-grid with `P*` in `[1e-4, 0.5]`.
#[derive(Debug, Clone, Serialize)]
pub struct RiskCurve {
    pub horizon: f64,
    pub nu: f64,
    pub mu: f64,
    pub lstar: Vec<f64>,
    pub pstar: Vec<f64>,
    pub lambda_star: Vec<f64>,
    pub estar: Vec<f64>,
    #[serde(skip)]
    sweep: Sweep,
}

/// Both FFT sweeps and the trimmed curve.
pub fn var_es_curve<M: EcfModel + ?Sized>(
    model: &M,
    t: f64,
    nu: f64,
    grid: &FourierGrid,
) -> Result<RiskCurve> {
    let samples = ecf_samples(model, t, nu, grid)?;
    let g_nu = re_g_from_samples(&samples, nu, grid);
    let g_nu1 = re_g_from_samples(&samples, nu + 1.0, grid);
    let (l_min, dl) = (grid.l_min(), grid.d_l());
    let p: Vec<f64> = g_nu.iter().map(|g| g / PI).collect();

    // walk out from the grid centre; the far left edge is amplified noise
    let pad = LAGRANGE_NODES;
    let n = p.len();
    let mut lo = n / 2;
    while lo + 1 < n && p[lo] > PSTAR_MAX {
        lo += 1;
    }
    while lo > pad && p[lo - 1] <= PSTAR_MAX && p[lo - 1] > p[lo] {
        lo -= 1;
    }
    let mut hi = lo;
    while hi + 1 < n - pad && p[hi + 1] >= PSTAR_MIN && p[hi + 1] < p[hi] {
        hi += 1;
    }
    if hi < lo + 4 || p[lo] > PSTAR_MAX || p[lo] < PSTAR_MIN {
        return Err(RiskError::Numerical(
            "trimmed risk curve is empty; the grid does not resolve the return law".into(),
        ));
    }
    if hi + 1 < n - pad && p[hi + 1] >= PSTAR_MIN {
        log::warn!(
            "P* stops decreasing at {:.3e}; curve truncated there",
            p[hi]
        );
    }

    let mdt = model.drift() * t;
    let range = lo..=hi;
    let lstar: Vec<f64> = range.clone().map(|j| l_min + dl * j as f64).collect();
    let pstar: Vec<f64> = p[range.clone()].to_vec();
    let lambda_star = lstar.iter().map(|&l| -(mdt - l).exp_m1()).collect();
    let estar = range
        .clone()
        .map(|j| 1.0 - mdt.exp() * g_nu1[j] / g_nu[j])
        .collect();
    let mut ext = lo..=hi;
    if p[lo - 1] > p[lo] {
        ext = lo - 1..=hi;
    }
    if p[hi + 1] < p[hi] && p[hi + 1] > 0.0 {
        ext = *ext.start()..=hi + 1;
    }
    let ext_l: Vec<f64> = ext.clone().map(|j| l_min + dl * j as f64).collect();
    let ext_p: Vec<f64> = p[ext].to_vec();
    let inverse = MonotoneCubic::new(
        ext_p.iter().rev().map(|v| v.ln()).collect(),
        ext_l.iter().rev().copied().collect(),
    )?;
    Ok(RiskCurve {
        horizon: t,
        nu,
        mu: model.drift(),
        lstar,
        pstar,
        lambda_star,
        estar,
        sweep: Sweep {
            l_min,
            dl,
            g_nu,
            g_nu1,
            ext_l,
            ext_p,
            inverse,
        },
    })
}

impl RiskCurve {
    /// `(min, max)` of the trimmed `P*` values.
    pub fn pstar_range(&self) -> (f64, f64) {
        (*self.pstar.last().unwrap(), self.pstar[0])
    }

    /// `(max, min)` of `P*` over the full, untrimmed grid.
    pub fn untrimmed_extremes(&self) -> (f64, f64) {
        self.sweep
            .g_nu
            .iter()
            .map(|g| g / PI)
            .fold((f64::NEG_INFINITY, f64::INFINITY), |(a, b), v| (a.max(v), b.min(v)))
    }

    fn interp(&self, values: &[f64], l: f64) -> (f64, f64) {
        lagrange_uniform(values, self.sweep.l_min, self.sweep.dl, l)
    }

    /// Risk numbers at `pstar`: monotone-cubic start on `(ln P*, L*)`, then
    /// Newton on the local degree-7 interpolant of `P*(L*)`.
    pub fn point_at(&self, pstar: f64) -> Result<RiskPoint> {
        let (ep, el) = (&self.sweep.ext_p, &self.sweep.ext_l);
        let pmin = ep.last().unwrap().max(PSTAR_MIN);
        let pmax = ep[0].min(PSTAR_MAX);
        if !(pstar >= pmin && pstar <= pmax) {
            return Err(RiskError::OutOfRange {
                pstar,
                lo: pmin,
                hi: pmax,
            });
        }
        // grid cell with P_j >= pstar >= P_{j+1}
        let k = ep.partition_point(|&v| v >= pstar);
        let (mut a, mut b) = if k == 0 {
            (el[0], el[0])
        } else if k >= ep.len() {
            let l = *el.last().unwrap();
            (l, l)
        } else {
            (el[k - 1], el[k])
        };
        let mut x = self.sweep.inverse.eval(pstar.ln()).clamp(a, b);
        let g = &self.sweep.g_nu;
        for _ in 0..60 {
            let (v, d) = self.interp(g, x);
            let r = v / PI - pstar;
            if r == 0.0 || a == b {
                break;
            }
            if r > 0.0 {
                a = x;
            } else {
                b = x;
            }
            let mut next = x - r * PI / d;
            if !(next > a && next < b) {
                next = 0.5 * (a + b);
            }
            if (next - x).abs() <= 1e-15 * x.abs().max(1e-3) {
                x = next;
                break;
            }
            x = next;
        }
        let (g0, _) = self.interp(&self.sweep.g_nu, x);
        let (g1, _) = self.interp(&self.sweep.g_nu1, x);
        let mdt = self.mu * self.horizon;
        Ok(RiskPoint {
            pstar,
            lstar: x,
            lambda_star: -(mdt - x).exp_m1(),
            estar: 1.0 - mdt.exp() * g1 / g0,
            method: Mode::Fft,
        })
    }

    /// Writes `pstar,lstar,lambda_star,estar` for every trimmed grid point.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "pstar,lstar,lambda_star,estar")?;
        for i in 0..self.lstar.len() {
            writeln!(
                w,
                "{:.12e},{:.12e},{:.12e},{:.12e}",
                self.pstar[i], self.lstar[i], self.lambda_star[i], self.estar[i]
            )?;
        }
        Ok(())
    }
}

/// Writes risk points with the same columns as [`RiskCurve::write_csv`].
pub fn write_points_csv<W: Write>(points: &[RiskPoint], mut w: W) -> Result<()> {
    writeln!(w, "pstar,lstar,lambda_star,estar")?;
    for p in points {
        writeln!(
            w,
            "{:.12e},{:.12e},{:.12e},{:.12e}",
            p.pstar, p.lstar, p.lambda_star, p.estar
        )?;
    }
    Ok(())
}

/// Spacing of a significance-level grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// `n` significance levels from `lo` to `hi` inclusive.
pub fn pstar_grid(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi < 1.0) || n < 2 {
        return Err(RiskError::InvalidParameter(format!(
            "bad P* grid: [{lo}, {hi}] with {n} points"
        )));
    }
    let step = |i: usize| i as f64 / (n - 1) as f64;
    Ok(match spacing {
        Spacing::Linear => (0..n).map(|i| lo + (hi - lo) * step(i)).collect(),
        Spacing::Log => (0..n)
            .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * step(i)).exp())
            .collect(),
    })
}

/// One risk point with the default grid or the default quadrature tolerance.
pub fn risk_at<M: EcfModel + ?Sized>(
    model: &M,
    t: f64,
    nu: f64,
    pstar: f64,
    mode: Mode,
) -> Result<RiskPoint> {
    Ok(risk_points(model, t, nu, &[pstar], mode)?.remove(0))
}

/// Several risk points at one horizon; the FFT mode shares a single curve.
pub fn risk_points<M: EcfModel + ?Sized>(
    model: &M,
    t: f64,
    nu: f64,
    pstars: &[f64],
    mode: Mode,
) -> Result<Vec<RiskPoint>> {
    risk_points_with(model, t, nu, pstars, mode, DEFAULT_POINTS)
}

/// [`risk_points`] with an explicit FFT grid size.
pub fn risk_points_with<M: EcfModel + ?Sized>(
    model: &M,
    t: f64,
    nu: f64,
    pstars: &[f64],
    mode: Mode,
    n_points: usize,
) -> Result<Vec<RiskPoint>> {
    match mode {
        Mode::Fft => {
            let grid = FourierGrid::auto(model, t, nu, n_points)?;
            let curve = var_es_curve(model, t, nu, &grid)?;
            pstars.iter().map(|&p| curve.point_at(p)).collect()
        }
        Mode::Quadrature => pstars
            .iter()
            .map(|&p| quadrature::risk_point(model, t, nu, p, QUADRATURE_TOL))
            .collect(),
    }
}
