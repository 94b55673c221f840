//! Synthetic data: Heston paths by full-truncation Euler, and i.i.d. draws
//! from any ECF model through its FFT-reconstructed distribution function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Result, RiskError};
use crate::fourier::{g_sweep, nu_default, FourierGrid, MonotoneCubic};
use crate::models::{EcfModel, HestonParams};
use crate::timeseries::{ReturnKind, ReturnSeries};

/// Generator for stream `i` under a base seed; streams are independent, so
/// replicas can be produced in any order or in parallel.
pub fn stream_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// One full-truncation Euler step of `(x, v)` over `h`.
#[inline]
fn heston_step<R: Rng>(p: &HestonParams, x: &mut f64, v: &mut f64, h: f64, rng: &mut R) {
    let z1: f64 = rng.sample(StandardNormal);
    let z2: f64 = rng.sample(StandardNormal);
    let vp = v.max(0.0);
    let sq = (vp * h).sqrt();
    *x += -0.5 * vp * h + sq * z1;
    *v += p.alpha * (p.sigma2 - vp) * h
        + p.k * sq * (p.rho * z1 + (1.0 - p.rho * p.rho).sqrt() * z2);
}

/// A single Heston path of `n` centered log-returns per interval `dt`,
/// started at `v = sigma2`.
pub fn heston_path(
    params: &HestonParams,
    n: usize,
    dt: f64,
    substeps: usize,
    seed: u64,
) -> Result<ReturnSeries> {
    params.validate()?;
    if substeps == 0 {
        return Err(RiskError::InvalidParameter("substeps must be positive".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let h = dt / substeps as f64;
    let mut v = params.sigma2;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut x = 0.0;
        for _ in 0..substeps {
            heston_step(params, &mut x, &mut v, h, &mut rng);
        }
        out.push(x);
    }
    ReturnSeries::new(out, ReturnKind::CenteredLog, dt, params.mu)
}

/// Paths simulated per random stream in [`heston_terminal`].
const PATHS_PER_STREAM: usize = 10_000;

/// Centered log-returns over horizon `t` of `n_paths` independent Heston
/// paths, each started at `v = sigma2`.
pub fn heston_terminal(
    params: &HestonParams,
    t: f64,
    n_paths: usize,
    steps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    params.validate()?;
    if steps == 0 || !(t > 0.0) {
        return Err(RiskError::InvalidParameter(
            "need a positive horizon and step count".into(),
        ));
    }
    let h = t / steps as f64;
    let streams = n_paths.div_ceil(PATHS_PER_STREAM);
    let chunks: Vec<Vec<f64>> = (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, s as u64);
            let count = PATHS_PER_STREAM.min(n_paths - s * PATHS_PER_STREAM);
            (0..count)
                .map(|_| {
                    let (mut x, mut v) = (0.0, params.sigma2);
                    for _ in 0..steps {
                        heston_step(params, &mut x, &mut v, h, &mut rng);
                    }
                    x
                })
                .collect()
        })
        .collect();
    Ok(chunks.concat())
}

/// CDF tails below this level are cut from the sampler.
const CDF_FLOOR: f64 = 1e-13;

fn logit(u: f64) -> f64 {
    u.ln() - (-u).ln_1p()
}

/// Inverse-transform sampler for the law of `x` at a fixed horizon.
#[derive(Debug, Clone)]
pub struct InverseCdfSampler {
    quantile: MonotoneCubic,
    u_min: f64,
    u_max: f64,
    horizon: f64,
    mu: f64,
}

impl InverseCdfSampler {
    /// Distribution function `F(x) = P*(L* = -x)` from one FFT sweep.
    pub fn new<M: EcfModel + ?Sized>(model: &M, t: f64, n_points: usize) -> Result<Self> {
        let nu = nu_default(model, t)?;
        let grid = FourierGrid::auto(model, t, nu, n_points)?;
        let g = g_sweep(model, t, nu, nu, &grid)?;
        let c = model.cumulants(t);
        let sd = c.k2.sqrt();
        let l = grid.lstar();
        // F(-L) = P*(L); walk outward from the centre while F stays monotone
        // and inside (floor, 1 - floor)
        let cdf = |j: usize| g[j] / std::f64::consts::PI;
        let centre = l.partition_point(|&v| v < -c.k1);
        let mut lo = centre;
        while lo > 0 {
            let f = cdf(lo - 1);
            if !(f > cdf(lo) && f < 1.0 - CDF_FLOOR) {
                break;
            }
            lo -= 1;
        }
        let mut hi = centre;
        while hi + 1 < l.len() {
            let f = cdf(hi + 1);
            if !(f < cdf(hi) && f > CDF_FLOOR) {
                break;
            }
            hi += 1;
        }
        if hi < lo + 16 || (l[hi] - l[lo]) < 6.0 * sd {
            return Err(RiskError::Numerical(
                "reconstructed distribution function is not monotone over the bulk".into(),
            ));
        }
        let us: Vec<f64> = (lo..=hi).rev().map(cdf).collect();
        let xs: Vec<f64> = (lo..=hi).rev().map(|j| -l[j]).collect();
        let (u_min, u_max) = (us[0], *us.last().unwrap());
        Ok(Self {
            // x is close to linear in logit(u) in both tails
            quantile: MonotoneCubic::new(us.into_iter().map(logit).collect(), xs)?,
            u_min,
            u_max,
            horizon: t,
            mu: model.drift(),
        })
    }

    pub fn quantile(&self, u: f64) -> f64 {
        self.quantile.eval(logit(u.clamp(self.u_min, self.u_max)))
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen::<f64>())
    }

    /// `n` i.i.d. draws as a centered log-return series.
    pub fn series(&self, n: usize, seed: u64) -> Result<ReturnSeries> {
        let mut rng = stream_rng(seed, 0);
        let v = (0..n).map(|_| self.sample(&mut rng)).collect();
        ReturnSeries::new(v, ReturnKind::CenteredLog, self.horizon, self.mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{GaussianModel, TldModel, TldParams};
    use crate::timeseries::{empirical_cumulants, DEFAULT_DT};
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream_rng(7, 3).gen();
        let b: u64 = stream_rng(7, 3).gen();
        let c: u64 = stream_rng(7, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_quantiles() {
        let m = GaussianModel::new(0.04, 0.0).unwrap();
        let s = InverseCdfSampler::new(&m, DEFAULT_DT, 1 << 16).unwrap();
        let sd = (0.04 * DEFAULT_DT).sqrt();
        let n = Normal::new(-0.5 * sd * sd, sd).unwrap();
        for u in [1e-6, 0.01, 0.3, 0.5, 0.9, 0.999] {
            let err = (s.quantile(u) - n.inverse_cdf(u)).abs() / sd;
            assert!(err < 1e-6, "{u}: {err:e}");
        }
    }

    #[test]
    fn tld_sample_kurtosis() {
        let p = TldParams {
            sigma2: 0.0411,
            gamma: 1.84,
            lambda: 11.78,
            beta: -0.21,
        };
        let m = TldModel::new(p, 0.0747).unwrap();
        let s = InverseCdfSampler::new(&m, DEFAULT_DT, 1 << 16).unwrap();
        let r = s.series(200_000, 1).unwrap();
        let c = &empirical_cumulants(&r, 1).unwrap()[0];
        let k = m.cumulants(DEFAULT_DT);
        for i in 1..4 {
            assert!((c.k[i] - k.as_array()[i]).abs() < 4.0 * c.eps[i], "k{}", i + 1);
        }
    }

    #[test]
    fn heston_terminal_variance() {
        let p = HestonParams {
            sigma2: 0.0471,
            alpha: 86.0,
            k: 4.67,
            rho: -0.17,
            mu: 0.1102,
        };
        let x = heston_terminal(&p, DEFAULT_DT, 100_000, 20, 3).unwrap();
        assert_eq!(x.len(), 100_000);
        let m = x.iter().sum::<f64>() / x.len() as f64;
        let v = x.iter().map(|a| (a - m).powi(2)).sum::<f64>() / x.len() as f64;
        let exact = 0.0471 * DEFAULT_DT;
        assert!((v / exact - 1.0).abs() < 0.02, "{}", v / exact);
        assert!((m + 0.5 * exact).abs() < 4.0 * (v / 1e5).sqrt());
        let again = heston_terminal(&p, DEFAULT_DT, 100_000, 20, 3).unwrap();
        assert_eq!(x, again);
    }
}
