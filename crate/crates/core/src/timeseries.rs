//! Price ingestion, return construction, horizon aggregation and the
//! empirical estimators (cumulants, historical VaR/ES, zero-return density)
//! the calibration and benchmark layers are built on.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RiskError};

/// Trading-day length in years used as the default base interval.
pub const DEFAULT_DT: f64 = 3.98e-3;

/// Minimum number of aggregated observations required by the cumulant estimator.
pub const MIN_AGGREGATED_POINTS: usize = 30;

/// Daily close levels keyed by ordered date identifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    dates: Vec<String>,
    closes: Vec<f64>,
}

impl PriceSeries {
    pub fn new(dates: Vec<String>, closes: Vec<f64>) -> Result<Self> {
        if dates.len() != closes.len() {
            return Err(RiskError::InvalidInput(format!(
                "{} dates but {} closes",
                dates.len(),
                closes.len()
            )));
        }
        if closes.len() < 2 {
            return Err(RiskError::InsufficientData(
                "a price series needs at least two points".into(),
            ));
        }
        if let Some(i) = closes.iter().position(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(RiskError::InvalidInput(format!(
                "non-positive price {} at row {}",
                closes[i],
                i + 1
            )));
        }
        if let Some(i) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(RiskError::InvalidInput(format!(
                "dates not strictly increasing at row {} ({} -> {})",
                i + 2,
                dates[i],
                dates[i + 1]
            )));
        }
        Ok(Self { dates, closes })
    }

    /// Builds a series with synthetic sequential date labels.
    pub fn from_closes(closes: Vec<f64>) -> Result<Self> {
        let dates = (0..closes.len()).map(|i| format!("{i:08}")).collect();
        Self::new(dates, closes)
    }

    pub fn dates(&self) -> &[String] {
        &self.dates
    }

    pub fn closes(&self) -> &[f64] {
        &self.closes
    }

    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }
}

/// Layout of a delimited price file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PriceFormat {
    pub delimiter: char,
    /// `None` detects a header from the first row.
    pub has_header: Option<bool>,
}

impl Default for PriceFormat {
    fn default() -> Self {
        Self {
            delimiter: ',',
            has_header: None,
        }
    }
}

/// Parses a two-column `date,close` stream.
pub fn load_prices<R: Read>(source: R, format: PriceFormat) -> Result<PriceSeries> {
    let reader = BufReader::new(source);
    let mut dates: Vec<String> = Vec::new();
    let mut closes = Vec::new();
    let mut first_data_row = true;

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_start_matches('\u{feff}').trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(format.delimiter).map(str::trim);
        let date = fields.next().unwrap_or_default();
        let close = fields.next();
        if fields.next().is_some() {
            return Err(RiskError::Parse {
                line: line_no,
                msg: "expected exactly two columns".into(),
            });
        }
        let close = match close {
            Some(c) if !c.is_empty() => c,
            _ => {
                return Err(RiskError::Parse {
                    line: line_no,
                    msg: "missing close price".into(),
                })
            }
        };
        let parsed = close.parse::<f64>();
        if first_data_row {
            first_data_row = false;
            let header = match format.has_header {
                Some(h) => h,
                None => parsed.is_err(),
            };
            if header {
                continue;
            }
        }
        let value = parsed.map_err(|_| RiskError::Parse {
            line: line_no,
            msg: format!("cannot parse price '{close}'"),
        })?;
        if !(value.is_finite() && value > 0.0) {
            return Err(RiskError::Parse {
                line: line_no,
                msg: format!("non-positive price {value}"),
            });
        }
        if date.is_empty() {
            return Err(RiskError::Parse {
                line: line_no,
                msg: "missing date".into(),
            });
        }
        if let Some(prev) = dates.last() {
            if prev.as_str() >= date {
                return Err(RiskError::Parse {
                    line: line_no,
                    msg: format!("date {date} does not follow {prev}"),
                });
            }
        }
        dates.push(date.to_string());
        closes.push(value);
    }

    if closes.is_empty() {
        return Err(RiskError::EmptyInput);
    }
    PriceSeries::new(dates, closes)
}

pub fn load_prices_file<P: AsRef<Path>>(path: P, format: PriceFormat) -> Result<PriceSeries> {
    let file = std::fs::File::open(path)?;
    load_prices(file, format)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReturnKind {
    Linear,
    Log,
    CenteredLog,
}

/// Returns per base interval `dt` (years), with the annualized linear mean `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub values: Vec<f64>,
    pub kind: ReturnKind,
    pub dt: f64,
    pub mu: f64,
}

impl ReturnSeries {
    pub fn new(values: Vec<f64>, kind: ReturnKind, dt: f64, mu: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(RiskError::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RiskError::InvalidInput("non-finite return".into()));
        }
        Ok(Self {
            values,
            kind,
            dt,
            mu,
        })
    }

    /// Wraps raw log returns, computing `mu` from the implied linear returns.
    pub fn from_log_returns(values: Vec<f64>, dt: f64) -> Result<Self> {
        let mu = if values.is_empty() {
            0.0
        } else {
            values.iter().map(|x| x.exp_m1()).sum::<f64>() / values.len() as f64 / dt
        };
        Self::new(values, ReturnKind::Log, dt, mu)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Linear returns implied by this series.
    pub fn to_linear(&self) -> Vec<f64> {
        match self.kind {
            ReturnKind::Linear => self.values.clone(),
            ReturnKind::Log => self.values.iter().map(|x| x.exp_m1()).collect(),
            ReturnKind::CenteredLog => {
                let shift = self.mu * self.dt;
                self.values.iter().map(|x| (x + shift).exp_m1()).collect()
            }
        }
    }

    /// Uncentered log returns implied by this series.
    pub fn to_log(&self) -> Vec<f64> {
        match self.kind {
            ReturnKind::Linear => self.values.iter().map(|r| r.ln_1p()).collect(),
            ReturnKind::Log => self.values.clone(),
            ReturnKind::CenteredLog => {
                let shift = self.mu * self.dt;
                self.values.iter().map(|x| x + shift).collect()
            }
        }
    }

    /// Re-expresses the series as centered log returns with the stored `mu`.
    pub fn to_centered_log(&self) -> ReturnSeries {
        let shift = self.mu * self.dt;
        let values = self.to_log().into_iter().map(|x| x - shift).collect();
        ReturnSeries {
            values,
            kind: ReturnKind::CenteredLog,
            dt: self.dt,
            mu: self.mu,
        }
    }

    /// Returns multiplied by `c`, as used by scale-consistency checks.
    pub fn scaled(&self, c: f64) -> ReturnSeries {
        ReturnSeries {
            values: self.values.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }
}

/// Builds returns of the requested kind from a price series.
pub fn to_returns(prices: &PriceSeries, kind: ReturnKind, dt: f64) -> Result<ReturnSeries> {
    let closes = prices.closes();
    if closes.len() < 2 {
        return Err(RiskError::InsufficientData(
            "need at least two prices".into(),
        ));
    }
    let linear: Vec<f64> = closes.windows(2).map(|w| w[1] / w[0] - 1.0).collect();
    let mu = mean(&linear) / dt;
    let values = match kind {
        ReturnKind::Linear => linear,
        ReturnKind::Log => closes.windows(2).map(|w| (w[1] / w[0]).ln()).collect(),
        ReturnKind::CenteredLog => closes
            .windows(2)
            .map(|w| (w[1] / w[0]).ln() - mu * dt)
            .collect(),
    };
    ReturnSeries::new(values, kind, dt, mu)
}

/// Non-overlapping block sums of `j` consecutive additive returns.
pub fn aggregate(returns: &ReturnSeries, j: usize) -> Result<ReturnSeries> {
    if returns.kind == ReturnKind::Linear {
        return Err(RiskError::InvalidInput(
            "linear returns are not additive; aggregate log returns".into(),
        ));
    }
    if j == 0 {
        return Err(RiskError::InvalidParameter("j must be at least 1".into()));
    }
    if j > returns.len() {
        return Err(RiskError::InsufficientData(format!(
            "horizon {j} exceeds series length {}",
            returns.len()
        )));
    }
    let values = returns
        .values
        .chunks_exact(j)
        .map(|c| c.iter().sum())
        .collect();
    Ok(ReturnSeries {
        values,
        kind: returns.kind,
        dt: returns.dt * j as f64,
        mu: returns.mu,
    })
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub(crate) fn sample_variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Empirical quantile by linear interpolation between adjacent order
/// statistics (`h = (n - 1) p` on the ascending sample).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0, "quantile of empty sample");
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sort_ascending(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// First four sample cumulants with jackknife standard errors at one horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantEstimates {
    pub horizon_index: usize,
    /// Horizon in years (`horizon_index * dt`).
    pub horizon: f64,
    pub n: usize,
    pub k: [f64; 4],
    pub eps: [f64; 4],
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Unbiased k-statistics from central moments of a sample of size `n`.
fn k_statistics(n: f64, mean: f64, m2: f64, m3: f64, m4: f64) -> [f64; 4] {
    let k2 = n * m2 / (n - 1.0);
    let k3 = n * n * m3 / ((n - 1.0) * (n - 2.0));
    let k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2)
        / ((n - 1.0) * (n - 2.0) * (n - 3.0));
    [mean, k2, k3, k4]
}

/// k-statistics of a sample together with delete-1 jackknife standard errors.
pub fn kstats_with_jackknife(x: &[f64]) -> Result<([f64; 4], [f64; 4])> {
    let n = x.len();
    if n < 5 {
        return Err(RiskError::InsufficientData(format!(
            "need at least 5 points for k-statistics, got {n}"
        )));
    }
    let c = mean(x);
    // power sums of deviations from the full-sample mean
    let mut s = [0.0f64; 4];
    for v in x {
        let d = v - c;
        let d2 = d * d;
        s[0] += d;
        s[1] += d2;
        s[2] += d2 * d;
        s[3] += d2 * d2;
    }
    let from_sums = |s: &[f64; 4], m: f64| -> [f64; 4] {
        let a1 = s[0] / m;
        let r2 = s[1] / m;
        let r3 = s[2] / m;
        let r4 = s[3] / m;
        let m2 = r2 - a1 * a1;
        let m3 = r3 - 3.0 * a1 * r2 + 2.0 * a1.powi(3);
        let m4 = r4 - 4.0 * a1 * r3 + 6.0 * a1 * a1 * r2 - 3.0 * a1.powi(4);
        k_statistics(m, c + a1, m2, m3, m4)
    };
    let full = from_sums(&s, n as f64);
    if !(full[1] > 0.0) {
        return Err(RiskError::Degenerate(
            "zero sample variance: cumulant errors undefined".into(),
        ));
    }

    let mut jack_sum = [0.0f64; 4];
    let mut jack_sq = [0.0f64; 4];
    let mut loo = Vec::with_capacity(n);
    for v in x {
        let d = v - c;
        let d2 = d * d;
        let sub = [s[0] - d, s[1] - d2, s[2] - d2 * d, s[3] - d2 * d2];
        let k = from_sums(&sub, (n - 1) as f64);
        for r in 0..4 {
            jack_sum[r] += k[r];
        }
        loo.push(k);
    }
    let nf = n as f64;
    let jack_mean: Vec<f64> = jack_sum.iter().map(|v| v / nf).collect();
    for k in &loo {
        for r in 0..4 {
            let d = k[r] - jack_mean[r];
            jack_sq[r] += d * d;
        }
    }
    let mut eps = [0.0; 4];
    for r in 0..4 {
        eps[r] = ((nf - 1.0) / nf * jack_sq[r]).sqrt();
    }
    Ok((full, eps))
}

/// Cumulant estimates of the `j`-aggregated series for `j = 1..=j_max`.
pub fn empirical_cumulants(returns: &ReturnSeries, j_max: usize) -> Result<Vec<CumulantEstimates>> {
    if j_max == 0 {
        return Err(RiskError::InvalidParameter("j_max must be positive".into()));
    }
    let needed = j_max * MIN_AGGREGATED_POINTS;
    if returns.len() < needed {
        return Err(RiskError::InsufficientData(format!(
            "{} returns give fewer than {MIN_AGGREGATED_POINTS} blocks at j = {j_max}",
            returns.len()
        )));
    }
    let additive = match returns.kind {
        ReturnKind::Linear => returns.to_centered_log(),
        _ => returns.clone(),
    };
    (1..=j_max)
        .map(|j| {
            let agg = aggregate(&additive, j)?;
            let (k, eps) = kstats_with_jackknife(&agg.values)?;
            if eps.iter().any(|e| !(*e > 0.0)) {
                return Err(RiskError::Degenerate(format!(
                    "vanishing cumulant uncertainty at j = {j}"
                )));
            }
            Ok(CumulantEstimates {
                horizon_index: j,
                horizon: j as f64 * returns.dt,
                n: agg.len(),
                k,
                eps,
                skewness: k[2] / k[1].powf(1.5),
                kurtosis: k[3] / (k[1] * k[1]),
            })
        })
        .collect()
}

/// Historical percentage VaR and ES at one significance level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoricalEstimate {
    pub pstar: f64,
    pub lambda_star: f64,
    pub e_star: f64,
    pub n: usize,
}

/// VaR as minus the interpolated `pstar`-quantile of linear returns and ES
/// as minus the mean of linear returns strictly below that quantile (at or below
/// it when the quantile is the sample minimum).
pub fn historical_var_es(returns: &ReturnSeries, pstar: f64) -> Result<HistoricalEstimate> {
    if !(pstar > 0.0 && pstar < 1.0) {
        return Err(RiskError::InvalidParameter(format!(
            "pstar must lie in (0, 1), got {pstar}"
        )));
    }
    let n = returns.len();
    if (n as f64) * pstar < 1.0 {
        return Err(RiskError::InsufficientData(format!(
            "{n} returns cannot resolve pstar = {pstar}"
        )));
    }
    let sorted = sort_ascending(&returns.to_linear());
    let q = quantile_sorted(&sorted, pstar);
    let mut tail: Vec<f64> = sorted.iter().copied().take_while(|r| *r < q).collect();
    if tail.is_empty() {
        // quantile sits on the sample minimum
        tail = sorted.iter().copied().take_while(|r| *r <= q).collect();
    }
    Ok(HistoricalEstimate {
        pstar,
        lambda_star: -q,
        e_star: -mean(&tail),
        n,
    })
}

/// Binned estimate of the return density at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroDensity {
    pub value: f64,
    pub std_err: f64,
    pub count: usize,
    pub bandwidth: f64,
    /// Every observation fell inside the bin.
    pub degenerate: bool,
}

/// Default half-width of the zero bin: a tenth of the sample standard deviation.
pub fn default_bandwidth(returns: &ReturnSeries) -> f64 {
    0.1 * sample_variance(&returns.values).sqrt()
}

/// `#{|x| <= h} / (2 h n)` with its binomial standard error.
pub fn zero_return_density(returns: &ReturnSeries, h: f64) -> Result<ZeroDensity> {
    let n = returns.len();
    if n == 0 {
        return Err(RiskError::EmptyInput);
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(RiskError::InvalidParameter(format!(
            "bandwidth must be positive, got {h}"
        )));
    }
    let count = returns.values.iter().filter(|x| x.abs() <= h).count();
    if count == 0 {
        return Err(RiskError::InsufficientData(format!(
            "no returns within +/-{h} of zero; widen the bin"
        )));
    }
    let nf = n as f64;
    let c = count as f64;
    let norm = 2.0 * h * nf;
    Ok(ZeroDensity {
        value: c / norm,
        std_err: (c * (1.0 - c / nf)).sqrt() / norm,
        count,
        bandwidth: h,
        degenerate: count == n,
    })
}
