//! Command-line frontend: `calibrate | risk | curve | bootstrap`.
//!
//! Settings come from an optional TOML file whose keys mirror the flags one
//! to one; flags override the file. Every command writes a `manifest.json`
//! next to its outputs, and every JSON output embeds the same manifest.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bootstrap::{bootstrap_many, ConfidenceInterval, GarchBootstrap};
use crate::calibration::{fit_gaussian, fit_heston, fit_tld, CalibrationResult, DEFAULT_J_MAX};
use crate::error::{Result, RiskError};
use crate::fourier::{
    nu_default, pstar_grid, risk_points_with, Mode, RiskPoint, Spacing, DEFAULT_POINTS,
};
use crate::models::{AnyModel, EcfModel};
use crate::timeseries::{
    aggregate, historical_var_es, load_prices_file, to_returns, PriceFormat, ReturnKind,
    ReturnSeries, DEFAULT_DT,
};

/// Version of the CSV/JSON output layouts.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "gft-risk", version, about = "VaR and ES from extended characteristic functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Fit models to price series and write parameters and scaling data.
    Calibrate(RunArgs),
    /// VaR/ES table over models, significance levels and horizons.
    Risk(RunArgs),
    /// VaR/ES curves over a grid of significance levels.
    Curve(RunArgs),
    /// Risk table with GARCH-bootstrap confidence intervals.
    Bootstrap(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Calibrate(_) => "calibrate",
            Command::Risk(_) => "risk",
            Command::Curve(_) => "curve",
            Command::Bootstrap(_) => "bootstrap",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Calibrate(a) | Command::Risk(a) | Command::Curve(a) | Command::Bootstrap(a) => a,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Price files (`date,close`), comma separated or repeated.
    #[arg(long, value_delimiter = ',')]
    pub input: Vec<PathBuf>,
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub model: Vec<ModelChoice>,
    /// Significance levels as fractions, e.g. `0.01,0.05`.
    #[arg(long, value_delimiter = ',')]
    pub pstar: Vec<f64>,
    /// Horizons in base intervals (trading days).
    #[arg(long, value_delimiter = ',')]
    pub horizon: Vec<u32>,
    /// `fft` or `quadrature`.
    #[arg(long, value_parser = Mode::from_str)]
    pub mode: Option<Mode>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bootstrap replica count.
    #[arg(long)]
    pub mb: Option<usize>,
    /// Bootstrap tail probability; 0.16 gives a 68% interval.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Contour offset; defaults per model and horizon.
    #[arg(long)]
    pub nu: Option<f64>,
    /// FFT grid size (power of two).
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Base interval in years.
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Gaussian,
    Tld,
    Heston,
    Historical,
    All,
}

impl ModelChoice {
    fn name(self) -> &'static str {
        match self {
            ModelChoice::Gaussian => "gaussian",
            ModelChoice::Tld => "tld",
            ModelChoice::Heston => "heston",
            ModelChoice::Historical => "historical",
            ModelChoice::All => "all",
        }
    }
}

/// Model with fixed parameters, evaluated without calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InlineModel {
    pub label: String,
    #[serde(flatten)]
    pub model: AnyModel,
}

/// Resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Vec<PathBuf>,
    pub model: Vec<ModelChoice>,
    pub pstar: Vec<f64>,
    pub horizon: Vec<u32>,
    pub dt: f64,
    pub mode: Mode,
    pub nu: Option<f64>,
    pub grid_n: usize,
    pub out: PathBuf,
    pub seed: u64,
    pub mb: usize,
    pub alpha: f64,
    pub j_max: usize,
    pub curve_points: usize,
    pub curve_range: [f64; 2],
    pub curve_spacing: Spacing,
    pub params: Vec<InlineModel>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: Vec::new(),
            model: vec![ModelChoice::All],
            pstar: vec![0.01, 0.05],
            horizon: vec![1, 10],
            dt: DEFAULT_DT,
            mode: Mode::Fft,
            nu: None,
            grid_n: DEFAULT_POINTS,
            out: PathBuf::from("out"),
            seed: 1,
            mb: 100,
            alpha: 0.16,
            j_max: DEFAULT_J_MAX,
            curve_points: 100,
            curve_range: [0.001, 0.1],
            curve_spacing: Spacing::Linear,
            params: Vec::new(),
        }
    }
}

impl RunConfig {
    /// Config file (if any) with flag overrides applied. Relative input paths
    /// in a config file resolve against the file's directory.
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let mut cfg = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                let mut cfg: RunConfig =
                    toml::from_str(&text).map_err(|e| RiskError::Config(e.to_string()))?;
                let base = path.parent().unwrap_or(Path::new(""));
                for p in &mut cfg.input {
                    if p.is_relative() {
                        *p = base.join(&*p);
                    }
                }
                cfg
            }
            None => RunConfig::default(),
        };
        if !args.input.is_empty() {
            cfg.input = args.input.clone();
        }
        if !args.model.is_empty() {
            cfg.model = args.model.clone();
        }
        if !args.pstar.is_empty() {
            cfg.pstar = args.pstar.clone();
        }
        if !args.horizon.is_empty() {
            cfg.horizon = args.horizon.clone();
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = args.$f.clone() { cfg.$f = v; } )* };
        }
        take!(mode, out, seed, mb, alpha, grid_n, dt);
        if args.nu.is_some() {
            cfg.nu = args.nu;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(RiskError::Config(m));
        if let Some(p) = self.pstar.iter().find(|p| !(**p > 0.0 && **p <= 0.5)) {
            return bad(format!("pstar values must lie in (0, 0.5], got {p}"));
        }
        if self.pstar.is_empty() || self.horizon.is_empty() {
            return bad("need at least one pstar and one horizon".into());
        }
        if self.horizon.contains(&0) {
            return bad("horizons must be positive integers".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !self.grid_n.is_power_of_two() {
            return bad(format!("grid_n must be a power of two, got {}", self.grid_n));
        }
        if self.model.is_empty() {
            return bad("no model selected".into());
        }
        if let Some(p) = self.input.iter().find(|p| !p.is_file()) {
            return bad(format!("input file {} does not exist", p.display()));
        }
        if self.input.is_empty() && self.params.is_empty() {
            return bad("nothing to do: give --input files or inline params".into());
        }
        Ok(())
    }

    /// Selected models with `all` expanded, in a fixed order.
    pub fn models(&self) -> Vec<ModelChoice> {
        let mut out: Vec<ModelChoice> = self
            .model
            .iter()
            .flat_map(|m| match m {
                ModelChoice::All => vec![
                    ModelChoice::Gaussian,
                    ModelChoice::Tld,
                    ModelChoice::Heston,
                    ModelChoice::Historical,
                ],
                m => vec![*m],
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        hex(&Sha256::digest(serde_json::to_vec(self).expect("config serializes")))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Enough to reproduce a run bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub mb: usize,
    pub alpha: f64,
    pub inputs: Vec<InputDigest>,
    pub config: RunConfig,
}

impl RunManifest {
    pub fn new(command: &str, cfg: &RunConfig) -> Result<Self> {
        let inputs = cfg
            .input
            .iter()
            .map(|p| {
                Ok(InputDigest {
                    path: p.display().to_string(),
                    sha256: hex(&Sha256::digest(fs::read(p)?)),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_hash: cfg.hash(),
            seed: cfg.seed,
            mb: cfg.mb,
            alpha: cfg.alpha,
            inputs,
            config: cfg.clone(),
        })
    }
}

/// Files written and tasks that failed.
#[derive(Debug, Default)]
pub struct RunReport {
    pub written: Vec<PathBuf>,
    pub failures: Vec<String>,
}

impl RunReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, task: String, e: &RiskError) {
        self.failures.push(format!("{task}: {e}"));
    }
}

struct Output<'a> {
    dir: &'a Path,
    report: RunReport,
}

impl<'a> Output<'a> {
    fn new(dir: &'a Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir,
            report: RunReport::default(),
        })
    }

    fn write(&mut self, name: &str, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut w = BufWriter::new(File::create(&path)?);
        f(&mut w)?;
        w.flush()?;
        self.report.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }
}

/// One input series with its label (the file stem).
struct Source {
    label: String,
    returns: ReturnSeries,
}

fn load_sources(cfg: &RunConfig) -> Result<Vec<Source>> {
    cfg.input
        .iter()
        .map(|p| {
            let prices = load_prices_file(p, PriceFormat::default())?;
            let returns = to_returns(&prices, ReturnKind::Log, cfg.dt)?;
            let label = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "input".into());
            Ok(Source { label, returns })
        })
        .collect()
}

fn calibrate(choice: ModelChoice, returns: &ReturnSeries, j_max: usize) -> Result<CalibrationResult> {
    match choice {
        ModelChoice::Gaussian => fit_gaussian(returns, j_max),
        ModelChoice::Tld => fit_tld(returns, j_max),
        ModelChoice::Heston => fit_heston(returns, j_max),
        other => Err(RiskError::InvalidParameter(format!(
            "model '{}' has no parameters to calibrate",
            other.name()
        ))),
    }
}

fn pct(x: f64) -> String {
    format!("{:.4}", 100.0 * x)
}

fn parametric(models: &[ModelChoice]) -> Vec<ModelChoice> {
    models
        .iter()
        .copied()
        .filter(|m| *m != ModelChoice::Historical)
        .collect()
}

#[derive(Debug, Serialize)]
struct CalibrationFile<'a> {
    manifest: &'a RunManifest,
    label: &'a str,
    n_returns: usize,
    mu: f64,
    result: &'a CalibrationResult,
}

pub fn cmd_calibrate(cfg: &RunConfig) -> Result<RunReport> {
    let manifest = RunManifest::new("calibrate", cfg)?;
    let sources = load_sources(cfg)?;
    if sources.is_empty() {
        return Err(RiskError::Config("calibrate needs --input".into()));
    }
    let models = parametric(&cfg.models());
    let tasks: Vec<(usize, ModelChoice)> = (0..sources.len())
        .flat_map(|s| models.iter().map(move |m| (s, *m)))
        .collect();
    let results: Vec<Result<CalibrationResult>> = tasks
        .par_iter()
        .map(|&(s, m)| calibrate(m, &sources[s].returns, cfg.j_max))
        .collect();
    let mut out = Output::new(&cfg.out)?;
    out.json("manifest.json", &manifest)?;
    for ((s, m), res) in tasks.into_iter().zip(results) {
        let src = &sources[s];
        let task = format!("{}/{}", src.label, m.name());
        match res {
            Ok(r) => {
                for w in &r.warnings {
                    log::warn!("{task}: {w}");
                }
                out.json(
                    &format!("calibrate_{}_{}.json", src.label, m.name()),
                    &CalibrationFile {
                        manifest: &manifest,
                        label: &src.label,
                        n_returns: src.returns.len(),
                        mu: src.returns.mu,
                        result: &r,
                    },
                )?;
                out.write(&format!("scaling_{}_{}.csv", src.label, m.name()), |w| {
                    writeln!(w, "series,transform,j,t,y,err")?;
                    for s in &r.scaling {
                        for i in 0..s.j.len() {
                            writeln!(
                                w,
                                "{},{:?},{},{:.12e},{:.12e},{:.12e}",
                                s.name, s.transform, s.j[i], s.t[i], s.y[i], s.e[i]
                            )?;
                        }
                    }
                    Ok(())
                })?;
            }
            Err(e) => out.report.fail(task, &e),
        }
    }
    Ok(out.report)
}

/// A model ready for evaluation, or the historical estimator on a source.
enum Evaluator<'a> {
    Parametric(AnyModel),
    Historical(&'a ReturnSeries),
}

struct Target<'a> {
    label: String,
    model: &'static str,
    eval: Result<Evaluator<'a>>,
}

fn targets<'a>(cfg: &RunConfig, sources: &'a [Source]) -> Vec<Target<'a>> {
    let models = cfg.models();
    let fits: Vec<(usize, ModelChoice)> = (0..sources.len())
        .flat_map(|s| models.iter().map(move |m| (s, *m)))
        .collect();
    let mut out: Vec<Target<'a>> = fits
        .par_iter()
        .map(|&(s, m)| Target {
            label: sources[s].label.clone(),
            model: m.name(),
            eval: match m {
                ModelChoice::Historical => Ok(Evaluator::Historical(&sources[s].returns)),
                m => calibrate(m, &sources[s].returns, cfg.j_max).map(|r| Evaluator::Parametric(r.model)),
            },
        })
        .collect();
    out.extend(cfg.params.iter().map(|p| Target {
        label: p.label.clone(),
        model: p.model.name(),
        eval: Ok(Evaluator::Parametric(p.model.clone())),
    }));
    out
}

/// Risk points of a parametric model at one horizon in days.
fn model_points(cfg: &RunConfig, model: &AnyModel, days: u32, pstars: &[f64]) -> Result<(f64, Vec<RiskPoint>)> {
    let t = days as f64 * cfg.dt;
    let nu = match cfg.nu {
        Some(nu) => nu,
        None => nu_default(model, t)?,
    };
    Ok((nu, risk_points_with(model, t, nu, pstars, cfg.mode, cfg.grid_n)?))
}

/// Historical VaR/ES from non-overlapping `days`-interval returns.
fn historical_points(returns: &ReturnSeries, days: u32, pstars: &[f64]) -> Result<(usize, Vec<(f64, f64)>)> {
    let agg = aggregate(returns, days as usize)?;
    let v = pstars
        .iter()
        .map(|&p| historical_var_es(&agg, p).map(|h| (h.lambda_star, h.e_star)))
        .collect::<Result<_>>()?;
    Ok((agg.len(), v))
}

#[derive(Debug, Clone, Serialize)]
pub struct RiskRow {
    pub label: String,
    pub model: String,
    pub horizon_days: u32,
    pub pstar: f64,
    pub lambda_star: f64,
    pub estar: f64,
    /// Contour offset, for parametric rows.
    pub nu: Option<f64>,
    /// Aggregated sample size, for historical rows.
    pub n_returns: Option<usize>,
}

fn evaluate(cfg: &RunConfig, t: &Target, days: u32, pstars: &[f64]) -> Result<Vec<RiskRow>> {
    let eval = t.eval.as_ref().map_err(|e| RiskError::InvalidInput(format!("calibration failed: {e}")))?;
    let row = |p: f64, l: f64, e: f64, nu, n| RiskRow {
        label: t.label.clone(),
        model: t.model.into(),
        horizon_days: days,
        pstar: p,
        lambda_star: l,
        estar: e,
        nu,
        n_returns: n,
    };
    Ok(match eval {
        Evaluator::Parametric(m) => {
            let (nu, pts) = model_points(cfg, m, days, pstars)?;
            pts.iter().map(|q| row(q.pstar, q.lambda_star, q.estar, Some(nu), None)).collect()
        }
        Evaluator::Historical(r) => {
            let (n, v) = historical_points(r, days, pstars)?;
            pstars.iter().zip(v).map(|(&p, (l, e))| row(p, l, e, None, Some(n))).collect()
        }
    })
}

/// Evaluates every (target, horizon) task in parallel; failures are reported per task.
fn run_tasks(cfg: &RunConfig, targets: &[Target], pstars: &[f64]) -> Vec<(String, u32, Result<Vec<RiskRow>>)> {
    let tasks: Vec<(usize, u32)> = (0..targets.len())
        .flat_map(|i| cfg.horizon.iter().map(move |h| (i, *h)))
        .collect();
    tasks
        .par_iter()
        .map(|&(i, h)| {
            let t = &targets[i];
            (format!("{}/{}/{}d", t.label, t.model, h), h, evaluate(cfg, t, h, pstars))
        })
        .collect()
}

#[derive(Serialize)]
struct RiskFile<'a> {
    manifest: &'a RunManifest,
    mode: Mode,
    rows: &'a [RiskRow],
}

pub fn cmd_risk(cfg: &RunConfig) -> Result<RunReport> {
    let manifest = RunManifest::new("risk", cfg)?;
    let sources = load_sources(cfg)?;
    let targets = targets(cfg, &sources);
    let mut out = Output::new(&cfg.out)?;
    out.json("manifest.json", &manifest)?;
    let mut rows = Vec::new();
    for (task, _, res) in run_tasks(cfg, &targets, &cfg.pstar) {
        match res {
            Ok(r) => rows.extend(r),
            Err(e) => out.report.fail(task, &e),
        }
    }
    out.write("risk.csv", |w| {
        writeln!(w, "label,model,horizon_days,pstar_pct,var_pct,es_pct")?;
        for r in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.label,
                r.model,
                r.horizon_days,
                pct(r.pstar),
                pct(r.lambda_star),
                pct(r.estar)
            )?;
        }
        Ok(())
    })?;
    out.json(
        "risk.json",
        &RiskFile {
            manifest: &manifest,
            mode: cfg.mode,
            rows: &rows,
        },
    )?;
    Ok(out.report)
}

pub fn cmd_curve(cfg: &RunConfig) -> Result<RunReport> {
    let manifest = RunManifest::new("curve", cfg)?;
    let grid = pstar_grid(cfg.curve_range[0], cfg.curve_range[1], cfg.curve_points, cfg.curve_spacing)?;
    let sources = load_sources(cfg)?;
    let targets = targets(cfg, &sources);
    let mut out = Output::new(&cfg.out)?;
    out.json("manifest.json", &manifest)?;
    for (task, h, res) in run_tasks(cfg, &targets, &grid) {
        let rows = match res {
            Ok(r) => r,
            Err(e) => {
                out.report.fail(task, &e);
                continue;
            }
        };
        let (label, model) = (&rows[0].label, &rows[0].model);
        out.write(&format!("curve_{label}_{model}_h{h}.csv"), |w| {
            writeln!(w, "pstar_pct,var_pct,es_pct")?;
            for r in &rows {
                writeln!(w, "{},{},{}", pct(r.pstar), pct(r.lambda_star), pct(r.estar))?;
            }
            Ok(())
        })?;
    }
    Ok(out.report)
}

#[derive(Debug, Clone, Serialize)]
pub struct BootstrapRow {
    #[serde(flatten)]
    pub point: RiskRow,
    pub var_lower: f64,
    pub var_upper: f64,
    pub es_lower: f64,
    pub es_upper: f64,
    pub replicas: usize,
    pub failed: usize,
}

#[derive(Serialize)]
struct BootstrapFile<'a> {
    manifest: &'a RunManifest,
    garch: Vec<(String, crate::bootstrap::GarchFit)>,
    rows: &'a [BootstrapRow],
}

/// Replica estimates for all (horizon, pstar) cells of one model, ordered
/// horizon-major with VaR before ES.
fn replica_estimator<'a>(
    cfg: &'a RunConfig,
    choice: ModelChoice,
) -> impl Fn(&ReturnSeries) -> Result<Vec<f64>> + Sync + 'a {
    move |r: &ReturnSeries| {
        let mut v = Vec::with_capacity(2 * cfg.horizon.len() * cfg.pstar.len());
        if choice == ModelChoice::Historical {
            for &h in &cfg.horizon {
                for (l, e) in historical_points(r, h, &cfg.pstar)?.1 {
                    v.extend([l, e]);
                }
            }
        } else {
            let model = calibrate(choice, r, cfg.j_max)?.model;
            for &h in &cfg.horizon {
                for p in model_points(cfg, &model, h, &cfg.pstar)?.1 {
                    v.extend([p.lambda_star, p.estar]);
                }
            }
        }
        Ok(v)
    }
}

pub fn cmd_bootstrap(cfg: &RunConfig) -> Result<RunReport> {
    if cfg.mb < crate::bootstrap::MIN_REPLICAS {
        return Err(RiskError::Config(format!(
            "mb = {} is below the minimum of {} replicas",
            cfg.mb,
            crate::bootstrap::MIN_REPLICAS
        )));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 0.5) {
        return Err(RiskError::Config(format!("alpha must lie in (0, 0.5), got {}", cfg.alpha)));
    }
    let manifest = RunManifest::new("bootstrap", cfg)?;
    let sources = load_sources(cfg)?;
    if sources.is_empty() {
        return Err(RiskError::Config("bootstrap needs --input".into()));
    }
    let targets = targets(cfg, &sources);
    let central = run_tasks(cfg, &targets, &cfg.pstar);
    let mut out = Output::new(&cfg.out)?;
    out.json("manifest.json", &manifest)?;
    let mut rows = Vec::new();
    let mut garch = Vec::new();
    for src in &sources {
        let boot = match GarchBootstrap::from_returns(&src.returns) {
            Ok(b) => b,
            Err(e) => {
                out.report.fail(format!("{}/garch", src.label), &e);
                continue;
            }
        };
        for w in &boot.fit.warnings {
            log::warn!("{}/garch: {w}", src.label);
        }
        garch.push((src.label.clone(), boot.fit.clone()));
        for choice in cfg.models() {
            let task = format!("{}/{}", src.label, choice.name());
            let points: Vec<&RiskRow> = central
                .iter()
                .filter(|(t, _, _)| t.starts_with(&format!("{task}/")))
                .filter_map(|(_, _, r)| r.as_ref().ok())
                .flatten()
                .collect();
            if points.len() != cfg.horizon.len() * cfg.pstar.len() {
                out.report.fail(task, &RiskError::InvalidInput("central estimate failed".into()));
                continue;
            }
            let labels: Vec<String> = points
                .iter()
                .flat_map(|p| {
                    let stem = format!("{}_{}_h{}_p{}", p.label, p.model, p.horizon_days, pct(p.pstar));
                    [format!("{stem}_var"), format!("{stem}_es")]
                })
                .collect();
            let cis = match bootstrap_many(&boot, &labels, replica_estimator(cfg, choice), cfg.mb, cfg.alpha, cfg.seed) {
                Ok(c) => c,
                Err(e) => {
                    out.report.fail(task, &e);
                    continue;
                }
            };
            for (p, pair) in points.iter().zip(cis.chunks(2)) {
                let (var, es): (&ConfidenceInterval, &ConfidenceInterval) = (&pair[0], &pair[1]);
                rows.push(BootstrapRow {
                    point: (*p).clone(),
                    var_lower: var.lower,
                    var_upper: var.upper,
                    es_lower: es.lower,
                    es_upper: es.upper,
                    replicas: var.distribution.replicas.len(),
                    failed: var.distribution.failed,
                });
                for ci in pair {
                    out.write(&format!("replicas/{}.csv", ci.distribution.label), |w| {
                        ci.distribution.write_csv(w)
                    })?;
                }
            }
        }
    }
    out.write("bootstrap.csv", |w| {
        writeln!(
            w,
            "label,model,horizon_days,pstar_pct,var_pct,var_lo_pct,var_hi_pct,es_pct,es_lo_pct,es_hi_pct,replicas,failed"
        )?;
        for r in &rows {
            let p = &r.point;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                p.label,
                p.model,
                p.horizon_days,
                pct(p.pstar),
                pct(p.lambda_star),
                pct(r.var_lower),
                pct(r.var_upper),
                pct(p.estar),
                pct(r.es_lower),
                pct(r.es_upper),
                r.replicas,
                r.failed
            )?;
        }
        Ok(())
    })?;
    out.json(
        "bootstrap.json",
        &BootstrapFile {
            manifest: &manifest,
            garch,
            rows: &rows,
        },
    )?;
    Ok(out.report)
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> Result<RunReport> {
    let cfg = RunConfig::resolve(cli.command.args())?;
    match cli.command {
        Command::Calibrate(_) => cmd_calibrate(&cfg),
        Command::Risk(_) => cmd_risk(&cfg),
        Command::Curve(_) => cmd_curve(&cfg),
        Command::Bootstrap(_) => cmd_bootstrap(&cfg),
    }
}

/// Process entry point; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(report) => {
            for f in &report.failures {
                eprintln!("failed: {f}");
            }
            if report.ok() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
