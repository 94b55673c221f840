//! Full VaR/ES curve of a TLD law from one pair of FFT sweeps, as CSV on stdout.
//!
//!     cargo run --release --example var_es_curve > curve.csv

use gft_risk::fourier::{nu_default, var_es_curve, FourierGrid, DEFAULT_POINTS};
use gft_risk::models::{TldModel, TldParams};
use gft_risk::timeseries::DEFAULT_DT;

fn main() -> gft_risk::Result<()> {
    let p = TldParams { sigma2: 0.0464, gamma: 1.77, lambda: 10.74, beta: -0.38 };
    let m = TldModel::new(p, 0.1102)?;
    let t = 10.0 * DEFAULT_DT;
    let nu = nu_default(&m, t)?;
    let grid = FourierGrid::auto(&m, t, nu, DEFAULT_POINTS)?;
    let curve = var_es_curve(&m, t, nu, &grid)?;
    let (lo, hi) = curve.pstar_range();
    eprintln!("{} points, pstar in [{lo:.2e}, {hi:.3}]", curve.pstar.len());
    curve.write_csv(std::io::stdout().lock())
}
