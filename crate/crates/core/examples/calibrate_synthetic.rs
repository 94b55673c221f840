//! Simulates a Heston path and recovers Gaussian, TLD and Heston parameters
//! from the scaling of its cumulants.
//!
//!     cargo run --release --example calibrate_synthetic -- 20000 5

use gft_risk::calibration::{fit_gaussian, fit_heston, fit_tld, DEFAULT_J_MAX};
use gft_risk::models::HestonParams;
use gft_risk::simulate::heston_path;
use gft_risk::timeseries::{ReturnSeries, DEFAULT_DT};

fn main() -> gft_risk::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);

    let truth = HestonParams { sigma2: 0.0471, alpha: 86.0, k: 4.67, rho: -0.17, mu: 0.1102 };
    let path = heston_path(&truth, n, DEFAULT_DT, 20, seed)?;
    // drift is unknown to the fitter; re-centre with the sample mean
    let r = ReturnSeries::from_log_returns(path.to_log(), DEFAULT_DT)?;
    println!("truth: {truth:?}\nsample mu = {:.4}", r.mu);

    for (name, fit) in [
        ("gaussian", fit_gaussian(&r, DEFAULT_J_MAX)),
        ("tld", fit_tld(&r, DEFAULT_J_MAX)),
        ("heston", fit_heston(&r, DEFAULT_J_MAX)),
    ] {
        match fit {
            Ok(res) => {
                println!("\n{name}: objective {:.3}", res.objective);
                for (p, e) in &res.estimates {
                    println!("  {p:<7} {:>10.4} +/- {:.4}", e.value, e.std_err);
                }
                for w in &res.warnings {
                    println!("  warning: {w}");
                }
            }
            Err(e) => println!("\n{name}: {e}"),
        }
    }
    Ok(())
}
