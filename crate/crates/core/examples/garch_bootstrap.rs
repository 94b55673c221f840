//! GARCH(1,1) residual bootstrap of the Gaussian-model VaR and ES.
//!
//!     cargo run --release --example garch_bootstrap

use gft_risk::bootstrap::{bootstrap_many, fit_garch, simulate_garch, GarchBootstrap, GarchParams};
use gft_risk::calibration::{fit_gaussian, DEFAULT_J_MAX};
use gft_risk::fourier::{risk_points, Mode};
use gft_risk::timeseries::DEFAULT_DT;

fn main() -> gft_risk::Result<()> {
    let truth = GarchParams { c: 3e-4, k: 2e-6, g: 0.90, a: 0.08 };
    let r = simulate_garch(&truth, 2500, DEFAULT_DT, 1)?;
    let fit = fit_garch(&r)?;
    println!("fitted {:?}\nstd err {:?}", fit.params, fit.std_err);

    let boot = GarchBootstrap::from_returns(&r)?;
    let t = DEFAULT_DT;
    let labels = ["var_1pct".to_string(), "es_1pct".to_string()];
    let cis = bootstrap_many(
        &boot,
        &labels,
        |x| {
            let m = fit_gaussian(x, DEFAULT_J_MAX)?.model;
            let p = risk_points(&m, t, 1.0, &[0.01], Mode::Quadrature)?[0];
            Ok(vec![p.lambda_star, p.estar])
        },
        200,
        0.16,
        42,
    )?;
    for ci in cis {
        println!(
            "{}: [{:.3}%, {:.3}%] from {} replicas ({} failed)",
            ci.distribution.label,
            100.0 * ci.lower,
            100.0 * ci.upper,
            ci.distribution.replicas.len(),
            ci.distribution.failed
        );
    }
    Ok(())
}
