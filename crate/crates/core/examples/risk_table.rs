//! VaR and ES for three index parameter sets under the Heston and TLD laws,
//! by FFT and by direct quadrature.
//!
//!     cargo run --release --example risk_table

use gft_risk::fourier::{nu_default, risk_points, Mode};
use gft_risk::models::{AnyModel, EcfModel, HestonModel, HestonParams, TldModel, TldParams};
use gft_risk::timeseries::DEFAULT_DT;

fn models() -> gft_risk::Result<Vec<(&'static str, AnyModel)>> {
    let sets = [
        ("DAX", 0.1102, [0.0464, 1.77, 10.74, -0.38], [0.0471, 86.0, 4.67, -0.17]),
        ("CAC", 0.0747, [0.0411, 1.84, 11.78, -0.21], [0.0421, 330.0, 8.08, -0.06]),
        ("SX5E", 0.0873, [0.0355, 1.78, 13.60, -0.33], [0.0388, 287.0, 8.82, -0.12]),
    ];
    let mut out = Vec::new();
    for (name, mu, t, h) in sets {
        let tld = TldParams { sigma2: t[0], gamma: t[1], lambda: t[2], beta: t[3] };
        out.push((name, AnyModel::Tld(TldModel::new(tld, mu)?)));
        let hes = HestonParams { sigma2: h[0], alpha: h[1], k: h[2], rho: h[3], mu };
        out.push((name, AnyModel::Heston(HestonModel::new_quiet(hes)?)));
    }
    Ok(out)
}

fn main() -> gft_risk::Result<()> {
    let pstars = [0.01, 0.05];
    println!("index  model   days  pstar%   VaR%(fft)  ES%(fft)  VaR%(quad)  ES%(quad)");
    for (name, m) in models()? {
        for days in [1usize, 10] {
            let t = days as f64 * DEFAULT_DT;
            let nu = nu_default(&m, t)?;
            let fft = risk_points(&m, t, nu, &pstars, Mode::Fft)?;
            let quad = risk_points(&m, t, nu, &pstars, Mode::Quadrature)?;
            for (a, b) in fft.iter().zip(&quad) {
                println!(
                    "{name:<6} {:<7} {days:>4}  {:>6.2}  {:>9.3}  {:>8.3}  {:>10.3}  {:>9.3}",
                    m.name(),
                    100.0 * a.pstar,
                    100.0 * a.lambda_star,
                    100.0 * a.estar,
                    100.0 * b.lambda_star,
                    100.0 * b.estar
                );
            }
        }
    }
    Ok(())
}
