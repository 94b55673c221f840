//! Regularity strips of the extended characteristic function and the
//! damping parameter chosen inside them, across horizons.
//!
//!     cargo run --example strip

use gft_risk::fourier::nu_default;
use gft_risk::models::{EcfModel, GaussianModel, HestonModel, HestonParams, TldModel, TldParams};
use gft_risk::timeseries::DEFAULT_DT;

fn main() -> gft_risk::Result<()> {
    let models: Vec<Box<dyn EcfModel>> = vec![
        Box::new(GaussianModel::new(0.0464, 0.1102)?),
        Box::new(TldModel::new(
            TldParams { sigma2: 0.0464, gamma: 1.77, lambda: 10.74, beta: -0.38 },
            0.1102,
        )?),
        Box::new(HestonModel::new_quiet(HestonParams {
            sigma2: 0.0471,
            alpha: 86.0,
            k: 4.67,
            rho: -0.17,
            mu: 0.1102,
        })?),
    ];
    for m in &models {
        for days in [1.0, 10.0, 250.0] {
            let t = days * DEFAULT_DT;
            let s = m.strip(t);
            println!(
                "{:<8} {days:>5} d   strip ({:>10.3}, {:>10.3})   nu = {}",
                m.name(),
                s.nu_minus,
                s.nu_plus,
                nu_default(m.as_ref(), t)?
            );
        }
    }
    Ok(())
}
