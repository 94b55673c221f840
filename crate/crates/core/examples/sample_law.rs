//! Draws i.i.d. returns from a Heston law at a fixed horizon through the
//! FFT-reconstructed distribution function and checks a few quantiles.
//!
//!     cargo run --release --example sample_law

use gft_risk::models::{HestonModel, HestonParams};
use gft_risk::simulate::InverseCdfSampler;
use gft_risk::timeseries::{quantile_sorted, sort_ascending, DEFAULT_DT};

fn main() -> gft_risk::Result<()> {
    let p = HestonParams { sigma2: 0.0388, alpha: 287.0, k: 8.82, rho: -0.12, mu: 0.0873 };
    let m = HestonModel::new_quiet(p)?;
    let s = InverseCdfSampler::new(&m, DEFAULT_DT, 1 << 16)?;
    let x = sort_ascending(&s.series(200_000, 9)?.to_log());
    println!("    u      law quantile   sample quantile");
    for u in [0.001, 0.01, 0.05, 0.5, 0.95, 0.99, 0.999] {
        println!("{u:>6}   {:>+12.5}   {:>+12.5}", s.quantile(u), quantile_sorted(&x, u));
    }
    Ok(())
}
