//! Writes a Heston-simulated `date,close` file usable as CLI input.
//!
//!     cargo run --example synthetic_prices -- prices.csv 5000 7

use std::fs::File;
use std::io::{BufWriter, Write};

use gft_risk::models::HestonParams;
use gft_risk::simulate::heston_path;
use gft_risk::timeseries::DEFAULT_DT;

fn main() -> gft_risk::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "prices.csv".into());
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(5000);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    // CAC-like parameters
    let params = HestonParams {
        sigma2: 0.0421,
        alpha: 330.0,
        k: 8.08,
        rho: -0.06,
        mu: 0.0747,
    };
    let r = heston_path(&params, n, DEFAULT_DT, 50, seed)?;
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "date,close")?;
    let mut price = 1000.0;
    writeln!(w, "d{:05},{price:.6}", 0)?;
    for (i, x) in r.to_log().iter().enumerate() {
        price *= x.exp();
        writeln!(w, "d{:05},{price:.6}", i + 1)?;
    }
    w.flush()?;
    println!("wrote {} prices to {path}", n + 1);
    Ok(())
}
