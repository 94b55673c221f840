//! Historical VaR/ES from a price file, at daily and 10-day horizons.
//!
//!     cargo run --example synthetic_prices -- prices.csv
//!     cargo run --example historical -- prices.csv

use gft_risk::timeseries::{
    aggregate, historical_var_es, load_prices_file, to_returns, PriceFormat, ReturnKind, DEFAULT_DT,
};

fn main() -> gft_risk::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "prices.csv".into());
    let prices = load_prices_file(&path, PriceFormat::default())?;
    let r = to_returns(&prices, ReturnKind::Log, DEFAULT_DT)?;
    for days in [1, 10] {
        let x = aggregate(&r, days)?;
        for p in [0.01, 0.05] {
            let h = historical_var_es(&x, p)?;
            println!(
                "{days:>2}d  pstar {:>4.1}%  VaR {:>6.3}%  ES {:>6.3}%  (n = {})",
                100.0 * p,
                100.0 * h.lambda_star,
                100.0 * h.e_star,
                h.n
            );
        }
    }
    Ok(())
}
