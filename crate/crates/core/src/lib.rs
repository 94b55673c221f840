pub mod bootstrap;
pub mod calibration;
pub mod cli;
pub mod error;
pub mod fourier;
pub mod models;
pub mod simulate;
pub mod timeseries;

pub use error::{Result, RiskError};
