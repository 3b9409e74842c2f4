pub mod backtest;
pub mod config;
pub mod data;
pub mod error;
pub mod ets;
pub mod evaluation;
pub mod forecast;
pub mod fpca;
pub mod mcs;
pub mod ols;
mod optim;

pub use error::{Error, Result};
