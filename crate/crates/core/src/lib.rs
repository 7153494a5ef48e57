//! Walk-forward forecasting of 15-minute stock prices from lagged exogenous
//! series and calendar indicators.

pub mod backtest;
pub mod calendar;
pub mod error;
pub mod features;
pub mod fixtures;
pub mod ingest;
pub mod learners;
pub mod metrics;

pub use backtest::{run_backtest, sweep, BacktestOptions, BacktestReport, RollingPlan, SweepOptions};
pub use calendar::{IntervalStamp, TradingCalendar};
pub use error::{Error, Result};
pub use ingest::AlignedPanel;
pub use learners::{train, Algorithm, Hyperparameters, ModelSpec, TrainOptions, TrainedModel};
