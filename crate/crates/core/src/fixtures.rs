//! Bundled synthetic panel used by the tests, the acceptance suite and the
//! example configuration.

use chrono::NaiveDate;

use crate::calendar::TradingCalendar;
use crate::error::Result;
use crate::ingest::{generate_synthetic, AlignedPanel, SyntheticSpec};

/// Target near 200 dollars, driven by every exogenous series, with a mild
/// intraday and weekday pattern and unit noise.
pub fn reference_spec(seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        seed,
        coefficients: [0.002, 0.003, 0.005, 0.1, 0.1, 0.1, 0.01, 0.2],
        hour_amplitude: 1.5,
        weekday_amplitude: 0.8,
        noise_sigma: 1.0,
        base_price: 30.0,
        walk_sigma: 0.001,
    }
}

pub fn reference_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2021, 1, 4).unwrap()
}

/// Generates `trading_days` full days of the reference panel from
/// [`reference_start`] on the NYSE-style calendar.
pub fn reference_panel(seed: u64, trading_days: usize) -> Result<(AlignedPanel, TradingCalendar)> {
    let cal = TradingCalendar::nyse();
    let start = reference_start();
    let mut end = start;
    for _ in 1..trading_days.max(1) {
        end = cal.next_trading_day(end);
    }
    let panel = generate_synthetic(&reference_spec(seed), &cal, start, end)?;
    Ok((panel, cal))
}
