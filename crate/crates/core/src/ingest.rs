//! Bar-file loading, alignment of the target and exogenous series onto the
//! calendar grid, and a seeded synthetic panel generator.

use std::collections::HashMap;
use std::path::Path;

use chrono::{Datelike, NaiveDate, NaiveDateTime, Weekday};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::calendar::{IntervalStamp, TradingCalendar};
use crate::error::{Error, Result};

/// Number of exogenous series in a panel.
pub const EXOGENOUS_COUNT: usize = 8;

/// Default names of the exogenous series, in column order.
pub const EXOGENOUS_NAMES: [&str; EXOGENOUS_COUNT] = [
    "dow_jones",
    "nasdaq",
    "sp500",
    "treasury_2y",
    "treasury_5y",
    "treasury_10y",
    "gold",
    "crude_oil",
];

/// Starting levels of the synthetic exogenous random walks.
pub const SYNTHETIC_START_LEVELS: [f64; EXOGENOUS_COUNT] =
    [30000.0, 12000.0, 4000.0, 100.0, 100.0, 100.0, 1800.0, 60.0];

/// Timestamped observations of one instrument.
#[derive(Debug, Clone, PartialEq)]
pub struct BarSeries {
    pub symbol: String,
    observations: Vec<(IntervalStamp, f64)>,
}

impl BarSeries {
    /// Validates strictly increasing stamps and finite positive values.
    pub fn new(symbol: impl Into<String>, observations: Vec<(IntervalStamp, f64)>) -> Result<Self> {
        let symbol = symbol.into();
        for (i, (stamp, value)) in observations.iter().enumerate() {
            if !value.is_finite() || *value <= 0.0 {
                return Err(Error::InvalidSeries(format!(
                    "{symbol}: value {value} at {stamp} is not finite and positive"
                )));
            }
            if i > 0 && observations[i - 1].0 >= *stamp {
                return Err(Error::InvalidSeries(format!(
                    "{symbol}: stamp {stamp} does not follow {}",
                    observations[i - 1].0
                )));
            }
        }
        Ok(Self {
            symbol,
            observations,
        })
    }

    pub fn observations(&self) -> &[(IntervalStamp, f64)] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// Parses the `timestamp,value` bar format. `origin` only labels diagnostics.
pub fn parse_bars(
    text: &str,
    origin: &Path,
    symbol: &str,
    cal: &TradingCalendar,
) -> Result<BarSeries> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "timestamp,value" => {}
        Some((_, header)) => {
            return Err(parse_err(
                1,
                format!("expected header `timestamp,value`, found {header:?}"),
            ))
        }
        None => return Err(parse_err(1, "missing header".into())),
    }

    let mut observations: Vec<(IntervalStamp, f64)> = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        let mut fields = row.split(',');
        let (ts, value) = match (fields.next(), fields.next(), fields.next()) {
            (Some(ts), Some(v), None) => (ts.trim(), v.trim()),
            _ => return Err(parse_err(line, format!("expected 2 fields in {row:?}"))),
        };
        let at = NaiveDateTime::parse_from_str(ts, "%Y-%m-%dT%H:%M")
            .map_err(|e| parse_err(line, format!("bad timestamp {ts:?}: {e}")))?;
        let value: f64 = value
            .parse()
            .map_err(|e| parse_err(line, format!("bad value {value:?}: {e}")))?;
        if !value.is_finite() {
            return Err(parse_err(line, format!("non-finite value {value}")));
        }
        if value <= 0.0 {
            return Err(Error::NonPositiveValue {
                path: origin.to_path_buf(),
                line,
                value,
            });
        }
        let stamp = cal.stamp_at(at).map_err(|e| Error::OffGrid {
            path: origin.to_path_buf(),
            line,
            message: e.to_string(),
        })?;
        if let Some((prev, _)) = observations.last() {
            if *prev >= stamp {
                return Err(Error::NonMonotonic {
                    path: origin.to_path_buf(),
                    line,
                });
            }
        }
        observations.push((stamp, value));
    }
    BarSeries::new(symbol, observations)
}

pub fn load_bars(path: impl AsRef<Path>, symbol: &str, cal: &TradingCalendar) -> Result<BarSeries> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_bars(&text, path, symbol, cal)
}

/// Writes a series in the `timestamp,value` bar format.
pub fn format_bars(series: &BarSeries, cal: &TradingCalendar) -> String {
    let mut out = String::from("timestamp,value\n");
    for (stamp, value) in series.observations() {
        out.push_str(&format!(
            "{},{}\n",
            cal.stamp_datetime(*stamp).format("%Y-%m-%dT%H:%M"),
            value
        ));
    }
    out
}

/// Record of one forward-filled value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapFill {
    pub series: String,
    pub stamp: IntervalStamp,
    pub method: FillMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillMethod {
    ForwardFill,
}

/// Target plus the exogenous series on a common, gap-free calendar grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPanel {
    calendar: TradingCalendar,
    stamps: Vec<IntervalStamp>,
    target_symbol: String,
    target: Vec<f64>,
    exogenous_names: Vec<String>,
    /// Column-major: `exogenous[k][i]` is series `k` at stamp `i`.
    exogenous: Vec<Vec<f64>>,
    gap_fill_log: Vec<GapFill>,
}

impl AlignedPanel {
    /// Builds a panel from already rectangular data. Stamps must be a
    /// contiguous run of the calendar grid.
    pub fn from_parts(
        calendar: TradingCalendar,
        stamps: Vec<IntervalStamp>,
        target_symbol: impl Into<String>,
        target: Vec<f64>,
        exogenous_names: Vec<String>,
        exogenous: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if stamps.is_empty() {
            return Err(Error::EmptyIntersection);
        }
        if exogenous.len() != EXOGENOUS_COUNT || exogenous_names.len() != EXOGENOUS_COUNT {
            return Err(Error::InvalidSeries(format!(
                "expected {EXOGENOUS_COUNT} exogenous series, got {}",
                exogenous.len()
            )));
        }
        if target.len() != stamps.len() || exogenous.iter().any(|s| s.len() != stamps.len()) {
            return Err(Error::InvalidSeries("panel is not rectangular".into()));
        }
        let expected = calendar.grid_between(stamps[0].date, stamps[stamps.len() - 1].date);
        let first = expected
            .iter()
            .position(|s| *s == stamps[0])
            .ok_or_else(|| Error::InvalidSeries(format!("{} is not on the grid", stamps[0])))?;
        let last = expected
            .iter()
            .position(|s| *s == stamps[stamps.len() - 1])
            .ok_or_else(|| {
                Error::InvalidSeries(format!("{} is not on the grid", stamps[stamps.len() - 1]))
            })?;
        if expected[first..=last] != stamps[..] {
            return Err(Error::InvalidSeries(
                "stamps are not a contiguous run of the calendar grid".into(),
            ));
        }
        Ok(Self {
            calendar,
            stamps,
            target_symbol: target_symbol.into(),
            target,
            exogenous_names,
            exogenous,
            gap_fill_log: Vec::new(),
        })
    }

    pub fn calendar(&self) -> &TradingCalendar {
        &self.calendar
    }

    pub fn stamps(&self) -> &[IntervalStamp] {
        &self.stamps
    }

    pub fn len(&self) -> usize {
        self.stamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stamps.is_empty()
    }

    pub fn target_symbol(&self) -> &str {
        &self.target_symbol
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }

    pub fn exogenous_names(&self) -> &[String] {
        &self.exogenous_names
    }

    pub fn exogenous(&self, k: usize) -> &[f64] {
        &self.exogenous[k]
    }

    pub fn exogenous_count(&self) -> usize {
        self.exogenous.len()
    }

    pub fn gap_fill_log(&self) -> &[GapFill] {
        &self.gap_fill_log
    }

    /// Distinct trading dates covered by the panel, ascending.
    pub fn dates(&self) -> Vec<NaiveDate> {
        let mut dates: Vec<NaiveDate> = self.stamps.iter().map(|s| s.date).collect();
        dates.dedup();
        dates
    }

    /// Index of the first stamp on or after `stamp`.
    pub fn position_of(&self, stamp: IntervalStamp) -> Option<usize> {
        self.stamps.binary_search(&stamp).ok()
    }

    /// Returns a copy with one value replaced. Intended for mutation tests.
    pub fn with_value(&self, series: PanelSeries, index: usize, value: f64) -> Self {
        let mut out = self.clone();
        match series {
            PanelSeries::Target => out.target[index] = value,
            PanelSeries::Exogenous(k) => out.exogenous[k][index] = value,
        }
        out
    }

    /// Splits the panel back into bar series (target first).
    pub fn to_bar_series(&self) -> (BarSeries, Vec<BarSeries>) {
        let pack = |symbol: &str, values: &[f64]| BarSeries {
            symbol: symbol.to_string(),
            observations: self.stamps.iter().copied().zip(values.iter().copied()).collect(),
        };
        let target = pack(&self.target_symbol, &self.target);
        let exo = self
            .exogenous_names
            .iter()
            .zip(&self.exogenous)
            .map(|(n, v)| pack(n, v))
            .collect();
        (target, exo)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelSeries {
    Target,
    Exogenous(usize),
}

/// Aligns target and exogenous series onto the calendar grid over
/// `[start, end]`.
///
/// Interior gaps are forward-filled from the last earlier observation of the
/// same series (including observations before `start`) and logged. Stamps
/// before every series has its first value are dropped.
pub fn align(
    target: &BarSeries,
    exogenous: &[BarSeries],
    cal: &TradingCalendar,
    start: NaiveDate,
    end: NaiveDate,
) -> Result<AlignedPanel> {
    if exogenous.len() != EXOGENOUS_COUNT {
        return Err(Error::InvalidSeries(format!(
            "expected {EXOGENOUS_COUNT} exogenous series, got {}",
            exogenous.len()
        )));
    }
    let grid = cal.grid_between(start, end);
    if !target
        .observations()
        .iter()
        .any(|(s, _)| grid.binary_search(s).is_ok())
    {
        return Err(Error::EmptyIntersection);
    }

    let series: Vec<&BarSeries> = std::iter::once(target).chain(exogenous.iter()).collect();
    let mut columns: Vec<Vec<Option<f64>>> = Vec::with_capacity(series.len());
    let mut fills: Vec<Vec<bool>> = Vec::with_capacity(series.len());
    for s in &series {
        let (col, filled) = fill_forward(s, &grid);
        columns.push(col);
        fills.push(filled);
    }

    let head = columns
        .iter()
        .map(|c| c.iter().position(Option::is_some).unwrap_or(grid.len()))
        .max()
        .unwrap_or(0);
    if head >= grid.len() {
        return Err(Error::EmptyIntersection);
    }

    let stamps = grid[head..].to_vec();
    let mut gap_fill_log = Vec::new();
    for i in head..grid.len() {
        for (k, s) in series.iter().enumerate() {
            if fills[k][i] {
                gap_fill_log.push(GapFill {
                    series: s.symbol.clone(),
                    stamp: grid[i],
                    method: FillMethod::ForwardFill,
                });
            }
        }
    }
    let mut values = columns
        .into_iter()
        .map(|c| c[head..].iter().map(|v| v.expect("filled past head")).collect::<Vec<f64>>());
    let target_values = values.next().expect("target column");
    let exogenous_values: Vec<Vec<f64>> = values.collect();

    Ok(AlignedPanel {
        calendar: cal.clone(),
        stamps,
        target_symbol: target.symbol.clone(),
        target: target_values,
        exogenous_names: exogenous.iter().map(|s| s.symbol.clone()).collect(),
        exogenous: exogenous_values,
        gap_fill_log,
    })
}

fn fill_forward(series: &BarSeries, grid: &[IntervalStamp]) -> (Vec<Option<f64>>, Vec<bool>) {
    let obs = series.observations();
    let mut col = Vec::with_capacity(grid.len());
    let mut filled = Vec::with_capacity(grid.len());
    let mut cursor = 0;
    let mut last: Option<f64> = None;
    for stamp in grid {
        while cursor < obs.len() && obs[cursor].0 < *stamp {
            last = Some(obs[cursor].1);
            cursor += 1;
        }
        if cursor < obs.len() && obs[cursor].0 == *stamp {
            last = Some(obs[cursor].1);
            cursor += 1;
            col.push(last);
            filled.push(false);
        } else {
            col.push(last);
            filled.push(last.is_some());
        }
    }
    (col, filled)
}

/// Parameters of the synthetic panel generator.
///
/// Exogenous series are geometric random walks started at
/// [`SYNTHETIC_START_LEVELS`]. The target at stamp `t` is
///
/// `base_price + Σ_k coefficients[k]·exo_k(t−1) + seasonal(t) + noise_sigma·z`
///
/// with `seasonal(t) = hour_amplitude·cos(2π·h/H) + weekday_amplitude·(w − 2)/2`
/// for hour index `h` of `H` session hours and weekday index `w` (Mon = 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub coefficients: [f64; EXOGENOUS_COUNT],
    pub hour_amplitude: f64,
    pub weekday_amplitude: f64,
    pub noise_sigma: f64,
    pub base_price: f64,
    /// Per-interval log-volatility of the exogenous walks.
    pub walk_sigma: f64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidSeries("noise_sigma must be >= 0".into()));
        }
        if !(self.base_price > 0.0 && self.base_price.is_finite()) {
            return Err(Error::InvalidSeries("base_price must be > 0".into()));
        }
        if !(self.walk_sigma >= 0.0 && self.walk_sigma.is_finite()) {
            return Err(Error::InvalidSeries("walk_sigma must be >= 0".into()));
        }
        if self.coefficients.iter().any(|c| !c.is_finite())
            || !self.hour_amplitude.is_finite()
            || !self.weekday_amplitude.is_finite()
        {
            return Err(Error::InvalidSeries("non-finite generator weight".into()));
        }
        Ok(())
    }

    /// Deterministic part of the target at a stamp, given the previous
    /// interval's exogenous values.
    pub fn signal(&self, cal: &TradingCalendar, stamp: IntervalStamp, lagged: &[f64]) -> f64 {
        let linear: f64 = self
            .coefficients
            .iter()
            .zip(lagged)
            .map(|(c, x)| c * x)
            .sum();
        self.base_price + linear + self.seasonal(cal, stamp)
    }

    pub fn seasonal(&self, cal: &TradingCalendar, stamp: IntervalStamp) -> f64 {
        use chrono::Timelike;
        let hour = (cal.slot_start(stamp.slot).hour() - cal.session_open().hour()) as f64;
        let width = cal.hour_width() as f64;
        let weekday = match stamp.date.weekday() {
            Weekday::Sat | Weekday::Sun => 2.0,
            d => d.num_days_from_monday() as f64,
        };
        self.hour_amplitude * (2.0 * std::f64::consts::PI * hour / width).cos()
            + self.weekday_amplitude * (weekday - 2.0) / 2.0
    }
}

/// Generates a synthetic panel over `[start, end]`. Identical specs yield
/// bit-identical panels.
pub fn generate_synthetic(
    spec: &SyntheticSpec,
    cal: &TradingCalendar,
    start: NaiveDate,
    end: NaiveDate,
) -> Result<AlignedPanel> {
    spec.validate()?;
    let stamps = cal.grid_between(start, end);
    if stamps.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = stamps.len();
    let mut exogenous: Vec<Vec<f64>> = (0..EXOGENOUS_COUNT).map(|_| Vec::with_capacity(n)).collect();
    let mut target = Vec::with_capacity(n);
    let mut level = SYNTHETIC_START_LEVELS;
    for stamp in &stamps {
        let signal = spec.signal(cal, *stamp, &level);
        let z: f64 = StandardNormal.sample(&mut rng);
        target.push(signal + spec.noise_sigma * z);
        for (k, lvl) in level.iter_mut().enumerate() {
            let step: f64 = StandardNormal.sample(&mut rng);
            *lvl *= (spec.walk_sigma * step).exp();
            exogenous[k].push(*lvl);
        }
    }
    AlignedPanel::from_parts(
        cal.clone(),
        stamps,
        "SYNTH",
        target,
        EXOGENOUS_NAMES.iter().map(|s| s.to_string()).collect(),
        exogenous,
    )
}

/// Loads a target file plus eight exogenous files and aligns them.
pub fn load_panel(
    target: (&str, &Path),
    exogenous: &[(&str, &Path)],
    cal: &TradingCalendar,
    start: NaiveDate,
    end: NaiveDate,
) -> Result<AlignedPanel> {
    let target = load_bars(target.1, target.0, cal)?;
    let exo = exogenous
        .iter()
        .map(|(sym, path)| load_bars(path, sym, cal))
        .collect::<Result<Vec<_>>>()?;
    let mut seen = HashMap::new();
    for s in std::iter::once(&target).chain(&exo) {
        if seen.insert(s.symbol.clone(), ()).is_some() {
            return Err(Error::InvalidSeries(format!("duplicate symbol {}", s.symbol)));
        }
    }
    align(&target, &exo, cal, start, end)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn flat_spec(seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            seed,
            coefficients: [0.0; EXOGENOUS_COUNT],
            hour_amplitude: 0.0,
            weekday_amplitude: 0.0,
            noise_sigma: 0.0,
            base_price: 150.0,
            walk_sigma: 0.001,
        }
    }

    #[test]
    fn parses_two_rows() {
        let cal = TradingCalendar::nyse();
        let text = "timestamp,value\n2021-06-01T09:30,100.5\n2021-06-01T09:45,101\n";
        let s = parse_bars(text, Path::new("x.csv"), "X", &cal).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.observations()[1].0.slot, 1);
    }

    #[test]
    fn duplicate_stamp_is_non_monotonic() {
        let cal = TradingCalendar::nyse();
        let text = "timestamp,value\n2021-06-01T09:30,100\n2021-06-01T09:30,101\n";
        let err = parse_bars(text, Path::new("x.csv"), "X", &cal).unwrap_err();
        assert!(matches!(err, Error::NonMonotonic { line: 3, .. }));
    }

    #[test]
    fn zero_value_rejected() {
        let cal = TradingCalendar::nyse();
        let text = "timestamp,value\n2021-06-01T09:30,0.00\n";
        let err = parse_bars(text, Path::new("x.csv"), "X", &cal).unwrap_err();
        assert!(matches!(err, Error::NonPositiveValue { line: 2, .. }));
    }

    #[test]
    fn off_grid_rows_carry_line_numbers() {
        let cal = TradingCalendar::nyse();
        let weekend = "timestamp,value\n2021-06-05T09:30,100\n";
        assert!(matches!(
            parse_bars(weekend, Path::new("x.csv"), "X", &cal).unwrap_err(),
            Error::OffGrid { line: 2, .. }
        ));
        let misaligned = "timestamp,value\n2021-06-01T09:30,100\n2021-06-01T09:50,100\n";
        assert!(matches!(
            parse_bars(misaligned, Path::new("x.csv"), "X", &cal).unwrap_err(),
            Error::OffGrid { line: 3, .. }
        ));
        let garbage = "timestamp,value\n2021-06-01T09:30,1e\n";
        assert!(matches!(
            parse_bars(garbage, Path::new("x.csv"), "X", &cal).unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        assert!(parse_bars("time,value\n", Path::new("x.csv"), "X", &cal).is_err());
    }

    #[test]
    fn degenerate_generator_is_constant() {
        let cal = TradingCalendar::nyse();
        let p = generate_synthetic(&flat_spec(3), &cal, d(2021, 6, 1), d(2021, 6, 4)).unwrap();
        assert_eq!(p.len(), 4 * 26);
        assert!(p.target().iter().all(|v| *v == 150.0));
        assert!(p.gap_fill_log().is_empty());
    }

    #[test]
    fn single_coefficient_is_proportional_to_previous_value() {
        let cal = TradingCalendar::nyse();
        let mut spec = flat_spec(11);
        spec.coefficients[6] = 0.05;
        let p = generate_synthetic(&spec, &cal, d(2021, 6, 1), d(2021, 6, 8)).unwrap();
        for i in 1..p.len() {
            let recomputed = 0.05 * p.exogenous(6)[i - 1];
            assert!((p.target()[i] - spec.base_price - recomputed).abs() < 1e-9);
        }
        assert_eq!(p.target()[0], spec.base_price + 0.05 * SYNTHETIC_START_LEVELS[6]);
    }

    #[test]
    fn generator_is_deterministic() {
        let cal = TradingCalendar::nyse();
        let mut spec = flat_spec(5);
        spec.noise_sigma = 1.0;
        let a = generate_synthetic(&spec, &cal, d(2021, 6, 1), d(2021, 6, 4)).unwrap();
        let b = generate_synthetic(&spec, &cal, d(2021, 6, 1), d(2021, 6, 4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generator_rejects_bad_spec() {
        let cal = TradingCalendar::nyse();
        let mut spec = flat_spec(1);
        spec.noise_sigma = -1.0;
        assert!(generate_synthetic(&spec, &cal, d(2021, 6, 1), d(2021, 6, 4)).is_err());
        let spec = flat_spec(1);
        assert!(matches!(
            generate_synthetic(&spec, &cal, d(2021, 6, 5), d(2021, 6, 6)),
            Err(Error::EmptyIntersection)
        ));
    }
}
