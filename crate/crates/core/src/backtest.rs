//! Rolling-window retraining and evaluation.
//!
//! Each roll trains on the `train_days` trading days immediately before its
//! forecast block and predicts the next `horizon_days` trading days. Rolls
//! advance by `horizon_days`, so every evaluation interval is forecast once.
//! Exogenous inputs trail the target by `horizon_days × slots_per_day`
//! intervals, which keeps every forecast row on data observed no later than
//! the last training stamp.

use std::ops::Range;

use chrono::{NaiveDate, NaiveDateTime};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calendar::TradingCalendar;
use crate::error::{Error, Result};
use crate::features::{assemble, fit_scaler, lag_shift, FeatureMatrix, LaggedPanel, ScalerParams};
use crate::ingest::AlignedPanel;
use crate::learners::{train, ModelSpec, TrainOptions, TrainedModel};
use crate::metrics::{self, MetricSet};

/// Relative tolerance for the aggregate consistency check.
const AGGREGATE_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RollingPlan {
    pub train_days: usize,
    pub horizon_days: usize,
    pub evaluation_start: NaiveDate,
    pub evaluation_end: NaiveDate,
}

impl RollingPlan {
    pub fn roll_step_days(&self) -> usize {
        self.horizon_days
    }

    pub fn gap_intervals(&self, cal: &TradingCalendar) -> usize {
        self.horizon_days * cal.slots_per_day() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.train_days == 0 || self.horizon_days == 0 {
            return Err(Error::InsufficientHistory(
                "train_days and horizon_days must be at least 1".into(),
            ));
        }
        if self.evaluation_start > self.evaluation_end {
            return Err(Error::InsufficientHistory(
                "evaluation span starts after it ends".into(),
            ));
        }
        Ok(())
    }
}

/// Trading days of one roll.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RollWindow {
    pub index: usize,
    pub train_days: Vec<NaiveDate>,
    pub forecast_days: Vec<NaiveDate>,
}

/// Splits the evaluation span into consecutive forecast blocks of
/// `horizon_days` (the last may be shorter) and pairs each with the
/// preceding `train_days` trading days of the panel.
pub fn enumerate_rolls(
    plan: &RollingPlan,
    cal: &TradingCalendar,
    panel_dates: &[NaiveDate],
) -> Result<Vec<RollWindow>> {
    plan.validate()?;
    let wanted = cal.trading_days(plan.evaluation_start, plan.evaluation_end);
    if wanted.is_empty() {
        return Err(Error::InsufficientHistory(
            "evaluation span has no trading days".into(),
        ));
    }
    let first = panel_dates
        .iter()
        .position(|d| *d == wanted[0])
        .ok_or_else(|| {
            Error::InsufficientHistory(format!("panel does not contain {}", wanted[0]))
        })?;
    if panel_dates.len() < first + wanted.len() || panel_dates[first..first + wanted.len()] != wanted[..]
    {
        return Err(Error::InsufficientHistory(
            "panel does not cover the evaluation span".into(),
        ));
    }
    if first < plan.train_days {
        return Err(Error::InsufficientHistory(format!(
            "{} trading days precede the evaluation span, need {}",
            first, plan.train_days
        )));
    }
    Ok(wanted
        .chunks(plan.horizon_days)
        .enumerate()
        .map(|(index, block)| {
            let start = first + index * plan.horizon_days;
            RollWindow {
                index,
                train_days: panel_dates[start - plan.train_days..start].to_vec(),
                forecast_days: block.to_vec(),
            }
        })
        .collect())
}

fn day_rows(lagged: &LaggedPanel, days: &[NaiveDate]) -> Range<usize> {
    let from = days[0];
    let to = days[days.len() - 1];
    let lo = lagged.stamps.partition_point(|s| s.date < from);
    let hi = lagged.stamps.partition_point(|s| s.date <= to);
    lo..hi.max(lo)
}

/// Everything a roll derives from its training window, plus its forecast
/// design matrix.
#[derive(Debug, Clone)]
pub struct RollArtifacts {
    pub scaler: ScalerParams,
    pub model: TrainedModel,
    pub train_rows: usize,
    pub forecast: FeatureMatrix,
}

/// Fits one roll: scaler on the training rows only, then the model.
pub fn fit_roll(
    window: &RollWindow,
    lagged: &LaggedPanel,
    cal: &TradingCalendar,
    spec: &ModelSpec,
    options: TrainOptions,
) -> Result<RollArtifacts> {
    let train_range = day_rows(lagged, &window.train_days);
    let forecast_range = day_rows(lagged, &window.forecast_days);
    if train_range.len() < 2 {
        return Err(Error::InsufficientHistory(format!(
            "roll {} has {} usable training rows",
            window.index,
            train_range.len()
        )));
    }
    let scaler = fit_scaler(lagged, train_range.clone())?;
    let train_matrix = assemble(lagged, cal, train_range.clone(), &scaler)?;
    let forecast = assemble(lagged, cal, forecast_range, &scaler)?;
    let model = train(
        spec,
        train_matrix.features.view(),
        &train_matrix.targets,
        options,
    )?;
    Ok(RollArtifacts {
        scaler,
        model,
        train_rows: train_range.len(),
        forecast,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum RollStatus {
    Ok,
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollResult {
    pub roll_index: usize,
    pub train_start: NaiveDate,
    pub train_end: NaiveDate,
    pub train_rows: usize,
    pub forecast_stamps: Vec<NaiveDateTime>,
    pub predictions: Vec<f64>,
    pub actuals: Vec<f64>,
    pub converged: bool,
    pub status: RollStatus,
}

impl RollResult {
    pub fn is_ok(&self) -> bool {
        self.status == RollStatus::Ok
    }
}

/// Error measures over every successful forecast interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub rmse: f64,
    pub mape: f64,
    pub mape_percent: f64,
    pub mpe: f64,
    pub n: usize,
    pub n_rolls: usize,
}

/// Wall-clock measurements, kept apart so reports can be compared with the
/// timing section removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Mean training time of the successful rolls, seconds.
    pub mtt: Option<f64>,
    /// Training duration per roll, aligned with `rolls`.
    pub roll_durations: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub plan: RollingPlan,
    pub spec: ModelSpec,
    /// Set when the cell as a whole could not run.
    pub error: Option<String>,
    pub rolls: Vec<RollResult>,
    pub aggregate: Option<Aggregate>,
    pub excluded_rolls: usize,
    pub timing: Timing,
}

impl BacktestReport {
    fn failed(plan: &RollingPlan, spec: &ModelSpec, error: String) -> Self {
        Self {
            plan: plan.clone(),
            spec: spec.clone(),
            error: Some(error),
            rolls: Vec::new(),
            aggregate: None,
            excluded_rolls: 0,
            timing: Timing {
                mtt: None,
                roll_durations: Vec::new(),
            },
        }
    }

    /// Concatenated (actuals, predictions, durations) of successful rolls.
    pub fn pooled(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut a = Vec::new();
        let mut p = Vec::new();
        let mut d = Vec::new();
        for (r, dur) in self.rolls.iter().zip(&self.timing.roll_durations) {
            if r.is_ok() {
                a.extend_from_slice(&r.actuals);
                p.extend_from_slice(&r.predictions);
                d.push(*dur);
            }
        }
        (a, p, d)
    }

    pub fn metric_set(&self) -> Option<MetricSet> {
        let agg = self.aggregate?;
        Some(MetricSet {
            rmse: agg.rmse,
            mape: agg.mape,
            mpe: agg.mpe,
            mtt: self.timing.mtt?,
            n: agg.n,
            n_rolls: agg.n_rolls,
        })
    }

    /// Recomputes the aggregate from the stored rolls and compares.
    pub fn check_aggregate(&self) -> Result<()> {
        let (a, p, d) = self.pooled();
        let stored = match (self.aggregate, a.is_empty()) {
            (None, true) => return Ok(()),
            (Some(s), false) => s,
            _ => {
                return Err(Error::MalformedReport(
                    "aggregate presence disagrees with rolls".into(),
                ))
            }
        };
        let fresh = metrics::metric_set(&a, &p, &d)?;
        let close = |x: f64, y: f64| (x - y).abs() <= AGGREGATE_RTOL * x.abs().max(y.abs()).max(1e-300);
        let ok = close(stored.rmse, fresh.rmse)
            && close(stored.mape, fresh.mape)
            && close(stored.mpe, fresh.mpe)
            && stored.n == fresh.n
            && stored.n_rolls == fresh.n_rolls
            && self.timing.mtt.is_some_and(|m| close(m, fresh.mtt));
        if ok {
            Ok(())
        } else {
            Err(Error::MalformedReport(
                "aggregate does not match the recorded rolls".into(),
            ))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self =
            serde_json::from_str(text).map_err(|e| Error::MalformedReport(e.to_string()))?;
        for r in &report.rolls {
            if r.is_ok()
                && (r.predictions.len() != r.forecast_stamps.len()
                    || r.actuals.len() != r.forecast_stamps.len())
            {
                return Err(Error::MalformedReport(format!(
                    "roll {} has mismatched array lengths",
                    r.roll_index
                )));
            }
        }
        if report.timing.roll_durations.len() != report.rolls.len() {
            return Err(Error::MalformedReport(
                "roll_durations does not match rolls".into(),
            ));
        }
        Ok(report)
    }

    /// `stamp,actual,prediction,roll_index` rows in forecast order.
    pub fn interval_csv(&self) -> String {
        let mut out = String::from("stamp,actual,prediction,roll_index\n");
        for r in self.rolls.iter().filter(|r| r.is_ok()) {
            for ((s, a), p) in r.forecast_stamps.iter().zip(&r.actuals).zip(&r.predictions) {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    s.format("%Y-%m-%dT%H:%M"),
                    a,
                    p,
                    r.roll_index
                ));
            }
        }
        out
    }
}

/// Plot-ready `stamp,actual,prediction,absolute_error` rows ordered by stamp.
pub fn plot_data_csv(report: &BacktestReport) -> String {
    let mut rows: Vec<(NaiveDateTime, f64, f64)> = report
        .rolls
        .iter()
        .filter(|r| r.is_ok())
        .flat_map(|r| {
            r.forecast_stamps
                .iter()
                .zip(&r.actuals)
                .zip(&r.predictions)
                .map(|((s, a), p)| (*s, *a, *p))
        })
        .collect();
    rows.sort_by_key(|r| r.0);
    let mut out = String::from("stamp,actual,prediction,absolute_error\n");
    for (s, a, p) in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.format("%Y-%m-%dT%H:%M"),
            a,
            p,
            (a - p).abs()
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BacktestOptions {
    /// Run rolls concurrently.
    pub parallel_rolls: bool,
    pub train: TrainOptions,
}

impl BacktestOptions {
    /// Everything on one thread, for undistorted per-roll timings.
    pub fn sequential() -> Self {
        Self {
            parallel_rolls: false,
            train: TrainOptions { parallel: false },
        }
    }
}

impl Default for BacktestOptions {
    fn default() -> Self {
        Self {
            parallel_rolls: true,
            train: TrainOptions { parallel: true },
        }
    }
}

pub fn run_backtest(
    plan: &RollingPlan,
    spec: &ModelSpec,
    panel: &AlignedPanel,
    cal: &TradingCalendar,
    options: BacktestOptions,
) -> Result<BacktestReport> {
    spec.params.validate()?;
    let windows = enumerate_rolls(plan, cal, &panel.dates())?;
    let lagged = lag_shift(panel, plan.gap_intervals(cal))?;

    let run = |w: &RollWindow| -> (RollResult, f64) {
        let forecast_range = day_rows(&lagged, &w.forecast_days);
        let stamps: Vec<NaiveDateTime> = lagged.stamps[forecast_range.clone()]
            .iter()
            .map(|s| cal.stamp_datetime(*s))
            .collect();
        let actuals = lagged.target[forecast_range].to_vec();
        let mut result = RollResult {
            roll_index: w.index,
            train_start: w.train_days[0],
            train_end: w.train_days[w.train_days.len() - 1],
            train_rows: 0,
            forecast_stamps: stamps,
            predictions: Vec::new(),
            actuals,
            converged: true,
            status: RollStatus::Ok,
        };
        let outcome = fit_roll(w, &lagged, cal, spec, options.train).and_then(|art| {
            let preds = art.model.predict(art.forecast.features.view())?;
            if let Some(i) = preds.iter().position(|p| !p.is_finite()) {
                return Err(Error::NonFinite(i));
            }
            Ok((art, preds))
        });
        match outcome {
            Ok((art, preds)) => {
                result.train_rows = art.train_rows;
                result.converged = art.model.converged();
                result.predictions = preds;
                (result, art.model.train_duration)
            }
            Err(e) => {
                result.status = RollStatus::Failed {
                    reason: e.to_string(),
                };
                (result, 0.0)
            }
        }
    };

    let outcomes: Vec<(RollResult, f64)> = if options.parallel_rolls {
        windows.par_iter().map(run).collect()
    } else {
        windows.iter().map(run).collect()
    };
    let (rolls, roll_durations): (Vec<RollResult>, Vec<f64>) = outcomes.into_iter().unzip();

    let mut report = BacktestReport {
        plan: plan.clone(),
        spec: spec.clone(),
        error: None,
        excluded_rolls: rolls.iter().filter(|r| !r.is_ok()).count(),
        rolls,
        aggregate: None,
        timing: Timing {
            mtt: None,
            roll_durations,
        },
    };
    let (a, p, d) = report.pooled();
    if a.is_empty() {
        report.error = Some("every roll failed".into());
    } else {
        let m = metrics::metric_set(&a, &p, &d)?;
        report.aggregate = Some(Aggregate {
            rmse: m.rmse,
            mape: m.mape,
            mape_percent: m.mape_percent(),
            mpe: m.mpe,
            n: m.n,
            n_rolls: m.n_rolls,
        });
        report.timing.mtt = Some(m.mtt);
    }
    report.check_aggregate()?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    /// Cells run concurrently on this many threads.
    pub jobs: usize,
    /// Forces one thread everywhere so per-roll durations are not inflated
    /// by concurrent work.
    pub sequential_timing: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            jobs: 1,
            sequential_timing: false,
        }
    }
}

/// Runs every (plan, spec) cell. A failing cell yields a report carrying the
/// error; the rest still run. Reports are ordered by algorithm, training
/// window and horizon, ties kept in spec-then-plan order.
pub fn sweep(
    plans: &[RollingPlan],
    specs: &[ModelSpec],
    panel: &AlignedPanel,
    cal: &TradingCalendar,
    options: SweepOptions,
) -> Vec<BacktestReport> {
    let cells: Vec<(&ModelSpec, &RollingPlan)> = specs
        .iter()
        .flat_map(|s| plans.iter().map(move |p| (s, p)))
        .collect();
    let inner = if options.sequential_timing {
        BacktestOptions::sequential()
    } else {
        BacktestOptions::default()
    };
    let run_cell = |(spec, plan): &(&ModelSpec, &RollingPlan)| {
        run_backtest(plan, spec, panel, cal, inner)
            .unwrap_or_else(|e| BacktestReport::failed(plan, spec, e.to_string()))
    };
    let jobs = if options.sequential_timing {
        1
    } else {
        options.jobs.max(1)
    };
    let mut reports: Vec<BacktestReport> = if jobs == 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("thread pool");
        pool.install(|| cells.iter().map(run_cell).collect())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        pool.install(|| cells.par_iter().map(run_cell).collect())
    };
    reports.sort_by_key(|r| (r.spec.algorithm(), r.plan.train_days, r.plan.horizon_days));
    reports
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{generate_synthetic, SyntheticSpec};
    use crate::learners::{GbrtParams, Hyperparameters, MlpParams};

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    fn plan(train: usize, horizon: usize, start: NaiveDate, end: NaiveDate) -> RollingPlan {
        RollingPlan {
            train_days: train,
            horizon_days: horizon,
            evaluation_start: start,
            evaluation_end: end,
        }
    }

    #[test]
    fn eighty_days_make_eighty_or_sixteen_rolls() {
        let cal = TradingCalendar::nyse();
        let days = cal.trading_days(d(2021, 1, 4), d(2021, 12, 31));
        let eval_start = days[100];
        let eval_end = days[179];
        let one = enumerate_rolls(&plan(60, 1, eval_start, eval_end), &cal, &days).unwrap();
        assert_eq!(one.len(), 80);
        let five = enumerate_rolls(&plan(60, 5, eval_start, eval_end), &cal, &days).unwrap();
        assert_eq!(five.len(), 16);
        for w in &five {
            assert_eq!(w.train_days.len(), 60);
            assert_eq!(w.forecast_days.len(), 5);
            assert!(w.train_days.last().unwrap() < &w.forecast_days[0]);
            let pos = days.iter().position(|x| *x == w.forecast_days[0]).unwrap();
            assert_eq!(days[pos - 1], *w.train_days.last().unwrap());
        }
        let covered: Vec<NaiveDate> = five.iter().flat_map(|w| w.forecast_days.clone()).collect();
        assert_eq!(covered, days[100..180].to_vec());
    }

    #[test]
    fn short_history_is_rejected() {
        let cal = TradingCalendar::nyse();
        let days = cal.trading_days(d(2021, 1, 4), d(2021, 6, 30));
        let e = days[59];
        assert!(matches!(
            enumerate_rolls(&plan(60, 1, e, e), &cal, &days),
            Err(Error::InsufficientHistory(_))
        ));
        let e = days[60];
        assert_eq!(enumerate_rolls(&plan(60, 1, e, e), &cal, &days).unwrap().len(), 1);
    }

    #[test]
    fn uncovered_span_is_rejected() {
        let cal = TradingCalendar::nyse();
        let days = cal.trading_days(d(2021, 1, 4), d(2021, 3, 31));
        assert!(enumerate_rolls(&plan(5, 1, days[10], d(2021, 4, 30)), &cal, &days).is_err());
        assert!(enumerate_rolls(&plan(0, 1, days[10], days[12]), &cal, &days).is_err());
    }

    #[test]
    fn trailing_block_may_be_short() {
        let cal = TradingCalendar::nyse();
        let days = cal.trading_days(d(2021, 1, 4), d(2021, 3, 31));
        let rolls = enumerate_rolls(&plan(5, 5, days[10], days[21]), &cal, &days).unwrap();
        assert_eq!(rolls.len(), 3);
        assert_eq!(rolls[2].forecast_days.len(), 2);
    }

    fn small_panel() -> AlignedPanel {
        let spec = SyntheticSpec {
            seed: 4,
            coefficients: [0.001, 0.0, 0.0, 0.0, 0.0, 0.0, 0.02, 0.3],
            hour_amplitude: 0.4,
            weekday_amplitude: 0.2,
            noise_sigma: 0.3,
            base_price: 120.0,
            walk_sigma: 0.001,
        };
        generate_synthetic(&spec, &TradingCalendar::nyse(), d(2021, 3, 1), d(2021, 3, 31)).unwrap()
    }

    #[test]
    fn report_is_consistent_and_round_trips() {
        let cal = TradingCalendar::nyse();
        let panel = small_panel();
        let days = panel.dates();
        let p = plan(5, 2, days[15], days[19]);
        let spec = ModelSpec::new(
            Hyperparameters::Gbrt(GbrtParams {
                n_estimators: 20,
                ..Default::default()
            }),
            1,
        );
        let report = run_backtest(&p, &spec, &panel, &cal, BacktestOptions::default()).unwrap();
        assert_eq!(report.rolls.len(), 3);
        assert_eq!(report.aggregate.unwrap().n, 5 * 26);
        report.check_aggregate().unwrap();
        let back = BacktestReport::from_json(&report.to_json()).unwrap();
        assert_eq!(back, report);
        assert_eq!(report.interval_csv().lines().count(), 5 * 26 + 1);
        let plot = plot_data_csv(&report);
        assert!(plot.starts_with("stamp,actual,prediction,absolute_error\n"));

        let mut tampered = report.clone();
        tampered.aggregate.as_mut().unwrap().rmse *= 1.01;
        assert!(tampered.check_aggregate().is_err());
    }

    #[test]
    fn failed_rolls_are_excluded_and_counted() {
        let cal = TradingCalendar::nyse();
        let panel = small_panel();
        let days = panel.dates();
        let p = plan(3, 1, days[10], days[11]);
        // An absurd step size drives the network to overflow.
        let spec = ModelSpec::new(
            Hyperparameters::Mlp(MlpParams {
                hidden_layers: vec![4],
                epochs: 50,
                batch_size: 8,
                step_size: 1e300,
            }),
            0,
        );
        let report = run_backtest(&p, &spec, &panel, &cal, BacktestOptions::default()).unwrap();
        assert_eq!(report.excluded_rolls, 2);
        assert!(report.aggregate.is_none());
        assert!(report.error.is_some());
        assert!(report.rolls.iter().all(|r| matches!(r.status, RollStatus::Failed { .. })));
    }

    #[test]
    fn sweep_counts_and_orders_cells() {
        let cal = TradingCalendar::nyse();
        let panel = small_panel();
        let days = panel.dates();
        let plans = vec![plan(5, 1, days[15], days[16]), plan(3, 1, days[15], days[16])];
        let specs = vec![
            ModelSpec::new(
                Hyperparameters::Mlp(MlpParams {
                    hidden_layers: vec![4],
                    epochs: 2,
                    ..Default::default()
                }),
                0,
            ),
            ModelSpec::new(
                Hyperparameters::Gbrt(GbrtParams {
                    n_estimators: 5,
                    ..Default::default()
                }),
                0,
            ),
        ];
        let reports = sweep(&plans, &specs, &panel, &cal, SweepOptions::default());
        assert_eq!(reports.len(), 4);
        let keys: Vec<_> = reports
            .iter()
            .map(|r| (r.spec.algorithm(), r.plan.train_days))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);

        let single = run_backtest(&plans[0], &specs[1], &panel, &cal, BacktestOptions::default()).unwrap();
        let from_sweep = sweep(&plans[..1], &specs[1..], &panel, &cal, SweepOptions::default());
        assert_eq!(from_sweep.len(), 1);
        assert_eq!(from_sweep[0].rolls, single.rolls);
        assert_eq!(from_sweep[0].aggregate, single.aggregate);
    }

    #[test]
    fn sweep_records_cell_failures() {
        let cal = TradingCalendar::nyse();
        let panel = small_panel();
        let days = panel.dates();
        let plans = vec![plan(500, 1, days[15], days[16])];
        let specs = vec![ModelSpec::new(
            Hyperparameters::Gbrt(GbrtParams::default()),
            0,
        )];
        let reports = sweep(&plans, &specs, &panel, &cal, SweepOptions::default());
        assert_eq!(reports.len(), 1);
        assert!(reports[0].error.as_ref().unwrap().contains("insufficient history"));
    }
}
