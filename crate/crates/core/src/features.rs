//! Design-matrix construction: lagged exogenous numerics, min-max scaling and
//! calendar indicator columns.
//!
//! Column order is fixed: the exogenous series in panel order (suffixed
//! `_lag`), then the calendar block as laid out by
//! [`TradingCalendar::calendar_column_names`].

use std::ops::Range;

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::calendar::{IntervalStamp, TradingCalendar};
use crate::error::{Error, Result};
use crate::ingest::AlignedPanel;

/// Panel with exogenous columns shifted down by `gap` rows.
///
/// Row `r` carries the target at panel stamp `r + gap` and the exogenous
/// values observed at panel stamp `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaggedPanel {
    pub gap: usize,
    pub stamps: Vec<IntervalStamp>,
    pub target: Vec<f64>,
    pub names: Vec<String>,
    /// Row-major `rows × exogenous_count`.
    pub exogenous: Array2<f64>,
}

impl LaggedPanel {
    pub fn len(&self) -> usize {
        self.stamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stamps.is_empty()
    }

    /// Rows whose stamps fall in `[from, to]`.
    pub fn rows_between(&self, from: IntervalStamp, to: IntervalStamp) -> Range<usize> {
        let lo = self.stamps.partition_point(|s| *s < from);
        let hi = self.stamps.partition_point(|s| *s <= to);
        lo..hi.max(lo)
    }
}

pub fn lag_shift(panel: &AlignedPanel, gap: usize) -> Result<LaggedPanel> {
    if gap == 0 {
        return Err(Error::InvalidSeries("lag gap must be at least 1".into()));
    }
    let len = panel.len();
    if len <= gap {
        return Err(Error::TooShort { len, gap });
    }
    let rows = len - gap;
    let k = panel.exogenous_count();
    let exogenous = Array2::from_shape_fn((rows, k), |(r, c)| panel.exogenous(c)[r]);
    Ok(LaggedPanel {
        gap,
        stamps: panel.stamps()[gap..].to_vec(),
        target: panel.target()[gap..].to_vec(),
        names: panel.exogenous_names().to_vec(),
        exogenous,
    })
}

/// Per-column training-window extremes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl ScalerParams {
    pub fn fit(rows: ArrayView2<'_, f64>) -> Result<Self> {
        if rows.nrows() == 0 {
            return Err(Error::EmptyInput);
        }
        let mut mins = Vec::with_capacity(rows.ncols());
        let mut maxs = Vec::with_capacity(rows.ncols());
        for col in rows.axis_iter(Axis(1)) {
            let (lo, hi) = col
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            mins.push(lo);
            maxs.push(hi);
        }
        Ok(Self { mins, maxs })
    }

    pub fn width(&self) -> usize {
        self.mins.len()
    }

    /// Scales one value of column `c`. Constant columns map to 0; values
    /// outside the fitted range are not clamped.
    pub fn scale_value(&self, c: usize, x: f64) -> f64 {
        let range = self.maxs[c] - self.mins[c];
        if range == 0.0 {
            0.0
        } else {
            (x - self.mins[c]) / range
        }
    }

    pub fn unscale_value(&self, c: usize, z: f64) -> f64 {
        self.mins[c] + z * (self.maxs[c] - self.mins[c])
    }

    pub fn apply(&self, rows: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_width(rows.ncols())?;
        Ok(Array2::from_shape_fn(rows.dim(), |(r, c)| {
            self.scale_value(c, rows[[r, c]])
        }))
    }

    pub fn unscale(&self, rows: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_width(rows.ncols())?;
        Ok(Array2::from_shape_fn(rows.dim(), |(r, c)| {
            self.unscale_value(c, rows[[r, c]])
        }))
    }

    fn check_width(&self, actual: usize) -> Result<()> {
        if actual != self.width() {
            return Err(Error::ColumnMismatch {
                expected: self.width(),
                actual,
            });
        }
        Ok(())
    }
}

/// Numeric design matrix with row-aligned targets and stamps.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub column_names: Vec<String>,
    pub numeric_width: usize,
    pub stamps: Vec<IntervalStamp>,
    pub features: Array2<f64>,
    pub targets: Vec<f64>,
}

impl FeatureMatrix {
    pub fn nrows(&self) -> usize {
        self.features.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.features.ncols()
    }

    pub fn numeric_block(&self) -> ArrayView2<'_, f64> {
        self.features.slice(ndarray::s![.., ..self.numeric_width])
    }

    pub fn calendar_block(&self) -> ArrayView2<'_, f64> {
        self.features.slice(ndarray::s![.., self.numeric_width..])
    }

    /// CSV dump: header naming every column, stamp first, target last.
    pub fn to_csv(&self, cal: &TradingCalendar) -> String {
        let mut out = String::from("stamp");
        for name in &self.column_names {
            out.push(',');
            out.push_str(name);
        }
        out.push_str(",target\n");
        for (r, stamp) in self.stamps.iter().enumerate() {
            out.push_str(&cal.stamp_datetime(*stamp).format("%Y-%m-%dT%H:%M").to_string());
            for v in self.features.row(r) {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push(',');
            out.push_str(&self.targets[r].to_string());
            out.push('\n');
        }
        out
    }
}

/// Column names of the full design matrix.
pub fn column_names(exogenous_names: &[String], cal: &TradingCalendar) -> Vec<String> {
    exogenous_names
        .iter()
        .map(|n| format!("{n}_lag"))
        .chain(cal.calendar_column_names())
        .collect()
}

/// Fits a scaler on the lagged numerics of `rows`.
pub fn fit_scaler(lagged: &LaggedPanel, rows: Range<usize>) -> Result<ScalerParams> {
    ScalerParams::fit(lagged.exogenous.slice(ndarray::s![rows, ..]))
}

/// Assembles the design matrix for `rows` of a lagged panel using `scaler`.
pub fn assemble(
    lagged: &LaggedPanel,
    cal: &TradingCalendar,
    rows: Range<usize>,
    scaler: &ScalerParams,
) -> Result<FeatureMatrix> {
    let numeric = scaler.apply(lagged.exogenous.slice(ndarray::s![rows.clone(), ..]))?;
    let numeric_width = numeric.ncols();
    let width = numeric_width + cal.calendar_width();
    let mut features = Array2::zeros((rows.len(), width));
    for (r, src) in rows.clone().enumerate() {
        let mut row = features.row_mut(r);
        let row = row.as_slice_mut().expect("row-major");
        row[..numeric_width].copy_from_slice(numeric.row(r).as_slice().expect("row-major"));
        cal.calendar_features(lagged.stamps[src])?
            .write_into(&mut row[numeric_width..]);
    }
    Ok(FeatureMatrix {
        column_names: column_names(&lagged.names, cal),
        numeric_width,
        stamps: lagged.stamps[rows.clone()].to_vec(),
        features,
        targets: lagged.target[rows].to_vec(),
    })
}

/// Where [`build_matrix`] gets its scaler from.
#[derive(Debug, Clone)]
pub enum Scaling {
    /// Fit on the rows being built.
    FitOnRows,
    Use(ScalerParams),
}

/// Lags, scales and assembles the whole panel.
pub fn build_matrix(
    panel: &AlignedPanel,
    cal: &TradingCalendar,
    gap: usize,
    scaling: Scaling,
) -> Result<(FeatureMatrix, ScalerParams)> {
    let lagged = lag_shift(panel, gap)?;
    let all = 0..lagged.len();
    let scaler = match scaling {
        Scaling::FitOnRows => fit_scaler(&lagged, all.clone())?,
        Scaling::Use(p) => p,
    };
    let matrix = assemble(&lagged, cal, all, &scaler)?;
    Ok((matrix, scaler))
}
