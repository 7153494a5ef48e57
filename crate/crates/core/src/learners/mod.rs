//! The four regression learners behind one train/predict interface.

pub mod forest;
pub mod gbrt;
pub mod mlp;
mod persist;
pub mod svr;
pub mod tree;

use std::fmt;
use std::time::Instant;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

pub use forest::{ForestModel, ForestParams};
pub use gbrt::{GbrtModel, GbrtParams};
pub use mlp::{MlpModel, MlpParams};
pub use persist::{read_model, write_model, MODEL_FORMAT_VERSION};
pub use svr::{SvrModel, SvrParams};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Gbrt,
    RandomForest,
    Mlp,
    Svr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Gbrt,
        Algorithm::RandomForest,
        Algorithm::Mlp,
        Algorithm::Svr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Gbrt => "gbrt",
            Algorithm::RandomForest => "random_forest",
            Algorithm::Mlp => "mlp",
            Algorithm::Svr => "svr",
        }
    }

    fn tag(self) -> u8 {
        match self {
            Algorithm::Gbrt => 1,
            Algorithm::RandomForest => 2,
            Algorithm::Mlp => 3,
            Algorithm::Svr => 4,
        }
    }

    fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.tag() == tag)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum Hyperparameters {
    Gbrt(GbrtParams),
    RandomForest(ForestParams),
    Mlp(MlpParams),
    Svr(SvrParams),
}

impl Hyperparameters {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            Hyperparameters::Gbrt(_) => Algorithm::Gbrt,
            Hyperparameters::RandomForest(_) => Algorithm::RandomForest,
            Hyperparameters::Mlp(_) => Algorithm::Mlp,
            Hyperparameters::Svr(_) => Algorithm::Svr,
        }
    }

    pub fn defaults(algorithm: Algorithm) -> Self {
        match algorithm {
            Algorithm::Gbrt => Hyperparameters::Gbrt(GbrtParams::default()),
            Algorithm::RandomForest => Hyperparameters::RandomForest(ForestParams::default()),
            Algorithm::Mlp => Hyperparameters::Mlp(MlpParams::default()),
            Algorithm::Svr => Hyperparameters::Svr(SvrParams::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Hyperparameters::Gbrt(p) => p.validate(),
            Hyperparameters::RandomForest(p) => p.validate(),
            Hyperparameters::Mlp(p) => p.validate(),
            Hyperparameters::Svr(p) => p.validate(),
        }
    }
}

/// Algorithm, hyperparameters and seed: everything that determines a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub seed: u64,
    #[serde(flatten)]
    pub params: Hyperparameters,
}

impl ModelSpec {
    pub fn new(params: Hyperparameters, seed: u64) -> Self {
        Self { seed, params }
    }

    pub fn algorithm(&self) -> Algorithm {
        self.params.algorithm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainOptions {
    /// Allow data-parallel work inside one fit (forest trees, kernel rows).
    /// Results are identical either way.
    pub parallel: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self { parallel: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FittedState {
    Gbrt(GbrtModel),
    RandomForest(ForestModel),
    Mlp(MlpModel),
    Svr(SvrModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub spec: ModelSpec,
    pub feature_count: usize,
    /// Wall-clock seconds spent in the fit.
    pub train_duration: f64,
    pub state: FittedState,
}

impl TrainedModel {
    /// False only for an SVR that hit its iteration cap.
    pub fn converged(&self) -> bool {
        match &self.state {
            FittedState::Svr(m) => m.converged,
            _ => true,
        }
    }

    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.feature_count {
            return Err(Error::ColumnMismatch {
                expected: self.feature_count,
                actual: x.ncols(),
            });
        }
        if x.nrows() == 0 {
            return Ok(Vec::new());
        }
        let x = x.as_standard_layout();
        let rows = || x.rows().into_iter().map(|r| r.to_slice().expect("row-major"));
        let out = match &self.state {
            FittedState::Gbrt(m) => rows().map(|r| m.predict_row(r)).collect(),
            FittedState::RandomForest(m) => rows().map(|r| m.predict_row(r)).collect(),
            FittedState::Svr(m) => rows().map(|r| m.predict_row(r)).collect(),
            FittedState::Mlp(m) => m.predict(x.view()),
        };
        Ok(out)
    }
}

/// Fits `spec` on `x`/`y` and records the wall-clock training time.
pub fn train(
    spec: &ModelSpec,
    x: ArrayView2<'_, f64>,
    y: &[f64],
    options: TrainOptions,
) -> Result<TrainedModel> {
    spec.params.validate()?;
    if x.nrows() < 2 {
        return Err(Error::DegenerateData(format!(
            "need at least 2 training rows, got {}",
            x.nrows()
        )));
    }
    if y.len() != x.nrows() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: x.nrows(),
        });
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateData("non-finite feature value".into()));
    }
    let x = x.as_standard_layout();
    let x = x.view();
    let started = Instant::now();
    let state = match &spec.params {
        Hyperparameters::Gbrt(p) => FittedState::Gbrt(GbrtModel::fit(p, x, y)?),
        Hyperparameters::RandomForest(p) => {
            FittedState::RandomForest(ForestModel::fit(p, x, y, spec.seed, options.parallel)?)
        }
        Hyperparameters::Mlp(p) => FittedState::Mlp(MlpModel::fit(p, x, y, spec.seed)?),
        Hyperparameters::Svr(p) => FittedState::Svr(SvrModel::fit(p, x, y, options.parallel)?),
    };
    let train_duration = started.elapsed().as_secs_f64();
    Ok(TrainedModel {
        spec: spec.clone(),
        feature_count: x.ncols(),
        train_duration,
        state,
    })
}

pub fn predict(model: &TrainedModel, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    model.predict(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn data() -> (Array2<f64>, Vec<f64>) {
        let x = Array2::from_shape_fn((30, 3), |(i, j)| ((i * 7 + j * 5) % 13) as f64 / 13.0);
        let y = (0..30).map(|i| 100.0 + x[[i, 0]] * 4.0 - x[[i, 1]]).collect();
        (x, y)
    }

    fn quick(algorithm: Algorithm) -> ModelSpec {
        let params = match algorithm {
            Algorithm::Mlp => Hyperparameters::Mlp(MlpParams {
                hidden_layers: vec![8],
                epochs: 5,
                ..Default::default()
            }),
            Algorithm::RandomForest => Hyperparameters::RandomForest(ForestParams {
                n_estimators: 10,
                ..Default::default()
            }),
            a => Hyperparameters::defaults(a),
        };
        ModelSpec::new(params, 17)
    }

    #[test]
    fn every_algorithm_is_deterministic() {
        let (x, y) = data();
        for a in Algorithm::ALL {
            let spec = quick(a);
            let m1 = train(&spec, x.view(), &y, TrainOptions { parallel: false }).unwrap();
            let m2 = train(&spec, x.view(), &y, TrainOptions { parallel: true }).unwrap();
            assert_eq!(m1.state, m2.state, "{a}");
            let p1 = m1.predict(x.view()).unwrap();
            let p2 = m2.predict(x.view()).unwrap();
            assert_eq!(
                p1.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                p2.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn constant_targets_reproduce_the_constant() {
        let (x, _) = data();
        let y = vec![37.5; 30];
        for a in Algorithm::ALL {
            let m = train(&quick(a), x.view(), &y, TrainOptions::default()).unwrap();
            let tol = if a == Algorithm::Svr { 0.1 + 1e-9 } else { 1e-6 };
            for p in m.predict(x.view()).unwrap() {
                assert!((p - 37.5).abs() <= tol, "{a}: {p}");
            }
        }
    }

    #[test]
    fn predict_checks_columns_and_handles_empty() {
        let (x, y) = data();
        let m = train(&quick(Algorithm::Gbrt), x.view(), &y, TrainOptions::default()).unwrap();
        assert!(m.predict(Array2::zeros((0, 3)).view()).unwrap().is_empty());
        assert!(matches!(
            m.predict(Array2::zeros((2, 4)).view()),
            Err(Error::ColumnMismatch { expected: 3, actual: 4 })
        ));
    }

    #[test]
    fn train_rejects_bad_input() {
        let (x, y) = data();
        let spec = quick(Algorithm::Gbrt);
        let one = x.slice(ndarray::s![..1, ..]);
        assert!(train(&spec, one, &y[..1], TrainOptions::default()).is_err());
        assert!(train(&spec, x.view(), &y[..5], TrainOptions::default()).is_err());
        let mut bad = y.clone();
        bad[3] = f64::NAN;
        assert!(train(&spec, x.view(), &bad, TrainOptions::default()).is_err());
    }

    #[test]
    fn spec_serialises_with_algorithm_tag() {
        let spec = ModelSpec::new(Hyperparameters::defaults(Algorithm::Gbrt), 5);
        let json = serde_json::to_value(&spec).unwrap();
        assert_eq!(json["algorithm"], "gbrt");
        assert_eq!(json["n_estimators"], 100);
        let back: ModelSpec = serde_json::from_value(json).unwrap();
        assert_eq!(back, spec);
    }
}
