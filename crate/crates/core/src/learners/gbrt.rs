//! Gradient-boosted regression trees on squared error with second-order,
//! L2-regularised leaf weights and exact greedy splits.

use std::collections::HashMap;

use ndarray::ArrayView2;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{grow, Presorted, RegressionTree, TreeConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbrtParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub lambda_l2: f64,
    pub min_child_weight: f64,
}

impl Default for GbrtParams {
    fn default() -> Self {
        Self {
            n_estimators: 100,
            learning_rate: 0.1,
            max_depth: 4,
            lambda_l2: 1.0,
            min_child_weight: 1.0,
        }
    }
}

impl GbrtParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidHyperparameters(format!("gbrt: {m}")));
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning_rate must lie in (0, 1]");
        }
        if self.max_depth == 0 {
            return bad("max_depth must be positive");
        }
        if !(self.lambda_l2 >= 0.0 && self.lambda_l2.is_finite()) {
            return bad("lambda_l2 must be >= 0");
        }
        if !(self.min_child_weight >= 0.0 && self.min_child_weight.is_finite()) {
            return bad("min_child_weight must be >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GbrtModel {
    pub base_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<RegressionTree>,
}

impl GbrtModel {
    pub fn fit(params: &GbrtParams, x: ArrayView2<'_, f64>, y: &[f64]) -> Result<Self> {
        params.validate()?;
        let n = y.len();
        let base_score = y.iter().sum::<f64>() / n as f64;
        let presorted = Presorted::new(x);
        let rows: Vec<u32> = (0..n as u32).collect();
        let hess = vec![1.0; n];
        let cfg = TreeConfig {
            max_depth: Some(params.max_depth),
            min_samples_leaf: 1,
            min_child_weight: params.min_child_weight,
            lambda: params.lambda_l2,
            max_features: None,
        };
        let mut pred = vec![base_score; n];
        let mut grad = vec![0.0; n];
        let mut trees = Vec::with_capacity(params.n_estimators);
        for _ in 0..params.n_estimators {
            for i in 0..n {
                grad[i] = pred[i] - y[i];
            }
            let tree = grow::<ChaCha8Rng>(x, &presorted, &rows, &grad, &hess, cfg, 0.0, None);
            for (i, p) in pred.iter_mut().enumerate() {
                let row = x.row(i);
                *p += params.learning_rate * tree.predict_row(row.as_slice().expect("row-major"));
            }
            trees.push(tree);
        }
        Ok(Self {
            base_score,
            learning_rate: params.learning_rate,
            trees,
        })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.base_score
            + self.learning_rate * self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>()
    }

    /// Predictions after each boosting stage; entry 0 is the base score.
    pub fn staged_predict_row(&self, row: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.trees.len() + 1);
        let mut acc = 0.0;
        out.push(self.base_score);
        for t in &self.trees {
            acc += t.predict_row(row);
            out.push(self.base_score + self.learning_rate * acc);
        }
        out
    }

    pub(crate) fn sections(&self) -> Vec<(String, Vec<f64>)> {
        let mut out = vec![(
            "gbrt.header".to_string(),
            vec![self.base_score, self.learning_rate, self.trees.len() as f64],
        )];
        for (i, t) in self.trees.iter().enumerate() {
            out.push((format!("gbrt.tree.{i}"), t.to_flat()));
        }
        out
    }

    pub(crate) fn from_sections(sections: &HashMap<String, Vec<f64>>) -> Result<Self> {
        let header = sections
            .get("gbrt.header")
            .filter(|h| h.len() == 3)
            .ok_or_else(|| Error::MalformedModel("missing gbrt header".into()))?;
        let count = header[2] as usize;
        let trees = (0..count)
            .map(|i| {
                sections
                    .get(&format!("gbrt.tree.{i}"))
                    .and_then(|f| RegressionTree::from_flat(f))
                    .ok_or_else(|| Error::MalformedModel(format!("bad gbrt tree {i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            base_score: header[0],
            learning_rate: header[1],
            trees,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn rmse(model: &GbrtModel, x: &ndarray::Array2<f64>, y: &[f64]) -> f64 {
        let sse: f64 = (0..y.len())
            .map(|i| {
                let p = model.predict_row(x.row(i).as_slice().unwrap());
                (p - y[i]).powi(2)
            })
            .sum();
        (sse / y.len() as f64).sqrt()
    }

    #[test]
    fn empty_ensemble_predicts_mean() {
        let x = array![[1.0], [2.0], [3.0]];
        let y = [3.0, 6.0, 9.0];
        let params = GbrtParams {
            n_estimators: 0,
            ..Default::default()
        };
        let m = GbrtModel::fit(&params, x.view(), &y).unwrap();
        assert_eq!(m.predict_row(&[100.0]), 6.0);
    }

    #[test]
    fn unregularised_deep_tree_memorises() {
        let x = array![[0.3, 1.0], [0.1, 5.0], [0.9, 2.0], [0.5, 4.0], [0.7, 3.0]];
        let y = [10.0, -3.0, 7.0, 2.5, 4.0];
        let params = GbrtParams {
            n_estimators: 1,
            learning_rate: 1.0,
            max_depth: 64,
            lambda_l2: 0.0,
            min_child_weight: 0.0,
        };
        let m = GbrtModel::fit(&params, x.view(), &y).unwrap();
        assert!(rmse(&m, &x, &y) < 1e-12);
    }

    #[test]
    fn heavy_regularisation_collapses_to_base_score() {
        let x = array![[0.0], [1.0], [2.0], [3.0]];
        let y = [1.0, 2.0, 10.0, 20.0];
        let params = GbrtParams {
            lambda_l2: 1e12,
            min_child_weight: 0.0,
            ..Default::default()
        };
        let m = GbrtModel::fit(&params, x.view(), &y).unwrap();
        for v in [0.0, 1.5, 3.0] {
            assert!((m.predict_row(&[v]) - m.base_score).abs() < 1e-6);
        }
    }

    #[test]
    fn training_rmse_never_increases() {
        let x = ndarray::Array2::from_shape_fn((40, 3), |(i, j)| ((i * 7 + j * 13) % 17) as f64);
        let y: Vec<f64> = (0..40).map(|i| ((i * 31) % 11) as f64 + 0.5 * i as f64).collect();
        let params = GbrtParams {
            n_estimators: 30,
            learning_rate: 0.7,
            max_depth: 3,
            ..Default::default()
        };
        let m = GbrtModel::fit(&params, x.view(), &y).unwrap();
        let staged: Vec<Vec<f64>> = (0..40)
            .map(|i| m.staged_predict_row(x.row(i).as_slice().unwrap()))
            .collect();
        let mut prev = f64::INFINITY;
        for stage in 0..=30 {
            let sse: f64 = staged.iter().zip(&y).map(|(s, t)| (s[stage] - t).powi(2)).sum();
            assert!(sse <= prev + 1e-9, "stage {stage}: {sse} > {prev}");
            prev = sse;
        }
    }

    #[test]
    fn rejects_bad_params() {
        let x = array![[0.0], [1.0]];
        for p in [
            GbrtParams {
                learning_rate: 0.0,
                ..Default::default()
            },
            GbrtParams {
                learning_rate: 1.5,
                ..Default::default()
            },
            GbrtParams {
                max_depth: 0,
                ..Default::default()
            },
            GbrtParams {
                lambda_l2: -1.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(
                GbrtModel::fit(&p, x.view(), &[1.0, 2.0]),
                Err(Error::InvalidHyperparameters(_))
            ));
        }
    }
}
