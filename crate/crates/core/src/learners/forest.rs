//! Random forest regressor: bootstrap-sampled CART trees with a fresh random
//! feature subset at every split.
//!
//! Tree `t` draws its bootstrap sample and feature subsets from a ChaCha
//! stream keyed by `(seed, t)`, so the fitted forest does not depend on how
//! trees are scheduled across threads.

use std::collections::HashMap;

use ndarray::ArrayView2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{grow, Presorted, RegressionTree, TreeConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_estimators: usize,
    /// `None` grows trees until leaves are pure or too small to split.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub feature_fraction: f64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_estimators: 100,
            max_depth: None,
            min_samples_leaf: 2,
            feature_fraction: 1.0 / 3.0,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidHyperparameters(format!("random_forest: {m}")));
        if self.n_estimators == 0 {
            return bad("n_estimators must be positive");
        }
        if self.max_depth == Some(0) {
            return bad("max_depth must be positive");
        }
        if self.min_samples_leaf == 0 {
            return bad("min_samples_leaf must be positive");
        }
        if !(self.feature_fraction > 0.0 && self.feature_fraction <= 1.0) {
            return bad("feature_fraction must lie in (0, 1]");
        }
        Ok(())
    }

    pub fn features_per_split(&self, n_features: usize) -> usize {
        ((self.feature_fraction * n_features as f64).ceil() as usize).clamp(1, n_features.max(1))
    }
}

/// How each tree picks its training rows.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Bootstrap,
    /// Every row exactly once. Test hook for comparing against plain CART.
    Identity,
}

fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

/// Rows drawn with replacement for tree `tree` of a forest seeded with
/// `seed` on `n` rows.
pub fn bootstrap_sample(seed: u64, tree: usize, n: usize) -> Vec<u32> {
    let mut rng = tree_rng(seed, tree);
    draw_bootstrap(&mut rng, n)
}

fn draw_bootstrap(rng: &mut ChaCha8Rng, n: usize) -> Vec<u32> {
    (0..n).map(|_| rng.random_range(0..n as u32)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<RegressionTree>,
}

impl ForestModel {
    pub fn fit(
        params: &ForestParams,
        x: ArrayView2<'_, f64>,
        y: &[f64],
        seed: u64,
        parallel: bool,
    ) -> Result<Self> {
        Self::fit_with_sampling(params, x, y, seed, parallel, Sampling::Bootstrap)
    }

    #[doc(hidden)]
    pub fn fit_with_sampling(
        params: &ForestParams,
        x: ArrayView2<'_, f64>,
        y: &[f64],
        seed: u64,
        parallel: bool,
        sampling: Sampling,
    ) -> Result<Self> {
        params.validate()?;
        let n = y.len();
        let presorted = Presorted::new(x);
        let cfg = TreeConfig {
            max_depth: params.max_depth,
            min_samples_leaf: params.min_samples_leaf,
            min_child_weight: 0.0,
            lambda: 0.0,
            max_features: Some(params.features_per_split(x.ncols())),
        };
        let build = |t: usize| {
            let mut rng = tree_rng(seed, t);
            let rows: Vec<u32> = match sampling {
                Sampling::Bootstrap => draw_bootstrap(&mut rng, n),
                Sampling::Identity => (0..n as u32).collect(),
            };
            // Centre on the sample mean so gains are computed on small
            // residuals; leaves come out as `offset + mean residual`.
            let offset = rows.iter().map(|&r| y[r as usize]).sum::<f64>() / n as f64;
            let grad: Vec<f64> = y.iter().map(|v| offset - v).collect();
            let hess = vec![1.0; n];
            grow(x, &presorted, &rows, &grad, &hess, cfg, offset, Some(&mut rng))
        };
        let trees = if parallel {
            (0..params.n_estimators).into_par_iter().map(build).collect()
        } else {
            (0..params.n_estimators).map(build).collect()
        };
        Ok(Self { trees })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_row(row)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn tree_predictions(&self, row: &[f64]) -> Vec<f64> {
        self.trees.iter().map(|t| t.predict_row(row)).collect()
    }

    pub(crate) fn sections(&self) -> Vec<(String, Vec<f64>)> {
        let mut out = vec![("forest.header".to_string(), vec![self.trees.len() as f64])];
        for (i, t) in self.trees.iter().enumerate() {
            out.push((format!("forest.tree.{i}"), t.to_flat()));
        }
        out
    }

    pub(crate) fn from_sections(sections: &HashMap<String, Vec<f64>>) -> Result<Self> {
        let count = sections
            .get("forest.header")
            .filter(|h| h.len() == 1)
            .ok_or_else(|| Error::MalformedModel("missing forest header".into()))?[0]
            as usize;
        let trees = (0..count)
            .map(|i| {
                sections
                    .get(&format!("forest.tree.{i}"))
                    .and_then(|f| RegressionTree::from_flat(f))
                    .ok_or_else(|| Error::MalformedModel(format!("bad forest tree {i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if trees.is_empty() {
            return Err(Error::MalformedModel("forest without trees".into()));
        }
        Ok(Self { trees })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn fixture() -> (Array2<f64>, Vec<f64>) {
        let x = Array2::from_shape_fn((60, 4), |(i, j)| (((i + 3) * (j + 5) * 37) % 23) as f64);
        let y = (0..60)
            .map(|i| 2.0 * x[[i, 0]] - x[[i, 2]] + ((i * 13) % 7) as f64)
            .collect();
        (x, y)
    }

    #[test]
    fn constant_target_gives_constant_prediction() {
        let (x, _) = fixture();
        let y = vec![42.0; 60];
        let m = ForestModel::fit(&ForestParams::default(), x.view(), &y, 3, false).unwrap();
        for i in 0..60 {
            assert_eq!(m.predict_row(x.row(i).as_slice().unwrap()), 42.0);
        }
    }

    #[test]
    fn prediction_is_mean_of_trees() {
        let (x, y) = fixture();
        let params = ForestParams {
            n_estimators: 7,
            ..Default::default()
        };
        let m = ForestModel::fit(&params, x.view(), &y, 1, false).unwrap();
        let row = x.row(5);
        let per_tree = m.tree_predictions(row.as_slice().unwrap());
        let mean = per_tree.iter().sum::<f64>() / 7.0;
        assert_eq!(m.predict_row(row.as_slice().unwrap()), mean);
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let (x, y) = fixture();
        let params = ForestParams {
            n_estimators: 12,
            ..Default::default()
        };
        let a = ForestModel::fit(&params, x.view(), &y, 99, false).unwrap();
        let b = ForestModel::fit(&params, x.view(), &y, 99, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bootstrap_matches_fit_stream() {
        let s = bootstrap_sample(5, 2, 10);
        assert_eq!(s.len(), 10);
        assert_eq!(s, bootstrap_sample(5, 2, 10));
        assert_ne!(s, bootstrap_sample(5, 3, 10));
    }

    #[test]
    fn features_per_split_rounds_up() {
        let p = ForestParams::default();
        assert_eq!(p.features_per_split(79), 27);
        assert_eq!(p.features_per_split(1), 1);
        let all = ForestParams {
            feature_fraction: 1.0,
            ..Default::default()
        };
        assert_eq!(all.features_per_split(10), 10);
    }

    #[test]
    fn rejects_bad_params() {
        let (x, y) = fixture();
        for p in [
            ForestParams {
                n_estimators: 0,
                ..Default::default()
            },
            ForestParams {
                feature_fraction: 0.0,
                ..Default::default()
            },
            ForestParams {
                min_samples_leaf: 0,
                ..Default::default()
            },
        ] {
            assert!(ForestModel::fit(&p, x.view(), &y, 0, false).is_err());
        }
    }
}
