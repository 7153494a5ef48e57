//! Epsilon-insensitive support vector regression with an RBF kernel, solved
//! in the single-coefficient dual
//!
//! ```text
//! minimise   ½ βᵀKβ − yᵀβ + ε Σ|β_i|
//! subject to Σ β_i = 0,  −C ≤ β_i ≤ C
//! ```
//!
//! by sequential pairwise optimisation: each step picks the maximal
//! violating pair and minimises the (piecewise quadratic) objective exactly
//! along `β_i += t, β_j −= t`.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kernel rows kept in memory, in bytes.
const KERNEL_CACHE_BYTES: usize = 512 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvrParams {
    pub c: f64,
    pub epsilon: f64,
    /// RBF width; `None` uses `1 / feature_count`.
    pub gamma: Option<f64>,
    pub tolerance: f64,
    /// Iteration cap, in multiples of the training-set size.
    pub max_passes: usize,
}

impl Default for SvrParams {
    fn default() -> Self {
        Self {
            c: 10.0,
            epsilon: 0.1,
            gamma: None,
            tolerance: 1e-3,
            max_passes: 100,
        }
    }
}

impl SvrParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidHyperparameters(format!("svr: {m}")));
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad("c must be > 0");
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be >= 0");
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return bad("gamma must be > 0");
            }
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad("tolerance must be > 0");
        }
        if self.max_passes == 0 {
            return bad("max_passes must be positive");
        }
        Ok(())
    }

    pub fn gamma_for(&self, n_features: usize) -> f64 {
        self.gamma.unwrap_or(1.0 / n_features.max(1) as f64)
    }
}

pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, z)| (x - z) * (x - z)).sum();
    (-gamma * d2).exp()
}

struct KernelCache<'a> {
    x: ArrayView2<'a, f64>,
    gamma: f64,
    parallel: bool,
    rows: HashMap<usize, Arc<Vec<f64>>>,
    fifo: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelCache<'a> {
    fn new(x: ArrayView2<'a, f64>, gamma: f64, parallel: bool) -> Self {
        let n = x.nrows().max(1);
        Self {
            x,
            gamma,
            parallel,
            rows: HashMap::new(),
            fifo: VecDeque::new(),
            capacity: (KERNEL_CACHE_BYTES / (8 * n)).max(2),
        }
    }

    fn row(&mut self, i: usize) -> Arc<Vec<f64>> {
        if let Some(r) = self.rows.get(&i) {
            return Arc::clone(r);
        }
        let xi = self.x.row(i);
        let xi = xi.as_slice().expect("row-major");
        let k = |j: usize| rbf(xi, self.x.row(j).as_slice().expect("row-major"), self.gamma);
        let n = self.x.nrows();
        let row: Vec<f64> = if self.parallel {
            (0..n).into_par_iter().map(k).collect()
        } else {
            (0..n).map(k).collect()
        };
        let row = Arc::new(row);
        if self.rows.len() >= self.capacity {
            if let Some(old) = self.fifo.pop_front() {
                self.rows.remove(&old);
            }
        }
        self.rows.insert(i, Arc::clone(&row));
        self.fifo.push_back(i);
        row
    }
}

/// Largest up-violation minus smallest down-violation, with the indices
/// attaining them. `f[i] = y_i − (Kβ)_i`.
fn violating_pair(beta: &[f64], f: &[f64], c: f64, eps: f64) -> (f64, usize, f64, usize) {
    let mut up = (f64::NEG_INFINITY, usize::MAX);
    let mut down = (f64::INFINITY, usize::MAX);
    for i in 0..beta.len() {
        let b = beta[i];
        if b < c {
            let m = if b >= 0.0 { f[i] - eps } else { f[i] + eps };
            if m > up.0 {
                up = (m, i);
            }
        }
        if b > -c {
            let m = if b <= 0.0 { f[i] + eps } else { f[i] - eps };
            if m < down.0 {
                down = (m, i);
            }
        }
    }
    (up.0, up.1, down.0, down.1)
}

/// KKT gap `max_up − min_down` of a candidate dual solution; zero or less
/// means optimal. Recomputes `Kβ` from scratch.
pub fn kkt_gap(x: ArrayView2<'_, f64>, y: &[f64], beta: &[f64], c: f64, eps: f64, gamma: f64) -> f64 {
    let f = residuals(x, y, beta, gamma);
    let (up, _, down, _) = violating_pair(beta, &f, c, eps);
    up - down
}

fn residuals(x: ArrayView2<'_, f64>, y: &[f64], beta: &[f64], gamma: f64) -> Vec<f64> {
    (0..y.len())
        .map(|i| {
            let xi = x.row(i);
            let xi = xi.as_slice().expect("row-major");
            let kb: f64 = (0..y.len())
                .filter(|&j| beta[j] != 0.0)
                .map(|j| beta[j] * rbf(xi, x.row(j).as_slice().expect("row-major"), gamma))
                .sum();
            y[i] - kb
        })
        .collect()
}

/// Dual objective `½βᵀKβ − yᵀβ + εΣ|β|`, evaluated directly.
pub fn dual_objective(
    x: ArrayView2<'_, f64>,
    y: &[f64],
    beta: &[f64],
    eps: f64,
    gamma: f64,
) -> f64 {
    let f = residuals(x, y, beta, gamma);
    objective_from_residuals(y, beta, &f, eps)
}

fn objective_from_residuals(y: &[f64], beta: &[f64], f: &[f64], eps: f64) -> f64 {
    let mut quad = 0.0;
    let mut lin = 0.0;
    let mut l1 = 0.0;
    for i in 0..y.len() {
        quad += beta[i] * (y[i] - f[i]);
        lin += y[i] * beta[i];
        l1 += beta[i].abs();
    }
    0.5 * quad - lin + eps * l1
}

/// Exact minimiser of `½ηt² + at + ε(|bi + t| + |bj − t|)` over `[lo, hi]`.
fn line_minimum(eta: f64, a: f64, eps: f64, bi: f64, bj: f64, lo: f64, hi: f64) -> f64 {
    let value = |t: f64| 0.5 * eta * t * t + a * t + eps * ((bi + t).abs() + (bj - t).abs());
    let mut knots = vec![lo, hi];
    for p in [-bi, bj] {
        if p > lo && p < hi {
            knots.push(p);
        }
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut best_t = 0.0f64.clamp(lo, hi);
    let mut best = value(best_t);
    let mut consider = |t: f64| {
        let v = value(t);
        if v < best || (v == best && t.abs() < best_t.abs()) {
            best = v;
            best_t = t;
        }
    };
    for w in knots.windows(2) {
        let (s, e) = (w[0], w[1]);
        consider(s);
        consider(e);
        if eta > 1e-12 {
            let mid = 0.5 * (s + e);
            let si = (bi + mid).signum();
            let sj = (bj - mid).signum();
            let t = (-(a + eps * (si - sj)) / eta).clamp(s, e);
            consider(t);
        }
    }
    if knots.len() == 1 {
        consider(knots[0]);
    }
    best_t
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    pub gamma: f64,
    pub bias: f64,
    /// Rows of the training points with non-zero coefficient.
    pub support: Array2<f64>,
    pub coefficients: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Final KKT gap (`max_up − min_down`).
    pub kkt_gap: f64,
}

/// Full dual solution, before compaction to support vectors.
#[derive(Debug, Clone)]
pub struct SvrSolution {
    pub beta: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub converged: bool,
    pub iterations: usize,
    pub kkt_gap: f64,
    pub objective: f64,
}

pub fn solve_dual(
    params: &SvrParams,
    x: ArrayView2<'_, f64>,
    y: &[f64],
    parallel: bool,
) -> Result<SvrSolution> {
    params.validate()?;
    let n = y.len();
    let gamma = params.gamma_for(x.ncols());
    let (c, eps, tol) = (params.c, params.epsilon, params.tolerance);
    let mut cache = KernelCache::new(x, gamma, parallel);
    let mut beta = vec![0.0; n];
    let mut f: Vec<f64> = y.to_vec();
    let cap = params.max_passes.saturating_mul(n.max(1));
    let mut iterations = 0;
    let mut converged = false;
    let mut gap;
    loop {
        let (up, i, down, j) = violating_pair(&beta, &f, c, eps);
        gap = up - down;
        if gap <= tol || i == usize::MAX || j == usize::MAX {
            converged = true;
            break;
        }
        if iterations >= cap {
            break;
        }
        iterations += 1;
        let ki = cache.row(i);
        let kj = cache.row(j);
        let eta = ki[i] + kj[j] - 2.0 * ki[j];
        let lo = (-c - beta[i]).max(beta[j] - c);
        let hi = (c - beta[i]).min(beta[j] + c);
        let t = line_minimum(eta, f[j] - f[i], eps, beta[i], beta[j], lo, hi);
        if t == 0.0 {
            // Numerically stalled pair; no further progress is possible.
            break;
        }
        beta[i] = (beta[i] + t).clamp(-c, c);
        beta[j] = (beta[j] - t).clamp(-c, c);
        for k in 0..n {
            f[k] -= t * (ki[k] - kj[k]);
        }
    }
    let (up, _, down, _) = violating_pair(&beta, &f, c, eps);
    let bias = intercept(&beta, &f, c, eps, up, down);
    let objective = objective_from_residuals(y, &beta, &f, eps);
    Ok(SvrSolution {
        beta,
        bias,
        gamma,
        converged,
        iterations,
        kkt_gap: gap,
        objective,
    })
}

/// Mean of `f_i − ε·sign(β_i)` over coefficients strictly inside the box;
/// midpoint of the feasible interval when there are none.
fn intercept(beta: &[f64], f: &[f64], c: f64, eps: f64, up: f64, down: f64) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (b, fi) in beta.iter().zip(f) {
        if *b != 0.0 && b.abs() < c {
            sum += fi - eps * b.signum();
            count += 1;
        }
    }
    if count > 0 {
        sum / count as f64
    } else if up.is_finite() && down.is_finite() {
        0.5 * (up + down)
    } else if up.is_finite() {
        up
    } else {
        down
    }
}

impl SvrModel {
    pub fn fit(params: &SvrParams, x: ArrayView2<'_, f64>, y: &[f64], parallel: bool) -> Result<Self> {
        let sol = solve_dual(params, x, y, parallel)?;
        let keep: Vec<usize> = (0..y.len()).filter(|&i| sol.beta[i] != 0.0).collect();
        Ok(Self {
            gamma: sol.gamma,
            bias: sol.bias,
            support: x.select(ndarray::Axis(0), &keep),
            coefficients: keep.iter().map(|&i| sol.beta[i]).collect(),
            converged: sol.converged,
            iterations: sol.iterations,
            kkt_gap: sol.kkt_gap,
        })
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.bias
            + self
                .coefficients
                .iter()
                .zip(self.support.rows())
                .map(|(b, s)| b * rbf(s.as_slice().expect("row-major"), row, self.gamma))
                .sum::<f64>()
    }

    pub(crate) fn sections(&self) -> Vec<(String, Vec<f64>)> {
        vec![
            (
                "svr.header".to_string(),
                vec![
                    self.gamma,
                    self.bias,
                    self.support.nrows() as f64,
                    self.support.ncols() as f64,
                    if self.converged { 1.0 } else { 0.0 },
                    self.iterations as f64,
                    self.kkt_gap,
                ],
            ),
            (
                "svr.support".to_string(),
                self.support.iter().copied().collect(),
            ),
            ("svr.coefficients".to_string(), self.coefficients.clone()),
        ]
    }

    pub(crate) fn from_sections(sections: &HashMap<String, Vec<f64>>) -> Result<Self> {
        let bad = |m: &str| Error::MalformedModel(format!("svr: {m}"));
        let h = sections
            .get("svr.header")
            .filter(|h| h.len() == 7)
            .ok_or_else(|| bad("missing header"))?;
        let (rows, cols) = (h[2] as usize, h[3] as usize);
        let support = sections.get("svr.support").ok_or_else(|| bad("missing support"))?;
        let coefficients = sections
            .get("svr.coefficients")
            .ok_or_else(|| bad("missing coefficients"))?;
        if support.len() != rows * cols || coefficients.len() != rows {
            return Err(bad("array sizes disagree with header"));
        }
        Ok(Self {
            gamma: h[0],
            bias: h[1],
            support: Array2::from_shape_vec((rows, cols), support.clone())
                .map_err(|e| bad(&e.to_string()))?,
            coefficients: coefficients.clone(),
            converged: h[4] != 0.0,
            iterations: h[5] as usize,
            kkt_gap: h[6],
        })
    }
}
