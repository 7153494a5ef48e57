//! Brute-force reference implementations shared by the integration tests.
//! None of these reuse library code paths.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

/// Neumaier-compensated sum.
pub fn ksum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn oracle_rmse(a: &[f64], p: &[f64]) -> f64 {
    let n = a.len() as f64;
    (ksum((0..a.len()).map(|i| (p[i] - a[i]) * (p[i] - a[i]))) / n).sqrt()
}

pub fn oracle_mape(a: &[f64], p: &[f64]) -> f64 {
    ksum((0..a.len()).map(|i| (1.0 - p[i] / a[i]).abs())) / a.len() as f64
}

pub fn oracle_mpe(a: &[f64], p: &[f64]) -> f64 {
    ksum((0..a.len()).map(|i| {
        let d = p[i] - a[i];
        (d.abs() + d) / 2.0
    })) / a.len() as f64
}

pub fn oracle_mae(a: &[f64], p: &[f64]) -> f64 {
    ksum((0..a.len()).map(|i| (p[i] - a[i]).abs())) / a.len() as f64
}

pub fn rel_close(x: f64, y: f64, rtol: f64) -> bool {
    x == y || (x - y).abs() <= rtol * x.abs().max(y.abs())
}

/// Regression tree produced by exhaustive split enumeration.
#[derive(Debug, Clone)]
pub enum OracleTree {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<OracleTree>,
        right: Box<OracleTree>,
    },
}

impl OracleTree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        match self {
            OracleTree::Leaf(v) => *v,
            OracleTree::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if row[*feature] <= *threshold {
                    left.predict(row)
                } else {
                    right.predict(row)
                }
            }
        }
    }

    pub fn leaves(&self) -> Vec<f64> {
        match self {
            OracleTree::Leaf(v) => vec![*v],
            OracleTree::Split { left, right, .. } => {
                let mut l = left.leaves();
                l.extend(right.leaves());
                l
            }
        }
    }
}

/// Every midpoint between consecutive distinct values of `feature` among
/// `rows`, ascending.
fn thresholds(x: &[Vec<f64>], rows: &[usize], feature: usize) -> Vec<f64> {
    let mut v: Vec<f64> = rows.iter().map(|&r| x[r][feature]).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect()
}

pub struct SecondOrder<'a> {
    pub grad: &'a [f64],
    pub hess: &'a [f64],
    pub lambda: f64,
    pub min_child_weight: f64,
    pub max_depth: Option<usize>,
}

/// Regularised second-order tree: leaf `−G/(H+λ)`, split on the largest
/// strictly positive gain, recomputing every sum from scratch.
pub fn second_order_tree(x: &[Vec<f64>], rows: &[usize], p: &SecondOrder, depth: usize) -> OracleTree {
    let g: f64 = rows.iter().map(|&r| p.grad[r]).sum();
    let h: f64 = rows.iter().map(|&r| p.hess[r]).sum();
    let leaf = OracleTree::Leaf(-g / (h + p.lambda));
    if p.max_depth.is_some_and(|m| depth >= m) || rows.len() < 2 {
        return leaf;
    }
    let score = |set: &[usize]| {
        let g: f64 = set.iter().map(|&r| p.grad[r]).sum();
        let h: f64 = set.iter().map(|&r| p.hess[r]).sum();
        (g * g / (h + p.lambda), h)
    };
    let (parent, _) = score(rows);
    let mut best: Option<(f64, usize, f64)> = None;
    for f in 0..x[0].len() {
        for t in thresholds(x, rows, f) {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[i][f] <= t);
            let (sl, hl) = score(&l);
            let (sr, hr) = score(&r);
            if hl < p.min_child_weight || hr < p.min_child_weight {
                continue;
            }
            let gain = sl + sr - parent;
            if gain > 0.0 && best.is_none_or(|b| gain > b.0) {
                best = Some((gain, f, t));
            }
        }
    }
    match best {
        None => leaf,
        Some((_, f, t)) => {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[i][f] <= t);
            OracleTree::Split {
                feature: f,
                threshold: t,
                left: Box::new(second_order_tree(x, &l, p, depth + 1)),
                right: Box::new(second_order_tree(x, &r, p, depth + 1)),
            }
        }
    }
}

/// Stagewise boosting with [`second_order_tree`]; returns base score and
/// trees.
pub fn boosted(
    x: &[Vec<f64>],
    y: &[f64],
    stages: usize,
    rate: f64,
    lambda: f64,
    min_child_weight: f64,
    max_depth: usize,
) -> (f64, Vec<OracleTree>) {
    let n = y.len();
    let base = y.iter().sum::<f64>() / n as f64;
    let mut pred = vec![base; n];
    let hess = vec![1.0; n];
    let rows: Vec<usize> = (0..n).collect();
    let mut trees = Vec::new();
    for _ in 0..stages {
        let grad: Vec<f64> = (0..n).map(|i| pred[i] - y[i]).collect();
        let tree = second_order_tree(
            x,
            &rows,
            &SecondOrder {
                grad: &grad,
                hess: &hess,
                lambda,
                min_child_weight,
                max_depth: Some(max_depth),
            },
            0,
        );
        for i in 0..n {
            pred[i] += rate * tree.predict(&x[i]);
        }
        trees.push(tree);
    }
    (base, trees)
}

fn sse(y: &[f64], set: &[usize]) -> f64 {
    if set.is_empty() {
        return 0.0;
    }
    let m = set.iter().map(|&i| y[i]).sum::<f64>() / set.len() as f64;
    set.iter().map(|&i| (y[i] - m).powi(2)).sum()
}

/// CART regression tree: leaf means, split minimising the children's summed
/// squared error, both children holding at least `min_leaf` rows.
pub fn cart(x: &[Vec<f64>], y: &[f64], rows: &[usize], min_leaf: usize) -> OracleTree {
    let mean = rows.iter().map(|&i| y[i]).sum::<f64>() / rows.len() as f64;
    let parent = sse(y, rows);
    let mut best: Option<(f64, usize, f64)> = None;
    for f in 0..x[0].len() {
        for t in thresholds(x, rows, f) {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[i][f] <= t);
            if l.len() < min_leaf || r.len() < min_leaf {
                continue;
            }
            let child = sse(y, &l) + sse(y, &r);
            if child < parent - 1e-12 && best.is_none_or(|b| child < b.0) {
                best = Some((child, f, t));
            }
        }
    }
    match best {
        None => OracleTree::Leaf(mean),
        Some((_, f, t)) => {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[i][f] <= t);
            OracleTree::Split {
                feature: f,
                threshold: t,
                left: Box::new(cart(x, y, &l, min_leaf)),
                right: Box::new(cart(x, y, &r, min_leaf)),
            }
        }
    }
}

pub fn rbf_matrix(x: &[Vec<f64>], gamma: f64) -> DMatrix<f64> {
    let n = x.len();
    DMatrix::from_fn(n, n, |i, j| {
        let d2: f64 = x[i].iter().zip(&x[j]).map(|(a, b)| (a - b).powi(2)).sum();
        (-gamma * d2).exp()
    })
}

pub fn svr_objective(k: &DMatrix<f64>, y: &[f64], beta: &[f64], eps: f64) -> f64 {
    let b = DVector::from_column_slice(beta);
    0.5 * (b.transpose() * k * &b)[(0, 0)]
        - y.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>()
        + eps * beta.iter().map(|v| v.abs()).sum::<f64>()
}

/// Global minimum of the epsilon-insensitive dual
/// `½βᵀKβ − yᵀβ + ε‖β‖₁` subject to `Σβ = 0`, `−C ≤ β ≤ C`, found by
/// enumerating every face of the box × sign pattern and solving its
/// stationarity system exactly. Exponential in `n`; meant for n ≤ 6.
pub fn svr_active_set(k: &DMatrix<f64>, y: &[f64], c: f64, eps: f64) -> (f64, Vec<f64>) {
    let n = y.len();
    // 0: −C, 1: free negative, 2: zero, 3: free positive, 4: +C.
    let mut best = (f64::INFINITY, vec![0.0; n]);
    let total = 5usize.pow(n as u32);
    for code in 0..total {
        let mut state = vec![0usize; n];
        let mut rest = code;
        for s in state.iter_mut() {
            *s = rest % 5;
            rest /= 5;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 1 || state[i] == 3).collect();
        let mut beta: Vec<f64> = state
            .iter()
            .map(|s| match s {
                0 => -c,
                4 => c,
                _ => 0.0,
            })
            .collect();
        let fixed_sum: f64 = beta.iter().sum();
        if free.is_empty() {
            if fixed_sum.abs() > 1e-12 {
                continue;
            }
        } else {
            let m = free.len();
            let mut a = DMatrix::zeros(m + 1, m + 1);
            let mut rhs = DVector::zeros(m + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[(r, s)] = k[(i, j)];
                }
                a[(r, m)] = 1.0;
                let sign = if state[i] == 3 { 1.0 } else { -1.0 };
                let fixed: f64 = (0..n).map(|j| k[(i, j)] * beta[j]).sum();
                rhs[r] = y[i] - eps * sign - fixed;
                a[(m, r)] = 1.0;
            }
            rhs[m] = -fixed_sum;
            let Some(sol) = a.lu().solve(&rhs) else {
                continue;
            };
            let mut feasible = true;
            for (r, &i) in free.iter().enumerate() {
                let v = sol[r];
                let ok = if state[i] == 3 {
                    v > 0.0 && v < c
                } else {
                    v < 0.0 && v > -c
                };
                feasible &= ok;
                beta[i] = v;
            }
            if !feasible {
                continue;
            }
        }
        let obj = svr_objective(k, y, &beta, eps);
        if obj < best.0 {
            best = (obj, beta);
        }
    }
    best
}

/// Ordinary least squares with an intercept via the normal equations,
/// pseudo-inverted so collinear indicator groups are harmless. Returns a
/// predictor closure's coefficients: `[intercept, w...]`.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let d = rows[0].len() + 1;
    let mut xtx = DMatrix::<f64>::zeros(d, d);
    let mut xty = DVector::<f64>::zeros(d);
    let mut z = vec![0.0; d];
    for (r, t) in rows.iter().zip(y) {
        z[0] = 1.0;
        z[1..].copy_from_slice(r);
        for i in 0..d {
            xty[i] += z[i] * t;
            for j in 0..d {
                xtx[(i, j)] += z[i] * z[j];
            }
        }
    }
    let svd = xtx.svd(true, true);
    let tol = 1e-10 * svd.singular_values.max();
    svd.solve(&xty, tol).expect("svd solve").iter().copied().collect()
}

pub fn least_squares_predict(w: &[f64], row: &[f64]) -> f64 {
    w[0] + w[1..].iter().zip(row).map(|(a, b)| a * b).sum::<f64>()
}
