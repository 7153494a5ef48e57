//! Exact greedy regression tree shared by the boosted ensemble and the forest.
//!
//! Splits maximise the second-order gain
//! `G_L²/(H_L+λ) + G_R²/(H_R+λ) − G²/(H+λ)`; with unit hessians and λ = 0
//! this is the variance (SSE) reduction used by CART. Candidate thresholds
//! are midpoints between consecutive distinct values; a row goes left when
//! `x <= threshold`. Ties keep the lowest feature index, then the lowest
//! threshold.

use ndarray::ArrayView2;
use rand::seq::index::sample;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub min_child_weight: f64,
    pub lambda: f64,
    /// Features examined per split; `None` means all.
    pub max_features: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    /// `usize::MAX` marks a leaf.
    pub feature: usize,
    pub threshold: f64,
    pub left: usize,
    pub right: usize,
    pub value: f64,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.feature == usize::MAX
    }

    fn leaf(value: f64) -> Self {
        Node {
            feature: usize::MAX,
            threshold: 0.0,
            left: 0,
            right: 0,
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTree {
    pub nodes: Vec<Node>,
}

impl RegressionTree {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut idx = 0;
        loop {
            let node = &self.nodes[idx];
            if node.is_leaf() {
                return node.value;
            }
            idx = if row[node.feature] <= node.threshold {
                node.left
            } else {
                node.right
            };
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            if nodes[i].is_leaf() {
                0
            } else {
                1 + walk(nodes, nodes[i].left).max(walk(nodes, nodes[i].right))
            }
        }
        walk(&self.nodes, 0)
    }

    /// Flattens into `[feature, threshold, left, right, value]` per node.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nodes.len() * 5);
        for n in &self.nodes {
            let feature = if n.is_leaf() { -1.0 } else { n.feature as f64 };
            out.extend_from_slice(&[feature, n.threshold, n.left as f64, n.right as f64, n.value]);
        }
        out
    }

    pub fn from_flat(flat: &[f64]) -> Option<Self> {
        if !flat.len().is_multiple_of(5) || flat.is_empty() {
            return None;
        }
        let count = flat.len() / 5;
        let mut nodes = Vec::with_capacity(count);
        for c in flat.chunks_exact(5) {
            let as_index = |v: f64| -> Option<usize> {
                (v >= 0.0 && v.fract() == 0.0 && (v as usize) < count).then_some(v as usize)
            };
            let node = if c[0] == -1.0 {
                Node::leaf(c[4])
            } else {
                Node {
                    feature: (c[0] >= 0.0 && c[0].fract() == 0.0).then_some(c[0] as usize)?,
                    threshold: c[1],
                    left: as_index(c[2])?,
                    right: as_index(c[3])?,
                    value: c[4],
                }
            };
            nodes.push(node);
        }
        Some(Self { nodes })
    }
}

/// Row orderings of every feature, computed once per training matrix.
#[derive(Debug, Clone)]
pub struct Presorted {
    /// `order[f]` lists row indices by ascending value of feature `f`
    /// (ties by row index).
    order: Vec<Vec<u32>>,
}

impl Presorted {
    pub fn new(x: ArrayView2<'_, f64>) -> Self {
        let order = (0..x.ncols())
            .map(|f| {
                let col = x.column(f);
                let mut idx: Vec<u32> = (0..x.nrows() as u32).collect();
                idx.sort_by(|&a, &b| {
                    col[a as usize]
                        .total_cmp(&col[b as usize])
                        .then(a.cmp(&b))
                });
                idx
            })
            .collect();
        Self { order }
    }
}

#[derive(Clone, Copy)]
struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

struct Builder<'a, R> {
    x: ArrayView2<'a, f64>,
    /// Row of each sample slot.
    rows: &'a [u32],
    grad: &'a [f64],
    hess: &'a [f64],
    cfg: TreeConfig,
    /// `order[f][start..end]` holds the slots of the node in ascending
    /// order of feature `f`.
    order: Vec<Vec<u32>>,
    goes_left: Vec<bool>,
    scratch: Vec<u32>,
    nodes: Vec<Node>,
    rng: Option<&'a mut R>,
}

/// Grows one tree.
///
/// `rows` lists the training rows of each sample slot (duplicates allowed,
/// e.g. a bootstrap sample). `grad`/`hess` are indexed by row. Leaf values
/// are `offset − G/(H+λ)`. `rng` draws the per-split feature subset when
/// `cfg.max_features` is below the feature count.
#[allow(clippy::too_many_arguments)]
pub fn grow<R: Rng>(
    x: ArrayView2<'_, f64>,
    presorted: &Presorted,
    rows: &[u32],
    grad: &[f64],
    hess: &[f64],
    cfg: TreeConfig,
    offset: f64,
    rng: Option<&mut R>,
) -> RegressionTree {
    let n_features = x.ncols();
    let order = slot_orders(presorted, rows, x.nrows());
    let mut b = Builder {
        x,
        rows,
        grad,
        hess,
        cfg,
        order,
        goes_left: vec![false; rows.len()],
        scratch: Vec::with_capacity(rows.len()),
        nodes: Vec::new(),
        rng,
    };
    debug_assert_eq!(b.order.len(), n_features);
    if rows.is_empty() {
        return RegressionTree {
            nodes: vec![Node::leaf(offset)],
        };
    }
    b.nodes.push(Node::leaf(0.0));
    // Depth-first with an explicit stack; children are pushed right first so
    // the left subtree is expanded first.
    let mut stack = vec![(0usize, 0usize, rows.len(), 0usize)];
    while let Some((id, start, end, depth)) = stack.pop() {
        let (g, h) = b.totals(start, end);
        let leaf_value = offset - g / (h + cfg.lambda);
        let can_split = cfg.max_depth.is_none_or(|m| depth < m)
            && end - start >= 2 * cfg.min_samples_leaf.max(1);
        let split = if can_split {
            b.best_split(start, end, g, h)
        } else {
            None
        };
        match split {
            None => b.nodes[id] = Node::leaf(leaf_value),
            Some(s) => {
                let mid = b.partition(start, end, s);
                let left = b.nodes.len();
                b.nodes.push(Node::leaf(0.0));
                let right = b.nodes.len();
                b.nodes.push(Node::leaf(0.0));
                b.nodes[id] = Node {
                    feature: s.feature,
                    threshold: s.threshold,
                    left,
                    right,
                    value: leaf_value,
                };
                stack.push((right, mid, end, depth + 1));
                stack.push((left, start, mid, depth + 1));
            }
        }
    }
    RegressionTree { nodes: b.nodes }
}

/// Expands the global row orderings into per-feature slot orderings for a
/// (possibly repeated) sample of rows.
fn slot_orders(presorted: &Presorted, rows: &[u32], n_rows: usize) -> Vec<Vec<u32>> {
    // slots_of[row] via CSR layout.
    let mut counts = vec![0u32; n_rows + 1];
    for &r in rows {
        counts[r as usize + 1] += 1;
    }
    for i in 1..counts.len() {
        counts[i] += counts[i - 1];
    }
    let mut fill = counts.clone();
    let mut slots = vec![0u32; rows.len()];
    for (slot, &r) in rows.iter().enumerate() {
        slots[fill[r as usize] as usize] = slot as u32;
        fill[r as usize] += 1;
    }
    presorted
        .order
        .iter()
        .map(|ord| {
            let mut out = Vec::with_capacity(rows.len());
            for &r in ord {
                let (a, b) = (counts[r as usize], counts[r as usize + 1]);
                out.extend_from_slice(&slots[a as usize..b as usize]);
            }
            out
        })
        .collect()
}

impl<R: Rng> Builder<'_, R> {
    fn totals(&self, start: usize, end: usize) -> (f64, f64) {
        let mut g = 0.0;
        let mut h = 0.0;
        for &slot in &self.order[0][start..end] {
            let r = self.rows[slot as usize] as usize;
            g += self.grad[r];
            h += self.hess[r];
        }
        (g, h)
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.order.len();
        match (self.cfg.max_features, self.rng.as_deref_mut()) {
            (Some(k), Some(rng)) if k < d => {
                let mut f = sample(rng, d, k).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    fn best_split(&mut self, start: usize, end: usize, g: f64, h: f64) -> Option<Split> {
        let lambda = self.cfg.lambda;
        let parent = g * g / (h + lambda);
        let min_leaf = self.cfg.min_samples_leaf.max(1);
        let mcw = self.cfg.min_child_weight;
        let count = end - start;
        let mut best: Option<Split> = None;
        for f in self.candidate_features() {
            let ord = &self.order[f][start..end];
            let col = self.x.column(f);
            let value_of = |slot: u32| col[self.rows[slot as usize] as usize];
            if value_of(ord[0]) == value_of(ord[count - 1]) {
                continue;
            }
            let mut gl = 0.0;
            let mut hl = 0.0;
            for i in 0..count - 1 {
                let r = self.rows[ord[i] as usize] as usize;
                gl += self.grad[r];
                hl += self.hess[r];
                let left_n = i + 1;
                if left_n < min_leaf {
                    continue;
                }
                if count - left_n < min_leaf {
                    break;
                }
                let a = value_of(ord[i]);
                let b = value_of(ord[i + 1]);
                if a == b {
                    continue;
                }
                let hr = h - hl;
                if hl < mcw || hr < mcw {
                    continue;
                }
                let gr = g - gl;
                let gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent;
                if gain > 0.0 && best.is_none_or(|s| gain > s.gain) {
                    best = Some(Split {
                        feature: f,
                        threshold: midpoint(a, b),
                        gain,
                    });
                }
            }
        }
        best
    }

    /// Stable-partitions every feature ordering of the node; returns the
    /// boundary between the left and right children.
    fn partition(&mut self, start: usize, end: usize, split: Split) -> usize {
        let col = self.x.column(split.feature);
        let mut left_count = 0;
        for &slot in &self.order[0][start..end] {
            let left = col[self.rows[slot as usize] as usize] <= split.threshold;
            self.goes_left[slot as usize] = left;
            left_count += left as usize;
        }
        for ord in self.order.iter_mut() {
            let seg = &mut ord[start..end];
            self.scratch.clear();
            let mut w = 0;
            for i in 0..seg.len() {
                let slot = seg[i];
                if self.goes_left[slot as usize] {
                    seg[w] = slot;
                    w += 1;
                } else {
                    self.scratch.push(slot);
                }
            }
            seg[w..].copy_from_slice(&self.scratch);
        }
        start + left_count
    }
}

/// Midpoint of two distinct floats that still separates them.
fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m >= b {
        a
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> TreeConfig {
        TreeConfig {
            max_depth: None,
            min_samples_leaf: 1,
            min_child_weight: 0.0,
            lambda: 0.0,
            max_features: None,
        }
    }

    #[test]
    fn grows_to_purity() {
        let x = array![[1.0], [2.0], [3.0], [4.0]];
        let y = [1.0, 5.0, 2.0, 8.0];
        let grad: Vec<f64> = y.iter().map(|v| -v).collect();
        let hess = vec![1.0; 4];
        let rows: Vec<u32> = (0..4).collect();
        let tree = grow::<ChaCha8Rng>(
            x.view(),
            &Presorted::new(x.view()),
            &rows,
            &grad,
            &hess,
            cfg(),
            0.0,
            None,
        );
        for (i, yi) in y.iter().enumerate() {
            assert_eq!(tree.predict_row(&[x[[i, 0]]]), *yi);
        }
        assert_eq!(tree.leaf_count(), 4);
    }

    #[test]
    fn constant_gradient_makes_single_leaf() {
        let x = array![[1.0, 3.0], [2.0, 1.0], [3.0, 2.0]];
        let rows: Vec<u32> = (0..3).collect();
        let tree = grow::<ChaCha8Rng>(
            x.view(),
            &Presorted::new(x.view()),
            &rows,
            &[0.0; 3],
            &[1.0; 3],
            cfg(),
            7.5,
            None,
        );
        assert_eq!(tree.nodes.len(), 1);
        assert_eq!(tree.predict_row(&[0.0, 0.0]), 7.5);
    }

    #[test]
    fn depth_limit_respected() {
        let x = array![[1.0], [2.0], [3.0], [4.0], [5.0], [6.0]];
        let grad = [-1.0, -4.0, -2.0, -9.0, -3.0, -7.0];
        let rows: Vec<u32> = (0..6).collect();
        let mut c = cfg();
        c.max_depth = Some(2);
        let tree = grow::<ChaCha8Rng>(
            x.view(),
            &Presorted::new(x.view()),
            &rows,
            &grad,
            &[1.0; 6],
            c,
            0.0,
            None,
        );
        assert!(tree.depth() <= 2);
    }

    #[test]
    fn duplicated_slots_count_twice() {
        let x = array![[0.0], [1.0]];
        // Row 1 appears twice: leaf of row 1 still has mean = its target.
        let rows = [0u32, 1, 1];
        let grad = [-2.0, -6.0];
        let mut c = cfg();
        c.min_samples_leaf = 2;
        let tree = grow::<ChaCha8Rng>(
            x.view(),
            &Presorted::new(x.view()),
            &rows,
            &grad,
            &[1.0, 1.0],
            c,
            0.0,
            None,
        );
        // min_samples_leaf = 2 forbids separating the single row 0.
        assert_eq!(tree.nodes.len(), 1);
        assert!((tree.predict_row(&[0.0]) - (2.0 + 6.0 + 6.0) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn flat_round_trip() {
        let x = array![[1.0], [2.0], [3.0]];
        let rows: Vec<u32> = (0..3).collect();
        let tree = grow::<ChaCha8Rng>(
            x.view(),
            &Presorted::new(x.view()),
            &rows,
            &[-1.0, -2.0, -4.0],
            &[1.0; 3],
            cfg(),
            0.0,
            None,
        );
        assert_eq!(RegressionTree::from_flat(&tree.to_flat()).unwrap(), tree);
        assert!(RegressionTree::from_flat(&[1.0, 2.0]).is_none());
    }

    #[test]
    fn midpoint_separates_adjacent_floats() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let m = midpoint(a, b);
        assert!(a <= m && m < b);
        assert_eq!(midpoint(1.0, 3.0), 2.0);
    }
}
