//! CART regression tree with exact greedy splits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf { value: f64 },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub nodes: Vec<Node>,
    pub max_depth: usize,
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
}

/// Best SSE-reducing split of the rows in `idx`, scanning both features in
/// sorted order. Ties resolve to the first feature and smallest threshold.
fn best_split(x: &[[f64; 2]], y: &[f64], idx: &[usize]) -> Option<Split> {
    let n = idx.len();
    if n < 2 {
        return None;
    }
    let total_sum: f64 = idx.iter().map(|&i| y[i]).sum();
    let mut best: Option<Split> = None;
    let mut order: Vec<usize> = idx.to_vec();
    for feature in 0..2 {
        order.sort_by(|&a, &b| {
            x[a][feature]
                .partial_cmp(&x[b][feature])
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        let total_sq: f64 = idx.iter().map(|&i| y[i] * y[i]).sum();
        for k in 0..n - 1 {
            let i = order[k];
            left_sum += y[i];
            left_sq += y[i] * y[i];
            let v = x[i][feature];
            let v_next = x[order[k + 1]][feature];
            if v_next <= v {
                continue;
            }
            let nl = (k + 1) as f64;
            let nr = (n - k - 1) as f64;
            let right_sum = total_sum - left_sum;
            let right_sq = total_sq - left_sq;
            // SSE = sum(y^2) - sum(y)^2/n per side.
            let score =
                (left_sq - left_sum * left_sum / nl) + (right_sq - right_sum * right_sum / nr);
            let threshold = 0.5 * (v + v_next);
            let better = match &best {
                None => true,
                Some(b) => score < b.score - 1e-15 * score.abs().max(1.0),
            };
            if better {
                best = Some(Split { feature, threshold, score });
            }
        }
    }
    best
}

impl TreeModel {
    pub fn fit(x: &[[f64; 2]], y: &[f64], max_depth: usize) -> Result<Self> {
        Self::fit_on(x, y, &(0..y.len()).collect::<Vec<_>>(), max_depth)
    }

    /// Fit on a subset of rows (used by the ensembles for bootstrap samples).
    pub fn fit_on(x: &[[f64; 2]], y: &[f64], idx: &[usize], max_depth: usize) -> Result<Self> {
        if idx.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut model = TreeModel { nodes: Vec::new(), max_depth };
        let root_idx: Vec<usize> = idx.to_vec();
        model.grow(x, y, root_idx, max_depth);
        Ok(model)
    }

    fn grow(&mut self, x: &[[f64; 2]], y: &[f64], idx: Vec<usize>, depth: usize) -> usize {
        let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len() as f64;
        if depth == 0 || idx.len() < 2 {
            self.nodes.push(Node::Leaf { value: mean });
            return self.nodes.len() - 1;
        }
        match best_split(x, y, &idx) {
            None => {
                self.nodes.push(Node::Leaf { value: mean });
                self.nodes.len() - 1
            }
            Some(split) => {
                let (li, ri): (Vec<usize>, Vec<usize>) =
                    idx.iter().partition(|&&i| x[i][split.feature] <= split.threshold);
                if li.is_empty() || ri.is_empty() {
                    self.nodes.push(Node::Leaf { value: mean });
                    return self.nodes.len() - 1;
                }
                let slot = self.nodes.len();
                self.nodes.push(Node::Leaf { value: mean }); // placeholder
                let left = self.grow(x, y, li, depth - 1);
                let right = self.grow(x, y, ri, depth - 1);
                self.nodes[slot] =
                    Node::Split { feature: split.feature, threshold: split.threshold, left, right };
                slot
            }
        }
    }

    pub fn predict_one(&self, row: [f64; 2]) -> f64 {
        let mut at = 0usize;
        loop {
            match self.nodes[at] {
                Node::Leaf { value } => return value,
                Node::Split { feature, threshold, left, right } => {
                    at = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth_used(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        if self.nodes.is_empty() { 0 } else { walk(&self.nodes, 0) }
    }
}
