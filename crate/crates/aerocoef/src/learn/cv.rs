//! K-fold cross-validated hyper-parameter selection.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learn::data::TrainData;
use crate::learn::estimator::{fit, EstimatorSpec};
use crate::learn::forest::ForestModel;
use crate::rng;

const TAG_CV: u64 = 0xcf;
const TAG_CV_FIT: u64 = 0xcf17;

/// Everything the selection saw: per-candidate mean validation MSE, skipped
/// candidates with the reason, and the winner.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvRecord {
    pub candidates: Vec<(EstimatorSpec, f64)>,
    pub skipped: Vec<(EstimatorSpec, String)>,
    pub selected: EstimatorSpec,
    pub folds: usize,
    pub seed: u64,
}

fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = rng::stream(seed, &[TAG_CV]);
    idx.shuffle(&mut rng);
    let mut fold = vec![0usize; n];
    for (pos, &i) in idx.iter().enumerate() {
        fold[i] = pos % k;
    }
    fold
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64
}

/// Mean validation MSE of one candidate across the folds. `val` is passed
/// through for families that stop on it (gradient boosting).
fn candidate_score(
    spec: &EstimatorSpec,
    train: &TrainData,
    folds: &[usize],
    k: usize,
    val: Option<&TrainData>,
    seed: u64,
) -> Result<f64> {
    let mut total = 0.0;
    for f in 0..k {
        let fit_idx: Vec<usize> = (0..train.len()).filter(|&i| folds[i] != f).collect();
        let hold_idx: Vec<usize> = (0..train.len()).filter(|&i| folds[i] == f).collect();
        if fit_idx.is_empty() || hold_idx.is_empty() {
            return Err(Error::TooFewSamples { need: k, got: train.len() });
        }
        if let EstimatorSpec::Knn { neighbors, .. } = *spec {
            if neighbors > fit_idx.len() {
                return Err(Error::Invalid(format!(
                    "{neighbors} neighbors exceed the {} fold rows",
                    fit_idx.len()
                )));
            }
        }
        let fit_data = train.subset(&fit_idx);
        let hold_data = train.subset(&hold_idx);
        let est = fit(spec, &fit_data, val, rng::derive_key(seed, &[TAG_CV_FIT, f as u64]))?;
        let pred = est.predict(&hold_data.x)?;
        total += mse(&pred, &hold_data.y);
    }
    Ok(total / k as f64)
}

/// Forests share a prefix-evaluation fast path: for each depth, grow the
/// largest tree count once per fold and read every tree-count candidate off
/// the running prediction mean. Identical results to fitting each candidate
/// separately because tree `i` depends only on `(seed, i)`.
fn forest_scores(
    grid: &[EstimatorSpec],
    train: &TrainData,
    folds: &[usize],
    k: usize,
    seed: u64,
) -> Result<Vec<(EstimatorSpec, f64)>> {
    let mut depths: Vec<usize> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for spec in grid {
        if let EstimatorSpec::Forest { max_depth, n_trees } = *spec {
            if !depths.contains(&max_depth) {
                depths.push(max_depth);
            }
            if !counts.contains(&n_trees) {
                counts.push(n_trees);
            }
        }
    }
    counts.sort_unstable();
    let max_count = *counts.last().unwrap();

    // score_map[(depth, count)] summed over folds
    let scored: Result<Vec<Vec<f64>>> = depths
        .par_iter()
        .map(|&depth| {
            let mut per_count = vec![0.0; counts.len()];
            for f in 0..k {
                let fit_idx: Vec<usize> =
                    (0..train.len()).filter(|&i| folds[i] != f).collect();
                let hold_idx: Vec<usize> =
                    (0..train.len()).filter(|&i| folds[i] == f).collect();
                let fit_data = train.subset(&fit_idx);
                let hold_data = train.subset(&hold_idx);
                let forest = ForestModel::fit(
                    &fit_data.x,
                    &fit_data.y,
                    depth,
                    max_count,
                    rng::derive_key(seed, &[TAG_CV_FIT, f as u64]),
                )?;
                let prefix = forest.prefix_predictions(&hold_data.x);
                for (ci, &count) in counts.iter().enumerate() {
                    per_count[ci] += mse(&prefix[count - 1], &hold_data.y);
                }
            }
            Ok(per_count.iter().map(|v| v / k as f64).collect())
        })
        .collect();
    let scored = scored?;

    let mut out = Vec::with_capacity(grid.len());
    for spec in grid {
        if let EstimatorSpec::Forest { max_depth, n_trees } = *spec {
            let di = depths.iter().position(|&d| d == max_depth).unwrap();
            let ci = counts.iter().position(|&c| c == n_trees).unwrap();
            out.push((*spec, scored[di][ci]));
        }
    }
    Ok(out)
}

/// Pick the grid candidate with the lowest mean validation MSE over `k`
/// folds. Candidates that cannot run are skipped with a recorded warning;
/// ties go to the earliest (lowest-complexity) candidate. Deterministic for
/// a fixed seed.
pub fn cv_select(
    grid: &[EstimatorSpec],
    train: &TrainData,
    k: usize,
    seed: u64,
    val: Option<&TrainData>,
) -> Result<CvRecord> {
    if grid.is_empty() {
        return Err(Error::Invalid("empty hyper-parameter grid".into()));
    }
    if train.len() < k {
        return Err(Error::TooFewSamples { need: k, got: train.len() });
    }
    let folds = fold_assignment(train.len(), k, seed);

    let all_forest = grid.iter().all(|s| matches!(s, EstimatorSpec::Forest { .. }));
    let results: Vec<(EstimatorSpec, Result<f64>)> = if all_forest {
        match forest_scores(grid, train, &folds, k, seed) {
            Ok(scores) => scores.into_iter().map(|(s, m)| (s, Ok(m))).collect(),
            Err(e) => return Err(e),
        }
    } else {
        grid.par_iter()
            .map(|spec| (*spec, candidate_score(spec, train, &folds, k, val, seed)))
            .collect()
    };

    let mut candidates = Vec::new();
    let mut skipped = Vec::new();
    for (spec, res) in results {
        match res {
            Ok(score) => candidates.push((spec, score)),
            Err(e) => skipped.push((spec, e.to_string())),
        }
    }
    if candidates.is_empty() {
        return Err(Error::Invalid("every cross-validation candidate failed".into()));
    }
    let mut best = 0usize;
    for (i, c) in candidates.iter().enumerate() {
        if c.1 < candidates[best].1 {
            best = i;
        }
    }
    Ok(CvRecord { selected: candidates[best].0, candidates, skipped, folds: k, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::estimator::Family;
    use crate::learn::knn::KnnWeights;

    fn quartic_data(n: usize, noise: f64, seed: u64) -> TrainData {
        use rand::Rng;
        let mut rng = rng::stream(seed, &[0x9a]);
        let mut d = TrainData::default();
        for _ in 0..n {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let m: f64 = rng.gen_range(-1.0..1.0);
            let y = 1.0 + a + 0.5 * m + 2.0 * m * m * m * m
                + noise * rng.gen_range(-1.0..1.0);
            d.x.push([a, m]);
            d.y.push(y);
        }
        d
    }

    #[test]
    fn single_candidate_grid_selects_it() {
        let d = quartic_data(60, 0.0, 1);
        let grid = vec![EstimatorSpec::Tree { max_depth: 2 }];
        let rec = cv_select(&grid, &d, 3, 7, None).unwrap();
        assert_eq!(rec.selected, grid[0]);
        assert_eq!(rec.candidates.len(), 1);
    }

    #[test]
    fn quartic_signal_prefers_degree_at_least_four() {
        let d = quartic_data(400, 0.05, 3);
        let grid = EstimatorSpec::default_grid(Family::Polynomial);
        let rec = cv_select(&grid, &d, 3, 11, None).unwrap();
        match rec.selected {
            EstimatorSpec::Polynomial { degree } => assert!(degree >= 4, "picked {degree}"),
            _ => unreachable!(),
        }
    }

    #[test]
    fn oversized_neighbor_counts_are_skipped_not_fatal() {
        let d = quartic_data(30, 0.1, 5);
        let grid = vec![
            EstimatorSpec::Knn { neighbors: 5, weights: KnnWeights::Uniform },
            EstimatorSpec::Knn { neighbors: 500, weights: KnnWeights::Uniform },
        ];
        let rec = cv_select(&grid, &d, 3, 1, None).unwrap();
        assert_eq!(rec.candidates.len(), 1);
        assert_eq!(rec.skipped.len(), 1);
        assert!(rec.skipped[0].1.contains("exceed"));
    }

    #[test]
    fn exact_ties_resolve_to_the_earlier_candidate() {
        // Identical candidates produce bitwise-identical scores.
        let d = quartic_data(60, 0.0, 2);
        let grid = vec![
            EstimatorSpec::Tree { max_depth: 3 },
            EstimatorSpec::Tree { max_depth: 3 },
        ];
        let rec = cv_select(&grid, &d, 3, 9, None).unwrap();
        assert_eq!(rec.candidates[0].1, rec.candidates[1].1);
        assert_eq!(rec.selected, grid[0]);
    }

    #[test]
    fn selected_polynomial_nests_the_constant_on_train_mse() {
        let d = quartic_data(300, 0.3, 6);
        let grid = EstimatorSpec::default_grid(Family::Polynomial);
        let rec = cv_select(&grid, &d, 3, 4, None).unwrap();
        let poly = fit(&rec.selected, &d, None, 0).unwrap();
        let constant = fit(&EstimatorSpec::Constant, &d, None, 0).unwrap();
        let train_mse = |est: &crate::learn::estimator::TrainedEstimator| {
            let pred = est.predict(&d.x).unwrap();
            pred.iter().zip(&d.y).map(|(&p, &t)| (p - t) * (p - t)).sum::<f64>()
                / d.len() as f64
        };
        assert!(train_mse(&poly) <= train_mse(&constant));
    }

    #[test]
    fn noiseless_polynomial_ground_truth_recovered_below_1e8() {
        // Quartic data without noise: the selected polynomial interpolates.
        let d = quartic_data(300, 0.0, 12);
        let grid = EstimatorSpec::default_grid(Family::Polynomial);
        let rec = cv_select(&grid, &d, 3, 10, None).unwrap();
        let est = fit(&rec.selected, &d, None, 0).unwrap();
        let probe = quartic_data(100, 0.0, 13);
        let pred = est.predict(&probe.x).unwrap();
        let mae = pred
            .iter()
            .zip(&probe.y)
            .map(|(&p, &t)| (p - t).abs())
            .sum::<f64>()
            / probe.len() as f64;
        assert!(mae < 1e-8, "test MAE {mae:.3e}");
    }

    #[test]
    fn selection_is_deterministic_in_the_seed() {
        let d = quartic_data(200, 0.2, 8);
        let grid = EstimatorSpec::default_grid(Family::Tree);
        let a = cv_select(&grid, &d, 3, 42, None).unwrap();
        let b = cv_select(&grid, &d, 3, 42, None).unwrap();
        assert_eq!(a.selected, b.selected);
        assert_eq!(a.candidates, b.candidates);
    }

    #[test]
    fn forest_fast_path_matches_direct_scoring() {
        let d = quartic_data(120, 0.1, 4);
        let grid = vec![
            EstimatorSpec::Forest { max_depth: 2, n_trees: 20 },
            EstimatorSpec::Forest { max_depth: 2, n_trees: 50 },
        ];
        let folds = fold_assignment(d.len(), 3, 21);
        let fast = forest_scores(&grid, &d, &folds, 3, 21).unwrap();
        for (spec, score) in &fast {
            let direct = candidate_score(spec, &d, &folds, 3, None, 21).unwrap();
            assert!(
                (score - direct).abs() < 1e-12,
                "{spec:?}: fast {score} vs direct {direct}"
            );
        }
    }
}
