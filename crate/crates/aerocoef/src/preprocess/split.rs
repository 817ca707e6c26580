//! Random train/validation/test partitioning.

use rand::seq::SliceRandom;

use crate::dataset::{Dataset, SplitSet};
use crate::error::{Error, Result};
use crate::rng;

const SPLIT_TAG: u64 = 0x5e17;

/// Uniform random partition of the dataset indices. Deterministic for a
/// fixed seed. Partition sizes are the rounded fraction targets, with the
/// test set absorbing the remainder.
///
/// With `by_flight` set, whole flights are assigned to partitions instead of
/// individual observations, which avoids within-flight leakage.
pub fn split(
    dataset: &Dataset,
    fractions: [f64; 3],
    seed: u64,
    by_flight: bool,
) -> Result<SplitSet> {
    let n = dataset.len();
    if n < 3 {
        return Err(Error::TooFewSamples { need: 3, got: n });
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || fractions.iter().any(|&f| f <= 0.0) {
        return Err(Error::Config(format!(
            "split fractions must be positive and sum to 1, got {fractions:?}"
        )));
    }
    let mut rng = rng::stream(seed, &[SPLIT_TAG]);

    let (mut train, mut validation, mut test) = if by_flight {
        // Group indices per flight, shuffle flights, then fill the partition
        // with the largest remaining deficit.
        let mut flights: Vec<(String, Vec<usize>)> = Vec::new();
        for (i, o) in dataset.observations.iter().enumerate() {
            match flights.iter_mut().find(|(id, _)| *id == o.flight_id) {
                Some((_, v)) => v.push(i),
                None => flights.push((o.flight_id.clone(), vec![i])),
            }
        }
        flights.shuffle(&mut rng);
        let targets = [fractions[0] * n as f64, fractions[1] * n as f64, fractions[2] * n as f64];
        let mut parts: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for (_, idxs) in flights {
            let deficits: Vec<f64> =
                (0..3).map(|p| targets[p] - parts[p].len() as f64).collect();
            let p = deficits
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(i, _)| i)
                .unwrap();
            parts[p].extend(idxs);
        }
        let [a, b, c] = parts;
        (a, b, c)
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let n_train = (fractions[0] * n as f64).round() as usize;
        let n_val = (fractions[1] * n as f64).round() as usize;
        let n_train = n_train.min(n);
        let n_val = n_val.min(n - n_train);
        let test = idx.split_off(n_train + n_val);
        let validation = idx.split_off(n_train);
        (idx, validation, test)
    };

    train.sort_unstable();
    validation.sort_unstable();
    test.sort_unstable();
    Ok(SplitSet { train, validation, test, seed })
}
