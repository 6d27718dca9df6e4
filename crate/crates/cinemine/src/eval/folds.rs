//! Stratified fold assignment.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::PopularityClass;

use super::EvalError;

/// Partition `0..classes.len()` into `k` folds so that per-class counts
/// across folds differ by at most one. Instances of each class are shuffled
/// (one seeded stream shared across classes, taken in label order) and dealt
/// round-robin; each fold is then sorted for stable output.
pub fn stratified_folds(
    classes: &[PopularityClass],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, EvalError> {
    if k < 2 {
        return Err(EvalError::TooFewFolds(k));
    }
    if k > classes.len() {
        return Err(EvalError::TooManyFolds {
            k,
            n: classes.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    let mut folds = vec![Vec::new(); k];
    for label in PopularityClass::ALL {
        let mut members: Vec<usize> = (0..classes.len())
            .filter(|&i| classes[i] == label)
            .collect();
        members.shuffle(&mut rng);
        for (i, idx) in members.into_iter().enumerate() {
            folds[i % k].push(idx);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}
