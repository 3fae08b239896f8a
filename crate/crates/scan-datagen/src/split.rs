use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::DatagenError;

/// Choose `train_count` indices uniformly without replacement from
/// `0..total`. Both returned index lists are sorted ascending and disjoint;
/// the second is the complement.
pub fn split_indices(
    total: usize,
    train_count: usize,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), DatagenError> {
    if train_count > total {
        return Err(DatagenError::TrainCountExceedsTotal {
            train: train_count,
            total,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..total).collect();
    indices.shuffle(&mut rng);
    let mut train: Vec<usize> = indices[..train_count].to_vec();
    let mut validation: Vec<usize> = indices[train_count..].to_vec();
    train.sort_unstable();
    validation.sort_unstable();
    Ok((train, validation))
}

/// Split a sample slice into seeded train and validation subsets.
pub fn subsample_split<T: Clone>(
    samples: &[T],
    train_count: usize,
    seed: u64,
) -> Result<(Vec<T>, Vec<T>), DatagenError> {
    let (train_idx, val_idx) = split_indices(samples.len(), train_count, seed)?;
    let train = train_idx.iter().map(|&i| samples[i].clone()).collect();
    let validation = val_idx.iter().map(|&i| samples[i].clone()).collect();
    Ok((train, validation))
}
