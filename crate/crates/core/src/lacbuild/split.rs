use serde::{Deserialize, Serialize};

use crate::rng::seeded_shuffle;

use super::LacError;

/// Slack for ratios such as 0.1 whose products land a hair under an integer.
const FLOOR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    /// (train, valid, test)
    pub ratios: [f64; 3],
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(ratios: [f64; 3], seed: u64) -> Result<Self, LacError> {
        let sum: f64 = ratios.iter().sum();
        if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) || (sum - 1.0).abs() > 1e-6 {
            return Err(LacError::InvalidRatios(ratios));
        }
        Ok(SplitSpec { ratios, seed })
    }

    /// `(train, valid, test)` sizes for `n` items.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        let floor = |r: f64| ((r * n as f64) + FLOOR_EPS).floor() as usize;
        let train = floor(self.ratios[0]).min(n);
        let valid = floor(self.ratios[1]).min(n - train);
        (train, valid, n - train - valid)
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec { ratios: [0.8, 0.1, 0.1], seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits<T> {
    pub train: Vec<T>,
    pub valid: Vec<T>,
    pub test: Vec<T>,
}

pub fn split_dataset<T: Clone>(items: &[T], spec: &SplitSpec) -> Result<Splits<T>, LacError> {
    if items.is_empty() {
        return Err(LacError::EmptyDataset);
    }
    let (train, valid, test) = spec.sizes(items.len());
    for (name, size) in [("train", train), ("valid", valid), ("test", test)] {
        if size == 0 {
            return Err(LacError::EmptySplit { split: name, n: items.len() });
        }
    }
    let mut shuffled = items.to_vec();
    seeded_shuffle(&mut shuffled, spec.seed);
    let test_part = shuffled.split_off(train + valid);
    let valid_part = shuffled.split_off(train);
    Ok(Splits { train: shuffled, valid: valid_part, test: test_part })
}
