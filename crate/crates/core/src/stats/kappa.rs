use super::StatsError;

/// Item × category rating counts with a constant number of raters per item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaInput {
    counts: Vec<Vec<u64>>,
    n_raters: u64,
}

impl KappaInput {
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self, StatsError> {
        let first = counts.first().ok_or(StatsError::EmptyInput)?;
        let n_categories = first.len();
        if n_categories < 2 {
            return Err(StatsError::TooFewCategories(n_categories));
        }
        let n_raters: u64 = first.iter().sum();
        if n_raters < 2 {
            return Err(StatsError::TooFewRaters(n_raters));
        }
        for (row, r) in counts.iter().enumerate() {
            let sum: u64 = r.iter().sum();
            if r.len() != n_categories || sum != n_raters {
                return Err(StatsError::RaggedRow { row, sum, expected: n_raters });
            }
        }
        Ok(KappaInput { counts, n_raters })
    }

    /// Builds the count matrix from per-item rater labels, categories
    /// indexed `0..n_categories`.
    pub fn from_ratings(ratings: &[Vec<usize>], n_categories: usize) -> Result<Self, StatsError> {
        let rows = ratings
            .iter()
            .map(|item| {
                let mut row = vec![0u64; n_categories];
                for &c in item {
                    if c >= n_categories {
                        return Err(StatsError::Domain(format!("category {c} out of range")));
                    }
                    row[c] += 1;
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(rows)
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn n_raters(&self) -> u64 {
        self.n_raters
    }

    pub fn n_items(&self) -> usize {
        self.counts.len()
    }
}

/// Fleiss' κ = (P̄ − P̄ₑ) / (1 − P̄ₑ).
pub fn fleiss_kappa(input: &KappaInput) -> Result<f64, StatsError> {
    let n = input.n_raters as f64;
    let items = input.counts.len() as f64;
    let k = input.counts[0].len();
    let mut p_bar = 0.0;
    let mut totals = vec![0u64; k];
    for row in &input.counts {
        let sq: u64 = row.iter().map(|c| c * c).sum();
        p_bar += (sq as f64 - n) / (n * (n - 1.0));
        for (t, c) in totals.iter_mut().zip(row) {
            *t += c;
        }
    }
    p_bar /= items;
    let p_e: f64 = totals.iter().map(|&t| (t as f64 / (items * n)).powi(2)).sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Err(StatsError::DegenerateMarginals);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unanimous_is_one() {
        let k = KappaInput::new(vec![vec![3, 0], vec![0, 3], vec![3, 0]]).unwrap();
        assert_eq!(fleiss_kappa(&k).unwrap(), 1.0);
    }

    #[test]
    fn all_mass_in_one_category() {
        let k = KappaInput::new(vec![vec![3, 0], vec![3, 0]]).unwrap();
        assert!(matches!(fleiss_kappa(&k), Err(StatsError::DegenerateMarginals)));
    }

    #[test]
    fn validation() {
        assert!(matches!(KappaInput::new(vec![]), Err(StatsError::EmptyInput)));
        assert!(matches!(KappaInput::new(vec![vec![3]]), Err(StatsError::TooFewCategories(1))));
        assert!(matches!(KappaInput::new(vec![vec![1, 0]]), Err(StatsError::TooFewRaters(1))));
        assert!(matches!(KappaInput::new(vec![vec![2, 1], vec![1, 1]]), Err(StatsError::RaggedRow { row: 1, .. })));
        let r = KappaInput::from_ratings(&[vec![0, 0, 1], vec![1, 1, 1]], 2).unwrap();
        assert_eq!(r.counts(), &[vec![2, 1], vec![0, 3]]);
    }

    #[test]
    fn textbook_example() {
        // Fleiss (1971)-style worked example as reproduced on Wikipedia:
        // 10 items, 14 raters, 5 categories, κ ≈ 0.210.
        let rows = vec![
            vec![0, 0, 0, 0, 14],
            vec![0, 2, 6, 4, 2],
            vec![0, 0, 3, 5, 6],
            vec![0, 3, 9, 2, 0],
            vec![2, 2, 8, 1, 1],
            vec![7, 7, 0, 0, 0],
            vec![3, 2, 6, 3, 0],
            vec![2, 5, 3, 2, 2],
            vec![6, 5, 2, 1, 0],
            vec![0, 2, 2, 3, 7],
        ];
        let k = fleiss_kappa(&KappaInput::new(rows).unwrap()).unwrap();
        assert!((k - 0.209_930_704_6).abs() < 1e-9, "{k}");
    }
}
