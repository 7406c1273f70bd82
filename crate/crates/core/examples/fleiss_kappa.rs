//! Fleiss' kappa from per-item category counts and from raw ratings.

use agency_audit::stats::{fleiss_kappa, KappaInput};

fn main() -> anyhow::Result<()> {
    // Three raters, categories (agentic, communal, neutral).
    let counts = KappaInput::new(vec![
        vec![3, 0, 0],
        vec![0, 3, 0],
        vec![2, 0, 1],
        vec![0, 1, 2],
        vec![3, 0, 0],
        vec![1, 1, 1],
    ])?;
    println!("{} items, {} raters: kappa = {:.4}", counts.n_items(), counts.n_raters(), fleiss_kappa(&counts)?);

    let ratings = vec![vec![0, 0, 0, 1], vec![1, 1, 1, 1], vec![0, 0, 1, 1], vec![1, 1, 1, 0]];
    let input = KappaInput::from_ratings(&ratings, 2)?;
    println!("from ratings: kappa = {:.4}", fleiss_kappa(&input)?);
    Ok(())
}
