//! Balanced sampling per demographic cell and the minimum-group filter.

use agency_audit::corpus::{filter_min_group, sample_balanced, AttrSpec, Corpus, Document, Schema};

fn main() -> anyhow::Result<()> {
    let schema = Schema::new(vec![AttrSpec::required("gender"), AttrSpec::required("department")])?;
    let mut docs = Vec::new();
    for (dept, female, male) in [("History", 14, 30), ("Physics", 4, 25), ("Art", 22, 12)] {
        for (gender, n) in [("female", female), ("male", male)] {
            for i in 0..n {
                docs.push(
                    Document::new(format!("{dept}-{gender}-{i:02}"), "A review.")
                        .with_attr("gender", gender)
                        .with_attr("department", dept),
                );
            }
        }
    }
    let corpus = Corpus::new(schema, docs)?;

    let filtered = filter_min_group(&corpus, "department", "gender", 10)?;
    println!("{} docs, {} after dropping departments with fewer than 10 of either gender", corpus.len(), filtered.len());

    let balanced = sample_balanced(&filtered, &["gender".into(), "department".into()], 12, 42)?;
    println!("balanced sample: {} docs", balanced.len());
    for d in balanced.documents().iter().take(5) {
        println!("  {}", d.id);
    }

    match sample_balanced(&corpus, &["gender".into(), "department".into()], 12, 42) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("unfiltered corpus: {e}"),
    }
    Ok(())
}
