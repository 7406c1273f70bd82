//! Builds a labeled agency dataset from paraphrase responses: parse the
//! generator output, merge two annotators by majority vote, report
//! agreement before and after removing neutral items, then split.

use std::collections::BTreeMap;

use agency_audit::lacbuild::{
    assemble_records, drop_neutral, labeled_items, merge_annotations, paraphrase_items, split_dataset,
    AnnotationLabel, SplitSpec, TranscriptEntry,
};
use agency_audit::stats::fleiss_kappa;

fn main() -> anyhow::Result<()> {
    let responses = [
        ("s0", r#"{"agentic": "She led the audit team.", "communal": "She supported the audit team."}"#),
        ("s1", r#"Sure! {"agentic": "He drove the project forward.", "communal": "He helped everyone on the project."}"#),
        ("s2", r#"{"agentic": "They won the grant.", "communal": "They shared the grant with partners."}"#),
        ("s3", "I cannot help with that."),
    ];
    let transcript: Vec<TranscriptEntry> = responses
        .iter()
        .map(|(id, r)| TranscriptEntry { item_id: id.to_string(), prompt: String::new(), response: r.to_string(), ts: 0, meta: None })
        .collect();
    let (items, failed) = paraphrase_items(&transcript);
    for (id, e) in &failed {
        println!("skipped {id}: {e}");
    }

    use AnnotationLabel::*;
    let a1: BTreeMap<String, AnnotationLabel> =
        [Agentic, Communal, Agentic, Neutral, Neutral, Communal].into_iter().zip(&items).map(|(l, i)| (i.item_id.clone(), l)).collect();
    let a2: BTreeMap<String, AnnotationLabel> =
        [Agentic, Communal, Neutral, Neutral, Agentic, NA].into_iter().zip(&items).map(|(l, i)| (i.item_id.clone(), l)).collect();

    let records = assemble_records(&items, &[a1, a2], None)?;
    let merged = merge_annotations(&records)?;
    println!("dropped as invalid: {:?}", merged.dropped_na);
    for r in &merged.records {
        println!("{:<12} {:<8} {}", r.item_id, r.final_label.map_or("-", |l| l.as_str()), r.text);
    }
    println!("kappa, all items:     {:.3}", fleiss_kappa(&merged.ratings)?);
    if let Some(k) = &merged.ratings_without_neutral {
        println!("kappa, neutral dropped: {:.3}", fleiss_kappa(k)?);
    }

    let dataset = labeled_items(&drop_neutral(&merged.records))?;
    let splits = split_dataset(&dataset, &SplitSpec::new([0.5, 0.25, 0.25], 0)?)?;
    println!("train {} / valid {} / test {}", splits.train.len(), splits.valid.len(), splits.test.len());
    Ok(())
}
