//! Audits the bundled toy corpus by gender within race and writes the four
//! report files.
//!
//! ```text
//! cargo run --example audit_toy_corpus -- [OUT_DIR]
//! ```

use std::path::{Path, PathBuf};

use agency_audit::classify::{BackendDescriptor, Classifier};
use agency_audit::corpus::{load_corpus, FieldMapping, Format};
use agency_audit::metrics::{audit, tables_csv, write_report_dir, AuditOptions, Comparison};

fn main() -> anyhow::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("toy-audit"));
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy_corpus.jsonl");
    let corpus = load_corpus(&path, Format::Jsonl, &FieldMapping::default())?;

    let classifier = Classifier::connect(&BackendDescriptor::seed_lexicon())?;
    let options = AuditOptions { comparisons: vec!["gender=male,female".parse::<Comparison>()?], ..Default::default() };
    let report = audit(&corpus, &classifier, &["gender".into()], &["race".into()], &options)?;

    print!("{}", tables_csv(&report)?);
    for t in &report.tests {
        let stratum = t.stratum.as_deref().unwrap_or("all");
        match t.p {
            Some(p) => println!("{stratum:<16} {} > {}  t={:.3} p={p:.4}", t.groups[0], t.groups[1], t.t.unwrap_or_default()),
            None => println!("{stratum:<16} skipped: {}", t.note.as_deref().unwrap_or("")),
        }
    }
    for f in write_report_dir(&report, &out)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}
