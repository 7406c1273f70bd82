mod common;

use agency_audit::classify::{AgencyLabel, Classification, EvalMetrics};
use agency_audit::corpus::GroupKey;
use agency_audit::metrics::{doc_agency, group_summary, group_summary_with, Averaging, DocAgency};
use common::read_json;
use proptest::prelude::*;
use serde::Deserialize;

#[derive(Deserialize)]
struct EvalCase {
    confusion: [[u64; 2]; 2],
    accuracy: f64,
    f1_macro: f64,
    f1_micro: f64,
    f1_weighted: f64,
    f1_agentic: f64,
    f1_communal: f64,
}

#[test]
fn eval_matches_confusion_oracle() {
    let cases: Vec<EvalCase> = read_json("eval_oracle.json");
    assert_eq!(cases.len(), 10);
    for c in cases {
        let m = EvalMetrics::from_confusion(c.confusion).unwrap();
        let pairs = [
            (m.accuracy, c.accuracy),
            (m.f1_macro, c.f1_macro),
            (m.f1_micro, c.f1_micro),
            (m.f1_weighted, c.f1_weighted),
            (m.f1_agentic, c.f1_agentic),
            (m.f1_communal, c.f1_communal),
        ];
        for (got, want) in pairs {
            assert!((got - want).abs() < 1e-12, "{:?}: {got} vs {want}", c.confusion);
        }
        assert_eq!(m.f1_micro, m.accuracy);
    }
}

#[test]
fn all_agentic_predictions() {
    let gold = [AgencyLabel::Agentic, AgencyLabel::Agentic, AgencyLabel::Agentic, AgencyLabel::Communal];
    let m = EvalMetrics::from_predictions(&gold, &[AgencyLabel::Agentic; 4]).unwrap();
    assert_eq!(m.accuracy, 0.75);
    assert_eq!(m.f1_communal, 0.0);
    assert!((m.f1_macro - (6.0 / 7.0) / 2.0).abs() < 1e-12);
}

fn doc() -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), 1..60)
}

fn as_doc(i: usize, flags: &[bool]) -> DocAgency {
    let labels: Vec<Classification> = flags
        .iter()
        .map(|&a| Classification::new(if a { AgencyLabel::Agentic } else { AgencyLabel::Communal }, 1.0))
        .collect();
    doc_agency(&format!("d{i}"), &labels).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn document_identities(flags in doc()) {
        let d = as_doc(0, &flags);
        prop_assert!((d.gap - (2.0 * d.pct_agentic - 100.0)).abs() <= 1e-12);
        prop_assert!((d.pct_agentic + d.pct_communal - 100.0).abs() <= 1e-12);
        prop_assert_eq!(d.n_sentences, flags.len());
    }
}

proptest! {
    #[test]
    fn group_linearity(docs in prop::collection::vec(doc(), 1..30)) {
        let agencies: Vec<DocAgency> = docs.iter().enumerate().map(|(i, f)| as_doc(i, f)).collect();
        for averaging in [Averaging::Macro, Averaging::Pooled] {
            let s = group_summary_with(&agencies, GroupKey::default(), averaging).unwrap();
            prop_assert_eq!(s.avg_gap, s.avg_pct_agentic - s.avg_pct_communal);
            prop_assert_eq!(s.n_docs, agencies.len());
        }
        let gaps: Vec<f64> = agencies.iter().map(|d| d.gap).collect();
        let s = group_summary(&agencies, GroupKey::default()).unwrap();
        let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
        prop_assert!((s.avg_gap - mean_gap).abs() < 1e-9);
        prop_assert_eq!(s.doc_gaps, gaps);
    }
}
