mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use agency_audit::classify::{BackendDescriptor, Classifier, ConnectOptions};
use agency_audit::corpus::{load_corpus, Corpus, FieldMapping, Format};
use agency_audit::metrics::{audit, report_json, write_report_dir, AuditOptions, Comparison, REPORT_FILES};
use agency_audit::rng::seeded_shuffle;
use common::{close, data, fixture, read_json, MockMode, MockServer};
use serde::Deserialize;

#[derive(Deserialize)]
struct OracleGroup {
    n_docs: usize,
    n_sentences: usize,
    avg_pct_agentic: f64,
    avg_pct_communal: f64,
    avg_gap: f64,
}

#[derive(Deserialize)]
struct OracleKde {
    grid: Vec<f64>,
    density: Vec<f64>,
    bandwidth: f64,
}

#[derive(Deserialize)]
struct OracleTest {
    groups: [String; 2],
    t: f64,
    df: f64,
    p: f64,
}

#[derive(Deserialize)]
struct Oracle {
    groups: BTreeMap<String, OracleGroup>,
    kde: BTreeMap<String, OracleKde>,
    tests: Vec<OracleTest>,
}

fn toy_corpus() -> Corpus {
    load_corpus(&data("toy_corpus.jsonl"), Format::Jsonl, &FieldMapping::default()).unwrap()
}

fn male_vs_female() -> AuditOptions {
    AuditOptions { comparisons: vec!["gender=male,female".parse::<Comparison>().unwrap()], ..Default::default() }
}

fn attrs(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn seed() -> Classifier {
    Classifier::connect(&BackendDescriptor::seed_lexicon()).unwrap()
}

#[test]
fn toy_corpus_matches_oracle() {
    let oracle: Oracle = read_json("toy_corpus_oracle.json");
    let started = Instant::now();
    let report = audit(&toy_corpus(), &seed(), &attrs(&["gender", "race"]), &[], &male_vs_female()).unwrap();
    assert!(started.elapsed().as_secs_f64() < 5.0);

    assert_eq!(report.groups.len(), oracle.groups.len());
    for g in &report.groups {
        let want = &oracle.groups[&g.group];
        assert_eq!((g.n_docs, g.n_sentences), (want.n_docs, want.n_sentences), "{}", g.group);
        for (got, want) in [
            (g.avg_pct_agentic, want.avg_pct_agentic),
            (g.avg_pct_communal, want.avg_pct_communal),
            (g.avg_gap, want.avg_gap),
        ] {
            assert!(close(got, want, 1e-9), "{}: {got} vs {want}", g.group);
        }
        assert_eq!(g.avg_gap, g.avg_pct_agentic - g.avg_pct_communal);
    }

    assert_eq!(report.tests.len(), oracle.tests.len());
    for want in &oracle.tests {
        let got = report.tests.iter().find(|t| t.groups == want.groups).expect("test present");
        assert!(close(got.t.unwrap(), want.t, 1e-9));
        assert!(close(got.df.unwrap(), want.df, 1e-9));
        assert!(close(got.p.unwrap(), want.p, 1e-9));
    }

    assert_eq!(report.kde.len(), oracle.kde.len());
    for (name, want) in &oracle.kde {
        let got = &report.kde[name];
        assert!(close(got.bandwidth, want.bandwidth, 1e-9));
        assert_eq!(got.grid.len(), want.grid.len());
        for (a, b) in got.grid.iter().zip(&want.grid) {
            assert!(close(*a, *b, 1e-9));
        }
        for (a, b) in got.density.iter().zip(&want.density) {
            assert!(close(*a, *b, 1e-9), "{name}: {a} vs {b}");
        }
    }
}

#[test]
fn toy8_hand_values() {
    let corpus = load_corpus(&fixture("toy8.jsonl"), Format::Jsonl, &FieldMapping::default()).unwrap();
    let report = audit(&corpus, &seed(), &attrs(&["gender"]), &[], &male_vs_female()).unwrap();
    let female = &report.groups[0];
    let male = &report.groups[1];
    assert_eq!(female.group, "gender=female");
    let third = 100.0 / 3.0;
    let want_f = [third, -100.0, 0.0, -third];
    let want_m = [100.0, third, 0.0, third];
    for (got, want) in female.doc_gaps.iter().zip(want_f).chain(male.doc_gaps.iter().zip(want_m)) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }
    assert!((female.avg_gap - -25.0).abs() < 1e-9);
    assert!((male.avg_gap - 125.0 / 3.0).abs() < 1e-9);

    let golden = std::fs::read_to_string(fixture("toy8_report.json")).unwrap();
    assert_eq!(report_json(&report).unwrap(), golden);
}

#[test]
fn document_order_does_not_matter() {
    let corpus = toy_corpus();
    let base = report_json(&audit(&corpus, &seed(), &attrs(&["gender", "race"]), &[], &male_vs_female()).unwrap()).unwrap();
    for s in 0..5u64 {
        let mut docs = corpus.documents().to_vec();
        seeded_shuffle(&mut docs, s);
        let shuffled = Corpus::new(corpus.schema().clone(), docs).unwrap();
        let r = audit(&shuffled, &seed(), &attrs(&["gender", "race"]), &[], &male_vs_female()).unwrap();
        assert_eq!(report_json(&r).unwrap(), base, "shuffle seed {s}");
    }
}

#[test]
fn output_bytes_independent_of_workers() {
    let server = MockServer::start(MockMode::Ok);
    let corpus = toy_corpus();
    let d = BackendDescriptor::http(&server.url).batch_size(7);
    let mut outputs = Vec::new();
    for workers in [1, 1, 1, 1, 1, 4, 16] {
        let classifier = Classifier::connect_with(&d, &ConnectOptions { workers, cache_dir: None }).unwrap();
        let report = audit(&corpus, &classifier, &attrs(&["gender"]), &attrs(&["race"]), &male_vs_female()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_report_dir(&report, dir.path()).unwrap();
        let files: Vec<Vec<u8>> = REPORT_FILES.iter().map(|f| std::fs::read(dir.path().join(f)).unwrap()).collect();
        outputs.push(files);
    }
    for o in &outputs[1..] {
        assert_eq!(o, &outputs[0]);
    }
}

#[test]
fn strata_and_tests_per_stratum() {
    let report = audit(&toy_corpus(), &seed(), &attrs(&["gender"]), &attrs(&["race"]), &male_vs_female()).unwrap();
    assert_eq!(report.groups.len(), 2);
    assert_eq!(report.strata.len(), 4);
    assert_eq!(report.tests.len(), 5);
    assert_eq!(report.tests.iter().filter(|t| t.stratum.is_some()).count(), 4);
    for (stratum, groups) in &report.strata {
        assert!(stratum.starts_with("race="));
        assert_eq!(groups.len(), 2);
    }
}
