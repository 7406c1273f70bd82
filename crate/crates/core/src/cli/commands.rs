use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::classify::{
    backend_check, eval_classifier, AgencyLabel, BackendDescriptor, Classifier, ConnectOptions, EvalMetrics,
};
use crate::corpus::{load_corpus, FieldMapping, Format};
use crate::fsutil::{write_all_atomic, write_atomic};
use crate::lacbuild::{
    assemble_records, clg_plan, drop_neutral, labeled_items, merge_annotations, paraphrase_items, read_annotator_csv,
    read_transcript, render_paraphrase_prompt, run_generation, split_dataset, AnnotationLabel, ClgKind,
    GeneratedItem, GenerationOptions, HttpGenerator, PlanItem, SplitSpec, SystemClock, DEFAULT_AGENTIC_EXAMPLE,
    DEFAULT_COMMUNAL_EXAMPLE,
};
use crate::metrics::{audit, write_report_dir, AuditOptions, Averaging, Comparison};
use crate::segment::Abbreviations;
use crate::stats::{fleiss_kappa, KappaInput};

use super::args::{AuditArgs, BackendCheckArgs, EvalArgs, KappaArgs, MergeArgs, SplitArgs, SynthArgs};
use super::{CliError, Outcome, RunConfig, CACHE_DIR_ENV};

const DEFAULT_BACKEND: &str = "lexicon:seed";

fn parsed<T: std::str::FromStr>(flag: &'static str, value: Option<&str>) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    value.map(|v| v.parse().map_err(|e: T::Err| CliError::Invalid { flag, message: e.to_string() })).transpose()
}

fn descriptor(
    backend: Option<&str>,
    tie_default: Option<&str>,
    batch_size: Option<usize>,
    timeout_ms: Option<u64>,
) -> Result<BackendDescriptor, CliError> {
    let mut d: BackendDescriptor = parsed("--backend", Some(backend.unwrap_or(DEFAULT_BACKEND)))?.expect("value given");
    if let Some(l) = parsed::<AgencyLabel>("--tie-default", tie_default)? {
        d = d.tie_default(l);
    }
    if let Some(n) = batch_size {
        d = d.batch_size(n);
    }
    if let Some(ms) = timeout_ms {
        d = d.timeout(Duration::from_millis(ms));
    }
    Ok(d)
}

fn connect(d: &BackendDescriptor, threads: Option<usize>) -> Result<Classifier, CliError> {
    let cache_dir = std::env::var_os(CACHE_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    Ok(Classifier::connect_with(d, &ConnectOptions { workers: threads.unwrap_or(1), cache_dir })?)
}

fn attr_mapping(spec: &str) -> (&str, &str) {
    spec.split_once('=').unwrap_or((spec, spec))
}

fn jsonl<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Vec<u8> {
    let mut out = Vec::new();
    for r in rows {
        out.extend(serde_json::to_string(&r).expect("rows serialize").into_bytes());
        out.push(b'\n');
    }
    out
}

fn pretty<T: Serialize>(value: &T) -> Vec<u8> {
    // Through `Value` so keys come out sorted.
    let v = serde_json::to_value(value).expect("value serializes");
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s.into_bytes()
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CliError::Parse { path: path.into(), line: i + 1, message: e.to_string() })
        })
        .collect()
}

fn fmt_opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "default".into(), |v| v.to_string())
}

pub fn cmd_audit(a: &AuditArgs, config_file: Option<&Path>) -> Result<Outcome, CliError> {
    let corpus_path = a.corpus.as_deref().ok_or(CliError::Missing("--corpus"))?;
    let out = a.out.as_deref().ok_or(CliError::Missing("--out"))?;
    if a.groups.is_empty() {
        return Err(CliError::Missing("--group"));
    }
    let format = match &a.format {
        Some(f) => parsed::<Format>("--format", Some(f))?.expect("value given"),
        None => Format::from_path(corpus_path),
    };
    let mut mapping = FieldMapping::default();
    if let Some(id) = &a.id_col {
        mapping.id = id.clone();
    }
    if let Some(text) = &a.text_col {
        mapping.text = text.clone();
    }
    for spec in &a.attrs {
        let (name, field) = attr_mapping(spec);
        mapping = mapping.attr(name, field);
    }
    for spec in &a.optional_attrs {
        let (name, field) = attr_mapping(spec);
        mapping = mapping.optional_attr(name, field);
    }
    let corpus = load_corpus(corpus_path, format, &mapping)?;

    let desc = descriptor(a.backend.as_deref(), a.tie_default.as_deref(), a.batch_size, a.timeout_ms)?;
    let run_config = RunConfig {
        subcommand: "audit".into(),
        config_file: config_file.map(Path::to_path_buf),
        inputs: BTreeMap::from([
            ("corpus".to_string(), corpus_path.display().to_string()),
            ("format".to_string(), format!("{format:?}").to_lowercase()),
            ("id_col".to_string(), mapping.id.clone()),
            ("text_col".to_string(), mapping.text.clone()),
            ("attrs".to_string(), a.attrs.join(" ")),
            ("optional_attrs".to_string(), a.optional_attrs.join(" ")),
        ]),
        backend: Some(desc.to_string()),
        group_attrs: a.groups.clone(),
        strata_attrs: a.strata.clone(),
        options: BTreeMap::from([
            ("batch_size".to_string(), desc.batch_size.to_string()),
            ("timeout_ms".to_string(), desc.timeout.as_millis().to_string()),
            ("abbreviations".to_string(), fmt_opt(a.abbreviations.as_ref().map(|p| p.display()))),
        ]),
        out: Some(out.to_path_buf()),
    };

    let abbreviations = match &a.abbreviations {
        Some(p) => Some(Abbreviations::from_file(p).map_err(CliError::io(p))?),
        None => None,
    };
    let comparisons = a
        .compare
        .iter()
        .map(|c| c.parse::<Comparison>())
        .collect::<Result<Vec<_>, _>>()?;
    let options = AuditOptions {
        trim_wikibio: a.trim_wikibio,
        averaging: if a.pooled { Averaging::Pooled } else { Averaging::Macro },
        test_variant: parsed("--test", a.test.as_deref())?.unwrap_or_default(),
        alternative: parsed("--alternative", a.alternative.as_deref())?.unwrap_or_default(),
        comparisons,
        seeds: a.seeds.clone(),
        kde_grid_size: a.kde_grid.unwrap_or(crate::stats::DEFAULT_GRID_SIZE),
        abbreviations,
        provenance: run_config.provenance(),
    };

    let classifier = connect(&desc, a.threads)?;
    let report = audit(&corpus, &classifier, &a.groups, &a.strata, &options)?;
    classifier.flush_cache().map_err(CliError::io(out))?;
    write_report_dir(&report, out)?;
    Ok(Outcome::ok(vec![format!(
        "audited {} documents into {} groups ({} tests, {} skipped); wrote {}",
        corpus.len() - report.skipped_docs.total,
        report.groups.len(),
        report.tests.len(),
        report.skipped_docs.total,
        out.display()
    )]))
}

#[derive(Deserialize)]
struct GoldRow {
    text: String,
    label: AgencyLabel,
}

pub fn eval_csv(backend: &str, m: &EvalMetrics) -> String {
    let pct = |x: f64| format!("{:.2}", 100.0 * x);
    format!(
        "Backend,Accuracy,Macro F1,Micro F1,Weighted F1\n{},{},{},{},{}\n",
        backend,
        pct(m.accuracy),
        pct(m.f1_macro),
        pct(m.f1_micro),
        pct(m.f1_weighted)
    )
}

pub fn cmd_eval(a: &EvalArgs) -> Result<Outcome, CliError> {
    let gold_path = a.gold.as_deref().ok_or(CliError::Missing("--gold"))?;
    let out = a.out.as_deref().ok_or(CliError::Missing("--out"))?;
    let gold: Vec<(String, AgencyLabel)> =
        read_jsonl::<GoldRow>(gold_path)?.into_iter().map(|r| (r.text, r.label)).collect();
    let desc = descriptor(a.backend.as_deref(), a.tie_default.as_deref(), a.batch_size, a.timeout_ms)?;
    let classifier = connect(&desc, a.threads)?;
    let metrics = eval_classifier(&classifier, &gold)?;
    classifier.flush_cache().map_err(CliError::io(out))?;
    let backend = desc.to_string();
    write_all_atomic(
        out,
        &[("eval.json", pretty(&metrics)), ("eval.csv", eval_csv(&backend.replace(',', " "), &metrics).into_bytes())],
    )
    .map_err(CliError::io(out))?;
    Ok(Outcome::ok(vec![format!(
        "n={} accuracy={:.4} f1_macro={:.4} f1_micro={:.4} f1_weighted={:.4}",
        metrics.n, metrics.accuracy, metrics.f1_macro, metrics.f1_micro, metrics.f1_weighted
    )]))
}

fn synth_plan(a: &SynthArgs) -> Result<Vec<PlanItem>, CliError> {
    let kind = a.kind.as_deref().ok_or(CliError::Missing("--kind"))?;
    if kind == "paraphrase" {
        let path = a.sentences.as_deref().ok_or(CliError::Missing("--sentences"))?;
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        let agentic = a.agentic_example.as_deref().unwrap_or(DEFAULT_AGENTIC_EXAMPLE);
        let communal = a.communal_example.as_deref().unwrap_or(DEFAULT_COMMUNAL_EXAMPLE);
        return text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .enumerate()
            .map(|(i, s)| {
                Ok(PlanItem { item_id: format!("paraphrase-{i:05}"), prompt: render_paraphrase_prompt(s, agentic, communal)? })
            })
            .collect();
    }
    let kind: ClgKind = kind.parse()?;
    Ok(clg_plan(kind).into_iter().map(|c| PlanItem { item_id: c.item_id, prompt: c.prompt }).collect())
}

pub fn cmd_synth(a: &SynthArgs) -> Result<Outcome, CliError> {
    let out = a.out.as_deref().ok_or(CliError::Missing("--out"))?;
    let plan = synth_plan(a)?;
    if a.plan_only {
        write_atomic(out, &jsonl(&plan)).map_err(CliError::io(out))?;
        return Ok(Outcome::ok(vec![format!("wrote {} prompts to {}", plan.len(), out.display())]));
    }
    let endpoint = a.endpoint.as_deref().ok_or(CliError::Missing("--endpoint"))?;
    let defaults = GenerationOptions::default();
    let min_interval = match a.rate {
        Some(r) if r > 0.0 && r.is_finite() => Some(Duration::from_secs_f64(1.0 / r)),
        Some(r) => return Err(CliError::Invalid { flag: "--rate", message: format!("{r} is not a positive rate") }),
        None => None,
    };
    let options = GenerationOptions {
        max_retries: a.max_retries.unwrap_or(defaults.max_retries),
        min_interval,
        concurrency: a.concurrency.unwrap_or(1),
        seed: a.seed,
        ..defaults
    };
    let generator = HttpGenerator::new(endpoint, Duration::from_millis(a.timeout_ms.unwrap_or(60_000)));
    let s = run_generation(&plan, &generator, &options, out, &SystemClock)?;
    Ok(Outcome::ok(vec![format!(
        "planned {}, resumed {}, generated {} ({} requests); transcript {}",
        s.planned,
        s.resumed,
        s.generated,
        s.requests,
        out.display()
    )]))
}

fn kappa_text(input: Option<&KappaInput>) -> String {
    match input.map(fleiss_kappa) {
        Some(Ok(k)) => format!("{k:.6}"),
        Some(Err(e)) => format!("undefined ({e})"),
        None => "undefined (no rows)".into(),
    }
}

pub fn cmd_merge(a: &MergeArgs) -> Result<Outcome, CliError> {
    let out = a.out.as_deref().ok_or(CliError::Missing("--out"))?;
    if a.annotators.len() < 2 {
        return Err(CliError::Invalid { flag: "--annotator", message: "need at least two annotator files".into() });
    }
    let mut notes = Vec::new();
    let items: Vec<GeneratedItem> = match (&a.items, &a.transcript) {
        (Some(p), _) => read_jsonl(p)?,
        (None, Some(p)) => {
            let (items, failed) = paraphrase_items(&read_transcript(p)?);
            for (id, e) in &failed {
                notes.push(format!("skipped {id}: {e}"));
            }
            items
        }
        (None, None) => return Err(CliError::Missing("--items or --transcript")),
    };
    let annotators = a.annotators.iter().map(|p| read_annotator_csv(p)).collect::<Result<Vec<_>, _>>()?;
    let tiebreak = a.tiebreak.as_deref().map(read_annotator_csv).transpose()?;
    let records = assemble_records(&items, &annotators, tiebreak.as_ref())?;
    let merged = merge_annotations(&records)?;
    let binary = drop_neutral(&merged.records);
    let labeled = labeled_items(&binary)?;
    write_atomic(out, &jsonl(&labeled)).map_err(CliError::io(out))?;
    notes.push(format!(
        "kept {} of {} items (na {}, neutral {}); kappa {} -> {}; wrote {}",
        labeled.len(),
        records.len(),
        merged.dropped_na.len(),
        merged.records.len() - binary.len(),
        kappa_text(Some(&merged.ratings)),
        kappa_text(merged.ratings_without_neutral.as_ref()),
        out.display()
    ));
    Ok(Outcome::ok(notes))
}

fn parse_ratios(s: &str) -> Result<[f64; 3], CliError> {
    let bad = || CliError::Invalid { flag: "--ratios", message: format!("{s:?} is not train,valid,test") };
    let parts: Vec<f64> = s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| bad())
}

pub fn cmd_split(a: &SplitArgs) -> Result<Outcome, CliError> {
    let input = a.input.as_deref().ok_or(CliError::Missing("--input"))?;
    let out = a.out.as_deref().ok_or(CliError::Missing("--out"))?;
    let ratios = match &a.ratios {
        Some(r) => parse_ratios(r)?,
        None => SplitSpec::default().ratios,
    };
    let spec = SplitSpec::new(ratios, a.seed.unwrap_or(0))?;
    let text = fs::read_to_string(input).map_err(CliError::io(input))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        serde_json::from_str::<serde_json::Value>(line)
            .map_err(|e| CliError::Parse { path: input.into(), line: i + 1, message: e.to_string() })?;
        rows.push(line.to_string());
    }
    let splits = split_dataset(&rows, &spec)?;
    let file = |rows: &[String]| rows.iter().flat_map(|r| [r.as_bytes(), b"\n"]).flatten().copied().collect::<Vec<u8>>();
    write_all_atomic(
        out,
        &[("train.jsonl", file(&splits.train)), ("valid.jsonl", file(&splits.valid)), ("test.jsonl", file(&splits.test))],
    )
    .map_err(CliError::io(out))?;
    Ok(Outcome::ok(vec![format!(
        "split {} rows into train {}, valid {}, test {} (seed {}); wrote {}",
        rows.len(),
        splits.train.len(),
        splits.valid.len(),
        splits.test.len(),
        spec.seed,
        out.display()
    )]))
}

fn read_counts(path: &Path) -> Result<KappaInput, CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Parse { path: path.into(), line: 1, message: e.to_string() })?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let parse_err = |message: String| CliError::Parse { path: path.into(), line: i + 2, message };
        let rec = rec.map_err(|e| parse_err(e.to_string()))?;
        let row = rec.iter().map(|c| c.trim().parse::<u64>().map_err(|e| parse_err(format!("{c:?}: {e}")))).collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(KappaInput::new(rows)?)
}

#[derive(Serialize)]
struct KappaOut {
    kappa: f64,
    n_items: usize,
    n_raters: u64,
}

pub fn cmd_kappa(a: &KappaArgs) -> Result<Outcome, CliError> {
    let input = match &a.counts {
        Some(p) => read_counts(p)?,
        None if a.annotators.len() >= 2 => {
            let maps = a.annotators.iter().map(|p| read_annotator_csv(p)).collect::<Result<Vec<_>, _>>()?;
            let shared: BTreeSet<&String> =
                maps[0].keys().filter(|id| maps[1..].iter().all(|m| m.contains_key(*id))).collect();
            let columns = [AnnotationLabel::Agentic, AnnotationLabel::Communal, AnnotationLabel::Neutral, AnnotationLabel::NA];
            let rows = shared
                .iter()
                .map(|id| columns.iter().map(|c| maps.iter().filter(|m| m[*id] == *c).count() as u64).collect())
                .collect();
            KappaInput::new(rows)?
        }
        None => return Err(CliError::Missing("--counts or at least two --annotator files")),
    };
    let kappa = fleiss_kappa(&input)?;
    if let Some(out) = &a.out {
        let body = KappaOut { kappa, n_items: input.n_items(), n_raters: input.n_raters() };
        write_atomic(out, &pretty(&body)).map_err(CliError::io(out))?;
    }
    Ok(Outcome::ok(vec![format!("kappa {kappa:.6} (items={}, raters={})", input.n_items(), input.n_raters())]))
}

#[derive(Serialize)]
struct ProbeJson {
    probe: &'static str,
    n_texts: usize,
    fault_class: Option<&'static str>,
    message: Option<String>,
}

pub fn cmd_backend_check(a: &BackendCheckArgs) -> Result<Outcome, CliError> {
    let backend = a.backend.as_deref().ok_or(CliError::Missing("--backend"))?;
    let desc = descriptor(Some(backend), None, None, a.timeout_ms)?;
    let report = backend_check(&desc)?;
    let mut lines: Vec<String> = report.outcomes.iter().map(|o| o.line()).collect();
    let ok = report.outcomes.iter().filter(|o| o.fault.is_none()).count();
    let classes: Vec<&str> = report.fault_classes().into_iter().map(|c| c.as_str()).collect();
    lines.push(if report.passed() {
        format!("{}: {ok}/{} probes ok", report.backend, report.outcomes.len())
    } else {
        format!("{}: {ok}/{} probes ok; faults: {}", report.backend, report.outcomes.len(), classes.join(", "))
    });
    if let Some(out) = &a.out {
        let probes: Vec<ProbeJson> = report
            .outcomes
            .iter()
            .map(|o| ProbeJson {
                probe: o.probe,
                n_texts: o.n_texts,
                fault_class: o.fault.as_ref().map(|f| f.class().as_str()),
                message: o.fault.as_ref().map(ToString::to_string),
            })
            .collect();
        let body = serde_json::json!({ "backend": report.backend, "passed": report.passed(), "probes": probes });
        write_atomic(out, &pretty(&body)).map_err(CliError::io(out))?;
    }
    Ok(Outcome { lines, status: if report.passed() { 0 } else { 1 } })
}
