use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::{Classification, Classifier};
use crate::corpus::{Corpus, Document, GroupKey};
use crate::segment::{wikibio_trim, Abbreviations, Segmenter};
use crate::stats::{kde, t_test, Alternative, KdeSeries, TestVariant, DEFAULT_GRID_SIZE};

use super::agency::{doc_agency, group_summary_with, Averaging, DocAgency, GroupSummary};
use super::MetricsError;

pub const REPORT_VERSION: u32 = 1;

/// A one-sided (or two-sided) comparison of `attr = a` against `attr = b`,
/// run within every cell of the remaining grouping attributes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Comparison {
    pub attr: String,
    pub a: String,
    pub b: String,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={},{}", self.attr, self.a, self.b)
    }
}

impl FromStr for Comparison {
    type Err = MetricsError;

    /// `gender=male,female`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MetricsError::InvalidComparison(s.to_string());
        let (attr, values) = s.split_once('=').ok_or_else(bad)?;
        let (a, b) = values.split_once(',').ok_or_else(bad)?;
        if attr.is_empty() || a.is_empty() || b.is_empty() || a == b {
            return Err(bad());
        }
        Ok(Comparison { attr: attr.into(), a: a.into(), b: b.into() })
    }
}

#[derive(Debug, Clone)]
pub struct AuditOptions {
    pub trim_wikibio: bool,
    pub averaging: Averaging,
    pub test_variant: TestVariant,
    pub alternative: Alternative,
    /// Empty means: compare the two values of every two-valued grouping
    /// attribute, in sorted order.
    pub comparisons: Vec<Comparison>,
    pub seeds: Vec<u64>,
    pub kde_grid_size: usize,
    pub abbreviations: Option<Abbreviations>,
    /// Free-form provenance echoed into the report config (input paths etc.).
    pub provenance: BTreeMap<String, String>,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            trim_wikibio: false,
            averaging: Averaging::Macro,
            test_variant: TestVariant::Welch,
            alternative: Alternative::Greater,
            comparisons: Vec::new(),
            seeds: Vec::new(),
            kde_grid_size: DEFAULT_GRID_SIZE,
            abbreviations: None,
            provenance: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub backend: String,
    pub group_attrs: Vec<String>,
    pub strata_attrs: Vec<String>,
    pub trim_wikibio: bool,
    pub averaging: Averaging,
    pub test_variant: TestVariant,
    pub alternative: Alternative,
    pub comparisons: Vec<String>,
    pub seeds: Vec<u64>,
    pub kde_grid_size: usize,
    pub abbreviations: String,
    pub provenance: BTreeMap<String, String>,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    /// `[a, b]` group labels; the alternative is about `a` relative to `b`.
    pub groups: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<String>,
    pub n: [usize; 2],
    pub variant: TestVariant,
    pub alternative: Alternative,
    pub t: Option<f64>,
    pub df: Option<f64>,
    pub p: Option<f64>,
    /// Why the test could not be run, when `t`/`df`/`p` are null.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SkippedDocs {
    pub total: usize,
    pub missing_group_attrs: Vec<String>,
    pub exhausted_by_trim: Vec<String>,
    pub no_sentences: Vec<String>,
    /// Measured but left out of the stratified breakdown.
    pub missing_strata_attrs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub report_v: u32,
    pub config: ReportConfig,
    pub groups: Vec<GroupSummary>,
    pub strata: BTreeMap<String, Vec<GroupSummary>>,
    pub tests: Vec<TestRecord>,
    pub kde: BTreeMap<String, KdeSeries>,
    pub skipped_docs: SkippedDocs,
}

struct Measured<'a> {
    doc: &'a Document,
    agency: DocAgency,
}

fn summarize<'a>(
    docs: impl Iterator<Item = &'a Measured<'a>>,
    attrs: &[&str],
    averaging: Averaging,
) -> Result<BTreeMap<GroupKey, GroupSummary>, MetricsError> {
    let mut cells: BTreeMap<GroupKey, Vec<DocAgency>> = BTreeMap::new();
    for m in docs {
        let key = Corpus::key_for(m.doc, attrs).expect("measured docs carry all grouping attributes");
        cells.entry(key).or_default().push(m.agency.clone());
    }
    cells
        .into_iter()
        .map(|(k, docs)| group_summary_with(&docs, k.clone(), averaging).map(|s| (k, s)))
        .collect()
}

fn run_comparisons(
    groups: &BTreeMap<GroupKey, GroupSummary>,
    comparisons: &[Comparison],
    stratum: Option<&str>,
    options: &AuditOptions,
    out: &mut Vec<TestRecord>,
) {
    for cmp in comparisons {
        for (key, a) in groups {
            if key.value(&cmp.attr) != Some(cmp.a.as_str()) {
                continue;
            }
            let partner = GroupKey(
                key.pairs()
                    .iter()
                    .map(|(k, v)| if *k == cmp.attr { (k.clone(), cmp.b.clone()) } else { (k.clone(), v.clone()) })
                    .collect(),
            );
            let Some(b) = groups.get(&partner) else { continue };
            let mut rec = TestRecord {
                groups: [a.group.clone(), b.group.clone()],
                stratum: stratum.map(str::to_string),
                n: [a.n_docs, b.n_docs],
                variant: options.test_variant,
                alternative: options.alternative,
                t: None,
                df: None,
                p: None,
                note: None,
            };
            match t_test(&a.doc_gaps, &b.doc_gaps, options.test_variant, options.alternative) {
                Ok(r) => {
                    rec.t = Some(r.t_stat);
                    rec.df = Some(r.df);
                    rec.p = Some(r.p_value);
                }
                Err(e) => rec.note = Some(e.to_string()),
            }
            out.push(rec);
        }
    }
}

/// Segments, classifies and aggregates every document of `corpus`.
///
/// Documents are processed in id order so every statistic is independent
/// of corpus order.
pub fn audit(
    corpus: &Corpus,
    classifier: &Classifier,
    group_attrs: &[String],
    strata_attrs: &[String],
    options: &AuditOptions,
) -> Result<AuditReport, MetricsError> {
    if corpus.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let schema = corpus.schema();
    let group_order = schema.canonical_order(group_attrs)?;
    let strata_order = schema.canonical_order(strata_attrs)?;
    if let Some(shared) = group_order.iter().find(|a| strata_order.contains(a)) {
        return Err(MetricsError::OverlappingAttrs(shared.to_string()));
    }

    let mut docs: Vec<&Document> = corpus.documents().iter().collect();
    docs.sort_by(|a, b| a.id.cmp(&b.id));

    let segmenter = match &options.abbreviations {
        Some(a) => Segmenter::new(a),
        None => Segmenter::default(),
    };
    let mut skipped = SkippedDocs::default();
    let mut pending: Vec<(&Document, usize, usize)> = Vec::new();
    let mut sentences: Vec<String> = Vec::new();
    for doc in docs {
        if Corpus::key_for(doc, &group_order).is_none() {
            skipped.missing_group_attrs.push(doc.id.clone());
            continue;
        }
        let mut split = segmenter.split(&doc.text);
        if options.trim_wikibio {
            let trimmed = wikibio_trim(&split);
            if trimmed.exhausted {
                skipped.exhausted_by_trim.push(doc.id.clone());
                continue;
            }
            split = trimmed.sentences;
        }
        if split.is_empty() {
            skipped.no_sentences.push(doc.id.clone());
            continue;
        }
        let start = sentences.len();
        sentences.extend(split.into_iter().map(|s| s.text));
        pending.push((doc, start, sentences.len()));
    }
    skipped.total = skipped.missing_group_attrs.len() + skipped.exhausted_by_trim.len() + skipped.no_sentences.len();

    if pending.is_empty() {
        return Err(MetricsError::NothingMeasured { skipped: skipped.total });
    }
    let labels: Vec<Classification> = classifier.classify_batch(&sentences)?;
    let measured: Vec<Measured> = pending
        .into_iter()
        .map(|(doc, s, e)| doc_agency(&doc.id, &labels[s..e]).map(|agency| Measured { doc, agency }))
        .collect::<Result<_, _>>()?;

    let comparisons = if options.comparisons.is_empty() {
        default_comparisons(&measured, &group_order)
    } else {
        for c in &options.comparisons {
            if !group_order.contains(&c.attr.as_str()) {
                return Err(MetricsError::ComparisonNotGrouped(c.attr.clone()));
            }
        }
        options.comparisons.clone()
    };

    let groups = summarize(measured.iter(), &group_order, options.averaging)?;
    let mut tests = Vec::new();
    run_comparisons(&groups, &comparisons, None, options, &mut tests);

    let mut strata = BTreeMap::new();
    if !strata_order.is_empty() {
        let mut by_stratum: BTreeMap<GroupKey, Vec<&Measured>> = BTreeMap::new();
        for m in &measured {
            match Corpus::key_for(m.doc, &strata_order) {
                Some(k) => by_stratum.entry(k).or_default().push(m),
                None => skipped.missing_strata_attrs.push(m.doc.id.clone()),
            }
        }
        for (stratum, members) in by_stratum {
            let cells = summarize(members.into_iter(), &group_order, options.averaging)?;
            let label = stratum.to_string();
            run_comparisons(&cells, &comparisons, Some(&label), options, &mut tests);
            strata.insert(label, cells.into_values().collect());
        }
    }

    let mut kdes = BTreeMap::new();
    for s in groups.values() {
        if s.doc_gaps.len() >= 2 {
            kdes.insert(s.group.clone(), kde(&s.doc_gaps, None, options.kde_grid_size)?);
        }
    }

    let config = ReportConfig {
        backend: classifier.identity().to_string(),
        group_attrs: group_order.iter().map(|s| s.to_string()).collect(),
        strata_attrs: strata_order.iter().map(|s| s.to_string()).collect(),
        trim_wikibio: options.trim_wikibio,
        averaging: options.averaging,
        test_variant: options.test_variant,
        alternative: options.alternative,
        comparisons: comparisons.iter().map(ToString::to_string).collect(),
        seeds: options.seeds.clone(),
        kde_grid_size: options.kde_grid_size,
        abbreviations: match &options.abbreviations {
            None => "shipped".into(),
            Some(a) => format!("custom ({} entries)", a.len()),
        },
        provenance: options.provenance.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };
    Ok(AuditReport {
        report_v: REPORT_VERSION,
        config,
        groups: groups.into_values().collect(),
        strata,
        tests,
        kde: kdes,
        skipped_docs: skipped,
    })
}

fn default_comparisons(measured: &[Measured], group_order: &[&str]) -> Vec<Comparison> {
    group_order
        .iter()
        .filter_map(|attr| {
            let values: BTreeSet<&str> = measured.iter().filter_map(|m| m.doc.attr(attr)).collect();
            let mut it = values.into_iter();
            match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => Some(Comparison { attr: attr.to_string(), a: a.into(), b: b.into() }),
                _ => None,
            }
        })
        .collect()
}
