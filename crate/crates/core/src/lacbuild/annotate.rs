use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::AgencyLabel;
use crate::stats::KappaInput;

use super::LacError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationLabel {
    Agentic,
    Communal,
    Neutral,
    /// Incomplete or meaningless text. Never a final label.
    #[serde(rename = "na")]
    NA,
}

impl AnnotationLabel {
    /// Categories used for agreement matrices, in column order.
    pub const VOTABLE: [AnnotationLabel; 3] = [AnnotationLabel::Agentic, AnnotationLabel::Communal, AnnotationLabel::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            AnnotationLabel::Agentic => "agentic",
            AnnotationLabel::Communal => "communal",
            AnnotationLabel::Neutral => "neutral",
            AnnotationLabel::NA => "na",
        }
    }

    pub fn binary(self) -> Option<AgencyLabel> {
        match self {
            AnnotationLabel::Agentic => Some(AgencyLabel::Agentic),
            AnnotationLabel::Communal => Some(AgencyLabel::Communal),
            _ => None,
        }
    }
}

impl From<AgencyLabel> for AnnotationLabel {
    fn from(l: AgencyLabel) -> Self {
        match l {
            AgencyLabel::Agentic => AnnotationLabel::Agentic,
            AgencyLabel::Communal => AnnotationLabel::Communal,
        }
    }
}

impl fmt::Display for AnnotationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnnotationLabel {
    type Err = LacError;

    /// Accepts the names and the numeric shorthand 1 / 0 / -1.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "agentic" | "1" => Ok(AnnotationLabel::Agentic),
            "neutral" | "0" => Ok(AnnotationLabel::Neutral),
            "communal" | "-1" => Ok(AnnotationLabel::Communal),
            "na" => Ok(AnnotationLabel::NA),
            _ => Err(LacError::UnknownAnnotationLabel(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub item_id: String,
    pub text: String,
    /// The category the paraphrase was generated for; counts as one vote.
    pub generator_label: AnnotationLabel,
    pub human_labels: Vec<AnnotationLabel>,
    #[serde(default)]
    pub tiebreak_label: Option<AnnotationLabel>,
    #[serde(default)]
    pub final_label: Option<AnnotationLabel>,
}

impl AnnotationRecord {
    pub fn new(item_id: &str, text: &str, generator_label: AnnotationLabel, human_labels: Vec<AnnotationLabel>) -> Self {
        AnnotationRecord {
            item_id: item_id.into(),
            text: text.into(),
            generator_label,
            human_labels,
            tiebreak_label: None,
            final_label: None,
        }
    }

    pub fn with_tiebreak(mut self, label: AnnotationLabel) -> Self {
        self.tiebreak_label = Some(label);
        self
    }

    fn votes(&self) -> impl Iterator<Item = AnnotationLabel> + '_ {
        std::iter::once(self.generator_label).chain(self.human_labels.iter().copied())
    }

    /// The label with the most votes, if it has at least two and no rival.
    fn majority(&self) -> Option<AnnotationLabel> {
        let mut counts: BTreeMap<AnnotationLabel, usize> = BTreeMap::new();
        for v in self.votes() {
            *counts.entry(v).or_default() += 1;
        }
        let best = *counts.values().max()?;
        let mut leaders = counts.iter().filter(|(_, &c)| c == best);
        match (leaders.next(), leaders.next()) {
            (Some((&l, _)), None) if best >= 2 => Some(l),
            _ => None,
        }
    }
}

/// One item offered to annotators: a generated sentence and the category it
/// was generated for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedItem {
    pub item_id: String,
    pub text: String,
    pub generator_label: AgencyLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledItem {
    pub item_id: String,
    pub text: String,
    pub label: AgencyLabel,
}

#[derive(Debug, Deserialize)]
struct AnnotatorRow {
    item_id: String,
    label: String,
}

/// Reads an annotator CSV with `item_id,label` columns.
pub fn parse_annotator_csv<R: Read>(reader: R) -> Result<BTreeMap<String, AnnotationLabel>, LacError> {
    let mut out = BTreeMap::new();
    for (i, row) in csv::Reader::from_reader(reader).deserialize::<AnnotatorRow>().enumerate() {
        let row = row.map_err(|e| LacError::Csv { line: i + 2, message: e.to_string() })?;
        let label = row.label.parse()?;
        if out.insert(row.item_id.clone(), label).is_some() {
            return Err(LacError::DuplicateItem(row.item_id));
        }
    }
    Ok(out)
}

pub fn read_annotator_csv(path: &Path) -> Result<BTreeMap<String, AnnotationLabel>, LacError> {
    let file = std::fs::File::open(path).map_err(|e| LacError::Io { path: path.to_path_buf(), source: e })?;
    parse_annotator_csv(file)
}

/// Joins generated items with every annotator's labels (and optional
/// tiebreak labels) into records, in item order.
pub fn assemble_records(
    items: &[GeneratedItem],
    annotators: &[BTreeMap<String, AnnotationLabel>],
    tiebreak: Option<&BTreeMap<String, AnnotationLabel>>,
) -> Result<Vec<AnnotationRecord>, LacError> {
    items
        .iter()
        .map(|item| {
            let human_labels = annotators
                .iter()
                .enumerate()
                .map(|(a, labels)| {
                    labels
                        .get(&item.item_id)
                        .copied()
                        .ok_or_else(|| LacError::MissingAnnotation { item_id: item.item_id.clone(), annotator: a })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(AnnotationRecord {
                item_id: item.item_id.clone(),
                text: item.text.clone(),
                generator_label: item.generator_label.into(),
                human_labels,
                tiebreak_label: tiebreak.and_then(|t| t.get(&item.item_id).copied()),
                final_label: None,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeOutcome {
    /// Surviving records with `final_label` set, in input order.
    pub records: Vec<AnnotationRecord>,
    /// Items a human marked as invalid.
    pub dropped_na: Vec<String>,
    /// Vote counts per surviving record over (agentic, communal, neutral).
    pub ratings: KappaInput,
    /// The same counts restricted to records whose final label is not neutral.
    pub ratings_without_neutral: Option<KappaInput>,
}

pub fn merge_annotations(records: &[AnnotationRecord]) -> Result<MergeOutcome, LacError> {
    for r in records {
        if r.generator_label.binary().is_none() {
            return Err(LacError::InvalidGeneratorLabel { item_id: r.item_id.clone(), label: r.generator_label });
        }
        if r.human_labels.len() < 2 {
            return Err(LacError::TooFewHumanLabels { item_id: r.item_id.clone(), got: r.human_labels.len() });
        }
        if r.tiebreak_label == Some(AnnotationLabel::NA) {
            return Err(LacError::InvalidTiebreak(r.item_id.clone()));
        }
    }
    let mut kept = Vec::new();
    let mut dropped_na = Vec::new();
    let mut unresolved = Vec::new();
    for r in records {
        if r.human_labels.contains(&AnnotationLabel::NA) {
            dropped_na.push(r.item_id.clone());
            continue;
        }
        match r.majority().or(r.tiebreak_label) {
            Some(label) => kept.push(AnnotationRecord { final_label: Some(label), ..r.clone() }),
            None => unresolved.push(r.item_id.clone()),
        }
    }
    if !unresolved.is_empty() {
        return Err(LacError::NoMajority(unresolved));
    }
    if kept.is_empty() {
        return Err(LacError::NothingSurvived);
    }
    let ratings = rating_matrix(kept.iter())?;
    let non_neutral: Vec<&AnnotationRecord> =
        kept.iter().filter(|r| r.final_label != Some(AnnotationLabel::Neutral)).collect();
    let ratings_without_neutral =
        if non_neutral.is_empty() { None } else { Some(rating_matrix(non_neutral.into_iter())?) };
    Ok(MergeOutcome { records: kept, dropped_na, ratings, ratings_without_neutral })
}

fn rating_matrix<'a>(records: impl Iterator<Item = &'a AnnotationRecord>) -> Result<KappaInput, LacError> {
    let rows = records
        .map(|r| {
            let mut row = vec![0u64; AnnotationLabel::VOTABLE.len()];
            for v in r.votes() {
                let col = AnnotationLabel::VOTABLE.iter().position(|&l| l == v).expect("NA rows are dropped first");
                row[col] += 1;
            }
            row
        })
        .collect();
    Ok(KappaInput::new(rows)?)
}

/// Removes records whose final label is neutral.
pub fn drop_neutral(records: &[AnnotationRecord]) -> Vec<AnnotationRecord> {
    records.iter().filter(|r| r.final_label != Some(AnnotationLabel::Neutral)).cloned().collect()
}

/// The binary dataset. Every record must carry an agentic or communal final label.
pub fn labeled_items(records: &[AnnotationRecord]) -> Result<Vec<LabeledItem>, LacError> {
    records
        .iter()
        .map(|r| {
            let label = r.final_label.and_then(AnnotationLabel::binary).ok_or_else(|| LacError::NotBinary(r.item_id.clone()))?;
            Ok(LabeledItem { item_id: r.item_id.clone(), text: r.text.clone(), label })
        })
        .collect()
}
