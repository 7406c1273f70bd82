//! Demographically annotated corpora: loading, validation, balanced sampling
//! and minimum-count stratum filtering.
//!
//! Attribute values are opaque, case-sensitive strings. `"Male"` and `"male"`
//! are different groups; nothing is normalized on load.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::rng::{derive_seed, seeded_shuffle};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: malformed row: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate document id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: document {id:?} has empty text")]
    EmptyText { line: usize, id: String },
    #[error("line {line}: attribute {name:?} is not declared in the schema")]
    UndeclaredAttribute { line: usize, name: String },
    #[error("line {line}: required attribute {name:?} is missing")]
    MissingAttribute { line: usize, name: String },
    #[error("attribute {0:?} declared more than once")]
    DuplicateSchemaName(String),
    #[error("attribute {0:?} is not in the corpus schema")]
    UnknownAttribute(String),
    #[error("group {group} has {count} documents, fewer than the {needed} requested")]
    UndersizedGroup {
        group: GroupKey,
        count: usize,
        needed: usize,
    },
    #[error("sample size must be positive")]
    ZeroSampleSize,
    #[error("unknown corpus format {0:?} (expected jsonl or csv)")]
    UnknownFormat(String),
}

/// One text unit (biography, review, letter) with its demographic attributes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub attrs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            attrs: BTreeMap::new(),
            source: None,
        }
    }

    pub fn with_attr(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.attrs.insert(name.into(), value.into());
        self
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.get(name).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttrSpec {
    pub name: String,
    pub optional: bool,
}

impl AttrSpec {
    pub fn required(name: impl Into<String>) -> Self {
        AttrSpec { name: name.into(), optional: false }
    }

    pub fn optional(name: impl Into<String>) -> Self {
        AttrSpec { name: name.into(), optional: true }
    }
}

/// Ordered attribute declarations. The order is the canonical order of
/// [`GroupKey`] components.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    attrs: Vec<AttrSpec>,
}

impl Schema {
    pub fn new(attrs: Vec<AttrSpec>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for a in &attrs {
            if !seen.insert(a.name.clone()) {
                return Err(CorpusError::DuplicateSchemaName(a.name.clone()));
            }
        }
        Ok(Schema { attrs })
    }

    pub fn attrs(&self) -> &[AttrSpec] {
        &self.attrs
    }

    pub fn names(&self) -> Vec<&str> {
        self.attrs.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.attrs.iter().position(|a| a.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.position(name).is_some()
    }

    /// Returns `names` reordered to schema order, or the first unknown name.
    pub fn canonical_order<'a>(&self, names: &'a [String]) -> Result<Vec<&'a str>, CorpusError> {
        let mut positioned = Vec::with_capacity(names.len());
        for n in names {
            let pos = self
                .position(n)
                .ok_or_else(|| CorpusError::UnknownAttribute(n.clone()))?;
            positioned.push((pos, n.as_str()));
        }
        positioned.sort_by_key(|(p, _)| *p);
        positioned.dedup_by_key(|(p, _)| *p);
        Ok(positioned.into_iter().map(|(_, n)| n).collect())
    }
}

/// Ordered `(attribute, value)` pairs identifying a demographic cell.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupKey(pub Vec<(String, String)>);

impl GroupKey {
    pub fn new(pairs: Vec<(String, String)>) -> Self {
        GroupKey(pairs)
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.0
    }

    pub fn value(&self, attr: &str) -> Option<&str> {
        self.0.iter().find(|(a, _)| a == attr).map(|(_, v)| v.as_str())
    }

    /// The key with one attribute removed.
    pub fn without(&self, attr: &str) -> GroupKey {
        GroupKey(self.0.iter().filter(|(a, _)| a != attr).cloned().collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    schema: Schema,
    documents: Vec<Document>,
}

impl Corpus {
    /// Validates `documents` against `schema`. Error line numbers are 1-based
    /// document positions.
    pub fn new(schema: Schema, documents: Vec<Document>) -> Result<Self, CorpusError> {
        let rows = documents.into_iter().enumerate().map(|(i, d)| (i + 1, d)).collect();
        Self::from_rows(schema, rows)
    }

    fn from_rows(schema: Schema, rows: Vec<(usize, Document)>) -> Result<Self, CorpusError> {
        let mut ids = HashSet::with_capacity(rows.len());
        let mut documents = Vec::with_capacity(rows.len());
        for (line, doc) in rows {
            if doc.text.trim().is_empty() {
                return Err(CorpusError::EmptyText { line, id: doc.id });
            }
            for name in doc.attrs.keys() {
                if !schema.contains(name) {
                    return Err(CorpusError::UndeclaredAttribute { line, name: name.clone() });
                }
            }
            for spec in schema.attrs() {
                if !spec.optional && !doc.attrs.contains_key(&spec.name) {
                    return Err(CorpusError::MissingAttribute { line, name: spec.name.clone() });
                }
            }
            if !ids.insert(doc.id.clone()) {
                return Err(CorpusError::DuplicateId { line, id: doc.id });
            }
            documents.push(doc);
        }
        Ok(Corpus { schema, documents })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Keeps the schema, replaces the documents with a subset of the current ones.
    fn with_documents(&self, documents: Vec<Document>) -> Corpus {
        Corpus { schema: self.schema.clone(), documents }
    }

    /// The document's key over `attrs` (already in schema order), or `None`
    /// if any of them is missing on this document.
    pub fn key_for(doc: &Document, attrs: &[&str]) -> Option<GroupKey> {
        let mut pairs = Vec::with_capacity(attrs.len());
        for a in attrs {
            pairs.push((a.to_string(), doc.attrs.get(*a)?.clone()));
        }
        Some(GroupKey(pairs))
    }

    /// Writes the corpus as JSONL, one document per line.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> io::Result<()> {
        for d in &self.documents {
            serde_json::to_writer(&mut w, d)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Jsonl,
    Csv,
}

impl Format {
    /// Guesses from the file extension, defaulting to JSONL.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Jsonl,
        }
    }
}

impl FromStr for Format {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jsonl" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(CorpusError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttrMapping {
    /// Attribute name in the corpus schema.
    pub name: String,
    /// JSONL key inside `attrs` (falling back to a top-level key) or CSV column.
    pub field: String,
    pub optional: bool,
}

/// Where to find each document field in the input rows.
///
/// With an empty `attrs` list a JSONL file declares its own schema: every key
/// seen under `attrs`, sorted by name, optional if absent on some document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMapping {
    pub id: String,
    pub text: String,
    pub source: Option<String>,
    pub attrs: Vec<AttrMapping>,
}

impl Default for FieldMapping {
    fn default() -> Self {
        FieldMapping {
            id: "id".into(),
            text: "text".into(),
            source: Some("source".into()),
            attrs: Vec::new(),
        }
    }
}

impl FieldMapping {
    pub fn attr(mut self, name: &str, field: &str) -> Self {
        self.attrs.push(AttrMapping { name: name.into(), field: field.into(), optional: false });
        self
    }

    pub fn optional_attr(mut self, name: &str, field: &str) -> Self {
        self.attrs.push(AttrMapping { name: name.into(), field: field.into(), optional: true });
        self
    }

    fn declared_schema(&self) -> Result<Schema, CorpusError> {
        Schema::new(
            self.attrs
                .iter()
                .map(|a| AttrSpec { name: a.name.clone(), optional: a.optional })
                .collect(),
        )
    }
}

pub fn load_corpus(path: &Path, format: Format, mapping: &FieldMapping) -> Result<Corpus, CorpusError> {
    let file = File::open(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
    match format {
        Format::Jsonl => parse_jsonl(BufReader::new(file), mapping),
        Format::Csv => parse_csv(file, mapping),
    }
}

fn json_string(v: &Value, line: usize, what: &str) -> Result<Option<String>, CorpusError> {
    match v {
        Value::Null => Ok(None),
        Value::String(s) => Ok(Some(s.clone())),
        other => Err(CorpusError::Malformed {
            line,
            message: format!("{what} must be a string, found {other}"),
        }),
    }
}

pub fn parse_jsonl<R: BufRead>(reader: R, mapping: &FieldMapping) -> Result<Corpus, CorpusError> {
    let infer = mapping.attrs.is_empty();
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line)
            .map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?;
        let obj = value.as_object().ok_or_else(|| CorpusError::Malformed {
            line: line_no,
            message: "expected a JSON object".into(),
        })?;
        let field = |name: &str| -> Result<Option<String>, CorpusError> {
            match obj.get(name) {
                None => Ok(None),
                Some(v) => json_string(v, line_no, name),
            }
        };
        let id = field(&mapping.id)?.ok_or_else(|| CorpusError::Malformed {
            line: line_no,
            message: format!("missing id field {:?}", mapping.id),
        })?;
        let text = field(&mapping.text)?.unwrap_or_default();
        let source = match &mapping.source {
            Some(s) => field(s)?,
            None => None,
        };
        let raw_attrs = match obj.get("attrs") {
            None | Some(Value::Null) => serde_json::Map::new(),
            Some(Value::Object(m)) => m.clone(),
            Some(_) => {
                return Err(CorpusError::Malformed { line: line_no, message: "attrs must be an object".into() })
            }
        };
        let mut attrs = BTreeMap::new();
        if infer {
            for (k, v) in &raw_attrs {
                if let Some(s) = json_string(v, line_no, k)? {
                    attrs.insert(k.clone(), s);
                }
            }
        } else {
            let mapped: HashSet<&str> = mapping.attrs.iter().map(|a| a.field.as_str()).collect();
            if let Some(k) = raw_attrs.keys().find(|k| !mapped.contains(k.as_str())) {
                return Err(CorpusError::UndeclaredAttribute { line: line_no, name: k.clone() });
            }
            for a in &mapping.attrs {
                let v = raw_attrs.get(&a.field).or_else(|| obj.get(&a.field));
                if let Some(s) = v.map(|v| json_string(v, line_no, &a.field)).transpose()?.flatten() {
                    attrs.insert(a.name.clone(), s);
                }
            }
        }
        rows.push((line_no, Document { id, text, attrs, source }));
    }
    let schema = if infer {
        let names: BTreeSet<&String> = rows.iter().flat_map(|(_, d)| d.attrs.keys()).collect();
        Schema::new(
            names
                .into_iter()
                .map(|n| AttrSpec {
                    name: n.clone(),
                    optional: rows.iter().any(|(_, d)| !d.attrs.contains_key(n)),
                })
                .collect(),
        )?
    } else {
        mapping.declared_schema()?
    };
    Corpus::from_rows(schema, rows)
}

/// Comma-separated, double-quote quoting, UTF-8, header row required.
/// Empty cells are missing values.
pub fn parse_csv<R: Read>(reader: R, mapping: &FieldMapping) -> Result<Corpus, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CorpusError::Malformed { line: 1, message: e.to_string() })?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let missing_col = |name: &str| CorpusError::Malformed { line: 1, message: format!("no column named {name:?}") };
    let id_col = column(&mapping.id).ok_or_else(|| missing_col(&mapping.id))?;
    let text_col = column(&mapping.text).ok_or_else(|| missing_col(&mapping.text))?;
    let source_col = mapping.source.as_deref().and_then(column);
    let mut attr_cols = Vec::with_capacity(mapping.attrs.len());
    for a in &mapping.attrs {
        attr_cols.push((a.name.clone(), column(&a.field).ok_or_else(|| missing_col(&a.field))?));
    }
    let schema = mapping.declared_schema()?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CorpusError::Malformed {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let cell = |i: usize| rec.get(i).unwrap_or("");
        let mut attrs = BTreeMap::new();
        for (name, col) in &attr_cols {
            let v = cell(*col);
            if !v.is_empty() {
                attrs.insert(name.clone(), v.to_string());
            }
        }
        let source = source_col.map(cell).filter(|s| !s.is_empty()).map(str::to_string);
        rows.push((line, Document { id: cell(id_col).to_string(), text: cell(text_col).to_string(), attrs, source }));
    }
    Corpus::from_rows(schema, rows)
}

/// Exactly `n` documents from every group over `group_attrs`, chosen by a
/// seeded shuffle of each group (seed derived from `seed` and the group key)
/// and taking the first `n`. Output keeps corpus order. Documents missing a
/// grouping attribute belong to no group and are not sampled.
pub fn sample_balanced(corpus: &Corpus, group_attrs: &[String], n: usize, seed: u64) -> Result<Corpus, CorpusError> {
    if n == 0 {
        return Err(CorpusError::ZeroSampleSize);
    }
    let attrs = corpus.schema.canonical_order(group_attrs)?;
    let mut groups: BTreeMap<GroupKey, Vec<usize>> = BTreeMap::new();
    for (i, d) in corpus.documents.iter().enumerate() {
        if let Some(k) = Corpus::key_for(d, &attrs) {
            groups.entry(k).or_default().push(i);
        }
    }
    let mut keep = vec![false; corpus.len()];
    for (key, mut members) in groups {
        if members.len() < n {
            return Err(CorpusError::UndersizedGroup { group: key, count: members.len(), needed: n });
        }
        seeded_shuffle(&mut members, derive_seed(seed, &key.to_string()));
        for &i in &members[..n] {
            keep[i] = true;
        }
    }
    let docs = corpus
        .documents
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(d, _)| d.clone())
        .collect();
    Ok(corpus.with_documents(docs))
}

/// Removes every stratum in which some value of `group_attr` (over all values
/// seen in the corpus) has fewer than `min_count` documents. Documents without
/// a stratum value are kept.
pub fn filter_min_group(
    corpus: &Corpus,
    strata_attr: &str,
    group_attr: &str,
    min_count: usize,
) -> Result<Corpus, CorpusError> {
    for a in [strata_attr, group_attr] {
        if !corpus.schema.contains(a) {
            return Err(CorpusError::UnknownAttribute(a.to_string()));
        }
    }
    let values: BTreeSet<&str> = corpus.documents.iter().filter_map(|d| d.attr(group_attr)).collect();
    let mut counts: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for d in &corpus.documents {
        if let Some(s) = d.attr(strata_attr) {
            let per = counts.entry(s).or_default();
            if let Some(g) = d.attr(group_attr) {
                *per.entry(g).or_default() += 1;
            }
        }
    }
    let dropped: HashSet<&str> = counts
        .iter()
        .filter(|(_, per)| values.iter().any(|v| per.get(v).copied().unwrap_or(0) < min_count))
        .map(|(s, _)| *s)
        .collect();
    let docs = corpus
        .documents
        .iter()
        .filter(|d| d.attr(strata_attr).is_none_or(|s| !dropped.contains(s)))
        .cloned()
        .collect();
    Ok(corpus.with_documents(docs))
}
