use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classify::AgencyLabel;

use super::annotate::GeneratedItem;
use super::generate::TranscriptEntry;
use super::LacError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParaphrasePair {
    pub source_sentence: String,
    pub agentic: String,
    pub communal: String,
}

/// Finds the first `{...}` in `raw` that parses as a JSON object.
fn first_object(raw: &str) -> Option<serde_json::Map<String, Value>> {
    raw.match_indices('{').find_map(|(at, _)| {
        let mut stream = serde_json::Deserializer::from_str(&raw[at..]).into_iter::<Value>();
        match stream.next() {
            Some(Ok(Value::Object(map))) => Some(map),
            _ => None,
        }
    })
}

/// Parses a generator reply to the paraphrase prompt. Prose and code fences
/// around the JSON object are ignored.
pub fn parse_paraphrase_response(raw: &str) -> Result<ParaphrasePair, LacError> {
    parse_paraphrase_for(raw, "")
}

/// As [`parse_paraphrase_response`], recording the sentence that was rephrased.
pub fn parse_paraphrase_for(raw: &str, source_sentence: &str) -> Result<ParaphrasePair, LacError> {
    let obj = first_object(raw).ok_or(LacError::NoJsonObject)?;
    let field = |key: &'static str| -> Result<String, LacError> {
        match obj.get(key) {
            Some(Value::String(s)) if !s.trim().is_empty() => Ok(s.trim().to_string()),
            Some(Value::String(_)) => Err(LacError::EmptyKey(key)),
            Some(_) => Err(LacError::NotAString(key)),
            None => Err(LacError::MissingKey(key)),
        }
    };
    let agentic = field("agentic")?;
    let communal = field("communal")?;
    if agentic == communal {
        return Err(LacError::IdenticalParaphrases);
    }
    Ok(ParaphrasePair { source_sentence: source_sentence.to_string(), agentic, communal })
}

/// Expands each parseable paraphrase reply into two items to annotate,
/// `<item_id>-agentic` and `<item_id>-communal`. Replies that fail to parse
/// are returned separately.
pub fn paraphrase_items(entries: &[TranscriptEntry]) -> (Vec<GeneratedItem>, Vec<(String, LacError)>) {
    let mut items = Vec::new();
    let mut failed = Vec::new();
    for e in entries {
        match parse_paraphrase_response(&e.response) {
            Ok(pair) => {
                for (label, text) in [(AgencyLabel::Agentic, pair.agentic), (AgencyLabel::Communal, pair.communal)] {
                    items.push(GeneratedItem { item_id: format!("{}-{label}", e.item_id), text, generator_label: label });
                }
            }
            Err(err) => failed.push((e.item_id.clone(), err)),
        }
    }
    (items, failed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_and_fenced() {
        let p = parse_paraphrase_response(r#"{"agentic":"She spearheaded X.","communal":"She supported X."}"#).unwrap();
        assert_eq!((p.agentic.as_str(), p.communal.as_str()), ("She spearheaded X.", "She supported X."));
        let fenced = "Sure! Here is the {rephrasing}:\n```json\n{\n  \"agentic\": \"She spearheaded X.\",\n  \"communal\": \"She supported X.\"\n}\n```\nLet me know.";
        assert_eq!(parse_paraphrase_response(fenced).unwrap(), p);
    }

    #[test]
    fn failures() {
        assert!(matches!(parse_paraphrase_response(r#"{"agentic":"x"}"#), Err(LacError::MissingKey("communal"))));
        assert!(matches!(parse_paraphrase_response("no json here"), Err(LacError::NoJsonObject)));
        assert!(matches!(parse_paraphrase_response(r#"{"agentic":"x","communal":" "}"#), Err(LacError::EmptyKey("communal"))));
        assert!(matches!(parse_paraphrase_response(r#"{"agentic":"x","communal":"x"}"#), Err(LacError::IdenticalParaphrases)));
        assert!(matches!(parse_paraphrase_response(r#"{"agentic":1,"communal":"x"}"#), Err(LacError::NotAString("agentic"))));
        assert!(matches!(parse_paraphrase_response(r#"{"agentic":"a","communal":"#), Err(LacError::NoJsonObject)));
    }

    #[test]
    fn expands_transcript() {
        let entry = |id: &str, response: &str| TranscriptEntry {
            item_id: id.into(),
            prompt: String::new(),
            response: response.into(),
            ts: 0,
            meta: None,
        };
        let (items, failed) = paraphrase_items(&[entry("s1", r#"{"agentic":"A.","communal":"C."}"#), entry("s2", "sorry")]);
        assert_eq!(items.len(), 2);
        assert_eq!(items[1].item_id, "s1-communal");
        assert_eq!(items[1].generator_label, AgencyLabel::Communal);
        assert_eq!(failed.len(), 1);
    }
}
