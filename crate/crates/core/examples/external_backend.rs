//! Talks to an external classifier over the line protocol.
//!
//! With no argument an in-process transport stands in for the model: it
//! answers every request by keyword and forgets to echo scores. Pass a
//! descriptor such as `http:http://127.0.0.1:8080` or `stdio:./model.sh`
//! to probe a real backend instead.
//!
//! ```text
//! cargo run --example external_backend -- [BACKEND]
//! ```

use agency_audit::classify::transport::Transport;
use agency_audit::classify::{backend_check, check_transport, BackendDescriptor, Classifier, Fault};
use serde_json::{json, Value};

struct KeywordModel;

impl Transport for KeywordModel {
    fn exchange(&self, _worker: usize, request: &str) -> Result<String, Fault> {
        let req: Value = serde_json::from_str(request).map_err(|e| Fault::Transport(e.to_string()))?;
        let labels: Vec<&str> = req["texts"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|t| if t.as_str().unwrap_or("").contains("led") { "agentic" } else { "communal" })
            .collect();
        Ok(json!({"v": "1", "id": req["id"], "labels": labels}).to_string())
    }
}

fn main() -> anyhow::Result<()> {
    let report = match std::env::args().nth(1) {
        Some(arg) => backend_check(&arg.parse::<BackendDescriptor>()?)?,
        None => check_transport("in-process keyword model", &KeywordModel),
    };
    for o in &report.outcomes {
        println!("{}", o.line());
    }
    println!("passed: {}", report.passed());

    let descriptor = BackendDescriptor::stdio("keyword-model").batch_size(2);
    let classifier = Classifier::from_transport(descriptor, Box::new(KeywordModel), 2);
    let texts: Vec<String> = ["She led the union.", "He cooks for the shelter.", "They led a retreat."].map(String::from).to_vec();
    for (t, c) in texts.iter().zip(classifier.classify_batch(&texts)?) {
        println!("{:<9} {:.2} {t}", c.label.as_str(), c.score);
    }
    Ok(())
}
