//! Resumable generation against a stand-in endpoint. The first run is cut
//! short by an endpoint failure; the second run reuses the journal and only
//! requests what is missing.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use agency_audit::lacbuild::{
    read_transcript, render_paraphrase_prompt, run_generation, EndpointError, GenerationEndpoint, GenerationOptions,
    GenerationReply, PlanItem, SystemClock, DEFAULT_AGENTIC_EXAMPLE, DEFAULT_COMMUNAL_EXAMPLE,
};

struct Flaky {
    calls: AtomicUsize,
    fail_at: usize,
}

impl GenerationEndpoint for Flaky {
    fn generate(&self, prompt: &str, _seed: Option<u64>) -> Result<GenerationReply, EndpointError> {
        let n = self.calls.fetch_add(1, Ordering::SeqCst);
        if n == self.fail_at {
            return Err(EndpointError::fatal("quota exhausted"));
        }
        let sentence = prompt.rsplit("The sentence is: ").next().unwrap_or("").trim_matches('\'');
        let text = serde_json::json!({"agentic": format!("Boldly, {sentence}"), "communal": format!("Kindly, {sentence}")});
        Ok(GenerationReply { text: text.to_string(), meta: None })
    }
}

fn main() -> anyhow::Result<()> {
    let sentences = ["She runs a lab.", "He coaches a team.", "They teach music.", "She writes code."];
    let plan = sentences
        .iter()
        .enumerate()
        .map(|(i, s)| {
            Ok(PlanItem {
                item_id: format!("s{i}"),
                prompt: render_paraphrase_prompt(s, DEFAULT_AGENTIC_EXAMPLE, DEFAULT_COMMUNAL_EXAMPLE)?,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let dir = tempfile::tempdir()?;
    let journal = dir.path().join("transcript.jsonl");
    let opts = GenerationOptions { min_interval: Some(Duration::from_millis(5)), ..Default::default() };

    let flaky = Flaky { calls: AtomicUsize::new(0), fail_at: 2 };
    match run_generation(&plan, &flaky, &opts, &journal, &SystemClock) {
        Ok(s) => println!("first run finished: {s:?}"),
        Err(e) => println!("first run stopped: {e}"),
    }
    println!("journal holds {} entries", read_transcript(&journal)?.len());

    let healthy = Flaky { calls: AtomicUsize::new(0), fail_at: usize::MAX };
    let summary = run_generation(&plan, &healthy, &opts, &journal, &SystemClock)?;
    println!("second run: {} resumed, {} requests", summary.resumed, summary.requests);
    for e in read_transcript(&journal)? {
        println!("{} {}", e.item_id, e.response);
    }
    Ok(())
}
