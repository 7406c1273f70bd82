//! Scores a backend against a small gold set and prints the confusion-based
//! metrics.

use agency_audit::classify::{eval_classifier, AgencyLabel, BackendDescriptor, Classifier, EvalMetrics};

fn main() -> anyhow::Result<()> {
    use AgencyLabel::{Agentic, Communal};
    let gold: Vec<(String, AgencyLabel)> = [
        ("She founded the lab in 2004.", Agentic),
        ("He won three national titles.", Agentic),
        ("She is a devoted mother.", Communal),
        ("He helps new students settle in.", Communal),
        ("They designed the new terminal.", Agentic),
        ("She was born in Leeds.", Communal),
        ("His friendly manner puts people at ease.", Communal),
        ("She managed a team of forty.", Agentic),
    ]
    .into_iter()
    .map(|(t, l)| (t.to_string(), l))
    .collect();

    let classifier = Classifier::connect(&BackendDescriptor::seed_lexicon())?;
    let m = eval_classifier(&classifier, &gold)?;
    println!("backend   {}", classifier.identity());
    println!("confusion {:?}  (rows gold, cols predicted; agentic first)", m.confusion);
    println!("accuracy  {:.4}", m.accuracy);
    println!("macro F1  {:.4}", m.f1_macro);
    println!("micro F1  {:.4}", m.f1_micro);
    println!("weighted  {:.4}", m.f1_weighted);

    let fixed = EvalMetrics::from_confusion([[40, 10], [5, 45]])?;
    println!("\nfrom a fixed confusion: accuracy {:.2}, macro F1 {:.4}", fixed.accuracy, fixed.f1_macro);
    Ok(())
}
