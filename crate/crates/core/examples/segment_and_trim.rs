//! Sentence splitting with the shipped abbreviation list, a custom list, and
//! the biography trim (drop the first two and the last sentence).

use agency_audit::segment::{split_sentences, wikibio_trim, Abbreviations, Segmenter};

const BIO: &str = "Dr. Ana Ruiz (born 1970) is a chemist. She grew up in St. Louis. \
She founded a lab at the U.S. Naval Academy and led it for 12 years. \
Colleagues describe her as generous, e.g. with her time. \"Work hard,\" she says. \
She lives in Annapolis.";

fn main() {
    let sentences = split_sentences(BIO);
    for s in &sentences {
        println!("[{}] {}", s.index, s.text);
    }

    let trimmed = wikibio_trim(&sentences);
    println!("\nafter trim ({} of {}):", trimmed.sentences.len(), sentences.len());
    for s in &trimmed.sentences {
        println!("[{}] {}", s.index, s.text);
    }

    // A custom list replaces the shipped one, so "Dr." now ends a sentence.
    let custom = Abbreviations::parse("approx\n# comment lines are ignored\n");
    let text = "Dr. Kim took approx. ten years. Then it was done.";
    println!("\nshipped: {:?}", split_sentences(text).iter().map(|s| &s.text).collect::<Vec<_>>());
    println!("custom:  {:?}", Segmenter::new(&custom).split(text).iter().map(|s| &s.text).collect::<Vec<_>>());
}
