//! Classifies sentences with the seed lexicon and with a small inline one,
//! showing the per-sentence hit counts and the tie rule.

use agency_audit::classify::{lexicon_classify, lexicon_counts, AgencyLabel, Lexicon};

fn main() -> anyhow::Result<()> {
    let seed = Lexicon::seed();
    println!("seed lexicon: {} entries, digest {}", seed.len(), seed.digest());
    let sentences = [
        "She founded a company and led its expansion.",
        "He is a caring and supportive mentor.",
        "They live in Boston.",
        "An ambitious, warm leader.",
    ];
    for s in sentences {
        let counts = lexicon_counts(&seed, s);
        let c = lexicon_classify(&seed, s, AgencyLabel::Communal);
        println!("{:<10} {:?} {s}", c.label.as_str(), counts);
    }

    let custom = Lexicon::parse_toml("agentic = [\"bold\", \"in charge\"]\ncommunal = [\"kind\"]\n")?;
    for tie in [AgencyLabel::Agentic, AgencyLabel::Communal] {
        let c = custom.classify("A bold and kind person.", tie);
        println!("tie -> {:?}: {}", tie, c.label);
    }
    Ok(())
}
