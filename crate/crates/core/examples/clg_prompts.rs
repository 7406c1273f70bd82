//! Renders controlled-generation prompts for each document kind and shows
//! the size of each descriptor grid.

use std::collections::BTreeMap;

use agency_audit::lacbuild::{clg_plan, render_clg_prompt, ClgKind};

fn main() -> anyhow::Result<()> {
    for kind in ClgKind::ALL {
        let plan = clg_plan(kind);
        println!("{kind}: {} prompts, descriptors {:?}", plan.len(), kind.required_descriptors());
        println!("  {}", plan[0].prompt);
        println!("  {}", plan[plan.len() - 1].prompt);
    }

    let d: BTreeMap<String, String> =
        [("name", "Amara"), ("gender", "female"), ("race", "Black"), ("department", "Chemistry department")]
            .into_iter()
            .map(|(k, v)| (k.into(), v.into()))
            .collect();
    println!("\n{}", render_clg_prompt(ClgKind::Review, &d)?);
    if let Err(e) = render_clg_prompt(ClgKind::Biography, &d) {
        println!("biography: {e}");
    }
    Ok(())
}
