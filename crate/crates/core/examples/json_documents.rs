//! Write states, operations and verdicts as JSON and read them back.

use operon::entanglement::ppt_verdict;
use operon::formats::{operation_to_json, parse_document, state_to_json, to_json, Document, VerdictDocument};
use operon::numerics::{c64, identity, projector, singlet};
use operon::operations::lift_local;
use operon::{Dims, StateFunctional};

fn main() -> operon::Result<()> {
    let dims = Dims::new(2, 2);
    let werner = StateFunctional::bipartite(
        projector(&singlet()) * c64(0.25, 0.0) + identity(4) * c64(0.75 / 4.0, 0.0),
        dims,
    )?
    .with_label("Werner p = 1/4");
    let state_json = state_to_json(&werner);

    let dephase = lift_local(&[operon::numerics::diag(&[1.0, 0.0]), operon::numerics::diag(&[0.0, 1.0])], dims)?;
    let verdict = ppt_verdict(&werner, dims)?;
    let verdict_json = to_json(&VerdictDocument { dims, density: werner.density().clone(), verdict });

    for (name, text) in [("state", state_json), ("operation", operation_to_json(&dephase)), ("verdict", verdict_json)] {
        let doc = parse_document(&text, name)?;
        println!("{name}: parsed as {} ({} bytes)", doc.kind(), text.len());
        if let Document::Verdict(v) = doc {
            println!("  verdict {}", v.verdict.name());
        }
    }

    match parse_document(r#"{"density": {"rows": 2, "cols": 2, "data": [[1, 0]]}}"#, "broken") {
        Err(e) => println!("broken input: {e}"),
        Ok(_) => println!("broken input parsed"),
    }
    Ok(())
}
