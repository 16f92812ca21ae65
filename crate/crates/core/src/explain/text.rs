use std::fmt::Write;

use crate::engine::{ArgumentationGraph, Premise};

fn paragraph(out: &mut String, heading: &str, premises: &[Premise], conclusion: &Premise) {
    let _ = writeln!(out, "{heading}");
    for (i, p) in premises.iter().enumerate() {
        let _ = writeln!(out, "  P{}. {}", i + 1, p.text);
    }
    let _ = writeln!(out, "  C. {}", conclusion.text);
    let _ = writeln!(out);
}

/// One paragraph per argument: premises numbered, then the conclusion.
pub fn render_text(graph: &ArgumentationGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Decision for scenario {}: {}",
        graph.provenance.scenario, graph.v3.chosen
    );
    let known: Vec<String> = graph
        .provenance
        .knowledge
        .0
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let _ = writeln!(
        out,
        "Known: {}",
        if known.is_empty() {
            "nothing".to_string()
        } else {
            known.join(", ")
        }
    );
    let _ = writeln!(out);
    if graph.v1.is_empty() {
        let _ = writeln!(out, "Case distinction: no principle applies in any case.");
        let _ = writeln!(out);
    }
    for c in &graph.v1 {
        paragraph(
            &mut out,
            &format!("Case argument {}", c.id),
            &c.premises,
            &c.conclusion,
        );
    }
    for o in &graph.v2 {
        paragraph(
            &mut out,
            &format!("Aggregation argument for {}", o.option),
            &o.premises,
            &o.conclusion,
        );
    }
    paragraph(
        &mut out,
        "Final argument",
        &graph.v3.premises,
        &graph.v3.conclusion,
    );
    out
}
