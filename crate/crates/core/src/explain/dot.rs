use std::fmt::Write;

use crate::engine::{ArgumentationGraph, Strength};
use crate::numeric::display;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn weight(s: &Strength) -> String {
    s.to_string()
}

/// A DOT digraph with one ranked subgraph per layer. Edge labels carry the
/// weights at 4 significant digits and the chosen option is highlighted.
pub fn render_dot(graph: &ArgumentationGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph argumentation {{");
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=box, fontname=\"Helvetica\"];");
    let _ = writeln!(
        out,
        "  label={};",
        quote(&format!("scenario {}", graph.provenance.scenario))
    );

    let _ = writeln!(out, "  subgraph cluster_v1 {{");
    let _ = writeln!(out, "    label=\"V1 case distinction\";");
    let _ = writeln!(out, "    rank=same;");
    for c in &graph.v1 {
        let lines = [
            c.id.clone(),
            c.world.to_string(),
            format!("{} permits {{{}}}", c.principle, c.perm_set.join(", ")),
            format!("P = {}, force {}", display(c.probability), weight(&c.force)),
        ];
        let _ = writeln!(out, "    {} [label={}];", quote(&c.id), label(&lines));
    }
    let _ = writeln!(out, "  }}");

    let _ = writeln!(out, "  subgraph cluster_v2 {{");
    let _ = writeln!(out, "    label=\"V2 reason aggregation\";");
    let _ = writeln!(out, "    rank=same;");
    for o in &graph.v2 {
        let lines = [o.option.clone(), format!("force {}", weight(&o.strength))];
        let style = if o.option == graph.v3.chosen {
            ", style=\"bold,filled\", fillcolor=\"palegreen\""
        } else {
            ""
        };
        let _ = writeln!(out, "    {} [label={}{style}];", quote(&o.id), label(&lines));
    }
    let _ = writeln!(out, "  }}");

    let _ = writeln!(out, "  subgraph cluster_v3 {{");
    let _ = writeln!(out, "    label=\"V3 final decision\";");
    let _ = writeln!(out, "    rank=same;");
    let mut lines = vec![format!("perform {}", graph.v3.chosen)];
    if graph.is_fallback() {
        lines.push("fallback: no principle applies; expected utility only".to_string());
    }
    let _ = writeln!(
        out,
        "    {} [label={}, shape=doubleoctagon, style=bold];",
        quote(&graph.v3.id),
        label(&lines)
    );
    let _ = writeln!(out, "  }}");

    for e in graph.e12.iter().chain(&graph.e23) {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&e.from),
            quote(&e.to),
            quote(&weight(&e.weight))
        );
    }
    let _ = writeln!(out, "}}");
    out
}

/// Joins label lines with DOT line breaks, escaping each line.
fn label(lines: &[String]) -> String {
    let escaped: Vec<String> = lines
        .iter()
        .map(|l| {
            let q = quote(l);
            q[1..q.len() - 1].to_string()
        })
        .collect();
    format!("\"{}\"", escaped.join("\\n"))
}
