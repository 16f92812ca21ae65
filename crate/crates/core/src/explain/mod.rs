//! Renderings of an argumentation graph: canonical graph-JSON, DOT and a
//! plain-text rationalization. Rendering is total and never mutates the
//! graph.

mod dot;
mod json;
mod text;

use std::fmt;
use std::str::FromStr;

pub use dot::render_dot;
pub use json::{parse_graph_json, render_graph_json, GraphParseError};
pub use text::render_text;

use crate::engine::ArgumentationGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    GraphJson,
    Dot,
    Text,
}

impl FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "graph-json" | "json" => Ok(RenderFormat::GraphJson),
            "dot" => Ok(RenderFormat::Dot),
            "text" => Ok(RenderFormat::Text),
            other => Err(format!(
                "unknown format `{other}` (expected graph-json, dot or text)"
            )),
        }
    }
}

impl fmt::Display for RenderFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RenderFormat::GraphJson => "graph-json",
            RenderFormat::Dot => "dot",
            RenderFormat::Text => "text",
        })
    }
}

pub fn render(graph: &ArgumentationGraph, format: RenderFormat) -> String {
    match format {
        RenderFormat::GraphJson => render_graph_json(graph),
        RenderFormat::Dot => render_dot(graph),
        RenderFormat::Text => render_text(graph),
    }
}
