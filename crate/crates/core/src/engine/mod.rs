//! The three-layer argumentation engine: case distinction, reason
//! aggregation and the final interlocked choice.

mod build;
mod config;
mod graph;
mod pick;
mod relevance;

pub use build::{
    build_aggregation_layer, build_case_layer, candidate_options, decide, pro_tanto_force, sequential_decide,
};
pub use config::{EngineConfig, RelevanceConfig};
pub use graph::{
    ArgumentationGraph, CaseArgument, DecisionMode, Edge, FinalArgument, FinalEntry, OptionArgument, Premise,
    PremiseContent, Provenance, Support, GRAPH_SCHEMA_VERSION,
};
pub use pick::pick;
pub use relevance::{argmax_strengths, RelevanceFunction, Strength};
