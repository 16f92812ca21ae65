//! Ethically constrained decisions under aleatoric uncertainty, made by
//! building a weighted three-layer argumentation graph that doubles as the
//! explanation of each decision.

pub mod condition;
pub mod credence;
pub mod deontic;
pub mod engine;
pub mod error;
pub mod explain;
pub mod instrumental;
pub mod numeric;
pub mod report;
pub mod robot;
pub mod scenario;
pub mod value;
pub mod world;

pub use error::{Error, Result};
pub use scenario::{parse_scenario, validate_scenario, Scenario, ScenarioError};
pub use value::Value;
pub use world::{Knowledge, VariableSpec, WorldState};
