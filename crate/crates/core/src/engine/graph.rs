use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::EngineConfig;
use super::relevance::Strength;
use crate::deontic::OptionStructure;
use crate::numeric::{decimal, round_json};
use crate::value::Value;
use crate::world::{Knowledge, WorldState};

pub const GRAPH_SCHEMA_VERSION: &str = "1";

/// Symbolic content of a premise or conclusion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PremiseContent {
    /// `P_w`: the case and its probability given the knowledge.
    CaseFact {
        world: BTreeMap<String, Value>,
        #[serde(with = "decimal")]
        probability: f64,
    },
    /// `P_ψ`: the principle as a conditional.
    Conditional {
        principle: String,
        condition: String,
        prefers: OptionStructure,
    },
    /// `P_Perm`: the permissible options the principle yields in the case.
    Permissibility {
        principle: String,
        permitted: Vec<String>,
    },
    /// A reason from a case argument in favour of options.
    Reason {
        case: String,
        options: Vec<String>,
        strength: Strength,
    },
    /// `P_Σ`: overall support is the sum over supporters.
    Aggregation { option: String, supporters: Vec<String> },
    /// The overall reason for one option.
    OverallReason { option: String, strength: Strength },
    /// One candidate of the final argmax.
    Candidate {
        option: String,
        force: Strength,
        #[serde(with = "decimal")]
        eu: f64,
        score: Strength,
    },
    /// `P_max`: pick among the maximizers of the combined score.
    Maximization {
        candidates: Vec<String>,
        #[serde(with = "decimal")]
        eu_weight: f64,
    },
    /// Pick among the expected-utility maximizers; no case argument exists.
    Fallback { options: Vec<String> },
    /// The action performed.
    Choice {
        option: String,
        tie_set: Vec<String>,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Premise {
    pub content: PremiseContent,
    pub text: String,
}

/// `Arg_ψ^w`, a node of `V1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseArgument {
    pub id: String,
    pub world: WorldState,
    pub principle: String,
    pub rank: usize,
    #[serde(with = "decimal")]
    pub probability: f64,
    pub relevance: Strength,
    /// `force_pro_tanto = P(w|k) · relevance(ψ)`.
    pub force: Strength,
    pub perm_set: Vec<String>,
    pub premises: Vec<Premise>,
    pub conclusion: Premise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Support {
    pub case: String,
    pub force: Strength,
}

/// `Arg_a`, a node of `V2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionArgument {
    pub id: String,
    pub option: String,
    pub support: Vec<Support>,
    /// `force_overall(a)`.
    pub strength: Strength,
    pub premises: Vec<Premise>,
    pub conclusion: Premise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinalEntry {
    pub option: String,
    pub force: Strength,
    #[serde(with = "decimal")]
    pub eu: f64,
    pub score: Strength,
}

/// `Arg_dec`, the single node of `V3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinalArgument {
    pub id: String,
    pub entries: Vec<FinalEntry>,
    pub chosen: String,
    pub tie_set: Vec<String>,
    pub seed: u64,
    pub premises: Vec<Premise>,
    pub conclusion: Premise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub weight: Strength,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionMode {
    Interlocked,
    /// `V1` was empty and the choice is purely instrumental.
    InstrumentalFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub scenario: String,
    pub knowledge: Knowledge,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub engine: EngineConfig,
    pub mode: DecisionMode,
}

/// `𝔊 = (V1 ∪ V2 ∪ V3, E12 ∪ E23)` with the decision it yields.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgumentationGraph {
    pub provenance: Provenance,
    pub v1: Vec<CaseArgument>,
    pub v2: Vec<OptionArgument>,
    pub v3: FinalArgument,
    pub e12: Vec<Edge>,
    pub e23: Vec<Edge>,
}

impl ArgumentationGraph {
    pub fn chosen(&self) -> &str {
        &self.v3.chosen
    }

    pub fn is_fallback(&self) -> bool {
        self.provenance.mode == DecisionMode::InstrumentalFallback
    }

    pub fn option_argument(&self, option: &str) -> Option<&OptionArgument> {
        self.v2.iter().find(|a| a.option == option)
    }

    /// Number of edges ending in `node`.
    pub fn in_degree(&self, node: &str) -> usize {
        self.e12.iter().chain(&self.e23).filter(|e| e.to == node).count()
    }

    /// The graph with every stored real rounded to the serialized precision.
    pub fn rounded(&self) -> Self {
        let mut g = self.clone();
        g.round_in_place();
        g
    }

    fn round_in_place(&mut self) {
        for c in &mut self.v1 {
            c.probability = round_json(c.probability);
            round_strength(&mut c.relevance);
            round_strength(&mut c.force);
            c.premises.iter_mut().for_each(round_premise);
            round_premise(&mut c.conclusion);
        }
        for o in &mut self.v2 {
            o.support.iter_mut().for_each(|s| round_strength(&mut s.force));
            round_strength(&mut o.strength);
            o.premises.iter_mut().for_each(round_premise);
            round_premise(&mut o.conclusion);
        }
        for e in &mut self.v3.entries {
            round_strength(&mut e.force);
            e.eu = round_json(e.eu);
            round_strength(&mut e.score);
        }
        self.v3.premises.iter_mut().for_each(round_premise);
        round_premise(&mut self.v3.conclusion);
        for e in self.e12.iter_mut().chain(&mut self.e23) {
            round_strength(&mut e.weight);
        }
    }
}

fn round_strength(s: &mut Strength) {
    s.0.iter_mut().for_each(|x| *x = round_json(*x));
}

fn round_premise(p: &mut Premise) {
    match &mut p.content {
        PremiseContent::CaseFact { probability, .. } => *probability = round_json(*probability),
        PremiseContent::Reason { strength, .. } | PremiseContent::OverallReason { strength, .. } => {
            round_strength(strength)
        }
        PremiseContent::Candidate { force, eu, score, .. } => {
            round_strength(force);
            *eu = round_json(*eu);
            round_strength(score);
        }
        PremiseContent::Maximization { eu_weight, .. } => *eu_weight = round_json(*eu_weight),
        PremiseContent::Conditional { .. }
        | PremiseContent::Permissibility { .. }
        | PremiseContent::Aggregation { .. }
        | PremiseContent::Fallback { .. }
        | PremiseContent::Choice { .. } => {}
    }
}
