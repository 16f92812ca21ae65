use serde::{Deserialize, Serialize};

use crate::deontic::DilemmaPolicy;
use crate::numeric::TOLERANCE;

pub const DEFAULT_BASE: f64 = 10.0;

fn default_base() -> f64 {
    DEFAULT_BASE
}

fn default_eu_weight() -> f64 {
    1.0
}

fn default_tolerance() -> f64 {
    TOLERANCE
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// How principle ranks translate into strengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum RelevanceConfig {
    /// Real-valued weights `base^(t - rank)`, or explicit per-class weights
    /// listed from the highest class down.
    Archimedean {
        #[serde(default = "default_base")]
        base: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    /// One tier per principle class, compared highest class first, with
    /// expected utility as the last tier.
    Lexicographic,
}

impl Default for RelevanceConfig {
    fn default() -> Self {
        RelevanceConfig::Archimedean {
            base: DEFAULT_BASE,
            weights: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    #[serde(default)]
    pub relevance: RelevanceConfig,
    #[serde(default)]
    pub dilemma_policy: DilemmaPolicy,
    /// Coefficient of `EU` in the combined score.
    #[serde(default = "default_eu_weight")]
    pub eu_weight: f64,
    /// Absolute tolerance of every argmax.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Drop worlds with `P(w|k) = 0` from the case layer.
    #[serde(default, skip_serializing_if = "is_false")]
    pub exclude_impossible_cases: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            relevance: RelevanceConfig::default(),
            dilemma_policy: DilemmaPolicy::default(),
            eu_weight: default_eu_weight(),
            tolerance: default_tolerance(),
            exclude_impossible_cases: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_empty_object() {
        let c: EngineConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, EngineConfig::default());
        let lex: EngineConfig = serde_json::from_str(r#"{"relevance": {"mode": "lexicographic"}}"#).unwrap();
        assert_eq!(lex.relevance, RelevanceConfig::Lexicographic);
        let w: RelevanceConfig =
            serde_json::from_str(r#"{"mode": "archimedean", "weights": [5, 2]}"#).unwrap();
        assert_eq!(
            w,
            RelevanceConfig::Archimedean {
                base: 10.0,
                weights: Some(vec![5.0, 2.0])
            }
        );
    }
}
