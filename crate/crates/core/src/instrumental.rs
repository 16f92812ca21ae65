//! Outcome kernels, utilities, expected utility under partial knowledge and
//! the instrumental argmax.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::condition::Condition;
use crate::error::{Error, Result};
use crate::numeric::Prob;
use crate::scenario::Scenario;
use crate::value::Value;
use crate::world::{
    enumerate_consistent_worlds, var_index, world_probability, Knowledge, VariableSpec, WorldState,
};

/// One branch of a transition: with probability `p`, the successor is the
/// source world with the `set` assignments applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeBranch {
    pub p: Prob,
    #[serde(default)]
    pub set: BTreeMap<String, Value>,
}

/// Transition rule for one option. The first rule whose option matches and
/// whose condition holds in the source world defines the distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionRule {
    pub option: String,
    #[serde(default = "Condition::always")]
    pub when: Condition,
    pub outcomes: Vec<OutcomeBranch>,
}

/// What happens for a `(world, option)` pair no rule covers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unlisted {
    /// The world stays as it is.
    #[default]
    SelfLoop,
    Error,
}

/// `Outcome: W × A × W → [0, 1]`, given sparsely as rules.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutcomeModel {
    #[serde(default)]
    pub unlisted: Unlisted,
    #[serde(default)]
    pub rules: Vec<TransitionRule>,
}

impl OutcomeModel {
    pub fn rule_for(
        &self,
        vars: &[VariableSpec],
        world: &WorldState,
        option: &str,
    ) -> Option<&TransitionRule> {
        self.rules
            .iter()
            .find(|r| r.option == option && r.when.eval(vars, world))
    }

    /// Successor distribution of `(world, option)`, merged by successor and
    /// sorted canonically.
    pub fn successors(
        &self,
        vars: &[VariableSpec],
        world: &WorldState,
        option: &str,
    ) -> Result<Vec<(WorldState, f64)>> {
        let Some(rule) = self.rule_for(vars, world, option) else {
            return match self.unlisted {
                Unlisted::SelfLoop => Ok(vec![(world.clone(), 1.0)]),
                Unlisted::Error => Err(Error::ModelIncomplete {
                    option: option.to_string(),
                    world: world.describe(vars),
                }),
            };
        };
        let mut dist: BTreeMap<WorldState, f64> = BTreeMap::new();
        for branch in &rule.outcomes {
            let mut next = world.clone();
            for (name, value) in &branch.set {
                let i = var_index(vars, name).ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                next.0[i] = value.clone();
            }
            *dist.entry(next).or_insert(0.0) += branch.p.0;
        }
        Ok(dist.into_iter().collect())
    }

    /// `Outcome(source, option, target)`.
    pub fn probability(
        &self,
        vars: &[VariableSpec],
        source: &WorldState,
        option: &str,
        target: &WorldState,
    ) -> Result<f64> {
        Ok(self
            .successors(vars, source, option)?
            .into_iter()
            .filter(|(w, _)| w == target)
            .map(|(_, p)| p)
            .sum())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityRule {
    pub when: Condition,
    pub value: f64,
}

/// `U: W → ℝ` as first-match rules; a catch-all rule makes it total.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UtilityFunction(pub Vec<UtilityRule>);

impl UtilityFunction {
    pub fn constant(value: f64) -> Self {
        UtilityFunction(vec![UtilityRule {
            when: Condition::always(),
            value,
        }])
    }

    pub fn utility(&self, vars: &[VariableSpec], world: &WorldState) -> Result<f64> {
        self.0
            .iter()
            .find(|r| r.when.eval(vars, world))
            .map(|r| r.value)
            .ok_or_else(|| Error::UtilityNotTotal(world.describe(vars)))
    }

    pub fn has_catch_all(&self) -> bool {
        self.0.iter().any(|r| r.when.is_always())
    }
}

/// Options available at a decision point, in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OptionSet(pub Vec<String>);

impl OptionSet {
    pub fn new<S: Into<String>>(options: impl IntoIterator<Item = S>) -> Self {
        OptionSet(options.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, option: &str) -> bool {
        self.0.iter().any(|o| o == option)
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }
}

fn check_option(scenario: &Scenario, option: &str) -> Result<()> {
    if scenario.options.contains(option) {
        Ok(())
    } else {
        Err(Error::UnknownOption(option.to_string()))
    }
}

/// `Outcome_P(k, a, ·)` as a distribution over successor worlds.
pub fn outcome_distribution(
    knowledge: &Knowledge,
    option: &str,
    scenario: &Scenario,
) -> Result<BTreeMap<WorldState, f64>> {
    check_option(scenario, option)?;
    let vars = &scenario.variables;
    let mut dist = BTreeMap::new();
    for source in enumerate_consistent_worlds(knowledge, vars)? {
        let p = world_probability(&source, knowledge, vars, &scenario.credences)?;
        for (target, q) in scenario.outcome.successors(vars, &source, option)? {
            *dist.entry(target).or_insert(0.0) += p * q;
        }
    }
    Ok(dist)
}

/// `Outcome_P(k, a, w) = Σ_{w' ∈ W_k} P(w'|k) · Outcome(w', a, w)`.
pub fn outcome_given_knowledge(
    knowledge: &Knowledge,
    option: &str,
    target: &WorldState,
    scenario: &Scenario,
) -> Result<f64> {
    check_option(scenario, option)?;
    let vars = &scenario.variables;
    let mut total = 0.0;
    for source in enumerate_consistent_worlds(knowledge, vars)? {
        let p = world_probability(&source, knowledge, vars, &scenario.credences)?;
        total += p * scenario.outcome.probability(vars, &source, option, target)?;
    }
    Ok(total)
}

/// `EU(a|k) = Σ_w Outcome_P(k, a, w) · U(w)`, summed source world by source
/// world in canonical order.
pub fn expected_utility(option: &str, knowledge: &Knowledge, scenario: &Scenario) -> Result<f64> {
    let worlds = enumerate_consistent_worlds(knowledge, &scenario.variables)?;
    expected_utility_over(option, knowledge, &worlds, scenario)
}

pub(crate) fn expected_utility_over(
    option: &str,
    knowledge: &Knowledge,
    worlds: &[WorldState],
    scenario: &Scenario,
) -> Result<f64> {
    check_option(scenario, option)?;
    let vars = &scenario.variables;
    let mut eu = 0.0;
    for source in worlds {
        let p = world_probability(source, knowledge, vars, &scenario.credences)?;
        let mut inner = 0.0;
        for (target, q) in scenario.outcome.successors(vars, source, option)? {
            inner += q * scenario.utility.utility(vars, &target)?;
        }
        eu += p * inner;
    }
    Ok(eu)
}

/// Indices of the entries within `tol` of the maximum.
pub(crate) fn argmax_within(values: &[f64], tol: f64) -> Vec<usize> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| best - **v <= tol)
        .map(|(i, _)| i)
        .collect()
}

/// `dec_inst(A, k)`: every option whose expected utility is maximal within
/// the scenario tolerance, in the given order.
pub fn instrumental_choice(
    options: &[String],
    knowledge: &Knowledge,
    scenario: &Scenario,
) -> Result<Vec<String>> {
    if options.is_empty() {
        return Err(Error::EmptyOptionSet);
    }
    let worlds = enumerate_consistent_worlds(knowledge, &scenario.variables)?;
    let eus = options
        .iter()
        .map(|o| expected_utility_over(o, knowledge, &worlds, scenario))
        .collect::<Result<Vec<_>>>()?;
    Ok(argmax_within(&eus, scenario.engine.tolerance)
        .into_iter()
        .map(|i| options[i].clone())
        .collect())
}
