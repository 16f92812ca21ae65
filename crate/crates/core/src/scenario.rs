//! The declarative scenario bundle: parsing, canonical serialization and
//! validation.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::credence::{validate_credences, CredenceModel};
use crate::deontic::PrincipleStructure;
use crate::engine::{EngineConfig, RelevanceConfig};
use crate::instrumental::{OptionSet, OutcomeModel, UtilityFunction};
use crate::numeric::TOLERANCE;
use crate::report::Report;
use crate::world::{enumerate_consistent_worlds, Knowledge, VariableSpec, MAX_DOMAIN_SIZE};

pub const SCHEMA_VERSION: &str = "1";

/// Kernel coverage is checked exhaustively up to this many (world, option)
/// pairs.
const COVERAGE_CHECK_LIMIT: usize = 200_000;

fn schema_version() -> String {
    SCHEMA_VERSION.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "schema_version")]
    pub schema_version: String,
    pub id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub variables: Vec<VariableSpec>,
    #[serde(default)]
    pub credences: CredenceModel,
    pub options: OptionSet,
    #[serde(default)]
    pub outcome: OutcomeModel,
    pub utility: UtilityFunction,
    #[serde(default)]
    pub principles: PrincipleStructure,
    #[serde(default)]
    pub engine: EngineConfig,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {path} (line {line}, column {column}): {message}")]
    Schema {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario:\n{0}")]
    Invalid(Report),
}

impl Scenario {
    /// A scenario with nothing declared and default engine settings.
    pub fn empty(id: impl Into<String>) -> Self {
        Scenario {
            schema_version: schema_version(),
            id: id.into(),
            description: String::new(),
            variables: Vec::new(),
            credences: CredenceModel::default(),
            options: OptionSet::default(),
            outcome: OutcomeModel::default(),
            utility: UtilityFunction::default(),
            principles: PrincipleStructure::default(),
            engine: EngineConfig::default(),
        }
    }

    /// Deserializes without semantic validation.
    pub fn from_json_unchecked(text: &str) -> Result<Self, ScenarioError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let parsed: Result<Scenario, _> = serde_path_to_error::deserialize(&mut de);
        let scenario = parsed.map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if inner.is_syntax() || inner.is_eof() || inner.is_io() {
                ScenarioError::Syntax {
                    line: inner.line(),
                    column: inner.column(),
                    message: inner.to_string(),
                }
            } else {
                ScenarioError::Schema {
                    path,
                    line: inner.line(),
                    column: inner.column(),
                    message: inner.to_string(),
                }
            }
        })?;
        de.end().map_err(|e| ScenarioError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Ok(scenario)
    }

    /// Canonical pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }
}

/// Deserializes and validates; any validation error rejects the scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let scenario = Scenario::from_json_unchecked(text)?;
    let report = validate_scenario(&scenario);
    if report.is_clean() {
        Ok(scenario)
    } else {
        Err(ScenarioError::Invalid(report))
    }
}

/// Every structural and cross-reference check, plus warnings for sparse
/// kernel defaults and variables without credences.
pub fn validate_scenario(scenario: &Scenario) -> Report {
    let mut report = Report::new();
    if scenario.schema_version != SCHEMA_VERSION {
        report.error(
            "schema_version",
            format!(
                "unsupported schema version {:?} (expected {SCHEMA_VERSION:?})",
                scenario.schema_version
            ),
        );
    }
    if scenario.id.trim().is_empty() {
        report.error("id", "scenario id is empty");
    }
    let vars = &scenario.variables;
    let vars_ok = validate_variables(vars, &mut report);

    report.extend(validate_credences(&scenario.credences, vars));
    for spec in vars {
        if scenario.credences.table(&spec.name).is_none() {
            report.warning(
                "credences",
                format!(
                    "`{}` has no credence table and must be known when deciding",
                    spec.name
                ),
            );
        }
    }

    let options = &scenario.options.0;
    if options.is_empty() {
        report.error("options", "option set is empty");
    }
    let mut seen = BTreeSet::new();
    for (i, o) in options.iter().enumerate() {
        if o.is_empty() {
            report.error(format!("options[{i}]"), "empty option name");
        }
        if !seen.insert(o) {
            report.error(format!("options[{i}]"), format!("duplicate option `{o}`"));
        }
    }

    validate_outcome(scenario, &mut report);
    validate_utility(scenario, &mut report);
    validate_principles(scenario, &mut report);
    validate_engine(scenario, &mut report);

    if vars_ok && report.is_clean() {
        kernel_coverage(scenario, &mut report);
    }
    report
}

fn validate_variables(vars: &[VariableSpec], report: &mut Report) -> bool {
    let before = report.errors().count();
    let mut names = BTreeSet::new();
    for (i, spec) in vars.iter().enumerate() {
        let path = format!("variables[{i}]");
        if spec.name.is_empty() {
            report.error(format!("{path}.name"), "empty variable name");
        }
        if !names.insert(spec.name.as_str()) {
            report.error(
                format!("{path}.name"),
                format!("duplicate variable `{}`", spec.name),
            );
        }
        if spec.domain.is_empty() {
            report.error(
                format!("{path}.domain"),
                format!("`{}` has an empty domain", spec.name),
            );
        }
        if spec.domain.len() > MAX_DOMAIN_SIZE {
            report.error(
                format!("{path}.domain"),
                format!(
                    "`{}` has {} values; domains are limited to {MAX_DOMAIN_SIZE}",
                    spec.name,
                    spec.domain.len()
                ),
            );
        }
        let mut values = BTreeSet::new();
        for (j, v) in spec.domain.iter().enumerate() {
            if !values.insert(v) {
                report.error(
                    format!("{path}.domain[{j}]"),
                    format!("`{v}` appears twice in the domain of `{}`", spec.name),
                );
            }
        }
    }
    report.errors().count() == before
}

fn validate_outcome(scenario: &Scenario, report: &mut Report) {
    let vars = &scenario.variables;
    for (i, rule) in scenario.outcome.rules.iter().enumerate() {
        let path = format!("outcome.rules[{i}]");
        if !scenario.options.contains(&rule.option) {
            report.error(
                format!("{path}.option"),
                format!("unknown option `{}`", rule.option),
            );
        }
        rule.when.validate(vars, &format!("{path}.when"), report);
        if rule.outcomes.is_empty() {
            report.error(format!("{path}.outcomes"), "no outcomes listed");
            continue;
        }
        let mut mass = 0.0;
        for (j, branch) in rule.outcomes.iter().enumerate() {
            let bpath = format!("{path}.outcomes[{j}]");
            if !(0.0..=1.0).contains(&branch.p.0) {
                report.error(
                    format!("{bpath}.p"),
                    format!("probability {} is outside [0, 1]", branch.p.0),
                );
            }
            mass += branch.p.0;
            for (name, value) in &branch.set {
                match vars.iter().find(|v| &v.name == name) {
                    None => report.error(
                        format!("{bpath}.set.{name}"),
                        format!("undeclared variable `{name}`"),
                    ),
                    Some(spec) if spec.position(value).is_none() => report.error(
                        format!("{bpath}.set.{name}"),
                        format!("`{value}` is not in the domain of `{name}`"),
                    ),
                    Some(_) => {}
                }
            }
        }
        if mass.is_nan() || (mass - 1.0).abs() > TOLERANCE {
            report.error(
                format!("{path}.outcomes"),
                format!("outcome distribution for `{}` sums to {mass}, not 1", rule.option),
            );
        }
    }
}

fn validate_utility(scenario: &Scenario, report: &mut Report) {
    let rules = &scenario.utility.0;
    for (i, rule) in rules.iter().enumerate() {
        let path = format!("utility[{i}]");
        rule.when
            .validate(&scenario.variables, &format!("{path}.when"), report);
        if !rule.value.is_finite() {
            report.error(format!("{path}.value"), "utility must be finite");
        }
    }
    match rules.iter().position(|r| r.when.is_always()) {
        None => report.error(
            "utility",
            "no catch-all rule (`when: true`); utility is not total",
        ),
        Some(i) if i + 1 < rules.len() => report.warning(
            format!("utility[{}]", i + 1),
            "rules after the catch-all are unreachable",
        ),
        Some(_) => {}
    }
}

fn validate_principles(scenario: &Scenario, report: &mut Report) {
    let options = &scenario.options;
    let mut ids = BTreeSet::new();
    for (ci, class) in scenario.principles.0.iter().enumerate() {
        if class.is_empty() {
            report.error(
                format!("principles[{ci}]"),
                format!("principle class {} is empty", ci + 1),
            );
        }
        for (pi, principle) in class.iter().enumerate() {
            let path = format!("principles[{ci}][{pi}]");
            if principle.id.is_empty() {
                report.error(format!("{path}.id"), "empty principle id");
            }
            if !ids.insert(principle.id.as_str()) {
                report.error(
                    format!("{path}.id"),
                    format!("duplicate principle id `{}`", principle.id),
                );
            }
            let mut cond = Report::new();
            principle
                .condition
                .validate(&scenario.variables, &format!("{path}.condition"), &mut cond);
            for issue in &mut cond.issues {
                issue.message = format!("principle `{}`: {}", principle.id, issue.message);
            }
            report.extend(cond);

            let mut mentioned = BTreeSet::new();
            for (oi, oclass) in principle.prefers.0.iter().enumerate() {
                let opath = format!("{path}.prefers[{oi}]");
                if oclass.is_empty() {
                    report.error(
                        &opath,
                        format!("principle `{}` has an empty option class", principle.id),
                    );
                }
                for (k, o) in oclass.iter().enumerate() {
                    if !options.contains(o) {
                        report.error(
                            format!("{opath}[{k}]"),
                            format!("principle `{}` names unknown option `{o}`", principle.id),
                        );
                    }
                    if !mentioned.insert(o.as_str()) {
                        report.error(
                            format!("{opath}[{k}]"),
                            format!(
                                "principle `{}`: option `{o}` is in more than one class",
                                principle.id
                            ),
                        );
                    }
                }
            }
        }
    }
}

fn validate_engine(scenario: &Scenario, report: &mut Report) {
    let engine = &scenario.engine;
    if let RelevanceConfig::Archimedean { base, weights } = &engine.relevance {
        if !(base.is_finite() && *base > 1.0) {
            report.error("engine.relevance.base", format!("base must exceed 1, got {base}"));
        }
        if let Some(ws) = weights {
            let t = scenario.principles.num_classes();
            if ws.len() != t {
                report.error(
                    "engine.relevance.weights",
                    format!("{} weights given for {t} principle classes", ws.len()),
                );
            }
            for (i, w) in ws.iter().enumerate() {
                if !(w.is_finite() && *w > 0.0) {
                    report.error(
                        format!("engine.relevance.weights[{i}]"),
                        "weights must be positive",
                    );
                }
                if i > 0 && ws[i - 1] <= *w {
                    report.error(
                        format!("engine.relevance.weights[{i}]"),
                        "weights must strictly decrease from the highest class",
                    );
                }
            }
        }
    }
    if !(engine.eu_weight.is_finite() && engine.eu_weight >= 0.0) {
        report.error("engine.eu_weight", "EU weight must be finite and non-negative");
    }
    if !(engine.tolerance.is_finite() && engine.tolerance >= 0.0) {
        report.error("engine.tolerance", "tolerance must be finite and non-negative");
    }
}

fn kernel_coverage(scenario: &Scenario, report: &mut Report) {
    if scenario.outcome.unlisted == crate::instrumental::Unlisted::Error {
        return;
    }
    let size: usize = scenario
        .variables
        .iter()
        .map(|v| v.domain.len())
        .try_fold(1usize, |acc, n| acc.checked_mul(n))
        .unwrap_or(usize::MAX);
    if size.saturating_mul(scenario.options.0.len()) > COVERAGE_CHECK_LIMIT {
        report.warning(
            "outcome",
            "state space too large to check coverage; unlisted pairs default to self-loops",
        );
        return;
    }
    let Ok(worlds) = enumerate_consistent_worlds(&Knowledge::new(), &scenario.variables) else {
        return;
    };
    for option in &scenario.options.0 {
        let uncovered = worlds
            .iter()
            .filter(|w| {
                scenario
                    .outcome
                    .rule_for(&scenario.variables, w, option)
                    .is_none()
            })
            .count();
        if uncovered > 0 {
            report.warning(
                "outcome.rules",
                format!(
                    "option `{option}` has no rule in {uncovered} of {} worlds; those default to self-loops",
                    worlds.len()
                ),
            );
        }
    }
}
