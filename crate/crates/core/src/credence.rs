//! Conditional probability tables over the variables the agent may not know.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{Prob, TOLERANCE};
use crate::report::Report;
use crate::value::Value;
use crate::world::{var_index, VariableSpec, WorldState};

/// One row: a distribution over the variable's domain (in domain order),
/// valid when the conditioning variables take the values in `when`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CredenceRow {
    #[serde(default)]
    pub when: Vec<Value>,
    pub p: Vec<Prob>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CredenceTable {
    pub variable: String,
    #[serde(default)]
    pub given: Vec<String>,
    pub rows: Vec<CredenceRow>,
}

impl CredenceTable {
    /// An unconditioned distribution.
    pub fn prior(variable: impl Into<String>, p: impl IntoIterator<Item = f64>) -> Self {
        Self {
            variable: variable.into(),
            given: Vec::new(),
            rows: vec![CredenceRow {
                when: Vec::new(),
                p: p.into_iter().map(Prob).collect(),
            }],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CredenceModel(pub Vec<CredenceTable>);

impl CredenceModel {
    pub fn table(&self, variable: &str) -> Option<&CredenceTable> {
        self.0.iter().find(|t| t.variable == variable)
    }

    /// `P_i(value | parents as assigned in world)`.
    pub fn conditional(
        &self,
        vars: &[VariableSpec],
        world: &WorldState,
        spec: &VariableSpec,
        value: &Value,
    ) -> Result<f64> {
        let table = self.table(&spec.name).ok_or_else(|| Error::MissingCredence {
            variable: spec.name.clone(),
            detail: String::new(),
        })?;
        let parents = table
            .given
            .iter()
            .map(|g| {
                world
                    .get(vars, g)
                    .cloned()
                    .ok_or_else(|| Error::UnknownVariable(g.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let row = table
            .rows
            .iter()
            .find(|r| r.when == parents)
            .ok_or_else(|| Error::MissingCredence {
                variable: spec.name.clone(),
                detail: format!(" given ({})", join(&parents)),
            })?;
        let idx = spec.position(value).ok_or_else(|| Error::ValueOutOfDomain {
            variable: spec.name.clone(),
            value: value.to_string(),
        })?;
        row.p.get(idx).map(|p| p.0).ok_or_else(|| Error::MissingCredence {
            variable: spec.name.clone(),
            detail: format!(" for value {value}"),
        })
    }
}

fn join(values: &[Value]) -> String {
    values.iter().map(Value::to_string).collect::<Vec<_>>().join(", ")
}

/// Checks every table: declared variables, row shape and completeness,
/// probability ranges, normalization (within 1e-9) and acyclicity of the
/// conditioning relation. Paths are rooted at `credences`.
pub fn validate_credences(model: &CredenceModel, vars: &[VariableSpec]) -> Report {
    let mut report = Report::new();
    let mut seen = BTreeSet::new();

    for (ti, table) in model.0.iter().enumerate() {
        let path = format!("credences[{ti}]");
        let Some(spec) = vars.iter().find(|v| v.name == table.variable) else {
            report.error(
                format!("{path}.variable"),
                format!("unknown variable `{}`", table.variable),
            );
            continue;
        };
        if !seen.insert(table.variable.as_str()) {
            report.error(
                format!("{path}.variable"),
                format!("second table for `{}`", table.variable),
            );
        }

        let mut parents: Vec<Option<&VariableSpec>> = Vec::new();
        let mut given_ok = true;
        for (gi, g) in table.given.iter().enumerate() {
            let gpath = format!("{path}.given[{gi}]");
            if g == &table.variable {
                report.error(gpath, format!("`{g}` is conditioned on itself"));
                given_ok = false;
                parents.push(None);
            } else if table.given[..gi].contains(g) {
                report.error(gpath, format!("`{g}` listed twice"));
                given_ok = false;
                parents.push(None);
            } else {
                let p = var_index(vars, g).map(|i| &vars[i]);
                if p.is_none() {
                    report.error(gpath, format!("unknown variable `{g}`"));
                    given_ok = false;
                }
                parents.push(p);
            }
        }

        let mut row_keys: BTreeMap<Vec<Value>, usize> = BTreeMap::new();
        for (ri, row) in table.rows.iter().enumerate() {
            let rpath = format!("{path}.rows[{ri}]");
            let mut shape_ok = true;
            if row.when.len() != table.given.len() {
                report.error(
                    format!("{rpath}.when"),
                    format!(
                        "`{}` row has {} conditioning values but {} are declared",
                        table.variable,
                        row.when.len(),
                        table.given.len()
                    ),
                );
                shape_ok = false;
            } else {
                for (wi, (v, parent)) in row.when.iter().zip(&parents).enumerate() {
                    if let Some(parent) = parent {
                        if parent.position(v).is_none() {
                            report.error(
                                format!("{rpath}.when[{wi}]"),
                                format!("`{v}` is not in the domain of `{}`", parent.name),
                            );
                            shape_ok = false;
                        }
                    }
                }
            }
            if shape_ok {
                if let Some(prev) = row_keys.insert(row.when.clone(), ri) {
                    report.error(
                        format!("{rpath}.when"),
                        format!(
                            "`{}` row ({}) duplicates rows[{prev}]",
                            table.variable,
                            join(&row.when)
                        ),
                    );
                }
            }

            if row.p.len() != spec.domain.len() {
                report.error(
                    format!("{rpath}.p"),
                    format!(
                        "`{}` has {} domain values but the row lists {} probabilities",
                        table.variable,
                        spec.domain.len(),
                        row.p.len()
                    ),
                );
            }
            for (pi, p) in row.p.iter().enumerate() {
                if !(0.0..=1.0).contains(&p.0) {
                    report.error(
                        format!("{rpath}.p[{pi}]"),
                        format!("`{}` probability {} is outside [0, 1]", table.variable, p.0),
                    );
                }
            }
            let mass: f64 = row.p.iter().map(|p| p.0).sum();
            if mass.is_nan() || (mass - 1.0).abs() > TOLERANCE {
                report.error(
                    format!("{rpath}.p"),
                    format!(
                        "`{}` distribution ({}) sums to {mass}, not 1",
                        table.variable,
                        if row.when.is_empty() {
                            "unconditioned".to_string()
                        } else {
                            format!("given {}", join(&row.when))
                        }
                    ),
                );
            }
        }

        if given_ok {
            let parent_specs: Vec<&VariableSpec> = parents.iter().flatten().copied().collect();
            let expected: usize = parent_specs.iter().map(|p| p.domain.len()).product();
            if row_keys.len() < expected {
                let missing = first_missing(&parent_specs, &row_keys);
                report.error(
                    format!("{path}.rows"),
                    format!(
                        "`{}` covers {} of {expected} conditioning assignments; missing e.g. ({})",
                        table.variable,
                        row_keys.len(),
                        missing.map(|m| join(&m)).unwrap_or_default()
                    ),
                );
            }
        }
    }

    if let Some(cycle) = find_cycle(model) {
        report.error("credences", format!("conditioning cycle: {}", cycle.join(" -> ")));
    }
    report
}

fn first_missing(parents: &[&VariableSpec], present: &BTreeMap<Vec<Value>, usize>) -> Option<Vec<Value>> {
    let mut idx = vec![0usize; parents.len()];
    loop {
        let key: Vec<Value> = idx
            .iter()
            .zip(parents)
            .map(|(&i, p)| p.domain[i].clone())
            .collect();
        if !present.contains_key(&key) {
            return Some(key);
        }
        let mut pos = parents.len();
        loop {
            if pos == 0 {
                return None;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < parents[pos].domain.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// A variable conditioned (transitively) on itself, as the list of variables
/// on the cycle with the first repeated at the end.
fn find_cycle(model: &CredenceModel) -> Option<Vec<String>> {
    let edges: BTreeMap<&str, Vec<&str>> = model
        .0
        .iter()
        .map(|t| (t.variable.as_str(), t.given.iter().map(String::as_str).collect()))
        .collect();

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Active,
        Done,
    }
    let mut marks: BTreeMap<&str, Mark> = edges.keys().map(|k| (*k, Mark::Fresh)).collect();

    fn visit<'a>(
        node: &'a str,
        edges: &BTreeMap<&'a str, Vec<&'a str>>,
        marks: &mut BTreeMap<&'a str, Mark>,
        stack: &mut Vec<&'a str>,
    ) -> Option<Vec<String>> {
        match marks.get(node).copied() {
            Some(Mark::Done) | None => return None,
            Some(Mark::Active) => {
                let start = stack.iter().position(|n| *n == node).unwrap_or(0);
                let mut cycle: Vec<String> = stack[start..].iter().map(|s| s.to_string()).collect();
                cycle.push(node.to_string());
                return Some(cycle);
            }
            Some(Mark::Fresh) => {}
        }
        marks.insert(node, Mark::Active);
        stack.push(node);
        for next in edges.get(node).into_iter().flatten() {
            if *next == node {
                continue; // self-conditioning is reported per table
            }
            if let Some(c) = visit(next, edges, marks, stack) {
                return Some(c);
            }
        }
        stack.pop();
        marks.insert(node, Mark::Done);
        None
    }

    let nodes: Vec<&str> = edges.keys().copied().collect();
    for n in nodes {
        let mut stack = Vec::new();
        if let Some(c) = visit(n, &edges, &mut marks, &mut stack) {
            return Some(c);
        }
    }
    None
}
