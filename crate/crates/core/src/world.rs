//! World states, partial knowledge, and enumeration of the worlds a piece of
//! knowledge leaves open.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::credence::CredenceModel;
use crate::error::{Error, Result};
use crate::value::Value;

/// Domains larger than this are rejected; the engine enumerates worlds.
pub const MAX_DOMAIN_SIZE: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub domain: Vec<Value>,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, domain: impl IntoIterator<Item = Value>) -> Self {
        Self {
            name: name.into(),
            domain: domain.into_iter().collect(),
        }
    }

    /// Convenience for symbolic domains.
    pub fn symbolic(name: impl Into<String>, domain: &[&str]) -> Self {
        Self::new(name, domain.iter().map(|s| Value::sym(*s)))
    }

    pub fn position(&self, value: &Value) -> Option<usize> {
        self.domain.iter().position(|v| v == value)
    }

    pub fn is_integer(&self) -> bool {
        self.domain.iter().all(Value::is_int)
    }
}

pub(crate) fn var_index(vars: &[VariableSpec], name: &str) -> Option<usize> {
    vars.iter().position(|v| v.name == name)
}

/// A full assignment, one value per declared variable in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WorldState(pub Vec<Value>);

impl WorldState {
    pub fn get(&self, vars: &[VariableSpec], name: &str) -> Option<&Value> {
        var_index(vars, name).and_then(|i| self.0.get(i))
    }

    pub fn check(&self, vars: &[VariableSpec]) -> Result<()> {
        if self.0.len() != vars.len() {
            return Err(Error::WorldArity {
                expected: vars.len(),
                got: self.0.len(),
            });
        }
        for (spec, value) in vars.iter().zip(&self.0) {
            if spec.position(value).is_none() {
                return Err(Error::ValueOutOfDomain {
                    variable: spec.name.clone(),
                    value: value.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Named view of the assignment.
    pub fn assignment(&self, vars: &[VariableSpec]) -> BTreeMap<String, Value> {
        vars.iter()
            .zip(&self.0)
            .map(|(s, v)| (s.name.clone(), v.clone()))
            .collect()
    }

    /// `a=1, b=high` in declaration order.
    pub fn describe(&self, vars: &[VariableSpec]) -> String {
        vars.iter()
            .zip(&self.0)
            .map(|(s, v)| format!("{}={}", s.name, v))
            .collect::<Vec<_>>()
            .join(", ")
    }

    /// Builds a world from a named assignment covering every variable.
    pub fn from_assignment(vars: &[VariableSpec], assignment: &BTreeMap<String, Value>) -> Result<Self> {
        if let Some(name) = assignment.keys().find(|k| var_index(vars, k).is_none()) {
            return Err(Error::UnknownVariable(name.clone()));
        }
        let values = vars
            .iter()
            .map(|spec| {
                assignment
                    .get(&spec.name)
                    .cloned()
                    .ok_or_else(|| Error::Contract(format!("world leaves `{}` unassigned", spec.name)))
            })
            .collect::<Result<Vec<_>>>()?;
        let world = WorldState(values);
        world.check(vars)?;
        Ok(world)
    }
}

impl fmt::Display for WorldState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Value::to_string).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

/// What the agent knows: values for an arbitrary subset of the variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Knowledge(pub BTreeMap<String, Value>);

impl Knowledge {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: impl Into<String>, value: impl Into<Value>) -> Self {
        self.0.insert(name.into(), value.into());
        self
    }

    /// Everything known: the full world.
    pub fn of_world(world: &WorldState, vars: &[VariableSpec]) -> Self {
        Knowledge(world.assignment(vars))
    }

    pub fn knows(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn validate(&self, vars: &[VariableSpec]) -> Result<()> {
        for (name, value) in &self.0 {
            let spec = vars
                .iter()
                .find(|s| &s.name == name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
            if spec.position(value).is_none() {
                return Err(Error::ValueOutOfDomain {
                    variable: name.clone(),
                    value: value.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn is_consistent(&self, world: &WorldState, vars: &[VariableSpec]) -> bool {
        vars.iter()
            .zip(&world.0)
            .all(|(spec, v)| self.0.get(&spec.name).is_none_or(|k| k == v))
    }
}

/// All full worlds agreeing with `knowledge`, in lexicographic order by
/// declaration (the last variable varies fastest, each domain in its
/// declared order).
pub fn enumerate_consistent_worlds(knowledge: &Knowledge, vars: &[VariableSpec]) -> Result<Vec<WorldState>> {
    knowledge.validate(vars)?;
    let choices: Vec<Vec<&Value>> = vars
        .iter()
        .map(|spec| match knowledge.0.get(&spec.name) {
            Some(v) => vec![v],
            None => spec.domain.iter().collect(),
        })
        .collect();
    if choices.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let total: usize = choices.iter().map(Vec::len).product();
    let mut out = Vec::with_capacity(total);
    let mut odometer = vec![0usize; vars.len()];
    loop {
        out.push(WorldState(
            odometer
                .iter()
                .zip(&choices)
                .map(|(&i, c)| c[i].clone())
                .collect(),
        ));
        let mut pos = vars.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < choices[pos].len() {
                break;
            }
            odometer[pos] = 0;
        }
    }
}

/// `P(w|k)`: the product of the credence-table entries of every variable not
/// fixed by `knowledge`. The empty product (everything known) is 1.
pub fn world_probability(
    world: &WorldState,
    knowledge: &Knowledge,
    vars: &[VariableSpec],
    model: &CredenceModel,
) -> Result<f64> {
    world.check(vars)?;
    if !knowledge.is_consistent(world, vars) {
        return Err(Error::Contract(format!(
            "world {} is inconsistent with the knowledge",
            world.describe(vars)
        )));
    }
    let mut p = 1.0;
    for (spec, value) in vars.iter().zip(&world.0) {
        if knowledge.knows(&spec.name) {
            continue;
        }
        p *= model.conditional(vars, world, spec, value)?;
    }
    Ok(p)
}
