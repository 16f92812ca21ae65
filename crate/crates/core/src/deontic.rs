//! Principles as condition → option-structure conditionals, ranked in a
//! principle structure, and the perfect-knowledge deontic filter.

use serde::{Deserialize, Serialize};

use crate::condition::Condition;
use crate::error::{Error, Result};
use crate::world::{VariableSpec, WorldState};

/// Ordered (best first) disjoint option classes. Options not mentioned
/// belong to an implicit bottom class.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OptionStructure(pub Vec<Vec<String>>);

impl OptionStructure {
    pub fn new<I, C, S>(classes: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = S>,
        S: Into<String>,
    {
        OptionStructure(
            classes
                .into_iter()
                .map(|c| c.into_iter().map(Into::into).collect())
                .collect(),
        )
    }

    /// Topmost class restricted to `options`, in `options` order. Falls back
    /// to the whole option set when no class intersects it.
    pub fn topmost(&self, options: &[String]) -> Vec<String> {
        let top: Vec<String> = match self.0.first() {
            Some(first) => options.iter().filter(|o| first.contains(o)).cloned().collect(),
            None => Vec::new(),
        };
        if top.is_empty() {
            options.to_vec()
        } else {
            top
        }
    }

    /// `{a} > {b, c}`, appending the implicit bottom class when non-empty.
    pub fn describe(&self, options: &[String]) -> String {
        let mut classes: Vec<Vec<String>> = self.0.clone();
        let rest: Vec<String> = options
            .iter()
            .filter(|o| !self.0.iter().any(|c| c.contains(o)))
            .cloned()
            .collect();
        if !rest.is_empty() {
            classes.push(rest);
        }
        classes
            .iter()
            .map(|c| format!("{{{}}}", c.join(", ")))
            .collect::<Vec<_>>()
            .join(" > ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Principle {
    pub id: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub condition: Condition,
    pub prefers: OptionStructure,
}

impl Principle {
    pub fn new(id: impl Into<String>, condition: Condition, prefers: OptionStructure) -> Self {
        Self {
            id: id.into(),
            description: String::new(),
            condition,
            prefers,
        }
    }
}

/// Principle classes, highest first. Rank 1 is the first class.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrincipleStructure(pub Vec<Vec<Principle>>);

impl PrincipleStructure {
    pub fn num_classes(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(rank, principle)` pairs, class by class, sorted by id within a class.
    pub fn ranked(&self) -> Vec<(usize, &Principle)> {
        let mut out = Vec::with_capacity(self.len());
        for (i, class) in self.0.iter().enumerate() {
            let mut members: Vec<&Principle> = class.iter().collect();
            members.sort_by(|a, b| a.id.cmp(&b.id));
            out.extend(members.into_iter().map(|p| (i + 1, p)));
        }
        out
    }

    pub fn rank_of(&self, id: &str) -> Option<usize> {
        self.0
            .iter()
            .position(|c| c.iter().any(|p| p.id == id))
            .map(|i| i + 1)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DilemmaPolicy {
    /// An empty intersection is a true moral dilemma and is reported.
    #[default]
    Error,
    /// Union of the permissible sets of the top-class principles with grip.
    Union,
    /// Every option passes.
    PassThrough,
}

pub fn applies(principle: &Principle, vars: &[VariableSpec], world: &WorldState) -> bool {
    principle.condition.eval(vars, world)
}

/// `Perm^ψ(A, w)`: the topmost class of the principle's option structure.
pub fn permissible_per_principle(
    principle: &Principle,
    options: &[String],
    vars: &[VariableSpec],
    world: &WorldState,
) -> Result<Vec<String>> {
    if !applies(principle, vars, world) {
        return Err(Error::Contract(format!(
            "principle `{}` does not apply in {}",
            principle.id,
            world.describe(vars)
        )));
    }
    Ok(principle.prefers.topmost(options))
}

/// A principle has grip when it actually narrows the options.
pub fn has_grip(principle: &Principle, options: &[String]) -> bool {
    principle.prefers.topmost(options).len() < options.len()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Applicable<'a> {
    /// `P^w` with ranks, in canonical order.
    pub all: Vec<(usize, &'a Principle)>,
    /// `P^w_max`.
    pub max_ranked: Vec<&'a Principle>,
}

pub fn applicable_principles<'a>(
    structure: &'a PrincipleStructure,
    vars: &[VariableSpec],
    world: &WorldState,
) -> Applicable<'a> {
    let all: Vec<(usize, &Principle)> = structure
        .ranked()
        .into_iter()
        .filter(|(_, p)| applies(p, vars, world))
        .collect();
    let max_ranked = match all.first() {
        Some(&(top, _)) => all
            .iter()
            .take_while(|(r, _)| *r == top)
            .map(|(_, p)| *p)
            .collect(),
        None => Vec::new(),
    };
    Applicable { all, max_ranked }
}

/// `dec_filter(A, w)`: the options permitted by every maximally ranked
/// applicable principle; all options when nothing applies.
pub fn deontic_filter(
    structure: &PrincipleStructure,
    options: &[String],
    vars: &[VariableSpec],
    world: &WorldState,
    policy: DilemmaPolicy,
) -> Result<Vec<String>> {
    let applicable = applicable_principles(structure, vars, world);
    if applicable.max_ranked.is_empty() {
        return Ok(options.to_vec());
    }
    let perms: Vec<Vec<String>> = applicable
        .max_ranked
        .iter()
        .map(|p| p.prefers.topmost(options))
        .collect();
    let meet: Vec<String> = options
        .iter()
        .filter(|o| perms.iter().all(|perm| perm.contains(o)))
        .cloned()
        .collect();
    if !meet.is_empty() {
        return Ok(meet);
    }
    match policy {
        DilemmaPolicy::Error => Err(Error::Dilemma {
            world: world.describe(vars),
            principles: applicable.max_ranked.iter().map(|p| p.id.clone()).collect(),
        }),
        DilemmaPolicy::Union => {
            let gripping: Vec<&Vec<String>> = applicable
                .max_ranked
                .iter()
                .zip(&perms)
                .filter(|(p, _)| has_grip(p, options))
                .map(|(_, perm)| perm)
                .collect();
            Ok(options
                .iter()
                .filter(|o| gripping.iter().any(|perm| perm.contains(o)))
                .cloned()
                .collect())
        }
        DilemmaPolicy::PassThrough => Ok(options.to_vec()),
    }
}
