use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::facility::{shortest_distance, Node};
use super::world::{RobotWorld, TaskSpec};
use crate::condition::Condition;
use crate::credence::{CredenceModel, CredenceRow, CredenceTable};
use crate::deontic::{OptionStructure, Principle, PrincipleStructure};
use crate::engine::EngineConfig;
use crate::instrumental::{
    OptionSet, OutcomeBranch, OutcomeModel, TransitionRule, Unlisted, UtilityFunction, UtilityRule,
};
use crate::numeric::Prob;
use crate::scenario::Scenario;
use crate::value::Value;
use crate::world::{Knowledge, VariableSpec, WorldState};

pub const ANS_REQ: &str = "AnsReq";
pub const CHARGE: &str = "Charge";

/// Parameters of the robot's decision model. None of them are fixed by the
/// world itself; they are tuning knobs of the fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotConfig {
    pub capacity: u32,
    pub tasks: Vec<TaskSpec>,
    /// Prior over the hidden task of a request, aligned with `tasks`.
    pub task_weights: Vec<f64>,
    /// Utility of still being able to reach the charging station.
    pub operational_value: f64,
    /// Disutility of being stranded or depleted.
    pub stranding_penalty: f64,
    #[serde(default)]
    pub engine: EngineConfig,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("robot config: {0}")]
    Invalid(String),
}

impl RobotConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.capacity == 0 {
            return bad("capacity must be positive".into());
        }
        if self.tasks.is_empty() {
            return bad("no tasks".into());
        }
        if self.tasks.len() != self.task_weights.len() {
            return bad(format!(
                "{} task weights for {} tasks",
                self.task_weights.len(),
                self.tasks.len()
            ));
        }
        for (i, t) in self.tasks.iter().enumerate() {
            if t.energy_cost == 0 {
                return bad(format!("task `{}` has zero energy cost", t.name));
            }
            if self.tasks[..i].iter().any(|u| u.name == t.name) {
                return bad(format!("duplicate task `{}`", t.name));
            }
        }
        if self.task_weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return bad("task weights must lie in [0, 1]".into());
        }
        let mass: f64 = self.task_weights.iter().sum();
        if (mass - 1.0).abs() > 1e-9 {
            return bad(format!("task weights sum to {mass}, not 1"));
        }
        Ok(())
    }

    pub fn task(&self, name: &str) -> Option<&TaskSpec> {
        self.tasks.iter().find(|t| t.name == name)
    }
}

/// The decision the robot faces at a pending request.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionProblem {
    pub scenario: Scenario,
    /// What the robot knows: nothing about the task or its priority.
    pub knowledge: Knowledge,
    /// The full state including the hidden task.
    pub true_world: WorldState,
}

fn yes_no(b: bool) -> Value {
    Value::sym(if b { "yes" } else { "no" })
}

fn point_mass(var: &VariableSpec, value: &Value) -> Vec<Prob> {
    var.domain
        .iter()
        .map(|v| Prob(if v == value { 1.0 } else { 0.0 }))
        .collect()
}

fn set(pairs: &[(&str, &str)]) -> std::collections::BTreeMap<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), Value::sym(*v)))
        .collect()
}

fn certain(option: &str, when: Condition, pairs: &[(&str, &str)]) -> TransitionRule {
    TransitionRule {
        option: option.into(),
        when,
        outcomes: vec![OutcomeBranch {
            p: Prob(1.0),
            set: set(pairs),
        }],
    }
}

/// Builds the two-option decision scenario for the robot's pending request.
/// Whether each possible task could be served, and served with a safe return
/// to the charging station, is derived from the current energy and the
/// hallway distances. Returns `None` without a pending request.
pub fn build_decision_problem(world: &RobotWorld, config: &RobotConfig) -> Option<DecisionProblem> {
    let request = world.pending_request.as_ref()?;
    let room = request.room;
    let to_room = shortest_distance(world.location, room);
    let back = shortest_distance(room, Node::CS);
    let can_reach_station = shortest_distance(world.location, Node::CS) <= world.energy;
    let can_serve = |t: &TaskSpec| to_room + t.energy_cost <= world.energy;
    let can_serve_and_return = |t: &TaskSpec| to_room + t.energy_cost + back <= world.energy;

    let names: Vec<&str> = config.tasks.iter().map(|t| t.name.as_str()).collect();
    let yn = ["no", "yes"];
    let variables = vec![
        VariableSpec::symbolic("served", &yn),
        VariableSpec::symbolic("operational", &["yes", "no"]),
        VariableSpec::symbolic("can_reach_station", &yn),
        VariableSpec::symbolic("task", &names),
        VariableSpec::symbolic("priority", &["low", "high"]),
        VariableSpec::symbolic("can_serve", &yn),
        VariableSpec::symbolic("can_serve_and_return", &yn),
    ];

    let per_task = |variable: &str, value: &dyn Fn(&TaskSpec) -> Value| {
        let spec = variables.iter().find(|v| v.name == variable).expect("declared");
        CredenceTable {
            variable: variable.into(),
            given: vec!["task".into()],
            rows: config
                .tasks
                .iter()
                .map(|t| CredenceRow {
                    when: vec![Value::sym(t.name.as_str())],
                    p: point_mass(spec, &value(t)),
                })
                .collect(),
        }
    };
    let priority_of = |t: &TaskSpec| Value::sym(t.priority.to_string());
    let credences = CredenceModel(vec![
        CredenceTable {
            variable: "served".into(),
            given: vec![],
            rows: vec![CredenceRow {
                when: vec![],
                p: point_mass(&variables[0], &yes_no(false)),
            }],
        },
        CredenceTable {
            variable: "operational".into(),
            given: vec![],
            rows: vec![CredenceRow {
                when: vec![],
                p: point_mass(&variables[1], &Value::sym("yes")),
            }],
        },
        CredenceTable {
            variable: "can_reach_station".into(),
            given: vec![],
            rows: vec![CredenceRow {
                when: vec![],
                p: point_mass(&variables[2], &yes_no(can_reach_station)),
            }],
        },
        CredenceTable::prior("task", config.task_weights.iter().copied()),
        per_task("priority", &priority_of),
        per_task("can_serve", &|t| yes_no(can_serve(t))),
        per_task("can_serve_and_return", &|t| yes_no(can_serve_and_return(t))),
    ]);

    let outcome = OutcomeModel {
        unlisted: Unlisted::Error,
        rules: vec![
            certain(
                ANS_REQ,
                Condition::eq("can_serve", "no"),
                &[("operational", "no")],
            ),
            certain(
                ANS_REQ,
                Condition::eq("can_serve_and_return", "yes"),
                &[("served", "yes")],
            ),
            certain(
                ANS_REQ,
                Condition::always(),
                &[("served", "yes"), ("operational", "no")],
            ),
            certain(
                CHARGE,
                Condition::eq("can_reach_station", "no"),
                &[("operational", "no")],
            ),
            certain(CHARGE, Condition::always(), &[]),
        ],
    };

    let f = config.operational_value;
    let d = config.stranding_penalty;
    let mut rules = Vec::new();
    for t in &config.tasks {
        rules.push(UtilityRule {
            when: Condition::and([
                Condition::eq("operational", "yes"),
                Condition::eq("served", "yes"),
                Condition::eq("task", t.name.as_str()),
            ]),
            value: t.reward + f,
        });
    }
    rules.push(UtilityRule {
        when: Condition::eq("operational", "yes"),
        value: f,
    });
    for t in &config.tasks {
        rules.push(UtilityRule {
            when: Condition::and([
                Condition::eq("served", "yes"),
                Condition::eq("task", t.name.as_str()),
            ]),
            value: t.reward - d,
        });
    }
    rules.push(UtilityRule {
        when: Condition::always(),
        value: -d,
    });

    let principles = PrincipleStructure(vec![
        vec![Principle {
            id: "serve-urgent".into(),
            description: "attempt high-priority tasks that can still be completed".into(),
            condition: Condition::and([
                Condition::eq("priority", "high"),
                Condition::eq("can_serve", "yes"),
            ]),
            prefers: OptionStructure::new([vec![ANS_REQ]]),
        }],
        vec![Principle {
            id: "preserve-battery".into(),
            description: "recharge rather than strand the robot for a low-priority task".into(),
            condition: Condition::and([
                Condition::eq("priority", "low"),
                Condition::eq("can_serve_and_return", "no"),
            ]),
            prefers: OptionStructure::new([vec![CHARGE]]),
        }],
    ]);

    let mut scenario = Scenario::empty(format!(
        "care-robot-{}-e{}-{}",
        world.location, world.energy, room
    ));
    scenario.description = format!(
        "Robot at {} with energy {}/{} and a request from {}.",
        world.location, world.energy, world.capacity, room
    );
    scenario.options = OptionSet::new([ANS_REQ, CHARGE]);
    scenario.credences = credences;
    scenario.outcome = outcome;
    scenario.utility = UtilityFunction(rules);
    scenario.principles = principles;
    scenario.engine = config.engine.clone();
    scenario.engine.exclude_impossible_cases = true;

    let knowledge = Knowledge::new()
        .with("served", "no")
        .with("operational", "yes")
        .with("can_reach_station", yes_no(can_reach_station));
    let task = config.task(&request.task)?;
    let true_world = WorldState(vec![
        yes_no(false),
        Value::sym("yes"),
        yes_no(can_reach_station),
        Value::sym(task.name.as_str()),
        priority_of(task),
        yes_no(can_serve(task)),
        yes_no(can_serve_and_return(task)),
    ]);
    scenario.variables = variables;
    Some(DecisionProblem {
        scenario,
        knowledge,
        true_world,
    })
}
