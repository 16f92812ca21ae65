use thiserror::Error;

use super::decision::{build_decision_problem, DecisionProblem, RobotConfig, ANS_REQ, CHARGE};
use super::facility::{shortest_distance, Node};
use super::world::{step, Action, Priority, RobotWorld, TaskSpec};
use crate::deontic::deontic_filter;
use crate::engine::EngineConfig;
use crate::instrumental::expected_utility;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("fixture parameters violate {0}")]
    Tuning(String),
    #[error(transparent)]
    Engine(#[from] crate::error::Error),
}

/// The robot at R1 facing a reanimation request it can complete but not
/// return from.
#[derive(Debug, Clone)]
pub struct DilemmaFixture {
    pub config: RobotConfig,
    pub robot: RobotWorld,
    pub problem: DecisionProblem,
    /// Expected utilities recomputed by stepping the robot world once per
    /// possible task.
    pub oracle_eu_ans_req: f64,
    pub oracle_eu_charge: f64,
}

impl RobotConfig {
    /// Three tasks, mostly low priority, with high-priority work probable in
    /// the future and costly to forgo.
    pub fn dilemma_defaults() -> Self {
        let task = |name: &str, priority, energy_cost, reward| TaskSpec {
            name: name.into(),
            priority,
            energy_cost,
            reward,
        };
        RobotConfig {
            capacity: 10,
            tasks: vec![
                task("fetch-water", Priority::Low, 1, 1.0),
                task("give-meds", Priority::High, 2, 5.0),
                task("reanimation", Priority::High, 3, 20.0),
            ],
            task_weights: vec![0.6, 0.3, 0.1],
            operational_value: 6.0,
            stranding_penalty: 0.0,
            engine: EngineConfig::default(),
        }
    }
}

/// Utility of the robot state after one step, read off the world itself:
/// the collected reward plus the value of still being able to reach the
/// charging station, or minus the stranding penalty.
pub fn state_utility(after: &RobotWorld, served: Option<&TaskSpec>, config: &RobotConfig) -> f64 {
    let reward = served.map_or(0.0, |t| t.reward);
    let operational = !after.is_depleted() && shortest_distance(after.location, Node::CS) <= after.energy;
    if operational {
        reward + config.operational_value
    } else {
        reward - config.stranding_penalty
    }
}

/// Expected utility of `action` by stepping the robot once for every
/// possible hidden task and weighting by the task prior.
pub fn stepped_expected_utility(world: &RobotWorld, action: Action, config: &RobotConfig) -> f64 {
    let room = world.pending_request.as_ref().map_or(world.location, |r| r.room);
    config
        .tasks
        .iter()
        .zip(&config.task_weights)
        .map(|(t, w)| {
            let w0 = world.clone().with_request(room, t.name.as_str());
            let out = step(&w0, action, &config.tasks);
            let served = out.served.as_ref().and(Some(t));
            w * state_utility(&out.world, served, config)
        })
        .sum()
}

/// Builds the fixture and checks its defining properties: the stepped
/// expected utilities agree with the scenario, recharging has the higher
/// expected utility, and the top-class principle mandates answering in the
/// true world.
pub fn build_dilemma_fixture() -> Result<DilemmaFixture, FixtureError> {
    let config = RobotConfig::dilemma_defaults();
    config
        .validate()
        .map_err(|e| FixtureError::Tuning(e.to_string()))?;
    let robot = RobotWorld::new(Node::R1, 4, config.capacity).with_request(Node::R1, "reanimation");
    let problem = build_decision_problem(&robot, &config)
        .ok_or_else(|| FixtureError::Tuning("the pending request".into()))?;
    let sc = &problem.scenario;

    let task = config.task("reanimation").expect("declared task");
    let to_room = shortest_distance(robot.location, Node::R1);
    if to_room + task.energy_cost > robot.energy {
        return Err(FixtureError::Tuning("energy sufficient for the task".into()));
    }
    if to_room + task.energy_cost + shortest_distance(Node::R1, Node::CS) <= robot.energy {
        return Err(FixtureError::Tuning("energy insufficient for the return".into()));
    }

    let oracle_eu_ans_req = stepped_expected_utility(&robot, Action::AnsReq, &config);
    let oracle_eu_charge = stepped_expected_utility(&robot, Action::Charge, &config);
    let eu_ans_req = expected_utility(ANS_REQ, &problem.knowledge, sc)?;
    let eu_charge = expected_utility(CHARGE, &problem.knowledge, sc)?;
    if (eu_ans_req - oracle_eu_ans_req).abs() > 1e-9 || (eu_charge - oracle_eu_charge).abs() > 1e-9 {
        return Err(FixtureError::Tuning(format!(
            "agreement of scenario and stepped utilities ({eu_ans_req} vs {oracle_eu_ans_req}, {eu_charge} vs {oracle_eu_charge})"
        )));
    }
    if oracle_eu_charge <= oracle_eu_ans_req {
        return Err(FixtureError::Tuning(format!(
            "EU(Charge) > EU(AnsReq) ({oracle_eu_charge} <= {oracle_eu_ans_req})"
        )));
    }
    let permitted = deontic_filter(
        &sc.principles,
        sc.options.as_slice(),
        &sc.variables,
        &problem.true_world,
        sc.engine.dilemma_policy,
    )?;
    if permitted != [ANS_REQ] {
        return Err(FixtureError::Tuning(format!(
            "a filter of {{AnsReq}} in the true world (got {permitted:?})"
        )));
    }
    Ok(DilemmaFixture {
        config,
        robot,
        problem,
        oracle_eu_ans_req,
        oracle_eu_charge,
    })
}
