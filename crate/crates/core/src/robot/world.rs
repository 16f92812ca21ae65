use std::fmt;

use serde::{Deserialize, Serialize};

use super::facility::{shortest_distance, Node};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Priority {
    Low,
    High,
}

impl Priority {
    pub fn is_high(self) -> bool {
        self == Priority::High
    }
}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Priority::Low => "low",
            Priority::High => "high",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub name: String,
    pub priority: Priority,
    /// Energy spent performing the task on site; positive.
    pub energy_cost: u32,
    pub reward: f64,
}

/// A request from a room. The task is hidden from the decision engine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub room: Node,
    pub task: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    #[default]
    Active,
    /// The battery ran out; terminal for the stepper.
    Depleted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotWorld {
    pub location: Node,
    pub energy: u32,
    pub capacity: u32,
    #[serde(default)]
    pub pending_request: Option<Request>,
    #[serde(default)]
    pub time: u64,
    #[serde(default)]
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Action {
    AnsReq,
    Charge,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub world: RobotWorld,
    /// Reward of a completed task.
    pub reward: f64,
    /// The task completed by this step.
    pub served: Option<String>,
    pub warning: Option<String>,
}

impl RobotWorld {
    pub fn new(location: Node, energy: u32, capacity: u32) -> Self {
        RobotWorld {
            location,
            energy: energy.min(capacity),
            capacity,
            pending_request: None,
            time: 0,
            status: Status::Active,
        }
    }

    pub fn with_request(mut self, room: Node, task: impl Into<String>) -> Self {
        self.pending_request = Some(Request {
            room,
            task: task.into(),
        });
        self
    }

    pub fn is_depleted(&self) -> bool {
        self.status == Status::Depleted
    }

    fn deplete(mut self) -> Self {
        self.energy = 0;
        self.status = Status::Depleted;
        self
    }
}

/// One decision step. Travel costs one energy unit per unit of distance;
/// charging is atomic and fills the battery. Energy that would drop below
/// zero leaves the robot depleted. A depleted world only advances time.
pub fn step(world: &RobotWorld, action: Action, tasks: &[TaskSpec]) -> StepOutcome {
    let mut next = world.clone();
    next.time += 1;
    let outcome = |world, reward, served, warning| StepOutcome {
        world,
        reward,
        served,
        warning,
    };
    if world.is_depleted() {
        return outcome(next, 0.0, None, Some("robot is depleted".to_string()));
    }
    match action {
        Action::AnsReq => {
            let Some(request) = world.pending_request.clone() else {
                return outcome(
                    next,
                    0.0,
                    None,
                    Some("AnsReq without a pending request".to_string()),
                );
            };
            let Some(task) = tasks.iter().find(|t| t.name == request.task) else {
                return outcome(
                    next,
                    0.0,
                    None,
                    Some(format!("unknown task `{}`; request dropped", request.task)),
                );
            };
            next.pending_request = None;
            let cost = shortest_distance(world.location, request.room) + task.energy_cost;
            if cost > world.energy {
                next.location = request.room;
                return outcome(next.deplete(), 0.0, None, None);
            }
            next.location = request.room;
            next.energy -= cost;
            outcome(next, task.reward, Some(task.name.clone()), None)
        }
        Action::Charge => {
            let cost = shortest_distance(world.location, Node::CS);
            if cost > world.energy {
                return outcome(next.deplete(), 0.0, None, None);
            }
            next.location = Node::CS;
            next.energy = next.capacity;
            outcome(next, 0.0, None, None)
        }
    }
}
