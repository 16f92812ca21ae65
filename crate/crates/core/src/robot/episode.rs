use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::decision::{build_decision_problem, ConfigError, RobotConfig, ANS_REQ};
use super::facility::{Node, ROOMS};
use super::world::{step, Action, Request, RobotWorld, Status};
use crate::engine::{decide, pick, sequential_decide};
use crate::instrumental::instrumental_choice;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Expected utility only.
    Instrumental,
    /// Deontic filter on the true world, then expected utility.
    Sequential,
    /// The argumentation-graph decision under the robot's knowledge.
    Interlocked,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Instrumental, Policy::Sequential, Policy::Interlocked];
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Policy::Instrumental => "instrumental",
            Policy::Sequential => "sequential",
            Policy::Interlocked => "interlocked",
        })
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Policy::ALL
            .into_iter()
            .find(|p| p.to_string() == s)
            .ok_or_else(|| format!("unknown policy `{s}`"))
    }
}

fn default_tracked_task() -> String {
    "reanimation".into()
}

fn default_max_pending() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpisodeConfig {
    pub robot: RobotConfig,
    /// Probability of a new request per step.
    pub request_rate: f64,
    #[serde(default = "default_max_pending")]
    pub max_pending: usize,
    /// Steps a depleted robot waits before it is carried back and recharged.
    pub recovery_steps: u32,
    /// The task whose attempts and misses are counted separately.
    #[serde(default = "default_tracked_task")]
    pub tracked_task: String,
}

impl EpisodeConfig {
    /// Frequent requests and a battery too small to serve and return from
    /// most rooms, so recharging often competes with answering.
    pub fn dilemma_rich() -> Self {
        EpisodeConfig {
            robot: RobotConfig::dilemma_defaults(),
            request_rate: 0.3,
            max_pending: 1,
            recovery_steps: 2,
            tracked_task: default_tracked_task(),
        }
    }
}

#[derive(Debug, Error)]
pub enum EpisodeError {
    #[error("an episode needs at least one step")]
    NoSteps,
    #[error("request rate {0} is outside [0, 1]")]
    Rate(f64),
    #[error("max_pending must be positive")]
    Queue,
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("decision failed: {0}")]
    Engine(#[from] crate::error::Error),
}

/// One line of an episode trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub time: u64,
    pub location: Node,
    pub energy: u32,
    pub status: Status,
    /// `AnsReq`, `Charge`, `idle` or `recover`.
    pub action: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request: Option<Request>,
    pub reward: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub episodes: u64,
    pub steps: u64,
    pub requests: u64,
    pub served_low: u64,
    pub served_high: u64,
    pub declined: u64,
    pub missed: u64,
    pub tracked_requested: u64,
    pub tracked_attempted: u64,
    pub tracked_missed: u64,
    pub depletions: u64,
    pub total_reward: f64,
}

impl Metrics {
    pub fn merge(&mut self, other: &Metrics) {
        self.episodes += other.episodes;
        self.steps += other.steps;
        self.requests += other.requests;
        self.served_low += other.served_low;
        self.served_high += other.served_high;
        self.declined += other.declined;
        self.missed += other.missed;
        self.tracked_requested += other.tracked_requested;
        self.tracked_attempted += other.tracked_attempted;
        self.tracked_missed += other.tracked_missed;
        self.depletions += other.depletions;
        self.total_reward += other.total_reward;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub policy: Policy,
    pub seed: u64,
    pub trace: Vec<TraceRecord>,
    pub metrics: Metrics,
}

impl EpisodeResult {
    /// The trace as line-delimited JSON.
    pub fn trace_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|r| serde_json::to_string(r).expect("trace record serializes") + "\n")
            .collect()
    }
}

fn sample_task(config: &RobotConfig, u: f64) -> String {
    let mut acc = 0.0;
    for (t, w) in config.tasks.iter().zip(&config.task_weights) {
        acc += w;
        if u < acc {
            return t.name.clone();
        }
    }
    config.tasks.last().expect("validated").name.clone()
}

fn choose(
    world: &RobotWorld,
    config: &RobotConfig,
    policy: Policy,
    seed: u64,
) -> Result<Action, EpisodeError> {
    let problem = build_decision_problem(world, config).expect("pending request of a known task");
    let sc = &problem.scenario;
    let choice = match policy {
        Policy::Instrumental => {
            let best = instrumental_choice(sc.options.as_slice(), &problem.knowledge, sc)?;
            best[pick(best.len(), seed)].clone()
        }
        Policy::Sequential => sequential_decide(&problem.true_world, &problem.knowledge, sc, seed)?,
        Policy::Interlocked => decide(&problem.knowledge, sc, seed)?.0,
    };
    Ok(if choice == ANS_REQ {
        Action::AnsReq
    } else {
        Action::Charge
    })
}

/// Runs `steps` steps from a full battery at the charging station.
///
/// Requests arrive from an environment stream and decisions draw from a
/// separate stream, so every policy sees the same arrivals for one seed.
/// A request answered with `Charge` is declined. Requests pending while the
/// robot is depleted are lost.
pub fn run_episode(
    config: &EpisodeConfig,
    policy: Policy,
    steps: u64,
    seed: u64,
) -> Result<EpisodeResult, EpisodeError> {
    if steps == 0 {
        return Err(EpisodeError::NoSteps);
    }
    if !(0.0..=1.0).contains(&config.request_rate) {
        return Err(EpisodeError::Rate(config.request_rate));
    }
    if config.max_pending == 0 {
        return Err(EpisodeError::Queue);
    }
    let robot = &config.robot;
    robot.validate()?;

    let mut env = ChaCha8Rng::seed_from_u64(seed);
    let mut decisions = ChaCha8Rng::seed_from_u64(seed ^ 0x5DEE_CE66_D1CE_4E5B);
    let mut world = RobotWorld::new(Node::CS, robot.capacity, robot.capacity);
    let mut queue: VecDeque<Request> = VecDeque::new();
    let mut recovering = 0u32;
    let mut m = Metrics {
        episodes: 1,
        steps,
        ..Metrics::default()
    };
    let mut trace = Vec::with_capacity(steps as usize);
    let tracked = |r: &Request| r.task == config.tracked_task;

    for _ in 0..steps {
        let arrival: f64 = env.gen();
        let room = ROOMS[env.gen_range(0..ROOMS.len())];
        let task_u: f64 = env.gen();
        if arrival < config.request_rate && queue.len() < config.max_pending {
            let request = Request {
                room,
                task: sample_task(robot, task_u),
            };
            m.requests += 1;
            m.tracked_requested += tracked(&request) as u64;
            queue.push_back(request);
        }

        let mut reward = 0.0;
        let mut current = None;
        let label;
        if world.is_depleted() {
            for r in queue.drain(..) {
                m.missed += 1;
                m.tracked_missed += tracked(&r) as u64;
            }
            recovering += 1;
            world.time += 1;
            if recovering >= config.recovery_steps {
                recovering = 0;
                world.location = Node::CS;
                world.energy = world.capacity;
                world.status = Status::Active;
                label = "recover".to_string();
            } else {
                label = "idle".to_string();
            }
        } else {
            world.pending_request = queue.front().cloned();
            let action = match &world.pending_request {
                Some(_) => Some(choose(&world, robot, policy, decisions.gen())?),
                None if world.energy < world.capacity => Some(Action::Charge),
                None => None,
            };
            match action {
                None => {
                    world.time += 1;
                    label = "idle".to_string();
                }
                Some(action) => {
                    let request = world.pending_request.clone();
                    let out = step(&world, action, &robot.tasks);
                    if let Some(r) = &request {
                        queue.pop_front();
                        match action {
                            Action::AnsReq => {
                                m.tracked_attempted += tracked(r) as u64;
                                match out.served.as_deref().and_then(|t| robot.task(t)) {
                                    Some(t) if t.priority.is_high() => m.served_high += 1,
                                    Some(_) => m.served_low += 1,
                                    None => {
                                        m.missed += 1;
                                        m.tracked_missed += tracked(r) as u64;
                                    }
                                }
                            }
                            Action::Charge => {
                                m.declined += 1;
                                m.missed += 1;
                                m.tracked_missed += tracked(r) as u64;
                            }
                        }
                    }
                    if out.world.is_depleted() {
                        m.depletions += 1;
                    }
                    reward = out.reward;
                    m.total_reward += reward;
                    current = request;
                    world = out.world;
                    world.pending_request = None;
                    label = action.to_string();
                }
            }
        }
        trace.push(TraceRecord {
            time: world.time,
            location: world.location,
            energy: world.energy,
            status: world.status,
            action: label,
            request: current,
            reward,
        });
    }
    Ok(EpisodeResult {
        policy,
        seed,
        trace,
        metrics: m,
    })
}

/// Per-episode seeds derived from one master seed.
pub fn episode_seeds(seed: u64, episodes: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..episodes).map(|_| rng.gen()).collect()
}

/// Aggregated metrics of every policy over the same seeded episodes.
pub fn compare(
    config: &EpisodeConfig,
    episodes: usize,
    steps: u64,
    seed: u64,
) -> Result<Vec<(Policy, Metrics)>, EpisodeError> {
    let seeds = episode_seeds(seed, episodes);
    Policy::ALL
        .into_iter()
        .map(|policy| {
            let mut total = Metrics::default();
            for &s in &seeds {
                total.merge(&run_episode(config, policy, steps, s)?.metrics);
            }
            Ok((policy, total))
        })
        .collect()
}
