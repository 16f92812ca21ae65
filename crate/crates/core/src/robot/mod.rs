//! The medical care robot: a fixed facility, a battery-driven stepper, the
//! decision problem posed at each request, the dilemma fixture and an
//! episode runner.

mod decision;
mod episode;
mod facility;
mod fixture;
mod world;

pub use decision::{build_decision_problem, ConfigError, DecisionProblem, RobotConfig, ANS_REQ, CHARGE};
pub use episode::{
    compare, episode_seeds, run_episode, EpisodeConfig, EpisodeError, EpisodeResult, Metrics, Policy,
    TraceRecord,
};
pub use facility::{shortest_distance, Node, EDGES, ROOMS};
pub use fixture::{
    build_dilemma_fixture, state_utility, stepped_expected_utility, DilemmaFixture, FixtureError,
};
pub use world::{step, Action, Priority, Request, RobotWorld, Status, StepOutcome, TaskSpec};
