use moralarg_core::engine::decide;
use moralarg_core::instrumental::instrumental_choice;
use moralarg_core::robot::{
    build_decision_problem, build_dilemma_fixture, compare, episode_seeds, run_episode, shortest_distance,
    step, Action, EpisodeConfig, EpisodeError, Node, Policy, RobotConfig, TraceRecord, ANS_REQ, CHARGE,
    ROOMS,
};
use proptest::prelude::*;

#[test]
fn fixture_is_a_dilemma_between_utility_and_duty() {
    let f = build_dilemma_fixture().unwrap();
    // Hand values: 0.6*(1+6) + 0.3*(5+6) + 0.1*(20-0) = 4.1, charging keeps F = 6.
    assert!((f.oracle_eu_ans_req - 4.1).abs() < 1e-9);
    assert!((f.oracle_eu_charge - 6.0).abs() < 1e-9);

    let sc = &f.problem.scenario;
    let best = instrumental_choice(sc.options.as_slice(), &f.problem.knowledge, sc).unwrap();
    assert_eq!(best, vec![CHARGE.to_string()]);
    let (chosen, graph) = decide(&f.problem.knowledge, sc, 0).unwrap();
    assert_eq!(chosen, ANS_REQ);
    assert!(!graph.is_fallback());
}

#[test]
fn decision_problem_needs_a_known_pending_task() {
    let config = RobotConfig::dilemma_defaults();
    let idle = moralarg_core::robot::RobotWorld::new(Node::R1, 4, config.capacity);
    assert!(build_decision_problem(&idle, &config).is_none());
    let odd = idle.clone().with_request(Node::R2, "juggling");
    assert!(build_decision_problem(&odd, &config).is_none());
    let ok = idle.with_request(Node::R2, "fetch-water");
    assert!(build_decision_problem(&ok, &config).is_some());
}

#[test]
fn zero_steps_are_rejected() {
    let config = EpisodeConfig::dilemma_rich();
    assert!(matches!(
        run_episode(&config, Policy::Interlocked, 0, 1),
        Err(EpisodeError::NoSteps)
    ));
}

#[test]
fn bad_rates_are_rejected() {
    let mut config = EpisodeConfig::dilemma_rich();
    config.request_rate = 1.5;
    assert!(matches!(
        run_episode(&config, Policy::Instrumental, 5, 1),
        Err(EpisodeError::Rate(_))
    ));
}

#[test]
fn policies_see_the_same_first_arrival() {
    // Arrivals come from the environment stream alone; later counts may
    // differ because a depleted robot drops its queue.
    let config = EpisodeConfig::dilemma_rich();
    for seed in 0..50 {
        let first = run_episode(&config, Policy::Instrumental, 1, seed).unwrap();
        for p in Policy::ALL {
            let other = run_episode(&config, p, 1, seed).unwrap();
            assert_eq!(other.trace[0].request, first.trace[0].request);
            assert_eq!(other.metrics.requests, first.metrics.requests);
        }
    }
}

#[test]
fn trace_lines_are_json_records() {
    let config = EpisodeConfig::dilemma_rich();
    let run = run_episode(&config, Policy::Sequential, 30, 9).unwrap();
    let text = run.trace_jsonl();
    assert_eq!(text.lines().count(), 30);
    for (line, record) in text.lines().zip(&run.trace) {
        let back: TraceRecord = serde_json::from_str(line).unwrap();
        assert_eq!(&back, record);
        let raw: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["time", "location", "energy", "status", "action", "reward"] {
            assert!(raw.get(key).is_some(), "missing {key} in {line}");
        }
    }
}

#[test]
fn interlocked_misses_no_more_tracked_tasks_than_instrumental() {
    let config = EpisodeConfig::dilemma_rich();
    let results = compare(&config, 60, 100, 1).unwrap();
    let get = |p: Policy| results.iter().find(|(q, _)| *q == p).unwrap().1.clone();
    let instrumental = get(Policy::Instrumental);
    let interlocked = get(Policy::Interlocked);
    assert!(interlocked.tracked_missed <= instrumental.tracked_missed);
    assert!(interlocked.tracked_attempted >= instrumental.tracked_attempted);
}

#[test]
fn policy_names_parse() {
    for p in Policy::ALL {
        assert_eq!(p.to_string().parse::<Policy>().unwrap(), p);
    }
    assert!("greedy".parse::<Policy>().is_err());
}

#[test]
fn episode_seeds_are_reproducible() {
    assert_eq!(episode_seeds(5, 10), episode_seeds(5, 10));
    assert_ne!(episode_seeds(5, 10), episode_seeds(6, 10));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn same_seed_same_trace(seed in any::<u64>(), p in 0usize..3) {
        let config = EpisodeConfig::dilemma_rich();
        let a = run_episode(&config, Policy::ALL[p], 60, seed).unwrap();
        let b = run_episode(&config, Policy::ALL[p], 60, seed).unwrap();
        prop_assert_eq!(a.trace_jsonl(), b.trace_jsonl());
        prop_assert_eq!(a.metrics, b.metrics);
    }

    #[test]
    fn traces_respect_battery_and_clock(seed in any::<u64>(), p in 0usize..3) {
        let config = EpisodeConfig::dilemma_rich();
        let run = run_episode(&config, Policy::ALL[p], 80, seed).unwrap();
        let mut last = 0;
        for r in &run.trace {
            prop_assert!(r.energy <= config.robot.capacity);
            prop_assert!(r.time > last);
            last = r.time;
        }
        let m = &run.metrics;
        prop_assert!(m.served_low + m.served_high + m.missed <= m.requests);
        prop_assert!(m.tracked_missed <= m.tracked_requested);
    }

    #[test]
    fn stepping_never_overfills(room in 0usize..3, energy in 0u32..=10, task in 0usize..3, charge in any::<bool>()) {
        let config = RobotConfig::dilemma_defaults();
        let t = &config.tasks[task];
        let world = moralarg_core::robot::RobotWorld::new(Node::CS, energy, config.capacity)
            .with_request(ROOMS[room], t.name.clone());
        let action = if charge { Action::Charge } else { Action::AnsReq };
        let out = step(&world, action, &config.tasks);
        prop_assert!(out.world.energy <= config.capacity);
        prop_assert_eq!(out.world.time, world.time + 1);
        let need = shortest_distance(Node::CS, ROOMS[room]) + t.energy_cost;
        if !charge && energy < need {
            prop_assert!(out.world.is_depleted());
            prop_assert!(out.served.is_none());
        }
    }
}
