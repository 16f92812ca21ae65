mod common;

use common::{generate, GenParams};
use moralarg_core::engine::{argmax_strengths, decide, RelevanceConfig, Strength};
use moralarg_core::explain::render_graph_json;
use proptest::prelude::*;

fn params(lexicographic: bool) -> GenParams {
    GenParams {
        lexicographic,
        ..GenParams::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn chosen_option_is_supported_and_maximal(seed in any::<u64>(), lex in any::<bool>(), pick in any::<u64>()) {
        let inst = generate(seed, params(lex));
        let (choice, g) = decide(&inst.knowledge, &inst.scenario, pick).unwrap();
        prop_assert_eq!(&choice, &g.v3.chosen);
        prop_assert!(g.v3.tie_set.contains(&choice));
        if !g.v1.is_empty() {
            prop_assert!(g.v1.iter().any(|c| c.perm_set.contains(&choice)));
            let scores: Vec<Strength> = g.v3.entries.iter().map(|e| e.score.clone()).collect();
            let best = argmax_strengths(&scores, 1e-9);
            let at = g.v3.entries.iter().position(|e| e.option == choice).unwrap();
            prop_assert!(best.contains(&at));
        } else {
            prop_assert!(g.is_fallback());
        }
    }

    #[test]
    fn graph_shape_invariants(seed in any::<u64>(), lex in any::<bool>()) {
        let inst = generate(seed, params(lex));
        let (_, g) = decide(&inst.knowledge, &inst.scenario, 0).unwrap();
        prop_assert_eq!(g.e23.len(), g.v2.len());
        for e in &g.e12 {
            let case = g.v1.iter().find(|c| c.id == e.from).unwrap();
            let arg = g.v2.iter().find(|a| a.id == e.to).unwrap();
            prop_assert!(case.perm_set.contains(&arg.option));
            prop_assert_eq!(&e.weight, &case.force);
        }
        for a in &g.v2 {
            prop_assert_eq!(g.in_degree(&a.id), a.support.len());
            let sum = a.support.iter().fold(Strength::zero(a.strength.tiers()), |acc, s| acc + &s.force);
            prop_assert_eq!(&sum, &a.strength);
        }
        for c in &g.v1 {
            let expected = if lex {
                let mut v = vec![0.0; inst.scenario.principles.num_classes()];
                v[c.rank - 1] = c.probability;
                v
            } else {
                vec![c.probability * c.relevance.0[0]]
            };
            prop_assert_eq!(&c.force.0, &expected);
        }
    }

    #[test]
    fn decisions_are_deterministic(seed in any::<u64>(), pick in any::<u64>()) {
        let inst = generate(seed, params(seed % 2 == 0));
        let (c1, g1) = decide(&inst.knowledge, &inst.scenario, pick).unwrap();
        let (c2, g2) = decide(&inst.knowledge, &inst.scenario, pick).unwrap();
        prop_assert_eq!(c1, c2);
        prop_assert_eq!(render_graph_json(&g1), render_graph_json(&g2));
    }

    #[test]
    fn matches_oracle(seed in any::<u64>(), lex in any::<bool>(), pick in any::<u64>()) {
        let inst = generate(seed, params(lex));
        let (choice, g) = decide(&inst.knowledge, &inst.scenario, pick).unwrap();
        let o = common::oracle_decide(&inst.json, &inst.knowledge_json, pick);
        prop_assert_eq!(&g.v3.tie_set, &o.tie_set);
        prop_assert_eq!(choice, o.chosen);
    }

    #[test]
    fn zero_utility_scaling_invariance(seed in any::<u64>(), lambda in 0.01f64..1000.0) {
        let inst = generate(seed, GenParams { zero_utility: true, explicit_weights: true, ..GenParams::default() });
        let (_, g) = decide(&inst.knowledge, &inst.scenario, 0).unwrap();
        let mut scaled = inst.scenario.clone();
        if let RelevanceConfig::Archimedean { weights: Some(w), .. } = &mut scaled.engine.relevance {
            w.iter_mut().for_each(|x| *x *= lambda);
        }
        let (_, g2) = decide(&inst.knowledge, &scaled, 0).unwrap();
        prop_assert_eq!(g.v3.tie_set, g2.v3.tie_set);
    }

    #[test]
    fn relevance_is_monotone_in_rank(base in 1.01f64..50.0, classes in 1usize..6) {
        let r = moralarg_core::engine::RelevanceFunction::new(
            &RelevanceConfig::Archimedean { base, weights: None },
            classes,
        );
        for rank in 1..classes {
            prop_assert!(r.relevance(rank).0[0] > r.relevance(rank + 1).0[0]);
        }
    }
}
