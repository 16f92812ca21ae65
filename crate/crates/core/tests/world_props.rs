mod common;

use common::{generate, GenParams, TOL};
use moralarg_core::world::{enumerate_consistent_worlds, world_probability};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn consistent_worlds_match_brute_force_filter(seed in any::<u64>()) {
        let inst = generate(seed, GenParams::default());
        let worlds = enumerate_consistent_worlds(&inst.knowledge, &inst.scenario.variables).unwrap();
        let got: Vec<_> = worlds.iter().map(common::world_from_library).collect();
        let want = common::consistent_worlds(&inst.json, &inst.knowledge_json);
        prop_assert_eq!(got, want);
    }

    #[test]
    fn probabilities_match_table_products(seed in any::<u64>()) {
        let inst = generate(seed, GenParams::default());
        let sc = &inst.scenario;
        let mut total = 0.0;
        for w in enumerate_consistent_worlds(&inst.knowledge, &sc.variables).unwrap() {
            let p = world_probability(&w, &inst.knowledge, &sc.variables, &sc.credences).unwrap();
            let q = common::probability(&inst.json, &inst.knowledge_json, &common::world_from_library(&w));
            prop_assert!((p - q).abs() <= 1e-12, "{} vs {}", p, q);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
            total += p;
        }
        prop_assert!((total - 1.0).abs() <= TOL);
    }

    #[test]
    fn more_knowledge_never_adds_worlds(seed in any::<u64>()) {
        let inst = generate(seed, GenParams::default());
        let vars = &inst.scenario.variables;
        let worlds = enumerate_consistent_worlds(&inst.knowledge, vars).unwrap();
        if let Some(first) = worlds.first() {
            let mut k = inst.knowledge.clone();
            for v in vars {
                if !k.knows(&v.name) {
                    k = k.with(v.name.clone(), first.get(vars, &v.name).unwrap().clone());
                    break;
                }
            }
            let fewer = enumerate_consistent_worlds(&k, vars).unwrap();
            prop_assert!(fewer.len() <= worlds.len());
            prop_assert!(fewer.iter().all(|w| worlds.contains(w)));
        }
    }
}
