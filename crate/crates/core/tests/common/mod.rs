//! Random scenario generation and brute-force oracles for integration tests.
//!
//! The oracles read the raw scenario JSON and never touch library types, so
//! they share no evaluation code with the engine.
#![allow(dead_code)]

use moralarg_core::{parse_scenario, Knowledge, Scenario};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value as Json};

pub const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub max_vars: usize,
    pub max_unknown: usize,
    pub max_domain: usize,
    pub max_options: usize,
    pub max_principles: usize,
    pub max_classes: usize,
    pub lexicographic: bool,
    /// Utility is identically zero.
    pub zero_utility: bool,
    /// Every variable is known.
    pub full_knowledge: bool,
    /// Explicit archimedean weights instead of a base.
    pub explicit_weights: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_vars: 5,
            max_unknown: 4,
            max_domain: 3,
            max_options: 5,
            max_principles: 6,
            max_classes: 3,
            lexicographic: false,
            zero_utility: false,
            full_knowledge: false,
            explicit_weights: false,
        }
    }
}

/// A generated instance: raw JSON plus the parsed library view.
#[derive(Debug, Clone)]
pub struct Instance {
    pub json: Json,
    pub knowledge_json: Map<String, Json>,
    pub scenario: Scenario,
    pub knowledge: Knowledge,
}

struct Var {
    name: String,
    domain: Vec<Json>,
    numeric: bool,
}

fn gen_condition(rng: &mut ChaCha8Rng, vars: &[Var], depth: u32) -> Json {
    let roll = rng.gen_range(0..10);
    if depth > 0 && roll < 3 {
        let n = rng.gen_range(1..=2);
        let mut items = vec![json!(if roll == 0 { "or" } else { "and" })];
        for _ in 0..n {
            items.push(gen_condition(rng, vars, depth - 1));
        }
        return Json::Array(items);
    }
    if depth > 0 && roll == 3 {
        return json!(["not", gen_condition(rng, vars, depth - 1)]);
    }
    if roll == 4 && depth == 2 {
        return json!(true);
    }
    let v = vars.choose(rng).unwrap();
    let value = v.domain.choose(rng).unwrap().clone();
    let op = if v.numeric {
        *["==", "!=", "<", "<=", ">", ">="].choose(rng).unwrap()
    } else {
        *["==", "==", "!="].choose(rng).unwrap()
    };
    json!([op, v.name, value])
}

fn gen_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<Json> {
    let mut w: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
    if w.iter().all(|x| *x == 0) {
        let i = rng.gen_range(0..n);
        w[i] = 1;
    }
    let total: u32 = w.iter().sum();
    let fractions = rng.gen_bool(0.5);
    w.iter()
        .map(|x| {
            if fractions {
                json!(format!("{x}/{total}"))
            } else {
                json!(*x as f64 / total as f64)
            }
        })
        .collect()
}

fn cartesian(domains: &[&[Json]]) -> Vec<Vec<Json>> {
    let mut out = vec![vec![]];
    for d in domains {
        let mut next = Vec::new();
        for prefix in &out {
            for v in d.iter() {
                let mut p = prefix.clone();
                p.push(v.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Generates a valid random scenario and knowledge from `seed`.
pub fn generate(seed: u64, params: GenParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_vars = rng.gen_range(1..=params.max_vars);
    let vars: Vec<Var> = (0..n_vars)
        .map(|i| {
            let size = rng.gen_range(1..=params.max_domain);
            let numeric = rng.gen_bool(0.5);
            let domain = (0..size)
                .map(|j| {
                    if numeric {
                        json!(j as i64)
                    } else {
                        json!(format!("s{j}"))
                    }
                })
                .collect();
            Var {
                name: format!("v{i}"),
                domain,
                numeric,
            }
        })
        .collect();

    // unknown variables: at most max_unknown
    let mut order: Vec<usize> = (0..n_vars).collect();
    order.shuffle(&mut rng);
    let n_unknown = if params.full_knowledge {
        0
    } else {
        rng.gen_range(0..=params.max_unknown.min(n_vars))
    };
    let unknown: Vec<usize> = order[..n_unknown].to_vec();
    let mut knowledge = Map::new();
    for (i, v) in vars.iter().enumerate() {
        if !unknown.contains(&i) {
            knowledge.insert(v.name.clone(), v.domain.choose(&mut rng).unwrap().clone());
        }
    }

    // credences: each variable may condition on earlier variables
    let mut credences = Vec::new();
    for (i, v) in vars.iter().enumerate() {
        let mut parents: Vec<usize> = (0..i).filter(|_| rng.gen_bool(0.3)).collect();
        parents.truncate(2);
        let parent_domains: Vec<&[Json]> = parents.iter().map(|&p| vars[p].domain.as_slice()).collect();
        let rows: Vec<Json> = cartesian(&parent_domains)
            .into_iter()
            .map(|when| {
                let p = gen_distribution(&mut rng, v.domain.len());
                if when.is_empty() {
                    json!({ "p": p })
                } else {
                    json!({ "when": when, "p": p })
                }
            })
            .collect();
        let mut table = json!({ "variable": v.name, "rows": rows });
        if !parents.is_empty() {
            table["given"] = json!(parents.iter().map(|&p| vars[p].name.clone()).collect::<Vec<_>>());
        }
        credences.push(table);
    }

    let n_options = rng.gen_range(1..=params.max_options);
    let options: Vec<String> = (0..n_options).map(|i| format!("a{i}")).collect();

    let mut rules = Vec::new();
    for o in &options {
        for _ in 0..rng.gen_range(0..=2) {
            let n_branches = rng.gen_range(1..=2);
            let ps = gen_distribution(&mut rng, n_branches);
            let outcomes: Vec<Json> = ps
                .into_iter()
                .map(|p| {
                    let mut set = Map::new();
                    for v in vars.iter() {
                        if rng.gen_bool(0.4) {
                            set.insert(v.name.clone(), v.domain.choose(&mut rng).unwrap().clone());
                        }
                    }
                    json!({ "p": p, "set": set })
                })
                .collect();
            rules.push(json!({
                "option": o,
                "when": gen_condition(&mut rng, &vars, 1),
                "outcomes": outcomes,
            }));
        }
    }

    let mut utility = Vec::new();
    if !params.zero_utility {
        for _ in 0..rng.gen_range(0..=3) {
            utility.push(json!({
                "when": gen_condition(&mut rng, &vars, 1),
                "value": rng.gen_range(-10..=10) as f64 / 2.0,
            }));
        }
    }
    utility.push(json!({
        "when": true,
        "value": if params.zero_utility { 0.0 } else { rng.gen_range(-4..=4) as f64 },
    }));

    let n_principles = rng.gen_range(0..=params.max_principles);
    let n_classes = rng.gen_range(1..=params.max_classes).min(n_principles.max(1));
    let mut classes: Vec<Vec<Json>> = vec![Vec::new(); n_classes];
    for i in 0..n_principles {
        // every class gets one principle before classes are drawn at random
        let c = if i < n_classes {
            i
        } else {
            rng.gen_range(0..n_classes)
        };
        let mut opts = options.clone();
        opts.shuffle(&mut rng);
        let mentioned = rng.gen_range(1..=opts.len());
        let mut prefers: Vec<Vec<String>> = Vec::new();
        for o in opts.into_iter().take(mentioned) {
            if prefers.is_empty() || rng.gen_bool(0.5) {
                prefers.push(vec![o]);
            } else {
                prefers.last_mut().unwrap().push(o);
            }
        }
        classes[c].push(json!({
            "id": format!("p{i}"),
            "condition": gen_condition(&mut rng, &vars, 2),
            "prefers": prefers,
        }));
    }
    if n_principles == 0 {
        classes.clear();
    }
    let t = classes.len();

    let relevance = if params.lexicographic {
        json!({ "mode": "lexicographic" })
    } else if params.explicit_weights {
        let mut w: Vec<f64> = Vec::new();
        let mut next = rng.gen_range(1..=4) as f64;
        for _ in 0..t {
            w.push(next);
            next += rng.gen_range(1..=20) as f64 / 2.0;
        }
        w.reverse();
        json!({ "mode": "archimedean", "weights": w })
    } else {
        json!({ "mode": "archimedean", "base": *[2.0, 3.0, 10.0].choose(&mut rng).unwrap() })
    };
    let eu_weight = *[1.0, 1.0, 0.5, 2.0, 0.0].choose(&mut rng).unwrap();

    let doc = json!({
        "schema_version": "1",
        "id": format!("random-{seed}"),
        "variables": vars.iter().map(|v| json!({"name": v.name, "domain": v.domain})).collect::<Vec<_>>(),
        "credences": credences,
        "options": options,
        "outcome": { "unlisted": "self_loop", "rules": rules },
        "utility": utility,
        "principles": classes,
        "engine": { "relevance": relevance, "eu_weight": eu_weight },
    });
    let scenario = parse_scenario(&doc.to_string())
        .unwrap_or_else(|e| panic!("generated scenario {seed} is invalid: {e}\n{doc:#}"));
    let knowledge: Knowledge = serde_json::from_value(Json::Object(knowledge.clone())).unwrap();
    Instance {
        json: doc,
        knowledge_json: knowledge_to_map(&knowledge),
        scenario,
        knowledge,
    }
}

fn knowledge_to_map(k: &Knowledge) -> Map<String, Json> {
    match serde_json::to_value(k).unwrap() {
        Json::Object(m) => m,
        _ => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// Oracles over raw JSON

pub type RawWorld = Vec<Json>;

pub fn var_names(doc: &Json) -> Vec<String> {
    doc["variables"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["name"].as_str().unwrap().to_string())
        .collect()
}

fn domains(doc: &Json) -> Vec<Vec<Json>> {
    doc["variables"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["domain"].as_array().unwrap().clone())
        .collect()
}

/// The full product space `W`, last variable fastest.
pub fn all_worlds(doc: &Json) -> Vec<RawWorld> {
    let ds = domains(doc);
    let refs: Vec<&[Json]> = ds.iter().map(|d| d.as_slice()).collect();
    cartesian(&refs)
}

/// `W_k` by filtering `W`.
pub fn consistent_worlds(doc: &Json, k: &Map<String, Json>) -> Vec<RawWorld> {
    let names = var_names(doc);
    all_worlds(doc)
        .into_iter()
        .filter(|w| {
            names
                .iter()
                .zip(w)
                .all(|(n, v)| k.get(n).is_none_or(|kv| kv == v))
        })
        .collect()
}

fn parse_p(j: &Json) -> f64 {
    match j {
        Json::Number(n) => n.as_f64().unwrap(),
        Json::String(s) => {
            let (a, b) = s.split_once('/').unwrap();
            a.trim().parse::<f64>().unwrap() / b.trim().parse::<f64>().unwrap()
        }
        _ => panic!("bad probability {j}"),
    }
}

/// `P(w|k)`: product of table entries over the unknown variables.
pub fn probability(doc: &Json, k: &Map<String, Json>, w: &RawWorld) -> f64 {
    let names = var_names(doc);
    let ds = domains(doc);
    let mut p = 1.0;
    for (i, name) in names.iter().enumerate() {
        if k.contains_key(name) {
            continue;
        }
        let table = doc["credences"]
            .as_array()
            .unwrap()
            .iter()
            .find(|t| t["variable"] == *name)
            .expect("table for unknown variable");
        let parents: Vec<usize> = table
            .get("given")
            .and_then(Json::as_array)
            .map(|g| {
                g.iter()
                    .map(|n| names.iter().position(|m| m == n.as_str().unwrap()).unwrap())
                    .collect()
            })
            .unwrap_or_default();
        let key: Vec<Json> = parents.iter().map(|&j| w[j].clone()).collect();
        let row = table["rows"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| {
                let when = r
                    .get("when")
                    .and_then(Json::as_array)
                    .cloned()
                    .unwrap_or_default();
                when == key
            })
            .expect("row");
        let idx = ds[i].iter().position(|v| *v == w[i]).unwrap();
        p *= parse_p(&row["p"][idx]);
    }
    p
}

/// Evaluates a prefix-notation condition.
pub fn holds(cond: &Json, names: &[String], w: &RawWorld) -> bool {
    match cond {
        Json::Bool(b) => *b,
        Json::Object(m) => m.iter().all(|(k, v)| {
            let i = names.iter().position(|n| n == k).unwrap();
            w[i] == *v
        }),
        Json::Array(items) => {
            let head = items[0].as_str().unwrap();
            match head {
                "and" => items[1..].iter().all(|c| holds(c, names, w)),
                "or" => items[1..].iter().any(|c| holds(c, names, w)),
                "not" => !holds(&items[1], names, w),
                op => {
                    let i = names
                        .iter()
                        .position(|n| n == items[1].as_str().unwrap())
                        .unwrap();
                    let (a, b) = (&w[i], &items[2]);
                    match op {
                        "==" => a == b,
                        "!=" => a != b,
                        _ => match (a.as_i64(), b.as_i64()) {
                            (Some(x), Some(y)) => match op {
                                "<" => x < y,
                                "<=" => x <= y,
                                ">" => x > y,
                                ">=" => x >= y,
                                _ => panic!("operator {op}"),
                            },
                            _ => false,
                        },
                    }
                }
            }
        }
        _ => panic!("bad condition {cond}"),
    }
}

fn utility(doc: &Json, names: &[String], w: &RawWorld) -> f64 {
    doc["utility"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| holds(&r["when"], names, w))
        .map(|r| r["value"].as_f64().unwrap())
        .expect("total utility")
}

/// `Σ_{w'} Outcome(w, a, w') · U(w')` with self-loops for unlisted pairs.
fn successor_value(doc: &Json, names: &[String], w: &RawWorld, option: &str) -> f64 {
    let rule = doc["outcome"]["rules"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["option"] == option && holds(r.get("when").unwrap_or(&json!(true)), names, w));
    match rule {
        None => utility(doc, names, w),
        Some(r) => r["outcomes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|b| {
                let mut next = w.clone();
                if let Some(set) = b.get("set").and_then(Json::as_object) {
                    for (k, v) in set {
                        let i = names.iter().position(|n| n == k).unwrap();
                        next[i] = v.clone();
                    }
                }
                parse_p(&b["p"]) * utility(doc, names, &next)
            })
            .sum(),
    }
}

pub fn expected_utility(doc: &Json, k: &Map<String, Json>, option: &str) -> f64 {
    let names = var_names(doc);
    consistent_worlds(doc, k)
        .iter()
        .map(|w| probability(doc, k, w) * successor_value(doc, &names, w, option))
        .sum()
}

pub fn options(doc: &Json) -> Vec<String> {
    doc["options"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o.as_str().unwrap().to_string())
        .collect()
}

/// `(rank, principle)` for every principle, rank 1 first.
pub fn principles(doc: &Json) -> Vec<(usize, Json)> {
    doc["principles"]
        .as_array()
        .map(|classes| {
            classes
                .iter()
                .enumerate()
                .flat_map(|(i, c)| c.as_array().unwrap().iter().map(move |p| (i + 1, p.clone())))
                .collect()
        })
        .unwrap_or_default()
}

pub fn n_classes(doc: &Json) -> usize {
    doc["principles"].as_array().map_or(0, |c| c.len())
}

/// Topmost class of the principle's option structure.
pub fn permitted(principle: &Json) -> Vec<String> {
    principle["prefers"][0]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o.as_str().unwrap().to_string())
        .collect()
}

/// One `(world, rank, principle id, P(w|k), perm)` per applying principle.
pub fn case_triples(doc: &Json, k: &Map<String, Json>) -> Vec<(RawWorld, usize, String, f64, Vec<String>)> {
    let names = var_names(doc);
    let mut out = Vec::new();
    for w in consistent_worlds(doc, k) {
        let p = probability(doc, k, &w);
        for (rank, psi) in principles(doc) {
            if holds(&psi["condition"], &names, &w) {
                out.push((
                    w.clone(),
                    rank,
                    psi["id"].as_str().unwrap().to_string(),
                    p,
                    permitted(&psi),
                ));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleDecision {
    pub candidates: Vec<String>,
    /// Force per candidate, tier vector.
    pub forces: Vec<Vec<f64>>,
    pub eus: Vec<f64>,
    pub tie_set: Vec<String>,
    pub chosen: String,
    pub fallback: bool,
}

fn weight(doc: &Json, rank: usize) -> f64 {
    let rel = &doc["engine"]["relevance"];
    let t = n_classes(doc);
    match rel.get("weights").and_then(Json::as_array) {
        Some(ws) => ws[rank - 1].as_f64().unwrap(),
        None => rel
            .get("base")
            .and_then(Json::as_f64)
            .unwrap_or(10.0)
            .powi((t - rank) as i32),
    }
}

fn lexicographic(doc: &Json) -> bool {
    doc["engine"]["relevance"]["mode"] == "lexicographic"
}

/// Indices maximal under tier-by-tier comparison with tolerance.
#[allow(clippy::needless_range_loop)]
pub fn tiered_argmax(scores: &[Vec<f64>]) -> Vec<usize> {
    let mut keep: Vec<usize> = (0..scores.len()).collect();
    let tiers = scores.iter().map(Vec::len).max().unwrap_or(0);
    for t in 0..tiers {
        let best = keep
            .iter()
            .map(|&i| scores[i][t])
            .fold(f64::NEG_INFINITY, f64::max);
        keep.retain(|&i| best - scores[i][t] <= TOL);
    }
    keep
}

pub fn seeded_pick(n: usize, seed: u64) -> usize {
    ChaCha8Rng::seed_from_u64(seed).gen_range(0..n)
}

/// The interlocked decision recomputed from scratch.
pub fn oracle_decide(doc: &Json, k: &Map<String, Json>, seed: u64) -> OracleDecision {
    let opts = options(doc);
    let triples = case_triples(doc, k);
    let lex = lexicographic(doc);
    let t = n_classes(doc);
    let eu_weight = doc["engine"]["eu_weight"].as_f64().unwrap_or(1.0);
    let candidates: Vec<String> = opts
        .iter()
        .filter(|o| triples.iter().any(|(.., perm)| perm.contains(o)))
        .cloned()
        .collect();
    if candidates.is_empty() {
        let eus: Vec<f64> = opts.iter().map(|o| expected_utility(doc, k, o)).collect();
        let best = eus.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tie: Vec<String> = opts
            .iter()
            .zip(&eus)
            .filter(|(_, e)| best - **e <= TOL)
            .map(|(o, _)| o.clone())
            .collect();
        let chosen = tie[seeded_pick(tie.len(), seed)].clone();
        return OracleDecision {
            candidates,
            forces: vec![],
            eus,
            tie_set: tie,
            chosen,
            fallback: true,
        };
    }
    let mut forces = Vec::new();
    let mut eus = Vec::new();
    let mut scores = Vec::new();
    for a in &candidates {
        let mut f = vec![0.0; if lex { t } else { 1 }];
        for (_, rank, _, p, perm) in &triples {
            if perm.contains(a) {
                if lex {
                    f[rank - 1] += p;
                } else {
                    f[0] += p * weight(doc, *rank);
                }
            }
        }
        let eu = expected_utility(doc, k, a);
        let score = if lex {
            let mut s = f.clone();
            s.push(eu_weight * eu);
            s
        } else {
            vec![f[0] + eu_weight * eu]
        };
        forces.push(f);
        eus.push(eu);
        scores.push(score);
    }
    let tie: Vec<String> = tiered_argmax(&scores)
        .into_iter()
        .map(|i| candidates[i].clone())
        .collect();
    let chosen = tie[seeded_pick(tie.len(), seed)].clone();
    OracleDecision {
        candidates,
        forces,
        eus,
        tie_set: tie,
        chosen,
        fallback: false,
    }
}

/// Max-ranked applicable principles in world `w`.
pub fn max_ranked(doc: &Json, w: &RawWorld) -> Vec<Json> {
    let names = var_names(doc);
    let applicable: Vec<(usize, Json)> = principles(doc)
        .into_iter()
        .filter(|(_, p)| holds(&p["condition"], &names, w))
        .collect();
    match applicable.iter().map(|(r, _)| *r).min() {
        Some(top) => applicable
            .into_iter()
            .filter(|(r, _)| *r == top)
            .map(|(_, p)| p)
            .collect(),
        None => vec![],
    }
}

pub fn world_from_library(w: &moralarg_core::WorldState) -> RawWorld {
    w.0.iter().map(|v| serde_json::to_value(v).unwrap()).collect()
}
