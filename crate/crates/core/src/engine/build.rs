use super::config::{EngineConfig, RelevanceConfig};
use super::graph::{
    ArgumentationGraph, CaseArgument, DecisionMode, Edge, FinalArgument, FinalEntry, OptionArgument, Premise,
    PremiseContent, Provenance, Support,
};
use super::pick::pick;
use super::relevance::{argmax_strengths, RelevanceFunction, Strength};
use crate::deontic::{applicable_principles, deontic_filter};
use crate::error::{Error, Result};
use crate::instrumental::{argmax_within, expected_utility_over, instrumental_choice};
use crate::numeric::display;
use crate::scenario::Scenario;
use crate::world::{enumerate_consistent_worlds, world_probability, Knowledge, WorldState};

const FINAL_ID: &str = "decision";

fn option_id(option: &str) -> String {
    format!("option:{option}")
}

fn list(options: &[String]) -> String {
    format!("{{{}}}", options.join(", "))
}

impl RelevanceFunction {
    fn for_scenario(scenario: &Scenario) -> Self {
        RelevanceFunction::new(&scenario.engine.relevance, scenario.principles.num_classes())
    }

    /// `force_overall(a) + eu_weight · EU(a|k)`; in lexicographic mode the
    /// utility term becomes the lowest tier.
    fn combine(&self, force: &Strength, eu_term: f64) -> Strength {
        match self {
            RelevanceFunction::Archimedean { .. } => Strength::scalar(force.0[0] + eu_term),
            RelevanceFunction::Lexicographic { .. } => force.clone().then(eu_term),
        }
    }
}

/// `V1`: one argument per world of `W_k` and principle applying in it,
/// ordered by world, then class rank, then principle id.
pub fn build_case_layer(knowledge: &Knowledge, scenario: &Scenario) -> Result<Vec<CaseArgument>> {
    let worlds = enumerate_consistent_worlds(knowledge, &scenario.variables)?;
    build_cases(
        knowledge,
        &worlds,
        scenario,
        &RelevanceFunction::for_scenario(scenario),
    )
}

fn build_cases(
    knowledge: &Knowledge,
    worlds: &[WorldState],
    scenario: &Scenario,
    relevance: &RelevanceFunction,
) -> Result<Vec<CaseArgument>> {
    let vars = &scenario.variables;
    let options = scenario.options.as_slice();
    let mut cases = Vec::new();
    for world in worlds {
        let p = world_probability(world, knowledge, vars, &scenario.credences)?;
        if scenario.engine.exclude_impossible_cases && p == 0.0 {
            continue;
        }
        let world_text = world.describe(vars);
        for (rank, principle) in applicable_principles(&scenario.principles, vars, world).all {
            let id = format!("case-{}", cases.len() + 1);
            let perm_set = principle.prefers.topmost(options);
            let rel = relevance.relevance(rank);
            let force = relevance.scaled(rank, p);
            let premises = vec![
                Premise {
                    text: format!(
                        "Case [{world_text}] obtains with probability {} given the current knowledge.",
                        display(p)
                    ),
                    content: PremiseContent::CaseFact {
                        world: world.assignment(vars),
                        probability: p,
                    },
                },
                Premise {
                    text: format!(
                        "Principle {} (class {rank}): if {}, rank the options {}.",
                        principle.id,
                        principle.condition,
                        principle.prefers.describe(options)
                    ),
                    content: PremiseContent::Conditional {
                        principle: principle.id.clone(),
                        condition: principle.condition.to_string(),
                        prefers: principle.prefers.clone(),
                    },
                },
                Premise {
                    text: format!("In this case {} permits {}.", principle.id, list(&perm_set)),
                    content: PremiseContent::Permissibility {
                        principle: principle.id.clone(),
                        permitted: perm_set.clone(),
                    },
                },
            ];
            let conclusion = Premise {
                text: format!(
                    "Reason {id} favours {} with pro tanto strength {force} (probability {} times relevance {rel}).",
                    list(&perm_set),
                    display(p)
                ),
                content: PremiseContent::Reason {
                    case: id.clone(),
                    options: perm_set.clone(),
                    strength: force.clone(),
                },
            };
            cases.push(CaseArgument {
                id,
                world: world.clone(),
                principle: principle.id.clone(),
                rank,
                probability: p,
                relevance: rel,
                force,
                perm_set,
                premises,
                conclusion,
            });
        }
    }
    Ok(cases)
}

/// `force_pro_tanto(Arg_ψ^w) = P(w|k) · relevance(ψ)`, recomputed from the
/// credences.
pub fn pro_tanto_force(
    case: &CaseArgument,
    knowledge: &Knowledge,
    scenario: &Scenario,
    relevance: &RelevanceFunction,
) -> Result<Strength> {
    let p = world_probability(&case.world, knowledge, &scenario.variables, &scenario.credences)?;
    let rank = scenario
        .principles
        .rank_of(&case.principle)
        .ok_or_else(|| Error::Contract(format!("unknown principle `{}`", case.principle)))?;
    Ok(relevance.scaled(rank, p))
}

/// `Perm_V1(A)`: options permitted by at least one case argument, in option
/// order.
pub fn candidate_options(cases: &[CaseArgument], options: &[String]) -> Vec<String> {
    options
        .iter()
        .filter(|o| cases.iter().any(|c| c.perm_set.contains(o)))
        .cloned()
        .collect()
}

/// `V2` and `E12`. Each option of `Perm_V1(A)` gets the summed forces of its
/// supporters; every case argument has one edge per permitted option.
pub fn build_aggregation_layer(
    cases: &[CaseArgument],
    options: &[String],
    relevance: &RelevanceFunction,
) -> (Vec<OptionArgument>, Vec<Edge>) {
    let mut args = Vec::new();
    for option in candidate_options(cases, options) {
        let supporters: Vec<&CaseArgument> = cases.iter().filter(|c| c.perm_set.contains(&option)).collect();
        let strength = supporters
            .iter()
            .fold(Strength::zero(relevance.force_tiers()), |acc, c| acc + &c.force);
        let mut premises: Vec<Premise> = supporters
            .iter()
            .map(|c| Premise {
                text: format!("Reason {} favours {option} with strength {}.", c.id, c.force),
                content: PremiseContent::Reason {
                    case: c.id.clone(),
                    options: vec![option.clone()],
                    strength: c.force.clone(),
                },
            })
            .collect();
        let ids: Vec<String> = supporters.iter().map(|c| c.id.clone()).collect();
        premises.push(Premise {
            text: format!(
                "The overall support for {option} is the sum of the strengths of its {} supporting reason{}.",
                ids.len(),
                if ids.len() == 1 { "" } else { "s" }
            ),
            content: PremiseContent::Aggregation {
                option: option.clone(),
                supporters: ids,
            },
        });
        let conclusion = Premise {
            text: format!("Option {option} has overall support {strength}."),
            content: PremiseContent::OverallReason {
                option: option.clone(),
                strength: strength.clone(),
            },
        };
        args.push(OptionArgument {
            id: option_id(&option),
            support: supporters
                .iter()
                .map(|c| Support {
                    case: c.id.clone(),
                    force: c.force.clone(),
                })
                .collect(),
            option,
            strength,
            premises,
            conclusion,
        });
    }
    let edges = cases
        .iter()
        .flat_map(|c| {
            options.iter().filter(|o| c.perm_set.contains(o)).map(|o| Edge {
                from: c.id.clone(),
                to: option_id(o),
                weight: c.force.clone(),
            })
        })
        .collect();
    (args, edges)
}

fn candidate_premise(entry: &FinalEntry) -> Premise {
    Premise {
        text: format!(
            "Option {}: overall support {}, expected utility {}, combined score {}.",
            entry.option,
            entry.force,
            display(entry.eu),
            entry.score
        ),
        content: PremiseContent::Candidate {
            option: entry.option.clone(),
            force: entry.force.clone(),
            eu: entry.eu,
            score: entry.score.clone(),
        },
    }
}

/// The interlocked decision: builds all three layers, maximizes the
/// combined score over `Perm_V1(A)` and picks among the maximizers with
/// `seed`. Without any case argument the choice is instrumental over all
/// options.
pub fn decide(knowledge: &Knowledge, scenario: &Scenario, seed: u64) -> Result<(String, ArgumentationGraph)> {
    let options = scenario.options.as_slice();
    if options.is_empty() {
        return Err(Error::EmptyOptionSet);
    }
    let engine = &scenario.engine;
    let relevance = RelevanceFunction::for_scenario(scenario);
    let worlds = enumerate_consistent_worlds(knowledge, &scenario.variables)?;
    let v1 = build_cases(knowledge, &worlds, scenario, &relevance)?;
    let (v2, e12) = build_aggregation_layer(&v1, options, &relevance);

    let (mode, entries, tie_set, mut premises) = if v2.is_empty() {
        let mut entries = Vec::new();
        let mut eus = Vec::new();
        for option in options {
            let eu = expected_utility_over(option, knowledge, &worlds, scenario)?;
            eus.push(eu);
            entries.push(FinalEntry {
                option: option.clone(),
                force: Strength::zero(relevance.force_tiers()),
                eu,
                score: Strength::scalar(eu),
            });
        }
        let tie: Vec<String> = argmax_within(&eus, engine.tolerance)
            .into_iter()
            .map(|i| options[i].clone())
            .collect();
        let rule = Premise {
            text: format!(
                "No principle applies in any case consistent with the knowledge; pick uniformly among the options of {} with maximal expected utility.",
                list(options)
            ),
            content: PremiseContent::Fallback {
                options: options.to_vec(),
            },
        };
        (DecisionMode::InstrumentalFallback, entries, tie, vec![rule])
    } else {
        let mut entries = Vec::new();
        for arg in &v2 {
            let eu = expected_utility_over(&arg.option, knowledge, &worlds, scenario)?;
            let score = relevance.combine(&arg.strength, engine.eu_weight * eu);
            entries.push(FinalEntry {
                option: arg.option.clone(),
                force: arg.strength.clone(),
                eu,
                score,
            });
        }
        let scores: Vec<Strength> = entries.iter().map(|e| e.score.clone()).collect();
        let tie: Vec<String> = argmax_strengths(&scores, engine.tolerance)
            .into_iter()
            .map(|i| entries[i].option.clone())
            .collect();
        let candidates: Vec<String> = v2.iter().map(|a| a.option.clone()).collect();
        let order = match relevance {
            RelevanceFunction::Archimedean { .. } => "the sum",
            RelevanceFunction::Lexicographic { .. } => "the tier-by-tier comparison",
        };
        let rule = Premise {
            text: format!(
                "Pick uniformly among the options of {} that maximize {order} of overall support and {} times expected utility.",
                list(&candidates),
                display(engine.eu_weight)
            ),
            content: PremiseContent::Maximization {
                candidates,
                eu_weight: engine.eu_weight,
            },
        };
        (DecisionMode::Interlocked, entries, tie, vec![rule])
    };

    let chosen = tie_set[pick(tie_set.len(), seed)].clone();
    let mut all_premises: Vec<Premise> = entries.iter().map(candidate_premise).collect();
    all_premises.append(&mut premises);
    let conclusion = Premise {
        text: format!(
            "Perform {chosen}, picked from {} with seed {seed}.",
            list(&tie_set)
        ),
        content: PremiseContent::Choice {
            option: chosen.clone(),
            tie_set: tie_set.clone(),
            seed,
        },
    };
    let e23 = v2
        .iter()
        .map(|a| Edge {
            from: a.id.clone(),
            to: FINAL_ID.to_string(),
            weight: a.strength.clone(),
        })
        .collect();
    let graph = ArgumentationGraph {
        provenance: Provenance {
            scenario: scenario.id.clone(),
            knowledge: knowledge.clone(),
            timestamp: None,
            engine: engine.clone(),
            mode,
        },
        v1,
        v2,
        v3: FinalArgument {
            id: FINAL_ID.to_string(),
            entries,
            chosen: chosen.clone(),
            tie_set,
            seed,
            premises: all_premises,
            conclusion,
        },
        e12,
        e23,
    };
    Ok((chosen, graph))
}

/// The idealized pipeline: deontic filter on the true world, instrumental
/// argmax over the survivors, seeded pick.
pub fn sequential_decide(
    world: &WorldState,
    knowledge: &Knowledge,
    scenario: &Scenario,
    seed: u64,
) -> Result<String> {
    let vars = &scenario.variables;
    world.check(vars)?;
    let permitted = deontic_filter(
        &scenario.principles,
        scenario.options.as_slice(),
        vars,
        world,
        scenario.engine.dilemma_policy,
    )?;
    let best = instrumental_choice(&permitted, knowledge, scenario)?;
    Ok(best[pick(best.len(), seed)].clone())
}

impl EngineConfig {
    /// The same configuration in lexicographic mode.
    pub fn lexicographic(&self) -> Self {
        EngineConfig {
            relevance: RelevanceConfig::Lexicographic,
            ..self.clone()
        }
    }
}
