//! `moralarg`: validate scenarios, make single explained decisions, render
//! saved explanations and run the care-robot simulation.
//!
//! Exit codes: 0 success, 1 invalid input, 2 usage error (including
//! unreadable files), 3 true moral dilemma under the `error` policy.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use moralarg_core::engine::{decide, sequential_decide};
use moralarg_core::explain::{parse_graph_json, render, RenderFormat};
use moralarg_core::robot::{episode_seeds, run_episode, EpisodeConfig, Metrics, Policy};
use moralarg_core::{
    parse_scenario, validate_scenario, Error, Knowledge, Scenario, ScenarioError, WorldState,
};

#[derive(Debug, Parser)]
#[command(
    name = "moralarg",
    version,
    about = "Argumentation-based ethical decisions under uncertainty"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a scenario file and print every error and warning with its path.
    Validate { scenario: PathBuf },
    /// Decide from partial knowledge and print the chosen option.
    Decide {
        scenario: PathBuf,
        /// JSON object of known variable values; nothing is known when omitted.
        #[arg(long)]
        knowledge: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use lexicographic relevance regardless of the scenario setting.
        #[arg(long)]
        lexicographic: bool,
        /// Full true world; switches to the filter-then-maximize procedure,
        /// which produces no graph.
        #[arg(long, conflicts_with_all = ["graph_json", "dot", "text"])]
        world: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        graph_json: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        text: Option<PathBuf>,
    },
    /// Render a saved graph-JSON explanation.
    Explain {
        graph: PathBuf,
        /// text, dot or graph-json.
        #[arg(long, default_value = "text")]
        format: RenderFormat,
        /// Write to a file instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run one care-robot episode and print its trace and metrics.
    Simulate {
        /// Episode configuration; the dilemma-rich defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "interlocked")]
        policy: Policy,
        #[arg(long, default_value_t = 100)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the JSONL trace here instead of standard output.
        #[arg(long, value_name = "PATH")]
        trace: Option<PathBuf>,
    },
    /// Run every policy over the same seeded episodes and tabulate metrics.
    Compare {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        episodes: usize,
        #[arg(long, default_value_t = 100)]
        steps: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Print one JSON object keyed by policy instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Usage(String),
    Dilemma(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Dilemma(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) | Failure::Usage(m) | Failure::Dilemma(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Dilemma { .. } => Failure::Dilemma(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = read(path)?;
    parse_scenario(&text).map_err(|e| match e {
        ScenarioError::Invalid(report) => {
            Failure::Invalid(format!("{}: invalid scenario\n{report}", path.display()))
        }
        other => Failure::Invalid(format!("{}: {other}", path.display())),
    })
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, Failure> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Invalid(format!("{}: bad {what}: {e}", path.display())))
}

fn load_episode_config(path: Option<&Path>) -> Result<EpisodeConfig, Failure> {
    match path {
        Some(p) => load_json(p, "episode configuration"),
        None => Ok(EpisodeConfig::dilemma_rich()),
    }
}

fn validate(path: &Path) -> Outcome {
    let text = read(path)?;
    let scenario = match Scenario::from_json_unchecked(&text) {
        Ok(s) => s,
        Err(e) => return Err(Failure::Invalid(format!("{}: {e}", path.display()))),
    };
    let report = validate_scenario(&scenario);
    print!("{report}");
    let errors = report.errors().count();
    let warnings = report.warnings().count();
    println!("{}: {errors} error(s), {warnings} warning(s)", path.display());
    if report.is_clean() {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("{} is invalid", path.display())))
    }
}

struct DecideArgs {
    scenario: PathBuf,
    knowledge: Option<PathBuf>,
    seed: u64,
    lexicographic: bool,
    world: Option<PathBuf>,
    graph_json: Option<PathBuf>,
    dot: Option<PathBuf>,
    text: Option<PathBuf>,
}

fn run_decide(args: DecideArgs) -> Outcome {
    let mut scenario = load_scenario(&args.scenario)?;
    if args.lexicographic {
        scenario.engine = scenario.engine.lexicographic();
    }
    let knowledge: Knowledge = match &args.knowledge {
        Some(p) => load_json(p, "knowledge")?,
        None => Knowledge::new(),
    };
    knowledge.validate(&scenario.variables)?;

    if let Some(path) = &args.world {
        let assignment = load_json(path, "world")?;
        let world = WorldState::from_assignment(&scenario.variables, &assignment)?;
        if !knowledge.is_consistent(&world, &scenario.variables) {
            return Err(Failure::Invalid("the world contradicts the knowledge".into()));
        }
        println!("{}", sequential_decide(&world, &knowledge, &scenario, args.seed)?);
        return Ok(());
    }

    let (chosen, graph) = decide(&knowledge, &scenario, args.seed)?;
    // Saved files hold the graph as it reads back, so rendering a saved
    // graph later reproduces them byte for byte.
    let graph = graph.rounded();
    let outputs = [
        (&args.graph_json, RenderFormat::GraphJson),
        (&args.dot, RenderFormat::Dot),
        (&args.text, RenderFormat::Text),
    ];
    for (path, format) in outputs {
        if let Some(path) = path {
            write(path, &render(&graph, format))?;
        }
    }
    println!("{chosen}");
    Ok(())
}

fn explain(path: &Path, format: RenderFormat, output: Option<&Path>) -> Outcome {
    let text = read(path)?;
    let graph = parse_graph_json(&text).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    let rendered = render(&graph, format);
    match output {
        Some(out) => write(out, &rendered),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn episode_failure(e: moralarg_core::robot::EpisodeError) -> Failure {
    use moralarg_core::robot::EpisodeError;
    match e {
        EpisodeError::Engine(inner) => Failure::from(inner),
        EpisodeError::NoSteps => Failure::Usage(e.to_string()),
        other => Failure::Invalid(other.to_string()),
    }
}

fn simulate(config: Option<&Path>, policy: Policy, steps: u64, seed: u64, trace: Option<&Path>) -> Outcome {
    let config = load_episode_config(config)?;
    let result = run_episode(&config, policy, steps, seed).map_err(episode_failure)?;
    let jsonl = result.trace_jsonl();
    match trace {
        Some(path) => write(path, &jsonl)?,
        None => print!("{jsonl}"),
    }
    print!("{}", metrics_table(&[(policy, result.metrics)]));
    Ok(())
}

/// Episodes run in parallel; metrics are merged in seed order so the sums
/// do not depend on scheduling.
fn compare(config: Option<&Path>, episodes: usize, steps: u64, seed: u64, json: bool) -> Outcome {
    if episodes == 0 {
        return Err(Failure::Usage("--episodes must be at least 1".into()));
    }
    let config = load_episode_config(config)?;
    let seeds = episode_seeds(seed, episodes);
    let jobs: Vec<(Policy, u64)> = Policy::ALL
        .iter()
        .flat_map(|&p| seeds.iter().map(move |&s| (p, s)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(p, s)| run_episode(&config, p, steps, s).map(|r| r.metrics))
        .collect::<Result<Vec<_>, _>>()
        .map_err(episode_failure)?;
    let results: Vec<(Policy, Metrics)> = Policy::ALL
        .iter()
        .zip(runs.chunks(episodes))
        .map(|(&p, chunk)| {
            let mut total = Metrics::default();
            for m in chunk {
                total.merge(m);
            }
            (p, total)
        })
        .collect();
    if json {
        let doc: serde_json::Map<String, serde_json::Value> = results
            .iter()
            .map(|(p, m)| (p.to_string(), serde_json::to_value(m).expect("metrics serialize")))
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("metrics serialize")
        );
    } else {
        print!("{}", metrics_table(&results));
    }
    Ok(())
}

type Row = (&'static str, fn(&Metrics) -> String);

fn metrics_table(results: &[(Policy, Metrics)]) -> String {
    let rows: [Row; 13] = [
        ("episodes", |m| m.episodes.to_string()),
        ("steps", |m| m.steps.to_string()),
        ("requests", |m| m.requests.to_string()),
        ("served (high priority)", |m| m.served_high.to_string()),
        ("served (low priority)", |m| m.served_low.to_string()),
        ("declined", |m| m.declined.to_string()),
        ("missed", |m| m.missed.to_string()),
        ("tracked requested", |m| m.tracked_requested.to_string()),
        ("tracked attempted", |m| m.tracked_attempted.to_string()),
        ("tracked missed", |m| m.tracked_missed.to_string()),
        ("depletions", |m| m.depletions.to_string()),
        ("total reward", |m| format!("{:.2}", m.total_reward)),
        ("reward per episode", |m| {
            format!("{:.2}", m.total_reward / m.episodes.max(1) as f64)
        }),
    ];
    let label_width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|(_, f)| results.iter().map(|(_, m)| f(m)).collect())
        .collect();
    let widths: Vec<usize> = results
        .iter()
        .enumerate()
        .map(|(i, (p, _))| {
            cells
                .iter()
                .map(|r| r[i].len())
                .chain([p.to_string().len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = format!("{:label_width$}", "metric");
    for ((p, _), w) in results.iter().zip(&widths) {
        out += &format!("  {:>w$}", p.to_string());
    }
    out.push('\n');
    for ((label, _), row) in rows.iter().zip(&cells) {
        out += &format!("{label:label_width$}");
        for (cell, w) in row.iter().zip(&widths) {
            out += &format!("  {cell:>w$}");
        }
        out.push('\n');
    }
    out
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { scenario } => validate(&scenario),
        Command::Decide {
            scenario,
            knowledge,
            seed,
            lexicographic,
            world,
            graph_json,
            dot,
            text,
        } => run_decide(DecideArgs {
            scenario,
            knowledge,
            seed,
            lexicographic,
            world,
            graph_json,
            dot,
            text,
        }),
        Command::Explain {
            graph,
            format,
            output,
        } => explain(&graph, format, output.as_deref()),
        Command::Simulate {
            config,
            policy,
            steps,
            seed,
            trace,
        } => simulate(config.as_deref(), policy, steps, seed, trace.as_deref()),
        Command::Compare {
            config,
            episodes,
            steps,
            seed,
            json,
        } => compare(config.as_deref(), episodes, steps, seed, json),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors by itself.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("moralarg: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
