//! Command-line front end.
//!
//! Exit codes: 0 success (including an explained or reconciled analysis),
//! 2 usage error, 3 parse/validation error, 4 budget exceeded or
//! inconclusive, 5 internal invariant violation.

mod reports;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hxplain_core::explain::{
    compute_waypoints, explain_unsolvability, reach_subproblem, ExplainOptions, Outcome,
    ReachOutcome, WaypointsOutcome,
};
use hxplain_core::graph::{
    abstract_graph, AbstractPath, PathEnumerator, PathMode, DEFAULT_PATH_BUDGET,
};
use hxplain_core::encode::{check_path, PathFeasibility};
use hxplain_core::model::validate_problem;
use hxplain_core::reconcile::{reconcile, ModelPair};
use hxplain_core::subseq::{lcs_multi_exact, DEFAULT_DP_BUDGET};
use hxplain_io::{
    generate_benchmark, parse_model, parse_model_unchecked, serialize_model, BenchmarkSpec,
    Family, ModelDocument, View,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hxplain",
    about = "Explains why bounded planning problems on linear hybrid automata have no plan",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Walks,
    Simple,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ViewArg {
    Agent,
    Human,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    /// The model's goal set.
    Goal,
    /// The final location's invariant.
    Inv,
}

#[derive(Args)]
struct RunFlags {
    /// Override the model's depth bound.
    #[arg(long)]
    depth: Option<usize>,
    /// Path enumeration semantics.
    #[arg(long, value_enum, default_value = "walks")]
    mode: ModeArg,
    /// Cap on enumerated paths (default 1000000; env HXPLAIN_BUDGET).
    #[arg(long)]
    budget: Option<usize>,
    /// Worker threads for path feasibility checks; never changes results.
    #[arg(long, default_value = "1")]
    jobs: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the waypoint chain and the first unreachable waypoint.
    Explain {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Reconcile a human model against an agent model.
    Reconcile {
        #[arg(long)]
        human: PathBuf,
        #[arg(long)]
        agent: PathBuf,
        /// Also write the updated human model (invalid edges removed) here.
        #[arg(long)]
        updated_human: Option<PathBuf>,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Print the bounded path strings between two locations.
    Paths {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value = "walks")]
        mode: ModeArg,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Print the common location subsequence of all bounded paths.
    Lcs {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        /// Require the exact multi-sequence DP (error if over budget).
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Check one path: witness plan or infeasible segment.
    CheckPath {
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated alternating locations and edges: "l7,e8^7,l8,...".
        #[arg(long)]
        path: String,
        #[arg(long, value_enum, default_value = "goal")]
        target: TargetArg,
    },
    /// Bounded reachability of one location's invariant.
    Reach {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        loc: String,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value = "1")]
        jobs: usize,
    },
    /// Generate a benchmark model (plus a layout sidecar).
    Gen {
        #[arg(long)]
        bench: String,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, value_enum, default_value = "agent")]
        view: ViewArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the validation report for a model file.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
}

enum CliError {
    Usage(String),
    Parse(String),
    Budget(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Internal(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Budget(m) | CliError::Internal(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success exits.
            if e.exit_code() == 0 {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn mode_of(m: ModeArg) -> PathMode {
    match m {
        ModeArg::Walks => PathMode::Walks,
        ModeArg::Simple => PathMode::Simple,
    }
}

fn budget_of(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("HXPLAIN_BUDGET").ok().and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_PATH_BUDGET)
}

fn load_model(path: &Path) -> Result<ModelDocument, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn model_name(doc: &ModelDocument, path: &Path) -> String {
    doc.metadata
        .get("name")
        .cloned()
        .unwrap_or_else(|| path.display().to_string())
}

fn emit(report: serde_json::Value, format: FormatArg, out: Option<&Path>) -> Result<(), CliError> {
    let text = match format {
        FormatArg::Json => reports::to_canonical_string(&report),
        FormatArg::Text => reports::render_text(&report),
    };
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_path_arg(spec: &str) -> Result<AbstractPath, CliError> {
    let tokens: Vec<&str> = spec.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if tokens.is_empty() || tokens.len() % 2 == 0 {
        return Err(CliError::Usage(
            "path must alternate locations and edges: l7,e8^7,l8,...".into(),
        ));
    }
    let mut locations = Vec::new();
    let mut edges = Vec::new();
    for (i, tok) in tokens.iter().enumerate() {
        if i % 2 == 0 {
            locations.push(tok.to_string());
        } else {
            edges.push(tok.to_string());
        }
    }
    Ok(AbstractPath { locations, edges })
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Explain { model, flags } => {
            let doc = load_model(&model)?;
            let mut problem = doc.problem.clone();
            if let Some(d) = flags.depth {
                problem.depth = d;
            }
            let opts = ExplainOptions {
                mode: mode_of(flags.mode),
                path_budget: budget_of(flags.budget),
                dp_budget: DEFAULT_DP_BUDGET,
                jobs: flags.jobs.max(1),
            };
            let report = explain_unsolvability(&problem, &opts)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            let inconclusive = report.outcome == Outcome::Inconclusive;
            let json = reports::explain_json(
                reports::problem_json(&model_name(&doc, &model), &problem),
                &report,
            );
            emit(json, flags.format, flags.out.as_deref())?;
            Ok(if inconclusive { ExitCode::from(4) } else { ExitCode::SUCCESS })
        }
        Command::Reconcile { human, agent, updated_human, flags } => {
            let human_doc = load_model(&human)?;
            let agent_doc = load_model(&agent)?;
            let mut pair = ModelPair {
                human: human_doc.problem.clone(),
                agent: agent_doc.problem.clone(),
            };
            if let Some(d) = flags.depth {
                pair.human.depth = d;
                pair.agent.depth = d;
            }
            pair.validate().map_err(|e| CliError::Parse(e.to_string()))?;
            let report = reconcile(&pair, budget_of(flags.budget)).map_err(|e| match e {
                hxplain_core::reconcile::ReconcileError::PathBudgetExceeded(n) => {
                    CliError::Budget(format!("path budget exceeded after {n} paths"))
                }
                other => CliError::Internal(other.to_string()),
            })?;
            if let Some(path) = updated_human {
                let mut updated = human_doc.clone();
                updated.problem = report.updated_human.clone();
                updated
                    .metadata
                    .insert("updated_by".into(), "reconciliation".into());
                for (i, seg) in report.iis_segments.iter().enumerate() {
                    updated
                        .metadata
                        .insert(format!("unusable_segment_{i}"), seg.segment.render());
                }
                std::fs::write(&path, serialize_model(&updated))
                    .map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display())))?;
            }
            let json = reports::reconcile_json(
                reports::problem_json(&model_name(&human_doc, &human), &pair.human),
                reports::problem_json(&model_name(&agent_doc, &agent), &pair.agent),
                &report,
            );
            emit(json, flags.format, flags.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Paths { model, from, to, depth, mode, budget } => {
            let doc = load_model(&model)?;
            let g = abstract_graph(&doc.problem.automaton);
            let enumerator = PathEnumerator::new(
                &g,
                &from,
                &to,
                depth,
                mode_of(mode),
                None,
                budget_of(budget),
            );
            let mut out = String::new();
            for item in enumerator {
                match item {
                    Ok(path) => {
                        out.push_str(&path.path_string().join(" "));
                        out.push('\n');
                    }
                    Err(_) => return Err(CliError::Budget("path budget exceeded".into())),
                }
            }
            print!("{out}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Lcs { model, depth, exact, budget } => {
            let doc = load_model(&model)?;
            let mut problem = doc.problem.clone();
            if let Some(d) = depth {
                problem.depth = d;
            }
            let opts = ExplainOptions {
                path_budget: budget_of(budget),
                ..ExplainOptions::default()
            };
            match compute_waypoints(&problem, &opts).map_err(|e| CliError::Internal(e.to_string()))? {
                WaypointsOutcome::DiscreteUnsolvable => {
                    println!("no path between the initial and goal locations");
                    Ok(ExitCode::SUCCESS)
                }
                WaypointsOutcome::PathBudgetExceeded => {
                    Err(CliError::Budget("path budget exceeded".into()))
                }
                WaypointsOutcome::Chain { chain, stats } => {
                    if exact && !stats.lcs_exact {
                        // Redo with the exact DP only; report the failure as
                        // a budget outcome instead of silently falling back.
                        let g = abstract_graph(&problem.automaton);
                        let visits = (!problem.required_visits.is_empty())
                            .then(|| problem.required_visits.clone());
                        let mut strings = Vec::new();
                        for item in PathEnumerator::new(
                            &g,
                            &problem.init.location,
                            &problem.goal.location,
                            problem.depth,
                            PathMode::Walks,
                            visits,
                            opts.path_budget,
                        ) {
                            strings.push(
                                item.map_err(|_| CliError::Budget("path budget exceeded".into()))?
                                    .path_string(),
                            );
                        }
                        strings.sort();
                        strings.dedup();
                        let exact_seq = lcs_multi_exact(&strings, DEFAULT_DP_BUDGET)
                            .map_err(|e| CliError::Budget(e.to_string()))?;
                        println!("lcs: {}", exact_seq.join(" "));
                        println!("exact: true");
                    } else {
                        println!("lcs: {}", chain.provenance.join(" "));
                        println!("exact: {}", stats.lcs_exact);
                    }
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::CheckPath { model, path, target } => {
            let doc = load_model(&model)?;
            let p = &doc.problem;
            let abstract_path = parse_path_arg(&path)?;
            let target_rows = match target {
                TargetArg::Goal => p.goal.constraints.clone(),
                TargetArg::Inv => {
                    let last = abstract_path
                        .locations
                        .last()
                        .ok_or_else(|| CliError::Usage("empty path".into()))?;
                    p.automaton
                        .location(last)
                        .ok_or_else(|| CliError::Parse(format!("unknown location {last}")))?
                        .invariant
                        .clone()
                }
            };
            match check_path(p, &abstract_path, &target_rows)
                .map_err(|e| CliError::Parse(e.to_string()))?
            {
                PathFeasibility::FeasibleRun { plan, .. } => {
                    println!("feasible");
                    println!("makespan: {}", hxplain_io::format_rat(&plan.makespan));
                    for (t, a) in &plan.steps {
                        println!("  t={}: {}", hxplain_io::format_rat(t), a);
                    }
                }
                PathFeasibility::InfeasiblePath { iis, segment } => {
                    println!("infeasible");
                    println!("segment: {}", segment.render());
                    println!("iis size: {}", iis.indices.len());
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Reach { model, loc, budget, jobs } => {
            let doc = load_model(&model)?;
            let opts = ExplainOptions {
                path_budget: budget_of(budget),
                jobs: jobs.max(1),
                ..ExplainOptions::default()
            };
            if doc.problem.automaton.location(&loc).is_none() {
                return Err(CliError::Parse(format!("unknown location {loc}")));
            }
            match reach_subproblem(&doc.problem, &loc, &opts)
                .map_err(|e| CliError::Internal(e.to_string()))?
            {
                ReachOutcome::Reachable { path, plan, .. } => {
                    println!("reachable");
                    println!("path: {}", path.path_string().join(" "));
                    println!("makespan: {}", hxplain_io::format_rat(&plan.makespan));
                    Ok(ExitCode::SUCCESS)
                }
                ReachOutcome::Unreachable { paths_checked } => {
                    println!("unreachable ({paths_checked} paths checked)");
                    Ok(ExitCode::SUCCESS)
                }
                ReachOutcome::Budget { reason } => Err(CliError::Budget(reason)),
            }
        }
        Command::Gen { bench, rows, cols, depth, view, out } => {
            let family = Family::from_name(&bench)
                .ok_or_else(|| CliError::Usage(format!("unknown benchmark family `{bench}`")))?;
            let spec = BenchmarkSpec {
                family,
                rows,
                cols,
                depth,
                view: match view {
                    ViewArg::Agent => View::Agent,
                    ViewArg::Human => View::Human,
                },
            };
            let (doc, layout) =
                generate_benchmark(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
            std::fs::write(&out, serialize_model(&doc))
                .map_err(|e| CliError::Internal(format!("writing {}: {e}", out.display())))?;
            let layout_path = sidecar_path(&out);
            std::fs::write(&layout_path, layout)
                .map_err(|e| CliError::Internal(format!("writing {}: {e}", layout_path.display())))?;
            println!("wrote {} and {}", out.display(), layout_path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { model } => {
            let text = std::fs::read_to_string(&model)
                .map_err(|e| CliError::Parse(format!("{}: {e}", model.display())))?;
            let doc = parse_model_unchecked(&text)
                .map_err(|e| CliError::Parse(format!("{}: {e}", model.display())))?;
            let report = validate_problem(&doc.problem);
            print!("{report}");
            if report.is_valid() {
                println!();
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(3))
            }
        }
    }
}

fn sidecar_path(model_path: &Path) -> PathBuf {
    let name = model_path.file_name().and_then(|s| s.to_str()).unwrap_or("model");
    let stem = name.strip_suffix(".lhap.json").unwrap_or(name);
    model_path.with_file_name(format!("{stem}.layout.txt"))
}
