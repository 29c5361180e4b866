use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use deploy_htn::{
    generate_problem, parse_plan, parse_problem, render_plan, render_problem, solve_with_stats,
    validate_plan, Difficulty, GeneratorSpec, PlanDialect, Problem, SearchLimits,
};

const TIME_BUDGET_VAR: &str = "DEPLOY_TIME_BUDGET";

/// HTN planner for component-based cloud application deployment.
#[derive(Parser, Debug)]
#[command(name = "deploy-htn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a problem and write the plan.
    Plan(PlanArgs),
    /// Replay a plan strictly against a problem.
    Validate {
        #[arg(short, long, value_name = "FILE")]
        problem: PathBuf,
        #[arg(short = 'l', long = "plan", value_name = "PLANFILE")]
        plan: PathBuf,
    },
    /// Generate a random problem.
    Generate {
        #[arg(long, value_name = "N")]
        components: usize,
        #[arg(long, value_name = "M")]
        ports: usize,
        #[arg(long, value_name = "S")]
        seed: u64,
        #[arg(long, default_value = "medium", value_parser = parse_difficulty)]
        difficulty: Difficulty,
        #[arg(long, default_value_t = 1, value_name = "K")]
        goals: usize,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Print a problem in canonical form.
    Show {
        #[arg(short, long, value_name = "FILE")]
        problem: PathBuf,
    },
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[arg(short, long, value_name = "FILE")]
    problem: PathBuf,
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    max_depth: Option<usize>,
    #[arg(long, value_name = "N")]
    max_instances: Option<usize>,
    #[arg(long, value_name = "N")]
    max_steps: Option<usize>,
    /// Seconds; overrides DEPLOY_TIME_BUDGET.
    #[arg(long, value_name = "SECONDS")]
    time_budget: Option<f64>,
    /// Write instance tokens as i0, i1, ...
    #[arg(long)]
    numeric_ids: bool,
}

fn parse_difficulty(s: &str) -> Result<Difficulty, String> {
    s.parse()
}

fn parse_seconds(s: &str) -> Result<Duration, String> {
    let secs: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number of seconds"))?;
    Duration::try_from_secs_f64(secs)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| format!("time budget must be positive, got `{s}`"))
}

/// Exit codes.
enum Fail {
    /// No plan, or the plan is invalid.
    Negative,
    /// Unreadable or malformed input.
    Input(String),
    Internal(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Negative => 1,
            Fail::Input(_) => 2,
            Fail::Internal(_) => 3,
        }
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<Problem, Fail> {
    parse_problem(&read(path)?).map_err(|e| Fail::Input(format!("{}:{e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Fail> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| Fail::Internal(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn plan(args: &PlanArgs) -> Result<(), Fail> {
    let problem = load_problem(&args.problem)?;
    let mut limits = SearchLimits::default();
    if let Ok(v) = std::env::var(TIME_BUDGET_VAR) {
        limits.time_budget =
            parse_seconds(&v).map_err(|e| Fail::Input(format!("{TIME_BUDGET_VAR}: {e}")))?;
    }
    if let Some(secs) = args.time_budget {
        limits.time_budget = parse_seconds(&secs.to_string()).map_err(Fail::Input)?;
    }
    limits.max_depth = args.max_depth.unwrap_or(limits.max_depth);
    limits.max_instances_per_component = args
        .max_instances
        .unwrap_or(limits.max_instances_per_component);
    limits.max_plan_length = args.max_steps.unwrap_or(limits.max_plan_length);
    if let Err(e) = limits.validate() {
        return Err(Fail::Input(e.to_string()));
    }

    let dialect = if args.numeric_ids {
        PlanDialect::Numeric
    } else if !problem.has_unique_initials() {
        eprintln!("warning: component initials are not distinct; writing numeric instance ids");
        PlanDialect::Numeric
    } else {
        PlanDialect::Initials
    };

    let start = Instant::now();
    let outcome = solve_with_stats(&problem, &limits);
    eprintln!("{} in {:?}", outcome.stats, start.elapsed());
    match outcome.result {
        Ok(plan) => {
            let verdict = validate_plan(&problem, &plan);
            if let Some(v) = verdict.first_violation {
                return Err(Fail::Internal(format!(
                    "planner produced an invalid plan: {}",
                    v.description
                )));
            }
            eprintln!("plan found ({} steps)", plan.len());
            emit(
                &render_plan(&plan, &problem, dialect),
                args.output.as_deref(),
            )
        }
        Err(failure) => {
            eprintln!("no plan: {failure}");
            Err(Fail::Negative)
        }
    }
}

fn validate(problem: &Path, plan_path: &Path) -> Result<(), Fail> {
    let problem = load_problem(problem)?;
    let plan = parse_plan(&read(plan_path)?, &problem)
        .map_err(|e| Fail::Input(format!("{}:{e}", plan_path.display())))?;
    let verdict = validate_plan(&problem, &plan);
    match verdict.first_violation {
        None => {
            println!("valid ({} steps)", plan.len());
            Ok(())
        }
        Some(v) => {
            match v.step {
                Some(step) => println!("invalid: step {step}: {}", v.description),
                None => println!("invalid: {}", v.description),
            }
            Err(Fail::Negative)
        }
    }
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.command {
        Command::Plan(args) => plan(&args),
        Command::Validate { problem, plan } => validate(&problem, &plan),
        Command::Generate {
            components,
            ports,
            seed,
            difficulty,
            goals,
            output,
        } => {
            let spec = GeneratorSpec {
                goal_count: goals,
                ..GeneratorSpec::preset(difficulty, components, ports, seed)
            };
            let problem = generate_problem(&spec).map_err(|e| Fail::Input(e.to_string()))?;
            emit(&render_problem(&problem), output.as_deref())
        }
        Command::Show { problem } => emit(&render_problem(&load_problem(&problem)?), None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(fail)) => {
            match &fail {
                Fail::Negative => {}
                Fail::Input(msg) => eprintln!("error: {msg}"),
                Fail::Internal(msg) => eprintln!("internal error: {msg}"),
            }
            ExitCode::from(fail.code())
        }
        Err(_) => ExitCode::from(3),
    }
}
