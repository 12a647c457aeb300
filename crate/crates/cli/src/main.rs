use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use isaplan_core::bench::{run_bench, BenchConfig, BenchGoal, Mode};
use isaplan_core::io::{
    demo_model, generate_permutation_goals, generate_ring_layout, load_goal_model, load_production_model,
    save_goal_model, save_integrated_model, save_production_model,
};
use isaplan_core::pddl::{parse_domain, parse_plan, parse_problem};
use isaplan_core::pipeline::{run_pipeline, PipelineOptions, Solver};
use isaplan_core::planner::{ground, validate_plan, Budget, Heuristic};

#[derive(Parser)]
#[command(name = "isaplan", version, about = "Plan shuttle movements for ISA-95 production models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate a model and goals to PDDL, solve, and write the integrated model.
    Pipeline(PipelineArgs),
    /// Solve the reversal task on generated ring layouts and print CSV rows.
    Bench(BenchArgs),
    /// Write one goal file per non-identity shuttle arrangement.
    Permutations {
        model: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Write a generated layout (or the built-in demo) as a model file.
    GenLayout {
        /// Number of positioning units; omit for the five-unit demo.
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 0.65)]
        load_factor: f64,
        #[arg(long)]
        with_drilling: bool,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Check a model and goals, or a plan against PDDL domain and problem files.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Blind,
    Hmax,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Optimal,
    Greedy,
}

#[derive(Args)]
struct SolverArgs {
    /// Per-goal wall-clock limit in seconds.
    #[arg(long, default_value_t = 300.0)]
    timeout: f64,
    #[arg(long, value_enum, default_value = "hmax")]
    heuristic: HeuristicArg,
    #[arg(long, value_enum, default_value = "optimal")]
    mode: ModeArg,
}

impl SolverArgs {
    fn budget(&self) -> Result<Budget> {
        let time_limit = Duration::try_from_secs_f64(self.timeout)
            .ok()
            .filter(|d| !d.is_zero())
            .with_context(|| format!("invalid timeout {}", self.timeout))?;
        Ok(Budget { time_limit, max_nodes: None })
    }

    fn heuristic(&self) -> Heuristic {
        match self.heuristic {
            HeuristicArg::Blind => Heuristic::Blind,
            HeuristicArg::Hmax => Heuristic::Hmax,
        }
    }
}

#[derive(Args)]
struct PipelineArgs {
    model: PathBuf,
    goals: Vec<PathBuf>,
    /// Integrated model output file.
    #[arg(short, long)]
    out: PathBuf,
    /// Write domain, problem and plan texts into this directory.
    #[arg(long, value_name = "DIR")]
    emit_pddl: Option<PathBuf>,
    /// Solve from previously emitted PDDL texts in this directory.
    #[arg(long, value_name = "DIR")]
    use_emitted: Option<PathBuf>,
    /// External planner command; `{domain}`, `{problem}` and `{plan}` are replaced by file paths.
    #[arg(long, value_name = "TEMPLATE")]
    solver_cmd: Option<String>,
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [5, 7, 9])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0.65)]
    load_factor: f64,
    #[arg(long)]
    with_drilling: bool,
    /// Keep every shuttle in place instead of reversing the order.
    #[arg(long)]
    identity: bool,
    /// CSV output file; defaults to stdout.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct ValidateArgs {
    /// Production model to check.
    #[arg(long, required_unless_present = "plan")]
    model: Option<PathBuf>,
    /// Goal files checked against the model.
    #[arg(requires = "model")]
    goals: Vec<PathBuf>,
    #[arg(long, requires_all = ["domain", "problem"])]
    plan: Option<PathBuf>,
    #[arg(long)]
    domain: Option<PathBuf>,
    #[arg(long)]
    problem: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn cmd_pipeline(args: PipelineArgs) -> Result<()> {
    let model = load_production_model(&args.model)?;
    let goals = args
        .goals
        .iter()
        .map(|p| load_goal_model(p, &model).with_context(|| format!("goal {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    let solver = match (&args.solver_cmd, args.solver.mode) {
        (Some(cmd), _) => Solver::External(cmd.clone()),
        (None, ModeArg::Optimal) => Solver::Astar(args.solver.heuristic()),
        (None, ModeArg::Greedy) => Solver::Greedy,
    };
    let options = PipelineOptions {
        solver,
        budget: args.solver.budget()?,
        parallel: args.parallel,
        emit_dir: args.emit_pddl,
        use_emitted: args.use_emitted,
    };
    let start = Instant::now();
    let output = run_pipeline(&model, &goals, &options)?;
    for o in &output.outcomes {
        let cost = o.cost.map_or_else(|| "-".into(), |c| c.to_string());
        let steps = o.steps.map_or_else(|| "-".into(), |c| c.to_string());
        println!(
            "{:<24} {:<10} cost={:<6} steps={:<4} time={:.3}s expanded={}",
            o.goal_id,
            o.status,
            cost,
            steps,
            o.statistics.wall_time.as_secs_f64(),
            o.statistics.expanded
        );
    }
    save_integrated_model(&output.integrated, &args.out)?;
    let solved = output.integrated.operations_definitions.iter().filter(|r| r.solvable).count();
    println!(
        "{solved}/{} goals solved in {:.3}s; wrote {}",
        goals.len(),
        start.elapsed().as_secs_f64(),
        args.out.display()
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let config = BenchConfig {
        load_factor: args.load_factor,
        mode: match args.solver.mode {
            ModeArg::Optimal => Mode::Optimal,
            ModeArg::Greedy => Mode::Greedy,
        },
        heuristic: args.solver.heuristic(),
        with_drilling: args.with_drilling,
        goal: if args.identity { BenchGoal::Identity } else { BenchGoal::Reverse },
        budget: args.solver.budget()?,
    };
    let sink: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    // One size at a time so rows appear as soon as they are ready.
    for &size in &args.sizes {
        for row in run_bench(&[size], &config)? {
            writer.serialize(row)?;
        }
        writer.flush()?;
    }
    Ok(())
}

fn cmd_permutations(model: &Path, out: &Path) -> Result<()> {
    let model = load_production_model(model)?;
    let goals = generate_permutation_goals(&model)?;
    if goals.is_empty() {
        eprintln!("warning: fewer than two shuttles, no permutation goals written");
        return Ok(());
    }
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    for g in &goals {
        save_goal_model(g, out.join(format!("{}.json", g.id)))?;
        println!("{}", g.id.trim_start_matches("goal-"));
    }
    eprintln!("wrote {} goal files to {}", goals.len(), out.display());
    Ok(())
}

fn cmd_gen_layout(size: Option<usize>, load_factor: f64, with_drilling: bool, out: &Path) -> Result<()> {
    let model = match size {
        Some(n) => generate_ring_layout(n, load_factor, with_drilling)?,
        None if with_drilling => bail!("--with-drilling requires --size"),
        None => demo_model(),
    };
    save_production_model(&model, out)?;
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    if let Some(path) = &args.model {
        let model = load_production_model(path)?;
        println!("{}: ok", path.display());
        for g in &args.goals {
            load_goal_model(g, &model).with_context(|| format!("goal {}", g.display()))?;
            println!("{}: ok", g.display());
        }
    }
    if let (Some(plan), Some(domain), Some(problem)) = (&args.plan, &args.domain, &args.problem) {
        let domain = parse_domain(&read(domain)?).with_context(|| domain.display().to_string())?;
        let problem = parse_problem(&read(problem)?).with_context(|| problem.display().to_string())?;
        let parsed = parse_plan(&read(plan)?).with_context(|| plan.display().to_string())?;
        let task = ground(&domain, &problem)?;
        let cost = validate_plan(&task, &parsed).with_context(|| format!("{} is not a valid plan", plan.display()))?;
        println!("{}: valid, cost {cost}", plan.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Permutations { model, out } => cmd_permutations(&model, &out),
        Command::GenLayout { size, load_factor, with_drilling, out } => {
            cmd_gen_layout(size, load_factor, with_drilling, &out)
        }
        Command::Validate(args) => cmd_validate(args),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
