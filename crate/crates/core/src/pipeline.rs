//! End-to-end orchestration: model and goals in, PDDL texts and plans on the
//! way, integrated model out.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::io::{GoalSpec, IntegratedModel, OperationsRecord};
use crate::merge::{merge, plan_to_operations, MergeError};
use crate::model::{build_routing_graph, ProductionModel};
use crate::pddl::{
    parse_domain, parse_problem, serialize_domain, serialize_plan, serialize_problem, PddlDomain, PddlError,
    PddlProblem,
};
use crate::planner::{
    ground, solve_astar, solve_external, solve_greedy, Budget, ExternalError, GroundError, Heuristic, SearchResult,
    SearchStatus, Statistics,
};
use crate::transform::names::sanitize;
use crate::transform::{derive_domain, derive_problem_with, TransformError, TransformReport};

/// File name of the emitted domain inside an emit directory.
pub const DOMAIN_FILE: &str = "domain.pddl";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solver {
    /// Cost-optimal A* with the given heuristic.
    Astar(Heuristic),
    /// Satisficing greedy best-first search.
    Greedy,
    /// Shell command template with `{domain}`, `{problem}`, `{plan}`.
    External(String),
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub solver: Solver,
    pub budget: Budget,
    /// Worker threads; 0 or 1 solves the goals one after another.
    pub parallel: usize,
    /// Write domain, problem and plan texts here.
    pub emit_dir: Option<PathBuf>,
    /// Read domain and problem texts from here instead of using the
    /// in-memory translation.
    pub use_emitted: Option<PathBuf>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            solver: Solver::Astar(Heuristic::Hmax),
            budget: Budget::default(),
            parallel: 1,
            emit_dir: None,
            use_emitted: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("goal ids `{0}` and `{1}` map to the same PDDL problem name")]
    DuplicateGoal(String, String),
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: PddlError },
    #[error("goal `{goal}`: {source}")]
    Ground { goal: String, source: GroundError },
    #[error("goal `{goal}`: {source}")]
    External { goal: String, source: ExternalError },
    #[error("goal `{goal}`: {source}")]
    Merge { goal: String, source: MergeError },
    #[error("final merge failed: {0}")]
    FinalMerge(MergeError),
    #[error("cannot start worker threads: {0}")]
    Threads(String),
}

/// What happened to one goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalOutcome {
    pub goal_id: String,
    pub status: SearchStatus,
    pub cost: Option<u64>,
    pub steps: Option<usize>,
    pub statistics: Statistics,
}

#[derive(Debug)]
pub struct PipelineOutput {
    pub integrated: IntegratedModel,
    /// One per goal, in input order.
    pub outcomes: Vec<GoalOutcome>,
    pub report: TransformReport,
}

/// File name of a goal's emitted problem.
pub fn problem_file(goal_id: &str) -> String {
    format!("{}.problem.pddl", sanitize(goal_id))
}

/// File name of a goal's emitted plan.
pub fn plan_file(goal_id: &str) -> String {
    format!("{}.plan", sanitize(goal_id))
}

fn write(path: PathBuf, text: &str) -> Result<(), PipelineError> {
    fs::write(&path, text).map_err(|source| PipelineError::Io { path, source })
}

fn read(path: PathBuf) -> Result<(String, PathBuf), PipelineError> {
    match fs::read_to_string(&path) {
        Ok(text) => Ok((text, path)),
        Err(source) => Err(PipelineError::Io { path, source }),
    }
}

fn read_domain(dir: &Path) -> Result<PddlDomain, PipelineError> {
    let (text, path) = read(dir.join(DOMAIN_FILE))?;
    parse_domain(&text).map_err(|source| PipelineError::Parse { path, source })
}

fn read_problem(dir: &Path, goal_id: &str) -> Result<(PddlProblem, String), PipelineError> {
    let (text, path) = read(dir.join(problem_file(goal_id)))?;
    let problem = parse_problem(&text).map_err(|source| PipelineError::Parse { path, source })?;
    Ok((problem, text))
}

/// Runs the search configured in `solver` on one task.
pub fn solve(
    solver: &Solver,
    domain: &PddlDomain,
    problem: &PddlProblem,
    budget: &Budget,
    goal_id: &str,
) -> Result<SearchResult, PipelineError> {
    let task = ground(domain, problem).map_err(|source| PipelineError::Ground { goal: goal_id.into(), source })?;
    Ok(match solver {
        Solver::Astar(h) => solve_astar(&task, *h, budget),
        Solver::Greedy => solve_greedy(&task, budget),
        Solver::External(template) => {
            solve_external(&serialize_domain(domain), &serialize_problem(problem), template, &task, budget)
                .map_err(|source| PipelineError::External { goal: goal_id.into(), source })?
        }
    })
}

/// Translates, solves and merges every goal. Unsolved goals are recorded
/// with `solvable = false`; only stage failures are errors.
pub fn run_pipeline(
    model: &ProductionModel,
    goals: &[GoalSpec],
    options: &PipelineOptions,
) -> Result<PipelineOutput, PipelineError> {
    let mut seen = std::collections::HashMap::new();
    for g in goals {
        if let Some(first) = seen.insert(sanitize(&g.id).to_ascii_lowercase(), g.id.clone()) {
            return Err(PipelineError::DuplicateGoal(first, g.id.clone()));
        }
    }

    let graph = build_routing_graph(model).map_err(TransformError::from)?;
    let (derived_domain, report) = derive_domain(model)?;
    if let Some(dir) = &options.emit_dir {
        fs::create_dir_all(dir).map_err(|source| PipelineError::Io { path: dir.clone(), source })?;
        write(dir.join(DOMAIN_FILE), &serialize_domain(&derived_domain))?;
    }
    let domain = match &options.use_emitted {
        Some(dir) => read_domain(dir)?,
        None => derived_domain,
    };

    let solve_goal = |goal: &GoalSpec| -> Result<(OperationsRecord, GoalOutcome), PipelineError> {
        let derived = derive_problem_with(model, &graph, goal)?;
        if let Some(dir) = &options.emit_dir {
            write(dir.join(problem_file(&goal.id)), &serialize_problem(&derived))?;
        }
        let problem = match &options.use_emitted {
            Some(dir) => read_problem(dir, &goal.id)?.0,
            None => derived,
        };
        let result = solve(&options.solver, &domain, &problem, &options.budget, &goal.id)?;
        let record = match &result.plan {
            Some(plan) => {
                if let Some(dir) = &options.emit_dir {
                    write(dir.join(plan_file(&goal.id)), &serialize_plan(plan))?;
                }
                plan_to_operations(plan, model, &report, &goal.id)
                    .map_err(|source| PipelineError::Merge { goal: goal.id.clone(), source })?
            }
            None => OperationsRecord::unsolvable(goal.id.clone()),
        };
        let outcome = GoalOutcome {
            goal_id: goal.id.clone(),
            status: result.status,
            cost: result.plan.as_ref().map(|_| record.total_cost),
            steps: result.plan.as_ref().map(|p| p.steps.len()),
            statistics: result.statistics,
        };
        Ok((record, outcome))
    };

    let results: Vec<(OperationsRecord, GoalOutcome)> = if options.parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.parallel)
            .build()
            .map_err(|e| PipelineError::Threads(e.to_string()))?;
        pool.install(|| goals.par_iter().map(solve_goal).collect::<Result<_, _>>())?
    } else {
        goals.iter().map(solve_goal).collect::<Result<_, _>>()?
    };
    let (records, outcomes): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let integrated = merge(model, &records).map_err(PipelineError::FinalMerge)?;
    Ok(PipelineOutput { integrated, outcomes, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{demo_model, generate_permutation_goals, to_json};

    fn goal_2341(m: &ProductionModel) -> GoalSpec {
        generate_permutation_goals(m).unwrap().into_iter().find(|g| g.id == "goal-2341").unwrap()
    }

    #[test]
    fn demo_goal_yields_five_moves_for_fifty_seconds() {
        let m = demo_model();
        let out = run_pipeline(&m, &[goal_2341(&m)], &PipelineOptions::default()).unwrap();
        let rec = &out.integrated.operations_definitions[0];
        assert!(rec.solvable);
        assert_eq!(rec.total_cost, 50);
        assert_eq!(rec.operations.len(), 5);
        assert!(rec.operations.iter().all(|o| o.segment_id == "MoveShuttle"));
        assert_eq!(out.outcomes[0].status, SearchStatus::Solved);
        assert_eq!(out.outcomes[0].cost, Some(50));
    }

    #[test]
    fn clashing_goal_is_recorded_not_an_error() {
        let m = demo_model();
        let mut g = GoalSpec { id: "clash".into(), ..Default::default() };
        g.shuttle_locations.insert("Shuttle-01".into(), "PositioningUnit-05".into());
        g.shuttle_locations.insert("Shuttle-02".into(), "PositioningUnit-05".into());
        let out = run_pipeline(&m, &[g], &PipelineOptions::default()).unwrap();
        assert_eq!(out.outcomes[0].status, SearchStatus::Unsolvable);
        assert!(!out.integrated.operations_definitions[0].solvable);
        assert!(out.integrated.operations_definitions[0].operations.is_empty());
    }

    #[test]
    fn parallel_run_matches_sequential() {
        let m = demo_model();
        let goals = generate_permutation_goals(&m).unwrap();
        let seq = run_pipeline(&m, &goals, &PipelineOptions::default()).unwrap();
        let par = run_pipeline(&m, &goals, &PipelineOptions { parallel: 4, ..Default::default() }).unwrap();
        assert_eq!(to_json(&seq.integrated), to_json(&par.integrated));
        assert_eq!(seq.integrated.operations_definitions.len(), 23);
    }

    #[test]
    fn emitted_texts_reproduce_the_same_result() {
        let m = demo_model();
        let goals = generate_permutation_goals(&m).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let emit = PipelineOptions { emit_dir: Some(dir.path().to_path_buf()), ..Default::default() };
        let first = run_pipeline(&m, &goals, &emit).unwrap();
        assert!(dir.path().join(DOMAIN_FILE).exists());
        assert!(dir.path().join("goal-2341.problem.pddl").exists());
        assert!(dir.path().join("goal-2341.plan").exists());
        let reuse = PipelineOptions { use_emitted: Some(dir.path().to_path_buf()), ..Default::default() };
        let second = run_pipeline(&m, &goals, &reuse).unwrap();
        assert_eq!(to_json(&first.integrated), to_json(&second.integrated));
    }

    #[test]
    fn missing_emitted_files_are_io_errors() {
        let m = demo_model();
        let dir = tempfile::tempdir().unwrap();
        let reuse = PipelineOptions { use_emitted: Some(dir.path().to_path_buf()), ..Default::default() };
        assert!(matches!(run_pipeline(&m, &[goal_2341(&m)], &reuse), Err(PipelineError::Io { .. })));
    }

    #[test]
    fn duplicate_goal_ids_are_rejected() {
        let m = demo_model();
        let g = goal_2341(&m);
        assert!(matches!(
            run_pipeline(&m, &[g.clone(), g], &PipelineOptions::default()),
            Err(PipelineError::DuplicateGoal(..))
        ));
    }

    #[test]
    fn no_goals_gives_an_empty_integrated_model() {
        let m = demo_model();
        let out = run_pipeline(&m, &[], &PipelineOptions::default()).unwrap();
        assert!(out.integrated.operations_definitions.is_empty());
        assert_eq!(to_json(&out.integrated.model), to_json(&m));
    }
}
