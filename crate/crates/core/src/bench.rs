//! Scalability benchmark over generated ring layouts.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::io::{generate_reverse_goal, generate_ring_layout, GoalSpec, LayoutError};
use crate::model::build_routing_graph;
use crate::pipeline::{solve, PipelineError, Solver};
use crate::planner::{ground, validate_plan, Budget, Heuristic, PlanError, SearchStatus};
use crate::transform::{derive_domain, derive_problem, TransformError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Optimal,
    Greedy,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Mode::Optimal => "optimal",
            Mode::Greedy => "greedy",
        })
    }
}

/// What each benchmark task asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BenchGoal {
    /// Reverse the shuttle order; with drilling, also drill every board.
    #[default]
    Reverse,
    /// Keep every shuttle where it is.
    Identity,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub load_factor: f64,
    pub mode: Mode,
    /// Heuristic for optimal mode.
    pub heuristic: Heuristic,
    pub with_drilling: bool,
    pub goal: BenchGoal,
    pub budget: Budget,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            load_factor: 0.65,
            mode: Mode::Optimal,
            heuristic: Heuristic::Hmax,
            with_drilling: false,
            goal: BenchGoal::Reverse,
            budget: Budget::default(),
        }
    }
}

/// One CSV row. Cost and steps are empty unless the status is `solved`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchRow {
    pub size: usize,
    pub shuttles: usize,
    pub mode: String,
    pub status: String,
    pub plan_cost_seconds: Option<u64>,
    pub steps: Option<usize>,
    pub wall_time_ms: u64,
    pub expanded: u64,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("size {size}: solver returned an invalid plan: {source}")]
    InvalidPlan { size: usize, source: PlanError },
}

fn bench_goal(model: &crate::model::ProductionModel, config: &BenchConfig) -> Result<GoalSpec, TransformError> {
    Ok(match config.goal {
        BenchGoal::Reverse => generate_reverse_goal(model, config.with_drilling)?,
        BenchGoal::Identity => GoalSpec {
            id: "goal-identity".into(),
            shuttle_locations: build_routing_graph(model)?.shuttle_at,
            ..Default::default()
        },
    })
}

/// Generates, solves and validates one layout size.
pub fn bench_case(size: usize, config: &BenchConfig) -> Result<BenchRow, BenchError> {
    let model = generate_ring_layout(size, config.load_factor, config.with_drilling)?;
    let goal = bench_goal(&model, config)?;
    let (domain, _) = derive_domain(&model)?;
    let problem = derive_problem(&model, &goal)?;
    let solver = match config.mode {
        Mode::Optimal => Solver::Astar(config.heuristic),
        Mode::Greedy => Solver::Greedy,
    };
    let result = solve(&solver, &domain, &problem, &config.budget, &goal.id)?;
    if let Some(plan) = &result.plan {
        let task =
            ground(&domain, &problem).map_err(|source| PipelineError::Ground { goal: goal.id.clone(), source })?;
        validate_plan(&task, plan).map_err(|source| BenchError::InvalidPlan { size, source })?;
    }
    let solved = result.status == SearchStatus::Solved;
    Ok(BenchRow {
        size,
        shuttles: model.shuttle_ids().len(),
        mode: config.mode.to_string(),
        status: result.status.to_string(),
        plan_cost_seconds: result.cost().filter(|_| solved),
        steps: result.plan.as_ref().map(|p| p.steps.len()),
        wall_time_ms: u64::try_from(result.statistics.wall_time.as_millis()).unwrap_or(u64::MAX),
        expanded: result.statistics.expanded,
    })
}

/// One row per size, in the order given. Timeouts and memouts are rows,
/// not errors.
pub fn run_bench(sizes: &[usize], config: &BenchConfig) -> Result<Vec<BenchRow>, BenchError> {
    sizes.iter().map(|&n| bench_case(n, config)).collect()
}
