//! Grounding, heuristic search, plan validation and an adapter for external
//! solvers.

mod external;
mod ground;
mod heuristic;
mod pdb;
mod search;
mod validate;

use std::fmt;
use std::time::Duration;

pub use external::{solve_external, ExternalError};
pub use ground::{ground, GroundAction, GroundError, GroundTask, State};
pub use heuristic::Heuristic;
pub use search::{solve_astar, solve_greedy};
pub use validate::{simulate, validate_plan, PlanError};

use crate::pddl::Plan;

/// Default wall-clock budget per search.
pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(300);

/// Resource limits for one search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub time_limit: Duration,
    /// Maximum number of stored search nodes; exceeding it yields `MemOut`.
    pub max_nodes: Option<usize>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { time_limit: DEFAULT_TIME_LIMIT, max_nodes: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    Solved,
    Unsolvable,
    Timeout,
    MemOut,
}

impl fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            SearchStatus::Solved => "solved",
            SearchStatus::Unsolvable => "unsolvable",
            SearchStatus::Timeout => "timeout",
            SearchStatus::MemOut => "memout",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Statistics {
    pub expanded: u64,
    pub generated: u64,
    pub peak_open: usize,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub status: SearchStatus,
    /// Present iff `status` is `Solved`.
    pub plan: Option<Plan>,
    pub statistics: Statistics,
}

impl SearchResult {
    pub fn cost(&self) -> Option<u64> {
        self.plan.as_ref().and_then(|p| p.declared_cost)
    }
}
