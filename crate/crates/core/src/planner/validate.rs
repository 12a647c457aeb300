use thiserror::Error;

use super::ground::{GroundTask, State};
use crate::pddl::Plan;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("step {0} is not an action of the task")]
    UnknownAction(usize),
    #[error("step {0} is not applicable")]
    PreconditionViolated(usize),
    #[error("the plan does not reach the goal")]
    GoalNotReached,
}

/// Applies the steps in order; returns every visited state (initial state
/// first) and the summed cost. Steps naming several precondition variants
/// use the first applicable one.
pub fn simulate(task: &GroundTask, plan: &Plan) -> Result<(Vec<State>, u64), PlanError> {
    let mut states = vec![task.init.clone()];
    let mut cost = 0;
    for (i, step) in plan.steps.iter().enumerate() {
        let candidates = task.actions_named(&step.name, &step.args);
        if candidates.is_empty() {
            return Err(PlanError::UnknownAction(i));
        }
        let current = states.last().expect("non-empty");
        let a = candidates
            .iter()
            .map(|&c| &task.actions[c])
            .find(|a| a.applicable(current))
            .ok_or(PlanError::PreconditionViolated(i))?;
        cost += a.cost;
        states.push(a.apply(current));
    }
    Ok((states, cost))
}

/// Executes `plan` from the initial state, checks the goal, and returns the
/// plan's cost.
pub fn validate_plan(task: &GroundTask, plan: &Plan) -> Result<u64, PlanError> {
    let (states, cost) = simulate(task, plan)?;
    if task.is_goal(states.last().expect("non-empty")) {
        Ok(cost)
    } else {
        Err(PlanError::GoalNotReached)
    }
}
