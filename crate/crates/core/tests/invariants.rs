//! Exhaustive checks over the reachable state space of the demo task.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use isaplan_core::io::{demo_model, generate_permutation_goals};
use isaplan_core::pddl::parse_plan;
use isaplan_core::planner::{solve_astar, validate_plan, Budget, Heuristic, PlanError};

const LISTED_PLAN: &str = "\
(moveshuttle e_shuttle-01 e_positioningunit-03 e_positioningunit-05)
(moveshuttle e_shuttle-02 e_positioningunit-01 e_positioningunit-03)
(moveshuttle e_shuttle-03 e_positioningunit-04 e_positioningunit-01)
(moveshuttle e_shuttle-04 e_positioningunit-02 e_positioningunit-04)
(moveshuttle e_shuttle-01 e_positioningunit-05 e_positioningunit-02)
; cost = 50 (general cost)
";

fn occupied_property(pu: &str) -> String {
    format!("{pu}-Occupied")
}

#[test]
fn locations_are_injective_and_flags_consistent_everywhere() {
    let m = demo_model();
    let (task, report) = task_for(&m, &identity_goal(&m));
    let states = explore(&task);
    assert_eq!(states.len(), 120);
    let shuttles: BTreeSet<String> = m.shuttle_ids().into_iter().collect();
    let pus: Vec<String> = (1..=5).map(pu).collect();

    for s in &states {
        let d = decode(&task, &report, s);
        let mut at: BTreeMap<&str, &str> = BTreeMap::new();
        for (shuttle, pu) in &d.locations {
            assert!(at.insert(shuttle, pu).is_none(), "{shuttle} in two places");
        }
        assert_eq!(at.keys().map(|s| s.to_string()).collect::<BTreeSet<_>>(), shuttles);
        let used: BTreeSet<&str> = at.values().copied().collect();
        assert_eq!(used.len(), shuttles.len(), "two shuttles share a PU: {at:?}");

        let flags: BTreeSet<&str> = d.true_properties.iter().map(String::as_str).collect();
        for p in &pus {
            assert_eq!(flags.contains(occupied_property(p).as_str()), used.contains(p.as_str()), "{p}");
        }
    }
}

#[test]
fn astar_is_optimal_from_every_reachable_state() {
    // With an inadmissible estimate some start state would yield a costlier plan.
    let m = demo_model();
    let goals = generate_permutation_goals(&m).unwrap();
    let picked: Vec<_> =
        goals.iter().filter(|g| ["goal-2341", "goal-4321", "goal-1243"].contains(&g.id.as_str())).collect();
    assert_eq!(picked.len(), 3);
    let oracle = Oracle::for_model(&m);
    for goal in picked {
        let (mut task, report) = task_for(&m, goal);
        for s in explore(&task) {
            let from: Arrangement = decode(&task, &report, &s).locations.into_iter().collect();
            task.init = s;
            let r = solve_astar(&task, Heuristic::Hmax, &Budget::default());
            assert_eq!(r.cost(), oracle.cost(&from, &goal.shuttle_locations), "{} from {from:?}", goal.id);
        }
    }
}

#[test]
fn listed_plan_is_valid_and_swapped_steps_are_not() {
    let m = demo_model();
    let goal = generate_permutation_goals(&m).unwrap().into_iter().find(|g| g.id == "goal-2341").unwrap();
    let (task, _) = task_for(&m, &goal);
    let mut plan = parse_plan(LISTED_PLAN).unwrap();
    assert_eq!(validate_plan(&task, &plan), Ok(50));
    plan.steps.swap(0, 1);
    assert_eq!(validate_plan(&task, &plan), Err(PlanError::PreconditionViolated(0)));
}
