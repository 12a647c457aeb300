use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use super::ground::{GroundTask, State};
use super::heuristic::{Evaluator, Heuristic};
use super::pdb::PairwisePdb;
use super::{Budget, SearchResult, SearchStatus, Statistics};
use crate::pddl::{Plan, PlanStep};

/// How often (in expansions) the wall clock is consulted.
const CLOCK_INTERVAL: u64 = 256;

struct Node {
    parent: Option<(usize, usize)>, // (node, action)
}

struct Space {
    nodes: Vec<Node>,
    states: Vec<State>,
    /// best known cost-so-far per node
    g: Vec<u64>,
    index: HashMap<State, usize>,
}

impl Space {
    fn new() -> Self {
        Space { nodes: vec![], states: vec![], g: vec![], index: HashMap::new() }
    }

    fn add(&mut self, s: State, g: u64, parent: Option<(usize, usize)>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node { parent });
        self.states.push(s.clone());
        self.g.push(g);
        self.index.insert(s, id);
        id
    }

    fn plan(&self, task: &GroundTask, mut node: usize, cost: u64) -> Plan {
        let mut steps = Vec::new();
        while let Some((parent, action)) = self.nodes[node].parent {
            let a = &task.actions[action];
            steps.push(PlanStep { name: a.name.clone(), args: a.args.clone() });
            node = parent;
        }
        steps.reverse();
        Plan { steps, declared_cost: Some(cost) }
    }
}

fn finish(status: SearchStatus, plan: Option<Plan>, mut stats: Statistics, start: Instant) -> SearchResult {
    stats.wall_time = start.elapsed();
    SearchResult { status, plan, statistics: stats }
}

fn out_of_budget(budget: &Budget, stats: &Statistics, space: &Space, start: Instant) -> Option<SearchStatus> {
    if budget.max_nodes.is_some_and(|cap| space.nodes.len() >= cap) {
        return Some(SearchStatus::MemOut);
    }
    if stats.expanded.is_multiple_of(CLOCK_INTERVAL) && start.elapsed() >= budget.time_limit {
        return Some(SearchStatus::Timeout);
    }
    None
}

/// A* with full duplicate detection and reopening. With an admissible
/// heuristic the returned plan has minimum cost. Ties on `f` prefer smaller
/// `h`, then earlier insertion.
pub fn solve_astar(task: &GroundTask, heuristic: Heuristic, budget: &Budget) -> SearchResult {
    let start = Instant::now();
    let mut stats = Statistics::default();
    let mut eval = Evaluator::new(task, heuristic);
    let mut space = Space::new();
    let Some(h0) = eval.eval(&task.init) else {
        return finish(SearchStatus::Unsolvable, None, stats, start);
    };
    let root = space.add(task.init.clone(), 0, None);
    let mut h_cache: Vec<u64> = vec![h0];
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;
    open.push(Reverse((h0, h0, seq, root, 0u64)));
    stats.generated = 1;

    while let Some(Reverse((_, _, _, node, g))) = open.pop() {
        if space.g[node] < g {
            continue;
        }
        let state = space.states[node].clone();
        if task.is_goal(&state) {
            let plan = space.plan(task, node, g);
            return finish(SearchStatus::Solved, Some(plan), stats, start);
        }
        stats.expanded += 1;
        if let Some(status) = out_of_budget(budget, &stats, &space, start) {
            return finish(status, None, stats, start);
        }
        for (ai, a) in task.actions.iter().enumerate() {
            if !a.applicable(&state) {
                continue;
            }
            let succ = a.apply(&state);
            let ng = g + a.cost;
            stats.generated += 1;
            let id = match space.index.get(&succ) {
                Some(&id) => {
                    if ng >= space.g[id] {
                        continue;
                    }
                    space.g[id] = ng;
                    space.nodes[id].parent = Some((node, ai));
                    id
                }
                None => {
                    h_cache.push(eval.eval(&succ).unwrap_or(u64::MAX));
                    space.add(succ, ng, Some((node, ai)))
                }
            };
            let hv = h_cache[id];
            if hv == u64::MAX {
                continue;
            }
            seq += 1;
            open.push(Reverse((ng + hv, hv, seq, id, ng)));
        }
        stats.peak_open = stats.peak_open.max(open.len());
    }
    finish(SearchStatus::Unsolvable, None, stats, start)
}

/// Priority bonus for the preferred-successor queue whenever the best
/// heuristic value improves.
const PREFERRED_BOOST: i64 = 1000;

/// Greedy best-first search on the additive heuristic with lazy evaluation
/// and preferred operators: successors are queued under their parent's
/// heuristic value, and those reached by an action of the parent's relaxed
/// plan also enter a second queue that is served with priority after every
/// improvement. Plans are valid but not necessarily cheapest.
pub fn solve_greedy(task: &GroundTask, budget: &Budget) -> SearchResult {
    let start = Instant::now();
    if let Some(mut pdb) = PairwisePdb::build(task, start + budget.time_limit) {
        return greedy_eager(task, budget, start, |s| pdb.eval(s));
    }
    greedy_lazy_hadd(task, budget, start)
}

/// Eager greedy best-first search; ties broken by insertion order.
fn greedy_eager(
    task: &GroundTask,
    budget: &Budget,
    start: Instant,
    mut h: impl FnMut(&State) -> Option<u64>,
) -> SearchResult {
    let mut stats = Statistics::default();
    let mut space = Space::new();
    let Some(h0) = h(&task.init) else {
        return finish(SearchStatus::Unsolvable, None, stats, start);
    };
    let root = space.add(task.init.clone(), 0, None);
    stats.generated = 1;
    if task.is_goal(&task.init) {
        return finish(SearchStatus::Solved, Some(space.plan(task, root, 0)), stats, start);
    }
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;
    open.push(Reverse((h0, seq, root)));
    while let Some(Reverse((_, _, node))) = open.pop() {
        stats.expanded += 1;
        if let Some(status) = out_of_budget(budget, &stats, &space, start) {
            return finish(status, None, stats, start);
        }
        let state = space.states[node].clone();
        let g = space.g[node];
        for (ai, a) in task.actions.iter().enumerate() {
            if !a.applicable(&state) {
                continue;
            }
            let succ = a.apply(&state);
            stats.generated += 1;
            if space.index.contains_key(&succ) {
                continue;
            }
            let ng = g + a.cost;
            let goal = task.is_goal(&succ);
            let hv = h(&succ);
            let id = space.add(succ, ng, Some((node, ai)));
            if goal {
                return finish(SearchStatus::Solved, Some(space.plan(task, id, ng)), stats, start);
            }
            if let Some(hv) = hv {
                seq += 1;
                open.push(Reverse((hv, seq, id)));
            }
        }
        stats.peak_open = stats.peak_open.max(open.len());
    }
    finish(SearchStatus::Unsolvable, None, stats, start)
}

fn greedy_lazy_hadd(task: &GroundTask, budget: &Budget, start: Instant) -> SearchResult {
    let mut stats = Statistics::default();
    let mut eval = Evaluator::new(task, Heuristic::Hadd);
    let mut space = Space::new();
    if eval.eval(&task.init).is_none() {
        return finish(SearchStatus::Unsolvable, None, stats, start);
    }
    let root = space.add(task.init.clone(), 0, None);
    stats.generated = 1;
    // [all successors, preferred successors]
    let mut open = [BinaryHeap::new(), BinaryHeap::new()];
    let mut priority = [0i64; 2];
    let mut closed: Vec<bool> = Vec::new();
    let mut best_h = u64::MAX;
    let mut seq = 0u64;
    open[0].push(Reverse((0u64, seq, root)));

    loop {
        let q = match (open[0].is_empty(), open[1].is_empty()) {
            (true, true) => break,
            (false, true) => 0,
            (true, false) => 1,
            (false, false) => usize::from(priority[1] <= priority[0]),
        };
        priority[q] += 1;
        let Reverse((_, _, node)) = open[q].pop().expect("queue checked non-empty");
        if closed.len() <= node {
            closed.resize(space.nodes.len(), false);
        }
        if std::mem::replace(&mut closed[node], true) {
            continue;
        }
        let state = space.states[node].clone();
        let g = space.g[node];
        if task.is_goal(&state) {
            return finish(SearchStatus::Solved, Some(space.plan(task, node, g)), stats, start);
        }
        stats.expanded += 1;
        if let Some(status) = out_of_budget(budget, &stats, &space, start) {
            return finish(status, None, stats, start);
        }
        let Some(h) = eval.eval(&state) else { continue };
        if h < best_h {
            best_h = h;
            priority[1] -= PREFERRED_BOOST;
        }
        let preferred = eval.preferred(&state);
        for (ai, a) in task.actions.iter().enumerate() {
            if !a.applicable(&state) {
                continue;
            }
            let succ = a.apply(&state);
            stats.generated += 1;
            if space.index.contains_key(&succ) {
                continue;
            }
            let id = space.add(succ, g + a.cost, Some((node, ai)));
            seq += 1;
            open[0].push(Reverse((h, seq, id)));
            if preferred.binary_search(&ai).is_ok() {
                open[1].push(Reverse((h, seq, id)));
            }
        }
        stats.peak_open = stats.peak_open.max(open[0].len() + open[1].len());
    }
    finish(SearchStatus::Unsolvable, None, stats, start)
}
