use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::ground::{GroundTask, State};

/// Relaxed-reachability heuristics over the delete relaxation. A negated
/// fluent that some action requires (or the goal forbids) is tracked as an
/// atom of its own, achieved by the actions deleting the fluent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heuristic {
    /// Always zero.
    Blind,
    /// Maximum over goal costs in the delete relaxation; admissible.
    Hmax,
    /// Sum over goal costs in the delete relaxation; not admissible.
    Hadd,
}

const NO_SUPPORTER: usize = usize::MAX;

/// Precomputed relaxed task for fast repeated evaluation.
pub(crate) struct Evaluator<'a> {
    task: &'a GroundTask,
    kind: Heuristic,
    /// relaxed atom -> fluent; atoms `>= n_fluents` are negations
    neg_of: Vec<usize>,
    n_fluents: usize,
    pre: Vec<Vec<usize>>,
    add: Vec<Vec<usize>>,
    goals: Vec<usize>,
    is_goal: Vec<bool>,
    /// atom -> actions having it as a precondition
    consumers: Vec<Vec<usize>>,
    no_pre: Vec<usize>,
    cost: Vec<u64>,
    supporter: Vec<usize>,
    unsat: Vec<usize>,
    acc: Vec<u64>,
    marked: Vec<bool>,
}

impl<'a> Evaluator<'a> {
    pub fn new(task: &'a GroundTask, kind: Heuristic) -> Self {
        let n = task.fluents.len();
        let mut neg_atom = vec![None; n];
        let mut neg_of = Vec::new();
        let mut atom_for_neg = |f: usize| {
            *neg_atom[f].get_or_insert_with(|| {
                neg_of.push(f);
                n + neg_of.len() - 1
            })
        };
        let mut pre = Vec::with_capacity(task.actions.len());
        for a in &task.actions {
            let mut p = a.pre_pos.clone();
            p.extend(a.pre_neg.iter().map(|&f| atom_for_neg(f)));
            pre.push(p);
        }
        let mut goals = task.goal_pos.clone();
        goals.extend(task.goal_neg.iter().map(|&f| atom_for_neg(f)));
        let add: Vec<Vec<usize>> = task
            .actions
            .iter()
            .map(|a| {
                let mut ad = a.add.clone();
                ad.extend(a.del.iter().filter(|f| !a.add.contains(f)).filter_map(|&f| neg_atom[f]));
                ad
            })
            .collect();

        let atoms = n + neg_of.len();
        let mut is_goal = vec![false; atoms];
        for &g in &goals {
            is_goal[g] = true;
        }
        let mut consumers = vec![Vec::new(); atoms];
        let mut no_pre = Vec::new();
        for (i, p) in pre.iter().enumerate() {
            if p.is_empty() {
                no_pre.push(i);
            }
            for &f in p {
                consumers[f].push(i);
            }
        }
        Evaluator {
            task,
            kind,
            neg_of,
            n_fluents: n,
            pre,
            add,
            goals,
            is_goal,
            consumers,
            no_pre,
            cost: vec![u64::MAX; atoms],
            supporter: vec![NO_SUPPORTER; atoms],
            unsat: vec![0; task.actions.len()],
            acc: vec![0; task.actions.len()],
            marked: vec![false; task.actions.len()],
        }
    }

    fn holds(&self, s: &State, atom: usize) -> bool {
        if atom < self.n_fluents {
            s.contains(atom)
        } else {
            !s.contains(self.neg_of[atom - self.n_fluents])
        }
    }

    fn fire(&mut self, a: usize, base: u64, heap: &mut BinaryHeap<Reverse<(u64, usize)>>) {
        let c = base.saturating_add(self.task.actions[a].cost);
        for &f in &self.add[a] {
            if c < self.cost[f] {
                self.cost[f] = c;
                self.supporter[f] = a;
                heap.push(Reverse((c, f)));
            }
        }
    }

    /// `None` means the goal is unreachable even in the relaxation.
    pub fn eval(&mut self, s: &State) -> Option<u64> {
        if self.task.goal_unreachable {
            return None;
        }
        if self.kind == Heuristic::Blind {
            return Some(0);
        }
        self.cost.fill(u64::MAX);
        self.supporter.fill(NO_SUPPORTER);
        for (i, p) in self.pre.iter().enumerate() {
            self.unsat[i] = p.len();
            self.acc[i] = 0;
        }
        let mut heap = BinaryHeap::new();
        for atom in 0..self.cost.len() {
            if self.holds(s, atom) {
                self.cost[atom] = 0;
                heap.push(Reverse((0u64, atom)));
            }
        }
        let mut pending_goals = self.goals.iter().filter(|&&g| self.cost[g] != 0).count();
        for i in 0..self.no_pre.len() {
            self.fire(self.no_pre[i], 0, &mut heap);
        }
        while let Some(Reverse((c, f))) = heap.pop() {
            if c > self.cost[f] {
                continue;
            }
            if self.is_goal[f] && self.supporter[f] != NO_SUPPORTER {
                pending_goals -= 1;
                if pending_goals == 0 && self.kind == Heuristic::Hmax {
                    // Remaining pops all cost at least c; every goal is final.
                    break;
                }
            }
            for k in 0..self.consumers[f].len() {
                let a = self.consumers[f][k];
                self.unsat[a] -= 1;
                self.acc[a] = match self.kind {
                    Heuristic::Hmax => self.acc[a].max(c),
                    _ => self.acc[a].saturating_add(c),
                };
                if self.unsat[a] == 0 {
                    self.fire(a, self.acc[a], &mut heap);
                }
            }
        }
        let mut h = 0u64;
        for &g in &self.goals {
            let c = self.cost[g];
            if c == u64::MAX {
                return None;
            }
            h = match self.kind {
                Heuristic::Hmax => h.max(c),
                _ => h.saturating_add(c),
            };
        }
        Some(h)
    }

    /// Actions applicable in `s` that start the relaxed plan extracted from
    /// the best supporters of the last [`eval`](Self::eval) on `s`.
    pub fn preferred(&mut self, s: &State) -> Vec<usize> {
        self.marked.fill(false);
        let mut stack: Vec<usize> = self.goals.iter().copied().filter(|&g| !self.holds(s, g)).collect();
        let mut seen = vec![false; self.cost.len()];
        let mut out = Vec::new();
        while let Some(atom) = stack.pop() {
            if std::mem::replace(&mut seen[atom], true) {
                continue;
            }
            let a = self.supporter[atom];
            if a == NO_SUPPORTER || std::mem::replace(&mut self.marked[a], true) {
                continue;
            }
            let mut applicable = true;
            for &p in &self.pre[a] {
                if !self.holds(s, p) {
                    applicable = false;
                    stack.push(p);
                }
            }
            if applicable {
                out.push(a);
            }
        }
        out.sort_unstable();
        out
    }
}
