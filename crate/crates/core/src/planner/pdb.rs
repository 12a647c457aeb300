//! Projection heuristic used by greedy search.
//!
//! Fluents are first grouped into finite-domain variables: a group of atoms of
//! which at most one holds in every reachable state, proven on the ground
//! actions. Every remaining fluent becomes a binary variable. The task is
//! projected onto each goal variable, and onto each pair of goal variables,
//! together with the binary variables feeding them in the causal graph. Each
//! abstract space is explored explicitly and its goal distances are
//! tabulated. An abstract transition is dropped when one of its
//! projected-away preconditions is h²-mutex with the abstract state. That
//! keeps, for instance, an anonymous shuttle from leaving a station that a
//! tracked shuttle occupies.
//!
//! The estimate is the sum of the singleton distances plus, for every pair,
//! the surplus (if positive) of the joint distance over its two singleton
//! distances. The surplus is what the pair costs because of its interaction,
//! such as two shuttles that must overtake each other. The estimate is informative on
//! routing tasks but not admissible.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::time::Instant;

use fixedbitset::FixedBitSet;
use rustc_hash::FxHashMap;

use super::ground::{GroundTask, State};

/// Tasks with more literal × action work than this skip the h² analysis.
const MAX_MUTEX_WORK: usize = 40_000_000;
const MAX_PATTERN_STATES: usize = 1 << 20;
const MAX_TOTAL_STATES: usize = 1 << 24;
const UNREACHABLE: u32 = u32::MAX;

/// A finite-domain variable. Value `i < fluents.len()` means `fluents[i]`
/// holds; value `fluents.len()` means none of them does.
#[derive(Debug, Clone)]
struct Var {
    fluents: Vec<usize>,
}

impl Var {
    fn domain(&self) -> usize {
        self.fluents.len() + 1
    }
}

#[derive(Debug)]
struct Variables {
    vars: Vec<Var>,
    /// fluent -> (variable, value)
    of: Vec<(usize, usize)>,
}

impl Variables {
    fn project(&self, s: &State, out: &mut Vec<usize>) {
        out.clear();
        out.extend(self.vars.iter().map(|v| v.fluents.len()));
        for f in s.ones() {
            let (v, x) = self.of[f];
            out[v] = x;
        }
    }
}

/// Whether at most one fluent of `group` holds in every reachable state:
/// at most one initially, and every action adding a member also deletes a
/// member it requires.
fn at_most_one(task: &GroundTask, group: &[usize], member: &FixedBitSet) -> bool {
    if group.iter().filter(|&&f| task.init.contains(f)).count() > 1 {
        return false;
    }
    task.actions.iter().all(|a| {
        let adds = a.add.iter().filter(|&&f| member.contains(f) && !a.pre_pos.contains(&f)).count();
        match adds {
            0 => true,
            1 => a.pre_pos.iter().any(|&f| member.contains(f) && a.del.contains(&f) && !a.add.contains(&f)),
            _ => false,
        }
    })
}

fn find_variables(task: &GroundTask) -> Variables {
    let n = task.fluents.len();
    let mut candidates: HashMap<(&str, usize, Vec<String>), Vec<usize>> = HashMap::new();
    for (f, atom) in task.fluents.iter().enumerate() {
        if atom.args.len() < 2 {
            continue;
        }
        for p in 0..atom.args.len() {
            let rest = atom
                .args
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != p)
                .map(|(_, t)| t.to_string().to_ascii_lowercase())
                .collect();
            candidates.entry((atom.predicate.as_str(), p, rest)).or_default().push(f);
        }
    }
    let mut groups: Vec<Vec<usize>> = candidates.into_values().filter(|g| g.len() >= 2).collect();
    groups.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));

    let mut assigned = vec![false; n];
    let mut vars = Vec::new();
    for g in groups {
        if g.iter().any(|&f| assigned[f]) {
            continue;
        }
        let mut member = FixedBitSet::with_capacity(n);
        g.iter().for_each(|&f| member.insert(f));
        if at_most_one(task, &g, &member) {
            g.iter().for_each(|&f| assigned[f] = true);
            vars.push(Var { fluents: g });
        }
    }
    vars.extend((0..n).filter(|&f| !assigned[f]).map(|f| Var { fluents: vec![f] }));
    let mut of = vec![(0, 0); n];
    for (v, var) in vars.iter().enumerate() {
        for (x, &f) in var.fluents.iter().enumerate() {
            of[f] = (v, x);
        }
    }
    Variables { vars, of }
}

/// h² reachability over literals; literal `2f` is fluent `f`, `2f + 1` its
/// negation. Pairs never reachable together are mutex.
struct Mutexes {
    n: usize,
    reach: FixedBitSet,
}

impl Mutexes {
    fn reachable(&self, p: usize, q: usize) -> bool {
        self.reach.contains(p * self.n + q)
    }

    fn mark(&mut self, p: usize, q: usize) -> bool {
        if self.reachable(p, q) {
            return false;
        }
        self.reach.insert(p * self.n + q);
        self.reach.insert(q * self.n + p);
        true
    }

    fn mutex(&self, p: usize, q: usize) -> bool {
        !self.reachable(p, q)
    }

    fn compute(task: &GroundTask) -> Self {
        let n = 2 * task.fluents.len();
        let lits: Vec<(Vec<usize>, Vec<usize>, Vec<usize>)> = task
            .actions
            .iter()
            .map(|a| {
                let pre = a.pre_pos.iter().map(|&f| 2 * f).chain(a.pre_neg.iter().map(|&f| 2 * f + 1)).collect();
                let eff_del: Vec<usize> = a.del.iter().copied().filter(|f| !a.add.contains(f)).collect();
                let add = a.add.iter().map(|&f| 2 * f).chain(eff_del.iter().map(|&f| 2 * f + 1)).collect();
                let del = a.add.iter().map(|&f| 2 * f + 1).chain(eff_del.iter().map(|&f| 2 * f)).collect();
                (pre, add, del)
            })
            .collect();
        let mut m = Mutexes { n, reach: FixedBitSet::with_capacity(n * n) };
        let init: Vec<usize> =
            (0..task.fluents.len()).map(|f| if task.init.contains(f) { 2 * f } else { 2 * f + 1 }).collect();
        for &p in &init {
            for &q in &init {
                m.mark(p, q);
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for (pre, add, del) in &lits {
                let applicable = pre.iter().all(|&p| pre.iter().all(|&q| m.reachable(p, q)));
                if !applicable {
                    continue;
                }
                for &p in add {
                    for &q in add {
                        changed |= m.mark(p, q);
                    }
                }
                for &p in add {
                    for q in 0..n {
                        if m.reachable(q, q)
                            && !m.reachable(p, q)
                            && !del.contains(&q)
                            && !add.contains(&q)
                            && pre.iter().all(|&r| m.reachable(r, q))
                        {
                            changed |= m.mark(p, q);
                        }
                    }
                }
            }
        }
        m
    }
}

/// Projected action: conditions and effects on pattern positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct AbstractOp {
    /// (position, value, must equal)
    pre: Vec<(usize, usize, bool)>,
    eff: Vec<(usize, usize)>,
    /// abstract values in which a projected-away precondition is mutex
    blocked: Vec<(usize, usize)>,
}

impl AbstractOp {
    fn applicable(&self, values: &[usize]) -> bool {
        self.pre.iter().all(|&(p, x, eq)| (values[p] == x) == eq) && !self.blocked.iter().any(|&(p, x)| values[p] == x)
    }
}

struct Pattern {
    vars: Vec<usize>,
    radix: Vec<u64>,
    table: FxHashMap<u64, u32>,
}

impl Pattern {
    /// Distance of the projected state; 0 for states the exploration never
    /// met, `None` for abstract dead ends.
    fn lookup(&self, values: &[usize]) -> Option<u32> {
        let key = self.vars.iter().zip(&self.radix).map(|(&v, &r)| values[v] as u64 * r).sum();
        match self.table.get(&key) {
            Some(&UNREACHABLE) => None,
            Some(&d) => Some(d),
            None => Some(0),
        }
    }
}

/// Singleton and pairwise projection tables. See the module documentation.
pub(crate) struct PairwisePdb<'a> {
    task: &'a GroundTask,
    variables: Variables,
    singles: Vec<Pattern>,
    /// (single index, single index, joint table)
    pairs: Vec<(usize, usize, Pattern)>,
    scratch: Vec<usize>,
    single_h: Vec<u32>,
}

impl<'a> PairwisePdb<'a> {
    /// Returns `None` when the task is too large for the analysis, has no
    /// goal variable, or `deadline` passes while building.
    pub fn build(task: &'a GroundTask, deadline: Instant) -> Option<Self> {
        if 2 * task.fluents.len() * task.actions.len().max(1) > MAX_MUTEX_WORK {
            return None;
        }
        let variables = find_variables(task);
        let mutexes = Mutexes::compute(task);
        let nv = variables.vars.len();

        // goal values per variable
        let mut goal: Vec<Option<Vec<bool>>> = vec![None; nv];
        let goal_lits = task.goal_pos.iter().map(|&f| (f, true)).chain(task.goal_neg.iter().map(|&f| (f, false)));
        for (f, positive) in goal_lits {
            let (v, x) = variables.of[f];
            let allowed = goal[v].get_or_insert_with(|| vec![true; variables.vars[v].domain()]);
            for (y, ok) in allowed.iter_mut().enumerate() {
                if (y == x) != positive {
                    *ok = false;
                }
            }
        }
        let goal_vars: Vec<usize> = (0..nv).filter(|&v| goal[v].is_some()).collect();
        if goal_vars.is_empty() {
            return None;
        }

        // causal graph predecessors
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for a in &task.actions {
            let var = |f: &usize| variables.of[*f].0;
            let mut pre: Vec<usize> = a.pre_pos.iter().chain(&a.pre_neg).map(var).collect();
            let mut eff: Vec<usize> = a.add.iter().chain(&a.del).map(var).collect();
            pre.extend(eff.iter().copied());
            pre.sort_unstable();
            pre.dedup();
            eff.sort_unstable();
            eff.dedup();
            for &e in &eff {
                preds[e].extend(pre.iter().copied().filter(|&p| p != e));
            }
        }
        for p in &mut preds {
            p.sort_unstable();
            p.dedup();
        }
        let binary = |v: usize| variables.vars[v].fluents.len() == 1;
        let pattern_vars = |seeds: &[usize]| {
            let mut seen = vec![false; nv];
            let mut queue: VecDeque<usize> = seeds.iter().copied().collect();
            seeds.iter().for_each(|&s| seen[s] = true);
            while let Some(v) = queue.pop_front() {
                for &p in &preds[v] {
                    if !seen[p] && binary(p) {
                        seen[p] = true;
                        queue.push_back(p);
                    }
                }
            }
            (0..nv).filter(|&v| seen[v]).collect::<Vec<_>>()
        };

        let mut init_values = Vec::new();
        variables.project(&task.init, &mut init_values);
        let mut total = 0usize;
        let mut build = |seeds: &[usize]| {
            if Instant::now() >= deadline {
                return Err(());
            }
            let budget = MAX_PATTERN_STATES.min(MAX_TOTAL_STATES.saturating_sub(total));
            let p = build_pattern(task, &variables, &mutexes, &goal, pattern_vars(seeds), &init_values, budget);
            if let Some(p) = &p {
                total += p.table.len();
            }
            Ok(p)
        };

        let mut singles = Vec::new();
        for &v in &goal_vars {
            singles.push(build(&[v]).ok()??);
        }
        let mut pairs = Vec::new();
        for i in 0..goal_vars.len() {
            for j in i + 1..goal_vars.len() {
                if let Some(p) = build(&[goal_vars[i], goal_vars[j]]).ok()? {
                    pairs.push((i, j, p));
                }
            }
        }
        let n_singles = singles.len();
        Some(PairwisePdb { task, variables, singles, pairs, scratch: Vec::new(), single_h: vec![0; n_singles] })
    }

    /// `None` marks a state from which some projection cannot reach its goal.
    pub fn eval(&mut self, s: &State) -> Option<u64> {
        if self.task.goal_unreachable {
            return None;
        }
        self.variables.project(s, &mut self.scratch);
        let mut h = 0u64;
        for (i, p) in self.singles.iter().enumerate() {
            let d = p.lookup(&self.scratch)?;
            self.single_h[i] = d;
            h += u64::from(d);
        }
        for (i, j, p) in &self.pairs {
            let d = p.lookup(&self.scratch)?;
            h += u64::from(d.saturating_sub(self.single_h[*i] + self.single_h[*j]));
        }
        Some(h)
    }
}

fn build_pattern(
    task: &GroundTask,
    variables: &Variables,
    mutexes: &Mutexes,
    goal: &[Option<Vec<bool>>],
    vars: Vec<usize>,
    init_values: &[usize],
    budget: usize,
) -> Option<Pattern> {
    let mut radix = Vec::with_capacity(vars.len());
    let mut r: u64 = 1;
    for &v in &vars {
        radix.push(r);
        r = r.checked_mul(variables.vars[v].domain() as u64)?;
    }
    let mut pos = vec![usize::MAX; variables.vars.len()];
    for (i, &v) in vars.iter().enumerate() {
        pos[v] = i;
    }

    // literals that hold when pattern position `i` has value `x`
    let value_lits = |i: usize, x: usize| -> Vec<usize> {
        let var = &variables.vars[vars[i]];
        if x < var.fluents.len() {
            vec![2 * var.fluents[x]]
        } else {
            var.fluents.iter().map(|&f| 2 * f + 1).collect()
        }
    };

    let mut ops: HashMap<AbstractOp, u64> = HashMap::new();
    for a in &task.actions {
        let mut eff: Vec<(usize, usize)> = Vec::new();
        for &f in &a.add {
            let (v, x) = variables.of[f];
            if pos[v] != usize::MAX {
                eff.push((pos[v], x));
            }
        }
        for &f in &a.del {
            let (v, _) = variables.of[f];
            if pos[v] != usize::MAX && !a.add.contains(&f) && !eff.iter().any(|&(p, _)| p == pos[v]) {
                eff.push((pos[v], variables.vars[v].fluents.len()));
            }
        }
        if eff.is_empty() {
            continue;
        }
        let mut pre = Vec::new();
        let mut dropped = Vec::new();
        for (&f, positive) in a.pre_pos.iter().map(|f| (f, true)).chain(a.pre_neg.iter().map(|f| (f, false))) {
            let (v, x) = variables.of[f];
            if pos[v] != usize::MAX {
                pre.push((pos[v], x, positive));
            } else {
                dropped.push(if positive { 2 * f } else { 2 * f + 1 });
            }
        }
        if dropped.iter().any(|&p| dropped.iter().any(|&q| mutexes.mutex(p, q))) {
            continue;
        }
        let mut blocked = Vec::new();
        for (i, &v) in vars.iter().enumerate() {
            for x in 0..variables.vars[v].domain() {
                let lits = value_lits(i, x);
                if dropped.iter().any(|&d| lits.iter().any(|&l| mutexes.mutex(d, l))) {
                    blocked.push((i, x));
                }
            }
        }
        pre.sort_unstable();
        eff.sort_unstable();
        let op = AbstractOp { pre, eff, blocked };
        let c = ops.entry(op).or_insert(u64::MAX);
        *c = (*c).min(a.cost);
    }
    let mut ops: Vec<(AbstractOp, u64)> = ops.into_iter().collect();
    ops.sort_by(|a, b| a.0.eff.cmp(&b.0.eff).then_with(|| a.0.pre.cmp(&b.0.pre)).then(a.1.cmp(&b.1)));

    // forward exploration from the projected initial state
    let start: Vec<usize> = vars.iter().map(|&v| init_values[v]).collect();
    let encode = |vals: &[usize]| -> u64 { vals.iter().zip(&radix).map(|(&x, &r)| x as u64 * r).sum() };
    let mut index: FxHashMap<u64, u32> = FxHashMap::default();
    let mut states: Vec<Vec<usize>> = vec![start.clone()];
    index.insert(encode(&start), 0);
    let mut edges: Vec<(u32, u32, u64)> = Vec::new();
    let mut next = 0usize;
    while next < states.len() {
        let from = next as u32;
        next += 1;
        for (op, cost) in &ops {
            let vals = &states[from as usize];
            if !op.applicable(vals) {
                continue;
            }
            let mut succ = vals.clone();
            for &(p, x) in &op.eff {
                succ[p] = x;
            }
            let key = encode(&succ);
            let to = match index.get(&key) {
                Some(&id) => id,
                None => {
                    if states.len() >= budget {
                        return None;
                    }
                    let id = states.len() as u32;
                    index.insert(key, id);
                    states.push(succ);
                    id
                }
            };
            if to != from {
                edges.push((from, to, *cost));
            }
        }
    }

    // backward Dijkstra from the abstract goal states
    let n = states.len();
    let mut rev_start = vec![0usize; n + 1];
    for &(_, to, _) in &edges {
        rev_start[to as usize + 1] += 1;
    }
    for i in 0..n {
        rev_start[i + 1] += rev_start[i];
    }
    let mut fill = rev_start.clone();
    let mut rev = vec![(0u32, 0u64); edges.len()];
    for &(from, to, c) in &edges {
        rev[fill[to as usize]] = (from, c);
        fill[to as usize] += 1;
    }
    let mut dist = vec![u64::MAX; n];
    let mut heap = BinaryHeap::new();
    for (i, vals) in states.iter().enumerate() {
        let is_goal = vars.iter().zip(vals).all(|(&v, &x)| goal[v].as_ref().is_none_or(|allowed| allowed[x]));
        if is_goal {
            dist[i] = 0;
            heap.push(Reverse((0u64, i)));
        }
    }
    while let Some(Reverse((d, i))) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        for &(from, c) in &rev[rev_start[i]..rev_start[i + 1]] {
            let nd = d.saturating_add(c);
            if nd < dist[from as usize] {
                dist[from as usize] = nd;
                heap.push(Reverse((nd, from as usize)));
            }
        }
    }
    let table = index.into_iter().map(|(k, id)| (k, u32::try_from(dist[id as usize]).unwrap_or(UNREACHABLE))).collect();
    Some(Pattern { vars, radix, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{demo_model, generate_permutation_goals};
    use crate::pddl::Atom;
    use crate::planner::ground::ground;
    use crate::transform::{derive_domain, derive_problem};
    use std::time::Duration;

    fn demo_task() -> GroundTask {
        let m = demo_model();
        let goal = generate_permutation_goals(&m).unwrap().into_iter().find(|g| g.id == "goal-2341").unwrap();
        let (d, _) = derive_domain(&m).unwrap();
        ground(&d, &derive_problem(&m, &goal).unwrap()).unwrap()
    }

    #[test]
    fn shuttle_locations_form_one_variable_per_shuttle() {
        let t = demo_task();
        let vars = find_variables(&t);
        let multi: Vec<&Var> = vars.vars.iter().filter(|v| v.fluents.len() > 1).collect();
        assert_eq!(multi.len(), 4);
        for v in multi {
            assert_eq!(v.fluents.len(), 5);
            assert!(v.fluents.iter().all(|&f| t.fluents[f].predicate == "ShuttleLocation"));
        }
    }

    #[test]
    fn two_shuttles_on_one_station_are_mutex() {
        let t = demo_task();
        let m = Mutexes::compute(&t);
        let f = |s: &str, p: &str| {
            t.fluent(&Atom::ground("ShuttleLocation", &[format!("E_Shuttle-0{s}"), format!("E_PositioningUnit-0{p}")]))
                .unwrap()
        };
        assert!(m.mutex(2 * f("1", "5"), 2 * f("2", "5")));
        assert!(!m.mutex(2 * f("1", "5"), 2 * f("2", "3")));
        assert!(m.mutex(2 * f("1", "3"), 2 * f("1", "5")));
    }

    #[test]
    fn estimate_is_zero_exactly_at_goal_states_on_the_plan() {
        let t = demo_task();
        let mut h = PairwisePdb::build(&t, Instant::now() + Duration::from_secs(10)).unwrap();
        assert_eq!((h.singles.len(), h.pairs.len()), (4, 6));
        let plan = crate::pddl::parse_plan(
            "(moveshuttle e_shuttle-01 e_positioningunit-03 e_positioningunit-05)
             (moveshuttle e_shuttle-02 e_positioningunit-01 e_positioningunit-03)
             (moveshuttle e_shuttle-03 e_positioningunit-04 e_positioningunit-01)
             (moveshuttle e_shuttle-04 e_positioningunit-02 e_positioningunit-04)
             (moveshuttle e_shuttle-01 e_positioningunit-05 e_positioningunit-02)",
        )
        .unwrap();
        let (states, _) = crate::planner::simulate(&t, &plan).unwrap();
        let values: Vec<u64> = states.iter().map(|s| h.eval(s).unwrap()).collect();
        assert!(values[0] > 0);
        assert_eq!(*values.last().unwrap(), 0);
        assert!(values[..values.len() - 1].iter().all(|&v| v > 0));
    }
}
