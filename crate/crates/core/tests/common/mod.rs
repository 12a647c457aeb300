//! Helpers shared by the integration tests: an explicit-state oracle that
//! knows nothing about PDDL, and glue between ground states and arrangements.

#![allow(dead_code)]

pub mod pddl_gen;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet, VecDeque};

use isaplan_core::io::{GoalSpec, MOVE_SEGMENT_SECONDS};
use isaplan_core::model::{build_routing_graph, ProductionModel};
use isaplan_core::pddl::Term;
use isaplan_core::planner::{ground, GroundTask, State};
use isaplan_core::transform::predicates::{PROPERTY_TRUE, SHUTTLE_LOCATION};
use isaplan_core::transform::{derive_domain, derive_problem, TransformReport};

/// The documented demo topology: main loop 1→3→2→4→1 plus siding 3→5→2.
pub const DEMO_EDGES: [(u8, u8); 6] = [(1, 3), (3, 2), (2, 4), (4, 1), (3, 5), (5, 2)];

pub fn pu(n: u8) -> String {
    format!("PositioningUnit-{n:02}")
}

/// Shuttle id → PU id.
pub type Arrangement = BTreeMap<String, String>;

/// Uniform-cost search over shuttle arrangements: a shuttle may move along
/// one edge onto a free PU at the cost of one move segment.
pub struct Oracle {
    nodes: Vec<String>,
    succ: Vec<Vec<usize>>,
    shuttles: Vec<String>,
}

impl Oracle {
    pub fn new(nodes: Vec<String>, edges: impl IntoIterator<Item = (String, String)>, shuttles: Vec<String>) -> Self {
        let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut succ = vec![Vec::new(); nodes.len()];
        for (a, b) in edges {
            succ[index[a.as_str()]].push(index[b.as_str()]);
        }
        Oracle { nodes, succ, shuttles }
    }

    pub fn for_model(model: &ProductionModel) -> Self {
        let g = build_routing_graph(model).unwrap();
        Oracle::new(g.nodes.clone(), g.edges.iter().cloned(), model.shuttle_ids())
    }

    fn encode(&self, arr: &Arrangement) -> Vec<u8> {
        self.shuttles.iter().map(|s| self.nodes.iter().position(|n| *n == arr[s]).unwrap() as u8).collect()
    }

    /// Minimum plan cost in seconds, or `None` if the goal is unreachable.
    pub fn cost(&self, from: &Arrangement, goal: &Arrangement) -> Option<u64> {
        let start = self.encode(from);
        let target: Vec<Option<u8>> = self
            .shuttles
            .iter()
            .map(|s| goal.get(s).map(|p| self.nodes.iter().position(|n| n == p).unwrap() as u8))
            .collect();
        let done = |s: &[u8]| s.iter().zip(&target).all(|(a, t)| t.is_none_or(|t| t == *a));
        let mut dist: HashMap<Vec<u8>, u64> = HashMap::from([(start.clone(), 0)]);
        let mut open = BinaryHeap::from([Reverse((0u64, start))]);
        while let Some(Reverse((d, s))) = open.pop() {
            if dist[&s] < d {
                continue;
            }
            if done(&s) {
                return Some(d);
            }
            for (i, &at) in s.iter().enumerate() {
                for &to in &self.succ[at as usize] {
                    if s.contains(&(to as u8)) {
                        continue;
                    }
                    let mut t = s.clone();
                    t[i] = to as u8;
                    let nd = d + MOVE_SEGMENT_SECONDS;
                    if dist.get(&t).is_none_or(|&old| nd < old) {
                        dist.insert(t.clone(), nd);
                        open.push(Reverse((nd, t)));
                    }
                }
            }
        }
        None
    }

    /// Number of arrangements reachable from `from`.
    pub fn reachable(&self, from: &Arrangement) -> usize {
        let start = self.encode(from);
        let mut seen = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            for (i, &at) in s.iter().enumerate() {
                for &to in &self.succ[at as usize] {
                    if !s.contains(&(to as u8)) {
                        let mut t = s.clone();
                        t[i] = to as u8;
                        if seen.insert(t.clone()) {
                            queue.push_back(t);
                        }
                    }
                }
            }
        }
        seen.len()
    }
}

pub fn identity_goal(model: &ProductionModel) -> GoalSpec {
    GoalSpec {
        id: "goal-identity".into(),
        shuttle_locations: build_routing_graph(model).unwrap().shuttle_at,
        ..Default::default()
    }
}

pub fn initial_arrangement(model: &ProductionModel) -> Arrangement {
    build_routing_graph(model).unwrap().shuttle_at
}

pub fn task_for(model: &ProductionModel, goal: &GoalSpec) -> (GroundTask, TransformReport) {
    let (domain, report) = derive_domain(model).unwrap();
    let problem = derive_problem(model, goal).unwrap();
    (ground(&domain, &problem).unwrap(), report)
}

/// What a ground state says about the shuttles and the occupied flags,
/// translated back to model ids.
#[derive(Debug, Default)]
pub struct Decoded {
    /// Every (shuttle, PU) location atom that holds.
    pub locations: Vec<(String, String)>,
    /// Ids of the equipment properties that are true.
    pub true_properties: Vec<String>,
}

pub fn decode(task: &GroundTask, report: &TransformReport, s: &State) -> Decoded {
    let id = |t: &Term| -> String {
        let Term::Const(c) = t else { panic!("non-ground fluent") };
        report.names.entity(c).unwrap_or_else(|| panic!("unknown object {c}")).1.to_string()
    };
    let mut d = Decoded::default();
    for atom in task.true_fluents(s) {
        if atom.predicate.eq_ignore_ascii_case(SHUTTLE_LOCATION) {
            d.locations.push((id(&atom.args[0]), id(&atom.args[1])));
        } else if atom.predicate.eq_ignore_ascii_case(PROPERTY_TRUE) {
            d.true_properties.push(id(&atom.args[0]));
        }
    }
    d
}

/// Every state reachable from `task.init`.
pub fn explore(task: &GroundTask) -> Vec<State> {
    let mut seen = HashSet::from([task.init.clone()]);
    let mut order = vec![task.init.clone()];
    let mut i = 0;
    while i < order.len() {
        let s = order[i].clone();
        for a in &task.actions {
            if a.applicable(&s) {
                let t = a.apply(&s);
                if seen.insert(t.clone()) {
                    order.push(t);
                }
            }
        }
        i += 1;
    }
    order
}
