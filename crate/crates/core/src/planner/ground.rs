use std::collections::{HashMap, HashSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::pddl::{Atom, Condition, Effect, PddlAction, PddlDomain, PddlProblem, Term, Typed, OBJECT};

/// A search state: the set of true fluents.
pub type State = FixedBitSet;

/// Upper bound on the number of precondition variants one binding may split into.
const MAX_VARIANTS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("problem is for domain `{problem}`, not `{domain}`")]
    DomainMismatch { domain: String, problem: String },
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("variable `?{var}` is not bound in action `{action}`")]
    UnboundVariable { action: String, var: String },
    #[error("precondition of `{0}` splits into too many variants")]
    TooManyVariants(String),
    #[error("conditional effect of `{0}` depends on a changing fact the precondition does not settle")]
    UnsupportedConditionalEffect(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
    pub pre_pos: Vec<usize>,
    pub pre_neg: Vec<usize>,
    pub add: Vec<usize>,
    pub del: Vec<usize>,
    pub cost: u64,
}

impl GroundAction {
    pub fn applicable(&self, s: &State) -> bool {
        self.pre_pos.iter().all(|&f| s.contains(f)) && !self.pre_neg.iter().any(|&f| s.contains(f))
    }

    /// Successor state; deletes happen before adds.
    pub fn apply(&self, s: &State) -> State {
        let mut next = s.clone();
        for &f in &self.del {
            next.set(f, false);
        }
        for &f in &self.add {
            next.insert(f);
        }
        next
    }

    /// Lowercased `(name arg ...)`, the key used to match plan steps.
    pub fn key(&self) -> String {
        step_key(&self.name, &self.args)
    }
}

pub(crate) fn step_key<S: AsRef<str>>(name: &str, args: &[S]) -> String {
    let mut k = format!("({}", name.to_ascii_lowercase());
    for a in args {
        k.push(' ');
        k.push_str(&a.as_ref().to_ascii_lowercase());
    }
    k.push(')');
    k
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// A grounded planning task over a finite fluent set.
#[derive(Debug, Clone)]
pub struct GroundTask {
    /// Ground atoms whose truth may change, indexed by fluent id.
    pub fluents: Vec<Atom>,
    /// True atoms over predicates no action modifies.
    pub statics: Vec<Atom>,
    pub actions: Vec<GroundAction>,
    pub init: State,
    pub goal_pos: Vec<usize>,
    pub goal_neg: Vec<usize>,
    /// Set when the goal contradicts the static facts or itself; such a task
    /// has no solution regardless of search.
    pub goal_unreachable: bool,
    fluent_index: HashMap<String, usize>,
    action_index: HashMap<String, Vec<usize>>,
}

impl GroundTask {
    pub fn is_goal(&self, s: &State) -> bool {
        !self.goal_unreachable
            && self.goal_pos.iter().all(|&f| s.contains(f))
            && !self.goal_neg.iter().any(|&f| s.contains(f))
    }

    /// Fluent id of a ground atom, compared case-insensitively.
    pub fn fluent(&self, atom: &Atom) -> Option<usize> {
        self.fluent_index.get(&atom.to_string().to_ascii_lowercase()).copied()
    }

    /// Ground actions matching a plan step, compared case-insensitively.
    /// Several variants may share one name and argument list.
    pub fn actions_named<S: AsRef<str>>(&self, name: &str, args: &[S]) -> &[usize] {
        self.action_index.get(&step_key(name, args)).map_or(&[], Vec::as_slice)
    }

    pub fn true_fluents<'a>(&'a self, s: &'a State) -> impl Iterator<Item = &'a Atom> + 'a {
        s.ones().map(|i| &self.fluents[i])
    }
}

/// Lower-cased variable name -> object index.
type Binding = HashMap<String, usize>;

/// An effect on one fluent (`true` adds, `false` deletes), optionally guarded.
type GuardedEffect = (Option<G>, usize, bool);

/// Ground formula after static evaluation.
#[derive(Debug, Clone, PartialEq)]
enum G {
    True,
    False,
    Lit(usize, bool),
    And(Vec<G>),
    Or(Vec<G>),
}

fn and(parts: Vec<G>) -> G {
    let mut out = Vec::new();
    for p in parts {
        match p {
            G::True => {}
            G::False => return G::False,
            G::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => G::True,
        1 => out.pop().unwrap(),
        _ => G::And(out),
    }
}

fn or(parts: Vec<G>) -> G {
    let mut out = Vec::new();
    for p in parts {
        match p {
            G::False => {}
            G::True => return G::True,
            G::Or(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => G::False,
        1 => out.pop().unwrap(),
        _ => G::Or(out),
    }
}

fn negate(g: G) -> G {
    match g {
        G::True => G::False,
        G::False => G::True,
        G::Lit(f, v) => G::Lit(f, !v),
        G::And(parts) => or(parts.into_iter().map(negate).collect()),
        G::Or(parts) => and(parts.into_iter().map(negate).collect()),
    }
}

type Conj = Vec<(usize, bool)>;

fn dnf(g: &G, action: &str) -> Result<Vec<Conj>, GroundError> {
    Ok(match g {
        G::True => vec![vec![]],
        G::False => vec![],
        G::Lit(f, v) => vec![vec![(*f, *v)]],
        G::Or(parts) => {
            let mut out = Vec::new();
            for p in parts {
                out.extend(dnf(p, action)?);
                if out.len() > MAX_VARIANTS {
                    return Err(GroundError::TooManyVariants(action.to_string()));
                }
            }
            out
        }
        G::And(parts) => {
            let mut acc: Vec<Conj> = vec![vec![]];
            for p in parts {
                let d = dnf(p, action)?;
                if acc.len() * d.len() > MAX_VARIANTS {
                    return Err(GroundError::TooManyVariants(action.to_string()));
                }
                acc = acc.iter().flat_map(|a| d.iter().map(move |b| a.iter().chain(b).copied().collect())).collect();
            }
            acc
        }
    })
}

/// Three-valued evaluation of `g` given the literals of `conj`.
fn settle(g: &G, conj: &Conj) -> Option<bool> {
    match g {
        G::True => Some(true),
        G::False => Some(false),
        G::Lit(f, v) => {
            if conj.contains(&(*f, *v)) {
                Some(true)
            } else if conj.contains(&(*f, !*v)) {
                Some(false)
            } else {
                None
            }
        }
        G::And(parts) => {
            let mut all = Some(true);
            for p in parts {
                match settle(p, conj) {
                    Some(false) => return Some(false),
                    None => all = None,
                    Some(true) => {}
                }
            }
            all
        }
        G::Or(parts) => {
            let mut any = Some(false);
            for p in parts {
                match settle(p, conj) {
                    Some(true) => return Some(true),
                    None => any = None,
                    Some(false) => {}
                }
            }
            any
        }
    }
}

struct Universe {
    /// Declared spelling of each object.
    names: Vec<String>,
    by_name: HashMap<String, usize>,
    /// lowercase type -> object ids (including subtypes)
    instances: HashMap<String, Vec<usize>>,
    object_types: Vec<String>,
    /// lowercase type -> lowercase parent
    parents: HashMap<String, String>,
}

impl Universe {
    fn new(domain: &PddlDomain, problem: &PddlProblem) -> Result<Self, GroundError> {
        let mut parents = HashMap::new();
        for t in &domain.types {
            parents.insert(t.name.to_ascii_lowercase(), t.ty.to_ascii_lowercase());
        }
        let mut u = Universe {
            names: vec![],
            by_name: HashMap::new(),
            instances: HashMap::new(),
            object_types: vec![],
            parents,
        };
        for o in domain.constants.iter().chain(&problem.objects) {
            u.add(o)?;
        }
        Ok(u)
    }

    fn check_type(&self, ty: &str) -> Result<String, GroundError> {
        let t = ty.to_ascii_lowercase();
        if t == OBJECT || self.parents.contains_key(&t) {
            Ok(t)
        } else {
            Err(GroundError::UnknownType(ty.to_string()))
        }
    }

    fn ancestors(&self, ty: &str) -> Vec<String> {
        let mut out = vec![ty.to_string()];
        let mut cur = ty.to_string();
        while let Some(p) = self.parents.get(&cur) {
            if out.contains(p) {
                break;
            }
            out.push(p.clone());
            cur = p.clone();
        }
        if !out.iter().any(|t| t == OBJECT) {
            out.push(OBJECT.to_string());
        }
        out
    }

    fn add(&mut self, o: &Typed) -> Result<(), GroundError> {
        let ty = self.check_type(&o.ty)?;
        let key = o.name.to_ascii_lowercase();
        if let Some(&id) = self.by_name.get(&key) {
            if self.object_types[id] != ty {
                return Err(GroundError::TypeMismatch(format!(
                    "object `{}` declared as both `{}` and `{}`",
                    o.name, self.object_types[id], ty
                )));
            }
            return Ok(());
        }
        let id = self.names.len();
        self.names.push(o.name.clone());
        self.by_name.insert(key, id);
        for t in self.ancestors(&ty) {
            self.instances.entry(t).or_default().push(id);
        }
        self.object_types.push(ty);
        Ok(())
    }

    fn of_type(&self, ty: &str) -> Result<&[usize], GroundError> {
        let t = self.check_type(ty)?;
        Ok(self.instances.get(&t).map_or(&[], Vec::as_slice))
    }

    fn is_a(&self, obj: usize, ty: &str) -> bool {
        let t = ty.to_ascii_lowercase();
        self.instances.get(&t).is_some_and(|v| v.contains(&obj))
    }

    fn object(&self, name: &str) -> Result<usize, GroundError> {
        self.by_name
            .get(&name.to_ascii_lowercase())
            .copied()
            .ok_or_else(|| GroundError::UnknownObject(name.to_string()))
    }
}

struct Predicates {
    by_name: HashMap<String, usize>,
    names: Vec<String>,
    param_types: Vec<Vec<String>>,
    is_static: Vec<bool>,
}

fn effect_predicates(a: &PddlAction) -> impl Iterator<Item = &str> {
    a.effects.iter().flat_map(|e| -> Vec<&str> {
        match e {
            Effect::Literal(l) => vec![l.atom.predicate.as_str()],
            Effect::Conditional { effects, .. } => effects.iter().map(|l| l.atom.predicate.as_str()).collect(),
            Effect::IncreaseTotalCost(_) => vec![],
        }
    })
}

impl Predicates {
    fn new(domain: &PddlDomain) -> Self {
        let changing: HashSet<String> =
            domain.actions.iter().flat_map(effect_predicates).map(str::to_ascii_lowercase).collect();
        let mut p = Predicates { by_name: HashMap::new(), names: vec![], param_types: vec![], is_static: vec![] };
        for d in &domain.predicates {
            let key = d.name.to_ascii_lowercase();
            if p.by_name.contains_key(&key) {
                continue;
            }
            p.by_name.insert(key.clone(), p.names.len());
            p.names.push(d.name.clone());
            p.param_types.push(d.params.iter().map(|t| t.ty.clone()).collect());
            p.is_static.push(!changing.contains(&key));
        }
        p
    }

    fn get(&self, name: &str) -> Result<usize, GroundError> {
        self.by_name
            .get(&name.to_ascii_lowercase())
            .copied()
            .ok_or_else(|| GroundError::UnknownPredicate(name.to_string()))
    }
}

type Key = (usize, Vec<usize>);

struct Grounder<'a> {
    u: Universe,
    preds: Predicates,
    statics: HashSet<Key>,
    fluents: Vec<Key>,
    fluent_ids: HashMap<Key, usize>,
    domain: &'a PddlDomain,
}

impl Grounder<'_> {
    fn intern(&mut self, key: Key) -> usize {
        if let Some(&id) = self.fluent_ids.get(&key) {
            return id;
        }
        let id = self.fluents.len();
        self.fluents.push(key.clone());
        self.fluent_ids.insert(key, id);
        id
    }

    fn resolve(&self, atom: &Atom, binding: &HashMap<String, usize>, action: &str) -> Result<Key, GroundError> {
        let pred = self.preds.get(&atom.predicate)?;
        let types = &self.preds.param_types[pred];
        if types.len() != atom.args.len() {
            return Err(GroundError::TypeMismatch(format!(
                "`{}` takes {} argument(s), got {}",
                atom.predicate,
                types.len(),
                atom.args.len()
            )));
        }
        let mut args = Vec::with_capacity(atom.args.len());
        for t in &atom.args {
            args.push(match t {
                Term::Var(v) => *binding
                    .get(&v.to_ascii_lowercase())
                    .ok_or_else(|| GroundError::UnboundVariable { action: action.to_string(), var: v.clone() })?,
                Term::Const(c) => self.u.object(c)?,
            });
        }
        Ok((pred, args))
    }

    /// Atom truth under the static facts, or a fluent literal. Ill-typed
    /// arguments make the atom false.
    fn ground_atom(&mut self, key: Key) -> G {
        let well_typed = key.1.iter().zip(&self.preds.param_types[key.0]).all(|(&o, ty)| self.u.is_a(o, ty));
        if !well_typed {
            return G::False;
        }
        if self.preds.is_static[key.0] {
            if self.statics.contains(&key) {
                G::True
            } else {
                G::False
            }
        } else {
            G::Lit(self.intern(key), true)
        }
    }

    fn quantified(
        &mut self,
        vars: &[Typed],
        binding: &mut Binding,
        f: &mut dyn FnMut(&mut Self, &mut Binding) -> Result<(), GroundError>,
    ) -> Result<(), GroundError> {
        let Some((first, rest)) = vars.split_first() else {
            return f(self, binding);
        };
        let key = first.name.to_ascii_lowercase();
        let previous = binding.get(&key).copied();
        let domain_objs = self.u.of_type(&first.ty)?.to_vec();
        for o in domain_objs {
            binding.insert(key.clone(), o);
            self.quantified(rest, binding, f)?;
        }
        match previous {
            Some(p) => binding.insert(key, p),
            None => binding.remove(&key),
        };
        Ok(())
    }

    fn condition(
        &mut self,
        c: &Condition,
        binding: &mut HashMap<String, usize>,
        action: &str,
    ) -> Result<G, GroundError> {
        Ok(match c {
            Condition::Atom(a) => {
                let key = self.resolve(a, binding, action)?;
                self.ground_atom(key)
            }
            Condition::Not(inner) => negate(self.condition(inner, binding, action)?),
            Condition::And(parts) => {
                let mut out = Vec::with_capacity(parts.len());
                for p in parts {
                    let g = self.condition(p, binding, action)?;
                    if g == G::False {
                        return Ok(G::False);
                    }
                    out.push(g);
                }
                and(out)
            }
            Condition::Exists(vars, body) | Condition::Forall(vars, body) => {
                let exists = matches!(c, Condition::Exists(..));
                let mut parts = Vec::new();
                self.quantified(vars, binding, &mut |g, b| {
                    parts.push(g.condition(body, b, action)?);
                    Ok(())
                })?;
                if exists {
                    or(parts)
                } else {
                    and(parts)
                }
            }
        })
    }

    /// Ground effects of one binding: unconditional literals plus conditional
    /// ones still to be settled per precondition variant.
    fn effects(
        &mut self,
        a: &PddlAction,
        binding: &mut HashMap<String, usize>,
    ) -> Result<(Vec<GuardedEffect>, u64), GroundError> {
        let mut out = Vec::new();
        let mut cost = 0;
        for e in &a.effects {
            match e {
                Effect::Literal(l) => {
                    let key = self.resolve(&l.atom, binding, &a.name)?;
                    out.push((None, self.intern(key), l.positive));
                }
                Effect::IncreaseTotalCost(c) => cost += c,
                Effect::Conditional { vars, condition, effects } => {
                    self.quantified(vars, binding, &mut |g, b| {
                        let cond = match condition {
                            Some(c) => g.condition(c, b, &a.name)?,
                            None => G::True,
                        };
                        if cond == G::False {
                            return Ok(());
                        }
                        for l in effects {
                            let key = g.resolve(&l.atom, b, &a.name)?;
                            let f = g.intern(key);
                            out.push((if cond == G::True { None } else { Some(cond.clone()) }, f, l.positive));
                        }
                        Ok(())
                    })?;
                }
            }
        }
        Ok((out, cost))
    }
}

/// A precondition conjunct over a static predicate, checkable as soon as the
/// parameters it mentions are bound.
struct StaticCheck {
    pred: usize,
    args: Vec<Result<usize, usize>>, // Ok(object) | Err(parameter index)
    positive: bool,
    level: Option<usize>,
}

fn static_checks(g: &Grounder<'_>, a: &PddlAction, params: &[String]) -> Result<Vec<StaticCheck>, GroundError> {
    let top: Vec<&Condition> = match &a.precondition {
        Some(Condition::And(parts)) => parts.iter().collect(),
        Some(c) => vec![c],
        None => vec![],
    };
    let mut out = Vec::new();
    for c in top {
        let (atom, positive) = match c {
            Condition::Atom(at) => (at, true),
            Condition::Not(inner) => match inner.as_ref() {
                Condition::Atom(at) => (at, false),
                _ => continue,
            },
            _ => continue,
        };
        let pred = g.preds.get(&atom.predicate)?;
        if !g.preds.is_static[pred] || g.preds.param_types[pred].len() != atom.args.len() {
            continue;
        }
        let mut args = Vec::new();
        let mut level = None;
        for t in &atom.args {
            args.push(match t {
                Term::Const(c) => Ok(g.u.object(c)?),
                Term::Var(v) => {
                    let i = params
                        .iter()
                        .position(|p| p.eq_ignore_ascii_case(v))
                        .ok_or_else(|| GroundError::UnboundVariable { action: a.name.clone(), var: v.clone() })?;
                    level = level.max(Some(i));
                    Err(i)
                }
            });
        }
        out.push(StaticCheck { pred, args, positive, level });
    }
    Ok(out)
}

impl StaticCheck {
    fn holds(&self, g: &Grounder<'_>, bound: &[usize]) -> bool {
        let args: Vec<usize> = self
            .args
            .iter()
            .map(|a| match a {
                Ok(o) => *o,
                Err(i) => bound[*i],
            })
            .collect();
        let well_typed = args.iter().zip(&g.preds.param_types[self.pred]).all(|(&o, ty)| g.u.is_a(o, ty));
        (well_typed && g.statics.contains(&(self.pred, args))) == self.positive
    }
}

fn bindings(
    g: &Grounder<'_>,
    domains: &[Vec<usize>],
    checks: &[StaticCheck],
    bound: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let i = bound.len();
    if i == domains.len() {
        out.push(bound.clone());
        return;
    }
    for &o in &domains[i] {
        bound.push(o);
        if checks.iter().filter(|c| c.level == Some(i)).all(|c| c.holds(g, bound)) {
            bindings(g, domains, checks, bound, out);
        }
        bound.pop();
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Instantiates every action over type-consistent object tuples and compiles
/// quantifiers and conditional effects away.
pub fn ground(domain: &PddlDomain, problem: &PddlProblem) -> Result<GroundTask, GroundError> {
    if !problem.domain_name.eq_ignore_ascii_case(&domain.name) {
        return Err(GroundError::DomainMismatch { domain: domain.name.clone(), problem: problem.domain_name.clone() });
    }
    let u = Universe::new(domain, problem)?;
    let preds = Predicates::new(domain);
    for p in &preds.param_types {
        for t in p {
            u.check_type(t)?;
        }
    }
    let mut g = Grounder { u, preds, statics: HashSet::new(), fluents: vec![], fluent_ids: HashMap::new(), domain };

    let mut init_fluents = Vec::new();
    for a in &problem.init {
        let key = g.resolve(a, &HashMap::new(), "init")?;
        for (&o, ty) in key.1.iter().zip(&g.preds.param_types[key.0]) {
            if !g.u.is_a(o, ty) {
                return Err(GroundError::TypeMismatch(format!("initial atom {a}: `{}` is not a `{ty}`", g.u.names[o])));
            }
        }
        if g.preds.is_static[key.0] {
            g.statics.insert(key);
        } else {
            init_fluents.push(g.intern(key));
        }
    }

    let unit_costs =
        !domain.actions.iter().any(|a| a.effects.iter().any(|e| matches!(e, Effect::IncreaseTotalCost(_))));
    let mut actions = Vec::new();
    for a in &g.domain.actions {
        let params: Vec<String> = a.parameters.iter().map(|p| p.name.to_ascii_lowercase()).collect();
        let domains: Vec<Vec<usize>> =
            a.parameters.iter().map(|p| g.u.of_type(&p.ty).map(<[usize]>::to_vec)).collect::<Result<_, _>>()?;
        let checks = static_checks(&g, a, &params)?;
        if checks.iter().any(|c| c.level.is_none() && !c.holds(&g, &[])) {
            continue;
        }
        let mut tuples = Vec::new();
        bindings(&g, &domains, &checks, &mut Vec::new(), &mut tuples);
        for tuple in tuples {
            let mut binding: HashMap<String, usize> = params.iter().cloned().zip(tuple.iter().copied()).collect();
            let pre = match &a.precondition {
                Some(c) => g.condition(c, &mut binding, &a.name)?,
                None => G::True,
            };
            let variants = dnf(&pre, &a.name)?;
            if variants.is_empty() {
                continue;
            }
            let (effects, cost) = g.effects(a, &mut binding)?;
            for conj in variants {
                let pre_pos = sorted(conj.iter().filter(|l| l.1).map(|l| l.0).collect());
                let pre_neg = sorted(conj.iter().filter(|l| !l.1).map(|l| l.0).collect());
                if pre_pos.iter().any(|f| pre_neg.binary_search(f).is_ok()) {
                    continue;
                }
                let mut add = Vec::new();
                let mut del = Vec::new();
                for (cond, f, positive) in &effects {
                    let fires = match cond {
                        None => true,
                        Some(c) => {
                            settle(c, &conj).ok_or_else(|| GroundError::UnsupportedConditionalEffect(a.name.clone()))?
                        }
                    };
                    if fires {
                        if *positive {
                            add.push(*f)
                        } else {
                            del.push(*f)
                        }
                    }
                }
                let add = sorted(add);
                let del = sorted(del.into_iter().filter(|f| add.binary_search(f).is_err()).collect());
                actions.push(GroundAction {
                    name: a.name.clone(),
                    args: tuple.iter().map(|&o| g.u.names[o].clone()).collect(),
                    pre_pos,
                    pre_neg,
                    add,
                    del,
                    cost: if unit_costs { 1 } else { cost },
                });
            }
        }
    }

    let mut goal_pos = Vec::new();
    let mut goal_neg = Vec::new();
    let mut goal_unreachable = false;
    for l in &problem.goal {
        let key = g.resolve(&l.atom, &HashMap::new(), "goal")?;
        match g.ground_atom(key) {
            G::Lit(f, _) => {
                if l.positive {
                    goal_pos.push(f)
                } else {
                    goal_neg.push(f)
                }
            }
            G::True => goal_unreachable |= !l.positive,
            _ => goal_unreachable |= l.positive,
        }
    }
    let goal_pos = sorted(goal_pos);
    let goal_neg = sorted(goal_neg);
    goal_unreachable |= goal_pos.iter().any(|f| goal_neg.binary_search(f).is_ok());

    let to_atom = |(p, args): &Key| {
        Atom::ground(g.preds.names[*p].clone(), &args.iter().map(|&o| &g.u.names[o]).collect::<Vec<_>>())
    };
    let fluents: Vec<Atom> = g.fluents.iter().map(to_atom).collect();
    let mut statics: Vec<Atom> = g.statics.iter().map(to_atom).collect();
    statics.sort();
    let mut init = FixedBitSet::with_capacity(fluents.len());
    for f in init_fluents {
        init.insert(f);
    }
    let fluent_index = fluents.iter().enumerate().map(|(i, a)| (a.to_string().to_ascii_lowercase(), i)).collect();
    let mut action_index: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, a) in actions.iter().enumerate() {
        action_index.entry(a.key()).or_default().push(i);
    }
    Ok(GroundTask { fluents, statics, actions, init, goal_pos, goal_neg, goal_unreachable, fluent_index, action_index })
}
