//! Strategies for PDDL ASTs whose text form parses back unchanged.

use isaplan_core::pddl::*;
use proptest::collection::vec;
use proptest::prelude::*;

pub fn ident() -> impl Strategy<Value = String> {
    "[a-zA-Z][a-zA-Z0-9_-]{0,6}"
}

/// Predicate names never collide with formula keywords.
pub fn pred_name() -> impl Strategy<Value = String> {
    ident().prop_map(|s| format!("p-{s}"))
}

pub fn typed(max: usize) -> impl Strategy<Value = Vec<Typed>> {
    vec((ident(), prop_oneof![Just(OBJECT.to_string()), ident()]), 0..max)
        .prop_map(|v| v.into_iter().map(|(n, t)| Typed::new(n, t)).collect())
}

pub fn term() -> impl Strategy<Value = Term> {
    prop_oneof![ident().prop_map(Term::Var), ident().prop_map(Term::Const)]
}

pub fn atom() -> impl Strategy<Value = Atom> {
    (pred_name(), vec(term(), 0..4)).prop_map(|(p, a)| Atom::new(p, a))
}

pub fn ground_atom() -> impl Strategy<Value = Atom> {
    (pred_name(), vec(ident(), 0..4)).prop_map(|(p, a)| Atom::ground(p, &a))
}

pub fn literal(a: impl Strategy<Value = Atom>) -> impl Strategy<Value = Literal> {
    (any::<bool>(), a).prop_map(|(positive, atom)| Literal { positive, atom })
}

pub fn condition() -> impl Strategy<Value = Condition> {
    atom().prop_map(Condition::Atom).prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            inner.clone().prop_map(Condition::not),
            vec(inner.clone(), 0..4).prop_map(Condition::And),
            (typed(3), inner.clone()).prop_map(|(v, c)| Condition::Exists(v, Box::new(c))),
            (typed(3), inner).prop_map(|(v, c)| Condition::Forall(v, Box::new(c))),
        ]
    })
}

pub fn effect() -> impl Strategy<Value = Effect> {
    prop_oneof![
        literal(atom()).prop_map(Effect::Literal),
        any::<u32>().prop_map(|c| Effect::IncreaseTotalCost(c.into())),
        // A conditional effect needs variables, a condition, or both.
        (typed(3), proptest::option::of(condition()), vec(literal(atom()), 0..3))
            .prop_filter("bare conjunction", |(v, c, _)| !v.is_empty() || c.is_some())
            .prop_map(|(vars, condition, effects)| Effect::Conditional { vars, condition, effects }),
    ]
}

pub fn action() -> impl Strategy<Value = PddlAction> {
    (ident(), typed(4), proptest::option::of(condition()), vec(effect(), 0..4))
        .prop_map(|(name, parameters, precondition, effects)| PddlAction { name, parameters, precondition, effects })
}

pub fn decls() -> impl Strategy<Value = Vec<(String, Vec<Typed>)>> {
    vec((pred_name(), typed(3)), 0..4)
}

pub fn domain() -> impl Strategy<Value = PddlDomain> {
    (
        ident(),
        vec(proptest::sample::select(Requirement::ALL.to_vec()), 0..4),
        typed(4),
        typed(4),
        decls(),
        decls(),
        vec(action(), 0..4),
    )
        .prop_map(|(name, requirements, types, constants, preds, funcs, actions)| PddlDomain {
            name,
            requirements,
            types,
            constants,
            predicates: preds.into_iter().map(|(name, params)| PredicateDecl { name, params }).collect(),
            functions: funcs.into_iter().map(|(name, params)| FunctionDecl { name, params }).collect(),
            actions,
        })
}

pub fn problem() -> impl Strategy<Value = PddlProblem> {
    (
        ident(),
        ident(),
        typed(6),
        vec(ground_atom(), 0..6),
        proptest::option::of(any::<u32>()),
        vec(literal(ground_atom()), 0..5),
        any::<bool>(),
    )
        .prop_map(|(name, domain_name, objects, init, cost, goal, metric)| PddlProblem {
            name,
            domain_name,
            objects,
            init,
            init_total_cost: cost.map(u64::from),
            goal,
            metric: metric.then_some(Metric::MinimizeTotalCost),
        })
}

pub fn plan() -> impl Strategy<Value = Plan> {
    (vec((ident(), vec(ident(), 0..4)), 0..8), proptest::option::of(any::<u64>())).prop_map(|(steps, cost)| Plan {
        steps: steps.into_iter().map(|(name, args)| PlanStep { name, args }).collect(),
        declared_cost: cost,
    })
}
