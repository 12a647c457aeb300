//! Abstract syntax, writer and parser for the PDDL subset the toolchain emits:
//! STRIPS with typing, negative/existential/universal preconditions,
//! conditional effects and constant action costs. Plans use the common
//! one-action-per-line text format with a `; cost = N` trailer.

mod lexer;
mod parse;
mod plan;
mod write;

use std::fmt;

use thiserror::Error;

pub use parse::{parse_domain, parse_problem};
pub use plan::{parse_plan, serialize_plan, Plan, PlanStep};
pub use write::{serialize_domain, serialize_problem};

/// Name of the only numeric fluent supported.
pub const TOTAL_COST: &str = "total-cost";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PddlError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsupported feature at {line}:{column}: {feature}")]
    Unsupported { line: usize, column: usize, feature: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Requirement {
    Strips,
    Typing,
    NegativePreconditions,
    ExistentialPreconditions,
    UniversalPreconditions,
    ConditionalEffects,
    ActionCosts,
}

impl Requirement {
    pub const ALL: [Requirement; 7] = [
        Requirement::Strips,
        Requirement::Typing,
        Requirement::NegativePreconditions,
        Requirement::ExistentialPreconditions,
        Requirement::UniversalPreconditions,
        Requirement::ConditionalEffects,
        Requirement::ActionCosts,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Requirement::Strips => ":strips",
            Requirement::Typing => ":typing",
            Requirement::NegativePreconditions => ":negative-preconditions",
            Requirement::ExistentialPreconditions => ":existential-preconditions",
            Requirement::UniversalPreconditions => ":universal-preconditions",
            Requirement::ConditionalEffects => ":conditional-effects",
            Requirement::ActionCosts => ":action-costs",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.keyword().eq_ignore_ascii_case(s))
    }
}

/// An entry of a typed list, `name - type`. Untyped entries carry `object`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Typed {
    pub name: String,
    pub ty: String,
}

pub const OBJECT: &str = "object";

impl Typed {
    pub fn new(name: impl Into<String>, ty: impl Into<String>) -> Self {
        Typed { name: name.into(), ty: ty.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    /// Parameter names are stored without the leading `?`.
    pub params: Vec<Typed>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: String,
    pub params: Vec<Typed>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Variable name without the leading `?`.
    Var(String),
    Const(String),
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => f.write_str(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    /// A ground atom over constants.
    pub fn ground<S: AsRef<str>>(predicate: impl Into<String>, args: &[S]) -> Self {
        Atom { predicate: predicate.into(), args: args.iter().map(|a| Term::Const(a.as_ref().to_string())).collect() }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { positive: true, atom }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { positive: false, atom }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "(not {})", self.atom)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Atom(Atom),
    Not(Box<Condition>),
    And(Vec<Condition>),
    Exists(Vec<Typed>, Box<Condition>),
    Forall(Vec<Typed>, Box<Condition>),
}

impl Condition {
    #[allow(clippy::should_implement_trait)]
    pub fn not(c: Condition) -> Self {
        Condition::Not(Box::new(c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Effect {
    Literal(Literal),
    /// `(forall (vars) (when condition effects))`; either part may be absent
    /// but not both.
    Conditional {
        vars: Vec<Typed>,
        condition: Option<Condition>,
        effects: Vec<Literal>,
    },
    IncreaseTotalCost(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PddlAction {
    pub name: String,
    pub parameters: Vec<Typed>,
    pub precondition: Option<Condition>,
    pub effects: Vec<Effect>,
}

impl PddlAction {
    /// Sum of the constant `increase total-cost` effects.
    pub fn cost(&self) -> u64 {
        self.effects
            .iter()
            .map(|e| match e {
                Effect::IncreaseTotalCost(c) => *c,
                _ => 0,
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PddlDomain {
    pub name: String,
    pub requirements: Vec<Requirement>,
    /// Declared types with their parent type.
    pub types: Vec<Typed>,
    pub constants: Vec<Typed>,
    pub predicates: Vec<PredicateDecl>,
    pub functions: Vec<FunctionDecl>,
    pub actions: Vec<PddlAction>,
}

impl PddlDomain {
    pub fn action(&self, name: &str) -> Option<&PddlAction> {
        self.actions.iter().find(|a| a.name.eq_ignore_ascii_case(name))
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name.eq_ignore_ascii_case(name))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    MinimizeTotalCost,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PddlProblem {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<Typed>,
    pub init: Vec<Atom>,
    /// Value of `(= (total-cost) N)` in the initial state, when present.
    pub init_total_cost: Option<u64>,
    pub goal: Vec<Literal>,
    pub metric: Option<Metric>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn requirement_keywords_round_trip() {
        for r in Requirement::ALL {
            assert_eq!(Requirement::from_keyword(r.keyword()), Some(r));
            assert_eq!(Requirement::from_keyword(&r.keyword().to_uppercase()), Some(r));
        }
        assert_eq!(Requirement::from_keyword(":durative-actions"), None);
    }

    #[test]
    fn display_forms() {
        let a = Atom::new("at", vec![Term::Var("s".into()), Term::Const("PU1".into())]);
        assert_eq!(a.to_string(), "(at ?s PU1)");
        assert_eq!(Literal::neg(a).to_string(), "(not (at ?s PU1))");
    }
}
