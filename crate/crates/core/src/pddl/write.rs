use std::fmt::Write as _;

use super::{Condition, Effect, Literal, Metric, PddlAction, PddlDomain, PddlProblem, Typed, OBJECT, TOTAL_COST};

const INDENT: usize = 2;

fn pad(out: &mut String, n: usize) {
    out.extend(std::iter::repeat_n(' ', n));
}

/// Groups consecutive entries of equal type. Returns `(names, type)` pairs.
fn groups(items: &[Typed]) -> Vec<(Vec<&str>, &str)> {
    let mut out: Vec<(Vec<&str>, &str)> = Vec::new();
    for t in items {
        match out.last_mut() {
            Some((names, ty)) if *ty == t.ty => names.push(&t.name),
            _ => out.push((vec![&t.name], &t.ty)),
        }
    }
    out
}

/// Renders each type group as its own string; the trailing `object` group
/// is left untyped, which is how PDDL reads untyped entries back.
fn typed_groups(items: &[Typed], prefix: &str) -> Vec<String> {
    let gs = groups(items);
    let last = gs.len().saturating_sub(1);
    gs.iter()
        .enumerate()
        .map(|(i, (names, ty))| {
            let mut s = names.iter().map(|n| format!("{prefix}{n}")).collect::<Vec<_>>().join(" ");
            if i != last || *ty != OBJECT {
                let _ = write!(s, " - {ty}");
            }
            s
        })
        .collect()
}

fn typed_inline(items: &[Typed], prefix: &str) -> String {
    typed_groups(items, prefix).join(" ")
}

fn condition(c: &Condition, indent: usize, out: &mut String) {
    match c {
        Condition::Atom(a) => {
            let _ = write!(out, "{a}");
        }
        Condition::Not(inner) => {
            out.push_str("(not ");
            condition(inner, indent + INDENT, out);
            out.push(')');
        }
        Condition::And(parts) => {
            out.push_str("(and");
            for p in parts {
                out.push('\n');
                pad(out, indent + INDENT);
                condition(p, indent + INDENT, out);
            }
            out.push(')');
        }
        Condition::Exists(vars, body) | Condition::Forall(vars, body) => {
            let kw = if matches!(c, Condition::Exists(..)) { "exists" } else { "forall" };
            let _ = write!(out, "({kw} ({}) ", typed_inline(vars, "?"));
            condition(body, indent + INDENT, out);
            out.push(')');
        }
    }
}

fn literals(lits: &[Literal], indent: usize, out: &mut String) {
    out.push_str("(and");
    for l in lits {
        out.push('\n');
        pad(out, indent + INDENT);
        let _ = write!(out, "{l}");
    }
    out.push(')');
}

fn effect(e: &Effect, indent: usize, out: &mut String) {
    match e {
        Effect::Literal(l) => {
            let _ = write!(out, "{l}");
        }
        Effect::IncreaseTotalCost(n) => {
            let _ = write!(out, "(increase ({TOTAL_COST}) {n})");
        }
        Effect::Conditional { vars, condition: cond, effects } => {
            let mut inner = indent;
            if !vars.is_empty() {
                let _ = write!(out, "(forall ({}) ", typed_inline(vars, "?"));
                inner += INDENT;
            }
            match cond {
                Some(c) => {
                    out.push_str("(when ");
                    condition(c, inner + INDENT, out);
                    out.push('\n');
                    pad(out, inner + INDENT);
                    literals(effects, inner + INDENT, out);
                    out.push(')');
                }
                None => literals(effects, inner, out),
            }
            if !vars.is_empty() {
                out.push(')');
            }
        }
    }
}

fn action(a: &PddlAction, out: &mut String) {
    let i = INDENT * 2;
    let _ = write!(out, "\n  (:action {}", a.name);
    out.push('\n');
    pad(out, i);
    let _ = write!(out, ":parameters ({})", typed_inline(&a.parameters, "?"));
    if let Some(pre) = &a.precondition {
        out.push('\n');
        pad(out, i);
        out.push_str(":precondition ");
        condition(pre, i, out);
    }
    match a.effects.as_slice() {
        [] => {}
        [single] => {
            out.push('\n');
            pad(out, i);
            out.push_str(":effect ");
            effect(single, i, out);
        }
        many => {
            out.push('\n');
            pad(out, i);
            out.push_str(":effect (and");
            for e in many {
                out.push('\n');
                pad(out, i + INDENT);
                effect(e, i + INDENT, out);
            }
            out.push(')');
        }
    }
    out.push(')');
}

fn block(out: &mut String, keyword: &str, lines: &[String]) {
    if lines.is_empty() {
        return;
    }
    let _ = write!(out, "\n  ({keyword}");
    for l in lines {
        out.push_str("\n    ");
        out.push_str(l);
    }
    out.push(')');
}

pub fn serialize_domain(d: &PddlDomain) -> String {
    let mut out = format!("(define (domain {})", d.name);
    if !d.requirements.is_empty() {
        let reqs: Vec<_> = d.requirements.iter().map(|r| r.keyword()).collect();
        let _ = write!(out, "\n  (:requirements {})", reqs.join(" "));
    }
    block(&mut out, ":types", &typed_groups(&d.types, ""));
    block(&mut out, ":constants", &typed_groups(&d.constants, ""));
    let preds: Vec<String> = d
        .predicates
        .iter()
        .map(|p| {
            if p.params.is_empty() {
                format!("({})", p.name)
            } else {
                format!("({} {})", p.name, typed_inline(&p.params, "?"))
            }
        })
        .collect();
    block(&mut out, ":predicates", &preds);
    let funcs: Vec<String> = d
        .functions
        .iter()
        .map(|f| {
            if f.params.is_empty() {
                format!("({})", f.name)
            } else {
                format!("({} {})", f.name, typed_inline(&f.params, "?"))
            }
        })
        .collect();
    if !funcs.is_empty() {
        let _ = write!(out, "\n  (:functions {})", funcs.join(" "));
    }
    for a in &d.actions {
        action(a, &mut out);
    }
    out.push_str(")\n");
    out
}

pub fn serialize_problem(p: &PddlProblem) -> String {
    let mut out = format!("(define (problem {})\n  (:domain {})", p.name, p.domain_name);
    block(&mut out, ":objects", &typed_groups(&p.objects, ""));
    let mut init: Vec<String> = p.init.iter().map(ToString::to_string).collect();
    if let Some(c) = p.init_total_cost {
        init.push(format!("(= ({TOTAL_COST}) {c})"));
    }
    if init.is_empty() {
        out.push_str("\n  (:init)");
    } else {
        block(&mut out, ":init", &init);
    }
    out.push_str("\n  (:goal ");
    literals(&p.goal, INDENT, &mut out);
    out.push(')');
    if let Some(Metric::MinimizeTotalCost) = p.metric {
        let _ = write!(out, "\n  (:metric minimize ({TOTAL_COST}))");
    }
    out.push_str(")\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_problem, Atom, PredicateDecl, Requirement, Term};

    fn v(s: &str) -> Term {
        Term::Var(s.into())
    }

    #[test]
    fn empty_domain_is_minimal() {
        let d = PddlDomain {
            name: "empty".into(),
            requirements: vec![],
            types: vec![],
            constants: vec![],
            predicates: vec![],
            functions: vec![],
            actions: vec![],
        };
        assert_eq!(serialize_domain(&d), "(define (domain empty))\n");
        assert_eq!(parse_domain(&serialize_domain(&d)).unwrap(), d);
    }

    #[test]
    fn typed_groups_keep_explicit_object_when_not_last() {
        let items = vec![Typed::new("a", OBJECT), Typed::new("b", "T"), Typed::new("c", OBJECT)];
        assert_eq!(typed_inline(&items, ""), "a - object b - T c");
    }

    #[test]
    fn guard_action_round_trips() {
        let guard = Atom::new("EquipmentPropertyImplementsClassProperty", vec![v("EP"), Term::Const("ECP_X".into())]);
        let a = PddlAction {
            name: "SetEquipmentPropertyTrue".into(),
            parameters: vec![Typed::new("EP", "EquipmentProperty")],
            precondition: Some(Condition::And(vec![
                Condition::not(Condition::Atom(Atom::new("EquipmentPropertyTrue", vec![v("EP")]))),
                Condition::not(Condition::Atom(guard)),
            ])),
            effects: vec![Effect::Literal(Literal::pos(Atom::new("EquipmentPropertyTrue", vec![v("EP")])))],
        };
        let d = PddlDomain {
            name: "d".into(),
            requirements: vec![Requirement::Strips, Requirement::NegativePreconditions],
            types: vec![Typed::new("EquipmentProperty", OBJECT), Typed::new("EquipmentClassProperty", OBJECT)],
            constants: vec![Typed::new("ECP_X", "EquipmentClassProperty")],
            predicates: vec![PredicateDecl {
                name: "EquipmentPropertyTrue".into(),
                params: vec![Typed::new("P", "EquipmentProperty")],
            }],
            functions: vec![],
            actions: vec![a],
        };
        let text = serialize_domain(&d);
        assert!(text.contains("(:action SetEquipmentPropertyTrue"));
        assert!(text.contains("(not (EquipmentPropertyImplementsClassProperty ?EP ECP_X))"));
        assert_eq!(parse_domain(&text).unwrap(), d);
    }

    #[test]
    fn problem_round_trips() {
        let p = PddlProblem {
            name: "p".into(),
            domain_name: "d".into(),
            objects: vec![Typed::new("E_A", "Equipment")],
            init: vec![Atom::ground("ShuttleLocation", &["E_A", "E_A"])],
            init_total_cost: Some(0),
            goal: vec![],
            metric: Some(Metric::MinimizeTotalCost),
        };
        let text = serialize_problem(&p);
        assert!(text.contains("(:goal (and))"));
        assert_eq!(parse_problem(&text).unwrap(), p);
    }
}
