use super::lexer::{read_all, syntax, unsupported, Pos, SExpr};
use super::{
    Atom, Condition, Effect, FunctionDecl, Literal, Metric, PddlAction, PddlDomain, PddlError, PddlProblem,
    PredicateDecl, Requirement, Term, Typed, OBJECT, TOTAL_COST,
};

type Result<T> = std::result::Result<T, PddlError>;

const RESERVED: &[&str] =
    &["and", "not", "or", "imply", "exists", "forall", "when", "increase", "decrease", "=", "define", "either"];

fn list(e: &SExpr) -> Result<&[SExpr]> {
    match e {
        SExpr::List(items, _) => Ok(items),
        SExpr::Symbol(s, p) => Err(syntax(*p, format!("expected `(`, found `{s}`"))),
    }
}

fn name(e: &SExpr) -> Result<String> {
    match e {
        SExpr::Symbol(s, p) => {
            if s.starts_with('?') || s.starts_with(':') {
                Err(syntax(*p, format!("expected a name, found `{s}`")))
            } else {
                Ok(s.clone())
            }
        }
        SExpr::List(_, p) => Err(syntax(*p, "expected a name, found a list")),
    }
}

fn variable(e: &SExpr) -> Result<String> {
    match e {
        SExpr::Symbol(s, p) => match s.strip_prefix('?') {
            Some(v) if !v.is_empty() => Ok(v.to_string()),
            _ => Err(syntax(*p, format!("expected a variable, found `{s}`"))),
        },
        SExpr::List(_, p) => Err(syntax(*p, "expected a variable, found a list")),
    }
}

fn expect_kw(items: &[SExpr], idx: usize, kw: &str, at: Pos) -> Result<()> {
    match items.get(idx) {
        Some(e) if e.is_kw(kw) => Ok(()),
        Some(e) => Err(syntax(e.pos(), format!("expected `{kw}`"))),
        None => Err(syntax(at, format!("expected `{kw}`"))),
    }
}

fn arity(items: &[SExpr], n: usize, what: &str, at: Pos) -> Result<()> {
    if items.len() == n {
        Ok(())
    } else {
        Err(syntax(at, format!("`{what}` expects {} argument(s)", n - 1)))
    }
}

/// Parses `a b - t c - u d` into typed entries. `vars` selects `?x` entries.
fn typed_list(items: &[SExpr], vars: bool) -> Result<Vec<Typed>> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let e = &items[i];
        if e.is_kw("-") {
            let ty = items.get(i + 1).ok_or_else(|| syntax(e.pos(), "missing type after `-`"))?;
            if let SExpr::List(l, p) = ty {
                if l.first().is_some_and(|h| h.is_kw("either")) {
                    return Err(unsupported(*p, "either types"));
                }
            }
            let ty = name(ty)?;
            if pending.is_empty() {
                return Err(syntax(e.pos(), "type annotation without names"));
            }
            out.extend(pending.drain(..).map(|n| Typed::new(n, ty.clone())));
            i += 2;
            continue;
        }
        pending.push(if vars { variable(e)? } else { name(e)? });
        i += 1;
    }
    out.extend(pending.into_iter().map(|n| Typed::new(n, OBJECT)));
    Ok(out)
}

fn term(e: &SExpr) -> Result<Term> {
    match e {
        SExpr::Symbol(s, _) if s.starts_with('?') => Ok(Term::Var(variable(e)?)),
        _ => Ok(Term::Const(name(e)?)),
    }
}

fn atom(items: &[SExpr], at: Pos) -> Result<Atom> {
    let head = items.first().ok_or_else(|| syntax(at, "empty formula"))?;
    let predicate = name(head)?;
    if RESERVED.iter().any(|r| predicate.eq_ignore_ascii_case(r)) {
        return Err(unsupported(head.pos(), format!("`{predicate}` formulas")));
    }
    let args = items[1..].iter().map(term).collect::<Result<_>>()?;
    Ok(Atom { predicate, args })
}

fn condition(e: &SExpr) -> Result<Condition> {
    let items = list(e)?;
    let at = e.pos();
    let Some(head) = items.first() else {
        return Err(syntax(at, "empty formula"));
    };
    let kw = head.symbol().map(str::to_ascii_lowercase).unwrap_or_default();
    match kw.as_str() {
        "and" => Ok(Condition::And(items[1..].iter().map(condition).collect::<Result<_>>()?)),
        "not" => {
            arity(items, 2, "not", at)?;
            Ok(Condition::not(condition(&items[1])?))
        }
        "exists" | "forall" => {
            arity(items, 3, &kw, at)?;
            let vars = typed_list(list(&items[1])?, true)?;
            let body = Box::new(condition(&items[2])?);
            Ok(if kw == "exists" { Condition::Exists(vars, body) } else { Condition::Forall(vars, body) })
        }
        "or" | "imply" => Err(unsupported(at, "disjunctive preconditions")),
        "=" => Err(unsupported(at, "equality")),
        "<" | ">" | "<=" | ">=" => Err(unsupported(at, "numeric comparisons")),
        _ => Ok(Condition::Atom(atom(items, at)?)),
    }
}

fn literal(e: &SExpr) -> Result<Literal> {
    let items = list(e)?;
    if items.first().is_some_and(|h| h.is_kw("not")) {
        arity(items, 2, "not", e.pos())?;
        let inner = list(&items[1])?;
        Ok(Literal::neg(atom(inner, items[1].pos())?))
    } else {
        Ok(Literal::pos(atom(items, e.pos())?))
    }
}

fn literal_conjunction(e: &SExpr) -> Result<Vec<Literal>> {
    let items = list(e)?;
    if items.first().is_some_and(|h| h.is_kw("and")) {
        items[1..].iter().map(literal).collect()
    } else {
        Ok(vec![literal(e)?])
    }
}

fn total_cost_fn(e: &SExpr) -> Result<()> {
    let items = list(e)?;
    match items {
        [f] if f.is_kw(TOTAL_COST) => Ok(()),
        _ => Err(unsupported(e.pos(), "numeric fluents other than total-cost")),
    }
}

fn effect(e: &SExpr) -> Result<Effect> {
    let items = list(e)?;
    let at = e.pos();
    let Some(head) = items.first() else {
        return Err(syntax(at, "empty effect"));
    };
    let kw = head.symbol().map(str::to_ascii_lowercase).unwrap_or_default();
    match kw.as_str() {
        "increase" => {
            arity(items, 3, "increase", at)?;
            total_cost_fn(&items[1])?;
            let amount = items[2]
                .symbol()
                .and_then(|s| s.parse::<u64>().ok())
                .ok_or_else(|| unsupported(items[2].pos(), "non-constant cost increase"))?;
            Ok(Effect::IncreaseTotalCost(amount))
        }
        "decrease" | "assign" | "scale-up" | "scale-down" => Err(unsupported(at, format!("`{kw}` effects"))),
        "forall" => {
            arity(items, 3, "forall", at)?;
            let vars = typed_list(list(&items[1])?, true)?;
            let body = list(&items[2])?;
            if body.first().is_some_and(|h| h.is_kw("when")) {
                let (condition, effects) = when(body, items[2].pos())?;
                Ok(Effect::Conditional { vars, condition: Some(condition), effects })
            } else {
                Ok(Effect::Conditional { vars, condition: None, effects: literal_conjunction(&items[2])? })
            }
        }
        "when" => {
            let (condition, effects) = when(items, at)?;
            Ok(Effect::Conditional { vars: vec![], condition: Some(condition), effects })
        }
        _ => Ok(Effect::Literal(literal(e)?)),
    }
}

fn when(items: &[SExpr], at: Pos) -> Result<(Condition, Vec<Literal>)> {
    arity(items, 3, "when", at)?;
    let body = list(&items[2])?;
    if body.first().is_some_and(|h| h.is_kw("forall") || h.is_kw("when")) {
        return Err(unsupported(items[2].pos(), "nested conditional effects"));
    }
    Ok((condition(&items[1])?, literal_conjunction(&items[2])?))
}

fn effects(e: &SExpr) -> Result<Vec<Effect>> {
    let items = list(e)?;
    if items.first().is_some_and(|h| h.is_kw("and")) {
        items[1..].iter().map(effect).collect()
    } else {
        Ok(vec![effect(e)?])
    }
}

fn action(items: &[SExpr], at: Pos) -> Result<PddlAction> {
    let action_name = name(items.get(1).ok_or_else(|| syntax(at, "action without a name"))?)?;
    let mut act = PddlAction { name: action_name, parameters: vec![], precondition: None, effects: vec![] };
    let mut i = 2;
    while i < items.len() {
        let key = &items[i];
        let value = items.get(i + 1).ok_or_else(|| syntax(key.pos(), "missing value"))?;
        let k = key.symbol().map(str::to_ascii_lowercase).unwrap_or_default();
        match k.as_str() {
            ":parameters" => act.parameters = typed_list(list(value)?, true)?,
            ":precondition" => act.precondition = Some(condition(value)?),
            ":effect" => act.effects = effects(value)?,
            _ => return Err(syntax(key.pos(), "expected :parameters, :precondition or :effect")),
        }
        i += 2;
    }
    Ok(act)
}

/// Splits `(define (KIND name) sections...)` into its name and sections.
fn define<'a>(text: &'a str, kind: &str, tree: &'a mut Vec<SExpr>) -> Result<(String, &'a [SExpr])> {
    *tree = read_all(text)?;
    let root = match tree.as_slice() {
        [root] => root,
        [] => return Err(syntax(Pos { line: 1, column: 1 }, "empty document")),
        [_, extra, ..] => return Err(syntax(extra.pos(), "trailing content after definition")),
    };
    let items = list(root)?;
    expect_kw(items, 0, "define", root.pos())?;
    let header = items.get(1).ok_or_else(|| syntax(root.pos(), format!("expected `({kind} ...)`")))?;
    let h = list(header)?;
    expect_kw(h, 0, kind, header.pos())?;
    arity(h, 2, kind, header.pos())?;
    Ok((name(&h[1])?, &items[2..]))
}

fn section(e: &SExpr) -> Result<(String, &[SExpr], Pos)> {
    let items = list(e)?;
    let head = items.first().ok_or_else(|| syntax(e.pos(), "empty section"))?;
    let kw =
        head.symbol().filter(|s| s.starts_with(':')).ok_or_else(|| syntax(head.pos(), "expected a section keyword"))?;
    Ok((kw.to_ascii_lowercase(), &items[1..], e.pos()))
}

pub fn parse_domain(text: &str) -> Result<PddlDomain> {
    let mut tree = Vec::new();
    let (domain_name, sections) = define(text, "domain", &mut tree)?;
    let mut d = PddlDomain {
        name: domain_name,
        requirements: vec![],
        types: vec![],
        constants: vec![],
        predicates: vec![],
        functions: vec![],
        actions: vec![],
    };
    for s in sections {
        let (kw, body, at) = section(s)?;
        match kw.as_str() {
            ":requirements" => {
                for r in body {
                    let sym = r.symbol().ok_or_else(|| syntax(r.pos(), "expected a requirement"))?;
                    let req = Requirement::from_keyword(sym)
                        .ok_or_else(|| unsupported(r.pos(), format!("requirement {sym}")))?;
                    d.requirements.push(req);
                }
            }
            ":types" => d.types = typed_list(body, false)?,
            ":constants" => d.constants = typed_list(body, false)?,
            ":predicates" => {
                for p in body {
                    let items = list(p)?;
                    let head = items.first().ok_or_else(|| syntax(p.pos(), "empty predicate"))?;
                    d.predicates.push(PredicateDecl { name: name(head)?, params: typed_list(&items[1..], true)? });
                }
            }
            ":functions" => {
                let mut i = 0;
                while i < body.len() {
                    let f = &body[i];
                    if f.is_kw("-") {
                        match body.get(i + 1) {
                            Some(t) if t.is_kw("number") => {
                                i += 2;
                                continue;
                            }
                            _ => return Err(unsupported(f.pos(), "non-numeric functions")),
                        }
                    }
                    let items = list(f)?;
                    let head = items.first().ok_or_else(|| syntax(f.pos(), "empty function"))?;
                    d.functions.push(FunctionDecl { name: name(head)?, params: typed_list(&items[1..], true)? });
                    i += 1;
                }
            }
            ":action" => {
                let SExpr::List(items, _) = s else { unreachable!() };
                d.actions.push(action(items, at)?);
            }
            ":durative-action" => return Err(unsupported(at, "durative actions")),
            ":derived" => return Err(unsupported(at, "derived predicates")),
            ":constraints" => return Err(unsupported(at, "constraints")),
            other => return Err(syntax(at, format!("unknown domain section `{other}`"))),
        }
    }
    Ok(d)
}

fn ground_atom(e: &SExpr) -> Result<Atom> {
    let a = atom(list(e)?, e.pos())?;
    if !a.is_ground() {
        return Err(syntax(e.pos(), "initial state atoms must be ground"));
    }
    Ok(a)
}

pub fn parse_problem(text: &str) -> Result<PddlProblem> {
    let mut tree = Vec::new();
    let (problem_name, sections) = define(text, "problem", &mut tree)?;
    let mut p = PddlProblem {
        name: problem_name,
        domain_name: String::new(),
        objects: vec![],
        init: vec![],
        init_total_cost: None,
        goal: vec![],
        metric: None,
    };
    let mut seen_domain = false;
    for s in sections {
        let (kw, body, at) = section(s)?;
        match kw.as_str() {
            ":domain" => {
                arity(body, 1, ":domain", at)?;
                p.domain_name = name(&body[0])?;
                seen_domain = true;
            }
            ":requirements" => {}
            ":objects" => p.objects = typed_list(body, false)?,
            ":init" => {
                for e in body {
                    let items = list(e)?;
                    if items.first().is_some_and(|h| h.is_kw("=")) {
                        arity(items, 3, "=", e.pos())?;
                        total_cost_fn(&items[1])?;
                        let v = items[2]
                            .symbol()
                            .and_then(|s| s.parse::<u64>().ok())
                            .ok_or_else(|| syntax(items[2].pos(), "expected a non-negative integer"))?;
                        p.init_total_cost = Some(v);
                    } else if items.first().is_some_and(|h| h.is_kw("not")) {
                        return Err(unsupported(e.pos(), "negative initial literals"));
                    } else {
                        p.init.push(ground_atom(e)?);
                    }
                }
            }
            ":goal" => {
                arity(body, 1, ":goal", at)?;
                let goal = literal_conjunction(&body[0])?;
                if let Some(l) = goal.iter().find(|l| !l.atom.is_ground()) {
                    return Err(syntax(at, format!("goal literal {l} is not ground")));
                }
                p.goal = goal;
            }
            ":metric" => {
                let ok = matches!(body, [m, f] if m.is_kw("minimize") && total_cost_fn(f).is_ok());
                if !ok {
                    return Err(unsupported(at, "metrics other than (minimize (total-cost))"));
                }
                p.metric = Some(Metric::MinimizeTotalCost);
            }
            other => return Err(syntax(at, format!("unknown problem section `{other}`"))),
        }
    }
    if !seen_domain {
        return Err(syntax(Pos { line: 1, column: 1 }, "problem lacks a (:domain ...) section"));
    }
    Ok(p)
}
