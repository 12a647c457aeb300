use std::fmt;

use super::lexer::{read_all, syntax, SExpr};
use super::PddlError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    pub name: String,
    pub args: Vec<String>,
}

impl fmt::Display for PlanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.name)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    /// Cost announced by the `; cost = N` trailer, if any.
    pub declared_cost: Option<u64>,
}

/// Extracts `N` from a comment of the form `cost = N ...`.
fn cost_comment(comment: &str) -> Option<u64> {
    let rest = comment.trim_start().strip_prefix("cost")?.trim_start().strip_prefix('=')?;
    let digits: String = rest.trim_start().chars().take_while(char::is_ascii_digit).collect();
    digits.parse().ok()
}

/// Reads plan text: one `(action arg ...)` per step, `;` comments ignored
/// except for the cost trailer.
pub fn parse_plan(text: &str) -> Result<Plan, PddlError> {
    let mut declared_cost = None;
    for line in text.lines() {
        if let Some((_, comment)) = line.split_once(';') {
            if let Some(c) = cost_comment(comment) {
                declared_cost = Some(c);
            }
        }
    }
    let steps = read_all(text)?
        .into_iter()
        .map(|e| match e {
            SExpr::List(items, p) => {
                let mut syms = items
                    .iter()
                    .map(|i| i.symbol().map(str::to_string).ok_or_else(|| syntax(i.pos(), "nested list in plan step")));
                let name = syms.next().ok_or_else(|| syntax(p, "empty plan step"))??;
                Ok(PlanStep { name, args: syms.collect::<Result<_, _>>()? })
            }
            SExpr::Symbol(s, p) => Err(syntax(p, format!("expected `(`, found `{s}`"))),
        })
        .collect::<Result<_, _>>()?;
    Ok(Plan { steps, declared_cost })
}

pub fn serialize_plan(plan: &Plan) -> String {
    let mut out = String::new();
    for s in &plan.steps {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    if let Some(c) = plan.declared_cost {
        out.push_str(&format!("; cost = {c} (general cost)\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MOVES: &str = "(moveshuttle e_shuttle-01
  e_positioningunit-03 e_positioningunit-05)
(moveshuttle e_shuttle-02
  e_positioningunit-01 e_positioningunit-03)
(moveshuttle e_shuttle-03
  e_positioningunit-04 e_positioningunit-01)
(moveshuttle e_shuttle-04
  e_positioningunit-02 e_positioningunit-04)
(moveshuttle e_shuttle-01
  e_positioningunit-05 e_positioningunit-02)
; cost = 50 (general cost)
";

    #[test]
    fn multi_line_steps_and_trailer() {
        let p = parse_plan(MOVES).unwrap();
        assert_eq!(p.steps.len(), 5);
        assert_eq!(p.declared_cost, Some(50));
        assert_eq!(p.steps[0].args, ["e_shuttle-01", "e_positioningunit-03", "e_positioningunit-05"]);
    }

    #[test]
    fn only_trailer() {
        let p = parse_plan("; cost = 0 (general cost)\n").unwrap();
        assert!(p.steps.is_empty());
        assert_eq!(p.declared_cost, Some(0));
    }

    #[test]
    fn serialization_normalizes_layout() {
        let p = parse_plan(MOVES).unwrap();
        let text = serialize_plan(&p);
        assert_eq!(text.lines().count(), 6);
        assert_eq!(parse_plan(&text).unwrap(), p);
    }

    #[test]
    fn stray_symbol_is_an_error() {
        assert!(matches!(parse_plan("moveshuttle a b"), Err(PddlError::Syntax { .. })));
        assert!(matches!(parse_plan("((a))"), Err(PddlError::Syntax { .. })));
        assert!(matches!(parse_plan("()"), Err(PddlError::Syntax { .. })));
    }
}
