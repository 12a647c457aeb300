use super::PddlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum SExpr {
    Symbol(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Symbol(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn symbol(&self) -> Option<&str> {
        match self {
            SExpr::Symbol(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    /// True if this is a symbol equal to `kw`, ignoring case.
    pub fn is_kw(&self, kw: &str) -> bool {
        self.symbol().is_some_and(|s| s.eq_ignore_ascii_case(kw))
    }
}

pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> PddlError {
    PddlError::Syntax { line: pos.line, column: pos.column, message: message.into() }
}

pub(crate) fn unsupported(pos: Pos, feature: impl Into<String>) -> PddlError {
    PddlError::Unsupported { line: pos.line, column: pos.column, feature: feature.into() }
}

/// Reads all top-level s-expressions. `;` starts a comment running to the end
/// of the line.
pub(crate) fn read_all(text: &str) -> Result<Vec<SExpr>, PddlError> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut line = 1;
    let mut column = 0;
    let mut chars = text.chars().peekable();
    let mut symbol = String::new();
    let mut symbol_pos = Pos { line, column };

    fn flush(symbol: &mut String, pos: Pos, stack: &mut [(Vec<SExpr>, Pos)], top: &mut Vec<SExpr>) {
        if symbol.is_empty() {
            return;
        }
        let s = SExpr::Symbol(std::mem::take(symbol), pos);
        match stack.last_mut() {
            Some((items, _)) => items.push(s),
            None => top.push(s),
        }
    }

    while let Some(c) = chars.next() {
        column += 1;
        let here = Pos { line, column };
        match c {
            '(' => {
                flush(&mut symbol, symbol_pos, &mut stack, &mut top);
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut symbol, symbol_pos, &mut stack, &mut top);
                let (items, open) = stack.pop().ok_or_else(|| syntax(here, "unbalanced `)`"))?;
                let list = SExpr::List(items, open);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => top.push(list),
                }
            }
            ';' => {
                flush(&mut symbol, symbol_pos, &mut stack, &mut top);
                for c in chars.by_ref() {
                    if c == '\n' {
                        line += 1;
                        column = 0;
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {
                flush(&mut symbol, symbol_pos, &mut stack, &mut top);
                if c == '\n' {
                    line += 1;
                    column = 0;
                }
            }
            c => {
                if symbol.is_empty() {
                    symbol_pos = here;
                }
                symbol.push(c);
            }
        }
    }
    flush(&mut symbol, symbol_pos, &mut stack, &mut top);
    if let Some((_, open)) = stack.pop() {
        return Err(syntax(open, "unclosed `(`"));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_with_comments() {
        let t = read_all("(a (b c) ; note ( \n d)").unwrap();
        assert_eq!(t.len(), 1);
        let SExpr::List(items, p) = &t[0] else { panic!() };
        assert_eq!(*p, Pos { line: 1, column: 1 });
        assert_eq!(items.len(), 3);
        assert_eq!(items[2].pos(), Pos { line: 2, column: 2 });
    }

    #[test]
    fn unbalanced_input_is_positioned() {
        match read_all("(a\n (b)") {
            Err(PddlError::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 1)),
            other => panic!("{other:?}"),
        }
        match read_all("a)") {
            Err(PddlError::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 2)),
            other => panic!("{other:?}"),
        }
    }
}
