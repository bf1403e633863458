//! The query expression grammar.
//!
//! ```text
//! expr   := term (('UNION' | '-') term)*          left-associative
//! term   := factor ('JOIN' factor)*               left-associative
//! factor := NAME
//!         | '(' expr ')'
//!         | 'PROJECT' '[' name (',' name)* ']' factor
//!         | 'SELECT'  '[' atom (',' atom)* ']' factor
//!         | 'RENAME'  '[' name '->' name (',' name '->' name)* ']' factor
//! atom   := name '=' (name | integer | '"' chars '"')
//! ```
//!
//! `-` and `UNION` share a precedence level; `JOIN` binds tighter. A bare
//! name on the right of `=` refers to an attribute; integers and quoted
//! strings are constants. [`print_query`] renders a tree with minimal
//! parentheses such that reparsing yields the same tree.

use std::fmt;

use krelab::krel::{Atom, DomVal, Predicate, QueryExpr};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Union,
    Join,
    Project,
    Select,
    Rename,
    Minus,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Arrow,
    Eq,
    Int(i64),
    Str(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let err = |message: String| ParseError {
            line: tline,
            col: tcol,
            message,
        };
        let tok = match c {
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            '[' => {
                bump(&mut chars);
                Tok::LBracket
            }
            ']' => {
                bump(&mut chars);
                Tok::RBracket
            }
            ',' => {
                bump(&mut chars);
                Tok::Comma
            }
            '=' => {
                bump(&mut chars);
                Tok::Eq
            }
            '-' => {
                bump(&mut chars);
                if chars.peek() == Some(&'>') {
                    bump(&mut chars);
                    Tok::Arrow
                } else {
                    Tok::Minus
                }
            }
            '"' => {
                bump(&mut chars);
                let mut s = String::new();
                loop {
                    match chars.peek() {
                        Some('"') => {
                            bump(&mut chars);
                            break;
                        }
                        Some('\n') | None => {
                            return Err(err("unterminated string literal".into()))
                        }
                        Some(_) => s.push(bump(&mut chars)),
                    }
                }
                Tok::Str(s)
            }
            d if d.is_ascii_digit() => {
                let mut n = String::new();
                while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    n.push(bump(&mut chars));
                }
                Tok::Int(n.parse().map_err(|_| err("integer out of range".into()))?)
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let mut name = String::new();
                while chars
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
                {
                    name.push(bump(&mut chars));
                }
                match name.as_str() {
                    "UNION" => Tok::Union,
                    "JOIN" => Tok::Join,
                    "PROJECT" => Tok::Project,
                    "SELECT" => Tok::Select,
                    "RENAME" => Tok::Rename,
                    _ => Tok::Name(name),
                }
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        };
        out.push(Spanned {
            tok,
            line: tline,
            col: tcol,
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col));
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error_here(format!("expected {what}")))
        }
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Name(_)) => match self.next().unwrap().tok {
                Tok::Name(n) => Ok(n),
                _ => unreachable!(),
            },
            _ => Err(self.error_here(format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<QueryExpr, ParseError> {
        let mut left = self.term()?;
        loop {
            if self.eat(&Tok::Union) {
                let right = self.term()?;
                left = QueryExpr::Union(Box::new(left), Box::new(right));
            } else if self.eat(&Tok::Minus) {
                let right = self.term()?;
                left = QueryExpr::Diff(Box::new(left), Box::new(right));
            } else {
                break;
            }
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<QueryExpr, ParseError> {
        let mut left = self.factor()?;
        while self.eat(&Tok::Join) {
            let right = self.factor()?;
            left = QueryExpr::Join(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<QueryExpr, ParseError> {
        match self.peek() {
            Some(Tok::Name(_)) => Ok(QueryExpr::Base(self.name("a relation name")?)),
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Project) => {
                self.pos += 1;
                self.expect(Tok::LBracket, "`[`")?;
                let mut attrs = vec![self.name("an attribute")?];
                while self.eat(&Tok::Comma) {
                    attrs.push(self.name("an attribute")?);
                }
                self.expect(Tok::RBracket, "`]`")?;
                let child = self.factor()?;
                Ok(QueryExpr::Project(attrs, Box::new(child)))
            }
            Some(Tok::Select) => {
                self.pos += 1;
                self.expect(Tok::LBracket, "`[`")?;
                let mut atoms = vec![self.atom()?];
                while self.eat(&Tok::Comma) {
                    atoms.push(self.atom()?);
                }
                self.expect(Tok::RBracket, "`]`")?;
                let child = self.factor()?;
                Ok(QueryExpr::Select(Predicate::new(atoms), Box::new(child)))
            }
            Some(Tok::Rename) => {
                self.pos += 1;
                self.expect(Tok::LBracket, "`[`")?;
                let mut map = vec![self.rename_pair()?];
                while self.eat(&Tok::Comma) {
                    map.push(self.rename_pair()?);
                }
                self.expect(Tok::RBracket, "`]`")?;
                let child = self.factor()?;
                Ok(QueryExpr::Rename(map, Box::new(child)))
            }
            _ => Err(self.error_here(
                "expected a relation name, `(`, PROJECT, SELECT, or RENAME",
            )),
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let attr = self.name("an attribute")?;
        self.expect(Tok::Eq, "`=`")?;
        match self.peek() {
            Some(Tok::Name(_)) => Ok(Atom::AttrEq(attr, self.name("an attribute")?)),
            Some(Tok::Int(_)) => match self.next().unwrap().tok {
                Tok::Int(n) => Ok(Atom::ConstEq(attr, DomVal::Int(n))),
                _ => unreachable!(),
            },
            Some(Tok::Str(_)) => match self.next().unwrap().tok {
                Tok::Str(s) => Ok(Atom::ConstEq(attr, DomVal::Str(s))),
                _ => unreachable!(),
            },
            _ => Err(self.error_here("expected an attribute, integer, or quoted string")),
        }
    }

    fn rename_pair(&mut self) -> Result<(String, String), ParseError> {
        let old = self.name("an attribute")?;
        self.expect(Tok::Arrow, "`->`")?;
        let new = self.name("an attribute")?;
        Ok((old, new))
    }
}

/// Parse a query expression. Schema validation happens separately, against
/// a loaded database.
pub fn parse_query(src: &str) -> Result<QueryExpr, ParseError> {
    let toks = lex(src)?;
    let end = src.lines().count().max(1);
    let end_col = src.lines().last().map_or(1, |l| l.chars().count() + 1);
    let mut p = Parser {
        toks,
        pos: 0,
        end_line: end,
        end_col,
    };
    let expr = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.error_here("trailing input"));
    }
    Ok(expr)
}

fn level(q: &QueryExpr) -> u8 {
    match q {
        QueryExpr::Union(_, _) | QueryExpr::Diff(_, _) => 0,
        QueryExpr::Join(_, _) => 1,
        _ => 2,
    }
}

fn fmt_query(q: &QueryExpr, min_level: u8, out: &mut String) {
    if level(q) < min_level {
        out.push('(');
        fmt_query(q, 0, out);
        out.push(')');
        return;
    }
    match q {
        QueryExpr::Base(name) => out.push_str(name),
        QueryExpr::Union(l, r) => {
            fmt_query(l, 0, out);
            out.push_str(" UNION ");
            fmt_query(r, 1, out);
        }
        QueryExpr::Diff(l, r) => {
            fmt_query(l, 0, out);
            out.push_str(" - ");
            fmt_query(r, 1, out);
        }
        QueryExpr::Join(l, r) => {
            fmt_query(l, 1, out);
            out.push_str(" JOIN ");
            fmt_query(r, 2, out);
        }
        QueryExpr::Project(attrs, child) => {
            out.push_str("PROJECT[");
            out.push_str(&attrs.join(","));
            out.push_str("] ");
            fmt_query(child, 2, out);
        }
        QueryExpr::Select(pred, child) => {
            out.push_str("SELECT[");
            let atoms: Vec<String> = pred
                .atoms
                .iter()
                .map(|a| match a {
                    Atom::AttrEq(l, r) => format!("{l}={r}"),
                    Atom::ConstEq(l, DomVal::Int(n)) => format!("{l}={n}"),
                    Atom::ConstEq(l, DomVal::Str(s)) => format!("{l}=\"{s}\""),
                })
                .collect();
            out.push_str(&atoms.join(","));
            out.push_str("] ");
            fmt_query(child, 2, out);
        }
        QueryExpr::Rename(map, child) => {
            out.push_str("RENAME[");
            let pairs: Vec<String> = map
                .iter()
                .map(|(old, new)| format!("{old}->{new}"))
                .collect();
            out.push_str(&pairs.join(","));
            out.push_str("] ");
            fmt_query(child, 2, out);
        }
    }
}

/// Canonical text of a query; parsing it back yields an identical tree.
pub fn print_query(q: &QueryExpr) -> String {
    let mut out = String::new();
    fmt_query(q, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grammar_examples() {
        let q = parse_query("R JOIN (S - T)").unwrap();
        assert_eq!(
            q,
            QueryExpr::Join(
                Box::new(QueryExpr::Base("R".into())),
                Box::new(QueryExpr::Diff(
                    Box::new(QueryExpr::Base("S".into())),
                    Box::new(QueryExpr::Base("T".into())),
                )),
            )
        );

        // difference is left-associative
        let q = parse_query("R - S - T").unwrap();
        assert_eq!(
            q,
            QueryExpr::Diff(
                Box::new(QueryExpr::Diff(
                    Box::new(QueryExpr::Base("R".into())),
                    Box::new(QueryExpr::Base("S".into())),
                )),
                Box::new(QueryExpr::Base("T".into())),
            )
        );

        let q = parse_query("PROJECT[a] SELECT[a=1] R").unwrap();
        assert_eq!(
            q,
            QueryExpr::Project(
                vec!["a".into()],
                Box::new(QueryExpr::Select(
                    Predicate::new(vec![Atom::ConstEq("a".into(), DomVal::Int(1))]),
                    Box::new(QueryExpr::Base("R".into())),
                )),
            )
        );

        // JOIN binds tighter than UNION and `-`
        let q = parse_query("R UNION S JOIN T").unwrap();
        assert!(matches!(q, QueryExpr::Union(_, _)));
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_query("R -").unwrap_err();
        assert_eq!((err.line, err.col), (1, 4));
        let err = parse_query("R UNION\n  JOIN S").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(parse_query("PROJECT[] R").is_err());
        assert!(parse_query("R @ S").is_err());
        assert!(parse_query("SELECT[a=\"x] R").is_err());
    }

    fn arb_name() -> impl Strategy<Value = String> {
        prop::sample::select(vec!["R", "S", "T", "Emp", "d1"])
            .prop_map(|s| s.to_string())
    }

    fn arb_attr() -> impl Strategy<Value = String> {
        prop::sample::select(vec!["a", "b", "c"]).prop_map(|s| s.to_string())
    }

    fn arb_atom() -> impl Strategy<Value = Atom> {
        prop_oneof![
            (arb_attr(), arb_attr()).prop_map(|(l, r)| Atom::AttrEq(l, r)),
            (arb_attr(), 0i64..5).prop_map(|(l, n)| Atom::ConstEq(l, DomVal::Int(n))),
            (arb_attr(), "[a-z]{1,4}")
                .prop_map(|(l, s)| Atom::ConstEq(l, DomVal::Str(s))),
        ]
    }

    fn arb_query() -> impl Strategy<Value = QueryExpr> {
        let leaf = arb_name().prop_map(QueryExpr::Base);
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| QueryExpr::Union(Box::new(l), Box::new(r))),
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| QueryExpr::Diff(Box::new(l), Box::new(r))),
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| QueryExpr::Join(Box::new(l), Box::new(r))),
                (prop::collection::vec(arb_attr(), 1..3), inner.clone())
                    .prop_map(|(attrs, c)| QueryExpr::Project(attrs, Box::new(c))),
                (prop::collection::vec(arb_atom(), 1..3), inner.clone())
                    .prop_map(|(atoms, c)| QueryExpr::Select(
                        Predicate::new(atoms),
                        Box::new(c)
                    )),
                (
                    prop::collection::vec((arb_attr(), arb_attr()), 1..2),
                    inner
                )
                    .prop_map(|(map, c)| QueryExpr::Rename(map, Box::new(c))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(q in arb_query()) {
            let text = print_query(&q);
            let back = parse_query(&text)
                .unwrap_or_else(|e| panic!("`{text}` failed to reparse: {e}"));
            prop_assert_eq!(back, q);
        }
    }
}
