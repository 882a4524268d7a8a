//! Problem files: parsing and printing.
//!
//! ```text
//! trans r;
//! s <= r;
//! formula: @'a (<s><s> p & [s] !p);
//! ```

mod lexer;
mod print;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{Assertion, Formula, RelSym, Relation, Term, Var};
use lexer::{lex, Tok, Token};

pub use lexer::Pos;
pub use print::{print_formula, print_operand, print_problem};

/// A satisfiability question: does some model of the assertions satisfy the formula?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub assertions: Vec<Assertion>,
    pub formula: Formula,
    pub declared_rels: BTreeSet<RelSym>,
}

impl Problem {
    /// Builds a problem, declaring every relation symbol that is used.
    pub fn new(assertions: Vec<Assertion>, formula: Formula) -> Self {
        let mut declared_rels = formula.rel_syms();
        for a in &assertions {
            declared_rels.extend(a.rel_syms());
        }
        Problem { assertions, formula, declared_rels }
    }

    pub fn with_formula(&self, formula: Formula) -> Self {
        let mut p = Problem::new(self.assertions.clone(), formula);
        p.declared_rels.extend(self.declared_rels.iter().cloned());
        p
    }
}

/// Source positions of the top-level items of a parsed problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceMap {
    pub assertions: Vec<Pos>,
    pub formula: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected {found}, expected {expected}")]
    Unexpected { found: String, expected: String },
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("identifier `{0}` uses the reserved `_` prefix")]
    Reserved(String),
    #[error("grade `{0}` is not a nonnegative integer")]
    BadGrade(String),
    #[error("nominal must be an apostrophe followed by an identifier")]
    BadNominal,
    #[error("`{0}` is neither a bound variable nor a lowercase proposition")]
    Unbound(String),
    #[error("`{0}` is a keyword")]
    Keyword(String),
    #[error("problem has no `formula:` line")]
    MissingFormula,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept `_`-prefixed identifiers, as produced by preprocessing and the solver.
    pub allow_reserved: bool,
}

pub fn parse(text: &str) -> Result<Problem, ParseError> {
    parse_with(text, ParseOptions::default()).map(|(p, _)| p)
}

pub fn parse_located(text: &str) -> Result<(Problem, SourceMap), ParseError> {
    parse_with(text, ParseOptions::default())
}

pub fn parse_with(text: &str, opts: ParseOptions) -> Result<(Problem, SourceMap), ParseError> {
    let mut p = Parser { toks: lex(text, opts.allow_reserved)?, i: 0, bound: Vec::new() };
    p.problem()
}

/// Parses a bare formula (no `formula:` prefix or trailing `;`).
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, ParseOptions { allow_reserved: true })
}

pub fn parse_formula_with(text: &str, opts: ParseOptions) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text, opts.allow_reserved)?, i: 0, bound: Vec::new() };
    let f = p.or()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(f)
}

const KEYWORDS: [&str; 3] = ["true", "false", "down"];

struct Parser {
    toks: Vec<Token>,
    i: usize,
    bound: Vec<Var>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.i + 1).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn fail<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        let pos = self.pos();
        Err(ParseError { line: pos.line, col: pos.col, kind })
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, ParseError> {
        self.fail(ParseErrorKind::Unexpected {
            found: self.peek().to_string(),
            expected: expected.to_string(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(what)
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected(what),
        }
    }

    fn problem(&mut self) -> Result<(Problem, SourceMap), ParseError> {
        let mut assertions = Vec::new();
        let mut positions = Vec::new();
        loop {
            let pos = self.pos();
            match (self.peek().clone(), self.peek2().clone()) {
                (Tok::Eof, _) => return self.fail(ParseErrorKind::MissingFormula),
                (Tok::Ident(k), Tok::Colon) if k == "formula" => {
                    self.bump();
                    self.bump();
                    let formula = self.or()?;
                    self.expect(Tok::Semi, "`;` after the formula")?;
                    self.expect(Tok::Eof, "end of input after the formula")?;
                    let map = SourceMap { assertions: positions, formula: pos };
                    return Ok((Problem::new(assertions, formula), map));
                }
                (Tok::Ident(k), Tok::Ident(_)) if k == "trans" => {
                    self.bump();
                    let r = self.ident("relation symbol")?;
                    assertions.push(Assertion::trans(r.as_str()));
                }
                (Tok::Ident(_), _) => {
                    let left = self.relation()?;
                    self.expect(Tok::Le, "`<=`")?;
                    let right = self.relation()?;
                    assertions.push(Assertion::incl(left, right));
                }
                _ => return self.unexpected("an assertion or `formula:`"),
            }
            positions.push(pos);
            self.expect(Tok::Semi, "`;` after the assertion")?;
        }
    }

    fn relation(&mut self) -> Result<Relation, ParseError> {
        let name = self.ident("relation symbol")?;
        if *self.peek() == Tok::Minus {
            self.bump();
            Ok(Relation::backward(name.as_str()))
        } else {
            Ok(Relation::forward(name.as_str()))
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn grade(&mut self) -> Result<Option<u32>, ParseError> {
        if *self.peek() != Tok::Caret {
            return Ok(None);
        }
        self.bump();
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                Ok(Some(n))
            }
            Tok::Minus => {
                let rest = match self.peek2() {
                    Tok::Number(n) => format!("-{n}"),
                    _ => "-".to_string(),
                };
                self.fail(ParseErrorKind::BadGrade(rest))
            }
            other => self.fail(ParseErrorKind::BadGrade(other.to_string())),
        }
    }

    /// Relation inside `<..>` or `[..]`; `None` for the global `E` / `A`.
    fn modal_relation(&mut self, global: &str) -> Result<Option<Relation>, ParseError> {
        let name = self.ident("relation symbol")?;
        if name == global {
            return Ok(None);
        }
        if name == "E" || name == "A" {
            return self.unexpected("a relation symbol (E and A are reserved)");
        }
        if *self.peek() == Tok::Minus {
            self.bump();
            Ok(Some(Relation::backward(name.as_str())))
        } else {
            Ok(Some(Relation::forward(name.as_str())))
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Lt => {
                self.bump();
                let rel = self.modal_relation("E")?;
                self.expect(Tok::Gt, "`>`")?;
                match rel {
                    None => Ok(Formula::exists(self.unary()?)),
                    Some(r) => {
                        let n = self.grade()?;
                        Ok(crate::syntax::FormulaKind::Diamond(r, n, self.unary()?).into())
                    }
                }
            }
            Tok::LBracket => {
                self.bump();
                let rel = self.modal_relation("A")?;
                self.expect(Tok::RBracket, "`]`")?;
                match rel {
                    None => Ok(Formula::global(self.unary()?)),
                    Some(r) => {
                        let n = self.grade()?;
                        Ok(crate::syntax::FormulaKind::Box(r, n, self.unary()?).into())
                    }
                }
            }
            Tok::At => {
                self.bump();
                let term = match self.peek().clone() {
                    Tok::Nominal(a) => {
                        self.bump();
                        Term::Nom(a.as_str().into())
                    }
                    Tok::Ident(x) if self.is_bound(&x) => {
                        self.bump();
                        Term::Var(x.as_str().into())
                    }
                    Tok::Ident(x) => return self.fail(ParseErrorKind::Unbound(x)),
                    _ => return self.unexpected("a nominal or bound variable after `@`"),
                };
                Ok(Formula::at_term(term, self.unary()?))
            }
            Tok::Ident(k) if k == "down" => {
                self.bump();
                let x = self.ident("a variable after `down`")?;
                if KEYWORDS.contains(&x.as_str()) {
                    return self.fail(ParseErrorKind::Keyword(x));
                }
                self.expect(Tok::Dot, "`.` after the bound variable")?;
                let x = Var::new(&x);
                self.bound.push(x.clone());
                let body = self.unary();
                self.bound.pop();
                Ok(Formula::down(x, body?))
            }
            _ => self.atom(),
        }
    }

    fn is_bound(&self, x: &str) -> bool {
        self.bound.iter().any(|v| v.as_str() == x)
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.or()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Nominal(a) => {
                self.bump();
                Ok(Formula::nom(a.as_str()))
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Formula::tt())
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Formula::ff())
            }
            Tok::Ident(s) if self.is_bound(&s) => {
                self.bump();
                Ok(Formula::var(s.as_str()))
            }
            Tok::Ident(s) if s.starts_with(|c: char| c.is_ascii_lowercase()) => {
                self.bump();
                Ok(Formula::prop(s.as_str()))
            }
            Tok::Ident(s) => self.fail(ParseErrorKind::Unbound(s)),
            _ => self.unexpected("a formula"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_problem() {
        let p = parse("trans r; s <= r; formula: @'a (<s><s> p & [s] !p);").unwrap();
        assert_eq!(p.assertions, vec![Assertion::trans("r"), Assertion::incl("s", "r")]);
        let want = Formula::at(
            "a",
            Formula::and(
                Formula::dia("s", Formula::dia("s", Formula::prop("p"))),
                Formula::boxed("s", Formula::not(Formula::prop("p"))),
            ),
        );
        assert_eq!(p.formula, want);
        assert_eq!(p.declared_rels.len(), 2);
    }

    #[test]
    fn binder_makes_variable() {
        let p = parse("formula: down x . <r> x;").unwrap();
        assert_eq!(p.formula, Formula::down("x", Formula::dia("r", Formula::var("x"))));
    }

    #[test]
    fn graded_box() {
        let p = parse("formula: [r]^2 p;").unwrap();
        assert_eq!(p.formula, Formula::box_n("r", 2, Formula::prop("p")));
    }

    #[test]
    fn precedence() {
        let f = parse_formula("!p & q | r & <r> s").unwrap();
        let want = Formula::or(
            Formula::and(Formula::not(Formula::prop("p")), Formula::prop("q")),
            Formula::and(Formula::prop("r"), Formula::dia("r", Formula::prop("s"))),
        );
        assert_eq!(f, want);
        let g = parse_formula("down x . <r> x & p").unwrap();
        assert!(matches!(g.kind(), crate::syntax::FormulaKind::And(..)));
    }

    #[test]
    fn global_modalities_and_converse() {
        let f = parse_formula("[A] <E> <r-> p").unwrap();
        let want = Formula::global(Formula::exists(Formula::dia("r-", Formula::prop("p"))));
        assert_eq!(f, want);
    }

    #[test]
    fn comments_and_backward_inclusions() {
        let p = parse("# symmetry\nr- <= r; # trailing\nformula: p;").unwrap();
        assert_eq!(p.assertions, vec![Assertion::incl("r-", "r")]);
    }

    #[test]
    fn reserved_prefix_rejected() {
        let e = parse("formula: _p;").unwrap_err();
        assert_eq!((e.line, e.col), (1, 10));
        assert!(matches!(e.kind, ParseErrorKind::Reserved(_)));
        let e = parse("formula: @'_a p;").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Reserved(_)));
        let e = parse("formula: down _x . _x;").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Reserved(_)));
    }

    #[test]
    fn bad_grades() {
        let e = parse("formula: [r]^-1 p;").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::BadGrade(_)));
        let e = parse("formula: [r]^99999999999 p;").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::BadGrade(_)));
        let e = parse("formula: <r>^q p;").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::BadGrade(_)));
    }

    #[test]
    fn error_positions() {
        let e = parse("trans r;\nformula: p &;").unwrap_err();
        assert_eq!((e.line, e.col), (2, 13));
        let e = parse("trans r;\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingFormula);
        let e = parse("formula: X;").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unbound("X".into()));
        let e = parse("formula: @x p;").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unbound("x".into()));
    }

    #[test]
    fn located_positions() {
        let (_, map) = parse_located("trans r;\n  r- <= s;\nformula: p;").unwrap();
        assert_eq!(map.assertions, vec![Pos { line: 1, col: 1 }, Pos { line: 2, col: 3 }]);
        assert_eq!(map.formula, Pos { line: 3, col: 1 });
    }
}
