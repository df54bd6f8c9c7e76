//! First-order sentences over rooted trees.
//!
//! Vocabulary: the constant `R` (the root), equality, and the binary parent
//! relation `(parent a b)`, read "the parent of `a` is `b`". Terms are
//! variables or `R` only; nesting parent terms is rejected because it would
//! let a bounded-depth sentence talk about unbounded path lengths.
//!
//! Surface syntax (s-expressions):
//!
//! ```text
//! expr := (not e) | (and e+) | (or e+) | (implies e e)
//!       | (exists VAR e) | (forall VAR e) | (= t t) | (parent t t)
//! t    := VAR | R
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Root,
    Var(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    Eq(Term, Term),
    /// `Parent(a, b)`: `a` is not the root and its parent is `b`.
    Parent(Term, Term),
}

impl Formula {
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().map(Formula::quantifier_depth).max().unwrap_or(0)
            }
            Formula::Implies(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_depth(),
            Formula::Eq(..) | Formula::Parent(..) => 0,
        }
    }

    /// First free variable, if any, given the variables bound outside.
    fn free_variable<'a>(&'a self, bound: &mut Vec<&'a str>) -> Option<&'a str> {
        let term_free = |t: &'a Term, bound: &Vec<&'a str>| match t {
            Term::Var(v) if !bound.contains(&v.as_str()) => Some(v.as_str()),
            _ => None,
        };
        match self {
            Formula::Not(f) => f.free_variable(bound),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().find_map(|f| f.free_variable(bound)),
            Formula::Implies(a, b) => a.free_variable(bound).or_else(|| b.free_variable(bound)),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v);
                let r = f.free_variable(bound);
                bound.pop();
                r
            }
            Formula::Eq(a, b) | Formula::Parent(a, b) => {
                term_free(a, bound).or_else(|| term_free(b, bound))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Root => f.write_str("R"),
            Term::Var(v) => f.write_str(v),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Not(x) => write!(f, "(not {x})"),
            Formula::And(xs) | Formula::Or(xs) => {
                f.write_str(if matches!(self, Formula::And(_)) {
                    "(and"
                } else {
                    "(or"
                })?;
                for x in xs {
                    write!(f, " {x}")?;
                }
                f.write_str(")")
            }
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Exists(v, x) => write!(f, "(exists {v} {x})"),
            Formula::Forall(v, x) => write!(f, "(forall {v} {x})"),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Parent(a, b) => write!(f, "(parent {a} {b})"),
        }
    }
}

/// A closed formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sentence(Formula);

impl Sentence {
    pub fn new(formula: Formula) -> Result<Self> {
        if let Some(v) = formula.free_variable(&mut Vec::new()) {
            return Err(Error::FreeVariable(v.to_string()));
        }
        Ok(Sentence(formula))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Parser::new(text);
        let formula = p.formula()?;
        if let Some(tok) = p.peek() {
            return Err(p.error(tok.pos, "trailing input after sentence"));
        }
        Sentence::new(formula)
    }

    pub fn formula(&self) -> &Formula {
        &self.0
    }

    pub fn quantifier_depth(&self) -> usize {
        self.0.quantifier_depth()
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for Sentence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Sentence::parse(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    tok: Tok<'a>,
    pos: usize,
}

struct Parser<'a> {
    tokens: Vec<Token<'a>>,
    next: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        let mut tokens = Vec::new();
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            match bytes[i] {
                b'(' => {
                    tokens.push(Token {
                        tok: Tok::Open,
                        pos: i,
                    });
                    i += 1;
                }
                b')' => {
                    tokens.push(Token {
                        tok: Tok::Close,
                        pos: i,
                    });
                    i += 1;
                }
                b if b.is_ascii_whitespace() => i += 1,
                _ => {
                    let start = i;
                    while i < bytes.len()
                        && !bytes[i].is_ascii_whitespace()
                        && bytes[i] != b'('
                        && bytes[i] != b')'
                    {
                        i += 1;
                    }
                    tokens.push(Token {
                        tok: Tok::Atom(&text[start..i]),
                        pos: start,
                    });
                }
            }
        }
        Parser {
            tokens,
            next: 0,
            len: text.len(),
        }
    }

    fn error(&self, pos: usize, msg: &str) -> Error {
        Error::SentenceSyntax {
            pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<Token<'a>> {
        self.tokens.get(self.next).copied()
    }

    fn bump(&mut self) -> Result<Token<'a>> {
        let t = self
            .peek()
            .ok_or_else(|| self.error(self.len, "unexpected end of input"))?;
        self.next += 1;
        Ok(t)
    }

    fn expect_close(&mut self) -> Result<()> {
        let t = self.bump()?;
        match t.tok {
            Tok::Close => Ok(()),
            _ => Err(self.error(t.pos, "expected `)`")),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let open = self.bump()?;
        if open.tok != Tok::Open {
            return Err(self.error(open.pos, "expected `(`"));
        }
        let head = self.bump()?;
        let Tok::Atom(op) = head.tok else {
            return Err(self.error(head.pos, "expected an operator"));
        };
        let f = match op {
            "not" => Formula::Not(Box::new(self.formula()?)),
            "and" | "or" => {
                let mut parts = vec![self.formula()?];
                while matches!(self.peek(), Some(Token { tok: Tok::Open, .. })) {
                    parts.push(self.formula()?);
                }
                if op == "and" {
                    Formula::And(parts)
                } else {
                    Formula::Or(parts)
                }
            }
            "implies" => {
                let a = self.formula()?;
                let b = self.formula()?;
                Formula::Implies(Box::new(a), Box::new(b))
            }
            "exists" | "forall" => {
                let var = self.variable()?;
                let body = Box::new(self.formula()?);
                if op == "exists" {
                    Formula::Exists(var, body)
                } else {
                    Formula::Forall(var, body)
                }
            }
            "=" | "parent" => {
                let a = self.term()?;
                let b = self.term()?;
                if op == "=" {
                    Formula::Eq(a, b)
                } else {
                    Formula::Parent(a, b)
                }
            }
            _ => return Err(self.error(head.pos, "unknown operator")),
        };
        self.expect_close()?;
        Ok(f)
    }

    fn variable(&mut self) -> Result<String> {
        let t = self.bump()?;
        match t.tok {
            Tok::Atom("R") => Err(self.error(t.pos, "R is a constant, not a variable")),
            Tok::Atom(name) if is_identifier(name) => Ok(name.to_string()),
            _ => Err(self.error(t.pos, "expected a variable name")),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let t = self.bump()?;
        match t.tok {
            Tok::Atom("R") => Ok(Term::Root),
            Tok::Atom(name) if is_identifier(name) => Ok(Term::Var(name.to_string())),
            Tok::Open => match self.peek() {
                Some(Token {
                    tok: Tok::Atom("parent"),
                    ..
                }) => Err(Error::NestedParentTerm { pos: t.pos }),
                _ => Err(self.error(t.pos, "expected a variable or R")),
            },
            _ => Err(self.error(t.pos, "expected a variable or R")),
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// "No node has precisely one child."
pub const NO_ONE_CHILD: &str = "(not (exists u (exists x (and (parent x u) \
     (forall z (implies (not (= z x)) (not (parent z u))))))))";

#[cfg(test)]
mod tests {
    use super::*;

    fn var(s: &str) -> Term {
        Term::Var(s.into())
    }

    #[test]
    fn parses_simple_sentence() {
        let s = Sentence::parse("(exists x (parent x R))").unwrap();
        assert_eq!(
            s.formula(),
            &Formula::Exists("x".into(), Box::new(Formula::Parent(var("x"), Term::Root)))
        );
        assert_eq!(s.quantifier_depth(), 1);
    }

    #[test]
    fn parses_no_one_child() {
        let s = Sentence::parse(NO_ONE_CHILD).unwrap();
        let body = Formula::And(vec![
            Formula::Parent(var("x"), var("u")),
            Formula::Forall(
                "z".into(),
                Box::new(Formula::Implies(
                    Box::new(Formula::Not(Box::new(Formula::Eq(var("z"), var("x"))))),
                    Box::new(Formula::Not(Box::new(Formula::Parent(var("z"), var("u"))))),
                )),
            ),
        ]);
        let expected = Formula::Not(Box::new(Formula::Exists(
            "u".into(),
            Box::new(Formula::Exists("x".into(), Box::new(body))),
        )));
        assert_eq!(s.formula(), &expected);
        assert_eq!(s.quantifier_depth(), 3);
    }

    #[test]
    fn depth_zero() {
        assert_eq!(Sentence::parse("(= R R)").unwrap().quantifier_depth(), 0);
        let s = Sentence::parse("(and (exists x (= x x)) (forall y (exists z (parent z y))))");
        assert_eq!(s.unwrap().quantifier_depth(), 2);
    }

    #[test]
    fn round_trips() {
        for text in [
            NO_ONE_CHILD,
            "(or (= R R) (not (= R R)) (exists a (parent a R)))",
            "(forall x_1 (implies (parent x_1 R) (exists y (parent y x_1))))",
        ] {
            let s = Sentence::parse(text).unwrap();
            let again = Sentence::parse(&s.to_string()).unwrap();
            assert_eq!(s, again);
        }
    }

    #[test]
    fn free_variables_rejected() {
        assert_eq!(
            Sentence::parse("(parent x R)"),
            Err(Error::FreeVariable("x".into()))
        );
        assert_eq!(
            Sentence::parse("(and (exists x (= x x)) (= x R))"),
            Err(Error::FreeVariable("x".into()))
        );
    }

    #[test]
    fn nested_parent_rejected() {
        assert_eq!(
            Sentence::parse("(exists x (= (parent x) R))"),
            Err(Error::NestedParentTerm { pos: 13 })
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        let cases = [
            ("", 0),
            ("(exists x (parent x R)", 22),
            ("(frobnicate)", 1),
            ("(exists R (= R R))", 8),
            ("(= R R) (= R R)", 8),
            ("(and)", 4),
            ("(= R 3x)", 5),
        ];
        for (text, pos) in cases {
            match Sentence::parse(text) {
                Err(Error::SentenceSyntax { pos: p, .. }) => assert_eq!(p, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
