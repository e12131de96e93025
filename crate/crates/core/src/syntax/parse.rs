//! Recursive-descent parser for the ASCII formula syntax.
//!
//! Precedence, loosest first: `-o` and `=>` (right associative), then `&`
//! and `+`, then `*` and `par` (both left associative), then the prefix
//! operators `~ ! ?` and the quantifiers. A quantifier body extends over a
//! single prefix-level formula, so `forall x. a -o b` is `(forall x. a) -o b`.
//! An identifier used as a term is a variable when bound by an enclosing
//! quantifier (or predeclared), and a constant otherwise.

use std::collections::HashMap;

use thiserror::Error;

use super::{Atom, BinOp, Formula, Goal, Quant, Term, UnOp, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: symbol `{name}` used with arity {found}, previously {expected}")]
    Arity {
        line: usize,
        col: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("not goal-shaped: {0}")]
    NotGoal(String),
}

/// Arities of the predicate and function symbols seen so far.
#[derive(Clone, Debug, Default)]
pub struct Signature {
    preds: HashMap<String, usize>,
    funcs: HashMap<String, usize>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn pred_arity(&self, name: &str) -> Option<usize> {
        self.preds.get(name).copied()
    }

    pub fn func_arity(&self, name: &str) -> Option<usize> {
        self.funcs.get(name).copied()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    One,
    Zero,
    Bot,
    Top,
    Par,
    Forall,
    Exists,
    Star,
    Amp,
    Plus,
    Lolli,
    Imp,
    Bang,
    Quest,
    Tilde,
    LParen,
    RParen,
    Comma,
    Dot,
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let adv = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                adv(1, &mut i, &mut col);
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let tok = match c {
            '*' => Tok::Star,
            '&' => Tok::Amp,
            '+' => Tok::Plus,
            '!' => Tok::Bang,
            '?' => Tok::Quest,
            '~' => Tok::Tilde,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '1' if !next_is_ident(&chars, i + 1) => Tok::One,
            '0' if !next_is_ident(&chars, i + 1) => Tok::Zero,
            '-' if chars.get(i + 1) == Some(&'o') && !next_is_ident(&chars, i + 2) => {
                adv(1, &mut i, &mut col);
                Tok::Lolli
            }
            '=' if chars.get(i + 1) == Some(&'>') => {
                adv(1, &mut i, &mut col);
                Tok::Imp
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                    col += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let tok = match word.as_str() {
                    "bot" => Tok::Bot,
                    "top" => Tok::Top,
                    "par" => Tok::Par,
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(word),
                };
                out.push(Spanned {
                    tok,
                    line: l0,
                    col: c0,
                });
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        adv(1, &mut i, &mut col);
        out.push(Spanned {
            tok,
            line: l0,
            col: c0,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn next_is_ident(chars: &[char], i: usize) -> bool {
    chars.get(i).is_some_and(|&c| is_ident_char(c))
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}"),
    }
}

/// A reusable parser context: the signature persists across calls so that
/// arity clashes between formulae of one problem are reported.
#[derive(Default)]
pub struct Parser {
    pub sig: Signature,
    /// Free variables that may be referred to by name.
    pub env: HashMap<String, Var>,
}

struct State<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    scope: Vec<Var>,
    ctx: &'a mut Parser,
}

impl Parser {
    pub fn new() -> Parser {
        Parser::default()
    }

    pub fn formula(&mut self, text: &str) -> Result<Formula, ParseError> {
        let toks = lex(text)?;
        let mut st = State {
            toks,
            pos: 0,
            scope: Vec::new(),
            ctx: self,
        };
        let f = st.implication()?;
        st.expect(Tok::Eof)?;
        Ok(f)
    }

    pub fn goal(&mut self, text: &str) -> Result<Goal, ParseError> {
        let f = self.formula(text)?;
        Goal::from_formula(&f).ok_or_else(|| ParseError::NotGoal(text.trim().to_string()))
    }

    pub fn atom(&mut self, text: &str) -> Result<Atom, ParseError> {
        let toks = lex(text)?;
        let mut st = State {
            toks,
            pos: 0,
            scope: Vec::new(),
            ctx: self,
        };
        let a = st.atom()?;
        st.expect(Tok::Eof)?;
        Ok(a)
    }

    pub fn term(&mut self, text: &str) -> Result<Term, ParseError> {
        let toks = lex(text)?;
        let mut st = State {
            toks,
            pos: 0,
            scope: Vec::new(),
            ctx: self,
        };
        let t = st.term()?;
        st.expect(Tok::Eof)?;
        Ok(t)
    }
}

impl State<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let s = &self.toks[self.pos];
        Err(ParseError::Syntax {
            line: s.line,
            col: s.col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!(
                "expected {}, found {}",
                describe(&t),
                describe(self.peek())
            ))
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Lolli => BinOp::Lolli,
            Tok::Imp => BinOp::Imp,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.implication()?;
        Ok(Formula::bin(op, lhs, rhs))
    }

    fn additive(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Amp => BinOp::With,
                Tok::Plus => BinOp::Plus,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = Formula::bin(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Tensor,
                Tok::Par => BinOp::Par,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.prefix()?;
            lhs = Formula::bin(op, lhs, rhs);
        }
    }

    fn prefix(&mut self) -> Result<Formula, ParseError> {
        let op = match self.peek() {
            Tok::Tilde => Some(UnOp::Neg),
            Tok::Bang => Some(UnOp::OfCourse),
            Tok::Quest => Some(UnOp::WhyNot),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            return Ok(Formula::un(op, self.prefix()?));
        }
        let q = match self.peek() {
            Tok::Forall => Quant::Forall,
            Tok::Exists => Quant::Exists,
            _ => return self.primary(),
        };
        self.bump();
        let name = match self.bump().tok {
            Tok::Ident(s) => s,
            other => {
                self.pos -= 1;
                return self.err(format!("expected a variable, found {}", describe(&other)));
            }
        };
        self.expect(Tok::Dot)?;
        let v = Var::bound(&name);
        self.scope.push(v.clone());
        let body = self.prefix();
        self.scope.pop();
        Ok(Formula::Quant(q, v, Box::new(body?)))
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::One => {
                self.bump();
                Ok(Formula::One)
            }
            Tok::Zero => {
                self.bump();
                Ok(Formula::Zero)
            }
            Tok::Bot => {
                self.bump();
                Ok(Formula::Bot)
            }
            Tok::Top => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(_) => Ok(Formula::Atom(self.atom()?)),
            other => self.err(format!("expected a formula, found {}", describe(&other))),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    other => {
                        let other = describe(other);
                        return self.err(format!("expected `,` or `)`, found {other}"));
                    }
                }
            }
        }
        Ok(args)
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let start = self.toks[self.pos].clone();
        let Tok::Ident(name) = start.tok.clone() else {
            return self.err(format!("expected an atom, found {}", describe(&start.tok)));
        };
        self.bump();
        let args = self.args()?;
        check_arity(&mut self.ctx.sig.preds, &name, args.len(), &start)?;
        Ok(Atom::new(&name, args))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let start = self.toks[self.pos].clone();
        let Tok::Ident(name) = start.tok.clone() else {
            return self.err(format!("expected a term, found {}", describe(&start.tok)));
        };
        self.bump();
        if *self.peek() != Tok::LParen {
            if let Some(v) = self.scope.iter().rev().find(|v| *v.name == *name) {
                return Ok(Term::Var(v.clone()));
            }
            if let Some(v) = self.ctx.env.get(&name) {
                return Ok(Term::Var(v.clone()));
            }
        }
        let args = self.args()?;
        check_arity(&mut self.ctx.sig.funcs, &name, args.len(), &start)?;
        Ok(Term::App(name.into(), args))
    }
}

fn check_arity(
    table: &mut HashMap<String, usize>,
    name: &str,
    found: usize,
    at: &Spanned,
) -> Result<(), ParseError> {
    match table.get(name) {
        Some(&expected) if expected != found => Err(ParseError::Arity {
            line: at.line,
            col: at.col,
            name: name.to_string(),
            expected,
            found,
        }),
        Some(_) => Ok(()),
        None => {
            table.insert(name.to_string(), found);
            Ok(())
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    Parser::new().formula(text)
}

/// Parses a formula and reads it as a goal; the formula must already be
/// goal-shaped.
pub fn parse_goal(text: &str) -> Result<Goal, ParseError> {
    Parser::new().goal(text)
}

pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    Parser::new().atom(text)
}
