//! Terms, atoms, formulae, goals and clauses.
//!
//! Variables carry a globally unique id; display names are kept only for
//! printing. Bound variables come from the parser (or from renaming during
//! substitution), eigenvariables and metavariables are created by the proof
//! search engine.

mod alpha;
mod parse;
mod print;
mod subst;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

pub use alpha::{alpha_eq_atom, alpha_eq_clause, alpha_eq_formula, alpha_eq_goal};
pub use parse::{parse_atom, parse_formula, parse_goal, ParseError, Parser, Signature};
pub use print::{print_atom, print_clause, print_formula, print_goal, print_term, Namer};
pub use subst::Subst;

static NEXT_VAR: AtomicU64 = AtomicU64::new(1);

/// Unique identity of a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u64);

impl VarId {
    pub fn fresh() -> VarId {
        VarId(NEXT_VAR.fetch_add(1, Ordering::Relaxed))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarRole {
    /// Bound by a quantifier or a goal binder.
    Bound,
    /// Fresh constant introduced when a goal is reduced on the right.
    Eigen(u32),
    /// Placeholder for an instantiation chosen by unification.
    Meta(u32),
}

#[derive(Clone, Debug)]
pub struct Var {
    pub id: VarId,
    pub name: Arc<str>,
    pub role: VarRole,
}

impl Var {
    pub fn bound(name: &str) -> Var {
        Var {
            id: VarId::fresh(),
            name: name.into(),
            role: VarRole::Bound,
        }
    }

    pub fn eigen(name: &str, level: u32) -> Var {
        Var {
            id: VarId::fresh(),
            name: name.into(),
            role: VarRole::Eigen(level),
        }
    }

    pub fn meta(name: &str, level: u32) -> Var {
        Var {
            id: VarId::fresh(),
            name: name.into(),
            role: VarRole::Meta(level),
        }
    }

    /// A new variable with the same display name and role.
    pub fn renamed(&self) -> Var {
        Var {
            id: VarId::fresh(),
            name: self.name.clone(),
            role: self.role,
        }
    }

    pub fn is_eigen(&self) -> bool {
        matches!(self.role, VarRole::Eigen(_))
    }

    pub fn is_meta(&self) -> bool {
        matches!(self.role, VarRole::Meta(_))
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Var) -> bool {
        self.id == other.id
    }
}

impl Eq for Var {}

impl std::hash::Hash for Var {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.id.hash(state)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    App(Arc<str>, Vec<Term>),
}

impl Term {
    pub fn constant(name: &str) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    pub fn free_vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Term::Var(v) => {
                out.insert(v.id);
            }
            Term::App(_, args) => args.iter().for_each(|t| t.free_vars(out)),
        }
    }

    pub fn occurs(&self, id: VarId) -> bool {
        match self {
            Term::Var(v) => v.id == id,
            Term::App(_, args) => args.iter().any(|t| t.occurs(id)),
        }
    }

    pub(crate) fn symbols(&self, out: &mut BTreeSet<Arc<str>>) {
        if let Term::App(f, args) = self {
            out.insert(f.clone());
            args.iter().for_each(|t| t.symbols(out));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: Arc<str>,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom {
            pred: pred.into(),
            args,
        }
    }

    pub fn prop(pred: &str) -> Atom {
        Atom::new(pred, Vec::new())
    }

    pub fn free_vars(&self, out: &mut BTreeSet<VarId>) {
        self.args.iter().for_each(|t| t.free_vars(out))
    }

    pub fn is_ground(&self) -> bool {
        let mut vs = BTreeSet::new();
        self.free_vars(&mut vs);
        vs.is_empty()
    }

    pub(crate) fn symbols(&self, out: &mut BTreeSet<Arc<str>>) {
        out.insert(self.pred.clone());
        self.args.iter().for_each(|t| t.symbols(out));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Tensor,
    Par,
    With,
    Plus,
    Lolli,
    Imp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    OfCourse,
    WhyNot,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    Forall,
    Exists,
}

/// A formula of full first-order linear logic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    One,
    Bot,
    Top,
    Zero,
    Bin(BinOp, Box<Formula>, Box<Formula>),
    Un(UnOp, Box<Formula>),
    Quant(Quant, Var, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn bin(op: BinOp, l: Formula, r: Formula) -> Formula {
        Formula::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn par(l: Formula, r: Formula) -> Formula {
        Formula::bin(BinOp::Par, l, r)
    }

    pub fn with(l: Formula, r: Formula) -> Formula {
        Formula::bin(BinOp::With, l, r)
    }

    pub fn lolli(l: Formula, r: Formula) -> Formula {
        Formula::bin(BinOp::Lolli, l, r)
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::bin(BinOp::Imp, l, r)
    }

    pub fn un(op: UnOp, f: Formula) -> Formula {
        Formula::Un(op, Box::new(f))
    }

    pub fn forall(v: Var, body: Formula) -> Formula {
        Formula::Quant(Quant::Forall, v, Box::new(body))
    }

    pub fn exists(v: Var, body: Formula) -> Formula {
        Formula::Quant(Quant::Exists, v, Box::new(body))
    }

    pub fn free_vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<VarId>, out: &mut BTreeSet<VarId>) {
        match self {
            Formula::Atom(a) => {
                let mut vs = BTreeSet::new();
                a.free_vars(&mut vs);
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::One | Formula::Bot | Formula::Top | Formula::Zero => {}
            Formula::Bin(_, l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Un(_, f) => f.collect_free(bound, out),
            Formula::Quant(_, v, f) => {
                bound.push(v.id);
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// True iff the formula only uses atoms, bottom, top, par, with, the two
    /// implications and universal quantification.
    pub fn is_forum(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Bot | Formula::Top => true,
            Formula::One | Formula::Zero | Formula::Un(..) => false,
            Formula::Bin(op, l, r) => {
                matches!(op, BinOp::Par | BinOp::With | BinOp::Lolli | BinOp::Imp)
                    && l.is_forum()
                    && r.is_forum()
            }
            Formula::Quant(Quant::Forall, _, f) => f.is_forum(),
            Formula::Quant(Quant::Exists, ..) => false,
        }
    }

    /// Number of connectives, constants and atoms.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::One | Formula::Bot | Formula::Top | Formula::Zero => 1,
            Formula::Bin(_, l, r) => 1 + l.size() + r.size(),
            Formula::Un(_, f) | Formula::Quant(_, _, f) => 1 + f.size(),
        }
    }

    /// The set of connective kinds appearing in the formula.
    pub fn connectives(&self) -> BTreeSet<&'static str> {
        let mut out = BTreeSet::new();
        self.collect_connectives(&mut out);
        out
    }

    fn collect_connectives(&self, out: &mut BTreeSet<&'static str>) {
        match self {
            Formula::Atom(_) => {}
            Formula::One => {
                out.insert("1");
            }
            Formula::Bot => {
                out.insert("bot");
            }
            Formula::Top => {
                out.insert("top");
            }
            Formula::Zero => {
                out.insert("0");
            }
            Formula::Bin(op, l, r) => {
                out.insert(match op {
                    BinOp::Tensor => "*",
                    BinOp::Par => "par",
                    BinOp::With => "&",
                    BinOp::Plus => "+",
                    BinOp::Lolli => "-o",
                    BinOp::Imp => "=>",
                });
                l.collect_connectives(out);
                r.collect_connectives(out);
            }
            Formula::Un(op, f) => {
                out.insert(match op {
                    UnOp::OfCourse => "!",
                    UnOp::WhyNot => "?",
                    UnOp::Neg => "~",
                });
                f.collect_connectives(out);
            }
            Formula::Quant(q, _, f) => {
                out.insert(match q {
                    Quant::Forall => "forall",
                    Quant::Exists => "exists",
                });
                f.collect_connectives(out);
            }
        }
    }

    pub(crate) fn symbols(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Atom(a) => a.symbols(out),
            Formula::One | Formula::Bot | Formula::Top | Formula::Zero => {}
            Formula::Bin(_, l, r) => {
                l.symbols(out);
                r.symbols(out);
            }
            Formula::Un(_, f) | Formula::Quant(_, _, f) => f.symbols(out),
        }
    }
}

/// `forall binder. (clause_1 & ... & clause_h)`; no clauses means `forall binder. top`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Goal {
    pub binder: Vec<Var>,
    pub clauses: Vec<Clause>,
}

/// `G_1 => ... => H_1 -o ... -o a_1 par ... par a_k`; an empty head is `bot`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    /// Classical premises.
    pub cp: Vec<Goal>,
    /// Linear premises.
    pub lp: Vec<Goal>,
    pub head: Vec<Atom>,
}

impl Goal {
    pub fn new(binder: Vec<Var>, clauses: Vec<Clause>) -> Goal {
        Goal { binder, clauses }
    }

    /// The goal `top`.
    pub fn top() -> Goal {
        Goal {
            binder: Vec::new(),
            clauses: Vec::new(),
        }
    }

    /// A goal consisting of a single clause and no binder.
    pub fn clause(c: Clause) -> Goal {
        Goal {
            binder: Vec::new(),
            clauses: vec![c],
        }
    }

    /// The goal `a`.
    pub fn atom(a: Atom) -> Goal {
        Goal::clause(Clause::fact(a))
    }

    /// True for `forall x. top`.
    pub fn is_top(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn to_formula(&self) -> Formula {
        goal_to_formula(self)
    }

    pub fn free_vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub(crate) fn collect_free(&self, bound: &mut Vec<VarId>, out: &mut BTreeSet<VarId>) {
        let n = bound.len();
        bound.extend(self.binder.iter().map(|v| v.id));
        for c in &self.clauses {
            c.collect_free(bound, out);
        }
        bound.truncate(n);
    }

    pub(crate) fn symbols(&self, out: &mut BTreeSet<Arc<str>>) {
        for c in &self.clauses {
            c.symbols(out);
        }
    }

    /// Structural view of a formula as a goal: the inverse of
    /// [`goal_to_formula`]. Returns `None` if the formula is not goal-shaped.
    pub fn from_formula(f: &Formula) -> Option<Goal> {
        let mut binder = Vec::new();
        let mut body = f;
        while let Formula::Quant(Quant::Forall, v, inner) = body {
            binder.push(v.clone());
            body = inner;
        }
        if *body == Formula::Top {
            return Some(Goal {
                binder,
                clauses: Vec::new(),
            });
        }
        let mut parts = Vec::new();
        flatten(body, BinOp::With, &mut parts);
        let clauses = parts
            .into_iter()
            .map(Clause::from_formula)
            .collect::<Option<Vec<_>>>()?;
        Some(Goal { binder, clauses })
    }
}

impl Clause {
    pub fn new(cp: Vec<Goal>, lp: Vec<Goal>, head: Vec<Atom>) -> Clause {
        Clause { cp, lp, head }
    }

    /// The clause `a`.
    pub fn fact(a: Atom) -> Clause {
        Clause {
            cp: Vec::new(),
            lp: Vec::new(),
            head: vec![a],
        }
    }

    /// The clause `bot`.
    pub fn bot() -> Clause {
        Clause::default()
    }

    pub fn to_formula(&self) -> Formula {
        clause_to_formula(self)
    }

    pub fn free_vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub(crate) fn collect_free(&self, bound: &mut Vec<VarId>, out: &mut BTreeSet<VarId>) {
        for g in self.cp.iter().chain(&self.lp) {
            g.collect_free(bound, out);
        }
        for a in &self.head {
            let mut vs = BTreeSet::new();
            a.free_vars(&mut vs);
            out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
        }
    }

    pub(crate) fn symbols(&self, out: &mut BTreeSet<Arc<str>>) {
        for g in self.cp.iter().chain(&self.lp) {
            g.symbols(out);
        }
        for a in &self.head {
            a.symbols(out);
        }
    }

    /// Structural view of a formula as a clause.
    pub fn from_formula(f: &Formula) -> Option<Clause> {
        let mut cp = Vec::new();
        let mut lp = Vec::new();
        let mut rest = f;
        while let Formula::Bin(BinOp::Imp, l, r) = rest {
            cp.push(Goal::from_formula(l)?);
            rest = r;
        }
        while let Formula::Bin(BinOp::Lolli, l, r) = rest {
            lp.push(Goal::from_formula(l)?);
            rest = r;
        }
        let head = match rest {
            Formula::Bot => Vec::new(),
            _ => {
                let mut parts = Vec::new();
                flatten(rest, BinOp::Par, &mut parts);
                parts
                    .into_iter()
                    .map(|p| match p {
                        Formula::Atom(a) => Some(a.clone()),
                        _ => None,
                    })
                    .collect::<Option<Vec<_>>>()?
            }
        };
        Some(Clause { cp, lp, head })
    }
}

fn flatten<'a>(f: &'a Formula, op: BinOp, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::Bin(o, l, r) if *o == op => {
            flatten(l, op, out);
            flatten(r, op, out);
        }
        _ => out.push(f),
    }
}

fn fold_left(op: BinOp, items: Vec<Formula>) -> Option<Formula> {
    let mut it = items.into_iter();
    let first = it.next()?;
    Some(it.fold(first, |acc, f| Formula::bin(op, acc, f)))
}

/// The formula denoted by a goal.
pub fn goal_to_formula(g: &Goal) -> Formula {
    let body = fold_left(
        BinOp::With,
        g.clauses.iter().map(clause_to_formula).collect(),
    )
    .unwrap_or(Formula::Top);
    g.binder
        .iter()
        .rev()
        .fold(body, |acc, v| Formula::forall(v.clone(), acc))
}

/// The formula denoted by a clause.
pub fn clause_to_formula(c: &Clause) -> Formula {
    let head = fold_left(
        BinOp::Par,
        c.head.iter().cloned().map(Formula::Atom).collect(),
    )
    .unwrap_or(Formula::Bot);
    let body =
        c.lp.iter()
            .rev()
            .fold(head, |acc, g| Formula::lolli(goal_to_formula(g), acc));
    c.cp.iter()
        .rev()
        .fold(body, |acc, g| Formula::imp(goal_to_formula(g), acc))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self, &Namer::default()))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_atom(self, &Namer::default()))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self, &Namer::default()))
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_goal(self, &Namer::default()))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_clause(self, &Namer::default()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn empty_goal_is_top() {
        assert_eq!(goal_to_formula(&Goal::top()), Formula::Top);
    }

    #[test]
    fn empty_clause_is_bot() {
        assert_eq!(clause_to_formula(&Clause::bot()), Formula::Bot);
    }

    #[test]
    fn linear_premise_clause() {
        let c = Clause::new(
            vec![],
            vec![Goal::atom(Atom::prop("a"))],
            vec![Atom::prop("b")],
        );
        assert_eq!(clause_to_formula(&c), p("a -o b"));
    }

    #[test]
    fn goal_view_inverts_embedding() {
        for s in [
            "top",
            "bot",
            "a",
            "a par b par c",
            "forall x. forall y. top",
            "forall x.(p(x) & (q(x) -o r))",
            "(a => b) => c -o d -o e par f",
            "(top -o bot) -o bot",
            "a & b & (c -o d)",
        ] {
            let f = p(s);
            let g = Goal::from_formula(&f).unwrap_or_else(|| panic!("{s} not goal-shaped"));
            assert_eq!(goal_to_formula(&g), f, "{s}");
        }
    }

    #[test]
    fn non_goal_shapes_are_rejected() {
        for s in [
            "a * b",
            "top & a",
            "a -o b => c",
            "(a & b) par c",
            "!a",
            "a par bot",
        ] {
            assert!(Goal::from_formula(&p(s)).is_none(), "{s}");
        }
    }

    #[test]
    fn forum_fragment() {
        assert!(p("forall x.(p(x) -o q) & (a => bot) par top").is_forum());
        assert!(!p("a * b").is_forum());
        assert!(!p("exists x. p(x)").is_forum());
        assert!(!p("~a").is_forum());
    }
}
