use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::{
    goal_to_formula, Atom, BinOp, Clause, Formula, Goal, Quant, Term, UnOp, VarId, VarRole,
};

/// Display names for free variables.
///
/// Names registered here win; other eigenvariables and metavariables fall
/// back to `name_id`, which is unique but depends on allocation order.
#[derive(Clone, Debug, Default)]
pub struct Namer {
    names: HashMap<VarId, String>,
}

impl Namer {
    pub fn new() -> Namer {
        Namer::default()
    }

    pub fn set(&mut self, id: VarId, name: String) {
        self.names.insert(id, name);
    }

    pub fn get(&self, id: VarId) -> Option<&str> {
        self.names.get(&id).map(String::as_str)
    }

    pub fn contains(&self, id: VarId) -> bool {
        self.names.contains_key(&id)
    }

    fn name(&self, v: &super::Var) -> String {
        if let Some(n) = self.names.get(&v.id) {
            return n.clone();
        }
        match v.role {
            VarRole::Bound => v.name.to_string(),
            VarRole::Eigen(_) | VarRole::Meta(_) => format!("{}_{}", v.name, v.id.0),
        }
    }
}

struct Printer<'a> {
    namer: &'a Namer,
    scope: Vec<(VarId, String)>,
}

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Bin(BinOp::Lolli | BinOp::Imp, ..) => 1,
        Formula::Bin(BinOp::With | BinOp::Plus, ..) => 2,
        Formula::Bin(BinOp::Tensor | BinOp::Par, ..) => 3,
        Formula::Un(..) | Formula::Quant(..) => 4,
        _ => 5,
    }
}

impl Printer<'_> {
    fn var_name(&self, v: &super::Var) -> String {
        for (id, name) in self.scope.iter().rev() {
            if *id == v.id {
                return name.clone();
            }
        }
        self.namer.name(v)
    }

    fn term(&self, t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => out.push_str(&self.var_name(v)),
            Term::App(f, args) => {
                out.push_str(f);
                self.args(args, out);
            }
        }
    }

    fn args(&self, args: &[Term], out: &mut String) {
        if args.is_empty() {
            return;
        }
        out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            self.term(a, out);
        }
        out.push(')');
    }

    fn atom(&self, a: &Atom, out: &mut String) {
        out.push_str(&a.pred);
        self.args(&a.args, out);
    }

    /// Picks a display name for a binder that neither captures a free
    /// variable of the body nor collides with a constant in it.
    fn binder_name(&self, v: &super::Var, body: &Formula) -> String {
        let mut taken: BTreeSet<String> = BTreeSet::new();
        let mut syms: BTreeSet<Arc<str>> = BTreeSet::new();
        body.symbols(&mut syms);
        taken.extend(syms.iter().map(|s| s.to_string()));
        for id in body.free_vars() {
            if id == v.id {
                continue;
            }
            let shown = self
                .scope
                .iter()
                .rev()
                .find(|(i, _)| *i == id)
                .map(|(_, n)| n.clone())
                .or_else(|| find_var(body, id).map(|w| self.namer.name(&w)));
            if let Some(n) = shown {
                taken.insert(n);
            }
        }
        let mut name = v.name.to_string();
        while taken.contains(&name) || is_keyword(&name) {
            name.push('\'');
        }
        name
    }

    fn formula(&mut self, f: &Formula, min: u8, out: &mut String) {
        let lvl = level(f);
        let paren = lvl < min;
        if paren {
            out.push('(');
        }
        match f {
            Formula::Atom(a) => self.atom(a, out),
            Formula::One => out.push('1'),
            Formula::Zero => out.push('0'),
            Formula::Bot => out.push_str("bot"),
            Formula::Top => out.push_str("top"),
            Formula::Bin(op, l, r) => {
                let sym = match op {
                    BinOp::Tensor => " * ",
                    BinOp::Par => " par ",
                    BinOp::With => " & ",
                    BinOp::Plus => " + ",
                    BinOp::Lolli => " -o ",
                    BinOp::Imp => " => ",
                };
                let (lmin, rmin) = if lvl == 1 { (2, 1) } else { (lvl, lvl + 1) };
                self.formula(l, lmin, out);
                out.push_str(sym);
                self.formula(r, rmin, out);
            }
            Formula::Un(op, g) => {
                out.push(match op {
                    UnOp::Neg => '~',
                    UnOp::OfCourse => '!',
                    UnOp::WhyNot => '?',
                });
                self.formula(g, 4, out);
            }
            Formula::Quant(q, v, body) => {
                let name = self.binder_name(v, body);
                out.push_str(match q {
                    Quant::Forall => "forall ",
                    Quant::Exists => "exists ",
                });
                out.push_str(&name);
                out.push_str(". ");
                self.scope.push((v.id, name));
                self.formula(body, 4, out);
                self.scope.pop();
            }
        }
        if paren {
            out.push(')');
        }
    }
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "bot" | "top" | "par" | "forall" | "exists")
}

fn find_var(f: &Formula, id: VarId) -> Option<super::Var> {
    fn in_term(t: &Term, id: VarId) -> Option<super::Var> {
        match t {
            Term::Var(v) if v.id == id => Some(v.clone()),
            Term::Var(_) => None,
            Term::App(_, args) => args.iter().find_map(|a| in_term(a, id)),
        }
    }
    match f {
        Formula::Atom(a) => a.args.iter().find_map(|t| in_term(t, id)),
        Formula::Bin(_, l, r) => find_var(l, id).or_else(|| find_var(r, id)),
        Formula::Un(_, g) | Formula::Quant(_, _, g) => find_var(g, id),
        _ => None,
    }
}

pub fn print_term(t: &Term, namer: &Namer) -> String {
    let mut out = String::new();
    Printer {
        namer,
        scope: Vec::new(),
    }
    .term(t, &mut out);
    out
}

pub fn print_atom(a: &Atom, namer: &Namer) -> String {
    let mut out = String::new();
    Printer {
        namer,
        scope: Vec::new(),
    }
    .atom(a, &mut out);
    out
}

/// Prints with the fewest parentheses that re-parse to the same tree.
pub fn print_formula(f: &Formula, namer: &Namer) -> String {
    let mut out = String::new();
    Printer {
        namer,
        scope: Vec::new(),
    }
    .formula(f, 0, &mut out);
    out
}

pub fn print_goal(g: &Goal, namer: &Namer) -> String {
    print_formula(&goal_to_formula(g), namer)
}

pub fn print_clause(c: &Clause, namer: &Namer) -> String {
    print_formula(&super::clause_to_formula(c), namer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Subst, Var};

    fn round(s: &str) -> String {
        parse_formula(s).unwrap().to_string()
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(round("(a par b) par c"), "a par b par c");
        assert_eq!(round("a par (b par c)"), "a par (b par c)");
        assert_eq!(round("(a -o b) -o c"), "(a -o b) -o c");
        assert_eq!(round("a -o (b -o c)"), "a -o b -o c");
        assert_eq!(round("bot"), "bot");
        assert_eq!(round("(forall x. p(x)) par q"), "forall x. p(x) par q");
        assert_eq!(round("forall x. (p(x) par q)"), "forall x. (p(x) par q)");
        assert_eq!(round("~(a & b)"), "~(a & b)");
        assert_eq!(
            round("!forall x. ~a -o b & (c par d) => e"),
            "!forall x. ~a -o b & c par d => e"
        );
    }

    #[test]
    fn binder_renamed_when_it_would_capture() {
        let x = Var::bound("x");
        let y = Var::bound("y");
        let body = Formula::atom(Atom::new(
            "b",
            vec![Term::Var(x.clone()), Term::Var(y.clone())],
        ));
        let f = Formula::forall(x.clone(), body);
        let g = Subst::single(&y, Term::app("f", vec![Term::Var(x.clone())])).formula(&f);
        assert_eq!(g.to_string(), "forall x'. b(x', f(x))");
    }

    #[test]
    fn binder_renamed_away_from_constants() {
        let c = Var::bound("c");
        let f = Formula::forall(
            c.clone(),
            Formula::atom(Atom::new("p", vec![Term::Var(c), Term::constant("c")])),
        );
        let s = f.to_string();
        assert_eq!(s, "forall c'. p(c', c)");
        assert!(crate::syntax::alpha_eq_formula(
            &parse_formula(&s).unwrap(),
            &f
        ));
    }
}
