use std::collections::{BTreeSet, HashMap};

use super::{Atom, Clause, Formula, Goal, Term, Var, VarId};

/// A finite map from variables to terms, applied without capture.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    map: HashMap<VarId, Term>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn single(v: &Var, t: Term) -> Subst {
        let mut s = Subst::new();
        s.insert(v, t);
        s
    }

    /// Maps each variable to the corresponding term, pairwise.
    pub fn zip(vars: &[Var], terms: &[Term]) -> Subst {
        assert_eq!(vars.len(), terms.len(), "substitution arity mismatch");
        let mut s = Subst::new();
        for (v, t) in vars.iter().zip(terms) {
            s.insert(v, t.clone());
        }
        s
    }

    pub fn insert(&mut self, v: &Var, t: Term) {
        self.map.insert(v.id, t);
    }

    pub fn get(&self, id: VarId) -> Option<&Term> {
        self.map.get(&id)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn domain(&self) -> impl Iterator<Item = VarId> + '_ {
        self.map.keys().copied()
    }

    /// Free variables of the terms in the range.
    pub fn range_vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        for t in self.map.values() {
            t.free_vars(&mut out);
        }
        out
    }

    pub fn term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.map.get(&v.id).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.term(a)).collect()),
        }
    }

    pub fn atom(&self, a: &Atom) -> Atom {
        Atom {
            pred: a.pred.clone(),
            args: a.args.iter().map(|t| self.term(t)).collect(),
        }
    }

    pub fn formula(&self, f: &Formula) -> Formula {
        if self.is_empty() {
            return f.clone();
        }
        let avoid = self.range_vars();
        self.formula_in(f, &avoid)
    }

    pub fn goal(&self, g: &Goal) -> Goal {
        if self.is_empty() {
            return g.clone();
        }
        let avoid = self.range_vars();
        self.goal_in(g, &avoid)
    }

    pub fn clause(&self, c: &Clause) -> Clause {
        if self.is_empty() {
            return c.clone();
        }
        let avoid = self.range_vars();
        self.clause_in(c, &avoid)
    }

    /// Goes under a binder: drops shadowed entries and renames the bound
    /// variable if it would capture a variable of the range.
    fn enter(&self, v: &Var, avoid: &BTreeSet<VarId>) -> (Subst, Var) {
        let mut inner = self.clone();
        inner.map.remove(&v.id);
        if avoid.contains(&v.id) {
            let fresh = v.renamed();
            inner.map.insert(v.id, Term::Var(fresh.clone()));
            (inner, fresh)
        } else {
            (inner, v.clone())
        }
    }

    fn formula_in(&self, f: &Formula, avoid: &BTreeSet<VarId>) -> Formula {
        match f {
            Formula::Atom(a) => Formula::Atom(self.atom(a)),
            Formula::One | Formula::Bot | Formula::Top | Formula::Zero => f.clone(),
            Formula::Bin(op, l, r) => {
                Formula::bin(*op, self.formula_in(l, avoid), self.formula_in(r, avoid))
            }
            Formula::Un(op, g) => Formula::un(*op, self.formula_in(g, avoid)),
            Formula::Quant(q, v, body) => {
                let (inner, v) = self.enter(v, avoid);
                Formula::Quant(*q, v, Box::new(inner.formula_in(body, avoid)))
            }
        }
    }

    fn goal_in(&self, g: &Goal, avoid: &BTreeSet<VarId>) -> Goal {
        let mut inner = self.clone();
        let mut binder = Vec::with_capacity(g.binder.len());
        for v in &g.binder {
            let (next, v) = inner.enter(v, avoid);
            inner = next;
            binder.push(v);
        }
        Goal {
            binder,
            clauses: g
                .clauses
                .iter()
                .map(|c| inner.clause_in(c, avoid))
                .collect(),
        }
    }

    fn clause_in(&self, c: &Clause, avoid: &BTreeSet<VarId>) -> Clause {
        Clause {
            cp: c.cp.iter().map(|g| self.goal_in(g, avoid)).collect(),
            lp: c.lp.iter().map(|g| self.goal_in(g, avoid)).collect(),
            head: c.head.iter().map(|a| self.atom(a)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq_formula, parse_formula, Quant};

    #[test]
    fn ground_instance() {
        let f = parse_formula("forall x. a(x)").unwrap();
        let Formula::Quant(_, x, body) = f else {
            unreachable!()
        };
        let s = Subst::single(&x, Term::constant("c"));
        assert_eq!(s.formula(&body), parse_formula("a(c)").unwrap());
    }

    #[test]
    fn capture_is_avoided() {
        // (forall x. b(x, y))[y := f(x)] with x the same variable as the binder
        let x = Var::bound("x");
        let y = Var::bound("y");
        let body = Formula::atom(Atom::new(
            "b",
            vec![Term::Var(x.clone()), Term::Var(y.clone())],
        ));
        let f = Formula::forall(x.clone(), body);
        let s = Subst::single(&y, Term::app("f", vec![Term::Var(x.clone())]));
        let out = s.formula(&f);
        let Formula::Quant(Quant::Forall, x2, inner) = &out else {
            panic!()
        };
        assert_ne!(x2.id, x.id);
        let expect = Formula::atom(Atom::new(
            "b",
            vec![
                Term::Var(x2.clone()),
                Term::app("f", vec![Term::Var(x.clone())]),
            ],
        ));
        assert_eq!(**inner, expect);
        assert!(out.free_vars().contains(&x.id));
    }

    #[test]
    fn identity_substitution() {
        let f = parse_formula("forall x. (p(x) -o exists y. q(x, y))").unwrap();
        assert_eq!(Subst::new().formula(&f), f);
        let z = Var::bound("z");
        let s = Subst::single(&z, Term::Var(z.clone()));
        assert!(alpha_eq_formula(&s.formula(&f), &f));
    }

    #[test]
    fn shadowed_binder_is_untouched() {
        let f = parse_formula("forall x. p(x)").unwrap();
        let Formula::Quant(_, x, _) = &f else {
            unreachable!()
        };
        let s = Subst::single(x, Term::constant("c"));
        assert_eq!(s.formula(&f), f);
    }
}
