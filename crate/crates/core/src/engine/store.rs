use std::collections::HashMap;

use crate::syntax::{Atom, Clause, Goal, Term, Var, VarId, VarRole};

#[derive(Clone, Debug)]
enum Undo {
    Bind(VarId),
    Level(VarId, Option<u32>),
}

/// Metavariable bindings with a trail for backtracking.
///
/// Every eigenvariable and metavariable has a level. A metavariable may
/// only be bound to terms whose eigenvariables are not younger than itself;
/// binding also lowers the level of the metavariables it captures.
#[derive(Clone, Debug, Default)]
pub struct BindingStore {
    bindings: HashMap<VarId, Term>,
    lowered: HashMap<VarId, u32>,
    trail: Vec<Undo>,
    level: u32,
}

/// A position in the trail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mark(usize);

impl BindingStore {
    pub fn new() -> BindingStore {
        BindingStore::default()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Opens a new level for the eigenvariables of a goal reduction.
    pub fn next_level(&mut self) -> u32 {
        self.level += 1;
        self.level
    }

    pub fn fresh_meta(&self, name: &str) -> Var {
        Var::meta(name, self.level)
    }

    pub fn mark(&self) -> Mark {
        Mark(self.trail.len())
    }

    pub fn undo(&mut self, m: Mark) {
        while self.trail.len() > m.0 {
            match self.trail.pop().expect("trail entry") {
                Undo::Bind(id) => {
                    self.bindings.remove(&id);
                }
                Undo::Level(id, None) => {
                    self.lowered.remove(&id);
                }
                Undo::Level(id, Some(l)) => {
                    self.lowered.insert(id, l);
                }
            }
        }
    }

    pub fn is_bound(&self, v: &Var) -> bool {
        self.bindings.contains_key(&v.id)
    }

    fn var_level(&self, v: &Var) -> u32 {
        match v.role {
            VarRole::Meta(l) => self.lowered.get(&v.id).copied().unwrap_or(l),
            VarRole::Eigen(l) => l,
            VarRole::Bound => 0,
        }
    }

    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.bindings.get(&v.id) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    /// The term with every bound metavariable replaced, recursively.
    pub fn resolve(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Var(v) => Term::Var(v.clone()),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| self.resolve(a)).collect())
            }
        }
    }

    pub fn resolve_atom(&self, a: &Atom) -> Atom {
        Atom {
            pred: a.pred.clone(),
            args: a.args.iter().map(|t| self.resolve(t)).collect(),
        }
    }

    pub fn resolve_goal(&self, g: &Goal) -> Goal {
        Goal {
            binder: g.binder.clone(),
            clauses: g.clauses.iter().map(|c| self.resolve_clause(c)).collect(),
        }
    }

    pub fn resolve_clause(&self, c: &Clause) -> Clause {
        Clause {
            cp: c.cp.iter().map(|g| self.resolve_goal(g)).collect(),
            lp: c.lp.iter().map(|g| self.resolve_goal(g)).collect(),
            head: c.head.iter().map(|a| self.resolve_atom(a)).collect(),
        }
    }

    /// Makes the two terms equal, or leaves the store unchanged and fails.
    pub fn unify(&mut self, s: &Term, t: &Term) -> bool {
        let m = self.mark();
        let ok = self.unify_inner(s, t);
        if !ok {
            self.undo(m);
        }
        ok
    }

    pub fn unify_atoms(&mut self, a: &Atom, b: &Atom) -> bool {
        if a.pred != b.pred || a.args.len() != b.args.len() {
            return false;
        }
        let m = self.mark();
        let ok = a
            .args
            .iter()
            .zip(&b.args)
            .all(|(s, t)| self.unify_inner(s, t));
        if !ok {
            self.undo(m);
        }
        ok
    }

    fn unify_inner(&mut self, s: &Term, t: &Term) -> bool {
        let s = self.walk(s).clone();
        let t = self.walk(t).clone();
        match (&s, &t) {
            (Term::Var(a), Term::Var(b)) if a.id == b.id => true,
            (Term::Var(a), _) if a.is_meta() => self.bind(a, &t),
            (_, Term::Var(b)) if b.is_meta() => self.bind(b, &s),
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| self.unify_inner(x, y))
            }
            _ => false,
        }
    }

    fn bind(&mut self, m: &Var, t: &Term) -> bool {
        let level = self.var_level(m);
        if !self.admissible(t, m.id, level) {
            return false;
        }
        self.bindings.insert(m.id, t.clone());
        self.trail.push(Undo::Bind(m.id));
        true
    }

    /// Occurs check and level check, lowering younger metavariables.
    fn admissible(&mut self, t: &Term, id: VarId, level: u32) -> bool {
        let t = self.walk(t).clone();
        match &t {
            Term::Var(v) => match v.role {
                VarRole::Meta(_) => {
                    if v.id == id {
                        return false;
                    }
                    let own = self.var_level(v);
                    if own > level {
                        let prev = self.lowered.insert(v.id, level);
                        self.trail.push(Undo::Level(v.id, prev));
                    }
                    true
                }
                VarRole::Eigen(l) => l <= level,
                VarRole::Bound => true,
            },
            Term::App(_, args) => args.iter().all(|a| self.admissible(a, id, level)),
        }
    }
}
