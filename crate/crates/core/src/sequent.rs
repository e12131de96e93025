//! G-Forum sequents and multiset algebra over their contexts.

use std::fmt;

use thiserror::Error;

use crate::syntax::{
    alpha_eq_atom, alpha_eq_formula, alpha_eq_goal, print_atom, print_formula, print_goal, Atom,
    Formula, Goal, Namer,
};

/// Elements of a context: compared up to renaming of bound variables.
pub trait Member: Clone {
    fn same(&self, other: &Self) -> bool;
    fn show(&self, namer: &Namer) -> String;
}

impl Member for Goal {
    fn same(&self, other: &Goal) -> bool {
        alpha_eq_goal(self, other)
    }

    fn show(&self, namer: &Namer) -> String {
        print_goal(self, namer)
    }
}

impl Member for Formula {
    fn same(&self, other: &Formula) -> bool {
        alpha_eq_formula(self, other)
    }

    fn show(&self, namer: &Namer) -> String {
        print_formula(self, namer)
    }
}

impl Member for Atom {
    fn same(&self, other: &Atom) -> bool {
        alpha_eq_atom(self, other)
    }

    fn show(&self, namer: &Namer) -> String {
        print_atom(self, namer)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("multiset difference underflow: missing {0}")]
pub struct Underflow(pub String);

pub fn mset_union<T: Member>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().chain(b).cloned().collect()
}

pub fn mset_member<T: Member>(x: &T, a: &[T]) -> bool {
    a.iter().any(|y| y.same(x))
}

pub fn mset_count<T: Member>(x: &T, a: &[T]) -> usize {
    a.iter().filter(|y| y.same(x)).count()
}

/// Removes one occurrence of `x`, if present.
pub fn mset_remove<T: Member>(a: &mut Vec<T>, x: &T) -> bool {
    match a.iter().position(|y| y.same(x)) {
        Some(i) => {
            a.remove(i);
            true
        }
        None => false,
    }
}

/// `a` minus `b`, occurrence by occurrence.
pub fn mset_diff<T: Member>(a: &[T], b: &[T]) -> Result<Vec<T>, Underflow> {
    let mut out = a.to_vec();
    for x in b {
        if !mset_remove(&mut out, x) {
            return Err(Underflow(x.show(&Namer::default())));
        }
    }
    Ok(out)
}

pub fn mset_eq<T: Member>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len() && mset_diff(a, b).is_ok()
}

/// Classical program, linear program and atomic context.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Contexts {
    pub psi: Vec<Goal>,
    pub gamma: Vec<Goal>,
    pub lambda: Vec<Atom>,
}

impl Contexts {
    pub fn new(psi: Vec<Goal>, gamma: Vec<Goal>, lambda: Vec<Atom>) -> Contexts {
        Contexts { psi, gamma, lambda }
    }

    /// Context with only a classical program.
    pub fn classical(psi: Vec<Goal>) -> Contexts {
        Contexts {
            psi,
            ..Contexts::default()
        }
    }

    pub fn is_linear_empty(&self) -> bool {
        self.gamma.is_empty() && self.lambda.is_empty()
    }

    pub fn same(&self, other: &Contexts) -> bool {
        mset_eq(&self.psi, &other.psi)
            && mset_eq(&self.gamma, &other.gamma)
            && mset_eq(&self.lambda, &other.lambda)
    }
}

/// A state sequent when `focus` is absent, otherwise a sequent with a
/// single goal on the right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GSequent {
    pub ctx: Contexts,
    pub focus: Option<Goal>,
}

impl GSequent {
    pub fn state(ctx: Contexts) -> GSequent {
        GSequent { ctx, focus: None }
    }

    pub fn focused(ctx: Contexts, g: Goal) -> GSequent {
        GSequent {
            ctx,
            focus: Some(g),
        }
    }

    pub fn is_state(&self) -> bool {
        self.focus.is_none()
    }

    pub fn show(&self, namer: &Namer) -> String {
        let list = |xs: Vec<String>| xs.join(", ");
        let focus = self
            .focus
            .as_ref()
            .map(|g| print_goal(g, namer))
            .unwrap_or_default();
        format!(
            "[{} ; {}] |- [{} ; {}]",
            list(self.ctx.psi.iter().map(|g| print_goal(g, namer)).collect()),
            list(
                self.ctx
                    .gamma
                    .iter()
                    .map(|g| print_goal(g, namer))
                    .collect()
            ),
            focus,
            list(
                self.ctx
                    .lambda
                    .iter()
                    .map(|a| print_atom(a, namer))
                    .collect()
            ),
        )
    }
}

impl fmt::Display for GSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.show(&Namer::default()))
    }
}

/// Component-wise multiset equality up to renaming of bound variables.
pub fn seq_eq(s: &GSequent, t: &GSequent) -> bool {
    let focus = match (&s.focus, &t.focus) {
        (None, None) => true,
        (Some(g), Some(h)) => alpha_eq_goal(g, h),
        _ => false,
    };
    focus && s.ctx.same(&t.ctx)
}
